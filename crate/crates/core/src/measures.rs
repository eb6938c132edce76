//! Two-qubit entanglement measures and monogamy checks.

use serde::Serialize;

use crate::linalg::{
    general_eigs, hermitian_eigs, partial_transpose, trace_out_factor, DenseMatrix, Subsystem,
};
use crate::{Error, Result, C64};

/// Tolerance for Hermiticity, trace and positivity when validating inputs.
pub const DENSITY_TOL: f64 = 1e-8;

/// Slack allowed on monogamy inequalities.
pub const MONOGAMY_SLACK: f64 = 1e-9;

/// Eigenvalues of `rho * rho~` in `[-CLAMP_TOL, 0)` are treated as zero.
pub const CLAMP_TOL: f64 = 1e-10;

/// Eigenvalues of `rho * rho~` at or below this are treated as zero. For a
/// unit-trace input they are bounded by 1, and rounding leaves exact zeros at
/// ~1e-16 whose square roots would otherwise shift the concurrence by ~1e-8.
pub const R_NOISE_FLOOR: f64 = 1e-14;

fn sigma_yy() -> DenseMatrix {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let sy = DenseMatrix::from_rows(&[vec![z, -i], vec![i, z]]).expect("2x2");
    sy.kron(&sy)
}

fn require_4x4(m: &DenseMatrix) -> Result<()> {
    if m.rows() != 4 || m.cols() != 4 {
        return Err(Error::Shape(format!(
            "expected 4x4, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    Ok(())
}

/// Checks Hermiticity, unit trace and positivity within [`DENSITY_TOL`].
pub fn validate_density(m: &DenseMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::Shape(format!(
            "density must be square, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.hermiticity_defect() > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!(
            "not Hermitian (defect {:e})",
            m.hermiticity_defect()
        )));
    }
    let t = m.trace();
    if (t - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
        return Err(Error::InvalidDensity(format!("trace {t} is not 1")));
    }
    let min = hermitian_eigs(m)?.values[0];
    if min < -DENSITY_TOL {
        return Err(Error::InvalidDensity(format!(
            "negative eigenvalue {min:e}"
        )));
    }
    Ok(())
}

/// `(sigma_y (x) sigma_y) rho* (sigma_y (x) sigma_y)`.
pub fn spin_flip(rho: &DenseMatrix) -> Result<DenseMatrix> {
    require_4x4(rho)?;
    let yy = sigma_yy();
    Ok(&(&yy * &rho.conj()) * &yy)
}

/// `R = rho * spin_flip(rho)`.
pub fn r_matrix(rho: &DenseMatrix) -> Result<DenseMatrix> {
    rho.matmul(&spin_flip(rho)?)
}

/// Eigenvalues of `R`, sorted by decreasing real part.
pub fn r_eigenvalues(rho: &DenseMatrix) -> Result<Vec<C64>> {
    let mut ev = general_eigs(&r_matrix(rho)?)?;
    ev.sort_by(|a, b| b.re.total_cmp(&a.re));
    Ok(ev)
}

/// Wootters concurrence `max(0, sqrt(l1) - sqrt(l2) - sqrt(l3) - sqrt(l4))`
/// with `l1 >= l2 >= l3 >= l4` the eigenvalues of `R`.
pub fn concurrence(rho: &DenseMatrix) -> Result<f64> {
    require_4x4(rho)?;
    validate_density(rho)?;
    let ev = r_eigenvalues(rho)?;
    let mut roots: Vec<f64> = ev
        .iter()
        .map(|z| {
            let l = z.re;
            if l < -CLAMP_TOL {
                Err(Error::InvalidDensity(format!(
                    "R has negative eigenvalue {l:e}"
                )))
            } else if l <= R_NOISE_FLOOR {
                Ok(0.0)
            } else {
                Ok(l.sqrt())
            }
        })
        .collect::<Result<_>>()?;
    roots.sort_by(|a, b| b.total_cmp(a));
    Ok((roots[0] - roots[1] - roots[2] - roots[3]).max(0.0))
}

/// Negativity (sum of |negative eigenvalues| of the partial transpose over
/// the second qubit) and log-negativity `log2(1 + 2N)`.
pub fn negativity_lognegativity(rho: &DenseMatrix) -> Result<(f64, f64)> {
    require_4x4(rho)?;
    validate_density(rho)?;
    let ev = partial_transpose_eigenvalues(rho)?;
    let n: f64 = ev.iter().filter(|&&l| l < 0.0).map(|l| -l).sum();
    Ok((n, (1.0 + 2.0 * n).log2()))
}

/// Ascending eigenvalues of the partial transpose over the second qubit.
pub fn partial_transpose_eigenvalues(rho: &DenseMatrix) -> Result<Vec<f64>> {
    require_4x4(rho)?;
    Ok(hermitian_eigs(&partial_transpose(rho, (2, 2), Subsystem::B)?)?.values)
}

/// `-sum l ln l` over the eigenvalues (natural log, `0 ln 0 = 0`).
pub fn von_neumann_entropy(rho: &DenseMatrix) -> Result<f64> {
    validate_density(rho)?;
    let s: f64 = hermitian_eigs(rho)?
        .values
        .iter()
        .filter(|&&l| l > 0.0)
        .map(|&l| -l * l.ln())
        .sum();
    Ok(s.max(0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonogamyReport {
    pub measure: String,
    pub e_ab: f64,
    pub e_ac: f64,
    pub e_a_bc: f64,
    pub bound: f64,
    pub holds: bool,
    pub maximal_violation: bool,
}

impl MonogamyReport {
    /// `bound - e_ab - e_ac`; negative means violation.
    pub fn slack(&self) -> f64 {
        self.bound - self.e_ab - self.e_ac
    }
}

/// CKW check on a pure three-qubit state, amplitudes indexed `4a + 2b + c`.
/// The bound is the pure-state tangle `4 det rho_A`.
pub fn ckw_check(psi: &[C64]) -> Result<MonogamyReport> {
    if psi.len() != 8 {
        return Err(Error::Shape(format!(
            "expected 8 amplitudes, got {}",
            psi.len()
        )));
    }
    let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "state is not normalized (norm^2 = {norm})"
        )));
    }
    let rho = DenseMatrix::outer(psi);
    let rho_ab = trace_out_factor(&rho, &[2, 2, 2], 2)?;
    let rho_ac = trace_out_factor(&rho, &[2, 2, 2], 1)?;
    let rho_a = trace_out_factor(&rho_ab, &[2, 2], 1)?;
    let e_ab = concurrence(&rho_ab)?.powi(2);
    let e_ac = concurrence(&rho_ac)?.powi(2);
    let bound = (4.0 * rho_a.determinant()?.re).max(0.0);
    Ok(MonogamyReport {
        measure: "squared concurrence".into(),
        e_ab,
        e_ac,
        e_a_bc: bound,
        bound,
        holds: e_ab + e_ac <= bound + MONOGAMY_SLACK,
        maximal_violation: false,
    })
}

/// Monogamy verdict for two pairwise values of a measure whose maximum is
/// `e_max` (also used as the bound).
pub fn moe_report(measure: &str, e1: f64, e2: f64, e_max: f64) -> Result<MonogamyReport> {
    for e in [e1, e2] {
        if e < 0.0 || e.is_nan() {
            return Err(Error::Domain(format!("pair value {e} is negative")));
        }
        if e > e_max + MONOGAMY_SLACK {
            return Err(Error::Domain(format!(
                "pair value {e} exceeds the maximum {e_max}"
            )));
        }
    }
    Ok(MonogamyReport {
        measure: measure.into(),
        e_ab: e1,
        e_ac: e2,
        e_a_bc: e_max,
        bound: e_max,
        holds: e1 + e2 <= e_max + MONOGAMY_SLACK,
        maximal_violation: (e1 - e_max).abs() <= 1e-6 && (e2 - e_max).abs() <= 1e-6,
    })
}
