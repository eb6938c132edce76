//! Second-quantized two-particle states over path/spin modes and the hybrid
//! beam-splitter network that produces the spin-path entangled state.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::sync::Arc;

use crate::linalg::DenseMatrix;
use crate::state::{DofDomain, Label, Space, StateVector, Statistics};
use crate::{Error, Result, C64, PRUNE_TOL};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Path {
    L,
    D,
    R,
    U,
}

impl Path {
    pub const ALL: [Path; 4] = [Path::L, Path::D, Path::R, Path::U];

    fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        ["L", "D", "R", "U"][self.index()]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Spin {
    Down,
    Up,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::Down => Spin::Up,
            Spin::Up => Spin::Down,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Spin::Down => "down",
            Spin::Up => "up",
        }
    }
}

/// One of the 8 `(path, spin)` creation operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub path: Path,
    pub spin: Spin,
}

impl Mode {
    pub const COUNT: usize = 8;

    pub fn new(path: Path, spin: Spin) -> Self {
        Self { path, spin }
    }

    pub fn index(self) -> usize {
        self.path.index() * 2 + self.spin as usize
    }

    pub fn from_index(i: usize) -> Self {
        let spin = if i.is_multiple_of(2) {
            Spin::Down
        } else {
            Spin::Up
        };
        Self::new(Path::ALL[i / 2], spin)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "b+({},{})", self.spin.name(), self.path.name())
    }
}

/// Two-particle sector polynomial `sum c_ij b+_i b+_j |0>` with `i <= j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LadderPolynomial {
    statistics: Statistics,
    terms: BTreeMap<(usize, usize), C64>,
}

impl LadderPolynomial {
    pub fn new(statistics: Statistics) -> Self {
        Self {
            statistics,
            terms: BTreeMap::new(),
        }
    }

    /// `coef * b+_a b+_b |0>`.
    pub fn monomial(statistics: Statistics, a: Mode, b: Mode, coef: C64) -> Self {
        let mut p = Self::new(statistics);
        p.add(a.index(), b.index(), coef);
        p
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    fn add(&mut self, i: usize, j: usize, coef: C64) {
        if i == j && self.statistics == Statistics::Fermion {
            return;
        }
        let (key, sign) = if i <= j {
            ((i, j), 1.0)
        } else {
            ((j, i), self.statistics.eta())
        };
        let slot = self.terms.entry(key).or_insert(ZERO);
        *slot += coef * sign;
        if slot.norm() < PRUNE_TOL {
            self.terms.remove(&key);
        }
    }

    pub fn coefficient(&self, a: Mode, b: Mode) -> C64 {
        let (i, j) = (a.index(), b.index());
        if i <= j {
            self.terms.get(&(i, j)).copied().unwrap_or(ZERO)
        } else {
            self.terms.get(&(j, i)).copied().unwrap_or(ZERO) * self.statistics.eta()
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = ((Mode, Mode), C64)> + '_ {
        self.terms
            .iter()
            .map(|(&(i, j), &c)| ((Mode::from_index(i), Mode::from_index(j)), c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Norm squared; a doubly-occupied mode contributes `(1 + eta)|c|^2`.
    pub fn norm_sqr(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&(i, j), c)| {
                let w = if i == j {
                    1.0 + self.statistics.eta()
                } else {
                    1.0
                };
                w * c.norm_sqr()
            })
            .sum()
    }
}

/// Linear map on creation operators: column `j` holds the image of `b+_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearModeTransform {
    matrix: DenseMatrix,
}

impl LinearModeTransform {
    pub fn identity() -> Self {
        Self {
            matrix: DenseMatrix::identity(Mode::COUNT),
        }
    }

    pub fn from_matrix(matrix: DenseMatrix) -> Result<Self> {
        if matrix.rows() != Mode::COUNT || matrix.cols() != Mode::COUNT {
            return Err(Error::Shape("mode transforms are 8x8".into()));
        }
        Ok(Self { matrix })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Image of `b+_m` as `(mode, amplitude)` pairs.
    pub fn image(&self, m: Mode) -> Vec<(Mode, C64)> {
        let j = m.index();
        (0..Mode::COUNT)
            .filter(|&i| self.matrix[(i, j)] != ZERO)
            .map(|i| (Mode::from_index(i), self.matrix[(i, j)]))
            .collect()
    }

    /// `self` applied after `first`.
    pub fn after(&self, first: &LinearModeTransform) -> Self {
        Self {
            matrix: &self.matrix * &first.matrix,
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        (&self.matrix.adjoint() * &self.matrix).max_abs_diff(&DenseMatrix::identity(Mode::COUNT))
    }
}

/// Hybrid beam splitter between two paths: the transmitted branch keeps its
/// spin, the reflected branch picks up `i` and flips spin.
pub fn hbs_transform(a: Path, b: Path) -> Result<LinearModeTransform> {
    if a == b {
        return Err(Error::Domain(format!(
            "beam splitter needs two paths, got {} twice",
            a.name()
        )));
    }
    let mut m = DenseMatrix::identity(Mode::COUNT);
    let t = C64::new(FRAC_1_SQRT_2, 0.0);
    let r = C64::new(0.0, FRAC_1_SQRT_2);
    for (from, to) in [(a, b), (b, a)] {
        for spin in [Spin::Down, Spin::Up] {
            let j = Mode::new(from, spin).index();
            m[(j, j)] = t;
            m[(Mode::new(to, spin.flipped()).index(), j)] = r;
        }
    }
    Ok(LinearModeTransform { matrix: m })
}

/// Phases applied by the two parties (radians).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PhaseConfig {
    pub phi_l: f64,
    pub phi_d: f64,
    pub phi_r: f64,
    pub phi_u: f64,
}

impl PhaseConfig {
    pub fn new(phi_l: f64, phi_d: f64, phi_r: f64, phi_u: f64) -> Self {
        Self {
            phi_l,
            phi_d,
            phi_r,
            phi_u,
        }
    }

    /// Parses `L,D,R,U` as four comma-separated radians.
    pub fn parse(s: &str) -> Result<Self> {
        let v: Vec<f64> = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Format(format!("bad phase {p:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        match v.as_slice() {
            &[l, d, r, u] => Ok(Self::new(l, d, r, u)),
            _ => Err(Error::Format(format!("expected 4 phases, got {}", v.len()))),
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.phi_l, self.phi_d, self.phi_r, self.phi_u]
    }

    /// `exp(i (phi_R + phi_L))`.
    pub fn kappa1(&self) -> C64 {
        C64::from_polar(1.0, self.phi_r + self.phi_l)
    }

    /// `exp(i (phi_D + phi_U))`.
    pub fn kappa2(&self) -> C64 {
        C64::from_polar(1.0, self.phi_d + self.phi_u)
    }

    /// `(phi_D + phi_U - phi_R - phi_L) / 2`.
    pub fn phi(&self) -> f64 {
        (self.phi_d + self.phi_u - self.phi_r - self.phi_l) / 2.0
    }
}

/// Spin-dependent phase shifters on `down R`, `up U`, `down L`, `up D`.
pub fn phase_transform(config: &PhaseConfig) -> LinearModeTransform {
    let mut m = DenseMatrix::identity(Mode::COUNT);
    for (mode, phase) in [
        (Mode::new(Path::R, Spin::Down), config.phi_r),
        (Mode::new(Path::U, Spin::Up), config.phi_u),
        (Mode::new(Path::L, Spin::Down), config.phi_l),
        (Mode::new(Path::D, Spin::Up), config.phi_d),
    ] {
        let i = mode.index();
        m[(i, i)] = C64::from_polar(1.0, phase);
    }
    LinearModeTransform { matrix: m }
}

/// Substitutes `b+_j -> sum_i T_ij b+_i` into every monomial.
pub fn apply_transform(poly: &LadderPolynomial, t: &LinearModeTransform) -> LadderPolynomial {
    let mut out = LadderPolynomial::new(poly.statistics);
    for (&(i, j), &c) in &poly.terms {
        for k in 0..Mode::COUNT {
            let a = t.matrix[(k, i)];
            if a == ZERO {
                continue;
            }
            for l in 0..Mode::COUNT {
                let b = t.matrix[(l, j)];
                if b != ZERO {
                    out.add(k, l, c * a * b);
                }
            }
        }
    }
    out
}

/// Whole network: beam splitters `(R,D)` and `(L,U)`, phase shifters, then
/// beam splitters `(R,U)` and `(L,D)`.
pub fn li_network(config: &PhaseConfig) -> LinearModeTransform {
    let first = hbs_transform(Path::R, Path::D)
        .expect("distinct paths")
        .after(&hbs_transform(Path::L, Path::U).expect("distinct paths"));
    let second = hbs_transform(Path::R, Path::U)
        .expect("distinct paths")
        .after(&hbs_transform(Path::L, Path::D).expect("distinct paths"));
    second.after(&phase_transform(config)).after(&first)
}

/// `b+(down,R) b+(down,L) |0>`.
pub fn li_input() -> LadderPolynomial {
    LadderPolynomial::monomial(
        Statistics::Boson,
        Mode::new(Path::R, Spin::Down),
        Mode::new(Path::L, Spin::Down),
        C64::new(1.0, 0.0),
    )
}

/// Two locations `s1`, `s2`; DoF 1 is path `L, D, R, U`, DoF 2 is spin
/// `down, up`.
pub fn li_space() -> Arc<Space> {
    Arc::new(
        Space::new(
            ["s1", "s2"],
            vec![
                DofDomain::new("path", ["L", "D", "R", "U"]).expect("valid domain"),
                DofDomain::new("spin", ["down", "up"]).expect("valid domain"),
            ],
        )
        .expect("valid space"),
    )
}

/// Label of a mode: paths `L`, `D` exit at `s1`, paths `R`, `U` at `s2`.
pub fn mode_label(mode: Mode) -> Label {
    let loc = match mode.path {
        Path::L | Path::D => 0,
        Path::R | Path::U => 1,
    };
    Label::new(loc, vec![(1, mode.path.index()), (2, mode.spin as usize)])
}

/// First-quantized form: `b+_a b+_b |0>` becomes `|label(a), label(b)>`.
pub fn to_state_vector(poly: &LadderPolynomial, space: Arc<Space>) -> Result<StateVector> {
    StateVector::from_terms(
        poly.statistics,
        space,
        poly.iter()
            .map(|((a, b), c)| (mode_label(a), mode_label(b), c)),
    )
}

/// Runs the network on [`li_input`] and converts to a [`StateVector`].
pub fn build_li_state(config: &PhaseConfig) -> Result<StateVector> {
    let out = apply_transform(&li_input(), &li_network(config));
    to_state_vector(&out, li_space())
}
