//! Density operators over canonical two-particle kets, post-selection
//! projectors, particle trace-out and DoF trace-out for distinguishable and
//! indistinguishable particles.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::linalg::{trace_out_factor, DenseMatrix};
use crate::state::{
    canonicalize, ket_norm_sqr, label_overlap, symmetric_inner_product, CanonicalKet, Label, Space,
    StateVector, Statistics,
};
use crate::{Error, Result, C64, DEGENERATE_TOL, PRUNE_TOL};

const ZERO: C64 = C64::new(0.0, 0.0);

/// Sparse two-particle operator `sum rho_kb |k><b|`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    statistics: Statistics,
    space: Arc<Space>,
    entries: BTreeMap<(CanonicalKet, CanonicalKet), C64>,
}

impl DensityOperator {
    pub fn new(statistics: Statistics, space: Arc<Space>) -> Self {
        Self {
            statistics,
            space,
            entries: BTreeMap::new(),
        }
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(CanonicalKet, CanonicalKet), &C64)> {
        self.entries.iter()
    }

    pub fn get(&self, ket: &CanonicalKet, bra: &CanonicalKet) -> C64 {
        self.entries
            .get(&(ket.clone(), bra.clone()))
            .copied()
            .unwrap_or(ZERO)
    }

    fn accumulate(&mut self, ket: CanonicalKet, bra: CanonicalKet, value: C64) {
        let key = (ket, bra);
        let slot = self.entries.entry(key.clone()).or_insert(ZERO);
        *slot += value;
        if slot.norm() < PRUNE_TOL {
            self.entries.remove(&key);
        }
    }

    /// Adds `value |k1, k2><b1, b2|` given in arbitrary particle order. Labels
    /// may be partial.
    pub fn add_entry(
        &mut self,
        ket: (Label, Label),
        bra: (Label, Label),
        value: C64,
    ) -> Result<()> {
        for l in [&ket.0, &ket.1, &bra.0, &bra.1] {
            self.space.validate_label(l)?;
        }
        let (Some((k, sk)), Some((b, sb))) = (
            canonicalize(ket.0, ket.1, self.statistics),
            canonicalize(bra.0, bra.1, self.statistics),
        ) else {
            return Ok(());
        };
        self.accumulate(k, b, value * sk * sb);
        Ok(())
    }

    /// `Tr rho = sum_kb rho_kb <b|k>`.
    pub fn trace(&self) -> C64 {
        self.entries
            .iter()
            .map(|((k, b), v)| v * symmetric_inner_product(b, k, self.statistics, &self.space))
            .sum()
    }

    /// Largest `|rho_kb - conj(rho_bk)|`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|((k, b), v)| (v - self.get(b, k).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v *= factor;
        }
        out.entries.retain(|_, v| v.norm() >= PRUNE_TOL);
        out
    }

    /// `<x|rho|y>` under the symmetric inner product.
    pub fn matrix_element(&self, x: &CanonicalKet, y: &CanonicalKet) -> C64 {
        let (st, sp) = (self.statistics, &*self.space);
        self.entries
            .iter()
            .map(|((k, b), v)| {
                v * symmetric_inner_product(x, k, st, sp) * symmetric_inner_product(b, y, st, sp)
            })
            .sum()
    }

    /// Largest entrywise difference between stored coefficients.
    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        let keys: BTreeSet<&(CanonicalKet, CanonicalKet)> =
            self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|(k, b)| (self.get(k, b) - other.get(k, b)).norm())
            .fold(0.0, f64::max)
    }

    /// Distinct kets appearing on either side, in canonical order.
    pub fn support(&self) -> Vec<CanonicalKet> {
        let set: BTreeSet<&CanonicalKet> = self.entries.keys().flat_map(|(k, b)| [k, b]).collect();
        set.into_iter().cloned().collect()
    }

    /// Operator matrix in the orthonormalized support basis `|k>/||k||`.
    pub fn operator_matrix(&self) -> Result<(Vec<CanonicalKet>, DenseMatrix)> {
        if !self.space.is_orthonormal() {
            return Err(Error::Domain(
                "operator matrix needs an orthonormal location set".into(),
            ));
        }
        let support = self.support();
        let index: BTreeMap<&CanonicalKet, usize> =
            support.iter().enumerate().map(|(i, k)| (k, i)).collect();
        let n = support.len();
        let mut m = DenseMatrix::zeros(n, n);
        for ((k, b), v) in &self.entries {
            let w = (ket_norm_sqr(k, self.statistics) * ket_norm_sqr(b, self.statistics)).sqrt();
            m[(index[k], index[b])] = v * w;
        }
        Ok((support, m))
    }
}

/// `|Psi><Psi|`.
pub fn outer_product(state: &StateVector) -> DensityOperator {
    let mut rho = DensityOperator::new(state.statistics(), state.space().clone());
    for (k, a) in state.iter() {
        for (b, c) in state.iter() {
            rho.accumulate(k.clone(), b.clone(), a * c.conj());
        }
    }
    rho
}

/// Rescales to unit trace.
pub fn normalize_density(rho: &DensityOperator) -> Result<DensityOperator> {
    let t = rho.trace();
    if t.norm() < DEGENERATE_TOL {
        return Err(Error::DegenerateTrace(t.norm()));
    }
    let mut out = rho.clone();
    for v in out.entries.values_mut() {
        *v /= t;
    }
    Ok(out)
}

/// Allowed eigenvalues for each `(location, dof)` pair. Unlisted pairs allow
/// the whole declared domain.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocalDomains {
    allowed: BTreeMap<(usize, usize), Vec<usize>>,
}

impl LocalDomains {
    pub fn full() -> Self {
        Self::default()
    }

    /// Restricts `dof` at `location` to the named eigenvalues (kept in
    /// declared order).
    pub fn restrict(
        mut self,
        space: &Space,
        location: &str,
        dof: &str,
        eigenvalues: &[&str],
    ) -> Result<Self> {
        let loc = space.location_index(location)?;
        let d = space.dof_index(dof)?;
        let mut idx = eigenvalues
            .iter()
            .map(|e| space.eigen_index(d, e))
            .collect::<Result<Vec<_>>>()?;
        idx.sort_unstable();
        idx.dedup();
        if idx.is_empty() {
            return Err(Error::Domain("restriction leaves no eigenvalue".into()));
        }
        self.allowed.insert((loc, d), idx);
        Ok(self)
    }

    pub fn values(&self, space: &Space, loc: usize, dof: usize) -> Vec<usize> {
        match self.allowed.get(&(loc, dof)) {
            Some(v) => v.clone(),
            None => (0..space.dof(dof).map(|d| d.len()).unwrap_or(0)).collect(),
        }
    }

    /// Full labels at `loc` allowed by the restriction, in enumeration order.
    pub fn labels(&self, space: &Space, loc: usize) -> Vec<Label> {
        labels_with_dofs(
            space,
            loc,
            &(1..=space.num_dofs()).collect::<Vec<_>>(),
            self,
        )
    }
}

fn labels_with_dofs(
    space: &Space,
    loc: usize,
    dofs: &[usize],
    domains: &LocalDomains,
) -> Vec<Label> {
    let mut out = vec![Vec::new()];
    for &d in dofs {
        let values = domains.values(space, loc, d);
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<(usize, usize)>| {
                values.iter().map(move |&e| {
                    let mut p = prefix.clone();
                    p.push((d, e));
                    p
                })
            })
            .collect();
    }
    out.into_iter().map(|dofs| Label::new(loc, dofs)).collect()
}

/// Subspace spanned by a list of distinct kets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectorSpec {
    kets: Vec<CanonicalKet>,
}

impl ProjectorSpec {
    pub fn new(kets: Vec<CanonicalKet>) -> Result<Self> {
        let distinct: BTreeSet<&CanonicalKet> = kets.iter().collect();
        if distinct.len() != kets.len() {
            return Err(Error::Domain("projector kets must be distinct".into()));
        }
        Ok(Self { kets })
    }

    pub fn kets(&self) -> &[CanonicalKet] {
        &self.kets
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }
}

/// Kets with exactly one particle at each of two locations, all DoF values.
pub fn build_one_per_location_projector(
    space: &Space,
    statistics: Statistics,
    loc_a: usize,
    loc_b: usize,
) -> Result<ProjectorSpec> {
    build_restricted_projector(space, statistics, loc_a, loc_b, &LocalDomains::full())
}

/// Like [`build_one_per_location_projector`] with per-location value subsets.
pub fn build_restricted_projector(
    space: &Space,
    statistics: Statistics,
    loc_a: usize,
    loc_b: usize,
    domains: &LocalDomains,
) -> Result<ProjectorSpec> {
    if loc_a == loc_b {
        return Err(Error::Domain(
            "projector needs two distinct locations".into(),
        ));
    }
    for l in [loc_a, loc_b] {
        if l >= space.locations().len() {
            return Err(Error::Domain(format!("undeclared location index {l}")));
        }
    }
    let mut kets = Vec::new();
    for a in domains.labels(space, loc_a) {
        for b in domains.labels(space, loc_b) {
            if let Some((k, _)) = canonicalize(a.clone(), b, statistics) {
                kets.push(k);
            }
        }
    }
    ProjectorSpec::new(kets)
}

/// `Pi rho Pi / Tr(Pi rho)` with `Pi = sum_k |k><k| / <k|k>`. Returns the
/// normalized operator and the weight `Tr(Pi rho)`.
pub fn apply_projector(
    rho: &DensityOperator,
    proj: &ProjectorSpec,
) -> Result<(DensityOperator, f64)> {
    let st = rho.statistics;
    let mut out = DensityOperator::new(st, rho.space.clone());
    let norms: Vec<f64> = proj
        .kets
        .iter()
        .map(|k| symmetric_inner_product(k, k, st, &rho.space).re)
        .collect();
    for (i, k) in proj.kets.iter().enumerate() {
        for (j, l) in proj.kets.iter().enumerate() {
            let v = rho.matrix_element(k, l) / (norms[i] * norms[j]);
            if v.norm() >= PRUNE_TOL {
                out.accumulate(k.clone(), l.clone(), v);
            }
        }
    }
    let weight = out.trace().re;
    if weight < DEGENERATE_TOL {
        return Err(Error::PostSelectionImpossible(weight));
    }
    Ok((out.scaled(1.0 / weight), weight))
}

/// Post-selects a pure state; returns the normalized projected state and the
/// success weight.
pub fn project_state(state: &StateVector, proj: &ProjectorSpec) -> Result<(StateVector, f64)> {
    let st = state.statistics();
    let sp = state.space();
    let mut out = StateVector::new(st, sp.clone());
    for k in &proj.kets {
        let nk = symmetric_inner_product(k, k, st, sp).re;
        let overlap: C64 = state
            .iter()
            .map(|(l, a)| a * symmetric_inner_product(k, l, st, sp))
            .sum();
        out.add_term(k.first().clone(), k.second().clone(), overlap / nk)?;
    }
    let weight = out.inner(&out)?.re;
    if weight < DEGENERATE_TOL {
        return Err(Error::PostSelectionImpossible(weight));
    }
    Ok((out.scaled(C64::new(1.0 / weight.sqrt(), 0.0)), weight))
}

/// Single-particle operator `sum rho_xy |x><y|`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneParticleDensity {
    space: Arc<Space>,
    entries: BTreeMap<(Label, Label), C64>,
}

impl OneParticleDensity {
    pub fn new(space: Arc<Space>) -> Self {
        Self {
            space,
            entries: BTreeMap::new(),
        }
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    pub fn add(&mut self, ket: Label, bra: Label, value: C64) {
        let key = (ket, bra);
        let slot = self.entries.entry(key.clone()).or_insert(ZERO);
        *slot += value;
        if slot.norm() < PRUNE_TOL {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, ket: &Label, bra: &Label) -> C64 {
        self.entries
            .get(&(ket.clone(), bra.clone()))
            .copied()
            .unwrap_or(ZERO)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Label, Label), &C64)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn trace(&self) -> C64 {
        self.entries
            .iter()
            .map(|((x, y), v)| v * label_overlap(&self.space, y, x))
            .sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t.norm() < DEGENERATE_TOL {
            return Err(Error::DegenerateTrace(t.norm()));
        }
        let mut out = self.clone();
        for v in out.entries.values_mut() {
            *v /= t;
        }
        Ok(out)
    }

    pub fn support(&self) -> Vec<Label> {
        let set: BTreeSet<&Label> = self.entries.keys().flat_map(|(x, y)| [x, y]).collect();
        set.into_iter().cloned().collect()
    }

    /// Dense matrix over `order` (orthonormal labels assumed).
    pub fn to_matrix(&self, order: &[Label]) -> Result<DenseMatrix> {
        let index: BTreeMap<&Label, usize> =
            order.iter().enumerate().map(|(i, l)| (l, i)).collect();
        let mut m = DenseMatrix::zeros(order.len(), order.len());
        for ((x, y), v) in &self.entries {
            match (index.get(x), index.get(y)) {
                (Some(&i), Some(&j)) => m[(i, j)] = *v,
                _ => {
                    return Err(Error::Shape(
                        "support label missing from the requested order".into(),
                    ))
                }
            }
        }
        Ok(m)
    }

    pub fn max_abs_diff(&self, other: &OneParticleDensity) -> f64 {
        let keys: BTreeSet<&(Label, Label)> =
            self.entries.keys().chain(other.entries.keys()).collect();
        keys.into_iter()
            .map(|(x, y)| (self.get(x, y) - other.get(x, y)).norm())
            .fold(0.0, f64::max)
    }
}

/// `<probe|p, q> = <probe|p>|q> + eta <probe|q>|p>` as one-particle terms.
fn contract_ket(space: &Space, eta: f64, probe: &Label, ket: &CanonicalKet) -> Vec<(Label, C64)> {
    let mut out = Vec::with_capacity(2);
    let o1 = label_overlap(space, probe, ket.first());
    if o1 != ZERO {
        out.push((ket.second().clone(), o1));
    }
    let o2 = label_overlap(space, probe, ket.second());
    if o2 != ZERO {
        out.push((ket.first().clone(), o2 * eta));
    }
    out
}

/// Particle trace-out. Without a region this is `1/2 sum_k <psi_k|rho|psi_k>`
/// over a complete single-particle basis (unnormalized). With a region, the
/// probes are restricted to that location and the result is normalized to
/// unit trace; the returned operator describes the remaining particle.
pub fn particle_trace(rho: &DensityOperator, region: Option<usize>) -> Result<OneParticleDensity> {
    let space = &*rho.space;
    if let Some(r) = region {
        if r >= space.locations().len() {
            return Err(Error::Domain(format!("undeclared location index {r}")));
        }
    }
    let eta = rho.statistics.eta();
    let dof_sets: BTreeSet<Vec<usize>> = rho
        .support()
        .iter()
        .flat_map(|k| {
            k.particles()
                .map(|l| l.dofs().iter().map(|&(d, _)| d).collect::<Vec<_>>())
        })
        .collect();
    let locs: Vec<usize> = match region {
        Some(r) => vec![r],
        None => (0..space.locations().len()).collect(),
    };
    let mut probes = Vec::new();
    for set in &dof_sets {
        for &l in &locs {
            probes.extend(labels_with_dofs(space, l, set, &LocalDomains::full()));
        }
    }
    let mut out = OneParticleDensity::new(rho.space.clone());
    for probe in &probes {
        for ((k, b), v) in &rho.entries {
            let kt = contract_ket(space, eta, probe, k);
            if kt.is_empty() {
                continue;
            }
            for (bl, bc) in contract_ket(space, eta, probe, b) {
                for (kl, kc) in &kt {
                    out.add(kl.clone(), bl.clone(), v * kc * bc.conj());
                }
            }
        }
    }
    match region {
        None => {
            for v in out.entries.values_mut() {
                *v *= 0.5;
            }
            Ok(out)
        }
        Some(r) => {
            let t = out.trace();
            if t.norm() < DEGENERATE_TOL {
                return Err(Error::DegenerateRegion(space.locations()[r].clone()));
            }
            out.normalized()
        }
    }
}

/// Terms of `<s_x m_i|` acting on either particle of `ket`: the hit particle
/// loses DoF `dof`, the second-slot hit carries `eta`.
fn strip_dof(
    space: &Space,
    statistics: Statistics,
    ket: &CanonicalKet,
    loc: usize,
    dof: usize,
    m: usize,
) -> Vec<(CanonicalKet, C64)> {
    let eta = statistics.eta();
    let mut out = Vec::with_capacity(2);
    let [p, q] = ket.particles();
    if p.dof(dof) == Some(m) {
        let g = space.location_overlap(loc, p.location());
        if g != ZERO {
            if let Some((k, s)) = canonicalize(p.without_dof(dof), q.clone(), statistics) {
                out.push((k, g * s));
            }
        }
    }
    if q.dof(dof) == Some(m) {
        let g = space.location_overlap(loc, q.location());
        if g != ZERO {
            if let Some((k, s)) = canonicalize(p.clone(), q.without_dof(dof), statistics) {
                out.push((k, g * s * eta));
            }
        }
    }
    out
}

/// Indistinguishable DoF trace-out of DoF `dof` (1-based) at location `loc`:
/// `sum_m <s_x m|rho|s_x m>`, where the probe acts on either particle of the
/// ket and of the bra with the exchange sign on the second slot. The output
/// is unnormalized and its kets carry partial labels.
pub fn dof_trace_indist(rho: &DensityOperator, loc: usize, dof: usize) -> Result<DensityOperator> {
    let space = &*rho.space;
    let domain = space.dof(dof)?;
    if loc >= space.locations().len() {
        return Err(Error::Domain(format!("undeclared location index {loc}")));
    }
    let present = rho.entries.keys().any(|(k, b)| {
        k.particles()
            .iter()
            .chain(b.particles().iter())
            .any(|l| l.has_dof(dof))
    });
    if !present {
        return Err(Error::Domain(format!(
            "DoF {} is already traced out",
            domain.name()
        )));
    }
    let st = rho.statistics;
    let mut out = DensityOperator::new(st, rho.space.clone());
    for m in 0..domain.len() {
        for ((k, b), v) in &rho.entries {
            let kt = strip_dof(space, st, k, loc, dof, m);
            if kt.is_empty() {
                continue;
            }
            for (bk, bc) in strip_dof(space, st, b, loc, dof, m) {
                for (kk, kc) in &kt {
                    out.accumulate(kk.clone(), bk.clone(), v * kc * bc.conj());
                }
            }
        }
    }
    Ok(out)
}

/// Dense density over two ordered distinguishable particles. Factors are the
/// remaining DoFs of particle A followed by those of particle B, each as
/// `(dof index, dimension)`; the first factor is the most significant.
#[derive(Clone, Debug, PartialEq)]
pub struct DistinguishableDensity {
    particles: [Vec<(usize, usize)>; 2],
    matrix: DenseMatrix,
}

impl DistinguishableDensity {
    pub fn new(particles: [Vec<(usize, usize)>; 2], matrix: DenseMatrix) -> Result<Self> {
        let dim: usize = particles.iter().flatten().map(|&(_, q)| q).product();
        if !matrix.is_square() || matrix.rows() != dim {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, factors need {dim}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        Ok(Self { particles, matrix })
    }

    /// Density of two particles each carrying DoFs with the given dimensions.
    pub fn from_dims(dims_a: &[usize], dims_b: &[usize], matrix: DenseMatrix) -> Result<Self> {
        let tag = |d: &[usize]| d.iter().enumerate().map(|(i, &q)| (i + 1, q)).collect();
        Self::new([tag(dims_a), tag(dims_b)], matrix)
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn particle_factors(&self, particle: usize) -> &[(usize, usize)] {
        &self.particles[particle]
    }

    fn dims(&self) -> Vec<usize> {
        self.particles.iter().flatten().map(|&(_, q)| q).collect()
    }
}

/// Traces DoF `dof` out of particle `particle` (0 = A, 1 = B).
pub fn dof_trace_dist(
    rho: &DistinguishableDensity,
    particle: usize,
    dof: usize,
) -> Result<DistinguishableDensity> {
    if particle > 1 {
        return Err(Error::Domain(format!(
            "particle index {particle} out of range"
        )));
    }
    let pos = rho.particles[particle]
        .iter()
        .position(|&(d, _)| d == dof)
        .ok_or_else(|| Error::Domain(format!("particle {particle} has no DoF {dof}")))?;
    let factor = if particle == 0 {
        pos
    } else {
        rho.particles[0].len() + pos
    };
    let matrix = trace_out_factor(&rho.matrix, &rho.dims(), factor)?;
    let mut particles = rho.particles.clone();
    particles[particle].remove(pos);
    DistinguishableDensity::new(particles, matrix)
}

/// Traces out a whole distinguishable particle in one contraction.
pub fn particle_trace_dist(rho: &DistinguishableDensity, particle: usize) -> Result<DenseMatrix> {
    if particle > 1 {
        return Err(Error::Domain(format!(
            "particle index {particle} out of range"
        )));
    }
    let da: usize = rho.particles[0].iter().map(|&(_, q)| q).product();
    let db: usize = rho.particles[1].iter().map(|&(_, q)| q).product();
    trace_out_factor(&rho.matrix, &[da, db], particle)
}

/// A tensor slot for [`embed_as_qudits`]: the particle at `loc` whose only
/// remaining DoF is `dof`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slot {
    pub loc: usize,
    pub dof: usize,
}

/// Dense matrix of a two-particle density over two slots. The basis is the
/// tensor product in slot order, with eigenvalues in declared order filtered
/// by `domains`. Reordering particles into slot order applies the exchange
/// sign.
pub fn embed_as_qudits(
    rho: &DensityOperator,
    slots: &[Slot],
    domains: &LocalDomains,
) -> Result<DenseMatrix> {
    let space = &*rho.space;
    if slots.len() != 2 || slots[0].loc == slots[1].loc {
        return Err(Error::Shape(
            "embedding needs two slots at distinct locations".into(),
        ));
    }
    let values: Vec<Vec<usize>> = slots
        .iter()
        .map(|s| {
            space.dof(s.dof)?;
            Ok(domains.values(space, s.loc, s.dof))
        })
        .collect::<Result<_>>()?;
    let dims = [values[0].len(), values[1].len()];
    let eta = rho.statistics.eta();
    let describe = |k: &CanonicalKet| space.describe_ket(k);
    let slot_value = |l: &Label, s: usize| -> Option<usize> {
        if l.location() != slots[s].loc || l.dofs().len() != 1 {
            return None;
        }
        let e = l.dof(slots[s].dof)?;
        values[s].iter().position(|&v| v == e)
    };
    let index = |k: &CanonicalKet| -> Result<(usize, f64)> {
        let [p, q] = k.particles();
        if let (Some(i), Some(j)) = (slot_value(p, 0), slot_value(q, 1)) {
            return Ok((i * dims[1] + j, 1.0));
        }
        if let (Some(i), Some(j)) = (slot_value(q, 0), slot_value(p, 1)) {
            return Ok((i * dims[1] + j, eta));
        }
        Err(Error::Shape(format!(
            "ket {} does not fit the slots",
            describe(k)
        )))
    };
    let n = dims[0] * dims[1];
    let mut m = DenseMatrix::zeros(n, n);
    for ((k, b), v) in &rho.entries {
        let (i, si) = index(k)?;
        let (j, sj) = index(b)?;
        m[(i, j)] += v * si * sj;
    }
    Ok(m)
}
