//! Exchange-symmetrized two-particle kets over a finite labeled space.
//!
//! A single particle is described by a spatial location and an assignment of
//! eigenvalues to its degrees of freedom. Two-particle kets `|a, b>` obey
//! `|a, b> = eta |b, a>` and are stored once, in canonical (sorted) order, with
//! the exchange sign folded into the amplitude. Inner products between
//! two-particle kets follow
//!
//! ```text
//! <p, q | a, b> = <p|a><q|b> + eta <p|b><q|a>
//! ```
//!
//! so a bosonic doubly-occupied ket has squared norm 2 and a fermionic one is
//! never stored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::{Error, Result, C64, PRUNE_TOL};

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// Exchange sign: +1 for bosons, -1 for fermions.
    pub fn eta(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }

    pub fn from_eta(eta: i32) -> Result<Self> {
        match eta {
            1 => Ok(Statistics::Boson),
            -1 => Ok(Statistics::Fermion),
            other => Err(Error::Domain(format!("eta must be +1 or -1, got {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        }
    }
}

/// Finite eigenvalue domain of one degree of freedom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DofDomain {
    name: String,
    eigenvalues: Vec<String>,
}

impl DofDomain {
    pub fn new<S: Into<String>>(
        name: impl Into<String>,
        eigenvalues: impl IntoIterator<Item = S>,
    ) -> Result<Self> {
        let name = name.into();
        let eigenvalues: Vec<String> = eigenvalues.into_iter().map(Into::into).collect();
        if eigenvalues.len() < 2 {
            return Err(Error::Domain(format!(
                "DoF {name} needs at least two eigenvalues"
            )));
        }
        let unique: BTreeSet<&String> = eigenvalues.iter().collect();
        if unique.len() != eigenvalues.len() {
            return Err(Error::Domain(format!("DoF {name} repeats an eigenvalue")));
        }
        Ok(Self { name, eigenvalues })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eigenvalues(&self) -> &[String] {
        &self.eigenvalues
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

/// Declared locations, their Gram map, and the DoF domains shared by every
/// particle. DoF indices are 1-based throughout the public API.
#[derive(Clone, Debug, PartialEq)]
pub struct Space {
    locations: Vec<String>,
    /// Row-major `p x p` Gram matrix; `None` means orthonormal.
    overlap: Option<Vec<C64>>,
    dofs: Vec<DofDomain>,
}

impl Space {
    pub fn new<S: Into<String>>(
        locations: impl IntoIterator<Item = S>,
        dofs: Vec<DofDomain>,
    ) -> Result<Self> {
        let locations: Vec<String> = locations.into_iter().map(Into::into).collect();
        if locations.len() < 2 {
            return Err(Error::Domain("need at least two locations".into()));
        }
        let unique: BTreeSet<&String> = locations.iter().collect();
        if unique.len() != locations.len() {
            return Err(Error::Domain(
                "location identifiers must be distinct".into(),
            ));
        }
        if dofs.is_empty() {
            return Err(Error::Domain("need at least one degree of freedom".into()));
        }
        let names: BTreeSet<&str> = dofs.iter().map(|d| d.name()).collect();
        if names.len() != dofs.len() {
            return Err(Error::Domain("DoF names must be distinct".into()));
        }
        Ok(Self {
            locations,
            overlap: None,
            dofs,
        })
    }

    /// Installs a non-trivial spatial Gram map (Hermitian, unit diagonal).
    pub fn with_overlap(mut self, rows: &[Vec<C64>]) -> Result<Self> {
        let p = self.locations.len();
        if rows.len() != p || rows.iter().any(|r| r.len() != p) {
            return Err(Error::Shape(format!("overlap must be {p}x{p}")));
        }
        for (i, row) in rows.iter().enumerate() {
            if (row[i] - C64::new(1.0, 0.0)).norm() > 1e-12 {
                return Err(Error::Domain("overlap diagonal must be 1".into()));
            }
            for (j, other) in rows.iter().enumerate() {
                if (row[j] - other[i].conj()).norm() > 1e-12 {
                    return Err(Error::Domain("overlap must be Hermitian".into()));
                }
            }
        }
        let flat: Vec<C64> = rows.concat();
        let identity = (0..p).all(|i| (0..p).all(|j| i == j || flat[i * p + j] == ZERO));
        self.overlap = if identity { None } else { Some(flat) };
        Ok(self)
    }

    pub fn locations(&self) -> &[String] {
        &self.locations
    }

    pub fn dofs(&self) -> &[DofDomain] {
        &self.dofs
    }

    pub fn num_dofs(&self) -> usize {
        self.dofs.len()
    }

    /// DoF domain for a 1-based index.
    pub fn dof(&self, index: usize) -> Result<&DofDomain> {
        index
            .checked_sub(1)
            .and_then(|i| self.dofs.get(i))
            .ok_or_else(|| Error::Domain(format!("no DoF with index {index}")))
    }

    pub fn is_orthonormal(&self) -> bool {
        self.overlap.is_none()
    }

    pub fn overlap_rows(&self) -> Option<Vec<Vec<C64>>> {
        let p = self.locations.len();
        self.overlap
            .as_ref()
            .map(|g| g.chunks(p).map(<[C64]>::to_vec).collect())
    }

    /// `<s_a | s_b>`.
    pub fn location_overlap(&self, a: usize, b: usize) -> C64 {
        match &self.overlap {
            None => {
                if a == b {
                    C64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            }
            Some(g) => g[a * self.locations.len() + b],
        }
    }

    pub fn location_index(&self, name: &str) -> Result<usize> {
        self.locations
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| Error::Domain(format!("undeclared location {name}")))
    }

    /// Resolves a DoF by name or by its 1-based index written as text.
    pub fn dof_index(&self, key: &str) -> Result<usize> {
        if let Some(pos) = self.dofs.iter().position(|d| d.name() == key) {
            return Ok(pos + 1);
        }
        match key.parse::<usize>() {
            Ok(i) if i >= 1 && i <= self.dofs.len() => Ok(i),
            _ => Err(Error::Domain(format!("undeclared DoF {key}"))),
        }
    }

    pub fn eigen_index(&self, dof: usize, name: &str) -> Result<usize> {
        self.dof(dof)?
            .eigenvalues()
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::Domain(format!("{name} is not an eigenvalue of DoF {dof}")))
    }

    /// Builds a label from a location name and `(dof, eigenvalue)` name pairs.
    pub fn label(&self, location: &str, assignment: &[(&str, &str)]) -> Result<Label> {
        let loc = self.location_index(location)?;
        let mut dofs = Vec::with_capacity(assignment.len());
        for (dof, eig) in assignment {
            let d = self.dof_index(dof)?;
            dofs.push((d, self.eigen_index(d, eig)?));
        }
        let label = Label::new(loc, dofs);
        if label.dofs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("a DoF is assigned twice".into()));
        }
        Ok(label)
    }

    /// Full label with one eigenvalue name per declared DoF, in DoF order.
    pub fn full_label(&self, location: &str, eigenvalues: &[&str]) -> Result<Label> {
        if eigenvalues.len() != self.dofs.len() {
            return Err(Error::Shape(format!(
                "expected {} eigenvalues, got {}",
                self.dofs.len(),
                eigenvalues.len()
            )));
        }
        let loc = self.location_index(location)?;
        let dofs = eigenvalues
            .iter()
            .enumerate()
            .map(|(i, e)| Ok((i + 1, self.eigen_index(i + 1, e)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Label::new(loc, dofs))
    }

    pub fn validate_label(&self, label: &Label) -> Result<()> {
        if label.loc >= self.locations.len() {
            return Err(Error::Domain(format!(
                "undeclared location index {}",
                label.loc
            )));
        }
        for &(d, e) in &label.dofs {
            let dom = self.dof(d)?;
            if e >= dom.len() {
                return Err(Error::Domain(format!(
                    "eigenvalue index {e} outside DoF {}",
                    dom.name()
                )));
            }
        }
        Ok(())
    }

    pub fn is_full(&self, label: &Label) -> bool {
        label.dofs.len() == self.dofs.len()
    }

    /// Every full single-particle label, optionally restricted to one location.
    pub fn basis(&self, location: Option<usize>) -> Vec<Label> {
        let locs: Vec<usize> = match location {
            Some(l) => vec![l],
            None => (0..self.locations.len()).collect(),
        };
        let mut out = Vec::new();
        for loc in locs {
            let mut digits = vec![0usize; self.dofs.len()];
            loop {
                out.push(Label::new(
                    loc,
                    digits
                        .iter()
                        .enumerate()
                        .map(|(i, &e)| (i + 1, e))
                        .collect(),
                ));
                let mut k = self.dofs.len();
                loop {
                    if k == 0 {
                        break;
                    }
                    k -= 1;
                    digits[k] += 1;
                    if digits[k] < self.dofs[k].len() {
                        break;
                    }
                    digits[k] = 0;
                    if k == 0 {
                        k = usize::MAX;
                        break;
                    }
                }
                if k == usize::MAX {
                    break;
                }
            }
        }
        out
    }

    /// Human-readable label such as `s1 L down`.
    pub fn describe(&self, label: &Label) -> String {
        let mut s = self
            .locations
            .get(label.loc)
            .cloned()
            .unwrap_or_else(|| format!("#{}", label.loc));
        for &(d, e) in &label.dofs {
            s.push(' ');
            match self.dof(d).ok().and_then(|dom| dom.eigenvalues().get(e)) {
                Some(name) => s.push_str(name),
                None => s.push_str(&format!("{d}:{e}")),
            }
        }
        s
    }

    pub fn describe_ket(&self, ket: &CanonicalKet) -> String {
        format!(
            "|{}, {}>",
            self.describe(&ket.first),
            self.describe(&ket.second)
        )
    }
}

/// One particle: location index plus `(dof index, eigenvalue index)` pairs
/// sorted by DoF index. The assignment may be partial after a DoF trace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    loc: usize,
    dofs: Vec<(usize, usize)>,
}

impl Label {
    pub fn new(loc: usize, mut dofs: Vec<(usize, usize)>) -> Self {
        dofs.sort_unstable();
        Self { loc, dofs }
    }

    pub fn location(&self) -> usize {
        self.loc
    }

    pub fn dofs(&self) -> &[(usize, usize)] {
        &self.dofs
    }

    pub fn dof(&self, index: usize) -> Option<usize> {
        self.dofs
            .binary_search_by_key(&index, |&(d, _)| d)
            .ok()
            .map(|i| self.dofs[i].1)
    }

    pub fn has_dof(&self, index: usize) -> bool {
        self.dof(index).is_some()
    }

    pub fn without_dof(&self, index: usize) -> Label {
        Label {
            loc: self.loc,
            dofs: self
                .dofs
                .iter()
                .copied()
                .filter(|&(d, _)| d != index)
                .collect(),
        }
    }

    fn same_dof_set(&self, other: &Label) -> bool {
        self.dofs.len() == other.dofs.len()
            && self.dofs.iter().zip(&other.dofs).all(|(a, b)| a.0 == b.0)
    }
}

/// Two-particle ket with `first <= second`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKet {
    first: Label,
    second: Label,
}

impl CanonicalKet {
    pub fn first(&self) -> &Label {
        &self.first
    }

    pub fn second(&self) -> &Label {
        &self.second
    }

    pub fn particles(&self) -> [&Label; 2] {
        [&self.first, &self.second]
    }

    pub fn is_doubly_occupied(&self) -> bool {
        self.first == self.second
    }
}

impl fmt::Display for CanonicalKet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{:?}, {:?}>", self.first, self.second)
    }
}

/// Sorts an ordered pair. Returns the canonical ket and the exchange sign, or
/// `None` for a fermionic pair of identical labels.
pub fn canonicalize(a: Label, b: Label, statistics: Statistics) -> Option<(CanonicalKet, f64)> {
    if a == b && statistics == Statistics::Fermion {
        return None;
    }
    if a <= b {
        Some((
            CanonicalKet {
                first: a,
                second: b,
            },
            1.0,
        ))
    } else {
        Some((
            CanonicalKet {
                first: b,
                second: a,
            },
            statistics.eta(),
        ))
    }
}

/// [`canonicalize`] with both labels checked against the declared space.
pub fn canonicalize_ket(
    space: &Space,
    a: Label,
    b: Label,
    statistics: Statistics,
) -> Result<Option<(CanonicalKet, f64)>> {
    space.validate_label(&a)?;
    space.validate_label(&b)?;
    Ok(canonicalize(a, b, statistics))
}

/// `<a|b>`: spatial Gram entry times Kronecker deltas over the DoFs. Both
/// labels must carry the same DoF indices.
pub fn single_particle_overlap(a: &Label, b: &Label, space: &Space) -> Result<C64> {
    if !a.same_dof_set(b) {
        return Err(Error::Shape(format!(
            "labels {} and {} carry different DoF sets",
            space.describe(a),
            space.describe(b)
        )));
    }
    Ok(label_overlap(space, a, b))
}

/// Like [`single_particle_overlap`], but labels with different DoF sets are
/// orthogonal instead of an error.
pub(crate) fn label_overlap(space: &Space, a: &Label, b: &Label) -> C64 {
    if !a.same_dof_set(b) || a.dofs.iter().zip(&b.dofs).any(|(x, y)| x.1 != y.1) {
        return ZERO;
    }
    space.location_overlap(a.loc, b.loc)
}

/// `<p, q | a, b>` for an ordered bra pair and ket pair.
pub(crate) fn pair_overlap(
    space: &Space,
    eta: f64,
    p: &Label,
    q: &Label,
    a: &Label,
    b: &Label,
) -> C64 {
    label_overlap(space, p, a) * label_overlap(space, q, b)
        + eta * label_overlap(space, p, b) * label_overlap(space, q, a)
}

/// Symmetric two-particle inner product `<bra|ket>`.
pub fn symmetric_inner_product(
    bra: &CanonicalKet,
    ket: &CanonicalKet,
    statistics: Statistics,
    space: &Space,
) -> C64 {
    if space.is_orthonormal() {
        return orthonormal_ket_overlap(bra, ket, statistics);
    }
    pair_overlap(
        space,
        statistics.eta(),
        &bra.first,
        &bra.second,
        &ket.first,
        &ket.second,
    )
}

/// Squared symmetric norm of a basis ket in an orthonormal space.
pub(crate) fn ket_norm_sqr(ket: &CanonicalKet, statistics: Statistics) -> f64 {
    if ket.is_doubly_occupied() {
        1.0 + statistics.eta()
    } else {
        1.0
    }
}

fn orthonormal_ket_overlap(bra: &CanonicalKet, ket: &CanonicalKet, statistics: Statistics) -> C64 {
    if bra == ket {
        C64::new(ket_norm_sqr(ket, statistics), 0.0)
    } else {
        ZERO
    }
}

/// Single-particle state as a sparse amplitude map.
pub type OneParticleState = BTreeMap<Label, C64>;

/// Norm squared of a one-particle state under the space's Gram map.
pub fn one_particle_norm_sqr(space: &Space, state: &OneParticleState) -> f64 {
    if space.is_orthonormal() {
        return state.values().map(|z| z.norm_sqr()).sum();
    }
    let mut acc = ZERO;
    for (x, cx) in state {
        for (y, cy) in state {
            acc += cx.conj() * cy * label_overlap(space, x, y);
        }
    }
    acc.re
}

/// Sparse, exchange-symmetrized two-particle state.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    statistics: Statistics,
    space: Arc<Space>,
    amplitudes: BTreeMap<CanonicalKet, C64>,
}

impl StateVector {
    pub fn new(statistics: Statistics, space: Arc<Space>) -> Self {
        Self {
            statistics,
            space,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn from_terms(
        statistics: Statistics,
        space: Arc<Space>,
        terms: impl IntoIterator<Item = (Label, Label, C64)>,
    ) -> Result<Self> {
        let mut s = Self::new(statistics, space);
        for (a, b, amp) in terms {
            s.add_term(a, b, amp)?;
        }
        Ok(s)
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn space(&self) -> &Arc<Space> {
        &self.space
    }

    /// Adds `amp |a, b>`. Labels must be full assignments of the declared space.
    pub fn add_term(&mut self, a: Label, b: Label, amp: C64) -> Result<()> {
        for l in [&a, &b] {
            self.space.validate_label(l)?;
            if !self.space.is_full(l) {
                return Err(Error::Shape(format!(
                    "state vectors take full labels, got {}",
                    self.space.describe(l)
                )));
            }
        }
        if let Some((ket, sign)) = canonicalize(a, b, self.statistics) {
            let slot = self.amplitudes.entry(ket.clone()).or_insert(ZERO);
            *slot += amp * sign;
            if slot.norm() < PRUNE_TOL {
                self.amplitudes.remove(&ket);
            }
        }
        Ok(())
    }

    pub fn amplitude(&self, ket: &CanonicalKet) -> C64 {
        self.amplitudes.get(ket).copied().unwrap_or(ZERO)
    }

    /// Amplitude of `|a, b>` in the given order (sign folded back in).
    pub fn amplitude_of(&self, a: &Label, b: &Label) -> C64 {
        match canonicalize(a.clone(), b.clone(), self.statistics) {
            Some((ket, sign)) => self.amplitude(&ket) * sign,
            None => ZERO,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&CanonicalKet, &C64)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        let mut out = self.clone();
        for v in out.amplitudes.values_mut() {
            *v *= factor;
        }
        out.amplitudes.retain(|_, v| v.norm() >= PRUNE_TOL);
        out
    }

    fn check_compatible(&self, other: &StateVector) -> Result<()> {
        if self.statistics != other.statistics || self.space != other.space {
            return Err(Error::Shape("states live in different spaces".into()));
        }
        Ok(())
    }

    /// `<self|other>` under the symmetric inner product.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        self.check_compatible(other)?;
        if self.space.is_orthonormal() {
            return Ok(self
                .amplitudes
                .iter()
                .filter_map(|(k, a)| {
                    other
                        .amplitudes
                        .get(k)
                        .map(|b| a.conj() * b * ket_norm_sqr(k, self.statistics))
                })
                .sum());
        }
        let mut acc = ZERO;
        for (k, a) in &self.amplitudes {
            for (l, b) in &other.amplitudes {
                acc += a.conj() * b * symmetric_inner_product(k, l, self.statistics, &self.space);
            }
        }
        Ok(acc)
    }

    pub fn norm(&self) -> f64 {
        self.inner(self)
            .map(|z| z.re.max(0.0).sqrt())
            .unwrap_or(0.0)
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < crate::DEGENERATE_TOL {
            return Err(Error::DegenerateState(n));
        }
        Ok(self.scaled(C64::new(1.0 / n, 0.0)))
    }

    /// Partial inner product `<probe|Psi>`, a one-particle state.
    pub fn contract(&self, probe: &Label) -> OneParticleState {
        let eta = self.statistics.eta();
        let mut out = OneParticleState::new();
        for (ket, amp) in &self.amplitudes {
            let o1 = label_overlap(&self.space, probe, &ket.first);
            if o1 != ZERO {
                *out.entry(ket.second.clone()).or_insert(ZERO) += amp * o1;
            }
            let o2 = label_overlap(&self.space, probe, &ket.second);
            if o2 != ZERO {
                *out.entry(ket.first.clone()).or_insert(ZERO) += amp * o2 * eta;
            }
        }
        out.retain(|_, v| v.norm() >= PRUNE_TOL);
        out
    }
}

/// Projects one particle onto `probe`. Returns the normalized conditional state
/// of the other particle and the probability `<Pi_probe>/2`.
pub fn project_single_particle(
    state: &StateVector,
    probe: &Label,
) -> Result<(OneParticleState, f64)> {
    state.space.validate_label(probe)?;
    if !state.space.is_full(probe) {
        return Err(Error::Shape("probe must assign every DoF".into()));
    }
    let chi = state.contract(probe);
    let weight = one_particle_norm_sqr(&state.space, &chi);
    if weight < crate::DEGENERATE_TOL {
        return Ok((OneParticleState::new(), 0.0));
    }
    let scale = 1.0 / weight.sqrt();
    let conditional = chi.into_iter().map(|(k, v)| (k, v * scale)).collect();
    Ok((conditional, weight / 2.0))
}

/// `sum_k |psi_k><psi_k| . |Phi>` over a complete single-particle basis; equals
/// `2 |Phi>` for two-particle states.
pub fn one_particle_identity_apply(state: &StateVector, basis: &[Label]) -> Result<StateVector> {
    let space = &state.space;
    if !space.is_orthonormal() {
        return Err(Error::Domain(
            "one-particle identity needs an orthonormal location set".into(),
        ));
    }
    let declared: BTreeSet<Label> = space.basis(None).into_iter().collect();
    let given: BTreeSet<Label> = basis.iter().cloned().collect();
    if given.len() != basis.len() || given != declared {
        return Err(Error::Domain(
            "basis is not the complete single-particle basis".into(),
        ));
    }
    let mut out = StateVector::new(state.statistics, space.clone());
    for probe in basis {
        for (other, amp) in state.contract(probe) {
            out.add_term(probe.clone(), other, amp)?;
        }
    }
    Ok(out)
}

/// `<a, b|Psi>` for two fully specified single-particle outcomes.
pub fn joint_measurement_amplitude(state: &StateVector, a: &Label, b: &Label) -> Result<C64> {
    for l in [a, b] {
        state.space.validate_label(l)?;
        if !state.space.is_full(l) {
            return Err(Error::Shape(format!(
                "outcome {} does not fix every DoF",
                state.space.describe(l)
            )));
        }
    }
    let eta = state.statistics.eta();
    Ok(state
        .amplitudes
        .iter()
        .map(|(ket, amp)| amp * pair_overlap(&state.space, eta, a, b, &ket.first, &ket.second))
        .sum())
}

/// Outcome distribution for one particle measured at `loc_a` and the other at
/// `loc_b` (distinct locations), normalized over all such outcome pairs.
pub fn joint_outcome_distribution(
    state: &StateVector,
    loc_a: usize,
    loc_b: usize,
) -> Result<Vec<(Label, Label, f64)>> {
    if loc_a == loc_b {
        return Err(Error::Domain(
            "joint outcomes need two distinct locations".into(),
        ));
    }
    let space = &state.space;
    let mut out = Vec::new();
    for a in space.basis(Some(loc_a)) {
        for b in space.basis(Some(loc_b)) {
            let amp = joint_measurement_amplitude(state, &a, &b)?;
            out.push((a.clone(), b, amp.norm_sqr()));
        }
    }
    let total: f64 = out.iter().map(|t| t.2).sum();
    if total < crate::DEGENERATE_TOL {
        return Err(Error::DegenerateState(total));
    }
    for t in &mut out {
        t.2 /= total;
    }
    Ok(out)
}
