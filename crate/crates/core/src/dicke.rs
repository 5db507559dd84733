//! Dicke Hamiltonian, its conserved charges, the deformed charge `R_0(xi)`
//! and the Bethe product states of the contraction limit.

use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;

use crate::algebra::{check_distinct, DeformationPoint, GaudinKind, LabelScale};
use crate::error::{Error, Result};
use crate::oracle::{BasisSite, HilbertBasis, Restriction, SiteKind, StateVector};
use crate::rg_core::{check_collisions, DickeSpec, Frame, ModelSpec, RapiditySet};

/// Degree of freedom an elementary operator acts on.
///
/// The ordering is the canonical factor order: the boson mode (or the
/// deformed copy that replaces it) first, then spin levels, then per-level
/// boson modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Site {
    Boson,
    Deformed,
    Spin(usize),
    Mode(usize),
}

/// `Raise`/`Lower`/`Weight` are `b^+, b, b^+ b` on bosons and `S^+, S, S^0` on spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Raise,
    Lower,
    Weight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Factor {
    pub site: Site,
    pub op: Ladder,
}

impl Factor {
    pub fn new(site: Site, op: Ladder) -> Self {
        Self { site, op }
    }

    fn adjoint(self) -> Self {
        let op = match self.op {
            Ladder::Raise => Ladder::Lower,
            Ladder::Lower => Ladder::Raise,
            Ladder::Weight => Ladder::Weight,
        };
        Self { site: self.site, op }
    }
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (base, idx) = match self.site {
            Site::Boson => ("b", None),
            Site::Deformed => ("A_0", None),
            Site::Spin(k) => ("S", Some(k + 1)),
            Site::Mode(k) => ("b", Some(k + 1)),
        };
        let bosonic = matches!(self.site, Site::Boson | Site::Mode(_));
        let idx = idx.map(|k| format!("_{k}")).unwrap_or_default();
        match (self.op, bosonic) {
            (Ladder::Raise, _) => write!(f, "{base}^+{idx}"),
            (Ladder::Lower, _) => write!(f, "{base}{idx}"),
            (Ladder::Weight, true) => write!(f, "{base}^+{idx} {base}{idx}"),
            (Ladder::Weight, false) => write!(f, "{base}^0{idx}"),
        }
    }
}

/// A coefficient times a product of elementary operators.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub factors: Vec<Factor>,
}

/// Sum of operator products with factors in canonical site order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorExpression {
    terms: Vec<Term>,
}

impl OperatorExpression {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a term; factors on different sites are reordered canonically,
    /// factors on the same site keep their relative order.
    pub fn push(&mut self, coeff: impl Into<Complex64>, factors: &[Factor]) {
        let coeff = coeff.into();
        assert!(coeff.is_finite(), "non-finite operator coefficient");
        let mut factors = factors.to_vec();
        factors.sort_by_key(|f| f.site);
        self.terms.push(Term { coeff, factors });
    }

    pub fn with(mut self, coeff: impl Into<Complex64>, factors: &[Factor]) -> Self {
        self.push(coeff, factors);
        self
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff * s,
                    factors: t.factors.clone(),
                })
                .collect(),
        }
    }

    pub fn plus(&self, other: &OperatorExpression) -> Self {
        Self {
            terms: self.terms.iter().chain(&other.terms).cloned().collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::new();
        for t in &self.terms {
            let factors: Vec<Factor> = t.factors.iter().rev().map(|f| f.adjoint()).collect();
            out.push(t.coeff.conj(), &factors);
        }
        out
    }

    /// Summed coefficient of all terms with exactly these factors.
    pub fn coefficient(&self, factors: &[Factor]) -> Complex64 {
        let mut key = factors.to_vec();
        key.sort_by_key(|f| f.site);
        self.terms.iter().filter(|t| t.factors == key).map(|t| t.coeff).sum()
    }

    /// Terms with equal factor strings merged, zero coefficients dropped.
    pub fn simplified(&self) -> Self {
        let mut order: Vec<Vec<Factor>> = Vec::new();
        let mut sums: HashMap<Vec<Factor>, Complex64> = HashMap::new();
        for t in &self.terms {
            let e = sums.entry(t.factors.clone()).or_insert_with(|| {
                order.push(t.factors.clone());
                Complex64::from(0.0)
            });
            *e += t.coeff;
        }
        let mut out = Self::new();
        for f in order {
            let c = sums[&f];
            if c != Complex64::from(0.0) {
                out.push(c, &f);
            }
        }
        out
    }

    /// Equal as sums of operator products, up to term order and `tol`.
    pub fn same_as(&self, other: &OperatorExpression, tol: f64) -> bool {
        let diff = self.plus(&other.scaled(-1.0)).simplified();
        diff.terms.iter().all(|t| t.coeff.norm() <= tol)
    }

    pub fn sites(&self) -> Vec<Site> {
        let mut s: Vec<Site> = self
            .terms
            .iter()
            .flat_map(|t| t.factors.iter().map(|f| f.site))
            .collect();
        s.sort();
        s.dedup();
        s
    }
}

impl fmt::Display for OperatorExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if t.coeff.im == 0.0 {
                write!(f, "{}", t.coeff.re)?;
            } else {
                write!(f, "({})", t.coeff)?;
            }
            for x in &t.factors {
                write!(f, " {x}")?;
            }
        }
        Ok(())
    }
}

fn f(site: Site, op: Ladder) -> Factor {
    Factor::new(site, op)
}

/// `H = hw b^+ b + sum_k e_k S_k^0 + G sum_k (b^+ S_k + S_k^+ b)`.
pub fn build_dicke_hamiltonian(spec: &DickeSpec) -> OperatorExpression {
    let mut h = OperatorExpression::new().with(spec.hbar_omega, &[f(Site::Boson, Ladder::Weight)]);
    for (k, &e) in spec.epsilons.iter().enumerate() {
        h.push(e, &[f(Site::Spin(k), Ladder::Weight)]);
    }
    for k in 0..spec.len() {
        h.push(
            spec.coupling_g,
            &[f(Site::Boson, Ladder::Raise), f(Site::Spin(k), Ladder::Lower)],
        );
        h.push(
            spec.coupling_g,
            &[f(Site::Boson, Ladder::Lower), f(Site::Spin(k), Ladder::Raise)],
        );
    }
    h
}

/// Excitation number `b^+ b + sum_k S_k^0`, omitting the constant `sum_k s_k`.
pub fn excitation_number(spec: &DickeSpec) -> OperatorExpression {
    let mut m = OperatorExpression::new().with(1.0, &[f(Site::Boson, Ladder::Weight)]);
    for k in 0..spec.len() {
        m.push(1.0, &[f(Site::Spin(k), Ladder::Weight)]);
    }
    m
}

/// `hw R_i` for spin level `i >= 1` (levels numbered from 1); `i = 0` is the Hamiltonian.
pub fn build_dicke_charge(spec: &DickeSpec, i: usize) -> Result<OperatorExpression> {
    if i == 0 {
        return Ok(build_dicke_hamiltonian(spec));
    }
    if i > spec.len() {
        return Err(Error::InvalidSpec(format!(
            "charge index {i} beyond {} levels",
            spec.len()
        )));
    }
    check_distinct(&spec.epsilons)?;
    let li = i - 1;
    let (si, g) = (Site::Spin(li), spec.coupling_g);
    let mut r = OperatorExpression::new().with(spec.hbar_omega - spec.epsilons[li], &[f(si, Ladder::Weight)]);
    for k in (0..spec.len()).filter(|&k| k != li) {
        let sk = Site::Spin(k);
        let w = 2.0 * g * g / (spec.epsilons[k] - spec.epsilons[li]);
        r.push(0.5 * w, &[f(si, Ladder::Raise), f(sk, Ladder::Lower)]);
        r.push(0.5 * w, &[f(sk, Ladder::Raise), f(si, Ladder::Lower)]);
        r.push(w, &[f(si, Ladder::Weight), f(sk, Ladder::Weight)]);
    }
    r.push(-g, &[f(si, Ladder::Raise), f(Site::Boson, Ladder::Lower)]);
    r.push(-g, &[f(Site::Boson, Ladder::Raise), f(si, Ladder::Lower)]);
    Ok(r)
}

/// Irrep label `s_0(xi)` of the deformed copy (with `A^0 = S^0 + (1 - 1/xi) Omega_0 / 4`).
pub fn deformed_copy_label(xi: f64, omega0: u32) -> Result<f64> {
    DeformationPoint::with_scale(xi, omega0, LabelScale::QuarterDegeneracy)?.label((omega0 as f64 - 1.0) / 2.0)
}

/// `R_0(xi) = A_0^0 + g sum_k [X_0k (A_0^+ S_k + S_k^+ A_0) / 2 + Z_0k A_0^0 S_k^0]` with
/// `g = g(xi)` and `eta_k = -c(xi) e_k`, the copy-0 coordinate taken to infinity.
pub fn build_deformed_charge0(spec: &DickeSpec, xi: f64, omega0: u32) -> Result<OperatorExpression> {
    if xi <= 0.0 {
        return Err(Error::ContractionLimit);
    }
    DeformationPoint::new(xi, omega0)?;
    let g = spec.deformed_coupling(xi, omega0);
    let c = spec.coordinate_scale(xi, omega0);
    let a = Site::Deformed;
    let mut r = OperatorExpression::new().with(1.0, &[f(a, Ladder::Weight)]);
    for (k, &e) in spec.epsilons.iter().enumerate() {
        let eta = -c * e;
        let x0k = (1.0 + eta * eta).sqrt();
        let sk = Site::Spin(k);
        r.push(0.5 * g * x0k, &[f(a, Ladder::Raise), f(sk, Ladder::Lower)]);
        r.push(0.5 * g * x0k, &[f(sk, Ladder::Raise), f(a, Ladder::Lower)]);
        r.push(g * eta, &[f(a, Ladder::Weight), f(sk, Ladder::Weight)]);
    }
    Ok(r)
}

/// Basis for `R_0(xi)`: the deformed copy in its spin-`s_0(xi)` irrep truncated
/// to the lowest `cutoff + 1` weights, followed by the spin levels.
///
/// Only `xi = Omega_0 / (Omega_0 + 2n)` gives a half-integer label.
pub fn deformed_charge_basis(
    spec: &DickeSpec,
    xi: f64,
    omega0: u32,
    cutoff: usize,
    restriction: Restriction,
) -> Result<HilbertBasis> {
    let s0 = deformed_copy_label(xi, omega0)?;
    let two_s = 2.0 * s0;
    if (two_s - two_s.round()).abs() > 1e-9 * two_s.max(1.0) {
        return Err(Error::Representation(format!(
            "xi = {xi} gives the non-unitary label s_0 = {s0}"
        )));
    }
    let s0 = two_s.round() / 2.0;
    let mut sites = vec![BasisSite::new(
        Site::Deformed,
        SiteKind::TruncatedSpin {
            s: s0,
            keep: cutoff + 1,
        },
    )];
    sites.extend(
        spec.spins
            .iter()
            .enumerate()
            .map(|(k, &s)| BasisSite::new(Site::Spin(k), SiteKind::Spin { s })),
    );
    HilbertBasis::new(sites, restriction)
}

/// Conserved charges of a Richardson-Gaudin model at `xi = 1`.
///
/// `R_i = S_i^0 + coupling sum_{k != i} [X_ik (S_k^+ S_i + S_i^+ S_k) / 2 + Z_ik S_i^0 S_k^0]`.
pub fn build_rg_charges(spec: &ModelSpec, coupling: f64) -> Vec<OperatorExpression> {
    let etas = spec.levels.etas();
    let kind: GaudinKind = spec.kind;
    (0..etas.len())
        .map(|i| {
            let si = Site::Spin(i);
            let mut r = OperatorExpression::new().with(1.0, &[f(si, Ladder::Weight)]);
            for k in (0..etas.len()).filter(|&k| k != i) {
                let sk = Site::Spin(k);
                let x = kind.x(etas[i].into(), etas[k].into());
                let z = kind.z(etas[i].into(), etas[k].into());
                r.push(0.5 * coupling * x, &[f(sk, Ladder::Raise), f(si, Ladder::Lower)]);
                r.push(0.5 * coupling * x, &[f(si, Ladder::Raise), f(sk, Ladder::Lower)]);
                r.push(coupling * z, &[f(si, Ladder::Weight), f(sk, Ladder::Weight)]);
            }
            r
        })
        .collect()
}

/// Contraction-limit charges: one boson mode per level,
/// `R_i = n_i + g sum_{k != i} [X_ik sqrt(O_i O_k) (b_i^+ b_k + b_k^+ b_i) / 4 - Z_ik (O_i n_k + O_k n_i) / 4]`.
pub fn build_bosonic_rg_charges(spec: &ModelSpec) -> Vec<OperatorExpression> {
    let etas = spec.levels.etas();
    let omega: Vec<f64> = spec.levels.degeneracies().iter().map(|&d| d as f64).collect();
    let g = spec.coupling_g;
    (0..etas.len())
        .map(|i| {
            let bi = Site::Mode(i);
            let mut r = OperatorExpression::new().with(1.0, &[f(bi, Ladder::Weight)]);
            for k in (0..etas.len()).filter(|&k| k != i) {
                let bk = Site::Mode(k);
                let x = spec.kind.x(etas[i].into(), etas[k].into());
                let z = spec.kind.z(etas[i].into(), etas[k].into());
                let hop = 0.25 * g * x * (omega[i] * omega[k]).sqrt();
                r.push(hop, &[f(bi, Ladder::Raise), f(bk, Ladder::Lower)]);
                r.push(hop, &[f(bk, Ladder::Raise), f(bi, Ladder::Lower)]);
                r.push(-0.25 * g * z * omega[i], &[f(bk, Ladder::Weight)]);
                r.push(-0.25 * g * z * omega[k], &[f(bi, Ladder::Weight)]);
            }
            r
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    UnitNorm,
}

/// `prod_a (b^+ - G sum_k S_k^+ / (e_k - x_a)) |theta>`.
#[derive(Debug, Clone)]
pub struct BetheProductState {
    pub spec: DickeSpec,
    pub rapidities: RapiditySet,
    pub normalization: Normalization,
}

impl BetheProductState {
    pub fn new(spec: DickeSpec, rapidities: RapiditySet, normalization: Normalization) -> Result<Self> {
        rapidities.expect_frame(Frame::DickeX)?;
        check_collisions(rapidities.values(), &spec.epsilons, false)?;
        Ok(Self {
            spec,
            rapidities,
            normalization,
        })
    }
}

/// Dicke basis: boson mode with the given cutoff, then the spin levels.
pub fn dicke_basis(spec: &DickeSpec, cutoff: usize, restriction: Restriction) -> Result<HilbertBasis> {
    let mut sites = vec![BasisSite::new(Site::Boson, SiteKind::Boson { cutoff })];
    sites.extend(
        spec.spins
            .iter()
            .enumerate()
            .map(|(k, &s)| BasisSite::new(Site::Spin(k), SiteKind::Spin { s })),
    );
    HilbertBasis::new(sites, restriction)
}

/// Expands the Bethe product over the `M = N` sector of the Dicke basis.
pub fn bethe_coefficients(state: &BetheProductState, boson_cutoff: usize) -> Result<StateVector> {
    let spec = &state.spec;
    let n = state.rapidities.len();
    if boson_cutoff < n {
        return Err(Error::Cutoff {
            cutoff: boson_cutoff,
            needed: n,
        });
    }
    let basis = dicke_basis(spec, boson_cutoff, Restriction::Exact(n))?;
    let two_s: Vec<usize> = spec.spins.iter().map(|s| (2.0 * s).round() as usize).collect();
    // occupation label: [boson count, spin excitations per level]
    let mut amps: HashMap<Vec<usize>, Complex64> = HashMap::new();
    amps.insert(vec![0; spec.len() + 1], Complex64::from(1.0));
    for &x in state.rapidities.values() {
        let mut next: HashMap<Vec<usize>, Complex64> = HashMap::new();
        for (label, amp) in &amps {
            let mut up = label.clone();
            up[0] += 1;
            *next.entry(up).or_default() += amp * ((label[0] + 1) as f64).sqrt();
            for k in 0..spec.len() {
                let j = label[k + 1];
                if j < two_s[k] {
                    let mut up = label.clone();
                    up[k + 1] += 1;
                    let ladder = (((j + 1) * (two_s[k] - j)) as f64).sqrt();
                    *next.entry(up).or_default() += -spec.coupling_g / (spec.epsilons[k] - x) * ladder * amp;
                }
            }
        }
        amps = next;
    }
    let mut v = StateVector::zeros(basis);
    for (label, amp) in amps {
        v.set(&label, amp)?;
    }
    if state.normalization == Normalization::UnitNorm {
        v.normalize()?;
    }
    Ok(v)
}

/// Spin basis of an RG model.
pub fn rg_basis(spec: &ModelSpec, restriction: Restriction) -> Result<HilbertBasis> {
    let sites = spec
        .levels
        .spins()
        .iter()
        .enumerate()
        .map(|(i, &s)| BasisSite::new(Site::Spin(i), SiteKind::Spin { s }))
        .collect();
    HilbertBasis::new(sites, restriction)
}

/// `prod_a (sum_i X_ia S_i^+) |theta>` over the `N`-excitation sector.
pub fn rg_bethe_vector(spec: &ModelSpec, r: &RapiditySet) -> Result<StateVector> {
    r.expect_frame(Frame::RgEta)?;
    check_collisions(r.values(), spec.levels.etas(), false)?;
    let basis = rg_basis(spec, Restriction::Exact(r.len()))?;
    let etas = spec.levels.etas();
    let two_s: Vec<usize> = spec.levels.spins().iter().map(|s| (2.0 * s).round() as usize).collect();
    let mut amps: HashMap<Vec<usize>, Complex64> = HashMap::new();
    amps.insert(vec![0; etas.len()], Complex64::from(1.0));
    for &eta in r.values() {
        let mut next: HashMap<Vec<usize>, Complex64> = HashMap::new();
        for (label, amp) in &amps {
            for i in 0..etas.len() {
                let j = label[i];
                if j < two_s[i] {
                    let mut up = label.clone();
                    up[i] += 1;
                    let ladder = (((j + 1) * (two_s[i] - j)) as f64).sqrt();
                    *next.entry(up).or_default() += spec.kind.x(etas[i].into(), eta) * ladder * amp;
                }
            }
        }
        amps = next;
    }
    let mut v = StateVector::zeros(basis);
    for (label, amp) in amps {
        v.set(&label, amp)?;
    }
    v.normalize()?;
    Ok(v)
}
