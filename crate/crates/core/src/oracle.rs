//! Exact diagonalization on truncated tensor-product bases.
//!
//! Local states are labelled by their excitation count `j`: the Fock number
//! for a boson, `mu + s` for a spin. A basis may keep only states of fixed
//! or bounded total excitation; operators leading out of the kept states are
//! truncated.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::algebra::{DeformationPoint, LabelScale};
use crate::dicke::{build_bosonic_rg_charges, build_rg_charges, Factor, Ladder, OperatorExpression, Site};
use crate::error::{Error, Result};
use crate::rg_core::ModelSpec;

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SiteKind {
    Boson {
        cutoff: usize,
    },
    Spin {
        s: f64,
    },
    /// Spin-`s` irrep restricted to its lowest `keep` weights.
    TruncatedSpin {
        s: f64,
        keep: usize,
    },
}

impl SiteKind {
    pub fn dim(&self) -> usize {
        match *self {
            SiteKind::Boson { cutoff } => cutoff + 1,
            SiteKind::Spin { s } => (2.0 * s).round() as usize + 1,
            SiteKind::TruncatedSpin { s, keep } => keep.min((2.0 * s).round() as usize + 1),
        }
    }

    /// `(target, amplitude)` of a ladder operator on local state `j`.
    fn apply(&self, op: Ladder, j: usize) -> Option<(usize, f64)> {
        let dim = self.dim();
        match (*self, op) {
            (SiteKind::Boson { .. }, Ladder::Raise) => (j + 1 < dim).then(|| (j + 1, ((j + 1) as f64).sqrt())),
            (SiteKind::Boson { .. }, Ladder::Lower) => (j > 0).then(|| (j - 1, (j as f64).sqrt())),
            (SiteKind::Boson { .. }, Ladder::Weight) => Some((j, j as f64)),
            (SiteKind::Spin { s } | SiteKind::TruncatedSpin { s, .. }, op) => {
                let two_s = (2.0 * s).round() as usize;
                match op {
                    Ladder::Raise => {
                        (j + 1 < dim && j < two_s).then(|| (j + 1, (((j + 1) * (two_s - j)) as f64).sqrt()))
                    }
                    Ladder::Lower => (j > 0).then(|| (j - 1, ((j * (two_s + 1 - j)) as f64).sqrt())),
                    Ladder::Weight => Some((j, j as f64 - s)),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSite {
    pub site: Site,
    pub kind: SiteKind,
}

impl BasisSite {
    pub fn new(site: Site, kind: SiteKind) -> Self {
        Self { site, kind }
    }
}

/// Restriction on the total excitation count `sum_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restriction {
    None,
    MaxExcitation(usize),
    Exact(usize),
}

#[derive(Debug, Clone)]
pub struct HilbertBasis {
    sites: Vec<BasisSite>,
    restriction: Restriction,
    states: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl PartialEq for HilbertBasis {
    fn eq(&self, other: &Self) -> bool {
        self.sites == other.sites && self.restriction == other.restriction
    }
}

impl HilbertBasis {
    pub fn new(sites: Vec<BasisSite>, restriction: Restriction) -> Result<Self> {
        let mut seen: Vec<Site> = sites.iter().map(|s| s.site).collect();
        seen.sort();
        seen.dedup();
        if seen.len() != sites.len() {
            return Err(Error::BasisMismatch("a site appears twice".into()));
        }
        let dims: Vec<usize> = sites.iter().map(|s| s.kind.dim()).collect();
        let keep = |total: usize| match restriction {
            Restriction::None => true,
            Restriction::MaxExcitation(m) => total <= m,
            Restriction::Exact(m) => total == m,
        };
        let mut states = Vec::new();
        let mut label = vec![0usize; sites.len()];
        'outer: loop {
            if keep(label.iter().sum()) {
                states.push(label.clone());
            }
            // odometer with the last site fastest
            for pos in (0..label.len()).rev() {
                label[pos] += 1;
                if label[pos] < dims[pos] {
                    continue 'outer;
                }
                label[pos] = 0;
            }
            break;
        }
        if states.is_empty() {
            return Err(Error::BasisMismatch("restriction leaves no states".into()));
        }
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Ok(Self {
            sites,
            restriction,
            states,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn sites(&self) -> &[BasisSite] {
        &self.sites
    }

    pub fn restriction(&self) -> Restriction {
        self.restriction
    }

    pub fn states(&self) -> &[Vec<usize>] {
        &self.states
    }

    pub fn index_of(&self, label: &[usize]) -> Option<usize> {
        self.index.get(label).copied()
    }

    /// Total excitation count of each basis state.
    pub fn excitations(&self) -> Vec<usize> {
        self.states.iter().map(|s| s.iter().sum()).collect()
    }

    fn position(&self, site: Site) -> Option<usize> {
        self.sites.iter().position(|s| s.site == site)
    }
}

/// Dense operator with its Hermiticity established on construction.
#[derive(Debug, Clone)]
pub struct MatrixOperator {
    pub matrix: DMatrix<Complex64>,
    hermitian: bool,
}

impl MatrixOperator {
    pub fn new(matrix: DMatrix<Complex64>) -> Self {
        let scale = matrix.iter().map(|v| v.norm()).fold(1.0, f64::max);
        let defect = (&matrix - matrix.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let hermitian = defect <= HERMITIAN_TOL * scale;
        Self { matrix, hermitian }
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// `A - tr(A)/d`, removing any additive constant.
    pub fn traceless(&self) -> MatrixOperator {
        let d = self.dim();
        let shift = self.matrix.trace() / d as f64;
        Self::new(&self.matrix - DMatrix::identity(d, d) * shift)
    }
}

fn apply_factors(basis: &HilbertBasis, positions: &[(usize, Ladder)], label: &[usize]) -> Option<(Vec<usize>, f64)> {
    let mut out = label.to_vec();
    let mut amp = 1.0;
    for &(pos, op) in positions.iter().rev() {
        let (j, a) = basis.sites[pos].kind.apply(op, out[pos])?;
        out[pos] = j;
        amp *= a;
        if amp == 0.0 {
            return None;
        }
    }
    Some((out, amp))
}

/// Matrix of `expr` on `basis`.
pub fn realize(expr: &OperatorExpression, basis: &HilbertBasis) -> Result<MatrixOperator> {
    let dim = basis.dim();
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for term in expr.terms() {
        let positions: Vec<(usize, Ladder)> = term
            .factors
            .iter()
            .map(|f: &Factor| {
                basis
                    .position(f.site)
                    .map(|p| (p, f.op))
                    .ok_or_else(|| Error::BasisMismatch(format!("no site {:?} in the basis", f.site)))
            })
            .collect::<Result<_>>()?;
        for (col, label) in basis.states.iter().enumerate() {
            if let Some((target, amp)) = apply_factors(basis, &positions, label) {
                if let Some(row) = basis.index_of(&target) {
                    m[(row, col)] += term.coeff * amp;
                }
            }
        }
    }
    Ok(MatrixOperator::new(m))
}

/// Eigenvalues in ascending order with eigenvectors as matching columns.
pub fn eigen(op: &MatrixOperator) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    if !op.hermitian {
        let defect = (&op.matrix - op.matrix.adjoint())
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        return Err(Error::NotHermitian(defect));
    }
    let eig = SymmetricEigen::new(op.matrix.clone());
    let mut order: Vec<usize> = (0..op.dim()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(op.dim(), op.dim(), |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((values, vectors))
}

pub fn spectrum(op: &MatrixOperator) -> Result<Vec<f64>> {
    eigen(op).map(|(v, _)| v)
}

/// Frobenius norm of `AB - BA`.
pub fn commutator_norm(a: &MatrixOperator, b: &MatrixOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    Ok((&a.matrix * &b.matrix - &b.matrix * &a.matrix).norm())
}

/// Amplitudes over a basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: HilbertBasis,
    pub amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn zeros(basis: HilbertBasis) -> Self {
        let amplitudes = DVector::zeros(basis.dim());
        Self { basis, amplitudes }
    }

    pub fn from_amplitudes(basis: HilbertBasis, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch(amplitudes.len(), basis.dim()));
        }
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &HilbertBasis {
        &self.basis
    }

    pub fn get(&self, label: &[usize]) -> Option<Complex64> {
        self.basis.index_of(label).map(|i| self.amplitudes[i])
    }

    pub fn set(&mut self, label: &[usize], amp: Complex64) -> Result<()> {
        let i = self
            .basis
            .index_of(label)
            .ok_or_else(|| Error::BasisMismatch(format!("state {label:?} outside the basis")))?;
        self.amplitudes[i] = amp;
        Ok(())
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        self.amplitudes /= Complex64::from(n);
        Ok(())
    }

    /// The same state in a basis with the same sites and at least its states.
    pub fn embed(&self, target: &HilbertBasis) -> Result<StateVector> {
        if self.basis.sites != target.sites {
            return Err(Error::BasisMismatch("bases differ in their sites".into()));
        }
        let mut out = StateVector::zeros(target.clone());
        for (label, amp) in self.basis.states.iter().zip(self.amplitudes.iter()) {
            if *amp != Complex64::from(0.0) {
                out.set(label, *amp)?;
            }
        }
        Ok(out)
    }
}

/// Rayleigh quotient and relative eigen-residual `|Ov - lambda v| / |Ov|`.
///
/// The denominator is floored at `max|O_ij| |v|` so that eigenvalue zero
/// does not turn round-off into a large relative residual.
pub fn eigencheck(op: &MatrixOperator, v: &StateVector) -> Result<(f64, f64)> {
    if op.dim() != v.amplitudes.len() {
        return Err(Error::DimensionMismatch(op.dim(), v.amplitudes.len()));
    }
    let norm2 = v.amplitudes.norm_squared();
    if norm2 == 0.0 {
        return Err(Error::ZeroVector);
    }
    let ov = &op.matrix * &v.amplitudes;
    let rayleigh = v.amplitudes.dotc(&ov).re / norm2;
    let residual = (&ov - &v.amplitudes * Complex64::from(rayleigh)).norm();
    let scale = op.matrix.iter().map(|x| x.norm()).fold(0.0, f64::max) * norm2.sqrt();
    let denom = ov.norm().max(scale);
    Ok((rayleigh, if denom == 0.0 { 0.0 } else { residual / denom }))
}

/// Greedy nearest pairing of two spectra.
#[derive(Debug, Clone)]
pub struct SpectrumMatch {
    /// `(index in a, index in b, |a - b|)`.
    pub pairs: Vec<(usize, usize, f64)>,
    pub unmatched_a: Vec<usize>,
    pub unmatched_b: Vec<usize>,
}

impl SpectrumMatch {
    pub fn max_difference(&self) -> f64 {
        self.pairs.iter().map(|p| p.2).fold(0.0, f64::max)
    }

    pub fn complete(&self) -> bool {
        self.unmatched_a.is_empty() && self.unmatched_b.is_empty()
    }
}

/// Pairs values closest first; no value is used twice and pairs further
/// apart than `tol` are left unmatched.
pub fn match_spectra(a: &[f64], b: &[f64], tol: f64) -> SpectrumMatch {
    let mut candidates: Vec<(usize, usize, f64)> = (0..a.len())
        .flat_map(|i| (0..b.len()).map(move |j| (i, j, (a[i] - b[j]).abs())))
        .collect();
    candidates.sort_by(|x, y| x.2.total_cmp(&y.2));
    let (mut used_a, mut used_b) = (vec![false; a.len()], vec![false; b.len()]);
    let mut pairs = Vec::new();
    for (i, j, d) in candidates {
        if d > tol {
            break;
        }
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            pairs.push((i, j, d));
        }
    }
    debug_assert!({
        let mut seen: Vec<usize> = pairs.iter().map(|p| p.1).collect();
        seen.sort();
        seen.windows(2).all(|w| w[0] != w[1])
    });
    SpectrumMatch {
        pairs,
        unmatched_a: (0..a.len()).filter(|&i| !used_a[i]).collect(),
        unmatched_b: (0..b.len()).filter(|&j| !used_b[j]).collect(),
    }
}

/// Matrices of the conserved charges of an RG model.
///
/// `xi = 1` uses the quasispins themselves; a unitary grid point `xi_n` uses
/// the canonical `A` operators in their spin-`s(xi_n)` irreps with coupling
/// `g xi`; `xi = 0` uses the bosonic charges with `cutoff` bosons in total.
pub fn realize_rg_charges(spec: &ModelSpec, xi: f64, cutoff: usize) -> Result<(HilbertBasis, Vec<MatrixOperator>)> {
    let levels = &spec.levels;
    let (basis, charges) = if xi == 0.0 {
        let sites = (0..levels.len())
            .map(|i| BasisSite::new(Site::Mode(i), SiteKind::Boson { cutoff }))
            .collect();
        (
            HilbertBasis::new(sites, Restriction::MaxExcitation(cutoff))?,
            build_bosonic_rg_charges(spec),
        )
    } else {
        let mut sites = Vec::new();
        for (i, (&s1, &omega)) in levels.spins().iter().zip(levels.degeneracies()).enumerate() {
            let point = DeformationPoint::with_scale(xi, omega, LabelScale::Degeneracy)?;
            let s = point.label(s1)?;
            let two_s = 2.0 * s;
            if (two_s - two_s.round()).abs() > 1e-9 * two_s.max(1.0) {
                return Err(Error::Representation(format!(
                    "xi = {xi} is not a unitary grid point of level {i} (s = {s})"
                )));
            }
            sites.push(BasisSite::new(Site::Spin(i), SiteKind::Spin { s: two_s.round() / 2.0 }));
        }
        (
            HilbertBasis::new(sites, Restriction::None)?,
            build_rg_charges(spec, spec.coupling_g * xi),
        )
    };
    let ops = charges.iter().map(|c| realize(c, &basis)).collect::<Result<Vec<_>>>()?;
    Ok((basis, ops))
}
