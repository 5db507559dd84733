//! Gaudin-algebra realizations and pseudo-deformation bookkeeping.
//!
//! The coupling matrices `X` and `Z` of a Richardson-Gaudin model are
//! antisymmetric and obey
//!
//! ```text
//! X_ij X_jk - X_ik (Z_ij + Z_jk) = 0      (i, j, k distinct)
//! X_ij^2 - Z_ij^2 = c
//! ```
//!
//! with `c = 0` for the rational and `c = 1` for the trigonometric family.
//! Level coordinates are real; rapidity coordinates may be complex.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::rg_core::RapiditySet;

/// Coordinates closer than this (absolute, on the coordinate scale) collide.
pub const COLLISION_TOL: f64 = 1e-10;

/// Set of `m` quasispin levels.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    etas: Vec<f64>,
    spins: Vec<f64>,
    degeneracies: Vec<u32>,
}

impl LevelSet {
    /// Builds a level set from coordinates and quasispins `s_i` (half-integers).
    pub fn new(etas: Vec<f64>, spins: Vec<f64>) -> Result<Self> {
        if etas.is_empty() {
            return Err(Error::InvalidSpec("at least one level is required".into()));
        }
        if etas.len() != spins.len() {
            return Err(Error::InvalidSpec(format!(
                "{} level coordinates but {} spins",
                etas.len(),
                spins.len()
            )));
        }
        let mut degeneracies = Vec::with_capacity(spins.len());
        for (i, &s) in spins.iter().enumerate() {
            degeneracies.push(
                degeneracy_of(s).ok_or_else(|| {
                    Error::InvalidSpec(format!("spin {s} of level {i} is not a positive half-integer"))
                })?,
            );
        }
        check_distinct(&etas)?;
        Ok(Self {
            etas,
            spins,
            degeneracies,
        })
    }

    /// Builds a level set from coordinates and degeneracies `Omega_i = 2 s_i + 1`.
    pub fn from_degeneracies(etas: Vec<f64>, degeneracies: Vec<u32>) -> Result<Self> {
        if let Some(i) = degeneracies.iter().position(|&d| d < 2) {
            return Err(Error::InvalidSpec(format!(
                "degeneracy of level {i} must be at least 2"
            )));
        }
        let spins = degeneracies.iter().map(|&d| (d as f64 - 1.0) / 2.0).collect();
        Self::new(etas, spins)
    }

    pub fn len(&self) -> usize {
        self.etas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.etas.is_empty()
    }

    pub fn etas(&self) -> &[f64] {
        &self.etas
    }

    pub fn spins(&self) -> &[f64] {
        &self.spins
    }

    pub fn degeneracies(&self) -> &[u32] {
        &self.degeneracies
    }
}

/// `2s + 1` for a positive half-integer `s`.
pub(crate) fn degeneracy_of(s: f64) -> Option<u32> {
    let two_s = 2.0 * s;
    if !two_s.is_finite() || two_s < 0.5 || (two_s - two_s.round()).abs() > 1e-12 {
        return None;
    }
    Some(two_s.round() as u32 + 1)
}

pub(crate) fn check_distinct(coords: &[f64]) -> Result<()> {
    for i in 0..coords.len() {
        if !coords[i].is_finite() {
            return Err(Error::InvalidSpec(format!("coordinate {i} is not finite")));
        }
        for j in 0..i {
            if (coords[i] - coords[j]).abs() < COLLISION_TOL {
                return Err(Error::DegenerateLevels {
                    i: j,
                    j: i,
                    value: coords[i],
                });
            }
        }
    }
    Ok(())
}

/// Realization of the Gaudin algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaudinKind {
    /// `X_ij = Z_ij = 1 / (eta_i - eta_j)`, `c = 0`.
    Rational,
    /// `X_ij = sqrt((1+eta_i^2)(1+eta_j^2)) / (eta_i - eta_j)`,
    /// `Z_ij = (1 + eta_i eta_j) / (eta_i - eta_j)`, `c = 1`.
    Trigonometric,
}

impl GaudinKind {
    pub fn name(self) -> &'static str {
        match self {
            GaudinKind::Rational => "rational",
            GaudinKind::Trigonometric => "trigonometric",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "rational" => Some(GaudinKind::Rational),
            "trigonometric" => Some(GaudinKind::Trigonometric),
            _ => None,
        }
    }

    /// The constant `X^2 - Z^2`.
    pub fn c(self) -> f64 {
        match self {
            GaudinKind::Rational => 0.0,
            GaudinKind::Trigonometric => 1.0,
        }
    }

    pub fn x(self, a: Complex64, b: Complex64) -> Complex64 {
        match self {
            GaudinKind::Rational => (a - b).inv(),
            GaudinKind::Trigonometric => {
                // per-point roots keep the branch consistent for complex arguments
                (1.0 + a * a).sqrt() * (1.0 + b * b).sqrt() / (a - b)
            }
        }
    }

    pub fn z(self, a: Complex64, b: Complex64) -> Complex64 {
        match self {
            GaudinKind::Rational => (a - b).inv(),
            GaudinKind::Trigonometric => (1.0 + a * b) / (a - b),
        }
    }

    /// `dZ(a, b) / db`.
    pub fn dz_db(self, a: Complex64, b: Complex64) -> Complex64 {
        let d = a - b;
        match self {
            GaudinKind::Rational => (d * d).inv(),
            GaudinKind::Trigonometric => (1.0 + a * a) / (d * d),
        }
    }

    /// `dZ(a, b) / da`.
    pub fn dz_da(self, a: Complex64, b: Complex64) -> Complex64 {
        let d = a - b;
        match self {
            GaudinKind::Rational => -(d * d).inv(),
            GaudinKind::Trigonometric => -(1.0 + b * b) / (d * d),
        }
    }
}

/// Antisymmetric coupling matrices; diagonal entries are unused and stored as zero.
#[derive(Debug, Clone)]
pub struct GaudinMatrices {
    pub kind: GaudinKind,
    pub x: DMatrix<Complex64>,
    pub z: DMatrix<Complex64>,
}

impl GaudinMatrices {
    pub fn dim(&self) -> usize {
        self.x.nrows()
    }

    /// Largest `|X_ij X_jk - X_ik (Z_ij + Z_jk)|` over distinct triples.
    pub fn gaudin_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if j == i {
                    continue;
                }
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let r = self.x[(i, j)] * self.x[(j, k)] - self.x[(i, k)] * (self.z[(i, j)] + self.z[(j, k)]);
                    worst = worst.max(r.norm());
                }
            }
        }
        worst
    }

    /// Largest `|X_ij^2 - Z_ij^2 - c|` over pairs.
    pub fn c_deviation(&self) -> f64 {
        let c = self.kind.c();
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let x = self.x[(i, j)];
                    let z = self.z[(i, j)];
                    worst = worst.max((x * x - z * z - c).norm());
                }
            }
        }
        worst
    }

    /// Largest `|M_ij + M_ji|` over both matrices.
    pub fn antisymmetry_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst
                    .max((self.x[(i, j)] + self.x[(j, i)]).norm())
                    .max((self.z[(i, j)] + self.z[(j, i)]).norm());
            }
        }
        worst
    }
}

fn fill(kind: GaudinKind, coords: &[Complex64]) -> GaudinMatrices {
    let n = coords.len();
    let mut x = DMatrix::zeros(n, n);
    let mut z = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let xij = kind.x(coords[i], coords[j]);
            let zij = kind.z(coords[i], coords[j]);
            x[(i, j)] = xij;
            x[(j, i)] = -xij;
            z[(i, j)] = zij;
            z[(j, i)] = -zij;
        }
    }
    GaudinMatrices { kind, x, z }
}

/// Coupling matrices over the levels.
pub fn build_gaudin(kind: GaudinKind, levels: &LevelSet) -> GaudinMatrices {
    let coords: Vec<Complex64> = levels.etas().iter().map(|&e| e.into()).collect();
    fill(kind, &coords)
}

/// Extends level matrices to `m + N` dimensions by appending rapidity coordinates.
///
/// The original `m x m` block is copied unchanged.
pub fn extend_with_rapidities(
    matrices: &GaudinMatrices,
    levels: &LevelSet,
    rapidities: &RapiditySet,
) -> Result<GaudinMatrices> {
    let m = levels.len();
    if matrices.dim() != m {
        return Err(Error::DimensionMismatch(matrices.dim(), m));
    }
    let values = rapidities.values();
    for (a, &ra) in values.iter().enumerate() {
        for (i, &eta) in levels.etas().iter().enumerate() {
            if (ra - eta).norm() < COLLISION_TOL {
                return Err(Error::SingularExtension {
                    level: i,
                    rapidity: a,
                    value: ra,
                });
            }
        }
        for (b, &rb) in values.iter().enumerate().take(a) {
            if (ra - rb).norm() < COLLISION_TOL {
                return Err(Error::Collision {
                    first: format!("rapidity {b}"),
                    second: format!("rapidity {a}"),
                });
            }
        }
    }
    let coords: Vec<Complex64> = levels
        .etas()
        .iter()
        .map(|&e| Complex64::from(e))
        .chain(values.iter().copied())
        .collect();
    let mut ext = fill(matrices.kind, &coords);
    ext.x.view_mut((0, 0), (m, m)).copy_from(&matrices.x);
    ext.z.view_mut((0, 0), (m, m)).copy_from(&matrices.z);
    Ok(ext)
}

/// Row `(X_0k, Z_0k)` of a trigonometric copy placed at `eta_0 -> infinity`:
/// `X_0k = sqrt(1 + eta_k^2)`, `Z_0k = eta_k`.
pub fn eta0_infinity_row(levels: &LevelSet) -> (Vec<f64>, Vec<f64>) {
    let x0 = levels.etas().iter().map(|&e| (1.0 + e * e).sqrt()).collect();
    let z0 = levels.etas().to_vec();
    (x0, z0)
}

/// Rebuilds `X_ik = X_i0 X_0k / (Z_i0 + Z_0k)` from the infinite-copy row.
pub fn reconstruct_from_infinity_row(x0: &[f64], z0: &[f64]) -> DMatrix<f64> {
    let m = x0.len();
    DMatrix::from_fn(m, m, |i, k| {
        if i == k {
            0.0
        } else {
            (-x0[i]) * x0[k] / (-z0[i] + z0[k])
        }
    })
}

/// How the irrep label of a deformed copy grows with `1/xi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelScale {
    /// `s(xi) = s(1) + (1/xi - 1) Omega`; the label driving the all-copies
    /// deformation and its decoupled `xi = 0` equations.
    Degeneracy,
    /// `s(xi) = s(1) + (1/xi - 1) Omega / 4`; the label implied by the shift
    /// `A0 = S0 + (1 - 1/xi) Omega / 4` and the boson normalization
    /// `b = sqrt(2/Omega) S(0)`. The single-copy contraction to the Dicke
    /// model requires this one.
    QuarterDegeneracy,
}

impl LabelScale {
    fn factor(self) -> f64 {
        match self {
            LabelScale::Degeneracy => 1.0,
            LabelScale::QuarterDegeneracy => 0.25,
        }
    }
}

/// A point `xi in [0, 1]` on the pseudo-deformation path of one copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeformationPoint {
    xi: f64,
    omega: u32,
    scale: LabelScale,
}

impl DeformationPoint {
    pub fn new(xi: f64, omega: u32) -> Result<Self> {
        Self::with_scale(xi, omega, LabelScale::Degeneracy)
    }

    pub fn with_scale(xi: f64, omega: u32, scale: LabelScale) -> Result<Self> {
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Domain(xi));
        }
        if omega < 1 {
            return Err(Error::InvalidSpec("degeneracy must be positive".into()));
        }
        Ok(Self { xi, omega, scale })
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn omega(&self) -> u32 {
        self.omega
    }

    pub fn scale(&self) -> LabelScale {
        self.scale
    }

    fn omega_eff(&self) -> f64 {
        self.omega as f64 * self.scale.factor()
    }

    /// `xi * s(xi)`, finite on all of `[0, 1]`.
    pub fn scaled_label(&self, s1: f64) -> f64 {
        self.xi * s1 + (1.0 - self.xi) * self.omega_eff()
    }

    /// `s(xi)`; undefined at `xi = 0`.
    pub fn label(&self, s1: f64) -> Result<f64> {
        if self.xi == 0.0 {
            return Err(Error::ContractionLimit);
        }
        Ok(s1 + (1.0 / self.xi - 1.0) * self.omega_eff())
    }

    /// `(s(xi), xi s(xi))`.
    pub fn deformed_spin(&self, s1: f64) -> Result<(f64, f64)> {
        Ok((self.label(s1)?, self.scaled_label(s1)))
    }

    /// Index `n` when `xi` sits on the unitary grid, where `2 s(xi)` is an integer.
    pub fn grid_index(&self) -> Option<u64> {
        if self.xi == 0.0 {
            return None;
        }
        let n = 2.0 * (1.0 / self.xi - 1.0) * self.omega_eff();
        let rounded = n.round();
        ((n - rounded).abs() < 1e-7 * rounded.max(1.0)).then_some(rounded as u64)
    }
}

/// `xi_n` at which `s(xi_n) = s(1) + n/2`.
pub fn unitary_grid(omega: u32, n: u64, scale: LabelScale) -> f64 {
    let w = 2.0 * omega as f64 * scale.factor();
    w / (n as f64 + w)
}
