//! Residual systems for the Bethe rapidities.
//!
//! Four families are provided, each with its analytic Jacobian with respect to
//! the rapidities:
//!
//! * [`rg_residual`]: `1 + g sum_i Z_ia s_i - g sum_{b != a} Z_ba`
//! * [`deformed_rg_residual`]: `1 + g sum_i Z_ia xi s_i(xi) - g xi sum_{b != a} Z_ba`
//! * [`tda_residual`]: `1 + g sum_i Z_ia Omega_i`
//! * [`dicke_rg_residual`]:
//!   `(hw - x_a) - 2G^2 sum_k s_k / (e_k - x_a) + 2G^2 sum_{b != a} 1 / (x_b - x_a)`
//!
//! plus [`deformed_dicke_residual`], the equations of the trigonometric model
//! in which a single copy at `eta_0 -> inf` is pseudo-deformed, written in Dicke
//! coordinates `x = -eta / c(xi)`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::algebra::{
    build_gaudin, check_distinct, degeneracy_of, extend_with_rapidities, DeformationPoint, GaudinKind, LabelScale,
    LevelSet, COLLISION_TOL,
};
use crate::error::{Error, Result};

/// Coordinate frame of a rapidity set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Gaudin coordinates `eta_a` of the Richardson-Gaudin model.
    RgEta,
    /// Energy coordinates `x_a` of the Dicke model.
    DickeX,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::RgEta => "rg_eta",
            Frame::DickeX => "dicke_x",
        }
    }
}

/// Complex rapidities labeling a Bethe state.
#[derive(Debug, Clone, PartialEq)]
pub struct RapiditySet {
    values: Vec<Complex64>,
    frame: Frame,
}

impl RapiditySet {
    pub fn new(values: Vec<Complex64>, frame: Frame) -> Self {
        Self { values, frame }
    }

    pub fn real(values: Vec<f64>, frame: Frame) -> Self {
        Self::new(values.into_iter().map(Complex64::from).collect(), frame)
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn expect_frame(&self, frame: Frame) -> Result<()> {
        if self.frame != frame {
            return Err(Error::FrameMismatch {
                expected: frame.name(),
                got: self.frame.name(),
            });
        }
        Ok(())
    }

    /// Sorted by real part, then imaginary part.
    pub fn sorted(&self) -> Self {
        let mut values = self.values.clone();
        values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        Self::new(values, self.frame)
    }

    /// Largest distance from a rapidity to the nearest conjugate of another
    /// (zero for a set closed under conjugation).
    pub fn conjugation_defect(&self) -> f64 {
        self.values
            .iter()
            .map(|a| {
                self.values
                    .iter()
                    .map(|b| (a - b.conj()).norm())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    }

    /// Largest distance between matched rapidities of two sets, compared
    /// after sorting.
    pub fn distance(&self, other: &RapiditySet) -> f64 {
        if self.len() != other.len() || self.frame != other.frame {
            return f64::INFINITY;
        }
        let mut left = self.values.clone();
        let mut right = other.values.clone();
        let mut worst = 0.0_f64;
        // greedy matching is exact for well separated sets
        while let Some(a) = left.pop() {
            let (j, d) = right
                .iter()
                .enumerate()
                .map(|(j, b)| (j, (a - b).norm()))
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            right.swap_remove(j);
            worst = worst.max(d);
        }
        worst
    }
}

/// Richardson-Gaudin model: levels, Gaudin realization, excitations and coupling `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub levels: LevelSet,
    pub kind: GaudinKind,
    pub n_excitations: usize,
    pub coupling_g: f64,
}

impl ModelSpec {
    pub fn new(levels: LevelSet, kind: GaudinKind, n_excitations: usize, coupling_g: f64) -> Result<Self> {
        if n_excitations < 1 {
            return Err(Error::InvalidSpec("N must be at least 1".into()));
        }
        if !coupling_g.is_finite() {
            return Err(Error::InvalidSpec("coupling g must be finite".into()));
        }
        Ok(Self {
            levels,
            kind,
            n_excitations,
            coupling_g,
        })
    }

    /// Largest number of excitations the levels can hold (`sum 2 s_i`).
    pub fn capacity(&self) -> usize {
        self.levels.degeneracies().iter().map(|&d| d as usize - 1).sum()
    }
}

/// Dicke model `H = hw b^+ b + sum_k e_k S_k^0 + G sum_k (b^+ S_k + S_k^+ b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeSpec {
    pub epsilons: Vec<f64>,
    pub spins: Vec<f64>,
    pub coupling_g: f64,
    pub hbar_omega: f64,
    pub n_excitations: usize,
}

impl DickeSpec {
    pub fn new(
        epsilons: Vec<f64>,
        spins: Vec<f64>,
        coupling_g: f64,
        hbar_omega: f64,
        n_excitations: usize,
    ) -> Result<Self> {
        if epsilons.is_empty() {
            return Err(Error::InvalidSpec("at least one spin level is required".into()));
        }
        if epsilons.len() != spins.len() {
            return Err(Error::InvalidSpec(format!(
                "{} level energies but {} spins",
                epsilons.len(),
                spins.len()
            )));
        }
        for (k, &s) in spins.iter().enumerate() {
            if degeneracy_of(s).is_none() {
                return Err(Error::InvalidSpec(format!(
                    "spin {s} of level {k} is not a positive half-integer"
                )));
            }
        }
        check_distinct(&epsilons)?;
        if !(hbar_omega > 0.0 && hbar_omega.is_finite()) {
            return Err(Error::InvalidSpec("hbar_omega must be positive".into()));
        }
        if !coupling_g.is_finite() {
            return Err(Error::InvalidSpec("coupling G must be finite".into()));
        }
        if n_excitations < 1 {
            return Err(Error::InvalidSpec("N must be at least 1".into()));
        }
        Ok(Self {
            epsilons,
            spins,
            coupling_g,
            hbar_omega,
            n_excitations,
        })
    }

    pub fn len(&self) -> usize {
        self.epsilons.len()
    }

    pub fn is_empty(&self) -> bool {
        self.epsilons.is_empty()
    }

    /// Energy of the reference state `|0> (x) |s_k, -s_k>`.
    pub fn vacuum_energy(&self) -> f64 {
        -self.epsilons.iter().zip(&self.spins).map(|(e, s)| e * s).sum::<f64>()
    }

    /// Number of basis states with exactly `N` excitations.
    pub fn sector_dimension(&self) -> usize {
        let caps: Vec<usize> = self.spins.iter().map(|s| (2.0 * s).round() as usize).collect();
        count_fillings(&caps, self.n_excitations)
    }

    /// `c(xi) = sqrt(2 xi / (Omega_0 G^2))`, with `eta = -c x`.
    pub fn coordinate_scale(&self, xi: f64, omega0: u32) -> f64 {
        (2.0 * xi / (omega0 as f64 * self.coupling_g * self.coupling_g)).sqrt()
    }

    /// `g(xi) = sqrt(8 xi / (Omega_0 G^2)) G^2 / hw`.
    pub fn deformed_coupling(&self, xi: f64, omega0: u32) -> f64 {
        let g2 = self.coupling_g * self.coupling_g;
        (8.0 * xi / (omega0 as f64 * g2)).sqrt() * g2 / self.hbar_omega
    }
}

/// Distributions of `n` excitations over sites of capacities `caps` plus one unbounded boson.
fn count_fillings(caps: &[usize], n: usize) -> usize {
    // ways[j] = number of spin fillings with j excitations; the boson takes the rest.
    let mut ways = vec![0usize; n + 1];
    ways[0] = 1;
    for &cap in caps {
        let mut next = vec![0usize; n + 1];
        for (j, &w) in ways.iter().enumerate() {
            for add in 0..=cap.min(n - j) {
                next[j + add] += w;
            }
        }
        ways = next;
    }
    ways.iter().sum()
}

/// Either model family.
#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Rg(ModelSpec),
    Dicke(DickeSpec),
}

impl Model {
    pub fn n_excitations(&self) -> usize {
        match self {
            Model::Rg(s) => s.n_excitations,
            Model::Dicke(s) => s.n_excitations,
        }
    }
}

/// Residual vector with optional Jacobian.
#[derive(Debug, Clone)]
pub struct ResidualReport {
    pub residuals: Vec<Complex64>,
    pub max_abs: f64,
    pub jacobian: Option<DMatrix<Complex64>>,
    /// Each residual depends only on its own rapidity.
    pub decoupled: bool,
}

impl ResidualReport {
    pub(crate) fn new(residuals: Vec<Complex64>, jacobian: Option<DMatrix<Complex64>>, decoupled: bool) -> Self {
        let max_abs = residuals.iter().map(|r| r.norm()).fold(0.0, f64::max);
        Self {
            residuals,
            max_abs,
            jacobian,
            decoupled,
        }
    }

    /// Index of the largest residual.
    pub fn worst_index(&self) -> Option<usize> {
        self.residuals
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .map(|(i, _)| i)
    }
}

/// Collision checks shared by every family. Pairs are skipped when `pairs` is false.
pub(crate) fn check_collisions(values: &[Complex64], poles: &[f64], pairs: bool) -> Result<()> {
    for (a, &va) in values.iter().enumerate() {
        if !(va.re.is_finite() && va.im.is_finite()) {
            return Err(Error::Collision {
                first: format!("rapidity {a}"),
                second: "infinity".into(),
            });
        }
        for (i, &p) in poles.iter().enumerate() {
            if (va - p).norm() < COLLISION_TOL {
                return Err(Error::Collision {
                    first: format!("rapidity {a}"),
                    second: format!("level {i}"),
                });
            }
        }
        if pairs {
            for (b, &vb) in values.iter().enumerate().take(a) {
                if (va - vb).norm() < COLLISION_TOL {
                    return Err(Error::Collision {
                        first: format!("rapidity {b}"),
                        second: format!("rapidity {a}"),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Undeformed Richardson-Gaudin equations, evaluated through the extended Gaudin matrices.
pub fn rg_residual(spec: &ModelSpec, r: &RapiditySet) -> Result<ResidualReport> {
    r.expect_frame(Frame::RgEta)?;
    let levels = &spec.levels;
    let m = levels.len();
    let n = r.len();
    let ext = extend_with_rapidities(&build_gaudin(spec.kind, levels), levels, r)?;
    let g = spec.coupling_g;
    let eta = r.values();
    let mut res = Vec::with_capacity(n);
    let mut jac = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut level_sum = Complex64::new(0.0, 0.0);
        let mut level_d = Complex64::new(0.0, 0.0);
        for (i, (&e, &s)) in levels.etas().iter().zip(levels.spins()).enumerate() {
            level_sum += ext.z[(i, m + a)] * s;
            level_d += spec.kind.dz_db(e.into(), eta[a]) * s;
        }
        let mut pair_sum = Complex64::new(0.0, 0.0);
        let mut pair_d = Complex64::new(0.0, 0.0);
        for b in (0..n).filter(|&b| b != a) {
            pair_sum += ext.z[(m + b, m + a)];
            pair_d += spec.kind.dz_db(eta[b], eta[a]);
            jac[(a, b)] = -g * spec.kind.dz_da(eta[b], eta[a]);
        }
        res.push(1.0 + g * level_sum - g * pair_sum);
        jac[(a, a)] = g * level_d - g * pair_d;
    }
    Ok(ResidualReport::new(res, Some(jac), false))
}

fn deformed_rg_core(
    spec: &ModelSpec,
    xi: f64,
    r: &RapiditySet,
    with_d_xi: bool,
) -> Result<(ResidualReport, Vec<Complex64>)> {
    r.expect_frame(Frame::RgEta)?;
    if !(0.0..=1.0).contains(&xi) {
        return Err(Error::Domain(xi));
    }
    let levels = &spec.levels;
    let decoupled = xi == 0.0;
    check_collisions(r.values(), levels.etas(), !decoupled)?;
    let kind = spec.kind;
    let g = spec.coupling_g;
    let q: Vec<f64> = levels
        .spins()
        .iter()
        .zip(levels.degeneracies())
        .map(|(&s, &d)| DeformationPoint::new(xi, d).map(|p| p.scaled_label(s)))
        .collect::<Result<_>>()?;
    let eta = r.values();
    let n = r.len();
    let mut res = Vec::with_capacity(n);
    let mut d_xi = Vec::new();
    let mut jac = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut level_sum = Complex64::new(0.0, 0.0);
        let mut level_d = Complex64::new(0.0, 0.0);
        let mut level_xi = Complex64::new(0.0, 0.0);
        for (i, &e) in levels.etas().iter().enumerate() {
            let z = kind.z(e.into(), eta[a]);
            level_sum += z * q[i];
            level_d += kind.dz_db(e.into(), eta[a]) * q[i];
            level_xi += z * (levels.spins()[i] - levels.degeneracies()[i] as f64);
        }
        let mut pair_sum = Complex64::new(0.0, 0.0);
        let mut pair_d = Complex64::new(0.0, 0.0);
        if !decoupled || with_d_xi {
            for b in (0..n).filter(|&b| b != a) {
                pair_sum += kind.z(eta[b], eta[a]);
                pair_d += kind.dz_db(eta[b], eta[a]);
                jac[(a, b)] = -(g * xi) * kind.dz_da(eta[b], eta[a]);
            }
        }
        if decoupled {
            res.push(1.0 + g * level_sum);
            jac[(a, a)] = g * level_d;
        } else {
            res.push(1.0 + g * level_sum - (g * xi) * pair_sum);
            jac[(a, a)] = g * level_d - (g * xi) * pair_d;
        }
        if with_d_xi {
            d_xi.push(g * level_xi - g * pair_sum);
        }
    }
    Ok((ResidualReport::new(res, Some(jac), decoupled), d_xi))
}

/// Pseudo-deformed equations with every copy deformed.
///
/// At `xi = 1` this reproduces [`rg_residual`]; at `xi = 0` the rapidity
/// coupling drops out and it reproduces [`tda_residual`].
pub fn deformed_rg_residual(spec: &ModelSpec, xi: f64, r: &RapiditySet) -> Result<ResidualReport> {
    Ok(deformed_rg_core(spec, xi, r, false)?.0)
}

/// `d residual / d xi` of [`deformed_rg_residual`].
pub fn deformed_rg_xi_derivative(spec: &ModelSpec, xi: f64, r: &RapiditySet) -> Result<Vec<Complex64>> {
    check_collisions(r.values(), spec.levels.etas(), true)?;
    Ok(deformed_rg_core(spec, xi, r, true)?.1)
}

/// Decoupled secular equations `1 + g sum_i Z_ia Omega_i = 0`.
pub fn tda_residual(spec: &ModelSpec, r: &RapiditySet) -> Result<ResidualReport> {
    r.expect_frame(Frame::RgEta)?;
    let levels = &spec.levels;
    check_collisions(r.values(), levels.etas(), false)?;
    let g = spec.coupling_g;
    let n = r.len();
    let mut res = Vec::with_capacity(n);
    let mut jac = DMatrix::zeros(n, n);
    for (a, &eta) in r.values().iter().enumerate() {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for (&e, &omega) in levels.etas().iter().zip(levels.degeneracies()) {
            sum += spec.kind.z(e.into(), eta) * omega as f64;
            d += spec.kind.dz_db(e.into(), eta) * omega as f64;
        }
        res.push(1.0 + g * sum);
        jac[(a, a)] = g * d;
    }
    Ok(ResidualReport::new(res, Some(jac), true))
}

/// Richardson-Gaudin equations of the Dicke model, in energy units.
pub fn dicke_rg_residual(spec: &DickeSpec, r: &RapiditySet) -> Result<ResidualReport> {
    r.expect_frame(Frame::DickeX)?;
    check_collisions(r.values(), &spec.epsilons, true)?;
    let two_g2 = 2.0 * spec.coupling_g * spec.coupling_g;
    let x = r.values();
    let n = r.len();
    let mut res = Vec::with_capacity(n);
    let mut jac = DMatrix::zeros(n, n);
    for a in 0..n {
        let mut level_sum = Complex64::new(0.0, 0.0);
        let mut level_d = Complex64::new(0.0, 0.0);
        for (&e, &s) in spec.epsilons.iter().zip(&spec.spins) {
            let d = e - x[a];
            level_sum += s / d;
            level_d += s / (d * d);
        }
        let mut pair_sum = Complex64::new(0.0, 0.0);
        let mut pair_d = Complex64::new(0.0, 0.0);
        for b in (0..n).filter(|&b| b != a) {
            let d = x[b] - x[a];
            pair_sum += d.inv();
            pair_d += (d * d).inv();
            jac[(a, b)] = -two_g2 / (d * d);
        }
        res.push((spec.hbar_omega - x[a]) - two_g2 * level_sum + two_g2 * pair_sum);
        jac[(a, a)] = -1.0 - two_g2 * level_d + two_g2 * pair_d;
    }
    Ok(ResidualReport::new(res, Some(jac), false))
}

/// Richardson-Gaudin equations of the trigonometric model whose copy 0 sits at
/// `eta_0 -> inf` and is pseudo-deformed, with the couplings renormalized as
/// `g(xi) = sqrt(8 xi / (Omega_0 G^2)) G^2 / hw`, `eta_k = -c e_k`,
/// `eta_a = -c x_a`, `c = sqrt(2 xi / (Omega_0 G^2))`.
///
/// The result is the dimensionless residual
/// `1 + g Z_0a s_0(xi) + g sum_k Z_ka s_k - g sum_{b != a} Z_ba`; multiplied by
/// `hw` it converges to [`dicke_rg_residual`] as `xi -> 0`. The Jacobian is
/// taken with respect to the Dicke coordinates `x_a`.
pub fn deformed_dicke_residual(spec: &DickeSpec, xi: f64, omega0: u32, r: &RapiditySet) -> Result<ResidualReport> {
    r.expect_frame(Frame::DickeX)?;
    if xi == 0.0 {
        return Err(Error::DelegateToContraction);
    }
    if spec.coupling_g == 0.0 {
        return Err(Error::InvalidSpec("the single-copy deformation needs G != 0".into()));
    }
    if omega0 < 2 {
        return Err(Error::InvalidSpec("deformed copy needs Omega_0 >= 2".into()));
    }
    let point = DeformationPoint::with_scale(xi, omega0, LabelScale::QuarterDegeneracy)?;
    check_collisions(r.values(), &spec.epsilons, true)?;
    let s0 = point.label((omega0 as f64 - 1.0) / 2.0)?;
    let c = spec.coordinate_scale(xi, omega0);
    let g = spec.deformed_coupling(xi, omega0);
    let kind = GaudinKind::Trigonometric;
    let level_eta: Vec<Complex64> = spec.epsilons.iter().map(|&e| Complex64::from(-c * e)).collect();
    let eta: Vec<Complex64> = r.values().iter().map(|&x| -c * x).collect();
    let n = r.len();
    let mut res = Vec::with_capacity(n);
    let mut jac = DMatrix::zeros(n, n);
    for a in 0..n {
        // Z_0a = eta_a in the eta_0 -> inf limit
        let mut total = 1.0 + g * eta[a] * s0;
        let mut d_eta = Complex64::from(g * s0);
        for (k, &ek) in level_eta.iter().enumerate() {
            total += g * kind.z(ek, eta[a]) * spec.spins[k];
            d_eta += g * kind.dz_db(ek, eta[a]) * spec.spins[k];
        }
        for b in (0..n).filter(|&b| b != a) {
            total -= g * kind.z(eta[b], eta[a]);
            d_eta -= g * kind.dz_db(eta[b], eta[a]);
            jac[(a, b)] = -c * (-g * kind.dz_da(eta[b], eta[a]));
        }
        res.push(total);
        jac[(a, a)] = -c * d_eta;
    }
    Ok(ResidualReport::new(res, Some(jac), false))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_level(s: f64, g: f64) -> ModelSpec {
        ModelSpec::new(
            LevelSet::new(vec![1.0], vec![s]).unwrap(),
            GaudinKind::Trigonometric,
            1,
            g,
        )
        .unwrap()
    }

    fn jc(s: f64) -> DickeSpec {
        DickeSpec::new(vec![1.0], vec![s], 0.5, 1.0, 1).unwrap()
    }

    #[test]
    fn free_limit_gives_unit_residuals() {
        let spec = ModelSpec::new(
            LevelSet::new(vec![1.0, 2.0], vec![0.5, 0.5]).unwrap(),
            GaudinKind::Trigonometric,
            2,
            0.0,
        )
        .unwrap();
        let r = RapiditySet::new(vec![c(0.3, 0.2), c(3.1, -1.0)], Frame::RgEta);
        let rep = rg_residual(&spec, &r).unwrap();
        assert!(rep.residuals.iter().all(|&v| v == c(1.0, 0.0)));
        let tda = tda_residual(&spec, &r).unwrap();
        assert_eq!(tda.max_abs, 1.0);
    }

    #[test]
    fn single_level_closed_form_root() {
        let rep = rg_residual(&one_level(0.5, 0.2), &RapiditySet::real(vec![11.0 / 9.0], Frame::RgEta)).unwrap();
        assert!(rep.max_abs < 1e-14, "{}", rep.max_abs);
    }

    #[test]
    fn residual_is_permutation_symmetric() {
        let spec = ModelSpec::new(
            LevelSet::new(vec![1.0, 2.0, 3.0], vec![0.5, 1.0, 0.5]).unwrap(),
            GaudinKind::Trigonometric,
            3,
            -0.2,
        )
        .unwrap();
        let v = vec![c(0.4, 0.1), c(1.7, -0.3), c(2.5, 0.0)];
        let a = rg_residual(&spec, &RapiditySet::new(v.clone(), Frame::RgEta)).unwrap();
        let p = rg_residual(&spec, &RapiditySet::new(vec![v[2], v[0], v[1]], Frame::RgEta)).unwrap();
        assert_eq!(a.max_abs, p.max_abs);
        assert!((a.residuals[2] - p.residuals[0]).norm() < 1e-15);
    }

    #[test]
    fn deformed_endpoints() {
        let spec = ModelSpec::new(
            LevelSet::new(vec![1.0, 2.0, 3.5], vec![0.5, 1.0, 0.5]).unwrap(),
            GaudinKind::Trigonometric,
            2,
            0.13,
        )
        .unwrap();
        let r = RapiditySet::new(vec![c(0.4, 0.7), c(0.4, -0.7)], Frame::RgEta);
        let one = deformed_rg_residual(&spec, 1.0, &r).unwrap();
        let rg = rg_residual(&spec, &r).unwrap();
        assert_eq!(one.residuals, rg.residuals);
        let zero = deformed_rg_residual(&spec, 0.0, &r).unwrap();
        let tda = tda_residual(&spec, &r).unwrap();
        assert_eq!(zero.residuals, tda.residuals);
        assert!(zero.decoupled);
        assert!(matches!(deformed_rg_residual(&spec, 1.2, &r), Err(Error::Domain(_))));
    }

    #[test]
    fn tda_single_level_root() {
        let spec = ModelSpec::new(
            LevelSet::from_degeneracies(vec![1.0], vec![2]).unwrap(),
            GaudinKind::Trigonometric,
            1,
            0.1,
        )
        .unwrap();
        let r = RapiditySet::real(vec![1.5], Frame::RgEta);
        assert!(tda_residual(&spec, &r).unwrap().max_abs < 1e-15);
        assert!(deformed_rg_residual(&spec, 0.0, &r).unwrap().max_abs < 1e-15);
    }

    #[test]
    fn decoupled_jacobian_is_diagonal() {
        let spec = ModelSpec::new(
            LevelSet::from_degeneracies(vec![1.0, 2.0], vec![2, 2]).unwrap(),
            GaudinKind::Trigonometric,
            2,
            0.05,
        )
        .unwrap();
        let r = RapiditySet::real(vec![1.3, 2.7], Frame::RgEta);
        let jac = deformed_rg_residual(&spec, 0.0, &r).unwrap().jacobian.unwrap();
        assert_eq!(jac[(0, 1)], c(0.0, 0.0));
        assert_eq!(jac[(1, 0)], c(0.0, 0.0));
        // coincident rapidities are admissible once decoupled
        let twin = RapiditySet::real(vec![1.3, 1.3], Frame::RgEta);
        assert!(deformed_rg_residual(&spec, 0.0, &twin).is_ok());
        assert!(deformed_rg_residual(&spec, 0.5, &twin).is_err());
    }

    #[test]
    fn dicke_quadratic_roots() {
        for x in [0.5, 1.5] {
            let rep = dicke_rg_residual(&jc(0.5), &RapiditySet::real(vec![x], Frame::DickeX)).unwrap();
            assert!(rep.max_abs < 1e-15);
        }
        let h = 0.5f64.sqrt();
        for x in [1.0 - h, 1.0 + h] {
            let rep = dicke_rg_residual(&jc(1.0), &RapiditySet::real(vec![x], Frame::DickeX)).unwrap();
            assert!(rep.max_abs < 1e-15);
        }
        let free = DickeSpec::new(vec![1.0], vec![0.5], 0.0, 1.3, 1).unwrap();
        let rep = dicke_rg_residual(&free, &RapiditySet::real(vec![1.3], Frame::DickeX)).unwrap();
        assert_eq!(rep.max_abs, 0.0);
    }

    #[test]
    fn dicke_collision_is_reported() {
        let err = dicke_rg_residual(&jc(0.5), &RapiditySet::real(vec![1.0], Frame::DickeX)).unwrap_err();
        assert!(matches!(err, Error::Collision { .. }));
        let err = rg_residual(&one_level(0.5, 0.2), &RapiditySet::real(vec![1.0], Frame::DickeX)).unwrap_err();
        assert!(matches!(err, Error::FrameMismatch { .. }));
    }

    #[test]
    fn single_copy_contraction_limit() {
        let spec = jc(0.5);
        let r = RapiditySet::real(vec![0.5], Frame::DickeX);
        let limit = dicke_rg_residual(&spec, &r).unwrap().residuals[0];
        assert!(matches!(
            deformed_dicke_residual(&spec, 0.0, 2, &r),
            Err(Error::DelegateToContraction)
        ));
        let mut gaps = Vec::new();
        for xi in [1e-4, 1e-6, 1e-8] {
            let rep = deformed_dicke_residual(&spec, xi, 2, &r).unwrap();
            gaps.push((rep.residuals[0] * spec.hbar_omega - limit).norm());
        }
        assert!(gaps[1] < 1e-2);
        // two decades in xi shrink the gap by two decades
        for w in gaps.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio.log10() - 2.0).abs() < 0.1, "ratio {ratio}");
        }
    }

    #[test]
    fn single_copy_matches_explicit_two_copy_model() {
        let spec = DickeSpec::new(vec![0.7], vec![0.5], 0.4, 1.1, 1).unwrap();
        let omega0 = 3;
        let cs = spec.coordinate_scale(1.0, omega0);
        let g = spec.deformed_coupling(1.0, omega0);
        let big = 1e8;
        let rg = ModelSpec::new(
            LevelSet::from_degeneracies(vec![big, -cs * 0.7], vec![omega0, 2]).unwrap(),
            GaudinKind::Trigonometric,
            1,
            g,
        )
        .unwrap();
        for x in [c(0.3, 0.0), c(1.9, 0.4)] {
            let lhs = deformed_dicke_residual(&spec, 1.0, omega0, &RapiditySet::new(vec![x], Frame::DickeX)).unwrap();
            let rhs = rg_residual(&rg, &RapiditySet::new(vec![-cs * x], Frame::RgEta)).unwrap();
            assert!((lhs.residuals[0] - rhs.residuals[0]).norm() < 1e-6);
        }
    }

    #[test]
    fn renormalizations_depend_on_xi_over_omega() {
        let spec = DickeSpec::new(vec![0.8, 1.3], vec![0.5, 0.5], 0.2, 1.0, 2).unwrap();
        for xi in [0.3, 0.05] {
            assert!((spec.coordinate_scale(xi, 4) - spec.coordinate_scale(xi / 2.0, 2)).abs() < 1e-15);
            assert!((spec.deformed_coupling(xi, 4) - spec.deformed_coupling(xi / 2.0, 2)).abs() < 1e-15);
        }
    }

    #[test]
    fn sector_dimensions() {
        assert_eq!(jc(0.5).sector_dimension(), 2);
        let two = DickeSpec::new(vec![0.8, 1.3], vec![0.5, 0.5], 0.2, 1.0, 2).unwrap();
        assert_eq!(two.sector_dimension(), 4);
        let tc = DickeSpec::new(vec![1.0], vec![1.0], 0.2, 1.0, 3).unwrap();
        assert_eq!(tc.sector_dimension(), 3);
    }

    #[test]
    fn conjugation_symmetry() {
        let spec = ModelSpec::new(
            LevelSet::new(vec![1.0, 2.0, 3.0], vec![0.5; 3]).unwrap(),
            GaudinKind::Rational,
            2,
            0.3,
        )
        .unwrap();
        let v = vec![c(0.4, 0.3), c(2.2, -0.8)];
        let a = deformed_rg_residual(&spec, 0.6, &RapiditySet::new(v.clone(), Frame::RgEta)).unwrap();
        let b = deformed_rg_residual(
            &spec,
            0.6,
            &RapiditySet::new(v.iter().map(|z| z.conj()).collect(), Frame::RgEta),
        )
        .unwrap();
        for (x, y) in a.residuals.iter().zip(&b.residuals) {
            assert!((x.conj() - y).norm() < 1e-14);
        }
    }
}
