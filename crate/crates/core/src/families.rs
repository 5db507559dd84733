//! Deformation homotopies `F(x; xi) = 0`, registered by name.
//!
//! Every homotopy exposes its residual with analytic Jacobian, the explicit
//! `xi` derivative used by the Euler predictor, and an independent residual
//! for endpoint verification.

use num_complex::Complex64;

use crate::algebra::{DeformationPoint, GaudinKind, LabelScale};
use crate::error::{Error, Result};
use crate::rg_core::{
    check_collisions, deformed_rg_residual, deformed_rg_xi_derivative, dicke_rg_residual, rg_residual, DickeSpec,
    Frame, Model, ModelSpec, RapiditySet, ResidualReport,
};
use nalgebra::DMatrix;

/// A one-parameter family of rapidity equations.
pub trait Homotopy: Send + Sync {
    fn name(&self) -> &'static str;

    fn frame(&self) -> Frame;

    /// Level coordinates rapidities must avoid.
    fn poles(&self) -> Vec<f64>;

    /// `xi` at which the equations decouple, if any.
    fn decoupled_end(&self) -> Option<f64>;

    /// Residual and Jacobian at `xi`.
    fn evaluate(&self, xi: f64, r: &RapiditySet) -> Result<ResidualReport>;

    /// Explicit `d F / d xi` at fixed rapidities.
    fn xi_derivative(&self, xi: f64, r: &RapiditySet) -> Result<Vec<Complex64>>;

    /// Coefficient `w` of the near-coincidence term `w / (x_b - x_a)` in
    /// equation `a` when both rapidities sit near `at`.
    fn pair_coupling(&self, xi: f64, at: Complex64) -> Complex64;

    /// Independent evaluation of the same equations at `xi`, when one exists.
    fn independent_check(&self, xi: f64, r: &RapiditySet) -> Option<Result<ResidualReport>>;
}

/// Registered homotopy names with a one-line description.
pub const HOMOTOPIES: &[(&str, &str)] = &[
    (
        "all-copies",
        "every quasispin copy deformed; xi = 0 is the decoupled secular equation",
    ),
    (
        "single-copy",
        "one copy at eta_0 -> inf deformed; xi -> 0 is the Dicke model",
    ),
];

/// Options consumed by the homotopy constructors.
#[derive(Debug, Clone, Copy, Default)]
pub struct HomotopyOptions {
    /// Degeneracy `Omega_0` of the deformed copy of the single-copy family.
    pub omega0: Option<u32>,
}

/// Looks up a homotopy by name.
pub fn homotopy(name: &str, model: &Model, opts: HomotopyOptions) -> Result<Box<dyn Homotopy>> {
    match (name, model) {
        ("all-copies", Model::Rg(spec)) => Ok(Box::new(AllCopiesRg::new(spec.clone()))),
        ("all-copies", Model::Dicke(spec)) => Ok(Box::new(AllCopiesDicke::new(spec.clone()))),
        ("single-copy", Model::Dicke(spec)) => {
            let omega0 = opts.omega0.unwrap_or(spec.n_excitations as u32 + 1);
            Ok(Box::new(SingleCopyDicke::new(spec.clone(), omega0)?))
        }
        ("single-copy", Model::Rg(_)) => Err(Error::InvalidSpec(
            "the single-copy homotopy applies to Dicke models".into(),
        )),
        _ => Err(Error::InvalidSpec(format!(
            "unknown homotopy '{name}' (available: {})",
            HOMOTOPIES.iter().map(|h| h.0).collect::<Vec<_>>().join(", ")
        ))),
    }
}

/// Richardson-Gaudin equations with all copies pseudo-deformed.
#[derive(Debug, Clone)]
pub struct AllCopiesRg {
    spec: ModelSpec,
}

impl AllCopiesRg {
    pub fn new(spec: ModelSpec) -> Self {
        Self { spec }
    }
}

impl Homotopy for AllCopiesRg {
    fn name(&self) -> &'static str {
        "all-copies"
    }

    fn frame(&self) -> Frame {
        Frame::RgEta
    }

    fn poles(&self) -> Vec<f64> {
        self.spec.levels.etas().to_vec()
    }

    fn decoupled_end(&self) -> Option<f64> {
        Some(0.0)
    }

    fn evaluate(&self, xi: f64, r: &RapiditySet) -> Result<ResidualReport> {
        deformed_rg_residual(&self.spec, xi, r)
    }

    fn xi_derivative(&self, xi: f64, r: &RapiditySet) -> Result<Vec<Complex64>> {
        deformed_rg_xi_derivative(&self.spec, xi, r)
    }

    fn pair_coupling(&self, xi: f64, at: Complex64) -> Complex64 {
        let g = self.spec.coupling_g;
        match self.spec.kind {
            GaudinKind::Rational => Complex64::from(-g * xi),
            GaudinKind::Trigonometric => -g * xi * (1.0 + at * at),
        }
    }

    fn independent_check(&self, xi: f64, r: &RapiditySet) -> Option<Result<ResidualReport>> {
        (xi == 1.0).then(|| rg_residual(&self.spec, r))
    }
}

/// Dicke equations with every spin copy pseudo-deformed:
/// `(hw - x_a) - 2G^2 sum_k xi s_k(xi) / (e_k - x_a) + 2G^2 xi sum_{b != a} 1 / (x_b - x_a)`.
///
/// The bosonic copy is already contracted, so `xi = 0` leaves the decoupled
/// secular equation of the Dicke model and `xi = 1` the Dicke equations.
#[derive(Debug, Clone)]
pub struct AllCopiesDicke {
    spec: DickeSpec,
}

impl AllCopiesDicke {
    pub fn new(spec: DickeSpec) -> Self {
        Self { spec }
    }

    fn core(&self, xi: f64, r: &RapiditySet, with_d_xi: bool) -> Result<(ResidualReport, Vec<Complex64>)> {
        r.expect_frame(Frame::DickeX)?;
        if !(0.0..=1.0).contains(&xi) {
            return Err(Error::Domain(xi));
        }
        let spec = &self.spec;
        let decoupled = xi == 0.0;
        check_collisions(r.values(), &spec.epsilons, !decoupled || with_d_xi)?;
        let two_g2 = 2.0 * spec.coupling_g * spec.coupling_g;
        let q: Vec<f64> = spec
            .spins
            .iter()
            .map(|&s| DeformationPoint::new(xi, (2.0 * s).round() as u32 + 1).map(|p| p.scaled_label(s)))
            .collect::<Result<_>>()?;
        let x = r.values();
        let n = r.len();
        let mut res = Vec::with_capacity(n);
        let mut d_xi = Vec::new();
        let mut jac = DMatrix::zeros(n, n);
        for a in 0..n {
            let mut level_sum = Complex64::new(0.0, 0.0);
            let mut level_d = Complex64::new(0.0, 0.0);
            let mut level_xi = Complex64::new(0.0, 0.0);
            for (k, &e) in spec.epsilons.iter().enumerate() {
                let d = e - x[a];
                level_sum += q[k] / d;
                level_d += q[k] / (d * d);
                level_xi += (spec.spins[k] - (2.0 * spec.spins[k] + 1.0)) / d;
            }
            let mut pair_sum = Complex64::new(0.0, 0.0);
            let mut pair_d = Complex64::new(0.0, 0.0);
            if !decoupled || with_d_xi {
                for b in (0..n).filter(|&b| b != a) {
                    let d = x[b] - x[a];
                    pair_sum += d.inv();
                    pair_d += (d * d).inv();
                    jac[(a, b)] = -(two_g2 * xi) / (d * d);
                }
            }
            if decoupled {
                res.push((spec.hbar_omega - x[a]) - two_g2 * level_sum);
                jac[(a, a)] = -1.0 - two_g2 * level_d;
            } else {
                res.push((spec.hbar_omega - x[a]) - two_g2 * level_sum + (two_g2 * xi) * pair_sum);
                jac[(a, a)] = -1.0 - two_g2 * level_d + (two_g2 * xi) * pair_d;
            }
            if with_d_xi {
                d_xi.push(-two_g2 * level_xi + two_g2 * pair_sum);
            }
        }
        Ok((ResidualReport::new(res, Some(jac), decoupled), d_xi))
    }
}

impl Homotopy for AllCopiesDicke {
    fn name(&self) -> &'static str {
        "all-copies"
    }

    fn frame(&self) -> Frame {
        Frame::DickeX
    }

    fn poles(&self) -> Vec<f64> {
        self.spec.epsilons.clone()
    }

    fn decoupled_end(&self) -> Option<f64> {
        Some(0.0)
    }

    fn evaluate(&self, xi: f64, r: &RapiditySet) -> Result<ResidualReport> {
        Ok(self.core(xi, r, false)?.0)
    }

    fn xi_derivative(&self, xi: f64, r: &RapiditySet) -> Result<Vec<Complex64>> {
        Ok(self.core(xi, r, true)?.1)
    }

    fn pair_coupling(&self, xi: f64, _at: Complex64) -> Complex64 {
        Complex64::from(2.0 * self.spec.coupling_g * self.spec.coupling_g * xi)
    }

    fn independent_check(&self, xi: f64, r: &RapiditySet) -> Option<Result<ResidualReport>> {
        (xi == 1.0).then(|| dicke_rg_residual(&self.spec, r))
    }
}

/// Single-copy deformation in Dicke coordinates, scaled by `hw`:
///
/// ```text
/// hw - kappa(xi) x_a - 2G^2 sum_k s_k (1 + c^2 e_k x_a) / (e_k - x_a)
///                    + 2G^2 sum_{b != a} (1 + c^2 x_b x_a) / (x_b - x_a)
/// ```
///
/// with `c^2 = 2 xi / (Omega_0 G^2)` and `kappa = 4 xi s_0(xi) / Omega_0`.
/// It equals `hw` times [`crate::rg_core::deformed_dicke_residual`] for
/// `xi > 0` and the Dicke equations at `xi = 0`.
#[derive(Debug, Clone)]
pub struct SingleCopyDicke {
    spec: DickeSpec,
    omega0: u32,
}

impl SingleCopyDicke {
    pub fn new(spec: DickeSpec, omega0: u32) -> Result<Self> {
        if spec.coupling_g == 0.0 {
            return Err(Error::InvalidSpec("the single-copy deformation needs G != 0".into()));
        }
        if omega0 < 2 {
            return Err(Error::InvalidSpec("deformed copy needs Omega_0 >= 2".into()));
        }
        Ok(Self { spec, omega0 })
    }

    pub fn omega0(&self) -> u32 {
        self.omega0
    }

    fn kappa(&self, xi: f64) -> Result<f64> {
        let point = DeformationPoint::with_scale(xi, self.omega0, LabelScale::QuarterDegeneracy)?;
        Ok(4.0 * point.scaled_label((self.omega0 as f64 - 1.0) / 2.0) / self.omega0 as f64)
    }

    fn c2(&self, xi: f64) -> f64 {
        2.0 * xi / (self.omega0 as f64 * self.spec.coupling_g * self.spec.coupling_g)
    }
}

impl Homotopy for SingleCopyDicke {
    fn name(&self) -> &'static str {
        "single-copy"
    }

    fn frame(&self) -> Frame {
        Frame::DickeX
    }

    fn poles(&self) -> Vec<f64> {
        self.spec.epsilons.clone()
    }

    fn decoupled_end(&self) -> Option<f64> {
        None
    }

    fn evaluate(&self, xi: f64, r: &RapiditySet) -> Result<ResidualReport> {
        r.expect_frame(Frame::DickeX)?;
        let spec = &self.spec;
        check_collisions(r.values(), &spec.epsilons, true)?;
        let kappa = self.kappa(xi)?;
        let c2 = self.c2(xi);
        let two_g2 = 2.0 * spec.coupling_g * spec.coupling_g;
        let x = r.values();
        let n = r.len();
        let mut res = Vec::with_capacity(n);
        let mut jac = DMatrix::zeros(n, n);
        for a in 0..n {
            let mut total = spec.hbar_omega - kappa * x[a];
            let mut diag = Complex64::from(-kappa);
            for (&e, &s) in spec.epsilons.iter().zip(&spec.spins) {
                let d = e - x[a];
                total -= two_g2 * s * (1.0 + c2 * e * x[a]) / d;
                diag -= two_g2 * s * (1.0 + c2 * e * e) / (d * d);
            }
            for b in (0..n).filter(|&b| b != a) {
                let d = x[b] - x[a];
                total += two_g2 * (1.0 + c2 * x[b] * x[a]) / d;
                diag += two_g2 * (1.0 + c2 * x[b] * x[b]) / (d * d);
                jac[(a, b)] = -two_g2 * (1.0 + c2 * x[a] * x[a]) / (d * d);
            }
            res.push(total);
            jac[(a, a)] = diag;
        }
        Ok(ResidualReport::new(res, Some(jac), false))
    }

    fn xi_derivative(&self, _xi: f64, r: &RapiditySet) -> Result<Vec<Complex64>> {
        let spec = &self.spec;
        check_collisions(r.values(), &spec.epsilons, true)?;
        let omega0 = self.omega0 as f64;
        let d_kappa = 4.0 * ((omega0 - 1.0) / 2.0) / omega0 - 1.0;
        let d_c2 = 2.0 / (omega0 * spec.coupling_g * spec.coupling_g);
        let two_g2 = 2.0 * spec.coupling_g * spec.coupling_g;
        let x = r.values();
        Ok((0..r.len())
            .map(|a| {
                let mut v = -d_kappa * x[a];
                for (&e, &s) in spec.epsilons.iter().zip(&spec.spins) {
                    v -= two_g2 * s * d_c2 * e * x[a] / (e - x[a]);
                }
                for b in (0..r.len()).filter(|&b| b != a) {
                    v += two_g2 * d_c2 * x[b] * x[a] / (x[b] - x[a]);
                }
                v
            })
            .collect())
    }

    fn pair_coupling(&self, xi: f64, at: Complex64) -> Complex64 {
        2.0 * self.spec.coupling_g * self.spec.coupling_g * (1.0 + self.c2(xi) * at * at)
    }

    fn independent_check(&self, xi: f64, r: &RapiditySet) -> Option<Result<ResidualReport>> {
        if xi == 0.0 {
            Some(dicke_rg_residual(&self.spec, r))
        } else {
            Some(
                crate::rg_core::deformed_dicke_residual(&self.spec, xi, self.omega0, r).map(|mut rep| {
                    for v in rep.residuals.iter_mut() {
                        *v *= self.spec.hbar_omega;
                    }
                    rep.max_abs *= self.spec.hbar_omega;
                    rep.jacobian = None;
                    rep
                }),
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::LevelSet;

    fn dicke() -> DickeSpec {
        DickeSpec::new(vec![0.8, 1.3], vec![0.5, 1.0], 0.3, 1.1, 2).unwrap()
    }

    #[test]
    fn registry_lookup() {
        let model = Model::Dicke(dicke());
        for (name, _) in HOMOTOPIES {
            let h = homotopy(name, &model, HomotopyOptions::default()).unwrap();
            assert_eq!(h.name(), *name);
        }
        assert!(homotopy("nope", &model, HomotopyOptions::default()).is_err());
        let rg = Model::Rg(
            ModelSpec::new(
                LevelSet::new(vec![1.0], vec![0.5]).unwrap(),
                GaudinKind::Rational,
                1,
                0.1,
            )
            .unwrap(),
        );
        assert!(homotopy("single-copy", &rg, HomotopyOptions::default()).is_err());
    }

    #[test]
    fn all_copies_dicke_endpoint_is_dicke() {
        let h = AllCopiesDicke::new(dicke());
        let r = RapiditySet::new(vec![Complex64::new(0.9, 0.2), Complex64::new(0.9, -0.2)], Frame::DickeX);
        let a = h.evaluate(1.0, &r).unwrap();
        let b = dicke_rg_residual(&dicke(), &r).unwrap();
        assert_eq!(a.residuals, b.residuals);
    }

    #[test]
    fn single_copy_scaled_matches_raw_route() {
        let h = SingleCopyDicke::new(dicke(), 3).unwrap();
        let r = RapiditySet::new(vec![Complex64::new(0.6, 0.1), Complex64::new(1.7, -0.4)], Frame::DickeX);
        for xi in [1.0, 0.4, 1e-3] {
            let a = h.evaluate(xi, &r).unwrap();
            let b = h.independent_check(xi, &r).unwrap().unwrap();
            for (u, v) in a.residuals.iter().zip(&b.residuals) {
                assert!((u - v).norm() < 1e-11 * (1.0 + u.norm()), "{u} vs {v}");
            }
        }
        let limit = h.evaluate(0.0, &r).unwrap();
        let dicke_rep = dicke_rg_residual(&dicke(), &r).unwrap();
        for (u, v) in limit.residuals.iter().zip(&dicke_rep.residuals) {
            assert!((u - v).norm() < 1e-14);
        }
    }
}
