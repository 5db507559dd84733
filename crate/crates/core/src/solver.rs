//! Root finding and continuation along the deformation parameter.
//!
//! The decoupled equations at `xi = 0` reduce to a single scalar secular
//! function whose real roots seed the rapidities. A seed may use a root more
//! than once; such clusters are split along the asymptotic direction of the
//! first continuation step, where `k` coincident rapidities separate as
//! `x0 + sqrt(w / a) z_j` with `z_j` the zeros of the Hermite polynomial `H_k`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::families::Homotopy;
use crate::rg_core::{check_collisions, DickeSpec, Frame, Model, ModelSpec, RapiditySet, ResidualReport};

/// Knobs of the adaptive continuation.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationPolicy {
    pub xi_start: f64,
    pub xi_end: f64,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub step_shrink: f64,
    pub step_grow: f64,
    /// Nonzero seeds jitter the magnitude of cluster splits by up to 0.1%.
    pub seed: u64,
}

impl Default for ContinuationPolicy {
    fn default() -> Self {
        Self {
            xi_start: 0.0,
            xi_end: 1.0,
            initial_step: 1e-2,
            min_step: 1e-8,
            max_step: 0.1,
            newton_tol: 1e-10,
            max_newton_iters: 60,
            step_shrink: 0.5,
            step_grow: 1.3,
            seed: 0,
        }
    }
}

impl ContinuationPolicy {
    pub fn between(xi_start: f64, xi_end: f64) -> Self {
        Self {
            xi_start,
            xi_end,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for xi in [self.xi_start, self.xi_end] {
            if !(0.0..=1.0).contains(&xi) {
                return Err(Error::Domain(xi));
            }
        }
        let ok = self.min_step > 0.0
            && self.min_step <= self.initial_step
            && self.initial_step <= self.max_step
            && self.newton_tol > 0.0
            && self.max_newton_iters > 0
            && self.step_shrink > 0.0
            && self.step_shrink < 1.0
            && self.step_grow >= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("inconsistent continuation policy {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceStatus {
    Converged,
    Stalled,
    CollisionDetected,
}

impl TraceStatus {
    pub fn name(self) -> &'static str {
        match self {
            TraceStatus::Converged => "converged",
            TraceStatus::Stalled => "stalled",
            TraceStatus::CollisionDetected => "collision_detected",
        }
    }
}

#[derive(Debug, Clone)]
pub struct TracePoint {
    pub xi: f64,
    pub rapidities: RapiditySet,
    pub max_abs: f64,
    pub iterations: usize,
}

/// Accepted points of one continuation run.
#[derive(Debug, Clone)]
pub struct SolutionTrace {
    pub path: Vec<TracePoint>,
    pub status: TraceStatus,
    /// Independent residual at the final point, when the family has one.
    pub endpoint_residual: Option<f64>,
    pub diagnostic: Option<String>,
}

impl SolutionTrace {
    pub fn last(&self) -> &TracePoint {
        self.path.last().expect("trace holds at least the start point")
    }

    pub fn converged(&self) -> bool {
        self.status == TraceStatus::Converged
    }

    /// Largest conjugation defect over the trace.
    pub fn conjugation_defect(&self) -> f64 {
        self.path
            .iter()
            .map(|p| p.rapidities.conjugation_defect())
            .fold(0.0, f64::max)
    }
}

/// Result of a Newton solve.
#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub rapidities: RapiditySet,
    pub iterations: usize,
    pub max_abs: f64,
}

const SINGULAR_CONDITION: f64 = 1e14;

fn condition_estimate(jac: &DMatrix<Complex64>) -> f64 {
    let sv = jac.clone().singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let min = sv.iter().cloned().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

fn newton_step(rep: &ResidualReport) -> Result<DVector<Complex64>> {
    let jac = rep.jacobian.as_ref().expect("residual families report Jacobians");
    let cond = condition_estimate(jac);
    if cond.is_nan() || cond > SINGULAR_CONDITION {
        return Err(Error::SingularJacobian(cond));
    }
    let rhs = DVector::from_iterator(rep.residuals.len(), rep.residuals.iter().map(|r| -r));
    jac.clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::SingularJacobian(f64::INFINITY))
}

fn shifted(r: &RapiditySet, delta: &DVector<Complex64>, lambda: f64) -> RapiditySet {
    RapiditySet::new(
        r.values()
            .iter()
            .zip(delta.iter())
            .map(|(x, d)| x + d * lambda)
            .collect(),
        r.frame(),
    )
}

/// Damped Newton iteration on a fixed residual system.
///
/// A start point already within `tol` is returned untouched. A full step that
/// does not lower the largest residual is halved; once `tol` is met one more
/// step is taken if it still lowers the residual.
pub fn newton_solve<F>(residual: F, r0: &RapiditySet, tol: f64, max_iters: usize) -> Result<NewtonOutcome>
where
    F: Fn(&RapiditySet) -> Result<ResidualReport>,
{
    let mut x = r0.clone();
    let mut rep = residual(&x)?;
    if rep.max_abs <= tol {
        return Ok(NewtonOutcome {
            rapidities: x,
            iterations: 0,
            max_abs: rep.max_abs,
        });
    }
    for it in 1..=max_iters {
        let delta = newton_step(&rep)?;
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = shifted(&x, &delta, lambda);
            if let Ok(trial_rep) = residual(&trial) {
                if trial_rep.max_abs < rep.max_abs {
                    accepted = Some((trial, trial_rep));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((next, next_rep)) = accepted else {
            return Err(Error::NoConvergence {
                iterations: it,
                best_residual: rep.max_abs,
                best: x.values().to_vec(),
            });
        };
        x = next;
        rep = next_rep;
        if rep.max_abs <= tol {
            if let Ok(delta) = newton_step(&rep) {
                let polished = shifted(&x, &delta, 1.0);
                if let Ok(p_rep) = residual(&polished) {
                    if p_rep.max_abs < rep.max_abs {
                        return Ok(NewtonOutcome {
                            rapidities: polished,
                            iterations: it + 1,
                            max_abs: p_rep.max_abs,
                        });
                    }
                }
            }
            return Ok(NewtonOutcome {
                rapidities: x,
                iterations: it,
                max_abs: rep.max_abs,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iters,
        best_residual: rep.max_abs,
        best: x.values().to_vec(),
    })
}

/// Zeros of the physicists' Hermite polynomial `H_k`, ascending.
pub fn hermite_zeros(k: usize) -> Vec<f64> {
    if k == 0 {
        return Vec::new();
    }
    let jacobi = DMatrix::from_fn(k, k, |i, j| {
        if i + 1 == j || j + 1 == i {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut zeros: Vec<f64> = SymmetricEigen::new(jacobi).eigenvalues.iter().cloned().collect();
    zeros.sort_by(f64::total_cmp);
    zeros
}

const CLUSTER_TOL: f64 = 1e-8;

/// Groups of indices whose rapidities coincide.
fn clusters(r: &RapiditySet) -> Vec<Vec<usize>> {
    let values = r.values();
    let mut assigned = vec![false; values.len()];
    let mut out = Vec::new();
    for a in 0..values.len() {
        if assigned[a] {
            continue;
        }
        let group: Vec<usize> = (a..values.len())
            .filter(|&b| !assigned[b] && (values[a] - values[b]).norm() < CLUSTER_TOL)
            .collect();
        for &b in &group {
            assigned[b] = true;
        }
        if group.len() > 1 {
            out.push(group);
        }
    }
    out
}

fn lift_clusters(
    h: &dyn Homotopy,
    xi: f64,
    xi_next: f64,
    r: &RapiditySet,
    rng: &mut Option<ChaCha8Rng>,
) -> Result<RapiditySet> {
    let rep = h.evaluate(xi, r)?;
    let jac = rep.jacobian.expect("residual families report Jacobians");
    let mut values = r.values().to_vec();
    for group in clusters(r) {
        let x0 = values[group[0]];
        let a = jac[(group[0], group[0])];
        let w = h.pair_coupling(xi_next, x0);
        let mut sigma = (w / a).sqrt();
        if let Some(rng) = rng.as_mut() {
            sigma *= 1.0 + 1e-3 * rng.gen_range(-1.0..1.0);
        }
        for (&idx, z) in group.iter().zip(hermite_zeros(group.len())) {
            values[idx] = x0 + sigma * z;
        }
    }
    Ok(RapiditySet::new(values, r.frame()))
}

fn euler_predict(h: &dyn Homotopy, xi: f64, xi_next: f64, r: &RapiditySet) -> Option<RapiditySet> {
    let rep = h.evaluate(xi, r).ok()?;
    let jac = rep.jacobian?;
    if condition_estimate(&jac) > SINGULAR_CONDITION {
        return None;
    }
    let d_xi = h.xi_derivative(xi, r).ok()?;
    let rhs = DVector::from_iterator(d_xi.len(), d_xi.iter().map(|v| -v));
    let slope = jac.lu().solve(&rhs)?;
    Some(shifted(r, &slope, xi_next - xi))
}

fn is_collision(e: &Error) -> bool {
    matches!(
        e,
        Error::Collision { .. } | Error::SingularExtension { .. } | Error::SingularJacobian(_)
    )
}

/// Tracks a solution of `h` from `policy.xi_start` to `policy.xi_end`.
///
/// The start point must solve the equations at `xi_start`; a start within
/// reach of Newton is polished first. Failed steps shrink the step size; a
/// step below `min_step` ends the run with a partial trace.
pub fn continue_in_xi(h: &dyn Homotopy, policy: &ContinuationPolicy, r_start: &RapiditySet) -> Result<SolutionTrace> {
    policy.validate()?;
    r_start.expect_frame(h.frame())?;
    let tol = policy.newton_tol;
    let start = newton_solve(
        |r| h.evaluate(policy.xi_start, r),
        r_start,
        tol,
        policy.max_newton_iters,
    )?;
    let mut path = vec![TracePoint {
        xi: policy.xi_start,
        rapidities: start.rapidities.clone(),
        max_abs: start.max_abs,
        iterations: start.iterations,
    }];
    let mut rng = (policy.seed != 0).then(|| ChaCha8Rng::seed_from_u64(policy.seed));
    let dir = if policy.xi_end >= policy.xi_start { 1.0 } else { -1.0 };
    let mut xi = policy.xi_start;
    let mut x = start.rapidities;
    let mut step = policy.initial_step;
    let poles = h.poles();

    while xi != policy.xi_end {
        let remaining = (policy.xi_end - xi).abs();
        let xi_next = if step >= remaining {
            policy.xi_end
        } else {
            xi + dir * step
        };
        let predicted = if clusters(&x).is_empty() {
            euler_predict(h, xi, xi_next, &x).unwrap_or_else(|| x.clone())
        } else {
            lift_clusters(h, xi, xi_next, &x, &mut rng)?
        };
        let attempt = newton_solve(|r| h.evaluate(xi_next, r), &predicted, tol, policy.max_newton_iters)
            .and_then(|out| check_collisions(out.rapidities.values(), &poles, true).map(|_| out));
        match attempt {
            Ok(out) => {
                log::trace!(
                    "{}: xi {:.6e} accepted in {} iterations",
                    h.name(),
                    xi_next,
                    out.iterations
                );
                path.push(TracePoint {
                    xi: xi_next,
                    rapidities: out.rapidities.clone(),
                    max_abs: out.max_abs,
                    iterations: out.iterations,
                });
                xi = xi_next;
                x = out.rapidities;
                step = (step * policy.step_grow).min(policy.max_step);
            }
            Err(e) => {
                step *= policy.step_shrink;
                if step < policy.min_step {
                    let status = if is_collision(&e) {
                        TraceStatus::CollisionDetected
                    } else {
                        TraceStatus::Stalled
                    };
                    log::debug!("{}: stopped at xi {:.6e}: {}", h.name(), xi, e);
                    return Ok(SolutionTrace {
                        path,
                        status,
                        endpoint_residual: None,
                        diagnostic: Some(format!("step underflow at xi = {xi:e}: {e}")),
                    });
                }
            }
        }
    }

    let mut trace = SolutionTrace {
        path,
        status: TraceStatus::Converged,
        endpoint_residual: None,
        diagnostic: None,
    };
    if let Some(check) = h.independent_check(xi, &x) {
        match check {
            Ok(rep) => {
                trace.endpoint_residual = Some(rep.max_abs);
                if rep.max_abs >= 10.0 * tol {
                    trace.status = TraceStatus::Stalled;
                    trace.diagnostic = Some(format!(
                        "independent endpoint residual {:.3e} exceeds 10 x tolerance",
                        rep.max_abs
                    ));
                }
            }
            Err(e) => {
                trace.status = TraceStatus::CollisionDetected;
                trace.diagnostic = Some(format!("endpoint verification failed: {e}"));
            }
        }
    }
    Ok(trace)
}

/// Scalar secular function of the decoupled equations.
trait Secular {
    fn poles(&self) -> Vec<f64>;
    fn value(&self, z: f64) -> f64;
}

impl Secular for ModelSpec {
    fn poles(&self) -> Vec<f64> {
        self.levels.etas().to_vec()
    }

    fn value(&self, z: f64) -> f64 {
        let zc = Complex64::from(z);
        1.0 + self.coupling_g
            * self
                .levels
                .etas()
                .iter()
                .zip(self.levels.degeneracies())
                .map(|(&e, &d)| self.kind.z(e.into(), zc).re * d as f64)
                .sum::<f64>()
    }
}

impl Secular for DickeSpec {
    fn poles(&self) -> Vec<f64> {
        self.epsilons.clone()
    }

    fn value(&self, z: f64) -> f64 {
        let two_g2 = 2.0 * self.coupling_g * self.coupling_g;
        self.hbar_omega
            - z
            - two_g2
                * self
                    .epsilons
                    .iter()
                    .zip(&self.spins)
                    .map(|(&e, &s)| (2.0 * s + 1.0) / (e - z))
                    .sum::<f64>()
    }
}

fn bisect(f: &dyn Secular, mut lo: f64, mut hi: f64) -> f64 {
    let mut f_lo = f.value(lo);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f.value(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn secular_roots_of(f: &dyn Secular) -> Vec<f64> {
    let mut poles = f.poles();
    poles.sort_by(f64::total_cmp);
    let nudge = |p: f64| 1e-12 * p.abs().max(1.0);
    let mut roots = Vec::new();
    let sign_change = |a: f64, b: f64| {
        let (fa, fb) = (f.value(a), f.value(b));
        fa.is_finite() && fb.is_finite() && (fa > 0.0) != (fb > 0.0)
    };
    // left of the lowest pole
    let hi = poles[0] - nudge(poles[0]);
    let mut width = 1.0;
    for _ in 0..90 {
        let lo = poles[0] - width;
        if sign_change(lo, hi) {
            roots.push(bisect(f, lo, hi));
            break;
        }
        width *= 2.0;
    }
    for w in poles.windows(2) {
        let (lo, hi) = (w[0] + nudge(w[0]), w[1] - nudge(w[1]));
        if lo < hi && sign_change(lo, hi) {
            roots.push(bisect(f, lo, hi));
        }
    }
    let last = *poles.last().unwrap();
    let lo = last + nudge(last);
    let mut width = 1.0;
    for _ in 0..90 {
        let hi = last + width;
        if sign_change(lo, hi) {
            roots.push(bisect(f, lo, hi));
            break;
        }
        width *= 2.0;
    }
    roots
}

/// Real roots of the decoupled secular function, ascending.
pub fn secular_roots(model: &Model) -> Vec<f64> {
    match model {
        Model::Rg(spec) if spec.coupling_g == 0.0 => Vec::new(),
        Model::Rg(spec) => secular_roots_of(spec),
        Model::Dicke(spec) => secular_roots_of(spec),
    }
}

/// Which secular roots seed the rapidities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SeedSelection {
    /// Ground configuration of the endpoint: for RG models the `N` lowest
    /// roots (the lowest repeated when too few exist); for Dicke models all
    /// `N` excitations in the lowest collective mode.
    Lowest,
    /// The `N` lowest roots, each used once.
    Distinct,
    /// Multiplicity of every root, ascending order; must sum to `N`.
    Occupation(Vec<usize>),
}

/// Decoupled solution: `N` roots of the secular equation, possibly repeated,
/// sorted by real part.
///
/// The decoupled modes are bosonic, so no level capacity applies here; see
/// [`check_capacity`] for the physical endpoint.
pub fn solve_tda(model: &Model, selection: &SeedSelection) -> Result<RapiditySet> {
    let n = model.n_excitations();
    let roots = secular_roots(model);
    let values = match selection {
        SeedSelection::Lowest | SeedSelection::Distinct => {
            if roots.is_empty() || (roots.len() < n && *selection == SeedSelection::Distinct) {
                return Err(Error::InsufficientModes {
                    found: roots.len(),
                    needed: n,
                });
            }
            let distinct = match (model, selection) {
                (Model::Dicke(_), SeedSelection::Lowest) => 1,
                _ => n,
            };
            let mut v: Vec<f64> = roots.iter().take(distinct).cloned().collect();
            v.resize(n, roots[0]);
            v
        }
        SeedSelection::Occupation(counts) => {
            if counts.len() != roots.len() {
                return Err(Error::Selection(format!(
                    "occupation lists {} roots, the secular equation has {}",
                    counts.len(),
                    roots.len()
                )));
            }
            if counts.iter().sum::<usize>() != n {
                return Err(Error::Selection(format!("occupation does not sum to N = {n}")));
            }
            counts
                .iter()
                .zip(&roots)
                .flat_map(|(&c, &r)| std::iter::repeat_n(r, c))
                .collect()
        }
    };
    let frame = match model {
        Model::Rg(_) => Frame::RgEta,
        Model::Dicke(_) => Frame::DickeX,
    };
    Ok(RapiditySet::real(values, frame).sorted())
}

/// The quasispin levels hold at most `sum 2 s_i` excitations.
pub fn check_capacity(model: &Model) -> Result<()> {
    match model {
        Model::Rg(spec) if spec.n_excitations > spec.capacity() => Err(Error::Selection(format!(
            "{} excitations exceed the level capacity {}",
            spec.n_excitations,
            spec.capacity()
        ))),
        _ => Ok(()),
    }
}

/// Every occupation of `n_roots` roots by `n` excitations, lexicographically descending.
pub fn all_occupations(n_roots: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(slot: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(cur.clone());
            return;
        }
        for c in (0..=left).rev() {
            cur[slot] = c;
            rec(slot + 1, left - c, cur, out);
        }
    }
    let mut out = Vec::new();
    if n_roots > 0 {
        rec(0, n, &mut vec![0; n_roots], &mut out);
    }
    out
}
