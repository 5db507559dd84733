//! Solution branches: many seeds tracked independently, then deduplicated.

use rayon::prelude::*;

use crate::algebra::{GaudinKind, LevelSet};
use crate::error::{Error, Result};
use crate::families::{AllCopiesRg, Homotopy, SingleCopyDicke};
use crate::rg_core::{DickeSpec, Frame, Model, ModelSpec, RapiditySet};
use crate::solver::{
    all_occupations, check_capacity, continue_in_xi, newton_solve, secular_roots, solve_tda, ContinuationPolicy,
    SeedSelection, SolutionTrace,
};

/// Two converged branches closer than this are the same solution.
pub const BRANCH_TOL: f64 = 1e-6;

/// Which seeds to track.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum BranchSelection {
    Seed(SeedSelection),
    /// Every occupation of the secular roots.
    All,
}

/// Outcome of tracking one seed.
#[derive(Debug, Clone)]
pub struct Branch {
    pub occupation: Vec<usize>,
    pub trace: Option<SolutionTrace>,
    pub error: Option<String>,
}

impl Branch {
    pub fn converged(&self) -> bool {
        self.trace.as_ref().is_some_and(|t| t.converged())
    }

    pub fn rapidities(&self) -> Option<&RapiditySet> {
        self.trace.as_ref().map(|t| &t.last().rapidities)
    }
}

/// Occupation vectors matching a selection (`Seed` selections yield one).
pub fn occupations(model: &Model, selection: &BranchSelection) -> Result<Vec<Vec<usize>>> {
    let roots = secular_roots(model);
    let n = model.n_excitations();
    match selection {
        BranchSelection::All => {
            if roots.is_empty() {
                return Err(Error::InsufficientModes { found: 0, needed: n });
            }
            Ok(all_occupations(roots.len(), n))
        }
        BranchSelection::Seed(sel) => {
            let seed = solve_tda(model, sel)?;
            let counts = roots
                .iter()
                .map(|&r| seed.values().iter().filter(|v| v.re == r && v.im == 0.0).count())
                .collect();
            Ok(vec![counts])
        }
    }
}

fn track(h: &dyn Homotopy, model: &Model, occupation: Vec<usize>, policy: &ContinuationPolicy) -> Branch {
    let seed = match solve_tda(model, &SeedSelection::Occupation(occupation.clone())) {
        Ok(s) => s,
        Err(e) => {
            return Branch {
                occupation,
                trace: None,
                error: Some(e.to_string()),
            }
        }
    };
    match continue_in_xi(h, policy, &seed) {
        Ok(trace) => {
            let error = trace.diagnostic.clone();
            Branch {
                occupation,
                trace: Some(trace),
                error,
            }
        }
        Err(e) => Branch {
            occupation,
            trace: None,
            error: Some(e.to_string()),
        },
    }
}

/// Tracks every occupation along the all-copies homotopy `h` from `xi = 0`.
pub fn track_occupations(
    h: &dyn Homotopy,
    model: &Model,
    occupations: Vec<Vec<usize>>,
    policy: &ContinuationPolicy,
    parallel: bool,
) -> Vec<Branch> {
    if parallel {
        occupations
            .into_par_iter()
            .map(|o| track(h, model, o, policy))
            .collect()
    } else {
        occupations.into_iter().map(|o| track(h, model, o, policy)).collect()
    }
}

/// Converged branches with distinct endpoints, in input order.
pub fn distinct_converged(branches: &[Branch]) -> Vec<&Branch> {
    let mut kept: Vec<&Branch> = Vec::new();
    for b in branches.iter().filter(|b| b.converged()) {
        let r = b.rapidities().unwrap();
        if kept.iter().all(|k| k.rapidities().unwrap().distance(r) > BRANCH_TOL) {
            kept.push(b);
        }
    }
    kept
}

/// Tracks the selected seeds of an RG or Dicke model from the decoupled limit
/// to `xi = 1` along the all-copies homotopy.
pub fn solve_branches(
    model: &Model,
    selection: &BranchSelection,
    policy: &ContinuationPolicy,
    parallel: bool,
) -> Result<Vec<Branch>> {
    check_capacity(model)?;
    let h = crate::families::homotopy("all-copies", model, Default::default())?;
    let occ = occupations(model, selection)?;
    let policy = ContinuationPolicy {
        xi_start: 0.0,
        xi_end: 1.0,
        ..policy.clone()
    };
    Ok(track_occupations(h.as_ref(), model, occ, &policy, parallel))
}

/// Trigonometric RG model whose copy 0 sits at a large but finite `eta_0`,
/// equivalent at `xi = 1` to the single-copy Dicke family.
pub fn explicit_two_copy_model(spec: &DickeSpec, omega0: u32, eta0: f64) -> Result<ModelSpec> {
    let c = spec.coordinate_scale(1.0, omega0);
    let mut etas = vec![eta0];
    etas.extend(spec.epsilons.iter().map(|e| -c * e));
    let mut degeneracies = vec![omega0];
    degeneracies.extend(spec.spins.iter().map(|s| (2.0 * s).round() as u32 + 1));
    ModelSpec::new(
        LevelSet::from_degeneracies(etas, degeneracies)?,
        GaudinKind::Trigonometric,
        spec.n_excitations,
        spec.deformed_coupling(1.0, omega0),
    )
}

/// Solutions of the single-copy family at `xi = 1`, obtained from the
/// explicit RG model and polished on the `eta_0 -> inf` equations.
pub fn single_copy_starts(
    spec: &DickeSpec,
    omega0: u32,
    policy: &ContinuationPolicy,
    parallel: bool,
) -> Result<Vec<RapiditySet>> {
    let rg = explicit_two_copy_model(spec, omega0, 1e8)?;
    let model = Model::Rg(rg.clone());
    let c = spec.coordinate_scale(1.0, omega0);
    let family = SingleCopyDicke::new(spec.clone(), omega0)?;
    let branches = track_occupations(
        &AllCopiesRg::new(rg),
        &model,
        occupations(&model, &BranchSelection::All)?,
        &ContinuationPolicy {
            xi_start: 0.0,
            xi_end: 1.0,
            ..policy.clone()
        },
        parallel,
    );
    let mut starts: Vec<RapiditySet> = Vec::new();
    for b in distinct_converged(&branches) {
        let eta = b.rapidities().unwrap();
        let x = RapiditySet::new(eta.values().iter().map(|v| -v / c).collect(), Frame::DickeX);
        if let Ok(out) = newton_solve(
            |r| family.evaluate(1.0, r),
            &x,
            policy.newton_tol,
            policy.max_newton_iters,
        ) {
            let r = out.rapidities.sorted();
            if starts.iter().all(|s| s.distance(&r) > BRANCH_TOL) {
                starts.push(r);
            }
        }
    }
    Ok(starts)
}

/// Tracks every single-copy start from `xi = 1` down to the Dicke limit.
pub fn solve_single_copy(
    spec: &DickeSpec,
    omega0: u32,
    policy: &ContinuationPolicy,
    parallel: bool,
) -> Result<Vec<SolutionTrace>> {
    let family = SingleCopyDicke::new(spec.clone(), omega0)?;
    let starts = single_copy_starts(spec, omega0, policy, parallel)?;
    let down = ContinuationPolicy {
        xi_start: 1.0,
        xi_end: 0.0,
        ..policy.clone()
    };
    let run = |s: &RapiditySet| continue_in_xi(&family, &down, s);
    if parallel {
        starts.par_iter().map(run).collect()
    } else {
        starts.iter().map(run).collect()
    }
}
