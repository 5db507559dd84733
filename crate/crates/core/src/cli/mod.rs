//! Command-line front end.

pub mod report;
pub mod spec_file;

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;

use crate::branches::{
    distinct_converged, occupations, single_copy_starts, track_occupations, Branch, BranchSelection,
};
use crate::dicke::{
    bethe_coefficients, build_dicke_charge, build_rg_charges, dicke_basis, rg_basis, rg_bethe_vector,
    BetheProductState, Normalization,
};
use crate::error::Error;
use crate::families::{homotopy, HomotopyOptions};
use crate::oracle::{eigencheck, realize, spectrum, Restriction};
use crate::rg_core::{dicke_rg_residual, rg_residual, DickeSpec, Frame, Model, RapiditySet};
use crate::solver::{check_capacity, continue_in_xi, ContinuationPolicy, SeedSelection, SolutionTrace};

use report::{BranchRecord, Check, FailedSeed, Report, Settings, SpectrumRow, TraceRow};
use spec_file::{emit_spec, SpecDocument, SpecFile};

/// Relative eigen-residual a Bethe vector must reach.
pub const ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    SolveRg,
    SolveDicke,
    SweepXi,
    Verify,
    EdSpectrum,
}

impl Mode {
    fn name(self) -> &'static str {
        match self {
            Mode::SolveRg => "solve-rg",
            Mode::SolveDicke => "solve-dicke",
            Mode::SweepXi => "sweep-xi",
            Mode::Verify => "verify",
            Mode::EdSpectrum => "ed-spectrum",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// JSON document
    Structured,
    /// whitespace-separated columns
    Tabular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchArg {
    All,
    Index(usize),
}

impl FromStr for BranchArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "all" {
            return Ok(BranchArg::All);
        }
        s.parse()
            .map(BranchArg::Index)
            .map_err(|_| format!("expected a branch index or 'all', got '{s}'"))
    }
}

/// Solve Richardson-Gaudin and Dicke Bethe equations by deformation continuation.
#[derive(Debug, Clone, Parser)]
#[command(name = "gaudin", version)]
pub struct Args {
    #[arg(long, value_enum)]
    pub mode: Mode,
    /// Model file (for verify: a structured results file)
    #[arg(long)]
    pub spec: PathBuf,
    /// Output file (default: standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "structured")]
    pub format: Format,
    /// Cap the continuation step at 1/xi-steps
    #[arg(long)]
    pub xi_steps: Option<usize>,
    #[arg(long, default_value_t = 1e-10)]
    pub newton_tol: f64,
    /// Boson Fock cutoff of the oracle (default N + 12)
    #[arg(long)]
    pub boson_cutoff: Option<usize>,
    /// Seed index, or `all`
    #[arg(long)]
    pub branch: Option<BranchArg>,
    /// Multiplicity of each secular root, e.g. `1,1,0`
    #[arg(long, value_delimiter = ',')]
    pub occupation: Option<Vec<usize>>,
    /// Seed for jittering repeated-root splits (0: none)
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub parallel_branches: bool,
    /// Deformation homotopy: all-copies or single-copy
    #[arg(long, default_value = "all-copies")]
    pub family: String,
    /// Override a model-file entry, e.g. `--set G=0.3`
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success = 0,
    Validation = 1,
    Convergence = 2,
    Verification = 3,
}

/// Rendered output document plus exit status and human-readable notes.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub document: Option<String>,
    pub messages: Vec<String>,
}

impl Outcome {
    fn validation(e: impl std::fmt::Display) -> Self {
        Self {
            status: Status::Validation,
            document: None,
            messages: vec![format!("error: {e}")],
        }
    }
}

fn policy(args: &Args) -> ContinuationPolicy {
    let mut p = ContinuationPolicy {
        newton_tol: args.newton_tol,
        seed: args.seed,
        ..ContinuationPolicy::default()
    };
    if let Some(n) = args.xi_steps {
        let h = 1.0 / n.max(1) as f64;
        p.initial_step = h;
        p.max_step = h;
        p.min_step = p.min_step.min(h);
    }
    p
}

fn pairs(r: &RapiditySet) -> Vec<[f64; 2]> {
    r.values().iter().map(|v| [v.re, v.im]).collect()
}

fn from_pairs(p: &[[f64; 2]], frame: Frame) -> RapiditySet {
    RapiditySet::new(p.iter().map(|v| Complex64::new(v[0], v[1])).collect(), frame)
}

struct Ctx {
    spec: SpecFile,
    policy: ContinuationPolicy,
    cutoff: usize,
}

impl Ctx {
    fn omega0(&self) -> u32 {
        self.spec.omega0.unwrap_or(self.spec.model.n_excitations() as u32 + 1)
    }
}

/// Independent residual and oracle checks of one solution.
fn evaluate_branch(
    ctx: &Ctx,
    id: usize,
    occupation: Option<Vec<usize>>,
    status: &str,
    r: &RapiditySet,
) -> Result<BranchRecord, Error> {
    match &ctx.spec.model {
        Model::Rg(spec) => {
            let residual = rg_residual(spec, r)?.max_abs;
            let v = rg_bethe_vector(spec, r)?;
            let mut eigen = Vec::new();
            let mut worst = 0.0_f64;
            for c in build_rg_charges(spec, spec.coupling_g) {
                let (l, res) = eigencheck(&realize(&c, v.basis())?, &v)?;
                eigen.push(l);
                worst = worst.max(res);
            }
            Ok(BranchRecord {
                id,
                occupation,
                status: status.into(),
                rapidities: pairs(r),
                residual_max_abs: residual,
                bethe_energy: None,
                rayleigh_energy: None,
                charge_eigenvalues: eigen,
                oracle_residual: worst,
            })
        }
        Model::Dicke(spec) => {
            let residual = dicke_rg_residual(spec, r)?.max_abs;
            let state = BetheProductState::new(spec.clone(), r.clone(), Normalization::UnitNorm)?;
            let v = bethe_coefficients(&state, ctx.cutoff)?;
            let mut eigen = Vec::new();
            let mut worst = 0.0_f64;
            for i in 0..=spec.len() {
                let (l, res) = eigencheck(&realize(&build_dicke_charge(spec, i)?, v.basis())?, &v)?;
                eigen.push(l);
                worst = worst.max(res);
            }
            let energy = eigen.remove(0);
            Ok(BranchRecord {
                id,
                occupation,
                status: status.into(),
                rapidities: pairs(r),
                residual_max_abs: residual,
                bethe_energy: Some(r.values().iter().map(|x| x.re).sum::<f64>() + spec.vacuum_energy()),
                rayleigh_energy: Some(energy),
                charge_eigenvalues: eigen,
                oracle_residual: worst,
            })
        }
    }
}

fn branch_checks(records: &[BranchRecord], tol: f64) -> Vec<Check> {
    let mut checks = Vec::new();
    for b in records {
        checks.push(Check::below(
            format!("branch {} residual", b.id),
            b.residual_max_abs,
            10.0 * tol,
        ));
        checks.push(Check::below(
            format!("branch {} eigenvector", b.id),
            b.oracle_residual,
            ORACLE_TOL,
        ));
        if let (Some(e), Some(rq)) = (b.bethe_energy, b.rayleigh_energy) {
            checks.push(Check::below(
                format!("branch {} energy", b.id),
                (e - rq).abs(),
                ORACLE_TOL,
            ));
        }
    }
    checks
}

fn base_report(args: &Args, ctx: &Ctx, mode: Mode) -> Report {
    Report {
        program: "gaudin".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        mode: mode.name().into(),
        spec: emit_spec(&ctx.spec),
        settings: Settings {
            family: args.family.clone(),
            newton_tol: args.newton_tol,
            boson_cutoff: matches!(ctx.spec.model, Model::Dicke(_)).then_some(ctx.cutoff),
            xi_steps: args.xi_steps,
            seed: args.seed,
        },
        branches: Vec::new(),
        failed_seeds: Vec::new(),
        trace: None,
        trace_status: None,
        spectrum: Vec::new(),
        checks: Vec::new(),
        passed: true,
    }
}

/// Seeds as `(id, occupation)`; ids index the full occupation enumeration.
fn select_seeds(model: &Model, args: &Args) -> Result<Vec<(usize, Vec<usize>)>, Error> {
    let all = occupations(model, &BranchSelection::All)?;
    let pick = |occ: Vec<usize>| -> Result<(usize, Vec<usize>), Error> {
        let id = all
            .iter()
            .position(|o| *o == occ)
            .ok_or_else(|| Error::Selection(format!("occupation {occ:?} does not match the secular roots")))?;
        Ok((id, occ))
    };
    match (&args.occupation, args.branch) {
        (Some(_), Some(_)) => Err(Error::Selection("give either --occupation or --branch".into())),
        (Some(occ), None) => {
            occupations(model, &BranchSelection::Seed(SeedSelection::Occupation(occ.clone())))?;
            Ok(vec![pick(occ.clone())?])
        }
        (None, Some(BranchArg::All)) => Ok(all.into_iter().enumerate().collect()),
        (None, Some(BranchArg::Index(k))) => all
            .get(k)
            .cloned()
            .map(|o| vec![(k, o)])
            .ok_or_else(|| Error::Selection(format!("branch {k} out of range (0..{})", all.len()))),
        (None, None) => {
            let occ = occupations(model, &BranchSelection::Seed(SeedSelection::Lowest))?.remove(0);
            Ok(vec![pick(occ)?])
        }
    }
}

fn failed(id: usize, occupation: Option<Vec<usize>>, b: &Branch) -> FailedSeed {
    FailedSeed {
        id,
        occupation,
        status: b.trace.as_ref().map_or("error".into(), |t| t.status.name().into()),
        diagnostic: b.error.clone().unwrap_or_default(),
    }
}

fn solve_all_copies(args: &Args, ctx: &Ctx, report: &mut Report) -> Result<Status, Error> {
    let model = &ctx.spec.model;
    check_capacity(model)?;
    let seeds = select_seeds(model, args)?;
    let h = homotopy("all-copies", model, HomotopyOptions::default())?;
    let branches = track_occupations(
        h.as_ref(),
        model,
        seeds.iter().map(|s| s.1.clone()).collect(),
        &ctx.policy,
        args.parallel_branches,
    );
    let kept = distinct_converged(&branches);
    let mut status = Status::Success;
    for ((id, occ), b) in seeds.iter().zip(&branches) {
        if !b.converged() {
            report.failed_seeds.push(failed(*id, Some(occ.clone()), b));
            status = Status::Convergence;
        } else if kept.iter().any(|k| std::ptr::eq(*k, b)) {
            let rec = evaluate_branch(ctx, *id, Some(occ.clone()), "converged", b.rapidities().unwrap())?;
            report.branches.push(rec);
        }
    }
    if report.branches.is_empty() {
        status = Status::Convergence;
    }
    Ok(status)
}

/// Single-copy starts at `xi = 1`, ordered by `sum Re x`.
fn ordered_starts(spec: &DickeSpec, ctx: &Ctx, parallel: bool) -> Result<Vec<RapiditySet>, Error> {
    let mut starts = single_copy_starts(spec, ctx.omega0(), &ctx.policy, parallel)?;
    starts.sort_by(|a, b| {
        let s = |r: &RapiditySet| r.values().iter().map(|v| v.re).sum::<f64>();
        s(a).total_cmp(&s(b))
    });
    Ok(starts)
}

fn pick_starts(args: &Args, starts: Vec<RapiditySet>) -> Result<Vec<(usize, RapiditySet)>, Error> {
    if args.occupation.is_some() {
        return Err(Error::Selection(
            "--occupation applies to the all-copies homotopy".into(),
        ));
    }
    let n = starts.len();
    let indexed: Vec<(usize, RapiditySet)> = starts.into_iter().enumerate().collect();
    match args.branch.unwrap_or(BranchArg::Index(0)) {
        BranchArg::All => Ok(indexed),
        BranchArg::Index(k) => indexed
            .into_iter()
            .nth(k)
            .map(|s| vec![s])
            .ok_or_else(|| Error::Selection(format!("branch {k} out of range (0..{n})"))),
    }
}

fn solve_single_copy(args: &Args, ctx: &Ctx, spec: &DickeSpec, report: &mut Report) -> Result<Status, Error> {
    let family = homotopy(
        "single-copy",
        &ctx.spec.model,
        HomotopyOptions {
            omega0: Some(ctx.omega0()),
        },
    )?;
    let starts = pick_starts(args, ordered_starts(spec, ctx, args.parallel_branches)?)?;
    let down = ContinuationPolicy {
        xi_start: 1.0,
        xi_end: 0.0,
        ..ctx.policy.clone()
    };
    let mut status = if starts.is_empty() {
        Status::Convergence
    } else {
        Status::Success
    };
    for (id, start) in starts {
        match continue_in_xi(family.as_ref(), &down, &start) {
            Ok(t) if t.converged() => {
                let r = &t.last().rapidities;
                if report
                    .branches
                    .iter()
                    .all(|b| from_pairs(&b.rapidities, Frame::DickeX).distance(r) > 1e-6)
                {
                    report.branches.push(evaluate_branch(ctx, id, None, "converged", r)?);
                }
            }
            Ok(t) => {
                report.failed_seeds.push(FailedSeed {
                    id,
                    occupation: None,
                    status: t.status.name().into(),
                    diagnostic: t.diagnostic.unwrap_or_default(),
                });
                status = Status::Convergence;
            }
            Err(e) => {
                report.failed_seeds.push(FailedSeed {
                    id,
                    occupation: None,
                    status: "error".into(),
                    diagnostic: e.to_string(),
                });
                status = Status::Convergence;
            }
        }
    }
    Ok(status)
}

fn trace_rows(t: &SolutionTrace) -> Vec<TraceRow> {
    t.path
        .iter()
        .map(|p| TraceRow {
            xi: p.xi,
            max_abs: p.max_abs,
            iterations: p.iterations,
            rapidities: pairs(&p.rapidities),
        })
        .collect()
}

fn sweep(args: &Args, ctx: &Ctx, report: &mut Report) -> Result<Status, Error> {
    let model = &ctx.spec.model;
    let trace = match args.family.as_str() {
        "single-copy" => {
            let Model::Dicke(spec) = model else {
                return Err(Error::InvalidSpec(
                    "the single-copy homotopy applies to Dicke models".into(),
                ));
            };
            let family = homotopy(
                "single-copy",
                model,
                HomotopyOptions {
                    omega0: Some(ctx.omega0()),
                },
            )?;
            let (_, start) = pick_starts(args, ordered_starts(spec, ctx, false)?)?
                .into_iter()
                .next()
                .ok_or_else(|| Error::Selection("--branch all is not available for sweeps".into()))?;
            continue_in_xi(
                family.as_ref(),
                &ContinuationPolicy {
                    xi_start: 1.0,
                    xi_end: 0.0,
                    ..ctx.policy.clone()
                },
                &start,
            )?
        }
        name => {
            check_capacity(model)?;
            let seeds = select_seeds(model, args)?;
            if seeds.len() != 1 {
                return Err(Error::Selection("a sweep follows exactly one seed".into()));
            }
            let h = homotopy(name, model, HomotopyOptions::default())?;
            let branch = track_occupations(h.as_ref(), model, vec![seeds[0].1.clone()], &ctx.policy, false).remove(0);
            match branch.trace {
                Some(t) => t,
                None => return Err(Error::Selection(branch.error.unwrap_or_default())),
            }
        }
    };
    report.trace = Some(trace_rows(&trace));
    report.trace_status = Some(trace.status.name().into());
    if let Some(r) = trace.endpoint_residual {
        report
            .checks
            .push(Check::below("final residual", r, 10.0 * ctx.policy.newton_tol));
    }
    if let Some(msg) = &trace.diagnostic {
        log::warn!("{msg}");
    }
    Ok(if trace.converged() {
        Status::Success
    } else {
        Status::Convergence
    })
}

fn spectrum_rows(ctx: &Ctx) -> Result<Vec<SpectrumRow>, Error> {
    let mut rows = Vec::new();
    let mut push = |operator: String, sector: usize, values: Vec<f64>| {
        rows.extend(values.into_iter().enumerate().map(|(index, value)| SpectrumRow {
            operator: operator.clone(),
            sector,
            index,
            value,
        }))
    };
    match &ctx.spec.model {
        Model::Dicke(spec) => {
            for m in 0..=spec.n_excitations {
                let basis = dicke_basis(spec, ctx.cutoff, Restriction::Exact(m))?;
                push(
                    "H".into(),
                    m,
                    spectrum(&realize(&build_dicke_charge(spec, 0)?, &basis)?)?,
                );
            }
        }
        Model::Rg(spec) => {
            let n = spec.n_excitations;
            let basis = rg_basis(spec, Restriction::Exact(n))?;
            for (i, c) in build_rg_charges(spec, spec.coupling_g).iter().enumerate() {
                push(format!("R_{}", i + 1), n, spectrum(&realize(c, &basis)?)?);
            }
        }
    }
    Ok(rows)
}

fn model_ctx(args: &Args, doc: &SpecDocument) -> Result<Ctx, Error> {
    let spec = doc.to_spec()?;
    if args.newton_tol.is_nan() || args.newton_tol <= 0.0 {
        return Err(Error::InvalidSpec("--newton-tol must be positive".into()));
    }
    let n = spec.model.n_excitations();
    let cutoff = args.boson_cutoff.unwrap_or(n + 12);
    if matches!(spec.model, Model::Dicke(_)) && cutoff < n {
        return Err(Error::Cutoff { cutoff, needed: n });
    }
    let policy = policy(args);
    policy.validate()?;
    Ok(Ctx { spec, policy, cutoff })
}

fn is_validation(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidSpec(_)
            | Error::DegenerateLevels { .. }
            | Error::Selection(_)
            | Error::Cutoff { .. }
            | Error::Domain(_)
            | Error::InsufficientModes { .. }
    )
}

fn finish(args: &Args, mut report: Report, status: Status) -> Outcome {
    report.passed = status == Status::Success && report.checks.iter().all(|c| c.passed);
    let mut messages: Vec<String> = report
        .checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| {
            format!(
                "check failed: {} = {:.3e} (tolerance {:.1e})",
                c.name, c.value, c.tolerance
            )
        })
        .collect();
    messages.extend(
        report
            .failed_seeds
            .iter()
            .map(|f| format!("seed {} {}: {}", f.id, f.status, f.diagnostic)),
    );
    let status = match status {
        Status::Success if !report.passed => Status::Verification,
        s => s,
    };
    let document = match args.format {
        Format::Structured => report.to_json(),
        Format::Tabular => report.to_tabular(),
    };
    Outcome {
        status,
        document: Some(document),
        messages,
    }
}

/// Executes one run; never panics on bad input.
pub fn run(args: &Args) -> Outcome {
    if args.mode == Mode::Verify {
        return verify(args);
    }
    let text = match std::fs::read_to_string(&args.spec) {
        Ok(t) => t,
        Err(e) => return Outcome::validation(format!("{}: {e}", args.spec.display())),
    };
    let mut doc = match SpecDocument::parse(&text) {
        Ok(d) => d,
        Err(e) => return Outcome::validation(e),
    };
    for o in &args.overrides {
        if let Err(e) = doc.apply_override(o) {
            return Outcome::validation(e);
        }
    }
    let ctx = match model_ctx(args, &doc) {
        Ok(c) => c,
        Err(e) => return Outcome::validation(e),
    };
    let mut report = base_report(args, &ctx, args.mode);
    let result = match (args.mode, &ctx.spec.model) {
        (Mode::SolveRg, Model::Rg(_)) if args.family == "all-copies" => solve_all_copies(args, &ctx, &mut report),
        (Mode::SolveDicke, Model::Dicke(_)) if args.family == "all-copies" => solve_all_copies(args, &ctx, &mut report),
        (Mode::SolveDicke, Model::Dicke(spec)) if args.family == "single-copy" => {
            solve_single_copy(args, &ctx, spec, &mut report)
        }
        (Mode::SolveRg | Mode::SolveDicke, _) if args.family != "all-copies" && args.family != "single-copy" => {
            Err(Error::InvalidSpec(format!("unknown homotopy '{}'", args.family)))
        }
        (Mode::SolveRg | Mode::SolveDicke, _) => Err(Error::InvalidSpec(format!(
            "mode {} does not match the model file",
            args.mode.name()
        ))),
        (Mode::SweepXi, _) => sweep(args, &ctx, &mut report),
        (Mode::EdSpectrum, _) => spectrum_rows(&ctx).map(|rows| {
            report.spectrum = rows;
            Status::Success
        }),
        (Mode::Verify, _) => unreachable!(),
    };
    match result {
        Ok(status) => {
            let checks = branch_checks(&report.branches, ctx.policy.newton_tol);
            report.checks.extend(checks);
            finish(args, report, status)
        }
        Err(e) if is_validation(&e) => Outcome::validation(e),
        Err(e) => {
            let mut out = finish(args, report, Status::Convergence);
            out.messages.push(format!("error: {e}"));
            out
        }
    }
}

fn worst_equation(model: &Model, r: &RapiditySet) -> String {
    let rep = match model {
        Model::Rg(s) => rg_residual(s, r),
        Model::Dicke(s) => dicke_rg_residual(s, r),
    };
    match rep {
        Ok(rep) => rep
            .worst_index()
            .map_or_else(String::new, |i| format!(" (equation {i})")),
        Err(e) => format!(" ({e})"),
    }
}

fn frame_of(model: &Model) -> Frame {
    match model {
        Model::Rg(_) => Frame::RgEta,
        Model::Dicke(_) => Frame::DickeX,
    }
}

/// Re-reads a structured results file and repeats every check on its data.
fn verify(args: &Args) -> Outcome {
    let text = match std::fs::read_to_string(&args.spec) {
        Ok(t) => t,
        Err(e) => return Outcome::validation(format!("{}: {e}", args.spec.display())),
    };
    let stored: Report = match serde_json::from_str(&text) {
        Ok(r) => r,
        Err(e) => return Outcome::validation(format!("not a structured results file: {e}")),
    };
    let doc = match SpecDocument::parse(&stored.spec) {
        Ok(d) => d,
        Err(e) => return Outcome::validation(e),
    };
    let run_args = Args {
        newton_tol: stored.settings.newton_tol,
        boson_cutoff: stored.settings.boson_cutoff,
        family: stored.settings.family.clone(),
        xi_steps: stored.settings.xi_steps,
        seed: stored.settings.seed,
        ..args.clone()
    };
    let ctx = match model_ctx(&run_args, &doc) {
        Ok(c) => c,
        Err(e) => return Outcome::validation(e),
    };
    let tol = ctx.policy.newton_tol;
    let mut report = base_report(&run_args, &ctx, Mode::Verify);
    if stored.program != report.program {
        return Outcome::validation(format!("results file was written by '{}'", stored.program));
    }
    let frame = frame_of(&ctx.spec.model);
    let mut messages = Vec::new();
    for b in &stored.branches {
        let r = from_pairs(&b.rapidities, frame);
        match evaluate_branch(&ctx, b.id, b.occupation.clone(), &b.status, &r) {
            Ok(fresh) => {
                if fresh.residual_max_abs >= 10.0 * tol {
                    messages.push(format!(
                        "branch {}: residual {:.3e}{}",
                        b.id,
                        fresh.residual_max_abs,
                        worst_equation(&ctx.spec.model, &r)
                    ));
                }
                let mut checks = branch_checks(std::slice::from_ref(&fresh), tol);
                if let (Some(a), Some(bb)) = (fresh.rayleigh_energy, b.rayleigh_energy) {
                    checks.push(Check::below(
                        format!("branch {} recorded energy", b.id),
                        (a - bb).abs(),
                        ORACLE_TOL,
                    ));
                }
                report.checks.extend(checks);
                report.branches.push(fresh);
            }
            Err(e) => {
                messages.push(format!("branch {}: {e}", b.id));
                report.checks.push(Check {
                    name: format!("branch {} evaluation", b.id),
                    value: f64::INFINITY,
                    tolerance: 0.0,
                    passed: false,
                });
            }
        }
    }
    if let Some(trace) = &stored.trace {
        let family = homotopy(
            &stored.settings.family,
            &ctx.spec.model,
            HomotopyOptions {
                omega0: Some(ctx.omega0()),
            },
        );
        match family {
            Ok(h) => {
                for (i, row) in trace.iter().enumerate() {
                    let r = from_pairs(&row.rapidities, h.frame());
                    let value = h.evaluate(row.xi, &r).map_or(f64::INFINITY, |rep| rep.max_abs);
                    report
                        .checks
                        .push(Check::below(format!("trace point {i} residual"), value, 10.0 * tol));
                }
            }
            Err(e) => return Outcome::validation(e),
        }
    }
    if !stored.spectrum.is_empty() {
        match spectrum_rows(&ctx) {
            Ok(rows) => {
                let same_shape = rows.len() == stored.spectrum.len();
                let diff = if same_shape {
                    rows.iter()
                        .zip(&stored.spectrum)
                        .map(|(a, b)| (a.value - b.value).abs())
                        .fold(0.0, f64::max)
                } else {
                    f64::INFINITY
                };
                report.checks.push(Check::below("spectrum", diff, 1e-10));
            }
            Err(e) => return Outcome::validation(e),
        }
    }
    if stored.branches.is_empty() && stored.trace.is_none() && stored.spectrum.is_empty() {
        report.checks.push(Check {
            name: "results present".into(),
            value: 0.0,
            tolerance: 1.0,
            passed: false,
        });
    }
    let mut out = finish(args, report, Status::Success);
    messages.append(&mut out.messages);
    out.messages = messages;
    out
}

/// Writes the document and returns the process exit code.
pub fn main_with(args: &Args) -> i32 {
    let out = run(args);
    if let Some(doc) = &out.document {
        match &args.out {
            Some(path) => {
                if let Err(e) = std::fs::write(path, doc) {
                    eprintln!("error: {}: {e}", path.display());
                    return Status::Validation as i32;
                }
            }
            None => print!("{doc}"),
        }
    }
    for m in &out.messages {
        eprintln!("{m}");
    }
    out.status as i32
}
