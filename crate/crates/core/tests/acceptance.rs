//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gaudin::algebra::{build_gaudin, extend_with_rapidities, unitary_grid, GaudinKind, LabelScale, LevelSet};
use gaudin::branches::{distinct_converged, solve_branches, Branch, BranchSelection};
use gaudin::cli::spec_file::{emit_spec, parse_spec, SpecFile};
use gaudin::dicke::{
    bethe_coefficients, build_deformed_charge0, build_dicke_hamiltonian, deformed_charge_basis, dicke_basis,
    excitation_number, BetheProductState, Normalization,
};
use gaudin::families::{Homotopy, SingleCopyDicke};
use gaudin::oracle::{eigen, eigencheck, match_spectra, realize, realize_rg_charges, spectrum, Restriction};
use gaudin::rg_core::{
    deformed_dicke_residual, deformed_rg_residual, dicke_rg_residual, rg_residual, tda_residual, DickeSpec, Frame,
    Model, ModelSpec, RapiditySet, ResidualReport,
};
use gaudin::solver::{ContinuationPolicy, SeedSelection};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

type Check = fn() -> Result<Outcome, String>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn dicke(eps: &[f64], spins: &[f64], g: f64, hw: f64, n: usize) -> DickeSpec {
    DickeSpec::new(eps.to_vec(), spins.to_vec(), g, hw, n).unwrap()
}

fn rg4() -> ModelSpec {
    ModelSpec::new(
        LevelSet::from_degeneracies(vec![1.0, 2.0, 3.0, 4.0], vec![2; 4]).unwrap(),
        GaudinKind::Trigonometric,
        2,
        -0.15,
    )
    .unwrap()
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

/// `n` coordinates in `[-span, span]` at least `gap` apart.
fn spaced(rng: &mut ChaCha8Rng, n: usize, span: f64, gap: f64) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-span..span)).collect();
        let s = sorted(v.clone());
        if s.windows(2).all(|w| w[1] - w[0] > gap) {
            return v;
        }
    }
}

fn gaudin_algebra() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_closure, mut worst_c) = (0.0_f64, 0.0_f64);
    for trial in 0..100 {
        let kind = if trial % 2 == 0 {
            GaudinKind::Trigonometric
        } else {
            GaudinKind::Rational
        };
        let m = rng.gen_range(1..=8);
        let levels = LevelSet::new(spaced(&mut rng, m, 2.5, 0.3), vec![0.5; m]).map_err(|e| e.to_string())?;
        let base = build_gaudin(kind, &levels);
        let n = rng.gen_range(0..=4);
        let raps: Vec<Complex64> = spaced(&mut rng, n, 2.5, 0.3)
            .into_iter()
            .map(|re| c(re, rng.gen_range(0.3..1.0)))
            .collect();
        let ext =
            extend_with_rapidities(&base, &levels, &RapiditySet::new(raps, Frame::RgEta)).map_err(|e| e.to_string())?;
        worst_closure = worst_closure.max(ext.gaudin_residual());
        worst_c = worst_c.max(ext.c_deviation());
    }
    Ok(outcome(
        worst_closure < 1e-12 && worst_c < 1e-12,
        format!("max closure residual {worst_closure:.2e}, max |X^2 - Z^2 - c| {worst_c:.2e}"),
    ))
}

fn max_commutator(ops: &[gaudin::oracle::MatrixOperator]) -> Result<f64, String> {
    let mut worst = 0.0_f64;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            worst = worst.max(gaudin::oracle::commutator_norm(&ops[i], &ops[j]).map_err(|e| e.to_string())?);
        }
    }
    Ok(worst)
}

fn commuting_charges() -> Result<Outcome, String> {
    let spec = ModelSpec::new(
        LevelSet::new(vec![0.4, 1.1, 2.3], vec![0.5; 3]).unwrap(),
        GaudinKind::Trigonometric,
        1,
        -0.7,
    )
    .unwrap();
    let mid = unitary_grid(2, 4, LabelScale::Degeneracy);
    let mut parts = Vec::new();
    let mut worst = 0.0_f64;
    for (xi, cutoff) in [(1.0, 0), (mid, 0), (0.0, 10)] {
        let (basis, ops) = realize_rg_charges(&spec, xi, cutoff).map_err(|e| e.to_string())?;
        let w = max_commutator(&ops)?;
        worst = worst.max(w);
        parts.push(format!("xi={xi} dim={} {w:.1e}", basis.dim()));
    }
    Ok(outcome(worst < 1e-10, parts.join("; ")))
}

fn endpoint_identities() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let spec = rg4();
    let mut worst = 0.0_f64;
    let diff = |a: &ResidualReport, b: &ResidualReport| {
        a.residuals
            .iter()
            .zip(&b.residuals)
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    };
    for _ in 0..20 {
        let re = spaced(&mut rng, 2, 2.0, 0.3);
        let r = RapiditySet::new(
            re.iter().map(|&x| c(x + 2.5, rng.gen_range(0.2..1.0))).collect(),
            Frame::RgEta,
        );
        let e = |x: gaudin::Result<ResidualReport>| x.map_err(|e| e.to_string());
        worst = worst.max(diff(
            &e(deformed_rg_residual(&spec, 1.0, &r))?,
            &e(rg_residual(&spec, &r))?,
        ));
        worst = worst.max(diff(
            &e(deformed_rg_residual(&spec, 0.0, &r))?,
            &e(tda_residual(&spec, &r))?,
        ));
    }
    Ok(outcome(
        worst < 1e-15,
        format!("max endpoint difference {worst:.2e} over 20 points"),
    ))
}

fn dicke_branches(spec: &DickeSpec) -> Result<Vec<Branch>, String> {
    let branches = solve_branches(
        &Model::Dicke(spec.clone()),
        &BranchSelection::All,
        &ContinuationPolicy::default(),
        false,
    )
    .map_err(|e| e.to_string())?;
    Ok(distinct_converged(&branches).into_iter().cloned().collect())
}

/// `(rapidities, Bethe energy, oracle energy, eigen-residual)` per branch.
fn bethe_records(
    spec: &DickeSpec,
    cutoff: usize,
    restriction: Restriction,
) -> Result<Vec<(RapiditySet, f64, f64, f64)>, String> {
    let mut out = Vec::new();
    let basis = dicke_basis(spec, cutoff, restriction).map_err(|e| e.to_string())?;
    let h = realize(&build_dicke_hamiltonian(spec), &basis).map_err(|e| e.to_string())?;
    for b in dicke_branches(spec)? {
        let r = b.rapidities().unwrap().sorted();
        let state =
            BetheProductState::new(spec.clone(), r.clone(), Normalization::UnitNorm).map_err(|e| e.to_string())?;
        let v = bethe_coefficients(&state, cutoff)
            .map_err(|e| e.to_string())?
            .embed(&basis)
            .map_err(|e| e.to_string())?;
        let (rq, res) = eigencheck(&h, &v).map_err(|e| e.to_string())?;
        let bethe = r.values().iter().map(|x| x.re).sum::<f64>() + spec.vacuum_energy();
        out.push((r, bethe, rq, res));
    }
    out.sort_by(|a, b| a.1.total_cmp(&b.1));
    Ok(out)
}

fn sector_spectrum(spec: &DickeSpec, cutoff: usize) -> Result<Vec<f64>, String> {
    let basis = dicke_basis(spec, cutoff, Restriction::Exact(spec.n_excitations)).map_err(|e| e.to_string())?;
    spectrum(&realize(&build_dicke_hamiltonian(spec), &basis).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
}

fn jaynes_cummings() -> Result<Outcome, String> {
    let jc = dicke(&[1.0], &[0.5], 0.5, 1.0, 1);
    let rec = bethe_records(&jc, 13, Restriction::Exact(1))?;
    let x: Vec<f64> = rec.iter().map(|r| r.0.values()[0].re).collect();
    let x_err = if x.len() == 2 {
        (x[0] - 0.5).abs().max((x[1] - 1.5).abs())
    } else {
        f64::INFINITY
    };
    let oracle = sector_spectrum(&jc, 13)?;
    let m = match_spectra(&rec.iter().map(|r| r.1).collect::<Vec<_>>(), &oracle, 1e-12);
    let e_err = (oracle[0] - 0.0)
        .abs()
        .max((oracle[1] - 1.0).abs())
        .max(m.max_difference());
    let vec_res = rec.iter().map(|r| r.3).fold(0.0, f64::max);

    let detuned = dicke(&[0.5], &[0.5], 0.3, 1.0, 1);
    let d = 0.1525_f64.sqrt();
    let rec_d = bethe_records(&detuned, 13, Restriction::Exact(1))?;
    let target = [0.5 - d, 0.5 + d];
    let detuned_err = if rec_d.len() == 2 {
        rec_d
            .iter()
            .zip(target)
            .map(|(r, t)| (r.1 - t).abs().max((r.2 - t).abs()))
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };
    Ok(outcome(
        x_err < 1e-12 && e_err < 1e-12 && m.complete() && vec_res < 1e-12 && detuned_err < 1e-10,
        format!(
            "rapidity err {x_err:.1e}, energy err {e_err:.1e}, eigen-residual {vec_res:.1e}, detuned err {detuned_err:.1e}"
        ),
    ))
}

fn tavis_cummings() -> Result<Outcome, String> {
    let tc = dicke(&[1.0], &[1.0], 0.5, 1.0, 1);
    let rec = bethe_records(&tc, 13, Restriction::Exact(1))?;
    let h = 1.0 / 2.0_f64.sqrt();
    if rec.len() != 2 {
        return Ok(outcome(false, format!("{} branches found, expected 2", rec.len())));
    }
    let x_err = (rec[0].0.values()[0].re - (1.0 - h))
        .abs()
        .max((rec[1].0.values()[0].re - (1.0 + h)).abs());
    let e_err = (rec[0].1 + h).abs().max((rec[1].1 - h).abs());
    let oracle = sector_spectrum(&tc, 13)?;
    let m = match_spectra(&[rec[0].1, rec[1].1], &oracle, 1e-10);
    let rq_err = rec.iter().map(|r| (r.1 - r.2).abs()).fold(0.0, f64::max);
    Ok(outcome(
        x_err < 1e-10 && e_err < 1e-10 && m.complete() && rq_err < 1e-10,
        format!(
            "rapidity err {x_err:.1e}, energy err {e_err:.1e}, oracle match {:.1e}",
            m.max_difference()
        ),
    ))
}

fn dicke_completeness() -> Result<Outcome, String> {
    let spec = dicke(&[0.8, 1.3], &[0.5, 0.5], 0.2, 1.0, 2);
    let m_op = excitation_number(&spec);
    let sector_weight = spec.n_excitations as f64 - spec.spins.iter().sum::<f64>();
    let mut residuals = Vec::new();
    let mut all_matched = true;
    let mut parts = Vec::new();
    for cutoff in [12, 16, 20] {
        let basis = dicke_basis(&spec, cutoff, Restriction::None).map_err(|e| e.to_string())?;
        let h = realize(&build_dicke_hamiltonian(&spec), &basis).map_err(|e| e.to_string())?;
        let (vals, vecs) = eigen(&h).map_err(|e| e.to_string())?;
        let m = realize(&m_op, &basis).map_err(|e| e.to_string())?;
        let sector: Vec<f64> = vals
            .iter()
            .enumerate()
            .filter(|(k, _)| {
                let v = vecs.column(*k);
                let mv = &m.matrix * v;
                ((v.dotc(&mv)).re - sector_weight).abs() < 1e-6
            })
            .map(|(_, &e)| e)
            .collect();
        let rec = bethe_records(&spec, cutoff, Restriction::None)?;
        let mt = match_spectra(&sector, &rec.iter().map(|r| r.1).collect::<Vec<_>>(), 1e-6);
        all_matched &= mt.complete() && sector.len() == spec.sector_dimension();
        let worst = rec.iter().map(|r| r.3).fold(0.0, f64::max);
        residuals.push(worst);
        parts.push(format!(
            "cutoff {cutoff}: {}/{} matched, residual {worst:.1e}",
            mt.pairs.len(),
            sector.len()
        ));
    }
    // Residuals sit at the round-off floor once the sector fits; below it, only growth counts.
    let floor = 1e-12;
    let monotone = residuals.windows(2).all(|w| w[1] <= w[0] || w[1] < floor);
    Ok(outcome(all_matched && monotone, parts.join("; ")))
}

fn homotopy_continuation() -> Result<Outcome, String> {
    let spec = rg4();
    let model = Model::Rg(spec.clone());
    let policy = ContinuationPolicy::default();
    let lowest = solve_branches(&model, &BranchSelection::Seed(SeedSelection::Lowest), &policy, false)
        .map_err(|e| e.to_string())?;
    let all = solve_branches(&model, &BranchSelection::All, &policy, true).map_err(|e| e.to_string())?;
    let mut worst_res = 0.0_f64;
    let mut worst_conj = 0.0_f64;
    let tracked: Vec<&Branch> = lowest.iter().chain(distinct_converged(&all)).collect();
    if !lowest[0].converged() {
        return Ok(outcome(false, format!("lowest seed failed: {:?}", lowest[0].error)));
    }
    for b in &tracked {
        let t = b.trace.as_ref().unwrap();
        worst_res = worst_res.max(
            rg_residual(&spec, b.rapidities().unwrap())
                .map_err(|e| e.to_string())?
                .max_abs,
        );
        worst_conj = worst_conj.max(t.conjugation_defect());
    }
    Ok(outcome(
        worst_res < 1e-10 && worst_conj < 1e-8,
        format!(
            "{} converged branches, final residual {worst_res:.1e}, conjugation defect {worst_conj:.1e}",
            tracked.len()
        ),
    ))
}

fn contraction_convergence() -> Result<Outcome, String> {
    let spec = dicke(&[0.8, 1.3], &[0.5, 0.5], 0.2, 1.0, 2);
    let omega0 = 2;
    let n = spec.n_excitations;
    let target = dicke_basis(&spec, n, Restriction::Exact(n)).map_err(|e| e.to_string())?;
    let h = realize(&build_dicke_hamiltonian(&spec), &target)
        .map_err(|e| e.to_string())?
        .traceless();
    let h_norm = h.frobenius_norm();
    let mut points = Vec::new();
    for grid in [99, 999, 9999] {
        let xi = unitary_grid(omega0, grid, LabelScale::QuarterDegeneracy);
        let basis = deformed_charge_basis(&spec, xi, omega0, n, Restriction::Exact(n)).map_err(|e| e.to_string())?;
        if basis.states() != target.states() {
            return Err("deformed and Dicke bases differ".into());
        }
        let r0 = build_deformed_charge0(&spec, xi, omega0)
            .map_err(|e| e.to_string())?
            .scaled(spec.hbar_omega);
        let r0 = realize(&r0, &basis).map_err(|e| e.to_string())?.traceless();
        let gap: DMatrix<Complex64> = &r0.matrix - &h.matrix;
        points.push((xi, gap.norm() / h_norm));
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / 3.0;
    let my = ly.iter().sum::<f64>() / 3.0;
    let slope = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>()
        / lx.iter().map(|x| (x - mx).powi(2)).sum::<f64>();
    let table: Vec<String> = points.iter().map(|(x, y)| format!("xi={x:.1e} gap={y:.2e}")).collect();
    Ok(outcome(
        (slope - 0.5).abs() <= 0.15,
        format!("fitted exponent {slope:.3} (target 0.5 +/- 0.15); {}", table.join(", ")),
    ))
}

/// Largest relative deviation between analytic and central-difference Jacobians.
fn jacobian_gap(f: &dyn Fn(&RapiditySet) -> gaudin::Result<ResidualReport>, r: &RapiditySet) -> Result<f64, String> {
    let rep = f(r).map_err(|e| e.to_string())?;
    let jac = rep.jacobian.ok_or("no analytic Jacobian")?;
    let n = r.len();
    let mut fd = DMatrix::<Complex64>::zeros(n, n);
    for b in 0..n {
        let h = 1e-6 * r.values()[b].norm().max(1.0);
        let shift = |d: f64| {
            let mut v = r.values().to_vec();
            v[b] += d;
            RapiditySet::new(v, r.frame())
        };
        let up = f(&shift(h)).map_err(|e| e.to_string())?;
        let down = f(&shift(-h)).map_err(|e| e.to_string())?;
        for a in 0..n {
            fd[(a, b)] = (up.residuals[a] - down.residuals[a]) / (2.0 * h);
        }
    }
    Ok((&fd - &jac).norm() / jac.norm())
}

fn jacobian_fidelity() -> Result<Outcome, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let rg = rg4();
    let dk = dicke(&[0.8, 1.3], &[0.5, 1.0], 0.2, 1.0, 3);
    let single = SingleCopyDicke::new(dk.clone(), 4).map_err(|e| e.to_string())?;
    let mut worst = [0.0_f64; 4];
    for _ in 0..20 {
        let re = spaced(&mut rng, 2, 1.5, 0.3);
        let eta = RapiditySet::new(
            re.iter().map(|&x| c(x + 2.5, rng.gen_range(0.2..0.8))).collect(),
            Frame::RgEta,
        );
        let xi = rng.gen_range(0.05..0.95);
        let re = spaced(&mut rng, 3, 1.0, 0.3);
        let x = RapiditySet::new(
            re.iter().map(|&v| c(v + 1.0, rng.gen_range(0.2..0.8))).collect(),
            Frame::DickeX,
        );
        worst[0] = worst[0].max(jacobian_gap(&|r| rg_residual(&rg, r), &eta)?);
        worst[1] = worst[1].max(jacobian_gap(&|r| deformed_rg_residual(&rg, xi, r), &eta)?);
        worst[2] = worst[2].max(jacobian_gap(&|r| dicke_rg_residual(&dk, r), &x)?);
        worst[3] = worst[3].max(jacobian_gap(&|r| deformed_dicke_residual(&dk, xi, 4, r), &x)?);
        worst[3] = worst[3].max(jacobian_gap(&|r| single.evaluate(xi, r), &x)?);
    }
    Ok(outcome(
        worst.iter().all(|&w| w < 1e-6),
        format!(
            "rg {:.1e}, deformed rg {:.1e}, dicke {:.1e}, deformed dicke {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    ))
}

fn run_cli(args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_gaudin"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn cli_round_trip() -> Result<Outcome, String> {
    let dir = tempfile::TempDir::new().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let mut notes = Vec::new();

    let specs = [
        SpecFile {
            model: Model::Rg(rg4()),
            omega0: None,
        },
        SpecFile {
            model: Model::Dicke(dicke(&[0.8, 1.3], &[0.5, 0.5], 0.2, 1.0, 2)),
            omega0: Some(3),
        },
        SpecFile {
            model: Model::Dicke(dicke(&[1.0 / 3.0], &[1.5], -0.1, 0.7, 2)),
            omega0: None,
        },
    ];
    let round_trip = specs
        .iter()
        .all(|s| parse_spec(&emit_spec(s)).map(|p| &p == s).unwrap_or(false));
    notes.push(format!("round trip {}", if round_trip { "ok" } else { "broken" }));

    std::fs::write(path("rg.txt"), emit_spec(&specs[0])).map_err(|e| e.to_string())?;
    std::fs::write(path("dicke.txt"), emit_spec(&specs[1])).map_err(|e| e.to_string())?;
    let solve = run_cli(&[
        "--mode",
        "solve-rg",
        "--spec",
        &path("rg.txt"),
        "--branch",
        "all",
        "--out",
        &path("a.json"),
    ])?;
    let again = run_cli(&[
        "--mode",
        "solve-rg",
        "--spec",
        &path("rg.txt"),
        "--branch",
        "all",
        "--out",
        &path("b.json"),
    ])?;
    let a = std::fs::read(path("a.json")).map_err(|e| e.to_string())?;
    let deterministic =
        a == std::fs::read(path("b.json")).map_err(|e| e.to_string())? && solve.status.code() == again.status.code();
    notes.push(format!("deterministic {deterministic}"));

    let dk = run_cli(&[
        "--mode",
        "solve-dicke",
        "--spec",
        &path("dicke.txt"),
        "--out",
        &path("d.json"),
    ])?;
    let accepted = dk.status.code() == Some(0)
        && run_cli(&["--mode", "verify", "--spec", &path("d.json")])?.status.code() == Some(0);
    notes.push(format!("verify accepts solve output {accepted}"));

    let mut doc: serde_json::Value = serde_json::from_slice(&std::fs::read(path("d.json")).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let slot = &mut doc["branches"][0]["rapidities"][0][0];
    *slot = serde_json::Value::from(slot.as_f64().ok_or("missing rapidity")? + 1e-3);
    std::fs::write(path("t.json"), serde_json::to_string_pretty(&doc).unwrap()).map_err(|e| e.to_string())?;
    let tampered = run_cli(&["--mode", "verify", "--spec", &path("t.json")])?;
    let stderr = String::from_utf8_lossy(&tampered.stderr);
    let rejected = tampered.status.code() == Some(3) && stderr.contains("equation");
    notes.push(format!("tampered file rejected {rejected}"));

    Ok(outcome(
        round_trip && deterministic && accepted && rejected,
        notes.join(", "),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, Duration); 10] = [
        ("Gaudin algebra closure", gaudin_algebra, Duration::from_secs(1)),
        ("commuting charges", commuting_charges, Duration::from_secs(10)),
        ("deformation endpoints", endpoint_identities, Duration::from_secs(1)),
        ("Jaynes-Cummings closed form", jaynes_cummings, Duration::from_secs(1)),
        ("Tavis-Cummings s=1", tavis_cummings, Duration::from_secs(1)),
        ("Dicke sector completeness", dicke_completeness, Duration::from_secs(60)),
        ("homotopy continuation", homotopy_continuation, Duration::from_secs(30)),
        (
            "contraction convergence rate",
            contraction_convergence,
            Duration::from_secs(30),
        ),
        ("Jacobian fidelity", jacobian_fidelity, Duration::from_secs(5)),
        ("CLI round trip and verify", cli_round_trip, Duration::from_secs(5)),
    ];
    let mut failures = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check);
        let elapsed = start.elapsed();
        let (passed, detail) = match result {
            Ok(Ok(o)) => (o.passed && elapsed <= *budget, o.detail),
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".to_string()),
        };
        let timing = format!("{:.3}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        println!(
            "{} {:>2} {name}: {detail} [{timing}]",
            if passed { "PASS" } else { "FAIL" },
            k + 1
        );
        failures += usize::from(!passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
