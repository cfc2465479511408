//! One function per subcommand, each returning its report rows.

use std::path::Path;

use hls_core::kernel::{lambda_bracket_sides, DominanceCheck, INEQUALITY_SLACK};
use hls_core::verifier::{
    constraint_report, dilation_runs, fit_runs, gaussian_probe_family, mu_sweep, necessity_scan,
    probe_from_samples, probe_lattice, probe_samples, proof_chain_check, ConstraintParams, FamilyMember,
    ADMISSIBLE_SLOPE, EXPONENT_TOL, REARRANGEMENT_TOL,
};
use hls_core::{
    apply_fractional_grid, check_pointwise_dominance, classical_hls_at, dominance_pairs, sample, CounterRng,
    DilationSpec, ExponentPair, GridFunction, GridSpec, GroupPoint, KernelSpec, OmegaABParams, Profile,
};
use serde_json::{json, Value};

use crate::config::{Command, FamilyKind, KernelKind, RunConfig, Setup};
use crate::report::ReportRow;
use crate::CliError;

/// Relative tolerance of the homogeneity identities.
pub const HOMOGENEITY_TOL: f64 = 1e-9;
/// Absolute tolerance on fitted dilation slopes and ratios.
pub const SLOPE_TOL: f64 = 0.1;
/// Absolute tolerance of the classical one-axis oracle at the finest step.
pub const CLASSICAL_TOL: f64 = 1e-3;
/// Spread separating bounded from divergent norm probes.
pub const SPREAD_THRESHOLD: f64 = 10.0;
/// Points closer than this to a singular set are redrawn.
pub const SLAB: f64 = 1e-3;

/// `count` points uniform in `[−half, half]^{2n+1}` with every block norm
/// and `|t|` at least `slab`.
pub fn random_points(rng: &mut CounterRng, n: usize, half: f64, slab: f64, count: usize) -> Vec<GroupPoint> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let u: Vec<f64> = (0..n).map(|_| rng.uniform(-half, half)).collect();
        let v: Vec<f64> = (0..n).map(|_| rng.uniform(-half, half)).collect();
        let t = rng.uniform(-half, half);
        let x = GroupPoint { u, v, t };
        if x.xi_norm() >= slab && x.eta_norm() >= slab && t.abs() >= slab {
            out.push(x);
        }
    }
    out
}

fn kernel_json(k: &KernelSpec) -> Value {
    serde_json::to_value(k).unwrap_or(Value::Null)
}

fn pq_json(pq: &ExponentPair) -> Value {
    json!({"p": pq.p(), "q": pq.q()})
}

pub fn execute(cfg: &RunConfig) -> Result<Vec<ReportRow>, CliError> {
    let setup = cfg.validate()?;
    let rows = match setup.command {
        Command::KernelEval => kernel_eval(cfg, &setup)?,
        Command::Homogeneity => homogeneity(cfg, &setup)?,
        Command::Dominance => dominance(cfg)?,
        Command::LambdaBracket => lambda_bracket(cfg)?,
        Command::Apply => apply(cfg, &setup)?,
        Command::ClassicalHls => classical_hls(cfg)?,
        Command::ScalingFit => scaling_fit(cfg, &setup)?,
        Command::Necessity => necessity(cfg, &setup)?,
        Command::ProbeNorm => probe_norm(cfg, &setup)?,
        Command::ProofChain => proof_chain(cfg, &setup)?,
        Command::Constraints => constraints(cfg, &setup)?,
        Command::MuSweep => mu_sweep_rows(cfg, &setup)?,
    };
    Ok(rows)
}

fn kernel_eval(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let n = cfg.n;
    let flat = cfg.point.clone().unwrap_or_else(|| {
        let mut p = vec![2.0; n];
        p.extend(vec![1.0; n]);
        p.push(1.0);
        p
    });
    let x = GroupPoint::from_flat(&flat)?;
    let value = setup.kernel.eval(&x)?;
    let params = json!({"kernel": kernel_json(&setup.kernel), "point": flat});
    Ok(vec![ReportRow::predicate("kernel-eval", params, value, None, value.is_finite() && value > 0.0)])
}

fn homogeneity(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let count = cfg.samples.unwrap_or(1000);
    let mut rng = CounterRng::new(cfg.seed);
    let points = random_points(&mut rng, cfg.n, 4.0, SLAB, count);
    let left = random_points(&mut rng, cfg.n, 4.0, SLAB, count);
    let right = random_points(&mut rng, cfg.n, 4.0, SLAB, count);
    let ctx = &setup.ctx;
    let k = &setup.kernel;

    let mut dilations: Vec<DilationSpec> =
        [0.5, 2.0, 8.0].iter().map(|d| DilationSpec::parabolic(*d)).collect::<hls_core::Result<_>>()?;
    if matches!(k, KernelSpec::V(_) | KernelSpec::SeparableMajorant { .. }) {
        for (d1, d2) in [(0.5, 2.0), (2.0, 8.0), (8.0, 0.5), (2.0, 2.0)] {
            dilations.push(DilationSpec::zygmund(d1, d2)?);
        }
    }
    let mut rows = Vec::new();
    for d in &dilations {
        let c = k
            .homogeneity_factor(d)
            .ok_or_else(|| CliError::Usage(format!("{} is not homogeneous under {d:?}", k.name())))?;
        let rel = |lhs: f64, base: f64| (lhs - c * base).abs() / (c * base).abs();
        let mut worst: f64 = 0.0;
        for x in &points {
            worst = worst.max(rel(k.eval(&d.apply(x))?, k.eval(x)?));
        }
        for (y, z) in left.iter().zip(&right) {
            let base = k.eval(&ctx.difference(y, z)?)?;
            let dilated = k.eval(&ctx.difference(&d.apply(y), &d.apply(z))?)?;
            worst = worst.max(rel(dilated, base));
        }
        let params = json!({
            "kernel": kernel_json(k), "dilation": d, "mu": ctx.mu(),
            "samples": count, "seed": cfg.seed,
        });
        rows.push(ReportRow::within(
            format!("homogeneity:{}", serde_json::to_value(d.mode()).unwrap_or(Value::Null).as_str().unwrap_or("")),
            params,
            worst,
            0.0,
            HOMOGENEITY_TOL,
        ));
    }
    Ok(rows)
}

fn dominance(cfg: &RunConfig) -> Result<Vec<ReportRow>, CliError> {
    let witness = dominance_pairs(cfg.a, cfg.b, cfg.n, cfg.witness_theta)?;
    let v = cfg.v_params()?;
    let majorant = KernelSpec::separable_majorant(cfg.n, v.s())?;
    let count = cfg.samples.unwrap_or(100_000);
    let mut rng = CounterRng::new(cfg.seed);
    let points = random_points(&mut rng, cfg.n, 4.0, SLAB, count);
    let report = check_pointwise_dominance(&witness, &points)?;
    let base = json!({
        "a": cfg.a, "b": cfg.b, "n": cfg.n, "witness_theta": witness.theta,
        "samples": count, "seed": cfg.seed,
    });
    let mut rows = Vec::new();
    for (label, check) in
        [("region1", DominanceCheck::Region1), ("region2", DominanceCheck::Region2), ("sum", DominanceCheck::Sum)]
    {
        let violations = report.violations.iter().filter(|x| x.check == check).count();
        let mut params = base.clone();
        params["checked"] = json!(match check {
            DominanceCheck::Region1 => report.region1_checked,
            DominanceCheck::Region2 => report.region2_checked,
            DominanceCheck::Sum => count,
        });
        rows.push(ReportRow::within(format!("dominance:{label}"), params, violations as f64, 0.0, 0.0));
    }
    rows.push(
        ReportRow::predicate(
            "dominance:min_ratio",
            base.clone(),
            report.min_ratio,
            Some(1.0),
            report.min_ratio >= 1.0 - INEQUALITY_SLACK,
        )
        .with_margin(report.min_ratio - 1.0),
    );

    let kv = KernelSpec::V(v);
    let mut violations = 0usize;
    let mut min_ratio = f64::INFINITY;
    for x in &points {
        let lhs = kv.eval(x)?;
        let rhs = majorant.eval(x)?;
        min_ratio = min_ratio.min(rhs / lhs);
        if lhs > rhs * (1.0 + INEQUALITY_SLACK) {
            violations += 1;
        }
    }
    let params = json!({"kernel": kernel_json(&kv), "samples": count, "seed": cfg.seed, "min_ratio": min_ratio});
    rows.push(ReportRow::within("dominance:majorant", params, violations as f64, 0.0, 0.0));
    Ok(rows)
}

fn lambda_bracket(cfg: &RunConfig) -> Result<Vec<ReportRow>, CliError> {
    let count = cfg.samples.unwrap_or(100_000);
    let mut rng = CounterRng::new(cfg.seed);
    let mut violations = 0usize;
    let mut min_ratio = f64::INFINITY;
    let mut tuples = Vec::with_capacity(count);
    for _ in 0..count {
        let theta = cfg.theta.unwrap_or_else(|| rng.uniform(0.0, 2.0));
        let xy = rng.log_uniform(1e-4, 1e4);
        let t = rng.log_uniform(1e-4, 1e4);
        let lambda = rng.log_uniform(0.01, 100.0);
        if !hls_core::check_lambda_bracket_bound(theta, xy, t, lambda)? {
            violations += 1;
        }
        let (lhs, rhs) = lambda_bracket_sides(theta, xy, t, lambda);
        min_ratio = min_ratio.min(lhs / rhs);
        tuples.push((theta, xy, t));
    }
    let params = json!({"samples": count, "seed": cfg.seed, "lambda_range": [0.01, 100.0], "min_ratio": min_ratio});
    let mut rows = vec![ReportRow::within("lambda-bracket:violations", params, violations as f64, 0.0, 0.0)];
    // Worst slack of the bound at fixed λ over the same (ϑ, xy, t); shows how
    // tight the multiplier is as λ moves away from 1.
    for lambda in [0.01, 0.1, 0.5, 1.0, 2.0, 10.0, 100.0] {
        let tight = tuples
            .iter()
            .map(|(theta, xy, t)| {
                let (lhs, rhs) = lambda_bracket_sides(*theta, *xy, *t, lambda);
                lhs / rhs
            })
            .fold(f64::INFINITY, f64::min);
        rows.push(
            ReportRow::predicate(
                "lambda-bracket:trend",
                json!({"lambda": lambda, "samples": count, "seed": cfg.seed}),
                tight,
                Some(1.0),
                tight >= 1.0 - INEQUALITY_SLACK,
            )
            .with_margin(tight - 1.0),
        );
    }
    Ok(rows)
}

#[derive(serde::Serialize, serde::Deserialize, PartialEq)]
struct CacheKey {
    kernel: KernelSpec,
    function: hls_core::TestFunction,
    mu: f64,
    grid: GridSpec,
}

fn cached_output(cfg: &RunConfig, setup: &Setup) -> Result<(GridFunction, bool), CliError> {
    let key = CacheKey {
        kernel: setup.kernel,
        function: setup.function.clone(),
        mu: setup.ctx.mu(),
        grid: setup.grid.clone(),
    };
    let compute = || apply_fractional_grid(&setup.kernel, &setup.ctx, &setup.function, &setup.grid);
    let Some(path) = &cfg.cache else {
        return Ok((compute()?, false));
    };
    let key_path = path.with_extension("key.json");
    if path.exists() && key_matches(&key_path, &key) {
        let g = GridFunction::load(path)?;
        if *g.spec() == setup.grid.complement() {
            return Ok((g, true));
        }
    }
    let g = compute()?;
    g.save(path)?;
    let text = serde_json::to_string(&serde_json::to_value(&key).map_err(|e| CliError::Io(e.to_string()))?)
        .map_err(|e| CliError::Io(e.to_string()))?;
    std::fs::write(&key_path, text).map_err(|e| CliError::Io(format!("{}: {e}", key_path.display())))?;
    Ok((g, false))
}

fn key_matches(path: &Path, key: &CacheKey) -> bool {
    std::fs::read_to_string(path)
        .ok()
        .and_then(|s| serde_json::from_str::<CacheKey>(&s).ok())
        .is_some_and(|k| k == *key)
}

fn apply(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let pq = setup.pairs[0];
    let input = sample(&setup.function, &setup.grid)?;
    let (output, hit) = cached_output(cfg, setup)?;
    let in_norm = input.lp_norm(pq.p())?;
    let out_norm = output.lp_norm(pq.q())?;
    let min_out = output.values().iter().copied().fold(f64::INFINITY, f64::min);
    let params = json!({
        "kernel": kernel_json(&setup.kernel), "mu": setup.ctx.mu(), "pq": pq_json(&pq),
        "L": setup.grid.half_width(), "N": setup.grid.nodes_per_axis(), "cache_hit": hit,
    });
    Ok(vec![
        ReportRow::info("apply:input_norm", params.clone(), in_norm),
        ReportRow::info("apply:output_norm", params.clone(), out_norm),
        ReportRow::info("apply:ratio", params.clone(), out_norm / in_norm),
        ReportRow::predicate("apply:positivity", params, min_out, Some(0.0), min_out >= 0.0).with_margin(min_out),
    ])
}

/// `(x, exact)` for `f = 1_{[0,1)}` on one axis.
pub fn classical_examples(a: f64) -> [(f64, f64); 2] {
    [(2.0, (2f64.powf(a) - 1.0) / a), (0.5, 2.0 * 0.5f64.powf(a) / a)]
}

fn classical_hls(cfg: &RunConfig) -> Result<Vec<ReportRow>, CliError> {
    let a = cfg.a;
    let profiles = [Profile::Indicator { lo: 0.0, hi: 1.0 }];
    let half = 4.0;
    let mut rows = Vec::new();
    for (x, exact) in classical_examples(a) {
        let mut errors = Vec::new();
        let mut last = f64::NAN;
        for &k in &cfg.levels {
            let h = 2f64.powi(-(k as i32));
            let nodes = (2.0 * half / h).round() as usize;
            let in_spec = GridSpec::cube(1, half, nodes, true)?;
            let value = classical_hls_at(a, &profiles, &in_spec, &[x], cfg.rule)?;
            let err = (value - exact).abs();
            rows.push(ReportRow::info(
                "classical-hls:error",
                json!({"a": a, "x": x, "k": k, "h": h, "value": value, "exact": exact, "rule": cfg.rule}),
                err,
            ));
            errors.push(err);
            last = value;
        }
        let finest = *cfg.levels.last().unwrap_or(&0);
        rows.push(ReportRow::within(
            "classical-hls:finest",
            json!({"a": a, "x": x, "k": finest, "rule": cfg.rule}),
            last,
            exact,
            CLASSICAL_TOL,
        ));
        let tail = &errors[errors.len().saturating_sub(4)..];
        let decreasing = tail.len() >= 2 && tail.windows(2).all(|w| w[1] < w[0]);
        rows.push(ReportRow::predicate(
            "classical-hls:monotone",
            json!({"a": a, "x": x, "errors": tail, "rule": cfg.rule}),
            *tail.last().unwrap_or(&f64::NAN),
            None,
            decreasing,
        ));
    }
    Ok(rows)
}

fn scaling_fit(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let runs = dilation_runs(&setup.kernel, &setup.ctx, &setup.function, &setup.grid, &cfg.deltas)?;
    let mut rows = Vec::new();
    for pq in &setup.pairs {
        let fit = fit_runs(&runs, &setup.kernel, pq)?;
        let base = json!({
            "kernel": kernel_json(&setup.kernel), "mu": setup.ctx.mu(), "pq": pq_json(pq),
            "L": setup.grid.half_width(), "N": setup.grid.nodes_per_axis(), "deltas": cfg.deltas,
        });
        let r0 = runs[0].ratio(pq)?;
        for run in &runs[1..] {
            let mut params = base.clone();
            params["delta"] = json!(run.delta);
            let expected = (run.delta / runs[0].delta).powf(fit.predicted_slope);
            rows.push(ReportRow::within("scaling-fit:ratio", params, run.ratio(pq)? / r0, expected, SLOPE_TOL));
        }
        let mut params = base;
        params["max_residual"] = json!(fit.max_residual);
        params["intercept"] = json!(fit.intercept);
        rows.push(ReportRow::within("scaling-fit:slope", params, fit.slope, fit.predicted_slope, SLOPE_TOL));
    }
    Ok(rows)
}

fn necessity(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let table = necessity_scan(&setup.kernel, &setup.ctx, &setup.function, &setup.grid, &setup.pairs, &cfg.deltas)?;
    let mut rows = Vec::new();
    for row in &table {
        let params = json!({
            "kernel": kernel_json(&setup.kernel), "p": row.p, "q": row.q, "deltas": cfg.deltas,
            "N": setup.grid.nodes_per_axis(), "admissible": row.admissible, "on_line": row.on_line,
            "divergence_exponent": row.divergence_exponent(),
        });
        rows.push(ReportRow::within("necessity:fit", params.clone(), row.fit.slope, row.fit.predicted_slope, SLOPE_TOL));
        rows.push(ReportRow::within("necessity:bounded", params.clone(), row.fit.slope, 0.0, ADMISSIBLE_SLOPE));
        rows.push(ReportRow::predicate("necessity:line", params, row.fit.slope, Some(row.fit.predicted_slope), row.consistent()));
    }
    Ok(rows)
}

fn on_line(kernel: &KernelSpec, pq: &ExponentPair) -> bool {
    (kernel.homogeneity_sum() / (kernel.n() + 1) as f64 - pq.gap()).abs() <= EXPONENT_TOL
}

fn probe_norm(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let family = match cfg.family {
        FamilyKind::GaussianProbe => gaussian_probe_family(cfg.n),
        FamilyKind::Single => vec![FamilyMember::new("function", setup.function.clone())],
    };
    let samples = probe_samples(&setup.kernel, &setup.ctx, &family, &setup.grid)?;
    let mut rows = Vec::new();
    for pq in &setup.pairs {
        let result = probe_from_samples(&samples, pq)?;
        let base = json!({
            "kernel": kernel_json(&setup.kernel), "mu": setup.ctx.mu(), "pq": pq_json(pq),
            "L": setup.grid.half_width(), "N": setup.grid.nodes_per_axis(),
        });
        for r in &result.rows {
            let mut params = base.clone();
            params["label"] = json!(r.label);
            params["input_norm"] = json!(r.input_norm);
            params["output_norm"] = json!(r.output_norm);
            rows.push(ReportRow::info("probe-norm:ratio", params, r.ratio));
        }
        rows.push(ReportRow::info("probe-norm:lower_bound", base.clone(), result.norm_lower_bound));
        let admissible = on_line(&setup.kernel, pq);
        let mut params = base;
        params["expect"] = json!(if admissible { "bounded" } else { "divergent" });
        let spread = result.ratio_spread;
        let (pass, margin) = if admissible {
            (spread <= SPREAD_THRESHOLD, SPREAD_THRESHOLD - spread)
        } else {
            (spread >= SPREAD_THRESHOLD, spread - SPREAD_THRESHOLD)
        };
        rows.push(
            ReportRow::predicate("probe-norm:spread", params, spread, Some(SPREAD_THRESHOLD), pass).with_margin(margin),
        );
    }
    Ok(rows)
}

fn proof_chain(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let v = cfg.v_params()?;
    let pq = setup.pairs[0];
    let nodes = probe_lattice(&setup.grid, cfg.probes)?;
    let report = proof_chain_check(&setup.ctx, &setup.function, &v, &pq, &setup.grid, &nodes)?;
    let base = json!({
        "alpha": v.alpha1, "beta": v.beta, "theta": v.theta, "mu": setup.ctx.mu(), "pq": pq_json(&pq),
        "L": setup.grid.half_width(), "N": setup.grid.nodes_per_axis(), "probe_nodes": nodes.len(),
        "function": &setup.function,
    });
    let margin = report.min_domination_margin();
    let mink = report
        .minkowski
        .iter()
        .map(|c| c.sum_of_norms * (1.0 + INEQUALITY_SLACK) - c.norm_of_sum)
        .fold(f64::INFINITY, f64::min);
    let mut mink_params = base.clone();
    mink_params["planes"] = json!(report.minkowski.len());
    Ok(vec![
        ReportRow::predicate("proof-chain:domination", base.clone(), margin, None, report.domination_holds())
            .with_margin(margin),
        ReportRow::within(
            "proof-chain:rearrangement",
            base,
            report.max_rearrangement_discrepancy(),
            0.0,
            REARRANGEMENT_TOL,
        ),
        ReportRow::predicate("proof-chain:minkowski", mink_params, mink, None, report.minkowski_holds())
            .with_margin(mink),
    ])
}

fn constraints(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let pq = setup.pairs[0];
    let params = match cfg.kernel {
        KernelKind::V => ConstraintParams::V(cfg.v_params()?),
        _ => ConstraintParams::OmegaAB(OmegaABParams::new(cfg.n, cfg.a, cfg.b)?),
    };
    let report = constraint_report(&params, &pq);
    let base = json!({"params": params, "pq": pq_json(&pq), "tolerance": report.tolerance});
    let flags = [
        ("homogeneity", Some(report.homogeneity_ok)),
        ("theta", report.theta_ok),
        ("band", report.band_ok),
        ("ab_b", report.ab_b_ok),
        ("ab_anb", report.ab_anb_ok),
    ];
    Ok(flags
        .iter()
        .filter_map(|(label, flag)| {
            flag.map(|ok| {
                ReportRow::predicate(format!("constraints:{label}"), base.clone(), ok as u8 as f64, Some(1.0), ok)
            })
        })
        .collect())
}

fn mu_sweep_rows(cfg: &RunConfig, setup: &Setup) -> Result<Vec<ReportRow>, CliError> {
    let pq = setup.pairs[0];
    let results = mu_sweep(&setup.kernel, &setup.function, &pq, &cfg.mus, &setup.grid)?;
    let base = json!({
        "kernel": kernel_json(&setup.kernel), "pq": pq_json(&pq),
        "L": setup.grid.half_width(), "N": setup.grid.nodes_per_axis(),
    });
    let mut rows: Vec<ReportRow> = results
        .iter()
        .map(|(mu, ratio)| {
            let mut params = base.clone();
            params["mu"] = json!(mu);
            ReportRow::info("mu-sweep:ratio", params, *ratio)
        })
        .collect();
    let max = results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let min = results.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    rows.push(ReportRow::info("mu-sweep:spread", base, max / min));
    Ok(rows)
}

