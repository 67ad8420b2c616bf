//! The five batch commands.  Each one writes its data files plus a
//! `manifest.json` into the output directory — the manifest is written even
//! when the run fails partway — and returns a process exit code:
//! `0` success, `2` invalid configuration or model, `3` numerical failure.

use std::path::PathBuf;
use std::sync::Arc;

use spinboson::error::Error;
use spinboson::matrix_pt::{feshbach_coefficients, rs_coefficients, seeded_problem};
use spinboson::model::{validate_model, ValidationOptions};
use spinboson::oracle::{small_rational_rule, DiscretizedModel};
use spinboson::pairings::{carrier_n, enumerate_pair_partitions};
use spinboson::renorm::{linked_covering_pairings, Engine, EtaExtrapolation, RenormConfig};

use crate::config::RunConfig;
use crate::manifest::Emitter;

/// Everything a command needs besides its own flags.
pub struct Ctx {
    pub config: RunConfig,
    pub config_hash: String,
    pub out_dir: PathBuf,
    pub seed: u64,
    pub workers: Option<usize>,
    pub order: Option<usize>,
}

/// A failed run, already classified into an exit code.
enum Failure {
    /// Exit 2: the configuration or model is invalid.
    Config(String),
    /// Exit 3: a numerical stage did not converge or could not be solved.
    Numerical(String),
}

fn classify(e: Error) -> Failure {
    match e {
        Error::Config(_) | Error::InvalidModel(_) | Error::DimensionLimit(_) => {
            Failure::Config(e.to_string())
        }
        _ => Failure::Numerical(e.to_string()),
    }
}

fn io_failure(e: anyhow::Error) -> Failure {
    Failure::Config(format!("output error: {e}"))
}

/// Shared runner: create the emitter, run the body, always write the
/// manifest, translate the outcome into an exit code.
fn run_command<F>(ctx: &Ctx, command: &str, body: F) -> i32
where
    F: FnOnce(&Ctx, &mut Emitter) -> Result<(), Failure>,
{
    let mut em = match Emitter::new(&ctx.out_dir, &ctx.config.output.formats) {
        Ok(em) => em,
        Err(e) => {
            eprintln!("error: cannot prepare output directory {}: {e}", ctx.out_dir.display());
            return 2;
        }
    };
    let outcome = body(ctx, &mut em);
    let (status, error, code) = match &outcome {
        Ok(()) => ("ok", None, 0),
        Err(Failure::Config(m)) => ("config-error", Some(m.clone()), 2),
        Err(Failure::Numerical(m)) => ("numerical-error", Some(m.clone()), 3),
    };
    if let Some(m) = &error {
        eprintln!("error: {m}");
    }
    match em.finish(command, &ctx.config_hash, ctx.seed, ctx.workers, status, error) {
        Ok(path) => println!("manifest: {}", path.display()),
        Err(e) => {
            eprintln!("error: cannot write manifest: {e}");
            return if code == 0 { 2 } else { code };
        }
    }
    code
}

fn engine_for(ctx: &Ctx) -> Result<Engine, Failure> {
    let model = Arc::new(ctx.config.build_model().map_err(classify)?);
    let mut rcfg = RenormConfig::for_model(&model);
    rcfg.n_max = ctx.order.unwrap_or(ctx.config.compute.n_max);
    if rcfg.n_max > 6 {
        return Err(Failure::Config(format!(
            "expansion order {} exceeds the supported maximum 6",
            rcfg.n_max
        )));
    }
    rcfg.m_max = ctx.config.compute.m_max;
    rcfg.eta_levels = ctx.config.compute.eta_levels;
    rcfg.quadrature = rcfg.quadrature.with_nodes(ctx.config.compute.quadrature_nodes);
    Ok(Engine::new(model, rcfg))
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

pub fn cmd_validate(ctx: &Ctx) -> i32 {
    run_command(ctx, "validate", |ctx, em| {
        let (h_at, coupling) = ctx.config.build_parts().map_err(classify)?;
        let report = em.stage("admissibility", || {
            validate_model(&h_at, &coupling, &ValidationOptions::default())
        });
        for c in &report.checks {
            println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            em.check(&c.name, c.passed, c.detail.clone());
        }
        // Independent sanity check of the expansion machinery itself: both
        // finite-pencil recursions must produce identical coefficients on a
        // reproducible random Hermitian problem.
        let agreement = em.stage("self-check", || -> spinboson::Result<f64> {
            let problem = seeded_problem(6, ctx.seed, 1.0)?;
            let a = rs_coefficients(&problem, 6)?;
            let b = feshbach_coefficients(&problem, 6)?;
            let scale = a.energies.iter().fold(1.0f64, |m, &e| m.max(e.abs()));
            Ok(a.energies
                .iter()
                .zip(&b.energies)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0f64, f64::max)
                / scale)
        });
        match agreement {
            Ok(diff) => {
                let ok = diff < 1e-8;
                println!(
                    "{} expansion recursions agree: relative coefficient difference {diff:.3e}",
                    if ok { "PASS" } else { "FAIL" }
                );
                em.check(
                    "expansion-recursions-agree",
                    ok,
                    format!("relative coefficient difference {diff:.3e}"),
                );
            }
            Err(e) => return Err(classify(e)),
        }
        if em.wants("json") {
            em.emit_json("validate.json", &report).map_err(io_failure)?;
        }
        if !report.passed() {
            let summary = report
                .checks
                .iter()
                .filter(|c| !c.passed)
                .map(|c| format!("{}: {}", c.name, c.detail))
                .collect::<Vec<_>>()
                .join("; ");
            return Err(Failure::Config(format!("model is not admissible — {summary}")));
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// energy
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct EnergyOrderOut {
    n: usize,
    coefficient: f64,
    method: String,
    pairing_count: usize,
    quadrature_nodes: usize,
    /// `|value − value at half the nodes|`: the reported discretization error.
    refinement_error: f64,
}

#[derive(serde::Serialize)]
struct EnergyOut {
    coefficients: Vec<f64>,
    orders: Vec<EnergyOrderOut>,
}

#[derive(serde::Serialize)]
struct EtaOrderOut {
    n: usize,
    direct: f64,
    #[serde(flatten)]
    extrapolation: EtaExtrapolation,
}

pub fn cmd_energy(ctx: &Ctx) -> i32 {
    run_command(ctx, "energy", |ctx, em| {
        let engine = engine_for(ctx)?;
        let series = em
            .stage("energy-direct", || engine.compute_series())
            .map_err(classify)?;
        // Same series on a twice-coarser rule: the difference is the reported
        // per-order discretization error (the rules converge spectrally, so
        // the coarse-grid error dominates the difference).
        let half_nodes = (ctx.config.compute.quadrature_nodes / 2).max(8);
        let mut half_cfg = engine.config().clone();
        half_cfg.quadrature = half_cfg.quadrature.with_nodes(half_nodes);
        let half_engine = Engine::new(engine.model().clone(), half_cfg);
        let half = em
            .stage("energy-refinement", || half_engine.compute_series())
            .map_err(classify)?;
        let floor = 1e-10;
        let out = EnergyOut {
            coefficients: series.coefficients.clone(),
            orders: series
                .records
                .iter()
                .map(|r| EnergyOrderOut {
                    n: r.n,
                    coefficient: r.value,
                    method: r.method.clone(),
                    pairing_count: r.pairing_count,
                    quadrature_nodes: r.quadrature_nodes,
                    refinement_error: (r.value - half.coefficients[r.n]).abs()
                        + floor * r.value.abs().max(1.0),
                })
                .collect(),
        };
        for o in &out.orders {
            println!(
                "E_{} = {:+.12e}  (± {:.3e}, {})",
                o.n, o.coefficient, o.refinement_error, o.method
            );
        }
        let parity_worst = out
            .orders
            .iter()
            .filter(|o| o.n % 2 == 1)
            .map(|o| o.coefficient.abs())
            .fold(0.0f64, f64::max);
        em.check(
            "odd-orders-vanish",
            parity_worst < 1e-12,
            format!("largest odd coefficient {parity_worst:.3e}"),
        );
        if em.wants("json") {
            em.emit_json("energy.json", &out).map_err(io_failure)?;
        }
        if em.wants("csv") {
            let mut csv = String::from(
                "n,coefficient,method,pairing_count,quadrature_nodes,refinement_error\n",
            );
            for o in &out.orders {
                csv.push_str(&format!(
                    "{},{:.16e},{},{},{},{:.16e}\n",
                    o.n, o.coefficient, o.method, o.pairing_count, o.quadrature_nodes,
                    o.refinement_error
                ));
            }
            em.emit("energy.csv", csv.as_bytes()).map_err(io_failure)?;
        }

        if ctx.config.compute.eta_route {
            let schedule = engine.default_eta_schedule();
            let mut eta_orders = Vec::new();
            for n in (2..=engine.config().n_max).step_by(2) {
                let ext = em
                    .stage(&format!("energy-eta-{n}"), || {
                        engine.energy_coefficient_eta(n, &schedule)
                    })
                    .map_err(classify)?;
                let direct = series.coefficients[n];
                // Relative agreement with a floor at the size of the largest
                // single term of the regularized sum: beyond that the
                // comparison would be asking the extrapolation to beat the
                // cancellation among its own contributions.
                let cancellation = ext.largest_terms.last().copied().unwrap_or(1.0);
                let tol = 1e-4 * direct.abs().max(ext.estimate.abs()).max(cancellation);
                let diff = (ext.estimate - direct).abs();
                println!(
                    "E_{n} (regularized route) = {:+.12e}  (± {:.3e}, direct differs by {diff:.3e})",
                    ext.estimate, ext.error_estimate
                );
                em.check(
                    &format!("eta-route-agrees-order-{n}"),
                    diff <= tol,
                    format!("|extrapolated − direct| = {diff:.3e}, tolerance {tol:.3e}"),
                );
                eta_orders.push(EtaOrderOut { n, direct, extrapolation: ext });
            }
            if em.wants("json") {
                em.emit_json("energy_eta.json", &eta_orders).map_err(io_failure)?;
            }
            if em.wants("csv") {
                let mut csv = String::from("n,eta,sample,largest_term\n");
                for o in &eta_orders {
                    let e = &o.extrapolation;
                    for i in 0..e.eta_values.len() {
                        csv.push_str(&format!(
                            "{},{:.16e},{:.16e},{:.16e}\n",
                            o.n, e.eta_values[i], e.samples[i], e.largest_terms[i]
                        ));
                    }
                }
                em.emit("energy_eta.csv", csv.as_bytes()).map_err(io_failure)?;
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// gsnorm
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct NormOrderOut {
    m: usize,
    value: f64,
    method: String,
}

#[derive(serde::Serialize)]
struct NormOut {
    values: Vec<f64>,
    orders: Vec<NormOrderOut>,
}

pub fn cmd_gsnorm(ctx: &Ctx) -> i32 {
    run_command(ctx, "gsnorm", |ctx, em| {
        let engine = engine_for(ctx)?;
        let series = em.stage("gsnorm", || engine.norm_series()).map_err(classify)?;
        let out = NormOut {
            values: series.values.clone(),
            orders: series
                .records
                .iter()
                .map(|r| NormOrderOut { m: r.m, value: r.value, method: r.method.clone() })
                .collect(),
        };
        for o in &out.orders {
            println!("‖ψ_{}‖² = {:+.12e}  ({})", o.m, o.value, o.method);
        }
        em.check(
            "norm-coefficients-nonnegative",
            out.values.iter().all(|&v| v >= -1e-12),
            format!("smallest value {:.3e}", out.values.iter().cloned().fold(f64::MAX, f64::min)),
        );
        em.check(
            "zeroth-order-is-one",
            (out.values[0] - 1.0).abs() < 1e-14,
            format!("‖ψ₀‖² = {}", out.values[0]),
        );
        if em.wants("json") {
            em.emit_json("gsnorm.json", &out).map_err(io_failure)?;
        }
        if em.wants("csv") {
            let mut csv = String::from("m,value,method\n");
            for o in &out.orders {
                csv.push_str(&format!("{},{:.16e},{}\n", o.m, o.value, o.method));
            }
            em.emit("gsnorm.csv", csv.as_bytes()).map_err(io_failure)?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

pub fn cmd_oracle(ctx: &Ctx) -> i32 {
    run_command(ctx, "oracle", |ctx, em| {
        let model = ctx.config.build_model().map_err(classify)?;
        let o = &ctx.config.oracle;
        let rule = small_rational_rule(model.radial_scale(), o.modes);
        let disc =
            DiscretizedModel::from_quadrature(&model, &rule, o.occupation_cutoff).map_err(classify)?;
        println!(
            "discretized model: {} modes, occupation ≤ {}, dimension {}",
            o.modes,
            o.occupation_cutoff,
            disc.dimension()
        );
        let order = ctx.order.unwrap_or(o.order);
        let expansion = em
            .stage("oracle-expansion", || disc.discrete_rs(order))
            .map_err(classify)?;
        let ratio = (o.lambda_min / o.lambda_max).powf(1.0 / (o.lambda_points as f64 - 1.0));
        let lambdas: Vec<f64> =
            (0..o.lambda_points).map(|k| o.lambda_max * ratio.powi(k as i32)).collect();
        let report = em
            .stage("oracle-sweep", || disc.asymptotic_report(&expansion.energies, &lambdas))
            .map_err(classify)?;
        println!(
            "bounds hold: {}; max solver residual {:.3e}",
            report.bounds_hold, report.solver_residual_max
        );
        match report.fitted_slope {
            Some(s) => println!(
                "remainder decay: fitted slope {s:.4} vs parity-implied {} ({})",
                report.expected_slope, report.rate_label
            ),
            None => println!("remainder decay: too few usable rows to fit a slope"),
        }
        em.check(
            "energy-bounds",
            report.bounds_hold,
            "variational upper bound, completed-square lower bound, photon-number bound".into(),
        );
        if let Some(s) = report.fitted_slope {
            em.check(
                "remainder-rate",
                (s - report.expected_slope).abs() <= 0.5,
                format!("fitted slope {s:.4}, parity-implied {}", report.expected_slope),
            );
        }
        if em.wants("json") {
            em.emit_json("oracle.json", &report).map_err(io_failure)?;
        }
        if em.wants("csv") {
            em.emit("oracle.csv", report.csv().as_bytes()).map_err(io_failure)?;
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// pairings
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct PairingRecord {
    index: usize,
    pairs: Vec<(i64, i64)>,
}

/// JSON-lines dump of the pairing combinatorics at order `n`: by default the
/// linked endpoint-covering pairings the energy engine sums over, with
/// `--partitions` every pair partition of `{1, …, n}`.
pub fn cmd_pairings(ctx: &Ctx, n: usize, partitions: bool) -> i32 {
    run_command(ctx, "pairings", |_ctx, em| {
        let list = em.stage("enumerate", || {
            if partitions {
                enumerate_pair_partitions(&carrier_n(n))
            } else {
                linked_covering_pairings(n)
            }
        });
        let mut lines = String::new();
        for (index, p) in list.iter().enumerate() {
            let record = PairingRecord { index, pairs: p.pairs().to_vec() };
            let line = serde_json::to_string(&record)
                .map_err(|e| Failure::Config(format!("serialization failure: {e}")))?;
            println!("{line}");
            lines.push_str(&line);
            lines.push('\n');
        }
        println!(
            "{} {} of {{1, …, {n}}}",
            list.len(),
            if partitions { "pair partitions" } else { "linked endpoint-covering pairings" }
        );
        em.emit("pairings.jsonl", lines.as_bytes()).map_err(io_failure)?;
        em.check("record-count", true, format!("{} records", list.len()));
        Ok(())
    })
}
