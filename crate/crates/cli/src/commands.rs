//! Subcommand implementations.

use crate::output::{self, Cell, Header};
use crate::{Cli, Command, EntropyArgs, EprGapArgs, Failure, Global, LadderArgs, OverlapArgs, VerifyArgs};
use entropic_core::discretize::{self, EntropyKind, LadderConfig, Quadrature};
use entropic_core::entropy::{self, Base};
use entropic_core::io::{self, State};
use entropic_core::qstate::{CqState, GridWaveFunction};
use entropic_core::verify::{self, CheckReport, Relation};
use entropic_core::{gaussian, minmax, overlap, par};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::Path;

/// Fock levels are kept until the discarded Schmidt weight is below this.
const FOCK_EPS: f64 = 1e-13;
/// Built-in grids span this many standard deviations on either side.
const GRID_HALF_WIDTH_SD: f64 = 20.0;
const MAX_LADDER_STEPS: usize = 30;

type Outcome = Result<(), Failure>;

pub fn execute(cli: &Cli) -> Outcome {
    let g = &cli.global;
    if !(g.tol > 0.0 && g.tol <= 1e-3) {
        return Err(Failure::Invalid(format!("--tol {} outside (0, 1e-3]", g.tol)));
    }
    match &cli.command {
        Command::Overlap(a) => overlap_cmd(g, a),
        Command::EprGap(a) => epr_gap_cmd(g, a),
        Command::Ladder(a) => ladder_cmd(g, a),
        Command::Entropy(a) => entropy_cmd(g, a),
        Command::Verify(a) => verify_cmd(g, a),
    }
}

/// Subcommand arguments merged with the global options, for header echoes.
fn config(g: &Global, args: &impl Serialize) -> Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    let globals = serde_json::to_value(g).expect("arguments serialize");
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, globals) {
        dst.extend(src);
    }
    v
}

fn write(path: Option<&Path>, contents: &str) -> Outcome {
    output::emit(path, contents).map_err(|e| {
        let target = path.map_or("standard output".into(), |p| p.display().to_string());
        Failure::Output(format!("{target}: {e}"))
    })
}

fn positive(name: &str, v: f64) -> Outcome {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Failure::Invalid(format!("{name} = {v} must be positive and finite")))
    }
}

fn overlap_cmd(g: &Global, a: &OverlapArgs) -> Outcome {
    let pairs: Vec<(f64, f64)> = match (a.delta_q, a.delta_p, a.sweep) {
        (Some(dq), Some(dp), None) => {
            positive("--delta-q", dq)?;
            positive("--delta-p", dp)?;
            vec![(dq, dp)]
        }
        (None, None, Some(s)) => s.points().into_iter().map(|d| (d, d)).collect(),
        _ => {
            return Err(Failure::Invalid(
                "give either --delta-q and --delta-p, or --sweep".into(),
            ))
        }
    };
    let results = par::map_indexed(pairs.len(), |i| {
        overlap::prolate_overlap(pairs[i].0, pairs[i].1, overlap::START_ORDER)
    });
    let mut rows = Vec::with_capacity(pairs.len());
    for r in results {
        let r = r?;
        rows.push(vec![
            Cell::from(r.delta_q),
            r.delta_p.into(),
            (r.delta_q * r.delta_p).sqrt().into(),
            r.c.into(),
            g.base.from_nats(-r.c.ln()).into(),
        ]);
    }
    let mut header = Header::new("overlap", &config(g, a), g.base);
    header.note("neg_log_c", "-log(c) in the output base");
    let body = output::csv(&header, &["delta_q", "delta_p", "delta", "c", "neg_log_c"], &rows);
    write(a.csv.as_deref(), &body)
}

fn epr_gap_cmd(g: &Global, a: &EprGapArgs) -> Outcome {
    if !(a.r_min >= 0.0 && a.r_max >= a.r_min && a.r_max.is_finite()) || a.n == 0 {
        return Err(Failure::Invalid(format!(
            "need 0 ≤ r-min ≤ r-max and n ≥ 1, got [{}, {}], n = {}",
            a.r_min, a.r_max, a.n
        )));
    }
    let rows: Vec<Vec<Cell>> = gaussian::epr_gap_curve(a.r_min, a.r_max, a.n)?
        .into_iter()
        .map(|row| {
            let gap = g.base.from_nats(row.gap_nats);
            vec![row.r.into(), row.nu.into(), gap.into(), gap.ln().into(), row.mean_energy.into()]
        })
        .collect();
    let mut header = Header::new("epr-gap", &config(g, a), g.base);
    header.note("gap", "f(nu) - log(2 pi), in the output base");
    header.note("log_gap", "natural logarithm of the gap column");
    header.note("mean_energy", "1 + 2 sinh(r/2)^2");
    let body = output::csv(&header, &["r", "nu", "gap", "log_gap", "mean_energy"], &rows);
    write(a.csv.as_deref(), &body)
}

fn ladder_state(a: &LadderArgs) -> Result<GridWaveFunction, Failure> {
    if let Some(path) = &a.state {
        let loaded = io::load_state(path)?;
        for w in &loaded.warnings {
            eprintln!("warning: {w}");
        }
        return match loaded.state {
            State::Wave(wf) => Ok(wf),
            other => Err(Failure::Invalid(format!(
                "{} holds a {}, expected a Wavefunction",
                path.display(),
                other.type_tag()
            ))),
        };
    }
    if a.grid_n < 2 {
        return Err(Failure::Invalid(format!("--grid-n {} must be at least 2", a.grid_n)));
    }
    // standard deviations of the position and momentum quadratures
    let (sd_q, sd_p) = match (a.gaussian, a.epr) {
        (Some(sigma), None) => {
            positive("--gaussian", sigma)?;
            (sigma, 0.5 / sigma)
        }
        (None, Some(nu)) => {
            if !(nu >= 1.0 && nu.is_finite()) {
                return Err(Failure::Invalid(format!("--epr {nu} must be at least 1")));
            }
            ((0.5 * nu).sqrt(), (0.5 * nu).sqrt())
        }
        _ => return Err(Failure::Invalid("give one of --state, --gaussian or --epr".into())),
    };
    let n = a.grid_n;
    let dq = match a.quadrature {
        Quadrature::Position => 2.0 * GRID_HALF_WIDTH_SD * sd_q / n as f64,
        // the momentum grid has spacing 2π/(n·dq) and must span ±20 sd_p
        Quadrature::Momentum => std::f64::consts::PI / (GRID_HALF_WIDTH_SD * sd_p),
    };
    let q0 = discretize::symmetric_grid_start(n, dq);
    Ok(match (a.gaussian, a.epr) {
        (Some(sigma), _) => GridWaveFunction::gaussian(q0, dq, n, 0.0, sigma)?,
        (_, Some(nu)) => gaussian::epr_wavefunction(nu, q0, dq, n, gaussian::fock_cutoff(nu, FOCK_EPS)?)?,
        _ => unreachable!("checked above"),
    })
}

fn ladder_cmd(g: &Global, a: &LadderArgs) -> Outcome {
    positive("--alpha0", a.alpha0)?;
    if a.n_max > MAX_LADDER_STEPS {
        return Err(Failure::Invalid(format!("--n-max {} exceeds {MAX_LADDER_STEPS}", a.n_max)));
    }
    let wf = ladder_state(a)?;
    let cfg = LadderConfig {
        alpha0: a.alpha0,
        n_max: a.n_max,
        tol: g.tol,
    };
    let table = discretize::convergence_ladder(&wf, a.quadrature, a.entropy, cfg)?;

    let mut header = Header::new("ladder", &config(g, a), g.base);
    header.note("quadrature", format!("{:?}", a.quadrature).to_lowercase());
    header.note("memory_dim", wf.memory_dim());
    if let Some(x) = table.extrapolated {
        header.note("extrapolated", output::num(g.base.from_nats(x)));
    }
    header.note("monotone", table.monotone);
    if a.entropy == EntropyKind::Max {
        let grid = match a.quadrature {
            Quadrature::Position => wf.clone(),
            Quadrature::Momentum => discretize::momentum_transform(&wf)?.wavefunction,
        };
        let m = discretize::second_moment_finite(&grid.density(), grid.q0, grid.dq);
        let flag = if m.grid_truncated { " (grid-truncated)" } else { "" };
        header.note("second_moment", format!("{}{flag}", output::num(m.value)));
    }
    let kind = a.entropy.to_string();
    let base = g.base.to_string();
    let rows: Vec<Vec<Cell>> = table
        .rows
        .iter()
        .map(|r| {
            vec![
                r.alpha.into(),
                g.base.from_nats(r.regularized).into(),
                kind.as_str().into(),
                base.as_str().into(),
            ]
        })
        .collect();
    let body = output::csv(&header, &["alpha", "H_reg", "entropy_kind", "base"], &rows);
    write(a.csv.as_deref(), &body)
}

fn load_cq(path: &Path) -> Result<CqState, Failure> {
    let loaded = io::load_state(path)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    match loaded.state {
        State::Cq(cq) => Ok(cq),
        other => Err(Failure::Invalid(format!(
            "{} holds a {}, expected a CQState",
            path.display(),
            other.type_tag()
        ))),
    }
}

fn entropy_cmd(g: &Global, a: &EntropyArgs) -> Outcome {
    let cq = load_cq(&a.cq)?;
    let (nats, diag) = match a.measure {
        EntropyKind::Vn => (entropy::cond_vn_cq(&cq).in_nats(), None),
        EntropyKind::Min => {
            let res = minmax::guessing_probability(&cq, g.tol)?;
            if !(res.converged && res.gap <= g.tol) {
                return Err(Failure::Solver(format!(
                    "guessing probability not certified: gap {:e} after {} iterations",
                    res.gap, res.iterations
                )));
            }
            (-res.value.ln(), Some(res))
        }
        EntropyKind::Max => {
            let res = minmax::decoupling_fidelity_sdp(&cq, g.tol)?;
            (res.value.ln(), Some(res))
        }
    };
    let solver = diag.as_ref().map(minmax::SolverDiagnostics::from);
    let body = json!({
        "measure": a.measure,
        // −ln 1 is −0.0; report it as 0
        "value": g.base.from_nats(nats) + 0.0,
        "gap": solver.as_ref().map_or(0.0, |s| s.gap),
        "base": g.base,
        "iterations": solver.as_ref().map_or(0, |s| s.iterations),
        "sdp": solver,
    });
    let header = Header::new("entropy", &config(g, a), g.base);
    write(a.json.as_deref(), &output::json_document(&header, body))
}

fn relations(name: &str) -> Result<Vec<Relation>, Failure> {
    if name == "all" {
        return Ok(vec![
            Relation::MinMax,
            Relation::Vn,
            Relation::FrankLieb,
            Relation::Dilation,
            Relation::Lemmas,
        ]);
    }
    Ok(vec![name.parse::<Relation>()?])
}

fn verify_cmd(g: &Global, a: &VerifyArgs) -> Outcome {
    let rels = relations(&a.relation)?;
    let needs = if rels.iter().any(|r| matches!(r, Relation::MinMax | Relation::Vn)) {
        3
    } else {
        2
    };
    if a.dims.len() < needs || a.dims.len() > 3 {
        return Err(Failure::Invalid(format!(
            "--dims needs {needs} comma-separated dimensions for {}, got {:?}",
            a.relation, a.dims
        )));
    }
    if a.trials == 0 {
        return Err(Failure::Invalid("--trials must be positive".into()));
    }
    let mut dims = [1usize; 3];
    dims[..a.dims.len()].copy_from_slice(&a.dims);

    let mut reports: Vec<CheckReport> = Vec::new();
    for rel in &rels {
        reports.extend(verify::run_relation(*rel, dims, a.trials, a.seed)?);
    }
    let mut body = json!({ "reports": reports });
    if rels.iter().any(|r| matches!(r, Relation::FrankLieb | Relation::Dilation)) {
        let (measure_first, measure_second) = verify::gedankenexperiment()?;
        body["gedankenexperiment"] = json!({
            "measure_first_qubit": measure_first,
            "measure_second_qubit": measure_second,
        });
    }
    for r in &reports {
        println!(
            "{:<24} instances {:>4}  violations {:>3}  flagged {:>3}  min slack {}",
            r.relation,
            r.instances,
            r.violations,
            r.flagged,
            output::num(r.min_slack)
        );
    }
    let header = Header::new("verify", &config(g, a), Base::Bits);
    if let Some(path) = &a.json {
        write(Some(path), &output::json_document(&header, body))?;
    }
    let flagged: usize = reports.iter().map(|r| r.flagged).sum();
    if flagged > 0 {
        return Err(Failure::Solver(format!(
            "{flagged} instance(s) skipped because the solver did not converge"
        )));
    }
    Ok(())
}
