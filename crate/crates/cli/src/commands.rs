use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use plap_core::driver::{
    q_to_p_study, run_algorithm1, run_algorithm2, Backend, ConvergenceStudy, Reference,
    ReferenceSource,
};
use plap_core::oracle1d::{lambda_1d, Interval};
use plap_core::radial::kp;
use plap_core::{
    BallDomain, EigenpairEstimate, Field, ProblemParams, RadialOptions, Sampled, SquareMesh,
};
use rayon::prelude::*;

use crate::args::{
    Algorithm, BallArgs, Cli, Command, DomainArgs, Exponents, FemArgs, Format, GeometryArg,
    IntervalArgs, RadialArgs, SquareArgs, StudyArgs, SweepArgs,
};
use crate::error::CliError;
use crate::record::{fmt_num, write_csv, write_json_lines, Geometry, RunRecord};

/// Square meshes with fewer cells per side get a warning in the record.
pub const COARSE_MESH: usize = 8;

/// Sweep values of p are rounded to this many decimals.
const SWEEP_DECIMALS: i32 = 12;

pub enum Report {
    Records(Vec<RunRecord>),
    Study(ConvergenceStudy),
}

/// Runs the command and writes its report to `--out` or stdout. A sweep
/// with failed rows still writes every row before returning the error.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    let (report, deferred) = execute(cli)?;
    match &cli.output.out {
        Some(path) => write_report(
            BufWriter::new(File::create(path)?),
            &report,
            cli.output.format,
        )?,
        None => write_report(std::io::stdout().lock(), &report, cli.output.format)?,
    }
    deferred.map_or(Ok(()), Err)
}

pub fn execute(cli: &Cli) -> Result<(Report, Option<CliError>), CliError> {
    let timing = !cli.output.no_timing;
    match &cli.command {
        Command::Ball(a) => Ok((Report::Records(vec![cmd_ball(a, timing)?]), None)),
        Command::Interval(a) => Ok((Report::Records(vec![cmd_interval(a, timing)?]), None)),
        Command::Square(a) => Ok((Report::Records(vec![cmd_square(a, timing)?]), None)),
        Command::Sweep(a) => {
            let records = cmd_sweep(a, timing)?;
            let failed = records.iter().filter(|r| !r.converged).count();
            let deferred = (failed > 0).then_some(CliError::RowsFailed {
                failed,
                total: records.len(),
            });
            Ok((Report::Records(records), deferred))
        }
        Command::Study(a) => Ok((Report::Study(cmd_study(a)?), None)),
    }
}

pub fn write_report<W: Write>(mut out: W, report: &Report, format: Format) -> Result<(), CliError> {
    match (report, format) {
        (Report::Records(r), Format::Csv) => write_csv(&mut out, r)?,
        (Report::Records(r), Format::Json) => write_json_lines(&mut out, r)?,
        (Report::Study(s), Format::Csv) => write_study_csv(&mut out, s)?,
        (Report::Study(s), Format::Json) => writeln!(
            out,
            "{}",
            serde_json::to_string(s).map_err(|e| CliError::Parse(e.to_string()))?
        )?,
    }
    out.flush()?;
    Ok(())
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    let secs = if timing {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    (out, secs)
}

fn radial_params(exps: &Exponents, mu: Option<f64>) -> Result<ProblemParams, CliError> {
    let mut params = ProblemParams::new(exps.p)
        .with_q(exps.q())
        .with_outer_tol(exps.tol)
        .with_max_outer_iters(exps.max_iters);
    if let Some(mu) = mu {
        params = params.with_mu(mu);
    }
    Ok(params.validate()?)
}

fn square_params(
    exps: &Exponents,
    fem: &FemArgs,
    experimental: bool,
) -> Result<ProblemParams, CliError> {
    let params = ProblemParams::new(exps.p)
        .with_q(exps.q())
        .with_outer_tol(exps.tol)
        .with_max_outer_iters(exps.max_iters)
        .with_epsilon(fem.eps)
        .with_inner_rel_tol(fem.newton_tol)
        .with_max_newton_iters(fem.max_newton_iters)
        .experimental(experimental);
    Ok(params.validate()?)
}

fn radial_run(
    geometry: Geometry,
    dom: &BallDomain,
    params: &ProblemParams,
    grid: usize,
    algorithm: Algorithm,
    timing: bool,
) -> (Result<EigenpairEstimate, plap_core::Error>, RunRecord) {
    let opts = RadialOptions::with_points(grid);
    let (res, seconds) = timed(timing, || match algorithm {
        Algorithm::One => run_algorithm1(dom, params, &opts),
        Algorithm::Two => run_algorithm2(&Backend::Radial { dom: *dom, opts }, params),
    });
    let mu = match algorithm {
        Algorithm::One => Some(params.mu.unwrap_or_else(|| kp(dom, params.p))),
        Algorithm::Two => None,
    };
    let record = RunRecord {
        geometry,
        dim: dom.dim(),
        p: params.p,
        q: params.q,
        mu,
        eps: None,
        mesh: grid,
        mu_q: None,
        lambda_upper: None,
        iters: 0,
        seconds,
        converged: false,
        lambda_exact: None,
        rel_error: None,
        warning: None,
        error: None,
    };
    (res, record)
}

fn fill(mut record: RunRecord, res: &Result<EigenpairEstimate, plap_core::Error>) -> RunRecord {
    match res {
        Ok(est) => {
            record.mu_q = Some(est.mu_q);
            record.lambda_upper = Some(est.lambda_upper);
            record.iters = est.iterations();
            record.converged = true;
        }
        Err(e) => {
            if let plap_core::Error::NonConvergence { iterations, .. } = e {
                record.iters = *iterations;
            }
            record.error = Some(e.to_string());
        }
    }
    record
}

fn single_radial(
    geometry: Geometry,
    dom: BallDomain,
    exps: &Exponents,
    radial: &RadialArgs,
    timing: bool,
) -> Result<RunRecord, CliError> {
    if radial.mu.is_some() && radial.algorithm == Algorithm::Two {
        return Err(CliError::Usage("--mu applies to algorithm 1 only".into()));
    }
    let params = radial_params(exps, radial.mu)?;
    let (res, record) = radial_run(
        geometry,
        &dom,
        &params,
        radial.grid,
        radial.algorithm,
        timing,
    );
    let est = res?;
    if let Some(path) = &radial.profile {
        write_radial_profile(path, &est.eigenfunction)?;
    }
    Ok(fill(record, &Ok(est)))
}

pub fn cmd_ball(a: &BallArgs, timing: bool) -> Result<RunRecord, CliError> {
    let dom = BallDomain::new(a.dim, a.radius)?;
    single_radial(Geometry::Ball, dom, &a.exponents, &a.radial, timing)
}

pub fn cmd_interval(a: &IntervalArgs, timing: bool) -> Result<RunRecord, CliError> {
    let dom = BallDomain::interval(a.length)?;
    single_radial(Geometry::Interval, dom, &a.exponents, &a.radial, timing)
}

fn square_run(
    mesh: SquareMesh,
    params: &ProblemParams,
    timing: bool,
) -> (Result<EigenpairEstimate, plap_core::Error>, RunRecord) {
    let (res, seconds) = timed(timing, || run_algorithm2(&Backend::Square { mesh }, params));
    let n = mesh.cells_per_side();
    let warning = (n < COARSE_MESH)
        .then(|| format!("mesh {n} is coarse; discretization error dominates the estimate"));
    let record = RunRecord {
        geometry: Geometry::Square,
        dim: 2,
        p: params.p,
        q: params.q,
        mu: None,
        eps: Some(params.epsilon),
        mesh: n,
        mu_q: None,
        lambda_upper: None,
        iters: 0,
        seconds,
        converged: false,
        lambda_exact: None,
        rel_error: None,
        warning,
        error: None,
    };
    (res, record)
}

pub fn cmd_square(a: &SquareArgs, timing: bool) -> Result<RunRecord, CliError> {
    let mesh = SquareMesh::new(a.fem.mesh)?;
    let params = square_params(&a.exponents, &a.fem, a.experimental)?;
    let (res, record) = square_run(mesh, &params, timing);
    if let Some(w) = &record.warning {
        eprintln!("warning: {w}");
    }
    let est = res?;
    if let Some(path) = &a.dump {
        write_square_dump(path, &est.eigenfunction)?;
    }
    Ok(fill(record, &Ok(est)))
}

/// `from, from + step, ...` up to `to` inclusive.
pub fn p_range(from: f64, to: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite() && step.is_finite() && step > 0.0) || from > to {
        return Err(CliError::Usage("empty p range".into()));
    }
    let n = ((to - from) / step + 1e-9).floor() as usize + 1;
    let scale = 10f64.powi(SWEEP_DECIMALS);
    Ok((0..n)
        .map(|k| ((from + k as f64 * step) * scale).round() / scale)
        .collect())
}

fn radial_domain(
    geometry: GeometryArg,
    d: &DomainArgs,
) -> Result<(Geometry, BallDomain), CliError> {
    Ok(match geometry {
        GeometryArg::Ball => (Geometry::Ball, BallDomain::new(d.dim, d.radius)?),
        GeometryArg::Interval => (Geometry::Interval, BallDomain::interval(d.length)?),
        GeometryArg::Square => unreachable!("square is not radial"),
    })
}

pub fn cmd_sweep(a: &SweepArgs, timing: bool) -> Result<Vec<RunRecord>, CliError> {
    let ps = p_range(a.p_from, a.p_to, a.step)?;
    let exps = |p: f64| Exponents {
        p,
        q: Some(p - a.gap),
        tol: a.tol,
        max_iters: a.max_iters,
    };
    match a.geometry {
        GeometryArg::Square => {
            let mesh = SquareMesh::new(a.domain.fem.mesh)?;
            let params = ps
                .iter()
                .map(|&p| square_params(&exps(p), &a.domain.fem, false))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(params
                .par_iter()
                .map(|params| {
                    let (res, record) = square_run(mesh, params, timing);
                    fill(record, &res)
                })
                .collect())
        }
        geometry => {
            let (tag, dom) = radial_domain(geometry, &a.domain)?;
            let params = ps
                .iter()
                .map(|&p| radial_params(&exps(p), None))
                .collect::<Result<Vec<_>, _>>()?;
            // rejects a bad grid before any row runs
            plap_core::radial::GreenOperator::new(&dom, params[0].p, a.domain.grid)?;
            let interval = (dom.dim() == 1)
                .then(|| Interval::new(-dom.radius(), dom.radius()))
                .transpose()?;
            params
                .par_iter()
                .map(|params| {
                    let (res, record) =
                        radial_run(tag, &dom, params, a.domain.grid, Algorithm::One, timing);
                    let exact = interval
                        .as_ref()
                        .map(|i| lambda_1d(params.p, i))
                        .transpose()?;
                    Ok(fill(record, &res).with_exact(exact))
                })
                .collect()
        }
    }
}

pub fn parse_reference(s: &str) -> Result<Reference, CliError> {
    match s {
        "exact" => Ok(Reference::Exact),
        "auto" => Ok(Reference::Auto),
        other => match other.parse::<f64>() {
            Ok(v) if v.is_finite() && v > 0.0 => Ok(Reference::Value(v)),
            _ => Err(CliError::Usage(format!(
                "--reference must be exact, auto or a positive number, got {other:?}"
            ))),
        },
    }
}

pub fn cmd_study(a: &StudyArgs) -> Result<ConvergenceStudy, CliError> {
    let reference = parse_reference(&a.reference)?;
    let d = &a.domain;
    let backend = match a.geometry {
        GeometryArg::Square => Backend::Square {
            mesh: SquareMesh::new(d.fem.mesh)?,
        },
        geometry => {
            let (_, dom) = radial_domain(geometry, d)?;
            Backend::Radial {
                dom,
                opts: RadialOptions::with_points(d.grid),
            }
        }
    };
    let base = ProblemParams::new(a.p)
        .with_outer_tol(a.tol)
        .with_max_outer_iters(a.max_iters)
        .with_epsilon(d.fem.eps)
        .with_inner_rel_tol(d.fem.newton_tol)
        .with_max_newton_iters(d.fem.max_newton_iters);
    if let Some(&g) = a.gaps.first() {
        base.with_gap(g).validate()?;
    }
    Ok(q_to_p_study(&backend, &base, &a.gaps, reference)?)
}

pub fn write_study_csv<W: Write>(out: W, s: &ConvergenceStudy) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["gap", "q", "mu_q", "lambda_upper", "error", "iters"])?;
    for r in &s.rows {
        w.write_record([
            fmt_num(r.gap),
            fmt_num(s.p - r.gap),
            fmt_num(r.mu_q),
            fmt_num(r.lambda_upper),
            fmt_num(r.error),
            r.iterations.to_string(),
        ])?;
    }
    let mut out = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    let source = match s.reference_source {
        ReferenceSource::Exact => "exact",
        ReferenceSource::SmallGapRun => "small-gap run",
        ReferenceSource::Given => "given",
    };
    writeln!(out, "# reference={} ({source})", fmt_num(s.reference))?;
    if let Some(slope) = s.slope {
        writeln!(out, "# slope={}", fmt_num(slope))?;
    }
    writeln!(out, "# K={}", fmt_num(s.k_estimate))?;
    Ok(())
}

fn write_radial_profile(path: &Path, f: &Field) -> Result<(), CliError> {
    let profile = f.as_radial().expect("radial run");
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["r", "e_p"])?;
    for (i, v) in profile.values().iter().enumerate() {
        w.write_record([fmt_num(profile.r(i)), fmt_num(*v)])?;
    }
    w.flush()?;
    Ok(())
}

fn write_square_dump(path: &Path, f: &Field) -> Result<(), CliError> {
    let g = f.as_square().expect("square run");
    let mesh = g.mesh();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["x", "y", "value"])?;
    for j in 0..mesh.nodes_per_side() {
        for i in 0..mesh.nodes_per_side() {
            let (x, y) = mesh.coords(i, j);
            w.write_record([fmt_num(x), fmt_num(y), fmt_num(g.at(i, j))])?;
        }
    }
    w.flush()?;
    Ok(())
}
