use cifs_core::deform::{analyticity_diagnostic, curve_nodes, AnalyticityVerdict, DimensionCurve};
use cifs_core::group::{build_section5_group, ConvergenceVerdict, GroupPresentation};
use cifs_core::ifs::{box_dimension_estimate, IfsSystem};
use cifs_core::pressure::{
    bowen_dimension_with, pressure_direct, regularity_check, transfer_eigenvalue, BowenOptions, Regularity,
};
use cifs_core::{Complex, DimensionResult, Error, MoebiusMap, Point};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{ExperimentConfig, GroupSpec, Resolved, SCHEMA_VERSION};
use crate::error::{CliError, Context};
use crate::{Command, Output, RunOptions};

/// Largest orbit ball `orbit` will store, and the largest word count
/// `probe-type` will walk.
const ORBIT_LIMIT: f64 = 2e7;
const PROBE_LIMIT: f64 = 1e8;
/// Word budget per σ for the partition-sum checks of `pressure`.
const PSI_CHECK_BUDGET: f64 = 2e5;
/// Relative slack for comparing the spectral value with the direct bracket,
/// which collapses to a point for similarity systems.
const ROUNDING_SLACK: f64 = 1e-13;

type Rows = Vec<Vec<String>>;

fn num(x: f64) -> String {
    format!("{x}")
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses `config_text` and runs `cmd`. Nothing is written to disk.
pub fn execute(cmd: Command, config_text: Option<&str>, opts: &RunOptions) -> Result<Output, CliError> {
    let cfg = config_text.map(ExperimentConfig::parse).transpose()?;
    if let Some(e) = cfg.as_ref().and_then(|c| c.experiment.as_deref()) {
        if e != cmd.name() {
            return Err(config_error(format!("config is for `{e}`, not `{cmd}`")));
        }
    }
    if cfg.is_none() && cmd != Command::Section5 {
        return Err(config_error(format!("`{cmd}` needs --config")));
    }
    let params = cfg.as_ref().map(|c| c.params.clone()).unwrap_or_default().resolve(opts.tolerance, opts.depth)?;
    let body = || dispatch(cmd, cfg.as_ref(), &params);
    let (rows, result) = match opts.threads {
        Some(0) => return Err(config_error("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| config_error(format!("thread pool: {e}")))?
            .install(body)?,
        None => body()?,
    };
    let csv = render_csv(cmd.csv_columns(), &rows)?;
    let summary = json!({
        "tool": "cifs",
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
        "command": cmd.name(),
        "name": cfg.as_ref().and_then(|c| c.name.clone()),
        "params": params,
        "result": result,
        "config": config_text,
    });
    Ok(Output { command: cmd, csv, summary })
}

fn render_csv(header: &[&str], rows: &Rows) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

fn dispatch(cmd: Command, cfg: Option<&ExperimentConfig>, p: &Resolved) -> Result<(Rows, Value), CliError> {
    match cmd {
        Command::Dim => dim(&system(cmd, cfg)?, p),
        Command::Pressure => pressure(&system(cmd, cfg)?, p),
        Command::Curve => curve(cfg, p),
        Command::Orbit => orbit(&group(cmd, cfg)?, p),
        Command::Schottky => schottky(&group(cmd, cfg)?, p),
        Command::Section5 => section5(cfg, p),
        Command::ProbeType => probe(&group(cmd, cfg)?, p),
    }
}

fn system(cmd: Command, cfg: Option<&ExperimentConfig>) -> Result<IfsSystem, CliError> {
    let cfg = cfg.expect("checked by execute");
    if let Some(s) = &cfg.system {
        return s.build().map_err(|e| config_error(format!("invalid [system]: {e}")));
    }
    if let Some(g) = &cfg.group {
        let g = g.build().map_err(|e| config_error(format!("invalid [group]: {e}")))?;
        return IfsSystem::from_schottky(&g).map_err(|e| config_error(format!("invalid [group]: {e}")));
    }
    Err(config_error(format!("`{cmd}` needs a [system] or [group] table")))
}

fn group(cmd: Command, cfg: Option<&ExperimentConfig>) -> Result<GroupPresentation, CliError> {
    match cfg.and_then(|c| c.group.as_ref()) {
        Some(g) => g.build().map_err(|e| config_error(format!("invalid [group]: {e}"))),
        None => Err(config_error(format!("`{cmd}` needs a [group] table"))),
    }
}

fn dimension_json(d: &DimensionResult) -> Value {
    json!({ "value": d.value, "bracket": [d.bracket.0, d.bracket.1], "error": d.error, "method": d.method })
}

fn regularity_name(r: Regularity) -> &'static str {
    match r {
        Regularity::Regular => "regular",
        Regularity::Irregular => "irregular",
        Regularity::FiniteAlphabet => "finite-alphabet",
    }
}

fn theta_json(sys: &IfsSystem) -> Value {
    let theta = sys.theta_number();
    json!({
        "value": if theta.value.is_finite() { json!(theta.value) } else { json!("-inf") },
        "regular": theta.regular,
        "regularity": regularity_name(regularity_check(sys)),
    })
}

fn dim(sys: &IfsSystem, p: &Resolved) -> Result<(Rows, Value), CliError> {
    let results = p
        .sizes
        .par_iter()
        .map(|&size| bowen_dimension_with(sys, &BowenOptions { size, tolerance: p.tolerance }))
        .collect::<cifs_core::Result<Vec<_>>>()
        .context("bowen_dimension")?;
    let rows = p
        .sizes
        .iter()
        .zip(&results)
        .map(|(s, d)| vec![s.to_string(), num(d.value), num(d.bracket.0), num(d.bracket.1), num(d.error)])
        .collect();
    let (vmin, vmax) =
        results.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), d| (a.min(d.value), b.max(d.value)));
    let boxed = match p.sample_depth {
        Some(depth) => {
            let points = sys.limit_set_sample(depth, p.tail_cut).context("limit_set_sample")?;
            let scales: Vec<f64> = p.box_exponents.iter().map(|&k| 2f64.powi(-k)).collect();
            let d = box_dimension_estimate(&points, &scales).context("box_dimension_estimate")?;
            json!({ "value": d.value, "stderr": d.error, "points": points.len(), "depth": depth })
        }
        None => Value::Null,
    };
    let result = json!({
        "dimension": dimension_json(&results[0]),
        "sizes": p.sizes.iter().zip(&results).map(|(s, d)| json!({ "size": s, "value": d.value })).collect::<Vec<_>>(),
        "size_spread": vmax - vmin,
        "theta": theta_json(sys),
        "contraction_level": sys.contraction().ok().map(|c| c.level),
        "osc_overlaps": sys.osc_overlaps(),
        "box": boxed,
    });
    Ok((rows, result))
}

/// Pressure from a result that is `+∞` when the tail diverges.
fn finite_or_inf<T>(r: cifs_core::Result<T>) -> cifs_core::Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::TailDiverges { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn pressure(sys: &IfsSystem, p: &Resolved) -> Result<(Rows, Value), CliError> {
    let steps = p.sigma_steps;
    let grid: Vec<f64> =
        (0..steps).map(|k| p.sigma[0] + (p.sigma[1] - p.sigma[0]) * k as f64 / (steps - 1) as f64).collect();
    let points = grid
        .par_iter()
        .map(|&s| {
            let spectral = finite_or_inf(transfer_eigenvalue(sys, s, p.size))?;
            let direct = finite_or_inf(pressure_direct(sys, s, p.n_max))?;
            Ok((spectral, direct))
        })
        .collect::<cifs_core::Result<Vec<_>>>()
        .context("pressure")?;
    let inf = f64::INFINITY;
    let mut rows = Vec::with_capacity(steps);
    let mut values = Vec::with_capacity(steps);
    let mut bracket_violations = 0usize;
    for (s, (spectral, direct)) in grid.iter().zip(&points) {
        let (v, lo, hi) = spectral.map_or((inf, inf, inf), |e| (e.value, e.bracket.0, e.bracket.1));
        let (dv, dlo, dhi) = direct.map_or((inf, inf, inf), |e| (e.value, e.bracket.0, e.bracket.1));
        let slack = ROUNDING_SLACK * (1.0 + v.abs());
        if v.is_finite() && dv.is_finite() && !(dlo - slack <= v && v <= dhi + slack) {
            bracket_violations += 1;
        }
        values.push(v);
        rows.push(vec![num(*s), num(v), num(lo), num(hi), num(dv), num(dlo), num(dhi)]);
    }
    let finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    let decreasing_violations = finite.windows(2).filter(|w| w[1] >= w[0]).count();
    let checks = psi_checks(sys, &grid)?;
    let result = json!({
        "points": steps,
        "finite_points": finite.len(),
        "strictly_decreasing": decreasing_violations == 0,
        "checks": {
            "pressure_decreasing_violations": decreasing_violations,
            "spectral_outside_direct_bracket": bracket_violations,
            "bracket_slack": ROUNDING_SLACK,
            "log_psi_convexity_violations": checks.convexity,
            "psi_submultiplicativity_violations": checks.submultiplicativity,
            "psi_decreasing_violations": checks.decreasing,
            "psi_lengths": checks.lengths,
        },
        "theta": theta_json(sys),
    });
    Ok((rows, result))
}

struct PsiChecks {
    convexity: usize,
    submultiplicativity: usize,
    decreasing: usize,
    lengths: usize,
}

/// Convexity of `σ ↦ ln ψ_n`, `ψ_{a+b} ≤ ψ_a ψ_b`, and monotonicity of
/// `ψ_N` at the contraction level `N`, on the σ-grid.
fn psi_checks(sys: &IfsSystem, grid: &[f64]) -> Result<PsiChecks, CliError> {
    let symbols = (sys.letters().len() + sys.tails().len()) as f64;
    let lengths = (1..=4).take_while(|&n| symbols.powi(n as i32) <= PSI_CHECK_BUDGET).last().unwrap_or(0);
    let level = sys.contraction().map(|c| c.level).unwrap_or(usize::MAX);
    let top = if symbols.powi(level.min(64) as i32) <= PSI_CHECK_BUDGET { lengths.max(level) } else { lengths };
    let table = grid
        .par_iter()
        .map(|&s| (1..=top).map(|n| sys.psi_n(s, n)).collect::<cifs_core::Result<Vec<f64>>>())
        .collect::<cifs_core::Result<Vec<_>>>()
        .context("psi_n")?;
    let close = |a: f64, b: f64| a <= b + 1e-12 * (1.0 + a.abs().max(b.abs()));
    let mut checks = PsiChecks { convexity: 0, submultiplicativity: 0, decreasing: 0, lengths };
    for n in 1..=lengths {
        let logs: Vec<f64> = table.iter().map(|row| row[n - 1].ln()).collect();
        for w in logs.windows(3) {
            if w.iter().all(|v| v.is_finite()) && !close(2.0 * w[1], w[0] + w[2]) {
                checks.convexity += 1;
            }
        }
    }
    for row in &table {
        for a in 1..=lengths {
            for b in 1..=lengths - a {
                let (lhs, rhs) = (row[a + b - 1], row[a - 1] * row[b - 1]);
                if lhs.is_finite() && !close(lhs, rhs) {
                    checks.submultiplicativity += 1;
                }
            }
        }
    }
    if level <= top {
        for w in table.windows(2) {
            let (x, y) = (w[0][level - 1], w[1][level - 1]);
            if x.is_finite() && y.is_finite() && y >= x {
                checks.decreasing += 1;
            }
        }
    }
    Ok(checks)
}

fn curve(cfg: Option<&ExperimentConfig>, p: &Resolved) -> Result<(Rows, Value), CliError> {
    let spec = cfg.and_then(|c| c.family.as_ref()).ok_or_else(|| config_error("`curve` needs a [family] table"))?;
    let family = spec.build().map_err(|e| config_error(format!("invalid [family]: {e}")))?;
    let nodes = curve_nodes(&family, p.m).map_err(|e| config_error(e.to_string()))?;
    let opts = BowenOptions { size: p.size, tolerance: p.tolerance };
    let samples = nodes
        .par_iter()
        .map(|&t| family.dimension_at(t, &opts))
        .collect::<cifs_core::Result<Vec<_>>>()
        .context("dimension_curve")?;
    let curve = DimensionCurve::from_samples(family.interval(), nodes, samples);
    let report = analyticity_diagnostic(&curve).context("analyticity_diagnostic")?;
    let rows =
        (0..curve.nodes.len()).map(|i| vec![num(curve.nodes[i]), num(curve.values[i]), num(curve.errors[i])]).collect();
    let verdict = match report.verdict {
        AnalyticityVerdict::ConsistentWithAnalytic => "consistent-with-analytic",
        AnalyticityVerdict::Inconclusive => "inconclusive",
    };
    let result = json!({
        "interval": [curve.interval.0, curve.interval.1],
        "m": p.m,
        "coefficients": report.coefficients,
        "floor": report.floor,
        "rho_fit": report.rho_fit,
        "fitted": report.fitted,
        "verdict": verdict,
    });
    Ok((rows, result))
}

/// Number of reduced words of length `≤ max_len` over `k` letters.
fn ball_size(k: usize, max_len: usize) -> f64 {
    let (k, mut total, mut shell) = (k as f64, 1.0, 0.0);
    for len in 1..=max_len {
        shell = if len == 1 { k } else { shell * (k - 1.0) };
        total += shell;
    }
    total
}

fn orbit(g: &GroupPresentation, p: &Resolved) -> Result<(Rows, Value), CliError> {
    let size = ball_size(g.letters().len(), p.max_len);
    if size > ORBIT_LIMIT {
        return Err(config_error(format!(
            "orbit ball of {size:e} elements exceeds the limit {ORBIT_LIMIT:e}; lower max_len"
        )));
    }
    let ball = g.enumerate_orbit(p.max_len).context("enumerate_orbit")?;
    let rows = (0..ball.len().min(p.max_rows))
        .map(|i| {
            let z = ball.point(i);
            vec![ball.word_label(i), num(z.re), num(z.im), num(ball.distances()[i])]
        })
        .collect();
    let delta = match ball.critical_exponent_estimate() {
        Ok(d) => dimension_json(&d),
        Err(e) => json!({ "unavailable": e.to_string() }),
    };
    let result = json!({
        "elements": ball.len(),
        "rows_written": ball.len().min(p.max_rows),
        "max_len": p.max_len,
        "complete_radius": ball.complete_radius(),
        "poincare_partial_sum_t1": ball.poincare_partial_sum(1.0),
        "critical_exponent": delta,
    });
    Ok((rows, result))
}

fn schottky(g: &GroupPresentation, p: &Resolved) -> Result<(Rows, Value), CliError> {
    let sys = IfsSystem::from_schottky(g).map_err(|e| config_error(format!("invalid [group]: {e}")))?;
    let d = bowen_dimension_with(&sys, &BowenOptions { size: p.size, tolerance: p.tolerance })
        .context("bowen_dimension")?;
    let rows = g
        .letters()
        .iter()
        .zip(sys.base_sets())
        .enumerate()
        .map(|(i, (l, arc))| {
            let c = l.target.center();
            vec![
                i.to_string(),
                l.inverse.to_string(),
                num(c.re),
                num(c.im),
                num(l.target.radius()),
                num(arc.lo),
                num(arc.hi),
            ]
        })
        .collect();
    let kind = match g.kind() {
        cifs_core::group::GroupKind::SchottkyFree => "schottky",
        cifs_core::group::GroupKind::Reflection => "reflection",
    };
    let result = json!({
        "kind": kind,
        "letters": g.letters().len(),
        "dimension": dimension_json(&d),
        "osc_overlaps": sys.osc_overlaps(),
    });
    Ok((rows, result))
}

fn classify_name(m: &MoebiusMap) -> String {
    m.classify().map_or_else(|e| format!("error: {e}"), |c| format!("{c:?}").to_lowercase())
}

fn section5(cfg: Option<&ExperimentConfig>, p: &Resolved) -> Result<(Rows, Value), CliError> {
    let from_group = match cfg.and_then(|c| c.group.as_ref()) {
        Some(GroupSpec::Section5 { depth }) => Some(*depth),
        Some(_) => return Err(config_error("`section5` accepts only a [group] of kind \"section5\"")),
        None => None,
    };
    if cfg.is_some_and(|c| c.system.is_some() || c.family.is_some()) {
        return Err(config_error("`section5` accepts only a [group] table"));
    }
    let depth =
        p.depth.or(from_group).ok_or_else(|| config_error("`section5` needs --depth or a depth in the config"))?;
    let s = build_section5_group(depth).context("build_section5_group")?;
    let mut rows = Vec::new();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut classes = Vec::new();
    for (d, g) in s.disks.iter().zip(&s.half_plane_generators) {
        let scaled = d.disk.diameter() * 2f64.powi(d.n as i32);
        lo = lo.min(scaled);
        hi = hi.max(scaled);
        let c = d.disk.center();
        let h = d.half_plane;
        let class = classify_name(g);
        rows.push(vec![
            d.n.to_string(),
            num(c.re),
            num(c.im),
            num(d.disk.radius()),
            num(d.disk.diameter()),
            num(scaled),
            num(h.center().re - h.radius()),
            num(h.center().re + h.radius()),
            class.clone(),
        ]);
        classes.push(class);
    }
    // Disjointness straight from centres and radii, disks and mirrors alike.
    let circles: Vec<_> = s.disks.iter().flat_map(|d| [d.disk, d.mirror]).collect();
    let mut min_ratio = f64::INFINITY;
    for (i, a) in circles.iter().enumerate() {
        for b in &circles[i + 1..] {
            min_ratio = min_ratio.min((a.center() - b.center()).norm() / (a.radius() + b.radius()));
        }
    }
    let eta = MoebiusMap::cayley_to_disk();
    let i = Complex::new(0.0, 1.0);
    let at_inf = match eta.apply_point(Point::Infinity) {
        Point::Finite(w) => w,
        Point::Infinity => Complex::new(f64::INFINITY, f64::INFINITY),
    };
    let at_one = eta.apply(Complex::new(1.0, 0.0)).context("cayley")?;
    let at_zero = eta.apply(Complex::new(0.0, 0.0)).context("cayley")?;
    let cayley_error = (at_inf - i).norm().max((at_one - 1.0).norm()).max((at_zero + i).norm());
    let count = |name: &str| classes.iter().filter(|c| c.as_str() == name).count();
    let result = json!({
        "depth": depth,
        "letters": s.group.letters().len(),
        "diam_scaled_min": lo,
        "diam_scaled_max": hi,
        "within_band_16": lo >= 1.0 / 16.0 && hi <= 16.0,
        "min_center_gap_ratio": min_ratio,
        "pairwise_disjoint": min_ratio >= 1.0 - 1e-9,
        "parabolic": count("parabolic"),
        "hyperbolic": count("hyperbolic"),
        "cayley": {
            "infinity": [at_inf.re, at_inf.im],
            "one": [at_one.re, at_one.im],
            "zero": [at_zero.re, at_zero.im],
            "max_error": cayley_error,
        },
    });
    Ok((rows, result))
}

fn probe(g: &GroupPresentation, p: &Resolved) -> Result<(Rows, Value), CliError> {
    let size = ball_size(g.letters().len(), p.max_len);
    if size > PROBE_LIMIT {
        return Err(config_error(format!(
            "probe walks {size:e} words, above the limit {PROBE_LIMIT:e}; lower max_len"
        )));
    }
    let report = g.convergence_type_probe(p.max_len).context("convergence_type_probe")?;
    let rows = report.rows.iter().map(|r| vec![r.length.to_string(), num(r.shell_sum), num(r.partial_sum)]).collect();
    let verdict = match report.verdict {
        ConvergenceVerdict::AppearsConvergent => "appears-convergent",
        ConvergenceVerdict::AppearsDivergent => "appears-divergent",
        ConvergenceVerdict::Inconclusive => "inconclusive",
    };
    let result = json!({
        "verdict": verdict,
        "max_len": p.max_len,
        "partial_sum": report.rows.last().map(|r| r.partial_sum),
    });
    Ok((rows, result))
}
