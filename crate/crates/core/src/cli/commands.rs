use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use super::args::{BallotArgs, FiguresArgs, Format, ModeChoice, ModelArgs, PredictArgs, RegimeChoice, SimulateArgs};
use super::output::{
    io_error, manifest_path, num, opt_num, write_table, write_table_file, RunManifest, BALLOT_HEADER,
    FIG1A_HEADER, FIG1B_HEADER, FIG2_HEADER, PREDICT_HEADER, SAMPLES_HEADER,
};
use crate::ballot::{cell_seed, smirnov_cell};
use crate::error::{Error, Result};
use crate::hypercube::ModelParams;
use crate::numerics::{predict, regime_constants, solve_first_moment, FptPrediction, Regime, SolverConfig};
use crate::simulator::{reference_time, run_ensemble, CensoringReason, SimConfig, SimMode};

fn model_params(m: &ModelArgs) -> Result<ModelParams> {
    match (m.rho, m.lambda1) {
        (Some(rho), _) => ModelParams::from_rho(m.b, m.d, rho),
        (None, Some(l1)) => ModelParams::new(m.b, m.d, l1, m.lambda2.unwrap_or(1.0)),
        (None, None) => Err(Error::Config("one of --rho or --lambda1 is required".into())),
    }
}

fn parse_range<'a>(spec: &'a str, flag: &str) -> Result<Vec<&'a str>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() < 2 || parts.iter().any(|p| p.trim().is_empty()) {
        return Err(Error::Config(format!("--{flag} expects LO:HI, got {spec:?}")));
    }
    Ok(parts)
}

fn parse_num<T: std::str::FromStr>(s: &str, flag: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Config(format!("--{flag}: cannot parse {s:?}")))
}

fn m_values(args: &PredictArgs) -> Result<Vec<usize>> {
    match (&args.m, &args.m_range) {
        (Some(m), _) => Ok(vec![*m]),
        (None, Some(spec)) => {
            let parts = parse_range(spec, "m-range")?;
            if parts.len() != 2 {
                return Err(Error::Config(format!("--m-range expects LO:HI, got {spec:?}")));
            }
            let (lo, hi): (usize, usize) = (parse_num(parts[0], "m-range")?, parse_num(parts[1], "m-range")?);
            if lo > hi {
                return Err(Error::Config(format!("--m-range is empty: {spec:?}")));
            }
            Ok((lo..=hi).collect())
        }
        (None, None) => Err(Error::Config("one of --m or --m-range is required".into())),
    }
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

fn parameter_sets(args: &PredictArgs) -> Result<Vec<ModelParams>> {
    let Some(spec) = &args.rho_range else {
        return Ok(vec![model_params(&args.model)?]);
    };
    let parts = parse_range(spec, "rho-range")?;
    let count = match parts.get(2) {
        Some(c) => parse_num(c, "rho-range")?,
        None => 31,
    };
    if parts.len() > 3 || count < 1 {
        return Err(Error::Config(format!("--rho-range expects LO:HI[:COUNT], got {spec:?}")));
    }
    let (lo, hi): (f64, f64) = (parse_num(parts[0], "rho-range")?, parse_num(parts[1], "rho-range")?);
    linspace(lo, hi, count).into_iter().map(|rho| ModelParams::from_rho(args.model.b, args.model.d, rho)).collect()
}

fn resolve_regime(choice: RegimeChoice, p: &ModelParams) -> Result<Regime> {
    Ok(match choice {
        RegimeChoice::Slow => Regime::SlowConstantRho,
        RegimeChoice::Fast => Regime::FastConstantRho,
        RegimeChoice::Ultraslow => Regime::UltraSlow,
        RegimeChoice::Auto if p.log_rho() < 1.0 => Regime::SlowConstantRho,
        RegimeChoice::Auto if p.log_rho() > 1.0 => Regime::FastConstantRho,
        RegimeChoice::Auto => {
            return Err(Error::Regime("rho = e is critical; choose --regime explicitly".into()));
        }
    })
}

struct PredictRow {
    params: ModelParams,
    prediction: FptPrediction,
    time_scale: f64,
}

impl PredictRow {
    fn term(&self, label: &str) -> Option<f64> {
        self.prediction.term(label).map(|t| t * self.time_scale)
    }

    fn warnings(&self) -> Vec<String> {
        self.prediction.warnings.iter().map(|w| w.code()).collect()
    }

    fn cells(&self) -> Vec<String> {
        let p = &self.prediction;
        vec![
            self.params.b.to_string(),
            self.params.d.to_string(),
            p.m.to_string(),
            num(self.params.rho()),
            p.regime.to_string(),
            opt_num(p.t_first_moment.map(|t| t * self.time_scale)),
            num(p.t_predicted * self.time_scale),
            opt_num(self.term("leading")),
            opt_num(self.term("m_term")),
            opt_num(self.term("correction")),
            self.warnings().join(";"),
        ]
    }

    fn json(&self) -> Value {
        let p = &self.prediction;
        json!({
            "b": self.params.b,
            "d": self.params.d,
            "m": p.m,
            "rho": self.params.rho(),
            "regime": p.regime.as_str(),
            "t_root": p.t_first_moment.map(|t| t * self.time_scale),
            "t_predicted": p.t_predicted * self.time_scale,
            "term_leading": self.term("leading"),
            "term_m": self.term("m_term"),
            "term_correction": self.term("correction"),
            "warnings": self.warnings(),
        })
    }
}

pub fn predict_cmd(args: &PredictArgs, started: String) -> Result<()> {
    let cfg = SolverConfig::default();
    let ms = m_values(args)?;
    let mut rows = Vec::new();
    for params in parameter_sets(args)? {
        let regime = resolve_regime(args.regime, &params)?;
        let rescaled = params.rescaled();
        let time_scale = if args.raw_time { 1.0 / params.lambda2 } else { 1.0 };
        for &m in &ms {
            if m > params.d {
                return Err(Error::Config(format!("m = {m} exceeds d = {}", params.d)));
            }
            let prediction = predict(&rescaled, m, regime, &cfg)?;
            rows.push(PredictRow { params, prediction, time_scale });
        }
    }
    let mut manifest = RunManifest::new("predict", args, started)?;
    let mut warnings: Vec<String> = rows.iter().flat_map(|r| r.warnings()).collect();
    warnings.sort();
    warnings.dedup();
    manifest.hypotheses_warnings = warnings;
    let manifest = manifest.finish();

    match args.format {
        Format::Csv => {
            let cells: Vec<Vec<String>> = rows.iter().map(PredictRow::cells).collect();
            match &args.out {
                Some(path) => {
                    write_table_file(path, &PREDICT_HEADER, &cells)?;
                    manifest.write(&manifest_path(path))?;
                }
                None => write_table(std::io::stdout().lock(), &PREDICT_HEADER, &cells)?,
            }
        }
        Format::Json => {
            let doc = json!({
                "manifest": manifest,
                "records": rows.iter().map(PredictRow::json).collect::<Vec<_>>(),
            });
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))? + "\n";
            match &args.out {
                Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e))?,
                None => std::io::stdout().lock().write_all(text.as_bytes())?,
            }
        }
    }
    Ok(())
}

pub fn simulate_cmd(args: &SimulateArgs, started: String) -> Result<()> {
    let params = model_params(&args.model)?;
    if !(args.t_max_mult > 0.0 && args.t_max_mult.is_finite()) {
        return Err(Error::Config(format!("--t-max-mult = {} must be > 0", args.t_max_mult)));
    }
    let (mut cfg, reference_distance) = if args.cover {
        (SimConfig::cover(params)?, params.d)
    } else {
        let mut cfg = SimConfig::new(params, args.m)?;
        if args.mode == ModeChoice::Full {
            cfg = cfg.with_mode(SimMode::FullGenotype);
        }
        (cfg, args.m)
    };
    cfg = cfg
        .with_t_max(args.t_max_mult * reference_time(&params, reference_distance))
        .with_population_cap(args.pop_cap)
        .with_seed(args.seed)
        .with_replicas(args.replicas);
    cfg.validate()?;
    let stats = run_ensemble(&cfg)?;

    let time_scale = if args.raw_time { 1.0 } else { params.lambda2 };
    let rows: Vec<Vec<String>> = stats
        .samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            vec![
                i.to_string(),
                opt_num(s.hit_time.map(|t| t * time_scale)),
                s.censoring.as_str().to_string(),
                s.events_processed.to_string(),
                s.peak_population.to_string(),
            ]
        })
        .collect();
    let count = |r: CensoringReason| stats.samples.iter().filter(|s| s.censoring == r).count();
    let scaled = stats.quantiles.map(|q| {
        json!({
            "q10": q.q10 * time_scale,
            "q25": q.q25 * time_scale,
            "median": q.median * time_scale,
            "q75": q.q75 * time_scale,
            "q90": q.q90 * time_scale,
        })
    });

    let mut manifest = RunManifest::new("simulate", args, started)?.with_rng(args.seed);
    if stats.censored_count > 0 {
        manifest.hypotheses_warnings.push(format!("censored_replicas({})", stats.censored_count));
    }
    if stats.median().is_none() {
        manifest.hypotheses_warnings.push("median_undefined_half_or_more_censored".into());
    }
    let manifest = manifest.finish();

    std::fs::create_dir_all(&args.out).map_err(|e| io_error(&args.out, e))?;
    let samples_path = args.out.join("samples.csv");
    write_table_file(&samples_path, &SAMPLES_HEADER, &rows)?;
    let doc = json!({
        "manifest": manifest,
        "observable": if args.cover { "cover_time" } else { "first_passage" },
        "time_units": if args.raw_time { "raw" } else { "rescaled" },
        "t_max": cfg.t_max * time_scale,
        "replicas": stats.samples.len(),
        "censored_count": stats.censored_count,
        "censored_time_horizon": count(CensoringReason::TimeHorizon),
        "censored_population_cap": count(CensoringReason::PopulationCap),
        "quantiles": scaled,
    });
    let stats_path = args.out.join("stats.json");
    let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Io(e.to_string()))? + "\n";
    std::fs::write(&stats_path, text).map_err(|e| io_error(&stats_path, e))?;

    let median = stats.median().map(|m| num(m * time_scale)).unwrap_or_else(|| "NA".into());
    println!(
        "replicas={} censored={} median={} samples={} stats={}",
        stats.samples.len(),
        stats.censored_count,
        median,
        samples_path.display(),
        stats_path.display()
    );
    Ok(())
}

pub fn ballot_cmd(args: &BallotArgs, started: String) -> Result<()> {
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for (li, &lambda) in args.lambda_grid.iter().enumerate() {
        for (ni, &n) in args.n_grid.iter().enumerate() {
            if !(lambda >= 1.0 && lambda * lambda <= n as f64) {
                let note = "skipped_lambda_outside_1_sqrt_n".to_string();
                warnings.push(format!("{note}(lambda={lambda},n={n})"));
                rows.push(vec![num(lambda), n.to_string(), String::new(), String::new(), String::new(), String::new(), note]);
                continue;
            }
            let seed = cell_seed(args.seed, li * args.n_grid.len() + ni);
            let c = smirnov_cell(lambda, n, args.replicas, seed, args.exact_max_n)?;
            rows.push(vec![
                num(lambda),
                n.to_string(),
                num(c.p_hat),
                num(c.std_err),
                num(c.normalized),
                opt_num(c.exact),
                String::new(),
            ]);
        }
    }
    let mut manifest = RunManifest::new("ballot", args, started)?.with_rng(args.seed);
    manifest.hypotheses_warnings = warnings;
    let manifest = manifest.finish();
    match &args.out {
        Some(path) => {
            write_table_file(path, &BALLOT_HEADER, &rows)?;
            manifest.write(&manifest_path(path))?;
        }
        None => write_table(std::io::stdout().lock(), &BALLOT_HEADER, &rows)?,
    }
    Ok(())
}

/// rho grid of fig1a.csv.
pub const FIG1A_RHO: (f64, f64, usize) = (1.035, 2.5, 294);
/// Parameters of fig1b.csv: `(b, d, rho, max m)`.
pub const FIG1B: (u32, usize, f64, usize) = (4, 10_000, 2.0, 500);
/// rho grid of fig2.csv.
pub const FIG2_RHO: (f64, f64, usize) = (2.0, 5.0, 61);

pub fn figures_cmd(args: &FiguresArgs, started: String) -> Result<()> {
    let out: &Path = &args.out;
    std::fs::create_dir_all(out).map_err(|e| io_error(out, e))?;

    let (lo, hi, n) = FIG1A_RHO;
    let fig1a = linspace(lo, hi, n)
        .into_iter()
        .map(|rho| {
            let c = regime_constants(2, rho)?;
            Ok(vec![num(rho), num(c.x0), num(c.r)])
        })
        .collect::<Result<Vec<_>>>()?;
    write_table_file(&out.join("fig1a.csv"), &FIG1A_HEADER, &fig1a)?;

    let (b, d, rho, m_max) = FIG1B;
    let p = ModelParams::from_rho(b, d, rho)?;
    let c = regime_constants(b, rho)?;
    let fig1b = (0..=m_max)
        .map(|m| {
            let root = solve_first_moment(&p, m)?;
            Ok(vec![m.to_string(), num(root), num(c.x0 * d as f64 + c.r * m as f64)])
        })
        .collect::<Result<Vec<_>>>()?;
    write_table_file(&out.join("fig1b.csv"), &FIG1B_HEADER, &fig1b)?;

    let (lo, hi, n) = FIG2_RHO;
    let fig2 = linspace(lo, hi, n)
        .into_iter()
        .map(|rho| {
            let p = ModelParams::from_rho(2, args.fig2_d, rho)?;
            Ok(vec![num(rho), num(solve_first_moment(&p, 1)?)])
        })
        .collect::<Result<Vec<_>>>()?;
    write_table_file(&out.join("fig2.csv"), &FIG2_HEADER, &fig2)?;

    let mut manifest = RunManifest::new("figures", args, started)?;
    manifest.hypotheses_warnings.push(format!("fig2_d_free_choice(d={},m=1,b=2)", args.fig2_d));
    manifest.finish().write(&out.join("manifest.json"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_endpoints() {
        let v = linspace(1.0, 2.0, 5);
        assert_eq!(v, vec![1.0, 1.25, 1.5, 1.75, 2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
