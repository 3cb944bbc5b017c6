//! Batch front-end behind the `deltascat` binary.

use std::io;
use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::classifier::classify;
use crate::error::{Error, Result};
use crate::fit::log_grid;
use crate::linalg::KERNEL_TOL;
use crate::operator::PointConfiguration;
use crate::search::case4_search;
use crate::spectral::{expansion_residual_profile, negative_eigenvalues, resolvent_threshold_profile, ProfileRow};
use crate::waveop::decay::{appendix_kernel_bound, log_fourier_decay};
use crate::waveop::lowenergy::BadPart;
use crate::waveop::probe::{boundedness_probe, ProbeOptions};

#[derive(Debug, Parser)]
#[command(name = "deltascat", version, about = "Threshold analysis for planar point interactions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON input: {"alpha": [...], "points": [[x, y], ...], "options": {...}}
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Kernel tolerance
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Low-energy cutoff ε
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Lebesgue exponent
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// log:A:B:N, lin:A:B:N or a comma-separated list
    #[arg(long, global = true)]
    pub grid: Option<String>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Case label, Lp verdict and resonance inventory (JSON)
    Classify,
    /// Non-positive eigenvalues; the grid endpoints bound κ (CSV)
    Spectrum,
    /// Resolvent kernel near zero energy (CSV)
    Resolvent,
    /// Remainder of the leading threshold term of Γ(λ)⁻¹ (CSV)
    Expansion,
    /// Dyadic boundedness probe of the low-energy wave operator (JSON)
    Waveop,
    /// Decay table of the log-weighted Fourier transform, or the appendix kernel (CSV)
    Decay,
    /// Randomized search for a Case4 configuration (JSON)
    #[command(name = "search-case4")]
    SearchCase4,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayKernel {
    #[default]
    Fourier,
    Appendix,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Options {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Resolvent arguments.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<[f64; 2]>,
    /// Dyadic probe depth.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bad_part: Option<BadPart>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<DecayKernel>,
    /// Number of points for `search-case4`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub alpha: Vec<f64>,
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub options: Options,
}

impl RunConfig {
    pub fn configuration(&self) -> Result<PointConfiguration> {
        PointConfiguration::new(self.alpha.clone(), self.points.clone())
    }

    /// Command-line flags override the file options.
    pub fn merged(mut self, cli: &Cli) -> Self {
        let o = &mut self.options;
        o.tol = cli.tol.or(o.tol);
        o.eps = cli.eps.or(o.eps);
        o.p = cli.p.or(o.p);
        o.grid = cli.grid.clone().or(o.grid.take());
        o.seed = cli.seed.or(o.seed);
        self
    }
}

/// Parse `log:A:B:N`, `lin:A:B:N` or `v1,v2,...`.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Input(format!("bad grid spec {spec:?}; use log:A:B:N, lin:A:B:N or a comma list"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let parts: Vec<&str> = spec.split(':').collect();
    let grid = match parts.as_slice() {
        [kind, a, b, n] => {
            let (a, b) = (num(a)?, num(b)?);
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            if n == 0 || !(a.is_finite() && b.is_finite()) {
                return Err(bad());
            }
            match *kind {
                "log" if a > 0.0 && b > 0.0 => log_grid(a, b, n),
                "lin" if n == 1 => vec![a],
                "lin" => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
                _ => return Err(bad()),
            }
        }
        [list] => list.split(',').map(num).collect::<Result<_>>()?,
        _ => return Err(bad()),
    };
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(grid)
}

/// Floats with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with every float written to 17 significant digits.
struct Digits17<'a>(serde_json::ser::PrettyFormatter<'a>);

impl serde_json::ser::Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            w.write_all(fmt_f64(value).as_bytes())
        } else {
            w.write_all(b"null")
        }
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits17(serde_json::ser::PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| Error::Inconsistent(format!("serialization: {e}")))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Inconsistent(e.to_string()))
}

pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Input(format!("malformed JSON: {e}")))
}

/// Error payload written to stderr.
pub fn error_json(e: &Error) -> String {
    #[derive(Serialize)]
    struct Payload<'a> {
        error: &'a str,
        exit_code: i32,
        message: String,
    }
    let kind = match e {
        Error::Domain(_) => "domain",
        Error::Accuracy(_) => "accuracy",
        Error::Precondition(_) => "precondition",
        Error::Input(_) => "input",
        Error::Exceptional { .. } => "exceptional",
        Error::Ladder { .. } => "ladder",
        Error::Fit(_) => "fit",
        Error::Resolution(_) => "resolution",
        Error::Inconsistent(_) => "inconsistent",
    };
    serde_json::to_string(&Payload { error: kind, exit_code: e.exit_code(), message: e.to_string() }).unwrap_or_default()
}

fn csv_table(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::Inconsistent(format!("csv: {e}"));
    w.write_record(header).map_err(io_err)?;
    for r in rows {
        w.write_record(&r).map_err(io_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Inconsistent(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Inconsistent(e.to_string()))
}

fn profile_csv(rows: &[ProfileRow]) -> Result<String> {
    csv_table(
        &["lambda", "value_re", "value_im", "residual", "fitted_order"],
        rows.iter().map(|r| [r.lambda, r.value_re, r.value_im, r.residual, r.fitted_order].map(fmt_f64).to_vec()),
    )
}

fn in_range(name: &str, v: f64, ok: bool) -> Result<f64> {
    if ok && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Input(format!("{name} = {v} is out of range")))
    }
}

/// Output of one command plus a one-line summary for stderr.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub body: String,
    pub summary: String,
}

/// Run a command on an already parsed configuration.
pub fn execute(command: Command, run: &RunConfig) -> Result<Outcome> {
    let o = &run.options;
    let grid = |default: &str| parse_grid(o.grid.as_deref().unwrap_or(default));
    match command {
        Command::Classify => {
            let tol = o.tol.unwrap_or(KERNEL_TOL);
            let report = classify(&run.configuration()?, in_range("tol", tol, tol > 0.0 && tol < 1.0)?)?;
            let summary = format!("{} ({}), borderline = {}", report.case_label, serde_json::to_string(&report.lp_verdict).unwrap_or_default(), report.borderline);
            Ok(Outcome { body: to_json(&report)?, summary })
        }
        Command::Spectrum => {
            let g = grid("log:1e-8:1e8:2")?;
            let (lo, hi) = (g[0], g[g.len() - 1]);
            let tol = o.tol.unwrap_or(1e-10);
            let sp = negative_eigenvalues(&run.configuration()?, (lo, hi), in_range("tol", tol, tol > 0.0)?)?;
            let body = csv_table(
                &["kappa", "energy", "det_residual"],
                sp.records.iter().map(|r| [r.kappa, r.energy, r.det_residual].map(fmt_f64).to_vec()),
            )?;
            let mut summary = format!("{} eigenvalue(s) with κ in [{lo:e}, {hi:e}]", sp.records.len());
            for w in &sp.warnings {
                summary.push_str("; warning: ");
                summary.push_str(w);
            }
            Ok(Outcome { body, summary })
        }
        Command::Resolvent => {
            let c = run.configuration()?;
            let prof = resolvent_threshold_profile(&c, &grid("log:1e-8:1e-3:30")?, o.x.unwrap_or([0.7, 1.9]), o.y.unwrap_or([-2.3, 0.4]))?;
            let summary = match prof.limit {
                Some(l) => format!("{}: λ → 0 limit {} + {}i", prof.case_label, fmt_f64(l.re), fmt_f64(l.im)),
                None => format!("{}: fitted order {}", prof.case_label, fmt_f64(prof.rows[0].fitted_order)),
            };
            Ok(Outcome { body: profile_csv(&prof.rows)?, summary })
        }
        Command::Expansion => {
            let prof = expansion_residual_profile(&run.configuration()?, &grid("log:1e-6:1e-2:20")?)?;
            let summary = format!("{}: fitted order {} with log power {}", prof.case_label, fmt_f64(prof.fitted_order), fmt_f64(prof.fitted_log_power));
            Ok(Outcome { body: profile_csv(&prof.rows)?, summary })
        }
        Command::Waveop => {
            let mut opts = ProbeOptions::default();
            if let Some(e) = o.eps {
                opts.eps = in_range("eps", e, e > 0.0)?;
            }
            if let Some(s) = o.steps {
                opts.steps = in_range("steps", s as f64, (1..=16).contains(&s))? as usize;
            }
            if let Some(b) = o.bad_part {
                opts.bad_part = b;
            }
            let p = o.p.unwrap_or(4.0);
            let report = boundedness_probe(&run.configuration()?, in_range("p", p, p > 1.0)?, opts)?;
            let summary = format!("{} p = {p}: {:?}, max rise {}", report.case_label, report.verdict, fmt_f64(report.max_rise));
            Ok(Outcome { body: to_json(&report)?, summary })
        }
        Command::Decay => {
            let eps = o.eps.unwrap_or(1.0);
            let eps = in_range("eps", eps, eps > 0.0)?;
            match o.kernel.unwrap_or_default() {
                DecayKernel::Fourier => {
                    let t = log_fourier_decay(eps, &grid("log:1:1e4:40")?)?;
                    let body = csv_table(
                        &["radius", "value_re", "value_im", "bound_ratio", "route_difference"],
                        t.rows.iter().map(|r| [r.radius, r.value.re, r.value.im, r.bound_ratio, r.route_difference].map(fmt_f64).to_vec()),
                    )?;
                    let summary = format!("sup ratio {}, trend slope {}", fmt_f64(t.sup_ratio), fmt_f64(t.trend_slope));
                    Ok(Outcome { body, summary })
                }
                DecayKernel::Appendix => {
                    let xs = match &o.grid {
                        Some(g) => parse_grid(g)?,
                        None => std::iter::once(0.0).chain(log_grid(1.0, 1e3, 29)).collect(),
                    };
                    let t = appendix_kernel_bound(eps, &xs, &xs)?;
                    let body = csv_table(
                        &["x", "y", "value", "ratio_b", "ratio_a", "tail"],
                        t.rows.iter().map(|r| [r.x, r.y, r.value, r.ratio_b, r.ratio_a, r.tail].map(fmt_f64).to_vec()),
                    )?;
                    let summary = format!("sup ratio {}, y = 0 slope {}", fmt_f64(t.sup_ratio_b), fmt_f64(t.slope_y0));
                    Ok(Outcome { body, summary })
                }
            }
        }
        Command::SearchCase4 => {
            let n = o.n_points.unwrap_or(4);
            let trials = o.trials.unwrap_or(200);
            let seed = o.seed.unwrap_or(7);
            match case4_search(n, trials, seed) {
                Some(c) => {
                    let found = RunConfig { alpha: c.alpha, points: c.points, options: Options::default() };
                    Ok(Outcome { body: to_json(&found)?, summary: format!("Case4 configuration with {n} points (seed {seed})") })
                }
                None => Err(Error::Fit(format!("no Case4 configuration with {n} points in {trials} trials (seed {seed})"))),
            }
        }
    }
}

/// Read the configuration named on the command line, apply flag overrides and run.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let run = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            from_json::<RunConfig>(&text)?
        }
        None if matches!(cli.command, Command::SearchCase4 | Command::Decay) => RunConfig::default(),
        None => return Err(Error::Input("--config is required".into())),
    };
    execute(cli.command, &run.merged(cli))
}

/// Cap the global rayon pool from `DELTASCAT_THREADS`.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var("DELTASCAT_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| Error::Input(format!("DELTASCAT_THREADS = {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Inconsistent(format!("thread pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("lin:0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!((parse_grid("log:1e-4:1e-2:3").unwrap()[1] - 1e-3).abs() < 1e-18);
        for bad in ["log:0:1:3", "lin:0:1", "a,b", "cube:1:2:3", "log:1:2:0"] {
            assert!(matches!(parse_grid(bad), Err(Error::Input(_))), "{bad}");
        }
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(to_json(&vec![1.0, f64::NAN]).unwrap(), "[\n  1.0000000000000000e0,\n  null\n]\n");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(from_json::<RunConfig>(r#"{"alpha":[0],"points":[[0,0]],"colour":1}"#).is_err());
        assert!(from_json::<RunConfig>(r#"{"alpha":[0],"points":[[0,0]],"options":{"epsilon":1}}"#).is_err());
        let r = from_json::<RunConfig>(r#"{"alpha":[0],"points":[[0,0]]}"#).unwrap();
        assert_eq!(r.options, Options::default());
    }
}
