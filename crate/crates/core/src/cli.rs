//! Command-line front end: `spectrum`, `eval` and `verify`.
//!
//! Exit codes: 0 success, 1 verification failure, 2 configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Deserialize;

use crate::assembly::{MovingSolution, Mutation};
use crate::boundary::BoundaryLaw;
use crate::error::{Error, Result};
use crate::fixed_domain::{Family, PotentialModel};
use crate::verify::suite::{run_matrix, SuiteConfig, Tolerances};
use crate::verify::{fd_spectrum, GridSpec};

/// Environment variable that relative `--out` paths are resolved against.
pub const OUTPUT_DIR_ENV: &str = "MOVING_BOX_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

const DEFAULT_T_MAX: f64 = 2.0;

#[derive(Debug, Parser)]
#[command(name = "moving-box", version, about = "Exactly solvable moving-wall quantum wells")]
pub struct Cli {
    /// TOML file with defaults for any of the options below.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form energies next to the finite-difference spectrum.
    Spectrum(SpectrumArgs),
    /// CSV samples of ψ(x,t) and V(x,t) on the moving box.
    Eval(EvalArgs),
    /// Run the verification suites and emit a CSV report.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    /// well, susy1, susy2-j0 or susy2-j1.
    #[arg(long)]
    pub family: Option<Family>,
    /// Number of levels.
    #[arg(short = 'k', long = "levels")]
    pub k: Option<usize>,
    /// Grid intervals (the solver also uses twice this for extrapolation) [default: 2000].
    #[arg(long)]
    pub nx: Option<usize>,
    /// Relative tolerance [default: 1e-4 regular, 1e-2 singular families].
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub family: Option<Family>,
    /// Boundary law: `case1:λ,μ,ν`, `linear:L0,v` or `fixed` [default: fixed].
    #[arg(long)]
    pub law: Option<String>,
    /// Horizon of the law [default: 2].
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Mode index; repeat for an equal-weight superposition [default: 0].
    #[arg(long = "mode", short = 'n')]
    pub modes: Vec<usize>,
    /// Spatial intervals; x is sampled at fractions i/nx of L(t) [default: 64].
    #[arg(long)]
    pub nx: Option<usize>,
    /// Time intervals [default: 4].
    #[arg(long)]
    pub nt: Option<usize>,
    #[arg(long)]
    pub t0: Option<f64>,
    /// End of the time window [default: t-max].
    #[arg(long)]
    pub t1: Option<f64>,
    #[arg(long)]
    pub mutate: Option<Mutation>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "all")]
    pub family: Option<Family>,
    /// Every family.
    #[arg(long)]
    pub all: bool,
    /// Boundary law; repeat for several [default: fixed, linear:1,0.5 and case1:1,0,1].
    #[arg(long)]
    pub law: Vec<String>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Admissible modes checked per family [default: 3].
    #[arg(short = 'k', long = "levels")]
    pub k: Option<usize>,
    /// Residual grid: spatial intervals [default: 256].
    #[arg(long)]
    pub nx: Option<usize>,
    /// Residual grid: time steps [default: 256].
    #[arg(long)]
    pub nt: Option<usize>,
    /// Residual window start [default: 0].
    #[arg(long)]
    pub t0: Option<f64>,
    /// Residual window end [default: 0.05].
    #[arg(long)]
    pub t1: Option<f64>,
    /// Propagation spatial intervals [default: 256].
    #[arg(long)]
    pub prop_nx: Option<usize>,
    /// Propagation time steps over [0, t-max] [default: 2048].
    #[arg(long)]
    pub prop_nt: Option<usize>,
    /// Spectrum grid intervals [default: 2000].
    #[arg(long)]
    pub spectrum_nx: Option<usize>,
    /// Deliberately break one convention: no-pi2, ldot-for-lddot or no-logL.
    #[arg(long)]
    pub mutate: Option<Mutation>,
    /// Max relative residual [default: 1e-3].
    #[arg(long)]
    pub tol_residual: Option<f64>,
    /// Relative spectrum tolerance, regular families [default: 1e-4].
    #[arg(long)]
    pub tol_spectrum: Option<f64>,
    /// Relative spectrum tolerance, singular families [default: 1e-2].
    #[arg(long)]
    pub tol_spectrum_singular: Option<f64>,
    /// Max Gram deviation [default: 1e-8].
    #[arg(long)]
    pub tol_gram: Option<f64>,
    /// Max propagation norm drift [default: 1e-10].
    #[arg(long)]
    pub tol_drift: Option<f64>,
    /// Scaled Darboux potential tolerance [default: 1e-6].
    #[arg(long)]
    pub tol_darboux_potential: Option<f64>,
    /// Darboux mode tolerance [default: 1e-8].
    #[arg(long)]
    pub tol_darboux_mode: Option<f64>,
    /// Required propagation error ratio on refinement [default: 3.5].
    #[arg(long)]
    pub min_ratio: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Law as written in a config file.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LawConfig {
    Case1 {
        lambda: f64,
        mu: f64,
        nu: f64,
    },
    Linear {
        #[serde(rename = "L0")]
        l0: f64,
        v: f64,
    },
    Fixed,
}

impl LawConfig {
    pub fn build(&self, t_max: f64) -> Result<BoundaryLaw> {
        match *self {
            LawConfig::Case1 { lambda, mu, nu } => BoundaryLaw::case1(lambda, mu, nu, t_max),
            LawConfig::Linear { l0, v } => BoundaryLaw::linear(l0, v, t_max),
            LawConfig::Fixed => BoundaryLaw::fixed(t_max),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_x: Option<usize>,
    pub n_t: Option<usize>,
    pub t0: Option<f64>,
    pub t1: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    pub residual: Option<f64>,
    pub spectrum: Option<f64>,
    pub spectrum_singular: Option<f64>,
    pub gram: Option<f64>,
    pub drift: Option<f64>,
    pub darboux_potential: Option<f64>,
    pub darboux_mode: Option<f64>,
    pub min_ratio: Option<f64>,
}

/// Contents of a `--config` file; command-line flags take precedence.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Option<String>,
    pub all: Option<bool>,
    pub law: Option<LawConfig>,
    #[serde(default)]
    pub laws: Vec<LawConfig>,
    pub t_max: Option<f64>,
    #[serde(default)]
    pub modes: Vec<usize>,
    pub k: Option<usize>,
    pub mutate: Option<String>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
    }

    fn family(&self) -> Result<Option<Family>> {
        self.family.as_deref().map(str::parse).transpose()
    }

    fn mutation(&self) -> Result<Option<Mutation>> {
        self.mutate.as_deref().map(str::parse).transpose()
    }
}

/// Parses `case1:λ,μ,ν`, `linear:L0,v` or `fixed`.
pub fn parse_law(spec: &str, t_max: f64) -> Result<BoundaryLaw> {
    let (kind, params) = spec.split_once(':').unwrap_or((spec, ""));
    let values = if params.trim().is_empty() {
        Vec::new()
    } else {
        params
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidArgument(format!("bad number '{p}' in law '{spec}'")))
            })
            .collect::<Result<Vec<_>>>()?
    };
    match (kind.trim().to_ascii_lowercase().as_str(), values.as_slice()) {
        ("case1", &[lambda, mu, nu]) => BoundaryLaw::case1(lambda, mu, nu, t_max),
        ("linear", &[l0, v]) => BoundaryLaw::linear(l0, v, t_max),
        ("fixed", &[]) => BoundaryLaw::fixed(t_max),
        _ => Err(Error::InvalidArgument(format!(
            "unrecognised law '{spec}' (expected case1:λ,μ,ν, linear:L0,v or fixed)"
        ))),
    }
}

/// Relative `--out` paths go under [`OUTPUT_DIR_ENV`] when it is set.
pub fn resolve_output(path: &Path) -> PathBuf {
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn open_output<'a>(path: Option<&Path>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    match path {
        Some(p) => {
            let p = resolve_output(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", parent.display())))?;
            }
            let f = File::create(&p)
                .map_err(|e| Error::InvalidArgument(format!("cannot create {}: {e}", p.display())))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(stdout)),
    }
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("write failed: {e}"))
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_spectrum(args: SpectrumArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let family = args
        .family
        .or(cfg.family()?)
        .ok_or_else(|| Error::InvalidArgument("--family is required".into()))?;
    let k = args.k.or(cfg.k).unwrap_or(3);
    let nx = args.nx.or(cfg.grid.n_x).unwrap_or(2000);
    let model = PotentialModel::new(family);
    let tol = args
        .tol
        .or(if family.is_singular() {
            cfg.tolerances.spectrum_singular
        } else {
            cfg.tolerances.spectrum
        })
        .unwrap_or(if family.is_singular() { 1e-2 } else { 1e-4 });
    let levels = model.admissible_levels(k);
    let computed = fd_spectrum(&model, nx, levels.len())?;
    let out = open_output(args.out.as_deref().or(cfg.out.as_deref()), stdout)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "closed_form", "fd", "relative_error"]).map_err(io_err)?;
    let mut ok = true;
    for (&n, &fd) in levels.iter().zip(&computed) {
        let exact = model.energy(n)?;
        let rel = (fd - exact).abs() / exact.abs().max(1.0);
        ok &= rel <= tol;
        w.write_record([n.to_string(), num(exact), num(fd), num(rel)]).map_err(io_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

fn law_from(spec: Option<&str>, cfg_law: Option<&LawConfig>, t_max: f64) -> Result<BoundaryLaw> {
    match (spec, cfg_law) {
        (Some(s), _) => parse_law(s, t_max),
        (None, Some(l)) => l.build(t_max),
        (None, None) => BoundaryLaw::fixed(t_max),
    }
}

fn cmd_eval(args: EvalArgs, cfg: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let family = args.family.or(cfg.family()?).unwrap_or(Family::SquareWell);
    let t_max = args.t_max.or(cfg.t_max).unwrap_or(DEFAULT_T_MAX);
    let law = law_from(args.law.as_deref(), cfg.law.as_ref(), t_max)?;
    let model = PotentialModel::new(family);
    let modes = if !args.modes.is_empty() {
        args.modes.clone()
    } else if !cfg.modes.is_empty() {
        cfg.modes.clone()
    } else {
        vec![0]
    };
    let coeffs: Vec<_> = modes.iter().map(|&n| (n, Complex64::new(1.0, 0.0))).collect();
    let mutation = args.mutate.or(cfg.mutation()?);
    let sol = MovingSolution::superpose(&model, &law, &coeffs)?.with_mutation(mutation);
    let nx = args.nx.or(cfg.grid.n_x).unwrap_or(64).max(1);
    let nt = args.nt.or(cfg.grid.n_t).unwrap_or(4).max(1);
    let t0 = args.t0.or(cfg.grid.t0).unwrap_or(0.0);
    let t1 = args.t1.or(cfg.grid.t1).unwrap_or(t_max);
    if !(t0 <= t1) {
        return Err(Error::InvalidGrid(format!("t0 = {t0} exceeds t1 = {t1}")));
    }
    let out = open_output(args.out.as_deref().or(cfg.out.as_deref()), stdout)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "re_psi", "im_psi", "abs2_psi", "V"]).map_err(io_err)?;
    for j in 0..=nt {
        let t = if nt == 0 { t0 } else { t0 + (t1 - t0) * j as f64 / nt as f64 };
        let frame = sol.frame(t)?;
        for i in 0..=nx {
            let q = i as f64 / nx as f64;
            let psi = frame.psi_at_fraction(q);
            let v = match frame.potential_at_fraction(q) {
                Ok(v) => num(v),
                Err(Error::Singular(_)) => "inf".to_string(),
                Err(e) => return Err(e),
            };
            w.write_record([
                num(t),
                num(q * frame.length()),
                num(psi.re),
                num(psi.im),
                num(psi.norm_sqr()),
                v,
            ])
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)?;
    Ok(EXIT_OK)
}

fn default_laws(t_max: f64) -> Result<Vec<BoundaryLaw>> {
    Ok(vec![
        BoundaryLaw::fixed(t_max)?,
        BoundaryLaw::linear(1.0, 0.5, t_max)?,
        BoundaryLaw::case1(1.0, 0.0, 1.0, t_max)?,
    ])
}

fn cmd_verify(args: VerifyArgs, cfg: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32> {
    let t_max = args.t_max.or(cfg.t_max).unwrap_or(DEFAULT_T_MAX);
    let families = if args.all || (args.family.is_none() && cfg.all == Some(true)) {
        Family::ALL.to_vec()
    } else {
        vec![args
            .family
            .or(cfg.family()?)
            .ok_or_else(|| Error::InvalidArgument("either --family or --all is required".into()))?]
    };
    let laws = if !args.law.is_empty() {
        args.law.iter().map(|s| parse_law(s, t_max)).collect::<Result<Vec<_>>>()?
    } else if let Some(l) = &cfg.law {
        vec![l.build(t_max)?]
    } else if !cfg.laws.is_empty() {
        cfg.laws.iter().map(|l| l.build(t_max)).collect::<Result<Vec<_>>>()?
    } else {
        default_laws(t_max)?
    };
    let defaults = SuiteConfig::default();
    let t = &cfg.tolerances;
    let d = Tolerances::default();
    let tolerances = Tolerances {
        residual_relative: args.tol_residual.or(t.residual).unwrap_or(d.residual_relative),
        spectrum_regular: args.tol_spectrum.or(t.spectrum).unwrap_or(d.spectrum_regular),
        spectrum_singular: args
            .tol_spectrum_singular
            .or(t.spectrum_singular)
            .unwrap_or(d.spectrum_singular),
        gram: args.tol_gram.or(t.gram).unwrap_or(d.gram),
        norm_drift: args.tol_drift.or(t.drift).unwrap_or(d.norm_drift),
        darboux_potential: args
            .tol_darboux_potential
            .or(t.darboux_potential)
            .unwrap_or(d.darboux_potential),
        darboux_mode: args.tol_darboux_mode.or(t.darboux_mode).unwrap_or(d.darboux_mode),
        propagation_ratio: args.min_ratio.or(t.min_ratio).unwrap_or(d.propagation_ratio),
        ..d
    };
    let residual = GridSpec::new(
        args.nx.or(cfg.grid.n_x).unwrap_or(defaults.residual.n_x),
        args.nt.or(cfg.grid.n_t).unwrap_or(defaults.residual.n_t),
        args.t0.or(cfg.grid.t0).unwrap_or(defaults.residual.t0),
        args.t1.or(cfg.grid.t1).unwrap_or(defaults.residual.t1),
    )?;
    let suite = SuiteConfig {
        levels: args.k.or(cfg.k).unwrap_or(defaults.levels),
        residual,
        propagation_nx: args.prop_nx.unwrap_or(defaults.propagation_nx),
        propagation_nt: args.prop_nt.unwrap_or(defaults.propagation_nt),
        spectrum_nx: args.spectrum_nx.unwrap_or(defaults.spectrum_nx),
        tolerances,
        mutation: args.mutate.or(cfg.mutation()?),
        ..defaults
    };
    let models: Vec<_> = families.into_iter().map(PotentialModel::new).collect();
    let report = run_matrix(&models, &laws, &suite)?;
    let out = open_output(args.out.as_deref().or(cfg.out.as_deref()), stdout)?;
    report.write_csv(out).map_err(io_err)?;
    if report.passed() {
        Ok(EXIT_OK)
    } else {
        for r in report.failures() {
            writeln!(stderr, "FAILED {}", r.name).map_err(io_err)?;
        }
        Ok(EXIT_FAILED)
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(stderr, "{}", e.render())
            } else {
                write!(stdout, "{}", e.render())
            };
            return code;
        }
    };
    let cfg = match cli.config.as_deref().map(RunConfig::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_CONFIG;
        }
    };
    let result = match cli.command {
        Command::Spectrum(a) => cmd_spectrum(a, &cfg, stdout),
        Command::Eval(a) => cmd_eval(a, &cfg, stdout),
        Command::Verify(a) => cmd_verify(a, &cfg, stdout, stderr),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_CONFIG
        }
    }
}

/// Entry point used by the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn law_syntax() {
        let law = parse_law("case1:1,0,1", 2.0).unwrap();
        assert_eq!(law.to_string(), "case1:1,0,1");
        assert_eq!(parse_law("linear:1, 0.5", 2.0).unwrap().to_string(), "linear:1,0.5");
        assert_eq!(parse_law("fixed", 2.0).unwrap().to_string(), "linear:1,0");
        assert!(parse_law("linear:1", 2.0).is_err());
        assert!(parse_law("spring:1,2", 2.0).is_err());
        assert!(matches!(parse_law("case1:1,-4,1", 2.0), Err(Error::InvalidLaw(_))));
    }

    #[test]
    fn config_file_syntax() {
        let cfg: RunConfig = toml::from_str(
            r#"
            family = "susy1"
            law = { kind = "linear", L0 = 1.0, v = 0.5 }
            modes = [0, 2]
            [grid]
            n_x = 32
            [tolerances]
            gram = 1e-9
            "#,
        )
        .unwrap();
        assert_eq!(cfg.family().unwrap(), Some(Family::FirstOrderPartner));
        assert_eq!(cfg.law, Some(LawConfig::Linear { l0: 1.0, v: 0.5 }));
        assert_eq!(cfg.grid.n_x, Some(32));
        let c1: RunConfig = toml::from_str("law = { kind = \"case1\", lambda = 1, mu = 0, nu = 1 }").unwrap();
        assert_eq!(
            c1.law.unwrap().build(2.0).unwrap().to_string(),
            "case1:1,0,1"
        );
        assert!(toml::from_str::<RunConfig>("colour = 1").is_err());
    }

    #[test]
    fn invalid_family_is_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(["moving-box", "spectrum", "--family", "susy2-j7"], &mut out, &mut err);
        assert_eq!(code, EXIT_CONFIG);
    }
}
