//! Command-line and config-file parsing for the experiment runner.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Arg, ArgMatches, Command};

use crate::CliError;

/// The experiments the runner knows, with one-line blurbs for `--help`.
pub const EXPERIMENTS: &[(&str, &str)] = &[
    ("kernel-checks", "kernel conservation, recurrence consistency, Davies envelopes, sup-norm law"),
    ("radial-converge", "solver order against the exact kernel and bump-to-kernel convergence"),
    ("gaussian1d", "drift-corrected rescaling onto the 1D Gaussian and its L1 error"),
    ("delayed", "time-delayed kernel comparisons: L1 decay, center ratio, intersections"),
    ("horo", "horospheric solutions: drift speed, self-similar error, 1D mass"),
    ("counterexample", "displaced-mass comparisons: axis ratios, pointwise gap, positive-part L1"),
    ("forced", "forced flow: accumulated mass and the L1 contraction inequality"),
    ("mass-lines", "half-mass and sign-change lines against the mass line (n-1)t"),
];

/// Resolved run configuration; per-experiment defaults fill whatever the
/// flags and config file leave unset.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: u32,
    pub t_list: Option<Vec<f64>>,
    pub a: f64,
    pub r_max: Option<f64>,
    pub nodes: Option<usize>,
    pub dt: Option<f64>,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 3,
            t_list: None,
            a: 1.0,
            r_max: None,
            nodes: None,
            dt: None,
            out_dir: PathBuf::from("reports"),
        }
    }
}

impl RunConfig {
    /// The t samples, or the experiment's default list.
    pub fn t_list_or(&self, default: &[f64]) -> Vec<f64> {
        self.t_list.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Canonical key-value view for report params and hashing.
    pub fn as_params(&self) -> BTreeMap<String, String> {
        let mut map = BTreeMap::new();
        map.insert("n".into(), self.n.to_string());
        if let Some(ts) = &self.t_list {
            let joined: Vec<String> = ts.iter().map(|t| format!("{t}")).collect();
            map.insert("t-list".into(), joined.join(","));
        }
        map.insert("a".into(), format!("{}", self.a));
        if let Some(r) = self.r_max {
            map.insert("r-max".into(), format!("{r}"));
        }
        if let Some(nn) = self.nodes {
            map.insert("nodes".into(), nn.to_string());
        }
        if let Some(dt) = self.dt {
            map.insert("dt".into(), format!("{dt}"));
        }
        map
    }
}

fn common_args() -> Vec<Arg> {
    vec![
        Arg::new("n").long("n").value_name("DIM").help("space dimension (n >= 2)"),
        Arg::new("t-list")
            .long("t-list")
            .value_name("T1,T2,...")
            .help("comma-separated observation times"),
        Arg::new("a").long("a").value_name("DIST").help("displacement along the first axis"),
        Arg::new("r-max").long("r-max").value_name("R").help("initial truncation radius"),
        Arg::new("nodes").long("nodes").value_name("COUNT").help("grid node count"),
        Arg::new("dt").long("dt").value_name("STEP").help("solver timestep"),
        Arg::new("out").long("out").value_name("DIR").help("artifact directory (default: reports)"),
        Arg::new("config")
            .long("config")
            .value_name("FILE")
            .help("key=value config file; flags override it"),
    ]
}

/// Builds the clap command tree.
pub fn command() -> Command {
    let mut cmd = Command::new("hyperheat")
        .about("numerical experiments for heat flow on hyperbolic space")
        .version(env!("CARGO_PKG_VERSION"))
        .subcommand_required(true)
        .arg_required_else_help(true);
    for (name, about) in EXPERIMENTS {
        cmd = cmd.subcommand(Command::new(*name).about(*about).args(common_args()));
    }
    cmd
}

/// Parses argv (including the program name) into an experiment name and a
/// resolved configuration. Flag values override config-file values, which
/// override defaults.
pub fn parse_cli(argv: &[String]) -> Result<(String, RunConfig), CliError> {
    let matches = command()
        .try_get_matches_from(argv)
        .map_err(CliError::Clap)?;
    let (name, sub) = matches.subcommand().expect("subcommand required");

    let mut kv: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = sub.get_one::<String>("config") {
        kv = parse_config_file(path)?;
    }
    for key in ["n", "t-list", "a", "r-max", "nodes", "dt", "out"] {
        if let Some(v) = sub.get_one::<String>(key) {
            kv.insert(key.to_string(), v.clone());
        }
    }
    let config = resolve(&kv)?;
    Ok((name.to_string(), config))
}

fn parse_config_file(path: &str) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config file {path}: {e}")))?;
    let mut kv = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!("{path}:{}: expected key=value, got {line:?}", lineno + 1))
        })?;
        kv.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(kv)
}

fn resolve(kv: &BTreeMap<String, String>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    for (key, value) in kv {
        match key.as_str() {
            "n" => {
                cfg.n = value
                    .parse()
                    .map_err(|_| CliError::Usage(format!("bad dimension {value:?}")))?
            }
            "t-list" => {
                let ts: Result<Vec<f64>, _> =
                    value.split(',').map(|s| s.trim().parse::<f64>()).collect();
                let ts =
                    ts.map_err(|_| CliError::Usage(format!("bad time list {value:?}")))?;
                if ts.is_empty() || ts.iter().any(|&t| !(t > 0.0)) {
                    return Err(CliError::Validation(format!(
                        "times must be positive, got {value:?}"
                    )));
                }
                cfg.t_list = Some(ts);
            }
            "a" => {
                let a: f64 =
                    value.parse().map_err(|_| CliError::Usage(format!("bad displacement {value:?}")))?;
                if !(a >= 0.0) {
                    return Err(CliError::Validation(format!("displacement must be >= 0, got {a}")));
                }
                cfg.a = a;
            }
            "r-max" => {
                let r: f64 =
                    value.parse().map_err(|_| CliError::Usage(format!("bad r-max {value:?}")))?;
                if !(r > 0.0) {
                    return Err(CliError::Validation(format!("r-max must be positive, got {r}")));
                }
                cfg.r_max = Some(r);
            }
            "nodes" => {
                let nn: usize =
                    value.parse().map_err(|_| CliError::Usage(format!("bad node count {value:?}")))?;
                if nn < 16 {
                    return Err(CliError::Validation(format!("need at least 16 nodes, got {nn}")));
                }
                cfg.nodes = Some(nn);
            }
            "dt" => {
                let dt: f64 =
                    value.parse().map_err(|_| CliError::Usage(format!("bad timestep {value:?}")))?;
                if !(dt > 0.0) {
                    return Err(CliError::Validation(format!("dt must be positive, got {dt}")));
                }
                cfg.dt = Some(dt);
            }
            "out" => cfg.out_dir = PathBuf::from(value),
            other => {
                return Err(CliError::Usage(format!("unknown config key {other:?}")));
            }
        }
    }
    // dimension validation is the KernelSpec invariant
    hyperheat_core::KernelSpec::new(cfg.n).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok(cfg)
}

#[allow(dead_code)]
fn matches_to_string(m: &ArgMatches) -> String {
    format!("{m:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn argv(parts: &[&str]) -> Vec<String> {
        std::iter::once("hyperheat")
            .chain(parts.iter().copied())
            .map(String::from)
            .collect()
    }

    #[test]
    fn parses_experiment_and_flags() {
        let (name, cfg) =
            parse_cli(&argv(&["gaussian1d", "--n", "3", "--t-list", "10,25,50,100"])).unwrap();
        assert_eq!(name, "gaussian1d");
        assert_eq!(cfg.n, 3);
        assert_eq!(cfg.t_list.as_deref(), Some(&[10.0, 25.0, 50.0, 100.0][..]));
    }

    #[test]
    fn missing_subcommand_is_usage_error() {
        let err = parse_cli(&argv(&[])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn unknown_experiment_is_usage_error() {
        let err = parse_cli(&argv(&["unknown"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn dimension_one_rejected_by_kernel_spec() {
        let err = parse_cli(&argv(&["kernel-checks", "--n", "1"])).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("dimension"));
    }

    #[test]
    fn config_file_feeds_values_and_flags_override() {
        let dir = std::env::temp_dir().join(format!("hyperheat-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "# comment\nn = 5\nt-list = 1,2\na = 0.5\n").unwrap();
        let p = path.to_str().unwrap();

        let (_, cfg) = parse_cli(&argv(&["mass-lines", "--config", p])).unwrap();
        assert_eq!(cfg.n, 5);
        assert_eq!(cfg.a, 0.5);

        let (_, cfg) = parse_cli(&argv(&["mass-lines", "--config", p, "--n", "3"])).unwrap();
        assert_eq!(cfg.n, 3); // flag wins
        assert_eq!(cfg.a, 0.5); // file value survives
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn bad_values_rejected() {
        assert_eq!(parse_cli(&argv(&["horo", "--t-list", "5,-1"])).unwrap_err().exit_code(), 2);
        assert_eq!(parse_cli(&argv(&["horo", "--nodes", "4"])).unwrap_err().exit_code(), 2);
        assert_eq!(parse_cli(&argv(&["horo", "--dt", "0"])).unwrap_err().exit_code(), 2);
    }
}
