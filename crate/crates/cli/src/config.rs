//! Flat key=value configuration with flag overrides.
//!
//! Every option can come from a config file (one `key=value` pair per line,
//! `#` comments) or from `--key value` flags; flags win. Unknown keys and
//! malformed values are rejected with the offending key named.

use crate::CliError;
use biotfem::mesh::{BoundarySpec, Side};
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Run,
    Converge,
    InfSup,
    Locking,
    CnExperiment,
}

impl Command {
    pub fn parse(s: &str) -> Option<Command> {
        match s {
            "run" => Some(Command::Run),
            "converge" => Some(Command::Converge),
            "infsup" => Some(Command::InfSup),
            "locking" => Some(Command::Locking),
            "cn-experiment" => Some(Command::CnExperiment),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::Run => "run",
            Command::Converge => "converge",
            Command::InfSup => "infsup",
            Command::Locking => "locking",
            Command::CnExperiment => "cn-experiment",
        }
    }
}

/// Fully validated run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub case: String,
    pub levels: Vec<usize>,
    pub n: usize,
    pub steps: usize,
    pub t0: f64,
    pub mu: f64,
    pub lambda: f64,
    pub c0: f64,
    pub boundary: BoundarySpec,
    pub boundary_is_default: bool,
    pub scheme: biotfem::timestep::Scheme,
    pub out: PathBuf,
    pub no_timestamp: bool,
    pub incompatible: bool,
    pub dump_mesh: Option<PathBuf>,
    pub dump_states: Option<PathBuf>,
}

fn config_err(key: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        key: key.to_string(),
        message: message.into(),
    }
}

/// Keys that take no value.
const SWITCHES: [&str; 2] = ["no-timestamp", "incompatible"];

const KNOWN_KEYS: [&str; 15] = [
    "config",
    "case",
    "levels",
    "n",
    "steps",
    "t0",
    "mu",
    "lambda",
    "c0",
    "boundary",
    "scheme",
    "out",
    "no-timestamp",
    "incompatible",
    "dump-mesh",
];

// dump-states is accepted too; kept separate so KNOWN_KEYS stays a fixed
// array without a macro.
fn is_known(key: &str) -> bool {
    KNOWN_KEYS.contains(&key) || key == "dump-states"
}

/// Parses argv (without the program name). The first token must be the
/// command; the rest are `--key value` flags and switches.
pub fn parse_config(args: &[String]) -> Result<RunConfig, CliError> {
    let command = args.first().ok_or_else(|| {
        config_err(
            "command",
            "missing command (run, converge, infsup, locking, cn-experiment)",
        )
    })?;
    let command = Command::parse(command)
        .ok_or_else(|| config_err("command", format!("unknown command '{command}'")))?;

    let mut flag_values: BTreeMap<String, String> = BTreeMap::new();
    let mut i = 1;
    while i < args.len() {
        let arg = &args[i];
        let key = arg
            .strip_prefix("--")
            .ok_or_else(|| config_err(arg, "expected a --key flag"))?;
        if !is_known(key) {
            return Err(config_err(key, "unknown key"));
        }
        if SWITCHES.contains(&key) {
            flag_values.insert(key.to_string(), "true".to_string());
            i += 1;
        } else {
            let value = args
                .get(i + 1)
                .ok_or_else(|| config_err(key, "missing value"))?;
            flag_values.insert(key.to_string(), value.clone());
            i += 2;
        }
    }

    // File values first, flags override.
    let mut values: BTreeMap<String, String> = BTreeMap::new();
    if let Some(path) = flag_values.get("config") {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err("config", format!("cannot read '{path}': {e}")))?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                config_err("config", format!("line {}: expected key=value", lineno + 1))
            })?;
            let key = key.trim();
            if !is_known(key) || key == "config" {
                return Err(config_err(key, "unknown key in config file"));
            }
            values.insert(key.to_string(), value.trim().to_string());
        }
    }
    values.extend(flag_values);

    build_config(command, &values)
}

fn build_config(
    command: Command,
    values: &BTreeMap<String, String>,
) -> Result<RunConfig, CliError> {
    let get = |key: &str| values.get(key).map(String::as_str);

    let parse_f64 = |key: &str, default: f64| -> Result<f64, CliError> {
        match get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| config_err(key, format!("malformed number '{v}'"))),
        }
    };
    let parse_usize = |key: &str, default: usize| -> Result<usize, CliError> {
        match get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| config_err(key, format!("malformed integer '{v}'"))),
        }
    };

    let case = get("case").unwrap_or("smooth").to_string();
    if case != "smooth" && case != "divfree" {
        return Err(config_err("case", format!("unknown case '{case}'")));
    }
    if command == Command::Locking && case != "divfree" && get("case").is_some() {
        return Err(config_err("case", "locking uses the divfree case"));
    }
    let case = if command == Command::Locking {
        "divfree".to_string()
    } else {
        case
    };

    let default_levels: &[usize] = match command {
        Command::Converge => &[4, 8, 16, 32],
        Command::InfSup => &[2, 4, 8],
        Command::Locking => &[4, 8, 16],
        _ => &[],
    };
    let levels = match get("levels") {
        None => default_levels.to_vec(),
        Some(v) => {
            let mut out = Vec::new();
            for part in v.split(',') {
                let n: usize = part
                    .trim()
                    .parse()
                    .map_err(|_| config_err("levels", format!("malformed level '{part}'")))?;
                out.push(n);
            }
            out
        }
    };
    if matches!(
        command,
        Command::Converge | Command::InfSup | Command::Locking
    ) {
        if levels.is_empty() {
            return Err(config_err("levels", "at least one level required"));
        }
        if levels.contains(&0) {
            return Err(config_err("levels", "levels must be positive"));
        }
        for pair in levels.windows(2) {
            if pair[1] != 2 * pair[0] {
                return Err(config_err("levels", "levels must double"));
            }
        }
        if matches!(command, Command::Converge | Command::Locking) && levels.len() < 2 {
            return Err(config_err("levels", "need at least two levels for rates"));
        }
    }

    let n = parse_usize("n", 8)?;
    if n == 0 {
        return Err(config_err("n", "must be positive"));
    }
    let steps = parse_usize("steps", n)?;
    if steps == 0 {
        return Err(config_err("steps", "must be positive"));
    }
    let t0 = parse_f64("t0", 0.5)?;
    if !(t0 > 0.0) {
        return Err(config_err("t0", "must be positive"));
    }
    let mu = parse_f64("mu", 1.0)?;
    let lambda = parse_f64("lambda", 1.0)?;
    let c0 = parse_f64("c0", 1.0)?;

    let boundary_str = get("boundary").unwrap_or("default");
    let boundary = parse_boundary(boundary_str)?;
    let boundary_is_default =
        boundary.gamma_f_sides.is_empty() && boundary.gamma_t_sides.is_empty();
    if !boundary_is_default && matches!(command, Command::Converge | Command::Locking) {
        return Err(config_err(
            "boundary",
            "convergence studies compare against exact solutions defined for the default boundary",
        ));
    }

    let scheme = match get("scheme").unwrap_or("be") {
        "be" | "backward-euler" => biotfem::timestep::Scheme::BackwardEuler,
        "cn" | "crank-nicolson" => biotfem::timestep::Scheme::CrankNicolson,
        other => return Err(config_err("scheme", format!("unknown scheme '{other}'"))),
    };

    let out = PathBuf::from(
        get("out")
            .map(String::from)
            .unwrap_or_else(|| format!("{}.csv", command.name())),
    );

    Ok(RunConfig {
        command,
        case,
        levels,
        n,
        steps,
        t0,
        mu,
        lambda,
        c0,
        boundary,
        boundary_is_default,
        scheme,
        out,
        no_timestamp: get("no-timestamp").is_some(),
        incompatible: get("incompatible").is_some(),
        dump_mesh: get("dump-mesh").map(PathBuf::from),
        dump_states: get("dump-states").map(PathBuf::from),
    })
}

fn parse_boundary(text: &str) -> Result<BoundarySpec, CliError> {
    if text == "default" {
        return Ok(BoundarySpec::default());
    }
    let mut spec = BoundarySpec::default();
    for segment in text.split(';') {
        let segment = segment.trim();
        if segment.is_empty() {
            continue;
        }
        let (part, sides) = segment
            .split_once('=')
            .ok_or_else(|| config_err("boundary", format!("expected part=sides in '{segment}'")))?;
        let target = match part.trim() {
            "gf" => &mut spec.gamma_f_sides,
            "gt" => &mut spec.gamma_t_sides,
            other => {
                return Err(config_err(
                    "boundary",
                    format!("unknown boundary part '{other}'"),
                ))
            }
        };
        for side in sides.split(',') {
            let side = side.trim();
            let parsed = Side::parse(side)
                .ok_or_else(|| config_err("boundary", format!("unknown side '{side}'")))?;
            target.push(parsed);
        }
    }
    Ok(spec)
}
