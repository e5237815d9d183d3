use std::fmt;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::traps::Tolerances;

#[derive(Debug, Parser)]
#[command(name = "landscape-lab", version, about = "Quantum control landscape experiments")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalArgs {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<String>,
    /// Worker thread cap (falls back to LANDSCAPE_LAB_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// JSON file whose keys override the flags.
    #[arg(long, global = true)]
    pub config: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControlsKind {
    Zero,
    Upper,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SystemKind {
    /// ρ0 = ½(I + σ3) with the boundary-trap observable (N = 2).
    Trap,
    /// Seeded random mixed state and observable.
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CensusFn {
    Sin,
    Sinc,
    Cubic,
    Const,
}

/// Control bound: a number, or `auto` for π/(√3 T).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kappa {
    Auto,
    Value(f64),
}

impl Kappa {
    pub fn resolve(&self, horizon: f64) -> f64 {
        match *self {
            Kappa::Auto => crate::counterexamples::full_turn_kappa(horizon),
            Kappa::Value(v) => v,
        }
    }
}

impl FromStr for Kappa {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Kappa::Auto);
        }
        s.parse::<f64>()
            .map(Kappa::Value)
            .map_err(|_| format!("expected a number or 'auto', got '{s}'"))
    }
}

impl fmt::Display for Kappa {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kappa::Auto => f.write_str("auto"),
            Kappa::Value(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for Kappa {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Kappa::Auto => s.serialize_str("auto"),
            Kappa::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Kappa {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Kappa::Value(v)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Dynamics {
    #[arg(long = "N", alias = "n", default_value_t = 2)]
    #[serde(rename = "N")]
    pub dim: usize,
    #[arg(long = "T", alias = "horizon", default_value_t = 1.0)]
    #[serde(rename = "T")]
    pub horizon: f64,
    #[arg(long = "Z", alias = "segments", default_value_t = 4)]
    #[serde(rename = "Z")]
    pub segments: usize,
    #[arg(long, default_value = "auto")]
    pub kappa: Kappa,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct AscentArgs {
    #[arg(long, default_value_t = 1e-8)]
    pub gtol: f64,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub armijo: f64,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(tag = "command", content = "params")]
pub enum Command {
    /// Generalized Gell-Mann basis of su(N).
    #[serde(rename = "basis")]
    Basis {
        #[arg(long = "N", alias = "n", default_value_t = 2)]
        #[serde(rename = "N")]
        dim: usize,
    },
    /// Segment and total propagators for a control grid.
    #[serde(rename = "propagate")]
    Propagate {
        #[command(flatten)]
        #[serde(flatten)]
        dynamics: Dynamics,
        #[arg(long, value_enum, default_value_t = ControlsKind::Random)]
        controls: ControlsKind,
    },
    /// J and its gradient over a plane of two controls.
    #[serde(rename = "scan")]
    Scan {
        #[command(flatten)]
        #[serde(flatten)]
        dynamics: Dynamics,
        #[arg(long, value_enum, default_value_t = SystemKind::Trap)]
        system: SystemKind,
        #[arg(long, value_enum, default_value_t = ControlsKind::Upper)]
        base: ControlsKind,
        /// First scanned control as `j,z` (zero-based).
        #[arg(long, default_value = "0,0")]
        coord1: String,
        #[arg(long, default_value = "1,0")]
        coord2: String,
        #[arg(long, default_value_t = 21)]
        steps: usize,
    },
    /// Projected gradient ascent from one start.
    #[serde(rename = "ascent")]
    Ascent {
        #[command(flatten)]
        #[serde(flatten)]
        dynamics: Dynamics,
        #[arg(long, value_enum, default_value_t = SystemKind::Trap)]
        system: SystemKind,
        #[arg(long, value_enum, default_value_t = ControlsKind::Random)]
        start: ControlsKind,
        #[command(flatten)]
        #[serde(flatten)]
        ascent: AscentArgs,
    },
    /// Multistart ascent statistics.
    #[serde(rename = "basins")]
    Basins {
        #[command(flatten)]
        #[serde(flatten)]
        dynamics: Dynamics,
        #[arg(long, value_enum, default_value_t = SystemKind::Trap)]
        system: SystemKind,
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[command(flatten)]
        #[serde(flatten)]
        ascent: AscentArgs,
    },
    /// Tangent-map rank and one-sided cone test.
    #[serde(rename = "rank")]
    Rank {
        #[command(flatten)]
        #[serde(flatten)]
        dynamics: Dynamics,
        #[arg(long, value_enum, default_value_t = ControlsKind::Upper)]
        controls: ControlsKind,
        #[arg(long, default_value_t = crate::landscape::DEFAULT_RANK_TOL)]
        rank_tol: f64,
        #[arg(long, default_value_t = crate::landscape::DEFAULT_CONE_SAMPLES)]
        samples: usize,
    },
    /// Verify the boundary-trap counterexample.
    #[serde(rename = "ce-boundary")]
    CeBoundary {
        #[arg(long = "T", alias = "horizon", default_value_t = 1.0)]
        #[serde(rename = "T")]
        horizon: f64,
        #[arg(long = "Z", alias = "segments", default_value_t = 4)]
        #[serde(rename = "Z")]
        segments: usize,
        #[arg(long, default_value = "auto")]
        kappa: Kappa,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Perturbation radius relative to κ.
        #[arg(long, default_value_t = 1e-3)]
        radius_rel: f64,
        /// Exit with status 1 unless the corner is a trap.
        #[arg(long, default_value_t = false)]
        expect_trap: bool,
    },
    /// Closed-form and census extrema of the sliced analytic landscape.
    #[serde(rename = "ce-slice")]
    CeSlice {
        #[arg(long, default_value_t = 101)]
        steps: usize,
        #[arg(long, allow_negative_numbers = true, default_value_t = -1.4)]
        c_min: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 1.4)]
        c_max: f64,
        #[arg(long, default_value_t = crate::counterexamples::DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Minimum gradient norm of the analytic landscape on a grid.
    #[serde(rename = "ce-scan2d")]
    CeScan2d {
        #[arg(long, default_value_t = 400)]
        grid_steps: usize,
        #[arg(long, default_value_t = crate::counterexamples::DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Critical points and values of a 1D function.
    #[serde(rename = "census1d")]
    Census1d {
        #[arg(long = "fn", value_enum, default_value_t = CensusFn::Sin)]
        #[serde(rename = "fn")]
        function: CensusFn,
        #[arg(long, allow_negative_numbers = true, default_value_t = -20.0)]
        a: f64,
        #[arg(long, allow_negative_numbers = true, default_value_t = 20.0)]
        b: f64,
        #[arg(long, default_value_t = 4001)]
        grid_points: usize,
    },
    /// Largest κ satisfying the segment-duration condition.
    #[serde(rename = "kappa-thr")]
    KappaThr {
        #[arg(long = "N", alias = "n", default_value_t = 2)]
        #[serde(rename = "N")]
        dim: usize,
        #[arg(long = "T", alias = "horizon", default_value_t = 1.0)]
        #[serde(rename = "T")]
        horizon: f64,
        #[arg(long = "Z", alias = "segments", default_value_t = 4)]
        #[serde(rename = "Z")]
        segments: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Basis { .. } => "basis",
            Command::Propagate { .. } => "propagate",
            Command::Scan { .. } => "scan",
            Command::Ascent { .. } => "ascent",
            Command::Basins { .. } => "basins",
            Command::Rank { .. } => "rank",
            Command::CeBoundary { .. } => "ce-boundary",
            Command::CeSlice { .. } => "ce-slice",
            Command::CeScan2d { .. } => "ce-scan2d",
            Command::Census1d { .. } => "census1d",
            Command::KappaThr { .. } => "kappa-thr",
        }
    }
}

/// Fully resolved run description; echoed verbatim in every report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub command: Command,
    pub seed: u64,
    pub format: Format,
    pub output: Option<String>,
    pub threads: Option<usize>,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn from_cli(cli: Cli) -> Self {
        RunConfig {
            command: cli.command,
            seed: cli.global.seed,
            format: cli.global.format,
            output: cli.global.output,
            threads: cli.global.threads,
            tolerances: Tolerances::default(),
        }
    }

    /// Overlay a JSON object: top-level keys replace, nested objects merge.
    pub fn with_overrides(&self, overrides: &serde_json::Value) -> Result<Self, String> {
        let mut base = serde_json::to_value(self).map_err(|e| e.to_string())?;
        if !overrides.is_object() {
            return Err("config file must hold a JSON object".into());
        }
        // a different command starts from that command's own defaults
        if let (Some(new), Some(old)) = (overrides.get("command"), base.get("command")) {
            if new != old {
                let name = new.as_str().ok_or("command must be a string")?;
                let defaults =
                    Cli::try_parse_from(["landscape-lab", name]).map_err(|_| format!("unknown command '{name}'"))?;
                base["params"] = serde_json::to_value(&defaults.command).map_err(|e| e.to_string())?["params"].clone();
            }
        }
        merge(&mut base, overrides);
        serde_json::from_value(base).map_err(|e| format!("invalid config: {e}"))
    }
}

fn merge(base: &mut serde_json::Value, over: &serde_json::Value) {
    match (base, over) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (b, o) => *b = o.clone(),
    }
}
