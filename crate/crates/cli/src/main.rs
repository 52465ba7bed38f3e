mod cmds;
mod output;
mod parse;

use std::process::ExitCode;

use a2stab::Level;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::json;

use crate::cmds::{Failure, Output};

#[derive(Parser, Debug)]
#[command(name = "a2stab", version, about = "Stability conditions on the CY-n A2 category")]
struct Cli {
    /// Print JSON instead of `key = value` lines.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Braid words and autoequivalences.
    #[command(subcommand)]
    Braid(BraidCmd),
    /// Exchange graphs as DOT, SVG or JSON.
    Graph(GraphArgs),
    /// Twisted and exponential periods.
    #[command(subcommand)]
    Periods(PeriodsCmd),
    /// Differential equations satisfied by the periods.
    #[command(subcommand)]
    Ode(OdeCmd),
    /// The conformal maps f_n and their inverses.
    #[command(subcommand)]
    Map(MapCmd),
    /// The regions R_n.
    #[command(subcommand)]
    Region(RegionCmd),
    /// Stability conditions.
    #[command(subcommand)]
    Stab(StabCmd),
}

fn level(s: &str) -> Result<Level, String> {
    s.parse::<Level>().map_err(|e| e.to_string())
}

fn complex(s: &str) -> Result<C64, String> {
    parse::parse_complex(s)
}

#[derive(Subcommand, Debug)]
pub enum BraidCmd {
    /// Canonical form of a braid word.
    Eval { word: String },
    /// Whether two braid words define the same braid.
    Equal { left: String, right: String },
    /// Canonical autoequivalence `word` followed by `[shift]`.
    Auteq {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
    },
    /// Composite `left . right` of two autoequivalences.
    Compose {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long)]
        left: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        left_shift: i64,
        #[arg(long)]
        right: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        right_shift: i64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum GraphFormat {
    Dot,
    Svg,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum LayoutArg {
    Disc,
    Linear,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[arg(short = 'n', long = "n", value_parser = level)]
    pub n: Level,
    #[arg(long, default_value_t = 3)]
    pub radius: usize,
    /// Identify hearts differing by a shift.
    #[arg(long)]
    pub projective: bool,
    #[arg(long, value_enum)]
    pub format: Option<GraphFormat>,
    #[arg(long, value_enum)]
    pub layout: Option<LayoutArg>,
    #[arg(long, default_value_t = 3.0)]
    pub node_size: f64,
}

#[derive(Subcommand, Debug)]
pub enum PeriodsCmd {
    /// A single period with an error estimate.
    Eval {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        b: C64,
        #[arg(long, default_value_t = 1)]
        cycle: usize,
        /// Gauss nodes per panel.
        #[arg(long, default_value_t = 24)]
        nodes: usize,
        /// Target tolerance.
        #[arg(long, default_value_t = 1e-13)]
        tol: f64,
    },
    /// Monodromy of the slice periods around a circle in the z-line.
    Monodromy {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, value_parser = complex, allow_hyphen_values = true, default_value = "1")]
        center: C64,
        #[arg(long, default_value_t = 0.5)]
        radius: f64,
        #[arg(long, default_value_t = 400)]
        points: usize,
        /// Closed loop as a JSON array of `[re, im]` pairs; overrides the circle.
        #[arg(long = "loop")]
        path: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum OdeCmd {
    /// Hypergeometric residual of the slice periods at `z`.
    Check {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z: C64,
    },
    /// Airy-type residual of the exponential periods at `a`.
    Airy {
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: C64,
    },
}

#[derive(Subcommand, Debug)]
pub enum MapCmd {
    /// `f_n(t)`, or `f_inf(a)` when `n = inf`.
    Eval {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        t: Option<C64>,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: Option<C64>,
    },
    /// Preimage of `z` under `f_n` (a parameter `t`, or `a` at `n = inf`).
    Inverse {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z: C64,
    },
}

#[derive(Subcommand, Debug)]
pub enum RegionCmd {
    /// Interior, boundary, vertex or outside.
    Classify {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z: C64,
    },
    /// SVG outline of the region.
    Svg {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, default_value_t = 2.0)]
        height: f64,
    },
}

#[derive(Args, Debug)]
pub struct PointArg {
    /// Stability condition as JSON, `@file`, or `-` for stdin.
    #[arg(long, allow_hyphen_values = true)]
    pub point: String,
}

#[derive(Subcommand, Debug)]
pub enum StabCmd {
    /// Builds a stability condition from `g` or from charges on a heart.
    Make {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        g: Option<C64>,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z1: Option<C64>,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z2: Option<C64>,
        /// Heart transporter as a braid word (finite level).
        #[arg(long, default_value = "")]
        word: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        shift: i64,
        /// Heart transporter as a power of Sigma (infinite level).
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        sigma_power: i64,
        #[arg(long, default_value_t = 0)]
        k: i64,
    },
    /// Fundamental-domain verdict and `g`-coordinate.
    Classify(PointArg),
    /// Reduction into the fundamental domain.
    Reduce(PointArg),
    /// The point `(a, b)` of the unfolding space.
    Cubic(PointArg),
    /// Central charges attached to `(a, b)`.
    Charges {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        a: C64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        b: C64,
    },
    /// Moves the charges of the heart's simples to `(z1, z2)`, tilting at walls.
    Walk {
        #[command(flatten)]
        point: PointArg,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z1: C64,
        #[arg(long, value_parser = complex, allow_hyphen_values = true)]
        z2: C64,
        #[arg(long, default_value_t = 200)]
        steps: usize,
    },
    /// Stability -> cubic -> charges on random interior points.
    Roundtrip {
        #[arg(short = 'n', long = "n", value_parser = level)]
        n: Level,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cmds::run(&cli.cmd) {
        Ok(Output::Value(v)) => {
            if cli.json {
                println!("{}", output::to_json(&v));
            } else {
                print!("{}", output::to_text(&v));
            }
            ExitCode::SUCCESS
        }
        Ok(Output::Raw(text)) => {
            print!("{text}");
            ExitCode::SUCCESS
        }
        Err(Failure::Parse(message)) => {
            eprintln!("{}", output::to_json(&json!({"code": "parse_error", "message": message})));
            ExitCode::from(2)
        }
        Err(Failure::Domain(e, context)) => {
            let obj = json!({"code": e.code(), "message": e.to_string(), "context": context});
            eprintln!("{}", output::to_json(&obj));
            ExitCode::from(3)
        }
    }
}
