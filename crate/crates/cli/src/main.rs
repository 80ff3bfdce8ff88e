//! `hookebook`: simulate billiard books with a repelling Hooke potential and
//! compute their momentum-map invariants.
//!
//! Exit codes: 0 success, 2 invalid input, 3 numerical failure, 1 anything
//! else (I/O).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use hookebook::MomentumValue;

use commands::{Output, UsageError};
use config::{ConfigError, InitialState, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "hookebook", version, about = "Billiard books with a repelling Hooke potential", allow_negative_numbers = true)]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for artifacts.
    #[arg(long, global = true, env = "HOOKEBOOK_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
    /// Potential coefficient (negative).
    #[arg(short, long, global = true)]
    k: Option<f64>,
    /// Number of sheets of the book.
    #[arg(short, long, global = true)]
    n: Option<usize>,
    /// Seed for random sampling.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one trajectory; writes trajectory.csv and trajectory.svg.
    #[command(allow_negative_numbers = true)]
    Simulate {
        #[arg(long, requires_all = ["y", "vx", "vy"], conflicts_with_all = ["h", "random"])]
        x: Option<f64>,
        #[arg(long, requires = "x")]
        y: Option<f64>,
        #[arg(long, requires = "x")]
        vx: Option<f64>,
        #[arg(long, requires = "x")]
        vy: Option<f64>,
        /// Start on the fiber over (h, f), at its innermost point.
        #[arg(long, requires = "f", conflicts_with = "random")]
        h: Option<f64>,
        #[arg(long, requires = "h")]
        f: Option<f64>,
        /// Polar angle of the starting point on the fiber.
        #[arg(long, requires = "h")]
        phase: Option<f64>,
        #[arg(long)]
        sheet: Option<usize>,
        /// Random initial state with velocity components up to this speed.
        #[arg(long)]
        random: Option<f64>,
        #[arg(long)]
        reflections: Option<usize>,
        #[arg(long)]
        max_time: Option<f64>,
        /// Output samples per free segment.
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        no_svg: bool,
    },
    /// Bifurcation diagram; writes diagram.csv and diagram.svg.
    #[command(allow_negative_numbers = true)]
    Diagram {
        #[arg(long)]
        f_min: Option<f64>,
        #[arg(long)]
        f_max: Option<f64>,
        #[arg(long)]
        resolution: Option<usize>,
        /// Overlay a classified grid with this many points per axis.
        #[arg(long)]
        overlay: Option<usize>,
        #[arg(long)]
        h_min: Option<f64>,
        #[arg(long)]
        h_max: Option<f64>,
        /// Draw the monodromy loop.
        #[arg(long)]
        show_loop: bool,
    },
    /// Classify fibers over a grid, random values or explicit values; writes classify.csv.
    #[command(allow_negative_numbers = true)]
    Classify {
        /// A value `H,F` to classify; repeatable.
        #[arg(long = "at", value_parser = parse_value, allow_hyphen_values = true)]
        at: Vec<MomentumValue>,
        #[arg(long)]
        h_min: Option<f64>,
        #[arg(long)]
        h_max: Option<f64>,
        #[arg(long)]
        f_min: Option<f64>,
        #[arg(long)]
        f_max: Option<f64>,
        #[arg(long)]
        per_axis: Option<usize>,
        /// Sample this many values uniformly instead of a grid.
        #[arg(long)]
        random: Option<usize>,
    },
    /// Spectrum of the linearized pencil at the origin; writes spectrum.json.
    #[command(allow_negative_numbers = true)]
    Eigen {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Radial period and angular advance; writes rotation.json.
    #[command(allow_negative_numbers = true)]
    Rotation {
        /// A regular value `H,F`; repeatable.
        #[arg(long = "at", value_parser = parse_value, allow_hyphen_values = true)]
        at: Vec<MomentumValue>,
        /// Skip the simulation cross-check.
        #[arg(long)]
        no_simulate: bool,
    },
    /// Continue the rotation angle around a loop; writes monodromy.json and theta.csv.
    #[command(allow_negative_numbers = true)]
    Monodromy {
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        f_max: Option<f64>,
        #[arg(long)]
        points_per_side: Option<usize>,
        /// Polygon vertex `H,F`; three or more replace the default contour.
        #[arg(long = "vertex", value_parser = parse_value, allow_hyphen_values = true)]
        vertex: Vec<MomentumValue>,
        #[arg(long)]
        per_edge: Option<usize>,
        #[arg(long)]
        no_svg: bool,
    },
    /// Render a CSV artifact (trajectory, diagram, classify or theta) as SVG.
    Plot {
        input: PathBuf,
        /// Defaults to `<out-dir>/<input stem>.svg`.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

fn parse_value(s: &str) -> Result<MomentumValue, String> {
    let (h, f) = s.split_once(',').ok_or_else(|| format!("expected H,F, got {s:?}"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
    Ok(MomentumValue::new(parse(h)?, parse(f)?))
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn resolve(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    set(&mut cfg.k, cli.k);
    set(&mut cfg.n, cli.n);
    set(&mut cfg.seed, cli.seed);
    match &cli.command {
        Command::Simulate { x, y, vx, vy, h, f, phase, sheet, random, reflections, max_time, points, no_svg } => {
            let s = &mut cfg.simulate;
            let current_sheet = match s.initial {
                InitialState::State { sheet, .. } | InitialState::Fiber { sheet, .. } => sheet,
                InitialState::Random { .. } => 1,
            };
            let sheet = sheet.unwrap_or(current_sheet);
            if let (Some(x), Some(y), Some(vx), Some(vy)) = (x, y, vx, vy) {
                s.initial = InitialState::State { sheet, x: *x, y: *y, vx: *vx, vy: *vy };
            } else if let (Some(h), Some(f)) = (h, f) {
                s.initial = InitialState::Fiber { sheet, h: *h, f: *f, phase: phase.unwrap_or(0.0) };
            } else if let Some(speed) = random {
                s.initial = InitialState::Random { speed: *speed };
            } else {
                match &mut s.initial {
                    InitialState::State { sheet: sh, .. } | InitialState::Fiber { sheet: sh, .. } => *sh = sheet,
                    InitialState::Random { .. } => {}
                }
            }
            if reflections.is_some() {
                s.reflections = *reflections;
            }
            if max_time.is_some() {
                s.max_time = *max_time;
            }
            set(&mut s.points_per_segment, *points);
            if *no_svg {
                s.svg = false;
            }
        }
        Command::Diagram { f_min, f_max, resolution, overlay, h_min, h_max, show_loop } => {
            let d = &mut cfg.diagram;
            set(&mut d.f_min, *f_min);
            set(&mut d.f_max, *f_max);
            set(&mut d.resolution, *resolution);
            set(&mut d.overlay, *overlay);
            set(&mut d.h_min, *h_min);
            set(&mut d.h_max, *h_max);
            d.show_loop |= *show_loop;
        }
        Command::Classify { at, h_min, h_max, f_min, f_max, per_axis, random } => {
            let c = &mut cfg.classify;
            if !at.is_empty() {
                c.values = at.clone();
            }
            set(&mut c.h_min, *h_min);
            set(&mut c.h_max, *h_max);
            set(&mut c.f_min, *f_min);
            set(&mut c.f_max, *f_max);
            set(&mut c.per_axis, *per_axis);
            set(&mut c.random, *random);
        }
        Command::Eigen { lambda, mu } => {
            set(&mut cfg.eigen.lambda, *lambda);
            set(&mut cfg.eigen.mu, *mu);
        }
        Command::Rotation { at, no_simulate } => {
            if !at.is_empty() {
                cfg.rotation.values = at.clone();
            }
            if *no_simulate {
                cfg.rotation.simulate = false;
            }
        }
        Command::Monodromy { c, f_max, points_per_side, vertex, per_edge, no_svg } => {
            let m = &mut cfg.monodromy;
            set(&mut m.c, *c);
            set(&mut m.f_max, *f_max);
            set(&mut m.points_per_side, *points_per_side);
            if !vertex.is_empty() {
                m.vertices = vertex.clone();
            }
            set(&mut m.per_edge, *per_edge);
            if *no_svg {
                m.svg = false;
            }
        }
        Command::Plot { .. } => {}
    }
    cfg.table()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let cfg = resolve(cli)?;
    let out = Output::new(cli.out_dir.clone())?;
    match &cli.command {
        Command::Simulate { .. } => commands::simulate_cmd(&cfg, &out),
        Command::Diagram { .. } => commands::diagram_cmd(&cfg, &out),
        Command::Classify { .. } => commands::classify_cmd(&cfg, &out),
        Command::Eigen { .. } => commands::eigen_cmd(&cfg, &out),
        Command::Rotation { .. } => commands::rotation_cmd(&cfg, &out),
        Command::Monodromy { .. } => commands::monodromy_cmd(&cfg, &out),
        Command::Plot { input, output } => commands::plot_cmd(&cfg, &out, input, output.as_deref()).map(|_| ()),
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<hookebook::Error>() {
        return if e.is_validation() { 2 } else { 3 };
    }
    if err.is::<ConfigError>() || err.is::<UsageError>() {
        return 2;
    }
    1
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if let Some(usage) = err.downcast_ref::<UsageError>() {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(usage.command) {
                    eprintln!("\n{}", sub.render_usage());
                }
            }
            ExitCode::from(exit_code(&err))
        }
    }
}
