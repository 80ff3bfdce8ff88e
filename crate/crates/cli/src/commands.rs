use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use hookebook::dynamics::{simulate, StopCondition};
use hookebook::io::{
    diagram_rows, diagram_svg, read_classify_csv, read_diagram_csv, read_theta_csv, read_trajectory_csv, theta_svg,
    to_json_pretty, trajectory_rows, trajectory_svg, write_classify_csv, write_diagram_csv, write_theta_csv,
    write_trajectory_csv, ClassifiedValue, SpectrumReport, CLASSIFY_HEADER, DIAGRAM_HEADER, THETA_HEADER,
    TRAJECTORY_HEADER,
};
use hookebook::linearization::pencil_eigenvalues;
use hookebook::model::BookTable;
use hookebook::momentum::{bifurcation_diagram, classify_fiber, inner_radius, momentum_map, state_on_fiber};
use hookebook::monodromy::{continue_theta, loop_around_origin, radial_period_quadrature, radial_period_simulation, Loop, PeriodSample};
use hookebook::{MomentumValue, PhaseState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{ConfigError, InitialState, RunConfig};

/// Missing or contradictory arguments; printed with the command's usage.
#[derive(Debug)]
pub struct UsageError {
    pub command: &'static str,
    pub message: String,
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for UsageError {}

pub struct Output {
    dir: PathBuf,
}

impl Output {
    pub fn new(dir: PathBuf) -> anyhow::Result<Self> {
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Self { dir })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn create(&self, name: &str) -> anyhow::Result<BufWriter<File>> {
        let path = self.path(name);
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(file))
    }

    fn text(&self, name: &str, body: &str) -> anyhow::Result<()> {
        let mut w = self.create(name)?;
        w.write_all(body.as_bytes())?;
        w.flush()?;
        Ok(())
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut body = to_json_pretty(value)?;
        body.push('\n');
        self.text(name, &body)
    }

    fn config(&self, command: &str, cfg: &RunConfig) -> anyhow::Result<()> {
        self.json(&format!("{command}.config.json"), cfg)
    }
}

fn rng(cfg: &RunConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(cfg.seed)
}

fn initial_state(cfg: &RunConfig, table: &BookTable) -> anyhow::Result<PhaseState> {
    Ok(match cfg.simulate.initial {
        InitialState::State { sheet, x, y, vx, vy } => {
            table.check_sheet(sheet)?;
            PhaseState::new(sheet, x, y, vx, vy)
        }
        InitialState::Fiber { sheet, h, f, phase } => state_on_fiber(table, sheet, h, f, phase)?,
        InitialState::Random { speed } => {
            if !(speed > 0.0) {
                return Err(ConfigError(format!("random speed must be positive, got {speed}")).into());
            }
            let mut rng = rng(cfg);
            let r = rng.gen_range(0.0f64..1.0).sqrt() * table.radius();
            let a = rng.gen_range(0.0..std::f64::consts::TAU);
            let vx = rng.gen_range(-speed..speed);
            let vy = rng.gen_range(-speed..speed);
            PhaseState::new(1, r * a.cos(), r * a.sin(), vx, vy)
        }
    })
}

pub fn simulate_cmd(cfg: &RunConfig, out: &Output) -> anyhow::Result<()> {
    let table = cfg.table()?;
    let sim = &cfg.simulate;
    let stop = StopCondition { max_reflections: sim.reflections, max_time: sim.max_time };
    if stop.max_reflections.is_none() && stop.max_time.is_none() {
        return Err(UsageError {
            command: "simulate",
            message: "no stop condition: give --reflections and/or --max-time".into(),
        }
        .into());
    }
    let s0 = initial_state(cfg, &table)?;
    let segments = simulate(&table, &s0, stop)?;
    let rows = trajectory_rows(&table, &segments, sim.points_per_segment);
    write_trajectory_csv(out.create("trajectory.csv")?, &rows)?;
    let m = momentum_map(&s0, table.k());
    let r0 = inner_radius(m.h, m.f, table.k()).ok();
    if sim.svg {
        out.text("trajectory.svg", &trajectory_svg(&table, &rows, r0))?;
    }
    out.config("simulate", cfg)?;
    let reflections = segments.iter().filter(|s| s.reflected).count();
    println!("{} segments, {reflections} reflections, h = {:.6}, f = {:.6}", segments.len(), m.h, m.f);
    if let Some(r0) = r0 {
        println!("inner radius r0 = {r0:.9}");
    }
    Ok(())
}

fn grid(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n <= 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

fn classify_grid(table: &BookTable, h: (f64, f64), f: (f64, f64), per_axis: usize) -> Vec<ClassifiedValue> {
    let mut values = Vec::with_capacity(per_axis * per_axis);
    for i in 0..per_axis {
        let hv = grid(h.0, h.1, per_axis, i);
        for j in 0..per_axis {
            let fv = grid(f.0, f.1, per_axis, j);
            values.push(ClassifiedValue { h: hv, f: fv, class: classify_fiber(table, hv, fv) });
        }
    }
    values
}

fn monodromy_loop(cfg: &RunConfig, table: &BookTable) -> anyhow::Result<Loop> {
    let m = &cfg.monodromy;
    Ok(if m.vertices.is_empty() {
        loop_around_origin(table, m.c, m.f_max, m.points_per_side)?
    } else {
        Loop::polygon(&m.vertices, m.per_edge)?
    })
}

pub fn diagram_cmd(cfg: &RunConfig, out: &Output) -> anyhow::Result<()> {
    let table = cfg.table()?;
    let d = &cfg.diagram;
    let diagram = bifurcation_diagram(table.k(), d.f_min, d.f_max, d.resolution)?;
    let rows = diagram_rows(&diagram);
    write_diagram_csv(out.create("diagram.csv")?, &rows)?;
    let overlay = if d.overlay > 0 {
        let values = classify_grid(&table, (d.h_min, d.h_max), (d.f_min, d.f_max), d.overlay);
        write_classify_csv(out.create("classify.csv")?, &values)?;
        values
    } else {
        Vec::new()
    };
    let contour = if d.show_loop { monodromy_loop(cfg, &table)?.waypoints } else { Vec::new() };
    out.text("diagram.svg", &diagram_svg(&rows, &overlay, &contour))?;
    out.config("diagram", cfg)?;
    let v = diagram.vertex();
    println!("parabola vertex (f, h) = ({}, {}), isolated point (f, h) = ({}, {})", v.f, v.h, diagram.isolated.f, diagram.isolated.h);
    Ok(())
}

pub fn classify_cmd(cfg: &RunConfig, out: &Output) -> anyhow::Result<()> {
    let table = cfg.table()?;
    let c = &cfg.classify;
    let values = if !c.values.is_empty() {
        c.values
            .iter()
            .map(|v| ClassifiedValue { h: v.h, f: v.f, class: classify_fiber(&table, v.h, v.f) })
            .collect()
    } else if c.random > 0 {
        let mut rng = rng(cfg);
        (0..c.random)
            .map(|_| {
                let h = rng.gen_range(c.h_min..=c.h_max);
                let f = rng.gen_range(c.f_min..=c.f_max);
                ClassifiedValue { h, f, class: classify_fiber(&table, h, f) }
            })
            .collect()
    } else {
        classify_grid(&table, (c.h_min, c.h_max), (c.f_min, c.f_max), c.per_axis)
    };
    write_classify_csv(out.create("classify.csv")?, &values)?;
    out.config("classify", cfg)?;
    if values.len() <= 8 {
        for v in &values {
            println!("h = {}, f = {}: {:?}", v.h, v.f, v.class);
        }
    } else {
        let singular = values.iter().filter(|v| v.class.is_singular()).count();
        println!("{} values classified, {singular} singular", values.len());
    }
    Ok(())
}

pub fn eigen_cmd(cfg: &RunConfig, out: &Output) -> anyhow::Result<()> {
    let table = cfg.table()?;
    let spectrum = pencil_eigenvalues(table.k(), cfg.eigen.lambda, cfg.eigen.mu)?;
    let report = SpectrumReport::from(&spectrum);
    out.json("spectrum.json", &report)?;
    out.config("eigen", cfg)?;
    for z in &spectrum.eigenvalues {
        println!("{:+.12} {:+.12}i", z.re, z.im);
    }
    println!("{:?}", spectrum.classification);
    Ok(())
}

#[derive(Debug, Serialize)]
struct RotationRow {
    h: f64,
    f: f64,
    quadrature: PeriodSample,
    simulation: Option<PeriodSample>,
}

#[derive(Debug, Serialize)]
struct RotationReport {
    k: f64,
    sheets: usize,
    rows: Vec<RotationRow>,
}

pub fn rotation_cmd(cfg: &RunConfig, out: &Output) -> anyhow::Result<()> {
    let table = cfg.table()?;
    if cfg.rotation.values.is_empty() {
        return Err(UsageError { command: "rotation", message: "no values: give --at H,F".into() }.into());
    }
    let mut rows = Vec::with_capacity(cfg.rotation.values.len());
    for v in &cfg.rotation.values {
        let quadrature = radial_period_quadrature(&table, v.h, v.f)?;
        let simulation = if cfg.rotation.simulate { Some(radial_period_simulation(&table, v.h, v.f)?) } else { None };
        println!(
            "h = {}, f = {}: T_r = {:.12}, dphi = {:.12}, theta = {:.12}",
            v.h, v.f, quadrature.radial_period, quadrature.angular_advance, quadrature.theta
        );
        if let Some(s) = simulation {
            println!("  simulated: T_r = {:.12}, dphi = {:.12}", s.radial_period, s.angular_advance);
        }
        rows.push(RotationRow { h: v.h, f: v.f, quadrature, simulation });
    }
    out.json("rotation.json", &RotationReport { k: table.k(), sheets: table.sheets(), rows })?;
    out.config("rotation", cfg)?;
    Ok(())
}

pub fn monodromy_cmd(cfg: &RunConfig, out: &Output) -> anyhow::Result<()> {
    let table = cfg.table()?;
    let lp = monodromy_loop(cfg, &table)?;
    let report = continue_theta(&table, &lp)?;
    out.json("monodromy.json", &report)?;
    write_theta_csv(out.create("theta.csv")?, &report.samples)?;
    if cfg.monodromy.svg {
        out.text("theta.svg", &theta_svg(&report.samples))?;
    }
    out.config("monodromy", cfg)?;
    let w = lp.winding_number(MomentumValue::new(0.0, 0.0));
    println!("winding number {w}, delta theta / 2pi = {:.9}, m = {}", report.delta_theta / std::f64::consts::TAU, report.m);
    println!("monodromy matrix {:?}", report.monodromy_matrix);
    println!("labels h<0: {:?}, h>0: {:?}", report.labels.h_negative, report.labels.h_positive);
    Ok(())
}

fn header_of(path: &Path) -> anyhow::Result<Vec<String>> {
    let mut text = String::new();
    File::open(path)
        .with_context(|| format!("opening {}", path.display()))?
        .take(4096)
        .read_to_string(&mut text)?;
    let line = text.lines().next().unwrap_or("");
    Ok(line.split(',').map(|s| s.trim().to_string()).collect())
}

/// Renders one of our CSV artifacts as SVG, picking the plot from its header.
pub fn plot_cmd(cfg: &RunConfig, out: &Output, input: &Path, output: Option<&Path>) -> anyhow::Result<PathBuf> {
    let header = header_of(input)?;
    let is = |expected: &[&str]| header.iter().map(String::as_str).eq(expected.iter().copied());
    let open = || -> anyhow::Result<BufReader<File>> { Ok(BufReader::new(File::open(input)?)) };
    let svg = if is(&TRAJECTORY_HEADER) {
        let rows = read_trajectory_csv(open()?)?;
        let sheets = rows.iter().map(|r| r.sheet).max().unwrap_or(1).max(cfg.n);
        let table = BookTable::new(cfg.radius, cfg.k, sheets)?;
        let r0 = rows.first().and_then(|r| inner_radius(r.h, r.f, table.k()).ok());
        trajectory_svg(&table, &rows, r0)
    } else if is(&DIAGRAM_HEADER) {
        diagram_svg(&read_diagram_csv(open()?)?, &[], &[])
    } else if is(&CLASSIFY_HEADER) {
        let values = read_classify_csv(open()?)?;
        let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v.f), hi.max(v.f)));
        let (lo, hi) = if lo < hi { (lo, hi) } else { (-1.5, 1.5) };
        let diagram = bifurcation_diagram(cfg.k, lo, hi, 301)?;
        diagram_svg(&diagram_rows(&diagram), &values, &[])
    } else if is(&THETA_HEADER) {
        theta_svg(&read_theta_csv(open()?)?)
    } else {
        return Err(ConfigError(format!("{}: unrecognised header {header:?}", input.display())).into());
    };
    let target = match output {
        Some(p) => p.to_path_buf(),
        None => {
            let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
            out.path(&format!("{stem}.svg"))
        }
    };
    fs::write(&target, svg).with_context(|| format!("writing {}", target.display()))?;
    println!("wrote {}", target.display());
    Ok(target)
}
