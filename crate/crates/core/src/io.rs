//! Flat-file formats: CSV tables, JSON reports and SVG figures.
//!
//! CSV floats are written with 17 significant digits so every value read
//! back is bit-identical to the one written.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::dynamics::TrajectorySegment;
use crate::error::{Error, Result};
use crate::linearization::{PencilSpectrum, SpectrumClass};
use crate::model::{BookTable, MomentumValue};
use crate::momentum::{momentum_map, BifurcationDiagram, FiberClass};
use crate::monodromy::{MonodromyReport, ThetaSample};

pub const TRAJECTORY_HEADER: [&str; 9] = ["segment", "sheet", "t", "x", "y", "vx", "vy", "h", "f"];
pub const DIAGRAM_HEADER: [&str; 3] = ["f", "h_parabola", "singular"];
pub const THETA_HEADER: [&str; 6] = ["arc_index", "h", "f", "T_r", "dphi", "theta_unwrapped"];
pub const CLASSIFY_HEADER: [&str; 4] = ["h", "f", "class", "pinches"];

/// Full-precision scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn parse_f64(field: &str) -> Result<f64> {
    field.trim().parse().map_err(|_| Error::Parse(format!("not a number: {field:?}")))
}

fn parse_usize(field: &str) -> Result<usize> {
    field.trim().parse().map_err(|_| Error::Parse(format!("not an index: {field:?}")))
}

fn check_header<R: Read>(reader: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let header = reader.headers().map_err(csv_err)?;
    if header.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse(format!("expected header {expected:?}, got {header:?}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub segment: usize,
    pub sheet: usize,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    pub h: f64,
    pub f: f64,
}

/// Flattens segments into rows, `points_per_segment` evenly spaced states
/// per segment (endpoints included), with the global time.
pub fn trajectory_rows(table: &BookTable, segments: &[TrajectorySegment], points_per_segment: usize) -> Vec<TrajectoryRow> {
    let k = table.k();
    let points = points_per_segment.max(2);
    let mut rows = Vec::with_capacity(segments.len() * points);
    let mut t0 = 0.0;
    for (i, seg) in segments.iter().enumerate() {
        for j in 0..points {
            let dt = seg.duration * j as f64 / (points - 1) as f64;
            let s = seg.state_at(dt, k);
            let m = momentum_map(&s, k);
            rows.push(TrajectoryRow {
                segment: i,
                sheet: s.sheet,
                t: t0 + dt,
                x: s.x,
                y: s.y,
                vx: s.vx,
                vy: s.vy,
                h: m.h,
                f: m.f,
            });
        }
        t0 += seg.duration;
    }
    rows
}

pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRAJECTORY_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([
            r.segment.to_string(),
            r.sheet.to_string(),
            fmt_f64(r.t),
            fmt_f64(r.x),
            fmt_f64(r.y),
            fmt_f64(r.vx),
            fmt_f64(r.vy),
            fmt_f64(r.h),
            fmt_f64(r.f),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &TRAJECTORY_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            Ok(TrajectoryRow {
                segment: parse_usize(&rec[0])?,
                sheet: parse_usize(&rec[1])?,
                t: parse_f64(&rec[2])?,
                x: parse_f64(&rec[3])?,
                y: parse_f64(&rec[4])?,
                vx: parse_f64(&rec[5])?,
                vy: parse_f64(&rec[6])?,
                h: parse_f64(&rec[7])?,
                f: parse_f64(&rec[8])?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagramRow {
    pub f: f64,
    pub h: f64,
    /// The isolated focus-focus value rather than a parabola sample.
    pub singular: bool,
}

pub fn diagram_rows(diagram: &BifurcationDiagram) -> Vec<DiagramRow> {
    let mut rows: Vec<DiagramRow> =
        diagram.parabola.iter().map(|&(f, h)| DiagramRow { f, h, singular: false }).collect();
    rows.push(DiagramRow { f: diagram.isolated.f, h: diagram.isolated.h, singular: true });
    rows
}

pub fn write_diagram_csv<W: Write>(out: W, rows: &[DiagramRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIAGRAM_HEADER).map_err(csv_err)?;
    for r in rows {
        w.write_record([fmt_f64(r.f), fmt_f64(r.h), u8::from(r.singular).to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_diagram_csv<R: Read>(input: R) -> Result<Vec<DiagramRow>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &DIAGRAM_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let singular = match rec[2].trim() {
                "0" => false,
                "1" => true,
                other => return Err(Error::Parse(format!("bad singular flag {other:?}"))),
            };
            Ok(DiagramRow { f: parse_f64(&rec[0])?, h: parse_f64(&rec[1])?, singular })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedValue {
    pub h: f64,
    pub f: f64,
    pub class: FiberClass,
}

fn class_name(c: &FiberClass) -> (&'static str, usize) {
    match c {
        FiberClass::OutsideImage => ("OutsideImage", 0),
        FiberClass::AtomACircle => ("AtomACircle", 0),
        FiberClass::RegularTorus => ("RegularTorus", 0),
        FiberClass::PinchedTorus { pinches } => ("PinchedTorus", *pinches),
        FiberClass::FocusFocusPoint => ("FocusFocusPoint", 0),
    }
}

pub fn write_classify_csv<W: Write>(out: W, rows: &[ClassifiedValue]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CLASSIFY_HEADER).map_err(csv_err)?;
    for r in rows {
        let (name, pinches) = class_name(&r.class);
        w.write_record([fmt_f64(r.h), fmt_f64(r.f), name.to_string(), pinches.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_classify_csv<R: Read>(input: R) -> Result<Vec<ClassifiedValue>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &CLASSIFY_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let class = match rec[2].trim() {
                "OutsideImage" => FiberClass::OutsideImage,
                "AtomACircle" => FiberClass::AtomACircle,
                "RegularTorus" => FiberClass::RegularTorus,
                "PinchedTorus" => FiberClass::PinchedTorus { pinches: parse_usize(&rec[3])? },
                "FocusFocusPoint" => FiberClass::FocusFocusPoint,
                other => return Err(Error::Parse(format!("unknown fiber class {other:?}"))),
            };
            Ok(ClassifiedValue { h: parse_f64(&rec[0])?, f: parse_f64(&rec[1])?, class })
        })
        .collect()
}

pub fn write_theta_csv<W: Write>(out: W, samples: &[ThetaSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(THETA_HEADER).map_err(csv_err)?;
    for s in samples {
        w.write_record([
            s.arc_index.to_string(),
            fmt_f64(s.h),
            fmt_f64(s.f),
            fmt_f64(s.radial_period),
            fmt_f64(s.angular_advance),
            fmt_f64(s.theta_unwrapped),
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_theta_csv<R: Read>(input: R) -> Result<Vec<ThetaSample>> {
    let mut reader = csv::Reader::from_reader(input);
    check_header(&mut reader, &THETA_HEADER)?;
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            Ok(ThetaSample {
                arc_index: parse_usize(&rec[0])?,
                h: parse_f64(&rec[1])?,
                f: parse_f64(&rec[2])?,
                radial_period: parse_f64(&rec[3])?,
                angular_advance: parse_f64(&rec[4])?,
                theta_unwrapped: parse_f64(&rec[5])?,
            })
        })
        .collect()
}

/// JSON form of a pencil spectrum; eigenvalues as `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub k: f64,
    pub lambda: f64,
    pub mu: f64,
    pub eigenvalues: Vec<[f64; 2]>,
    pub classification: SpectrumClass,
}

impl From<&PencilSpectrum> for SpectrumReport {
    fn from(s: &PencilSpectrum) -> Self {
        Self {
            k: s.k,
            lambda: s.lambda,
            mu: s.mu,
            eigenvalues: s.eigenvalues.iter().map(|z| [z.re, z.im]).collect(),
            classification: s.classification,
        }
    }
}

pub fn read_spectrum_json<R: Read>(input: R) -> Result<SpectrumReport> {
    serde_json::from_reader(input).map_err(|e| Error::Parse(e.to_string()))
}

pub fn read_monodromy_json<R: Read>(input: R) -> Result<MonodromyReport> {
    serde_json::from_reader(input).map_err(|e| Error::Parse(e.to_string()))
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Parse(e.to_string()))
}

const SHEET_COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn svg_open(width: f64, height: f64) -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" viewBox=\"0 0 {width:.0} {height:.0}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

/// One panel per sheet: the boundary circle, the inner circle `r0`, and the
/// part of the orbit lying on that sheet.
pub fn trajectory_svg(table: &BookTable, rows: &[TrajectoryRow], inner_radius: Option<f64>) -> String {
    let panel = 320.0;
    let scale = 140.0;
    let n = table.sheets();
    let mut svg = svg_open(panel * n as f64, panel + 30.0);
    for sheet in 1..=n {
        let cx = panel * (sheet as f64 - 0.5);
        let cy = panel / 2.0 + 20.0;
        let _ = writeln!(svg, "<text x=\"{cx:.1}\" y=\"16\" text-anchor=\"middle\" font-size=\"13\">sheet {sheet}</text>");
        let _ = writeln!(
            svg,
            "<circle cx=\"{cx:.1}\" cy=\"{cy:.1}\" r=\"{scale:.1}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>"
        );
        if let Some(r0) = inner_radius.filter(|r| *r > 0.0) {
            let _ = writeln!(
                svg,
                "<circle cx=\"{cx:.1}\" cy=\"{cy:.1}\" r=\"{:.3}\" fill=\"none\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>",
                r0 * scale
            );
        }
        let color = SHEET_COLORS[(sheet - 1) % SHEET_COLORS.len()];
        let mut current: Option<usize> = None;
        let mut points = String::new();
        let flush = |svg: &mut String, points: &mut String| {
            if !points.is_empty() {
                let _ = writeln!(
                    svg,
                    "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1\"/>",
                    points.trim_end()
                );
                points.clear();
            }
        };
        for r in rows.iter().filter(|r| r.sheet == sheet) {
            if current != Some(r.segment) {
                flush(&mut svg, &mut points);
                current = Some(r.segment);
            }
            let _ = write!(points, "{:.3},{:.3} ", cx + scale * r.x, cy - scale * r.y);
        }
        flush(&mut svg, &mut points);
    }
    svg.push_str("</svg>\n");
    svg
}

/// Bifurcation diagram with `f` on the horizontal axis and `h` vertical,
/// optionally overlaid with classified grid values and a loop.
pub fn diagram_svg(rows: &[DiagramRow], overlay: &[ClassifiedValue], contour: &[MomentumValue]) -> String {
    let (w, hgt, margin) = (480.0, 480.0, 40.0);
    let fs: Vec<f64> = rows.iter().map(|r| r.f).collect();
    let hs: Vec<f64> = rows.iter().map(|r| r.h).collect();
    let lo = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = |v: &[f64]| v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (f_lo, f_hi) = (lo(&fs).min(-0.1), hi(&fs).max(0.1));
    let (h_lo, h_hi) = (lo(&hs).min(-0.1), hi(&hs).max(0.1));
    let px = |f: f64| margin + (f - f_lo) / (f_hi - f_lo) * (w - 2.0 * margin);
    let py = |h: f64| hgt - margin - (h - h_lo) / (h_hi - h_lo) * (hgt - 2.0 * margin);

    let mut svg = svg_open(w, hgt);
    let _ = writeln!(
        svg,
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"gray\"/>",
        px(f_lo),
        py(0.0),
        px(f_hi),
        py(0.0)
    );
    let _ = writeln!(
        svg,
        "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"gray\"/>",
        px(0.0),
        py(h_lo),
        px(0.0),
        py(h_hi)
    );
    let _ = writeln!(svg, "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\">f</text>", w - margin + 8.0, py(0.0) + 4.0);
    let _ = writeln!(svg, "<text x=\"{:.1}\" y=\"{:.1}\" font-size=\"13\">h</text>", px(0.0) + 6.0, margin - 10.0);
    for c in overlay {
        let color = match c.class {
            FiberClass::OutsideImage => continue,
            FiberClass::RegularTorus => "#c6dbef",
            FiberClass::AtomACircle => "#08519c",
            FiberClass::PinchedTorus { .. } | FiberClass::FocusFocusPoint => "#a50f15",
        };
        let _ = writeln!(svg, "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"1.2\" fill=\"{color}\"/>", px(c.f), py(c.h));
    }
    let parabola: String = rows
        .iter()
        .filter(|r| !r.singular)
        .map(|r| format!("{:.3},{:.3}", px(r.f), py(r.h)))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(svg, "<polyline points=\"{parabola}\" fill=\"none\" stroke=\"black\" stroke-width=\"2\"/>");
    if !contour.is_empty() {
        let pts: String = contour
            .iter()
            .chain(contour.first())
            .map(|p| format!("{:.3},{:.3}", px(p.f), py(p.h)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(svg, "<polyline points=\"{pts}\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1.5\"/>");
    }
    for r in rows.iter().filter(|r| r.singular) {
        let _ = writeln!(
            svg,
            "<circle cx=\"{:.3}\" cy=\"{:.3}\" r=\"4\" fill=\"#a50f15\" stroke=\"black\"/>",
            px(r.f),
            py(r.h)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// `theta_unwrapped` against arc index, with dotted guides every `2 pi`.
pub fn theta_svg(samples: &[ThetaSample]) -> String {
    let (w, hgt, margin) = (560.0, 320.0, 40.0);
    let mut svg = svg_open(w, hgt);
    if samples.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let tau = std::f64::consts::TAU;
    let lo = samples.iter().map(|s| s.theta_unwrapped).fold(f64::INFINITY, f64::min);
    let hi = samples.iter().map(|s| s.theta_unwrapped).fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = ((lo / tau).floor() * tau, ((hi / tau).ceil() * tau).max(lo + tau));
    let last = samples.len().max(2) - 1;
    let px = |i: usize| margin + i as f64 / last as f64 * (w - 2.0 * margin);
    let py = |t: f64| hgt - margin - (t - lo) / (hi - lo) * (hgt - 2.0 * margin);
    let mut level = lo;
    while level <= hi + 1e-12 {
        let _ = writeln!(
            svg,
            "<line x1=\"{:.3}\" y1=\"{:.3}\" x2=\"{:.3}\" y2=\"{:.3}\" stroke=\"gray\" stroke-dasharray=\"2 3\"/>",
            px(0),
            py(level),
            px(last),
            py(level)
        );
        level += tau;
    }
    let pts: String = samples
        .iter()
        .enumerate()
        .map(|(i, s)| format!("{:.3},{:.3}", px(i), py(s.theta_unwrapped)))
        .collect::<Vec<_>>()
        .join(" ");
    let _ = writeln!(svg, "<polyline points=\"{pts}\" fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\"/>");
    svg.push_str("</svg>\n");
    svg
}
