//! Radial periods, angular advances and the monodromy of the torus fibration
//! around the focus-focus value `(h, f) = (0, 0)`.
//!
//! On a fiber over a regular value `(h, f)` the radius oscillates between the
//! inner radius `r0` and the boundary, with `r'^2 = 2h - k r^2 - f^2 / r^2`.
//! One radial period contains exactly one reflection, and the polar angle
//! advances by `dphi`. On the n-sheeted book the Liouville torus closes only
//! after `n` radial periods, so the continued quantity is `theta = n dphi`.
//! Continuing `theta` around a loop enclosing the focus-focus value picks up
//! `2 pi m`, and `m` is the monodromy integer.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dynamics::{simulate, StopCondition};
use crate::error::{Error, Result};
use crate::model::{BookTable, MomentumValue};
use crate::momentum::{classify_fiber, inner_radius, state_on_fiber, FiberClass};
use crate::quadrature;

const QUAD_TOL: f64 = 1e-11;
const QUAD_MAX_PANELS: usize = 4000;

/// Largest accepted distance of `delta theta / 2 pi` from an integer.
pub const CONTINUATION_RESIDUAL_MAX: f64 = 0.05;

/// Waypoint steps are bisected until `theta` moves by less than this. The
/// step in `theta` is `n` times the step in `dphi` reduced modulo `2 pi`, so
/// `theta` is lifted through `dphi` and the `2 pi n` branch jumps of `theta`
/// cannot alias.
pub const UNWRAP_STEP_MAX: f64 = FRAC_PI_2;

pub const DEFAULT_REFINE_DEPTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodSample {
    pub h: f64,
    pub f: f64,
    /// Time for `r` to go `r0 -> 1 -> r0`.
    pub radial_period: f64,
    /// Polar-angle advance over one radial period; has the sign of `f`.
    pub angular_advance: f64,
    /// `n * angular_advance`, the advance along the sheet-closing cycle.
    pub theta: f64,
    /// Estimated absolute error of the period integrals (0 for closed forms).
    pub error: f64,
}

fn require_regular(table: &BookTable, h: f64, f: f64) -> Result<()> {
    match classify_fiber(table, h, f) {
        FiberClass::RegularTorus => Ok(()),
        FiberClass::OutsideImage => Err(Error::OutsideImage { h, f }),
        _ => Err(Error::SingularValue { h, f }),
    }
}

/// Radial period and angular advance by quadrature.
///
/// With `s = r^2` both integrals run over `[r0^2, 1]` and have an inverse
/// square-root singularity at the turning point; the substitution
/// `s = r0^2 + (1 - r0^2) sin^2(u)` removes it. Diameter orbits (`f = 0`,
/// `h > 0`) and radial orbits (`f = 0`, `h < 0`) use closed forms; the
/// angle of a diameter orbit jumps by `+pi` at the center.
pub fn radial_period_quadrature(table: &BookTable, h: f64, f: f64) -> Result<PeriodSample> {
    require_regular(table, h, f)?;
    let omega = table.omega();
    let n = table.sheets() as f64;

    if f == 0.0 {
        let (radial_period, angular_advance) = if h > 0.0 {
            (2.0 / omega * (omega / (2.0 * h).sqrt()).asinh(), PI)
        } else {
            (2.0 / omega * (omega / (-2.0 * h).sqrt()).acosh(), 0.0)
        };
        return Ok(PeriodSample { h, f, radial_period, angular_advance, theta: n * angular_advance, error: 0.0 });
    }

    let k = table.k();
    let r0 = inner_radius(h, f, k)?;
    let s0 = r0 * r0;
    // other root of -k s^2 + 2h s - f^2, always <= 0
    let s_neg = f * f / (k * s0);
    let width = 1.0 - s0;
    let jacobian = move |u: f64| {
        let s = s0 + width * u.sin().powi(2);
        (s, 2.0 * width.sqrt() * u.cos() / (omega * (s - s_neg).sqrt()))
    };
    let period = quadrature::integrate(|u| jacobian(u).1, 0.0, FRAC_PI_2, QUAD_TOL, QUAD_TOL, QUAD_MAX_PANELS)?;
    let advance = quadrature::integrate(
        |u| {
            let (s, g) = jacobian(u);
            g / s
        },
        0.0,
        FRAC_PI_2,
        QUAD_TOL,
        QUAD_TOL,
        QUAD_MAX_PANELS,
    )?;
    let angular_advance = f * advance.value;
    Ok(PeriodSample {
        h,
        f,
        radial_period: period.value,
        angular_advance,
        theta: n * angular_advance,
        error: period.error.max(f.abs() * advance.error),
    })
}

/// Radial period and angular advance measured on a simulated trajectory:
/// the time and polar-angle difference between successive radial minima
/// (successive boundary hits for `f = 0`, where the minimum is the center).
pub fn radial_period_simulation(table: &BookTable, h: f64, f: f64) -> Result<PeriodSample> {
    require_regular(table, h, f)?;
    let k = table.k();
    let start = state_on_fiber(table, 1, h, f, 0.0)?;
    let segments = simulate(table, &start, StopCondition::reflections(3))?;
    let (a, b) = (&segments[1], &segments[2]);

    let (period, raw) = if f == 0.0 {
        (b.duration, b.end.angle() - a.end.angle())
    } else {
        let (ta, ma) = a.radial_minimum(k).ok_or(Error::SingularValue { h, f })?;
        let (tb, mb) = b.radial_minimum(k).ok_or(Error::SingularValue { h, f })?;
        (a.duration - ta + tb, mb.angle() - ma.angle())
    };
    let angular_advance = if f >= 0.0 { raw.rem_euclid(TAU) } else { -(-raw).rem_euclid(TAU) };
    let n = table.sheets() as f64;
    Ok(PeriodSample { h, f, radial_period: period, angular_advance, theta: n * angular_advance, error: 0.0 })
}

/// Closed polyline in the `(h, f)` plane, traversed cyclically (the last
/// waypoint connects back to the first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Loop {
    pub waypoints: Vec<MomentumValue>,
}

impl Loop {
    /// Polygon through `vertices` with `per_edge` evenly spaced waypoints on
    /// each edge.
    pub fn polygon(vertices: &[MomentumValue], per_edge: usize) -> Result<Self> {
        if vertices.len() < 3 || per_edge < 1 {
            return Err(Error::InvalidParameter("a loop needs >= 3 vertices and >= 1 point per edge".into()));
        }
        let mut waypoints = Vec::with_capacity(vertices.len() * per_edge);
        for (i, a) in vertices.iter().enumerate() {
            let b = vertices[(i + 1) % vertices.len()];
            for j in 0..per_edge {
                let t = j as f64 / per_edge as f64;
                waypoints.push(MomentumValue::new(a.h + t * (b.h - a.h), a.f + t * (b.f - a.f)));
            }
        }
        Ok(Self { waypoints })
    }

    /// Winding number around `center`, counted counterclockwise in the plane
    /// with `f` as abscissa and `h` as ordinate.
    pub fn winding_number(&self, center: MomentumValue) -> i64 {
        let angle = |p: &MomentumValue| (p.h - center.h).atan2(p.f - center.f);
        let n = self.waypoints.len();
        let total: f64 = (0..n)
            .map(|i| wrap(angle(&self.waypoints[(i + 1) % n]) - angle(&self.waypoints[i])))
            .sum();
        (total / TAU).round() as i64
    }
}

/// The contour made of an arc of the constant-inner-radius parabola
/// `h = (f^2 + c^2 k) / (2c)` for `|f| <= f_max` and the segment at
/// `h = (f_max^2 + c^2 k) / (2c)` joining its endpoints.
///
/// Traversal is counterclockwise in the `(f, h)` plane: along the segment
/// from `f = f_max` down to `-f_max`, then back along the parabola.
pub fn loop_around_origin(table: &BookTable, c: f64, f_max: f64, points_per_side: usize) -> Result<Loop> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::InvalidParameter(format!("c must lie in (0, 1), got {c}")));
    }
    if !(f_max > 0.0) || points_per_side < 2 {
        return Err(Error::InvalidParameter("f_max must be positive and points_per_side >= 2".into()));
    }
    let k = table.k();
    let parabola = |f: f64| (f * f + c * c * k) / (2.0 * c);
    let h_right = parabola(f_max);
    if h_right <= 0.0 {
        return Err(Error::LoopNotEnclosing(format!(
            "closing segment at h = {h_right} does not pass to the right of the origin; need f_max > c sqrt(-k)"
        )));
    }
    let m = points_per_side;
    let mut waypoints = Vec::with_capacity(2 * m);
    for i in 0..m {
        let f = f_max - 2.0 * f_max * i as f64 / m as f64;
        waypoints.push(MomentumValue::new(h_right, f));
    }
    for i in 0..m {
        let f = -f_max + 2.0 * f_max * i as f64 / m as f64;
        waypoints.push(MomentumValue::new(parabola(f), f));
    }
    let lp = Loop { waypoints };
    if let Some(bad) = lp.waypoints.iter().find(|p| classify_fiber(table, p.h, p.f) != FiberClass::RegularTorus) {
        return Err(Error::SingularValue { h: bad.h, f: bad.f });
    }
    let winding = lp.winding_number(MomentumValue::new(0.0, 0.0));
    if winding != 1 {
        return Err(Error::LoopNotEnclosing(format!("winding number {winding}")));
    }
    Ok(lp)
}

fn wrap(angle: f64) -> f64 {
    let a = angle.rem_euclid(TAU);
    if a > PI {
        a - TAU
    } else {
        a
    }
}

/// `theta` sample along the refined loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSample {
    pub arc_index: usize,
    pub h: f64,
    pub f: f64,
    pub radial_period: f64,
    pub angular_advance: f64,
    pub theta_unwrapped: f64,
}

/// A step along the loop across which the raw `theta` branch jumped by
/// `2 pi jump`; the continued cycle gains `jump` copies of the rotation cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchJump {
    pub arc_index: usize,
    pub h: f64,
    pub f: f64,
    pub jump: i64,
}

pub type IntMatrix2 = [[i64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HSign {
    Negative,
    Positive,
}

/// The `r` mark of a molecule edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum RLabel {
    Infinity,
    /// `num / den` in `[0, 1)`, reduced.
    Rational { num: i64, den: i64 },
}

impl fmt::Display for RLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RLabel::Infinity => write!(f, "inf"),
            RLabel::Rational { num: 0, .. } => write!(f, "0"),
            RLabel::Rational { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl From<RLabel> for String {
    fn from(r: RLabel) -> String {
        r.to_string()
    }
}

impl TryFrom<String> for RLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        let bad = || Error::Parse(format!("bad r label {s:?}"));
        match s.as_str() {
            "inf" => Ok(RLabel::Infinity),
            "0" => Ok(RLabel::Rational { num: 0, den: 1 }),
            other => {
                let (num, den) = other.split_once('/').ok_or_else(bad)?;
                Ok(RLabel::Rational {
                    num: num.trim().parse().map_err(|_| bad())?,
                    den: den.trim().parse().map_err(|_| bad())?,
                })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeLabel {
    pub r: RLabel,
    pub epsilon: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoleculeLabels {
    pub h_negative: MoleculeLabel,
    pub h_positive: MoleculeLabel,
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Marks `(r, epsilon)` read off a gluing matrix `[[a, b], [c, d]]`:
/// `r = a / b mod 1` and `epsilon = sign b` when `b != 0`, otherwise
/// `r = inf` and `epsilon = sign a`.
pub fn labels_from_gluing(matrix: &IntMatrix2) -> MoleculeLabel {
    let [[a, b], _] = *matrix;
    if b == 0 {
        return MoleculeLabel { r: RLabel::Infinity, epsilon: a.signum() };
    }
    let (a_pos, b_pos) = if b < 0 { (-a, -b) } else { (a, b) };
    let num = a_pos.rem_euclid(b_pos);
    let g = gcd(num, b_pos).max(1);
    MoleculeLabel { r: RLabel::Rational { num: num / g, den: b_pos / g }, epsilon: b.signum() }
}

/// Gluing matrix between the admissible bases of the two boundary tori of
/// an `A - A` molecule when the continued cycle gains `jump` rotation cycles
/// across `f = 0`: `lambda_+ = lambda_- + jump mu_-`, `mu_+ = -mu_-`.
pub fn gluing_matrix(jump: i64) -> IntMatrix2 {
    [[1, jump], [0, -1]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonodromyReport {
    pub k: f64,
    pub sheets: usize,
    #[serde(rename = "loop")]
    pub loop_: Loop,
    pub samples: Vec<ThetaSample>,
    pub jumps: Vec<BranchJump>,
    pub delta_theta: f64,
    pub m: i64,
    pub residual: f64,
    pub monodromy_matrix: IntMatrix2,
    pub gluing_matrix_hpos: IntMatrix2,
    pub gluing_matrix_hneg: IntMatrix2,
    pub labels: MoleculeLabels,
}

impl MonodromyReport {
    /// Total branch jump measured on the given side of `h = 0`.
    pub fn side_jump(&self, side: HSign) -> i64 {
        self.jumps
            .iter()
            .filter(|j| match side {
                HSign::Negative => j.h < 0.0,
                HSign::Positive => j.h > 0.0,
            })
            .map(|j| j.jump)
            .sum()
    }
}

/// Molecule marks on the isoenergy surfaces `h < 0` and `h > 0`, derived from
/// the branch jumps measured by [`continue_theta`].
pub fn molecule_labels(report: &MonodromyReport, side: HSign) -> MoleculeLabel {
    labels_from_gluing(&gluing_matrix(report.side_jump(side)))
}

/// Continues `theta` along `lp`, bisecting steps until the unwrapping is
/// unambiguous, and reads off the monodromy integer.
pub fn continue_theta(table: &BookTable, lp: &Loop) -> Result<MonodromyReport> {
    continue_theta_with_depth(table, lp, DEFAULT_REFINE_DEPTH)
}

pub fn continue_theta_with_depth(table: &BookTable, lp: &Loop, max_depth: usize) -> Result<MonodromyReport> {
    if lp.waypoints.len() < 3 {
        return Err(Error::InvalidParameter("loop needs at least 3 waypoints".into()));
    }
    let nodes = lp
        .waypoints
        .iter()
        .map(|p| radial_period_quadrature(table, p.h, p.f))
        .collect::<Result<Vec<_>>>()?;

    let mut refined = Vec::with_capacity(nodes.len() * 2);
    for i in 0..nodes.len() {
        let (a, b) = (nodes[i], nodes[(i + 1) % nodes.len()]);
        refined.push(a);
        refine_step(table, a, b, max_depth, &mut refined)?;
    }
    refined.push(nodes[0]);

    let n = table.sheets() as f64;
    let mut samples = Vec::with_capacity(refined.len());
    let mut jumps = Vec::new();
    let mut theta = refined[0].theta;
    for (idx, p) in refined.iter().enumerate() {
        if idx > 0 {
            let prev = refined[idx - 1];
            let raw = p.theta - prev.theta;
            let step = n * wrap(p.angular_advance - prev.angular_advance);
            let jump = ((step - raw) / TAU).round() as i64;
            if jump != 0 {
                jumps.push(BranchJump { arc_index: idx, h: 0.5 * (p.h + prev.h), f: 0.5 * (p.f + prev.f), jump });
            }
            theta += step;
        }
        samples.push(ThetaSample {
            arc_index: idx,
            h: p.h,
            f: p.f,
            radial_period: p.radial_period,
            angular_advance: p.angular_advance,
            theta_unwrapped: theta,
        });
    }

    let delta_theta = theta - refined[0].theta;
    let winds = delta_theta / TAU;
    let m = winds.round() as i64;
    let residual = (winds - m as f64).abs();
    if residual >= CONTINUATION_RESIDUAL_MAX {
        return Err(Error::Unwrap { h: refined[0].h, f: refined[0].f, depth: max_depth });
    }

    let gluing_matrix_hpos = gluing_matrix(jumps.iter().filter(|j| j.h > 0.0).map(|j| j.jump).sum());
    let gluing_matrix_hneg = gluing_matrix(jumps.iter().filter(|j| j.h < 0.0).map(|j| j.jump).sum());
    let labels = MoleculeLabels {
        h_negative: labels_from_gluing(&gluing_matrix_hneg),
        h_positive: labels_from_gluing(&gluing_matrix_hpos),
    };
    Ok(MonodromyReport {
        k: table.k(),
        sheets: table.sheets(),
        loop_: lp.clone(),
        samples,
        jumps,
        delta_theta,
        m,
        residual,
        monodromy_matrix: [[1, 0], [m, 1]],
        gluing_matrix_hpos,
        gluing_matrix_hneg,
        labels,
    })
}

/// Pushes the interior samples needed between `a` and `b` (exclusive).
fn refine_step(table: &BookTable, a: PeriodSample, b: PeriodSample, depth: usize, out: &mut Vec<PeriodSample>) -> Result<()> {
    let n = table.sheets() as f64;
    let fine = n * wrap(b.angular_advance - a.angular_advance).abs() < UNWRAP_STEP_MAX;
    if fine {
        return Ok(());
    }
    let (h, f) = (0.5 * (a.h + b.h), 0.5 * (a.f + b.f));
    if depth == 0 {
        return Err(Error::Unwrap { h, f, depth: DEFAULT_REFINE_DEPTH });
    }
    let mid = radial_period_quadrature(table, h, f)?;
    refine_step(table, a, mid, depth - 1, out)?;
    out.push(mid);
    refine_step(table, mid, b, depth - 1, out)
}

/// Richardson-extrapolated limit of `theta(h, f)` as `f -> 0+`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaLimit {
    pub h: f64,
    pub samples: Vec<(f64, f64)>,
    pub extrapolated: f64,
    /// Difference between the last two diagonal entries of the tableau.
    pub spread: f64,
}

/// Samples `theta` at `f = f0 2^-j`, `j = 0..levels`, and extrapolates to
/// `f = 0` assuming an expansion in integer powers of `f`.
pub fn theta_limit(table: &BookTable, h: f64, f0: f64, levels: usize) -> Result<ThetaLimit> {
    if levels < 2 || f0 == 0.0 {
        return Err(Error::InvalidParameter("need f0 != 0 and at least 2 levels".into()));
    }
    let samples = (0..levels)
        .map(|j| {
            let f = f0 * 0.5f64.powi(j as i32);
            radial_period_quadrature(table, h, f).map(|p| (f, p.theta))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut tableau: Vec<Vec<f64>> = Vec::with_capacity(levels);
    for (j, &(_, theta)) in samples.iter().enumerate() {
        let mut row = vec![theta];
        for i in 1..=j {
            let factor = 2f64.powi(i as i32) - 1.0;
            let v = row[i - 1] + (row[i - 1] - tableau[j - 1][i - 1]) / factor;
            row.push(v);
        }
        tableau.push(row);
    }
    let last = tableau[levels - 1][levels - 1];
    let prev = tableau[levels - 2][levels - 2];
    Ok(ThetaLimit { h, samples, extrapolated: last, spread: (last - prev).abs() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize) -> BookTable {
        BookTable::unit(-1.0, n).unwrap()
    }

    // Closed forms of the period integrals, obtained by integrating in
    // s = r^2 with the elementary antiderivatives of 1/sqrt(Q) and
    // 1/(s sqrt(Q)), Q(s) = -k s^2 + 2h s - f^2.
    fn period_oracle(h: f64, f: f64, k: f64) -> f64 {
        let w = (-k).sqrt();
        let root = (h * h - k * f * f).sqrt();
        ((2.0 * w * (2.0 * h - k - f * f).sqrt() - 2.0 * k + 2.0 * h) / (2.0 * root)).ln() / w
    }

    fn advance_oracle(h: f64, f: f64, k: f64) -> f64 {
        let root = (h * h - k * f * f).sqrt();
        f.signum() * (FRAC_PI_2 + ((h - f * f) / root).clamp(-1.0, 1.0).asin())
    }

    #[test]
    fn diameter_closed_form() {
        let p = radial_period_quadrature(&table(1), 0.5, 0.0).unwrap();
        assert!((p.radial_period - 2.0 * 1f64.asinh()).abs() < 1e-14);
        assert!((p.radial_period - 1.762_747).abs() < 1e-6);
        assert_eq!(p.angular_advance, PI);
        let r = radial_period_quadrature(&table(2), -0.25, 0.0).unwrap();
        assert!((r.radial_period - period_oracle(-0.25, 0.0, -1.0)).abs() < 1e-13);
        assert_eq!(r.theta, 0.0);
    }

    #[test]
    fn quadrature_matches_closed_forms() {
        for &(h, f) in &[(0.375, 0.5), (1.0, 1.0), (-0.3, 0.2), (0.2, -0.6), (0.5, 0.003), (2.0, 1.9)] {
            let p = radial_period_quadrature(&table(3), h, f).unwrap();
            assert!((p.radial_period - period_oracle(h, f, -1.0)).abs() < 1e-9, "T at {h},{f}");
            assert!((p.angular_advance - advance_oracle(h, f, -1.0)).abs() < 1e-9, "dphi at {h},{f}");
            assert!((p.theta - 3.0 * p.angular_advance).abs() < 1e-15);
        }
    }

    #[test]
    fn quadrature_rejects_singular_values() {
        assert!(matches!(radial_period_quadrature(&table(1), 0.0, 0.0), Err(Error::SingularValue { .. })));
        assert!(matches!(radial_period_quadrature(&table(1), -0.5, 0.0), Err(Error::SingularValue { .. })));
        assert!(matches!(radial_period_quadrature(&table(1), -2.0, 0.0), Err(Error::OutsideImage { .. })));
    }

    #[test]
    fn simulation_matches_quadrature() {
        for &(h, f) in &[(0.375, 0.5), (-0.2, -0.3), (0.5, 0.0), (-0.25, 0.0)] {
            let q = radial_period_quadrature(&table(2), h, f).unwrap();
            let s = radial_period_simulation(&table(2), h, f).unwrap();
            assert!((q.radial_period - s.radial_period).abs() < 1e-6, "{q:?} {s:?}");
            assert!((q.angular_advance - s.angular_advance).abs() < 1e-6, "{q:?} {s:?}");
        }
    }

    #[test]
    fn loop_geometry() {
        let lp = loop_around_origin(&table(1), 0.5, 0.8, 32).unwrap();
        assert_eq!(lp.winding_number(MomentumValue::new(0.0, 0.0)), 1);
        let bottom = lp.waypoints.iter().find(|p| p.f == 0.0 && p.h < 0.0).unwrap();
        assert!((bottom.h + 0.25).abs() < 1e-15);
        assert!(loop_around_origin(&table(1), 0.5, 0.4, 32).is_err());
        assert!(loop_around_origin(&table(1), 1.0, 0.8, 32).is_err());
        for p in &lp.waypoints {
            assert_eq!(classify_fiber(&table(1), p.h, p.f), FiberClass::RegularTorus);
        }
    }

    #[test]
    fn labels_from_matrices() {
        assert_eq!(labels_from_gluing(&[[1, 1], [0, -1]]), MoleculeLabel { r: RLabel::Rational { num: 0, den: 1 }, epsilon: 1 });
        assert_eq!(labels_from_gluing(&[[1, 0], [0, -1]]), MoleculeLabel { r: RLabel::Infinity, epsilon: 1 });
        assert_eq!(labels_from_gluing(&[[1, 4], [0, -1]]).r, RLabel::Rational { num: 1, den: 4 });
        assert_eq!(labels_from_gluing(&[[3, 6], [0, -1]]).r, RLabel::Rational { num: 1, den: 2 });
    }

    #[test]
    fn r_label_string_round_trip() {
        for r in [RLabel::Infinity, RLabel::Rational { num: 0, den: 1 }, RLabel::Rational { num: 1, den: 5 }] {
            assert_eq!(RLabel::try_from(String::from(r)).unwrap(), r);
        }
        assert!(RLabel::try_from("x".to_string()).is_err());
    }

    #[test]
    fn monodromy_of_the_disk() {
        let lp = loop_around_origin(&table(1), 0.5, 0.8, 32).unwrap();
        let report = continue_theta(&table(1), &lp).unwrap();
        assert_eq!(report.m, 1);
        assert_eq!(report.monodromy_matrix, [[1, 0], [1, 1]]);
        assert_eq!(report.gluing_matrix_hpos, [[1, 1], [0, -1]]);
        assert_eq!(molecule_labels(&report, HSign::Positive).r, RLabel::Rational { num: 0, den: 1 });
        assert_eq!(molecule_labels(&report, HSign::Negative).r, RLabel::Infinity);
    }

    #[test]
    fn trivial_monodromy_off_the_singular_value() {
        let rect = [
            MomentumValue::new(-0.4, -0.3),
            MomentumValue::new(-0.1, -0.3),
            MomentumValue::new(-0.1, 0.3),
            MomentumValue::new(-0.4, 0.3),
        ];
        let lp = Loop::polygon(&rect, 16).unwrap();
        assert_eq!(lp.winding_number(MomentumValue::new(0.0, 0.0)), 0);
        let report = continue_theta(&table(3), &lp).unwrap();
        assert_eq!(report.m, 0);
        assert_eq!(report.monodromy_matrix, [[1, 0], [0, 1]]);
    }

    #[test]
    fn refinement_depth_limit_is_reported() {
        let lp = loop_around_origin(&table(5), 0.5, 0.8, 2).unwrap();
        assert!(matches!(continue_theta_with_depth(&table(5), &lp, 0), Err(Error::Unwrap { .. })));
        assert_eq!(continue_theta(&table(5), &lp).unwrap().m, 5);
    }

    #[test]
    fn limit_at_positive_energy() {
        let lim = theta_limit(&table(1), 0.5, 0.4, 7).unwrap();
        assert!((lim.extrapolated - PI).abs() < 0.01, "{lim:?}");
    }
}
