//! Exact event-driven propagation on the book.
//!
//! Between reflections the equations of motion are `x'' = -k x`, `y'' = -k y`
//! with `k < 0`, so the flow is a hyperbolic rotation with rate
//! `omega = sqrt(-k)` and is evaluated in closed form. Boundary hits are roots
//! of `r^2(t) = 1`, which becomes a quadratic in `exp(2 omega t)`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BookTable, PhaseState};

/// States with `|r^2 - 1|` below this are on the boundary circle.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Radial speed below which a boundary state is treated as tangential.
pub const GRAZING_TOL: f64 = 1e-12;

fn check_k(k: f64) -> Result<f64> {
    if !(k < 0.0) {
        return Err(Error::InvalidParameter(format!("k must be negative, got {k}")));
    }
    Ok((-k).sqrt())
}

/// Closed-form Hooke flow for time `t >= 0`. The sheet is unchanged.
pub fn flow_free(state: &PhaseState, t: f64, k: f64) -> Result<PhaseState> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let omega = check_k(k)?;
    Ok(flow_unchecked(state, t, omega))
}

fn flow_unchecked(state: &PhaseState, t: f64, omega: f64) -> PhaseState {
    let (s, c) = ((omega * t).sinh(), (omega * t).cosh());
    PhaseState {
        sheet: state.sheet,
        x: state.x * c + state.vx / omega * s,
        y: state.y * c + state.vy / omega * s,
        vx: state.x * omega * s + state.vx * c,
        vy: state.y * omega * s + state.vy * c,
    }
}

/// `r^2(t) = a cosh(2 omega t) + b sinh(2 omega t) + c` along the free flow.
#[derive(Debug, Clone, Copy)]
struct RadialProfile {
    a: f64,
    b: f64,
    c: f64,
    omega: f64,
}

impl RadialProfile {
    fn new(state: &PhaseState, omega: f64) -> Self {
        let r2 = state.radius_sq();
        let v2 = state.speed_sq() / (omega * omega);
        Self { a: 0.5 * (r2 + v2), b: state.radial_dot() / omega, c: 0.5 * (r2 - v2), omega }
    }

    fn r2(&self, t: f64) -> f64 {
        let z = 2.0 * self.omega * t;
        self.a * z.cosh() + self.b * z.sinh() + self.c
    }

    fn dr2(&self, t: f64) -> f64 {
        let z = 2.0 * self.omega * t;
        2.0 * self.omega * (self.a * z.sinh() + self.b * z.cosh())
    }

    /// Time of the radial minimum, if the profile has one at `t > 0`.
    fn minimum_time(&self) -> Option<f64> {
        if self.a <= 0.0 || self.b >= 0.0 || -self.b >= self.a {
            return None;
        }
        Some((-self.b / self.a).atanh() / (2.0 * self.omega))
    }
}

/// Smallest `t > 0` at which the free flow from `state` reaches `r = 1`.
///
/// Returns `0` for a boundary state moving outward.
pub fn time_to_boundary(state: &PhaseState, k: f64) -> Result<f64> {
    let omega = check_k(k)?;
    if state.is_rest_at_origin() {
        return Err(Error::RestAtOrigin);
    }
    let p = RadialProfile::new(state, omega);
    // (a+b) u^2 + 2(c-1) u + (a-b) = 0 with u = exp(2 omega t)
    let qa = p.a + p.b;
    let qb = 2.0 * (p.c - 1.0);
    let qc = p.a - p.b;
    if qa <= f64::EPSILON * p.a {
        // Exactly on the stable manifold of the equilibrium.
        return Err(Error::NoBoundaryHit);
    }
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    let q = -0.5 * (qb + qb.signum() * disc);
    let u = if q == 0.0 { (qc / qa).abs().sqrt() } else { (q / qa).max(qc / q) };
    if !u.is_finite() || u <= 0.0 {
        return Err(Error::NoBoundaryHit);
    }
    let mut t = (u.ln() / (2.0 * omega)).max(0.0);
    if !t.is_finite() {
        return Err(Error::NoBoundaryHit);
    }
    let slope = p.dr2(t);
    if slope > 0.0 {
        let polished = t - (p.r2(t) - 1.0) / slope;
        if polished >= 0.0 && polished.is_finite() {
            t = polished;
        }
    }
    Ok(t)
}

/// Outward radial speed `v . n` at a point of the boundary.
fn outward_speed(state: &PhaseState) -> f64 {
    state.radial_dot() / state.radius()
}

/// Elastic reflection off the boundary circle followed by the move to the
/// next sheet of the book.
pub fn reflect(table: &BookTable, state: &PhaseState) -> Result<PhaseState> {
    let residual = (state.radius_sq() - 1.0).abs();
    if residual >= BOUNDARY_TOL {
        return Err(Error::NotOnBoundary(residual));
    }
    let r = state.radius();
    let (nx, ny) = (state.x / r, state.y / r);
    let vn = state.vx * nx + state.vy * ny;
    if vn < -GRAZING_TOL {
        return Err(Error::InwardVelocity(vn));
    }
    let vn = vn.max(0.0);
    Ok(PhaseState {
        sheet: table.next_sheet(state.sheet)?,
        x: state.x,
        y: state.y,
        vx: state.vx - 2.0 * vn * nx,
        vy: state.vy - 2.0 * vn * ny,
    })
}

/// How a segment of motion was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmentKind {
    /// Free Hooke flow in the interior of a sheet.
    Free,
    /// Motion along the boundary circle on the atom-A critical orbit.
    Grazing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySegment {
    pub start: PhaseState,
    pub duration: f64,
    /// State at the end of the segment, before any reflection.
    pub end: PhaseState,
    /// The segment ends on the boundary and is followed by a reflection.
    pub reflected: bool,
    pub kind: SegmentKind,
}

impl TrajectorySegment {
    /// State at time `t` in `[0, duration]` after the segment start.
    pub fn state_at(&self, t: f64, k: f64) -> PhaseState {
        let t = t.clamp(0.0, self.duration);
        match self.kind {
            SegmentKind::Free => flow_unchecked(&self.start, t, (-k).sqrt()),
            SegmentKind::Grazing => rotate(&self.start, self.start.angular_momentum() * t),
        }
    }

    /// Evenly spaced states including both endpoints.
    pub fn sample(&self, k: f64, points: usize) -> Vec<PhaseState> {
        let points = points.max(2);
        (0..points)
            .map(|i| self.state_at(self.duration * i as f64 / (points - 1) as f64, k))
            .collect()
    }

    /// Time and state of the interior radial minimum, if the segment has one.
    pub fn radial_minimum(&self, k: f64) -> Option<(f64, PhaseState)> {
        if self.kind != SegmentKind::Free {
            return None;
        }
        let p = RadialProfile::new(&self.start, (-k).sqrt());
        let t = p.minimum_time()?;
        (t <= self.duration).then(|| (t, self.state_at(t, k)))
    }

    /// Smallest distance from the center reached along the segment.
    pub fn min_radius(&self, k: f64) -> f64 {
        let ends = self.start.radius().min(self.end.radius());
        if self.kind != SegmentKind::Free {
            return ends;
        }
        match self.radial_minimum(k) {
            Some((_, s)) => s.radius().min(ends),
            None => ends,
        }
    }

    /// Largest distance from the center reached along the segment.
    pub fn max_radius(&self) -> f64 {
        // r^2(t) is convex along the free flow, so the maximum is at an end.
        self.start.radius().max(self.end.radius())
    }
}

fn rotate(state: &PhaseState, angle: f64) -> PhaseState {
    let (s, c) = angle.sin_cos();
    PhaseState {
        sheet: state.sheet,
        x: c * state.x - s * state.y,
        y: s * state.x + c * state.y,
        vx: c * state.vx - s * state.vy,
        vy: s * state.vx + c * state.vy,
    }
}

/// When to stop a simulation. At least one bound is required.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StopCondition {
    pub max_reflections: Option<usize>,
    pub max_time: Option<f64>,
}

impl StopCondition {
    pub fn reflections(n: usize) -> Self {
        Self { max_reflections: Some(n), max_time: None }
    }

    pub fn time(t: f64) -> Self {
        Self { max_reflections: None, max_time: Some(t) }
    }

    fn validate(&self) -> Result<()> {
        if self.max_reflections.is_none() && self.max_time.is_none() {
            return Err(Error::InvalidParameter(
                "stop condition needs max_reflections and/or max_time".into(),
            ));
        }
        if let Some(t) = self.max_time {
            if !(t >= 0.0) {
                return Err(Error::InvalidParameter(format!("max_time must be >= 0, got {t}")));
            }
        }
        Ok(())
    }
}

fn is_grazing(state: &PhaseState) -> bool {
    (state.radius_sq() - 1.0).abs() < BOUNDARY_TOL && outward_speed(state).abs() < GRAZING_TOL
}

/// Propagates `initial` until the stop condition is met.
///
/// Segments are contiguous: each one starts from the reflection of the
/// previous one's end. A grazing state on the boundary is the atom-A orbit
/// and is continued as rotation along the circle, one revolution per segment.
pub fn simulate(
    table: &BookTable,
    initial: &PhaseState,
    stop: StopCondition,
) -> Result<Vec<TrajectorySegment>> {
    stop.validate()?;
    table.check_sheet(initial.sheet)?;
    if initial.radius_sq() > 1.0 + BOUNDARY_TOL {
        return Err(Error::InvalidParameter(format!(
            "initial position r = {} lies outside the disk",
            initial.radius()
        )));
    }
    if initial.is_rest_at_origin() {
        return Err(Error::RestAtOrigin);
    }
    let k = table.k();
    let max_reflections = stop.max_reflections.unwrap_or(usize::MAX);
    let max_time = stop.max_time.unwrap_or(f64::INFINITY);

    let mut segments = Vec::new();
    let mut state = *initial;
    let mut elapsed = 0.0;
    let mut steps = 0usize;

    while steps < max_reflections && elapsed < max_time {
        if is_grazing(&state) {
            let f = state.angular_momentum();
            let remaining = max_time - elapsed;
            let revolution = if f != 0.0 { TAU / f.abs() } else { 0.0 };
            let (duration, last) = if f == 0.0 {
                (if remaining.is_finite() { remaining } else { 0.0 }, true)
            } else if revolution >= remaining {
                (remaining, true)
            } else {
                (revolution, false)
            };
            let seg = TrajectorySegment {
                start: state,
                duration,
                end: rotate(&state, f * duration),
                reflected: false,
                kind: SegmentKind::Grazing,
            };
            segments.push(seg);
            elapsed += duration;
            steps += 1;
            state = seg.end;
            if last {
                break;
            }
            continue;
        }

        let hit = match time_to_boundary(&state, k) {
            Ok(t) => Some(t),
            Err(Error::NoBoundaryHit) if max_time.is_finite() => None,
            Err(e) => return Err(e),
        };
        match hit {
            Some(t) if elapsed + t <= max_time => {
                let end = flow_free(&state, t, k)?;
                segments.push(TrajectorySegment {
                    start: state,
                    duration: t,
                    end,
                    reflected: true,
                    kind: SegmentKind::Free,
                });
                elapsed += t;
                steps += 1;
                state = reflect(table, &end)?;
            }
            _ => {
                let t = max_time - elapsed;
                segments.push(TrajectorySegment {
                    start: state,
                    duration: t,
                    end: flow_free(&state, t, k)?,
                    reflected: false,
                    kind: SegmentKind::Free,
                });
                break;
            }
        }
    }
    Ok(segments)
}
