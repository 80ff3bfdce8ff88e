//! The momentum map `(H, F)`, its image, the bifurcation diagram and the
//! classification of its fibers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BookTable, MomentumValue, PhaseState};

/// Width of the band around the bifurcation diagram treated as singular.
pub const CLASSIFY_TOL: f64 = 1e-9;

pub fn momentum_map(state: &PhaseState, k: f64) -> MomentumValue {
    MomentumValue { h: state.energy(k), f: state.angular_momentum() }
}

/// Lower boundary of the image, the parabola `h = (f^2 + k) / 2`.
pub fn boundary_parabola(f: f64, k: f64) -> f64 {
    0.5 * (f * f + k)
}

pub fn in_image(h: f64, f: f64, k: f64) -> bool {
    h >= boundary_parabola(f, k)
}

/// Radius of the inner circle of the annulus of possible motion.
///
/// Values within [`CLASSIFY_TOL`] below the boundary parabola are clamped to
/// the boundary circle.
pub fn inner_radius(h: f64, f: f64, k: f64) -> Result<f64> {
    if !(k < 0.0) {
        return Err(Error::InvalidParameter(format!("k must be negative, got {k}")));
    }
    if h < boundary_parabola(f, k) - CLASSIFY_TOL {
        return Err(Error::OutsideImage { h, f });
    }
    let root = (h * h - k * f * f).sqrt();
    // -h + sqrt(h^2 - k f^2), rewritten to avoid cancellation for h > 0
    let numerator = if h > 0.0 { -k * f * f / (h + root) } else { root - h };
    Ok((numerator / -k).sqrt().min(1.0))
}

/// Annulus `inner <= r <= outer` swept on every sheet by the fiber over `(h, f)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotionRegion {
    pub inner: f64,
    pub outer: f64,
    pub sheets: usize,
}

pub fn region_of_motion(table: &BookTable, h: f64, f: f64) -> Result<MotionRegion> {
    Ok(MotionRegion { inner: inner_radius(h, f, table.k())?, outer: table.radius(), sheets: table.sheets() })
}

/// Topological type of a fiber of the momentum map on the book.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum FiberClass {
    OutsideImage,
    /// A single boundary circle; the 3-atom is of type A.
    AtomACircle,
    RegularTorus,
    /// Torus with `pinches` homologous cycles collapsed, one per sheet.
    /// Homotopy equivalent to a bouquet of `pinches` spheres.
    PinchedTorus { pinches: usize },
    /// The focus-focus equilibrium itself (a point, not a fiber).
    FocusFocusPoint,
}

impl FiberClass {
    pub fn is_singular(&self) -> bool {
        !matches!(self, FiberClass::RegularTorus | FiberClass::OutsideImage)
    }
}

pub fn classify_fiber(table: &BookTable, h: f64, f: f64) -> FiberClass {
    let gap = h - boundary_parabola(f, table.k());
    if gap < -CLASSIFY_TOL {
        FiberClass::OutsideImage
    } else if gap <= CLASSIFY_TOL {
        FiberClass::AtomACircle
    } else if h.hypot(f) <= CLASSIFY_TOL {
        FiberClass::PinchedTorus { pinches: table.sheets() }
    } else {
        FiberClass::RegularTorus
    }
}

/// Classifies the fiber through a phase state; the equilibrium at the center
/// of a sheet is reported as the focus-focus point.
pub fn classify_state(table: &BookTable, state: &PhaseState) -> FiberClass {
    if state.is_rest_at_origin() {
        return FiberClass::FocusFocusPoint;
    }
    let m = momentum_map(state, table.k());
    classify_fiber(table, m.h, m.f)
}

/// A representative state on the fiber over `(h, f)`: the point of closest
/// approach to the center, rotated to polar angle `phase`.
///
/// For `r0 = 0` (diameter orbits) the state sits at the center moving along
/// the direction `phase`.
pub fn state_on_fiber(table: &BookTable, sheet: usize, h: f64, f: f64, phase: f64) -> Result<PhaseState> {
    table.check_sheet(sheet)?;
    let k = table.k();
    if h.hypot(f) <= CLASSIFY_TOL {
        return Ok(PhaseState::new(sheet, 0.0, 0.0, 0.0, 0.0));
    }
    let r0 = inner_radius(h, f, k)?;
    let (s, c) = phase.sin_cos();
    if r0 == 0.0 {
        let speed = (2.0 * h).sqrt();
        return Ok(PhaseState::new(sheet, 0.0, 0.0, speed * c, speed * s));
    }
    // tangential speed fixed by F; radial speed from H absorbs rounding
    let vt = f / r0;
    let vr = (2.0 * h - k * r0 * r0 - vt * vt).max(0.0).sqrt();
    Ok(PhaseState::new(sheet, r0 * c, r0 * s, vr * c - vt * s, vr * s + vt * c))
}

/// A sampled bifurcation diagram: the boundary parabola plus the isolated
/// focus-focus value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BifurcationDiagram {
    pub k: f64,
    /// `(f, h)` samples of `h = (f^2 + k) / 2`.
    pub parabola: Vec<(f64, f64)>,
    pub isolated: MomentumValue,
}

impl BifurcationDiagram {
    pub fn vertex(&self) -> MomentumValue {
        MomentumValue::new(0.5 * self.k, 0.0)
    }
}

pub fn bifurcation_diagram(k: f64, f_min: f64, f_max: f64, resolution: usize) -> Result<BifurcationDiagram> {
    if resolution < 2 {
        return Err(Error::InvalidParameter(format!("resolution must be >= 2, got {resolution}")));
    }
    if !(k < 0.0) {
        return Err(Error::InvalidParameter(format!("k must be negative, got {k}")));
    }
    if !(f_min < f_max) {
        return Err(Error::InvalidParameter(format!("empty f-range [{f_min}, {f_max}]")));
    }
    let step = (f_max - f_min) / (resolution - 1) as f64;
    let parabola = (0..resolution)
        .map(|i| {
            let f = if i + 1 == resolution { f_max } else { f_min + step * i as f64 };
            (f, boundary_parabola(f, k))
        })
        .collect();
    Ok(BifurcationDiagram { k, parabola, isolated: MomentumValue::new(0.0, 0.0) })
}

/// Squared norm of `dH ^ dF` at a phase point, i.e. the Gram determinant
/// `|dH|^2 |dF|^2 - (dH . dF)^2`. Zero exactly where the differentials are
/// dependent.
pub fn differential_wedge_sq(state: &PhaseState, k: f64) -> f64 {
    let dh = [k * state.x, k * state.y, state.vx, state.vy];
    let df = [state.vy, -state.vx, -state.y, state.x];
    let dot = |a: &[f64; 4], b: &[f64; 4]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
    dot(&dh, &dh) * dot(&df, &df) - dot(&dh, &df).powi(2)
}

/// Result of scanning interior phase space for critical points of `(H, F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalScan {
    pub points: usize,
    /// Minimum of `|dH ^ dF| / |z|^2` over the grid, `z` the phase vector.
    pub min_scaled_wedge: f64,
    pub argmin: PhaseState,
}

/// Brute-force check that the origin is the only interior critical point:
/// evaluates the scale-free residual `|dH ^ dF| / |z|^2` on a grid of
/// `per_axis^4` states with `r < 1`, skipping states within `exclude` of the
/// equilibrium.
pub fn critical_point_scan(k: f64, per_axis: usize, v_max: f64, exclude: f64) -> CriticalScan {
    let axis = |i: usize, lim: f64| -lim + 2.0 * lim * i as f64 / (per_axis - 1).max(1) as f64;
    let mut best = CriticalScan {
        points: 0,
        min_scaled_wedge: f64::INFINITY,
        argmin: PhaseState::new(1, 0.0, 0.0, 0.0, 0.0),
    };
    for i in 0..per_axis {
        for j in 0..per_axis {
            let (x, y) = (axis(i, 1.0), axis(j, 1.0));
            if x * x + y * y >= 1.0 {
                continue;
            }
            for a in 0..per_axis {
                for b in 0..per_axis {
                    let s = PhaseState::new(1, x, y, axis(a, v_max), axis(b, v_max));
                    let norm_sq = s.radius_sq() + s.speed_sq();
                    if norm_sq.sqrt() < exclude {
                        continue;
                    }
                    best.points += 1;
                    let w = differential_wedge_sq(&s, k).max(0.0).sqrt() / norm_sq;
                    if w < best.min_scaled_wedge {
                        best.min_scaled_wedge = w;
                        best.argmin = s;
                    }
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(n: usize) -> BookTable {
        BookTable::unit(-1.0, n).unwrap()
    }

    #[test]
    fn momentum_map_examples() {
        assert_eq!(momentum_map(&PhaseState::new(1, 0.0, 0.0, 0.0, 0.0), -1.0), MomentumValue::new(0.0, 0.0));
        assert_eq!(momentum_map(&PhaseState::new(1, 1.0, 0.0, 0.0, 1.0), -1.0), MomentumValue::new(0.0, 1.0));
        assert_eq!(momentum_map(&PhaseState::new(1, 0.5, 0.0, 0.0, 1.0), -1.0), MomentumValue::new(0.375, 0.5));
    }

    #[test]
    fn image_examples() {
        assert!(in_image(0.0, 0.0, -1.0));
        assert!(in_image(-0.5, 0.0, -1.0));
        assert!(!in_image(-1.0, 0.0, -1.0));
    }

    #[test]
    fn inner_radius_examples() {
        assert_eq!(inner_radius(1.0, 0.0, -1.0).unwrap(), 0.0);
        let expected = (2f64.sqrt() - 1.0).sqrt();
        assert!((inner_radius(1.0, 1.0, -1.0).unwrap() - expected).abs() < 1e-15);
        assert!((inner_radius(0.0, 1.0, -1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(inner_radius(-1.0, 0.0, -1.0), Err(Error::OutsideImage { .. })));
    }

    #[test]
    fn inner_radius_zero_iff_diameter() {
        for &(h, f) in &[(0.0, 0.0), (0.3, 0.0), (2.0, 0.0)] {
            assert_eq!(inner_radius(h, f, -1.0).unwrap(), 0.0);
        }
        for &(h, f) in &[(-0.2, 0.0), (0.3, 1e-6), (0.3, -0.2)] {
            assert!(inner_radius(h, f, -1.0).unwrap() > 0.0);
        }
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify_fiber(&table(3), 0.0, 0.0), FiberClass::PinchedTorus { pinches: 3 });
        assert_eq!(classify_fiber(&table(1), -0.5, 0.0), FiberClass::AtomACircle);
        assert_eq!(classify_fiber(&table(1), 0.3, 0.2), FiberClass::RegularTorus);
        assert_eq!(classify_fiber(&table(1), -1.0, 0.0), FiberClass::OutsideImage);
        assert_eq!(classify_state(&table(2), &PhaseState::new(2, 0.0, 0.0, 0.0, 0.0)), FiberClass::FocusFocusPoint);
    }

    #[test]
    fn diagram_examples() {
        let d = bifurcation_diagram(-1.0, -1.0, 1.0, 21).unwrap();
        assert_eq!(d.parabola.len(), 21);
        let mid = d.parabola[10];
        assert!(mid.0.abs() < 1e-15 && (mid.1 + 0.5).abs() < 1e-15);
        assert_eq!(d.isolated, MomentumValue::new(0.0, 0.0));
        assert_eq!(d.vertex(), MomentumValue::new(-0.5, 0.0));
        assert_eq!(bifurcation_diagram(-3.0, -1.0, 1.0, 2).unwrap().isolated, MomentumValue::new(0.0, 0.0));
        assert!(bifurcation_diagram(-1.0, -1.0, 1.0, 1).is_err());
    }

    #[test]
    fn state_on_fiber_has_requested_values() {
        let t = table(2);
        for &(h, f) in &[(0.375, 0.5), (-0.2, 0.3), (0.5, 0.0), (-0.3, 0.0), (1.0, -1.0)] {
            let s = state_on_fiber(&t, 2, h, f, 0.7).unwrap();
            let m = momentum_map(&s, -1.0);
            assert!((m.h - h).abs() < 1e-14 && (m.f - f).abs() < 1e-14, "{h} {f} -> {m:?}");
        }
    }

    #[test]
    fn no_interior_critical_points_away_from_origin() {
        let scan = critical_point_scan(-1.0, 9, 2.0, 0.05);
        assert!(scan.points > 1000);
        assert!(scan.min_scaled_wedge > 1e-3, "{scan:?}");
        assert_eq!(differential_wedge_sq(&PhaseState::new(1, 0.0, 0.0, 0.0, 0.0), -1.0), 0.0);
    }
}
