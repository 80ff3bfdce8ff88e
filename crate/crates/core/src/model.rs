//! Domain types: the book table, phase states and momentum values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An n-sheeted book of unit disks glued along their common boundary circle
/// by the cyclic permutation `(1 2 ... n)`, carrying the repelling Hooke
/// potential `k r^2 / 2` with `k < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BookTable {
    radius: f64,
    k: f64,
    sheets: usize,
}

impl BookTable {
    /// Validates raw parameters. Every formula downstream assumes the unit
    /// disk, so the radius must be exactly 1.
    pub fn new(radius: f64, k: f64, sheets: usize) -> Result<Self> {
        if !radius.is_finite() || radius <= 0.0 {
            return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
        }
        if radius != 1.0 {
            return Err(Error::InvalidParameter(format!(
                "only the unit disk is supported, got radius {radius}"
            )));
        }
        if !k.is_finite() || k >= 0.0 {
            return Err(Error::InvalidParameter(format!("k must be negative, got {k}")));
        }
        if sheets < 1 {
            return Err(Error::InvalidParameter("n must be >= 1".into()));
        }
        Ok(Self { radius, k, sheets })
    }

    /// Unit disk book with `sheets` sheets.
    pub fn unit(k: f64, sheets: usize) -> Result<Self> {
        Self::new(1.0, k, sheets)
    }

    /// Builds a table from an explicit gluing permutation given in one-line
    /// notation (`perm[s-1]` is the image of sheet `s`). Only the cycle
    /// `(1 2 ... n)` is accepted.
    pub fn with_permutation(radius: f64, k: f64, perm: &[usize]) -> Result<Self> {
        let n = perm.len();
        let table = Self::new(radius, k, n)?;
        for (i, &image) in perm.iter().enumerate() {
            let sheet = i + 1;
            if image != sheet % n + 1 {
                return Err(Error::InvalidParameter(format!(
                    "only the cyclic permutation (1 2 ... {n}) is supported; sheet {sheet} maps to {image}"
                )));
            }
        }
        Ok(table)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn sheets(&self) -> usize {
        self.sheets
    }

    /// Hyperbolic rate `sqrt(-k)` of the free flow.
    pub fn omega(&self) -> f64 {
        (-self.k).sqrt()
    }

    /// The gluing permutation: sheet `s` continues on `s mod n + 1`.
    pub fn next_sheet(&self, sheet: usize) -> Result<usize> {
        self.check_sheet(sheet)?;
        Ok(sheet % self.sheets + 1)
    }

    pub fn check_sheet(&self, sheet: usize) -> Result<()> {
        if sheet == 0 || sheet > self.sheets {
            return Err(Error::SheetOutOfRange { sheet, sheets: self.sheets });
        }
        Ok(())
    }

    /// One-line notation of the gluing permutation.
    pub fn permutation(&self) -> Vec<usize> {
        (1..=self.sheets).map(|s| s % self.sheets + 1).collect()
    }
}

/// `validate_table` in functional form.
pub fn validate_table(radius: f64, k: f64, sheets: usize) -> Result<BookTable> {
    BookTable::new(radius, k, sheets)
}

/// A point of the phase space of the book: sheet index plus position and
/// velocity on that sheet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub sheet: usize,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
}

impl PhaseState {
    pub fn new(sheet: usize, x: f64, y: f64, vx: f64, vy: f64) -> Self {
        Self { sheet, x, y, vx, vy }
    }

    pub fn radius_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn radius(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn speed_sq(&self) -> f64 {
        self.vx * self.vx + self.vy * self.vy
    }

    /// `x vx + y vy`, half the time derivative of `r^2`.
    pub fn radial_dot(&self) -> f64 {
        self.x * self.vx + self.y * self.vy
    }

    /// Polar angle of the position in `(-pi, pi]`.
    pub fn angle(&self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn energy(&self, k: f64) -> f64 {
        0.5 * self.speed_sq() + 0.5 * k * self.radius_sq()
    }

    pub fn angular_momentum(&self) -> f64 {
        self.x * self.vy - self.y * self.vx
    }

    /// Same position, opposite velocity.
    pub fn reversed(&self) -> Self {
        Self { vx: -self.vx, vy: -self.vy, ..*self }
    }

    pub fn is_rest_at_origin(&self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.vx == 0.0 && self.vy == 0.0
    }
}

/// A value `(h, f)` of the momentum map `(H, F)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentumValue {
    pub h: f64,
    pub f: f64,
}

impl MomentumValue {
    pub fn new(h: f64, f: f64) -> Self {
        Self { h, f }
    }

    /// Strictly inside the image and away from the focus-focus value.
    pub fn is_regular(&self, k: f64) -> bool {
        self.h > 0.5 * (self.f * self.f + k) && (self.h, self.f) != (0.0, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_in_range_parameters() {
        let t = validate_table(1.0, -1.0, 3).unwrap();
        assert_eq!(t.sheets(), 3);
        assert_eq!(t.k(), -1.0);
        assert_eq!(t.permutation(), vec![2, 3, 1]);
    }

    #[test]
    fn rejects_nonnegative_k() {
        let err = validate_table(1.0, 0.0, 1).unwrap_err();
        assert!(err.to_string().contains("k must be negative"), "{err}");
        assert!(validate_table(1.0, 1.0, 1).is_err());
        assert!(validate_table(1.0, f64::NAN, 1).is_err());
    }

    #[test]
    fn rejects_empty_book() {
        let err = validate_table(1.0, -1.0, 0).unwrap_err();
        assert!(err.to_string().contains("n must be >= 1"), "{err}");
    }

    #[test]
    fn rejects_non_unit_radius() {
        assert!(validate_table(0.0, -1.0, 1).is_err());
        assert!(validate_table(2.0, -1.0, 1).is_err());
    }

    #[test]
    fn next_sheet_examples() {
        assert_eq!(BookTable::unit(-1.0, 3).unwrap().next_sheet(3).unwrap(), 1);
        assert_eq!(BookTable::unit(-1.0, 1).unwrap().next_sheet(1).unwrap(), 1);
        assert_eq!(BookTable::unit(-1.0, 5).unwrap().next_sheet(2).unwrap(), 3);
    }

    #[test]
    fn next_sheet_out_of_range() {
        let t = BookTable::unit(-1.0, 3).unwrap();
        assert_eq!(t.next_sheet(0), Err(Error::SheetOutOfRange { sheet: 0, sheets: 3 }));
        assert!(t.next_sheet(4).is_err());
    }

    #[test]
    fn next_sheet_is_an_n_cycle() {
        for n in 1..=12 {
            let t = BookTable::unit(-1.0, n).unwrap();
            for start in 1..=n {
                let mut s = start;
                for step in 1..=n {
                    s = t.next_sheet(s).unwrap();
                    if step < n {
                        assert_ne!(s, start, "n={n} returned early at step {step}");
                    }
                }
                assert_eq!(s, start);
            }
        }
    }

    #[test]
    fn only_cyclic_permutation_accepted() {
        assert!(BookTable::with_permutation(1.0, -1.0, &[2, 3, 1]).is_ok());
        assert!(BookTable::with_permutation(1.0, -1.0, &[1]).is_ok());
        assert!(BookTable::with_permutation(1.0, -1.0, &[3, 1, 2]).is_err());
        assert!(BookTable::with_permutation(1.0, -1.0, &[1, 2]).is_err());
    }

    #[test]
    fn momentum_regularity() {
        assert!(MomentumValue::new(0.3, 0.2).is_regular(-1.0));
        assert!(!MomentumValue::new(0.0, 0.0).is_regular(-1.0));
        assert!(!MomentumValue::new(-0.5, 0.0).is_regular(-1.0));
    }
}
