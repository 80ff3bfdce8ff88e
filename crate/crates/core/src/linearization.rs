//! Linearization of `sgrad H` and `sgrad F` at the equilibrium and the
//! spectrum of the pencil `lambda A_H + mu A_F`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix4 = [[f64; 4]; 4];

/// Real and imaginary parts must exceed this for a focus-focus spectrum.
pub const SPECTRUM_TOL: f64 = 1e-10;

/// `(A_H, A_F)` in coordinates `(x, y, x', y')`.
pub fn linearization_operators(k: f64) -> Result<(Matrix4, Matrix4)> {
    if !(k < 0.0) {
        return Err(Error::InvalidParameter(format!("k must be negative, got {k}")));
    }
    let a_h = [
        [0.0, 0.0, -k, 0.0],
        [0.0, 0.0, 0.0, -k],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
    ];
    let a_f = [
        [0.0, -1.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    Ok((a_h, a_f))
}

pub fn pencil(k: f64, lambda: f64, mu: f64) -> Result<Matrix4> {
    let (a_h, a_f) = linearization_operators(k)?;
    let mut m = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = lambda * a_h[i][j] + mu * a_f[i][j];
        }
    }
    Ok(m)
}

pub fn mat_vec(m: &Matrix4, v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

fn mat_mul(a: &Matrix4, b: &Matrix4) -> Matrix4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = (0..4).map(|l| a[i][l] * b[l][j]).sum();
        }
    }
    out
}

/// Coefficients `[c3, c2, c1, c0]` of `det(t I - M) = t^4 + c3 t^3 + ... + c0`
/// by the Faddeev-LeVerrier recursion.
pub fn characteristic_polynomial(m: &Matrix4) -> [f64; 4] {
    let mut coeffs = [0.0; 4];
    let mut aux = [[0.0; 4]; 4];
    let mut c_prev = 1.0;
    for step in 1..=4 {
        // aux = M * (aux_prev + c_prev I)
        let mut shifted = aux;
        for (i, row) in shifted.iter_mut().enumerate() {
            row[i] += c_prev;
        }
        aux = mat_mul(m, &shifted);
        let trace: f64 = (0..4).map(|i| aux[i][i]).sum();
        let c = -trace / step as f64;
        coeffs[step - 1] = c;
        c_prev = c;
    }
    coeffs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpectrumClass {
    FocusFocus,
    Degenerate,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilSpectrum {
    pub k: f64,
    pub lambda: f64,
    pub mu: f64,
    /// Sorted by real part, then imaginary part.
    pub eigenvalues: [Complex64; 4],
    pub classification: SpectrumClass,
}

/// Eigenvalues of `lambda A_H + mu A_F` from its characteristic quartic.
///
/// The pencil is a Hamiltonian matrix, so the quartic is even,
/// `t^4 + c2 t^2 + c0`, and is solved as a quadratic in `t^2`.
pub fn pencil_eigenvalues(k: f64, lambda: f64, mu: f64) -> Result<PencilSpectrum> {
    if lambda == 0.0 && mu == 0.0 {
        return Err(Error::DegeneratePencil);
    }
    let m = pencil(k, lambda, mu)?;
    let [c3, c2, c1, c0] = characteristic_polynomial(&m);
    debug_assert!(c3.abs() < 1e-12 && c1.abs() < 1e-12, "odd coefficients {c3} {c1}");

    let disc = Complex64::new(c2 * c2 - 4.0 * c0, 0.0).sqrt();
    let s1 = (Complex64::new(-c2, 0.0) + disc) / 2.0;
    let s2 = (Complex64::new(-c2, 0.0) - disc) / 2.0;
    let (r1, r2) = (s1.sqrt(), s2.sqrt());
    let mut eigenvalues = [r1, -r1, r2, -r2];
    for z in &mut eigenvalues {
        // scrub signed zeros from the complex square roots
        *z = Complex64::new(z.re + 0.0, z.im + 0.0);
    }
    eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(PencilSpectrum { k, lambda, mu, eigenvalues, classification: classify_spectrum(&eigenvalues) })
}

pub fn classify_spectrum(eigenvalues: &[Complex64; 4]) -> SpectrumClass {
    let distinct = (0..4).all(|i| ((i + 1)..4).all(|j| (eigenvalues[i] - eigenvalues[j]).norm() > SPECTRUM_TOL));
    let nonzero = eigenvalues.iter().all(|z| z.norm() > SPECTRUM_TOL);
    if !distinct || !nonzero {
        return SpectrumClass::Degenerate;
    }
    if eigenvalues.iter().all(|z| z.re.abs() > SPECTRUM_TOL && z.im.abs() > SPECTRUM_TOL) {
        SpectrumClass::FocusFocus
    } else {
        SpectrumClass::Other
    }
}

/// Nondegeneracy certificate for the equilibrium using the `lambda = mu = 1`
/// member of the pencil.
pub fn certify_focus_focus(k: f64) -> Result<(bool, PencilSpectrum)> {
    let spectrum = pencil_eigenvalues(k, 1.0, 1.0)?;
    Ok((spectrum.classification == SpectrumClass::FocusFocus, spectrum))
}

/// `(dH, dF)` at a phase point `(x, y, x', y')`.
pub fn differentials(k: f64, z: &[f64; 4]) -> ([f64; 4], [f64; 4]) {
    let [x, y, vx, vy] = *z;
    ([k * x, k * y, vx, vy], [vy, -vx, -y, x])
}
