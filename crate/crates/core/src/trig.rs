//! Closed-form horizontal lifts of trigonometric velocities.
//!
//! A velocity `u(t) = Σ_m Re(c_m e^{iω_m t})` with `c_m ∈ C^d` has an exact
//! step-2 signature: with the expansion `u = Σ_k d_k e^{iν_k t}`,
//!
//! ```text
//! γ(t)   = Σ_k d_k t φ₁(iν_k t)
//! A(t)   = ½ Σ_{k,l} t² Φ(iν_k t, iν_l t) d_k ∧ d_l
//! ```
//!
//! where `φ₁(z) = exp[0, z]` and `Φ(x, y) = exp[0, y, x + y]` are divided
//! differences of the exponential. Both are read off the exponential of a
//! 3×3 bidiagonal matrix, which stays accurate when frequencies vanish or
//! coincide.

use nalgebra::{DMatrix, DVector, Matrix3};
use num_complex::Complex64;

use crate::algebra::GroupElem;

#[derive(Debug, Clone, PartialEq)]
pub struct TrigTerm {
    pub freq: f64,
    pub coeff: DVector<Complex64>,
}

/// Path `x(t) = ∫₀ᵗ u`, started at the origin, with trigonometric velocity.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPath {
    dim: usize,
    terms: Vec<TrigTerm>,
}

impl TrigPath {
    pub fn new(dim: usize, terms: Vec<TrigTerm>) -> Self {
        assert!(terms.iter().all(|t| t.coeff.len() == dim));
        Self { dim, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn velocity(&self, t: f64) -> DVector<f64> {
        let mut u = DVector::zeros(self.dim);
        for term in &self.terms {
            let ph = Complex64::from_polar(1.0, term.freq * t);
            for (ui, c) in u.iter_mut().zip(term.coeff.iter()) {
                *ui += (c * ph).re;
            }
        }
        u
    }

    /// Split into `d_k e^{iν_k t}` terms.
    fn expanded(&self) -> Vec<(f64, DVector<Complex64>)> {
        let mut out = Vec::with_capacity(2 * self.terms.len());
        for term in &self.terms {
            if term.freq == 0.0 {
                out.push((0.0, term.coeff.map(|c| Complex64::new(c.re, 0.0))));
            } else {
                out.push((term.freq, term.coeff.map(|c| c * 0.5)));
                out.push((-term.freq, term.coeff.map(|c| c.conj() * 0.5)));
            }
        }
        out
    }

    /// Exact `S²(x)_{0t}` in exponential coordinates.
    pub fn signature(&self, t: f64) -> GroupElem {
        let d = self.dim;
        let parts = self.expanded();
        if parts.is_empty() || t == 0.0 {
            return GroupElem::identity(d);
        }
        let k = parts.len();
        let mut gamma = DVector::<Complex64>::zeros(d);
        let mut phi = DMatrix::<Complex64>::zeros(k, k);
        for (i, (nu_i, _)) in parts.iter().enumerate() {
            for (j, (nu_j, d_j)) in parts.iter().enumerate() {
                let (first, second) = divided_differences(
                    Complex64::new(0.0, nu_i * t),
                    Complex64::new(0.0, nu_j * t),
                );
                if i == 0 {
                    // first output is φ₁(iν_j t), independent of i
                    gamma.axpy(first * t, d_j, Complex64::new(1.0, 0.0));
                }
                phi[(i, j)] = second * (t * t);
            }
        }
        let dmat = DMatrix::from_columns(&parts.iter().map(|p| p.1.clone()).collect::<Vec<_>>());
        let s = &dmat * &phi * dmat.transpose();
        let mut area = DMatrix::zeros(d, d);
        for i in 0..d {
            for j in 0..d {
                area[(i, j)] = 0.5 * (s[(i, j)].re - s[(j, i)].re);
            }
        }
        GroupElem::from_parts_unchecked(gamma.map(|c| c.re), area)
    }
}

/// Returns `(exp[0, y], exp[0, y, x + y])`.
fn divided_differences(x: Complex64, y: Complex64) -> (Complex64, Complex64) {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let m = Matrix3::new(zero, one, zero, zero, y, one, zero, zero, x + y);
    let e = expm3(&m);
    (e[(0, 1)], e[(0, 2)])
}

/// Scaling and squaring with a degree-14 Taylor polynomial.
fn expm3(m: &Matrix3<Complex64>) -> Matrix3<Complex64> {
    let norm = (0..3)
        .map(|j| (0..3).map(|i| m[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let a = m * Complex64::new(scale, 0.0);
    let mut result = Matrix3::identity();
    let mut term = Matrix3::identity();
    for n in 1..=14 {
        term = term * a * Complex64::new(1.0 / n as f64, 0.0);
        result += term;
    }
    for _ in 0..squarings {
        result = result * result;
    }
    result
}
