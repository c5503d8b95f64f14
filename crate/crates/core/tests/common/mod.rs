//! Independent reference computations for the integration tests. Nothing
//! here calls into the crate's numerics beyond reading plain fields.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roughcc::paths::{Control, PLPath, Segment};
use roughcc::GroupElem;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DVector<f64> {
    DVector::from_fn(d, |_, _| rng.random_range(-scale..scale))
}

pub fn random_skew(rng: &mut ChaCha8Rng, d: usize, scale: f64) -> DMatrix<f64> {
    let m = DMatrix::from_fn(d, d, |_, _| rng.random_range(-scale..scale));
    (&m - m.transpose()) * 0.5
}

pub fn random_group(rng: &mut ChaCha8Rng, d: usize) -> GroupElem {
    let a = random_vec(rng, d, 1.0);
    let area = random_skew(rng, d, 1.0);
    GroupElem::new(a, area).unwrap()
}

pub fn random_pl(rng: &mut ChaCha8Rng, d: usize, segments: usize) -> PLPath {
    let mut t = 0.0;
    let mut times = vec![t];
    for _ in 0..segments {
        t += rng.random_range(0.05..1.0);
        times.push(t);
    }
    let points = (0..=segments).map(|_| random_vec(rng, d, 2.0)).collect();
    PLPath::new(times, points).unwrap()
}

/// Orthonormal vectors from Gram-Schmidt on random draws.
pub fn random_frame(rng: &mut ChaCha8Rng, d: usize, k: usize) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    while out.len() < k {
        let mut v = random_vec(rng, d, 1.0);
        for u in &out {
            v -= u * u.dot(&v);
        }
        let n = v.norm();
        if n > 1e-3 {
            out.push(v / n);
        }
    }
    out
}

/// `(a + b, A + B + ½(abᵀ − baᵀ))`, written out entrywise.
pub fn product(g: &GroupElem, h: &GroupElem) -> (DVector<f64>, DMatrix<f64>) {
    let (a, b) = (g.vector(), h.vector());
    let d = a.len();
    let mut area = DMatrix::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            area[(i, j)] = g.area()[(i, j)] + h.area()[(i, j)] + 0.5 * (a[i] * b[j] - a[j] * b[i]);
        }
    }
    (a + b, area)
}

/// Increment and signed area of a polygon, by the shoelace sum
/// `½ Σ_k (p_k − p_0) ∧ (p_{k+1} − p_k)`.
pub fn shoelace(points: &[DVector<f64>]) -> (DVector<f64>, DMatrix<f64>) {
    let d = points[0].len();
    let mut area = DMatrix::zeros(d, d);
    for w in points.windows(2) {
        let y = &w[0] - &points[0];
        let dx = &w[1] - &w[0];
        for i in 0..d {
            for j in 0..d {
                area[(i, j)] += 0.5 * (y[i] * dx[j] - y[j] * dx[i]);
            }
        }
    }
    (points.last().unwrap() - &points[0], area)
}

/// `σ_1 ≥ σ_2 ≥ …` of a skew matrix: its singular values, which come in
/// equal pairs.
pub fn skew_sigmas(a: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = a.clone().singular_values_unordered().iter().copied().collect();
    ev.sort_by(|x, y| y.partial_cmp(x).unwrap());
    ev.into_iter().step_by(2).take(a.nrows() / 2).collect()
}

/// `Σ_j j σ_j`.
pub fn cc_oracle(a: &DMatrix<f64>) -> f64 {
    skew_sigmas(a)
        .iter()
        .enumerate()
        .map(|(j, s)| (j + 1) as f64 * s)
        .sum()
}

/// `2^{1/p} ‖σ‖_p`, `p > 0`.
pub fn schatten_oracle(a: &DMatrix<f64>, p: f64) -> f64 {
    let s = skew_sigmas(a);
    if p.is_infinite() {
        return s.first().copied().unwrap_or(0.0);
    }
    (2.0 * s.iter().map(|v| v.powf(p)).sum::<f64>()).powf(1.0 / p)
}

fn velocity(seg: &Segment, tau: f64) -> DVector<f64> {
    match seg {
        Segment::Constant { displacement, .. } => DVector::from_column_slice(displacement),
        Segment::Spiral { planes, .. } => {
            let d = planes[0].x.len();
            let mut v = DVector::zeros(d);
            for p in planes {
                let w = Complex64::new(p.amplitude[0], p.amplitude[1])
                    * Complex64::from_polar(1.0, -2.0 * PI * p.winding as f64 * tau);
                v += DVector::from_column_slice(&p.x) * w.re + DVector::from_column_slice(&p.y) * w.im;
            }
            v
        }
    }
}

/// RK4 on `γ̇ = u`, `Ȧ = ½ γ ∧ u`, each segment in its local time.
pub fn rk4_evolve(c: &Control, steps_per_segment: usize) -> (DVector<f64>, DMatrix<f64>) {
    let d = c.dim;
    let mut g = DVector::zeros(d);
    let mut area = DMatrix::zeros(d, d);
    let rhs = |g: &DVector<f64>, u: &DVector<f64>| (g * u.transpose() - u * g.transpose()) * 0.5;
    for seg in &c.segments {
        let h = 1.0 / steps_per_segment as f64;
        for k in 0..steps_per_segment {
            let t = k as f64 * h;
            let (u1, u2, u4) = (velocity(seg, t), velocity(seg, t + 0.5 * h), velocity(seg, t + h));
            let k1g = u1.clone();
            let k1a = rhs(&g, &u1);
            let g2 = &g + &k1g * (0.5 * h);
            let k2a = rhs(&g2, &u2);
            let g3 = &g + &u2 * (0.5 * h);
            let k3a = rhs(&g3, &u2);
            let g4 = &g + &u2 * h;
            let k4a = rhs(&g4, &u4);
            g += (&u1 + &u2 * 4.0 + &u4) * (h / 6.0);
            area += (k1a + k2a * 2.0 + k3a * 2.0 + k4a) * (h / 6.0);
        }
    }
    (g, area)
}

pub fn max_diff(g: &GroupElem, a: &DVector<f64>, area: &DMatrix<f64>) -> f64 {
    (g.vector() - a).amax().max((g.area() - area).amax())
}

fn random_segment(rng: &mut ChaCha8Rng, d: usize) -> Segment {
    if d < 2 || rng.random_bool(0.4) {
        return Segment::Constant {
            displacement: random_vec(rng, d, 1.5).as_slice().to_vec(),
            duration: 1.0,
        };
    }
    let k = rng.random_range(1..=d / 2);
    let frame = random_frame(rng, d, 2 * k);
    let mut windings: Vec<i64> = (1..=(k as i64 + 2)).collect();
    let planes = (0..k)
        .map(|j| {
            let pick = rng.random_range(0..windings.len());
            let n = windings.swap_remove(pick) * if rng.random_bool(0.5) { 1 } else { -1 };
            roughcc::paths::SpiralPlane {
                x: frame[2 * j].as_slice().to_vec(),
                y: frame[2 * j + 1].as_slice().to_vec(),
                amplitude: [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                winding: n,
            }
        })
        .collect();
    Segment::Spiral { planes, duration: 1.0 }
}

/// One segment, or a concatenation of two or three.
pub fn random_control(rng: &mut ChaCha8Rng, d: usize) -> Control {
    let parts = rng.random_range(1..=3);
    let mut c = Control::new(d, vec![random_segment(rng, d)]).unwrap();
    for _ in 1..parts {
        let next = Control::new(d, vec![random_segment(rng, d)]).unwrap();
        c = c.then(&next).unwrap();
    }
    c
}
