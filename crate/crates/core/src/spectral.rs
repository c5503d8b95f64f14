//! Canonical form of skew-symmetric matrices and the norms built on it.
//!
//! A skew matrix `A` is written `Σ_j σ_j X_j ∧ Y_j` with orthonormal
//! `X_1, Y_1, …, X_k, Y_k` and `σ_1 ≥ … ≥ σ_k > 0`. Each `σ_j` is a singular
//! value of `A` with multiplicity two, which is where the `2^{1/p}` factor of
//! the Schatten norms comes from.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{skew_defect, GroupElem, EPS_SKEW};
use crate::error::{Error, Result};

/// Relative rank cutoff, in units of `σ_1`.
pub const EPS_RANK: f64 = 1e-10;

/// Absolute orthonormality tolerance.
pub const EPS_SPEC: f64 = 1e-9;

/// Singular values closer than this (relative to `σ_1`) are paired jointly.
const CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkewSpectrum {
    pub sigmas: Vec<f64>,
    /// `(X_j, Y_j)` with `⟨X_j, A Y_j⟩ = σ_j`.
    pub planes: Vec<(Vec<f64>, Vec<f64>)>,
}

impl SkewSpectrum {
    pub fn rank(&self) -> usize {
        self.sigmas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sigmas.is_empty()
    }

    pub fn plane(&self, j: usize) -> (DVector<f64>, DVector<f64>) {
        let (x, y) = &self.planes[j];
        (
            DVector::from_column_slice(x),
            DVector::from_column_slice(y),
        )
    }

    /// `Σ σ_j X_j ∧ Y_j`.
    pub fn reconstruct(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        for (j, &s) in self.sigmas.iter().enumerate() {
            let (x, y) = self.plane(j);
            let xy = &x * y.transpose() * s;
            m += &xy - xy.transpose();
        }
        m
    }

    pub fn schatten(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sigmas.first().copied().unwrap_or(0.0);
        }
        2f64.powf(1.0 / p) * lp(&self.sigmas, p)
    }

    /// `Σ_j j σ_j` over the nonincreasing spectrum.
    pub fn cc_norm(&self) -> f64 {
        self.sigmas
            .iter()
            .enumerate()
            .map(|(j, s)| (j + 1) as f64 * s)
            .sum()
    }
}

fn lp(values: &[f64], p: f64) -> f64 {
    if p == 1.0 {
        return values.iter().map(|v| v.abs()).sum();
    }
    if p == 2.0 {
        return values.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale
        * values
            .iter()
            .map(|v| (v.abs() / scale).powf(p))
            .sum::<f64>()
            .powf(1.0 / p)
}

/// Canonical form of a skew matrix.
///
/// Planes are built greedily inside each cluster of equal singular values
/// from the projections of `e_0, e_1, …` so the output is deterministic;
/// `A = 3 e₁∧e₂` yields exactly the plane `(e₁, e₂)`.
pub fn skew_canonical(a: &DMatrix<f64>) -> Result<SkewSpectrum> {
    let d = a.nrows();
    if a.ncols() != d {
        return Err(Error::DimMismatch {
            expected: d,
            found: a.ncols(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("skew matrix"));
    }
    let defect = skew_defect(a);
    if defect > EPS_SKEW {
        return Err(Error::NotSkew { defect });
    }
    let empty = SkewSpectrum {
        sigmas: vec![],
        planes: vec![],
    };
    if d < 2 || a.amax() == 0.0 {
        return Ok(empty);
    }

    // iA is Hermitian with eigenvalues ±σ_j; for iA v = σ v the real and
    // imaginary parts of v span the invariant plane of σ
    let eig = SymmetricEigen::new(a.map(|v| Complex64::new(0.0, v)));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));
    let s1 = eig.eigenvalues[order[0]];
    let cutoff = EPS_RANK * s1;
    let kept: Vec<usize> = order
        .into_iter()
        .filter(|&i| eig.eigenvalues[i] > cutoff)
        .collect();

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &kept {
        let s = eig.eigenvalues[i];
        match clusters.last_mut() {
            Some(c) if eig.eigenvalues[c[c.len() - 1]] - s <= CLUSTER_TOL * s1 => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }

    let mut chosen: Vec<DVector<f64>> = Vec::new();
    let mut out: Vec<(f64, DVector<f64>, DVector<f64>)> = Vec::new();
    for cluster in clusters {
        let mut basis: Vec<DVector<f64>> = Vec::with_capacity(2 * cluster.len());
        for &i in &cluster {
            let v = eig.eigenvectors.column(i);
            for part in [v.map(|c| c.re), v.map(|c| c.im)] {
                let mut w = part;
                orthogonalize(&mut w, &basis);
                let n = w.norm();
                if n > 1e-6 {
                    basis.push(w / n);
                }
            }
        }
        let pairs = cluster.len();
        let mut found = 0;
        for coord in 0..d {
            if found == pairs {
                break;
            }
            let mut w = DVector::zeros(d);
            for b in &basis {
                w += b * b[coord];
            }
            orthogonalize(&mut w, &chosen);
            let nw = w.norm();
            if nw < 1e-6 {
                continue;
            }
            let x = w / nw;
            let mut y = -(a * &x);
            orthogonalize(&mut y, &chosen);
            y -= &x * x.dot(&y);
            let ny = y.norm();
            if ny <= cutoff {
                continue;
            }
            let y = y / ny;
            let sigma = x.dot(&(a * &y));
            chosen.push(x.clone());
            chosen.push(y.clone());
            out.push((sigma, x, y));
            found += 1;
        }
    }
    out.sort_by(|p, q| q.0.total_cmp(&p.0));
    out.retain(|p| p.0 > cutoff);
    Ok(SkewSpectrum {
        sigmas: out.iter().map(|p| p.0).collect(),
        planes: out
            .into_iter()
            .map(|(_, x, y)| (x.as_slice().to_vec(), y.as_slice().to_vec()))
            .collect(),
    })
}

fn orthogonalize(w: &mut DVector<f64>, against: &[DVector<f64>]) {
    // two passes keep the result orthogonal to working precision
    for _ in 0..2 {
        for c in against {
            let proj = c.dot(w);
            w.axpy(-proj, c, 1.0);
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || (p < 1.0 && p != 0.5) {
        return Err(Error::InvalidSchatten(p));
    }
    Ok(())
}

/// Ordinary Schatten `p`-norm from all singular values of `m`.
///
/// For skew `m` each `σ_j` appears twice, so this equals `2^{1/p}‖σ‖_p`.
/// No validation of `p`; see [`schatten`].
pub fn schatten_matrix(m: &DMatrix<f64>, p: f64) -> f64 {
    if p == 2.0 {
        return m.norm();
    }
    if m.amax() == 0.0 {
        return 0.0;
    }
    let sv = m.singular_values_unordered();
    if p.is_infinite() {
        return sv.amax();
    }
    lp(sv.as_slice(), p)
}

/// Schatten `p`-norm, `p ∈ [1, ∞]`, plus the quasi-norm `p = ½`.
pub fn schatten(m: &DMatrix<f64>, p: f64) -> Result<f64> {
    check_p(p)?;
    Ok(schatten_matrix(m, p))
}

pub fn cc_norm(a: &DMatrix<f64>) -> Result<f64> {
    Ok(skew_canonical(a)?.cc_norm())
}

pub fn cc_half(a: &DMatrix<f64>) -> Result<f64> {
    Ok(cc_norm(a)?.sqrt())
}

/// `|||g||| = max{‖a‖, √π ‖A‖_cc^{1/2}}`.
pub fn triple_norm(g: &GroupElem) -> f64 {
    let cc = skew_canonical(g.area())
        .expect("group element areas are skew")
        .cc_norm();
    g.vector()
        .norm()
        .max((std::f64::consts::PI * cc).sqrt())
}

/// Closed subspace given by an orthonormal basis (columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    basis: DMatrix<f64>,
}

impl Subspace {
    pub fn full(dim: usize) -> Self {
        Self {
            basis: DMatrix::identity(dim, dim),
        }
    }

    /// Orthonormalized span; vectors with residual norm below `tol` (relative
    /// to their own norm) are dropped.
    pub fn span(dim: usize, vectors: &[DVector<f64>], tol: f64) -> Result<Self> {
        let mut cols: Vec<DVector<f64>> = Vec::new();
        for v in vectors {
            if v.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: v.len(),
                });
            }
            let n0 = v.norm();
            if n0 == 0.0 {
                continue;
            }
            let mut w = v.clone();
            orthogonalize(&mut w, &cols);
            let n = w.norm();
            if n > tol * n0 && cols.len() < dim {
                cols.push(w / n);
            }
        }
        let basis = if cols.is_empty() {
            DMatrix::zeros(dim, 0)
        } else {
            DMatrix::from_columns(&cols)
        };
        Ok(Self { basis })
    }

    /// Validates orthonormality within [`EPS_SPEC`].
    pub fn from_basis(basis: DMatrix<f64>) -> Result<Self> {
        let gram = basis.transpose() * &basis;
        let defect = (gram - DMatrix::identity(basis.ncols(), basis.ncols())).amax();
        if defect > EPS_SPEC {
            return Err(Error::InvalidParam(format!(
                "basis not orthonormal (defect {defect:e})"
            )));
        }
        Ok(Self { basis })
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn columns(&self) -> Vec<DVector<f64>> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn complement(&self) -> Self {
        let d = self.dim();
        let mut cols = self.columns();
        let own = cols.len();
        for i in 0..d {
            if cols.len() == d {
                break;
            }
            let mut w = DVector::zeros(d);
            w[i] = 1.0;
            orthogonalize(&mut w, &cols);
            let n = w.norm();
            if n > 1e-6 {
                cols.push(w / n);
            }
        }
        let rest = &cols[own..];
        let basis = if rest.is_empty() {
            DMatrix::zeros(d, 0)
        } else {
            DMatrix::from_columns(rest)
        };
        Self { basis }
    }

    pub fn project_vector(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// `P M P`.
    pub fn compress(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let bt = self.basis.transpose();
        &self.basis * (&bt * m * &self.basis) * bt
    }
}

/// `pr_F(a, A) = (P a, P A P)`, a group homomorphism.
pub fn project_group(g: &GroupElem, f: &Subspace) -> Result<GroupElem> {
    if f.dim() != g.dim() {
        return Err(Error::DimMismatch {
            expected: g.dim(),
            found: f.dim(),
        });
    }
    let a = f.project_vector(g.vector());
    let area = f.compress(g.area());
    let area = (&area - area.transpose()) * 0.5;
    Ok(GroupElem::from_parts_unchecked(a, area))
}

/// `P A P^⊥ + P^⊥ A P`, the part of the area linking `F` and `F^⊥`.
pub fn project_wedge(g: &GroupElem, f: &Subspace) -> Result<DMatrix<f64>> {
    if f.dim() != g.dim() {
        return Err(Error::DimMismatch {
            expected: g.dim(),
            found: f.dim(),
        });
    }
    let p = f.projector();
    let q = DMatrix::identity(g.dim(), g.dim()) - &p;
    let a = g.area();
    Ok(&p * a * &q + &q * a * &p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{antisymmetrize, metric_d, wedge, HomNorms};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e(d: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    }

    fn random_skew(rng: &mut ChaCha8Rng, d: usize) -> DMatrix<f64> {
        antisymmetrize(&DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn single_block() {
        let a = wedge(&e(4, 0), &e(4, 1)) * 3.0;
        let s = skew_canonical(&a).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.sigmas[0] - 3.0).abs() < 1e-14);
        let (x, y) = s.plane(0);
        assert!((x - e(4, 0)).amax() < 1e-14);
        assert!((y - e(4, 1)).amax() < 1e-14);
    }

    #[test]
    fn zero_matrix_has_empty_spectrum() {
        assert!(skew_canonical(&DMatrix::zeros(5, 5)).unwrap().is_empty());
    }

    #[test]
    fn non_skew_rejected() {
        let mut m = DMatrix::zeros(3, 3);
        m[(0, 1)] = 1.0;
        match skew_canonical(&m) {
            Err(Error::NotSkew { defect }) => assert_eq!(defect, 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    /// Moduli of the complex eigenvalues, each conjugate pair counted once.
    fn eigen_oracle(a: &DMatrix<f64>) -> Vec<f64> {
        let eig = a.complex_eigenvalues();
        let mut imag: Vec<f64> = eig
            .iter()
            .map(|z: &Complex64| z.im)
            .filter(|v| *v > 1e-9)
            .collect();
        imag.sort_by(|a, b| b.total_cmp(a));
        imag
    }

    #[test]
    fn random_reconstruction_and_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_skew(&mut rng, 6);
            let s = skew_canonical(&a).unwrap();
            assert_eq!(s.rank(), 3);
            assert!((s.reconstruct(6) - &a).amax() < 1e-10);
            let oracle = eigen_oracle(&a);
            for (x, y) in s.sigmas.iter().zip(&oracle) {
                assert!((x - y).abs() < 1e-10);
            }
            // orthonormality of all 2k vectors
            let cols: Vec<DVector<f64>> = (0..s.rank())
                .flat_map(|j| {
                    let (x, y) = s.plane(j);
                    [x, y]
                })
                .collect();
            let b = DMatrix::from_columns(&cols);
            let gram = b.transpose() * b;
            assert!((gram - DMatrix::identity(6, 6)).amax() < EPS_SPEC);
        }
    }

    #[test]
    fn odd_dimensions_keep_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for d in [3, 5, 7, 9] {
            for _ in 0..20 {
                let a = random_skew(&mut rng, d);
                let s = skew_canonical(&a).unwrap();
                assert_eq!(s.rank(), d / 2);
                assert!((s.reconstruct(d) - &a).amax() < 1e-12);
            }
        }
    }

    #[test]
    fn repeated_sigma_is_handled() {
        let a = (wedge(&e(5, 0), &e(5, 3)) + wedge(&e(5, 1), &e(5, 2))) * 2.0;
        let s = skew_canonical(&a).unwrap();
        assert_eq!(s.sigmas.len(), 2);
        assert!((s.reconstruct(5) - &a).amax() < 1e-12);
        let first = s.plane(0).0;
        assert!((first - e(5, 0)).amax() < 1e-12);
    }

    #[test]
    fn norm_values() {
        let a = wedge(&e(4, 0), &e(4, 1)) * 3.0 + wedge(&e(4, 2), &e(4, 3));
        assert!((cc_norm(&a).unwrap() - 5.0).abs() < 1e-13);
        let b = wedge(&e(2, 0), &e(2, 1));
        let s2 = schatten(&b, 2.0).unwrap();
        assert!((s2 - 2f64.sqrt()).abs() < 1e-15);
        assert!((s2 - b.norm()).abs() < 1e-15);
        let spec = skew_canonical(&a).unwrap();
        for p in [1.0, 1.5, 2.0, 3.0, f64::INFINITY] {
            let direct = schatten(&a, p).unwrap();
            assert!((direct - spec.schatten(p)).abs() < 1e-12, "p = {p}");
        }
        assert!((schatten(&a, f64::INFINITY).unwrap() - 3.0).abs() < 1e-13);
        assert!(schatten(&a, 0.7).is_err());
        assert!(schatten(&a, 0.5).is_ok());
    }

    #[test]
    fn triple_norm_examples() {
        let pi = std::f64::consts::PI;
        assert!((triple_norm(&GroupElem::horizontal(e(3, 0))) - 1.0).abs() < 1e-15);
        let g = GroupElem::vertical(wedge(&e(2, 0), &e(2, 1)) * 0.3).unwrap();
        assert!((triple_norm(&g) - (pi * 0.3).sqrt()).abs() < 1e-14);
        let g = GroupElem::vertical(wedge(&e(4, 0), &e(4, 1)) * 3.0 + wedge(&e(4, 2), &e(4, 3)))
            .unwrap();
        assert!((triple_norm(&g) - (5.0 * pi).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn projection_examples() {
        let d = 4;
        let g = GroupElem::new(&e(d, 0) + e(d, 2), wedge(&e(d, 0), &e(d, 2))).unwrap();
        let full = project_group(&g, &Subspace::full(d)).unwrap();
        assert!(full.max_abs_diff(&g) < 1e-15);
        let f = Subspace::span(d, &[e(d, 0), e(d, 1)], 1e-12).unwrap();
        let p = project_group(&g, &f).unwrap();
        assert!(p.max_abs_diff(&GroupElem::horizontal(e(d, 0))) < 1e-15);
    }

    #[test]
    fn projection_pieces_reassemble() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let d = 6;
        let a = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let g = GroupElem::new(a, random_skew(&mut rng, d)).unwrap();
        let vecs: Vec<DVector<f64>> = (0..2)
            .map(|_| DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0)))
            .collect();
        let f = Subspace::span(d, &vecs, 1e-12).unwrap();
        let fp = f.complement();
        assert_eq!(fp.rank(), d - 2);
        let p = project_group(&g, &f).unwrap();
        let q = project_group(&g, &fp).unwrap();
        let w = project_wedge(&g, &f).unwrap();
        assert!((p.vector() + q.vector() - g.vector()).amax() < 1e-14);
        assert!((p.area() + q.area() + w - g.area()).amax() < 1e-14);
    }

    #[test]
    fn contraction_under_projection() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let d = 5;
        for p in [1.0, 2.0, f64::INFINITY] {
            let norms = HomNorms::new(p).unwrap();
            for _ in 0..50 {
                let g = GroupElem::new(
                    DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0)),
                    random_skew(&mut rng, d),
                )
                .unwrap();
                let h = GroupElem::new(
                    DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0)),
                    random_skew(&mut rng, d),
                )
                .unwrap();
                let k = rng.random_range(1..d);
                let vecs: Vec<DVector<f64>> = (0..k)
                    .map(|_| DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0)))
                    .collect();
                let f = Subspace::span(d, &vecs, 1e-12).unwrap();
                let before = metric_d(&g, &h, &norms).unwrap();
                let after = metric_d(
                    &project_group(&g, &f).unwrap(),
                    &project_group(&h, &f).unwrap(),
                    &norms,
                )
                .unwrap();
                assert!(after <= before + 1e-10);
            }
        }
    }
}
