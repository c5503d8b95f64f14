//! Truncated tensor algebra `A_N` over `R^d` and the free step-2 nilpotent
//! group `G²(R^d)`.
//!
//! Level-2 objects are stored as `d × d` arrays whose `(i, j)` entry is the
//! coefficient of `e_i ⊗ e_j`. With this layout the wedge is
//! `(x ∧ y)_{ij} = x_i y_j − x_j y_i` and matrix-vector products use the usual
//! column convention, so for `Λ = λ e₁∧e₂` the flow `e^{sΛ}` turns `e₁`
//! towards `−e₂`.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::spectral;

/// Absolute tolerance on `A + Aᵀ` before a skew input is reported as drifted.
pub const EPS_SKEW: f64 = 1e-10;

/// Tolerance on the symmetric defect accepted as group-like.
pub const EPS_GEO: f64 = 1e-9;

/// Element of the truncated tensor algebra, dense storage.
///
/// Level `k` holds `d^k` entries in row-major multi-index order.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncTensor {
    dim: usize,
    depth: usize,
    levels: Vec<Vec<f64>>,
}

impl TruncTensor {
    pub fn zero(dim: usize, depth: usize) -> Self {
        assert!(dim > 0 && depth >= 1, "TruncTensor needs d > 0 and N >= 1");
        let levels = (0..=depth).map(|k| vec![0.0; dim.pow(k as u32)]).collect();
        Self { dim, depth, levels }
    }

    pub fn unit(dim: usize, depth: usize) -> Self {
        let mut t = Self::zero(dim, depth);
        t.levels[0][0] = 1.0;
        t
    }

    pub fn from_levels(dim: usize, levels: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 || levels.len() < 2 {
            return Err(Error::InvalidParam(
                "tensor needs d > 0 and at least levels 0 and 1".into(),
            ));
        }
        for (k, level) in levels.iter().enumerate() {
            let want = dim.pow(k as u32);
            if level.len() != want {
                return Err(Error::DimMismatch {
                    expected: want,
                    found: level.len(),
                });
            }
            if level.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("tensor level"));
            }
        }
        Ok(Self {
            dim,
            depth: levels.len() - 1,
            levels,
        })
    }

    /// `1 + v`, a pure level-one element plus unit scalar.
    pub fn from_vector(v: &DVector<f64>, depth: usize, scalar: f64) -> Self {
        let mut t = Self::zero(v.len(), depth);
        t.levels[0][0] = scalar;
        t.levels[1].copy_from_slice(v.as_slice());
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn scalar(&self) -> f64 {
        self.levels[0][0]
    }

    pub fn level(&self, k: usize) -> &[f64] {
        &self.levels[k]
    }

    pub fn level_mut(&mut self, k: usize) -> &mut [f64] {
        &mut self.levels[k]
    }

    pub fn levels(&self) -> &[Vec<f64>] {
        &self.levels
    }

    pub fn level1(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.levels[1])
    }

    /// Level 2 as a `d × d` matrix (`m[(i, j)]` is the `e_i ⊗ e_j` entry).
    pub fn level2(&self) -> DMatrix<f64> {
        assert!(self.depth >= 2, "level 2 requested on a depth-1 tensor");
        DMatrix::from_row_slice(self.dim, self.dim, &self.levels[2])
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        if self.depth != other.depth {
            return Err(Error::DepthMismatch {
                expected: self.depth,
                found: other.depth,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (lo, li) in out.levels.iter_mut().zip(&other.levels) {
            lo.iter_mut().zip(li).for_each(|(x, y)| *x += y);
        }
        Ok(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.levels
            .iter_mut()
            .for_each(|l| l.iter_mut().for_each(|x| *x *= s));
        out
    }

    /// Truncated product: level `k` is `Σ_{n+m=k} a_n ⊗ b_m`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let mut out = Self::zero(self.dim, self.depth);
        for k in 0..=self.depth {
            let dst = &mut out.levels[k];
            for n in 0..=k {
                let left = &self.levels[n];
                let right = &other.levels[k - n];
                let stride = right.len();
                for (i, &l) in left.iter().enumerate() {
                    if l == 0.0 {
                        continue;
                    }
                    let row = &mut dst[i * stride..(i + 1) * stride];
                    row.iter_mut().zip(right).for_each(|(d, &r)| *d += l * r);
                }
            }
        }
        Ok(out)
    }

    /// Truncated exponential of an element with zero scalar part.
    pub fn exp(&self) -> Result<Self> {
        if self.scalar().abs() > 1e-12 {
            return Err(Error::ScalarLevel {
                expected: 0.0,
                found: self.scalar(),
            });
        }
        let mut result = Self::unit(self.dim, self.depth);
        let mut power = Self::unit(self.dim, self.depth);
        for n in 1..=self.depth {
            power = power.mul(self)?.scale(1.0 / n as f64);
            result = result.add(&power)?;
        }
        Ok(result)
    }

    /// Truncated logarithm of an element with unit scalar part.
    pub fn log(&self) -> Result<Self> {
        if (self.scalar() - 1.0).abs() > 1e-12 {
            return Err(Error::ScalarLevel {
                expected: 1.0,
                found: self.scalar(),
            });
        }
        let mut y = self.clone();
        y.levels[0][0] = 0.0;
        let mut result = Self::zero(self.dim, self.depth);
        let mut power = Self::unit(self.dim, self.depth);
        for n in 1..=self.depth {
            power = power.mul(&y)?;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            result = result.add(&power.scale(sign / n as f64))?;
        }
        Ok(result)
    }

    /// Inverse of a group-like element (`scalar = 1`) via the Neumann series.
    pub fn inverse(&self) -> Result<Self> {
        if (self.scalar() - 1.0).abs() > 1e-12 {
            return Err(Error::ScalarLevel {
                expected: 1.0,
                found: self.scalar(),
            });
        }
        let mut y = self.clone();
        y.levels[0][0] = 0.0;
        let mut result = Self::unit(self.dim, self.depth);
        let mut power = Self::unit(self.dim, self.depth);
        for n in 1..=self.depth {
            power = power.mul(&y)?;
            let sign = if n % 2 == 1 { -1.0 } else { 1.0 };
            result = result.add(&power.scale(sign))?;
        }
        Ok(result)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.levels
            .iter()
            .zip(&other.levels)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// `x ∧ y = x ⊗ y − y ⊗ x`.
pub fn wedge(x: &DVector<f64>, y: &DVector<f64>) -> DMatrix<f64> {
    let xy = x * y.transpose();
    &xy - xy.transpose()
}

pub(crate) fn skew_defect(m: &DMatrix<f64>) -> f64 {
    (m + m.transpose()).amax()
}

pub(crate) fn antisymmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m - m.transpose()) * 0.5
}

/// Element of `G²(R^d)` in exponential coordinates `(a, A)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElem {
    a: DVector<f64>,
    area: DMatrix<f64>,
}

impl GroupElem {
    /// Builds `(a, A)`; `A` is replaced by its skew part. Corrections larger
    /// than [`EPS_SKEW`] are logged.
    pub fn new(a: DVector<f64>, area: DMatrix<f64>) -> Result<Self> {
        let d = a.len();
        if d == 0 {
            return Err(Error::InvalidParam("dimension must be positive".into()));
        }
        if area.nrows() != d || area.ncols() != d {
            return Err(Error::DimMismatch {
                expected: d,
                found: area.nrows().max(area.ncols()),
            });
        }
        if a.iter().chain(area.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("group element"));
        }
        let defect = skew_defect(&area);
        if defect > EPS_SKEW {
            log::warn!("area part not skew (defect {defect:e}); antisymmetrizing");
        }
        Ok(Self {
            a,
            area: antisymmetrize(&area),
        })
    }

    /// Skips validation; callers guarantee `A` is exactly skew.
    pub(crate) fn from_parts_unchecked(a: DVector<f64>, area: DMatrix<f64>) -> Self {
        Self { a, area }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            a: DVector::zeros(dim),
            area: DMatrix::zeros(dim, dim),
        }
    }

    pub fn horizontal(a: DVector<f64>) -> Self {
        let d = a.len();
        Self {
            a,
            area: DMatrix::zeros(d, d),
        }
    }

    pub fn vertical(area: DMatrix<f64>) -> Result<Self> {
        Self::new(DVector::zeros(area.nrows()), area)
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.a
    }

    pub fn area(&self) -> &DMatrix<f64> {
        &self.area
    }

    pub fn into_parts(self) -> (DVector<f64>, DMatrix<f64>) {
        (self.a, self.area)
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    /// `(a, A)·(b, B) = (a + b, A + B + ½ a∧b)`.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &Self) -> Self {
        let mut area = &self.area + &other.area;
        let half = 0.5;
        let d = self.dim();
        for j in 0..d {
            for i in 0..d {
                area[(i, j)] += half * (self.a[i] * other.a[j] - self.a[j] * other.a[i]);
            }
        }
        Self {
            a: &self.a + &other.a,
            area,
        }
    }

    pub fn inv(&self) -> Self {
        Self {
            a: -&self.a,
            area: -&self.area,
        }
    }

    /// `self⁻¹ · other`.
    pub fn increment_to(&self, other: &Self) -> Result<Self> {
        self.inv().mul(other)
    }

    /// Dilation `δ_λ(a, A) = (λa, λ²A)`.
    pub fn dilate(&self, lambda: f64) -> Self {
        Self {
            a: &self.a * lambda,
            area: &self.area * (lambda * lambda),
        }
    }

    /// Level 2 of the signature coordinates: `A + ½ a⊗a`.
    pub fn sig_level2(&self) -> DMatrix<f64> {
        &self.area + (&self.a * self.a.transpose()) * 0.5
    }

    /// Signature coordinates `1 + a + (A + ½ a⊗a)` in `A_2`.
    pub fn to_sig(&self) -> TruncTensor {
        let mut t = TruncTensor::from_vector(&self.a, 2, 1.0);
        let l2 = self.sig_level2();
        let d = self.dim();
        let dst = t.level_mut(2);
        for i in 0..d {
            for j in 0..d {
                dst[i * d + j] = l2[(i, j)];
            }
        }
        t
    }

    /// Exponential coordinates of a group-like depth-2 tensor with unit scalar.
    pub fn from_sig(s: &TruncTensor, norms: &HomNorms) -> Result<Self> {
        if s.depth() != 2 {
            return Err(Error::DepthMismatch {
                expected: 2,
                found: s.depth(),
            });
        }
        if (s.scalar() - 1.0).abs() > 1e-12 {
            return Err(Error::ScalarLevel {
                expected: 1.0,
                found: s.scalar(),
            });
        }
        let defect = weak_geom_defect(s, norms)?;
        if defect > EPS_GEO {
            return Err(Error::NotWeaklyGeometric { defect });
        }
        let a = s.level1();
        let area = s.level2() - (&a * a.transpose()) * 0.5;
        Ok(Self {
            area: antisymmetrize(&area),
            a,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.a - &other.a)
            .amax()
            .max((&self.area - &other.area).amax())
    }
}

/// Choice of cross-norm on `E ⊗ E`: the Schatten `p`-norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HomNorms {
    p: f64,
}

impl HomNorms {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidSchatten(p));
        }
        Ok(Self { p })
    }

    pub fn hilbert_schmidt() -> Self {
        Self { p: 2.0 }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn tensor_norm(&self, m: &DMatrix<f64>) -> f64 {
        spectral::schatten_matrix(m, self.p)
    }
}

impl Default for HomNorms {
    fn default() -> Self {
        Self::hilbert_schmidt()
    }
}

/// `|g| = max{‖a‖, ‖A + ½ a⊗a‖_⊗^{1/2}}`.
pub fn hom_norm(g: &GroupElem, norms: &HomNorms) -> f64 {
    let l2 = norms.tensor_norm(&g.sig_level2());
    g.a.norm().max(l2.sqrt())
}

/// `d(g, h) = |g⁻¹ h|`.
pub fn metric_d(g: &GroupElem, h: &GroupElem, norms: &HomNorms) -> Result<f64> {
    Ok(hom_norm(&g.increment_to(h)?, norms))
}

/// `‖sym(level 2) − ½ a⊗a‖_⊗`, zero exactly on group-like tensors.
pub fn weak_geom_defect(s: &TruncTensor, norms: &HomNorms) -> Result<f64> {
    if s.depth() < 2 {
        return Err(Error::DepthMismatch {
            expected: 2,
            found: s.depth(),
        });
    }
    let a = s.level1();
    let l2 = s.level2();
    let sym = (&l2 + l2.transpose()) * 0.5 - (&a * a.transpose()) * 0.5;
    Ok(norms.tensor_norm(&sym))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_tensor(rng: &mut ChaCha8Rng, d: usize, n: usize, scalar: f64) -> TruncTensor {
        let mut levels: Vec<Vec<f64>> = (0..=n)
            .map(|k| {
                (0..d.pow(k as u32))
                    .map(|_| rng.random_range(-1.0..1.0))
                    .collect()
            })
            .collect();
        levels[0][0] = scalar;
        TruncTensor::from_levels(d, levels).unwrap()
    }

    fn random_group(rng: &mut ChaCha8Rng, d: usize) -> GroupElem {
        let a = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let m = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        GroupElem::new(a, antisymmetrize(&m)).unwrap()
    }

    /// Independent graded convolution over explicit multi-indices.
    fn convolution_oracle(a: &TruncTensor, b: &TruncTensor) -> TruncTensor {
        let d = a.dim();
        let n = a.depth();
        let mut out = TruncTensor::zero(d, n);
        for k in 0..=n {
            for idx in 0..d.pow(k as u32) {
                let digits: Vec<usize> = (0..k)
                    .map(|p| (idx / d.pow((k - 1 - p) as u32)) % d)
                    .collect();
                let mut acc = 0.0;
                for split in 0..=k {
                    let (l, r) = digits.split_at(split);
                    let li = l.iter().fold(0, |s, &x| s * d + x);
                    let ri = r.iter().fold(0, |s, &x| s * d + x);
                    acc += a.level(split)[li] * b.level(k - split)[ri];
                }
                out.level_mut(k)[idx] = acc;
            }
        }
        out
    }

    fn e(d: usize, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(d);
        v[i] = 1.0;
        v
    }

    #[test]
    fn product_of_two_lines() {
        let a = TruncTensor::from_vector(&e(2, 0), 2, 1.0);
        let b = TruncTensor::from_vector(&e(2, 1), 2, 1.0);
        let p = a.mul(&b).unwrap();
        assert_eq!(p.level(0), &[1.0]);
        assert_eq!(p.level(1), &[1.0, 1.0]);
        assert_eq!(p.level(2), &[0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn unit_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_tensor(&mut rng, 3, 3, 0.7);
        let u = TruncTensor::unit(3, 3);
        assert_eq!(u.mul(&a).unwrap(), a);
        assert_eq!(a.mul(&u).unwrap(), a);
    }

    #[test]
    fn product_matches_convolution_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let sa = rng.random_range(-1.0..1.0);
            let a = random_tensor(&mut rng, 2, 3, sa);
            let sb = rng.random_range(-1.0..1.0);
            let b = random_tensor(&mut rng, 2, 3, sb);
            let fast = a.mul(&b).unwrap();
            let slow = convolution_oracle(&a, &b);
            assert!(fast.max_abs_diff(&slow) < 1e-14);
        }
    }

    #[test]
    fn mismatched_shapes_rejected() {
        let a = TruncTensor::unit(2, 2);
        assert!(matches!(
            a.mul(&TruncTensor::unit(3, 2)),
            Err(Error::DimMismatch { .. })
        ));
        assert!(matches!(
            a.mul(&TruncTensor::unit(2, 3)),
            Err(Error::DepthMismatch { .. })
        ));
    }

    #[test]
    fn exp_of_basis_vector() {
        let x = TruncTensor::from_vector(&e(2, 0), 2, 0.0);
        let ex = x.exp().unwrap();
        assert_eq!(ex.level(0), &[1.0]);
        assert_eq!(ex.level(1), &[1.0, 0.0]);
        assert_eq!(ex.level(2), &[0.5, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn log_of_one_plus_x_plus_x2() {
        // log(1 + x + X) = x + X − ½ x⊗x at depth 2.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = random_tensor(&mut rng, 3, 2, 1.0);
        let l = y.log().unwrap();
        let x = y.level1();
        let expect = y.level2() - (&x * x.transpose()) * 0.5;
        assert_eq!(l.scalar(), 0.0);
        assert_eq!(l.level(1), y.level(1));
        let got = l.level2();
        assert!((got - expect).amax() < 1e-15);
    }

    #[test]
    fn exp_log_wrong_scalar() {
        let t = TruncTensor::unit(2, 2);
        assert!(matches!(t.exp(), Err(Error::ScalarLevel { .. })));
        assert!(matches!(
            TruncTensor::zero(2, 2).log(),
            Err(Error::ScalarLevel { .. })
        ));
    }

    #[test]
    fn exp_log_inverse_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in [2, 3] {
            for _ in 0..10 {
                let x = random_tensor(&mut rng, 3, n, 0.0);
                let back = x.exp().unwrap().log().unwrap();
                assert!(back.max_abs_diff(&x) < 1e-12);
            }
        }
    }

    #[test]
    fn group_product_defining_formula() {
        let g = GroupElem::horizontal(e(2, 0));
        let h = GroupElem::horizontal(e(2, 1));
        let p = g.mul(&h).unwrap();
        assert_eq!(p.vector().as_slice(), &[1.0, 1.0]);
        let expect = wedge(&e(2, 0), &e(2, 1)) * 0.5;
        assert_eq!(p.area(), &expect);
    }

    #[test]
    fn group_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = random_group(&mut rng, 4);
        let p = g.mul(&g.inv()).unwrap();
        assert!(p.max_abs_diff(&GroupElem::identity(4)) < 1e-15);
    }

    #[test]
    fn signature_coordinates_are_homomorphic() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..20 {
            let g = random_group(&mut rng, 4);
            let h = random_group(&mut rng, 4);
            let lhs = g.mul(&h).unwrap().to_sig();
            let rhs = g.to_sig().mul(&h.to_sig()).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-13);
        }
    }

    #[test]
    fn straight_line_signature() {
        let a = DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let s = GroupElem::horizontal(a.clone()).to_sig();
        let expect = (&a * a.transpose()) * 0.5;
        assert!((s.level2() - expect).amax() == 0.0);
    }

    #[test]
    fn sig_exp_roundtrip_and_pure_area() {
        let norms = HomNorms::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let g = random_group(&mut rng, 5);
        let back = GroupElem::from_sig(&g.to_sig(), &norms).unwrap();
        assert!(back.max_abs_diff(&g) < 1e-15);

        let area = wedge(&e(2, 0), &e(2, 1)) * 0.8;
        let mut s = TruncTensor::unit(2, 2);
        s.level_mut(2).copy_from_slice(&[0.0, 0.8, -0.8, 0.0]);
        let g = GroupElem::from_sig(&s, &norms).unwrap();
        assert_eq!(g.vector().norm(), 0.0);
        assert_eq!(g.area(), &area);
    }

    #[test]
    fn non_group_like_rejected() {
        let mut s = TruncTensor::unit(2, 2);
        s.level_mut(2)[0] = 0.3;
        match GroupElem::from_sig(&s, &HomNorms::default()) {
            Err(Error::NotWeaklyGeometric { defect }) => assert!((defect - 0.3).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hom_norm_of_unit_vector() {
        // ‖½ e₁⊗e₁‖ is ½ for every Schatten p, so |(e₁, 0)| = 1.
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let n = HomNorms::new(p).unwrap();
            let g = GroupElem::horizontal(e(3, 0));
            assert!((hom_norm(&g, &n) - 1.0).abs() < 1e-15);
            assert!((n.tensor_norm(&g.sig_level2()) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn defect_vanishes_on_group_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let n = HomNorms::new(1.0).unwrap();
        for _ in 0..10 {
            let g = random_group(&mut rng, 4);
            assert!(weak_geom_defect(&g.to_sig(), &n).unwrap() < 1e-14);
        }
    }

    #[test]
    fn metric_is_left_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for p in [1.0, 2.0, f64::INFINITY] {
            let n = HomNorms::new(p).unwrap();
            for _ in 0..10 {
                let (g, h, k) = (
                    random_group(&mut rng, 4),
                    random_group(&mut rng, 4),
                    random_group(&mut rng, 4),
                );
                assert!(metric_d(&g, &g, &n).unwrap() < 1e-15);
                let base = metric_d(&g, &h, &n).unwrap();
                let moved = metric_d(&k.mul(&g).unwrap(), &k.mul(&h).unwrap(), &n).unwrap();
                assert!((base - moved).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn invalid_schatten_rejected() {
        assert!(HomNorms::new(0.5).is_err());
        assert!(HomNorms::new(f64::NAN).is_err());
        assert!(HomNorms::new(f64::INFINITY).is_ok());
    }
}
