//! Dense real hypervectors and the holographic operators on them.
//!
//! Binding by circular convolution comes in two flavours: [`circ_conv_naive`]
//! (direct O(n²) sum, the reference) and [`circ_conv_fft`] (O(n log n) via a
//! complex FFT of any length). [`circ_conv`] picks one by size. Unbinding is
//! [`circ_corr`], defined as convolution with the [`involution`] of the cue so
//! that `circ_corr(circ_conv(a, b), b) ≈ a`.
//!
//! None of the binding operators normalize their output.

use std::cell::RefCell;
use std::fmt;
use std::ops::{Add, Index, Neg, Sub};

use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Dimensions at or below this use the direct convolution sum.
pub const NAIVE_CONV_MAX_DIM: usize = 32;

/// A dense vector of finite `f64` coordinates.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HyperVector {
    coords: Vec<f64>,
}

impl HyperVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidDimension(0, 1));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("hypervector"));
        }
        Ok(Self { coords })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![0.0; dim])
    }

    /// The unit vector with a single one at `index`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for dim {dim}"
            )));
        }
        let mut v = Self::zeros(dim)?;
        v.coords[index] = 1.0;
        Ok(v)
    }

    /// Unit impulse at index 0, the identity element of circular convolution.
    pub fn impulse(dim: usize) -> Result<Self> {
        Self::basis(dim, 0)
    }

    /// Pointer drawn from N(0, 1/dim) per coordinate, then L2-normalized.
    pub fn random_unit(dim: usize, rng: &mut SeededRng) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0, 1));
        }
        let scale = 1.0 / (dim as f64).sqrt();
        loop {
            let coords: Vec<f64> = (0..dim)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    z * scale
                })
                .collect();
            // An all-zero draw has probability zero but would not normalize.
            if let Ok(v) = Self::from_raw(coords).normalize() {
                return Ok(v);
            }
        }
    }

    /// Internal constructor for results of arithmetic on finite inputs.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coords
    }

    pub fn norm(&self) -> f64 {
        self.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self::from_raw(self.coords.iter().map(|c| c * factor).collect())
    }

    pub fn dot(&self, other: &Self) -> Result<f64> {
        check_dims("dot", self.dim(), other.dim())?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b)
            .sum())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        check_dims("add", self.dim(), other.dim())?;
        Ok(Self::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + b)
                .collect(),
        ))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.try_add(&-other)
    }

    /// `self + factor * other`
    pub fn add_scaled(&self, factor: f64, other: &Self) -> Result<Self> {
        check_dims("add_scaled", self.dim(), other.dim())?;
        Ok(Self::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + factor * b)
                .collect(),
        ))
    }

    /// Largest absolute coordinate difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims("max_abs_diff", self.dim(), other.dim())?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    /// Sum of a non-empty list of equal-dimension vectors.
    pub fn sum<'a, I>(vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a HyperVector>,
    {
        let mut iter = vectors.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::InvalidArgument("sum of no vectors".into()))?;
        iter.try_fold(first.clone(), |acc, v| acc.try_add(v))
    }
}

impl TryFrom<Vec<f64>> for HyperVector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<HyperVector> for Vec<f64> {
    fn from(v: HyperVector) -> Self {
        v.coords
    }
}

impl fmt::Debug for HyperVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dim() <= 8 {
            write!(f, "HyperVector{:?}", self.coords)
        } else {
            write!(
                f,
                "HyperVector(dim={}, norm={:.6}, head={:?})",
                self.dim(),
                self.norm(),
                &self.coords[..4]
            )
        }
    }
}

impl Index<usize> for HyperVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl Neg for &HyperVector {
    type Output = HyperVector;

    fn neg(self) -> HyperVector {
        self.scale(-1.0)
    }
}

/// Panics on dimension mismatch; use [`HyperVector::try_add`] otherwise.
impl Add for &HyperVector {
    type Output = HyperVector;

    fn add(self, rhs: &HyperVector) -> HyperVector {
        self.try_add(rhs).expect("dimension mismatch in vector addition")
    }
}

/// Panics on dimension mismatch; use [`HyperVector::try_sub`] otherwise.
impl Sub for &HyperVector {
    type Output = HyperVector;

    fn sub(self, rhs: &HyperVector) -> HyperVector {
        self.try_sub(rhs)
            .expect("dimension mismatch in vector subtraction")
    }
}

pub(crate) fn check_dims(op: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            op,
            expected,
            found,
        });
    }
    Ok(())
}

pub fn random_unit(dim: usize, rng: &mut SeededRng) -> Result<HyperVector> {
    HyperVector::random_unit(dim, rng)
}

pub fn cosine(a: &HyperVector, b: &HyperVector) -> Result<f64> {
    check_dims("cosine", a.dim(), b.dim())?;
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(Error::UndefinedSimilarity);
    }
    let c = a.dot(b)? / (na * nb);
    Ok(c.clamp(-1.0, 1.0))
}

/// `c_k = Σ_j a_j · b_{(k−j) mod n}`, summed in increasing `j`.
pub fn circ_conv_naive(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    check_dims("circ_conv", a.dim(), b.dim())?;
    let n = a.dim();
    let (a, b) = (a.as_slice(), b.as_slice());
    let out = (0..n)
        .map(|k| {
            let mut acc = 0.0;
            for j in 0..n {
                let idx = if j <= k { k - j } else { k + n - j };
                acc += a[j] * b[idx];
            }
            acc
        })
        .collect();
    Ok(HyperVector::from_raw(out))
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Circular convolution through the discrete Fourier transform. Any length
/// is accepted; non-power-of-two sizes fall back to the mixed-radix and
/// Bluestein plans of `rustfft`.
pub fn circ_conv_fft(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    check_dims("circ_conv", a.dim(), b.dim())?;
    let n = a.dim();
    let (fwd, inv) = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    });

    let mut fa: Vec<Complex<f64>> = a.as_slice().iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut fb: Vec<Complex<f64>> = b.as_slice().iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= *y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / n as f64;
    Ok(HyperVector::from_raw(
        fa.into_iter().map(|c| c.re * scale).collect(),
    ))
}

/// Size-dispatched circular convolution.
pub fn circ_conv(a: &HyperVector, b: &HyperVector) -> Result<HyperVector> {
    if a.dim() <= NAIVE_CONV_MAX_DIM {
        circ_conv_naive(a, b)
    } else {
        circ_conv_fft(a, b)
    }
}

/// `a*_i = a_{(−i) mod n}`.
pub fn involution(a: &HyperVector) -> HyperVector {
    let n = a.dim();
    let s = a.as_slice();
    HyperVector::from_raw((0..n).map(|i| s[(n - i) % n]).collect())
}

/// Unbinding: `trace ⊛ involution(cue)`.
pub fn circ_corr(trace: &HyperVector, cue: &HyperVector) -> Result<HyperVector> {
    check_dims("circ_corr", trace.dim(), cue.dim())?;
    circ_conv(trace, &involution(cue))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> HyperVector {
        HyperVector::new(x.to_vec()).unwrap()
    }

    /// Direct correlation sum, independent of the convolution code path:
    /// `y_k = Σ_j trace_{(k+j) mod n} · cue_j`.
    fn corr_oracle(trace: &HyperVector, cue: &HyperVector) -> HyperVector {
        let n = trace.dim();
        let out: Vec<f64> = (0..n)
            .map(|k| (0..n).map(|j| trace[(k + j) % n] * cue[j]).sum())
            .collect();
        v(&out)
    }

    #[test]
    fn random_unit_dim_one_is_sign() {
        let mut rng = SeededRng::new(3);
        let x = random_unit(1, &mut rng).unwrap();
        assert!((x[0].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_unit_rejects_zero_dim() {
        let mut rng = SeededRng::new(3);
        assert_eq!(
            random_unit(0, &mut rng).unwrap_err(),
            Error::InvalidDimension(0, 1)
        );
    }

    #[test]
    fn random_unit_is_deterministic() {
        let a = random_unit(512, &mut SeededRng::new(7)).unwrap();
        let b = random_unit(512, &mut SeededRng::new(7)).unwrap();
        assert_eq!(a, b);
        assert!((cosine(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        assert!((a.norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn random_pairs_are_nearly_orthogonal() {
        // E|cos| = sqrt(2 / (pi * dim)) for isotropic directions.
        let dim = 1024;
        let expected = (2.0 / (std::f64::consts::PI * dim as f64)).sqrt();
        let mut rng = SeededRng::new(11);
        let mean: f64 = (0..1000)
            .map(|_| {
                let a = random_unit(dim, &mut rng).unwrap();
                let b = random_unit(dim, &mut rng).unwrap();
                cosine(&a, &b).unwrap().abs()
            })
            .sum::<f64>()
            / 1000.0;
        assert!((0.5 * expected..1.5 * expected).contains(&mean), "{mean}");
        assert!((mean - 0.025).abs() < 0.0125);
    }

    #[test]
    fn cosine_basics_and_errors() {
        let a = v(&[1.0, 2.0, -3.0]);
        assert!((cosine(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((cosine(&a, &-&a).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(
            cosine(&a, &v(&[0.0, 0.0, 0.0])).unwrap_err(),
            Error::UndefinedSimilarity
        );
        assert!(matches!(
            cosine(&a, &v(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn rejects_non_finite() {
        assert_eq!(
            HyperVector::new(vec![1.0, f64::NAN]).unwrap_err(),
            Error::NonFinite("hypervector")
        );
        assert!(HyperVector::new(vec![]).is_err());
    }

    #[test]
    fn impulse_is_convolution_identity() {
        let mut rng = SeededRng::new(5);
        for dim in [3, 16, 100, 128] {
            let b = random_unit(dim, &mut rng).unwrap();
            let d = HyperVector::impulse(dim).unwrap();
            assert_eq!(circ_conv_naive(&d, &b).unwrap(), b);
            assert!(circ_conv_fft(&d, &b).unwrap().max_abs_diff(&b).unwrap() < 1e-9);
        }
    }

    #[test]
    fn shifted_impulse_rotates() {
        let a = v(&[0.0, 1.0, 0.0, 0.0]);
        let b = v(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(circ_conv_naive(&a, &b).unwrap(), v(&[4.0, 1.0, 2.0, 3.0]));
    }

    #[test]
    fn naive_convolution_commutes() {
        let mut rng = SeededRng::new(9);
        let a = random_unit(37, &mut rng).unwrap();
        let b = random_unit(37, &mut rng).unwrap();
        let ab = circ_conv_naive(&a, &b).unwrap();
        let ba = circ_conv_naive(&b, &a).unwrap();
        assert!(ab.max_abs_diff(&ba).unwrap() < 1e-12);
    }

    #[test]
    fn fft_matches_naive_at_128() {
        let mut rng = SeededRng::new(3);
        let a = random_unit(128, &mut rng).unwrap();
        let b = random_unit(128, &mut rng).unwrap();
        let fast = circ_conv_fft(&a, &b).unwrap();
        let slow = circ_conv_naive(&a, &b).unwrap();
        assert!(fast.max_abs_diff(&slow).unwrap() < 1e-9);
    }

    #[test]
    fn fft_is_linear() {
        let mut rng = SeededRng::new(4);
        let a = random_unit(96, &mut rng).unwrap();
        let b = random_unit(96, &mut rng).unwrap();
        let c = random_unit(96, &mut rng).unwrap();
        let lhs = circ_conv_fft(&a, &(&b + &c)).unwrap();
        let rhs = &circ_conv_fft(&a, &b).unwrap() + &circ_conv_fft(&a, &c).unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-9);
    }

    #[test]
    fn involution_examples() {
        let a = v(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(involution(&a), v(&[1.0, 4.0, 3.0, 2.0]));
        assert_eq!(involution(&involution(&a)), a);
    }

    #[test]
    fn self_correlation_peak_is_squared_norm() {
        let a = v(&[0.5, -1.0, 2.0, 0.25, 3.0]);
        let sq: f64 = a.as_slice().iter().map(|x| x * x).sum();
        let c = circ_conv_naive(&a, &involution(&a)).unwrap();
        assert!((c[0] - sq).abs() < 1e-12);
    }

    #[test]
    fn correlation_matches_direct_sum() {
        let mut rng = SeededRng::new(12);
        for dim in [5, 31, 64, 200] {
            let t = random_unit(dim, &mut rng).unwrap();
            let c = random_unit(dim, &mut rng).unwrap();
            let got = circ_corr(&t, &c).unwrap();
            assert!(got.max_abs_diff(&corr_oracle(&t, &c)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn correlation_with_impulse_is_identity() {
        let mut rng = SeededRng::new(1);
        let t = random_unit(64, &mut rng).unwrap();
        let got = circ_corr(&t, &HyperVector::impulse(64).unwrap()).unwrap();
        assert!(got.max_abs_diff(&t).unwrap() < 1e-12);
    }

    #[test]
    fn unbinding_fidelity_single_pair() {
        // Oracle: naive convolution then direct correlation sum.
        let dim = 1024;
        let trials = 100;
        let mut total = 0.0;
        for t in 0..trials {
            let mut rng = SeededRng::for_trial(2024, t);
            let a = random_unit(dim, &mut rng).unwrap();
            let b = random_unit(dim, &mut rng).unwrap();
            let bound = circ_conv_naive(&a, &b).unwrap();
            let rec = corr_oracle(&bound, &b);
            let fast = circ_corr(&circ_conv(&a, &b).unwrap(), &b).unwrap();
            assert!(fast.max_abs_diff(&rec).unwrap() < 1e-9);
            total += cosine(&rec, &a).unwrap();
        }
        let mean = total / trials as f64;
        assert!(mean >= 0.7, "mean fidelity {mean}");
    }

    #[test]
    fn unbinding_prefers_bound_partner() {
        let dim = 1024;
        let mut wins = 0;
        for t in 0..100 {
            let mut rng = SeededRng::for_trial(77, t);
            let a = random_unit(dim, &mut rng).unwrap();
            let b = random_unit(dim, &mut rng).unwrap();
            let c = random_unit(dim, &mut rng).unwrap();
            let d = random_unit(dim, &mut rng).unwrap();
            let trace = &circ_conv(&a, &b).unwrap() + &circ_conv(&c, &d).unwrap();
            let rec = circ_corr(&trace, &b).unwrap();
            if cosine(&rec, &a).unwrap() > cosine(&rec, &c).unwrap() {
                wins += 1;
            }
        }
        assert!(wins >= 95, "{wins}");
    }

    #[test]
    fn convolution_roughly_preserves_norm() {
        let dim = 256;
        let mut rng = SeededRng::new(8);
        let mean: f64 = (0..100)
            .map(|_| {
                let a = random_unit(dim, &mut rng).unwrap();
                let b = random_unit(dim, &mut rng).unwrap();
                circ_conv(&a, &b).unwrap().norm()
            })
            .sum::<f64>()
            / 100.0;
        assert!((mean - 1.0).abs() < 0.1, "{mean}");
    }

    #[test]
    fn serde_rejects_non_finite_and_empty() {
        assert!(serde_json::from_str::<HyperVector>("[]").is_err());
        let x: HyperVector = serde_json::from_str("[1.0, 2.5]").unwrap();
        assert_eq!(x, v(&[1.0, 2.5]));
    }
}
