//! Twisted SL(2,C)-valued loops as truncated matrix Laurent polynomials.
//!
//! A loop is stored by its Fourier coefficients `C_k`, `k in [-N, N]`, with
//! the twisting constraint: diagonal entries vanish for odd `k`, off-diagonal
//! entries vanish for even `k`. Coefficients are the canonical storage; an
//! equispaced sample representation on the unit circle (via FFT) backs the
//! operations that are exact pointwise (inversion, conjugate transpose,
//! products of sampled loops).

use crate::error::{Error, Result};
use crate::mat2::Mat2;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::sync::Arc;

/// Relative threshold below which forbidden-parity round-off is zeroed when
/// loops are rebuilt from circle samples.
const TWIST_CLEAN_TOL: f64 = 1e-7;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn fft_in_place(data: &mut [Complex64], inverse: bool) {
    let fft = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(data.len())
        } else {
            p.plan_fft_forward(data.len())
        }
    });
    fft.process(data);
}

/// Twisted loop: matrix Laurent polynomial with modes in `[-N, N]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwistedLoop {
    /// Coefficient of mode k at index k + N.
    coeffs: Vec<Mat2>,
    /// Truncation degree N >= 1.
    degree: usize,
}

impl TwistedLoop {
    /// Build from a coefficient table; entries violating the twisting pattern
    /// beyond a relative tolerance are rejected, smaller ones are zeroed.
    pub fn from_modes(degree: usize, modes: &[(i32, Mat2)]) -> Result<Self> {
        let degree = degree.max(1);
        let mut coeffs = vec![Mat2::zero(); 2 * degree + 1];
        for &(k, m) in modes {
            if k.unsigned_abs() as usize > degree {
                return Err(Error::InvalidGrid {
                    what: format!("mode {k} outside truncation degree {degree}"),
                });
            }
            coeffs[(k + degree as i32) as usize] += m;
        }
        let mut lp = TwistedLoop { coeffs, degree };
        lp.enforce_twisting()?;
        Ok(lp)
    }

    /// Constant loop (mode 0 only). The matrix must be diagonal-compatible
    /// with the twisting, i.e. anything goes on the diagonal, nothing off it.
    pub fn constant(m: Mat2, degree: usize) -> Result<Self> {
        Self::from_modes(degree, &[(0, m)])
    }

    pub fn identity(degree: usize) -> Self {
        Self::constant(Mat2::identity(), degree).expect("identity is twisted")
    }

    pub fn zero(degree: usize) -> Self {
        TwistedLoop {
            coeffs: vec![Mat2::zero(); 2 * degree.max(1) + 1],
            degree: degree.max(1),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, k: i32) -> Mat2 {
        if k.unsigned_abs() as usize > self.degree {
            Mat2::zero()
        } else {
            self.coeffs[(k + self.degree as i32) as usize]
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = (i32, &Mat2)> {
        let n = self.degree as i32;
        self.coeffs.iter().enumerate().map(move |(i, m)| (i as i32 - n, m))
    }

    pub(crate) fn set_coeff(&mut self, k: i32, m: Mat2) {
        let n = self.degree as i32;
        assert!(k.abs() <= n);
        self.coeffs[(k + n) as usize] = m;
    }

    /// Frobenius norm over all coefficients.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|m| m.frobenius().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Largest |entry| over all coefficients.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    /// Zero out forbidden-parity entries; error if they carry real mass.
    fn enforce_twisting(&mut self) -> Result<()> {
        let scale = self.max_abs().max(1e-300);
        let mut defect: f64 = 0.0;
        let n = self.degree as i32;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            let k = i as i32 - n;
            if k.rem_euclid(2) == 0 {
                defect = defect.max(c.m[0][1].norm()).max(c.m[1][0].norm());
                c.m[0][1] = Complex64::new(0.0, 0.0);
                c.m[1][0] = Complex64::new(0.0, 0.0);
            } else {
                defect = defect.max(c.m[0][0].norm()).max(c.m[1][1].norm());
                c.m[0][0] = Complex64::new(0.0, 0.0);
                c.m[1][1] = Complex64::new(0.0, 0.0);
            }
        }
        if defect > TWIST_CLEAN_TOL * scale {
            return Err(Error::StructureViolation {
                what: "twisting (diagonal even / off-diagonal odd)".into(),
                defect: defect / scale,
                tol: TWIST_CLEAN_TOL,
            });
        }
        Ok(())
    }

    /// Evaluate at a point of the unit circle.
    pub fn eval(&self, lambda: Complex64) -> Result<Mat2> {
        let r = lambda.norm();
        if (r - 1.0).abs() > 1e-12 {
            return Err(Error::OffCircle { modulus: r });
        }
        Ok(self.eval_unchecked(lambda))
    }

    /// Horner evaluation of the Laurent polynomial; no circle check.
    pub fn eval_unchecked(&self, lambda: Complex64) -> Mat2 {
        // sum_k C_k l^k = l^{-N} * sum_j C_{j-N} l^j, Horner in l.
        let mut acc = Mat2::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(lambda) + *c;
        }
        let lm = lambda.powi(-(self.degree as i32));
        acc.scale(lm)
    }

    /// Exact lambda-derivative of the truncated series at a circle point.
    pub fn dlambda_eval(&self, lambda: Complex64) -> Result<Mat2> {
        let r = lambda.norm();
        if (r - 1.0).abs() > 1e-12 {
            return Err(Error::OffCircle { modulus: r });
        }
        let n = self.degree as i32;
        let mut acc = Mat2::zero();
        for (i, c) in self.coeffs.iter().enumerate() {
            let k = i as i32 - n;
            if k == 0 {
                continue;
            }
            acc += c.scale(Complex64::new(k as f64, 0.0) * lambda.powi(k - 1));
        }
        Ok(acc)
    }

    /// The loop `lambda -> A(lambda)^H` on the circle: C_k -> (C_{-k})^H.
    pub fn star(&self) -> TwistedLoop {
        let n = self.degree as i32;
        let mut out = TwistedLoop::zero(self.degree);
        for k in -n..=n {
            out.set_coeff(k, self.coeff(-k).adjoint());
        }
        out
    }

    /// Full product: degree grows to `N_A + N_B`, no truncation loss.
    pub fn mul_full(&self, other: &TwistedLoop) -> TwistedLoop {
        self.mul_capped(other, self.degree + other.degree).0
    }

    /// Product truncated to `n_max`; second component is the spill norm
    /// (Frobenius mass of the discarded modes).
    pub fn mul_capped(&self, other: &TwistedLoop, n_max: usize) -> (TwistedLoop, f64) {
        let n_full = self.degree + other.degree;
        let n_keep = n_max.max(1).min(n_full);
        let na = self.degree as i32;
        let nb = other.degree as i32;
        let mut full = vec![Mat2::zero(); 2 * n_full + 1];
        for i in 0..self.coeffs.len() {
            let a = &self.coeffs[i];
            if a.max_abs() == 0.0 {
                continue;
            }
            let ka = i as i32 - na;
            for j in 0..other.coeffs.len() {
                let b = &other.coeffs[j];
                if b.max_abs() == 0.0 {
                    continue;
                }
                let kb = j as i32 - nb;
                full[(ka + kb + n_full as i32) as usize] += *a * *b;
            }
        }
        let mut out = TwistedLoop::zero(n_keep);
        let mut spill = 0.0f64;
        for (i, m) in full.into_iter().enumerate() {
            let k = i as i32 - n_full as i32;
            if k.unsigned_abs() as usize <= n_keep {
                out.set_coeff(k, m);
            } else {
                spill += m.frobenius().powi(2);
            }
        }
        (out, spill.sqrt())
    }

    /// Pointwise inverse on circle samples, transformed back to coefficients
    /// at the same truncation degree.
    pub fn inverse(&self) -> Result<TwistedLoop> {
        let samples = CircleSamples::from_loop(self, sample_count(2 * self.degree));
        let min_det = samples.min_abs_det();
        if min_det < 1e-10 {
            return Err(Error::NearSingularLoop { min_det });
        }
        let inv = samples.map(|m| m.inverse().expect("det checked above"));
        let (lp, _) = inv.to_loop(self.degree)?;
        Ok(lp)
    }

    /// Right-multiply every coefficient by a constant matrix. Only valid as a
    /// twisted loop when `d` is diagonal; returned untyped (caller checks).
    pub fn mul_const_diag(&self, d: &Mat2) -> TwistedLoop {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c = *c * *d;
        }
        out
    }

    /// Drop trailing modes whose magnitude is below `tol` times the loop max;
    /// never drops below degree 1.
    pub fn trim(&self, tol: f64) -> TwistedLoop {
        let scale = self.max_abs().max(1e-300);
        let n = self.degree as i32;
        let mut keep = 1i32;
        for k in 1..=n {
            let mag = self.coeff(k).max_abs().max(self.coeff(-k).max_abs());
            if mag > tol * scale {
                keep = k;
            }
        }
        let keep = keep as usize;
        if keep == self.degree {
            return self.clone();
        }
        let mut out = TwistedLoop::zero(keep);
        for k in -(keep as i32)..=(keep as i32) {
            out.set_coeff(k, self.coeff(k));
        }
        out
    }

    /// Re-embed at a (higher or lower) truncation degree; lowering reports
    /// the discarded mass.
    pub fn resize(&self, degree: usize) -> (TwistedLoop, f64) {
        let degree = degree.max(1);
        let mut out = TwistedLoop::zero(degree);
        let mut spill = 0.0f64;
        for (k, m) in self.modes() {
            if k.unsigned_abs() as usize <= degree {
                out.set_coeff(k, *m);
            } else {
                spill += m.frobenius().powi(2);
            }
        }
        (out, spill.sqrt())
    }

    /// Max over sampled circle points of |det - 1|.
    pub fn det_drift(&self) -> f64 {
        let samples = CircleSamples::from_loop(self, sample_count(self.degree));
        samples
            .values
            .iter()
            .map(|m| (m.det() - Complex64::new(1.0, 0.0)).norm())
            .fold(0.0, f64::max)
    }

    /// Sup over sampled circle points of the Frobenius norm.
    pub fn sup_norm(&self) -> f64 {
        let samples = CircleSamples::from_loop(self, sample_count(self.degree));
        samples.values.iter().map(|m| m.frobenius()).fold(0.0, f64::max)
    }
}

/// Smallest power of two >= 4N + 4 (Nyquist margin for degree-N products).
pub fn sample_count(n: usize) -> usize {
    let target = 4 * n.max(1) + 4;
    target.next_power_of_two()
}

/// Loop sampled at `M` equispaced circle points `lambda_j = exp(2 pi i j/M)`.
#[derive(Debug, Clone)]
pub struct CircleSamples {
    pub values: Vec<Mat2>,
}

impl CircleSamples {
    pub fn from_loop(lp: &TwistedLoop, m: usize) -> CircleSamples {
        let m = m.max(2 * lp.degree + 2).next_power_of_two();
        // Entry-wise inverse DFT: values[j] = sum_k C_k e^{+2 pi i jk/M}.
        let mut entries = [
            vec![Complex64::new(0.0, 0.0); m],
            vec![Complex64::new(0.0, 0.0); m],
            vec![Complex64::new(0.0, 0.0); m],
            vec![Complex64::new(0.0, 0.0); m],
        ];
        for (k, c) in lp.modes() {
            let bin = k.rem_euclid(m as i32) as usize;
            entries[0][bin] += c.m[0][0];
            entries[1][bin] += c.m[0][1];
            entries[2][bin] += c.m[1][0];
            entries[3][bin] += c.m[1][1];
        }
        for e in entries.iter_mut() {
            fft_in_place(e, true);
        }
        let values = (0..m)
            .map(|j| Mat2::new(entries[0][j], entries[1][j], entries[2][j], entries[3][j]))
            .collect();
        CircleSamples { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn point(&self, j: usize) -> Complex64 {
        let t = 2.0 * std::f64::consts::PI * j as f64 / self.len() as f64;
        Complex64::new(t.cos(), t.sin())
    }

    pub fn map(&self, f: impl Fn(&Mat2) -> Mat2) -> CircleSamples {
        CircleSamples {
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn mul(&self, other: &CircleSamples) -> CircleSamples {
        assert_eq!(self.len(), other.len());
        CircleSamples {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| *a * *b)
                .collect(),
        }
    }

    pub fn min_abs_det(&self) -> f64 {
        self.values
            .iter()
            .map(|m| m.det().norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Back to coefficients at the given degree. Returns the loop and the
    /// alias/truncation spill (mass of the discarded sample spectrum).
    pub fn to_loop(&self, degree: usize) -> Result<(TwistedLoop, f64)> {
        let m = self.len();
        let degree = degree.max(1).min((m - 1) / 2);
        let mut entries = [
            Vec::with_capacity(m),
            Vec::with_capacity(m),
            Vec::with_capacity(m),
            Vec::with_capacity(m),
        ];
        for v in &self.values {
            entries[0].push(v.m[0][0]);
            entries[1].push(v.m[0][1]);
            entries[2].push(v.m[1][0]);
            entries[3].push(v.m[1][1]);
        }
        for e in entries.iter_mut() {
            fft_in_place(e, false);
            let scale = 1.0 / m as f64;
            for c in e.iter_mut() {
                *c *= scale;
            }
        }
        let mut lp = TwistedLoop::zero(degree);
        let mut kept = vec![false; m];
        for k in -(degree as i32)..=(degree as i32) {
            let bin = k.rem_euclid(m as i32) as usize;
            kept[bin] = true;
            lp.set_coeff(
                k,
                Mat2::new(entries[0][bin], entries[1][bin], entries[2][bin], entries[3][bin]),
            );
        }
        let mut spill = 0.0f64;
        for bin in 0..m {
            if !kept[bin] {
                spill += entries.iter().map(|e| e[bin].norm_sqr()).sum::<f64>();
            }
        }
        lp.enforce_twisting()?;
        Ok((lp, spill.sqrt()))
    }
}

/// Loop with modes in `[0, N]` (extends holomorphically to the unit disc).
#[derive(Debug, Clone, PartialEq)]
pub struct PlusLoop {
    /// Coefficient of mode k at index k.
    pub coeffs: Vec<Mat2>,
}

impl PlusLoop {
    pub fn new(coeffs: Vec<Mat2>) -> Self {
        assert!(!coeffs.is_empty());
        PlusLoop { coeffs }
    }

    pub fn identity(degree: usize) -> Self {
        let mut coeffs = vec![Mat2::zero(); degree + 1];
        coeffs[0] = Mat2::identity();
        PlusLoop { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeff(&self, k: usize) -> Mat2 {
        self.coeffs.get(k).copied().unwrap_or_else(Mat2::zero)
    }

    /// Value at lambda = 0, the normalization slot.
    pub fn at_zero(&self) -> Mat2 {
        self.coeffs[0]
    }

    /// Embed as a twisted loop of at least the same degree.
    pub fn as_twisted(&self, degree: usize) -> Result<TwistedLoop> {
        let n = degree.max(self.degree()).max(1);
        let modes: Vec<(i32, Mat2)> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, m)| (k as i32, *m))
            .collect();
        TwistedLoop::from_modes(n, &modes)
    }

    pub fn eval(&self, lambda: Complex64) -> Mat2 {
        let mut acc = Mat2::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.scale(lambda) + *c;
        }
        acc
    }

    /// Drop trailing negligible coefficients.
    pub fn trim(&self, tol: f64) -> PlusLoop {
        let scale = self
            .coeffs
            .iter()
            .map(|m| m.max_abs())
            .fold(0.0f64, f64::max)
            .max(1e-300);
        let mut last = 0;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.max_abs() > tol * scale {
                last = k;
            }
        }
        PlusLoop {
            coeffs: self.coeffs[..=last].to_vec(),
        }
    }
}

/// Serialization DTO for twisted loops.
///
/// `{"degree": N, "modes": [{"k": -1, "m": [[[re,im],[re,im]],[[re,im],[re,im]]]}]}`
#[derive(Serialize, Deserialize)]
pub struct LoopJson {
    pub degree: usize,
    pub modes: Vec<ModeJson>,
}

#[derive(Serialize, Deserialize)]
pub struct ModeJson {
    pub k: i32,
    pub m: [[[f64; 2]; 2]; 2],
}

impl From<&TwistedLoop> for LoopJson {
    fn from(lp: &TwistedLoop) -> Self {
        let modes = lp
            .modes()
            .filter(|(_, m)| m.max_abs() > 0.0)
            .map(|(k, m)| ModeJson {
                k,
                m: [
                    [[m.m[0][0].re, m.m[0][0].im], [m.m[0][1].re, m.m[0][1].im]],
                    [[m.m[1][0].re, m.m[1][0].im], [m.m[1][1].re, m.m[1][1].im]],
                ],
            })
            .collect();
        LoopJson {
            degree: lp.degree(),
            modes,
        }
    }
}

impl TryFrom<&LoopJson> for TwistedLoop {
    type Error = Error;
    fn try_from(j: &LoopJson) -> Result<TwistedLoop> {
        let modes: Vec<(i32, Mat2)> = j
            .modes
            .iter()
            .map(|m| {
                (
                    m.k,
                    Mat2::new(
                        Complex64::new(m.m[0][0][0], m.m[0][0][1]),
                        Complex64::new(m.m[0][1][0], m.m[0][1][1]),
                        Complex64::new(m.m[1][0][0], m.m[1][0][1]),
                        Complex64::new(m.m[1][1][0], m.m[1][1][1]),
                    ),
                )
            })
            .collect();
        TwistedLoop::from_modes(j.degree, &modes)
    }
}

/// Shared handle used where grids of frames are passed around.
pub type LoopRef = Arc<TwistedLoop>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mat2::{I_C, ONE_C, ZERO_C};
    use proptest::prelude::*;

    fn cx(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// exp(w E) = cosh(w) I + sinh(w) E with E = [[0,1],[1,0]].
    fn exp_we(w: Complex64) -> Mat2 {
        Mat2::identity().scale(w.cosh()) + Mat2::offdiag_e().scale(w.sinh())
    }

    /// Cylinder holomorphic frame exp(z lambda^{-1} E) as a truncated loop.
    pub(crate) fn cylinder_phi(z: Complex64, n: usize) -> TwistedLoop {
        // exp(z l^{-1} E) = sum_k (z l^{-1})^k E^k / k!
        let mut modes = Vec::new();
        let mut pw = Complex64::new(1.0, 0.0);
        for k in 0..=n {
            if k > 0 {
                pw *= z / k as f64;
            }
            let m = if k % 2 == 0 {
                Mat2::diag(pw, pw)
            } else {
                Mat2::offdiag_e().scale(pw)
            };
            modes.push((-(k as i32), m));
        }
        TwistedLoop::from_modes(n, &modes).unwrap()
    }

    #[test]
    fn eval_identity_loop() {
        let id = TwistedLoop::identity(4);
        let v = id.eval(I_C).unwrap();
        assert!((v - Mat2::identity()).frobenius() < 1e-15);
    }

    #[test]
    fn eval_single_negative_mode() {
        let lp = TwistedLoop::from_modes(2, &[(-1, Mat2::offdiag_e())]).unwrap();
        let v = lp.eval(cx(1.0, 0.0)).unwrap();
        assert!((v - Mat2::offdiag_e()).frobenius() < 1e-15);
    }

    #[test]
    fn eval_rejects_off_circle() {
        let lp = TwistedLoop::identity(2);
        assert!(matches!(
            lp.eval(cx(1.1, 0.0)),
            Err(Error::OffCircle { .. })
        ));
    }

    #[test]
    fn cylinder_eval_at_one() {
        // Phi(0.3) at lambda = 1 is exp(0.3 E) = [[cosh .3, sinh .3],[sinh .3, cosh .3]]
        let phi = cylinder_phi(cx(0.3, 0.0), 24);
        let v = phi.eval(cx(1.0, 0.0)).unwrap();
        let expect = exp_we(cx(0.3, 0.0));
        assert!((v - expect).frobenius() < 1e-12);
    }

    #[test]
    fn mul_identity() {
        let phi = cylinder_phi(cx(0.2, 0.1), 8);
        let (prod, spill) = phi.mul_capped(&TwistedLoop::identity(1), 8);
        assert!(spill < 1e-15);
        assert!((prod.coeff(-3) - phi.coeff(-3)).frobenius() < 1e-15);
    }

    #[test]
    fn mul_inverse_modes_cancel() {
        let a = TwistedLoop::from_modes(1, &[(-1, Mat2::offdiag_e())]).unwrap();
        let b = TwistedLoop::from_modes(1, &[(1, Mat2::offdiag_e())]).unwrap();
        let p = a.mul_full(&b);
        assert!((p.coeff(0) - Mat2::identity()).frobenius() < 1e-15);
        assert!(p.coeff(-2).frobenius() < 1e-15);
        assert!(p.coeff(2).frobenius() < 1e-15);
    }

    #[test]
    fn cylinder_iwasawa_factors_multiply() {
        // F(z) B(z) = Phi(z) for the cylinder closed forms, checked by
        // coefficient product and evaluation at several circle points.
        let z = cx(0.2, 0.1);
        let n = 24;
        // F = exp((z l^{-1} - zbar l) E): build via samples of the closed form.
        let m = sample_count(n);
        let f_samples = CircleSamples {
            values: (0..m)
                .map(|j| {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    let l = cx(t.cos(), t.sin());
                    exp_we(z / l - z.conj() * l)
                })
                .collect(),
        };
        let (f, _) = f_samples.to_loop(n).unwrap();
        let b_samples = CircleSamples {
            values: (0..m)
                .map(|j| {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    let l = cx(t.cos(), t.sin());
                    exp_we(z.conj() * l)
                })
                .collect(),
        };
        let (b, _) = b_samples.to_loop(n).unwrap();
        let phi = cylinder_phi(z, n);
        let (fb, _) = f.mul_capped(&b, n);
        for l in [cx(1.0, 0.0), cx(0.0, 1.0), cx(-1.0, 0.0)] {
            let d = (fb.eval(l).unwrap() - phi.eval(l).unwrap()).frobenius();
            assert!(d < 1e-8, "difference {d} at lambda = {l}");
        }
    }

    #[test]
    fn inverse_of_identity() {
        let inv = TwistedLoop::identity(3).inverse().unwrap();
        assert!((inv.coeff(0) - Mat2::identity()).frobenius() < 1e-13);
        assert!(inv.coeff(1).frobenius() < 1e-13);
    }

    #[test]
    fn inverse_of_constant_loop() {
        let c = Mat2::new(cx(1.0, 0.5), ZERO_C, ZERO_C, cx(0.5, -0.2));
        let lp = TwistedLoop::constant(c, 4).unwrap();
        let inv = lp.inverse().unwrap();
        let expect = c.inverse().unwrap();
        assert!((inv.coeff(0) - expect).frobenius() < 1e-12);
    }

    #[test]
    fn unitary_loop_inverse_is_star() {
        // For the cylinder unitary factor F, F^{-1} = F^* on the circle.
        let z = cx(0.35, -0.2);
        let n = 20;
        let m = sample_count(n);
        let f_samples = CircleSamples {
            values: (0..m)
                .map(|j| {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    let l = cx(t.cos(), t.sin());
                    exp_we(z / l - z.conj() * l)
                })
                .collect(),
        };
        let (f, _) = f_samples.to_loop(n).unwrap();
        let inv = f.inverse().unwrap();
        let star = f.star();
        let mut worst = 0.0f64;
        for k in -(n as i32)..=(n as i32) {
            worst = worst.max((inv.coeff(k) - star.coeff(k)).frobenius());
        }
        assert!(worst < 1e-9, "worst coefficient difference {worst}");
    }

    #[test]
    fn star_moves_and_conjugates_modes() {
        let m01 = Mat2::new(ZERO_C, ONE_C, ZERO_C, ZERO_C);
        let lp = TwistedLoop::from_modes(2, &[(1, m01)]).unwrap();
        let st = lp.star();
        let expect = Mat2::new(ZERO_C, ZERO_C, ONE_C, ZERO_C);
        assert!((st.coeff(-1) - expect).frobenius() < 1e-15);
        assert!(st.coeff(1).frobenius() < 1e-15);
    }

    #[test]
    fn dlambda_constant_is_zero() {
        let lp = TwistedLoop::identity(3);
        let d = lp.dlambda_eval(cx(1.0, 0.0)).unwrap();
        assert!(d.frobenius() < 1e-15);
    }

    #[test]
    fn dlambda_single_negative_mode() {
        let mmat = Mat2::offdiag_e();
        let lp = TwistedLoop::from_modes(2, &[(-1, mmat)]).unwrap();
        let d = lp.dlambda_eval(cx(1.0, 0.0)).unwrap();
        assert!((d + mmat).frobenius() < 1e-15);
    }

    #[test]
    fn dlambda_cylinder_matches_closed_form() {
        // d/dl exp((z l^{-1} - zbar l)E) = (-z l^{-2} - zbar)(sinh w I + cosh w E)
        let x = 0.3;
        let z = cx(x, 0.0);
        let n = 28;
        let m = sample_count(n);
        let f_samples = CircleSamples {
            values: (0..m)
                .map(|j| {
                    let t = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                    let l = cx(t.cos(), t.sin());
                    exp_we(z / l - z.conj() * l)
                })
                .collect(),
        };
        let (f, _) = f_samples.to_loop(n).unwrap();
        let l0 = cx(1.0, 0.0);
        let d = f.dlambda_eval(l0).unwrap();
        let w = z / l0 - z.conj() * l0;
        let wp = -z / (l0 * l0) - z.conj();
        let expect = (Mat2::identity().scale(w.sinh()) + Mat2::offdiag_e().scale(w.cosh()))
            .scale(wp);
        assert!((d - expect).frobenius() < 1e-8);
    }

    #[test]
    fn roundtrip_samples() {
        let phi = cylinder_phi(cx(0.4, 0.3), 10);
        let s = CircleSamples::from_loop(&phi, sample_count(10));
        let (back, spill) = s.to_loop(10).unwrap();
        assert!(spill < 1e-12);
        let mut worst = 0.0f64;
        for k in -10i32..=10 {
            worst = worst.max((back.coeff(k) - phi.coeff(k)).frobenius());
        }
        assert!(worst < 1e-12);
    }

    #[test]
    fn twisting_rejects_bad_coefficients() {
        let bad = Mat2::new(ONE_C, ONE_C, ZERO_C, ZERO_C);
        assert!(TwistedLoop::from_modes(2, &[(0, bad)]).is_err());
    }

    prop_compose! {
        fn arb_twisted(max_deg: usize)
            (deg in 1..=max_deg)
            (deg in Just(deg),
             entries in proptest::collection::vec(-1.0f64..1.0, (2 * deg + 1) * 2 * 2))
            -> TwistedLoop
        {
            let n = deg as i32;
            let mut modes = Vec::new();
            let mut it = entries.chunks_exact(2);
            for k in -n..=n {
                let mut take = || {
                    let c = it.next().unwrap();
                    cx(c[0], c[1]) / (1.0 + (k.abs() as f64).powi(2))
                };
                let m = if k.rem_euclid(2) == 0 {
                    Mat2::diag(take(), take())
                } else {
                    let b = take();
                    let c = take();
                    Mat2::new(ZERO_C, b, c, ZERO_C)
                };
                modes.push((k, m));
            }
            TwistedLoop::from_modes(deg, &modes).unwrap()
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn prop_star_is_involution(a in arb_twisted(6)) {
            let ss = a.star().star();
            for k in -(a.degree() as i32)..=(a.degree() as i32) {
                prop_assert!((ss.coeff(k) - a.coeff(k)).frobenius() < 1e-14);
            }
        }

        #[test]
        fn prop_mul_preserves_twisting_structurally(a in arb_twisted(4), b in arb_twisted(4)) {
            let p = a.mul_full(&b);
            for (k, m) in p.modes() {
                if k.rem_euclid(2) == 0 {
                    prop_assert!(m.m[0][1].norm() == 0.0 && m.m[1][0].norm() == 0.0);
                } else {
                    prop_assert!(m.m[0][0].norm() == 0.0 && m.m[1][1].norm() == 0.0);
                }
            }
        }

        #[test]
        fn prop_eval_is_homomorphism(a in arb_twisted(4), b in arb_twisted(4), j in 0usize..16) {
            let t = 2.0 * std::f64::consts::PI * j as f64 / 16.0;
            let l = cx(t.cos(), t.sin());
            let p = a.mul_full(&b);
            let lhs = p.eval(l).unwrap();
            let rhs = a.eval(l).unwrap() * b.eval(l).unwrap();
            let scale = 1.0 + lhs.frobenius().max(rhs.frobenius());
            prop_assert!((lhs - rhs).frobenius() / scale < 1e-11);
        }

        #[test]
        fn prop_sample_roundtrip(a in arb_twisted(6)) {
            let s = CircleSamples::from_loop(&a, sample_count(a.degree()));
            let (back, _) = s.to_loop(a.degree()).unwrap();
            for k in -(a.degree() as i32)..=(a.degree() as i32) {
                prop_assert!((back.coeff(k) - a.coeff(k)).frobenius() < 1e-12);
            }
        }

        #[test]
        fn prop_associativity_up_to_spill(
            a in arb_twisted(3), b in arb_twisted(3), c in arb_twisted(3)
        ) {
            let cap = 6;
            let (ab, s1) = a.mul_capped(&b, cap);
            let (ab_c, s2) = ab.mul_capped(&c, cap);
            let (bc, s3) = b.mul_capped(&c, cap);
            let (a_bc, s4) = a.mul_capped(&bc, cap);
            let mut diff = 0.0f64;
            for k in -(cap as i32)..=(cap as i32) {
                diff += (ab_c.coeff(k) - a_bc.coeff(k)).frobenius().powi(2);
            }
            let diff = diff.sqrt();
            let bound = (s1 + s2 + s3 + s4) * (1.0 + a.coeff_norm() + b.coeff_norm() + c.coeff_norm());
            prop_assert!(diff <= bound + 1e-10, "diff {diff} bound {bound}");
        }
    }
}
