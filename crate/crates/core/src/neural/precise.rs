//! Extended-precision reference evaluators.
//!
//! Central differences in plain `f64` bottom out at roughly `1e-16 * |loss| / eps`
//! of absolute error, which swamps the relative error of small gradient entries.
//! The evaluators here recompute the forward pass generically over [`Real`], so a
//! finite-difference oracle can run in double-double arithmetic (about 32
//! significant digits) and report the loss relative to a base point.

use std::ops::{Add, Div, Mul, Neg, Sub};

use super::{GruStack, Mlp, Slp};

/// Scalar field the reference evaluators are generic over.
pub trait Real:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn tanh(self) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }

    fn one() -> Self {
        Self::from_f64(1.0)
    }

    fn mul_f64(self, b: f64) -> Self {
        self * Self::from_f64(b)
    }

    /// `acc + Σ w_j x_j`.
    fn dot_acc(acc: Self, w: &[f64], x: &[Self]) -> Self {
        w.iter().zip(x).fold(acc, |s, (&wj, &xj)| s + xj.mul_f64(wj))
    }

    fn sigmoid(self) -> Self {
        if self.to_f64() >= 0.0 {
            Self::one() / (Self::one() + (-self).exp())
        } else {
            let e = self.exp();
            e / (Self::one() + e)
        }
    }

    /// `ln(1 + e^x)` without overflow.
    fn softplus(self) -> Self {
        let x = self.to_f64();
        let pos = if x > 0.0 { self } else { Self::zero() };
        let neg_abs = if x > 0.0 { -self } else { self };
        pos + (Self::one() + neg_abs.exp()).ln()
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn sigmoid(self) -> Self {
        super::sigmoid(self)
    }
    fn softplus(self) -> Self {
        self.max(0.0) + (-self.abs()).exp().ln_1p()
    }
}

/// Unevaluated sum `hi + lo` of two doubles with `|lo| <= ulp(hi) / 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd {
    hi: std::f64::consts::LN_2,
    lo: 2.319_046_813_846_299_6e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
#[cfg(target_feature = "fma")]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

// Dekker's product; without hardware FMA `mul_add` is a slow libm call.
#[cfg(not(target_feature = "fma"))]
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ah, al) = split(a);
    let (bh, bl) = split(b);
    (p, ((ah * bh - p) + ah * bl + al * bh) + al * bl)
}

#[cfg(not(target_feature = "fma"))]
#[inline]
fn split(a: f64) -> (f64, f64) {
    const SPLITTER: f64 = 134_217_729.0; // 2^27 + 1
    let t = SPLITTER * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    fn scale_pow2(self, k: i32) -> Self {
        let f = 2f64.powi(k);
        Self::new(self.hi * f, self.lo * f)
    }

    /// `e^x - 1`, accurate for small `x`.
    /// Division by a double, exact up to double-double rounding.
    #[inline]
    pub fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, t) = two_sum(self.hi, -p);
        let q2 = (s + (t - e + self.lo)) / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::new(hi, lo)
    }

    pub fn exp_m1(self) -> Self {
        if self.hi == 0.0 {
            return Self::default();
        }
        if self.hi.abs() > 0.5 {
            return self.exp() - Self::one();
        }
        expm1_reduced(self)
    }
}

/// `e^r - 1` for `|r| <= ln(2) / 2`: Taylor series on `r / 1024`, then ten
/// applications of `em1(2s) = em1(s) * (em1(s) + 2)`.
fn expm1_reduced(r: Dd) -> Dd {
    const HALVINGS: i32 = 10;
    let s = r.scale_pow2(-HALVINGS);
    let mut term = s;
    let mut sum = s;
    for i in 2..=24 {
        term = (term * s).div_f64(i as f64);
        sum = sum + term;
        if term.hi.abs() < 1e-36 {
            break;
        }
    }
    for _ in 0..HALVINGS {
        sum = sum * (sum + Dd::from_f64(2.0));
    }
    sum
}

impl Add for Dd {
    type Output = Dd;
    #[inline]
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(s, e + self.lo + o.lo);
        Dd::new(hi, lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    #[inline]
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Neg for Dd {
    type Output = Dd;
    #[inline]
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Mul for Dd {
    type Output = Dd;
    #[inline]
    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        let (hi, lo) = quick_two_sum(p, e + self.hi * o.lo + self.lo * o.hi);
        Dd::new(hi, lo)
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd::new(hi, lo) + Dd::from_f64(q3)
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Self {
        Dd::new(x, 0.0)
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (hi, lo) = quick_two_sum(p, e + self.lo * b);
        Dd::new(hi, lo)
    }

    /// Compensated dot product: high parts summed error-free, every
    /// rounding error collected in one double.
    fn dot_acc(acc: Self, w: &[f64], x: &[Self]) -> Self {
        let (mut s, mut c) = (acc.hi, acc.lo);
        for (&wj, xj) in w.iter().zip(x) {
            let (p, e) = two_prod(xj.hi, wj);
            let (t, f) = two_sum(s, p);
            s = t;
            c += e + f + xj.lo * wj;
        }
        let (hi, lo) = quick_two_sum(s, c);
        Dd::new(hi, lo)
    }

    fn exp(self) -> Self {
        if self.hi < -745.0 {
            return Dd::default();
        }
        assert!(self.hi < 709.0, "exp overflow in reference evaluator");
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        (expm1_reduced(r) + Dd::one()).scale_pow2(k as i32)
    }

    /// One Newton step on `e^y = x` from the `f64` logarithm.
    fn ln(self) -> Self {
        assert!(self.hi > 0.0, "ln of non-positive value in reference evaluator");
        let y = Dd::from_f64(self.hi.ln());
        y + self * (-y).exp() - Dd::one()
    }

    fn tanh(self) -> Self {
        if self.hi.abs() > 40.0 {
            return Dd::from_f64(self.hi.signum());
        }
        let neg = self.hi < 0.0;
        let a = if neg { -self } else { self };
        let e = (a.mul_f64(-2.0)).exp_m1();
        let t = -e / (e + Dd::from_f64(2.0));
        if neg {
            -t
        } else {
            t
        }
    }
}

fn affine<R: Real>(acc: &mut [R], w: &super::Matrix, x: &[R]) {
    let cols = w.cols();
    for (i, a) in acc.iter_mut().enumerate() {
        *a = R::dot_acc(*a, &w.data()[i * cols..(i + 1) * cols], x);
    }
}

fn bias<R: Real>(b: &super::Matrix) -> Vec<R> {
    b.data().iter().map(|&v| R::from_f64(v)).collect()
}

/// Top-layer hidden state after every step of `seq`; `h0` is layer-major.
pub fn gru_top_states<R: Real, A: AsRef<[f64]>>(stack: &GruStack, seq: &[A], h0: &[f64]) -> Vec<Vec<R>> {
    let hd = stack.hidden();
    let mut inputs: Vec<Vec<R>> = seq
        .iter()
        .map(|x| x.as_ref().iter().map(|&v| R::from_f64(v)).collect())
        .collect();
    for (l, layer) in stack.layers.iter().enumerate() {
        let mut h: Vec<R> = h0[l * hd..(l + 1) * hd].iter().map(|&v| R::from_f64(v)).collect();
        let mut outputs = Vec::with_capacity(inputs.len());
        for x in &inputs {
            let mut z = bias::<R>(&layer.b_z);
            affine(&mut z, &layer.w_z, x);
            affine(&mut z, &layer.u_z, &h);
            let mut r = bias::<R>(&layer.b_r);
            affine(&mut r, &layer.w_r, x);
            affine(&mut r, &layer.u_r, &h);
            let z: Vec<R> = z.into_iter().map(R::sigmoid).collect();
            let rh: Vec<R> = r.into_iter().zip(&h).map(|(r, &h)| r.sigmoid() * h).collect();
            let mut n = bias::<R>(&layer.b_h);
            affine(&mut n, &layer.w_h, x);
            affine(&mut n, &layer.u_h, &rh);
            h = (0..hd).map(|i| (R::one() - z[i]) * h[i] + z[i] * n[i].tanh()).collect();
            outputs.push(h.clone());
        }
        inputs = outputs;
    }
    inputs
}

pub fn slp_score<R: Real>(slp: &Slp, h: &[R]) -> R {
    let mut acc = bias::<R>(&slp.b);
    affine(&mut acc, &slp.w, h);
    acc[0].tanh()
}

pub fn mlp_score<R: Real>(mlp: &Mlp, x: &[f64]) -> R {
    let mut a: Vec<R> = x.iter().map(|&v| R::from_f64(v)).collect();
    for (w, b) in &mlp.layers {
        let mut out = bias::<R>(b);
        affine(&mut out, w, &a);
        a = out.into_iter().map(R::tanh).collect();
    }
    a[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Dd, b: f64, tol: f64) -> bool {
        (a.to_f64() - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn arithmetic_carries_extra_digits() {
        let third = Dd::one() / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0) - Dd::one();
        assert!(back.to_f64().abs() < 1e-31);
        let tiny = Dd::one() + Dd::from_f64(1e-20) - Dd::one();
        assert!((tiny.to_f64() - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn transcendental_functions_match_f64() {
        for &x in &[-30.0, -3.7, -1.7, -0.2, 1e-9, 0.3, 0.69, 2.25, 12.0] {
            let d = Dd::from_f64(x);
            assert!(close(d.exp(), x.exp(), 4e-16), "exp {x}");
            assert!(close(d.tanh(), x.tanh(), 4e-16), "tanh {x}");
            assert!(close(d.sigmoid(), crate::neural::sigmoid(x), 4e-16), "sigmoid {x}");
            assert!(close(d.softplus(), Real::softplus(x), 4e-16), "softplus {x}");
        }
        for &x in &[1e-8, 0.5, 1.0, 2.0, 1e6] {
            assert!((Dd::from_f64(x).ln().to_f64() - x.ln()).abs() < 4e-16 * x.ln().abs().max(1.0));
        }
    }

    #[test]
    fn exp_and_ln_agree_beyond_double_precision() {
        // Residuals of inverse pairs cancel far below f64 resolution.
        for &x in &[-5.3, -0.71, 0.013, 0.42, 3.9] {
            let d = Dd::new(x, x * 1e-18);
            let back = d.exp().ln() - d;
            assert!(back.to_f64().abs() < 1e-29, "{x}: {:e}", back.to_f64());
            let t = d.tanh();
            // tanh^2 + sech^2 = 1 with sech = 2 / (e^x + e^-x)
            let sech = Dd::from_f64(2.0) / (d.exp() + (-d).exp());
            assert!((t * t + sech * sech - Dd::one()).to_f64().abs() < 1e-29);
        }
    }

    #[test]
    fn exp_of_ln2_multiples_is_exact_power() {
        let x = LN2.mul_f64(5.0);
        assert!((x.exp() - Dd::from_f64(32.0)).to_f64().abs() < 1e-28);
    }
}
