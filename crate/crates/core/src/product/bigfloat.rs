//! Minimal complex matrix arithmetic over MPFR floats.
//!
//! Only what the scaled product and the characteristic polynomial need:
//! left-multiplication by a double-precision factor, rescaling, matrix
//! products and traces. Real products (β = 1) skip the imaginary parts.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rug::ops::NegAssign;
use rug::{Assign, Float};

/// Complex number with MPFR parts.
#[derive(Clone, Debug)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn zero(prec: u32) -> Self {
        Self {
            re: Float::new(prec),
            im: Float::new(prec),
        }
    }

    pub fn from_f64(prec: u32, re: f64, im: f64) -> Self {
        Self {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
        }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add_assign(&mut self, other: &BigComplex) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn sub_assign(&mut self, other: &BigComplex) {
        self.re -= &other.re;
        self.im -= &other.im;
    }

    pub fn mul(&self, other: &BigComplex) -> BigComplex {
        let prec = self.prec();
        let mut re = Float::with_val(prec, &self.re * &other.re);
        re -= Float::with_val(prec, &self.im * &other.im);
        let mut im = Float::with_val(prec, &self.re * &other.im);
        im += Float::with_val(prec, &self.im * &other.re);
        BigComplex { re, im }
    }

    pub fn div(&self, other: &BigComplex) -> BigComplex {
        let prec = self.prec();
        let mut den = Float::with_val(prec, other.re.square_ref());
        den += Float::with_val(prec, other.im.square_ref());
        let mut re = Float::with_val(prec, &self.re * &other.re);
        re += Float::with_val(prec, &self.im * &other.im);
        let mut im = Float::with_val(prec, &self.im * &other.re);
        im -= Float::with_val(prec, &self.re * &other.im);
        re /= &den;
        im /= &den;
        BigComplex { re, im }
    }

    pub fn scale(&mut self, k: f64) {
        self.re *= k;
        self.im *= k;
    }

    pub fn norm(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// `ln |z|` as a double, valid far outside the double exponent range.
    pub fn ln_abs(&self) -> f64 {
        ln_abs_float(&self.norm())
    }

    pub fn arg(&self) -> f64 {
        Float::with_val(53, self.im.atan2_ref(&self.re)).to_f64()
    }

    pub fn to_complex64(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    /// `ln(z)` rounded to doubles: `(ln|z|, arg z)`.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs(), self.arg())
    }
}

/// `ln |x|` for an MPFR float whose magnitude may under- or overflow a double.
pub fn ln_abs_float(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (mantissa, exp) = x.to_f64_exp();
    mantissa.abs().ln() + f64::from(exp) * std::f64::consts::LN_2
}

/// Square or rectangular complex matrix with MPFR entries, row-major.
#[derive(Clone, Debug)]
pub struct BigMatrix {
    rows: usize,
    cols: usize,
    real: bool,
    prec: u32,
    re: Vec<Float>,
    im: Vec<Float>,
}

impl BigMatrix {
    pub fn zeros(rows: usize, cols: usize, prec: u32, real: bool) -> Self {
        let len = rows * cols;
        Self {
            rows,
            cols,
            real,
            prec,
            re: vec![Float::new(prec); len],
            im: if real { Vec::new() } else { vec![Float::new(prec); len] },
        }
    }

    pub fn identity(n: usize, prec: u32, real: bool) -> Self {
        let mut m = Self::zeros(n, n, prec, real);
        for i in 0..n {
            m.re[i * n + i].assign(1);
        }
        m
    }

    pub fn from_f64(x: &DMatrix<Complex64>, prec: u32, real: bool) -> Self {
        let mut m = Self::zeros(x.nrows(), x.ncols(), prec, real);
        for i in 0..x.nrows() {
            for j in 0..x.ncols() {
                let idx = i * m.cols + j;
                m.re[idx].assign(x[(i, j)].re);
                if !real {
                    m.im[idx].assign(x[(i, j)].im);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn get(&self, i: usize, j: usize) -> BigComplex {
        let idx = i * self.cols + j;
        BigComplex {
            re: self.re[idx].clone(),
            im: if self.real { Float::new(self.prec) } else { self.im[idx].clone() },
        }
    }

    pub fn to_f64(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| {
            let idx = i * self.cols + j;
            let im = if self.real { 0.0 } else { self.im[idx].to_f64() };
            Complex64::new(self.re[idx].to_f64(), im)
        })
    }

    /// Largest entry modulus, rounded to a double.
    pub fn max_abs(&self) -> f64 {
        let mut best = 0.0f64;
        for idx in 0..self.re.len() {
            let v = if self.real {
                self.re[idx].to_f64().abs()
            } else {
                self.re[idx].to_f64().hypot(self.im[idx].to_f64())
            };
            best = best.max(v);
        }
        best
    }

    pub fn div_scalar(&mut self, m: f64) {
        for x in self.re.iter_mut().chain(self.im.iter_mut()) {
            *x /= m;
        }
    }

    /// `x · self` for a double-precision left factor.
    pub fn left_mul_f64(&self, x: &DMatrix<Complex64>) -> BigMatrix {
        assert_eq!(x.ncols(), self.rows, "factor shapes do not chain");
        let mut out = Self::zeros(x.nrows(), self.cols, self.prec, self.real);
        let mut tmp = Float::new(self.prec);
        for i in 0..x.nrows() {
            for j in 0..self.cols {
                let idx = i * self.cols + j;
                for k in 0..self.rows {
                    let a = x[(i, k)];
                    let src = k * self.cols + j;
                    if self.real {
                        if a.re != 0.0 {
                            tmp.assign(&self.re[src] * a.re);
                            out.re[idx] += &tmp;
                        }
                        continue;
                    }
                    if a.re != 0.0 {
                        tmp.assign(&self.re[src] * a.re);
                        out.re[idx] += &tmp;
                        tmp.assign(&self.im[src] * a.re);
                        out.im[idx] += &tmp;
                    }
                    if a.im != 0.0 {
                        tmp.assign(&self.im[src] * a.im);
                        out.re[idx] -= &tmp;
                        tmp.assign(&self.re[src] * a.im);
                        out.im[idx] += &tmp;
                    }
                }
            }
        }
        out
    }

    /// Matrix product `self · other`.
    pub fn mul(&self, other: &BigMatrix) -> BigMatrix {
        assert_eq!(self.cols, other.rows, "matrix shapes do not chain");
        let real = self.real && other.real;
        let mut out = Self::zeros(self.rows, other.cols, self.prec, real);
        let mut tmp = Float::new(self.prec);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let idx = i * other.cols + j;
                for k in 0..self.cols {
                    let a = i * self.cols + k;
                    let b = k * other.cols + j;
                    tmp.assign(&self.re[a] * &other.re[b]);
                    out.re[idx] += &tmp;
                    if real {
                        continue;
                    }
                    let a_im = (!self.real).then(|| &self.im[a]);
                    let b_im = (!other.real).then(|| &other.im[b]);
                    if let (Some(ai), Some(bi)) = (a_im, b_im) {
                        tmp.assign(ai * bi);
                        out.re[idx] -= &tmp;
                    }
                    if let Some(bi) = b_im {
                        tmp.assign(&self.re[a] * bi);
                        out.im[idx] += &tmp;
                    }
                    if let Some(ai) = a_im {
                        tmp.assign(ai * &other.re[b]);
                        out.im[idx] += &tmp;
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> BigComplex {
        let mut acc = BigComplex::zero(self.prec);
        for i in 0..self.rows.min(self.cols) {
            let idx = i * self.cols + i;
            acc.re += &self.re[idx];
            if !self.real {
                acc.im += &self.im[idx];
            }
        }
        acc
    }

    /// Adds `c · I`; the imaginary part of `c` is ignored for real matrices.
    pub fn add_diagonal(&mut self, c: &BigComplex) {
        for i in 0..self.rows.min(self.cols) {
            let idx = i * self.cols + i;
            self.re[idx] += &c.re;
            if !self.real {
                self.im[idx] += &c.im;
            }
        }
    }
}

/// Coefficients `c_0, …, c_{n-1}` of the monic characteristic polynomial
/// `det(zI − A) = z^n + c_{n-1} z^{n-1} + … + c_0`, by Faddeev–LeVerrier.
pub fn charpoly(a: &BigMatrix) -> Vec<BigComplex> {
    let n = a.rows();
    assert_eq!(n, a.cols(), "characteristic polynomial needs a square matrix");
    let prec = a.prec();
    let mut coeffs = vec![BigComplex::zero(prec); n];
    // M_1 = I, c_{n-1} = −tr(A).
    let mut m = BigMatrix::identity(n, prec, a.is_real());
    for k in 1..=n {
        let am = a.mul(&m);
        let mut c = am.trace();
        c.re.neg_assign();
        c.im.neg_assign();
        c.re /= k as u32;
        c.im /= k as u32;
        if k < n {
            m = am;
            m.add_diagonal(&c);
        }
        coeffs[n - k] = c;
    }
    coeffs
}
