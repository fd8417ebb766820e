//! Matrix permanents and Vandermonde-type interaction factors.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::ensemble::DysonIndex;
use crate::error::{Error, Result};

/// Largest order accepted by [`permanent_ryser`].
pub const MAX_RYSER_ORDER: usize = 20;
/// Largest order accepted by [`permanent_naive`].
pub const MAX_NAIVE_ORDER: usize = 8;

fn check_square(m: &DMatrix<Complex64>) -> Result<usize> {
    let n = m.nrows();
    if n == 0 || n != m.ncols() {
        return Err(Error::Dimension(format!("permanent needs a nonempty square matrix, got {}×{}", m.nrows(), m.ncols())));
    }
    Ok(n)
}

/// Ryser's formula with Gray-code subset enumeration, `O(2ⁿ n)`.
pub fn permanent_ryser(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = check_square(m)?;
    if n > MAX_RYSER_ORDER {
        return Err(Error::Capability(format!("permanent of order {n} exceeds {MAX_RYSER_ORDER}")));
    }
    // perm A = (−1)ⁿ Σ_{S ⊆ cols} (−1)^{|S|} Π_i Σ_{j ∈ S} a_ij
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u32 = 0;
    for k in 1u32..(1u32 << n) {
        let next = k ^ (k >> 1);
        let col = (gray ^ next).trailing_zeros() as usize;
        let added = next & (1 << col) != 0;
        for (i, s) in row_sums.iter_mut().enumerate() {
            if added {
                *s += m[(i, col)];
            } else {
                *s -= m[(i, col)];
            }
        }
        gray = next;
        let prod: Complex64 = row_sums.iter().product();
        if next.count_ones() % 2 == 0 {
            total += prod;
        } else {
            total -= prod;
        }
    }
    Ok(if n % 2 == 0 { total } else { -total })
}

/// Direct sum over all `n!` permutations.
pub fn permanent_naive(m: &DMatrix<Complex64>) -> Result<Complex64> {
    let n = check_square(m)?;
    if n > MAX_NAIVE_ORDER {
        return Err(Error::Capability(format!("naive permanent of order {n} exceeds {MAX_NAIVE_ORDER}")));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for_each_permutation(&mut perm, 0, &mut |p| {
        total += p.iter().enumerate().map(|(i, &j)| m[(i, j)]).product::<Complex64>();
    });
    Ok(total)
}

/// Calls `f` on every permutation of `p[k..]` (prefix fixed).
pub(crate) fn for_each_permutation(p: &mut [usize], k: usize, f: &mut impl FnMut(&[usize])) {
    if k == p.len() {
        f(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        for_each_permutation(p, k + 1, f);
        p.swap(k, i);
    }
}

/// Permanent of a real matrix.
pub fn permanent_real(m: &DMatrix<f64>) -> Result<f64> {
    Ok(permanent_ryser(&m.map(|v| Complex64::new(v, 0.0)))?.re)
}

/// `ln` of the eigenvalue interaction factor of the joint density:
///
/// - β = 1: `Π_{k<ℓ} |x_k − x_ℓ|`;
/// - β = 2: `Π_{k<ℓ} |z_k − z_ℓ|²`;
/// - β = 4: `Π_{k<ℓ} |z_k − z_ℓ|² |z_k − z_ℓ*|² · Π_n |z_n − z_n*|²`.
///
/// Coincident points give `−∞`.
pub fn vandermonde_interaction(beta: DysonIndex, points: &[Complex64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..points.len() {
        for l in k + 1..points.len() {
            let d = (points[k] - points[l]).norm().ln();
            acc += match beta {
                DysonIndex::Real => d,
                DysonIndex::Complex => 2.0 * d,
                DysonIndex::Quaternion => 2.0 * d + 2.0 * (points[k] - points[l].conj()).norm().ln(),
            };
        }
        if beta == DysonIndex::Quaternion {
            acc += 2.0 * (2.0 * points[k].im).abs().ln();
        }
    }
    acc
}
