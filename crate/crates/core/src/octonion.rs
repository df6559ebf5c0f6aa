//! Octonion multiplication and the cross product on imaginary octonions.
//!
//! Basis `1, e₁, …, e₇`. Each triple `(i, j, k)` below satisfies
//! `e_i e_j = e_k` together with its cyclic shifts, and `e_j e_i = −e_k`.

use crate::scalar::Scalar;

pub const TRIPLES: [(usize, usize, usize); 7] = [
    (1, 2, 4),
    (2, 3, 5),
    (3, 4, 6),
    (4, 5, 7),
    (5, 6, 1),
    (6, 7, 2),
    (7, 1, 3),
];

/// `(sign, k)` with `e_i e_j = sign · e_k` for imaginary units `1 ≤ i, j ≤ 7`,
/// where `k = 0` stands for the real unit.
pub fn unit_product(i: usize, j: usize) -> (f64, usize) {
    if i == j {
        return (-1.0, 0);
    }
    for &(a, b, c) in &TRIPLES {
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            if (i, j) == (x, y) {
                return (1.0, z);
            }
            if (i, j) == (y, x) {
                return (-1.0, z);
            }
        }
    }
    unreachable!("every pair of distinct imaginary units lies in one triple")
}

/// Full octonion product of `[re, e₁, …, e₇]` coordinates.
pub fn multiply(a: &[f64; 8], b: &[f64; 8]) -> [f64; 8] {
    let mut out = [0.0; 8];
    for i in 0..8 {
        for j in 0..8 {
            let (s, k) = match (i, j) {
                (0, j) => (1.0, j),
                (i, 0) => (1.0, i),
                (i, j) => unit_product(i, j),
            };
            out[k] += s * a[i] * b[j];
        }
    }
    out
}

/// `u × v = Im(uv)` for `u, v ∈ Im 𝕆 ≅ ℝ⁷` (index 0 here is `e₁`).
pub fn cross<S: Scalar>(u: &[S], v: &[S]) -> Vec<S> {
    let mut out = vec![S::zero(); 7];
    for &(a, b, c) in &TRIPLES {
        for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
            let (x, y, z) = (x - 1, y - 1, z - 1);
            out[z].mul_add_assign(&u[x], &v[y]);
            let neg = -v[x].clone();
            out[z].mul_add_assign(&u[y], &neg);
        }
    }
    out
}

pub fn dot<S: Scalar>(u: &[S], v: &[S]) -> S {
    let mut acc = S::zero();
    for (a, b) in u.iter().zip(v) {
        acc.mul_add_assign(a, b);
    }
    acc
}
