//! Dense tensors at a point.
//!
//! A `(p,q)` tensor in dimension `n` stores `n^(p+q)` components, row-major,
//! contravariant indices first. Permutations and compositions act on the
//! covariant slots only:
//!
//! * `permute(T, σ)(X_1,…,X_q) = T(X_{σ⁻¹(1)},…,X_{σ⁻¹(q)})`
//! * `compose(T₁, T₂)(X_1,…,X_{q₁−p₂}, Y_1,…,Y_{q₂}) = T₁(X_1,…, T₂(Y_1,…))`,
//!   the outputs of `T₂` filling the last `p₂` slots of `T₁`.
//! * `tensor_product` concatenates contravariant indices and covariant
//!   indices separately, so `(ξ⊗η)(X) = η(X) ξ`.
//!
//! # Wedge convention
//!
//! Wedge products carry no factorial normalisation. For a 1-form `η` and an
//! `A` with one covariant slot, `(η∧A)(X,Y) = η(X)A(Y) − η(Y)A(X)`; for a
//! 2-form `Ψ`, `(η∧Ψ)(X,Y,Z) = η(X)Ψ(Y,Z) + η(Y)Ψ(Z,X) + η(Z)Ψ(X,Y)`. In
//! general `(α∧β)` sums `sgn(S)·α(X_S)·β(X_{S^c})` over the increasing
//! `k`-subsets `S`. The exterior derivative in [`crate::geometry`] uses the
//! matching convention `dω = Σ_i (−1)^i (∇_{X_i}ω)(…X̂_i…)`. Changing one of
//! them without the other changes constants such as `dΦ = 3η∧Ψ`.

use std::ops::{Add, Neg, Sub};

use thiserror::Error;

use crate::perm::{GroupAlgebraElement, Permutation};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("valence error: {0}")]
    Valence(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("component count {got} does not match dim^(p+q) = {expected}")]
    Length { expected: usize, got: usize },
    #[error("input is not alternating (residual {0:.3e})")]
    NotAlternating(f64),
    #[error("symmetry precondition {which} violated (residual {residual:.3e})")]
    Symmetry { which: String, residual: f64 },
    #[error("dimension must be at least 1")]
    ZeroDim,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointTensor<S = f64> {
    p: usize,
    q: usize,
    dim: usize,
    comps: Vec<S>,
}

fn pow(n: usize, k: usize) -> usize {
    n.pow(k as u32)
}

/// Decodes a flat row-major offset into a multi-index.
fn decode(mut flat: usize, dim: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

fn encode(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * dim + i)
}

impl<S: Scalar> PointTensor<S> {
    pub fn new(p: usize, q: usize, dim: usize, comps: Vec<S>) -> Result<Self, TensorError> {
        if dim == 0 {
            return Err(TensorError::ZeroDim);
        }
        let expected = pow(dim, p + q);
        if comps.len() != expected {
            return Err(TensorError::Length {
                expected,
                got: comps.len(),
            });
        }
        Ok(Self { p, q, dim, comps })
    }

    pub fn zeros(p: usize, q: usize, dim: usize) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        Self {
            p,
            q,
            dim,
            comps: vec![S::zero(); pow(dim, p + q)],
        }
    }

    /// Builds from a function of the full multi-index (contravariant first).
    pub fn from_fn(p: usize, q: usize, dim: usize, mut f: impl FnMut(&[usize]) -> S) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        let len = pow(dim, p + q);
        let mut idx = vec![0; p + q];
        let comps = (0..len)
            .map(|flat| {
                decode(flat, dim, &mut idx);
                f(&idx)
            })
            .collect();
        Self { p, q, dim, comps }
    }

    pub fn vector(comps: Vec<S>) -> Self {
        let dim = comps.len();
        Self { p: 1, q: 0, dim, comps }
    }

    pub fn covector(comps: Vec<S>) -> Self {
        let dim = comps.len();
        Self { p: 0, q: 1, dim, comps }
    }

    pub fn scalar(dim: usize, v: S) -> Self {
        Self {
            p: 0,
            q: 0,
            dim,
            comps: vec![v],
        }
    }

    /// The identity endomorphism as a `(1,1)` tensor.
    pub fn identity(dim: usize) -> Self {
        Self::from_fn(1, 1, dim, |i| S::from_f64(if i[0] == i[1] { 1.0 } else { 0.0 }))
    }

    /// The `(q,q)` tensor of a permutation: `σ(X_1⊗…⊗X_q) = X_{σ⁻¹(1)}⊗…`.
    pub fn permutation_tensor(dim: usize, sigma: &Permutation) -> Self {
        let q = sigma.arity();
        let inv = sigma.inverse();
        Self::from_fn(q, q, dim, |idx| {
            let (out, inp) = idx.split_at(q);
            let hit = (0..q).all(|k| out[k] == inp[inv.apply(k)]);
            S::from_f64(if hit { 1.0 } else { 0.0 })
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.p + self.q
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn components(&self) -> &[S] {
        &self.comps
    }

    pub fn into_components(self) -> Vec<S> {
        self.comps
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        assert_eq!(idx.len(), self.rank(), "index rank mismatch");
        &self.comps[encode(idx, self.dim)]
    }

    pub fn set(&mut self, idx: &[usize], v: S) {
        assert_eq!(idx.len(), self.rank(), "index rank mismatch");
        let k = encode(idx, self.dim);
        self.comps[k] = v;
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> PointTensor<T> {
        PointTensor {
            p: self.p,
            q: self.q,
            dim: self.dim,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    /// Value parts of all components.
    pub fn values(&self) -> PointTensor<f64> {
        self.map(|c| c.value())
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|x| x.scale(c))
    }

    fn check_same_shape(&self, o: &Self, what: &str) -> Result<(), TensorError> {
        if self.dim != o.dim {
            return Err(TensorError::DimMismatch(self.dim, o.dim));
        }
        if self.valence() != o.valence() {
            return Err(TensorError::Valence(format!(
                "{what}: ({},{}) vs ({},{})",
                self.p, self.q, o.p, o.q
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(o, "add")?;
        Ok(Self {
            comps: self
                .comps
                .iter()
                .zip(&o.comps)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
            ..self.clone_shape()
        })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, TensorError> {
        self.check_same_shape(o, "sub")?;
        Ok(Self {
            comps: self
                .comps
                .iter()
                .zip(&o.comps)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
            ..self.clone_shape()
        })
    }

    fn clone_shape(&self) -> Self {
        Self {
            p: self.p,
            q: self.q,
            dim: self.dim,
            comps: Vec::new(),
        }
    }

    /// `permute(T, σ)`, acting on covariant slots.
    pub fn permute(&self, sigma: &Permutation) -> Result<Self, TensorError> {
        if sigma.arity() != self.q {
            return Err(TensorError::Valence(format!(
                "permutation of arity {} on a tensor with {} covariant slots",
                sigma.arity(),
                self.q
            )));
        }
        if sigma.is_identity() {
            return Ok(self.clone());
        }
        let (p, q, n) = (self.p, self.q, self.dim);
        let inv = sigma.inverse();
        let mut idx = vec![0; p + q];
        let mut src = vec![0; p + q];
        let comps = (0..self.comps.len())
            .map(|flat| {
                decode(flat, n, &mut idx);
                src[..p].copy_from_slice(&idx[..p]);
                for k in 0..q {
                    src[p + k] = idx[p + inv.apply(k)];
                }
                self.comps[encode(&src, n)].clone()
            })
            .collect();
        Ok(Self { comps, ..self.clone_shape() })
    }

    /// `Σ c_σ · permute(T, σ)`.
    pub fn apply_group_element(&self, a: &GroupAlgebraElement) -> Result<Self, TensorError> {
        if a.arity() != self.q {
            return Err(TensorError::Valence(format!(
                "group algebra element of arity {} on a tensor with {} covariant slots",
                a.arity(),
                self.q
            )));
        }
        let mut out = Self::zeros(self.p, self.q, self.dim);
        for (sigma, c) in a.terms() {
            let t = self.permute(sigma)?;
            for (o, v) in out.comps.iter_mut().zip(&t.comps) {
                o.scaled_add_assign(c, v);
            }
        }
        Ok(out)
    }

    pub fn tensor_product(&self, o: &Self) -> Result<Self, TensorError> {
        if self.dim != o.dim {
            return Err(TensorError::DimMismatch(self.dim, o.dim));
        }
        let n = self.dim;
        let (na1, nb1) = (pow(n, self.p), pow(n, self.q));
        let (na2, nb2) = (pow(n, o.p), pow(n, o.q));
        let mut comps = Vec::with_capacity(na1 * na2 * nb1 * nb2);
        for a1 in 0..na1 {
            for a2 in 0..na2 {
                for b1 in 0..nb1 {
                    let x = &self.comps[a1 * nb1 + b1];
                    for b2 in 0..nb2 {
                        comps.push(x.mul_ref(&o.comps[a2 * nb2 + b2]));
                    }
                }
            }
        }
        Ok(Self {
            p: self.p + o.p,
            q: self.q + o.q,
            dim: n,
            comps,
        })
    }

    /// `T₁ ∘ T₂`: the outputs of `T₂` fill the last `p₂` covariant slots of `T₁`.
    pub fn compose(&self, o: &Self) -> Result<Self, TensorError> {
        if self.dim != o.dim {
            return Err(TensorError::DimMismatch(self.dim, o.dim));
        }
        if self.q < o.p {
            return Err(TensorError::Valence(format!(
                "cannot compose ({},{}) with ({},{})",
                self.p, self.q, o.p, o.q
            )));
        }
        let n = self.dim;
        let rows = pow(n, self.p + self.q - o.p);
        let inner = pow(n, o.p);
        let cols = pow(n, o.q);
        let mut comps = vec![S::zero(); rows * cols];
        for r in 0..rows {
            for c in 0..inner {
                let a = &self.comps[r * inner + c];
                if a.is_zero() {
                    continue;
                }
                for k in 0..cols {
                    comps[r * cols + k].mul_add_assign(a, &o.comps[c * cols + k]);
                }
            }
        }
        Ok(Self {
            p: self.p,
            q: self.q - o.p + o.q,
            dim: n,
            comps,
        })
    }

    /// Fills the first covariant slot with a vector: `T(v, ·, …)`.
    pub fn insert_first(&self, v: &Self) -> Result<Self, TensorError> {
        if v.valence() != (1, 0) {
            return Err(TensorError::Valence("insert_first expects a vector".into()));
        }
        if self.q == 0 {
            return Err(TensorError::Valence("no covariant slot to fill".into()));
        }
        if self.dim != v.dim {
            return Err(TensorError::DimMismatch(self.dim, v.dim));
        }
        let n = self.dim;
        let head = pow(n, self.p);
        let tail = pow(n, self.q - 1);
        let mut comps = vec![S::zero(); head * tail];
        for a in 0..head {
            for c in 0..n {
                for t in 0..tail {
                    comps[a * tail + t].mul_add_assign(&self.comps[(a * n + c) * tail + t], &v.comps[c]);
                }
            }
        }
        Ok(Self {
            p: self.p,
            q: self.q - 1,
            dim: n,
            comps,
        })
    }

    /// Evaluates on vectors, one per covariant slot, first slot first.
    pub fn eval(&self, args: &[&Self]) -> Result<Self, TensorError> {
        if args.len() > self.q {
            return Err(TensorError::Valence("too many arguments".into()));
        }
        let mut t = self.clone();
        for v in args {
            t = t.insert_first(v)?;
        }
        Ok(t)
    }

    /// `i_φ T = T∘(φ⊗id⊗…) + T∘(id⊗φ⊗…) + …` for covariant `T`.
    pub fn i_phi(&self, phi: &Self) -> Result<Self, TensorError> {
        if self.p != 0 || self.q == 0 {
            return Err(TensorError::Valence(format!(
                "i_phi needs a (0,k) tensor with k >= 1, got ({},{})",
                self.p, self.q
            )));
        }
        if phi.valence() != (1, 1) {
            return Err(TensorError::Valence("i_phi needs a (1,1) endomorphism".into()));
        }
        if self.dim != phi.dim {
            return Err(TensorError::DimMismatch(self.dim, phi.dim));
        }
        let (n, k) = (self.dim, self.q);
        let mut out = Self::zeros(0, k, n);
        let mut idx = vec![0; k];
        let mut src = vec![0; k];
        for flat in 0..out.comps.len() {
            decode(flat, n, &mut idx);
            let mut acc = S::zero();
            for s in 0..k {
                src.copy_from_slice(&idx);
                for c in 0..n {
                    src[s] = c;
                    acc.mul_add_assign(&self.comps[encode(&src, n)], &phi.comps[c * n + idx[s]]);
                }
            }
            out.comps[flat] = acc;
        }
        Ok(out)
    }

    /// Wedge of a `(0,k)` form with a `(p,l)` tensor alternating in its
    /// covariant slots; see the module docs for normalisation.
    pub fn wedge(&self, b: &Self) -> Result<Self, TensorError> {
        if self.p != 0 {
            return Err(TensorError::Valence("left wedge factor must be covariant".into()));
        }
        if self.dim != b.dim {
            return Err(TensorError::DimMismatch(self.dim, b.dim));
        }
        let (n, k, l) = (self.dim, self.q, b.q);
        let shuffles = shuffles(k, l);
        let head = pow(n, b.p);
        let m = k + l;
        let mut out = Self::zeros(b.p, m, n);
        let mut idx = vec![0; m];
        let mut ia = vec![0; k];
        let mut ib = vec![0; b.p + l];
        let tail = pow(n, m);
        for t in 0..tail {
            decode(t, n, &mut idx);
            for (subset, sign) in &shuffles {
                let mut ai = 0;
                let mut bi = 0;
                for (pos, &i) in idx.iter().enumerate() {
                    if ai < k && subset[ai] == pos {
                        ia[ai] = i;
                        ai += 1;
                    } else {
                        ib[b.p + bi] = i;
                        bi += 1;
                    }
                }
                let av = &self.comps[encode(&ia, n)];
                if av.is_zero() {
                    continue;
                }
                let blen = pow(n, l);
                let boff = encode(&ib[b.p..], n);
                for a in 0..head {
                    let bv = &b.comps[a * blen + boff];
                    let prod = av.mul_ref(bv);
                    out.comps[a * tail + t].scaled_add_assign(*sign, &prod);
                }
            }
        }
        Ok(out)
    }
}

/// Increasing `k`-subsets of `0..k+l` with the sign of the shuffle
/// permutation that lists the subset first.
pub(crate) fn shuffles(k: usize, l: usize) -> Vec<(Vec<usize>, f64)> {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, f64)>) {
        if cur.len() == k {
            let inversions: usize = cur.iter().enumerate().map(|(j, &s)| s - j).sum();
            out.push((cur.clone(), if inversions % 2 == 0 { 1.0 } else { -1.0 }));
            return;
        }
        for s in start..m {
            cur.push(s);
            rec(s + 1, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, k + l, k, &mut Vec::with_capacity(k), &mut out);
    out
}

impl PointTensor<f64> {
    pub fn max_abs(&self) -> f64 {
        self.comps.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Row-major matrix view of a `(1,1)` tensor: entry `(a, i)` is `Aᵃᵢ`.
    pub fn from_matrix(dim: usize, m: &[f64]) -> Self {
        assert_eq!(m.len(), dim * dim);
        Self {
            p: 1,
            q: 1,
            dim,
            comps: m.to_vec(),
        }
    }

    /// Largest violation of antisymmetry under adjacent transpositions of the
    /// covariant slots, relative to `1 + max|T|`.
    pub fn alternation_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for s in 0..self.q.saturating_sub(1) {
            let tau = Permutation::cycle(self.q, &[s + 1, s + 2]);
            let t = self.permute(&tau).expect("arity matches");
            let sum = self + &t;
            worst = worst.max(sum.max_abs());
        }
        worst / (1.0 + self.max_abs())
    }

    /// Checks the three curvature-type symmetries
    /// `T(1+(1,2)) = 0`, `T(1−(1,3)(2,4)) = 0`, `T(1+(1,2,3)+(1,3,2)) = 0`
    /// and then decides whether `T` vanishes from its values `T(X,Y,X,Y)`
    /// alone, with `X, Y` ranging over `e_i` and `e_i + e_j`. This family
    /// determines a biquadratic form, so the answer agrees with `T = 0`
    /// whenever the symmetries hold.
    pub fn polarization_vanishing_test(&self, tol: f64) -> Result<bool, TensorError> {
        if self.valence() != (0, 4) {
            return Err(TensorError::Valence("polarization test needs a (0,4) tensor".into()));
        }
        let scale = 1.0 + self.max_abs();
        let checks = [
            ("1 + (1,2)", "antisymmetry in the first pair"),
            ("1 - (1,3)(2,4)", "pair exchange symmetry"),
            ("1 + (1,2,3) + (1,3,2)", "cyclic (Bianchi) symmetry"),
        ];
        for (expr, which) in checks {
            let a = GroupAlgebraElement::parse(4, expr).expect("static expression");
            let r = self.apply_group_element(&a)?.max_abs() / scale;
            if r > tol {
                return Err(TensorError::Symmetry {
                    which: which.into(),
                    residual: r,
                });
            }
        }
        let n = self.dim;
        let mut family: Vec<Vec<f64>> = Vec::new();
        for i in 0..n {
            let mut v = vec![0.0; n];
            v[i] = 1.0;
            family.push(v);
            for j in i + 1..n {
                let mut w = vec![0.0; n];
                w[i] = 1.0;
                w[j] = 1.0;
                family.push(w);
            }
        }
        let family: Vec<PointTensor> = family.into_iter().map(PointTensor::vector).collect();
        for x in &family {
            for y in &family {
                let v = self.eval(&[x, y, x, y])?.comps[0];
                if v.abs() > tol * scale {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Application of a `(1,1)` tensor to a vector.
    pub fn apply_to(&self, v: &PointTensor) -> PointTensor {
        self.compose(v).expect("(1,1) applied to a vector")
    }

    /// Inner product `g(u, v)` for a `(0,2)` tensor `self`.
    pub fn pair(&self, u: &PointTensor, v: &PointTensor) -> f64 {
        self.eval(&[u, v]).expect("bilinear form on two vectors").comps[0]
    }
}

/// Scale-free residual between two tensors: `max|a−b| / (1 + max(|a|,|b|))`.
pub fn residual(a: &PointTensor, b: &PointTensor) -> f64 {
    let d = a.try_sub(b).expect("residual of tensors with equal valence");
    d.max_abs() / (1.0 + a.max_abs().max(b.max_abs()))
}

/// Residual of a tensor that should vanish.
pub fn vanishing(a: &PointTensor) -> f64 {
    a.max_abs() / (1.0 + a.max_abs())
}

impl<S: Scalar> Add for &PointTensor<S> {
    type Output = PointTensor<S>;
    fn add(self, o: &PointTensor<S>) -> PointTensor<S> {
        self.try_add(o).expect("tensor addition with matching valence")
    }
}

impl<S: Scalar> Sub for &PointTensor<S> {
    type Output = PointTensor<S>;
    fn sub(self, o: &PointTensor<S>) -> PointTensor<S> {
        self.try_sub(o).expect("tensor subtraction with matching valence")
    }
}

impl<S: Scalar> Neg for &PointTensor<S> {
    type Output = PointTensor<S>;
    fn neg(self) -> PointTensor<S> {
        self.scale(-1.0)
    }
}

impl<S: Scalar> Add for PointTensor<S> {
    type Output = PointTensor<S>;
    fn add(self, o: PointTensor<S>) -> PointTensor<S> {
        &self + &o
    }
}

impl<S: Scalar> Sub for PointTensor<S> {
    type Output = PointTensor<S>;
    fn sub(self, o: PointTensor<S>) -> PointTensor<S> {
        &self - &o
    }
}

impl<S: Scalar> Neg for PointTensor<S> {
    type Output = PointTensor<S>;
    fn neg(self) -> PointTensor<S> {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::{seed_variables, Jet2};
    use proptest::prelude::*;

    fn seq(p: usize, q: usize, n: usize, seed: u64) -> PointTensor {
        let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        PointTensor::from_fn(p, q, n, |_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    fn vecf(v: &[f64]) -> PointTensor {
        PointTensor::vector(v.to_vec())
    }

    #[test]
    fn constructor_checks_length() {
        assert!(PointTensor::<f64>::new(1, 1, 3, vec![0.0; 8]).is_err());
        assert!(PointTensor::<f64>::new(1, 1, 0, vec![]).is_err());
        assert!(PointTensor::<f64>::new(0, 2, 2, vec![0.0; 4]).is_ok());
    }

    #[test]
    fn tensor_product_of_vector_and_covector_evaluates() {
        let xi = vecf(&[1.0, 2.0, 3.0]);
        let eta = PointTensor::covector(vec![0.5, -1.0, 2.0]);
        let t = xi.tensor_product(&eta).unwrap();
        let x = vecf(&[1.0, 1.0, 1.0]);
        let out = t.apply_to(&x);
        assert_eq!(out.components(), &[1.5, 3.0, 4.5]);
    }

    #[test]
    fn compose_matches_matrix_product() {
        let a = seq(1, 1, 3, 1);
        let b = seq(1, 1, 3, 2);
        let c = a.compose(&b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want: f64 = (0..3).map(|k| a.get(&[i, k]) * b.get(&[k, j])).sum();
                assert!((c.get(&[i, j]) - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn compose_fills_last_slots() {
        let t = seq(0, 3, 3, 3);
        let phi = seq(1, 1, 3, 4);
        let c = t.compose(&phi).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let want: f64 = (0..3).map(|m| t.get(&[i, j, m]) * phi.get(&[m, k])).sum();
                    assert!((c.get(&[i, j, k]) - want).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn compose_rejects_bad_valence() {
        let a = seq(0, 1, 3, 1);
        let b = seq(2, 0, 3, 1);
        assert!(a.compose(&b).is_err());
        let c = seq(1, 1, 2, 1);
        assert!(a.compose(&c).is_err());
    }

    #[test]
    fn permute_moves_arguments() {
        let t = seq(0, 3, 3, 5);
        let sigma = Permutation::cycle(3, &[1, 2, 3]);
        let s = t.permute(&sigma).unwrap();
        // σ = (1,2,3): σ⁻¹(1) = 3, σ⁻¹(2) = 1, σ⁻¹(3) = 2
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_eq!(s.get(&[i, j, k]), t.get(&[k, i, j]));
                }
            }
        }
        assert!(t.permute(&Permutation::identity(2)).is_err());
    }

    #[test]
    fn permute_agrees_with_permutation_tensor() {
        let t = seq(1, 3, 2, 6);
        for sigma in Permutation::all(3) {
            let a = t.permute(&sigma).unwrap();
            let b = t.compose(&PointTensor::permutation_tensor(2, &sigma)).unwrap();
            assert!(residual(&a, &b) < 1e-15, "{sigma}");
        }
    }

    #[test]
    fn wedge_of_one_forms_with_endomorphism() {
        let eta = seq(0, 1, 3, 7);
        let a = seq(1, 1, 3, 8);
        let w = eta.wedge(&a).unwrap();
        for c in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let want = eta.get(&[i]) * a.get(&[c, j]) - eta.get(&[j]) * a.get(&[c, i]);
                    assert!((w.get(&[c, i, j]) - want).abs() < 1e-14);
                }
            }
        }
    }

    fn alternate2(t: &PointTensor) -> PointTensor {
        let sw = t.permute(&Permutation::cycle(2, &[1, 2])).unwrap();
        t - &sw
    }

    #[test]
    fn wedge_with_two_form_is_cyclic_sum() {
        let eta = seq(0, 1, 4, 9);
        let psi = alternate2(&seq(0, 2, 4, 10));
        let w = eta.wedge(&psi).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let want = eta.get(&[i]) * psi.get(&[j, k])
                        + eta.get(&[j]) * psi.get(&[k, i])
                        + eta.get(&[k]) * psi.get(&[i, j]);
                    assert!((w.get(&[i, j, k]) - want).abs() < 1e-14);
                }
            }
        }
        assert!(w.alternation_residual() < 1e-15);
    }

    #[test]
    fn wedge_is_graded_commutative_and_associative() {
        let a = seq(0, 1, 4, 11);
        let b = alternate2(&seq(0, 2, 4, 12));
        let c = seq(0, 1, 4, 13);
        let ab = a.wedge(&b).unwrap();
        let ba = b.wedge(&a).unwrap();
        assert!(residual(&ab, &ba) < 1e-14);
        let ac = a.wedge(&c).unwrap();
        let ca = c.wedge(&a).unwrap();
        assert!(residual(&ac, &-&ca) < 1e-14);
        let l = a.wedge(&b).unwrap().wedge(&c).unwrap();
        let r = a.wedge(&b.wedge(&c).unwrap()).unwrap();
        assert!(residual(&l, &r) < 1e-14);
    }

    #[test]
    fn wedge_of_coordinate_covectors_is_determinant() {
        let n = 3;
        let e = |i: usize| PointTensor::covector((0..n).map(|k| if k == i { 1.0 } else { 0.0 }).collect());
        let vol = e(0).wedge(&e(1)).unwrap().wedge(&e(2)).unwrap();
        for sigma in Permutation::all(3) {
            let idx: Vec<usize> = (0..3).map(|k| sigma.apply(k)).collect();
            assert_eq!(*vol.get(&idx), sigma.sign());
        }
    }

    #[test]
    fn i_phi_is_derivation_on_two_forms() {
        let w = alternate2(&seq(0, 2, 3, 14));
        let phi = seq(1, 1, 3, 15);
        let out = w.i_phi(&phi).unwrap();
        let x = vecf(&[0.3, -0.2, 0.9]);
        let y = vecf(&[-1.0, 0.4, 0.1]);
        let px = phi.apply_to(&x);
        let py = phi.apply_to(&y);
        let want = w.pair(&px, &y) + w.pair(&x, &py);
        assert!((out.pair(&x, &y) - want).abs() < 1e-14);
        assert!(phi.i_phi(&phi).is_err());
    }

    #[test]
    fn insert_first_and_eval() {
        let t = seq(0, 2, 3, 16);
        let x = vecf(&[1.0, 0.0, 0.0]);
        let y = vecf(&[0.0, 0.0, 1.0]);
        assert_eq!(t.pair(&x, &y), *t.get(&[0, 2]));
        assert!(t.eval(&[&x, &y, &x]).is_err());
    }

    #[test]
    fn group_element_application_is_linear() {
        let t = seq(0, 3, 2, 17);
        let a = GroupAlgebraElement::parse(3, "1 - 2*(1,2) + (1,2,3)").unwrap();
        let got = t.apply_group_element(&a).unwrap();
        let want = &(&t - &t.permute(&Permutation::cycle(3, &[1, 2])).unwrap().scale(2.0))
            + &t.permute(&Permutation::cycle(3, &[1, 2, 3])).unwrap();
        assert!(residual(&got, &want) < 1e-15);
    }

    /// Curvature-type tensor `(h⊙k)(X,Y,Z,W)` built from symmetric forms.
    fn kulkarni_nomizu(h: &PointTensor, k: &PointTensor) -> PointTensor {
        let n = h.dim();
        PointTensor::from_fn(0, 4, n, |i| {
            let (x, y, z, w) = (i[0], i[1], i[2], i[3]);
            h.get(&[x, z]) * k.get(&[y, w]) + h.get(&[y, w]) * k.get(&[x, z])
                - h.get(&[x, w]) * k.get(&[y, z])
                - h.get(&[y, z]) * k.get(&[x, w])
        })
    }

    fn sym(t: &PointTensor) -> PointTensor {
        t + &t.permute(&Permutation::cycle(2, &[1, 2])).unwrap()
    }

    #[test]
    fn polarization_detects_nonzero_curvature_type_tensor() {
        let h = sym(&seq(0, 2, 4, 18));
        let k = sym(&seq(0, 2, 4, 19));
        let r = kulkarni_nomizu(&h, &k);
        assert!(!r.polarization_vanishing_test(1e-10).unwrap());
        let z = PointTensor::zeros(0, 4, 4);
        assert!(z.polarization_vanishing_test(1e-10).unwrap());
    }

    #[test]
    fn polarization_rejects_broken_symmetry() {
        let t = seq(0, 4, 3, 20);
        assert!(matches!(
            t.polarization_vanishing_test(1e-10),
            Err(TensorError::Symmetry { .. })
        ));
    }

    #[test]
    fn jets_obey_product_rule_through_compose() {
        let x = seed_variables(&[0.4, -0.7]);
        let a = PointTensor::<Jet2>::from_fn(1, 1, 2, |i| x[i[0]].clone() * x[i[1]].clone());
        let b = PointTensor::<Jet2>::from_fn(1, 1, 2, |i| if i[0] == i[1] { x[0].sin() } else { x[1].clone() });
        let c = a.compose(&b).unwrap();
        let h = 1e-5;
        let eval = |p: [f64; 2]| -> PointTensor {
            let a = PointTensor::from_fn(1, 1, 2, |i| p[i[0]] * p[i[1]]);
            let b = PointTensor::from_fn(1, 1, 2, |i| if i[0] == i[1] { p[0].sin() } else { p[1] });
            a.compose(&b).unwrap()
        };
        let plus = eval([0.4 + h, -0.7]);
        let minus = eval([0.4 - h, -0.7]);
        for k in 0..4 {
            let fd = (plus.components()[k] - minus.components()[k]) / (2.0 * h);
            assert!((c.components()[k].grad(0) - fd).abs() < 1e-8);
        }
    }

    fn arb_perm(q: usize) -> impl Strategy<Value = Permutation> {
        Just((0..q).collect::<Vec<usize>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::from_images(v).unwrap())
    }

    proptest! {
        #[test]
        fn permute_is_a_right_action(seed in 0u64..1000, s in arb_perm(3), t in arb_perm(3)) {
            let x = seq(1, 3, 2, seed);
            let lhs = x.permute(&s.compose(&t)).unwrap();
            let rhs = x.permute(&s).unwrap().permute(&t).unwrap();
            prop_assert!(residual(&lhs, &rhs) == 0.0);
        }

        #[test]
        fn compose_is_associative(seed in 0u64..1000) {
            let a = seq(0, 2, 3, seed);
            let b = seq(1, 2, 3, seed + 1);
            let c = seq(1, 1, 3, seed + 2);
            let l = a.compose(&b).unwrap().compose(&c).unwrap();
            let r = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert!(residual(&l, &r) < 1e-13);
        }

        #[test]
        fn wedge_of_alternating_is_alternating(seed in 0u64..1000) {
            let a = alternate2(&seq(0, 2, 4, seed));
            let b = seq(0, 1, 4, seed + 7);
            prop_assert!(a.wedge(&b).unwrap().alternation_residual() < 1e-14);
        }

        #[test]
        fn group_action_is_multiplicative(seed in 0u64..500, s in arb_perm(3), t in arb_perm(3)) {
            let x = seq(0, 3, 2, seed);
            let a = GroupAlgebraElement::from_perm(s).add(&GroupAlgebraElement::identity(3));
            let b = GroupAlgebraElement::from_perm(t).scale(-0.5);
            let lhs = x.apply_group_element(&a.mul(&b)).unwrap();
            let rhs = x.apply_group_element(&a).unwrap().apply_group_element(&b).unwrap();
            prop_assert!(residual(&lhs, &rhs) < 1e-14);
        }
    }
}
