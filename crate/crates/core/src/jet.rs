//! Truncated multivariate Taylor jets.
//!
//! [`Jet2`] carries a value, its gradient and its Hessian with respect to the
//! chart coordinates; [`Jet1`] carries value and gradient. Propagation through
//! the ring operations and the elementary functions is exact up to rounding,
//! so Christoffel symbols and curvature come out without finite-difference
//! noise.
//!
//! An empty gradient or Hessian stands for the zero array. That lets
//! constants be created without knowing the chart dimension.

use std::ops::{Add, Div, Mul, Neg, Sub};

use thiserror::Error;

use crate::scalar::{Differentiable, Scalar};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet with zero value part")]
    DivisionByZero,
    #[error("square root of a jet with non-positive value part {0}")]
    SqrtDomain(f64),
}

/// `a*x + b*y` over possibly-empty (zero) arrays.
fn lin(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    match (x.is_empty(), y.is_empty()) {
        (true, true) => Vec::new(),
        (false, true) => x.iter().map(|v| a * v).collect(),
        (true, false) => y.iter().map(|v| b * v).collect(),
        (false, false) => {
            assert_eq!(x.len(), y.len(), "jet dimension mismatch");
            x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
        }
    }
}

fn axpy_into(dst: &mut Vec<f64>, a: f64, x: &[f64]) {
    if x.is_empty() || a == 0.0 {
        return;
    }
    if dst.is_empty() {
        dst.resize(x.len(), 0.0);
    }
    assert_eq!(dst.len(), x.len(), "jet dimension mismatch");
    for (d, v) in dst.iter_mut().zip(x) {
        *d += a * v;
    }
}

/// `dst += c * (u ⊗ w + w ⊗ u)` as a flattened symmetric matrix.
fn sym_outer_into(dst: &mut Vec<f64>, c: f64, u: &[f64], w: &[f64]) {
    if u.is_empty() || w.is_empty() || c == 0.0 {
        return;
    }
    let n = u.len();
    assert_eq!(n, w.len(), "jet dimension mismatch");
    if dst.is_empty() {
        dst.resize(n * n, 0.0);
    }
    for i in 0..n {
        for j in 0..n {
            dst[i * n + j] += c * (u[i] * w[j] + w[i] * u[j]);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Jet1 {
    value: f64,
    grad: Vec<f64>,
}

impl Jet1 {
    pub fn new(value: f64, grad: Vec<f64>) -> Self {
        Self { value, grad }
    }

    pub fn constant(value: f64) -> Self {
        Self { value, grad: Vec::new() }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    /// Gradient component `i`; zero for constants.
    pub fn grad(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    fn chain(&self, f0: f64, f1: f64) -> Self {
        Self {
            value: f0,
            grad: self.grad.iter().map(|g| f1 * g).collect(),
        }
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v))
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, o: Jet1) -> Jet1 {
        Jet1 {
            value: self.value + o.value,
            grad: lin(1.0, &self.grad, 1.0, &o.grad),
        }
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, o: Jet1) -> Jet1 {
        Jet1 {
            value: self.value - o.value,
            grad: lin(1.0, &self.grad, -1.0, &o.grad),
        }
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, o: Jet1) -> Jet1 {
        self.mul_ref(&o)
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(self, o: Jet1) -> Jet1 {
        self.mul_ref(&o.recip())
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        self.scale(-1.0)
    }
}

impl Scalar for Jet1 {
    fn from_f64(c: f64) -> Self {
        Jet1::constant(c)
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn is_zero(&self) -> bool {
        self.value == 0.0 && self.grad.iter().all(|g| *g == 0.0)
    }

    fn scale(&self, c: f64) -> Self {
        Jet1 {
            value: c * self.value,
            grad: self.grad.iter().map(|g| c * g).collect(),
        }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        Jet1 {
            value: self.value * o.value,
            grad: lin(o.value, &self.grad, self.value, &o.grad),
        }
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.value += a.value * b.value;
        axpy_into(&mut self.grad, b.value, &a.grad);
        axpy_into(&mut self.grad, a.value, &b.grad);
    }

    fn scaled_add_assign(&mut self, c: f64, a: &Self) {
        self.value += c * a.value;
        axpy_into(&mut self.grad, c, &a.grad);
    }
}

impl Differentiable for Jet1 {
    type Lower = f64;

    fn lower(&self) -> f64 {
        self.value
    }

    fn partial(&self, i: usize) -> f64 {
        self.grad(i)
    }
}

/// Second-order jet: value, gradient and full symmetric Hessian.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Jet2 {
    value: f64,
    grad: Vec<f64>,
    hess: Vec<f64>,
}

/// Seeds the chart coordinates at `point`: the `i`-th jet has value
/// `point[i]`, gradient `e_i` and zero Hessian.
pub fn seed_variables(point: &[f64]) -> Vec<Jet2> {
    let n = point.len();
    point
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut grad = vec![0.0; n];
            grad[i] = 1.0;
            Jet2 {
                value: v,
                grad,
                hess: Vec::new(),
            }
        })
        .collect()
}

impl Jet2 {
    /// Builds a jet from explicit parts. The Hessian is symmetrized on write.
    pub fn new(value: f64, grad: Vec<f64>, hess: Vec<f64>) -> Self {
        let n = grad.len();
        assert!(hess.is_empty() || hess.len() == n * n, "hessian must be n x n");
        let mut hess = hess;
        let rows = if hess.is_empty() { 0 } else { n };
        for i in 0..rows {
            for j in (i + 1)..n {
                let s = 0.5 * (hess[i * n + j] + hess[j * n + i]);
                hess[i * n + j] = s;
                hess[j * n + i] = s;
            }
        }
        Self { value, grad, hess }
    }

    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self, i: usize) -> f64 {
        self.grad.get(i).copied().unwrap_or(0.0)
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        if self.hess.is_empty() {
            return 0.0;
        }
        let n = self.grad.len();
        self.hess[i * n + j]
    }

    pub fn gradient(&self) -> &[f64] {
        &self.grad
    }

    /// Propagates through a scalar function with derivatives `f1`, `f2` at
    /// the value part.
    fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut hess: Vec<f64> = self.hess.iter().map(|h| f1 * h).collect();
        sym_outer_into(&mut hess, 0.5 * f2, &self.grad, &self.grad);
        Self {
            value: f0,
            grad: self.grad.iter().map(|g| f1 * g).collect(),
            hess,
        }
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }

    pub fn try_recip(&self) -> Result<Self, JetError> {
        if self.value == 0.0 {
            return Err(JetError::DivisionByZero);
        }
        Ok(self.recip())
    }

    pub fn try_div(&self, o: &Self) -> Result<Self, JetError> {
        Ok(self.mul_ref(&o.try_recip()?))
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }

    pub fn try_sqrt(&self) -> Result<Self, JetError> {
        if self.value <= 0.0 {
            return Err(JetError::SqrtDomain(self.value));
        }
        Ok(self.sqrt())
    }

    pub fn powi(&self, n: i32) -> Self {
        let v = self.value;
        match n {
            0 => Self::constant(1.0),
            1 => self.clone(),
            _ => {
                let nf = n as f64;
                self.chain(
                    v.powi(n),
                    nf * v.powi(n - 1),
                    nf * (nf - 1.0) * v.powi(n - 2),
                )
            }
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + o.value,
            grad: lin(1.0, &self.grad, 1.0, &o.grad),
            hess: lin(1.0, &self.hess, 1.0, &o.hess),
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value - o.value,
            grad: lin(1.0, &self.grad, -1.0, &o.grad),
            hess: lin(1.0, &self.hess, -1.0, &o.hess),
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        self.mul_ref(&o)
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    fn div(self, o: Jet2) -> Jet2 {
        self.mul_ref(&o.recip())
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, c: f64) -> Jet2 {
        self.value += c;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, c: f64) -> Jet2 {
        self.value -= c;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

impl Scalar for Jet2 {
    fn from_f64(c: f64) -> Self {
        Jet2::constant(c)
    }

    fn value(&self) -> f64 {
        self.value
    }

    fn is_zero(&self) -> bool {
        self.value == 0.0
            && self.grad.iter().all(|g| *g == 0.0)
            && self.hess.iter().all(|h| *h == 0.0)
    }

    fn scale(&self, c: f64) -> Self {
        Jet2 {
            value: c * self.value,
            grad: self.grad.iter().map(|g| c * g).collect(),
            hess: self.hess.iter().map(|h| c * h).collect(),
        }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        let mut out = Jet2::constant(0.0);
        out.mul_add_assign(self, o);
        out
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.value += a.value * b.value;
        axpy_into(&mut self.grad, b.value, &a.grad);
        axpy_into(&mut self.grad, a.value, &b.grad);
        axpy_into(&mut self.hess, b.value, &a.hess);
        axpy_into(&mut self.hess, a.value, &b.hess);
        sym_outer_into(&mut self.hess, 1.0, &a.grad, &b.grad);
    }

    fn scaled_add_assign(&mut self, c: f64, a: &Self) {
        self.value += c * a.value;
        axpy_into(&mut self.grad, c, &a.grad);
        axpy_into(&mut self.hess, c, &a.hess);
    }
}

impl Differentiable for Jet2 {
    type Lower = Jet1;

    fn lower(&self) -> Jet1 {
        Jet1::new(self.value, self.grad.clone())
    }

    fn partial(&self, i: usize) -> Jet1 {
        let n = self.grad.len();
        let row = if self.hess.is_empty() {
            Vec::new()
        } else {
            self.hess[i * n..(i + 1) * n].to_vec()
        };
        Jet1::new(self.grad(i), row)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad_hess(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> (Vec<f64>, Vec<f64>) {
        let n = x.len();
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        let at = |d: &[(usize, f64)]| {
            let mut y = x.to_vec();
            for &(i, s) in d {
                y[i] += s;
            }
            f(&y)
        };
        for i in 0..n {
            grad[i] = (at(&[(i, h)]) - at(&[(i, -h)])) / (2.0 * h);
            for j in 0..n {
                hess[i * n + j] = (at(&[(i, h), (j, h)]) - at(&[(i, h), (j, -h)])
                    - at(&[(i, -h), (j, h)])
                    + at(&[(i, -h), (j, -h)]))
                    / (4.0 * h * h);
            }
        }
        (grad, hess)
    }

    #[test]
    fn square_of_seed() {
        let x = seed_variables(&[3.0]);
        let y = x[0].mul_ref(&x[0]);
        assert_eq!(y.value(), 9.0);
        assert_eq!(y.grad(0), 6.0);
        assert_eq!(y.hess(0, 0), 2.0);
    }

    #[test]
    fn product_of_two_seeds() {
        let v = seed_variables(&[1.0, 2.0]);
        let f = v[0].mul_ref(&v[1]);
        assert_eq!(f.value(), 2.0);
        assert_eq!(f.gradient(), &[2.0, 1.0]);
        assert_eq!(f.hess(0, 1), 1.0);
        assert_eq!(f.hess(1, 0), 1.0);
        assert_eq!(f.hess(0, 0), 0.0);
    }

    #[test]
    fn binomial_cancels_to_zero_jet() {
        let v = seed_variables(&[0.7, -1.3]);
        let (x, y) = (v[0].clone(), v[1].clone());
        let s = (x.clone() + y.clone()).powi(2) - x.powi(2) - x.mul_ref(&y).scale(2.0) - y.powi(2);
        assert!(s.value().abs() < 1e-15);
        for i in 0..2 {
            assert!(s.grad(i).abs() < 1e-15);
            for j in 0..2 {
                assert!(s.hess(i, j).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn chain_rule_sin_of_square() {
        let x = seed_variables(&[0.0]);
        let f = x[0].powi(2).sin();
        assert_eq!(f.hess(0, 0), 2.0);
    }

    #[test]
    fn sin_exp_against_finite_differences() {
        let p = [0.37, -0.81];
        let v = seed_variables(&p);
        let j = v[0].sin().mul_ref(&v[1].exp());
        let (g, h) = fd_grad_hess(|y| y[0].sin() * y[1].exp(), &p, 1e-5);
        for i in 0..2 {
            assert!((j.grad(i) - g[i]).abs() < 1e-6);
            for k in 0..2 {
                assert!((j.hess(i, k) - h[i * 2 + k]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn rational_trig_expression_against_finite_differences() {
        let p = [0.4, 1.1, -0.6];
        let f = |y: &[f64]| (y[0] * y[1] + y[2].cos()) / (2.0 + y[1].powi(2)).sqrt();
        let v = seed_variables(&p);
        let j = (v[0].mul_ref(&v[1]) + v[2].cos()) / (v[1].powi(2) + 2.0).sqrt();
        let (g, h) = fd_grad_hess(f, &p, 1e-5);
        assert!((j.value() - f(&p)).abs() < 1e-14);
        for i in 0..3 {
            assert!((j.grad(i) - g[i]).abs() < 1e-6);
            for k in 0..3 {
                assert!((j.hess(i, k) - h[i * 3 + k]).abs() < 1e-5);
            }
        }
    }

    #[test]
    fn checked_division_and_sqrt() {
        let z = Jet2::constant(0.0);
        assert_eq!(Jet2::constant(1.0).try_div(&z), Err(JetError::DivisionByZero));
        assert_eq!(Jet2::constant(-1.0).try_sqrt(), Err(JetError::SqrtDomain(-1.0)));
        assert!(Jet2::constant(0.0).try_sqrt().is_err());
    }

    #[test]
    fn partial_and_lower_are_consistent() {
        let v = seed_variables(&[0.3, 0.5]);
        let f = v[0].powi(3).mul_ref(&v[1]);
        let d0 = f.partial(0);
        assert!((d0.value() - 3.0 * 0.09 * 0.5).abs() < 1e-15);
        assert!((d0.grad(0) - 6.0 * 0.3 * 0.5).abs() < 1e-15);
        assert!((d0.grad(1) - 3.0 * 0.09).abs() < 1e-15);
        assert_eq!(f.lower().gradient(), f.gradient());
    }
}
