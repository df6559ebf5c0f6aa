//! Levi-Civita connection, covariant derivatives, curvature and exterior
//! derivatives in a chart.
//!
//! Fields are evaluated on [`Jet2`] inputs. Each derivative consumes one jet
//! order: a field at `Jet2` yields `∇T` at [`Jet1`](crate::jet::Jet1) and
//! `∇²T` at `f64`. The new slot of `∇T` is the first covariant slot and is
//! the direction of differentiation; `∇²T(X, Y, …) = ∇²_{X,Y}T(…)`.
//!
//! Curvature follows `R_{X,Y} = ∇²_{X,Y} − ∇²_{Y,X}`, stored as a `(1,3)`
//! tensor with `R(X, Y, Z) = R_{X,Y}Z`, and
//! `Riem(X, Y, Z, W) = g(R_{X,Y}Z, W)`.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::jet::{seed_variables, Jet2, JetError};
use crate::linalg::{self, LinalgError};
use crate::perm::Permutation;
use crate::scalar::{Differentiable, Scalar};
use crate::tensor::{PointTensor, TensorError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("singular metric at {point:?} (|det| = {det:.3e})")]
    SingularMetric { point: Vec<f64>, det: f64 },
    #[error("point {point:?} lies outside the chart domain: {reason}")]
    ChartDomain { point: Vec<f64>, reason: String },
    #[error("metric signature mismatch at {point:?}: declared {declared:?}, observed {observed:?}")]
    Signature {
        point: Vec<f64>,
        declared: Vec<i8>,
        observed: Vec<i8>,
    },
    #[error("field evaluator returned {got} components, expected {expected}")]
    Evaluator { expected: usize, got: usize },
    #[error("exterior derivative of a (0,{0}) tensor that is not a form")]
    NotAForm(usize),
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Evaluator = Arc<dyn Fn(&[Jet2]) -> Result<Vec<Jet2>, GeometryError> + Send + Sync>;

/// A tensor field given by its chart components as functions of position.
#[derive(Clone)]
pub struct TensorField {
    p: usize,
    q: usize,
    dim: usize,
    eval: Evaluator,
}

impl fmt::Debug for TensorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TensorField({},{}; dim {})", self.p, self.q, self.dim)
    }
}

impl TensorField {
    pub fn new(
        p: usize,
        q: usize,
        dim: usize,
        eval: impl Fn(&[Jet2]) -> Result<Vec<Jet2>, GeometryError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            p,
            q,
            dim,
            eval: Arc::new(eval),
        }
    }

    pub fn constant(t: PointTensor) -> Self {
        let (p, q, dim) = (t.p(), t.q(), t.dim());
        let comps = t.into_components();
        Self::new(p, q, dim, move |_| Ok(comps.iter().map(|&c| Jet2::constant(c)).collect()))
    }

    pub fn valence(&self) -> (usize, usize) {
        (self.p, self.q)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval_jets(&self, vars: &[Jet2]) -> Result<PointTensor<Jet2>, GeometryError> {
        let comps = (self.eval)(vars)?;
        let expected = self.dim.pow((self.p + self.q) as u32);
        if comps.len() != expected {
            return Err(GeometryError::Evaluator {
                expected,
                got: comps.len(),
            });
        }
        Ok(PointTensor::new(self.p, self.q, self.dim, comps)?)
    }

    /// Components at `x` with exact first and second chart derivatives.
    pub fn at_jets(&self, x: &[f64]) -> Result<PointTensor<Jet2>, GeometryError> {
        self.eval_jets(&seed_variables(x))
    }

    pub fn at(&self, x: &[f64]) -> Result<PointTensor, GeometryError> {
        Ok(self.at_jets(x)?.values())
    }
}

/// A symmetric nondegenerate `(0,2)` field with a declared signature.
#[derive(Clone, Debug)]
pub struct MetricField {
    field: TensorField,
    signature: Vec<i8>,
}

impl MetricField {
    pub fn new(field: TensorField, signature: Vec<i8>) -> Result<Self, GeometryError> {
        if field.valence() != (0, 2) {
            return Err(TensorError::Valence("a metric must be a (0,2) field".into()).into());
        }
        if signature.len() != field.dim() || signature.iter().any(|s| s.abs() != 1) {
            return Err(TensorError::Valence("signature must list ±1 once per dimension".into()).into());
        }
        Ok(Self { field, signature })
    }

    pub fn field(&self) -> &TensorField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn signature(&self) -> &[i8] {
        &self.signature
    }

    pub fn is_riemannian(&self) -> bool {
        self.signature.iter().all(|&s| s == 1)
    }

    /// Sorted signs of the eigenvalues of `g` at `x`, compared with the
    /// declared signature.
    pub fn check_signature(&self, x: &[f64]) -> Result<(), GeometryError> {
        let g = self.field.at(x)?;
        let n = self.dim();
        let (vals, _) = linalg::symmetric_eigen(g.components(), n);
        let mut observed: Vec<i8> = vals.iter().map(|&v| if v > 0.0 { 1 } else { -1 }).collect();
        let mut declared = self.signature.clone();
        observed.sort_unstable();
        declared.sort_unstable();
        if observed != declared || vals.iter().any(|v| v.abs() < 1e-12) {
            return Err(GeometryError::Signature {
                point: x.to_vec(),
                declared: self.signature.clone(),
                observed,
            });
        }
        Ok(())
    }

    pub fn christoffel(&self, x: &[f64]) -> Result<PointTensor, GeometryError> {
        let g = self.field.at_jets(x)?;
        christoffel(&g).map(|c| c.values()).map_err(|e| at_point(e, x))
    }

    /// `∇T` at `x`.
    pub fn cov_derivative(&self, t: &TensorField, x: &[f64]) -> Result<PointTensor, GeometryError> {
        let g = self.field.at_jets(x)?;
        let gamma = christoffel(&g).map_err(|e| at_point(e, x))?;
        let tj = t.at_jets(x)?;
        Ok(nabla(&tj, &gamma).values())
    }

    /// `∇²T` at `x`.
    pub fn cov2_derivative(&self, t: &TensorField, x: &[f64]) -> Result<PointTensor, GeometryError> {
        let g = self.field.at_jets(x)?;
        let gamma = christoffel(&g).map_err(|e| at_point(e, x))?;
        let tj = t.at_jets(x)?;
        let d1 = nabla(&tj, &gamma);
        Ok(nabla(&d1, &gamma.values()))
    }

    /// `(R, Riem)` at `x` from the Christoffel symbols and their derivatives.
    pub fn riemann(&self, x: &[f64]) -> Result<(PointTensor, PointTensor), GeometryError> {
        let g = self.field.at_jets(x)?;
        let gamma = christoffel(&g).map_err(|e| at_point(e, x))?;
        let r = curvature(&gamma);
        let riem = lower_curvature(&g.values(), &r);
        Ok((r, riem))
    }

    /// `R` at `x` from second covariant derivatives of the coordinate fields,
    /// antisymmetrised in the two direction slots.
    pub fn riemann_nested(&self, x: &[f64]) -> Result<PointTensor, GeometryError> {
        let n = self.dim();
        let g = self.field.at_jets(x)?;
        let gamma = christoffel(&g).map_err(|e| at_point(e, x))?;
        let gamma0 = gamma.values();
        let swap = Permutation::cycle(2, &[1, 2]);
        let mut r = PointTensor::zeros(1, 3, n);
        for k in 0..n {
            let e = PointTensor::<Jet2>::from_fn(1, 0, n, |i| Jet2::constant(if i[0] == k { 1.0 } else { 0.0 }));
            let d2 = nabla(&nabla(&e, &gamma), &gamma0);
            let rk = &d2 - &d2.permute(&swap)?;
            for a in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        r.set(&[a, i, j, k], *rk.get(&[a, i, j]));
                    }
                }
            }
        }
        Ok(r)
    }
}

fn at_point(e: GeometryError, x: &[f64]) -> GeometryError {
    match e {
        GeometryError::SingularMetric { det, .. } => GeometryError::SingularMetric {
            point: x.to_vec(),
            det,
        },
        other => other,
    }
}

/// `Γᵏᵢⱼ = ½ gᵏˡ (∂ᵢ gⱼₗ + ∂ⱼ gᵢₗ − ∂ₗ gᵢⱼ)`, one jet order below `g`.
pub fn christoffel<J: Differentiable>(g: &PointTensor<J>) -> Result<PointTensor<J::Lower>, GeometryError> {
    if g.valence() != (0, 2) {
        return Err(TensorError::Valence("christoffel needs a (0,2) metric".into()).into());
    }
    let n = g.dim();
    let low: Vec<J::Lower> = g.components().iter().map(|c| c.lower()).collect();
    let ginv = match linalg::inverse_and_det(&low, n) {
        Ok((inv, _)) => inv,
        Err(LinalgError::Singular(det)) => {
            return Err(GeometryError::SingularMetric { point: Vec::new(), det });
        }
        Err(e) => return Err(e.into()),
    };
    // dg[(l * n + i) * n + j] = ∂_l g_ij
    let mut dg = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                dg.push(g.get(&[i, j]).partial(l));
            }
        }
    }
    let d = |l: usize, i: usize, j: usize| &dg[(l * n + i) * n + j];
    // first kind: Γ_lij = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
    let mut first = Vec::with_capacity(n * n * n);
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                let s = d(i, j, l).clone() + d(j, i, l).clone() - d(l, i, j).clone();
                first.push(s.scale(0.5));
            }
        }
    }
    let mut out = PointTensor::<J::Lower>::zeros(1, 2, n);
    for k in 0..n {
        for i in 0..n {
            for j in i..n {
                let mut acc = J::Lower::zero();
                for l in 0..n {
                    acc.mul_add_assign(&ginv[k * n + l], &first[(l * n + i) * n + j]);
                }
                out.set(&[k, j, i], acc.clone());
                out.set(&[k, i, j], acc);
            }
        }
    }
    Ok(out)
}

/// Covariant derivative of a tensor given at jet order `J`, using a
/// connection given one order lower.
pub fn nabla<J: Differentiable>(t: &PointTensor<J>, gamma: &PointTensor<J::Lower>) -> PointTensor<J::Lower> {
    let (p, q, n) = (t.p(), t.q(), t.dim());
    let low = t.map(|c| c.lower());
    let gc = gamma.components();
    let gam = |k: usize, i: usize, j: usize| &gc[(k * n + i) * n + j];
    PointTensor::from_fn(p, q + 1, n, |idx| {
        let l = idx[p];
        let mut src: Vec<usize> = idx[..p].iter().chain(&idx[p + 1..]).copied().collect();
        let mut acc = t.get(&src).partial(l);
        for s in 0..p {
            let a = src[s];
            for c in 0..n {
                src[s] = c;
                acc.mul_add_assign(gam(a, l, c), low.get(&src));
            }
            src[s] = a;
        }
        for s in p..p + q {
            let b = src[s];
            for c in 0..n {
                src[s] = c;
                let v = low.get(&src);
                if !v.is_zero() {
                    let neg = -gam(c, l, b).clone();
                    acc.mul_add_assign(&neg, v);
                }
            }
            src[s] = b;
        }
        acc
    })
}

/// `Rᵃ(i, j, k) = ∂ᵢΓᵃⱼₖ − ∂ⱼΓᵃᵢₖ + ΓᵃᵢᵦΓᵇⱼₖ − ΓᵃⱼᵦΓᵇᵢₖ`.
pub fn curvature<J: Differentiable>(gamma: &PointTensor<J>) -> PointTensor<J::Lower> {
    let n = gamma.dim();
    let low = gamma.map(|c| c.lower());
    PointTensor::from_fn(1, 3, n, |idx| {
        let (a, i, j, k) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = gamma.get(&[a, j, k]).partial(i) - gamma.get(&[a, i, k]).partial(j);
        for b in 0..n {
            acc.mul_add_assign(low.get(&[a, i, b]), low.get(&[b, j, k]));
            let neg = -low.get(&[a, j, b]).clone();
            acc.mul_add_assign(&neg, low.get(&[b, i, k]));
        }
        acc
    })
}

/// `Riem(X, Y, Z, W) = g(R(X, Y, Z), W)`.
pub fn lower_curvature<S: Scalar>(g: &PointTensor<S>, r: &PointTensor<S>) -> PointTensor<S> {
    let n = g.dim();
    PointTensor::from_fn(0, 4, n, |idx| {
        let mut acc = S::zero();
        for a in 0..n {
            acc.mul_add_assign(g.get(&[a, idx[3]]), r.get(&[a, idx[0], idx[1], idx[2]]));
        }
        acc
    })
}

/// `Σᵢ (−1)ⁱ T(Xᵢ, X₀, …, X̂ᵢ, …)` for a `(0, k+1)` tensor `T`; applied to
/// `∇ω` this is the exterior derivative of a `k`-form `ω`.
pub fn alternate_direction<S: Scalar>(t: &PointTensor<S>) -> Result<PointTensor<S>, TensorError> {
    if t.p() != 0 || t.q() == 0 {
        return Err(TensorError::Valence("alternation needs a (0,k+1) tensor".into()));
    }
    let m = t.q();
    let mut out = PointTensor::zeros(0, m, t.dim());
    for i in 0..m {
        // τ moves argument i to the first slot: τ = (1, 2, …, i+1)
        let images: Vec<usize> = (0..m)
            .map(|s| if s < i { s + 1 } else if s == i { 0 } else { s })
            .collect();
        let tau = Permutation::from_images(images).expect("valid cycle");
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let term = t.permute(&tau)?;
        out = &out + &term.scale(sign);
    }
    Ok(out)
}

/// Exterior derivative from coordinate partials:
/// `dω(i₀, …, i_k) = Σⱼ (−1)ʲ ∂_{iⱼ} ω(i₀, …, îⱼ, …, i_k)`.
pub fn exterior_derivative<J: Differentiable>(omega: &PointTensor<J>) -> Result<PointTensor<J::Lower>, GeometryError> {
    if omega.p() != 0 {
        return Err(GeometryError::NotAForm(omega.q()));
    }
    let values = omega.values();
    if values.q() >= 2 && values.alternation_residual() > 1e-10 {
        return Err(GeometryError::NotAForm(omega.q()));
    }
    let (k, n) = (omega.q(), omega.dim());
    Ok(PointTensor::from_fn(0, k + 1, n, |idx| {
        let mut acc = <J::Lower as Scalar>::zero();
        let mut rest = Vec::with_capacity(k);
        for j in 0..=k {
            rest.clear();
            rest.extend(idx.iter().enumerate().filter(|&(s, _)| s != j).map(|(_, &v)| v));
            let term = omega.get(&rest).partial(idx[j]);
            acc.scaled_add_assign(if j % 2 == 0 { 1.0 } else { -1.0 }, &term);
        }
        acc
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::Jet1;
    use crate::perm::GroupAlgebraElement;
    use crate::tensor::{residual, vanishing};
    use proptest::prelude::*;

    fn euclidean(n: usize) -> MetricField {
        MetricField::new(TensorField::constant(PointTensor::from_fn(0, 2, n, |i| if i[0] == i[1] { 1.0 } else { 0.0 })), vec![1; n]).unwrap()
    }

    /// Round sphere of radius `r` in coordinates (θ, φ): g = r²(dθ² + sin²θ dφ²).
    fn sphere(r: f64) -> MetricField {
        MetricField::new(
            TensorField::new(0, 2, 2, move |x| {
                let s = x[0].sin();
                Ok(vec![
                    Jet2::constant(r * r),
                    Jet2::constant(0.0),
                    Jet2::constant(0.0),
                    (s.clone() * s).scale(r * r),
                ])
            }),
            vec![1, 1],
        )
        .unwrap()
    }

    /// A generic metric on ℝ³ with polynomial and trigonometric entries.
    fn wobbly() -> MetricField {
        MetricField::new(
            TensorField::new(0, 2, 3, |x| {
                let one = Jet2::constant(1.0);
                let a = one.clone() + (x[0].clone() * x[1].clone()).scale(0.3);
                let b = x[2].sin().scale(0.2);
                let c = one.clone() + (x[1].clone() * x[1].clone()).scale(0.25);
                let d = x[0].clone().scale(0.1) + x[2].clone() * x[1].clone().scale(0.1);
                let e = Jet2::constant(2.0) + x[0].cos().scale(0.3);
                let f = x[2].exp().scale(0.05);
                Ok(vec![a, b.clone(), d.clone(), b, c, f.clone(), d, f, e])
            }),
            vec![1, 1, 1],
        )
        .unwrap()
    }

    #[test]
    fn flat_space_has_no_connection_or_curvature() {
        let g = euclidean(3);
        let x = [0.1, -0.4, 2.0];
        assert_eq!(g.christoffel(&x).unwrap().max_abs(), 0.0);
        let (r, riem) = g.riemann(&x).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        assert_eq!(riem.max_abs(), 0.0);
    }

    #[test]
    fn sphere_christoffel_closed_form() {
        let g = sphere(1.0);
        let x = [0.7, 0.3];
        let gam = g.christoffel(&x).unwrap();
        let (s, c) = (x[0].sin(), x[0].cos());
        // Γ^θ_φφ = −sinθ cosθ, Γ^φ_θφ = cotθ
        assert!((gam.get(&[0, 1, 1]) + s * c).abs() < 1e-14);
        assert!((gam.get(&[1, 0, 1]) - c / s).abs() < 1e-14);
        assert!((gam.get(&[1, 1, 0]) - c / s).abs() < 1e-14);
        assert!(gam.get(&[0, 0, 0]).abs() < 1e-15);
    }

    #[test]
    fn sphere_sectional_curvature() {
        for r in [1.0, 2.5] {
            let g = sphere(r);
            let x = [1.1, -0.2];
            let (_, riem) = g.riemann(&x).unwrap();
            let gx = g.field().at(&x).unwrap();
            let e0 = PointTensor::vector(vec![1.0, 0.0]);
            let e1 = PointTensor::vector(vec![0.0, 1.0]);
            let num = riem.eval(&[&e0, &e1, &e1, &e0]).unwrap().components()[0];
            let den = gx.pair(&e0, &e0) * gx.pair(&e1, &e1) - gx.pair(&e0, &e1).powi(2);
            assert!((num / den - 1.0 / (r * r)).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_metric_reports_point() {
        let g = MetricField::new(TensorField::constant(PointTensor::zeros(0, 2, 2)), vec![1, 1]).unwrap();
        match g.christoffel(&[0.5, 0.5]) {
            Err(GeometryError::SingularMetric { point, .. }) => assert_eq!(point, vec![0.5, 0.5]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn signature_is_checked() {
        let g = MetricField::new(
            TensorField::constant(PointTensor::from_fn(0, 2, 2, |i| if i[0] == i[1] { [1.0, -1.0][i[0]] } else { 0.0 })),
            vec![1, 1],
        )
        .unwrap();
        assert!(g.check_signature(&[0.0, 0.0]).is_err());
        let h = MetricField::new(g.field().clone(), vec![-1, 1]).unwrap();
        assert!(h.check_signature(&[0.0, 0.0]).is_ok());
        assert!(!h.is_riemannian());
    }

    #[test]
    fn metric_is_parallel() {
        let g = wobbly();
        for x in [[0.1, 0.2, 0.3], [-0.5, 0.7, -0.1]] {
            let dg = g.cov_derivative(g.field(), &x).unwrap();
            assert!(vanishing(&dg) < 1e-13);
        }
    }

    #[test]
    fn connection_is_torsion_free() {
        // ∇_X Y − ∇_Y X = [X, Y] for polynomial vector fields
        let g = wobbly();
        let xf = TensorField::new(1, 0, 3, |x| Ok(vec![x[1].clone(), Jet2::constant(1.0), x[0].clone() * x[2].clone()]));
        let yf = TensorField::new(1, 0, 3, |x| Ok(vec![x[2].clone() * x[2].clone(), x[0].clone(), Jet2::constant(0.5)]));
        let p = [0.3, -0.2, 0.6];
        let xv = xf.at(&p).unwrap();
        let yv = yf.at(&p).unwrap();
        let dx = g.cov_derivative(&xf, &p).unwrap();
        let dy = g.cov_derivative(&yf, &p).unwrap();
        let lhs = &dy.insert_first(&xv).unwrap() - &dx.insert_first(&yv).unwrap();
        let xj = xf.at_jets(&p).unwrap();
        let yj = yf.at_jets(&p).unwrap();
        let bracket = PointTensor::from_fn(1, 0, 3, |a| {
            (0..3)
                .map(|b| xv.components()[b] * yj.components()[a[0]].grad(b) - yv.components()[b] * xj.components()[a[0]].grad(b))
                .sum()
        });
        assert!(residual(&lhs, &bracket) < 1e-13);
    }

    #[test]
    fn riemann_direct_and_nested_agree() {
        let g = wobbly();
        let x = [0.2, 0.4, -0.3];
        let (r, riem) = g.riemann(&x).unwrap();
        let nested = g.riemann_nested(&x).unwrap();
        assert!(residual(&r, &nested) < 1e-12);
        // Riem∘(1,4,3,2) = g∘R
        let gx = g.field().at(&x).unwrap();
        let lhs = riem.permute(&Permutation::cycle(4, &[1, 4, 3, 2])).unwrap();
        let rhs = gx.compose(&r).unwrap();
        assert!(residual(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn curvature_symmetries_on_generic_metric() {
        let g = wobbly();
        let (r, riem) = g.riemann(&[0.5, -0.1, 0.2]).unwrap();
        assert!(r.max_abs() > 1e-3);
        for expr in ["1 + (1,2)", "1 + (3,4)", "1 - (1,3)(2,4)", "1 + (1,2,3) + (1,3,2)"] {
            let a = GroupAlgebraElement::parse(4, expr).unwrap();
            assert!(vanishing(&riem.apply_group_element(&a).unwrap()) < 1e-12, "{expr}");
        }
        assert!(!riem.polarization_vanishing_test(1e-10).unwrap());
    }

    #[test]
    fn ricci_identity_for_vector_field() {
        let g = wobbly();
        let xf = TensorField::new(1, 0, 3, |x| Ok(vec![x[1].sin(), x[0].clone() * x[0].clone(), x[2].exp()]));
        let p = [0.1, 0.3, -0.2];
        let d2 = g.cov2_derivative(&xf, &p).unwrap();
        let lhs = &d2 - &d2.permute(&Permutation::cycle(2, &[1, 2])).unwrap();
        let (r, _) = g.riemann(&p).unwrap();
        let rhs = r.compose(&xf.at(&p).unwrap()).unwrap();
        assert!(residual(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn permutation_tensors_are_parallel() {
        let g = wobbly();
        let sigma = Permutation::cycle(2, &[1, 2]);
        let field = TensorField::constant(PointTensor::permutation_tensor(3, &sigma));
        let d = g.cov_derivative(&field, &[0.3, 0.3, 0.3]).unwrap();
        assert!(vanishing(&d) < 1e-13);
    }

    fn one_form() -> TensorField {
        TensorField::new(0, 1, 3, |x| {
            Ok(vec![
                x[1].clone() * x[2].sin(),
                x[0].cos() * x[2].clone(),
                x[0].clone() * x[1].clone() * x[1].clone(),
            ])
        })
    }

    #[test]
    fn exterior_derivative_matches_alternated_covariant_derivative() {
        let g = wobbly();
        let p = [0.4, -0.3, 0.8];
        let w = one_form();
        let wj = w.at_jets(&p).unwrap();
        let d_coord = exterior_derivative(&wj).unwrap().values();
        let d_cov = alternate_direction(&g.cov_derivative(&w, &p).unwrap()).unwrap();
        assert!(residual(&d_coord, &d_cov) < 1e-13);
        // dη(X,Y) = (∇_Xη)Y − (∇_Yη)X
        let nw = g.cov_derivative(&w, &p).unwrap();
        let alt = &nw - &nw.permute(&Permutation::cycle(2, &[1, 2])).unwrap();
        assert!(residual(&alt, &d_cov) < 1e-14);
    }

    #[test]
    fn d_squared_vanishes_on_one_and_two_forms() {
        let p = [0.2, 0.5, -0.7];
        let w = one_form().at_jets(&p).unwrap();
        let dw: PointTensor<Jet1> = exterior_derivative(&w).unwrap();
        let ddw = exterior_derivative(&dw).unwrap();
        assert!(vanishing(&ddw) < 1e-14);
        assert!(residual(&ddw.values(), &PointTensor::zeros(0, 3, 3)) < 1e-14);
        // d of a 2-form via ∇ matches (1 + (1,2,3) + (1,3,2)) alternation
        let g = wobbly();
        let two = TensorField::new(0, 2, 3, |x| {
            let a = x[0].clone() * x[1].clone();
            let b = x[2].sin();
            let c = x[1].exp();
            let z = Jet2::constant(0.0);
            Ok(vec![z.clone(), a.clone(), b.clone(), -a.clone(), z.clone(), c.clone(), -b, -c, z])
        });
        let nw = g.cov_derivative(&two, &p).unwrap();
        let cyc = GroupAlgebraElement::parse(3, "1 + (1,2,3) + (1,3,2)").unwrap();
        let lhs = nw.apply_group_element(&cyc).unwrap();
        let d = exterior_derivative(&two.at_jets(&p).unwrap()).unwrap().values();
        assert!(residual(&lhs, &d) < 1e-13);
    }

    #[test]
    fn rejects_non_forms() {
        let t = TensorField::new(0, 2, 2, |x| Ok(vec![x[0].clone(), x[1].clone(), Jet2::constant(0.0), Jet2::constant(1.0)]));
        assert!(matches!(
            exterior_derivative(&t.at_jets(&[0.1, 0.2]).unwrap()),
            Err(GeometryError::NotAForm(2))
        ));
    }

    proptest! {
        #[test]
        fn covariant_derivative_obeys_leibniz_for_composition(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0) {
            // ∇(T₁∘T₂) = (∇T₁)∘T₂ + T₁∘(∇T₂), the direction slot moved to the front
            let g = wobbly();
            let p = [a, b, c];
            let t1 = TensorField::new(0, 2, 3, |x| Ok((0..9).map(|k| x[k % 3].clone() * x[(k / 3) % 3].sin() + Jet2::constant(k as f64 * 0.1)).collect()));
            let t2 = TensorField::new(1, 1, 3, |x| Ok((0..9).map(|k| x[(k + 1) % 3].cos().scale(1.0 + k as f64 * 0.2)).collect()));
            let t1j = t1.at_jets(&p).unwrap();
            let t2j = t2.at_jets(&p).unwrap();
            let gj = g.field().at_jets(&p).unwrap();
            let gam = christoffel(&gj).unwrap();
            let comp = t1j.compose(&t2j).unwrap();
            let lhs = nabla(&comp, &gam).values();
            let d1 = nabla(&t1j, &gam).values();
            let d2 = nabla(&t2j, &gam).values();
            let term1 = d1.compose(&t2j.values()).unwrap();
            // T₁∘∇T₂ has slots (X, D, Y); move D to the front with (1,2)
            let term2 = t1j.values().compose(&d2).unwrap().permute(&Permutation::cycle(3, &[1, 2])).unwrap();
            prop_assert!(residual(&lhs, &(&term1 + &term2)) < 1e-12);
        }

        #[test]
        fn covariant_derivative_commutes_with_permutation(a in -1.0f64..1.0, b in -1.0f64..1.0, c in -1.0f64..1.0, which in 0usize..6) {
            // ∇(T∘σ) = ∇T ∘ s(σ)
            let g = wobbly();
            let p = [a, b, c];
            let sigma = Permutation::all(3)[which].clone();
            let t = TensorField::new(0, 3, 3, |x| Ok((0..27).map(|k| x[k % 3].clone() * x[(k / 3) % 3].clone() + x[(k / 9) % 3].sin().scale(k as f64 * 0.05)).collect()));
            let tj = t.at_jets(&p).unwrap();
            let gam = christoffel(&g.field().at_jets(&p).unwrap()).unwrap();
            let lhs = nabla(&tj.permute(&sigma).unwrap(), &gam).values();
            let rhs = nabla(&tj, &gam).values().permute(&sigma.shift_include()).unwrap();
            prop_assert!(residual(&lhs, &rhs) < 1e-13);
        }
    }
}
