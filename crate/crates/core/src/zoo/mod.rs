//! Almost contact metric structures, their derived operators and defects,
//! and a catalogue of concrete models.

mod models;
mod registry;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::geometry::{self, GeometryError, MetricField, TensorField};
use crate::jet::Jet2;
use crate::perm::GroupAlgebraElement;
use crate::report::{CheckReport, ReportBuilder, Requirement};
use crate::scalar::{Differentiable, Scalar};
use crate::tensor::{residual, vanishing, PointTensor};

pub use models::{darboux_perturbed, darboux_pseudo, darboux_sasakian, s5_nearly_sasakian, s5_with_chart, SphereChart};
pub use registry::{catalogue, model, ModelInfo, MAX_DARBOUX_N};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZooError {
    #[error("an almost contact structure needs odd dimension, got {0}")]
    EvenDimension(usize),
    #[error("field {name} has valence {got:?} or dimension {dim}, expected {expected:?} in dimension {want}")]
    Shape {
        name: &'static str,
        got: (usize, usize),
        expected: (usize, usize),
        dim: usize,
        want: usize,
    },
    #[error("unknown model id {0:?}")]
    UnknownModel(String),
    #[error("invalid parameter in model id {id:?}: {reason}")]
    BadParameter { id: String, reason: String },
    #[error("incompatible signature: {0}")]
    Signature(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Region sampled in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Sampler {
    /// Uniform in `[−w, w]^dim`.
    Cube { half_width: f64 },
    /// Uniform in the closed ball of the given radius.
    Ball { radius: f64 },
}

impl Sampler {
    pub fn sample(&self, dim: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| match *self {
                Sampler::Cube { half_width } => (0..dim).map(|_| rng.gen_range(-half_width..=half_width)).collect(),
                Sampler::Ball { radius } => loop {
                    let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..=radius)).collect();
                    if v.iter().map(|c| c * c).sum::<f64>() <= radius * radius {
                        break v;
                    }
                },
            })
            .collect()
    }
}

/// A chart carrying `(g, φ, ξ, η)`.
#[derive(Clone, Debug)]
pub struct AcmsField {
    id: String,
    metric: MetricField,
    phi: TensorField,
    xi: TensorField,
    eta: TensorField,
    sampler: Sampler,
    default_tolerance: f64,
}

impl AcmsField {
    pub fn new(
        id: impl Into<String>,
        metric: MetricField,
        phi: TensorField,
        xi: TensorField,
        eta: TensorField,
        sampler: Sampler,
        default_tolerance: f64,
    ) -> Result<Self, ZooError> {
        let dim = metric.dim();
        if dim % 2 == 0 {
            return Err(ZooError::EvenDimension(dim));
        }
        for (name, f, expected) in [("phi", &phi, (1, 1)), ("xi", &xi, (1, 0)), ("eta", &eta, (0, 1))] {
            if f.valence() != expected || f.dim() != dim {
                return Err(ZooError::Shape {
                    name,
                    got: f.valence(),
                    expected,
                    dim: f.dim(),
                    want: dim,
                });
            }
        }
        Ok(Self {
            id: id.into(),
            metric,
            phi,
            xi,
            eta,
            sampler,
            default_tolerance,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn dim(&self) -> usize {
        self.metric.dim()
    }

    /// `n` with `dim = 2n + 1`.
    pub fn n(&self) -> usize {
        self.dim() / 2
    }

    pub fn metric(&self) -> &MetricField {
        &self.metric
    }

    pub fn phi(&self) -> &TensorField {
        &self.phi
    }

    pub fn xi(&self) -> &TensorField {
        &self.xi
    }

    pub fn eta(&self) -> &TensorField {
        &self.eta
    }

    pub fn is_riemannian(&self) -> bool {
        self.metric.is_riemannian()
    }

    pub fn sampler(&self) -> Sampler {
        self.sampler
    }

    pub fn default_tolerance(&self) -> f64 {
        self.default_tolerance
    }

    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<f64>> {
        self.sampler.sample(self.dim(), count, seed)
    }

    /// The same structure with `φ` multiplied by `c`.
    pub fn with_phi_scaled(&self, c: f64) -> Self {
        let inner = self.phi.clone();
        let dim = self.dim();
        let phi = TensorField::new(1, 1, dim, move |x| Ok(inner.eval_jets(x)?.scale(c).into_components()));
        Self {
            id: format!("{}*phi{c}", self.id),
            phi,
            ..self.clone()
        }
    }

    pub fn point(&self, x: &[f64]) -> Result<AcmsPoint, GeometryError> {
        AcmsPoint::new(self, x)
    }

    /// `∇φ − ξ⊗g + id⊗η`, i.e. `(X, Y) ↦ (∇_Xφ)Y − g(X,Y)ξ + η(Y)X`.
    pub fn sasakian_defect(&self, x: &[f64]) -> Result<PointTensor, GeometryError> {
        let nphi = self.metric.cov_derivative(&self.phi, x)?;
        let g = self.metric.field().at(x)?;
        let xi = self.xi.at(x)?;
        let eta = self.eta.at(x)?;
        Ok(sasakian_defect_from(&nphi, &g, &xi, &eta))
    }

    pub fn nearly_sasakian_defect(&self, x: &[f64]) -> Result<PointTensor, GeometryError> {
        Ok(nearly_from_sasakian_defect(&self.sasakian_defect(x)?))
    }
}

pub fn sasakian_defect_from(nphi: &PointTensor, g: &PointTensor, xi: &PointTensor, eta: &PointTensor) -> PointTensor {
    let id = PointTensor::identity(g.dim());
    let xg = xi.tensor_product(g).expect("same dimension");
    let ide = id.tensor_product(eta).expect("same dimension");
    &(nphi - &xg) + &ide
}

pub fn nearly_from_sasakian_defect(d: &PointTensor) -> PointTensor {
    let sym = GroupAlgebraElement::parse(2, "1 + (1,2)").expect("static expression");
    d.apply_group_element(&sym).expect("(1,2) tensor")
}

/// `(X, Y) ↦ g(AX, Y)` for a `(1,1)` tensor `A`.
pub fn lower_first<S: Scalar>(g: &PointTensor<S>, a: &PointTensor<S>) -> PointTensor<S> {
    let n = g.dim();
    PointTensor::from_fn(0, 2, n, |idx| {
        let mut acc = S::zero();
        for c in 0..n {
            acc.mul_add_assign(a.get(&[c, idx[0]]), g.get(&[c, idx[1]]));
        }
        acc
    })
}

/// Every tensor the checks need at one chart point, computed from exact jets.
#[derive(Debug, Clone)]
pub struct AcmsPoint {
    pub x: Vec<f64>,
    pub dim: usize,
    pub g: PointTensor,
    pub ginv: PointTensor,
    pub phi: PointTensor,
    pub xi: PointTensor,
    pub eta: PointTensor,
    pub id: PointTensor,
    pub gamma: PointTensor,
    /// `(X, Y) ↦ (∇_Xφ)Y`
    pub nabla_phi: PointTensor,
    /// `X ↦ ∇_Xξ`
    pub nabla_xi: PointTensor,
    /// `(X, Y) ↦ (∇_Xη)Y`
    pub nabla_eta: PointTensor,
    /// `(X, Y) ↦ ∇²_{X,Y}ξ`
    pub nabla2_xi: PointTensor,
    /// `(X, Y, Z) ↦ (∇²_{X,Y}φ)Z`
    pub nabla2_phi: PointTensor,
    /// `(∇ξ)²`
    pub a: PointTensor,
    /// `h = ∇_ξφ`
    pub h: PointTensor,
    pub phi_h: PointTensor,
    /// `Φ(X, Y) = g(φX, Y)`
    pub big_phi: PointTensor,
    /// `Ψ(X, Y) = g(hX, Y)`
    pub psi: PointTensor,
    /// `R(X, Y, Z) = R_{X,Y}Z`
    pub r: PointTensor,
    pub riem: PointTensor,
    pub d_eta: PointTensor,
    pub dd_eta: PointTensor,
    pub d_big_phi: PointTensor,
    pub dd_big_phi: PointTensor,
    pub d_psi: PointTensor,
}

impl AcmsPoint {
    pub fn new(field: &AcmsField, x: &[f64]) -> Result<Self, GeometryError> {
        let n = field.dim();
        let gj = field.metric.field().at_jets(x)?;
        let phij = field.phi.at_jets(x)?;
        let xij = field.xi.at_jets(x)?;
        let etaj = field.eta.at_jets(x)?;
        let gamma1 = geometry::christoffel(&gj).map_err(|e| match e {
            GeometryError::SingularMetric { det, .. } => GeometryError::SingularMetric { point: x.to_vec(), det },
            other => other,
        })?;
        let gamma = gamma1.values();

        let nphi1 = geometry::nabla(&phij, &gamma1);
        let nxi1 = geometry::nabla(&xij, &gamma1);
        let nabla_eta = geometry::nabla(&etaj, &gamma1).values();
        let nabla2_xi = geometry::nabla(&nxi1, &gamma);
        let nabla2_phi = geometry::nabla(&nphi1, &gamma);

        let lower = |t: &PointTensor<Jet2>| t.map(|c| c.lower());
        let g1 = lower(&gj);
        let xi1 = lower(&xij);
        let h1 = nphi1.insert_first(&xi1)?;
        let psi1 = lower_first(&g1, &h1);
        let d_psi = geometry::exterior_derivative(&psi1)?;

        let big_phi2 = lower_first(&gj, &phij);
        let d_big_phi1 = geometry::exterior_derivative(&big_phi2)?;
        let dd_big_phi = geometry::exterior_derivative(&d_big_phi1)?;
        let d_eta1 = geometry::exterior_derivative(&etaj)?;
        let dd_eta = geometry::exterior_derivative(&d_eta1)?;

        let r = geometry::curvature(&gamma1);
        let g = gj.values();
        let riem = geometry::lower_curvature(&g, &r);
        let phi = phij.values();
        let nabla_xi = nxi1.values();
        let a = nabla_xi.compose(&nabla_xi)?;
        let h = h1.values();
        let phi_h = phi.compose(&h)?;
        let ginv = PointTensor::new(2, 0, n, crate::linalg::inverse(g.components(), n)?)?;

        Ok(Self {
            x: x.to_vec(),
            dim: n,
            ginv,
            phi,
            xi: xij.values(),
            eta: etaj.values(),
            id: PointTensor::identity(n),
            gamma,
            nabla_phi: nphi1.values(),
            nabla_xi,
            nabla_eta,
            nabla2_xi,
            nabla2_phi,
            a,
            h,
            phi_h,
            big_phi: big_phi2.values(),
            psi: psi1.values(),
            r,
            riem,
            d_eta: d_eta1.values(),
            dd_eta,
            d_big_phi: d_big_phi1.values(),
            dd_big_phi,
            d_psi,
            g,
        })
    }

    pub fn n(&self) -> usize {
        self.dim / 2
    }

    pub fn sasakian_defect(&self) -> PointTensor {
        sasakian_defect_from(&self.nabla_phi, &self.g, &self.xi, &self.eta)
    }

    pub fn nearly_sasakian_defect(&self) -> PointTensor {
        nearly_from_sasakian_defect(&self.sasakian_defect())
    }

    /// `(X, Y) ↦ g(X, AY)`.
    pub fn g_of(&self, a: &PointTensor) -> PointTensor {
        self.g.compose(a).expect("(1,k) tensor")
    }

    /// Composition of `(1,1)` tensors.
    pub fn mm(&self, a: &PointTensor, b: &PointTensor) -> PointTensor {
        a.compose(b).expect("(1,1) tensors")
    }

    pub fn tp(&self, a: &PointTensor, b: &PointTensor) -> PointTensor {
        a.tensor_product(b).expect("same dimension")
    }

    /// `ξ⊗η` as an endomorphism.
    pub fn xi_eta(&self) -> PointTensor {
        self.tp(&self.xi, &self.eta)
    }
}

/// Residual records for the defining axioms at the given points.
pub fn validate_acms(field: &AcmsField, points: &[Vec<f64>], seed: u64, tol: f64) -> CheckReport {
    let mut b = ReportBuilder::new("validate_acms", field.id(), points.len(), seed, tol);
    for x in points {
        match axiom_residuals(field, x) {
            Ok(rs) => {
                for (name, v) in rs {
                    b.residual(name, v);
                }
            }
            Err(e) => return b.error(e.to_string(), Some(x.clone())),
        }
        let mismatch = field.metric.check_signature(x).is_err();
        b.observe("signature_mismatch", if mismatch { 1.0 } else { 0.0 }, Requirement::Equals(0.0));
    }
    b.finish()
}

fn axiom_residuals(field: &AcmsField, x: &[f64]) -> Result<Vec<(&'static str, f64)>, GeometryError> {
    let g = field.metric.field().at(x)?;
    let phi = field.phi.at(x)?;
    let xi = field.xi.at(x)?;
    let eta = field.eta.at(x)?;
    let id = PointTensor::identity(field.dim());
    let xe = xi.tensor_product(&eta)?;
    let phi2 = phi.compose(&phi)?;
    let unit = g.pair(&xi, &xi);
    Ok(vec![
        ("phi_squared", residual(&phi2, &(&xe - &id))),
        ("eta_is_dual_of_xi", residual(&eta, &g.compose(&xi)?)),
        ("xi_unit_length", (unit - 1.0).abs() / (1.0 + unit.abs().max(1.0))),
        ("phi_skew", residual(&lower_first(&g, &phi), &-&g.compose(&phi)?)),
        ("phi_kills_xi", vanishing(&phi.compose(&xi)?)),
        ("eta_kills_phi", vanishing(&eta.compose(&phi)?)),
    ])
}
