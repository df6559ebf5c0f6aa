//! Concrete almost contact metric structures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{GeometryError, MetricField, TensorField};
use crate::jet::Jet2;
use crate::octonion::{cross, dot};
use crate::scalar::Scalar;

use super::{AcmsField, Sampler, ZooError};

const DARBOUX_TOL: f64 = 1e-8;
const SPHERE_TOL: f64 = 1e-7;

/// Conformal factor `f = 1 + Σ a_k sin(w_k·x + c_k)` on the transverse metric.
#[derive(Debug, Clone)]
struct Wobble {
    amp: Vec<f64>,
    freq: Vec<Vec<f64>>,
    phase: Vec<f64>,
}

impl Wobble {
    fn eval(&self, x: &[Jet2]) -> Jet2 {
        let mut f = Jet2::constant(1.0);
        for ((a, w), c) in self.amp.iter().zip(&self.freq).zip(&self.phase) {
            let mut arg = Jet2::constant(*c);
            for (wi, xi) in w.iter().zip(x) {
                arg = arg + xi.scale(*wi);
            }
            f = f + arg.sin().scale(*a);
        }
        f
    }
}

/// Coordinates `(x_1..x_n, y_1..y_n, z)` with `η = ½(dz − Σ y_i dx_i)`,
/// `ξ = 2∂_z`, `g = η⊗η + ¼ f Σ ε_i(dx_i² + dy_i²)` and
/// `φ∂_{x_i} = −ε_i ∂_{y_i}`, `φ∂_{y_i} = ε_i(∂_{x_i} + y_i∂_z)`, `φ∂_z = 0`.
fn darboux(id: String, n: usize, eps: Vec<f64>, wobble: Option<Wobble>) -> Result<AcmsField, ZooError> {
    let dim = 2 * n + 1;
    let z = 2 * n;
    let eta_of = move |x: &[Jet2]| -> Vec<Jet2> {
        let mut e = vec![Jet2::constant(0.0); dim];
        for i in 0..n {
            e[i] = x[n + i].scale(-0.5);
        }
        e[z] = Jet2::constant(0.5);
        e
    };
    let eps_g = eps.clone();
    let metric = TensorField::new(0, 2, dim, move |x| {
        let e = eta_of(x);
        let f = wobble.as_ref().map(|w| w.eval(x));
        let mut g = Vec::with_capacity(dim * dim);
        for a in 0..dim {
            for b in 0..dim {
                let mut v = e[a].clone() * e[b].clone();
                if a == b && a != z {
                    let s = 0.25 * eps_g[a % n];
                    v = match &f {
                        Some(f) => v + f.scale(s),
                        None => v + s,
                    };
                }
                g.push(v);
            }
        }
        Ok(g)
    });
    let mut signature: Vec<i8> = vec![1; dim];
    for (i, e) in eps.iter().enumerate() {
        let s = if *e > 0.0 { 1 } else { -1 };
        signature[i] = s;
        signature[n + i] = s;
    }
    let metric = MetricField::new(metric, signature)?;
    let eps_phi = eps.clone();
    let phi = TensorField::new(1, 1, dim, move |x| {
        // φ^a_b = (φ∂_b)^a
        let mut m = vec![Jet2::constant(0.0); dim * dim];
        for i in 0..n {
            let (xi, yi) = (i, n + i);
            let s = eps_phi[i];
            m[yi * dim + xi] = Jet2::constant(-s);
            m[xi * dim + yi] = Jet2::constant(s);
            m[z * dim + yi] = x[yi].scale(s);
        }
        Ok(m)
    });
    let xi = TensorField::new(1, 0, dim, move |_| {
        let mut v = vec![Jet2::constant(0.0); dim];
        v[z] = Jet2::constant(2.0);
        Ok(v)
    });
    let eta = TensorField::new(0, 1, dim, move |x| Ok(eta_of(x)));
    AcmsField::new(id, metric, phi, xi, eta, Sampler::Cube { half_width: 1.0 }, DARBOUX_TOL)
}

/// The standard Sasakian structure on `ℝ^{2n+1}`.
pub fn darboux_sasakian(n: usize) -> Result<AcmsField, ZooError> {
    if n == 0 {
        return Err(ZooError::BadParameter {
            id: "darboux-sasakian:0".into(),
            reason: "n must be at least 1".into(),
        });
    }
    darboux(format!("darboux-sasakian:{n}"), n, vec![1.0; n], None)
}

/// The Darboux structure with transverse metric `¼Σ ε_i(dx_i² + dy_i²)`.
pub fn darboux_pseudo(n: usize, signs: &[i8]) -> Result<AcmsField, ZooError> {
    if n == 0 || signs.len() != n {
        return Err(ZooError::Signature(format!("expected {n} signs, got {}", signs.len())));
    }
    if signs.iter().any(|s| s.abs() != 1) {
        return Err(ZooError::Signature("signs must be +1 or -1".into()));
    }
    let text: String = signs.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect();
    darboux(
        format!("darboux-pseudo:{n}:{text}"),
        n,
        signs.iter().map(|&s| s as f64).collect(),
        None,
    )
}

/// The standard Sasakian structure with its transverse metric multiplied by
/// a fixed conformal factor within 1% of one. This is still an almost
/// contact metric structure but it is not nearly Sasakian.
pub fn darboux_perturbed(n: usize) -> Result<AcmsField, ZooError> {
    if n == 0 {
        return Err(ZooError::BadParameter {
            id: "darboux-perturbed:0".into(),
            reason: "n must be at least 1".into(),
        });
    }
    let dim = 2 * n + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0001);
    let terms = 3;
    let raw: Vec<f64> = (0..terms).map(|_| rng.gen_range(0.5..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let amp = raw.iter().map(|a| 0.01 * a / total).collect();
    let freq = (0..terms)
        .map(|_| (0..dim).map(|_| rng.gen_range(-3.0..3.0)).collect())
        .collect();
    let phase = (0..terms).map(|_| rng.gen_range(0.0..std::f64::consts::TAU)).collect();
    darboux(
        format!("darboux-perturbed:{n}"),
        n,
        vec![1.0; n],
        Some(Wobble { amp, freq, phase }),
    )
}

/// Placement of the five-sphere `S⁶ ∩ {⟨x, e⟩ = a}` in `Im 𝕆 ≅ ℝ⁷` and of
/// its chart `t ↦ a·e + ρ(Σ t_i u_i + √(1−|t|²) u_6)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereChart {
    pub e: [f64; 7],
    /// Orthonormal basis of `e^⊥`; the last vector is the chart's base direction.
    pub u: [[f64; 7]; 6],
    /// Height `a` of the slice; the radius is `√(1 − a²)`.
    pub height: f64,
    /// Sign `s` in `ξ = s·(y × e)` where `y` is the unit position in the slice.
    pub reeb_sign: f64,
}

fn unit(i: usize) -> [f64; 7] {
    let mut v = [0.0; 7];
    v[i] = 1.0;
    v
}

impl Default for SphereChart {
    fn default() -> Self {
        Self {
            e: unit(6),
            u: [unit(0), unit(1), unit(2), unit(3), unit(4), unit(5)],
            height: std::f64::consts::FRAC_1_SQRT_2,
            reeb_sign: 1.0,
        }
    }
}

struct SphereFrame {
    /// Chart tangent vectors in ℝ⁷.
    tangent: Vec<Vec<Jet2>>,
    /// Position on `S⁶`.
    pos: Vec<Jet2>,
    xi_amb: Vec<Jet2>,
    ginv: Vec<Jet2>,
}

impl SphereChart {
    fn frame(&self, t: &[Jet2]) -> Result<SphereFrame, GeometryError> {
        let r2: f64 = t.iter().map(|c| c.value() * c.value()).sum();
        if r2 >= 1.0 {
            return Err(GeometryError::ChartDomain {
                point: t.iter().map(|c| c.value()).collect(),
                reason: "the chart covers the open unit ball".into(),
            });
        }
        let a = self.height;
        let rho = (1.0 - a * a).sqrt();
        let mut s2 = Jet2::constant(0.0);
        for c in t {
            s2.mul_add_assign(c, c);
        }
        let w = (Jet2::constant(1.0) - s2).try_sqrt()?;
        let mut y = vec![Jet2::constant(0.0); 7];
        for k in 0..7 {
            for (i, ti) in t.iter().enumerate() {
                y[k].scaled_add_assign(self.u[i][k], ti);
            }
            y[k].scaled_add_assign(self.u[5][k], &w);
        }
        let tangent: Vec<Vec<Jet2>> = (0..5)
            .map(|j| {
                let q = t[j].try_div(&w)?;
                Ok((0..7)
                    .map(|k| (Jet2::constant(self.u[j][k]) - q.scale(self.u[5][k])).scale(rho))
                    .collect())
            })
            .collect::<Result<_, GeometryError>>()?;
        let pos: Vec<Jet2> = (0..7).map(|k| y[k].scale(rho) + self.e[k] * a).collect();
        let e: Vec<Jet2> = self.e.iter().map(|&c| Jet2::constant(c)).collect();
        let xi_amb: Vec<Jet2> = cross(&y, &e).into_iter().map(|c| c.scale(self.reeb_sign)).collect();
        let mut ginv = Vec::with_capacity(25);
        for i in 0..5 {
            for j in 0..5 {
                let d = if i == j { 1.0 } else { 0.0 };
                ginv.push((Jet2::constant(d) - t[i].clone() * t[j].clone()).scale(1.0 / (rho * rho)));
            }
        }
        Ok(SphereFrame {
            tangent,
            pos,
            xi_amb,
            ginv,
        })
    }
}

/// The nearly Sasakian, non-Sasakian structure on a totally umbilical
/// five-sphere of the nearly Kähler six-sphere.
pub fn s5_nearly_sasakian() -> Result<AcmsField, ZooError> {
    s5_with_chart("s5-nearly-sasakian", SphereChart::default())
}

pub fn s5_with_chart(id: &str, chart: SphereChart) -> Result<AcmsField, ZooError> {
    let dim = 5;
    let c_g = chart.clone();
    let metric = TensorField::new(0, 2, dim, move |t| {
        let f = c_g.frame(t)?;
        let mut g = Vec::with_capacity(25);
        for i in 0..5 {
            for j in 0..5 {
                g.push(dot(&f.tangent[i], &f.tangent[j]));
            }
        }
        Ok(g)
    });
    let metric = MetricField::new(metric, vec![1; dim])?;
    let c_eta = chart.clone();
    let eta = TensorField::new(0, 1, dim, move |t| {
        let f = c_eta.frame(t)?;
        Ok((0..5).map(|i| dot(&f.tangent[i], &f.xi_amb)).collect())
    });
    let c_xi = chart.clone();
    let xi = TensorField::new(1, 0, dim, move |t| {
        let f = c_xi.frame(t)?;
        let low: Vec<Jet2> = (0..5).map(|i| dot(&f.tangent[i], &f.xi_amb)).collect();
        Ok((0..5)
            .map(|i| {
                let mut acc = Jet2::constant(0.0);
                for (j, l) in low.iter().enumerate() {
                    acc.mul_add_assign(&f.ginv[i * 5 + j], l);
                }
                acc
            })
            .collect())
    });
    let c_phi = chart;
    let phi = TensorField::new(1, 1, dim, move |t| {
        let f = c_phi.frame(t)?;
        // low[k][j] = ⟨∂_k, J∂_j⟩ with J_p = p × ·
        let jt: Vec<Vec<Jet2>> = (0..5).map(|j| cross(&f.pos, &f.tangent[j])).collect();
        let mut low = Vec::with_capacity(25);
        for k in 0..5 {
            for j in 0..5 {
                low.push(dot(&f.tangent[k], &jt[j]));
            }
        }
        let mut m = Vec::with_capacity(25);
        for i in 0..5 {
            for j in 0..5 {
                let mut acc = Jet2::constant(0.0);
                for k in 0..5 {
                    acc.mul_add_assign(&f.ginv[i * 5 + k], &low[k * 5 + j]);
                }
                m.push(acc);
            }
        }
        Ok(m)
    });
    AcmsField::new(id, metric, phi, xi, eta, Sampler::Ball { radius: 0.9 }, SPHERE_TOL)
}
