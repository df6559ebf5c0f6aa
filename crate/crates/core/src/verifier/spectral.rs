//! Spectral checks on `A = (∇ξ)²`.

use crate::linalg;
use crate::report::{ReportBuilder, Requirement, SpectrumResult};
use crate::tensor::{residual, vanishing, PointTensor};
use crate::zoo::{lower_first, AcmsPoint};

use super::forms::top_wedge_value;
use super::Measurements;

const ZERO_EIGEN: f64 = 1e-6;
const CLUSTER_TOL: f64 = 1e-6;
const NEWTON_TOL: f64 = 1e-9;
const CONSTANCY_TOL: f64 = 1e-6;
const VOLUME_TOL: f64 = 1e-6;

/// Groups descending eigenvalues whose consecutive gaps are below
/// `tol·(1 + |λ|)`; returns index ranges.
pub fn cluster_eigenvalues(vals: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=vals.len() {
        if i == vals.len() || (vals[i - 1] - vals[i]).abs() > tol * (1.0 + vals[i].abs()) {
            out.push(start..i);
            start = i;
        }
    }
    out
}

/// `e_0 = 1, e_1, …, e_k` of the given roots.
pub fn elementary_from_roots(roots: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; roots.len() + 1];
    e[0] = 1.0;
    for (k, &r) in roots.iter().enumerate() {
        for s in (1..=k + 1).rev() {
            e[s] += r * e[s - 1];
        }
    }
    e
}

fn power_sums(a: &[f64], n: usize) -> Vec<f64> {
    let mut pw = a.to_vec();
    let mut out = Vec::with_capacity(n);
    for s in 1..=n {
        if s > 1 {
            pw = linalg::matmul(&pw, a, n);
        }
        out.push(linalg::trace(&pw, n));
    }
    out
}

fn elementary_from_faddeev(a: &[f64], n: usize) -> Vec<f64> {
    linalg::faddeev_leverrier(a, n)
        .into_iter()
        .enumerate()
        .map(|(s, c)| if s % 2 == 0 { c } else { -c })
        .collect()
}

pub(super) fn spectrum(p: &AcmsPoint) -> SpectrumResult {
    let n = p.dim;
    let (vals, _) = linalg::g_symmetric_eigen(p.g.components(), p.a.components(), n).expect("positive definite metric");
    let multiplicities = cluster_eigenvalues(&vals, CLUSTER_TOL)
        .into_iter()
        .map(|r| (vals[r.start..r.end].iter().sum::<f64>() / r.len() as f64, r.len()))
        .collect();
    SpectrumResult {
        elementary: elementary_from_roots(&vals),
        power_sums: power_sums(p.a.components(), n),
        eigenvalues: vals,
        multiplicities,
    }
}

fn column(vecs: &[f64], n: usize, j: usize) -> Vec<f64> {
    (0..n).map(|k| vecs[k * n + j]).collect()
}

fn bilinear(g: &PointTensor, u: &[f64], v: &[f64]) -> f64 {
    let n = g.dim();
    let gc = g.components();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += u[i] * gc[i * n + j] * v[j];
        }
    }
    s
}

/// Basis `ξ, X_1, Y_1, …, X_n, Y_n` with `∇_{X_k}ξ = λ_k Y_k`, `λ_k > 0`,
/// built from `g`-orthonormal eigenvectors of `(∇ξ)²`. Returns the basis
/// and the `λ_k`, or `None` if the spectrum is not of contact type.
pub fn adapted_basis(p: &AcmsPoint) -> Option<(Vec<Vec<f64>>, Vec<f64>)> {
    let n = p.dim;
    let (vals, vecs) = linalg::g_symmetric_eigen(p.g.components(), p.a.components(), n).ok()?;
    let mut basis = vec![p.xi.components().to_vec()];
    let mut lambdas = Vec::new();
    let nxi = p.nabla_xi.components();
    for r in cluster_eigenvalues(&vals, CLUSTER_TOL) {
        if vals[r.start].abs() < ZERO_EIGEN {
            continue;
        }
        let mut pool: Vec<Vec<f64>> = r.map(|j| column(&vecs, n, j)).collect();
        while let Some(x) = pool.first().cloned() {
            let nx = bilinear(&p.g, &x, &x).sqrt();
            let x: Vec<f64> = x.iter().map(|c| c / nx).collect();
            let y = linalg::mat_vec(nxi, &x, n);
            let lambda = bilinear(&p.g, &y, &y).sqrt();
            if lambda < ZERO_EIGEN {
                return None;
            }
            let y: Vec<f64> = y.iter().map(|c| c / lambda).collect();
            let mut rest: Vec<Vec<f64>> = Vec::new();
            for mut v in pool.drain(1..) {
                for u in [&x, &y] {
                    let d = bilinear(&p.g, &v, u);
                    v.iter_mut().zip(u.iter()).for_each(|(a, b)| *a -= d * b);
                }
                for w in &rest {
                    let d = bilinear(&p.g, &v, w);
                    v.iter_mut().zip(w.iter()).for_each(|(a, b)| *a -= d * b);
                }
                let nv = bilinear(&p.g, &v, &v).sqrt();
                if nv > 1e-6 {
                    rest.push(v.iter().map(|c| c / nv).collect());
                }
            }
            basis.push(x);
            basis.push(y);
            lambdas.push(lambda);
            pool = rest;
        }
    }
    (basis.len() == n).then_some((basis, lambdas))
}

pub(super) fn contactness(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let n = p.dim;
    let half = p.n();
    let (vals, _) = match linalg::g_symmetric_eigen(p.g.components(), p.a.components(), n) {
        Ok(e) => e,
        Err(e) => {
            m.note(format!("eigen-decomposition failed: {e}"));
            m.observe("zero_eigenvalue_count", f64::NAN, Requirement::Equals(1.0));
            return m;
        }
    };
    let zeros = vals.iter().filter(|l| l.abs() < ZERO_EIGEN).count();
    m.observe("zero_eigenvalue_count", zeros as f64, Requirement::Equals(1.0));
    let top_nonzero = vals.iter().copied().filter(|l| l.abs() >= ZERO_EIGEN).fold(f64::NEG_INFINITY, f64::max);
    m.observe("largest_nonzero_eigenvalue", top_nonzero, Requirement::AtMost(-1e-3));
    m.residual("a_eigenvalues_nonpositive", vals[0].max(0.0));
    let rank = linalg::rank(p.nabla_xi.components(), n, n, 1e-6);
    m.observe("nabla_xi_rank", rank as f64, Requirement::Equals((2 * half) as f64));

    match adapted_basis(p) {
        Some((basis, lambdas)) => {
            let eta: Vec<f64> = basis.iter().map(|v| p.eta.components().iter().zip(v).map(|(a, b)| a * b).sum()).collect();
            let omega: Vec<f64> = basis
                .iter()
                .flat_map(|u| basis.iter().map(|v| bilinear(&p.d_eta, u, v)).collect::<Vec<_>>())
                .collect();
            let vol = top_wedge_value(&eta, &omega, n);
            let factorial: f64 = (1..=half).map(|k| k as f64).product();
            let expected = factorial * 2f64.powi(half as i32) * lambdas.iter().product::<f64>();
            m.residual_with("contact_volume", (vol - expected).abs() / expected.abs(), VOLUME_TOL);
            m.observe("contact_volume_value", vol, Requirement::Record);
        }
        None => {
            m.note("spectrum is not of contact type: no adapted basis");
            m.residual_with("contact_volume", f64::INFINITY, VOLUME_TOL);
        }
    }
    m
}

pub(super) fn charpoly(b: &mut ReportBuilder, pts: &[&AcmsPoint], riemannian: bool) {
    let mut elems: Vec<Vec<f64>> = Vec::new();
    let mut traces: Vec<Vec<f64>> = Vec::new();
    for p in pts {
        let n = p.dim;
        let a = p.a.components();
        let e = elementary_from_faddeev(a, n);
        let ps = power_sums(a, n);
        b.residual_with("newton_identities", crate::report::newton_residual(&e, &ps), NEWTON_TOL);
        if riemannian {
            if let Ok((vals, _)) = linalg::g_symmetric_eigen(p.g.components(), a, n) {
                let ee = elementary_from_roots(&vals);
                let d = e
                    .iter()
                    .zip(&ee)
                    .map(|(x, y)| (x - y).abs() / (1.0 + x.abs().max(y.abs())))
                    .fold(0.0, f64::max);
                b.residual_with("faddeev_leverrier_vs_eigenvalues", d, CONSTANCY_TOL);
            }
        }
        traces.push(ps[..p.n()].to_vec());
        elems.push(e);
    }
    b.residual_with("elementary_polynomials_constant", spread(&elems), CONSTANCY_TOL);
    b.residual_with("traces_of_even_powers_constant", spread(&traces), CONSTANCY_TOL);
    if let Some(e) = elems.first() {
        for (s, v) in e.iter().enumerate().skip(1) {
            b.note(format!("e_{s} = {:.9}", v + 0.0));
        }
    }
}

/// Largest relative pairwise disagreement, coefficient by coefficient.
fn spread(rows: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for s in 0..rows.first().map_or(0, Vec::len) {
        let col: Vec<f64> = rows.iter().map(|r| r[s]).collect();
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        worst = worst.max((hi - lo) / (1.0 + hi.abs().max(lo.abs())));
    }
    worst
}

pub(super) fn eigenbundles(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let n = p.dim;
    let (vals, vecs) = match linalg::g_symmetric_eigen(p.g.components(), p.a.components(), n) {
        Ok(e) => e,
        Err(e) => {
            m.note(format!("eigen-decomposition failed: {e}"));
            m.observe("kernel_dimension", f64::NAN, Requirement::Equals(1.0));
            return m;
        }
    };
    let g = p.g.components();
    let clusters = cluster_eigenvalues(&vals, CLUSTER_TOL);
    let mut projectors = Vec::new();
    for r in &clusters {
        let spread = vals[r.start] - vals[r.end - 1];
        if spread > 1e-8 {
            m.note("ill-conditioned spectrum: eigenvalues closer than 1e-6 merged into one eigenbundle");
        }
        let mut pm = vec![0.0; n * n];
        for j in r.clone() {
            let v = column(&vecs, n, j);
            let gv = linalg::mat_vec(g, &v, n);
            for a in 0..n {
                for i in 0..n {
                    pm[a * n + i] += v[a] * gv[i];
                }
            }
        }
        let mu = vals[r.clone()].iter().sum::<f64>() / r.len() as f64;
        projectors.push((mu, r.len(), PointTensor::from_matrix(n, &pm)));
    }
    let mut total = PointTensor::zeros(1, 1, n);
    for (k, (mu, _, pk)) in projectors.iter().enumerate() {
        let pk2 = pk.compose(pk).expect("(1,1)");
        m.residual("projector_idempotent", residual(&pk2, pk));
        m.residual("projector_self_adjoint", residual(&lower_first(&p.g, pk), &p.g.compose(pk).expect("(1,1)")));
        m.residual("eigen_equation", residual(&p.a.compose(pk).expect("(1,1)"), &pk.scale(*mu)));
        let phi_comm = &p.phi.compose(pk).expect("(1,1)") - &pk.compose(&p.phi).expect("(1,1)");
        m.residual("phi_preserves_eigenbundle", vanishing(&phi_comm));
        let nxi_comm = &p.nabla_xi.compose(pk).expect("(1,1)") - &pk.compose(&p.nabla_xi).expect("(1,1)");
        m.residual("nabla_xi_preserves_eigenbundle", vanishing(&nxi_comm));
        for (_, _, pj) in projectors.iter().skip(k + 1) {
            m.residual("projectors_orthogonal", vanishing(&pk.compose(pj).expect("(1,1)")));
        }
        total = &total + pk;
    }
    m.residual("projectors_complete", residual(&total, &p.id));
    let kernel = projectors.iter().filter(|(mu, _, _)| mu.abs() < ZERO_EIGEN).map(|(_, d, _)| *d).sum::<usize>();
    m.observe("kernel_dimension", kernel as f64, Requirement::Equals(1.0));
    m.observe("eigenbundle_count", projectors.len() as f64, Requirement::Record);
    m
}
