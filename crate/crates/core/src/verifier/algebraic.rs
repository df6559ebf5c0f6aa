//! Pointwise tensor identities.

use crate::geometry::lower_curvature;
use crate::linalg;
use crate::perm::{GroupAlgebraElement, Permutation};
use crate::report::{ReportBuilder, Requirement};
use crate::tensor::{residual, vanishing, PointTensor};
use crate::zoo::{lower_first, AcmsPoint};

use super::Measurements;

pub(super) fn ge(t: &PointTensor, expr: &str) -> PointTensor {
    let a = GroupAlgebraElement::parse(t.q(), expr).expect("static expression");
    t.apply_group_element(&a).expect("arity matches")
}

pub(super) fn perm(t: &PointTensor, cycle: &[usize]) -> PointTensor {
    t.permute(&Permutation::cycle(t.q(), cycle)).expect("arity matches")
}

fn c(a: &PointTensor, b: &PointTensor) -> PointTensor {
    a.compose(b).expect("composable valences")
}

fn t(a: &PointTensor, b: &PointTensor) -> PointTensor {
    a.tensor_product(b).expect("same dimension")
}

fn wedge(a: &PointTensor, b: &PointTensor) -> PointTensor {
    a.wedge(b).expect("form on the left")
}

fn first(a: &PointTensor, v: &PointTensor) -> PointTensor {
    a.insert_first(v).expect("vector argument")
}

/// Residual of `g`-skewness of an endomorphism.
fn skew(p: &AcmsPoint, a: &PointTensor) -> f64 {
    residual(&lower_first(&p.g, a), &-&p.g_of(a))
}

/// Rφ = R∘φ − φ∘R, i.e. `(X, Y, Z) ↦ (R_{X,Y}φ)Z`.
pub(super) fn r_phi(p: &AcmsPoint) -> PointTensor {
    &c(&p.r, &p.phi) - &c(&p.phi, &p.r)
}

pub(super) fn easy_facts(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let (phi, h, a, nxi) = (&p.phi, &p.h, &p.a, &p.nabla_xi);
    m.residual("eta_of_nabla_xi", vanishing(&c(&p.eta, nxi)));
    m.residual("nabla_xi_of_xi", vanishing(&nxi.apply_to(&p.xi)));
    m.residual("nabla_along_xi_of_eta", vanishing(&first(&p.nabla_eta, &p.xi)));
    m.residual("h_skew", skew(p, h));
    m.residual("phi_h_skew", skew(p, &p.phi_h));
    m.residual("h_anticommutes_with_phi", vanishing(&(&c(phi, h) + &c(h, phi))));
    m.residual("phi_h_anticommutes_with_phi", vanishing(&(&c(phi, &p.phi_h) + &c(&p.phi_h, phi))));
    m.residual("h_from_phi_and_nabla_xi", residual(h, &c(phi, &(phi + nxi))));
    m.residual("phi_plus_nabla_xi_plus_phi_h", vanishing(&(&(phi + nxi) + &p.phi_h)));
    let h2 = c(h, h);
    m.residual("a_plus_id_is_h_squared", residual(&(&(a + &p.id) - &p.xi_eta()), &h2));
    m.residual("h_squared_is_phi_h_squared", residual(&h2, &c(&p.phi_h, &p.phi_h)));
    m.residual("phi_commutes_with_a", residual(&c(phi, a), &c(a, phi)));
    m.residual("nabla_xi_skew", skew(p, nxi));
    m.residual("d_eta_is_twice_nabla_eta", residual(&p.d_eta, &p.nabla_eta.scale(2.0)));
    m.residual("d_eta_is_minus_twice_g_nabla_xi", residual(&p.d_eta, &p.g_of(nxi).scale(-2.0)));
    m
}

/// Vectors `e_i` and `e_i + e_j`, which polarise any bilinear expression.
fn polarising_family(n: usize) -> Vec<PointTensor> {
    let mut out = Vec::new();
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        out.push(PointTensor::vector(v.clone()));
        for j in i + 1..n {
            let mut w = v.clone();
            w[j] = 1.0;
            out.push(PointTensor::vector(w));
        }
    }
    out
}

pub(super) fn iphi_riem(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let rphi = r_phi(p);
    m.residual("r_phi_ricci_identity", residual(&ge(&p.nabla2_phi, "1 - (1,2)"), &rphi));
    let ip = p.riem.i_phi(&p.phi).expect("(0,4) tensor");
    m.residual("i_phi_riem_vanishes", vanishing(&ip));
    let grphi = lower_curvature(&p.g, &rphi);
    m.residual("i_phi_riem_from_r_phi", residual(&ip, &ge(&grphi, "1 + (1,3)(2,4)")));
    let tol = 1e-9;
    match ip.polarization_vanishing_test(tol) {
        Ok(v) => m.observe("i_phi_riem_polarisation_vanishes", if v { 1.0 } else { 0.0 }, Requirement::Equals(1.0)),
        Err(e) => {
            m.observe("i_phi_riem_polarisation_vanishes", 0.0, Requirement::Equals(1.0));
            m.note(e.to_string());
        }
    }
    // Q(X, Y) = g((∇²_{Y,X}φ)X, Y) against ½dη(X, Y)g(X, Y)
    let fam = polarising_family(p.dim);
    let (mut diff, mut scale): (f64, f64) = (0.0, 0.0);
    for x in &fam {
        for y in &fam {
            let v = p.nabla2_phi.eval(&[y, x, x]).expect("(1,3) tensor");
            let q = p.g.pair(&v, y);
            let rhs = 0.5 * p.d_eta.pair(x, y) * p.g.pair(x, y);
            diff = diff.max((q - rhs).abs());
            scale = scale.max(q.abs().max(rhs.abs()));
        }
    }
    m.residual("q_is_half_d_eta_times_g", diff / (1.0 + scale));
    m
}

pub(super) fn curvature_reeb(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let (a, xi, eta) = (&p.a, &p.xi, &p.eta);
    let proj = &p.id - &p.xi_eta();
    let ppp = t(&t(&proj, &proj), &proj);
    m.residual("riem_xi_on_contact_distribution", vanishing(&c(&c(&p.riem, xi), &ppp)));
    let rxi = c(&p.r, xi);
    m.residual("r_xi_is_eta_wedge_a", residual(&rxi, &wedge(eta, a)));
    m.residual("nabla2_xi_formula", residual(&p.nabla2_xi, &(&t(xi, &p.g_of(a)) - &t(a, eta))));
    m.residual("r_along_xi_formula", residual(&first(&p.r, xi), &(&t(a, eta) - &t(xi, &p.g_of(a)))));
    let rphi = r_phi(p);
    let phi_a = c(&p.phi, a);
    let a_phi = c(a, &p.phi);
    m.residual("r_phi_xi_formula", residual(&c(&rphi, xi), &-&wedge(eta, &phi_a)));
    m.residual(
        "r_phi_along_xi_formula",
        residual(&first(&rphi, xi), &-&(&t(&a_phi, eta) + &t(xi, &p.g_of(&phi_a)))),
    );
    let gn2 = p.g_of(&p.nabla2_xi);
    m.residual("killing_second_derivative", residual(&gn2, &perm(&p.g_of(&rxi), &[1, 2])));
    m.residual("killing_second_derivative_skew", residual(&gn2, &-&perm(&gn2, &[1, 3])));
    m.residual("ricci_identity_xi", residual(&ge(&p.nabla2_xi, "1 - (1,2)"), &rxi));
    m.residual("d_eta_closed", vanishing(&p.dd_eta));
    m
}

pub(super) fn second_order_phi(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let (phi, h, a, xi, eta, nxi, nphi) = (&p.phi, &p.h, &p.a, &p.xi, &p.eta, &p.nabla_xi, &p.nabla_phi);
    let n2phi_xi = first(&p.nabla2_phi, xi);
    let hn = c(h, nxi);
    m.residual("nabla2_phi_along_xi", residual(&n2phi_xi, &(&wedge(eta, &hn) - &t(xi, &p.g_of(&hn)))));
    let b = c(nxi, &(&p.id - &c(nxi, phi)));
    m.residual("nabla2_phi_along_xi_alternative", residual(&n2phi_xi, &(&t(xi, &p.g_of(&b)) - &wedge(eta, &b))));
    m.residual("nabla_xi_id_minus_nabla_xi_phi", residual(&b, &-&hn));

    let h2 = c(h, h);
    let h_id_plus_h = c(h, &(&p.id + h));
    let h_id_minus_h = c(h, &(&p.id - h));
    let (nphi_h, h_nphi) = (c(nphi, h), c(h, nphi));
    let tail = t(xi, &p.g_of(&h_id_minus_h));
    m.residual(
        "anticommutator_nabla_phi_h",
        residual(
            &(&nphi_h + &h_nphi),
            &(&(&t(eta, &h2).scale(2.0) - &t(&h_id_plus_h, eta)) + &tail),
        ),
    );
    m.residual(
        "commutator_nabla_phi_h",
        residual(&(&nphi_h - &h_nphi), &(&t(&h_id_plus_h, eta) + &tail)),
    );
    let half_sum = (&(&nphi_h + &h_nphi) + &(&nphi_h - &h_nphi)).scale(0.5);
    m.residual("half_anticommutator_plus_commutator", residual(&half_sum, &c(nphi, h)));
    m.residual(
        "anticommutator_nabla_phi_phi",
        residual(&(&c(nphi, phi) + &c(phi, nphi)), &(&t(nxi, eta) - &t(xi, &p.g_of(nxi)))),
    );
    let lhs = &(&c(nphi, nxi) + &c(phi, &p.nabla2_xi)) + &(&c(&p.nabla2_xi, phi) + &c(nxi, nphi));
    let rhs = (&t(xi, &p.g_of(nxi)) - &t(nxi, eta)).scale(2.0);
    m.residual("derivative_of_phi_nabla_xi_anticommutator", residual(&lhs, &rhs));
    m.residual("phi_nabla2_xi", residual(&c(phi, &p.nabla2_xi), &-&t(&c(phi, a), eta)));
    m.residual("nabla2_xi_phi", residual(&c(&p.nabla2_xi, phi), &t(xi, &p.g_of(&c(a, phi)))));

    let base = &t(nxi, &p.g) - &t(&p.nabla_eta, &p.id);
    m.residual("nabla2_phi_symmetric_part", residual(&ge(&p.nabla2_phi, "1 + (2,3)"), &ge(&base, "1 + (2,3)")));
    let sym = ge(&base, "1 + (2,3)");
    let rebuilt = &ge(&r_phi(p), "1 + (1,2,3) - (1,3,2)") + &ge(&sym, "1 - (1,2,3) + (1,3,2)");
    m.residual("nabla2_phi_from_curvature", residual(&p.nabla2_phi.scale(2.0), &rebuilt));
    m
}

pub(super) fn mainish(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let (h, xi, eta) = (&p.h, &p.xi, &p.eta);
    let rhs = &(&(&t(xi, &p.g) - &t(&p.id, eta)) + &(&t(eta, h) - &t(h, eta))) - &t(xi, &p.g_of(h));
    m.residual("nabla_phi_formula", residual(&p.nabla_phi, &rhs));
    let on_xi = &(&p.xi_eta() - &p.id) - h;
    m.residual("nabla_phi_on_xi", residual(&c(&p.nabla_phi, xi), &on_xi));
    m
}

const VACUOUS_TOL: f64 = 1e-8;
const IMAGE_COUNT: &str = "image_of_h_dimension";
const KERNEL_COUNT: &str = "kernel_of_a_plus_id_dimension";

pub(super) fn image_kernel(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let n = p.dim;
    let (h, eta, xi) = (&p.h, &p.eta, &p.xi);

    // Y = hZ over a basis of Z, i.e. the columns of h
    let image_rank = if h.max_abs() > VACUOUS_TOL { linalg::rank(h.components(), n, n, 1e-9) } else { 0 };
    m.observe(IMAGE_COUNT, image_rank as f64, Requirement::Record);
    if h.max_abs() > VACUOUS_TOL {
        for k in 0..n {
            let mut e = vec![0.0; n];
            e[k] = 1.0;
            let y = h.apply_to(&PointTensor::vector(e));
            let lhs = c(&p.nabla_phi, &y);
            let rhs = &t(&h.apply_to(&y), eta) + &t(xi, &p.g_of(&(&y - &h.apply_to(&y))));
            m.residual("nabla_phi_on_image_of_h", residual(&lhs, &rhs));
        }
    }

    let shifted = &p.a + &p.id;
    let (vals, vecs) = match linalg::g_symmetric_eigen(p.g.components(), p.a.components(), n) {
        Ok(e) => e,
        Err(e) => {
            m.note(format!("eigen-decomposition failed: {e}"));
            return m;
        }
    };
    let column = |j: usize| PointTensor::vector((0..n).map(|k| vecs[k * n + j]).collect());
    let mut count = 0;
    for (j, &l) in vals.iter().enumerate() {
        if (l + 1.0).abs() < 1e-6 {
            count += 1;
            let y = column(j);
            m.residual("kernel_vector_check", vanishing(&shifted.apply_to(&y)));
            let lhs = c(&p.nabla_phi, &y);
            m.residual("nabla_phi_on_kernel_of_a_plus_id", residual(&lhs, &t(xi, &p.g_of(&y))));
        }
    }
    m.observe(KERNEL_COUNT, count as f64, Requirement::Record);

    // a fixed generic Y split into g-orthonormal eigencomponents
    let y: Vec<f64> = (0..n).map(|k| 1.0 + 0.37 * k as f64 - 0.11 * (k * k) as f64).collect();
    let gy = linalg::mat_vec(p.g.components(), &y, n);
    let mut assembled = PointTensor::zeros(1, 1, n);
    for j in 0..n {
        let v = column(j);
        let coef: f64 = v.components().iter().zip(&gy).map(|(a, b)| a * b).sum();
        assembled = &assembled + &c(&p.nabla_phi, &v).scale(coef);
    }
    let ey: f64 = p.eta.components().iter().zip(&y).map(|(a, b)| a * b).sum();
    let y = PointTensor::vector(y);
    let rhs = &(&(&(&t(xi, &p.g_of(&y)) - &p.id.scale(ey)) + &t(&h.apply_to(&y), eta))
        - &h.scale(ey))
        - &t(xi, &p.g_of(&h.apply_to(&y)));
    m.residual("nabla_phi_reassembled_from_eigencomponents", residual(&assembled, &rhs));
    m
}

pub(super) fn image_kernel_notes(b: &mut ReportBuilder) {
    let report = b.clone().finish();
    if report.observation(IMAGE_COUNT) == Some(0.0) {
        b.note("image of h is trivial: image case vacuous");
    }
    if report.observation(KERNEL_COUNT) == Some(0.0) {
        b.note("ker((∇ξ)² + id) is trivial: kernel case vacuous");
    }
}
