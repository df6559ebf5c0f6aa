//! Differential-form identities and the Lefschetz map `β ↦ ω∧β` on `Λ²`.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg;
use crate::report::{ReportBuilder, Requirement};
use crate::tensor::{residual, vanishing, PointTensor};
use crate::zoo::AcmsPoint;

use super::{Measurements, VerifyError};

/// `(η∧ωⁿ)(e_0, …, e_{2n})` for a covector `eta` and an antisymmetric
/// `omega` given in the same basis of a `(2n+1)`-dimensional space, with the
/// unnormalised shuffle convention for the wedge product.
pub fn top_wedge_value(eta: &[f64], omega: &[f64], dim: usize) -> f64 {
    let all: u32 = (1u32 << dim) - 1;
    let mut memo = HashMap::new();
    (0..dim)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            sign * eta[i] * omega_power(omega, dim, all & !(1 << i), &mut memo)
        })
        .sum()
}

/// `ω^r` evaluated on the basis vectors in `mask`, in increasing order.
fn omega_power(omega: &[f64], dim: usize, mask: u32, memo: &mut HashMap<u32, f64>) -> f64 {
    if mask == 0 {
        return 1.0;
    }
    if let Some(&v) = memo.get(&mask) {
        return v;
    }
    let idx: Vec<usize> = (0..dim).filter(|&k| mask & (1 << k) != 0).collect();
    let mut total = 0.0;
    for i in 0..idx.len() {
        for j in i + 1..idx.len() {
            let w = omega[idx[i] * dim + idx[j]];
            if w == 0.0 {
                continue;
            }
            let sign = if (i + j - 1) % 2 == 0 { 1.0 } else { -1.0 };
            let rest = mask & !(1 << idx[i]) & !(1 << idx[j]);
            total += sign * w * omega_power(omega, dim, rest, memo);
        }
    }
    memo.insert(mask, total);
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

fn inversion_sign(seq: &[usize]) -> f64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_symplectic(omega: &[f64], dim: usize) -> Result<(), VerifyError> {
    if dim % 2 != 0 || omega.len() != dim * dim {
        return Err(VerifyError::Shape(dim));
    }
    let scale = omega.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    for i in 0..dim {
        for j in 0..dim {
            if (omega[i * dim + j] + omega[j * dim + i]).abs() > 1e-12 * (1.0 + scale) {
                return Err(VerifyError::Shape(dim));
            }
        }
    }
    let sv = linalg::singular_values(omega, dim, dim);
    let (top, bottom) = (sv[0], sv[dim - 1]);
    if top == 0.0 || bottom < 1e-8 * top {
        return Err(VerifyError::DegenerateForm(bottom));
    }
    Ok(())
}

/// Matrix of `β ↦ ω∧β` from `Λ²` to `Λ⁴` in the bases `e^i∧e^j` (`i < j`)
/// and components at increasing 4-tuples, both in lexicographic order.
/// Returns `(rows, cols, entries)` in row-major order.
pub fn lefschetz_matrix(omega: &[f64], dim: usize) -> Result<(usize, usize, Vec<f64>), VerifyError> {
    check_symplectic(omega, dim)?;
    let pairs = subsets(dim, 2);
    let quads = subsets(dim, 4);
    let mut m = vec![0.0; quads.len() * pairs.len()];
    for (r, q) in quads.iter().enumerate() {
        for (c, pr) in pairs.iter().enumerate() {
            if !(q.contains(&pr[0]) && q.contains(&pr[1])) {
                continue;
            }
            let rest: Vec<usize> = q.iter().copied().filter(|k| !pr.contains(k)).collect();
            let seq = [rest[0], rest[1], pr[0], pr[1]];
            m[r * pairs.len() + c] = inversion_sign(&seq) * omega[rest[0] * dim + rest[1]];
        }
    }
    Ok((quads.len(), pairs.len(), m))
}

const RANK_TOL: f64 = 1e-9;

pub fn lefschetz_kernel_dim(omega: &[f64], dim: usize) -> Result<usize, VerifyError> {
    let (rows, cols, m) = lefschetz_matrix(omega, dim)?;
    Ok(cols - linalg::rank(&m, rows, cols, RANK_TOL))
}

fn random_symplectic(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut w = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let v: f64 = rng.gen_range(-1.0..=1.0);
                w[i * dim + j] = v;
                w[j * dim + i] = -v;
            }
        }
        let sv = linalg::singular_values(&w, dim, dim);
        if sv[dim - 1] > 1e-2 * sv[0] {
            return w;
        }
    }
}

fn standard_symplectic(dim: usize) -> Vec<f64> {
    let mut w = vec![0.0; dim * dim];
    for k in 0..dim / 2 {
        w[2 * k * dim + 2 * k + 1] = 1.0;
        w[(2 * k + 1) * dim + 2 * k] = -1.0;
    }
    w
}

pub(super) fn lefschetz(b: &mut ReportBuilder, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (dim, expected, rand_name, std_name) in [
        (4, 5.0, "kernel_dim_random_2m_4", "kernel_dim_standard_2m_4"),
        (6, 0.0, "kernel_dim_random_2m_6", "kernel_dim_standard_2m_6"),
        (8, 0.0, "kernel_dim_random_2m_8", "kernel_dim_standard_2m_8"),
    ] {
        for _ in 0..4 {
            let w = random_symplectic(&mut rng, dim);
            match lefschetz_kernel_dim(&w, dim) {
                Ok(k) => b.observe(rand_name, k as f64, Requirement::Equals(expected)),
                Err(e) => b.note(format!("2m = {dim}: {e}")),
            }
        }
        match lefschetz_kernel_dim(&standard_symplectic(dim), dim) {
            Ok(k) => b.observe(std_name, k as f64, Requirement::Equals(expected)),
            Err(e) => b.note(format!("2m = {dim}: {e}")),
        }
    }
}

pub(super) fn strange(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let w = |a: &PointTensor, b: &PointTensor| a.wedge(b).expect("forms");
    m.residual("big_phi_alternating", p.big_phi.alternation_residual());
    m.residual("psi_alternating", p.psi.alternation_residual());
    let eta_psi = w(&p.eta, &p.psi);
    m.residual("d_big_phi_is_three_eta_wedge_psi", residual(&p.d_big_phi, &eta_psi.scale(3.0)));
    m.residual("eta_wedge_d_psi", vanishing(&w(&p.eta, &p.d_psi)));
    m.residual("d_eta_wedge_psi", vanishing(&w(&p.d_eta, &p.psi)));
    m.residual("dd_big_phi", vanishing(&p.dd_big_phi));
    let leibniz = (&w(&p.d_eta, &p.psi) - &w(&p.eta, &p.d_psi)).scale(3.0);
    m.residual("dd_big_phi_by_leibniz", residual(&p.dd_big_phi, &leibniz));
    m
}

/// `g`-orthonormal basis of `ker η`.
fn contact_basis(p: &AcmsPoint) -> Vec<Vec<f64>> {
    let n = p.dim;
    let g = p.g.components();
    let dot = |u: &[f64], v: &[f64]| -> f64 {
        let gv = linalg::mat_vec(g, v, n);
        u.iter().zip(&gv).map(|(a, b)| a * b).sum()
    };
    let xi = p.xi.components();
    let eta = p.eta.components();
    let mut out: Vec<Vec<f64>> = Vec::new();
    for i in 0..n {
        let mut v: Vec<f64> = (0..n).map(|k| if k == i { 1.0 } else { 0.0 } - xi[k] * eta[i]).collect();
        for u in &out {
            let d = dot(&v, u);
            v.iter_mut().zip(u).for_each(|(a, b)| *a -= d * b);
        }
        let nv = dot(&v, &v).sqrt();
        if nv > 1e-6 && out.len() < n - 1 {
            out.push(v.iter().map(|c| c / nv).collect());
        }
    }
    out
}

fn restrict(t: &PointTensor, basis: &[Vec<f64>]) -> Vec<f64> {
    let n = t.dim();
    let c = t.components();
    let mut out = Vec::with_capacity(basis.len() * basis.len());
    for u in basis {
        for v in basis {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += u[i] * c[i * n + j] * v[j];
                }
            }
            out.push(s);
        }
    }
    out
}

pub(super) fn main_theorem(p: &AcmsPoint) -> Measurements {
    let mut m = Measurements::default();
    let basis = contact_basis(p);
    let k = basis.len();
    let omega = restrict(&p.d_eta, &basis);
    let beta = restrict(&p.psi, &basis);
    m.observe("d_eta_rank_on_contact_distribution", linalg::rank(&omega, k, k, 1e-6) as f64, Requirement::Equals(k as f64));
    let (rows, cols, l) = match lefschetz_matrix(&omega, k) {
        Ok(x) => x,
        Err(e) => {
            m.note(format!("dη restricted to ker η: {e}"));
            m.observe("lefschetz_kernel_dim", f64::NAN, Requirement::Equals(0.0));
            return m;
        }
    };
    let kernel = cols - linalg::rank(&l, rows, cols, RANK_TOL);
    let beta_vec: Vec<f64> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).map(|(i, j)| beta[i * k + j]).collect();
    let l_beta: Vec<f64> = (0..rows).map(|r| (0..cols).map(|c| l[r * cols + c] * beta_vec[c]).sum()).collect();
    let l_beta_max = l_beta.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    m.residual("d_eta_wedge_psi_on_contact_distribution", l_beta_max / (1.0 + l_beta_max));
    let psi_norm = p.psi.max_abs();
    if p.dim >= 7 {
        m.observe("lefschetz_kernel_dim", kernel as f64, Requirement::Equals(0.0));
        let sv = linalg::singular_values(&l, rows, cols);
        let sigma_min = sv[cols - 1];
        let l_beta_norm = l_beta.iter().map(|v| v * v).sum::<f64>().sqrt();
        let beta_norm = beta_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
        let bound = l_beta_norm / sigma_min;
        m.residual("psi_bound_from_injectivity", bound);
        let holds = beta_norm <= bound * (1.0 + 1e-9) + 1e-300;
        m.observe("injectivity_bound_holds", if holds { 1.0 } else { 0.0 }, Requirement::Equals(1.0));
        m.residual("psi_reeb_contraction", vanishing(&p.psi.insert_first(&p.xi).expect("vector")));
        m.residual("psi_vanishes", vanishing(&p.psi));
        m.residual("h_vanishes", vanishing(&p.h));
        m.residual("sasakian_defect", vanishing(&p.sasakian_defect()));
    } else {
        let expected = if k == 4 { 5.0 } else { 0.0 };
        m.observe("lefschetz_kernel_dim", kernel as f64, Requirement::Equals(expected));
        m.observe("psi_norm", psi_norm, Requirement::Record);
    }
    m
}
