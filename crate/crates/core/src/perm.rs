//! Permutations of tensor arguments and the real group algebra ℝΣ_q.
//!
//! A permutation σ acts on a covariant tensor from the right:
//! `(T∘σ)(X_1,…,X_q) = T(X_{σ⁻¹(1)},…,X_{σ⁻¹(q)})`. Products in the group
//! algebra are compositions, `(στ)(i) = σ(τ(i))`, which makes
//! `T∘(στ) = (T∘σ)∘τ`.
//!
//! Cycle notation in the public API is 1-based, as in `(1,2,3)`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PermError {
    #[error("not a permutation of 0..{0}: {1:?}")]
    NotBijective(usize, Vec<usize>),
    #[error("cycle entry {entry} out of range 1..={arity}")]
    OutOfRange { entry: usize, arity: usize },
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("cannot parse group algebra expression {0:?}: {1}")]
    Parse(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(arity: usize) -> Self {
        Self {
            images: (0..arity).collect(),
        }
    }

    /// From 0-based images: `images[i] = σ(i)`.
    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(PermError::NotBijective(n, images));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    /// From 1-based disjoint or overlapping cycles; overlapping cycles are
    /// composed right to left, so `[[1,3],[2,4]]` is `(1,3)∘(2,4)`.
    pub fn from_cycles(arity: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut acc = Self::identity(arity);
        for cycle in cycles {
            let mut images: Vec<usize> = (0..arity).collect();
            for (k, &entry) in cycle.iter().enumerate() {
                if entry == 0 || entry > arity {
                    return Err(PermError::OutOfRange { entry, arity });
                }
                let next = cycle[(k + 1) % cycle.len()];
                images[entry - 1] = next - 1;
            }
            acc = acc.compose(&Self::from_images(images)?);
        }
        Ok(acc)
    }

    /// Shorthand for a single 1-based cycle. Panics on malformed input;
    /// meant for literals.
    pub fn cycle(arity: usize, entries: &[usize]) -> Self {
        Self::from_cycles(arity, &[entries]).expect("valid cycle literal")
    }

    pub fn arity(&self) -> usize {
        self.images.len()
    }

    /// 0-based image of `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.arity()];
        for (i, &j) in self.images.iter().enumerate() {
            inv[j] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.arity(), other.arity(), "permutation arity mismatch");
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn sign(&self) -> f64 {
        let mut seen = vec![false; self.arity()];
        let mut sign = 1.0;
        for start in 0..self.arity() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                i = self.images[i];
                len += 1;
            }
            if len % 2 == 0 {
                sign = -sign;
            }
        }
        sign
    }

    /// The inclusion Σ_q → Σ_{q+1} that fixes the first slot and shifts the
    /// rest: `s(σ)(1) = 1`, `s(σ)(i) = σ(i−1)+1`.
    pub fn shift_include(&self) -> Self {
        let mut images = Vec::with_capacity(self.arity() + 1);
        images.push(0);
        images.extend(self.images.iter().map(|&i| i + 1));
        Self { images }
    }

    /// All permutations of the given arity in lexicographic order of images.
    pub fn all(arity: usize) -> Vec<Self> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (0..arity).collect();
        loop {
            out.push(Self { images: cur.clone() });
            // next lexicographic permutation
            let Some(i) = (0..arity.saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
                break;
            };
            let j = (i + 1..arity).rev().find(|&j| cur[j] > cur[i]).unwrap();
            cur.swap(i, j);
            cur[i + 1..].reverse();
        }
        out
    }

    fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.arity()];
        let mut out = Vec::new();
        for start in 0..self.arity() {
            if seen[start] || self.images[start] == start {
                continue;
            }
            let mut c = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                c.push(i + 1);
                i = self.images[i];
            }
            out.push(c);
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "1");
        }
        for c in cycles {
            let parts: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            write!(f, "({})", parts.join(","))?;
        }
        Ok(())
    }
}

/// A formal real combination of permutations of a fixed arity.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupAlgebraElement {
    arity: usize,
    terms: BTreeMap<Permutation, f64>,
}

impl GroupAlgebraElement {
    pub fn zero(arity: usize) -> Self {
        Self {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(arity: usize) -> Self {
        Self::from_perm(Permutation::identity(arity))
    }

    pub fn from_perm(p: Permutation) -> Self {
        let arity = p.arity();
        let mut terms = BTreeMap::new();
        terms.insert(p, 1.0);
        Self { arity, terms }
    }

    pub fn from_terms(
        arity: usize,
        terms: impl IntoIterator<Item = (f64, Permutation)>,
    ) -> Result<Self, PermError> {
        let mut out = Self::zero(arity);
        for (c, p) in terms {
            if p.arity() != arity {
                return Err(PermError::ArityMismatch(arity, p.arity()));
            }
            *out.terms.entry(p).or_insert(0.0) += c;
        }
        out.normalize();
        Ok(out)
    }

    /// Parses expressions like `"1 + (1,2,3) - 2*(1,3)(2,4)"`. `1` or `id`
    /// denotes the identity; juxtaposed cycles compose right to left.
    pub fn parse(arity: usize, expr: &str) -> Result<Self, PermError> {
        let err = |msg: &str| PermError::Parse(expr.to_string(), msg.to_string());
        let mut terms = Vec::new();
        let mut rest = expr.trim();
        let mut sign = 1.0;
        if rest.is_empty() {
            return Err(err("empty expression"));
        }
        loop {
            rest = rest.trim_start();
            if let Some(r) = rest.strip_prefix('-') {
                sign = -sign;
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix('+') {
                rest = r.trim_start();
            }
            // find end of this term: next top-level + or -
            let mut depth = 0;
            let mut end = rest.len();
            for (i, ch) in rest.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth -= 1,
                    '+' | '-' if depth == 0 && i > 0 => {
                        end = i;
                        break;
                    }
                    _ => {}
                }
            }
            let term = rest[..end].trim();
            rest = &rest[end..];
            let (coef, body) = match term.split_once('*') {
                Some((c, b)) => (
                    c.trim().parse::<f64>().map_err(|_| err("bad coefficient"))?,
                    b.trim(),
                ),
                None => (1.0, term),
            };
            let perm = if body == "1" || body == "id" {
                Permutation::identity(arity)
            } else if body.starts_with('(') {
                let mut acc = Permutation::identity(arity);
                for chunk in body.split(')').map(str::trim).filter(|s| !s.is_empty()) {
                    let inner = chunk.strip_prefix('(').ok_or_else(|| err("expected '('"))?;
                    let entries: Result<Vec<usize>, _> =
                        inner.split(',').map(|s| s.trim().parse::<usize>()).collect();
                    let entries = entries.map_err(|_| err("bad cycle entry"))?;
                    acc = acc.compose(&Permutation::from_cycles(arity, &[&entries])?);
                }
                acc
            } else if let Ok(c) = body.parse::<f64>() {
                terms.push((sign * coef * c, Permutation::identity(arity)));
                sign = 1.0;
                if rest.is_empty() {
                    break;
                }
                continue;
            } else {
                return Err(err("unrecognized term"));
            };
            terms.push((sign * coef, perm));
            sign = 1.0;
            if rest.is_empty() {
                break;
            }
        }
        Self::from_terms(arity, terms)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, f64)> {
        self.terms.iter().map(|(p, &c)| (p, c))
    }

    pub fn coefficient(&self, p: &Permutation) -> f64 {
        self.terms.get(p).copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalize(&mut self) {
        self.terms.retain(|_, c| *c != 0.0);
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "group algebra arity mismatch");
        let mut out = self.clone();
        for (p, c) in &other.terms {
            *out.terms.entry(p.clone()).or_insert(0.0) += c;
        }
        out.normalize();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.normalize();
        out
    }

    /// Product in ℝΣ_q, bilinear extension of composition.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity, "group algebra arity mismatch");
        let mut out = Self::zero(self.arity);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                *out.terms.entry(a.compose(b)).or_insert(0.0) += ca * cb;
            }
        }
        out.normalize();
        out
    }

    /// Image under the inclusion `s` applied termwise.
    pub fn shift_include(&self) -> Self {
        Self {
            arity: self.arity + 1,
            terms: self
                .terms
                .iter()
                .map(|(p, &c)| (p.shift_include(), c))
                .collect(),
        }
    }
}

impl fmt::Display for GroupAlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (p, &c) in &self.terms {
            let sign = if c < 0.0 { "-" } else { "+" };
            if first {
                if c < 0.0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            if a == 1.0 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{a}*{p}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cycle_images() {
        let c = Permutation::cycle(3, &[1, 2, 3]);
        assert_eq!(c.images(), &[1, 2, 0]);
        assert_eq!(c.to_string(), "(1,2,3)");
        assert_eq!(c.inverse().to_string(), "(1,3,2)");
        assert_eq!(c.sign(), 1.0);
        assert_eq!(Permutation::cycle(3, &[1, 2]).sign(), -1.0);
    }

    #[test]
    fn composition_applies_right_factor_first() {
        // (1,3)(1,2) = (1,2,3)
        let a = Permutation::cycle(3, &[1, 3]);
        let b = Permutation::cycle(3, &[1, 2]);
        assert_eq!(a.compose(&b), Permutation::cycle(3, &[1, 2, 3]));
    }

    #[test]
    fn shift_inclusion_fixes_first_slot() {
        let s = Permutation::cycle(2, &[1, 2]).shift_include();
        assert_eq!(s, Permutation::cycle(3, &[2, 3]));
    }

    #[test]
    fn all_enumerates_factorial_many() {
        assert_eq!(Permutation::all(4).len(), 24);
        assert_eq!(Permutation::all(1).len(), 1);
        let mut v = Permutation::all(3);
        v.dedup();
        assert_eq!(v.len(), 6);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Permutation::from_images(vec![0, 0]).is_err());
        assert!(Permutation::from_cycles(3, &[&[1, 4]]).is_err());
    }

    #[test]
    fn parse_and_display() {
        let a = GroupAlgebraElement::parse(3, "1 + (1,2,3) - (1,3,2)").unwrap();
        assert_eq!(a.coefficient(&Permutation::identity(3)), 1.0);
        assert_eq!(a.coefficient(&Permutation::cycle(3, &[1, 3, 2])), -1.0);
        let b = GroupAlgebraElement::parse(4, "1 - (1,3)(2,4)").unwrap();
        let pair = Permutation::from_cycles(4, &[&[1, 3], &[2, 4]]).unwrap();
        assert_eq!(b.coefficient(&pair), -1.0);
        let c = GroupAlgebraElement::parse(3, "2*(1,2) - 0.5*1").unwrap();
        assert_eq!(c.coefficient(&Permutation::cycle(3, &[1, 2])), 2.0);
        assert_eq!(c.coefficient(&Permutation::identity(3)), -0.5);
        assert!(GroupAlgebraElement::parse(3, "(1,5)").is_err());
        assert!(GroupAlgebraElement::parse(3, "foo").is_err());
    }

    #[test]
    fn zero_terms_are_dropped() {
        let a = GroupAlgebraElement::parse(2, "1 + (1,2)").unwrap();
        let b = GroupAlgebraElement::parse(2, "1 - (1,2)").unwrap();
        // (1+(1,2))(1-(1,2)) = 1 - (1,2) + (1,2) - 1 = 0
        assert!(a.mul(&b).is_zero());
    }

    #[test]
    fn expression_of_two_holds_formally() {
        let lhs = GroupAlgebraElement::identity(3).scale(2.0);
        let p = |s| GroupAlgebraElement::parse(3, s).unwrap();
        let rhs = p("1 - (1,2)")
            .mul(&p("1 + (1,2,3) - (1,3,2)"))
            .add(&p("1 + (2,3)").mul(&p("1 - (1,2,3) + (1,3,2)")));
        assert_eq!(lhs, rhs);
    }
}
