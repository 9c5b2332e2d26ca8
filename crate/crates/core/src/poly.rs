//! Sparse multivariate polynomials with integer coefficients.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::arith::AlgNum;
use crate::error::Result;

/// Exponent vector, one entry per variable.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomPoly {
    nvars: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl HomPoly {
    pub fn zero(nvars: usize) -> Self {
        HomPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = HomPoly::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        HomPoly::monomial(e, BigInt::one())
    }

    pub fn monomial(exps: Monomial, c: BigInt) -> Self {
        let mut p = HomPoly::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = HomPoly::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exps: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exps) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Total degree if homogeneous, `None` otherwise (or for the zero polynomial).
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn max_abs_coeff(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero)
    }

    pub fn l1_norm(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).sum()
    }

    pub fn coeff(&self, exps: &[u32]) -> BigInt {
        self.terms.get(exps).cloned().unwrap_or_else(BigInt::zero)
    }

    /// For a binary form of degree `r`: the coefficient of `x^k y^(r-k)`.
    pub fn binary_coeff(&self, k: u32, r: u32) -> BigInt {
        debug_assert_eq!(self.nvars, 2);
        self.coeff(&[k, r - k])
    }

    pub fn add(&self, other: &HomPoly) -> HomPoly {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> HomPoly {
        HomPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &BigInt) -> HomPoly {
        let mut out = HomPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c * k);
        }
        out
    }

    pub fn mul(&self, other: &HomPoly) -> HomPoly {
        let mut out = HomPoly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Monomial = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> HomPoly {
        let mut acc = HomPoly::constant(self.nvars, BigInt::one());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Substitutes `subs[i]` for variable `i`. All substitutes must share one variable count.
    pub fn compose(&self, subs: &[HomPoly]) -> HomPoly {
        assert_eq!(subs.len(), self.nvars);
        let nv = subs[0].nvars;
        let mut cache: Vec<Vec<HomPoly>> = subs
            .iter()
            .map(|s| vec![HomPoly::constant(nv, BigInt::one()), s.clone()])
            .collect();
        let mut out = HomPoly::zero(nv);
        for (e, c) in &self.terms {
            let mut term = HomPoly::constant(nv, c.clone());
            for (i, &k) in e.iter().enumerate() {
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().unwrap().mul(&subs[i]);
                    cache[i].push(next);
                }
                term = term.mul(&cache[i][k as usize]);
            }
            out = out.add(&term);
        }
        out
    }

    pub fn eval_int(&self, x: &[BigInt]) -> BigInt {
        let maxdeg = self
            .terms
            .keys()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0);
        let powers: Vec<Vec<BigInt>> = x
            .iter()
            .map(|xi| {
                let mut v = Vec::with_capacity(maxdeg as usize + 1);
                v.push(BigInt::one());
                for k in 1..=maxdeg as usize {
                    let next = &v[k - 1] * xi;
                    v.push(next);
                }
                v
            })
            .collect();
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= &powers[i][k as usize];
                }
            }
            acc += t;
        }
        acc
    }

    pub fn eval_alg(&self, x: &[AlgNum]) -> Result<AlgNum> {
        let maxdeg = self
            .terms
            .keys()
            .flat_map(|e| e.iter().copied())
            .max()
            .unwrap_or(0);
        let mut powers: Vec<Vec<AlgNum>> = Vec::with_capacity(x.len());
        for xi in x {
            let mut v = vec![AlgNum::one()];
            for k in 1..=maxdeg as usize {
                let next = v[k - 1].try_mul(xi)?;
                v.push(next);
            }
            powers.push(v);
        }
        let mut acc = AlgNum::zero();
        for (e, c) in &self.terms {
            let mut t = AlgNum::from(c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.try_mul(&powers[i][k as usize])?;
                }
            }
            acc = acc.try_add(&t)?;
        }
        Ok(acc)
    }

    pub fn display_with<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

/// Standard variable names for a block with `nvars` variables.
pub fn default_var_names(nvars: usize) -> Vec<String> {
    const SHORT: [&str; 4] = ["x", "y", "z", "w"];
    if nvars <= SHORT.len() {
        SHORT[..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (0..nvars).map(|i| format!("x{}", i)).collect()
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a HomPoly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        // highest monomials first in lexicographic order
        for (idx, (e, c)) in self.poly.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            let vars: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| {
                    if k == 1 {
                        self.names[i].clone()
                    } else {
                        format!("{}^{}", self.names[i], k)
                    }
                })
                .collect();
            if vars.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn xy(terms: &[((u32, u32), i64)]) -> HomPoly {
        HomPoly::from_terms(
            2,
            terms
                .iter()
                .map(|&((a, b), c)| (vec![a, b], BigInt::from(c))),
        )
    }

    #[test]
    fn evaluation_and_composition() {
        let f = xy(&[((2, 0), 1), ((0, 2), -1)]);
        assert_eq!(f.eval_int(&[3.into(), 2.into()]), BigInt::from(5));
        let g = xy(&[((1, 1), 1)]);
        // f(x*y, y^2) = x^2 y^2 - y^4
        let h = f.compose(&[g.clone(), xy(&[((0, 2), 1)])]);
        assert_eq!(h, xy(&[((2, 2), 1), ((0, 4), -1)]));
        assert_eq!(h.homogeneous_degree(), Some(4));
    }

    #[test]
    fn display_is_readable() {
        let f = xy(&[((2, 0), 1), ((1, 1), -3), ((0, 2), 7)]);
        let names = default_var_names(2);
        assert_eq!(f.display_with(&names).to_string(), "x^2 - 3*x*y + 7*y^2");
    }
}
