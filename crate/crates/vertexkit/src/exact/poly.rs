//! Multivariate polynomials over the rationals in the fixed symbol set
//! `{del, lambda, mu, alpha}`.
//!
//! `del` stands for the translation generator and is the only symbol with
//! module semantics elsewhere in the crate; `lambda`, `mu` and `alpha` are
//! scalar parameters. The representation is a sparse map from exponent
//! tuples to nonzero rational coefficients, so equality is exact and
//! iteration order is deterministic.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};

use super::rational::{rat_int, Rational};

/// The fixed symbol alphabet. The discriminant doubles as the exponent slot.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum Symbol {
    Del = 0,
    Lambda = 1,
    Mu = 2,
    Alpha = 3,
}

pub const SYMBOLS: [Symbol; 4] = [Symbol::Del, Symbol::Lambda, Symbol::Mu, Symbol::Alpha];

impl Symbol {
    pub fn name(self) -> &'static str {
        match self {
            Symbol::Del => "del",
            Symbol::Lambda => "lambda",
            Symbol::Mu => "mu",
            Symbol::Alpha => "alpha",
        }
    }

    pub fn slot(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

type Expt = [u32; 4];

/// Sparse exact polynomial in `del`, `lambda`, `mu`, `alpha`.
///
/// Invariant: no stored coefficient is zero, so structural equality is
/// mathematical equality.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ParamPoly {
    terms: BTreeMap<Expt, Rational>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        ParamPoly::constant(rat_int(1))
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = ParamPoly::zero();
        if !c.is_zero() {
            p.terms.insert([0; 4], c);
        }
        p
    }

    pub fn int(n: i64) -> Self {
        ParamPoly::constant(rat_int(n))
    }

    pub fn symbol(s: Symbol) -> Self {
        ParamPoly::monomial(s, 1, rat_int(1))
    }

    /// `c * s^k`.
    pub fn monomial(s: Symbol, k: u32, c: Rational) -> Self {
        let mut e = [0u32; 4];
        e[s.slot()] = k;
        ParamPoly::from_term(e, c)
    }

    fn from_term(e: Expt, c: Rational) -> Self {
        let mut p = ParamPoly::zero();
        if !c.is_zero() {
            p.terms.insert(e, c);
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&[0; 4]).map_or(false, |c| c.is_one())
    }

    /// The constant term.
    pub fn constant_term(&self) -> Rational {
        self.terms.get(&[0; 4]).cloned().unwrap_or_else(|| rat_int(0))
    }

    /// True when the polynomial is a constant (possibly zero).
    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&k| k == 0))
    }

    /// True when the symbol occurs with a positive exponent somewhere.
    pub fn contains(&self, s: Symbol) -> bool {
        self.terms.keys().any(|e| e[s.slot()] > 0)
    }

    /// Degree in one symbol; zero for the zero polynomial.
    pub fn degree_in(&self, s: Symbol) -> u32 {
        self.terms.keys().map(|e| e[s.slot()]).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: Expt, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(|| rat_int(0));
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return ParamPoly::zero();
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= r.clone();
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = ParamPoly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.add_term(e, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = ParamPoly::one();
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Simultaneous substitution of symbols by polynomials. Symbols absent
    /// from the map are left in place.
    pub fn substitute_map(&self, map: &[(Symbol, ParamPoly)]) -> Self {
        let mut out = ParamPoly::zero();
        for (e, c) in &self.terms {
            let mut term = ParamPoly::constant(c.clone());
            for s in SYMBOLS {
                let k = e[s.slot()];
                if k == 0 {
                    continue;
                }
                let image = map
                    .iter()
                    .find(|(t, _)| *t == s)
                    .map(|(_, p)| p.clone())
                    .unwrap_or_else(|| ParamPoly::symbol(s));
                term = term.mul(&image.pow(k));
            }
            out = out.add(&term);
        }
        out
    }

    pub fn substitute(&self, s: Symbol, image: &ParamPoly) -> Self {
        self.substitute_map(&[(s, image.clone())])
    }

    /// Decompose along one symbol: returns `(power, coefficient)` pairs in
    /// ascending power order, each coefficient free of the symbol.
    pub fn decompose(&self, s: Symbol) -> Vec<(u32, ParamPoly)> {
        let mut buckets: BTreeMap<u32, ParamPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let k = e[s.slot()];
            let mut e2 = *e;
            e2[s.slot()] = 0;
            buckets
                .entry(k)
                .or_insert_with(ParamPoly::zero)
                .add_term(e2, c.clone());
        }
        buckets.retain(|_, p| !p.is_zero());
        buckets.into_iter().collect()
    }

    /// Coefficient of `s^k`, with the symbol removed.
    pub fn coeff_of(&self, s: Symbol, k: u32) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (e, c) in &self.terms {
            if e[s.slot()] == k {
                let mut e2 = *e;
                e2[s.slot()] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Leading coefficient when viewed as a univariate polynomial in `s`
    /// (the coefficient may involve the other symbols).
    pub fn leading_coeff_in(&self, s: Symbol) -> ParamPoly {
        self.coeff_of(s, self.degree_in(s))
    }

    /// Exact Euclidean division in `del` for polynomials that involve no
    /// other symbol: `self = q * d + r` with `deg r < deg d`.
    /// Returns `None` when either operand involves a parameter symbol or the
    /// divisor is zero.
    pub fn divrem_del(&self, d: &ParamPoly) -> Option<(ParamPoly, ParamPoly)> {
        for s in [Symbol::Lambda, Symbol::Mu, Symbol::Alpha] {
            if self.contains(s) || d.contains(s) {
                return None;
            }
        }
        if d.is_zero() {
            return None;
        }
        let dd = d.degree_in(Symbol::Del);
        let dlead = d.coeff_of(Symbol::Del, dd).constant_term();
        let mut r = self.clone();
        let mut q = ParamPoly::zero();
        while !r.is_zero() && r.degree_in(Symbol::Del) >= dd {
            let rd = r.degree_in(Symbol::Del);
            let rlead = r.coeff_of(Symbol::Del, rd).constant_term();
            let qc = rlead / dlead.clone();
            let qt = ParamPoly::monomial(Symbol::Del, rd - dd, qc);
            r = r.sub(&qt.mul(d));
            q = q.add(&qt);
        }
        Some((q, r))
    }

    /// All terms as `(exponents, coefficient)` in deterministic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Expt, &Rational)> {
        self.terms.iter()
    }

    /// Evaluate with every symbol at a rational point (used by tests).
    pub fn eval(&self, at: &[Rational; 4]) -> Rational {
        let mut acc = rat_int(0);
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for s in SYMBOLS {
                for _ in 0..e[s.slot()] {
                    t *= at[s.slot()].clone();
                }
            }
            acc += t;
        }
        acc
    }
}

fn fmt_monomial(e: &Expt, c: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let has_symbols = e.iter().any(|&k| k > 0);
    let abs = c.clone();
    let mut wrote_factor = false;
    if !abs.is_one() || !has_symbols {
        write!(f, "{}", abs)?;
        wrote_factor = true;
    }
    for s in SYMBOLS {
        let k = e[s.slot()];
        if k == 0 {
            continue;
        }
        if wrote_factor {
            write!(f, "*")?;
        }
        if k == 1 {
            write!(f, "{}", s.name())?;
        } else {
            write!(f, "{}^{}", s.name(), k)?;
        }
        wrote_factor = true;
    }
    Ok(())
}

impl fmt::Display for ParamPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().enumerate() {
            let neg = c < &rat_int(0);
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let abs = if neg { -c.clone() } else { c.clone() };
            fmt_monomial(e, &abs, f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::rat;

    fn del() -> ParamPoly {
        ParamPoly::symbol(Symbol::Del)
    }
    fn lam() -> ParamPoly {
        ParamPoly::symbol(Symbol::Lambda)
    }

    #[test]
    fn arithmetic_basics() {
        let p = del().add(&lam().scale(&rat_int(2)));
        let q = p.mul(&p);
        // (del + 2 lambda)^2 = del^2 + 4 del lambda + 4 lambda^2
        assert_eq!(q.coeff_of(Symbol::Del, 2), ParamPoly::one());
        assert_eq!(q.coeff_of(Symbol::Del, 1), lam().scale(&rat_int(4)));
        assert_eq!(q.coeff_of(Symbol::Del, 0), lam().pow(2).scale(&rat_int(4)));
        assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn substitution_is_simultaneous() {
        // p = del * lambda; swap the two symbols in one step
        let p = del().mul(&lam());
        let q = p.substitute_map(&[
            (Symbol::Del, lam()),
            (Symbol::Lambda, del()),
        ]);
        assert_eq!(q, p);
        // p = del^2: del -> del + lambda
        let r = del().pow(2).substitute(Symbol::Del, &del().add(&lam()));
        let expect = del()
            .pow(2)
            .add(&del().mul(&lam()).scale(&rat_int(2)))
            .add(&lam().pow(2));
        assert_eq!(r, expect);
    }

    #[test]
    fn decompose_and_reassemble() {
        let p = del()
            .pow(2)
            .mul(&lam())
            .add(&del().scale(&rat(1, 2)))
            .add(&ParamPoly::int(7));
        let parts = p.decompose(Symbol::Lambda);
        let mut back = ParamPoly::zero();
        for (k, coeff) in parts {
            back = back.add(&coeff.mul(&lam().pow(k)));
        }
        assert_eq!(back, p);
    }

    #[test]
    fn division_in_del() {
        // (del^3 + 2) / (del^2): q = del, r = 2
        let a = del().pow(3).add(&ParamPoly::int(2));
        let (q, r) = a.divrem_del(&del().pow(2)).unwrap();
        assert_eq!(q, del());
        assert_eq!(r, ParamPoly::int(2));
        // exactness check
        assert_eq!(q.mul(&del().pow(2)).add(&r), a);
        // parameters block division
        assert!(lam().divrem_del(&del()).is_none());
    }

    #[test]
    fn display_is_parseable_shape() {
        let p = del()
            .pow(2)
            .scale(&rat(-1, 2))
            .add(&lam())
            .add(&ParamPoly::int(3));
        assert_eq!(p.to_string(), "3 + lambda - 1/2*del^2");
    }
}
