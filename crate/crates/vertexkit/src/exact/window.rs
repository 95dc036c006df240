//! Truncated Laurent values in one variable `z` or two variables `z, w`,
//! with explicit truncation windows.
//!
//! Every value carries the region of exponents on which its coefficients are
//! certified complete. The region is the intersection of three interval
//! constraints, one per linear functional of the exponent lattice: the
//! `z`-exponent, the `w`-exponent and the total degree `z+w`. Rectangles
//! alone are too coarse: compositions of fields produce staircase-shaped
//! completeness regions that the total-degree functional captures exactly.
//!
//! For each functional the `low` bound is a support bound (no nonzero terms
//! below it — coefficients there are known to vanish) and the `high` bound is
//! a knowledge bound (coefficients above it may have been truncated away).
//! Sums intersect windows; products use, per functional,
//! `low = lowA + lowB` and `high = min(highA + lowB, lowA + highB)`.
//! Exact (untruncated) values carry the large `EXACT` sentinel as highs.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::poly::ParamPoly;
use super::rational::{binomial, factorial, rat_int, Rational};

/// Sentinel high bound for exact (untruncated) values.
pub const EXACT: i64 = i64::MAX / 4;

fn sat(v: i64) -> i64 {
    v.clamp(-EXACT, EXACT)
}

fn sat_add(a: i64, b: i64) -> i64 {
    sat(a.saturating_add(b))
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VarSet {
    Z,
    ZW,
}

impl VarSet {
    fn join(self, other: VarSet) -> VarSet {
        if self == VarSet::ZW || other == VarSet::ZW {
            VarSet::ZW
        } else {
            VarSet::Z
        }
    }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WindowError {
    #[error("requested coefficient at z^{z} w^{w} lies outside the certified window {window}")]
    OutOfWindow { z: i64, w: i64, window: Window },
    #[error("operation produced an empty window: {window}")]
    EmptyWindow { window: Window },
}

/// Certified-completeness region: per functional (`z`, `w`, `z+w`),
/// a support low bound and a knowledge high bound.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Window {
    pub low: [i64; 3],
    pub high: [i64; 3],
}

impl Window {
    /// Window of an exact value supported at total degrees >= `band_low`
    /// with per-variable support lows `z_low`, `w_low`.
    pub fn exact(z_low: i64, w_low: i64, band_low: i64) -> Self {
        Window { low: [z_low, w_low, band_low], high: [EXACT; 3] }
    }

    /// One-variable window `z^[low..high]`.
    pub fn one_var(low: i64, high: i64) -> Self {
        Window { low: [low, 0, low], high: [high, EXACT, EXACT] }
    }

    pub fn contains(&self, z: i64, w: i64) -> bool {
        let f = [z, w, sat_add(z, w)];
        (0..3).all(|k| self.low[k] <= f[k] && f[k] <= self.high[k])
    }

    /// Beyond the knowledge ceiling of some functional: the coefficient
    /// there is not determined by this truncation.
    pub fn above_ceiling(&self, z: i64, w: i64) -> bool {
        let f = [z, w, sat_add(z, w)];
        (0..3).any(|k| f[k] > self.high[k])
    }

    /// Below the support floor of some functional: the coefficient there is
    /// certified zero.
    pub fn below_floor(&self, z: i64, w: i64) -> bool {
        let f = [z, w, sat_add(z, w)];
        (0..3).any(|k| f[k] < self.low[k])
    }

    /// Window of a sum: completeness on the intersection; support lows
    /// combine by minimum.
    pub fn sum(&self, other: &Window) -> Window {
        let mut w = Window { low: [0; 3], high: [0; 3] };
        for k in 0..3 {
            w.low[k] = self.low[k].min(other.low[k]);
            w.high[k] = self.high[k].min(other.high[k]);
        }
        w
    }

    /// Window of a product, per functional.
    pub fn product(&self, other: &Window) -> Window {
        let mut w = Window { low: [0; 3], high: [0; 3] };
        for k in 0..3 {
            w.low[k] = sat_add(self.low[k], other.low[k]);
            w.high[k] = sat_add(self.high[k], other.low[k]).min(sat_add(self.low[k], other.high[k]));
        }
        w
    }

    pub fn shift(&self, dz: i64, dw: i64) -> Window {
        Window {
            low: [sat_add(self.low[0], dz), sat_add(self.low[1], dw), sat_add(self.low[2], dz + dw)],
            high: [
                sat_add(self.high[0], dz),
                sat_add(self.high[1], dw),
                sat_add(self.high[2], dz + dw),
            ],
        }
    }

    /// True when no lattice point satisfies all three constraints.
    pub fn is_empty(&self) -> bool {
        let [lz, lw, lb] = self.low;
        let [hz, hw, hb] = self.high;
        lz > hz || lw > hw || lb > hb || sat_add(lz, lw) > hb || lb > sat_add(hz, hw)
    }
}

fn fmt_bound(v: i64) -> String {
    if v >= EXACT {
        "inf".to_string()
    } else if v <= -EXACT {
        "-inf".to_string()
    } else {
        v.to_string()
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "z:[{}..{}] w:[{}..{}] z+w:[{}..{}]",
            fmt_bound(self.low[0]),
            fmt_bound(self.high[0]),
            fmt_bound(self.low[1]),
            fmt_bound(self.high[1]),
            fmt_bound(self.low[2]),
            fmt_bound(self.high[2]),
        )
    }
}

/// Coefficient contract for windowed Laurent values.
pub trait Coeff: Clone + PartialEq + fmt::Debug {
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, r: &Rational) -> Self;
}

impl Coeff for ParamPoly {
    fn is_zero(&self) -> bool {
        ParamPoly::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        ParamPoly::add(self, other)
    }
    fn neg(&self) -> Self {
        ParamPoly::neg(self)
    }
    fn scale(&self, r: &Rational) -> Self {
        ParamPoly::scale(self, r)
    }
}

/// A truncated Laurent value: finitely many stored coefficients plus the
/// window on which they are certified complete.
#[derive(Clone, PartialEq, Debug)]
pub struct LaurentWindow<C: Coeff> {
    pub vars: VarSet,
    pub window: Window,
    terms: BTreeMap<(i64, i64), C>,
}

impl<C: Coeff> LaurentWindow<C> {
    pub fn zero(vars: VarSet, window: Window) -> Self {
        LaurentWindow { vars, window, terms: BTreeMap::new() }
    }

    pub fn from_terms(
        vars: VarSet,
        window: Window,
        terms: impl IntoIterator<Item = ((i64, i64), C)>,
    ) -> Self {
        let mut v = LaurentWindow::zero(vars, window);
        for ((i, j), c) in terms {
            v.add_term(i, j, c);
        }
        v.normalize();
        v
    }

    /// Single-variable value from `(z-exponent, coefficient)` pairs.
    pub fn one_var(window: Window, terms: impl IntoIterator<Item = (i64, C)>) -> Self {
        LaurentWindow::from_terms(VarSet::Z, window, terms.into_iter().map(|(i, c)| ((i, 0), c)))
    }

    pub fn add_term(&mut self, i: i64, j: i64, c: C) {
        if c.is_zero() || self.window.above_ceiling(i, j) {
            return;
        }
        // a nonzero term below the support floor means the floor was wrong
        debug_assert!(
            !self.window.below_floor(i, j),
            "nonzero coefficient at ({}, {}) below support floor of {}",
            i,
            j,
            self.window
        );
        let slot = self.terms.entry((i, j)).or_insert_with(|| c.scale(&rat_int(0)));
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    /// Drop coefficients that fell outside the window or became zero.
    pub fn normalize(&mut self) {
        let w = self.window;
        self.terms.retain(|&(i, j), c| w.contains(i, j) && !c.is_zero());
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(i64, i64), &C)> {
        self.terms.iter()
    }

    pub fn add(&self, other: &Self) -> Result<Self, WindowError> {
        let window = self.window.sum(&other.window);
        if window.is_empty() {
            return Err(WindowError::EmptyWindow { window });
        }
        let mut out = LaurentWindow::zero(self.vars.join(other.vars), window);
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, c.clone());
        }
        for (&(i, j), c) in &other.terms {
            out.add_term(i, j, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, WindowError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.neg();
        }
        out
    }

    pub fn scale(&self, r: &Rational) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.scale(r);
        }
        out.normalize();
        out
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> LaurentWindow<D> {
        let mut out = LaurentWindow::zero(self.vars, self.window);
        for (&(i, j), c) in &self.terms {
            out.add_term(i, j, f(c));
        }
        out.normalize();
        out
    }

    /// Derivative in `z`: shifts the whole window down by one.
    pub fn d_dz(&self) -> Self {
        let mut out = LaurentWindow::zero(self.vars, self.window.shift(-1, 0));
        for (&(i, j), c) in &self.terms {
            if i != 0 {
                out.add_term(i - 1, j, c.scale(&rat_int(i)));
            }
        }
        out
    }

    /// Multiply by the monomial `z^dz w^dw`.
    pub fn shift(&self, dz: i64, dw: i64) -> Self {
        let vars = if dw != 0 { VarSet::ZW } else { self.vars };
        let mut out = LaurentWindow::zero(vars, self.window.shift(dz, dw));
        for (&(i, j), c) in &self.terms {
            out.add_term(i + dz, j + dw, c.clone());
        }
        out
    }

    /// Substitute `z -> -z`: signs flip by exponent parity.
    pub fn flip_z(&self) -> Self {
        let mut out = LaurentWindow::zero(self.vars, self.window);
        for (&(i, j), c) in &self.terms {
            let c2 = if i.rem_euclid(2) == 1 { c.neg() } else { c.clone() };
            out.add_term(i, j, c2);
        }
        out
    }

    /// Coefficient lookup with an explicit out-of-window error;
    /// `Ok(None)` means "certified zero".
    pub fn coeff_checked(&self, i: i64, j: i64) -> Result<Option<&C>, WindowError> {
        if self.window.above_ceiling(i, j) {
            return Err(WindowError::OutOfWindow { z: i, w: j, window: self.window });
        }
        // below the support floor the coefficient is certified zero
        Ok(self.terms.get(&(i, j)))
    }

    /// True when every coefficient inside the window vanishes.
    pub fn is_zero_on_window(&self) -> bool {
        self.terms
            .iter()
            .all(|(&(i, j), c)| !self.window.contains(i, j) || c.is_zero())
    }

    /// Smallest `(z, w)` exponent pair (lexicographic) carrying a nonzero
    /// in-window coefficient.
    pub fn first_nonzero(&self) -> Option<((i64, i64), &C)> {
        self.terms
            .iter()
            .find(|(&(i, j), c)| self.window.contains(i, j) && !c.is_zero())
            .map(|(&k, c)| (k, c))
    }

    /// Equality as truncated values: the difference vanishes on the common
    /// window, which must be nonempty.
    pub fn eq_on_common_window(&self, other: &Self) -> Result<bool, WindowError> {
        Ok(self.sub(other)?.is_zero_on_window())
    }
}

/// Product with an arbitrary bilinear coefficient combiner. This is the one
/// place window bookkeeping for multiplication lives; scalar-by-module
/// actions reuse it.
pub fn mul_with<A: Coeff, B: Coeff, C: Coeff>(
    a: &LaurentWindow<A>,
    b: &LaurentWindow<B>,
    f: impl Fn(&A, &B) -> C,
) -> Result<LaurentWindow<C>, WindowError> {
    let window = a.window.product(&b.window);
    if window.is_empty() {
        return Err(WindowError::EmptyWindow { window });
    }
    let mut out = LaurentWindow::zero(a.vars.join(b.vars), window);
    for (&(ia, ja), ca) in &a.terms {
        for (&(ib, jb), cb) in &b.terms {
            let (i, j) = (ia + ib, ja + jb);
            if !window.contains(i, j) {
                continue;
            }
            out.add_term(i, j, f(ca, cb));
        }
    }
    Ok(out)
}

/// Ring product for scalar-coefficient windows.
pub fn window_mul(
    a: &LaurentWindow<ParamPoly>,
    b: &LaurentWindow<ParamPoly>,
) -> Result<LaurentWindow<ParamPoly>, WindowError> {
    mul_with(a, b, |x, y| x.mul(y))
}

/// Truncated exponential `sum_{k=0..order} coef^k z^k / k!`.
pub fn truncated_exp(coef: &ParamPoly, order: i64) -> LaurentWindow<ParamPoly> {
    assert!(order >= 0, "exponential truncation order must be nonnegative");
    let mut v = LaurentWindow::zero(VarSet::Z, Window::one_var(0, order));
    let mut pk = ParamPoly::one();
    for k in 0..=order {
        if k > 0 {
            pk = pk.mul(coef);
        }
        let c = pk.scale(&(rat_int(1) / factorial(k as u32)));
        v.add_term(k, 0, c);
    }
    v
}

/// Exact binomial expansion of `(z - w)^n` for `n >= 0`.
pub fn zw_pow(n: u32) -> LaurentWindow<ParamPoly> {
    let mut v = LaurentWindow::zero(VarSet::ZW, Window::exact(0, 0, n as i64));
    for j in 0..=n {
        let mut c = binomial(n as i64, j);
        if j % 2 == 1 {
            c = -c;
        }
        v.add_term((n - j) as i64, j as i64, ParamPoly::constant(c));
    }
    v
}

/// Geometric expansion of `(z - w)^{-k}` in the region `|z| > |w|`,
/// truncated at `w`-degree `trunc`:
/// `sum_{j>=0} C(k+j-1, j) z^{-k-j} w^j`.
pub fn iota_zw(k: u32, trunc: i64) -> LaurentWindow<ParamPoly> {
    assert!(k >= 1 && trunc >= 0);
    let window = Window {
        low: [-(k as i64) - trunc, 0, -(k as i64)],
        high: [EXACT, trunc, EXACT],
    };
    let mut v = LaurentWindow::zero(VarSet::ZW, window);
    for j in 0..=trunc {
        let c = binomial(k as i64 + j - 1, j as u32);
        v.add_term(-(k as i64) - j, j, ParamPoly::constant(c));
    }
    v
}

/// Geometric expansion of `(w - z)^{-k}` in the region `|w| > |z|`,
/// truncated at `z`-degree `trunc`.
pub fn iota_wz(k: u32, trunc: i64) -> LaurentWindow<ParamPoly> {
    assert!(k >= 1 && trunc >= 0);
    let window = Window {
        low: [0, -(k as i64) - trunc, -(k as i64)],
        high: [trunc, EXACT, EXACT],
    };
    let mut v = LaurentWindow::zero(VarSet::ZW, window);
    for j in 0..=trunc {
        let c = binomial(k as i64 + j - 1, j as u32);
        v.add_term(j, -(k as i64) - j, ParamPoly::constant(c));
    }
    v
}

/// Multiplicative inverse of a one-variable series whose lowest certified
/// coefficient sits at `z^0` and is the constant 1. Standard recursion,
/// valid on the same window.
pub fn invert_unit_series(u: &LaurentWindow<ParamPoly>) -> Result<LaurentWindow<ParamPoly>, WindowError> {
    let high = u.window.high[0];
    assert!(u.window.low[0] >= 0 && high < EXACT, "unit series must be a truncated power series");
    let u0 = u.coeff_checked(0, 0)?.cloned().unwrap_or_else(ParamPoly::zero);
    assert!(u0.is_one(), "series constant term must be 1");
    let mut inv: Vec<ParamPoly> = vec![ParamPoly::one()];
    for n in 1..=high {
        let mut acc = ParamPoly::zero();
        for k in 1..=n {
            if let Some(uk) = u.coeff_checked(k, 0)? {
                acc = acc.add(&uk.mul(&inv[(n - k) as usize]));
            }
        }
        inv.push(acc.neg());
    }
    Ok(LaurentWindow::one_var(
        Window::one_var(0, high),
        inv.into_iter().enumerate().map(|(k, c)| (k as i64, c)),
    ))
}

impl<C: Coeff + fmt::Display> fmt::Display for LaurentWindow<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            for (idx, (&(i, j), c)) in self.terms.iter().enumerate() {
                if idx > 0 {
                    write!(f, " + ")?;
                }
                write!(f, "({})", c)?;
                if i != 0 {
                    write!(f, "*z^{}", i)?;
                }
                if j != 0 {
                    write!(f, "*w^{}", j)?;
                }
            }
        }
        write!(f, "  [{}]", self.window)
    }
}
