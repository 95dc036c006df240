//! Finite vertex algebra engine: truncated state-field tables over a
//! del-module, products `a_(n)b`, Wick products, axiom/locality/identity
//! checkers, the nil-ideal calculus, and the mechanized obstruction to a
//! finite Virasoro vertex algebra.
//!
//! A table stores `Y(g_i, z) g_j` for generator pairs as windowed Laurent
//! series with module-element coefficients; the translation rules
//! `Y(del u, z) v = d/dz Y(u, z) v` and `Y(u, z)(del v) = (del - d/dz) Y(u, z) v`
//! extend it to arbitrary elements. Every verdict is scoped to the window it
//! was computed on and reports carry that window.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cdmod::{FgModule, Gen, ModElement, Submodule};
use crate::exact::rational::{binomial, factorial, rat, rat_int};
use crate::exact::window::{mul_with, truncated_exp, window_mul, zw_pow};
use crate::exact::{
    invert_unit_series, Coeff, LaurentWindow, ParamPoly, QMatrix, Rational, Symbol, VarSet, Window,
    WindowError, EXACT,
};
use crate::gcmat::{self, ConformalMatrix};
use crate::lca::{ConformalAlgebra, SeriesOutcome};

use num::{One, Zero};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum VaError {
    #[error("field table must be {0}x{0} over all generators")]
    TableShape(usize),
    #[error("field entry Y({0}, z) {1} has coefficients of the wrong shape")]
    EntryShape(String, String),
    #[error("field entry Y({0}, z) {1} carries a series parameter")]
    EntryParam(String, String),
    #[error("vacuum must be a torsion generator with zero del action")]
    VacuumShape,
    #[error("state carries a series parameter other than lambda")]
    ForeignParam,
    #[error("psi must be even: exponent {0} has a nonzero coefficient")]
    OddPsi(i64),
    #[error("derivation image must have zero constant term")]
    DerivationConstant,
    #[error("truncation order {got} is too small, need at least {need}")]
    OrderTooSmall { got: i64, need: i64 },
    #[error("translation exponential did not terminate inside the window")]
    ExpDiverged,
    #[error("conformal shadow construction failed: {0}")]
    Shadow(String),
    #[error("weight analysis failed: {0}")]
    Weight(String),
    #[error(transparent)]
    Window(#[from] WindowError),
}

impl Coeff for ModElement {
    fn is_zero(&self) -> bool {
        ModElement::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        ModElement::add(self, other)
    }
    fn neg(&self) -> Self {
        ModElement::neg(self)
    }
    fn scale(&self, r: &Rational) -> Self {
        ModElement::scale(self, r)
    }
}

/// A windowed Laurent series with module-element coefficients.
pub type FieldSeries = LaurentWindow<ModElement>;

/// A truncated state-field table on the generators of a del-module with a
/// distinguished vacuum generator.
#[derive(Clone, PartialEq, Debug)]
pub struct VertexTable {
    name: String,
    module: FgModule,
    vacuum: Gen,
    fields: Vec<Vec<FieldSeries>>,
}

impl VertexTable {
    /// Build from an explicit table `fields[i][j] = Y(g_i, z) g_j`. Shapes
    /// and parameter-freeness are validated; the axioms are not, so that
    /// deliberately broken tables can be fed to the checkers.
    pub fn new(
        name: &str,
        module: FgModule,
        vacuum: Gen,
        fields: Vec<Vec<FieldSeries>>,
    ) -> Result<Self, VaError> {
        let total = module.total_gens();
        if !module.is_torsion_gen(vacuum) {
            return Err(VaError::VacuumShape);
        }
        let vt = vacuum.0 - module.free_rank();
        let td = module.torsion_del();
        if (0..module.torsion_dim()).any(|r| !td.get(r, vt).is_zero()) {
            return Err(VaError::VacuumShape);
        }
        if fields.len() != total || fields.iter().any(|r| r.len() != total) {
            return Err(VaError::TableShape(total));
        }
        for (i, row) in fields.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                let ni = module.gen_name(Gen(i)).to_string();
                let nj = module.gen_name(Gen(j)).to_string();
                for (_, c) in s.terms() {
                    if !c.matches(&module) {
                        return Err(VaError::EntryShape(ni, nj));
                    }
                    if c.has_params() {
                        return Err(VaError::EntryParam(ni, nj));
                    }
                }
            }
        }
        Ok(VertexTable { name: name.to_string(), module, vacuum, fields })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn module(&self) -> &FgModule {
        &self.module
    }

    pub fn vacuum(&self) -> Gen {
        self.vacuum
    }

    pub fn field(&self, i: Gen, j: Gen) -> &FieldSeries {
        &self.fields[i.0][j.0]
    }

    /// Replace one table entry; used to study how the checkers react to a
    /// corrupted table.
    pub fn set_field(&mut self, i: Gen, j: Gen, s: FieldSeries) {
        self.fields[i.0][j.0] = s;
    }

    /// The named generator as a module element.
    pub fn gen_elem(&self, name: &str) -> Result<ModElement, VaError> {
        let g = self
            .module
            .gen_by_name(name)
            .map_err(|e| VaError::Shadow(e.to_string()))?;
        Ok(ModElement::generator(&self.module, g))
    }
}

fn sat(v: i64) -> i64 {
    v.clamp(-EXACT, EXACT)
}

fn exact_zero_series() -> FieldSeries {
    LaurentWindow::zero(VarSet::Z, Window::exact(0, 0, 0))
}

fn del_series(m: &FgModule, s: &FieldSeries) -> FieldSeries {
    s.map_coeffs(|c| c.apply_del(m))
}

/// Apply the scalar operator `p(op)` where `op` is `d/dz` or `del - d/dz`.
fn apply_del_poly(
    m: &FgModule,
    p: &ParamPoly,
    s: &FieldSeries,
    del_minus_ddz: bool,
) -> Result<FieldSeries, VaError> {
    let deg = p.degree_in(Symbol::Del);
    let mut tower = s.clone();
    let mut acc: Option<FieldSeries> = None;
    for k in 0..=deg {
        let ck = p.coeff_of(Symbol::Del, k);
        if !ck.is_zero() {
            let term = tower.scale(&ck.constant_term());
            acc = Some(match acc {
                None => term,
                Some(a) => a.add(&term)?,
            });
        }
        if k < deg {
            tower = if del_minus_ddz {
                del_series(m, &tower).sub(&tower.d_dz())?
            } else {
                tower.d_dz()
            };
        }
    }
    Ok(acc.unwrap_or_else(exact_zero_series))
}

fn gen_coeff(m: &FgModule, e: &ModElement, g: Gen) -> ParamPoly {
    if g.0 < m.free_rank() {
        e.free[g.0].clone()
    } else {
        e.torsion[g.0 - m.free_rank()].clone()
    }
}

fn apply_field_plain(v: &VertexTable, x: &ModElement, y: &ModElement) -> Result<FieldSeries, VaError> {
    let m = v.module();
    let mut acc: Option<FieldSeries> = None;
    for i in m.gens() {
        let pi = gen_coeff(m, x, i);
        if pi.is_zero() {
            continue;
        }
        for j in m.gens() {
            let qj = gen_coeff(m, y, j);
            if qj.is_zero() {
                continue;
            }
            let entry = v.field(i, j);
            let right = apply_del_poly(m, &qj, entry, true)?;
            let full = apply_del_poly(m, &pi, &right, false)?;
            acc = Some(match acc {
                None => full,
                Some(a) => a.add(&full)?,
            });
        }
    }
    Ok(acc.unwrap_or_else(exact_zero_series))
}

/// The series `Y(x, z) y` extended from the generator table by the
/// translation rules. Lambda-homogeneous parts of either argument are
/// treated as scalars; other parameters are rejected.
pub fn apply_field(v: &VertexTable, x: &ModElement, y: &ModElement) -> Result<FieldSeries, VaError> {
    for p in x.free.iter().chain(x.torsion.iter()).chain(y.free.iter()).chain(y.torsion.iter()) {
        if p.contains(Symbol::Mu) || p.contains(Symbol::Alpha) {
            return Err(VaError::ForeignParam);
        }
    }
    let m = v.module();
    let mut acc: Option<FieldSeries> = None;
    for (kx, xp) in x.decompose(Symbol::Lambda) {
        for (ky, yp) in y.decompose(Symbol::Lambda) {
            let part = apply_field_plain(v, &xp, &yp)?;
            let k = kx + ky;
            let scaled = if k == 0 {
                part
            } else {
                let lam = ParamPoly::monomial(Symbol::Lambda, k, rat_int(1));
                part.map_coeffs(|c| c.mul_poly(m, &lam))
            };
            acc = Some(match acc {
                None => scaled,
                Some(a) => a.add(&scaled)?,
            });
        }
    }
    Ok(acc.unwrap_or_else(exact_zero_series))
}

/// The product `a_(n) b`, the coefficient of `z^{-n-1}` in `Y(a, z) b`.
/// Asking above the knowledge ceiling is an error, never a silent zero.
pub fn product(v: &VertexTable, a: &ModElement, b: &ModElement, n: i64) -> Result<ModElement, VaError> {
    let s = apply_field(v, a, b)?;
    match s.coeff_checked(-n - 1, 0)? {
        None => Ok(ModElement::zero(v.module())),
        Some(c) => Ok(c.clone()),
    }
}

/// The normally ordered (Wick) product `a_(-1) b`.
pub fn wick(v: &VertexTable, a: &ModElement, b: &ModElement) -> Result<ModElement, VaError> {
    product(v, a, b, -1)
}

/// The bracket `sum_n lambda^n / n! a_(n) b` over the non-negative products.
pub fn shadow_bracket(v: &VertexTable, a: &ModElement, b: &ModElement) -> Result<ModElement, VaError> {
    let m = v.module();
    let s = apply_field(v, a, b)?;
    let mut out = ModElement::zero(m);
    let mut n: u32 = 0;
    loop {
        let z = -(n as i64) - 1;
        if s.window.below_floor(z, 0) {
            break;
        }
        if let Some(c) = s.coeff_checked(z, 0)? {
            let lam = ParamPoly::monomial(Symbol::Lambda, n, rat_int(1) / factorial(n));
            out = out.add(&c.mul_poly(m, &lam));
        }
        n += 1;
    }
    Ok(out)
}

/// The Lie conformal algebra underlying the table, with
/// `[a lambda b] = sum lambda^n / n! a_(n) b` on the free generators.
pub fn conformal_shadow(v: &VertexTable) -> Result<ConformalAlgebra, VaError> {
    let m = v.module();
    let mut table = Vec::with_capacity(m.free_rank());
    for i in 0..m.free_rank() {
        let gi = ModElement::generator(m, Gen(i));
        let mut row = Vec::with_capacity(m.free_rank());
        for j in 0..m.free_rank() {
            let gj = ModElement::generator(m, Gen(j));
            row.push(shadow_bracket(v, &gi, &gj)?);
        }
        table.push(row);
    }
    ConformalAlgebra::new(&format!("{} shadow", v.name()), m.clone(), table)
        .map_err(|e| VaError::Shadow(e.to_string()))
}

/// `e^{z del} s` computed up to `cap_high` in the `z` direction.
fn exp_zdel(m: &FgModule, s: &FieldSeries, cap_high: i64) -> Result<FieldSeries, VaError> {
    let mut window = s.window;
    window.high[0] = window.high[0].min(cap_high);
    window.high[2] = window.high[2].min(cap_high);
    let floor = s.terms().map(|(&(i, _), _)| i).min().unwrap_or(0);
    let bound = if window.high[0] >= EXACT / 2 { 4096 } else { window.high[0] - floor + 2 };
    let mut out = LaurentWindow::zero(s.vars, window);
    let mut contrib: Vec<((i64, i64), ModElement)> =
        s.terms().map(|(&ij, c)| (ij, c.clone())).collect();
    let mut k: i64 = 0;
    while !contrib.is_empty() {
        for ((i, j), c) in &contrib {
            out.add_term(*i, *j, c.clone());
        }
        k += 1;
        if k > bound {
            return Err(VaError::ExpDiverged);
        }
        let inv = rat_int(1) / rat_int(k);
        contrib = contrib
            .into_iter()
            .filter_map(|((i, j), c)| {
                let c2 = c.apply_del(m).scale(&inv);
                if ModElement::is_zero(&c2) || window.above_ceiling(i + 1, j) {
                    None
                } else {
                    Some(((i + 1, j), c2))
                }
            })
            .collect();
    }
    out.normalize();
    Ok(out)
}

/// Which vertex axiom a failure belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum VertexAxiom {
    /// `Y(vacuum, z)` is the identity field.
    Vacuum,
    /// `Y(g, z) vacuum` has no poles and starts at `g`.
    Creation,
    /// `d/dz Y(g, z) vacuum = del Y(g, z) vacuum`.
    Translation,
    /// `Y(a, z) b = e^{z del} Y(b, -z) a`.
    Skew,
}

/// One offending coefficient of an axiom identity.
#[derive(Clone, PartialEq, Debug)]
pub struct VertexAxiomFailure {
    pub axiom: VertexAxiom,
    pub left: String,
    pub right: String,
    pub z_order: i64,
    pub value: ModElement,
}

/// Outcome of the axiom suite with the windows the identities were checked on.
#[derive(Clone, PartialEq, Debug)]
pub struct VertexAxiomReport {
    pub failures: Vec<VertexAxiomFailure>,
    pub pairs_checked: usize,
}

impl VertexAxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn push_failures(
    out: &mut Vec<VertexAxiomFailure>,
    axiom: VertexAxiom,
    left: &str,
    right: &str,
    diff: &FieldSeries,
) {
    if let Some(((i, _), c)) = diff.first_nonzero() {
        out.push(VertexAxiomFailure {
            axiom,
            left: left.to_string(),
            right: right.to_string(),
            z_order: i,
            value: c.clone(),
        });
    }
}

/// Check the vacuum, creation, translation, and skew identities on all
/// generator pairs as window equalities.
pub fn check_vertex_axioms(v: &VertexTable) -> Result<VertexAxiomReport, VaError> {
    let m = v.module();
    let vac = v.vacuum();
    let vac_name = m.gen_name(vac).to_string();
    let mut failures = Vec::new();
    let mut pairs = 0;
    for j in m.gens() {
        let name_j = m.gen_name(j).to_string();
        let expected = LaurentWindow::one_var(
            Window::exact(0, 0, 0),
            [(0i64, ModElement::generator(m, j))],
        );
        let diff = v.field(vac, j).sub(&expected)?;
        push_failures(&mut failures, VertexAxiom::Vacuum, &vac_name, &name_j, &diff);
        pairs += 1;
    }
    for i in m.gens() {
        if i == vac {
            continue;
        }
        let name_i = m.gen_name(i).to_string();
        let s = v.field(i, vac);
        let expected = LaurentWindow::one_var(
            Window::one_var(0, 0),
            [(0i64, ModElement::generator(m, i))],
        );
        let diff = s.sub(&expected)?;
        push_failures(&mut failures, VertexAxiom::Creation, &name_i, &vac_name, &diff);
        let diff = s.d_dz().sub(&del_series(m, s))?;
        push_failures(&mut failures, VertexAxiom::Translation, &name_i, &vac_name, &diff);
        pairs += 2;
    }
    for i in m.gens() {
        for j in m.gens() {
            let name_i = m.gen_name(i).to_string();
            let name_j = m.gen_name(j).to_string();
            let lhs = v.field(i, j);
            let flipped = v.field(j, i).flip_z();
            let cap = lhs.window.high[0];
            let rhs = exp_zdel(m, &flipped, cap)?;
            let diff = lhs.sub(&rhs)?;
            push_failures(&mut failures, VertexAxiom::Skew, &name_i, &name_j, &diff);
            pairs += 1;
        }
    }
    Ok(VertexAxiomReport { failures, pairs_checked: pairs })
}

/// Apply `Y(outer, z)` to every coefficient of a one-variable series,
/// reinterpreting its variable as `w`. The `w`-supports of the pieces are
/// disjoint, so the band ceiling is the minimum of per-piece ceilings while
/// the plain `z` ceiling may take the maximum.
fn compose(v: &VertexTable, outer: &ModElement, inner: &FieldSeries) -> Result<FieldSeries, VaError> {
    let mut pieces: Vec<(i64, FieldSeries)> = Vec::new();
    for (&(k, _), c) in inner.terms() {
        pieces.push((k, apply_field(v, outer, c)?));
    }
    let mut zl = EXACT;
    let mut zh = -EXACT;
    let mut bl = EXACT;
    let mut bh = EXACT;
    for (k, s) in &pieces {
        zl = zl.min(s.window.low[0]);
        zh = zh.max(s.window.high[0]);
        bl = bl.min(sat(s.window.low[0].saturating_add(*k)));
        bh = bh.min(sat(s.window.high[0].saturating_add(*k)));
    }
    if pieces.is_empty() {
        zl = 0;
        zh = EXACT;
        bl = 0;
        bh = EXACT;
    }
    let window = Window {
        low: [sat(zl), inner.window.low[0], sat(bl)],
        high: [sat(zh), inner.window.high[0], sat(bh)],
    };
    let mut out = LaurentWindow::zero(VarSet::ZW, window);
    for (k, s) in pieces {
        for (&(i, _), c) in s.terms() {
            out.add_term(i, k, c.clone());
        }
    }
    out.normalize();
    Ok(out)
}

fn swap_vars(s: &FieldSeries) -> FieldSeries {
    let w = Window {
        low: [s.window.low[1], s.window.low[0], s.window.low[2]],
        high: [s.window.high[1], s.window.high[0], s.window.high[2]],
    };
    LaurentWindow::from_terms(VarSet::ZW, w, s.terms().map(|(&(i, j), c)| ((j, i), c.clone())))
}

/// Locality verdict for one generator pair on one argument.
#[derive(Clone, PartialEq, Debug)]
pub enum LocalityVerdict {
    /// Least `N` with `(z-w)^N [Y(a,z), Y(b,w)]` zero on the window; every
    /// smaller `N` left a known nonzero coefficient.
    MinimalN { n: u32 },
    /// A known nonzero coefficient survives through `N = n_max`.
    FailsThrough { n_max: u32 },
    /// The knowledge region emptied before a decision.
    Inconclusive { at: u32 },
}

/// Locality check result; the window is the one the verdict was decided on.
#[derive(Clone, PartialEq, Debug)]
pub struct LocalityReport {
    pub verdict: LocalityVerdict,
    pub window: Window,
    pub witness: Option<((i64, i64), ModElement)>,
}

/// Compute `[Y(a,z), Y(b,w)] on` through composed table applications (the
/// iota-expansions arise from the composition order) and find the least
/// `N <= n_max` with `(z-w)^N` times it zero on the window.
pub fn locality_check(
    v: &VertexTable,
    a: &ModElement,
    b: &ModElement,
    on: &ModElement,
    n_max: u32,
) -> Result<LocalityReport, VaError> {
    let m = v.module();
    let yb = apply_field(v, b, on)?;
    let ya = apply_field(v, a, on)?;
    let left = compose(v, a, &yb)?;
    let right = swap_vars(&compose(v, b, &ya)?);
    let mut p = left.sub(&right)?;
    let zw = zw_pow(1);
    let mut witness = None;
    for n in 0..=n_max {
        if p.window.is_empty() {
            return Ok(LocalityReport {
                verdict: LocalityVerdict::Inconclusive { at: n },
                window: p.window,
                witness,
            });
        }
        if p.is_zero_on_window() {
            return Ok(LocalityReport {
                verdict: LocalityVerdict::MinimalN { n },
                window: p.window,
                witness: None,
            });
        }
        witness = p.first_nonzero().map(|(ij, c)| (ij, c.clone()));
        if n < n_max {
            p = mul_with(&zw, &p, |q, c| c.mul_poly(m, q))?;
        }
    }
    Ok(LocalityReport {
        verdict: LocalityVerdict::FailsThrough { n_max },
        window: p.window,
        witness,
    })
}

/// First offending coefficient of the generalized Wick identity.
#[derive(Clone, PartialEq, Debug)]
pub struct GenwickWitness {
    pub z_order: i64,
    pub lambda_power: u32,
    pub value: ModElement,
}

/// Outcome of one generalized Wick identity check.
#[derive(Clone, PartialEq, Debug)]
pub struct GenwickReport {
    pub pass: bool,
    pub witness: Option<GenwickWitness>,
    pub window: Window,
}

fn exp_order_for(s: &FieldSeries) -> i64 {
    let l = s.window.low[0];
    let h = s.window.high[0];
    if h >= EXACT / 2 {
        let top = s.terms().map(|(&(i, _), _)| i).max().unwrap_or(0);
        (top - l).max(0) + 4
    } else {
        (h - l).max(0)
    }
}

/// Verify `[a lambda Y(b,z)c] = e^{lambda z} Y([a lambda b], z) c + Y(b, z)[a lambda c]`
/// as a window identity, polynomial in lambda.
pub fn genwick_check(
    v: &VertexTable,
    a: &ModElement,
    b: &ModElement,
    c: &ModElement,
) -> Result<GenwickReport, VaError> {
    let m = v.module();
    let ybc = apply_field(v, b, c)?;
    let mut lhs = LaurentWindow::zero(VarSet::Z, ybc.window);
    for (&(i, j), coeff) in ybc.terms() {
        let br = shadow_bracket(v, a, coeff)?;
        if !ModElement::is_zero(&br) {
            lhs.add_term(i, j, br);
        }
    }
    let ab = shadow_bracket(v, a, b)?;
    let ac = shadow_bracket(v, a, c)?;
    let t1_raw = apply_field(v, &ab, c)?;
    let elz = truncated_exp(&ParamPoly::symbol(Symbol::Lambda), exp_order_for(&t1_raw));
    let t1 = mul_with(&elz, &t1_raw, |q, e| e.mul_poly(m, q))?;
    let t2 = apply_field(v, b, &ac)?;
    let resid = lhs.sub(&t1)?.sub(&t2)?;
    let witness = resid.first_nonzero().map(|((i, _), coeff)| {
        let (lp, slice) = coeff
            .decompose(Symbol::Lambda)
            .into_iter()
            .find(|(_, s)| !ModElement::is_zero(s))
            .expect("nonzero coefficient has a nonzero lambda slice");
        GenwickWitness { z_order: i, lambda_power: lp, value: slice }
    });
    Ok(GenwickReport { pass: witness.is_none(), witness, window: resid.window })
}

/// Commutator identity suite outcome: pairs checked, pairs skipped for
/// window reasons, and failing `(m, n)` pairs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LiebracketReport {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<(i64, i64)>,
}

fn try_product(
    v: &VertexTable,
    a: &ModElement,
    b: &ModElement,
    n: i64,
) -> Result<Option<ModElement>, VaError> {
    match product(v, a, b, n) {
        Ok(e) => Ok(Some(e)),
        Err(VaError::Window(WindowError::OutOfWindow { .. })) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Check `[a_(m), b_(n)] x = sum_j C(m, j) (a_(j) b)_(m+n-j) x` for all
/// `(m, n)` in the given ranges, skipping pairs the window cannot decide.
pub fn liebracket_check(
    v: &VertexTable,
    a: &ModElement,
    b: &ModElement,
    x: &ModElement,
    m_range: (i64, i64),
    n_range: (i64, i64),
) -> Result<LiebracketReport, VaError> {
    let yab = apply_field(v, a, b)?;
    let j_top = (-yab.window.low[0] - 1).max(-1);
    let mut checked = 0;
    let mut skipped = 0;
    let mut failures = Vec::new();
    for mm in m_range.0..=m_range.1 {
        for nn in n_range.0..=n_range.1 {
            let mut ok = true;
            let mut lhs = None;
            if let (Some(bx), Some(ax)) = (try_product(v, b, x, nn)?, try_product(v, a, x, mm)?) {
                if let (Some(abx), Some(bax)) =
                    (try_product(v, a, &bx, mm)?, try_product(v, b, &ax, nn)?)
                {
                    lhs = Some(abx.sub(&bax));
                }
            }
            let Some(lhs) = lhs else {
                skipped += 1;
                continue;
            };
            let mut rhs = ModElement::zero(v.module());
            for j in 0..=j_top {
                let cj = binomial(mm, j as u32);
                if cj.is_zero() {
                    continue;
                }
                let Some(ajb) = try_product(v, a, b, j)? else {
                    ok = false;
                    break;
                };
                if ModElement::is_zero(&ajb) {
                    continue;
                }
                let Some(term) = try_product(v, &ajb, x, mm + nn - j)? else {
                    ok = false;
                    break;
                };
                rhs = rhs.add(&term.scale(&cj));
            }
            if !ok {
                skipped += 1;
                continue;
            }
            checked += 1;
            if lhs != rhs {
                failures.push((mm, nn));
            }
        }
    }
    Ok(LiebracketReport { checked, skipped, failures })
}

/// Span of products with truncation bookkeeping.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ProductSpan {
    pub span: Submodule,
    /// Some contributing series had a finite knowledge ceiling.
    pub truncated: bool,
    /// Dropping the top order of every contributing series leaves the span
    /// unchanged, so the truncation is unlikely to hide generators.
    pub saturated: bool,
}

fn product_span_filtered(
    v: &VertexTable,
    a: &Submodule,
    b: &Submodule,
    keep: impl Fn(i64) -> bool,
) -> Result<ProductSpan, VaError> {
    let m = v.module();
    let mut all = Vec::new();
    let mut reduced = Vec::new();
    let mut truncated = false;
    for ra in a.rows() {
        for rb in b.rows() {
            let s = apply_field(v, ra, rb)?;
            if s.window.high[0] < EXACT / 2 {
                truncated = true;
            }
            let kept: Vec<ModElement> = s
                .terms()
                .filter(|(&(i, _), _)| keep(i))
                .map(|(_, c)| c.clone())
                .collect();
            if let Some((last, head)) = kept.split_last() {
                all.extend_from_slice(head);
                all.push(last.clone());
                reduced.extend_from_slice(head);
            }
        }
    }
    let span = Submodule::span(m, &all);
    let span_reduced = Submodule::span(m, &reduced);
    let saturated = span == span_reduced;
    Ok(ProductSpan { span, truncated, saturated })
}

/// `A . B`: the del-span of all products `a_(n) b` visible in the window.
pub fn ideal_product(v: &VertexTable, a: &Submodule, b: &Submodule) -> Result<ProductSpan, VaError> {
    product_span_filtered(v, a, b, |_| true)
}

/// The span of the non-negative products only (`z`-orders below zero),
/// the vertex analogue of the bracket image.
pub fn bracket_product(v: &VertexTable, a: &Submodule, b: &Submodule) -> Result<ProductSpan, VaError> {
    product_span_filtered(v, a, b, |i| i < 0)
}

/// A descending product chain with its verdict.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainReport {
    pub chain: Vec<Submodule>,
    pub outcome: SeriesOutcome,
    /// Some product along the chain was window-truncated, so "zero" means
    /// "zero within window".
    pub window_conditional: bool,
}

fn iterate_chain(
    v: &VertexTable,
    start: Submodule,
    max_steps: usize,
    step: impl Fn(&VertexTable, &Submodule) -> Result<ProductSpan, VaError>,
) -> Result<ChainReport, VaError> {
    let mut chain = vec![start];
    let mut conditional = false;
    for s in 1..=max_steps {
        let prev = chain.last().unwrap();
        if prev.is_zero_module() {
            return Ok(ChainReport {
                chain,
                outcome: SeriesOutcome::ReachedZero { steps: s - 1 },
                window_conditional: conditional,
            });
        }
        let ps = step(v, prev)?;
        conditional |= ps.truncated && !ps.saturated;
        let next = ps.span;
        if next.is_zero_module() {
            chain.push(next);
            return Ok(ChainReport {
                chain,
                outcome: SeriesOutcome::ReachedZero { steps: s },
                window_conditional: conditional,
            });
        }
        if &next == prev {
            chain.push(next);
            return Ok(ChainReport {
                chain,
                outcome: SeriesOutcome::Stabilized { steps: s },
                window_conditional: conditional,
            });
        }
        chain.push(next);
    }
    Ok(ChainReport {
        chain,
        outcome: SeriesOutcome::Inconclusive { steps: max_steps },
        window_conditional: conditional,
    })
}

/// Iterate `I^{n+1} = I^n . I^n`; reaching zero certifies a nil-ideal
/// within window.
pub fn is_nil_ideal(v: &VertexTable, i: &Submodule, max_steps: usize) -> Result<ChainReport, VaError> {
    iterate_chain(v, i.clone(), max_steps, |v, s| ideal_product(v, s, s))
}

/// The series `V^[n+1] = [V, V^[n]]` of non-negative product spans starting
/// from the whole module, with a nil-check of the stable term.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BracketSeriesReport {
    pub series: ChainReport,
    pub stable_term_nil: Option<ChainReport>,
}

pub fn brackets_series(v: &VertexTable, max_steps: usize) -> Result<BracketSeriesReport, VaError> {
    let m = v.module();
    let whole = Submodule::whole(m);
    let series = iterate_chain(v, whole.clone(), max_steps, |v, s| {
        bracket_product(v, &Submodule::whole(v.module()), s)
    })?;
    let stable_term_nil = match series.outcome {
        SeriesOutcome::Inconclusive { .. } => None,
        _ => Some(is_nil_ideal(v, series.chain.last().unwrap(), max_steps)?),
    };
    Ok(BracketSeriesReport { series, stable_term_nil })
}

/// A submodule together with a product-closure certificate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct IdealCandidate {
    pub submodule: Submodule,
    /// `g_(n) v` landed back in the submodule for every table generator,
    /// every row, and every order visible in the window.
    pub closure_certified: bool,
    pub window_conditional: bool,
}

/// Certify `Y(g, z) r` and `Y(r, z) g` stay inside the span for all table
/// generators `g` and submodule rows `r`.
pub fn certify_ideal(v: &VertexTable, sub: &Submodule) -> Result<IdealCandidate, VaError> {
    let m = v.module();
    let mut certified = true;
    let mut conditional = false;
    for g in m.gens() {
        let ge = ModElement::generator(m, g);
        for r in sub.rows() {
            for s in [apply_field(v, &ge, r)?, apply_field(v, r, &ge)?] {
                if s.window.high[0] < EXACT / 2 {
                    conditional = true;
                }
                for (_, c) in s.terms() {
                    if !sub.member(m, c) {
                        certified = false;
                    }
                }
            }
        }
    }
    Ok(IdealCandidate {
        submodule: sub.clone(),
        closure_certified: certified,
        window_conditional: conditional,
    })
}

/// Consequence of `Y(a, z) a = 0`: the span `<a> . V` is an abelian ideal
/// within window.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SquareZeroReport {
    pub square_is_zero: bool,
    pub ideal: IdealCandidate,
    pub abelian: bool,
}

pub fn square_zero_ideal(v: &VertexTable, a: &ModElement) -> Result<SquareZeroReport, VaError> {
    let m = v.module();
    let saa = apply_field(v, a, a)?;
    let square_is_zero = saa.is_zero_on_window();
    let span_a = Submodule::span(m, std::slice::from_ref(a));
    let av = ideal_product(v, &span_a, &Submodule::whole(m))?;
    let ideal = certify_ideal(v, &av.span)?;
    let abelian = ideal_product(v, &av.span, &av.span)?.span.is_zero_module();
    Ok(SquareZeroReport { square_is_zero, ideal, abelian })
}

/// Lower bound for the nilradical: the stable bracket-series term when it is
/// nil, plus every certified abelian ideal arising from a square-zero
/// generator. Maximality is not decided; the bound only ever grows.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NilradicalBound {
    pub lower_bound: Submodule,
    pub stable_series_term: Submodule,
    pub abelian_ideals: Vec<Submodule>,
    pub reduced_within_window: bool,
    pub window_conditional: bool,
}

pub fn nilradical_lower_bound(v: &VertexTable, max_steps: usize) -> Result<NilradicalBound, VaError> {
    let m = v.module();
    let bs = brackets_series(v, max_steps)?;
    let mut conditional = bs.series.window_conditional;
    let stable = bs.series.chain.last().unwrap().clone();
    let mut parts: Vec<ModElement> = Vec::new();
    if let Some(nil) = &bs.stable_term_nil {
        conditional |= nil.window_conditional;
        if matches!(nil.outcome, SeriesOutcome::ReachedZero { .. }) {
            parts.extend(stable.rows().iter().cloned());
        }
    }
    let mut abelian_ideals = Vec::new();
    for g in m.gens() {
        if g == v.vacuum() {
            continue;
        }
        let report = square_zero_ideal(v, &ModElement::generator(m, g))?;
        conditional |= report.ideal.window_conditional;
        if report.square_is_zero && report.ideal.closure_certified && report.abelian {
            parts.extend(report.ideal.submodule.rows().iter().cloned());
            abelian_ideals.push(report.ideal.submodule);
        }
    }
    let lower_bound = Submodule::span(m, &parts);
    let reduced = lower_bound.is_zero_module();
    Ok(NilradicalBound {
        lower_bound,
        stable_series_term: stable,
        abelian_ideals,
        reduced_within_window: reduced,
        window_conditional: conditional,
    })
}

/// Structure-theorem consequences checked on a reduced table: every free
/// generator's adjoint on the conformal shadow acts nilpotently and the
/// shadow's central series reaches zero. On a non-reduced table no claim is
/// made and `claims` is `None`.
#[derive(Clone, PartialEq, Debug)]
pub struct ConsequenceReport {
    pub nilradical: NilradicalBound,
    pub claims: Option<ConsequenceClaims>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct ConsequenceClaims {
    pub adjoints_nilpotent: Vec<(String, bool)>,
    pub central_series_reaches_zero: bool,
}

pub fn reduced_consequence_check(
    v: &VertexTable,
    max_steps: usize,
) -> Result<ConsequenceReport, VaError> {
    let nilradical = nilradical_lower_bound(v, max_steps)?;
    if !nilradical.reduced_within_window {
        return Ok(ConsequenceReport { nilradical, claims: None });
    }
    let m = v.module();
    let shadow = conformal_shadow(v)?;
    let mut adjoints_nilpotent = Vec::new();
    for i in 0..m.free_rank() {
        let adj = gcmat::adjoint_matrix(&shadow, &ModElement::generator(m, Gen(i)));
        let rep = gcmat::action_nilpotent(m, &adj, max_steps);
        let ok = matches!(rep.outcome, SeriesOutcome::ReachedZero { .. });
        adjoints_nilpotent.push((m.gen_name(Gen(i)).to_string(), ok));
    }
    let central = shadow.central_series(max_steps);
    let central_ok = matches!(central.outcome, SeriesOutcome::ReachedZero { .. });
    Ok(ConsequenceReport {
        nilradical,
        claims: Some(ConsequenceClaims {
            adjoints_nilpotent,
            central_series_reaches_zero: central_ok,
        }),
    })
}

/// Weight-ideal consequence: every nonzero weight space of the given
/// adjoint-style matrix is a square-zero ideal of the table within window.
#[derive(Clone, PartialEq, Debug)]
pub struct WeightIdealReport {
    /// No nonzero weight with a nonzero space was found.
    pub vacuous: bool,
    pub checks: Vec<WeightIdealCheck>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct WeightIdealCheck {
    pub weight: ParamPoly,
    pub ideal_certified: bool,
    pub square_zero: bool,
}

pub fn weight_ideal_check(
    v: &VertexTable,
    f: &ConformalMatrix,
    deg_bound: u32,
    max_steps: usize,
) -> Result<WeightIdealReport, VaError> {
    let m = v.module();
    let candidates =
        gcmat::weight_candidates(m, f).map_err(|e| VaError::Weight(e.to_string()))?;
    let reports = gcmat::weight_spaces(m, f, &candidates, deg_bound, max_steps)
        .map_err(|e| VaError::Weight(e.to_string()))?;
    let mut checks = Vec::new();
    for rep in reports {
        if rep.weight.is_zero() {
            continue;
        }
        let Some(sub) = rep.submodule else { continue };
        if sub.is_zero_module() {
            continue;
        }
        let ideal = certify_ideal(v, &sub)?;
        let square = ideal_product(v, &sub, &sub)?.span.is_zero_module();
        checks.push(WeightIdealCheck {
            weight: rep.weight.clone(),
            ideal_certified: ideal.closure_certified,
            square_zero: square,
        });
    }
    Ok(WeightIdealReport { vacuous: checks.is_empty(), checks })
}

/// Kernel-of-a-central-multiplication check: for a torsion generator `c`
/// with `del c = 0` whose field is the constant `c_(-1)`, the kernel of
/// `c_(-1)` on the bounded slice is product-closed within window.
#[derive(Clone, PartialEq, Debug)]
pub struct KernelIdealReport {
    pub constant_field: bool,
    pub kernel: Submodule,
    pub ideal: IdealCandidate,
}

pub fn kernel_ideal_check(
    v: &VertexTable,
    c: Gen,
    deg_bound: u32,
) -> Result<KernelIdealReport, VaError> {
    let m = v.module();
    let ce = ModElement::generator(m, c);
    let mut constant_field = m.is_torsion_gen(c);
    if constant_field {
        let tcol = c.0 - m.free_rank();
        let td = m.torsion_del();
        constant_field = (0..m.torsion_dim()).all(|r| td.get(r, tcol).is_zero());
    }
    for j in m.gens() {
        let s = apply_field(v, &ce, &ModElement::generator(m, j))?;
        if s.terms().any(|(&(i, _), cf)| i != 0 && !ModElement::is_zero(cf)) {
            constant_field = false;
        }
    }
    let basis = slice_elements(m, deg_bound);
    let out_bound = deg_bound + 1;
    let cols: Result<Vec<Vec<Rational>>, VaError> = basis
        .iter()
        .map(|e| {
            let img = wick(v, &ce, e)?;
            img.to_coords(m, out_bound).map_err(|er| VaError::Weight(er.to_string()))
        })
        .collect();
    let cols = cols?;
    let rows = cols.first().map(|c| c.len()).unwrap_or(0);
    let mut mat = QMatrix::zero(rows, basis.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, val) in col.iter().enumerate() {
            mat.set(i, j, val.clone());
        }
    }
    let null = mat.nullspace();
    let kernel_elems: Vec<ModElement> = null
        .iter()
        .map(|coeffs| {
            let mut e = ModElement::zero(m);
            for (b, cf) in basis.iter().zip(coeffs.iter()) {
                if !cf.is_zero() {
                    e = e.add(&b.scale(cf));
                }
            }
            e
        })
        .collect();
    let kernel = Submodule::span(m, &kernel_elems);
    let ideal = certify_ideal(v, &kernel)?;
    Ok(KernelIdealReport { constant_field, kernel, ideal })
}

fn slice_elements(m: &FgModule, deg_bound: u32) -> Vec<ModElement> {
    let mut out = Vec::new();
    for g in m.gens() {
        let e = ModElement::generator(m, g);
        if m.is_torsion_gen(g) {
            out.push(e);
        } else {
            for d in 0..=deg_bound {
                let p = ParamPoly::monomial(Symbol::Del, d, rat_int(1));
                out.push(e.mul_poly(m, &p));
            }
        }
    }
    out
}

/// Witness for the failure of the Virasoro field equation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NovirWitness {
    pub z_order: i64,
    pub lambda_power: u32,
    pub coefficient: ParamPoly,
}

/// Result of the no-finite-Virasoro mechanization at one central charge.
#[derive(Clone, PartialEq, Debug)]
pub struct NovirReport {
    /// The singular part of the candidate series is `2/z^2 + del/z`.
    pub singular_ok: bool,
    /// The linear differential equation control has exactly zero residual
    /// through this order.
    pub diffeq_zero_through: Option<i64>,
    /// First coefficient where the field equation fails; `None` means the
    /// window was too small and the order should be raised.
    pub virl_witness: Option<NovirWitness>,
    pub window: Window,
}

fn novir_candidate(c: &Rational, order: i64) -> Result<LaurentWindow<ParamPoly>, VaError> {
    let del = ParamPoly::symbol(Symbol::Del);
    // (e^{z del/2} - 1) = (z del/2) v(z) with v a unit series
    let v_series = LaurentWindow::one_var(
        Window::one_var(0, order),
        (0..=order).map(|j| {
            let c = rat_int(1) / (rat(2, 1).pow(j as i32) * factorial(j as u32 + 1));
            (j, del.pow(j as u32).scale(&c))
        }),
    );
    let v_inv = invert_unit_series(&v_series)?;
    let v_inv2 = window_mul(&v_inv, &v_inv)?;
    let ezd = truncated_exp(&del, order);
    let main = window_mul(&ezd, &v_inv2)?.shift(-2, 0).scale(&rat_int(2));
    let one = LaurentWindow::one_var(Window::one_var(0, order), [(0i64, ParamPoly::one())]);
    let tail = ezd.add(&one)?.map_coeffs(|p| p.mul(&del.pow(2)).scale(&(-c.clone() / rat_int(8))));
    Ok(main.add(&tail)?)
}

/// Build the candidate Virasoro field coefficient series, verify the
/// differential-equation control, and return the first failing coefficient
/// of the field equation for central charge `c`.
pub fn novir_verify(c: &Rational, k: i64) -> Result<NovirReport, VaError> {
    if k < 4 {
        return Err(VaError::OrderTooSmall { got: k, need: 4 });
    }
    let order = k + 4;
    let del = ParamPoly::symbol(Symbol::Del);
    let lam = ParamPoly::symbol(Symbol::Lambda);
    let a = novir_candidate(c, order)?;

    let sing2 = a.coeff_checked(-2, 0)?.cloned().unwrap_or_else(ParamPoly::zero);
    let sing1 = a.coeff_checked(-1, 0)?.cloned().unwrap_or_else(ParamPoly::zero);
    let singular_ok = sing2 == ParamPoly::int(2) && sing1 == del;

    let one = LaurentWindow::one_var(Window::one_var(0, order), [(0i64, ParamPoly::one())]);
    let ap = a.d_dz();
    let em = truncated_exp(&del.scale(&rat(-1, 2)), order);
    let em1 = em.sub(&one)?;
    let ezd = truncated_exp(&del, order);
    let c_del3_8 = del.pow(3).scale(&(c.clone() / rat_int(8)));
    let diffeq = window_mul(&em1, &ap)?
        .sub(&window_mul(&em.map_coeffs(|p| p.mul(&del)), &a)?)?
        .sub(&ezd.add(&em)?.map_coeffs(|p| p.mul(&c_del3_8)))?;
    let diffeq_zero_through = if diffeq.is_zero_on_window() {
        Some(diffeq.window.high[0].min(k))
    } else {
        None
    };

    let elz = truncated_exp(&lam, order);
    let elz1 = elz.sub(&one)?;
    let two_lam = lam.scale(&rat_int(2));
    let factor = elz.map_coeffs(|p| p.mul(&two_lam)).add(
        &LaurentWindow::one_var(Window::one_var(0, order), [(0i64, two_lam.add(&del))]),
    )?;
    let c_lam3 = lam.pow(3).scale(c);
    let tail = elz.add(&ezd)?.map_coeffs(|p| p.mul(&c_lam3));
    let del_plus_lam = del.add(&lam);
    let a_shift = a.map_coeffs(|p| p.substitute(Symbol::Del, &del_plus_lam));
    let shifted = a_shift.map_coeffs(|p| p.mul(&del_plus_lam.add(&lam)));
    let virl = window_mul(&elz1, &ap)?
        .add(&mul_with(&factor, &a, |f, p| f.mul(p))?)?
        .add(&tail)?
        .sub(&shifted)?;
    let virl_witness = virl.first_nonzero().map(|((i, _), coeff)| {
        let (lp, slice) = coeff
            .decompose(Symbol::Lambda)
            .into_iter()
            .find(|(_, s)| !s.is_zero())
            .expect("nonzero coefficient has a nonzero lambda slice");
        NovirWitness { z_order: i, lambda_power: lp, coefficient: slice }
    });
    Ok(NovirReport { singular_ok, diffeq_zero_through, virl_witness, window: virl.window })
}

/// Build the two-generator table `Y(a, z) a = e^{z del / 2} psi(z) b` over
/// free `a`, `b` and a vacuum, with windows sized from the pole order of
/// `psi`. Odd exponents in `psi` are rejected unless explicitly allowed.
pub fn make_finitevertex(
    psi: &BTreeMap<i64, Rational>,
    allow_odd: bool,
) -> Result<VertexTable, VaError> {
    if !allow_odd {
        if let Some((&e, _)) = psi.iter().find(|(e, c)| e.rem_euclid(2) == 1 && !c.is_zero()) {
            return Err(VaError::OddPsi(e));
        }
    }
    let module = FgModule::with_torsion(&["a", "b"], &["vac"], QMatrix::zero(1, 1))
        .expect("finitevertex module shape");
    let m = &module;
    let support: Vec<i64> = psi.iter().filter(|(_, c)| !c.is_zero()).map(|(&e, _)| e).collect();
    let pole = support.iter().map(|&e| (-e).max(0)).max().unwrap_or(0);
    let high = pole + 8;
    let floor = support.iter().copied().min().unwrap_or(0);
    let b = ModElement::generator(m, Gen(1));
    let mut aa = LaurentWindow::zero(VarSet::Z, Window::one_var(floor, high));
    for (&p, cp) in psi.iter().filter(|(_, c)| !c.is_zero()) {
        let mut k: u32 = 0;
        while p + (k as i64) <= high {
            let c = cp * (rat_int(1) / (rat(2, 1).pow(k as i32) * factorial(k)));
            let coeff = b.mul_poly(m, &ParamPoly::monomial(Symbol::Del, k, c));
            aa.add_term(p + k as i64, 0, coeff);
            k += 1;
        }
    }
    aa.normalize();
    let creation = |g: Gen| {
        LaurentWindow::one_var(
            Window::one_var(0, high),
            (0..=high).map(|k| {
                let p = ParamPoly::monomial(Symbol::Del, k as u32, rat_int(1) / factorial(k as u32));
                (k, ModElement::generator(m, g).mul_poly(m, &p))
            }),
        )
    };
    let ident = |g: Gen| {
        LaurentWindow::one_var(Window::exact(0, 0, 0), [(0i64, ModElement::generator(m, g))])
    };
    let zero = exact_zero_series();
    let fields = vec![
        vec![aa, zero.clone(), creation(Gen(0))],
        vec![zero.clone(), zero.clone(), creation(Gen(1))],
        vec![ident(Gen(0)), ident(Gen(1)), ident(Gen(2))],
    ];
    VertexTable::new("finitevertex", module.clone(), Gen(2), fields)
}

/// Build the holomorphic table of the truncated polynomial algebra
/// `Q[x]/(x^dim)` with the derivation `T(x) = der(x)`, as
/// `Y(a, z) b = (e^{z del} a) b`. The derivation image must have zero
/// constant term so the quotient relation is respected.
pub fn make_holomorphic(dim: usize, der: &[Rational]) -> Result<VertexTable, VaError> {
    assert!(dim >= 1, "the algebra needs its unit");
    if der.first().map(|c| !c.is_zero()).unwrap_or(false) {
        return Err(VaError::DerivationConstant);
    }
    let names: Vec<String> = (0..dim).map(|k| if k == 0 { "one".to_string() } else { format!("x{k}") }).collect();
    let name_refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    // column k holds T(x^k) = k x^{k-1} der(x) in the monomial basis
    let mut td = QMatrix::zero(dim, dim);
    for k in 1..dim {
        for (j, c) in der.iter().enumerate() {
            let deg = k - 1 + j;
            if deg < dim && !c.is_zero() {
                let prev = td.get(deg, k).clone();
                td.set(deg, k, prev + c * rat_int(k as i64));
            }
        }
    }
    let module = FgModule::with_torsion(&[], &name_refs, td.clone())?;
    let m = &module;
    let mul = |a: usize, b: usize| -> Option<usize> {
        let s = a + b;
        if s < dim {
            Some(s)
        } else {
            None
        }
    };
    let nilpotent = td.pow(dim as u32).is_zero();
    let high: i64 = if nilpotent { EXACT } else { 8 };
    let t_of = |vec: &Vec<Rational>| -> Vec<Rational> {
        let mut out = vec![Rational::zero(); dim];
        for (k, c) in vec.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for r in 0..dim {
                let t = td.get(r, k);
                if !t.is_zero() {
                    out[r] += c * t;
                }
            }
        }
        out
    };
    let mut fields = Vec::with_capacity(dim);
    for i in 0..dim {
        let mut row = Vec::with_capacity(dim);
        for j in 0..dim {
            let window = if nilpotent { Window::exact(0, 0, 0) } else { Window::one_var(0, high) };
            let mut s = LaurentWindow::zero(VarSet::Z, window);
            // e^{zT} x^i as coordinates, multiplied by x^j per order
            let mut vec = vec![Rational::zero(); dim];
            vec[i] = Rational::one();
            let mut k: i64 = 0;
            while vec.iter().any(|c| !c.is_zero()) && k <= high {
                let mut coeff = ModElement::zero(m);
                for (deg, c) in vec.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    if let Some(t) = mul(deg, j) {
                        coeff.torsion[t] = coeff.torsion[t].add(&ParamPoly::constant(c.clone()));
                    }
                }
                if !ModElement::is_zero(&coeff) {
                    s.add_term(k, 0, coeff);
                }
                k += 1;
                let inv = rat_int(1) / rat_int(k);
                vec = t_of(&vec).into_iter().map(|c| c * &inv).collect();
            }
            s.normalize();
            row.push(s);
        }
        fields.push(row);
    }
    VertexTable::new("holomorphic", module.clone(), Gen(0), fields)
}

impl From<crate::cdmod::ModuleError> for VaError {
    fn from(e: crate::cdmod::ModuleError) -> Self {
        VaError::Shadow(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi_z2() -> BTreeMap<i64, Rational> {
        BTreeMap::from([(-2, rat_int(1))])
    }

    fn table_z2() -> VertexTable {
        make_finitevertex(&psi_z2(), false).unwrap()
    }

    fn elem(v: &VertexTable, name: &str) -> ModElement {
        v.gen_elem(name).unwrap()
    }

    fn del_pow(m: &FgModule, e: &ModElement, k: u32, c: Rational) -> ModElement {
        e.mul_poly(m, &ParamPoly::monomial(Symbol::Del, k, c))
    }

    #[test]
    fn products_of_the_two_generator_table_match_the_expansion() {
        let v = table_z2();
        let m = v.module();
        let a = elem(&v, "a");
        let b = elem(&v, "b");
        assert_eq!(product(&v, &a, &a, 1).unwrap(), b);
        assert_eq!(product(&v, &a, &a, 0).unwrap(), del_pow(m, &b, 1, rat(1, 2)));
        assert_eq!(wick(&v, &a, &a).unwrap(), del_pow(m, &b, 2, rat(1, 8)));
        assert_eq!(product(&v, &a, &a, 2).unwrap(), ModElement::zero(m));
    }

    #[test]
    fn vacuum_products_pick_out_the_identity_field() {
        let v = table_z2();
        let m = v.module();
        let a = elem(&v, "a");
        let vac = elem(&v, "vac");
        assert_eq!(wick(&v, &vac, &a).unwrap(), a);
        assert_eq!(product(&v, &vac, &a, 0).unwrap(), ModElement::zero(m));
        assert_eq!(product(&v, &vac, &a, -3).unwrap(), ModElement::zero(m));
        assert_eq!(wick(&v, &a, &vac).unwrap(), a);
        assert_eq!(product(&v, &a, &vac, -2).unwrap(), del_pow(m, &a, 1, rat_int(1)));
    }

    #[test]
    fn products_beyond_the_ceiling_error_instead_of_lying() {
        let v = table_z2();
        let a = elem(&v, "a");
        let vac = elem(&v, "vac");
        let err = product(&v, &a, &vac, -12).unwrap_err();
        assert!(matches!(err, VaError::Window(WindowError::OutOfWindow { .. })));
    }

    #[test]
    fn translation_rules_extend_products_to_del_multiples() {
        let v = table_z2();
        let m = v.module();
        let a = elem(&v, "a");
        let da = del_pow(m, &a, 1, rat_int(1));
        let b = elem(&v, "b");
        // Y(del a, z) a = d/dz Y(a, z) a = -2 z^-3 b - z^-2 (del/2) b + ...
        assert_eq!(product(&v, &da, &a, 1).unwrap(), del_pow(m, &b, 1, rat(-1, 2)));
        assert_eq!(product(&v, &da, &a, 2).unwrap(), b.scale(&rat_int(-2)));
        // Y(a, z)(del a) = (del - d/dz) Y(a, z) a
        assert_eq!(product(&v, &a, &da, 0).unwrap(), del_pow(m, &b, 2, rat(1, 2)));
        assert_eq!(product(&v, &a, &da, 1).unwrap(), del_pow(m, &b, 1, rat(3, 2)));
    }

    #[test]
    fn axiom_suite_passes_on_even_psi_tables() {
        for psi in [
            BTreeMap::new(),
            psi_z2(),
            BTreeMap::from([(-4, rat_int(1)), (-2, rat_int(1))]),
            BTreeMap::from([(-2, rat(3, 7)), (0, rat_int(2)), (2, rat(-1, 3))]),
        ] {
            let v = make_finitevertex(&psi, false).unwrap();
            let rep = check_vertex_axioms(&v).unwrap();
            assert!(rep.passed(), "failures: {:?}", rep.failures);
        }
    }

    #[test]
    fn corrupted_skew_partner_is_caught_with_its_order() {
        let mut v = table_z2();
        let m = v.module().clone();
        let b = ModElement::generator(&m, Gen(1));
        let bad = LaurentWindow::one_var(Window::one_var(0, 8), [(1i64, b)]);
        v.set_field(Gen(0), Gen(1), bad);
        let rep = check_vertex_axioms(&v).unwrap();
        let skew: Vec<_> =
            rep.failures.iter().filter(|f| f.axiom == VertexAxiom::Skew).collect();
        assert!(!skew.is_empty());
        assert_eq!(skew[0].z_order, 1);
    }

    #[test]
    fn odd_psi_is_rejected_without_the_escape_hatch() {
        let psi = BTreeMap::from([(-3, rat_int(1))]);
        assert_eq!(make_finitevertex(&psi, false).unwrap_err(), VaError::OddPsi(-3));
        assert!(make_finitevertex(&psi, true).is_ok());
    }

    #[test]
    fn locality_order_matches_the_pole_order_of_psi() {
        let v = table_z2();
        let a = elem(&v, "a");
        let vac = elem(&v, "vac");
        let rep = locality_check(&v, &a, &a, &vac, 8).unwrap();
        assert_eq!(rep.verdict, LocalityVerdict::MinimalN { n: 2 });

        let psi4 = BTreeMap::from([(-4, rat_int(1)), (-2, rat_int(1))]);
        let v4 = make_finitevertex(&psi4, false).unwrap();
        let rep4 = locality_check(&v4, &elem(&v4, "a"), &elem(&v4, "a"), &elem(&v4, "vac"), 8).unwrap();
        assert_eq!(rep4.verdict, LocalityVerdict::MinimalN { n: 4 });

        let b = elem(&v, "b");
        let repb = locality_check(&v, &b, &b, &a, 8).unwrap();
        assert_eq!(repb.verdict, LocalityVerdict::MinimalN { n: 0 });
    }

    #[test]
    fn odd_psi_fails_locality_at_every_order() {
        let psi = BTreeMap::from([(-3, rat_int(1))]);
        let v = make_finitevertex(&psi, true).unwrap();
        let a = elem(&v, "a");
        let vac = elem(&v, "vac");
        let rep = locality_check(&v, &a, &a, &vac, 8).unwrap();
        assert_eq!(rep.verdict, LocalityVerdict::FailsThrough { n_max: 8 });
        assert!(rep.witness.is_some());
    }

    #[test]
    fn shadow_of_the_two_generator_table_is_the_expected_bracket() {
        let v = table_z2();
        let m = v.module();
        let a = elem(&v, "a");
        let b = elem(&v, "b");
        let br = shadow_bracket(&v, &a, &a).unwrap();
        let expected = b
            .mul_poly(m, &ParamPoly::monomial(Symbol::Del, 1, rat(1, 2)))
            .add(&b.mul_poly(m, &ParamPoly::symbol(Symbol::Lambda)));
        assert_eq!(br, expected);
        let shadow = conformal_shadow(&v).unwrap();
        assert!(shadow.check_axioms().is_empty());
        assert_eq!(shadow.central_series(8).outcome, SeriesOutcome::ReachedZero { steps: 2 });
        assert_eq!(shadow.derived_series(8).outcome, SeriesOutcome::ReachedZero { steps: 2 });
    }

    #[test]
    fn genwick_holds_on_all_generator_triples() {
        let v = table_z2();
        let gens = ["a", "b", "vac"];
        for x in gens {
            for y in gens {
                for z in gens {
                    let rep =
                        genwick_check(&v, &elem(&v, x), &elem(&v, y), &elem(&v, z)).unwrap();
                    assert!(rep.pass, "triple ({x}, {y}, {z}): {:?}", rep.witness);
                }
            }
        }
    }

    #[test]
    fn genwick_pinpoints_a_corrupted_coefficient() {
        let mut v = table_z2();
        let m = v.module().clone();
        let mut aa = v.field(Gen(0), Gen(0)).clone();
        aa.add_term(-1, 0, ModElement::generator(&m, Gen(0)));
        v.set_field(Gen(0), Gen(0), aa);
        let a = elem(&v, "a");
        let rep = genwick_check(&v, &a, &a, &a).unwrap();
        assert!(!rep.pass);
        assert!(rep.witness.is_some());
    }

    #[test]
    fn liebracket_identity_holds_on_admissible_orders() {
        let v = table_z2();
        let gens = ["a", "b", "vac"];
        for x in gens {
            for y in gens {
                for z in gens {
                    let rep = liebracket_check(
                        &v,
                        &elem(&v, x),
                        &elem(&v, y),
                        &elem(&v, z),
                        (-4, 3),
                        (-4, 3),
                    )
                    .unwrap();
                    assert!(rep.checked > 0);
                    assert!(rep.failures.is_empty(), "({x},{y},{z}): {:?}", rep.failures);
                }
            }
        }
    }

    #[test]
    fn nil_ideal_chain_of_the_two_generator_table() {
        let v = table_z2();
        let m = v.module();
        let a = ModElement::generator(m, Gen(0));
        let b = ModElement::generator(m, Gen(1));
        let i = Submodule::span(m, &[a, b.clone()]);
        let rep = is_nil_ideal(&v, &i, 8).unwrap();
        assert_eq!(rep.outcome, SeriesOutcome::ReachedZero { steps: 2 });
        assert_eq!(rep.chain[1], Submodule::span(m, &[b]));
        let zero = Submodule::span(m, &[]);
        assert_eq!(is_nil_ideal(&v, &zero, 8).unwrap().outcome, SeriesOutcome::ReachedZero { steps: 0 });
    }

    #[test]
    fn bracket_series_stabilizes_at_zero_inside_the_nilradical() {
        let v = table_z2();
        let m = v.module();
        let rep = brackets_series(&v, 8).unwrap();
        assert_eq!(rep.series.outcome, SeriesOutcome::ReachedZero { steps: 2 });
        let b = ModElement::generator(m, Gen(1));
        assert_eq!(rep.series.chain[1], Submodule::span(m, &[b]));
        assert!(matches!(
            rep.stable_term_nil.as_ref().unwrap().outcome,
            SeriesOutcome::ReachedZero { .. }
        ));
    }

    #[test]
    fn product_spans_respect_the_skew_closure_inclusion() {
        let v = table_z2();
        let m = v.module();
        let a = Submodule::span(m, &[ModElement::generator(m, Gen(0))]);
        let whole = Submodule::whole(m);
        let ab = ideal_product(&v, &a, &whole).unwrap().span;
        let ba = ideal_product(&v, &whole, &a).unwrap().span;
        for r in ab.rows() {
            assert!(ba.member(m, r));
        }
    }

    #[test]
    fn square_zero_generator_yields_a_certified_abelian_ideal() {
        let v = table_z2();
        let m = v.module();
        let b = ModElement::generator(m, Gen(1));
        let rep = square_zero_ideal(&v, &b).unwrap();
        assert!(rep.square_is_zero);
        assert!(rep.ideal.closure_certified);
        assert!(rep.abelian);
        assert_eq!(rep.ideal.submodule, Submodule::span(m, &[b]));
    }

    #[test]
    fn two_generator_table_is_not_reduced_so_no_claim_is_made() {
        let v = table_z2();
        let rep = reduced_consequence_check(&v, 8).unwrap();
        assert!(!rep.nilradical.reduced_within_window);
        assert!(rep.claims.is_none());
    }

    #[test]
    fn holomorphic_tables_satisfy_the_axioms_and_identities() {
        let v = make_holomorphic(3, &[rat_int(0), rat_int(0), rat_int(1)]).unwrap();
        let rep = check_vertex_axioms(&v).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        let gens = ["one", "x1", "x2"];
        for x in gens {
            for y in gens {
                for z in gens {
                    let g = genwick_check(&v, &elem(&v, x), &elem(&v, y), &elem(&v, z)).unwrap();
                    assert!(g.pass, "({x},{y},{z})");
                }
            }
        }
        let x1 = elem(&v, "x1");
        let x2 = elem(&v, "x2");
        assert_eq!(wick(&v, &x1, &x1).unwrap(), x2);
        assert_eq!(wick(&v, &x1, &x2).unwrap(), ModElement::zero(v.module()));
    }

    #[test]
    fn holomorphic_point_algebra_is_reduced_with_nilpotent_consequences() {
        let v = make_holomorphic(1, &[]).unwrap();
        let rep = reduced_consequence_check(&v, 8).unwrap();
        assert!(rep.nilradical.reduced_within_window);
        let claims = rep.claims.unwrap();
        assert!(claims.adjoints_nilpotent.iter().all(|(_, ok)| *ok));
        assert!(claims.central_series_reaches_zero);
    }

    #[test]
    fn kernel_of_a_central_constant_field_is_an_ideal() {
        let v = make_holomorphic(3, &[]).unwrap();
        let m = v.module();
        let rep = kernel_ideal_check(&v, Gen(2), 3).unwrap();
        assert!(rep.constant_field);
        let x1 = ModElement::generator(m, Gen(1));
        let x2 = ModElement::generator(m, Gen(2));
        assert_eq!(rep.kernel, Submodule::span(m, &[x1, x2]));
        assert!(rep.ideal.closure_certified);
    }

    #[test]
    fn weight_ideal_check_is_vacuous_on_the_nilpotent_table() {
        let v = table_z2();
        let shadow = conformal_shadow(&v).unwrap();
        let adj = gcmat::adjoint_matrix(&shadow, &elem(&v, "a"));
        let rep = weight_ideal_check(&v, &adj, 3, 8).unwrap();
        assert!(rep.vacuous);
    }

    #[test]
    fn nonzero_weight_space_certifies_as_a_square_zero_ideal() {
        // Y(s, z) x = z^{-2} x gives [s lambda x] = lambda x, so x spans the
        // weight-lambda space of ad s.
        let module = FgModule::with_torsion(&["s", "x"], &["vac"], QMatrix::zero(1, 1)).unwrap();
        let m = &module;
        let x = ModElement::generator(m, Gen(1));
        let high = 8;
        let sx = LaurentWindow::one_var(Window::one_var(-2, high), [(-2i64, x.clone())]);
        let xs = {
            let mut s = LaurentWindow::zero(VarSet::Z, Window::one_var(-2, high));
            let mut k: u32 = 0;
            while (k as i64) - 2 <= high {
                let p = ParamPoly::monomial(Symbol::Del, k, rat_int(1) / factorial(k));
                s.add_term(k as i64 - 2, 0, x.mul_poly(m, &p));
                k += 1;
            }
            s.normalize();
            s
        };
        let creation = |g: Gen| {
            LaurentWindow::one_var(
                Window::one_var(0, high),
                (0..=high).map(|k| {
                    let p = ParamPoly::monomial(
                        Symbol::Del,
                        k as u32,
                        rat_int(1) / factorial(k as u32),
                    );
                    (k, ModElement::generator(m, g).mul_poly(m, &p))
                }),
            )
        };
        let ident = |g: Gen| {
            LaurentWindow::one_var(Window::exact(0, 0, 0), [(0i64, ModElement::generator(m, g))])
        };
        let zero = exact_zero_series();
        let fields = vec![
            vec![zero.clone(), sx, creation(Gen(0))],
            vec![xs, zero.clone(), creation(Gen(1))],
            vec![ident(Gen(0)), ident(Gen(1)), ident(Gen(2))],
        ];
        let v = VertexTable::new("weighted", module.clone(), Gen(2), fields).unwrap();
        let shadow = conformal_shadow(&v).unwrap();
        let adj = gcmat::adjoint_matrix(&shadow, &ModElement::generator(m, Gen(0)));
        let rep = weight_ideal_check(&v, &adj, 3, 8).unwrap();
        assert!(!rep.vacuous);
        assert_eq!(rep.checks.len(), 1);
        assert_eq!(rep.checks[0].weight, ParamPoly::symbol(Symbol::Lambda));
        assert!(rep.checks[0].ideal_certified);
        assert!(rep.checks[0].square_zero);
    }

    #[test]
    fn novir_control_passes_and_field_equation_fails_finitely() {
        for c in [rat_int(0), rat_int(1)] {
            let rep = novir_verify(&c, 8).unwrap();
            assert!(rep.singular_ok);
            assert_eq!(rep.diffeq_zero_through, Some(8));
            let w = rep.virl_witness.expect("failure witness within the window");
            assert_eq!(w.z_order, 0);
            assert_eq!(w.lambda_power, 2);
        }
    }

    #[test]
    fn novir_witness_coefficients_are_pinned() {
        let w0 = novir_verify(&rat_int(0), 8).unwrap().virl_witness.unwrap();
        assert_eq!(w0.coefficient, ParamPoly::monomial(Symbol::Del, 1, rat(11, 24)));
        let w1 = novir_verify(&rat_int(1), 8).unwrap().virl_witness.unwrap();
        assert_eq!(w1.coefficient, ParamPoly::monomial(Symbol::Del, 1, rat(41, 24)));
    }

    #[test]
    fn novir_rejects_too_small_orders() {
        assert!(matches!(
            novir_verify(&rat_int(0), 3),
            Err(VaError::OrderTooSmall { got: 3, need: 4 })
        ));
    }
}
