//! Conformal matrix calculus: endomorphism-style operators on a finitely
//! generated del-module, stored column-wise. Column `c` is the image of the
//! free generator `c`; `lambda` is the operator's conformal variable, and
//! applying the operator shifts argument coefficients by the acting
//! variable (`F(p(del) v) = p(del + lambda) F(v)`).
//!
//! Torsion generators are annihilated (their columns are identically zero),
//! while torsion coefficients in a column stay del-free and are acted on
//! through the torsion matrix when polynomials arrive from the argument.
//!
//! The bracket `[F _alpha G]` evaluates `F` at `alpha` and `G` at
//! `lambda - alpha`; the result is again a matrix in `lambda` carrying
//! `alpha` as a scalar parameter, ready to be sliced by `alpha` powers.
//!
//! Weights are del-free polynomials `phi(lambda)`; the generalized weight
//! chain solves `F(v) - phi(lambda) v  in  V_i` over a bounded-degree
//! ansatz. Individual chain members are not del-stable for nonzero weights
//! (the ladder climbs one chain step per del), so chains live in plain
//! rational subspaces and only the stabilized union is exported as a
//! submodule after a del-closure check.

use num::Zero;
use thiserror::Error;

use crate::cdmod::{FgModule, Gen, ModElement, QSpace, Submodule};
use crate::exact::linalg::QMatrix;
use crate::exact::poly::{ParamPoly, Symbol};
use crate::exact::rational::{rat_int, Rational};
use crate::lca::{ConformalAlgebra, SeriesOutcome};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GcError {
    #[error("expected one column per free generator, got {0}")]
    ColumnCount(usize),
    #[error("column {0} does not live in the module")]
    ColumnShape(usize),
    #[error("column {0} has a torsion coefficient containing del")]
    ColumnTorsionDel(usize),
    #[error("column {0} uses a parameter other than lambda")]
    ColumnForeignParam(usize),
    #[error("matrix is not triangular in the given generator order")]
    NotTriangular,
    #[error("weight candidate must be a del-free polynomial in lambda")]
    WeightShape,
    #[error("bracket self-chain stabilized nonzero: the operator is not bracket-nilpotent")]
    BracketChainNotNilpotent,
}

/// A conformal operator in matrix form; columns are images of the free
/// generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConformalMatrix {
    cols: Vec<ModElement>,
}

impl ConformalMatrix {
    /// Build from columns in `del` and `lambda`; torsion coefficients must
    /// be del-free, and no foreign parameters are allowed.
    pub fn new(m: &FgModule, cols: Vec<ModElement>) -> Result<Self, GcError> {
        if cols.len() != m.free_rank() {
            return Err(GcError::ColumnCount(cols.len()));
        }
        for (c, col) in cols.iter().enumerate() {
            if !col.matches(m) {
                return Err(GcError::ColumnShape(c));
            }
            if col.torsion.iter().any(|p| p.contains(Symbol::Del)) {
                return Err(GcError::ColumnTorsionDel(c));
            }
            let foreign = col
                .free
                .iter()
                .chain(col.torsion.iter())
                .any(|p| p.contains(Symbol::Mu) || p.contains(Symbol::Alpha));
            if foreign {
                return Err(GcError::ColumnForeignParam(c));
            }
        }
        Ok(ConformalMatrix { cols })
    }

    fn from_cols_unchecked(cols: Vec<ModElement>) -> Self {
        ConformalMatrix { cols }
    }

    pub fn zero(m: &FgModule) -> Self {
        ConformalMatrix { cols: vec![ModElement::zero(m); m.free_rank()] }
    }

    /// The translation operator: `v -> (del + lambda) v`.
    pub fn del_operator(m: &FgModule) -> Self {
        let coeff = ParamPoly::symbol(Symbol::Del).add(&ParamPoly::symbol(Symbol::Lambda));
        let cols = (0..m.free_rank())
            .map(|c| ModElement::generator(m, Gen(c)).mul_poly(m, &coeff))
            .collect();
        ConformalMatrix { cols }
    }

    pub fn col(&self, c: usize) -> &ModElement {
        &self.cols[c]
    }

    pub fn cols(&self) -> &[ModElement] {
        &self.cols
    }

    /// Entry at target generator `r` (free or torsion) and free source `c`.
    pub fn entry(&self, m: &FgModule, r: usize, c: usize) -> &ParamPoly {
        if r < m.free_rank() {
            &self.cols[c].free[r]
        } else {
            &self.cols[c].torsion[r - m.free_rank()]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        ConformalMatrix {
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        ConformalMatrix {
            cols: self.cols.iter().zip(&other.cols).map(|(a, b)| a.sub(b)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        ConformalMatrix { cols: self.cols.iter().map(|c| c.neg()).collect() }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        ConformalMatrix { cols: self.cols.iter().map(|c| c.scale(r)).collect() }
    }

    /// Do any columns carry the bracket parameter `alpha`?
    pub fn has_alpha(&self) -> bool {
        self.cols
            .iter()
            .any(|c| c.free.iter().chain(c.torsion.iter()).any(|p| p.contains(Symbol::Alpha)))
    }

    /// Split the columns by powers of `alpha`: each slice is a matrix in
    /// `lambda` alone.
    pub fn alpha_slices(&self) -> Vec<(u32, ConformalMatrix)> {
        let mut max = 0;
        for c in &self.cols {
            for p in c.free.iter().chain(c.torsion.iter()) {
                max = max.max(p.degree_in(Symbol::Alpha));
            }
        }
        let mut out = Vec::new();
        for k in 0..=max {
            let cols: Vec<ModElement> = self
                .cols
                .iter()
                .map(|c| ModElement {
                    free: c.free.iter().map(|p| p.coeff_of(Symbol::Alpha, k)).collect(),
                    torsion: c.torsion.iter().map(|p| p.coeff_of(Symbol::Alpha, k)).collect(),
                })
                .collect();
            let m = ConformalMatrix { cols };
            if !m.is_zero() {
                out.push((k, m));
            }
        }
        out
    }

    /// Apply at the evaluation point `at` (a polynomial in scalar
    /// parameters): the matrix variable becomes `at` and argument
    /// coefficients shift `del -> del + at`.
    pub fn apply_at(&self, m: &FgModule, v: &ModElement, at: &ParamPoly) -> ModElement {
        assert!(!at.contains(Symbol::Del), "evaluation point must be scalar");
        let shift = ParamPoly::symbol(Symbol::Del).add(at);
        let mut out = ModElement::zero(m);
        for c in 0..m.free_rank() {
            let vc = &v.free[c];
            if vc.is_zero() || self.cols[c].is_zero() {
                continue;
            }
            let col = subst_sym(&self.cols[c], Symbol::Lambda, at);
            out = out.add(&col.mul_poly(m, &vc.substitute(Symbol::Del, &shift)));
        }
        out
    }

    /// Apply with the operator's own variable `lambda`.
    pub fn apply(&self, m: &FgModule, v: &ModElement) -> ModElement {
        self.apply_at(m, v, &ParamPoly::symbol(Symbol::Lambda))
    }

    /// `[X _at H]` for a scalar evaluation point, column-wise:
    /// `X_at(H_{lambda-at}(g)) - H_{lambda-at}(X_at(g))`.
    pub fn gc_bracket_eval(m: &FgModule, x: &Self, h: &Self, at: &ParamPoly) -> Self {
        let lam_minus = ParamPoly::symbol(Symbol::Lambda).sub(at);
        let mut cols = Vec::with_capacity(m.free_rank());
        for j in 0..m.free_rank() {
            let hj = subst_sym(h.col(j), Symbol::Lambda, &lam_minus);
            let t1 = x.apply_at(m, &hj, at);
            let xj = subst_sym(x.col(j), Symbol::Lambda, at);
            let t2 = h.apply_at(m, &xj, &lam_minus);
            cols.push(t1.sub(&t2));
        }
        ConformalMatrix::from_cols_unchecked(cols)
    }

    /// `[F _alpha G]` with `alpha` as the bracket parameter.
    pub fn gc_bracket(m: &FgModule, f: &Self, g: &Self) -> Self {
        Self::gc_bracket_eval(m, f, g, &ParamPoly::symbol(Symbol::Alpha))
    }

    /// Largest del-degree over all column coefficients.
    pub fn max_del_degree(&self) -> u32 {
        self.cols.iter().map(|c| c.degree_in_del()).max().unwrap_or(0)
    }

    pub fn show(&self, m: &FgModule) -> String {
        let mut rows = Vec::new();
        for (c, col) in self.cols.iter().enumerate() {
            rows.push(format!("{} -> {}", m.gen_name(Gen(c)), col.show(m)));
        }
        rows.join("; ")
    }
}

/// Textual substitution of a scalar symbol across an element's coefficients.
fn subst_sym(e: &ModElement, sym: Symbol, image: &ParamPoly) -> ModElement {
    ModElement {
        free: e.free.iter().map(|p| p.substitute(sym, image)).collect(),
        torsion: e.torsion.iter().map(|p| p.substitute(sym, image)).collect(),
    }
}

/// Matrix of the adjoint action of a lambda-free element: column `j` is the
/// bracket of the element with generator `j`.
pub fn adjoint_matrix(alg: &ConformalAlgebra, a: &ModElement) -> ConformalMatrix {
    let m = alg.module();
    let cols = (0..m.free_rank())
        .map(|j| alg.bracket(a, &ModElement::generator(m, Gen(j))))
        .collect();
    ConformalMatrix::from_cols_unchecked(cols)
}

/// Descending image chain of a matrix action with its verdict.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ActionChainReport {
    pub terms: Vec<Submodule>,
    pub outcome: SeriesOutcome,
}

/// Iterate the module through the matrix action: term `k+1` is the span of
/// the lambda-coefficients of images of term `k`. Reaching zero certifies
/// nilpotency of the action; a nonzero fixed point refutes it.
pub fn action_nilpotent(m: &FgModule, f: &ConformalMatrix, max_steps: usize) -> ActionChainReport {
    assert!(!f.has_alpha(), "action chains need a pure lambda matrix");
    let mut terms = vec![Submodule::whole(m)];
    for s in 1..=max_steps {
        let prev = terms.last().unwrap();
        let mut gens = Vec::new();
        for r in prev.rows() {
            let img = f.apply(m, r);
            if !img.is_zero() {
                gens.push(img);
            }
        }
        let next = Submodule::span(m, &gens);
        if next.is_zero_module() {
            terms.push(next);
            return ActionChainReport { terms, outcome: SeriesOutcome::ReachedZero { steps: s } };
        }
        if &next == terms.last().unwrap() {
            terms.push(next);
            return ActionChainReport { terms, outcome: SeriesOutcome::Stabilized { steps: s } };
        }
        terms.push(next);
    }
    ActionChainReport { terms, outcome: SeriesOutcome::Inconclusive { steps: max_steps } }
}

/// Verdict for the self-bracket chain of a matrix: iterated
/// `[F _alpha -]`-brackets applied to alpha-slices. Reaching all-zero
/// certifies bracket nilpotency; a stabilized nonzero slice span refutes it.
pub fn bracket_self_chain(m: &FgModule, f: &ConformalMatrix, max_steps: usize) -> SeriesOutcome {
    let mut current: Vec<ConformalMatrix> = vec![f.clone()];
    let mut prev_span: Option<Vec<Vec<Rational>>> = None;
    for s in 1..=max_steps {
        let mut next = Vec::new();
        for g in &current {
            let b = ConformalMatrix::gc_bracket(m, f, g);
            for (_, slice) in b.alpha_slices() {
                next.push(slice);
            }
        }
        if next.is_empty() {
            return SeriesOutcome::ReachedZero { steps: s };
        }
        // compare spans of flattened coordinates at a shared bound
        let del_bound = next.iter().map(|x| x.max_del_degree()).max().unwrap_or(0);
        let lam_bound = next
            .iter()
            .flat_map(|x| x.cols.iter())
            .flat_map(|c| c.free.iter().chain(c.torsion.iter()))
            .map(|p| p.degree_in(Symbol::Lambda))
            .max()
            .unwrap_or(0);
        let coords: Vec<Vec<Rational>> = next
            .iter()
            .map(|x| matrix_coords(m, x, del_bound, lam_bound))
            .collect();
        let span = crate::exact::linalg::span_basis(&coords);
        if let Some(prev) = &prev_span {
            let same = span.len() == prev.len()
                && span.iter().all(|v| crate::exact::linalg::in_span(prev, v));
            if same {
                return SeriesOutcome::Stabilized { steps: s };
            }
        }
        prev_span = Some(span);
        current = next;
    }
    SeriesOutcome::Inconclusive { steps: max_steps }
}

fn matrix_coords(
    m: &FgModule,
    f: &ConformalMatrix,
    del_bound: u32,
    lam_bound: u32,
) -> Vec<Rational> {
    let mut out = Vec::new();
    for col in &f.cols {
        for k in 0..=lam_bound {
            let part = ModElement {
                free: col.free.iter().map(|p| p.coeff_of(Symbol::Lambda, k)).collect(),
                torsion: col.torsion.iter().map(|p| p.coeff_of(Symbol::Lambda, k)).collect(),
            };
            out.extend(part.to_coords(m, del_bound).expect("slices are parameter-free"));
        }
    }
    out
}

/// One generalized weight chain for `F(v) - phi(lambda) v in V_i`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct WeightReport {
    /// The del-free weight polynomial phi(lambda).
    pub weight: ParamPoly,
    /// Dimension of each chain step, starting from `V_0 = 0`.
    pub dims: Vec<usize>,
    /// The stabilized chain union restricted to the bounded slice.
    pub space: QSpace,
    /// True when the chain stopped growing within the step budget.
    pub stabilized: bool,
    /// True when applying del keeps interior elements in the space.
    pub del_closed_in_bound: bool,
    /// The union as a submodule, available when the closure check passed.
    pub submodule: Option<Submodule>,
}

/// Candidate weights read off the free diagonal of a matrix that is
/// triangular in the given generator order; diagonal entries containing
/// `del` are skipped (they are not weights).
pub fn weight_candidates(m: &FgModule, f: &ConformalMatrix) -> Result<Vec<ParamPoly>, GcError> {
    let total = m.total_gens();
    let n = m.free_rank();
    let mut upper = true;
    let mut lower = true;
    for c in 0..n {
        for r in 0..total {
            if f.entry(m, r, c).is_zero() {
                continue;
            }
            // torsion targets count as strictly late rows
            if r > c {
                upper = false;
            }
            if r < c {
                lower = false;
            }
        }
    }
    if !upper && !lower {
        return Err(GcError::NotTriangular);
    }
    let mut out: Vec<ParamPoly> = Vec::new();
    for c in 0..n {
        let diag = f.entry(m, c, c);
        if diag.contains(Symbol::Del) {
            continue;
        }
        if !out.contains(diag) {
            out.push(diag.clone());
        }
    }
    let zero = ParamPoly::zero();
    if !out.contains(&zero) {
        out.push(zero);
    }
    Ok(out)
}

/// Compute the generalized weight chain for one candidate over the bounded
/// ansatz.
pub fn weight_space(
    m: &FgModule,
    f: &ConformalMatrix,
    weight: &ParamPoly,
    deg_bound: u32,
    max_steps: usize,
) -> Result<WeightReport, GcError> {
    assert!(!f.has_alpha(), "weight chains need a pure lambda matrix");
    if weight.contains(Symbol::Del)
        || weight.contains(Symbol::Mu)
        || weight.contains(Symbol::Alpha)
    {
        return Err(GcError::WeightShape);
    }
    let inner_bound = deg_bound + f.max_del_degree() + 1;
    let ansatz = slice_basis(m, deg_bound);
    let residuals: Vec<Vec<(u32, ModElement)>> = ansatz
        .iter()
        .map(|e| {
            f.apply(m, e)
                .sub(&e.mul_poly(m, weight))
                .decompose(Symbol::Lambda)
        })
        .collect();
    let max_lam = residuals
        .iter()
        .flat_map(|r| r.iter().map(|(k, _)| *k))
        .max()
        .unwrap_or(0);

    let mut space = QSpace::empty(m, inner_bound);
    let mut dims = vec![0usize];
    let mut stabilized = false;
    for _ in 0..max_steps {
        let next = chain_step(m, &ansatz, &residuals, max_lam, &space, inner_bound);
        if next.dim() == space.dim() {
            stabilized = true;
            break;
        }
        dims.push(next.dim());
        space = next;
    }

    // del-closure of interior elements certifies the union is a submodule
    let mut del_closed = true;
    for e in space.elements(m) {
        if e.degree_in_del() + 1 <= deg_bound {
            if !space.contains(m, &e.apply_del(m)).expect("inner bound covers the shift") {
                del_closed = false;
                break;
            }
        }
    }
    let submodule = if del_closed && stabilized {
        Some(Submodule::span(m, &space.elements(m)))
    } else {
        None
    };
    Ok(WeightReport {
        weight: weight.clone(),
        dims,
        space,
        stabilized,
        del_closed_in_bound: del_closed,
        submodule,
    })
}

/// One linear chain step: ansatz combinations whose residual slices all lie
/// in the current space.
fn chain_step(
    m: &FgModule,
    ansatz: &[ModElement],
    residuals: &[Vec<(u32, ModElement)>],
    max_lam: u32,
    space: &QSpace,
    _inner_bound: u32,
) -> QSpace {
    let mut slice_len = 0;
    let mut rows_per: Vec<Vec<Vec<Rational>>> = Vec::with_capacity(ansatz.len());
    for per_e in residuals {
        let mut slices: Vec<Vec<Rational>> = vec![Vec::new(); max_lam as usize + 1];
        for (k, part) in per_e {
            slices[*k as usize] = space.residual(m, part).expect("residual fits inner bound");
        }
        for s in &slices {
            slice_len = slice_len.max(s.len());
        }
        rows_per.push(slices);
    }
    let rows = (max_lam as usize + 1) * slice_len;
    let mut sys = QMatrix::zero(rows.max(1), ansatz.len());
    for (u, slices) in rows_per.iter().enumerate() {
        for (k, res) in slices.iter().enumerate() {
            for (c, v) in res.iter().enumerate() {
                if !v.is_zero() {
                    sys.set(k * slice_len + c, u, v.clone());
                }
            }
        }
    }
    let els: Vec<ModElement> = sys
        .nullspace()
        .iter()
        .map(|sol| {
            let mut e = ModElement::zero(m);
            for (u, c) in sol.iter().enumerate() {
                if !c.is_zero() {
                    e = e.add(&ansatz[u].scale(c));
                }
            }
            e
        })
        .collect();
    QSpace::from_elements(m, space.deg_bound, &els).expect("bounded ansatz")
}

/// All weight chains for an explicit candidate list.
pub fn weight_spaces(
    m: &FgModule,
    f: &ConformalMatrix,
    candidates: &[ParamPoly],
    deg_bound: u32,
    max_steps: usize,
) -> Result<Vec<WeightReport>, GcError> {
    candidates
        .iter()
        .map(|w| weight_space(m, f, w, deg_bound, max_steps))
        .collect()
}

fn slice_basis(m: &FgModule, deg_bound: u32) -> Vec<ModElement> {
    let mut out = Vec::new();
    for g in 0..m.free_rank() {
        for k in 0..=deg_bound {
            out.push(
                ModElement::generator(m, Gen(g))
                    .mul_poly(m, &ParamPoly::monomial(Symbol::Del, k, rat_int(1))),
            );
        }
    }
    for t in 0..m.torsion_dim() {
        out.push(ModElement::generator(m, Gen(m.free_rank() + t)));
    }
    out
}

/// Weight-zero chain plus remaining candidate chains with exact directness
/// and spanning verification on the bounded slice.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FittingReport {
    pub zero_chain: WeightReport,
    pub other_chains: Vec<WeightReport>,
    /// Pairwise chain intersections are zero (distinct weights never share
    /// a nonzero vector).
    pub pairwise_direct: bool,
    /// All chains together span the bounded slice.
    pub spans_slice: bool,
    pub sum_dim: usize,
    pub slice_dim: usize,
    /// Verdict of the bracket-nilpotency precondition chain.
    pub precondition: SeriesOutcome,
    pub deg_bound: u32,
}

/// Decompose the bounded slice into generalized weight chains. The
/// bracket-nilpotency precondition is checked first: a stabilized nonzero
/// self-bracket chain is a hard error, an exhausted budget is recorded in
/// the report. Candidates default to the triangular diagonal when not
/// supplied.
pub fn fitting_decomposition(
    m: &FgModule,
    f: &ConformalMatrix,
    candidates: Option<&[ParamPoly]>,
    deg_bound: u32,
    max_steps: usize,
) -> Result<FittingReport, GcError> {
    let precondition = bracket_self_chain(m, f, max_steps);
    if matches!(precondition, SeriesOutcome::Stabilized { .. }) {
        return Err(GcError::BracketChainNotNilpotent);
    }
    let cand: Vec<ParamPoly> = match candidates {
        Some(c) => c.to_vec(),
        None => weight_candidates(m, f)?,
    };
    let zero = ParamPoly::zero();
    let zero_chain = weight_space(m, f, &zero, deg_bound, max_steps)?;
    let mut other_chains = Vec::new();
    for c in &cand {
        if c.is_zero() {
            continue;
        }
        other_chains.push(weight_space(m, f, c, deg_bound, max_steps)?);
    }

    let mut all: Vec<&WeightReport> = vec![&zero_chain];
    all.extend(other_chains.iter());
    let mut pairwise_direct = true;
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            if all[i].space.intersect(&all[j].space).dim() != 0 {
                pairwise_direct = false;
            }
        }
    }
    let mut sum = all[0].space.clone();
    for r in &all[1..] {
        sum = sum.sum(&r.space);
    }
    let slice_dim = m.free_rank() * (deg_bound as usize + 1) + m.torsion_dim();
    Ok(FittingReport {
        zero_chain,
        other_chains,
        pairwise_direct,
        spans_slice: sum.dim() == slice_dim,
        sum_dim: sum.dim(),
        slice_dim,
        precondition,
        deg_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lca::make_virasoro;

    fn del() -> ParamPoly {
        ParamPoly::symbol(Symbol::Del)
    }

    fn lam() -> ParamPoly {
        ParamPoly::symbol(Symbol::Lambda)
    }

    fn alpha() -> ParamPoly {
        ParamPoly::symbol(Symbol::Alpha)
    }

    fn mu() -> ParamPoly {
        ParamPoly::symbol(Symbol::Mu)
    }

    #[test]
    fn del_operator_self_bracket_matches_hand_value() {
        // [del _alpha del] has column (2 alpha - lambda)(del + lambda) g
        let m = FgModule::free(&["g"]);
        let d = ConformalMatrix::del_operator(&m);
        let b = ConformalMatrix::gc_bracket(&m, &d, &d);
        let g = ModElement::generator(&m, Gen(0));
        let expect = g.mul_poly(
            &m,
            &alpha().scale(&rat_int(2)).sub(&lam()).mul(&del().add(&lam())),
        );
        assert_eq!(b.col(0), &expect);
    }

    #[test]
    fn constant_matrices_commute() {
        let m = FgModule::free(&["g"]);
        let g = ModElement::generator(&m, Gen(0));
        let one = ConformalMatrix::new(&m, vec![g]).unwrap();
        assert!(ConformalMatrix::gc_bracket(&m, &one, &one).is_zero());
    }

    #[test]
    fn gc_bracket_is_skew_under_alpha_reflection() {
        // [F _alpha G] = -[G _{lambda - alpha} F]
        let m = FgModule::free(&["u", "v"]);
        let u = ModElement::generator(&m, Gen(0));
        let v = ModElement::generator(&m, Gen(1));
        let f = ConformalMatrix::new(&m, vec![v.mul_poly(&m, &lam()), u.mul_poly(&m, &del())])
            .unwrap();
        let g = ConformalMatrix::del_operator(&m);
        let fg = ConformalMatrix::gc_bracket(&m, &f, &g);
        let gf = ConformalMatrix::gc_bracket(&m, &g, &f);
        let lam_minus_alpha = lam().sub(&alpha());
        let reflected = ConformalMatrix::from_cols_unchecked(
            gf.cols()
                .iter()
                .map(|c| subst_sym(c, Symbol::Alpha, &lam_minus_alpha).neg())
                .collect(),
        );
        assert_eq!(fg, reflected);
    }

    #[test]
    fn gc_bracket_satisfies_jacobi_on_translation_operator() {
        // [F _alpha [G _mu H]] - [G _mu [F _alpha H]] = [[F _alpha G] _{alpha+mu} H]
        let m = FgModule::free(&["g"]);
        let d = ConformalMatrix::del_operator(&m);
        let inner = ConformalMatrix::gc_bracket_eval(&m, &d, &d, &mu());
        let lhs1 = ConformalMatrix::gc_bracket_eval(&m, &d, &inner, &alpha());
        let inner2 = ConformalMatrix::gc_bracket_eval(&m, &d, &d, &alpha());
        let lhs2 = ConformalMatrix::gc_bracket_eval(&m, &d, &inner2, &mu());
        let x = ConformalMatrix::gc_bracket_eval(&m, &d, &d, &alpha());
        let rhs = ConformalMatrix::gc_bracket_eval(&m, &x, &d, &alpha().add(&mu()));
        assert_eq!(lhs1.sub(&lhs2), rhs);
    }

    #[test]
    fn adjoint_is_a_bracket_homomorphism_on_the_rank_one_algebra() {
        // [ad L _alpha ad L] = ad([L _alpha L]) = (2 alpha - lambda) ad(L)
        let v = make_virasoro();
        let m = v.module();
        let l = ModElement::generator(m, Gen(0));
        let adl = adjoint_matrix(&v, &l);
        let lhs = ConformalMatrix::gc_bracket(m, &adl, &adl);
        let factor = alpha().scale(&rat_int(2)).sub(&lam());
        let rhs = ConformalMatrix::from_cols_unchecked(
            adl.cols().iter().map(|c| c.mul_poly(m, &factor)).collect(),
        );
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn action_chain_detects_nonnilpotent_adjoint() {
        let v = make_virasoro();
        let adl = adjoint_matrix(&v, &ModElement::generator(v.module(), Gen(0)));
        let rep = action_nilpotent(v.module(), &adl, 6);
        assert_eq!(rep.outcome, SeriesOutcome::Stabilized { steps: 1 });
    }

    #[test]
    fn action_chain_certifies_nilpotent_shift() {
        // F(u) = lambda v, F(v) = 0
        let m = FgModule::free(&["u", "v"]);
        let v = ModElement::generator(&m, Gen(1));
        let f =
            ConformalMatrix::new(&m, vec![v.mul_poly(&m, &lam()), ModElement::zero(&m)]).unwrap();
        let rep = action_nilpotent(&m, &f, 6);
        assert_eq!(rep.outcome, SeriesOutcome::ReachedZero { steps: 2 });
    }

    #[test]
    fn zero_matrix_action_is_nilpotent_at_one() {
        let m = FgModule::free(&["g"]);
        let rep = action_nilpotent(&m, &ConformalMatrix::zero(&m), 3);
        assert_eq!(rep.outcome, SeriesOutcome::ReachedZero { steps: 1 });
    }

    #[test]
    fn bracket_chain_flags_scalar_as_nilpotent_and_del_as_not_reached() {
        let m = FgModule::free(&["g"]);
        let g = ModElement::generator(&m, Gen(0));
        let scalar = ConformalMatrix::new(&m, vec![g.scale(&rat_int(3))]).unwrap();
        assert_eq!(bracket_self_chain(&m, &scalar, 5), SeriesOutcome::ReachedZero { steps: 1 });
        let d = ConformalMatrix::del_operator(&m);
        assert!(!matches!(bracket_self_chain(&m, &d, 4), SeriesOutcome::ReachedZero { .. }));
    }

    fn diag(m: &FgModule, entries: &[ParamPoly]) -> ConformalMatrix {
        let cols = entries
            .iter()
            .enumerate()
            .map(|(c, p)| ModElement::generator(m, Gen(c)).mul_poly(m, p))
            .collect();
        ConformalMatrix::new(m, cols).unwrap()
    }

    #[test]
    fn weight_chains_of_decoupled_diagonal() {
        // diag(lambda, 0): V^lambda fills the first line, V^0 the second
        let m = FgModule::free(&["g1", "g2"]);
        let f = diag(&m, &[lam(), ParamPoly::zero()]);
        let g1 = ModElement::generator(&m, Gen(0));
        let g2 = ModElement::generator(&m, Gen(1));

        let w = weight_space(&m, &f, &lam(), 2, 10).unwrap();
        assert!(w.stabilized);
        assert_eq!(w.space.dim(), 3);
        assert!(w.space.contains(&m, &g1).unwrap());
        assert!(w.space.contains(&m, &g1.apply_del(&m)).unwrap());
        assert!(!w.space.contains(&m, &g2).unwrap());
        assert!(w.del_closed_in_bound);
        let sub = w.submodule.expect("del-closed chain exports a submodule");
        assert_eq!(sub, Submodule::span(&m, &[g1.clone()]));

        let z = weight_space(&m, &f, &ParamPoly::zero(), 2, 10).unwrap();
        assert_eq!(z.space.dim(), 3);
        assert!(z.space.contains(&m, &g2).unwrap());
        assert_eq!(z.space.intersect(&w.space).dim(), 0);

        let cands = weight_candidates(&m, &f).unwrap();
        assert!(cands.contains(&lam()));
        assert!(cands.contains(&ParamPoly::zero()));
    }

    #[test]
    fn torsion_generators_lie_in_the_first_zero_chain_step() {
        let mut a = QMatrix::zero(1, 1);
        a.set(0, 0, rat_int(0));
        let m = FgModule::with_torsion(&["g"], &["t"], a).unwrap();
        let g = ModElement::generator(&m, Gen(0));
        let t = ModElement::generator(&m, Gen(1));
        let f = ConformalMatrix::new(&m, vec![g.mul_poly(&m, &lam())]).unwrap();
        let z = weight_space(&m, &f, &ParamPoly::zero(), 1, 8).unwrap();
        assert!(z.dims.len() >= 2);
        assert!(z.dims[1] >= 1);
        assert!(z.space.contains(&m, &t).unwrap());
    }

    #[test]
    fn fitting_on_strictly_triangular_matrix_is_all_zero_chain() {
        let m = FgModule::free(&["u", "v"]);
        let v = ModElement::generator(&m, Gen(1));
        let f =
            ConformalMatrix::new(&m, vec![v.mul_poly(&m, &lam()), ModElement::zero(&m)]).unwrap();
        let rep = fitting_decomposition(&m, &f, None, 2, 10).unwrap();
        assert_eq!(rep.precondition, SeriesOutcome::ReachedZero { steps: 1 });
        assert_eq!(rep.zero_chain.space.dim(), rep.slice_dim);
        assert!(rep.other_chains.is_empty());
        assert!(rep.pairwise_direct);
        assert!(rep.spans_slice);
    }

    #[test]
    fn fitting_splits_two_diagonal_weights() {
        // diag(lambda, 2 lambda): two nonzero-weight lines, zero chain empty
        let m = FgModule::free(&["g1", "g2"]);
        let f = diag(&m, &[lam(), lam().scale(&rat_int(2))]);
        let rep = fitting_decomposition(&m, &f, None, 2, 10).unwrap();
        assert_eq!(rep.precondition, SeriesOutcome::ReachedZero { steps: 1 });
        assert_eq!(rep.zero_chain.space.dim(), 0);
        assert_eq!(rep.other_chains.len(), 2);
        for c in &rep.other_chains {
            assert_eq!(c.space.dim(), 3);
            assert!(c.stabilized);
        }
        assert!(rep.pairwise_direct);
        assert!(rep.spans_slice);
        assert_eq!(rep.sum_dim, rep.slice_dim);
    }

    #[test]
    fn auto_candidates_reject_non_triangular_matrices() {
        let m = FgModule::free(&["u", "v"]);
        let u = ModElement::generator(&m, Gen(0));
        let v = ModElement::generator(&m, Gen(1));
        let swap = ConformalMatrix::new(&m, vec![v.clone(), u.clone()]).unwrap();
        assert_eq!(weight_candidates(&m, &swap), Err(GcError::NotTriangular));
    }
}
