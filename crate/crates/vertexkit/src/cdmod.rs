//! Finitely generated modules over the polynomial ring in the translation
//! symbol `del`, split as a free block plus a finite-dimensional torsion
//! block on which `del` acts by a rational matrix.
//!
//! Elements carry polynomial coefficients on the free generators and scalar
//! (del-free) coefficients on the torsion generators; parameter symbols
//! (`lambda`, `mu`, `alpha`) are allowed in both and behave as scalars.
//! Submodules are kept in a canonical row form: Euclidean echelon with monic
//! pivots over the free block (free columns are eliminated before torsion
//! columns), followed by a del-closed reduced echelon torsion block over the
//! rationals. Canonical forms are deterministic, so submodule equality is
//! structural equality.

use std::fmt;

use num::Zero;
use thiserror::Error;

use crate::exact::linalg::{reduce_against, span_basis, QMatrix};
use crate::exact::poly::{ParamPoly, Symbol};
use crate::exact::rational::{rat_int, Rational};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModuleError {
    #[error("torsion del-action matrix must be square of the torsion dimension")]
    TorsionMatrixShape,
    #[error("element does not belong to module of rank {free} + torsion {torsion}")]
    DimensionMismatch { free: usize, torsion: usize },
    #[error("torsion coefficient contains the translation symbol")]
    TorsionCoeffWithDel,
    #[error("coefficient degree {deg} exceeds the coordinate bound {bound}")]
    DegreeExceedsBound { deg: u32, bound: u32 },
    #[error("element carries parameter content where a parameter-free value is required")]
    UnexpectedParameter,
    #[error("unknown generator name `{0}`")]
    UnknownGenerator(String),
}

/// Unified generator index: free generators first, then torsion generators.
#[derive(Clone, Copy, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub struct Gen(pub usize);

/// A finitely generated module over the del-polynomial ring.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FgModule {
    free_names: Vec<String>,
    torsion_names: Vec<String>,
    torsion_del: QMatrix,
}

impl FgModule {
    pub fn free(names: &[&str]) -> Self {
        FgModule {
            free_names: names.iter().map(|s| s.to_string()).collect(),
            torsion_names: Vec::new(),
            torsion_del: QMatrix::zero(0, 0),
        }
    }

    pub fn with_torsion(
        free: &[&str],
        torsion: &[&str],
        torsion_del: QMatrix,
    ) -> Result<Self, ModuleError> {
        if torsion_del.rows != torsion.len() || torsion_del.cols != torsion.len() {
            return Err(ModuleError::TorsionMatrixShape);
        }
        Ok(FgModule {
            free_names: free.iter().map(|s| s.to_string()).collect(),
            torsion_names: torsion.iter().map(|s| s.to_string()).collect(),
            torsion_del,
        })
    }

    pub fn free_rank(&self) -> usize {
        self.free_names.len()
    }

    pub fn torsion_dim(&self) -> usize {
        self.torsion_names.len()
    }

    pub fn total_gens(&self) -> usize {
        self.free_rank() + self.torsion_dim()
    }

    pub fn torsion_del(&self) -> &QMatrix {
        &self.torsion_del
    }

    pub fn is_torsion_gen(&self, g: Gen) -> bool {
        g.0 >= self.free_rank()
    }

    pub fn gen_name(&self, g: Gen) -> &str {
        if g.0 < self.free_rank() {
            &self.free_names[g.0]
        } else {
            &self.torsion_names[g.0 - self.free_rank()]
        }
    }

    pub fn gen_by_name(&self, name: &str) -> Result<Gen, ModuleError> {
        self.free_names
            .iter()
            .chain(self.torsion_names.iter())
            .position(|n| n == name)
            .map(Gen)
            .ok_or_else(|| ModuleError::UnknownGenerator(name.to_string()))
    }

    pub fn gens(&self) -> impl Iterator<Item = Gen> {
        (0..self.total_gens()).map(Gen)
    }
}

/// A module element: polynomial coefficients on the free generators,
/// del-free coefficients on the torsion generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ModElement {
    pub free: Vec<ParamPoly>,
    pub torsion: Vec<ParamPoly>,
}

impl ModElement {
    pub fn zero(m: &FgModule) -> Self {
        ModElement {
            free: vec![ParamPoly::zero(); m.free_rank()],
            torsion: vec![ParamPoly::zero(); m.torsion_dim()],
        }
    }

    pub fn generator(m: &FgModule, g: Gen) -> Self {
        let mut e = ModElement::zero(m);
        if g.0 < m.free_rank() {
            e.free[g.0] = ParamPoly::one();
        } else {
            e.torsion[g.0 - m.free_rank()] = ParamPoly::one();
        }
        e
    }

    pub fn matches(&self, m: &FgModule) -> bool {
        self.free.len() == m.free_rank() && self.torsion.len() == m.torsion_dim()
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|p| p.is_zero()) && self.torsion.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &Self) -> Self {
        ModElement {
            free: self.free.iter().zip(&other.free).map(|(a, b)| a.add(b)).collect(),
            torsion: self.torsion.iter().zip(&other.torsion).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        ModElement {
            free: self.free.iter().map(|p| p.neg()).collect(),
            torsion: self.torsion.iter().map(|p| p.neg()).collect(),
        }
    }

    pub fn scale(&self, r: &Rational) -> Self {
        ModElement {
            free: self.free.iter().map(|p| p.scale(r)).collect(),
            torsion: self.torsion.iter().map(|p| p.scale(r)).collect(),
        }
    }

    /// Module action of a polynomial in `del` (and scalar parameters): free
    /// coefficients multiply; on the torsion block each power of `del` acts
    /// through the torsion matrix.
    pub fn mul_poly(&self, m: &FgModule, p: &ParamPoly) -> Self {
        let free = self.free.iter().map(|c| c.mul(p)).collect();
        let mut torsion = vec![ParamPoly::zero(); m.torsion_dim()];
        if m.torsion_dim() > 0 && self.torsion.iter().any(|c| !c.is_zero()) {
            for (k, q) in p.decompose(Symbol::Del) {
                // A^k applied to the torsion coefficient vector, scaled by q
                let ak = m.torsion_del.pow(k);
                for r in 0..m.torsion_dim() {
                    let mut acc = ParamPoly::zero();
                    for i in 0..m.torsion_dim() {
                        let a = ak.get(r, i);
                        if !a.is_zero() && !self.torsion[i].is_zero() {
                            acc = acc.add(&self.torsion[i].scale(a));
                        }
                    }
                    if !acc.is_zero() {
                        torsion[r] = torsion[r].add(&acc.mul(&q));
                    }
                }
            }
        }
        ModElement { free, torsion }
    }

    pub fn apply_del(&self, m: &FgModule) -> Self {
        self.mul_poly(m, &ParamPoly::symbol(Symbol::Del))
    }

    /// Substitute a scalar parameter symbol by a polynomial whose `del`
    /// content acts through the module structure (needed e.g. for
    /// `lambda -> -del - lambda`).
    pub fn subst_param(&self, m: &FgModule, sym: Symbol, image: &ParamPoly) -> Self {
        assert_ne!(sym, Symbol::Del, "del is not a scalar parameter");
        let mut out = ModElement::zero(m);
        for (k, part) in self.decompose(sym) {
            out = out.add(&part.mul_poly(m, &image.pow(k)));
        }
        out
    }

    /// Split along powers of a parameter symbol; the parts are free of it.
    pub fn decompose(&self, sym: Symbol) -> Vec<(u32, ModElement)> {
        let mut max = 0;
        for p in self.free.iter().chain(self.torsion.iter()) {
            max = max.max(p.degree_in(sym));
        }
        let mut out = Vec::new();
        for k in 0..=max {
            let part = ModElement {
                free: self.free.iter().map(|p| p.coeff_of(sym, k)).collect(),
                torsion: self.torsion.iter().map(|p| p.coeff_of(sym, k)).collect(),
            };
            if !part.is_zero() {
                out.push((k, part));
            }
        }
        out
    }

    pub fn degree_in_del(&self) -> u32 {
        self.free.iter().map(|p| p.degree_in(Symbol::Del)).max().unwrap_or(0)
    }

    pub fn has_params(&self) -> bool {
        self.free
            .iter()
            .chain(self.torsion.iter())
            .any(|p| p.contains(Symbol::Lambda) || p.contains(Symbol::Mu) || p.contains(Symbol::Alpha))
    }

    fn torsion_ok(&self) -> bool {
        self.torsion.iter().all(|p| !p.contains(Symbol::Del))
    }

    /// Coordinates over the rationals for the del-degree-bounded slice:
    /// free generator coefficients expanded in powers of `del` up to
    /// `deg_bound`, followed by the torsion coefficients.
    pub fn to_coords(&self, m: &FgModule, deg_bound: u32) -> Result<Vec<Rational>, ModuleError> {
        if self.has_params() {
            return Err(ModuleError::UnexpectedParameter);
        }
        if !self.torsion_ok() {
            return Err(ModuleError::TorsionCoeffWithDel);
        }
        let deg = self.degree_in_del();
        if deg > deg_bound {
            return Err(ModuleError::DegreeExceedsBound { deg, bound: deg_bound });
        }
        let mut v = Vec::with_capacity(m.free_rank() * (deg_bound as usize + 1) + m.torsion_dim());
        for p in &self.free {
            for k in 0..=deg_bound {
                v.push(p.coeff_of(Symbol::Del, k).constant_term());
            }
        }
        for p in &self.torsion {
            v.push(p.constant_term());
        }
        Ok(v)
    }

    pub fn from_coords(m: &FgModule, deg_bound: u32, v: &[Rational]) -> Self {
        let mut e = ModElement::zero(m);
        let mut idx = 0;
        for g in 0..m.free_rank() {
            for k in 0..=deg_bound {
                if !v[idx].is_zero() {
                    e.free[g] = e.free[g].add(&ParamPoly::monomial(Symbol::Del, k, v[idx].clone()));
                }
                idx += 1;
            }
        }
        for t in 0..m.torsion_dim() {
            e.torsion[t] = ParamPoly::constant(v[idx].clone());
            idx += 1;
        }
        e
    }

    /// Human-readable form with generator names.
    pub fn show(&self, m: &FgModule) -> String {
        let mut parts = Vec::new();
        for (i, p) in self.free.iter().enumerate() {
            if !p.is_zero() {
                parts.push(format!("({})*{}", p, m.free_names[i]));
            }
        }
        for (i, p) in self.torsion.iter().enumerate() {
            if !p.is_zero() {
                parts.push(format!("({})*{}", p, m.torsion_names[i]));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

impl fmt::Display for ModElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, p) in self.free.iter().enumerate() {
            if !p.is_zero() {
                parts.push(format!("({})*f{}", p, i));
            }
        }
        for (i, p) in self.torsion.iter().enumerate() {
            if !p.is_zero() {
                parts.push(format!("({})*t{}", p, i));
            }
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Canonical description of one pivot of a submodule's row form.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Pivot {
    /// Monic polynomial pivot in a free column.
    Free { row: usize, col: usize, deg: u32 },
    /// Unit pivot in a torsion coordinate.
    Torsion { row: usize, coord: usize },
}

/// A del-stable submodule in canonical row form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Submodule {
    rows: Vec<ModElement>,
    pivots: Vec<Pivot>,
}

impl Submodule {
    pub fn zero() -> Self {
        Submodule { rows: Vec::new(), pivots: Vec::new() }
    }

    /// Del-polynomial span of the generators. Parameter content (`lambda`,
    /// `mu`, `alpha`) is decomposed away first, so the span is generated by
    /// the parameter coefficients.
    pub fn span(m: &FgModule, gens: &[ModElement]) -> Self {
        let mut rows = Vec::new();
        for g in gens {
            assert!(g.matches(m), "element from a different module");
            let mut stack = vec![g.clone()];
            for sym in [Symbol::Lambda, Symbol::Mu, Symbol::Alpha] {
                let mut next = Vec::new();
                for e in stack {
                    for (_, part) in e.decompose(sym) {
                        next.push(part);
                    }
                }
                stack = next;
            }
            rows.extend(stack);
        }
        Submodule::canonicalize(m, rows)
    }

    pub fn whole(m: &FgModule) -> Self {
        let gens: Vec<_> = m.gens().map(|g| ModElement::generator(m, g)).collect();
        Submodule::span(m, &gens)
    }

    fn canonicalize(m: &FgModule, rows: Vec<ModElement>) -> Self {
        let mut work: Vec<ModElement> = rows.into_iter().filter(|r| !r.is_zero()).collect();
        let mut out: Vec<ModElement> = Vec::new();
        let mut pivots: Vec<Pivot> = Vec::new();

        // Free block: Euclidean elimination column by column.
        for col in 0..m.free_rank() {
            loop {
                let with: Vec<usize> = (0..work.len())
                    .filter(|&i| !work[i].free[col].is_zero())
                    .collect();
                if with.is_empty() {
                    break;
                }
                let pivot_idx = *with
                    .iter()
                    .min_by_key(|&&i| work[i].free[col].degree_in(Symbol::Del))
                    .unwrap();
                if with.len() == 1 {
                    let mut piv = work.remove(pivot_idx);
                    // monic normalization
                    let lead = piv.free[col]
                        .leading_coeff_in(Symbol::Del)
                        .constant_term();
                    piv = piv.scale(&(rat_int(1) / lead));
                    pivots.push(Pivot::Free {
                        row: out.len(),
                        col,
                        deg: piv.free[col].degree_in(Symbol::Del),
                    });
                    out.push(piv);
                    break;
                }
                let pivot = work[pivot_idx].clone();
                for &i in &with {
                    if i == pivot_idx {
                        continue;
                    }
                    let (q, _) = work[i].free[col]
                        .divrem_del(&pivot.free[col])
                        .expect("free coefficients are del-only at span time");
                    if !q.is_zero() {
                        work[i] = work[i].sub(&pivot.mul_poly(m, &q));
                    }
                }
                work.retain(|r| !r.is_zero());
            }
        }

        // Remaining rows are pure torsion; close under the del-action and
        // row-reduce over the rationals.
        let tdim = m.torsion_dim();
        let mut tvecs: Vec<Vec<Rational>> = work
            .iter()
            .map(|r| r.torsion.iter().map(|p| p.constant_term()).collect())
            .collect();
        loop {
            let mut basis = span_basis(&tvecs);
            let before = basis.len();
            let mut extra = Vec::new();
            for v in &basis {
                let dv = m.torsion_del.apply(v);
                extra.push(dv);
            }
            let mut all = basis.clone();
            all.extend(extra);
            basis = span_basis(&all);
            if basis.len() == before {
                tvecs = basis;
                break;
            }
            tvecs = basis;
        }
        if tdim == 0 {
            tvecs.clear();
        }

        // Hermite reduction of free-pivot rows against each other.
        let free_pivot_info: Vec<(usize, usize)> = pivots
            .iter()
            .filter_map(|p| match p {
                Pivot::Free { row, col, .. } => Some((*row, *col)),
                _ => None,
            })
            .collect();
        for &(ri, ci) in &free_pivot_info {
            let piv = out[ri].clone();
            for rj in 0..out.len() {
                if rj == ri {
                    continue;
                }
                let (q, _) = out[rj].free[ci].divrem_del(&piv.free[ci]).unwrap();
                if !q.is_zero() {
                    out[rj] = out[rj].sub(&piv.mul_poly(m, &q));
                }
            }
        }

        // Torsion rows: reduced echelon, then clear those coordinates from
        // every other row (including the torsion tails of free-pivot rows).
        let torsion_rows: Vec<ModElement> = tvecs
            .iter()
            .map(|v| {
                let mut e = ModElement::zero(m);
                for (i, c) in v.iter().enumerate() {
                    e.torsion[i] = ParamPoly::constant(c.clone());
                }
                e
            })
            .collect();
        for trow in &torsion_rows {
            let coord = trow
                .torsion
                .iter()
                .position(|c| !c.is_zero())
                .expect("nonzero torsion row");
            let lead = trow.torsion[coord].constant_term();
            for r in out.iter_mut() {
                let c = r.torsion[coord].clone();
                if !c.is_zero() {
                    *r = r.sub(&trow.scale(&(c.constant_term() / lead.clone())));
                }
            }
        }
        let base = out.len();
        for (k, trow) in torsion_rows.into_iter().enumerate() {
            let coord = trow.torsion.iter().position(|c| !c.is_zero()).unwrap();
            pivots.push(Pivot::Torsion { row: base + k, coord });
            out.push(trow);
        }

        Submodule { rows: out, pivots }
    }

    pub fn rows(&self) -> &[ModElement] {
        &self.rows
    }

    pub fn pivots(&self) -> &[Pivot] {
        &self.pivots
    }

    /// Number of free polynomial pivots (the rank of the free part).
    pub fn rank(&self) -> usize {
        self.pivots
            .iter()
            .filter(|p| matches!(p, Pivot::Free { .. }))
            .count()
    }

    /// Dimension of the pure-torsion block.
    pub fn torsion_block_dim(&self) -> usize {
        self.pivots
            .iter()
            .filter(|p| matches!(p, Pivot::Torsion { .. }))
            .count()
    }

    pub fn is_zero_module(&self) -> bool {
        self.rows.is_empty()
    }

    /// Reduce an element against the canonical rows. The remainder is zero
    /// exactly when the element belongs to the submodule, and the reduction
    /// map is linear in the element. The witness pairs a row index with the
    /// del-polynomial coefficient used.
    pub fn reduce_with_witness(
        &self,
        m: &FgModule,
        e: &ModElement,
    ) -> (ModElement, Vec<(usize, ParamPoly)>) {
        let mut r = e.clone();
        let mut witness = Vec::new();
        for p in &self.pivots {
            match *p {
                Pivot::Free { row, col, .. } => {
                    if r.free[col].is_zero() {
                        continue;
                    }
                    if let Some((q, _rem)) = r.free[col].divrem_del(&self.rows[row].free[col]) {
                        if !q.is_zero() {
                            r = r.sub(&self.rows[row].mul_poly(m, &q));
                            witness.push((row, q));
                        }
                    }
                }
                Pivot::Torsion { row, coord } => {
                    let c = r.torsion[coord].clone();
                    if !c.is_zero() {
                        let lead = self.rows[row].torsion[coord].constant_term();
                        let q = c.scale(&(rat_int(1) / lead));
                        r = r.sub(&self.rows[row].mul_poly(m, &q));
                        witness.push((row, q));
                    }
                }
            }
        }
        (r, witness)
    }

    pub fn reduce(&self, m: &FgModule, e: &ModElement) -> ModElement {
        self.reduce_with_witness(m, e).0
    }

    pub fn member(&self, m: &FgModule, e: &ModElement) -> bool {
        // Parameter content must be member coefficient-wise.
        if e.has_params() {
            let mut stack = vec![e.clone()];
            for sym in [Symbol::Lambda, Symbol::Mu, Symbol::Alpha] {
                let mut next = Vec::new();
                for x in stack {
                    for (_, part) in x.decompose(sym) {
                        next.push(part);
                    }
                }
                stack = next;
            }
            return stack.iter().all(|x| self.reduce(m, x).is_zero());
        }
        self.reduce(m, e).is_zero()
    }

    /// Span of the union.
    pub fn sum(&self, m: &FgModule, other: &Submodule) -> Submodule {
        let mut gens = self.rows.clone();
        gens.extend(other.rows.clone());
        Submodule::span(m, &gens)
    }

    pub fn contains_submodule(&self, m: &FgModule, other: &Submodule) -> bool {
        other.rows.iter().all(|r| self.member(m, r))
    }

    /// The pure-torsion members: exactly the span of the canonical
    /// pure-torsion rows (free-pivot rows cannot combine to a nonzero pure
    /// torsion element because their pivots are in distinct columns).
    pub fn torsion_part(&self, m: &FgModule) -> Submodule {
        let gens: Vec<ModElement> = self
            .pivots
            .iter()
            .filter_map(|p| match p {
                Pivot::Torsion { row, .. } => Some(self.rows[*row].clone()),
                _ => None,
            })
            .collect();
        Submodule::span(m, &gens)
    }

    pub fn show(&self, m: &FgModule) -> String {
        if self.rows.is_empty() {
            return "0".to_string();
        }
        self.rows
            .iter()
            .map(|r| r.show(m))
            .collect::<Vec<_>>()
            .join("; ")
    }

    /// The rational subspace of submodule elements whose del-degree stays
    /// within the bound, computed from the linearity of `reduce`.
    pub fn bounded_slice(&self, m: &FgModule, deg_bound: u32) -> QSpace {
        let row_deg = self.rows.iter().map(|r| r.degree_in_del()).max().unwrap_or(0);
        // remainders can grow by at most one row degree per pivot step
        let out_bound = deg_bound + (self.pivots.len() as u32 + 1) * row_deg.max(1);
        let mut ansatz = Vec::new();
        for g in 0..m.free_rank() {
            for k in 0..=deg_bound {
                ansatz.push(
                    ModElement::generator(m, Gen(g))
                        .mul_poly(m, &ParamPoly::monomial(Symbol::Del, k, rat_int(1))),
                );
            }
        }
        for t in 0..m.torsion_dim() {
            ansatz.push(ModElement::generator(m, Gen(m.free_rank() + t)));
        }
        let coord_len = m.free_rank() * (out_bound as usize + 1) + m.torsion_dim();
        let mut sys = QMatrix::zero(coord_len, ansatz.len());
        for (u, e) in ansatz.iter().enumerate() {
            let rem = self.reduce(m, e);
            let coords = rem.to_coords(m, out_bound).expect("remainder fits the padded bound");
            for (r, v) in coords.into_iter().enumerate() {
                if !v.is_zero() {
                    sys.set(r, u, v);
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
        QSpace::from_elements(m, deg_bound, &els).expect("slice elements respect the bound")
    }
}

/// A plain rational subspace of the del-degree-bounded slice of a module.
/// Used for chain computations whose terms are not del-stable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QSpace {
    pub deg_bound: u32,
    coord_len: usize,
    basis: Vec<Vec<Rational>>,
}

impl QSpace {
    pub fn empty(m: &FgModule, deg_bound: u32) -> Self {
        QSpace {
            deg_bound,
            coord_len: m.free_rank() * (deg_bound as usize + 1) + m.torsion_dim(),
            basis: Vec::new(),
        }
    }

    pub fn from_elements(
        m: &FgModule,
        deg_bound: u32,
        els: &[ModElement],
    ) -> Result<Self, ModuleError> {
        let mut s = QSpace::empty(m, deg_bound);
        let vecs = els
            .iter()
            .map(|e| e.to_coords(m, deg_bound))
            .collect::<Result<Vec<_>, _>>()?;
        s.basis = span_basis(&vecs);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, m: &FgModule, e: &ModElement) -> Result<bool, ModuleError> {
        let v = e.to_coords(m, self.deg_bound)?;
        Ok(reduce_against(&self.basis, &v).iter().all(|x| x.is_zero()))
    }

    /// Residual of the linear reduction map; zero iff contained.
    pub fn residual(&self, m: &FgModule, e: &ModElement) -> Result<Vec<Rational>, ModuleError> {
        let v = e.to_coords(m, self.deg_bound)?;
        Ok(reduce_against(&self.basis, &v))
    }

    pub fn elements(&self, m: &FgModule) -> Vec<ModElement> {
        self.basis
            .iter()
            .map(|v| ModElement::from_coords(m, self.deg_bound, v))
            .collect()
    }

    pub fn sum(&self, other: &QSpace) -> QSpace {
        assert_eq!(self.coord_len, other.coord_len);
        let mut all = self.basis.clone();
        all.extend(other.basis.clone());
        QSpace { deg_bound: self.deg_bound, coord_len: self.coord_len, basis: span_basis(&all) }
    }

    pub fn intersect(&self, other: &QSpace) -> QSpace {
        assert_eq!(self.coord_len, other.coord_len);
        if self.basis.is_empty() || other.basis.is_empty() {
            return QSpace { deg_bound: self.deg_bound, coord_len: self.coord_len, basis: vec![] };
        }
        // Solve x^T A = y^T B: nullspace of the stacked transposes.
        let a = self.basis.len();
        let b = other.basis.len();
        let mut mshape = QMatrix::zero(self.coord_len, a + b);
        for (i, row) in self.basis.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                mshape.set(j, i, v.clone());
            }
        }
        for (i, row) in other.basis.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                mshape.set(j, a + i, -v.clone());
            }
        }
        let mut vecs = Vec::new();
        for n in mshape.nullspace() {
            let mut v = vec![rat_int(0); self.coord_len];
            for (i, row) in self.basis.iter().enumerate() {
                if !n[i].is_zero() {
                    for (j, x) in row.iter().enumerate() {
                        v[j] = v[j].clone() + n[i].clone() * x.clone();
                    }
                }
            }
            vecs.push(v);
        }
        QSpace { deg_bound: self.deg_bound, coord_len: self.coord_len, basis: span_basis(&vecs) }
    }
}
