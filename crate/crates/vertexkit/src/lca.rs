//! Lie conformal algebras presented by structure constants: a finitely
//! generated del-module together with a lambda-bracket given on generators
//! and extended bilinearly by the sesquilinearity rules
//! `[del a _lambda b] = -lambda [a _lambda b]` and
//! `[a _lambda del b] = (del + lambda) [a _lambda b]`.
//!
//! Torsion generators bracket to zero on either side; only the free block
//! carries structure constants. Axiom checking produces explicit witnesses:
//! the offending generator tuple together with both sides of the violated
//! identity.

use std::fmt;

use num::Zero;
use thiserror::Error;

use crate::cdmod::{FgModule, Gen, ModElement, Submodule};
use crate::exact::linalg::QMatrix;
use crate::exact::poly::{ParamPoly, Symbol};
use crate::exact::rational::{rat_int, Rational};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum LcaError {
    #[error("structure table must be square of the free rank")]
    TableShape,
    #[error("table entry [{0} _lambda {1}] does not live in the module")]
    EntryShape(String, String),
    #[error("table entry [{0} _lambda {1}] has a torsion coefficient containing del")]
    EntryTorsionDel(String, String),
    #[error("table entry [{0} _lambda {1}] uses a parameter other than lambda")]
    EntryForeignParam(String, String),
}

/// Which defining identity a witness violates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Axiom {
    Sesquilinearity,
    SkewSymmetry,
    Jacobi,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axiom::Sesquilinearity => write!(f, "sesquilinearity"),
            Axiom::SkewSymmetry => write!(f, "skew-symmetry"),
            Axiom::Jacobi => write!(f, "jacobi"),
        }
    }
}

/// A concrete axiom violation: the generators involved and both sides.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AxiomFailure {
    pub axiom: Axiom,
    pub gens: Vec<Gen>,
    pub lhs: ModElement,
    pub rhs: ModElement,
}

/// Outcome of an iterated series computation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SeriesOutcome {
    /// The series hit the zero submodule at this index.
    ReachedZero { steps: usize },
    /// Two consecutive terms agree and are nonzero; the series is constant
    /// from here on.
    Stabilized { steps: usize },
    /// The step budget ran out before either event.
    Inconclusive { steps: usize },
}

/// Terms of a derived or central series with its verdict.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SeriesReport {
    pub terms: Vec<Submodule>,
    pub outcome: SeriesOutcome,
}

/// Center computation at a fixed del-degree bound for the ansatz.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CenterReport {
    pub center: Submodule,
    pub deg_bound: u32,
    /// True when raising the bound by one does not enlarge the center.
    pub saturated: bool,
}

/// A Lie conformal algebra given by structure constants on free generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ConformalAlgebra {
    name: String,
    module: FgModule,
    table: Vec<Vec<ModElement>>,
}

impl ConformalAlgebra {
    /// Build from a bracket table on the free generators. The table is not
    /// required to satisfy the axioms; `check_axioms` decides that.
    pub fn new(
        name: &str,
        module: FgModule,
        table: Vec<Vec<ModElement>>,
    ) -> Result<Self, LcaError> {
        let n = module.free_rank();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(LcaError::TableShape);
        }
        for (i, row) in table.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let ni = module.gen_name(Gen(i)).to_string();
                let nj = module.gen_name(Gen(j)).to_string();
                if !e.matches(&module) {
                    return Err(LcaError::EntryShape(ni, nj));
                }
                if e.torsion.iter().any(|p| p.contains(Symbol::Del)) {
                    return Err(LcaError::EntryTorsionDel(ni, nj));
                }
                let foreign = e
                    .free
                    .iter()
                    .chain(e.torsion.iter())
                    .any(|p| p.contains(Symbol::Mu) || p.contains(Symbol::Alpha));
                if foreign {
                    return Err(LcaError::EntryForeignParam(ni, nj));
                }
            }
        }
        Ok(ConformalAlgebra { name: name.to_string(), module, table })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn module(&self) -> &FgModule {
        &self.module
    }

    pub fn table_entry(&self, i: usize, j: usize) -> &ModElement {
        &self.table[i][j]
    }

    /// The lambda-bracket of two lambda-free elements. Parameters other
    /// than lambda pass through as scalars.
    pub fn bracket(&self, a: &ModElement, b: &ModElement) -> ModElement {
        assert!(
            !a.free.iter().chain(a.torsion.iter()).any(|p| p.contains(Symbol::Lambda)),
            "left bracket argument already carries lambda"
        );
        assert!(
            !b.free.iter().chain(b.torsion.iter()).any(|p| p.contains(Symbol::Lambda)),
            "right bracket argument already carries lambda"
        );
        let m = &self.module;
        let lambda = ParamPoly::symbol(Symbol::Lambda);
        let del_plus_lambda = ParamPoly::symbol(Symbol::Del).add(&lambda);
        let neg_lambda = lambda.neg();
        let mut out = ModElement::zero(m);
        for i in 0..m.free_rank() {
            let p = &a.free[i];
            if p.is_zero() {
                continue;
            }
            let p_at = p.substitute(Symbol::Del, &neg_lambda);
            for j in 0..m.free_rank() {
                let q = &b.free[j];
                if q.is_zero() {
                    continue;
                }
                let t = &self.table[i][j];
                if t.is_zero() {
                    continue;
                }
                let q_shift = q.substitute(Symbol::Del, &del_plus_lambda);
                let contrib = t.mul_poly(m, &q_shift).mul_poly(m, &p_at);
                out = out.add(&contrib);
            }
        }
        out
    }

    /// Bracket of two generators.
    pub fn bracket_gens(&self, i: Gen, j: Gen) -> ModElement {
        self.bracket(
            &ModElement::generator(&self.module, i),
            &ModElement::generator(&self.module, j),
        )
    }

    /// Verify sesquilinearity, skew-symmetry, and the Jacobi identity on all
    /// generator tuples; returns every violation with both sides.
    pub fn check_axioms(&self) -> Vec<AxiomFailure> {
        let m = &self.module;
        let mut failures = Vec::new();
        let lambda = ParamPoly::symbol(Symbol::Lambda);
        let neg_lambda = lambda.neg();
        let del_plus_lambda = ParamPoly::symbol(Symbol::Del).add(&lambda);
        let minus_del_minus_lambda = del_plus_lambda.neg();

        for i in m.gens() {
            for j in m.gens() {
                let a = ModElement::generator(m, i);
                let b = ModElement::generator(m, j);
                let base = self.bracket(&a, &b);

                // [del a _lambda b] = -lambda [a _lambda b]
                let lhs = self.bracket(&a.apply_del(m), &b);
                let rhs = base.mul_poly(m, &neg_lambda);
                if lhs != rhs {
                    failures.push(AxiomFailure {
                        axiom: Axiom::Sesquilinearity,
                        gens: vec![i, j],
                        lhs,
                        rhs,
                    });
                }
                // [a _lambda del b] = (del + lambda) [a _lambda b]
                let lhs = self.bracket(&a, &b.apply_del(m));
                let rhs = base.mul_poly(m, &del_plus_lambda);
                if lhs != rhs {
                    failures.push(AxiomFailure {
                        axiom: Axiom::Sesquilinearity,
                        gens: vec![i, j],
                        lhs,
                        rhs,
                    });
                }

                // [a _lambda b] = -[b _{-del-lambda} a], del acting on the
                // output coefficients.
                let flipped = self
                    .bracket(&b, &a)
                    .subst_param(m, Symbol::Lambda, &minus_del_minus_lambda)
                    .neg();
                if base != flipped {
                    failures.push(AxiomFailure {
                        axiom: Axiom::SkewSymmetry,
                        gens: vec![i, j],
                        lhs: base.clone(),
                        rhs: flipped,
                    });
                }
            }
        }

        // Jacobi on free triples; tuples touching torsion generators vanish
        // identically on both sides.
        let free: Vec<Gen> = (0..m.free_rank()).map(Gen).collect();
        for &i in &free {
            for &j in &free {
                for &k in &free {
                    let a = ModElement::generator(m, i);
                    let b = ModElement::generator(m, j);
                    let c = ModElement::generator(m, k);

                    // [a _lambda [b _mu c]]
                    let inner_bc = rename(&self.bracket(&b, &c), Symbol::Lambda, Symbol::Mu);
                    let term1 = self.bracket(&a, &inner_bc);

                    // [b _mu [a _lambda c]]
                    let inner_ac = rename(&self.bracket(&a, &c), Symbol::Lambda, Symbol::Alpha);
                    let term2 = rename(
                        &rename(&self.bracket(&b, &inner_ac), Symbol::Lambda, Symbol::Mu),
                        Symbol::Alpha,
                        Symbol::Lambda,
                    );

                    // [[a _lambda b] _{lambda+mu} c]: the inner bracket's
                    // lambda powers stay; only the outer bracket variable
                    // becomes lambda + mu.
                    let lam_plus_mu =
                        ParamPoly::symbol(Symbol::Lambda).add(&ParamPoly::symbol(Symbol::Mu));
                    let mut rhs = ModElement::zero(m);
                    for (deg, part) in self.bracket(&a, &b).decompose(Symbol::Lambda) {
                        let br = rename(&self.bracket(&part, &c), Symbol::Lambda, Symbol::Alpha);
                        let br = br
                            .subst_param(m, Symbol::Alpha, &lam_plus_mu)
                            .mul_poly(m, &ParamPoly::monomial(Symbol::Lambda, deg, rat_int(1)));
                        rhs = rhs.add(&br);
                    }

                    let lhs = term1.sub(&term2);
                    if lhs != rhs {
                        failures.push(AxiomFailure {
                            axiom: Axiom::Jacobi,
                            gens: vec![i, j, k],
                            lhs,
                            rhs,
                        });
                    }
                }
            }
        }
        failures
    }

    /// Del-span of all brackets between two submodules, generated by the
    /// lambda-coefficients of brackets of canonical rows.
    pub fn subspace_bracket(&self, s: &Submodule, t: &Submodule) -> Submodule {
        let mut gens = Vec::new();
        for r in s.rows() {
            for q in t.rows() {
                let b = self.bracket(r, q);
                if !b.is_zero() {
                    gens.push(b);
                }
            }
        }
        Submodule::span(&self.module, &gens)
    }

    /// Derived series: `R, [R _lambda R], [R' _lambda R'], ...`.
    pub fn derived_series(&self, max_steps: usize) -> SeriesReport {
        let whole = Submodule::whole(&self.module);
        self.iterate_series(whole, max_steps, |prev| self.subspace_bracket(prev, prev))
    }

    /// Central series: `R, [R _lambda R], [R _lambda [R _lambda R]], ...`.
    pub fn central_series(&self, max_steps: usize) -> SeriesReport {
        let whole = Submodule::whole(&self.module);
        let whole2 = whole.clone();
        self.iterate_series(whole, max_steps, move |prev| {
            self.subspace_bracket(&whole2, prev)
        })
    }

    fn iterate_series(
        &self,
        start: Submodule,
        max_steps: usize,
        step: impl Fn(&Submodule) -> Submodule,
    ) -> SeriesReport {
        let mut terms = vec![start];
        for s in 1..=max_steps {
            let next = step(terms.last().unwrap());
            if next.is_zero_module() {
                terms.push(next);
                return SeriesReport { terms, outcome: SeriesOutcome::ReachedZero { steps: s } };
            }
            if &next == terms.last().unwrap() {
                terms.push(next);
                return SeriesReport { terms, outcome: SeriesOutcome::Stabilized { steps: s } };
            }
            terms.push(next);
        }
        SeriesReport { terms, outcome: SeriesOutcome::Inconclusive { steps: max_steps } }
    }

    /// Solvability verdict from the derived series; `None` if the step
    /// budget was exhausted.
    pub fn is_solvable(&self, max_steps: usize) -> Option<bool> {
        match self.derived_series(max_steps).outcome {
            SeriesOutcome::ReachedZero { .. } => Some(true),
            SeriesOutcome::Stabilized { .. } => Some(false),
            SeriesOutcome::Inconclusive { .. } => None,
        }
    }

    /// Nilpotency verdict from the central series.
    pub fn is_nilpotent(&self, max_steps: usize) -> Option<bool> {
        match self.central_series(max_steps).outcome {
            SeriesOutcome::ReachedZero { .. } => Some(true),
            SeriesOutcome::Stabilized { .. } => Some(false),
            SeriesOutcome::Inconclusive { .. } => None,
        }
    }

    /// Elements annihilated by every generator bracket, searched over the
    /// del-degree-bounded ansatz. The center is a del-submodule, so the
    /// span of the solutions is legitimate.
    pub fn center(&self, deg_bound: u32) -> Submodule {
        let m = &self.module;
        let mut ansatz = Vec::new();
        for g in 0..m.free_rank() {
            for k in 0..=deg_bound {
                ansatz.push(
                    ModElement::generator(m, Gen(g))
                        .mul_poly(m, &ParamPoly::symbol(Symbol::Del).pow(k)),
                );
            }
        }
        for t in 0..m.torsion_dim() {
            ansatz.push(ModElement::generator(m, Gen(m.free_rank() + t)));
        }
        if ansatz.is_empty() {
            return Submodule::zero();
        }

        // bracket(g_i, e_u) for every generator and ansatz element, split by
        // lambda power and flattened to rational coordinates
        let mut pieces: Vec<Vec<(u32, ModElement)>> = Vec::with_capacity(ansatz.len());
        let mut out_deg = 0;
        let mut max_lam = 0;
        for e in &ansatz {
            let mut per_e = Vec::new();
            for i in m.gens() {
                let b = self.bracket(&ModElement::generator(m, i), e);
                for (k, part) in b.decompose(Symbol::Lambda) {
                    out_deg = out_deg.max(part.degree_in_del());
                    max_lam = max_lam.max(k);
                    per_e.push((k + (i.0 as u32) * 1000, part));
                }
            }
            pieces.push(per_e);
        }
        let coord_len = m.free_rank() * (out_deg as usize + 1) + m.torsion_dim();
        let gen_count = m.total_gens();
        let rows = gen_count * (max_lam as usize + 1) * coord_len;
        let mut sys = QMatrix::zero(rows, ansatz.len());
        for (u, per_e) in pieces.iter().enumerate() {
            for (tag, part) in per_e {
                let i = (*tag / 1000) as usize;
                let k = (*tag % 1000) as usize;
                let coords = part.to_coords(m, out_deg).expect("parts are parameter-free");
                for (c, val) in coords.iter().enumerate() {
                    if !val.is_zero() {
                        let row = (i * (max_lam as usize + 1) + k) * coord_len + c;
                        sys.set(row, u, val.clone());
                    }
                }
            }
        }
        let sols = sys.nullspace();
        let els: Vec<ModElement> = sols
            .iter()
            .map(|v| {
                let mut e = ModElement::zero(m);
                for (u, c) in v.iter().enumerate() {
                    if !c.is_zero() {
                        e = e.add(&ansatz[u].scale(c));
                    }
                }
                e
            })
            .collect();
        Submodule::span(m, &els)
    }

    /// Center with a saturation probe at the next degree bound.
    pub fn center_report(&self, deg_bound: u32) -> CenterReport {
        let center = self.center(deg_bound);
        let next = self.center(deg_bound + 1);
        let saturated = center == next;
        CenterReport { center, deg_bound, saturated }
    }
}

/// Rename one scalar parameter to another (plain textual substitution).
fn rename(e: &ModElement, from: Symbol, to: Symbol) -> ModElement {
    let image = ParamPoly::symbol(to);
    ModElement {
        free: e.free.iter().map(|p| p.substitute(from, &image)).collect(),
        torsion: e.torsion.iter().map(|p| p.substitute(from, &image)).collect(),
    }
}

/// The rank-one algebra with bracket `(del + 2 lambda) L`.
pub fn make_virasoro() -> ConformalAlgebra {
    let m = FgModule::free(&["L"]);
    let l = ModElement::generator(&m, Gen(0));
    let coeff = ParamPoly::symbol(Symbol::Del)
        .add(&ParamPoly::monomial(Symbol::Lambda, 1, rat_int(2)));
    let entry = l.mul_poly(&m, &coeff);
    ConformalAlgebra::new("vir", m, vec![vec![entry]]).expect("valid table")
}

/// The current algebra on the standard three-dimensional simple Lie algebra:
/// `[e _lambda f] = h`, `[h _lambda e] = 2e`, `[h _lambda f] = -2f`.
pub fn make_current_sl2() -> ConformalAlgebra {
    let m = FgModule::free(&["e", "h", "f"]);
    let e = ModElement::generator(&m, Gen(0));
    let h = ModElement::generator(&m, Gen(1));
    let f = ModElement::generator(&m, Gen(2));
    let zero = ModElement::zero(&m);
    let table = vec![
        vec![zero.clone(), e.scale(&rat_int(-2)), h.clone()],
        vec![e.scale(&rat_int(2)), zero.clone(), f.scale(&rat_int(-2))],
        vec![h.neg(), f.scale(&rat_int(2)), zero.clone()],
    ];
    ConformalAlgebra::new("current-sl2", m, table).expect("valid table")
}

/// Central extension of the rank-one algebra by a torsion chain of length
/// `n + 1` with `del t_k = t_{k+1}`: the bracket gains `c lambda^3 t_n`.
pub fn make_virasoro_ext(c: Rational, n: usize) -> ConformalAlgebra {
    let mut a = QMatrix::zero(n + 1, n + 1);
    for k in 0..n {
        a.set(k + 1, k, rat_int(1));
    }
    let tnames: Vec<String> = (0..=n).map(|k| format!("t{}", k)).collect();
    let tname_refs: Vec<&str> = tnames.iter().map(|s| s.as_str()).collect();
    let m = FgModule::with_torsion(&["L"], &tname_refs, a).expect("square torsion matrix");
    let l = ModElement::generator(&m, Gen(0));
    let top = ModElement::generator(&m, Gen(1 + n));
    let coeff = ParamPoly::symbol(Symbol::Del)
        .add(&ParamPoly::monomial(Symbol::Lambda, 1, rat_int(2)));
    let entry = l
        .mul_poly(&m, &coeff)
        .add(&top.mul_poly(&m, &ParamPoly::monomial(Symbol::Lambda, 3, c)));
    ConformalAlgebra::new("vir-ext", m, vec![vec![entry]]).expect("valid table")
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
    fn virasoro_satisfies_all_axioms() {
        let v = make_virasoro();
        assert!(v.check_axioms().is_empty());
        let m = v.module();
        let l = ModElement::generator(m, Gen(0));
        let expect = l.mul_poly(m, &del().add(&lam().scale(&rat_int(2))));
        assert_eq!(v.bracket_gens(Gen(0), Gen(0)), expect);
    }

    #[test]
    fn deformed_virasoro_fails_skew_symmetry_with_witness() {
        let m = FgModule::free(&["L"]);
        let l = ModElement::generator(&m, Gen(0));
        let entry = l.mul_poly(&m, &del().add(&lam().scale(&rat_int(3))));
        let v = ConformalAlgebra::new("vir3", m.clone(), vec![vec![entry.clone()]]).unwrap();
        let failures = v.check_axioms();
        let skew: Vec<_> = failures
            .iter()
            .filter(|f| f.axiom == Axiom::SkewSymmetry)
            .collect();
        assert_eq!(skew.len(), 1);
        // -[L _{-del-lambda} L] = (2 del + 3 lambda) L
        let expect_rhs = l.mul_poly(&m, &del().scale(&rat_int(2)).add(&lam().scale(&rat_int(3))));
        assert_eq!(skew[0].lhs, entry);
        assert_eq!(skew[0].rhs, expect_rhs);
    }

    #[test]
    fn current_sl2_satisfies_all_axioms() {
        let v = make_current_sl2();
        assert!(v.check_axioms().is_empty());
    }

    #[test]
    fn virasoro_ext_satisfies_axioms_and_keeps_cocycle_term() {
        let v = make_virasoro_ext(rat_int(1), 2);
        assert!(v.check_axioms().is_empty());
        let b = v.bracket_gens(Gen(0), Gen(0));
        // lambda^3 coefficient sits on the chain top t2
        let cube: Vec<_> = b.decompose(Symbol::Lambda).into_iter().filter(|(k, _)| *k == 3).collect();
        assert_eq!(cube.len(), 1);
        let m = v.module();
        assert_eq!(cube[0].1, ModElement::generator(m, Gen(3)));
        // torsion generators are central
        assert!(v.bracket_gens(Gen(0), Gen(1)).is_zero());
        assert!(v.bracket_gens(Gen(2), Gen(0)).is_zero());
    }

    #[test]
    fn jacobi_failure_is_detected_with_witness() {
        // cyclic non-Lie table: [x _lambda y] = x, [y _lambda z] = y,
        // [z _lambda x] = z; skew-symmetric but the Jacobi sum is x + y + z
        let m = FgModule::free(&["x", "y", "z"]);
        let x = ModElement::generator(&m, Gen(0));
        let y = ModElement::generator(&m, Gen(1));
        let z = ModElement::generator(&m, Gen(2));
        let o = ModElement::zero(&m);
        let table = vec![
            vec![o.clone(), x.clone(), z.neg()],
            vec![x.neg(), o.clone(), y.clone()],
            vec![z.clone(), y.neg(), o.clone()],
        ];
        let v = ConformalAlgebra::new("bad", m, table).unwrap();
        let failures = v.check_axioms();
        assert!(!failures.is_empty());
        assert!(failures.iter().all(|f| f.axiom == Axiom::Jacobi));
        // the (x, y, z) witness carries both sides
        let f = failures
            .iter()
            .find(|f| f.gens == vec![Gen(0), Gen(1), Gen(2)])
            .expect("witness for the x,y,z triple");
        assert_eq!(f.lhs, x.add(&y));
        assert_eq!(f.rhs, z.neg());
    }

    #[test]
    fn virasoro_derived_series_stabilizes_at_whole() {
        let v = make_virasoro();
        let rep = v.derived_series(8);
        assert_eq!(rep.outcome, SeriesOutcome::Stabilized { steps: 1 });
        assert_eq!(rep.terms[1], Submodule::whole(v.module()));
        assert_eq!(v.is_solvable(8), Some(false));
        assert_eq!(v.is_nilpotent(8), Some(false));
    }

    #[test]
    fn solvable_rank_two_example() {
        // [g1 _lambda g2] = g2: derived series reaches zero in two steps,
        // central series stabilizes at span{g2}.
        let m = FgModule::free(&["g1", "g2"]);
        let g2 = ModElement::generator(&m, Gen(1));
        let zero = ModElement::zero(&m);
        let table = vec![vec![zero.clone(), g2.clone()], vec![g2.neg(), zero.clone()]];
        let v = ConformalAlgebra::new("affine-line", m.clone(), table).unwrap();
        assert!(v.check_axioms().is_empty());
        assert_eq!(v.is_solvable(8), Some(true));
        let rep = v.derived_series(8);
        assert_eq!(rep.outcome, SeriesOutcome::ReachedZero { steps: 2 });
        assert_eq!(rep.terms[1], Submodule::span(&m, &[g2.clone()]));
        assert_eq!(v.is_nilpotent(8), Some(false));
        let cent = v.central_series(8);
        assert_eq!(cent.outcome, SeriesOutcome::Stabilized { steps: 2 });
    }

    #[test]
    fn heisenberg_like_example_is_nilpotent_with_torsion_center() {
        // [a _lambda a] = lambda t with del t = 0.
        let m = FgModule::with_torsion(&["a"], &["t"], QMatrix::zero(1, 1)).unwrap();
        let t = ModElement::generator(&m, Gen(1));
        let entry = t.mul_poly(&m, &lam());
        let v = ConformalAlgebra::new("heis", m.clone(), vec![vec![entry]]).unwrap();
        assert!(v.check_axioms().is_empty());
        assert_eq!(v.is_nilpotent(8), Some(true));
        assert_eq!(v.is_solvable(8), Some(true));
        let rep = v.center_report(3);
        assert!(rep.saturated);
        assert_eq!(rep.center, Submodule::span(&m, &[t]));
    }

    #[test]
    fn virasoro_center_is_zero_and_saturated() {
        let v = make_virasoro();
        let rep = v.center_report(4);
        assert!(rep.saturated);
        assert!(rep.center.is_zero_module());
    }

    #[test]
    fn virasoro_ext_center_is_the_torsion_chain() {
        let v = make_virasoro_ext(rat(1, 2), 1);
        let rep = v.center_report(3);
        assert!(rep.saturated);
        assert_eq!(rep.center.torsion_block_dim(), 2);
        assert_eq!(rep.center.rank(), 0);
    }

    #[test]
    fn subspace_bracket_of_whole_virasoro_is_whole() {
        let v = make_virasoro();
        let whole = Submodule::whole(v.module());
        assert_eq!(v.subspace_bracket(&whole, &whole), whole);
    }

    #[test]
    fn bracket_extends_bilinearly_over_del_polynomials() {
        let v = make_virasoro();
        let m = v.module();
        let l = ModElement::generator(m, Gen(0));
        let a = l.mul_poly(m, &del().pow(2));
        // [del^2 L _lambda L] = lambda^2 (del + 2 lambda) L
        let got = v.bracket(&a, &l);
        let expect = l.mul_poly(
            m,
            &lam().pow(2).mul(&del().add(&lam().scale(&rat_int(2)))),
        );
        assert_eq!(got, expect);
    }
}
