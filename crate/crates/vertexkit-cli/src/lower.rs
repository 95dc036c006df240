//! Lowering from parsed definitions to the toolkit's domain objects, with
//! positioned semantic diagnostics.

use std::collections::{BTreeMap, HashMap};

use crate::ast::{DefKind, Definition, Expr, Item, Pos};
use vertexkit::cdmod::{FgModule, Gen, ModElement};
use vertexkit::cohom::CoefficientModule;
use vertexkit::exact::{
    factorial, rat_int, ParamPoly, QMatrix, Rational, Symbol, VarSet, Window,
};
use vertexkit::gcmat::ConformalMatrix;
use vertexkit::lca::ConformalAlgebra;
use vertexkit::va::{FieldSeries, VertexTable};

/// A semantic error with the position of the declaration it arose from.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct LowerError {
    pub pos: Pos,
    pub msg: String,
}

fn err<T>(pos: Pos, msg: impl Into<String>) -> Result<T, LowerError> {
    Err(LowerError { pos, msg: msg.into() })
}

/// A definition lowered to its domain type.
#[derive(Debug)]
pub enum Lowered {
    Conformal(ConformalAlgebra),
    Vertex(VertexTable),
    Coeff(CoefficientModule),
    GcMap { module: FgModule, matrix: ConformalMatrix },
}

impl Lowered {
    pub fn kind_word(&self) -> &'static str {
        match self {
            Lowered::Conformal(_) => "conformal algebra",
            Lowered::Vertex(_) => "vertex table",
            Lowered::Coeff(_) => "coefficient module",
            Lowered::GcMap { .. } => "conformal-linear map",
        }
    }
}

pub fn lower(def: &Definition) -> Result<Lowered, LowerError> {
    match def.kind {
        DefKind::Conformal => lower_conformal(def),
        DefKind::Vertex => lower_vertex(def),
        DefKind::CoeffModule => lower_coeff(def),
        DefKind::GcMatrix => lower_gcmat(def),
    }
}

/// Generator declarations shared by the module-backed kinds.
struct ModuleDecl {
    free: Vec<String>,
    torsion: Vec<String>,
    torsion_del: Option<(Vec<Vec<Rational>>, Pos)>,
}

fn collect_module(def: &Definition, allow: &[&str]) -> Result<ModuleDecl, LowerError> {
    let mut decl = ModuleDecl { free: Vec::new(), torsion: Vec::new(), torsion_del: None };
    for item in &def.items {
        match &item.value {
            Item::Gens(names) => decl.free.extend(names.iter().cloned()),
            Item::Torsion { names, del } => {
                if decl.torsion_del.is_some() {
                    return err(item.pos, "only one torsion block is allowed");
                }
                decl.torsion.extend(names.iter().cloned());
                decl.torsion_del = Some((del.clone(), item.pos));
            }
            other => {
                let word = item_word(other);
                if !allow.contains(&word) {
                    return err(
                        item.pos,
                        format!("`{}` is not allowed in a {} block", word, def.kind.keyword()),
                    );
                }
            }
        }
    }
    let mut seen = HashMap::new();
    for (k, name) in decl.free.iter().chain(decl.torsion.iter()).enumerate() {
        if seen.insert(name.clone(), k).is_some() {
            return err(def.pos, format!("generator `{}` is declared twice", name));
        }
    }
    Ok(decl)
}

fn item_word(item: &Item) -> &'static str {
    match item {
        Item::Gens(_) => "gen",
        Item::Torsion { .. } => "torsion",
        Item::Dim(_) => "dim",
        Item::DelMatrix(_) => "del",
        Item::Vacuum(_) => "vacuum",
        Item::WindowDecl { .. } => "window",
        Item::Bracket { .. } => "bracket",
        Item::Field { .. } => "field",
        Item::Map { .. } => "map",
    }
}

fn build_module(decl: &ModuleDecl, pos: Pos) -> Result<FgModule, LowerError> {
    let free: Vec<&str> = decl.free.iter().map(|s| s.as_str()).collect();
    if decl.torsion.is_empty() {
        if free.is_empty() {
            return err(pos, "at least one generator is required");
        }
        return Ok(FgModule::free(&free));
    }
    let torsion: Vec<&str> = decl.torsion.iter().map(|s| s.as_str()).collect();
    let (rows, mpos) = decl.torsion_del.as_ref().expect("torsion implies a matrix");
    let n = torsion.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return err(*mpos, format!("the torsion matrix must be {} by {}", n, n));
    }
    let mut q = QMatrix::zero(n, n);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            q.set(r, c, v.clone());
        }
    }
    FgModule::with_torsion(&free, &torsion, q).map_err(|e| LowerError { pos: *mpos, msg: e.to_string() })
}

fn gen_lookup(m: &FgModule) -> HashMap<String, Gen> {
    m.gens().map(|g| (m.gen_name(g).to_string(), g)).collect()
}

/// A z-graded evaluation value: a scalar polynomial part and a part linear
/// in the generators, both keyed by z power.
struct Val {
    scalar: BTreeMap<i64, ParamPoly>,
    linear: BTreeMap<i64, ModElement>,
}

impl Val {
    fn zero() -> Self {
        Val { scalar: BTreeMap::new(), linear: BTreeMap::new() }
    }

    fn scalar_at(p: ParamPoly, z: i64) -> Self {
        let mut v = Val::zero();
        if !p.is_zero() {
            v.scalar.insert(z, p);
        }
        v
    }

    fn prune(mut self) -> Self {
        self.scalar.retain(|_, p| !p.is_zero());
        self.linear.retain(|_, e| !e.is_zero());
        self
    }

    fn add(mut self, m: &FgModule, other: Val) -> Self {
        for (k, p) in other.scalar {
            let cur = self.scalar.entry(k).or_insert_with(ParamPoly::zero);
            *cur = cur.add(&p);
        }
        for (k, e) in other.linear {
            let cur = self.linear.entry(k).or_insert_with(|| ModElement::zero(m));
            *cur = cur.add(&e);
        }
        self.prune()
    }

    fn scale(mut self, r: &Rational) -> Self {
        for p in self.scalar.values_mut() {
            *p = p.scale(r);
        }
        for e in self.linear.values_mut() {
            *e = e.scale(r);
        }
        self.prune()
    }
}

struct EvalCx<'a> {
    m: &'a FgModule,
    names: &'a HashMap<String, Gen>,
    allow_z: bool,
    allow_lambda: bool,
    /// Truncation ceiling for exponentials, from the window directive.
    z_high: i64,
}

impl<'a> EvalCx<'a> {
    fn eval(&self, e: &Expr, pos: Pos) -> Result<Val, LowerError> {
        match e {
            Expr::Rat(r) => Ok(Val::scalar_at(ParamPoly::constant(r.clone()), 0)),
            Expr::Del => Ok(Val::scalar_at(ParamPoly::symbol(Symbol::Del), 0)),
            Expr::Lambda => {
                if !self.allow_lambda {
                    return err(pos, "lambda is not allowed in this entry");
                }
                Ok(Val::scalar_at(ParamPoly::symbol(Symbol::Lambda), 0))
            }
            Expr::Z => {
                if !self.allow_z {
                    return err(pos, "z is not allowed in this entry");
                }
                Ok(Val::scalar_at(ParamPoly::one(), 1))
            }
            Expr::Name(n) => match self.names.get(n) {
                Some(&g) => {
                    let mut v = Val::zero();
                    v.linear.insert(0, ModElement::generator(self.m, g));
                    Ok(v)
                }
                None => err(pos, format!("unknown generator `{}`", n)),
            },
            Expr::Neg(a) => Ok(self.eval(a, pos)?.scale(&rat_int(-1))),
            Expr::Add(a, b) => {
                let va = self.eval(a, pos)?;
                let vb = self.eval(b, pos)?;
                Ok(va.add(self.m, vb))
            }
            Expr::Sub(a, b) => {
                let va = self.eval(a, pos)?;
                let vb = self.eval(b, pos)?.scale(&rat_int(-1));
                Ok(va.add(self.m, vb))
            }
            Expr::Mul(a, b) => {
                let va = self.eval(a, pos)?;
                let vb = self.eval(b, pos)?;
                self.mul(va, vb, pos)
            }
            Expr::Pow(b, k) => {
                if *k < 0 {
                    if !self.allow_z {
                        return err(pos, "z is not allowed in this entry");
                    }
                    debug_assert_eq!(**b, Expr::Z, "the parser restricts negative exponents to z");
                    return Ok(Val::scalar_at(ParamPoly::one(), *k));
                }
                let mut acc = Val::scalar_at(ParamPoly::one(), 0);
                for _ in 0..*k {
                    let factor = self.eval(b, pos)?;
                    acc = self.mul(acc, factor, pos)?;
                }
                Ok(acc)
            }
            Expr::Exp(a) => {
                if !self.allow_z {
                    return err(pos, "exp is only allowed in field entries");
                }
                let v = self.eval(a, pos)?;
                if !v.linear.is_empty() {
                    return err(pos, "exp of a generator is not defined");
                }
                if v.scalar.keys().any(|&k| k <= 0) {
                    return err(pos, "exp needs strictly positive powers of z");
                }
                let mut out = Val::scalar_at(ParamPoly::one(), 0);
                let mut power = Val::scalar_at(ParamPoly::one(), 0);
                for k in 1..=self.z_high.max(0) as u32 {
                    power = self.mul_scalar_truncated(power, &v);
                    if power.scalar.is_empty() {
                        break;
                    }
                    let term = clone_scalar(&power).scale(&(rat_int(1) / factorial(k)));
                    out = out.add(self.m, term);
                }
                Ok(out)
            }
        }
    }

    fn mul(&self, a: Val, b: Val, pos: Pos) -> Result<Val, LowerError> {
        if !a.linear.is_empty() && !b.linear.is_empty() {
            return err(pos, "entries must be linear in the generators");
        }
        let mut out = Val::zero();
        for (&ka, pa) in &a.scalar {
            for (&kb, pb) in &b.scalar {
                let cur = out.scalar.entry(ka + kb).or_insert_with(ParamPoly::zero);
                *cur = cur.add(&pa.mul(pb));
            }
            for (&kb, eb) in &b.linear {
                let cur = out.linear.entry(ka + kb).or_insert_with(|| ModElement::zero(self.m));
                *cur = cur.add(&eb.mul_poly(self.m, pa));
            }
        }
        for (&ka, ea) in &a.linear {
            for (&kb, pb) in &b.scalar {
                let cur = out.linear.entry(ka + kb).or_insert_with(|| ModElement::zero(self.m));
                *cur = cur.add(&ea.mul_poly(self.m, pb));
            }
        }
        Ok(out.prune())
    }

    /// Scalar-only product with truncation above the window ceiling, used
    /// inside exponential expansion where dropped orders are outside the
    /// knowledge region anyway.
    fn mul_scalar_truncated(&self, a: Val, b: &Val) -> Val {
        let mut out = Val::zero();
        for (&ka, pa) in &a.scalar {
            for (&kb, pb) in &b.scalar {
                if ka + kb > self.z_high {
                    continue;
                }
                let cur = out.scalar.entry(ka + kb).or_insert_with(ParamPoly::zero);
                *cur = cur.add(&pa.mul(pb));
            }
        }
        out.prune()
    }
}

fn clone_scalar(v: &Val) -> Val {
    Val { scalar: v.scalar.clone(), linear: BTreeMap::new() }
}

/// The generator-combination result of a bracket or map entry: no z
/// dependence and no leftover scalar part.
fn into_element(v: Val, m: &FgModule, pos: Pos, what: &str) -> Result<ModElement, LowerError> {
    if !v.scalar.is_empty() {
        return err(pos, format!("a {} entry must be a combination of generators", what));
    }
    if v.linear.keys().any(|&k| k != 0) {
        return err(pos, format!("z is not allowed in a {} entry", what));
    }
    Ok(v.linear.into_iter().next().map(|(_, e)| e).unwrap_or_else(|| ModElement::zero(m)))
}

fn lower_conformal(def: &Definition) -> Result<Lowered, LowerError> {
    let decl = collect_module(def, &["bracket"])?;
    let m = build_module(&decl, def.pos)?;
    let names = gen_lookup(&m);
    let n = m.free_rank();
    let mut table = vec![vec![ModElement::zero(&m); n]; n];
    let mut filled = vec![vec![false; n]; n];
    let cx = EvalCx { m: &m, names: &names, allow_z: false, allow_lambda: true, z_high: 0 };
    for item in &def.items {
        let Item::Bracket { left, right, rhs } = &item.value else { continue };
        let (gl, gr) = (resolve(&names, left, item.pos)?, resolve(&names, right, item.pos)?);
        let val = cx.eval(rhs, item.pos)?;
        if m.is_torsion_gen(gl) || m.is_torsion_gen(gr) {
            if !val.scalar.is_empty() || !val.linear.is_empty() {
                return err(item.pos, "brackets with a torsion generator must be zero");
            }
            continue;
        }
        let e = into_element(val, &m, item.pos, "bracket")?;
        if filled[gl.0][gr.0] {
            return err(item.pos, format!("duplicate bracket for the pair {} {}", left, right));
        }
        filled[gl.0][gr.0] = true;
        table[gl.0][gr.0] = e;
    }
    let alg = ConformalAlgebra::new(&def.name, m, table)
        .map_err(|e| LowerError { pos: def.pos, msg: e.to_string() })?;
    Ok(Lowered::Conformal(alg))
}

fn resolve(names: &HashMap<String, Gen>, name: &str, pos: Pos) -> Result<Gen, LowerError> {
    names
        .get(name)
        .copied()
        .ok_or_else(|| LowerError { pos, msg: format!("unknown generator `{}`", name) })
}

fn lower_vertex(def: &Definition) -> Result<Lowered, LowerError> {
    let decl = collect_module(def, &["vacuum", "window", "field"])?;
    let m = build_module(&decl, def.pos)?;
    let names = gen_lookup(&m);
    let mut window = None;
    let mut vacuum = None;
    for item in &def.items {
        match &item.value {
            Item::WindowDecl { low, high } => {
                if window.is_some() {
                    return err(item.pos, "duplicate window directive");
                }
                window = Some((*low, *high));
            }
            Item::Vacuum(name) => {
                if vacuum.is_some() {
                    return err(item.pos, "duplicate vacuum directive");
                }
                vacuum = Some((resolve(&names, name, item.pos)?, item.pos));
            }
            _ => {}
        }
    }
    let Some((low, high)) = window else {
        return err(def.pos, "window missing: a vertex block needs `window LOW HIGH;`");
    };
    if high - low > 256 {
        return err(def.pos, "the window spans more than 256 orders");
    }
    let Some((vac, vac_pos)) = vacuum else {
        return err(def.pos, "vacuum missing: a vertex block needs `vacuum NAME;`");
    };
    let total = m.total_gens();
    let zero = FieldSeries::zero(VarSet::Z, Window::one_var(low, high));
    let mut fields = vec![vec![zero; total]; total];
    let mut filled = vec![vec![false; total]; total];
    let cx = EvalCx { m: &m, names: &names, allow_z: true, allow_lambda: false, z_high: high };
    for item in &def.items {
        let Item::Field { left, right, rhs } = &item.value else { continue };
        let (gl, gr) = (resolve(&names, left, item.pos)?, resolve(&names, right, item.pos)?);
        if filled[gl.0][gr.0] {
            return err(item.pos, format!("duplicate field for the pair {} {}", left, right));
        }
        filled[gl.0][gr.0] = true;
        let val = cx.eval(rhs, item.pos)?;
        if !val.scalar.is_empty() {
            return err(item.pos, "a field entry must be linear in the generators");
        }
        let mut series = FieldSeries::zero(VarSet::Z, Window::one_var(low, high));
        for (k, e) in val.linear {
            if k < low {
                return err(item.pos, format!("term at z^{} lies below the window floor {}", k, low));
            }
            if k > high {
                return err(item.pos, format!("term at z^{} lies above the window ceiling {}", k, high));
            }
            series.add_term(k, 0, e);
        }
        series.normalize();
        fields[gl.0][gr.0] = series;
    }
    let table = VertexTable::new(&def.name, m, vac, fields)
        .map_err(|e| LowerError { pos: vac_pos, msg: e.to_string() })?;
    Ok(Lowered::Vertex(table))
}

fn lower_coeff(def: &Definition) -> Result<Lowered, LowerError> {
    let mut dim = None;
    let mut matrix = None;
    for item in &def.items {
        match &item.value {
            Item::Dim(n) => {
                if dim.is_some() {
                    return err(item.pos, "duplicate dim directive");
                }
                dim = Some((*n, item.pos));
            }
            Item::DelMatrix(rows) => {
                if matrix.is_some() {
                    return err(item.pos, "duplicate del matrix");
                }
                matrix = Some((rows.clone(), item.pos));
            }
            other => {
                return err(
                    item.pos,
                    format!("`{}` is not allowed in a coeff block", item_word(other)),
                )
            }
        }
    }
    let Some((rows, mpos)) = matrix else {
        return err(def.pos, "a coeff block needs `del [[..]];`");
    };
    let n = match dim {
        Some((n, dpos)) => {
            if rows.len() != n {
                return err(dpos, format!("dim {} does not match the {}-row del matrix", n, rows.len()));
            }
            n
        }
        None => rows.len(),
    };
    if rows.iter().any(|r| r.len() != n) {
        return err(mpos, format!("the del matrix must be {} by {}", n, n));
    }
    let mut q = QMatrix::zero(n, n);
    for (r, row) in rows.iter().enumerate() {
        for (c, v) in row.iter().enumerate() {
            q.set(r, c, v.clone());
        }
    }
    let module = CoefficientModule::new(n, q)
        .map_err(|e| LowerError { pos: mpos, msg: e.to_string() })?;
    Ok(Lowered::Coeff(module))
}

fn lower_gcmat(def: &Definition) -> Result<Lowered, LowerError> {
    let decl = collect_module(def, &["map"])?;
    let m = build_module(&decl, def.pos)?;
    let names = gen_lookup(&m);
    let mut cols = vec![ModElement::zero(&m); m.free_rank()];
    let mut filled = vec![false; m.free_rank()];
    let cx = EvalCx { m: &m, names: &names, allow_z: false, allow_lambda: true, z_high: 0 };
    for item in &def.items {
        let Item::Map { gen, rhs } = &item.value else { continue };
        let g = resolve(&names, gen, item.pos)?;
        let val = cx.eval(rhs, item.pos)?;
        if m.is_torsion_gen(g) {
            if !val.scalar.is_empty() || !val.linear.is_empty() {
                return err(item.pos, "conformal-linear maps annihilate torsion generators");
            }
            continue;
        }
        if filled[g.0] {
            return err(item.pos, format!("duplicate map for `{}`", gen));
        }
        filled[g.0] = true;
        cols[g.0] = into_element(val, &m, item.pos, "map")?;
    }
    let matrix = ConformalMatrix::new(&m, cols)
        .map_err(|e| LowerError { pos: def.pos, msg: e.to_string() })?;
    Ok(Lowered::GcMap { module: m, matrix })
}
