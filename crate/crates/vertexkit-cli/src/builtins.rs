//! Built-in named inputs and their printable definition forms.
//!
//! Every built-in resolves to a domain object through the core
//! constructors and to a definition tree rendered from that same object,
//! so the printed corpus can never drift from what the commands run on.

use std::collections::BTreeMap;

use crate::ast::{DefKind, Definition, Expr, Item, Pos, Spanned};
use crate::lower::Lowered;
use vertexkit::cdmod::{FgModule, Gen, ModElement};
use vertexkit::cohom::CoefficientModule;
use vertexkit::exact::{rat_int, ParamPoly, QMatrix, Rational, Symbol, EXACT};
use vertexkit::gcmat::ConformalMatrix;
use vertexkit::lca::{make_current_sl2, make_virasoro, make_virasoro_ext, ConformalAlgebra};
use vertexkit::va::{make_finitevertex, make_holomorphic, FieldSeries, VertexTable};

/// Resolve a built-in input name; `Ok(None)` means the name is not a
/// built-in and should be treated as a file path.
pub fn resolve(input: &str, allow_odd: bool) -> Result<Option<(Lowered, Definition)>, String> {
    let (name, args) = split_call(input)?;
    let lowered = match (name.as_str(), args.as_slice()) {
        ("vir", []) => Lowered::Conformal(make_virasoro()),
        ("vir-ext", [c, n]) => {
            Lowered::Conformal(make_virasoro_ext(arg_rational(c)?, arg_index(n)?))
        }
        ("current-sl2", []) => Lowered::Conformal(make_current_sl2()),
        ("finitevertex", [psi]) => {
            let table = make_finitevertex(&arg_psi(psi)?, allow_odd).map_err(|e| {
                format!("{} (pass --expect-locality-failure to work with an odd table)", e)
            })?;
            Lowered::Vertex(table)
        }
        ("holomorphic", [dim]) => {
            Lowered::Vertex(make_holomorphic(arg_index(dim)?, &[]).map_err(|e| e.to_string())?)
        }
        ("holomorphic", [dim, der]) => {
            let coeffs = arg_x_poly(der)?;
            Lowered::Vertex(
                make_holomorphic(arg_index(dim)?, &coeffs).map_err(|e| e.to_string())?,
            )
        }
        ("c", [alpha]) => Lowered::Coeff(CoefficientModule::scalar(arg_rational(alpha)?)),
        ("jordan", [n]) => Lowered::Coeff(CoefficientModule::jordan(arg_index(n)?)),
        ("invertible2", []) => {
            let mut q = QMatrix::zero(2, 2);
            q.set(0, 0, rat_int(2));
            q.set(0, 1, rat_int(1));
            q.set(1, 1, rat_int(3));
            Lowered::Coeff(CoefficientModule::new(2, q).expect("square matrix"))
        }
        ("gc-diag", []) => {
            let (module, matrix) = gc_diag();
            Lowered::GcMap { module, matrix }
        }
        ("gc-triangular", []) => {
            let (module, matrix) = gc_triangular();
            Lowered::GcMap { module, matrix }
        }
        ("vir" | "vir-ext" | "current-sl2" | "finitevertex" | "holomorphic" | "c" | "jordan"
        | "invertible2" | "gc-diag" | "gc-triangular", _) => {
            return Err(format!("wrong number of arguments for built-in `{}`", name));
        }
        _ if input.contains('(') => return Err(format!("unknown built-in `{}`", name)),
        _ => return Ok(None),
    };
    let def = definition_of(&lowered, &ident_for(input));
    Ok(Some((lowered, def)))
}

/// The names of every built-in with a fixed argument list, for the corpus.
pub fn corpus_inputs() -> Vec<&'static str> {
    vec![
        "vir",
        "vir-ext(1,2)",
        "current-sl2",
        "finitevertex(z^-2)",
        "finitevertex(z^-4 + z^-2)",
        "holomorphic(1)",
        "holomorphic(3, x^2)",
        "c(0)",
        "c(1)",
        "c(-2)",
        "c(1/3)",
        "jordan(3)",
        "invertible2",
        "gc-diag",
        "gc-triangular",
    ]
}

/// The printable corpus: every fixed built-in and the odd table that the
/// escape hatch admits.
pub fn corpus() -> Vec<(String, Definition)> {
    let mut out = Vec::new();
    for input in corpus_inputs() {
        let (_, def) = resolve(input, false)
            .expect("corpus inputs resolve")
            .expect("corpus inputs are built-ins");
        out.push((input.to_string(), def));
    }
    let odd = "finitevertex(z^-3)";
    let (_, def) = resolve(odd, true).expect("odd table resolves with the flag").expect("built-in");
    out.push((odd.to_string(), def));
    out
}

fn gc_diag() -> (FgModule, ConformalMatrix) {
    let m = FgModule::free(&["u", "v"]);
    let u = ModElement::generator(&m, Gen(0));
    let cols = vec![u.mul_poly(&m, &ParamPoly::symbol(Symbol::Lambda)), ModElement::zero(&m)];
    let f = ConformalMatrix::new(&m, cols).expect("valid columns");
    (m, f)
}

fn gc_triangular() -> (FgModule, ConformalMatrix) {
    let m = FgModule::with_torsion(&["u", "v"], &["t"], QMatrix::zero(1, 1))
        .expect("square torsion matrix");
    let u = ModElement::generator(&m, Gen(0));
    let cols = vec![ModElement::zero(&m), u.mul_poly(&m, &ParamPoly::symbol(Symbol::Lambda))];
    let f = ConformalMatrix::new(&m, cols).expect("valid columns");
    (m, f)
}

fn split_call(input: &str) -> Result<(String, Vec<Expr>), String> {
    let Some(open) = input.find('(') else {
        return Ok((input.trim().to_string(), Vec::new()));
    };
    let name = input[..open].trim().to_string();
    let rest = input[open + 1..].trim_end();
    let Some(body) = rest.strip_suffix(')') else {
        return Err(format!("missing `)` in `{}`", input));
    };
    let mut args = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, ch) in body.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                args.push(&body[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    args.push(&body[start..]);
    let exprs = args
        .into_iter()
        .map(|a| crate::parser::parse_expression(a).map_err(|e| format!("in `{}`: {}", input, e)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((name, exprs))
}

pub(crate) fn arg_rational(e: &Expr) -> Result<Rational, String> {
    match e {
        Expr::Rat(r) => Ok(r.clone()),
        Expr::Neg(a) => Ok(-arg_rational(a)?),
        Expr::Add(a, b) => Ok(arg_rational(a)? + arg_rational(b)?),
        Expr::Sub(a, b) => Ok(arg_rational(a)? - arg_rational(b)?),
        Expr::Mul(a, b) => Ok(arg_rational(a)? * arg_rational(b)?),
        _ => Err("expected a rational constant".to_string()),
    }
}

fn arg_index(e: &Expr) -> Result<usize, String> {
    let r = arg_rational(e)?;
    if !r.is_integer() || r < rat_int(0) {
        return Err(format!("expected a non-negative integer, got {}", r));
    }
    usize::try_from(r.to_integer()).map_err(|_| format!("index {} is too large", r))
}

/// A Laurent polynomial in z with rational coefficients.
pub(crate) fn arg_psi(e: &Expr) -> Result<BTreeMap<i64, Rational>, String> {
    fn walk(e: &Expr) -> Result<BTreeMap<i64, Rational>, String> {
        let scale = |m: BTreeMap<i64, Rational>, r: &Rational| {
            m.into_iter().map(|(k, c)| (k, c * r)).collect::<BTreeMap<_, _>>()
        };
        let merge = |mut a: BTreeMap<i64, Rational>, b: BTreeMap<i64, Rational>| {
            for (k, c) in b {
                let cur = a.entry(k).or_insert_with(|| rat_int(0));
                *cur = cur.clone() + c;
            }
            a
        };
        match e {
            Expr::Rat(r) => Ok(BTreeMap::from([(0, r.clone())])),
            Expr::Z => Ok(BTreeMap::from([(1, rat_int(1))])),
            Expr::Pow(b, k) if **b == Expr::Z => Ok(BTreeMap::from([(*k, rat_int(1))])),
            Expr::Neg(a) => Ok(scale(walk(a)?, &rat_int(-1))),
            Expr::Add(a, b) => Ok(merge(walk(a)?, walk(b)?)),
            Expr::Sub(a, b) => Ok(merge(walk(a)?, scale(walk(b)?, &rat_int(-1)))),
            Expr::Mul(a, b) => {
                let (va, vb) = (walk(a)?, walk(b)?);
                let mut out = BTreeMap::new();
                for (ka, ca) in &va {
                    for (kb, cb) in &vb {
                        let cur = out.entry(ka + kb).or_insert_with(|| rat_int(0));
                        *cur = cur.clone() + ca * cb;
                    }
                }
                Ok(out)
            }
            _ => Err("psi must be a Laurent polynomial in z".to_string()),
        }
    }
    let mut m = walk(e)?;
    m.retain(|_, c| *c != rat_int(0));
    Ok(m)
}

/// A polynomial in the single name `x`, as a coefficient vector.
fn arg_x_poly(e: &Expr) -> Result<Vec<Rational>, String> {
    fn walk(e: &Expr) -> Result<BTreeMap<u32, Rational>, String> {
        match e {
            Expr::Rat(r) => Ok(BTreeMap::from([(0, r.clone())])),
            Expr::Name(n) if n == "x" => Ok(BTreeMap::from([(1, rat_int(1))])),
            Expr::Pow(b, k) if **b == Expr::Name("x".to_string()) && *k >= 0 => {
                Ok(BTreeMap::from([(*k as u32, rat_int(1))]))
            }
            Expr::Neg(a) => {
                Ok(walk(a)?.into_iter().map(|(k, c)| (k, -c)).collect())
            }
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let sign = if matches!(e, Expr::Sub(..)) { rat_int(-1) } else { rat_int(1) };
                let mut out = walk(a)?;
                for (k, c) in walk(b)? {
                    let cur = out.entry(k).or_insert_with(|| rat_int(0));
                    *cur = cur.clone() + c * sign.clone();
                }
                Ok(out)
            }
            Expr::Mul(a, b) => {
                let (va, vb) = (walk(a)?, walk(b)?);
                let mut out = BTreeMap::new();
                for (ka, ca) in &va {
                    for (kb, cb) in &vb {
                        let cur = out.entry(ka + kb).or_insert_with(|| rat_int(0));
                        *cur = cur.clone() + ca * cb;
                    }
                }
                Ok(out)
            }
            _ => Err("the derivation must be a polynomial in x".to_string()),
        }
    }
    let m = walk(e)?;
    let top = m.keys().max().copied().unwrap_or(0);
    let mut out = vec![rat_int(0); top as usize + 1];
    for (k, c) in m {
        out[k as usize] = c;
    }
    Ok(out)
}

fn ident_for(input: &str) -> String {
    let mut out = String::from("B");
    for ch in input.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch);
        } else if ch == '-' || ch == '/' {
            out.push('m');
        }
    }
    out
}

/// Render any lowered object back to a definition tree.
pub fn definition_of(lowered: &Lowered, name: &str) -> Definition {
    match lowered {
        Lowered::Conformal(a) => definition_from_conformal(name, a),
        Lowered::Vertex(v) => definition_from_table(name, v),
        Lowered::Coeff(c) => definition_from_coeff(name, c),
        Lowered::GcMap { module, matrix } => definition_from_gcmap(name, module, matrix),
    }
}

fn matrix_rows(q: &QMatrix) -> Vec<Vec<Rational>> {
    (0..q.rows).map(|r| (0..q.cols).map(|c| q.get(r, c).clone()).collect()).collect()
}

fn module_items(m: &FgModule) -> Vec<Spanned<Item>> {
    let mut items = Vec::new();
    let free: Vec<String> = (0..m.free_rank()).map(|g| m.gen_name(Gen(g)).to_string()).collect();
    if !free.is_empty() {
        items.push(Spanned::synthetic(Item::Gens(free)));
    }
    if m.torsion_dim() > 0 {
        let names = (m.free_rank()..m.total_gens())
            .map(|g| m.gen_name(Gen(g)).to_string())
            .collect();
        items.push(Spanned::synthetic(Item::Torsion {
            names,
            del: matrix_rows(m.torsion_del()),
        }));
    }
    items
}

/// A polynomial in del and lambda as an expression tree, del-major so the
/// printed form reads `del + 2*lambda` rather than the slot order.
fn poly_to_expr(p: &ParamPoly) -> Expr {
    let mut monomials: Vec<_> = p.terms().collect();
    monomials.sort_by(|a, b| b.0.cmp(a.0));
    let mut sum: Option<Expr> = None;
    for (&expt, c) in monomials {
        let [d, l, mu, al] = expt;
        debug_assert_eq!((mu, al), (0, 0), "definition entries never carry mu or alpha");
        let mut factors: Vec<Expr> = Vec::new();
        for (sym, k) in [(Expr::Del, d), (Expr::Lambda, l)] {
            match k {
                0 => {}
                1 => factors.push(sym),
                _ => factors.push(Expr::Pow(Box::new(sym), k as i64)),
            }
        }
        let mut term = if factors.is_empty() {
            Expr::Rat(c.clone())
        } else {
            let body = factors.into_iter().reduce(Expr::mul).expect("nonempty");
            if c == &rat_int(1) {
                body
            } else if c == &rat_int(-1) {
                Expr::Neg(Box::new(body))
            } else {
                Expr::Rat(c.clone()).mul(body)
            }
        };
        term = match sum.take() {
            None => term,
            Some(s) => s.add(term),
        };
        sum = Some(term);
    }
    sum.unwrap_or(Expr::Rat(rat_int(0)))
}

fn gen_coeff<'a>(m: &FgModule, e: &'a ModElement, g: Gen) -> &'a ParamPoly {
    if g.0 < m.free_rank() {
        &e.free[g.0]
    } else {
        &e.torsion[g.0 - m.free_rank()]
    }
}

fn element_to_expr(m: &FgModule, e: &ModElement) -> Expr {
    let mut sum: Option<Expr> = None;
    for g in m.gens() {
        let p = gen_coeff(m, e, g);
        if p.is_zero() {
            continue;
        }
        let name = Expr::Name(m.gen_name(g).to_string());
        let term = if p.is_one() { name } else { poly_to_expr(p).mul(name) };
        sum = Some(match sum.take() {
            None => term,
            Some(s) => s.add(term),
        });
    }
    sum.unwrap_or(Expr::Rat(rat_int(0)))
}

fn series_to_expr(m: &FgModule, s: &FieldSeries) -> Expr {
    let mut sum: Option<Expr> = None;
    for (&(i, j), coeff) in s.terms() {
        debug_assert_eq!(j, 0, "field series are single-variable");
        if coeff.is_zero() {
            continue;
        }
        let body = element_to_expr(m, coeff);
        let term = match i {
            0 => body,
            1 => Expr::Z.mul(body),
            _ => Expr::Pow(Box::new(Expr::Z), i).mul(body),
        };
        sum = Some(match sum.take() {
            None => term,
            Some(s) => s.add(term),
        });
    }
    sum.unwrap_or(Expr::Rat(rat_int(0)))
}

pub fn definition_from_conformal(name: &str, a: &ConformalAlgebra) -> Definition {
    let m = a.module();
    let mut items = module_items(m);
    for i in 0..m.free_rank() {
        for j in 0..m.free_rank() {
            items.push(Spanned::synthetic(Item::Bracket {
                left: m.gen_name(Gen(i)).to_string(),
                right: m.gen_name(Gen(j)).to_string(),
                rhs: element_to_expr(m, a.table_entry(i, j)),
            }));
        }
    }
    Definition { kind: DefKind::Conformal, name: name.to_string(), items, pos: Pos::default() }
}

pub fn definition_from_table(name: &str, v: &VertexTable) -> Definition {
    let m = v.module();
    let total = m.total_gens();
    let mut low = 0i64;
    let mut high = 0i64;
    for i in 0..total {
        for j in 0..total {
            let s = v.field(Gen(i), Gen(j));
            low = low.min(s.window.low[0]);
            let h = s.window.high[0];
            if h < EXACT / 2 {
                high = high.max(h);
            }
            if let Some(top) = s.terms().map(|(&(k, _), _)| k).max() {
                high = high.max(top);
            }
        }
    }
    let mut items = module_items(m);
    items.push(Spanned::synthetic(Item::Vacuum(m.gen_name(v.vacuum()).to_string())));
    items.push(Spanned::synthetic(Item::WindowDecl { low, high }));
    for i in 0..total {
        for j in 0..total {
            items.push(Spanned::synthetic(Item::Field {
                left: m.gen_name(Gen(i)).to_string(),
                right: m.gen_name(Gen(j)).to_string(),
                rhs: series_to_expr(m, v.field(Gen(i), Gen(j))),
            }));
        }
    }
    Definition { kind: DefKind::Vertex, name: name.to_string(), items, pos: Pos::default() }
}

pub fn definition_from_coeff(name: &str, c: &CoefficientModule) -> Definition {
    let items = vec![
        Spanned::synthetic(Item::Dim(c.dim())),
        Spanned::synthetic(Item::DelMatrix(matrix_rows(c.del_action()))),
    ];
    Definition { kind: DefKind::CoeffModule, name: name.to_string(), items, pos: Pos::default() }
}

pub fn definition_from_gcmap(name: &str, m: &FgModule, f: &ConformalMatrix) -> Definition {
    let mut items = module_items(m);
    for c in 0..m.free_rank() {
        items.push(Spanned::synthetic(Item::Map {
            gen: m.gen_name(Gen(c)).to_string(),
            rhs: element_to_expr(m, f.col(c)),
        }));
    }
    for t in m.free_rank()..m.total_gens() {
        items.push(Spanned::synthetic(Item::Map {
            gen: m.gen_name(Gen(t)).to_string(),
            rhs: Expr::Rat(rat_int(0)),
        }));
    }
    Definition { kind: DefKind::GcMatrix, name: name.to_string(), items, pos: Pos::default() }
}
