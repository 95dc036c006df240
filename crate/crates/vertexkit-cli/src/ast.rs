//! Syntax tree for the definition language with a canonical printer.
//!
//! A printed tree reparses to an equal tree: equality ignores source
//! positions, and the printer emits exactly the concrete syntax the parser
//! accepts, parenthesizing by operator precedence.

use std::fmt;
use vertexkit::exact::Rational;

/// Line and column of a source location, both 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

/// A value tagged with the position it was parsed from. Equality and
/// hashing ignore the position so round-tripped trees compare equal.
#[derive(Clone, Debug)]
pub struct Spanned<T> {
    pub value: T,
    pub pos: Pos,
}

impl<T> Spanned<T> {
    pub fn new(value: T, pos: Pos) -> Self {
        Spanned { value, pos }
    }

    /// Attach a default position, for trees built in code.
    pub fn synthetic(value: T) -> Self {
        Spanned { value, pos: Pos::default() }
    }
}

impl<T: PartialEq> PartialEq for Spanned<T> {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl<T: Eq> Eq for Spanned<T> {}

/// Which domain type a definition block lowers to.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DefKind {
    Conformal,
    Vertex,
    CoeffModule,
    GcMatrix,
}

impl DefKind {
    pub fn keyword(self) -> &'static str {
        match self {
            DefKind::Conformal => "conformal",
            DefKind::Vertex => "vertex",
            DefKind::CoeffModule => "coeff",
            DefKind::GcMatrix => "gcmat",
        }
    }
}

/// An expression over rationals, the symbols `del`, `lambda`, `z`,
/// generator names, and truncated exponentials.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Expr {
    Rat(Rational),
    Del,
    Lambda,
    Z,
    Name(String),
    Exp(Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            _ => 5,
        }
    }
}

fn write_prec(f: &mut fmt::Formatter<'_>, e: &Expr, min: u8) -> fmt::Result {
    let p = e.precedence();
    if p < min {
        write!(f, "(")?;
        write_prec(f, e, 0)?;
        return write!(f, ")");
    }
    match e {
        Expr::Rat(r) => write!(f, "{}", r),
        Expr::Del => write!(f, "del"),
        Expr::Lambda => write!(f, "lambda"),
        Expr::Z => write!(f, "z"),
        Expr::Name(n) => write!(f, "{}", n),
        Expr::Exp(a) => {
            write!(f, "exp(")?;
            write_prec(f, a, 0)?;
            write!(f, ")")
        }
        Expr::Neg(a) => {
            write!(f, "-")?;
            write_prec(f, a, 3)
        }
        Expr::Pow(b, k) => {
            write_prec(f, b, 5)?;
            write!(f, "^{}", k)
        }
        Expr::Add(a, b) => {
            write_prec(f, a, 1)?;
            write!(f, " + ")?;
            write_prec(f, b, 2)
        }
        Expr::Sub(a, b) => {
            write_prec(f, a, 1)?;
            write!(f, " - ")?;
            write_prec(f, b, 2)
        }
        Expr::Mul(a, b) => {
            write_prec(f, a, 2)?;
            write!(f, "*")?;
            write_prec(f, b, 3)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prec(f, self, 0)
    }
}

/// One declaration inside a definition block.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Item {
    /// Free generators.
    Gens(Vec<String>),
    /// Torsion generators with the matrix of the del-action on them.
    Torsion { names: Vec<String>, del: Vec<Vec<Rational>> },
    /// Torsion dimension of a coefficient module.
    Dim(usize),
    /// The del-action matrix of a coefficient module.
    DelMatrix(Vec<Vec<Rational>>),
    /// The vacuum generator of a vertex table.
    Vacuum(String),
    /// The z-window `[low, high]` every field entry is read on.
    WindowDecl { low: i64, high: i64 },
    /// One lambda-bracket table entry.
    Bracket { left: String, right: String, rhs: Expr },
    /// One state-field table entry.
    Field { left: String, right: String, rhs: Expr },
    /// The image of one generator under a conformal-linear map.
    Map { gen: String, rhs: Expr },
}

fn write_matrix(f: &mut fmt::Formatter<'_>, m: &[Vec<Rational>]) -> fmt::Result {
    write!(f, "[")?;
    for (i, row) in m.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "[")?;
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", v)?;
        }
        write!(f, "]")?;
    }
    write!(f, "]")
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Gens(names) => write!(f, "gen {};", names.join(" ")),
            Item::Torsion { names, del } => {
                write!(f, "torsion {} del ", names.join(" "))?;
                write_matrix(f, del)?;
                write!(f, ";")
            }
            Item::Dim(n) => write!(f, "dim {};", n),
            Item::DelMatrix(m) => {
                write!(f, "del ")?;
                write_matrix(f, m)?;
                write!(f, ";")
            }
            Item::Vacuum(n) => write!(f, "vacuum {};", n),
            Item::WindowDecl { low, high } => write!(f, "window {} {};", low, high),
            Item::Bracket { left, right, rhs } => {
                write!(f, "bracket {} {} = {};", left, right, rhs)
            }
            Item::Field { left, right, rhs } => {
                write!(f, "field {} {} = {};", left, right, rhs)
            }
            Item::Map { gen, rhs } => write!(f, "map {} = {};", gen, rhs),
        }
    }
}

/// One definition block; a source file holds exactly one.
#[derive(Clone, Debug)]
pub struct Definition {
    pub kind: DefKind,
    pub name: String,
    pub items: Vec<Spanned<Item>>,
    /// Position of the block header, for block-level diagnostics.
    pub pos: Pos,
}

impl PartialEq for Definition {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.name == other.name && self.items == other.items
    }
}

impl Eq for Definition {}

impl fmt::Display for Definition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {} {{", self.kind.keyword(), self.name)?;
        for item in &self.items {
            writeln!(f, "  {}", item.value)?;
        }
        writeln!(f, "}}")
    }
}
