//! Recursive-descent parser for the definition language.
//!
//! A source file holds exactly one definition block. Expressions follow the
//! grammar
//!
//! ```text
//! expr    := product (("+" | "-") product)*
//! product := factor ("*" factor)*
//! factor  := "-" factor | power
//! power   := atom ["^" ["-"] INT]
//! atom    := INT ["/" INT] | "del" | "lambda" | "z"
//!          | "exp" "(" expr ")" | NAME | "(" expr ")"
//! ```
//!
//! with a negative exponent allowed only on `z`.

use crate::ast::{DefKind, Definition, Expr, Item, Pos, Spanned};
use crate::lexer::{tokenize, Token, TokenKind};
use vertexkit::exact::{rat_int, Rational};

/// A syntax error with the position it was detected at.
#[derive(Clone, PartialEq, Eq, Debug, thiserror::Error)]
#[error("{pos}: {msg}")]
pub struct ParseError {
    pub pos: Pos,
    pub msg: String,
}

const KEYWORDS: &[&str] = &[
    "conformal", "vertex", "coeff", "gcmat", "gen", "torsion", "dim", "del", "lambda", "z",
    "exp", "vacuum", "window", "bracket", "field", "map",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

/// Parse one definition block; trailing input is an error.
pub fn parse_definition(src: &str) -> Result<Definition, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, i: 0 };
    let def = p.definition()?;
    p.expect_eof()?;
    Ok(def)
}

/// Parse a bare expression, as used by built-in arguments.
pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: tokenize(src)?, i: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.i]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { pos: self.peek().pos, msg: msg.into() })
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        if self.peek().kind == kind {
            Ok(self.bump())
        } else {
            self.err(format!("expected {}, found {}", kind.describe(), self.peek().kind.describe()))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ParseError> {
        if self.peek().kind == TokenKind::Eof {
            Ok(())
        } else {
            self.err(format!("expected end of input, found {}", self.peek().kind.describe()))
        }
    }

    /// A keyword in head position, matched without consuming other idents.
    fn eat_word(&mut self, word: &str) -> bool {
        if let TokenKind::Ident(s) = &self.peek().kind {
            if s == word {
                self.bump();
                return true;
            }
        }
        false
    }

    fn name(&mut self, what: &str) -> Result<String, ParseError> {
        match &self.peek().kind {
            TokenKind::Ident(s) if !is_keyword(s) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            TokenKind::Ident(s) => {
                self.err(format!("`{}` is a reserved word and cannot name {}", s, what))
            }
            other => self.err(format!("expected a name for {}, found {}", what, other.describe())),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        match self.peek().kind {
            TokenKind::Int(n) => {
                self.bump();
                Ok(n)
            }
            _ => self.err(format!("expected an integer, found {}", self.peek().kind.describe())),
        }
    }

    fn signed_int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat(&TokenKind::Minus);
        let n = self.int()?;
        Ok(if neg { -n } else { n })
    }

    fn signed_rational(&mut self) -> Result<Rational, ParseError> {
        let neg = self.eat(&TokenKind::Minus);
        let n = self.int()?;
        let mut r = rat_int(n);
        if self.eat(&TokenKind::Slash) {
            let pos = self.peek().pos;
            let d = self.int()?;
            if d == 0 {
                return Err(ParseError { pos, msg: "zero denominator".to_string() });
            }
            r = r / rat_int(d);
        }
        Ok(if neg { -r } else { r })
    }

    fn matrix(&mut self) -> Result<Vec<Vec<Rational>>, ParseError> {
        self.expect(TokenKind::LBracket)?;
        let mut rows = Vec::new();
        loop {
            self.expect(TokenKind::LBracket)?;
            let mut row = vec![self.signed_rational()?];
            while self.eat(&TokenKind::Comma) {
                row.push(self.signed_rational()?);
            }
            self.expect(TokenKind::RBracket)?;
            rows.push(row);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::RBracket)?;
        Ok(rows)
    }

    fn definition(&mut self) -> Result<Definition, ParseError> {
        let pos = self.peek().pos;
        let kind = if self.eat_word("conformal") {
            DefKind::Conformal
        } else if self.eat_word("vertex") {
            DefKind::Vertex
        } else if self.eat_word("coeff") {
            DefKind::CoeffModule
        } else if self.eat_word("gcmat") {
            DefKind::GcMatrix
        } else {
            return self.err(format!(
                "expected `conformal`, `vertex`, `coeff`, or `gcmat`, found {}",
                self.peek().kind.describe()
            ));
        };
        let name = self.name("the definition")?;
        self.expect(TokenKind::LBrace)?;
        let mut items = Vec::new();
        while !self.eat(&TokenKind::RBrace) {
            items.push(self.item()?);
        }
        Ok(Definition { kind, name, items, pos })
    }

    fn item(&mut self) -> Result<Spanned<Item>, ParseError> {
        let pos = self.peek().pos;
        let item = if self.eat_word("gen") {
            let mut names = vec![self.name("a generator")?];
            while matches!(&self.peek().kind, TokenKind::Ident(s) if !is_keyword(s)) {
                names.push(self.name("a generator")?);
            }
            self.expect(TokenKind::Semi)?;
            Item::Gens(names)
        } else if self.eat_word("torsion") {
            let mut names = vec![self.name("a torsion generator")?];
            while matches!(&self.peek().kind, TokenKind::Ident(s) if !is_keyword(s)) {
                names.push(self.name("a torsion generator")?);
            }
            if !self.eat_word("del") {
                return self.err(format!(
                    "expected `del` and the torsion matrix, found {}",
                    self.peek().kind.describe()
                ));
            }
            let del = self.matrix()?;
            self.expect(TokenKind::Semi)?;
            Item::Torsion { names, del }
        } else if self.eat_word("dim") {
            let pos = self.peek().pos;
            let n = self.int()?;
            if n < 0 {
                return Err(ParseError { pos, msg: "dimension cannot be negative".to_string() });
            }
            self.expect(TokenKind::Semi)?;
            Item::Dim(n as usize)
        } else if self.eat_word("del") {
            let m = self.matrix()?;
            self.expect(TokenKind::Semi)?;
            Item::DelMatrix(m)
        } else if self.eat_word("vacuum") {
            let n = self.name("the vacuum")?;
            self.expect(TokenKind::Semi)?;
            Item::Vacuum(n)
        } else if self.eat_word("window") {
            let low = self.signed_int()?;
            let high = self.signed_int()?;
            if low > high {
                return Err(ParseError { pos, msg: "window floor exceeds its ceiling".to_string() });
            }
            self.expect(TokenKind::Semi)?;
            Item::WindowDecl { low, high }
        } else if self.eat_word("bracket") {
            let left = self.name("a generator")?;
            let right = self.name("a generator")?;
            self.expect(TokenKind::Eq)?;
            let rhs = self.expr()?;
            self.expect(TokenKind::Semi)?;
            Item::Bracket { left, right, rhs }
        } else if self.eat_word("field") {
            let left = self.name("a generator")?;
            let right = self.name("a generator")?;
            self.expect(TokenKind::Eq)?;
            let rhs = self.expr()?;
            self.expect(TokenKind::Semi)?;
            Item::Field { left, right, rhs }
        } else if self.eat_word("map") {
            let gen = self.name("a generator")?;
            self.expect(TokenKind::Eq)?;
            let rhs = self.expr()?;
            self.expect(TokenKind::Semi)?;
            Item::Map { gen, rhs }
        } else {
            return self.err(format!(
                "expected a declaration (gen, torsion, dim, del, vacuum, window, bracket, field, map), found {}",
                self.peek().kind.describe()
            ));
        };
        Ok(Spanned::new(item, pos))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.product()?;
        loop {
            if self.eat(&TokenKind::Plus) {
                e = Expr::Add(Box::new(e), Box::new(self.product()?));
            } else if self.eat(&TokenKind::Minus) {
                e = Expr::Sub(Box::new(e), Box::new(self.product()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.factor()?;
        while self.eat(&TokenKind::Star) {
            e = Expr::Mul(Box::new(e), Box::new(self.factor()?));
        }
        Ok(e)
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&TokenKind::Minus) {
            let inner = self.factor()?;
            return Ok(match inner {
                Expr::Rat(r) => Expr::Rat(-r),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(&TokenKind::Caret) {
            let pos = self.peek().pos;
            let k = self.signed_int()?;
            if k < 0 && base != Expr::Z {
                return Err(ParseError {
                    pos,
                    msg: "a negative exponent is only allowed on z".to_string(),
                });
            }
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().kind.clone() {
            TokenKind::Int(n) => {
                self.bump();
                let mut r = rat_int(n);
                if self.eat(&TokenKind::Slash) {
                    let pos = self.peek().pos;
                    let d = self.int()?;
                    if d == 0 {
                        return Err(ParseError { pos, msg: "zero denominator".to_string() });
                    }
                    r = r / rat_int(d);
                }
                Ok(Expr::Rat(r))
            }
            TokenKind::Ident(s) => match s.as_str() {
                "del" => {
                    self.bump();
                    Ok(Expr::Del)
                }
                "lambda" => {
                    self.bump();
                    Ok(Expr::Lambda)
                }
                "z" => {
                    self.bump();
                    Ok(Expr::Z)
                }
                "exp" => {
                    self.bump();
                    self.expect(TokenKind::LParen)?;
                    let e = self.expr()?;
                    self.expect(TokenKind::RParen)?;
                    Ok(Expr::Exp(Box::new(e)))
                }
                _ if is_keyword(&s) => {
                    self.err(format!("`{}` is a reserved word and cannot appear here", s))
                }
                _ => {
                    self.bump();
                    Ok(Expr::Name(s))
                }
            },
            TokenKind::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(TokenKind::RParen)?;
                Ok(e)
            }
            other => self.err(format!("expected an expression, found {}", other.describe())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn the_virasoro_example_parses_to_one_bracket() {
        let d = parse_definition("conformal Vir { gen L; bracket L L = (del + 2*lambda)*L; }")
            .unwrap();
        assert_eq!(d.kind, DefKind::Conformal);
        assert_eq!(d.name, "Vir");
        assert_eq!(d.items.len(), 2);
        let rhs = Expr::Del
            .add(Expr::Rat(rat_int(2)).mul(Expr::Lambda))
            .mul(Expr::Name("L".into()));
        assert_eq!(
            d.items[1].value,
            Item::Bracket { left: "L".into(), right: "L".into(), rhs }
        );
    }

    #[test]
    fn the_scalar_module_example_parses_to_dim_and_matrix() {
        let d = parse_definition("coeff C0 { dim 1; del [[0]]; }").unwrap();
        assert_eq!(d.kind, DefKind::CoeffModule);
        assert_eq!(d.items[0].value, Item::Dim(1));
        assert_eq!(d.items[1].value, Item::DelMatrix(vec![vec![rat_int(0)]]));
    }

    #[test]
    fn a_truncated_bracket_reports_the_position_of_the_hole() {
        let src = "conformal V { gen L;\n  bracket L L = (del + 2*lambda)*L +";
        let e = parse_definition(src).unwrap_err();
        assert_eq!(e.pos.line, 2);
        assert!(e.msg.contains("expected an expression"), "{}", e.msg);
    }

    #[test]
    fn negative_exponents_are_rejected_off_z() {
        let e = parse_definition("conformal V { gen L; bracket L L = del^-2*L; }").unwrap_err();
        assert!(e.msg.contains("only allowed on z"), "{}", e.msg);
        parse_definition("vertex V { gen a; torsion v del [[0]]; vacuum v; window -2 2; field a a = z^-2*a; }")
            .unwrap();
    }

    #[test]
    fn rationals_mixed_signs_and_powers_round_trip_through_the_printer() {
        for src in [
            "conformal V { gen L M; bracket L M = -1/2*del^2*L + lambda*M - M; }",
            "vertex V { gen a; torsion v del [[0]]; vacuum v; window -4 4; field a a = exp(1/2*z*del)*z^-2*a; }",
            "gcmat W { gen u v_1; torsion t del [[1/3]]; map u = lambda*u; map v_1 = 0; }",
            "coeff J { dim 2; del [[0, 0], [1, 0]]; }",
        ] {
            let d = parse_definition(src).unwrap();
            let printed = d.to_string();
            let again = parse_definition(&printed).unwrap();
            assert_eq!(d, again, "print:\n{}", printed);
        }
    }

    #[test]
    fn lexer_positions_point_at_the_offending_character() {
        let e = parse_definition("conformal V {\n  gen L;\n  bracket L L = $;\n}").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (3, 17));
    }

    fn expr_strategy() -> impl proptest::strategy::Strategy<Value = Expr> {
        use proptest::prelude::*;
        use vertexkit::exact::rat;
        let leaf = prop_oneof![
            (0i64..=6, 1i64..=4).prop_map(|(n, d)| Expr::Rat(rat(n, d))),
            Just(Expr::Del),
            Just(Expr::Lambda),
            Just(Expr::Z),
            Just(Expr::Name("L".to_string())),
        ];
        leaf.prop_recursive(3, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.add(b)),
                (inner.clone(), inner.clone())
                    .prop_map(|(a, b)| Expr::Sub(Box::new(a), Box::new(b))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| a.mul(b)),
                inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
                inner.clone().prop_map(|a| Expr::Exp(Box::new(a))),
                (1i64..=3).prop_map(|k| Expr::Pow(Box::new(Expr::Del), k)),
                (-3i64..=3).prop_map(|k| Expr::Pow(Box::new(Expr::Z), k)),
            ]
        })
    }

    proptest::proptest! {
        #[test]
        fn printing_and_parsing_reach_a_fixed_point(e in expr_strategy()) {
            let src = format!("conformal V {{ gen L; bracket L L = {}; }}", e);
            let first = parse_definition(&src).expect("printed expressions parse");
            let printed = first.to_string();
            let second = parse_definition(&printed).expect("printed definitions parse");
            proptest::prop_assert_eq!(&second, &first);
            proptest::prop_assert_eq!(second.to_string(), printed);
        }
    }
}
