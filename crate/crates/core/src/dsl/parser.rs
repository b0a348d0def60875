use super::ast::*;
use super::lexer::{lex, Kw, Tok, Token};
use super::{Code, Diagnostic};
use crate::grid::{RelSet, RelationKind};
use crate::value::Value;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

/// Statement positions, parallel to the vectors of [`Rule`].
#[derive(Clone, Debug, Default)]
pub struct Spans {
    pub header: Pos,
    pub requires: Vec<Pos>,
    pub structures: Vec<Pos>,
    pub domains: Vec<Pos>,
    pub hidden: Vec<Pos>,
    pub constraints: Vec<Pos>,
}

struct Parser {
    toks: Vec<Token>,
    k: usize,
}

type PResult<T> = Result<T, Diagnostic>;

pub fn parse(src: &str) -> PResult<(Rule, Spans)> {
    let mut p = Parser {
        toks: lex(src)?,
        k: 0,
    };
    p.rule()
}

/// Parses a single expression, used for tests and tooling.
pub fn parse_expr(src: &str) -> PResult<Expr> {
    let mut p = Parser {
        toks: lex(src)?,
        k: 0,
    };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Int(v) => format!("integer {v}"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Kw(k) => format!("keyword `{}`", format!("{k:?}").to_lowercase()),
        Tok::Eof => "end of input".into(),
        other => format!("`{}`", punct(other)),
    }
}

fn punct(t: &Tok) -> &'static str {
    match t {
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Comma => ",",
        Tok::Colon => ":",
        Tok::DotDot => "..",
        Tok::Assign => "=",
        Tok::EqEq => "==",
        Tok::Ne => "!=",
        Tok::Lt => "<",
        Tok::Le => "<=",
        Tok::Gt => ">",
        Tok::Ge => ">=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Caret => "^",
        Tok::Arrow => "->",
        Tok::DoubleArrow => "<->",
        _ => "?",
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.k].tok
    }

    fn pos(&self) -> Pos {
        let t = &self.toks[self.k];
        Pos {
            line: t.line,
            col: t.col,
        }
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.k].tok.clone();
        if self.k + 1 < self.toks.len() {
            self.k += 1;
        }
        t
    }

    fn err_here(&self, msg: impl Into<String>) -> Diagnostic {
        let p = self.pos();
        Diagnostic::error(Code::Syntax, p.line, p.col, msg.into())
    }

    fn unexpected(&self, wanted: &str) -> Diagnostic {
        self.err_here(format!(
            "expected {wanted}, found {}",
            describe(self.peek())
        ))
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", punct(&t))))
        }
    }

    fn expect_kw(&mut self, kw: Kw) -> PResult<()> {
        if self.eat(&Tok::Kw(kw)) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{}`", format!("{kw:?}").to_lowercase())))
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected("end of input"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    fn rule(&mut self) -> PResult<(Rule, Spans)> {
        let mut spans = Spans {
            header: self.pos(),
            ..Default::default()
        };
        self.expect_kw(Kw::Puzzle)?;
        let Tok::Str(name) = self.peek().clone() else {
            return Err(self.unexpected("a quoted puzzle name"));
        };
        self.bump();
        let mut rule = Rule {
            name,
            requires: vec![],
            structures: vec![],
            domains: vec![],
            hidden: vec![],
            constraints: vec![],
        };
        loop {
            let pos = self.pos();
            match self.peek().clone() {
                Tok::Eof => break,
                Tok::Kw(Kw::Require) => {
                    self.bump();
                    rule.requires.push(self.statement_expr()?);
                    spans.requires.push(pos);
                }
                Tok::Kw(Kw::Constraint) => {
                    self.bump();
                    rule.constraints.push(self.statement_expr()?);
                    spans.constraints.push(pos);
                }
                Tok::Kw(Kw::Structure) => {
                    self.bump();
                    let name = self.ident()?;
                    self.expect(Tok::Assign)?;
                    self.expect_kw(Kw::Combine)?;
                    let relations = self.relset()?;
                    self.expect_kw(Kw::On)?;
                    let base = self.ident()?;
                    rule.structures.push(StructDef {
                        name,
                        relations,
                        base,
                    });
                    spans.structures.push(pos);
                }
                Tok::Kw(kw @ (Kw::Domain | Kw::Hidden)) => {
                    self.bump();
                    let name = self.ident()?;
                    self.expect(Tok::Assign)?;
                    let set = self.valueset()?;
                    if kw == Kw::Domain {
                        rule.domains.push((name, set));
                        spans.domains.push(pos);
                    } else {
                        rule.hidden.push((name, set));
                        spans.hidden.push(pos);
                    }
                }
                _ => return Err(self.unexpected("a statement")),
            }
        }
        Ok((rule, spans))
    }

    /// An expression that must be followed by a new statement or the end.
    fn statement_expr(&mut self) -> PResult<Expr> {
        let e = self.expr()?;
        match self.peek() {
            Tok::Eof => Ok(e),
            Tok::Kw(k) if k.starts_statement() => Ok(e),
            _ => Err(self.unexpected("an operator or the next statement")),
        }
    }

    fn relset(&mut self) -> PResult<RelSet> {
        self.expect(Tok::LBrace)?;
        let mut set = RelSet::EMPTY;
        loop {
            let name = self.ident()?;
            let Some(r) = RelationKind::from_name(&name) else {
                self.k -= 1;
                return Err(
                    self.err_here(format!("unknown relation `{name}`, expected H, V, D or M"))
                );
            };
            set = set.with(r);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(set)
    }

    fn valueset(&mut self) -> PResult<ValueSet> {
        let start = self.pos();
        self.expect(Tok::LBrace)?;
        let mut items = Vec::new();
        if *self.peek() == Tok::RBrace {
            self.bump();
            return Err(Diagnostic::error(
                Code::EmptyDomain,
                start.line,
                start.col,
                "value set is empty".into(),
            ));
        }
        loop {
            let item = match self.peek() {
                Tok::Kw(Kw::Null) => {
                    self.bump();
                    ValueItem::Value(Value::Null)
                }
                Tok::Kw(Kw::Undecided) => {
                    self.bump();
                    ValueItem::Value(Value::Undecided)
                }
                Tok::Kw(Kw::X) => {
                    self.bump();
                    ValueItem::Value(Value::Mark)
                }
                _ => {
                    let at = self.pos();
                    let lo = self.additive()?;
                    if self.eat(&Tok::DotDot) {
                        let hi = self.additive()?;
                        ValueItem::Range(lo, hi)
                    } else if let Expr::Lit(v @ Value::Int(_)) = lo {
                        ValueItem::Value(v)
                    } else {
                        return Err(Diagnostic::error(
                            Code::Syntax,
                            at.line,
                            at.col,
                            "value set entries must be literals or ranges `a..b`".into(),
                        ));
                    }
                }
            };
            items.push(item);
            if !self.eat(&Tok::Comma) {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(ValueSet::normalized(items))
    }

    pub fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.implies()?;
        while self.eat(&Tok::DoubleArrow) {
            let rhs = self.implies()?;
            lhs = Expr::bin(BinOp::Iff, lhs, rhs);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Expr> {
        let lhs = self.or()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implies()?;
            return Ok(Expr::bin(BinOp::Implies, lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Expr> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Kw(Kw::Or)) {
            let rhs = self.and()?;
            lhs = Expr::bin(BinOp::Or, lhs, rhs);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut lhs = self.not()?;
        while self.eat(&Tok::Kw(Kw::And)) {
            let rhs = self.not()?;
            lhs = Expr::bin(BinOp::And, lhs, rhs);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> PResult<Expr> {
        match self.peek() {
            Tok::Kw(Kw::Not) => {
                self.bump();
                Ok(Expr::Unary(UnOp::Not, Box::new(self.not()?)))
            }
            Tok::Kw(Kw::Forall) | Tok::Kw(Kw::Exists) => self.quant(),
            _ => self.comparison(),
        }
    }

    fn binder(&mut self) -> PResult<(String, Expr, Option<Box<Expr>>)> {
        let var = self.ident()?;
        self.expect_kw(Kw::In)?;
        let coll = self.additive()?;
        let filter = if self.eat(&Tok::Kw(Kw::Where)) {
            Some(Box::new(self.expr()?))
        } else {
            None
        };
        Ok((var, coll, filter))
    }

    fn quant(&mut self) -> PResult<Expr> {
        let q = match self.bump() {
            Tok::Kw(Kw::Forall) => Quantifier::Forall,
            _ => Quantifier::Exists,
        };
        let (var, coll, filter) = self.binder()?;
        self.expect(Tok::Colon)?;
        let body = self.expr()?;
        Ok(Expr::Quant {
            q,
            var,
            coll: Box::new(coll),
            filter,
            body: Box::new(body),
        })
    }

    fn comparison(&mut self) -> PResult<Expr> {
        let lhs = self.additive()?;
        let op = match self.peek() {
            Tok::EqEq => BinOp::Eq,
            Tok::Ne => BinOp::Ne,
            Tok::Lt => BinOp::Lt,
            Tok::Le => BinOp::Le,
            Tok::Gt => BinOp::Gt,
            Tok::Ge => BinOp::Ge,
            Tok::Kw(Kw::In) => BinOp::In,
            _ => return Ok(lhs),
        };
        self.bump();
        let rhs = self.additive()?;
        Ok(Expr::bin(op, lhs, rhs))
    }

    fn additive(&mut self) -> PResult<Expr> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.multiplicative()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn multiplicative(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Star) {
            let rhs = self.unary()?;
            lhs = Expr::bin(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.eat(&Tok::Minus) {
            let inner = self.unary()?;
            return Ok(match inner {
                Expr::Lit(Value::Int(v)) => Expr::Lit(Value::Int(-v)),
                other => Expr::Unary(UnOp::Neg, Box::new(other)),
            });
        }
        self.power()
    }

    fn power(&mut self) -> PResult<Expr> {
        let base = self.primary()?;
        if self.eat(&Tok::Caret) {
            let exp = self.unary()?;
            return Ok(Expr::bin(BinOp::Pow, base, exp));
        }
        Ok(base)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let at = self.pos();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::int(v))
            }
            Tok::Kw(Kw::Null) => {
                self.bump();
                Ok(Expr::Lit(Value::Null))
            }
            Tok::Kw(Kw::Undecided) => {
                self.bump();
                Ok(Expr::Lit(Value::Undecided))
            }
            Tok::Kw(Kw::X) => {
                self.bump();
                Ok(Expr::Lit(Value::Mark))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::LBrace => {
                self.bump();
                let var = self.ident()?;
                self.expect_kw(Kw::In)?;
                let coll = self.additive()?;
                let pred = if self.eat(&Tok::Kw(Kw::Where)) {
                    Some(Box::new(self.expr()?))
                } else {
                    None
                };
                self.expect(Tok::RBrace)?;
                Ok(Expr::SetBuilder {
                    var,
                    coll: Box::new(coll),
                    pred,
                })
            }
            Tok::Kw(kw @ (Kw::Sum | Kw::Prod)) => {
                self.bump();
                let op = if kw == Kw::Sum {
                    AggOp::Sum
                } else {
                    AggOp::Prod
                };
                self.expect(Tok::LParen)?;
                let (var, coll, filter) = self.binder()?;
                self.expect(Tok::Colon)?;
                let body = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Agg {
                    op,
                    var,
                    coll: Box::new(coll),
                    filter,
                    body: Box::new(body),
                })
            }
            Tok::Ident(name) => {
                self.bump();
                if *self.peek() != Tok::LParen {
                    return Ok(Expr::Ident(name));
                }
                let Some(b) = Builtin::from_name(&name) else {
                    return Err(Diagnostic::error(
                        Code::UnknownIdent,
                        at.line,
                        at.col,
                        format!("unknown function `{name}`"),
                    ));
                };
                self.bump();
                let args = self.call_args(b, at)?;
                Ok(Expr::Call(b, args))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    fn call_args(&mut self, b: Builtin, at: Pos) -> PResult<Vec<Arg>> {
        let mut args = Vec::new();
        match b {
            Builtin::Board | Builtin::NoOverlap => {
                args.push(Arg::Family(self.ident()?));
            }
            Builtin::Fill => loop {
                args.push(Arg::Family(self.ident()?));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            },
            Builtin::Region => {
                args.push(Arg::Family(self.ident()?));
                self.expect(Tok::Comma)?;
                args.push(Arg::Expr(self.expr()?));
            }
            Builtin::Connect => {
                args.push(Arg::Expr(self.expr()?));
                self.expect(Tok::Comma)?;
                args.push(Arg::Relations(self.relset()?));
                if self.eat(&Tok::Comma) {
                    args.push(Arg::Family(self.ident()?));
                }
            }
            _ => {
                if *self.peek() != Tok::RParen {
                    loop {
                        args.push(Arg::Expr(self.expr()?));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                if args.len() != 1 {
                    return Err(Diagnostic::error(
                        Code::Arity,
                        at.line,
                        at.col,
                        format!(
                            "`{}` takes exactly one argument, got {}",
                            b.name(),
                            args.len()
                        ),
                    ));
                }
            }
        }
        if *self.peek() == Tok::Comma {
            return Err(Diagnostic::error(
                Code::Arity,
                at.line,
                at.col,
                format!("too many arguments to `{}`", b.name()),
            ));
        }
        self.expect(Tok::RParen)?;
        Ok(args)
    }
}
