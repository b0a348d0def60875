use std::collections::BTreeSet;

use super::ast::*;
use super::ir::{FamId, FamilyDecl, FamilySource, Global, Node, Program};
use super::parser::{Pos, Spans};
use super::{Code, Diagnostic};
use crate::grid::GridDims;
use crate::structure::BaseFamily;
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObjTy {
    Elem(FamId),
    Region(FamId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ty {
    Bool,
    Scalar,
    Obj(ObjTy),
    Coll(ObjTy),
}

fn ty_name(t: Ty, p: &Program) -> String {
    let obj = |o: ObjTy| match o {
        ObjTy::Elem(f) => format!("element of {}", p.families[f].name),
        ObjTy::Region(f) => format!("instance of {}", p.families[f].name),
    };
    match t {
        Ty::Bool => "boolean".into(),
        Ty::Scalar => "value".into(),
        Ty::Obj(o) => obj(o),
        Ty::Coll(o) => format!(
            "collection of {}",
            obj(o)
                .replace("element", "elements")
                .replace("instance", "instances")
        ),
    }
}

struct Ctx<'a> {
    prog: &'a Program,
    scope: Vec<(String, Ty)>,
    pos: Pos,
    shape_hits: Vec<ObjTy>,
}

impl Ctx<'_> {
    fn err(&self, code: Code, msg: String) -> Diagnostic {
        Diagnostic::error(code, self.pos.line, self.pos.col, msg)
    }

    fn mismatch(&self, what: &str, want: &str, got: Ty) -> Diagnostic {
        self.err(
            Code::TypeMismatch,
            format!("{what} expects {want}, found {}", ty_name(got, self.prog)),
        )
    }

    fn family(&self, name: &str) -> Result<FamId, Diagnostic> {
        self.prog
            .family(name)
            .ok_or_else(|| self.err(Code::UnknownIdent, format!("unknown family `{name}`")))
    }

    fn member_ty(&self, f: FamId) -> ObjTy {
        if self.prog.families[f].is_base() {
            ObjTy::Elem(f)
        } else {
            ObjTy::Region(f)
        }
    }

    /// Type of the members of an object.
    fn members_of(&self, o: ObjTy) -> ObjTy {
        match o {
            ObjTy::Elem(b) => ObjTy::Elem(b),
            ObjTy::Region(f) => match self.prog.families[f].source {
                FamilySource::Combine { base, .. } => self.member_ty(base),
                FamilySource::Base(_) => ObjTy::Elem(f),
            },
        }
    }

    fn family_of(o: ObjTy) -> FamId {
        match o {
            ObjTy::Elem(f) | ObjTy::Region(f) => f,
        }
    }

    fn expect(&mut self, e: &Expr, want: Ty, what: &str) -> Result<Node, Diagnostic> {
        let (n, t) = self.expr(e)?;
        if t != want {
            return Err(self.mismatch(what, &ty_name(want, self.prog), t));
        }
        Ok(n)
    }

    /// Anything that can be iterated: collections, and objects via members.
    fn iterable(&mut self, e: &Expr, what: &str) -> Result<(Node, ObjTy), Diagnostic> {
        let (n, t) = self.expr(e)?;
        match t {
            Ty::Coll(o) => Ok((n, o)),
            Ty::Obj(o) => Ok((Node::Members(Box::new(n)), self.members_of(o))),
            other => Err(self.mismatch(what, "a collection or structure", other)),
        }
    }

    fn binder(
        &mut self,
        var: &str,
        coll: &Expr,
        filter: &Option<Box<Expr>>,
        what: &str,
    ) -> Result<(Node, Option<Box<Node>>), Diagnostic> {
        if Kw_reserved(var) {
            return Err(self.err(Code::Syntax, format!("`{var}` is reserved")));
        }
        let (cn, ot) = self.iterable(coll, what)?;
        self.scope.push((var.to_string(), Ty::Obj(ot)));
        let f = match filter {
            Some(f) => match self.expect(f, Ty::Bool, "`where` filter") {
                Ok(n) => Some(Box::new(n)),
                Err(e) => {
                    self.scope.pop();
                    return Err(e);
                }
            },
            None => None,
        };
        Ok((cn, f))
    }

    fn expr(&mut self, e: &Expr) -> Result<(Node, Ty), Diagnostic> {
        Ok(match e {
            Expr::Lit(v) => (Node::Lit(*v), Ty::Scalar),
            Expr::Ident(name) => {
                if let Some(k) = self.scope.iter().rposition(|(n, _)| n == name) {
                    (Node::Var(k), self.scope[k].1)
                } else {
                    match name.as_str() {
                        "n" => (Node::Global(Global::N), Ty::Scalar),
                        "m" => (Node::Global(Global::M), Ty::Scalar),
                        "k" => (Node::Global(Global::K), Ty::Scalar),
                        _ if self.prog.family(name).is_some() => {
                            return Err(self.err(
                                Code::TypeMismatch,
                                format!("`{name}` is a family, not a value; use B({name})"),
                            ))
                        }
                        _ => {
                            return Err(
                                self.err(Code::UnboundVar, format!("unbound variable `{name}`"))
                            )
                        }
                    }
                }
            }
            Expr::Unary(UnOp::Not, a) => (
                Node::Not(Box::new(self.expect(a, Ty::Bool, "`not`")?)),
                Ty::Bool,
            ),
            Expr::Unary(UnOp::Neg, a) => (
                Node::Neg(Box::new(self.expect(a, Ty::Scalar, "unary `-`")?)),
                Ty::Scalar,
            ),
            Expr::Binary(op, a, b) => self.binary(*op, a, b)?,
            Expr::Quant {
                q,
                var,
                coll,
                filter,
                body,
            } => {
                let (cn, f) = self.binder(var, coll, filter, "quantifier")?;
                let body = self.expect(body, Ty::Bool, "quantifier body");
                self.scope.pop();
                (
                    Node::Quant {
                        q: *q,
                        coll: Box::new(cn),
                        filter: f,
                        body: Box::new(body?),
                    },
                    Ty::Bool,
                )
            }
            Expr::Agg {
                op,
                var,
                coll,
                filter,
                body,
            } => {
                let (cn, f) = self.binder(var, coll, filter, "sum/prod")?;
                let body = self.expect(body, Ty::Scalar, "sum/prod body");
                self.scope.pop();
                (
                    Node::Agg {
                        op: *op,
                        coll: Box::new(cn),
                        filter: f,
                        body: Box::new(body?),
                    },
                    Ty::Scalar,
                )
            }
            Expr::SetBuilder { var, coll, pred } => {
                let (cn, f) = self.binder(var, coll, pred, "set builder")?;
                let ot = match self.scope.pop() {
                    Some((_, Ty::Obj(o))) => o,
                    _ => unreachable!(),
                };
                (
                    Node::SetBuilder {
                        coll: Box::new(cn),
                        pred: f,
                    },
                    Ty::Coll(ot),
                )
            }
            Expr::Call(b, args) => self.call(*b, args)?,
        })
    }

    fn binary(&mut self, op: BinOp, a: &Expr, b: &Expr) -> Result<(Node, Ty), Diagnostic> {
        let sym = format!("`{}`", op.symbol());
        let node = |x, y| Node::Bin(op, Box::new(x), Box::new(y));
        Ok(match op {
            BinOp::Iff | BinOp::Implies | BinOp::Or | BinOp::And => {
                let x = self.expect(a, Ty::Bool, &sym)?;
                let y = self.expect(b, Ty::Bool, &sym)?;
                (node(x, y), Ty::Bool)
            }
            BinOp::Add
            | BinOp::Sub
            | BinOp::Mul
            | BinOp::Pow
            | BinOp::Lt
            | BinOp::Le
            | BinOp::Gt
            | BinOp::Ge => {
                let x = self.expect(a, Ty::Scalar, &sym)?;
                let y = self.expect(b, Ty::Scalar, &sym)?;
                let t = if matches!(op, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Pow) {
                    Ty::Scalar
                } else {
                    Ty::Bool
                };
                (node(x, y), t)
            }
            BinOp::Eq | BinOp::Ne => {
                let (x, tx) = self.expr(a)?;
                let (y, ty) = self.expr(b)?;
                let ok = matches!(
                    (tx, ty),
                    (Ty::Scalar, Ty::Scalar) | (Ty::Bool, Ty::Bool) | (Ty::Obj(_), Ty::Obj(_))
                );
                if !ok {
                    return Err(self.err(
                        Code::TypeMismatch,
                        format!(
                            "cannot compare {} with {}",
                            ty_name(tx, self.prog),
                            ty_name(ty, self.prog)
                        ),
                    ));
                }
                (node(x, y), Ty::Bool)
            }
            BinOp::In => {
                let (x, tx) = self.expr(a)?;
                if !matches!(tx, Ty::Obj(_)) {
                    return Err(self.mismatch("left side of `in`", "an element or structure", tx));
                }
                let (y, ty) = self.expr(b)?;
                if !matches!(ty, Ty::Obj(_) | Ty::Coll(_)) {
                    return Err(self.mismatch(
                        "right side of `in`",
                        "a structure or collection",
                        ty,
                    ));
                }
                (node(x, y), Ty::Bool)
            }
        })
    }

    fn arg_expr<'e>(&self, b: Builtin, args: &'e [Arg], k: usize) -> Result<&'e Expr, Diagnostic> {
        match args.get(k) {
            Some(Arg::Expr(e)) => Ok(e),
            _ => Err(self.err(Code::Arity, format!("bad arguments to `{}`", b.name()))),
        }
    }

    fn arg_family(&self, b: Builtin, args: &[Arg], k: usize) -> Result<FamId, Diagnostic> {
        match args.get(k) {
            Some(Arg::Family(f)) => self.family(f),
            _ => Err(self.err(Code::Arity, format!("bad arguments to `{}`", b.name()))),
        }
    }

    fn combined_family(&self, b: Builtin, args: &[Arg], k: usize) -> Result<FamId, Diagnostic> {
        let f = self.arg_family(b, args, k)?;
        if self.prog.families[f].is_base() {
            return Err(self.err(
                Code::TypeMismatch,
                format!(
                    "`{}` expects a combined family, `{}` is an element family",
                    b.name(),
                    self.prog.families[f].name
                ),
            ));
        }
        Ok(f)
    }

    fn object(&mut self, b: Builtin, args: &[Arg]) -> Result<(Node, ObjTy), Diagnostic> {
        let e = self.arg_expr(b, args, 0)?;
        let (n, t) = self.expr(e)?;
        match t {
            Ty::Obj(o) => Ok((n, o)),
            other => {
                Err(self.mismatch(&format!("`{}`", b.name()), "an element or structure", other))
            }
        }
    }

    fn call(&mut self, b: Builtin, args: &[Arg]) -> Result<(Node, Ty), Diagnostic> {
        let bx = Box::new;
        Ok(match b {
            Builtin::Board => {
                let f = self.arg_family(b, args, 0)?;
                (Node::Board(f), Ty::Coll(self.member_ty(f)))
            }
            Builtin::NoOverlap => (Node::NoOverlap(self.combined_family(b, args, 0)?), Ty::Bool),
            Builtin::Fill => {
                let mut fams = Vec::new();
                for k in 0..args.len() {
                    fams.push(self.combined_family(b, args, k)?);
                }
                let roots: BTreeSet<_> = fams.iter().map(|&f| self.prog.base_of(f)).collect();
                if roots.len() > 1 {
                    return Err(self.err(
                        Code::TypeMismatch,
                        "`fill` families must share one base".into(),
                    ));
                }
                (Node::Fill(fams), Ty::Bool)
            }
            Builtin::Region => {
                let f = self.combined_family(b, args, 0)?;
                let e = self.arg_expr(b, args, 1)?;
                let (n, t) = self.expr(e)?;
                if !matches!(t, Ty::Obj(_)) {
                    return Err(self.mismatch("`region`", "an element or structure", t));
                }
                (Node::Region { fam: f, e: bx(n) }, Ty::Obj(ObjTy::Region(f)))
            }
            Builtin::Connect => {
                let (x, o) = self.object(b, args)?;
                let rels = match args.get(1) {
                    Some(Arg::Relations(r)) => *r,
                    _ => return Err(self.err(Code::Arity, "bad arguments to `connect`".into())),
                };
                let fam = if args.len() > 2 {
                    self.arg_family(b, args, 2)?
                } else {
                    Self::family_of(o)
                };
                (
                    Node::Connect {
                        x: bx(x),
                        rels,
                        fam,
                    },
                    Ty::Coll(self.member_ty(fam)),
                )
            }
            Builtin::Solution => (Node::Solution(bx(self.object(b, args)?.0)), Ty::Scalar),
            Builtin::Size | Builtin::Count => {
                let e = self.arg_expr(b, args, 0)?;
                let (n, t) = self.expr(e)?;
                match t {
                    Ty::Obj(_) => (Node::Size(bx(n)), Ty::Scalar),
                    Ty::Coll(_) => (Node::Count(bx(n)), Ty::Scalar),
                    other => {
                        return Err(self.mismatch(
                            &format!("`{}`", b.name()),
                            "a structure or collection",
                            other,
                        ))
                    }
                }
            }
            Builtin::Members => {
                let (n, o) = self.object(b, args)?;
                (Node::Members(bx(n)), Ty::Coll(self.members_of(o)))
            }
            Builtin::Cross | Builtin::Cycle => {
                let (n, o) = self.object(b, args)?;
                let want = if b == Builtin::Cross {
                    BaseFamily::P
                } else {
                    BaseFamily::C
                };
                let ok = matches!(o, ObjTy::Elem(f) if self.prog.base_of(f) == want);
                if !ok {
                    return Err(self.err(
                        Code::TypeMismatch,
                        format!("`{}` expects an element of {}", b.name(), want.name()),
                    ));
                }
                let node = if b == Builtin::Cross {
                    Node::Cross(bx(n))
                } else {
                    Node::Cycle(bx(n))
                };
                (node, Ty::Scalar)
            }
            Builtin::AllDifferent => {
                let e = self.arg_expr(b, args, 0)?;
                let (n, t) = self.expr(e)?;
                if !matches!(t, Ty::Obj(_) | Ty::Coll(_)) {
                    return Err(self.mismatch("`all_different`", "a structure or collection", t));
                }
                (Node::AllDifferent(bx(n)), Ty::Bool)
            }
            Builtin::IsRectangle | Builtin::IsSquare => {
                let (n, o) = self.object(b, args)?;
                self.shape_hits.push(o);
                let node = if b == Builtin::IsRectangle {
                    Node::IsRectangle(bx(n))
                } else {
                    Node::IsSquare(bx(n))
                };
                (node, Ty::Bool)
            }
            Builtin::Factorial => {
                let e = self.arg_expr(b, args, 0)?;
                (
                    Node::Factorial(bx(self.expect(e, Ty::Scalar, "`factorial`")?)),
                    Ty::Scalar,
                )
            }
        })
    }
}

#[allow(non_snake_case)]
fn Kw_reserved(name: &str) -> bool {
    super::lexer::Kw::is_keyword(name) || matches!(name, "n" | "m" | "k")
}

struct Compiled {
    prog: Program,
    shape_hits: Vec<(Pos, ObjTy)>,
}

fn families(rule: &Rule, spans: &Spans) -> Result<Vec<FamilyDecl>, Diagnostic> {
    let mut fams: Vec<FamilyDecl> = BaseFamily::ALL
        .iter()
        .map(|b| FamilyDecl {
            name: b.name().to_string(),
            source: FamilySource::Base(*b),
            domain: None,
            hidden: None,
        })
        .collect();
    for (k, s) in rule.structures.iter().enumerate() {
        let p = spans.structures.get(k).copied().unwrap_or_default();
        if fams.iter().any(|f| f.name == s.name) {
            return Err(Diagnostic::error(
                Code::Duplicate,
                p.line,
                p.col,
                format!("family `{}` is already defined", s.name),
            ));
        }
        if Kw_reserved(&s.name) {
            return Err(Diagnostic::error(
                Code::Syntax,
                p.line,
                p.col,
                format!("`{}` is reserved", s.name),
            ));
        }
        let Some(base) = fams.iter().position(|f| f.name == s.base) else {
            return Err(Diagnostic::error(
                Code::UnknownIdent,
                p.line,
                p.col,
                format!(
                    "unknown base family `{}` (it must be declared earlier)",
                    s.base
                ),
            ));
        };
        if s.relations.is_empty() {
            return Err(Diagnostic::error(
                Code::Syntax,
                p.line,
                p.col,
                "relation set is empty".into(),
            ));
        }
        fams.push(FamilyDecl {
            name: s.name.clone(),
            source: FamilySource::Combine {
                relations: s.relations,
                base,
            },
            domain: None,
            hidden: None,
        });
    }
    for (which, entries, pos) in [
        ("domain", &rule.domains, &spans.domains),
        ("hidden", &rule.hidden, &spans.hidden),
    ] {
        for (k, (name, set)) in entries.iter().enumerate() {
            let p = pos.get(k).copied().unwrap_or_default();
            let Some(f) = fams.iter().position(|f| &f.name == name) else {
                return Err(Diagnostic::error(
                    Code::UnknownIdent,
                    p.line,
                    p.col,
                    format!("unknown family `{name}`"),
                ));
            };
            let slot = if which == "domain" {
                &mut fams[f].domain
            } else {
                &mut fams[f].hidden
            };
            if slot.is_some() {
                return Err(Diagnostic::error(
                    Code::Duplicate,
                    p.line,
                    p.col,
                    format!("{which} for `{name}` given twice"),
                ));
            }
            if set.0.is_empty() {
                return Err(Diagnostic::error(
                    Code::EmptyDomain,
                    p.line,
                    p.col,
                    format!("{which} for `{name}` is empty"),
                ));
            }
            *slot = Some(set.clone());
        }
    }
    Ok(fams)
}

fn compile_inner(rule: &Rule, spans: &Spans) -> Result<Compiled, Diagnostic> {
    let fams = families(rule, spans)?;
    let mut prog = Program {
        name: rule.name.clone(),
        families: fams,
        requires: vec![],
        constraints: vec![],
    };
    let mut shape_hits = Vec::new();
    let mut requires = Vec::new();
    let mut constraints = Vec::new();
    for (k, e) in rule.requires.iter().enumerate() {
        let pos = spans.requires.get(k).copied().unwrap_or_default();
        let mut ctx = Ctx {
            prog: &prog,
            scope: vec![],
            pos,
            shape_hits: vec![],
        };
        requires.push(ctx.expect(e, Ty::Bool, "`require`")?);
        if !is_const(requires.last().unwrap()) {
            return Err(ctx.err(
                Code::TypeMismatch,
                "`require` may only use n, m, k and arithmetic".into(),
            ));
        }
    }
    for (k, e) in rule.constraints.iter().enumerate() {
        let pos = spans.constraints.get(k).copied().unwrap_or_default();
        let mut ctx = Ctx {
            prog: &prog,
            scope: vec![],
            pos,
            shape_hits: vec![],
        };
        constraints.push(ctx.expect(e, Ty::Bool, "`constraint`")?);
        shape_hits.extend(ctx.shape_hits.into_iter().map(|o| (pos, o)));
    }
    let set_pos = spans.domains.iter().chain(&spans.hidden);
    for ((_, set), p) in rule.domains.iter().chain(&rule.hidden).zip(set_pos) {
        for item in &set.0 {
            if let ValueItem::Range(a, b) = item {
                for end in [a, b] {
                    let mut ctx = Ctx {
                        prog: &prog,
                        scope: vec![],
                        pos: *p,
                        shape_hits: vec![],
                    };
                    let n = ctx.expect(end, Ty::Scalar, "range bound")?;
                    if !is_const(&n) {
                        return Err(ctx.err(
                            Code::TypeMismatch,
                            "range bounds may only use n, m, k and arithmetic".into(),
                        ));
                    }
                }
            }
        }
    }
    prog.requires = requires;
    prog.constraints = constraints;
    Ok(Compiled { prog, shape_hits })
}

fn is_const(n: &Node) -> bool {
    match n {
        Node::Lit(_) | Node::Global(_) => true,
        Node::Not(a) | Node::Neg(a) | Node::Factorial(a) => is_const(a),
        Node::Bin(_, a, b) => is_const(a) && is_const(b),
        _ => false,
    }
}

pub(crate) fn compile_with_spans(rule: &Rule, spans: &Spans) -> Result<Program, Diagnostic> {
    compile_inner(rule, spans).map(|c| c.prog)
}

/// Resolves names and checks types, producing an evaluable program.
pub fn compile(rule: &Rule) -> Result<Program, Diagnostic> {
    compile_with_spans(rule, &Spans::default())
}

/// Compiles a closed expression against the families of `prog`.
pub fn compile_expr(prog: &Program, e: &Expr) -> Result<Node, Diagnostic> {
    let mut ctx = Ctx {
        prog,
        scope: vec![],
        pos: Pos::default(),
        shape_hits: vec![],
    };
    ctx.expr(e).map(|(n, _)| n)
}

/// Size parameters for one grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Globals {
    pub n: i64,
    pub m: i64,
    pub k: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Const {
    Bool(bool),
    Val(Value),
}

fn factorial(v: i64) -> Option<i64> {
    if v < 0 {
        return None;
    }
    (1..=v).try_fold(1i64, |acc, x| acc.checked_mul(x))
}

/// Evaluates a constant expression (literals, n, m, k, arithmetic, logic).
fn const_eval(n: &Node, g: Globals) -> Option<Const> {
    use Const::*;
    let int = |n: &Node| match const_eval(n, g)? {
        Val(Value::Int(v)) => Some(v),
        _ => None,
    };
    let boolean = |n: &Node| match const_eval(n, g)? {
        Bool(b) => Some(b),
        _ => None,
    };
    Some(match n {
        Node::Lit(v) => Val(*v),
        Node::Global(Global::N) => Val(Value::Int(g.n)),
        Node::Global(Global::M) => Val(Value::Int(g.m)),
        Node::Global(Global::K) => Val(Value::Int(g.k)),
        Node::Not(a) => Bool(!boolean(a)?),
        Node::Neg(a) => Val(Value::Int(int(a)?.checked_neg()?)),
        Node::Factorial(a) => Val(Value::Int(factorial(int(a)?)?)),
        Node::Bin(op, a, b) => match op {
            BinOp::And => Bool(boolean(a)? && boolean(b)?),
            BinOp::Or => Bool(boolean(a)? || boolean(b)?),
            BinOp::Implies => Bool(!boolean(a)? || boolean(b)?),
            BinOp::Iff => Bool(boolean(a)? == boolean(b)?),
            BinOp::Eq | BinOp::Ne => {
                let same = const_eval(a, g)? == const_eval(b, g)?;
                Bool(same == (*op == BinOp::Eq))
            }
            BinOp::Lt => Bool(int(a)? < int(b)?),
            BinOp::Le => Bool(int(a)? <= int(b)?),
            BinOp::Gt => Bool(int(a)? > int(b)?),
            BinOp::Ge => Bool(int(a)? >= int(b)?),
            BinOp::Add => Val(Value::Int(int(a)?.checked_add(int(b)?)?)),
            BinOp::Sub => Val(Value::Int(int(a)?.checked_sub(int(b)?)?)),
            BinOp::Mul => Val(Value::Int(int(a)?.checked_mul(int(b)?)?)),
            BinOp::Pow => {
                let e = u32::try_from(int(b)?).ok()?;
                Val(Value::Int(int(a)?.checked_pow(e)?))
            }
            BinOp::In => return None,
        },
        _ => return None,
    })
}

pub(crate) fn const_int(n: &Node, g: Globals) -> Option<i64> {
    match const_eval(n, g)? {
        Const::Val(Value::Int(v)) => Some(v),
        _ => None,
    }
}

/// Finds globals satisfying every requirement at `dims`, trying
/// `k = 1..=max(m, n)`.
pub fn satisfy_requirements(prog: &Program, dims: GridDims) -> Option<Globals> {
    let top = dims.m.max(dims.n) as i64;
    (1..=top)
        .map(|k| Globals {
            n: dims.n as i64,
            m: dims.m as i64,
            k,
        })
        .find(|g| {
            prog.requires
                .iter()
                .all(|r| matches!(const_eval(r, *g), Some(Const::Bool(true))))
        })
}

/// Expands a value set at concrete globals; `None` when a bound does not
/// evaluate to an integer.
pub fn resolve_valueset(set: &ValueSet, g: Globals) -> Option<BTreeSet<Value>> {
    let mut out = BTreeSet::new();
    for item in &set.0 {
        match item {
            ValueItem::Value(v) => {
                out.insert(*v);
            }
            ValueItem::Range(a, b) => {
                let (Some(lo), Some(hi)) = (ast_const_int(a, g), ast_const_int(b, g)) else {
                    return None;
                };
                if hi.saturating_sub(lo) > 1_000_000 {
                    return None;
                }
                out.extend((lo..=hi).map(Value::Int));
            }
        }
    }
    Some(out)
}

fn ast_const_int(e: &Expr, g: Globals) -> Option<i64> {
    let prog = Program {
        name: String::new(),
        families: vec![],
        requires: vec![],
        constraints: vec![],
    };
    let mut ctx = Ctx {
        prog: &prog,
        scope: vec![],
        pos: Pos::default(),
        shape_hits: vec![],
    };
    let (n, _) = ctx.expr(e).ok()?;
    const_int(&n, g)
}

/// Dims tried when a rule has to be inspected without a concrete grid.
fn sample_dims() -> impl Iterator<Item = GridDims> {
    (2..=18u32).flat_map(|s| (1..s).map(move |m| GridDims { m, n: s - m }))
}

/// Rule-level diagnostics that do not stop parsing: unmaskable families,
/// unsatisfiable size requirements, and shape checks applied to elements.
pub fn static_check(rule: &Rule) -> Vec<Diagnostic> {
    static_check_with_spans(rule, &Spans::default())
}

/// Parses rule text and returns every diagnostic with source positions:
/// the parse or compile error if there is one, else the static checks.
pub fn check_source(text: &str) -> Vec<Diagnostic> {
    match super::parser::parse(text) {
        Ok((rule, spans)) => static_check_with_spans(&rule, &spans),
        Err(d) => vec![d],
    }
}

fn static_check_with_spans(rule: &Rule, spans: &Spans) -> Vec<Diagnostic> {
    let compiled = match compile_inner(rule, spans) {
        Ok(c) => c,
        Err(d) => return vec![d],
    };
    let prog = &compiled.prog;
    let mut out = Vec::new();
    let sample = sample_dims().find_map(|d| satisfy_requirements(prog, d));
    match sample {
        None => out.push(Diagnostic::error(
            Code::Unsatisfiable,
            spans.requires.first().unwrap_or(&spans.header).line,
            spans.requires.first().unwrap_or(&spans.header).col,
            "size requirements hold for no grid up to 17 cells per side".into(),
        )),
        Some(g) => {
            for (k, (name, _)) in rule.domains.iter().enumerate() {
                let fam = &prog.families[prog.family(name).unwrap()];
                let dom = fam.domain.as_ref().and_then(|s| resolve_valueset(s, g));
                let hid = fam
                    .hidden
                    .as_ref()
                    .map(|s| resolve_valueset(s, g))
                    .unwrap_or_else(|| Some([Value::Null].into()));
                let (Some(dom), Some(hid)) = (dom, hid) else {
                    continue;
                };
                if hid.contains(&Value::Undecided) {
                    continue;
                }
                let missing: Vec<String> = dom.difference(&hid).map(|v| v.to_string()).collect();
                if !missing.is_empty() {
                    let at = spans.domains.get(k).copied().unwrap_or_default();
                    out.push(Diagnostic::warning(
                        Code::Unmaskable,
                        at.line,
                        at.col,
                        format!(
                            "hidden set for `{name}` contains neither undecided nor domain value(s) {}; such boards cannot be presented",
                            missing.join(", ")
                        ),
                    ));
                }
            }
        }
    }
    for (pos, o) in &compiled.shape_hits {
        let bad = match *o {
            ObjTy::Elem(_) => Some("an element (depth 0)".to_string()),
            ObjTy::Region(f) if prog.combine_depth(f) != 1 => Some(format!(
                "`{}`, which is combined more than once",
                prog.families[f].name
            )),
            _ => None,
        };
        if let Some(what) = bad {
            out.push(Diagnostic::error(
                Code::ShapeOnElement,
                pos.line,
                pos.col,
                format!(
                    "shape checks need a structure produced by exactly one combine, found {what}"
                ),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_rule;
    use super::*;

    fn codes(src: &str) -> Vec<Code> {
        let rule = parse_rule(src).unwrap();
        static_check(&rule).into_iter().map(|d| d.code).collect()
    }

    #[test]
    fn scope_and_type_errors() {
        let e =
            parse_rule("puzzle \"t\"\nconstraint forall c in B(C): solution(q) == 1").unwrap_err();
        assert_eq!(e.code, Code::UnboundVar);
        assert!(e.message.contains('q'));
        assert_eq!(
            parse_rule("puzzle \"t\"\nconstraint count(B(Z)) == 1")
                .unwrap_err()
                .code,
            Code::UnknownIdent
        );
        assert_eq!(
            parse_rule("puzzle \"t\"\nconstraint 1 + 2")
                .unwrap_err()
                .code,
            Code::TypeMismatch
        );
        assert_eq!(
            parse_rule("puzzle \"t\"\nconstraint B(C) == 1")
                .unwrap_err()
                .code,
            Code::TypeMismatch
        );
        let dup = "puzzle \"t\"\nstructure A = combine {H} on C\nstructure A = combine {V} on C";
        assert_eq!(parse_rule(dup).unwrap_err().code, Code::Duplicate);
        let dup = "puzzle \"t\"\ndomain C = {1}\ndomain C = {2}";
        assert_eq!(parse_rule(dup).unwrap_err().code, Code::Duplicate);
    }

    #[test]
    fn static_diagnostics() {
        assert!(codes("puzzle \"t\"\nrequire n == m\nrequire n == k * k\ndomain C = {1..n}\nhidden C = {1..n, undecided}").is_empty());
        assert_eq!(
            codes("puzzle \"t\"\ndomain C = {1..n, x}\nhidden C = {1..n}"),
            vec![Code::Unmaskable]
        );
        assert_eq!(
            codes("puzzle \"t\"\nrequire n == m and n != m"),
            vec![Code::Unsatisfiable]
        );
        assert_eq!(
            codes("puzzle \"t\"\nconstraint forall c in B(C): is_square(c)"),
            vec![Code::ShapeOnElement]
        );
        let nested = "puzzle \"t\"\nstructure A = combine {H} on C\nstructure G = combine {V} on A\nconstraint forall g in B(G): is_rectangle(g)";
        assert_eq!(codes(nested), vec![Code::ShapeOnElement]);
    }

    #[test]
    fn requirements_pick_k() {
        let rule = parse_rule("puzzle \"t\"\nrequire n == m\nrequire n == k * k").unwrap();
        let prog = compile(&rule).unwrap();
        assert_eq!(
            satisfy_requirements(&prog, GridDims { m: 4, n: 4 })
                .unwrap()
                .k,
            2
        );
        assert_eq!(
            satisfy_requirements(&prog, GridDims { m: 9, n: 9 })
                .unwrap()
                .k,
            3
        );
        assert!(satisfy_requirements(&prog, GridDims { m: 3, n: 3 }).is_none());
        assert!(satisfy_requirements(&prog, GridDims { m: 4, n: 2 }).is_none());
    }

    #[test]
    fn value_sets_resolve() {
        let rule = parse_rule(
            "puzzle \"t\"\ndomain C = {null, 0..n*m-1, x}\nhidden C = {1..n*factorial(n)}",
        )
        .unwrap();
        let g = Globals { n: 3, m: 2, k: 1 };
        let dom = resolve_valueset(&rule.domains[0].1, g).unwrap();
        assert_eq!(dom.len(), 8);
        let hid = resolve_valueset(&rule.hidden[0].1, g).unwrap();
        assert_eq!(hid.len(), 18);
    }
}
