//! Three-valued evaluation of rule expressions.
//!
//! The same evaluator serves complete boards, where every answer is exact,
//! and partial boards during search, where unknown parts make answers `U`.
//! Every operation is monotone: once an answer is `T` or `F` on a partial
//! board it stays so on every completion.

use std::rc::Rc;

use fixedbitset::FixedBitSet;

use crate::dsl::ast::{AggOp, BinOp, Quantifier};
use crate::dsl::check::Globals;
use crate::dsl::ir::{FamId, FamilySource, Global, Node};
use crate::grid::{Element, ElementKind};
use crate::model::Model;
use crate::value::Value;
use crate::EvalError;

/// Truth value: false, unknown, true.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tv {
    F,
    U,
    T,
}

impl Tv {
    pub fn of(b: bool) -> Tv {
        if b {
            Tv::T
        } else {
            Tv::F
        }
    }

    pub fn and(self, o: Tv) -> Tv {
        match (self, o) {
            (Tv::F, _) | (_, Tv::F) => Tv::F,
            (Tv::T, Tv::T) => Tv::T,
            _ => Tv::U,
        }
    }

    pub fn or(self, o: Tv) -> Tv {
        match (self, o) {
            (Tv::T, _) | (_, Tv::T) => Tv::T,
            (Tv::F, Tv::F) => Tv::F,
            _ => Tv::U,
        }
    }

    pub fn negate(self) -> Tv {
        match self {
            Tv::F => Tv::T,
            Tv::U => Tv::U,
            Tv::T => Tv::F,
        }
    }
}

/// A value, or bounds on an unknown one. `other` means the value may also
/// be a non-integer (null, x).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AVal {
    Known(Value),
    Range { lo: i64, hi: i64, other: bool },
}

impl AVal {
    pub const ANY: AVal = AVal::Range {
        lo: i64::MIN,
        hi: i64::MAX,
        other: true,
    };

    fn int(v: i64) -> AVal {
        AVal::Known(Value::Int(v))
    }

    fn range(lo: i64, hi: i64) -> AVal {
        if lo == hi {
            AVal::int(lo)
        } else {
            AVal::Range {
                lo,
                hi,
                other: false,
            }
        }
    }

    /// Abstraction of a set of candidate values.
    pub fn of_values<'a>(vals: impl IntoIterator<Item = &'a Value>) -> AVal {
        let (mut lo, mut hi, mut other, mut n, mut last) =
            (i64::MAX, i64::MIN, false, 0, Value::Null);
        for v in vals {
            n += 1;
            last = *v;
            match v {
                Value::Int(x) => {
                    lo = lo.min(*x);
                    hi = hi.max(*x);
                }
                _ => other = true,
            }
        }
        match n {
            0 => AVal::ANY,
            1 => AVal::Known(last),
            _ => AVal::Range { lo, hi, other },
        }
    }

    /// Integer bounds. `Ok(None)` when the value may turn out non-integer.
    fn ints(self, what: &str) -> Result<Option<(i64, i64)>, EvalError> {
        match self {
            AVal::Known(Value::Int(v)) => Ok(Some((v, v))),
            AVal::Known(v) => Err(EvalError::Type(format!(
                "{what} needs an integer, found {v}"
            ))),
            AVal::Range { other: true, .. } => Ok(None),
            AVal::Range { lo, hi, .. } => Ok(Some((lo, hi))),
        }
    }

    fn may_equal(self, v: Value) -> bool {
        match self {
            AVal::Known(w) => w == v,
            AVal::Range { lo, hi, other } => match v {
                Value::Int(x) => lo <= x && x <= hi,
                _ => other,
            },
        }
    }
}

fn aval_eq(a: AVal, b: AVal) -> Tv {
    match (a, b) {
        (AVal::Known(x), AVal::Known(y)) => Tv::of(x == y),
        (AVal::Known(v), r) | (r, AVal::Known(v)) => {
            if r.may_equal(v) {
                Tv::U
            } else {
                Tv::F
            }
        }
        (
            AVal::Range {
                lo: l1,
                hi: h1,
                other: o1,
            },
            AVal::Range {
                lo: l2,
                hi: h2,
                other: o2,
            },
        ) => {
            if (l1.max(l2) <= h1.min(h2)) || (o1 && o2) {
                Tv::U
            } else {
                Tv::F
            }
        }
    }
}

/// Identity of a region within one world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RegionKey {
    /// Index into a complete board's instance list, or a candidate instance.
    Inst(usize),
    /// Region of a labelled partition, named by its least element.
    Anchor(usize),
    /// The only instance of a family with exactly one instance.
    Single,
    /// Stand-in for instances not created yet.
    Phantom,
}

/// An instance of a combined family, possibly still growing: its final
/// element set lies between `def` and `possible`.
#[derive(Clone, Debug)]
pub struct Region {
    pub fam: FamId,
    pub key: RegionKey,
    pub def: FixedBitSet,
    pub possible: FixedBitSet,
}

impl Region {
    pub fn closed(&self) -> bool {
        self.key != RegionKey::Phantom && self.def == self.possible
    }
}

/// An object a variable can be bound to.
#[derive(Clone, Debug)]
pub enum AObj {
    Elem(usize),
    Region(Rc<Region>),
    /// Result of `region` when no instance contains the argument.
    None,
    Unknown,
}

/// A collection on a partial board: `items` are certainly members,
/// `maybe` might be, and `phantom` stands for any number of members that
/// do not exist yet, each drawn from `phantom.possible`.
#[derive(Clone, Debug, Default)]
pub struct PColl {
    pub items: Vec<AObj>,
    pub maybe: Vec<AObj>,
    pub phantom: Option<Rc<Region>>,
}

impl PColl {
    fn definite(items: Vec<AObj>) -> PColl {
        PColl {
            items,
            maybe: Vec::new(),
            phantom: None,
        }
    }

    fn unknown(model: &Model) -> PColl {
        let mut all = model.geo.empty_set();
        all.insert_range(..);
        let phantom = Region {
            fam: 0,
            key: RegionKey::Phantom,
            def: model.geo.empty_set(),
            possible: all,
        };
        PColl {
            items: Vec::new(),
            maybe: Vec::new(),
            phantom: Some(Rc::new(phantom)),
        }
    }

    fn iter(&self) -> impl Iterator<Item = (&AObj, bool)> {
        self.items
            .iter()
            .map(|o| (o, true))
            .chain(self.maybe.iter().map(|o| (o, false)))
    }

    pub fn is_complete(&self) -> bool {
        self.maybe.is_empty() && self.phantom.is_none()
    }
}

/// Result of evaluating a node.
#[derive(Clone, Debug)]
pub enum AV {
    Bool(Tv),
    Val(AVal),
    Obj(AObj),
    Coll(PColl),
}

/// The board an expression is evaluated against.
pub trait World {
    fn model(&self) -> &Model;
    /// Complete worlds report errors; partial ones turn them into `U`.
    fn exact(&self) -> bool;
    fn elem_value(&self, e: usize) -> AVal;
    fn region_value(&self, r: &Region) -> AVal;
    /// Instances of a combined family.
    fn board(&self, f: FamId) -> PColl;
    /// Whether a `fill` or `no_overlap` node holds by construction.
    fn guaranteed(&self, _n: &Node) -> bool {
        false
    }
}

pub struct Evaluator<'w, W: World + ?Sized> {
    w: &'w W,
    env: Vec<AObj>,
}

fn type_err(msg: impl Into<String>) -> EvalError {
    EvalError::Type(msg.into())
}

fn factorial(v: i64) -> Result<i64, EvalError> {
    if v < 0 {
        return Err(type_err("factorial of a negative number"));
    }
    (1..=v)
        .try_fold(1i64, |a, x| a.checked_mul(x))
        .ok_or(EvalError::Overflow)
}

impl<'w, W: World + ?Sized> Evaluator<'w, W> {
    pub fn new(w: &'w W, env: Vec<AObj>) -> Self {
        Evaluator { w, env }
    }

    fn globals(&self) -> Globals {
        self.w.model().globals
    }

    /// Truth of a boolean node.
    pub fn truth(&mut self, n: &Node) -> Result<Tv, EvalError> {
        match self.eval(n)? {
            AV::Bool(t) => Ok(t),
            other => Err(type_err(format!("expected a boolean, found {other:?}"))),
        }
    }

    /// Like `truth`, but on partial boards an error only means "unknown".
    fn sub(&mut self, n: &Node) -> Result<Tv, EvalError> {
        match self.truth(n) {
            Err(_) if !self.w.exact() => Ok(Tv::U),
            r => r,
        }
    }

    fn val(&mut self, n: &Node) -> Result<AVal, EvalError> {
        match self.eval(n)? {
            AV::Val(v) => Ok(v),
            other => Err(type_err(format!("expected a value, found {other:?}"))),
        }
    }

    fn obj(&mut self, n: &Node) -> Result<AObj, EvalError> {
        match self.eval(n)? {
            AV::Obj(o) => Ok(o),
            other => Err(type_err(format!(
                "expected an element or structure, found {other:?}"
            ))),
        }
    }

    fn coll(&mut self, n: &Node) -> Result<PColl, EvalError> {
        match self.eval(n)? {
            AV::Coll(c) => Ok(c),
            AV::Obj(o) => self.members(&o),
            other => Err(type_err(format!("expected a collection, found {other:?}"))),
        }
    }

    fn members(&self, o: &AObj) -> Result<PColl, EvalError> {
        Ok(match o {
            AObj::Elem(e) => PColl::definite(vec![AObj::Elem(*e)]),
            AObj::Region(r) => PColl {
                items: r.def.ones().map(AObj::Elem).collect(),
                maybe: r.possible.difference(&r.def).map(AObj::Elem).collect(),
                phantom: None,
            },
            AObj::None => return Err(type_err("no instance contains the element")),
            AObj::Unknown => PColl::unknown(self.w.model()),
        })
    }

    fn family_board(&self, f: FamId) -> PColl {
        let model = self.w.model();
        match model.prog.families[f].source {
            FamilySource::Base(b) => PColl::definite(
                model
                    .geo
                    .base_elements(b)
                    .iter()
                    .map(|&e| AObj::Elem(e))
                    .collect(),
            ),
            FamilySource::Combine { .. } => self.w.board(f),
        }
    }

    fn solution(&self, o: &AObj) -> Result<AVal, EvalError> {
        match o {
            AObj::Elem(e) => Ok(self.w.elem_value(*e)),
            AObj::Region(r) => Ok(self.w.region_value(r)),
            AObj::None => Err(type_err("solution of a missing instance")),
            AObj::Unknown => Ok(AVal::ANY),
        }
    }

    pub fn eval(&mut self, n: &Node) -> Result<AV, EvalError> {
        Ok(match n {
            Node::Lit(v) => AV::Val(AVal::Known(*v)),
            Node::Global(g) => {
                let gl = self.globals();
                AV::Val(AVal::int(match g {
                    Global::N => gl.n,
                    Global::M => gl.m,
                    Global::K => gl.k,
                }))
            }
            Node::Var(k) => AV::Obj(self.env[*k].clone()),
            Node::Not(a) => AV::Bool(self.sub(a)?.negate()),
            Node::Neg(a) => AV::Val(match self.val(a)?.ints("`-`")? {
                Some((lo, hi)) => match (lo.checked_neg(), hi.checked_neg()) {
                    (Some(l), Some(h)) => AVal::range(h, l),
                    _ => self.overflow()?,
                },
                None => AVal::ANY,
            }),
            Node::Bin(op, a, b) => self.binary(*op, a, b)?,
            Node::Quant {
                q,
                coll,
                filter,
                body,
            } => {
                let c = self.coll(coll)?;
                AV::Bool(self.quantify(*q, &c, filter.as_deref(), body)?)
            }
            Node::Agg {
                op,
                coll,
                filter,
                body,
            } => {
                let c = self.coll(coll)?;
                AV::Val(self.aggregate(*op, &c, filter.as_deref(), body)?)
            }
            Node::SetBuilder { coll, pred } => {
                let c = self.coll(coll)?;
                let mut out = PColl {
                    phantom: c.phantom.clone(),
                    ..PColl::default()
                };
                for (o, definite) in c.iter() {
                    let t = match pred {
                        Some(p) => self.bound(o, |ev| ev.sub(p))?,
                        None => Tv::T,
                    };
                    match t {
                        Tv::F => {}
                        Tv::T if definite => out.items.push(o.clone()),
                        _ => out.maybe.push(o.clone()),
                    }
                }
                AV::Coll(out)
            }
            Node::Board(f) => AV::Coll(self.family_board(*f)),
            Node::Solution(x) => {
                let o = self.obj(x)?;
                AV::Val(self.solution(&o)?)
            }
            Node::Size(x) => AV::Val(match self.obj(x)? {
                AObj::Elem(_) => AVal::int(1),
                AObj::Region(r) => AVal::range(
                    r.def.count_ones(..) as i64,
                    r.possible.count_ones(..) as i64,
                ),
                AObj::None => return Err(type_err("size of a missing instance")),
                AObj::Unknown => AVal::range(1, self.w.model().geo.len() as i64),
            }),
            Node::Count(c) => {
                let c = self.coll(c)?;
                let lo = c.items.len() as i64;
                let extra =
                    c.maybe.len() + c.phantom.as_ref().map_or(0, |p| p.possible.count_ones(..));
                AV::Val(AVal::range(lo, lo + extra as i64))
            }
            Node::Members(x) => {
                let o = self.obj(x)?;
                AV::Coll(self.members(&o)?)
            }
            Node::Connect { x, rels, fam } => {
                let o = self.obj(x)?;
                AV::Coll(self.connect(&o, *rels, *fam)?)
            }
            Node::Region { fam, e } => {
                let o = self.obj(e)?;
                AV::Obj(self.region_of(*fam, &o)?)
            }
            Node::Cross(x) | Node::Cycle(x) => {
                let o = self.obj(x)?;
                AV::Val(self.edge_sum(&o, matches!(n, Node::Cross(_)))?)
            }
            Node::AllDifferent(x) => {
                let c = self.coll(x)?;
                AV::Bool(self.all_different(&c)?)
            }
            Node::IsRectangle(x) | Node::IsSquare(x) => {
                let o = self.obj(x)?;
                AV::Bool(self.shape(&o, matches!(n, Node::IsSquare(_)))?)
            }
            Node::NoOverlap(f) => {
                if self.w.guaranteed(n) {
                    AV::Bool(Tv::T)
                } else {
                    let c = self.family_board(*f);
                    AV::Bool(self.cover(&[c], None))
                }
            }
            Node::Fill(fs) => {
                if self.w.guaranteed(n) {
                    AV::Bool(Tv::T)
                } else {
                    let colls: Vec<PColl> = fs.iter().map(|&f| self.family_board(f)).collect();
                    let model = self.w.model();
                    let base = model.geo.base_set(model.prog.base_of(fs[0])).clone();
                    AV::Bool(self.cover(&colls, Some(&base)))
                }
            }
            Node::Factorial(a) => AV::Val(match self.val(a)?.ints("`factorial`")? {
                Some((lo, hi)) if lo == hi => AVal::int(factorial(lo)?),
                Some((lo, hi)) if lo >= 0 && hi <= 20 => {
                    AVal::range(factorial(lo)?, factorial(hi)?)
                }
                _ => AVal::ANY,
            }),
        })
    }

    /// A universal quantifier over the single definite item `item`.
    pub fn forall_item(
        &mut self,
        filter: Option<&Node>,
        body: &Node,
        item: AObj,
    ) -> Result<Tv, EvalError> {
        self.quantify(
            Quantifier::Forall,
            &PColl::definite(vec![item]),
            filter,
            body,
        )
    }

    fn overflow(&self) -> Result<AVal, EvalError> {
        if self.w.exact() {
            Err(EvalError::Overflow)
        } else {
            Ok(AVal::ANY)
        }
    }

    fn bound<T>(
        &mut self,
        o: &AObj,
        f: impl FnOnce(&mut Self) -> Result<T, EvalError>,
    ) -> Result<T, EvalError> {
        self.env.push(o.clone());
        let r = f(self);
        self.env.pop();
        r
    }

    fn binary(&mut self, op: BinOp, a: &Node, b: &Node) -> Result<AV, EvalError> {
        Ok(AV::Bool(match op {
            BinOp::And => {
                let l = self.sub(a)?;
                if l == Tv::F {
                    Tv::F
                } else {
                    l.and(self.sub(b)?)
                }
            }
            BinOp::Or => {
                let l = self.sub(a)?;
                if l == Tv::T {
                    Tv::T
                } else {
                    l.or(self.sub(b)?)
                }
            }
            BinOp::Implies => {
                let l = self.sub(a)?;
                if l == Tv::F {
                    Tv::T
                } else {
                    l.negate().or(self.sub(b)?)
                }
            }
            BinOp::Iff => {
                let (l, r) = (self.sub(a)?, self.sub(b)?);
                if l == Tv::U || r == Tv::U {
                    Tv::U
                } else {
                    Tv::of(l == r)
                }
            }
            BinOp::Eq | BinOp::Ne => {
                let t = match (self.eval(a)?, self.eval(b)?) {
                    (AV::Val(x), AV::Val(y)) => aval_eq(x, y),
                    (AV::Bool(x), AV::Bool(y)) => {
                        if x == Tv::U || y == Tv::U {
                            Tv::U
                        } else {
                            Tv::of(x == y)
                        }
                    }
                    (AV::Obj(x), AV::Obj(y)) => obj_eq(&x, &y),
                    (x, y) => return Err(type_err(format!("cannot compare {x:?} with {y:?}"))),
                };
                if op == BinOp::Eq {
                    t
                } else {
                    t.negate()
                }
            }
            BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                let sym = op.symbol();
                let (x, y) = (self.val(a)?.ints(sym)?, self.val(b)?.ints(sym)?);
                match (x, y) {
                    (Some((l1, h1)), Some((l2, h2))) => match op {
                        BinOp::Lt => decide(h1 < l2, l1 >= h2),
                        BinOp::Le => decide(h1 <= l2, l1 > h2),
                        BinOp::Gt => decide(l1 > h2, h1 <= l2),
                        _ => decide(l1 >= h2, h1 < l2),
                    },
                    _ => Tv::U,
                }
            }
            BinOp::In => {
                let x = self.obj(a)?;
                match self.eval(b)? {
                    AV::Obj(y) => contains(&y, &x),
                    AV::Coll(c) => {
                        let mut acc = Tv::F;
                        for (y, definite) in c.iter() {
                            let t = obj_eq(&x, y);
                            acc = acc.or(if definite || t == Tv::F { t } else { Tv::U });
                            if acc == Tv::T {
                                break;
                            }
                        }
                        if acc == Tv::F
                            && c.phantom.is_some()
                            && matches!(x, AObj::Region(_) | AObj::Unknown)
                        {
                            acc = Tv::U;
                        }
                        acc
                    }
                    other => return Err(type_err(format!("cannot test membership in {other:?}"))),
                }
            }
            BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Pow => {
                let sym = op.symbol();
                let (x, y) = (self.val(a)?.ints(sym)?, self.val(b)?.ints(sym)?);
                let (Some(x), Some(y)) = (x, y) else {
                    return Ok(AV::Val(AVal::ANY));
                };
                return Ok(AV::Val(match arith(op, x, y)? {
                    Some((lo, hi)) => AVal::range(lo, hi),
                    None => self.overflow()?,
                }));
            }
        }))
    }

    fn quantify(
        &mut self,
        q: Quantifier,
        c: &PColl,
        filter: Option<&Node>,
        body: &Node,
    ) -> Result<Tv, EvalError> {
        let forall = q == Quantifier::Forall;
        let mut acc = Tv::of(forall);
        for (o, definite) in c.iter() {
            let r = self.bound(o, |ev| {
                let ft = match filter {
                    Some(f) => ev.sub(f)?,
                    None => Tv::T,
                };
                if ft == Tv::F {
                    return Ok(None);
                }
                let b = ev.sub(body)?;
                // An uncertain member can only confirm the neutral value.
                let certain = ft == Tv::T && definite;
                Ok(Some(if certain || b == Tv::of(forall) {
                    b
                } else {
                    Tv::U
                }))
            })?;
            let Some(r) = r else { continue };
            acc = if forall { acc.and(r) } else { acc.or(r) };
            if acc == Tv::of(!forall) {
                return Ok(acc);
            }
        }
        if c.phantom.is_some() {
            acc = if forall {
                acc.and(Tv::U)
            } else {
                acc.or(Tv::U)
            };
        }
        Ok(acc)
    }

    fn aggregate(
        &mut self,
        op: AggOp,
        c: &PColl,
        filter: Option<&Node>,
        body: &Node,
    ) -> Result<AVal, EvalError> {
        if c.phantom.is_some() {
            return Ok(AVal::ANY);
        }
        let id = match op {
            AggOp::Sum => 0,
            AggOp::Prod => 1,
        };
        let bop = match op {
            AggOp::Sum => BinOp::Add,
            AggOp::Prod => BinOp::Mul,
        };
        let mut acc = (id, id);
        for (o, definite) in c.iter() {
            let r = self.bound(o, |ev| {
                let ft = match filter {
                    Some(f) => ev.sub(f)?,
                    None => Tv::T,
                };
                if ft == Tv::F {
                    return Ok(Some(None));
                }
                match ev.val(body)?.ints("`sum`/`prod`")? {
                    None => Ok(None),
                    Some((lo, hi)) if ft == Tv::T && definite => Ok(Some(Some((lo, hi)))),
                    Some((lo, hi)) => Ok(Some(Some((lo.min(id), hi.max(id))))),
                }
            });
            let term = match r {
                Ok(Some(t)) => t,
                Ok(None) => return Ok(AVal::ANY),
                Err(e) if self.w.exact() => return Err(e),
                Err(_) => return Ok(AVal::ANY),
            };
            if let Some(t) = term {
                acc = match arith(bop, acc, t)? {
                    Some(v) => v,
                    None => return self.overflow(),
                };
            }
        }
        Ok(AVal::range(acc.0, acc.1))
    }

    /// Element sets (definite, possible) of an object.
    fn extent(&self, o: &AObj) -> Result<Option<(FixedBitSet, FixedBitSet)>, EvalError> {
        Ok(match o {
            AObj::Elem(e) => {
                let mut s = self.w.model().geo.empty_set();
                s.insert(*e);
                Some((s.clone(), s))
            }
            AObj::Region(r) => Some((r.def.clone(), r.possible.clone())),
            AObj::None => return Err(type_err("missing instance")),
            AObj::Unknown => None,
        })
    }

    fn connect(
        &mut self,
        x: &AObj,
        rels: crate::grid::RelSet,
        fam: FamId,
    ) -> Result<PColl, EvalError> {
        let model = self.w.model();
        let geo = &model.geo;
        let Some((xdef, xposs)) = self.extent(x)? else {
            return Ok(PColl::unknown(model));
        };
        let mut out = PColl::default();
        if let FamilySource::Base(b) = model.prog.families[fam].source {
            let base = geo.base_set(b);
            let mut cand = geo.empty_set();
            for e in xposs.ones() {
                cand.union_with(geo.neighbors(rels, e));
            }
            cand.intersect_with(base);
            for y in cand.ones() {
                let neq = obj_eq(x, &AObj::Elem(y)).negate();
                let rel = if xdef.ones().any(|e| geo.neighbors(rels, e).contains(y)) {
                    Tv::T
                } else {
                    Tv::U
                };
                match rel.and(neq) {
                    Tv::T => out.items.push(AObj::Elem(y)),
                    Tv::U => out.maybe.push(AObj::Elem(y)),
                    Tv::F => {}
                }
            }
            return Ok(out);
        }
        let c = self.w.board(fam);
        for (y, definite) in c.iter() {
            let Some((ydef, yposs)) = self.extent(y)? else {
                out.maybe.push(y.clone());
                continue;
            };
            let rel = if geo.related(rels, &xdef, &ydef) {
                Tv::T
            } else if geo.related(rels, &xposs, &yposs) {
                Tv::U
            } else {
                Tv::F
            };
            match rel.and(obj_eq(x, y).negate()) {
                Tv::T if definite => out.items.push(y.clone()),
                Tv::F => {}
                _ => out.maybe.push(y.clone()),
            }
        }
        if let Some(p) = &c.phantom {
            if geo.related(rels, &xposs, &p.possible) {
                out.phantom = Some(p.clone());
            }
        }
        Ok(out)
    }

    fn region_of(&mut self, fam: FamId, x: &AObj) -> Result<AObj, EvalError> {
        let target = match x {
            AObj::Region(r) if !r.closed() => return Ok(AObj::Unknown),
            other => match self.extent(other)? {
                Some((d, _)) => d,
                None => return Ok(AObj::Unknown),
            },
        };
        let c = self.family_board(fam);
        let mut found: Option<AObj> = None;
        let mut unsure = false;
        for (y, definite) in c.iter() {
            let Some((ydef, yposs)) = self.extent(y)? else {
                unsure = true;
                continue;
            };
            if target.is_subset(&ydef) && definite {
                if found.is_some() {
                    let name = self.w.model().family_name(fam).to_string();
                    return Err(EvalError::Ambiguous(
                        describe(self.w.model(), &target),
                        name,
                    ));
                }
                found = Some(y.clone());
            } else if target.is_subset(&yposs) {
                unsure = true;
            }
        }
        if let Some(p) = &c.phantom {
            if target.is_subset(&p.possible) {
                unsure = true;
            }
        }
        Ok(match found {
            Some(o) => o,
            None if unsure => AObj::Unknown,
            None => AObj::None,
        })
    }

    fn edge_sum(&self, o: &AObj, cross: bool) -> Result<AVal, EvalError> {
        let AObj::Elem(idx) = o else {
            return match o {
                AObj::Unknown => Ok(AVal::ANY),
                _ => Err(type_err("cross/cycle need a single point or cell")),
            };
        };
        let u = &self.w.model().geo.universe;
        let e = u.element(*idx);
        let (i, j) = (e.i, e.j);
        let probes = if cross {
            if e.kind != ElementKind::Point {
                return Err(type_err(format!("cross needs a point, found {e}")));
            }
            [
                Element::hp(i, j - 1),
                Element::hp(i, j),
                Element::vp(i - 1, j),
                Element::vp(i, j),
            ]
        } else {
            if e.kind != ElementKind::Cell {
                return Err(type_err(format!("cycle needs a cell, found {e}")));
            }
            [
                Element::hp(i, j),
                Element::hp(i + 1, j),
                Element::vp(i, j),
                Element::vp(i, j + 1),
            ]
        };
        let (mut lo, mut hi) = (0i64, 0i64);
        for p in probes {
            let Some(k) = u.index_of(p) else { continue };
            match self.w.elem_value(k).ints("edge value")? {
                Some((l, h)) => {
                    lo = lo.checked_add(l).ok_or(EvalError::Overflow)?;
                    hi = hi.checked_add(h).ok_or(EvalError::Overflow)?;
                }
                None => return Ok(AVal::ANY),
            }
        }
        Ok(AVal::range(lo, hi))
    }

    fn all_different(&mut self, c: &PColl) -> Result<Tv, EvalError> {
        let mut seen = std::collections::BTreeSet::new();
        let mut exact = c.is_complete();
        for o in &c.items {
            match self.solution(o)? {
                AVal::Known(v) => {
                    if !seen.insert(v) {
                        return Ok(Tv::F);
                    }
                }
                _ => exact = false,
            }
        }
        Ok(if exact { Tv::T } else { Tv::U })
    }

    fn shape(&self, o: &AObj, square: bool) -> Result<Tv, EvalError> {
        let r = match o {
            AObj::Elem(_) => return Ok(Tv::T),
            AObj::Unknown => return Ok(Tv::U),
            AObj::None => return Err(type_err("shape of a missing instance")),
            AObj::Region(r) => r,
        };
        let u = &self.w.model().geo.universe;
        let coords = |s: &FixedBitSet| s.ones().map(|k| u.element(k)).collect::<Vec<_>>();
        let def = coords(&r.def);
        if def.is_empty() {
            return Ok(Tv::U);
        }
        let (imin, imax) = (
            def.iter().map(|e| e.i).min().unwrap(),
            def.iter().map(|e| e.i).max().unwrap(),
        );
        let (jmin, jmax) = (
            def.iter().map(|e| e.j).min().unwrap(),
            def.iter().map(|e| e.j).max().unwrap(),
        );
        let (h, w) = ((imax - imin + 1) as usize, (jmax - jmin + 1) as usize);
        if r.closed() {
            let mut pos: Vec<(i32, i32)> = def.iter().map(|e| (e.i, e.j)).collect();
            pos.sort_unstable();
            pos.dedup();
            let rect = pos.len() == def.len() && def.len() == h * w;
            return Ok(Tv::of(rect && (!square || h == w)));
        }
        let kind = def[0].kind;
        if def.iter().any(|e| e.kind != kind) {
            return Ok(Tv::U);
        }
        for i in imin..=imax {
            for j in jmin..=jmax {
                let inside = u
                    .index_of(Element::new(kind, i, j))
                    .is_some_and(|k| r.possible.contains(k));
                if !inside {
                    return Ok(Tv::F);
                }
            }
        }
        if square {
            let side = h.max(w);
            if side * side > r.possible.count_ones(..) {
                return Ok(Tv::F);
            }
        }
        Ok(Tv::U)
    }

    /// Disjointness of all instances, plus exact cover of `base` if given.
    fn cover(&self, colls: &[PColl], base: Option<&FixedBitSet>) -> Tv {
        let geo = &self.w.model().geo;
        let mut used = geo.empty_set();
        let mut reach = geo.empty_set();
        let mut complete = true;
        for c in colls {
            for (o, definite) in c.iter() {
                let AObj::Region(r) = o else {
                    complete = false;
                    continue;
                };
                if definite {
                    if !used.is_disjoint(&r.def) {
                        return Tv::F;
                    }
                    used.union_with(&r.def);
                }
                complete &= definite && r.closed();
                reach.union_with(&r.possible);
            }
            if let Some(p) = &c.phantom {
                reach.union_with(&p.possible);
                complete = false;
            }
        }
        if let Some(base) = base {
            if !base.is_subset(&reach) {
                return Tv::F;
            }
            if complete {
                return Tv::of(used == *base);
            }
        }
        if complete {
            Tv::T
        } else {
            Tv::U
        }
    }
}

fn decide(t: bool, f: bool) -> Tv {
    if t {
        Tv::T
    } else if f {
        Tv::F
    } else {
        Tv::U
    }
}

/// Interval arithmetic; `Ok(None)` on overflow.
fn arith(
    op: BinOp,
    (l1, h1): (i64, i64),
    (l2, h2): (i64, i64),
) -> Result<Option<(i64, i64)>, EvalError> {
    let corners = |f: fn(i64, i64) -> Option<i64>| -> Option<(i64, i64)> {
        let c = [f(l1, l2)?, f(l1, h2)?, f(h1, l2)?, f(h1, h2)?];
        Some((*c.iter().min().unwrap(), *c.iter().max().unwrap()))
    };
    Ok(match op {
        BinOp::Add => l1.checked_add(l2).zip(h1.checked_add(h2)),
        BinOp::Sub => l1.checked_sub(h2).zip(h1.checked_sub(l2)),
        BinOp::Mul => corners(i64::checked_mul),
        BinOp::Pow => {
            if l1 == h1 && l2 == h2 {
                let e = u32::try_from(l2).map_err(|_| type_err("negative exponent"))?;
                l1.checked_pow(e).map(|v| (v, v))
            } else if l1 >= 0 && l2 >= 0 {
                let p = |b: i64, e: i64| u32::try_from(e).ok().and_then(|e| b.checked_pow(e));
                p(l1, l2).zip(p(h1, h2))
            } else {
                Some((i64::MIN, i64::MAX))
            }
        }
        _ => unreachable!("not arithmetic"),
    })
}

pub fn obj_eq(a: &AObj, b: &AObj) -> Tv {
    match (a, b) {
        (AObj::Unknown, _) | (_, AObj::Unknown) => Tv::U,
        (AObj::None, AObj::None) => Tv::T,
        (AObj::None, _) | (_, AObj::None) => Tv::F,
        (AObj::Elem(x), AObj::Elem(y)) => Tv::of(x == y),
        (AObj::Elem(_), AObj::Region(_)) | (AObj::Region(_), AObj::Elem(_)) => Tv::F,
        (AObj::Region(r), AObj::Region(s)) => {
            if Rc::ptr_eq(r, s) || (r.fam == s.fam && r.key == s.key && r.key != RegionKey::Phantom)
            {
                Tv::T
            } else if r.closed() && s.closed() {
                Tv::of(r.def == s.def)
            } else if r.def.is_subset(&s.possible) && s.def.is_subset(&r.possible) {
                Tv::U
            } else {
                Tv::F
            }
        }
    }
}

/// `x in y` for an object `y`: membership, looking through nesting.
fn contains(y: &AObj, x: &AObj) -> Tv {
    match (x, y) {
        (AObj::Unknown, _) | (_, AObj::Unknown) => Tv::U,
        (AObj::None, _) | (_, AObj::None) => Tv::F,
        (AObj::Elem(e), AObj::Elem(f)) => Tv::of(e == f),
        (AObj::Elem(e), AObj::Region(r)) => {
            if r.def.contains(*e) {
                Tv::T
            } else if r.possible.contains(*e) {
                Tv::U
            } else {
                Tv::F
            }
        }
        (AObj::Region(_), _) => Tv::F,
    }
}

fn describe(model: &Model, set: &FixedBitSet) -> String {
    let names: Vec<String> = set
        .ones()
        .map(|k| model.geo.universe.element(k).to_string())
        .collect();
    names.join(",")
}
