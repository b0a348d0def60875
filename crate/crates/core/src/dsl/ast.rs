use crate::grid::RelSet;
use crate::value::Value;

/// A parsed rule file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub requires: Vec<Expr>,
    pub structures: Vec<StructDef>,
    pub domains: Vec<(String, ValueSet)>,
    pub hidden: Vec<(String, ValueSet)>,
    pub constraints: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructDef {
    pub name: String,
    pub relations: RelSet,
    pub base: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValueSet(pub Vec<ValueItem>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValueItem {
    Value(Value),
    Range(Expr, Expr),
}

impl ValueItem {
    fn rank(&self) -> (u8, i64) {
        match self {
            ValueItem::Value(Value::Null) => (0, 0),
            ValueItem::Value(Value::Int(v)) => (1, *v),
            ValueItem::Range(..) => (2, 0),
            ValueItem::Value(Value::Mark) => (3, 0),
            ValueItem::Value(Value::Undecided) => (4, 0),
        }
    }
}

impl ValueSet {
    /// Sorts literals ascending (ranges after plain integers, in written
    /// order) and drops exact duplicates.
    pub fn normalized(mut items: Vec<ValueItem>) -> ValueSet {
        items.sort_by_key(|a| a.rank());
        let mut out: Vec<ValueItem> = Vec::with_capacity(items.len());
        for it in items {
            if !out.contains(&it) {
                out.push(it);
            }
        }
        ValueSet(out)
    }

    pub fn contains_literal(&self, v: Value) -> bool {
        self.0.contains(&ValueItem::Value(v))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Iff,
    Implies,
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    In,
    Add,
    Sub,
    Mul,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Iff => "<->",
            BinOp::Implies => "->",
            BinOp::Or => "or",
            BinOp::And => "and",
            BinOp::Eq => "==",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::In => "in",
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Pow => "^",
        }
    }

    /// Binding strength; larger binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinOp::Iff => 1,
            BinOp::Implies => 2,
            BinOp::Or => 3,
            BinOp::And => 4,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge | BinOp::In => 6,
            BinOp::Add | BinOp::Sub => 7,
            BinOp::Mul => 8,
            BinOp::Pow => 10,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AggOp {
    Sum,
    Prod,
}

/// Builtin functions with ordinary call syntax.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Builtin {
    Board,
    Solution,
    Size,
    Count,
    Members,
    Connect,
    Region,
    Cross,
    Cycle,
    AllDifferent,
    IsRectangle,
    IsSquare,
    NoOverlap,
    Fill,
    Factorial,
}

impl Builtin {
    pub const ALL: [Builtin; 15] = [
        Builtin::Board,
        Builtin::Solution,
        Builtin::Size,
        Builtin::Count,
        Builtin::Members,
        Builtin::Connect,
        Builtin::Region,
        Builtin::Cross,
        Builtin::Cycle,
        Builtin::AllDifferent,
        Builtin::IsRectangle,
        Builtin::IsSquare,
        Builtin::NoOverlap,
        Builtin::Fill,
        Builtin::Factorial,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Board => "B",
            Builtin::Solution => "solution",
            Builtin::Size => "size",
            Builtin::Count => "count",
            Builtin::Members => "members",
            Builtin::Connect => "connect",
            Builtin::Region => "region",
            Builtin::Cross => "cross",
            Builtin::Cycle => "cycle",
            Builtin::AllDifferent => "all_different",
            Builtin::IsRectangle => "is_rectangle",
            Builtin::IsSquare => "is_square",
            Builtin::NoOverlap => "no_overlap",
            Builtin::Fill => "fill",
            Builtin::Factorial => "factorial",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arg {
    Expr(Expr),
    Family(String),
    Relations(RelSet),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Lit(Value),
    Ident(String),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Quant {
        q: Quantifier,
        var: String,
        coll: Box<Expr>,
        filter: Option<Box<Expr>>,
        body: Box<Expr>,
    },
    Agg {
        op: AggOp,
        var: String,
        coll: Box<Expr>,
        filter: Option<Box<Expr>>,
        body: Box<Expr>,
    },
    SetBuilder {
        var: String,
        coll: Box<Expr>,
        pred: Option<Box<Expr>>,
    },
    Call(Builtin, Vec<Arg>),
}

impl Expr {
    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    pub fn int(v: i64) -> Expr {
        Expr::Lit(Value::Int(v))
    }
}
