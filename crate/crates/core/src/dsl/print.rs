use std::fmt::Write;

use super::ast::*;
use crate::value::Value;

const P_QUANT: u8 = 0;
const P_NOT: u8 = 5;
const P_ADD: u8 = 7;
const P_NEG: u8 = 9;
const P_ATOM: u8 = 11;

/// Canonical text of a rule. Parsing the output yields an equal rule.
pub fn serialize_rule(rule: &Rule) -> String {
    let mut out = String::new();
    writeln!(out, "puzzle {}", quote(&rule.name)).unwrap();
    let mut section = |lines: Vec<String>| {
        if !lines.is_empty() {
            out.push('\n');
            for l in lines {
                out.push_str(&l);
                out.push('\n');
            }
        }
    };
    section(
        rule.requires
            .iter()
            .map(|e| format!("require {}", expr_to_string(e)))
            .collect(),
    );
    section(
        rule.structures
            .iter()
            .map(|s| {
                format!(
                    "structure {} = combine {} on {}",
                    s.name, s.relations, s.base
                )
            })
            .collect(),
    );
    section(
        rule.domains
            .iter()
            .map(|(n, v)| format!("domain {n} = {}", valueset_to_string(v)))
            .collect(),
    );
    section(
        rule.hidden
            .iter()
            .map(|(n, v)| format!("hidden {n} = {}", valueset_to_string(v)))
            .collect(),
    );
    section(
        rule.constraints
            .iter()
            .map(|e| format!("constraint {}", expr_to_string(e)))
            .collect(),
    );
    out
}

fn quote(s: &str) -> String {
    let mut q = String::from("\"");
    for c in s.chars() {
        if c == '"' || c == '\\' {
            q.push('\\');
        }
        q.push(c);
    }
    q.push('"');
    q
}

pub fn valueset_to_string(v: &ValueSet) -> String {
    let items: Vec<String> =
        v.0.iter()
            .map(|it| match it {
                ValueItem::Value(v) => v.to_string(),
                ValueItem::Range(a, b) => format!("{}..{}", show(a, P_ADD), show(b, P_ADD)),
            })
            .collect();
    format!("{{{}}}", items.join(", "))
}

pub fn expr_to_string(e: &Expr) -> String {
    show(e, P_QUANT)
}

fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Quant { .. } => P_QUANT,
        Expr::Binary(op, ..) => op.precedence(),
        Expr::Unary(UnOp::Not, _) => P_NOT,
        Expr::Unary(UnOp::Neg, _) => P_NEG,
        Expr::Lit(Value::Int(v)) if *v < 0 => P_NEG,
        _ => P_ATOM,
    }
}

fn show(e: &Expr, min: u8) -> String {
    let s = render(e);
    if prec(e) < min {
        format!("({s})")
    } else {
        s
    }
}

fn binder(var: &str, coll: &Expr, filter: &Option<Box<Expr>>) -> String {
    let mut s = format!("{var} in {}", show(coll, P_ADD));
    if let Some(f) = filter {
        write!(s, " where {}", show(f, 1)).unwrap();
    }
    s
}

fn render(e: &Expr) -> String {
    match e {
        Expr::Lit(v) => v.to_string(),
        Expr::Ident(s) => s.clone(),
        Expr::Unary(UnOp::Not, a) => format!("not {}", show(a, P_NOT)),
        Expr::Unary(UnOp::Neg, a) => format!("-{}", show(a, P_NEG)),
        Expr::Binary(op, a, b) => {
            let p = op.precedence();
            let (lmin, rmin) = match op {
                BinOp::Implies => (p + 1, p),
                BinOp::Pow => (P_ATOM, P_NEG),
                BinOp::Eq
                | BinOp::Ne
                | BinOp::Lt
                | BinOp::Le
                | BinOp::Gt
                | BinOp::Ge
                | BinOp::In => (P_ADD, P_ADD),
                BinOp::And => (p, P_NOT),
                _ => (p, p + 1),
            };
            format!("{} {} {}", show(a, lmin), op.symbol(), show(b, rmin))
        }
        Expr::Quant {
            q,
            var,
            coll,
            filter,
            body,
        } => {
            let kw = match q {
                Quantifier::Forall => "forall",
                Quantifier::Exists => "exists",
            };
            format!(
                "{kw} {}: {}",
                binder(var, coll, filter),
                show(body, P_QUANT)
            )
        }
        Expr::Agg {
            op,
            var,
            coll,
            filter,
            body,
        } => {
            let kw = match op {
                AggOp::Sum => "sum",
                AggOp::Prod => "prod",
            };
            format!(
                "{kw}({}: {})",
                binder(var, coll, filter),
                show(body, P_QUANT)
            )
        }
        Expr::SetBuilder { var, coll, pred } => {
            let mut s = format!("{{{var} in {}", show(coll, P_ADD));
            if let Some(p) = pred {
                write!(s, " where {}", show(p, P_QUANT)).unwrap();
            }
            s.push('}');
            s
        }
        Expr::Call(b, args) => {
            let parts: Vec<String> = args
                .iter()
                .map(|a| match a {
                    Arg::Expr(e) => show(e, P_QUANT),
                    Arg::Family(f) => f.clone(),
                    Arg::Relations(r) => r.to_string(),
                })
                .collect();
            format!("{}({})", b.name(), parts.join(", "))
        }
    }
}
