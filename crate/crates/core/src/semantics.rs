//! Deciding rule constraints on completed boards, and the heuristic
//! functions of the rule language as plain functions over boards.

use std::collections::BTreeSet;
use std::rc::Rc;

use fixedbitset::FixedBitSet;

use crate::board::CompletedBoard;
use crate::dsl::ir::{FamId, FamilySource, Node};
use crate::eval::{AObj, AVal, Evaluator, PColl, Region, RegionKey, Tv, World, AV};
use crate::grid::{flatten, Element, ElementKind, RelSet, Structure};
use crate::model::Model;
use crate::value::Value;
use crate::{Error, EvalError};

/// A completed board bound to a model, ready for evaluation.
pub struct CompleteWorld<'a> {
    model: &'a Model,
    values: Vec<Value>,
    /// Per family id: instance element sets and their values.
    regions: Vec<Vec<Rc<Region>>>,
    region_values: Vec<Vec<Value>>,
}

impl<'a> CompleteWorld<'a> {
    /// Builds from raw parts: one value per universe index and, per family
    /// id, the selected instances with their values.
    pub fn from_parts(
        model: &'a Model,
        values: Vec<Value>,
        instances: Vec<Vec<(FixedBitSet, Value)>>,
    ) -> Self {
        let mut regions = Vec::new();
        let mut region_values = Vec::new();
        for (f, insts) in instances.into_iter().enumerate() {
            let mut rs = Vec::new();
            let mut vs = Vec::new();
            for (k, (set, v)) in insts.into_iter().enumerate() {
                rs.push(Rc::new(Region {
                    fam: f,
                    key: RegionKey::Inst(k),
                    def: set.clone(),
                    possible: set,
                }));
                vs.push(v);
            }
            regions.push(rs);
            region_values.push(vs);
        }
        CompleteWorld {
            model,
            values,
            regions,
            region_values,
        }
    }

    /// Checks that `board` fits the model and that every instance belongs
    /// to its family, then binds it.
    pub fn new(model: &'a Model, board: &CompletedBoard) -> Result<Self, Error> {
        board.validate(model)?;
        let u = &model.geo.universe;
        let values = u.elements().iter().map(|e| board.value(*e)).collect();
        let mut instances = vec![Vec::new(); model.prog.families.len()];
        for (name, insts) in &board.families {
            let f = model
                .prog
                .family(name)
                .ok_or_else(|| Error::UnknownFamily(name.clone()))?;
            let (rels, base) = model.combine_of(f).ok_or_else(|| {
                Error::Document(format!("`{name}` is a base family and has no selection"))
            })?;
            let vals = board.instance_values.get(name).cloned().unwrap_or_default();
            if vals.len() != insts.len() {
                return Err(Error::Document(format!(
                    "family {name} has {} instances but {} values",
                    insts.len(),
                    vals.len()
                )));
            }
            for (s, v) in insts.iter().zip(vals) {
                let mut set = model.geo.empty_set();
                for e in flatten(s) {
                    let k = u
                        .index_of(e)
                        .ok_or_else(|| Error::Document(format!("{e} is off the grid")))?;
                    set.insert(k);
                }
                let member = set.count_ones(..) > 0
                    && set.is_subset(model.geo.base_set(base))
                    && model.geo.is_connected(rels, &set)
                    && s.depth() == 1;
                if !member {
                    return Err(Error::Document(format!("{s} is not an instance of {name}")));
                }
                instances[f].push((set, v));
            }
        }
        Ok(CompleteWorld::from_parts(model, values, instances))
    }

    /// Truth of each top-level constraint, in declaration order.
    pub fn constraint_results(&self) -> Vec<Result<bool, EvalError>> {
        self.model
            .prog
            .constraints
            .iter()
            .map(|c| self.holds(c))
            .collect()
    }

    /// Whether every constraint holds. Evaluation errors count as failure.
    pub fn satisfied(&self) -> bool {
        self.model
            .prog
            .constraints
            .iter()
            .all(|c| matches!(self.holds(c), Ok(true)))
    }

    pub fn holds(&self, n: &Node) -> Result<bool, EvalError> {
        match Evaluator::new(self, Vec::new()).truth(n)? {
            Tv::T => Ok(true),
            Tv::F => Ok(false),
            Tv::U => unreachable!("complete boards decide every constraint"),
        }
    }

    /// Evaluates a closed expression to a value, a truth or a collection size.
    pub fn eval(&self, n: &Node) -> Result<Outcome, EvalError> {
        Ok(match Evaluator::new(self, Vec::new()).eval(n)? {
            AV::Bool(t) => Outcome::Bool(t == Tv::T),
            AV::Val(AVal::Known(v)) => Outcome::Value(v),
            AV::Val(_) => unreachable!("complete boards give exact values"),
            AV::Obj(_) => Outcome::Object,
            AV::Coll(c) => Outcome::Collection(c.items.len()),
        })
    }
}

/// Result of evaluating an expression on a completed board.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Bool(bool),
    Value(Value),
    Object,
    Collection(usize),
}

impl World for CompleteWorld<'_> {
    fn model(&self) -> &Model {
        self.model
    }

    fn exact(&self) -> bool {
        true
    }

    fn elem_value(&self, e: usize) -> AVal {
        AVal::Known(self.values[e])
    }

    fn region_value(&self, r: &Region) -> AVal {
        match r.key {
            RegionKey::Inst(k) => AVal::Known(self.region_values[r.fam][k]),
            _ => AVal::ANY,
        }
    }

    fn board(&self, f: FamId) -> PColl {
        PColl {
            items: self.regions[f].iter().cloned().map(AObj::Region).collect(),
            ..PColl::default()
        }
    }
}

/// Evaluates a closed expression on a completed board of `model`.
pub fn eval_expr(
    model: &Model,
    board: &CompletedBoard,
    e: &crate::dsl::ast::Expr,
) -> Result<Outcome, Error> {
    let node = crate::dsl::check::compile_expr(&model.prog, e).map_err(Error::Rule)?;
    Ok(CompleteWorld::new(model, board)?.eval(&node)?)
}

/// Board members of a family: every element of a base family, or the
/// selected instances of a combined one.
pub fn board_members(
    model: &Model,
    board: &CompletedBoard,
    family: &str,
) -> Result<Vec<Structure>, Error> {
    let f = model
        .prog
        .family(family)
        .ok_or_else(|| Error::UnknownFamily(family.to_string()))?;
    Ok(match model.prog.families[f].source {
        FamilySource::Base(b) => model
            .geo
            .base_elements(b)
            .iter()
            .map(|&k| Structure::Leaf(model.geo.universe.element(k)))
            .collect(),
        FamilySource::Combine { .. } => board.families.get(family).cloned().unwrap_or_default(),
    })
}

fn edge_total(board: &CompletedBoard, probes: [Element; 4]) -> Result<i64, EvalError> {
    let mut total = 0;
    for e in probes.into_iter().filter(|e| e.is_valid(board.dims)) {
        match board.value(e) {
            Value::Int(v) => total += v,
            other => {
                return Err(EvalError::Type(format!(
                    "{e} holds {other}, not an integer"
                )))
            }
        }
    }
    Ok(total)
}

/// Sum of the four grid-point edges meeting at point `p`.
pub fn cross(board: &CompletedBoard, p: Element) -> Result<i64, EvalError> {
    let (i, j) = (p.i, p.j);
    edge_total(
        board,
        [
            Element::hp(i, j - 1),
            Element::hp(i, j),
            Element::vp(i - 1, j),
            Element::vp(i, j),
        ],
    )
}

/// Sum of the four grid-point edges around cell `c`.
pub fn cycle(board: &CompletedBoard, c: Element) -> Result<i64, EvalError> {
    let (i, j) = (c.i, c.j);
    edge_total(
        board,
        [
            Element::hp(i, j),
            Element::hp(i + 1, j),
            Element::vp(i, j),
            Element::vp(i, j + 1),
        ],
    )
}

pub fn all_different(values: &[Value]) -> bool {
    let set: BTreeSet<&Value> = values.iter().collect();
    set.len() == values.len()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    Rectangle,
    Square,
}

/// Shape test for a flat structure of cells.
pub fn shape_check(x: &Structure, shape: Shape) -> Result<bool, EvalError> {
    let cells: Vec<Element> = match x {
        Structure::Leaf(e) => vec![*e],
        Structure::Seq(_) if x.depth() == 1 => flatten(x),
        _ => {
            return Err(EvalError::Type(
                "shape tests apply to one level of combine".into(),
            ))
        }
    };
    if cells.iter().any(|e| e.kind != ElementKind::Cell) {
        return Err(EvalError::Type("shape tests apply to cells".into()));
    }
    let (imin, imax) = (
        cells.iter().map(|e| e.i).min().unwrap(),
        cells.iter().map(|e| e.i).max().unwrap(),
    );
    let (jmin, jmax) = (
        cells.iter().map(|e| e.j).min().unwrap(),
        cells.iter().map(|e| e.j).max().unwrap(),
    );
    let (h, w) = (imax - imin + 1, jmax - jmin + 1);
    let distinct: BTreeSet<&Element> = cells.iter().collect();
    let rect = (h * w) as usize == distinct.len();
    Ok(match shape {
        Shape::Rectangle => rect,
        Shape::Square => rect && h == w,
    })
}

/// Members of the family's board, other than `x`, related to `x` under
/// some relation in `r`.
pub fn connect_fn(
    model: &Model,
    board: &CompletedBoard,
    x: &Structure,
    r: RelSet,
    family: &str,
) -> Result<Vec<Structure>, Error> {
    Ok(board_members(model, board, family)?
        .into_iter()
        .filter(|y| y != x && r.relates(x, y))
        .collect())
}

/// Whether the selected instances of `family` are pairwise disjoint.
pub fn no_overlap(board: &CompletedBoard, family: &str) -> bool {
    let mut seen = BTreeSet::new();
    board
        .instances(family)
        .into_iter()
        .flatten()
        .all(|e| seen.insert(e))
}

/// Whether the instances of `families` together cover every element of
/// `base` exactly once.
pub fn fill(board: &CompletedBoard, families: &[&str], base: &[Element]) -> bool {
    let mut seen = BTreeSet::new();
    for f in families {
        for e in board.instances(f).into_iter().flatten() {
            if !seen.insert(e) {
                return false;
            }
        }
    }
    seen.len() == base.len() && base.iter().all(|e| seen.contains(e))
}
