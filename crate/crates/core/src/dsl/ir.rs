//! Resolved form of rule expressions: variables become environment slots
//! and family names become indices into [`Program::families`].

use super::ast::{AggOp, BinOp, Quantifier, ValueSet};
use crate::grid::RelSet;
use crate::structure::BaseFamily;
use crate::value::Value;

pub type FamId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Global {
    N,
    M,
    K,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySource {
    Base(BaseFamily),
    Combine { relations: RelSet, base: FamId },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyDecl {
    pub name: String,
    pub source: FamilySource,
    pub domain: Option<ValueSet>,
    pub hidden: Option<ValueSet>,
}

impl FamilyDecl {
    pub fn is_base(&self) -> bool {
        matches!(self.source, FamilySource::Base(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    Lit(Value),
    Global(Global),
    Var(usize),
    Not(Box<Node>),
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Quant {
        q: Quantifier,
        coll: Box<Node>,
        filter: Option<Box<Node>>,
        body: Box<Node>,
    },
    Agg {
        op: AggOp,
        coll: Box<Node>,
        filter: Option<Box<Node>>,
        body: Box<Node>,
    },
    SetBuilder {
        coll: Box<Node>,
        pred: Option<Box<Node>>,
    },
    Board(FamId),
    Solution(Box<Node>),
    Size(Box<Node>),
    Count(Box<Node>),
    Members(Box<Node>),
    Connect {
        x: Box<Node>,
        rels: RelSet,
        fam: FamId,
    },
    Region {
        fam: FamId,
        e: Box<Node>,
    },
    Cross(Box<Node>),
    Cycle(Box<Node>),
    AllDifferent(Box<Node>),
    IsRectangle(Box<Node>),
    IsSquare(Box<Node>),
    NoOverlap(FamId),
    Fill(Vec<FamId>),
    Factorial(Box<Node>),
}

/// A checked rule ready for evaluation at any grid size.
#[derive(Clone, Debug)]
pub struct Program {
    pub name: String,
    /// Base families first, in [`BaseFamily::ALL`] order, then declared
    /// structures in file order.
    pub families: Vec<FamilyDecl>,
    pub requires: Vec<Node>,
    pub constraints: Vec<Node>,
}

impl Program {
    pub fn family(&self, name: &str) -> Option<FamId> {
        self.families.iter().position(|f| f.name == name)
    }

    pub fn base_of(&self, f: FamId) -> BaseFamily {
        match self.families[f].source {
            FamilySource::Base(b) => b,
            FamilySource::Combine { base, .. } => self.base_of(base),
        }
    }

    /// Number of combine steps from the element sequences.
    pub fn combine_depth(&self, f: FamId) -> usize {
        match self.families[f].source {
            FamilySource::Base(_) => 0,
            FamilySource::Combine { base, .. } => 1 + self.combine_depth(base),
        }
    }

    pub fn combined(&self) -> impl Iterator<Item = FamId> + '_ {
        (0..self.families.len()).filter(|&f| !self.families[f].is_base())
    }

    pub fn spec(&self, f: FamId) -> crate::structure::FamilySpec {
        use crate::structure::FamilySpec;
        match &self.families[f].source {
            FamilySource::Base(b) => FamilySpec::base(*b),
            FamilySource::Combine { relations, base } => {
                FamilySpec::combine(&self.families[f].name, *relations, self.spec(*base))
            }
        }
    }
}
