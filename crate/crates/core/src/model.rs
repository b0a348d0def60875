//! A rule instantiated at one grid size: element indexing, neighbour tables
//! and resolved domains.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use crate::dsl::check::{resolve_valueset, satisfy_requirements, Globals};
use crate::dsl::ir::{FamId, FamilySource, Program};
use crate::dsl::{ast::ValueSet, compile, Rule};
use crate::grid::{ElementKind, GridDims, RelSet, RelationKind, Universe};
use crate::structure::BaseFamily;
use crate::value::Value;
use crate::Error;

/// Element universe plus precomputed relation neighbourhoods.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub universe: Universe,
    /// `nb[relset][e]` holds every element related to `e` under the set.
    nb: Vec<Vec<FixedBitSet>>,
    base: Vec<(Vec<usize>, FixedBitSet)>,
}

impl Geometry {
    pub fn new(dims: GridDims) -> Self {
        let universe = Universe::new(dims);
        let n = universe.len();
        let els = universe.elements();
        let mut single: Vec<Vec<FixedBitSet>> = Vec::new();
        for kind in RelationKind::ALL {
            let mut rows = vec![FixedBitSet::with_capacity(n); n];
            for (a, row) in rows.iter_mut().enumerate() {
                for b in 0..n {
                    if crate::grid::relate_elements(kind, els[a], els[b]) {
                        row.insert(b);
                    }
                }
            }
            single.push(rows);
        }
        let mut nb = Vec::with_capacity(16);
        for rs in RelSet::all_subsets() {
            let mut rows = vec![FixedBitSet::with_capacity(n); n];
            for k in rs.iter() {
                for (row, s) in rows.iter_mut().zip(&single[k as usize]) {
                    row.union_with(s);
                }
            }
            nb.push(rows);
        }
        let base = BaseFamily::ALL
            .iter()
            .map(|b| {
                let list: Vec<usize> = (0..n).filter(|&e| b.contains_kind(els[e].kind)).collect();
                let mut set = FixedBitSet::with_capacity(n);
                list.iter().for_each(|&e| set.insert(e));
                (list, set)
            })
            .collect();
        Geometry { universe, nb, base }
    }

    pub fn dims(&self) -> GridDims {
        self.universe.dims()
    }

    pub fn len(&self) -> usize {
        self.universe.len()
    }

    pub fn is_empty(&self) -> bool {
        self.universe.is_empty()
    }

    pub fn neighbors(&self, r: RelSet, e: usize) -> &FixedBitSet {
        &self.nb[r.bits()][e]
    }

    /// Whether some element of `a` relates to some element of `b`.
    pub fn related(&self, r: RelSet, a: &FixedBitSet, b: &FixedBitSet) -> bool {
        a.ones().any(|x| !self.nb[r.bits()][x].is_disjoint(b))
    }

    pub fn base_elements(&self, b: BaseFamily) -> &[usize] {
        &self.base[b as usize].0
    }

    pub fn base_set(&self, b: BaseFamily) -> &FixedBitSet {
        &self.base[b as usize].1
    }

    pub fn empty_set(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.len())
    }

    /// Elements of `within` reachable from `from` through `within`, using
    /// relation set `r`. `from` itself is included.
    pub fn reach(&self, r: RelSet, from: &FixedBitSet, within: &FixedBitSet) -> FixedBitSet {
        let mut seen = from.clone();
        let mut stack: Vec<usize> = from.ones().collect();
        while let Some(x) = stack.pop() {
            for y in self.nb[r.bits()][x].intersection(within) {
                if !seen.contains(y) {
                    seen.insert(y);
                    stack.push(y);
                }
            }
        }
        seen
    }

    /// Whether `set` is connected under `r` (empty and singleton sets are).
    pub fn is_connected(&self, r: RelSet, set: &FixedBitSet) -> bool {
        let Some(first) = set.ones().next() else {
            return true;
        };
        let mut start = self.empty_set();
        start.insert(first);
        self.reach(r, &start, set).count_ones(..) == set.count_ones(..)
    }
}

/// Base families checked from most to least specific when resolving the
/// domain of an element.
fn specificity(kind: ElementKind) -> &'static [BaseFamily] {
    match kind {
        ElementKind::Point => &[BaseFamily::P],
        ElementKind::Cell => &[BaseFamily::C],
        ElementKind::PointHEdge => &[BaseFamily::Hp, BaseFamily::Ep],
        ElementKind::PointVEdge => &[BaseFamily::Vp, BaseFamily::Ep],
        ElementKind::CellHEdge => &[BaseFamily::Hc, BaseFamily::Ec],
        ElementKind::CellVEdge => &[BaseFamily::Vc, BaseFamily::Ec],
    }
}

/// A checked rule bound to concrete grid dimensions.
#[derive(Clone, Debug)]
pub struct Model {
    pub prog: Program,
    pub globals: Globals,
    pub geo: Geometry,
    /// Allowed values per element, ascending.
    pub elem_domain: Vec<Vec<Value>>,
    pub elem_hidden: Vec<BTreeSet<Value>>,
    /// Allowed instance values per family, ascending.
    pub fam_domain: Vec<Vec<Value>>,
    pub fam_hidden: Vec<BTreeSet<Value>>,
}

fn resolve(set: Option<&ValueSet>, g: Globals, what: &str) -> Result<BTreeSet<Value>, Error> {
    match set {
        None => Ok([Value::Null].into()),
        Some(s) => {
            let v = resolve_valueset(s, g).ok_or_else(|| {
                Error::Unsupported(format!(
                    "value set of {what} does not evaluate at this size"
                ))
            })?;
            if v.is_empty() {
                return Err(Error::Unsupported(format!(
                    "value set of {what} is empty at this size"
                )));
            }
            Ok(v)
        }
    }
}

impl Model {
    pub fn new(prog: &Program, dims: GridDims) -> Result<Model, Error> {
        let dims = GridDims::new(dims.m, dims.n)?;
        let globals = satisfy_requirements(prog, dims).ok_or(Error::Requirements(dims))?;
        for f in prog.combined() {
            if prog.combine_depth(f) > 1 {
                return Err(Error::Unsupported(format!(
                    "family `{}` combines another combined family; boards support one level of combine",
                    prog.families[f].name
                )));
            }
        }
        let geo = Geometry::new(dims);
        let mut fam_domain: Vec<Vec<Value>> = Vec::new();
        let mut fam_hidden = Vec::new();
        for fam in &prog.families {
            fam_domain.push(
                resolve(fam.domain.as_ref(), globals, &fam.name)?
                    .into_iter()
                    .collect(),
            );
            fam_hidden.push(resolve(fam.hidden.as_ref(), globals, &fam.name)?);
        }
        let pick = |kind: ElementKind, field: fn(&crate::dsl::ir::FamilyDecl) -> bool| {
            specificity(kind)
                .iter()
                .map(|b| prog.family(b.name()).expect("base family"))
                .find(|&f| field(&prog.families[f]))
        };
        let mut elem_domain = Vec::new();
        let mut elem_hidden = Vec::new();
        for e in geo.universe.elements() {
            let d = pick(e.kind, |f| f.domain.is_some());
            let h = pick(e.kind, |f| f.hidden.is_some());
            elem_domain.push(
                d.map(|f| fam_domain[f].clone())
                    .unwrap_or_else(|| vec![Value::Null]),
            );
            elem_hidden.push(
                h.map(|f| fam_hidden[f].clone())
                    .unwrap_or_else(|| [Value::Null].into()),
            );
        }
        Ok(Model {
            prog: prog.clone(),
            globals,
            geo,
            elem_domain,
            elem_hidden,
            fam_domain,
            fam_hidden,
        })
    }

    /// Compiles `rule` and binds it to `dims`.
    pub fn from_rule(rule: &Rule, dims: GridDims) -> Result<Model, Error> {
        let prog = compile(rule).map_err(Error::Rule)?;
        Model::new(&prog, dims)
    }

    pub fn dims(&self) -> GridDims {
        self.geo.dims()
    }

    /// Relations and base of a combined family.
    pub fn combine_of(&self, f: FamId) -> Option<(RelSet, BaseFamily)> {
        match self.prog.families[f].source {
            FamilySource::Combine { relations, .. } => Some((relations, self.prog.base_of(f))),
            FamilySource::Base(_) => None,
        }
    }

    pub fn family_name(&self, f: FamId) -> &str {
        &self.prog.families[f].name
    }

    /// Name of the base family whose hidden set governs element `e`.
    pub fn element_family(&self, e: usize) -> &str {
        let chain = specificity(self.geo.universe.element(e).kind);
        let pick = chain
            .iter()
            .find(|b| {
                self.prog
                    .family(b.name())
                    .is_some_and(|f| self.prog.families[f].hidden.is_some())
            })
            .unwrap_or(&chain[chain.len() - 1]);
        pick.name()
    }

    pub fn combined(&self) -> Vec<FamId> {
        self.prog.combined().collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_rule;
    use crate::grid::Element;

    #[test]
    fn neighbours_match_case_tables() {
        let geo = Geometry::new(GridDims { m: 2, n: 2 });
        let u = &geo.universe;
        let c11 = u.index_of(Element::c(1, 1)).unwrap();
        let hv = RelSet::of(&[RelationKind::H, RelationKind::V]);
        let got: Vec<Element> = geo
            .neighbors(hv, c11)
            .ones()
            .map(|e| u.element(e))
            .collect();
        assert_eq!(
            got,
            vec![
                Element::c(1, 2),
                Element::c(2, 1),
                Element::hc(1, 1),
                Element::vc(1, 1)
            ]
        );
        let cells = geo
            .neighbors(hv, c11)
            .intersection(geo.base_set(BaseFamily::C))
            .count();
        assert_eq!(cells, 2);
    }

    #[test]
    fn specific_domain_wins() {
        let rule =
            parse_rule("puzzle \"t\"\ndomain Ep = {0, 1}\ndomain Hp = {5}\ndomain C = {1..n}")
                .unwrap();
        let model = Model::from_rule(&rule, GridDims { m: 2, n: 3 }).unwrap();
        let u = &model.geo.universe;
        let at = |e| &model.elem_domain[u.index_of(e).unwrap()];
        assert_eq!(at(Element::hp(1, 1)), &vec![Value::Int(5)]);
        assert_eq!(at(Element::vp(1, 1)), &vec![Value::Int(0), Value::Int(1)]);
        assert_eq!(at(Element::c(2, 3)).len(), 3);
        assert_eq!(at(Element::p(1, 1)), &vec![Value::Null]);
    }

    #[test]
    fn requirements_gate_dims() {
        let rule = parse_rule("puzzle \"t\"\nrequire n == m").unwrap();
        assert!(matches!(
            Model::from_rule(&rule, GridDims { m: 2, n: 3 }),
            Err(Error::Requirements(_))
        ));
    }
}
