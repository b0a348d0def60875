//! Turning completed boards into problems: masking values by the hidden
//! sets, thinning clues while the answer stays unique, and verifying
//! uniqueness.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::board::{Certificate, CompletedBoard, Given, Problem};
use crate::dsl::Rule;
use crate::grid::{Element, GridDims, Structure};
use crate::solver::Solver;
use crate::value::Value;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MaskPolicy {
    /// Show every presentable value, then remove clues in seeded order
    /// while the problem stays unique.
    RevealThenThin,
    /// Show presentable values of these elements only, without thinning.
    Fixed(BTreeSet<Element>),
}

/// Masked values before thinning: per element and per instance.
struct Draft {
    elements: BTreeMap<Element, Value>,
    instances: Vec<(String, Structure, Value)>,
}

impl Draft {
    fn given(&self) -> Given {
        Given {
            elements: self.elements.clone(),
            instances: self
                .instances
                .iter()
                .map(|(f, s, v)| (f.clone(), crate::grid::flatten(s), *v))
                .collect(),
        }
    }
}

fn presentable(hidden: &BTreeSet<Value>, v: Value, family: &str) -> Result<Value, Error> {
    if hidden.contains(&v) {
        Ok(v)
    } else if hidden.contains(&Value::Undecided) {
        Ok(Value::Undecided)
    } else {
        Err(Error::Unmaskable {
            family: family.to_string(),
            value: v.to_string(),
        })
    }
}

/// Number of completions of `given`, stopping at 2.
fn count2(solver: &Solver, given: &Given, budget: u64) -> Result<(u64, u64), Error> {
    solver.count(given, 2, budget)
}

/// Builds a unique problem from a completed board.
pub fn mask(
    solver: &Solver,
    board: &CompletedBoard,
    seed: u64,
    policy: &MaskPolicy,
    budget: u64,
) -> Result<Problem, Error> {
    let model = solver.model();
    board.validate(model)?;
    let u = &model.geo.universe;
    let mut draft = Draft {
        elements: BTreeMap::new(),
        instances: Vec::new(),
    };
    for (k, e) in u.elements().iter().enumerate() {
        let v = presentable(
            &model.elem_hidden[k],
            board.value(*e),
            model.element_family(k),
        )?;
        let v = match policy {
            MaskPolicy::Fixed(shown)
                if !shown.contains(e) && model.elem_hidden[k].contains(&Value::Undecided) =>
            {
                Value::Undecided
            }
            _ => v,
        };
        draft.elements.insert(*e, v);
    }
    for (name, insts) in &board.families {
        let f = model
            .prog
            .family(name)
            .ok_or_else(|| Error::UnknownFamily(name.clone()))?;
        for (s, v) in insts.iter().zip(&board.instance_values[name]) {
            let shown = presentable(&model.fam_hidden[f], *v, name)?;
            let shown = if matches!(policy, MaskPolicy::Fixed(_))
                && model.fam_hidden[f].contains(&Value::Undecided)
            {
                Value::Undecided
            } else {
                shown
            };
            draft.instances.push((name.clone(), s.clone(), shown));
        }
    }

    let (count, mut nodes) = count2(solver, &draft.given(), budget)?;
    if count != 1 {
        return Err(Error::NotUnique { count });
    }

    if *policy == MaskPolicy::RevealThenThin {
        // Candidate clues: shown values whose hidden set allows undecided.
        let mut clues: Vec<Option<usize>> = Vec::new();
        for (k, e) in u.elements().iter().enumerate() {
            let v = draft.elements[e];
            if v != Value::Undecided && model.elem_hidden[k].contains(&Value::Undecided) {
                clues.push(Some(k));
            }
        }
        let mut inst_clues: Vec<usize> = Vec::new();
        for (i, (name, _, v)) in draft.instances.iter().enumerate() {
            let f = model.prog.family(name).expect("known family");
            if !matches!(v, Value::Undecided | Value::Null)
                && model.fam_hidden[f].contains(&Value::Undecided)
            {
                inst_clues.push(i);
            }
        }
        let mut order: Vec<(bool, usize)> =
            clues.into_iter().flatten().map(|k| (true, k)).collect();
        order.extend(inst_clues.into_iter().map(|i| (false, i)));
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        for (is_elem, k) in order {
            let old = if is_elem {
                let e = u.element(k);
                draft
                    .elements
                    .insert(e, Value::Undecided)
                    .expect("element present")
            } else {
                std::mem::replace(&mut draft.instances[k].2, Value::Undecided)
            };
            let (count, n) = count2(solver, &draft.given(), budget)?;
            nodes = n;
            if count != 1 {
                if is_elem {
                    draft.elements.insert(u.element(k), old);
                } else {
                    draft.instances[k].2 = old;
                }
            }
        }
        // Certificate for the final presentation.
        nodes = count2(solver, &draft.given(), budget)?.1.max(nodes);
    }

    let mut families: BTreeMap<String, Vec<Structure>> = BTreeMap::new();
    let mut instance_values: BTreeMap<String, Vec<Value>> = BTreeMap::new();
    for (name, s, v) in draft.instances {
        if matches!(v, Value::Null | Value::Undecided) {
            continue;
        }
        families.entry(name.clone()).or_default().push(s);
        instance_values.entry(name).or_default().push(v);
    }
    Ok(Problem {
        rule: model.prog.name.clone(),
        dims: model.dims(),
        families,
        elements: draft.elements,
        instance_values,
        certificate: Certificate {
            count: 1,
            dims: model.dims(),
            nodes,
            engine: "exhaustive".into(),
        },
    })
}

/// Whether exactly one completed board extends the problem.
pub fn verify_unique(solver: &Solver, problem: &Problem, budget: u64) -> Result<bool, Error> {
    let model = solver.model();
    for (k, e) in model.geo.universe.elements().iter().enumerate() {
        if let Some(v) = problem.elements.get(e) {
            if !model.elem_hidden[k].contains(v) {
                return Err(Error::NotPresentable(e.to_string()));
            }
        }
    }
    Ok(count2(solver, &problem.given(), budget)?.0 == 1)
}

/// Whether a rule admits completed boards and a unique problem at a size.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub dims: GridDims,
    /// Completed boards, if counting finished.
    pub completions: Option<u64>,
    pub unique_problem: Option<bool>,
    pub nodes: u64,
    pub budget: u64,
    /// Why a part of the report is missing.
    pub note: Option<String>,
}

pub fn check_rule_feasible(rule: &Rule, dims: GridDims, budget: u64) -> Result<Feasibility, Error> {
    let solver = Solver::from_rule(rule, dims)?;
    let mut report = Feasibility {
        dims,
        completions: None,
        unique_problem: None,
        nodes: 0,
        budget,
        note: None,
    };
    match solver.count(&Given::default(), u64::MAX, budget) {
        Ok((count, nodes)) => {
            report.completions = Some(count);
            report.nodes = nodes;
        }
        Err(Error::Budget { reached, .. }) => {
            report.nodes = reached;
            report.note = Some(format!("counting stopped after {reached} nodes"));
        }
        Err(e) => return Err(e),
    }
    if report.completions == Some(0) {
        report.unique_problem = Some(false);
        return Ok(report);
    }
    let first = match solver.enumerate(&Given::default(), 1, budget) {
        Ok(found) => found.boards.into_iter().next(),
        Err(Error::Budget { .. }) => None,
        Err(e) => return Err(e),
    };
    if let Some(board) = first {
        match mask(&solver, &board, 0, &MaskPolicy::RevealThenThin, budget) {
            Ok(_) => report.unique_problem = Some(true),
            Err(Error::NotUnique { .. } | Error::Unmaskable { .. }) => {
                report.unique_problem = Some(false)
            }
            Err(Error::Budget { .. }) => {
                report.note = Some("uniqueness check ran out of budget".into())
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_rule;
    use crate::grid::ElementKind;

    const LOOP: &str = r#"puzzle "loop"
structure Gp = combine {H, V, D} on Ep
domain C = {0..4}
domain Ep = {0, 1}
hidden C = {0..4, undecided}
hidden Ep = {undecided}
constraint forall e in B(Ep): solution(e) == 1 <-> exists g in B(Gp): e in g
constraint forall p in B(P): cross(p) == 0 or cross(p) == 2
constraint forall c in B(C): solution(c) == cycle(c)
constraint count(B(Gp)) == 1
"#;

    fn solver() -> Solver {
        Solver::from_rule(&parse_rule(LOOP).unwrap(), GridDims { m: 2, n: 2 }).unwrap()
    }

    #[test]
    fn masked_loops_are_unique() {
        let s = solver();
        let boards = s
            .enumerate(&Given::default(), usize::MAX, 1_000_000)
            .unwrap()
            .boards;
        let mut ambiguous = 0;
        for (i, b) in boards.iter().enumerate() {
            let p = match mask(&s, b, i as u64, &MaskPolicy::RevealThenThin, 1_000_000) {
                Ok(p) => p,
                Err(Error::NotUnique { count }) => {
                    // Even every clue shown leaves another loop.
                    assert_eq!(count, 2);
                    ambiguous += 1;
                    continue;
                }
                Err(e) => panic!("{e}"),
            };
            let edge =
                |e: &Element| matches!(e.kind, ElementKind::PointHEdge | ElementKind::PointVEdge);
            assert!(p
                .elements
                .iter()
                .filter(|(e, _)| edge(e))
                .all(|(_, v)| *v == Value::Undecided));
            for (e, v) in &p.elements {
                assert!(*v == Value::Undecided || *v == b.value(*e));
            }
            assert!(verify_unique(&s, &p, 1_000_000).unwrap());
        }
        assert!(ambiguous < boards.len());
    }

    #[test]
    fn all_undecided_is_not_unique() {
        let s = solver();
        let b = &s.enumerate(&Given::default(), 1, 1_000_000).unwrap().boards[0];
        let p = mask(&s, b, 0, &MaskPolicy::Fixed(BTreeSet::new()), 1_000_000);
        assert!(matches!(p, Err(Error::NotUnique { count: 2 })));
    }

    #[test]
    fn feasibility_reports() {
        let r = check_rule_feasible(
            &parse_rule(LOOP).unwrap(),
            GridDims { m: 2, n: 2 },
            1_000_000,
        )
        .unwrap();
        assert_eq!(r.completions, Some(13));
        assert_eq!(r.unique_problem, Some(true));
        let none = parse_rule("puzzle \"none\"\nconstraint 1 == 2").unwrap();
        let r = check_rule_feasible(&none, GridDims { m: 2, n: 2 }, 1000).unwrap();
        assert_eq!(r.completions, Some(0));
    }
}
