//! Completed boards, partial assignments and their JSON documents.
//!
//! A completed board document looks like
//!
//! ```json
//! {"assignment": {"A[0]": 2, "c(1,1)": 2, "c(1,2)": 2, "p(1,1)": null},
//!  "families": {"A": [["c(1,1)", "c(1,2)"]]},
//!  "m": 1, "n": 2, "rule": "fillomino"}
//! ```
//!
//! Keys are sorted. Instance values are keyed `Family[index]` with the
//! index into that family's list. Values are `null`, integers, `"x"` or
//! `"undecided"`.

use std::collections::BTreeMap;

use serde_json::{json, Map, Value as Json};

use crate::grid::{Element, GridDims, Structure};
use crate::model::Model;
use crate::value::Value;
use crate::Error;

/// A board with a value for every member: all grid elements plus the
/// selected instances of each combined family.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CompletedBoard {
    pub rule: String,
    pub dims: GridDims,
    /// Selected instances per combined family, each canonically sorted.
    pub families: BTreeMap<String, Vec<Structure>>,
    /// One value per grid element.
    pub elements: BTreeMap<Element, Value>,
    /// Values of the selected instances, parallel to `families`.
    pub instance_values: BTreeMap<String, Vec<Value>>,
}

impl CompletedBoard {
    pub fn value(&self, e: Element) -> Value {
        self.elements.get(&e).copied().unwrap_or(Value::Null)
    }

    /// Instances of one family as element lists.
    pub fn instances(&self, family: &str) -> Vec<Vec<Element>> {
        self.families
            .get(family)
            .map(|v| v.iter().map(crate::grid::flatten).collect())
            .unwrap_or_default()
    }

    /// Orders by board (instances) first, then by assignment.
    pub fn canonical_cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.families, &self.elements, &self.instance_values).cmp(&(
            &other.families,
            &other.elements,
            &other.instance_values,
        ))
    }

    /// Every value of the assignment in board-member order: elements, then
    /// instances family by family.
    pub fn value_sequence(&self) -> Vec<Value> {
        let mut out: Vec<Value> = self.elements.values().copied().collect();
        for vals in self.instance_values.values() {
            out.extend(vals);
        }
        out
    }

    pub fn to_json(&self) -> Json {
        json!({
            "rule": self.rule,
            "m": self.dims.m,
            "n": self.dims.n,
            "families": families_json(&self.families),
            "assignment": assignment_json(&self.elements, &self.instance_values),
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json(doc: &Json) -> Result<CompletedBoard, Error> {
        let (rule, dims, families) = header(doc)?;
        let (elements, instance_values) = read_assignment(doc, "assignment", &families)?;
        Ok(CompletedBoard {
            rule,
            dims,
            families,
            elements,
            instance_values,
        })
    }

    pub fn from_json_str(s: &str) -> Result<CompletedBoard, Error> {
        CompletedBoard::from_json(&serde_json::from_str(s)?)
    }

    /// Checks the board against a model: all elements present, values in
    /// their domains, families known and instances in bounds.
    pub fn validate(&self, model: &Model) -> Result<(), Error> {
        let u = &model.geo.universe;
        if self.dims != model.dims() {
            return Err(Error::Document(format!(
                "board is {} but the model is {}",
                self.dims,
                model.dims()
            )));
        }
        for (idx, e) in u.elements().iter().enumerate() {
            let v = self
                .elements
                .get(e)
                .ok_or_else(|| Error::Document(format!("no value for {e}")))?;
            if !model.elem_domain[idx].contains(v) {
                return Err(Error::Document(format!(
                    "value {v} of {e} is outside its domain"
                )));
            }
        }
        if self.elements.len() != u.len() {
            return Err(Error::Document(
                "assignment names elements outside the grid".into(),
            ));
        }
        for (name, insts) in &self.families {
            let f = model
                .prog
                .family(name)
                .ok_or_else(|| Error::UnknownFamily(name.clone()))?;
            let vals = &self.instance_values[name];
            for (s, v) in insts.iter().zip(vals) {
                if crate::grid::flatten(s)
                    .iter()
                    .any(|e| !e.is_valid(self.dims))
                {
                    return Err(Error::Document(format!(
                        "instance of {name} leaves the grid"
                    )));
                }
                if !model.fam_domain[f].contains(v) {
                    return Err(Error::Document(format!(
                        "value {v} of a {name} instance is outside its domain"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Certificate attached to a presented problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub count: u64,
    pub dims: GridDims,
    pub nodes: u64,
    pub engine: String,
}

/// A board presented with some values hidden, plus evidence that exactly
/// one completed board extends it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub rule: String,
    pub dims: GridDims,
    /// Presented instances only (those shown with a concrete value).
    pub families: BTreeMap<String, Vec<Structure>>,
    pub elements: BTreeMap<Element, Value>,
    pub instance_values: BTreeMap<String, Vec<Value>>,
    pub certificate: Certificate,
}

impl Problem {
    pub fn given(&self) -> Given {
        let mut instances = Vec::new();
        for (name, insts) in &self.families {
            for (s, v) in insts.iter().zip(&self.instance_values[name]) {
                instances.push((name.clone(), crate::grid::flatten(s), *v));
            }
        }
        Given {
            elements: self.elements.clone(),
            instances,
        }
    }

    pub fn to_json(&self) -> Json {
        let c = &self.certificate;
        json!({
            "rule": self.rule,
            "m": self.dims.m,
            "n": self.dims.n,
            "families": families_json(&self.families),
            "presented": assignment_json(&self.elements, &self.instance_values),
            "certificate": {"count": c.count, "m": c.dims.m, "n": c.dims.n, "nodes": c.nodes, "engine": c.engine},
        })
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json(doc: &Json) -> Result<Problem, Error> {
        let (rule, dims, families) = header(doc)?;
        let (elements, instance_values) = read_assignment(doc, "presented", &families)?;
        let c = doc
            .get("certificate")
            .ok_or_else(|| Error::Document("missing `certificate`".into()))?;
        let num = |k: &str| {
            c.get(k)
                .and_then(Json::as_u64)
                .ok_or_else(|| Error::Document(format!("certificate needs `{k}`")))
        };
        let certificate = Certificate {
            count: num("count")?,
            dims: GridDims::new(num("m")? as u32, num("n")? as u32)?,
            nodes: num("nodes")?,
            engine: c
                .get("engine")
                .and_then(Json::as_str)
                .unwrap_or_default()
                .to_string(),
        };
        Ok(Problem {
            rule,
            dims,
            families,
            elements,
            instance_values,
            certificate,
        })
    }

    pub fn from_json_str(s: &str) -> Result<Problem, Error> {
        Problem::from_json(&serde_json::from_str(s)?)
    }
}

/// A partial assignment that completed boards are matched against.
/// Missing elements and `undecided` values match anything; each listed
/// instance must be selected with the given value unless the value is
/// `null` or `undecided`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Given {
    pub elements: BTreeMap<Element, Value>,
    pub instances: Vec<(String, Vec<Element>, Value)>,
}

impl Given {
    pub fn matches(&self, board: &CompletedBoard) -> bool {
        let elems = self
            .elements
            .iter()
            .all(|(e, v)| *v == Value::Undecided || board.value(*e) == *v);
        elems
            && self.instances.iter().all(|(fam, els, v)| {
                if matches!(v, Value::Null | Value::Undecided) {
                    return true;
                }
                let target = Structure::leaves(els.iter().copied());
                let insts = board.families.get(fam).map(Vec::as_slice).unwrap_or(&[]);
                insts
                    .iter()
                    .position(|s| *s == target)
                    .is_some_and(|k| board.instance_values[fam][k] == *v)
            })
    }
}

/// Extended subsequence test: `b` matches `a` position by position, with
/// `undecided` in `b` matching anything.
pub fn ext_subseq(b: &[Value], a: &[Value]) -> Result<bool, Error> {
    if a.len() != b.len() {
        return Err(Error::Document(format!(
            "sequences differ in length ({} vs {})",
            b.len(),
            a.len()
        )));
    }
    Ok(b.iter()
        .zip(a)
        .all(|(x, y)| *x == Value::Undecided || x == y))
}

fn families_json(families: &BTreeMap<String, Vec<Structure>>) -> Json {
    let mut map = Map::new();
    for (name, insts) in families {
        let list: Vec<Json> = insts
            .iter()
            .map(|s| {
                Json::Array(
                    crate::grid::flatten(s)
                        .iter()
                        .map(|e| Json::String(e.to_string()))
                        .collect(),
                )
            })
            .collect();
        map.insert(name.clone(), Json::Array(list));
    }
    Json::Object(map)
}

fn assignment_json(
    elements: &BTreeMap<Element, Value>,
    inst: &BTreeMap<String, Vec<Value>>,
) -> Json {
    let mut map = Map::new();
    for (e, v) in elements {
        map.insert(e.to_string(), serde_json::to_value(v).expect("value"));
    }
    for (name, vals) in inst {
        for (k, v) in vals.iter().enumerate() {
            map.insert(
                format!("{name}[{k}]"),
                serde_json::to_value(v).expect("value"),
            );
        }
    }
    Json::Object(map)
}

type Header = (String, GridDims, BTreeMap<String, Vec<Structure>>);

fn header(doc: &Json) -> Result<Header, Error> {
    let rule = doc
        .get("rule")
        .and_then(Json::as_str)
        .ok_or_else(|| Error::Document("missing `rule`".into()))?;
    let side = |k: &str| {
        doc.get(k)
            .and_then(Json::as_u64)
            .and_then(|v| u32::try_from(v).ok())
            .ok_or_else(|| Error::Document(format!("missing or bad `{k}`")))
    };
    let dims = GridDims::new(side("m")?, side("n")?)?;
    let mut families = BTreeMap::new();
    let fams = doc
        .get("families")
        .and_then(Json::as_object)
        .ok_or_else(|| Error::Document("missing `families`".into()))?;
    for (name, list) in fams {
        let list = list
            .as_array()
            .ok_or_else(|| Error::Document(format!("family `{name}` is not a list")))?;
        let mut insts = Vec::new();
        for inst in list {
            let ids = inst
                .as_array()
                .ok_or_else(|| Error::Document(format!("instance of `{name}` is not a list")))?;
            let mut els = Vec::new();
            for id in ids {
                let s = id
                    .as_str()
                    .ok_or_else(|| Error::Document("element ids are strings".into()))?;
                els.push(s.parse::<Element>()?);
            }
            if els.is_empty() {
                return Err(Error::Document(format!("empty instance in `{name}`")));
            }
            insts.push(Structure::leaves(els));
        }
        families.insert(name.clone(), insts);
    }
    Ok((rule.to_string(), dims, families))
}

type Assignment = (BTreeMap<Element, Value>, BTreeMap<String, Vec<Value>>);

fn read_assignment(
    doc: &Json,
    key: &str,
    families: &BTreeMap<String, Vec<Structure>>,
) -> Result<Assignment, Error> {
    let obj = doc
        .get(key)
        .and_then(Json::as_object)
        .ok_or_else(|| Error::Document(format!("missing `{key}`")))?;
    let mut elements = BTreeMap::new();
    let mut inst: BTreeMap<String, Vec<Option<Value>>> = families
        .iter()
        .map(|(k, v)| (k.clone(), vec![None; v.len()]))
        .collect();
    for (k, v) in obj {
        let val: Value = serde_json::from_value(v.clone())?;
        if let Some((name, rest)) = k.split_once('[') {
            let idx: usize = rest
                .strip_suffix(']')
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Document(format!("bad instance key `{k}`")))?;
            let slot = inst
                .get_mut(name)
                .and_then(|v| v.get_mut(idx))
                .ok_or_else(|| Error::Document(format!("`{k}` names no listed instance")))?;
            *slot = Some(val);
        } else {
            elements.insert(k.parse::<Element>()?, val);
        }
    }
    let mut instance_values = BTreeMap::new();
    for (name, vals) in inst {
        let vals: Option<Vec<Value>> = vals.into_iter().collect();
        let vals =
            vals.ok_or_else(|| Error::Document(format!("an instance of `{name}` has no value")))?;
        instance_values.insert(name, vals);
    }
    Ok((elements, instance_values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CompletedBoard {
        let mut elements = BTreeMap::new();
        elements.insert(Element::c(1, 1), Value::Int(2));
        elements.insert(Element::c(1, 2), Value::Mark);
        elements.insert(Element::p(1, 1), Value::Null);
        let mut families = BTreeMap::new();
        families.insert(
            "A".to_string(),
            vec![Structure::leaves([Element::c(1, 2), Element::c(1, 1)])],
        );
        let mut instance_values = BTreeMap::new();
        instance_values.insert("A".to_string(), vec![Value::Int(2)]);
        CompletedBoard {
            rule: "t".into(),
            dims: GridDims { m: 1, n: 2 },
            families,
            elements,
            instance_values,
        }
    }

    #[test]
    fn json_round_trip_with_sorted_keys() {
        let b = sample();
        let text = b.to_json_string();
        assert_eq!(CompletedBoard::from_json_str(&text).unwrap(), b);
        let compact = serde_json::to_string(&b.to_json()).unwrap();
        assert!(compact.starts_with("{\"assignment\":{\"A[0]\":2,\"c(1,1)\":2,\"c(1,2)\":\"x\""));
    }

    #[test]
    fn ext_subseq_cases() {
        use Value::*;
        assert!(ext_subseq(&[Undecided, Int(3)], &[Int(5), Int(3)]).unwrap());
        assert!(!ext_subseq(&[Int(4), Int(3)], &[Int(5), Int(3)]).unwrap());
        assert!(ext_subseq(&[Undecided, Undecided], &[Mark, Null]).unwrap());
        assert!(ext_subseq(&[Int(1)], &[Int(1), Int(2)]).is_err());
    }

    #[test]
    fn given_matching() {
        let b = sample();
        let mut g = Given::default();
        assert!(g.matches(&b));
        g.elements.insert(Element::c(1, 1), Value::Undecided);
        assert!(g.matches(&b));
        g.instances.push((
            "A".into(),
            vec![Element::c(1, 1), Element::c(1, 2)],
            Value::Int(2),
        ));
        assert!(g.matches(&b));
        g.instances
            .push(("A".into(), vec![Element::c(1, 1)], Value::Int(1)));
        assert!(!g.matches(&b));
    }
}
