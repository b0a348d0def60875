//! Relation graphs over structure sequences and the `combine` operation,
//! which collects every connected induced vertex subset of such a graph.

use std::fmt;

use crate::grid::{canonicalize, compare, ElementSet, GridDims, RelSet, Structure};
use crate::Error;

/// Undirected graph whose vertices are structures, joined when any relation
/// in `relations` holds between two distinct vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationGraph {
    pub vertices: Vec<Structure>,
    /// Index pairs with `u < v`, sorted.
    pub edges: Vec<(usize, usize)>,
    pub relations: RelSet,
}

impl RelationGraph {
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for &(u, v) in &self.edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }
}

pub fn relation_graph(s: &[Structure], r: RelSet) -> RelationGraph {
    let mut edges = Vec::new();
    for u in 0..s.len() {
        for v in u + 1..s.len() {
            if s[u] != s[v] && r.relates(&s[u], &s[v]) {
                edges.push((u, v));
            }
        }
    }
    RelationGraph {
        vertices: s.to_vec(),
        edges,
        relations: r,
    }
}

/// Empty and single-vertex graphs count as connected.
pub fn is_connected(g: &RelationGraph) -> bool {
    let n = g.vertices.len();
    if n <= 1 {
        return true;
    }
    let adj = g.adjacency();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    let mut count = 1;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                count += 1;
                stack.push(v);
            }
        }
    }
    count == n
}

/// Vertex containment, edge containment, and closure of `sub`'s edges over
/// its own vertices.
pub fn is_subgraph(sub: &RelationGraph, g: &RelationGraph) -> bool {
    if !sub.vertices.iter().all(|v| g.vertices.contains(v)) {
        return false;
    }
    sub.edges.iter().all(|&(u, v)| {
        let (a, b) = (&sub.vertices[u], &sub.vertices[v]);
        let in_sub = u < sub.vertices.len() && v < sub.vertices.len();
        let in_g = g.edges.iter().any(|&(x, y)| {
            let (gx, gy) = (&g.vertices[x], &g.vertices[y]);
            (gx == a && gy == b) || (gx == b && gy == a)
        });
        in_sub && in_g
    })
}

fn neighbours(base: &[Structure], r: RelSet) -> Vec<Vec<usize>> {
    relation_graph(base, r).adjacency()
}

fn to_structure(base: &[Structure], idx: &[usize]) -> Structure {
    canonicalize(idx.iter().map(|&k| base[k].clone()).collect())
}

/// All nonempty vertex subsets of `base` whose induced relation graph is
/// connected, canonically ordered. Fails once more than `budget` subsets
/// have been produced.
pub fn combine(r: RelSet, base: &[Structure], budget: u64) -> Result<Vec<Structure>, Error> {
    let mut base = base.to_vec();
    base.sort_by(compare);
    base.dedup();
    let adj = neighbours(&base, r);
    let n = base.len();
    let mut found: Vec<Vec<usize>> = Vec::new();

    // ESU: every connected set is reached exactly once from its least vertex.
    fn extend(
        adj: &[Vec<usize>],
        sub: &mut Vec<usize>,
        in_sub_or_nb: &mut Vec<u32>,
        ext: Vec<usize>,
        root: usize,
        found: &mut Vec<Vec<usize>>,
        budget: u64,
    ) -> Result<(), Error> {
        if found.len() as u64 >= budget {
            return Err(Error::Budget {
                what: "combine",
                reached: budget,
            });
        }
        found.push(sub.clone());
        let mut ext = ext;
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            for &u in &adj[w] {
                if u > root && in_sub_or_nb[u] == 0 {
                    next.push(u);
                }
            }
            for &u in &adj[w] {
                in_sub_or_nb[u] += 1;
            }
            sub.push(w);
            in_sub_or_nb[w] += 1;
            extend(adj, sub, in_sub_or_nb, next, root, found, budget)?;
            in_sub_or_nb[w] -= 1;
            sub.pop();
            for &u in &adj[w] {
                in_sub_or_nb[u] -= 1;
            }
        }
        Ok(())
    }

    for v in 0..n {
        let mut mark = vec![0u32; n];
        mark[v] = 1;
        for &u in &adj[v] {
            mark[u] += 1;
        }
        let ext: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        let mut sub = vec![v];
        extend(&adj, &mut sub, &mut mark, ext, v, &mut found, budget)?;
    }
    let mut out: Vec<Structure> = found
        .into_iter()
        .map(|mut idx| {
            idx.sort_unstable();
            to_structure(&base, &idx)
        })
        .collect();
    out.sort_by(compare);
    Ok(out)
}

/// Base element families every rule has.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BaseFamily {
    P,
    C,
    Ep,
    Ec,
    Hp,
    Vp,
    Hc,
    Vc,
}

impl BaseFamily {
    pub const ALL: [BaseFamily; 8] = [
        BaseFamily::P,
        BaseFamily::C,
        BaseFamily::Ep,
        BaseFamily::Ec,
        BaseFamily::Hp,
        BaseFamily::Vp,
        BaseFamily::Hc,
        BaseFamily::Vc,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BaseFamily::P => "P",
            BaseFamily::C => "C",
            BaseFamily::Ep => "Ep",
            BaseFamily::Ec => "Ec",
            BaseFamily::Hp => "Hp",
            BaseFamily::Vp => "Vp",
            BaseFamily::Hc => "Hc",
            BaseFamily::Vc => "Vc",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|b| b.name() == s)
    }

    pub fn elements(self, e: &ElementSet) -> Vec<crate::grid::Element> {
        match self {
            BaseFamily::P => e.p.clone(),
            BaseFamily::C => e.c.clone(),
            BaseFamily::Ep => e.ep(),
            BaseFamily::Ec => e.ec(),
            BaseFamily::Hp => e.hp.clone(),
            BaseFamily::Vp => e.vp.clone(),
            BaseFamily::Hc => e.hc.clone(),
            BaseFamily::Vc => e.vc.clone(),
        }
    }

    /// Whether an element of this kind belongs to the family.
    pub fn contains_kind(self, kind: crate::grid::ElementKind) -> bool {
        use crate::grid::ElementKind as K;
        matches!(
            (self, kind),
            (BaseFamily::P, K::Point)
                | (BaseFamily::C, K::Cell)
                | (BaseFamily::Ep, K::PointHEdge | K::PointVEdge)
                | (BaseFamily::Ec, K::CellHEdge | K::CellVEdge)
                | (BaseFamily::Hp, K::PointHEdge)
                | (BaseFamily::Vp, K::PointVEdge)
                | (BaseFamily::Hc, K::CellHEdge)
                | (BaseFamily::Vc, K::CellVEdge)
        )
    }
}

impl fmt::Display for BaseFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySource {
    Base(BaseFamily),
    Combine {
        relations: RelSet,
        base: Box<FamilySpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    pub name: String,
    pub source: FamilySource,
}

impl FamilySpec {
    pub fn base(b: BaseFamily) -> Self {
        FamilySpec {
            name: b.name().to_string(),
            source: FamilySource::Base(b),
        }
    }

    pub fn combine(name: &str, relations: RelSet, base: FamilySpec) -> Self {
        FamilySpec {
            name: name.to_string(),
            source: FamilySource::Combine {
                relations,
                base: Box::new(base),
            },
        }
    }

    /// Number of combine steps between this family and the element sequences.
    pub fn combine_depth(&self) -> usize {
        match &self.source {
            FamilySource::Base(_) => 0,
            FamilySource::Combine { base, .. } => 1 + base.combine_depth(),
        }
    }

    pub fn root(&self) -> BaseFamily {
        match &self.source {
            FamilySource::Base(b) => *b,
            FamilySource::Combine { base, .. } => base.root(),
        }
    }
}

/// Lazily yields the members of a family in canonical order.
pub fn instances_of(spec: &FamilySpec, dims: GridDims, budget: u64) -> Result<Instances, Error> {
    let elements = crate::grid::build_elements(dims)?;
    match &spec.source {
        FamilySource::Base(b) => {
            let items = b
                .elements(&elements)
                .into_iter()
                .map(Structure::Leaf)
                .collect();
            Ok(Instances::plain(items, budget))
        }
        FamilySource::Combine { relations, base } => {
            let mut base_items = Vec::new();
            for s in instances_of(base, dims, budget)? {
                base_items.push(s?);
            }
            base_items.sort_by(compare);
            Ok(Instances::connected(base_items, *relations, budget))
        }
    }
}

/// Stream of family members. Ends with one `Err` if the budget runs out.
pub struct Instances {
    base: Vec<Structure>,
    adj: Vec<Vec<usize>>,
    plain: bool,
    budget: u64,
    emitted: u64,
    // Lexicographic DFS state: current index prefix and the next candidate
    // to try at each depth.
    prefix: Vec<usize>,
    started: bool,
    done: bool,
}

impl Instances {
    fn plain(base: Vec<Structure>, budget: u64) -> Self {
        Instances {
            base,
            adj: Vec::new(),
            plain: true,
            budget,
            emitted: 0,
            prefix: Vec::new(),
            started: false,
            done: false,
        }
    }

    fn connected(base: Vec<Structure>, r: RelSet, budget: u64) -> Self {
        let adj = neighbours(&base, r);
        Instances {
            base,
            adj,
            plain: false,
            budget,
            emitted: 0,
            prefix: Vec::new(),
            started: false,
            done: false,
        }
    }

    /// Whether every prefix vertex can still be joined using only vertices
    /// larger than the last one.
    fn extendable(&self) -> bool {
        let last = *self.prefix.last().unwrap();
        let n = self.base.len();
        let mut allowed = vec![false; n];
        for &p in &self.prefix {
            allowed[p] = true;
        }
        for a in allowed.iter_mut().skip(last + 1) {
            *a = true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.prefix[0]];
        seen[self.prefix[0]] = true;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if allowed[v] && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        self.prefix.iter().all(|&p| seen[p])
    }

    fn prefix_connected(&self) -> bool {
        let n = self.base.len();
        let mut inside = vec![false; n];
        for &p in &self.prefix {
            inside[p] = true;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![self.prefix[0]];
        seen[self.prefix[0]] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if inside[v] && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.prefix.len()
    }

    /// Moves to the next prefix in lexicographic preorder that can still
    /// become connected.
    fn advance(&mut self) -> bool {
        let n = self.base.len();
        if !self.started {
            self.started = true;
            if n == 0 {
                return false;
            }
            self.prefix.push(0);
            return true;
        }
        // Descend first, then move to siblings, then climb.
        let last = *self.prefix.last().unwrap();
        for child in last + 1..n {
            self.prefix.push(child);
            if self.extendable() {
                return true;
            }
            self.prefix.pop();
        }
        loop {
            let Some(cur) = self.prefix.pop() else {
                return false;
            };
            let mut next = cur + 1;
            while next < n {
                self.prefix.push(next);
                if self.prefix.len() == 1 || self.extendable() {
                    return true;
                }
                self.prefix.pop();
                next += 1;
            }
        }
    }
}

impl Iterator for Instances {
    type Item = Result<Structure, Error>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if self.plain {
            let k = self.emitted as usize;
            if k >= self.base.len() {
                return None;
            }
            self.emitted += 1;
            return Some(Ok(self.base[k].clone()));
        }
        loop {
            if !self.advance() {
                self.done = true;
                return None;
            }
            if self.prefix_connected() {
                if self.emitted >= self.budget {
                    self.done = true;
                    return Some(Err(Error::Budget {
                        what: "instances_of",
                        reached: self.budget,
                    }));
                }
                self.emitted += 1;
                return Some(Ok(to_structure(&self.base, &self.prefix)));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_elements, Element, RelationKind::*};

    fn leaves(es: &[Element]) -> Vec<Structure> {
        es.iter().copied().map(Structure::Leaf).collect()
    }

    fn dims(m: u32, n: u32) -> GridDims {
        GridDims::new(m, n).unwrap()
    }

    #[test]
    fn graph_examples() {
        let ep = leaves(&build_elements(dims(1, 1)).unwrap().ep());
        let g = relation_graph(&ep, RelSet::of(&[H, V, D]));
        assert_eq!(g.edges, vec![(0, 2), (0, 3), (1, 2), (1, 3)]);
        assert!(relation_graph(&ep, RelSet::of(&[M])).edges.is_empty());
        let cells = leaves(&[Element::c(1, 1), Element::c(1, 2)]);
        assert_eq!(relation_graph(&cells, RelSet::of(&[H])).edges.len(), 1);
    }

    #[test]
    fn connectivity_examples() {
        let r = RelSet::of(&[H]);
        assert!(is_connected(&relation_graph(
            &leaves(&[Element::c(1, 1)]),
            r
        )));
        assert!(!is_connected(&relation_graph(
            &leaves(&[Element::c(1, 1), Element::c(1, 3)]),
            r
        )));
        let path = leaves(&[Element::c(1, 1), Element::c(1, 2), Element::c(1, 3)]);
        let g = relation_graph(&path, r);
        assert!(is_connected(&g));
        assert!(is_subgraph(&g, &g));
        let induced = relation_graph(&path[..2], r);
        assert!(is_subgraph(&induced, &g));
        let other = relation_graph(&leaves(&[Element::c(2, 1)]), r);
        assert!(!is_subgraph(&other, &g));
    }

    #[test]
    fn combine_examples() {
        let ep = leaves(&build_elements(dims(1, 1)).unwrap().ep());
        assert_eq!(
            combine(RelSet::of(&[H, V, D]), &ep, 1000).unwrap().len(),
            13
        );
        let cells = leaves(&[Element::c(1, 1), Element::c(1, 2)]);
        let out = combine(RelSet::of(&[H, V]), &cells, 1000).unwrap();
        assert_eq!(
            out,
            vec![
                Structure::leaves([Element::c(1, 1)]),
                Structure::leaves([Element::c(1, 1), Element::c(1, 2)]),
                Structure::leaves([Element::c(1, 2)]),
            ]
        );
        assert!(combine(RelSet::of(&[H, V, D]), &ep, 12).is_err());
    }

    #[test]
    fn instances_examples() {
        let c = FamilySpec::base(BaseFamily::C);
        assert_eq!(instances_of(&c, dims(2, 2), 100).unwrap().count(), 4);
        let a = FamilySpec::combine("A", RelSet::of(&[H, V]), c);
        let first = instances_of(&a, dims(3, 3), 10_000)
            .unwrap()
            .next()
            .unwrap()
            .unwrap();
        assert_eq!(first, Structure::leaves([Element::c(1, 1)]));
        let gp = FamilySpec::combine(
            "Gp",
            RelSet::of(&[H, V, D]),
            FamilySpec::base(BaseFamily::Ep),
        );
        assert_eq!(instances_of(&gp, dims(1, 1), 100).unwrap().count(), 13);
        let mut it = instances_of(&gp, dims(1, 1), 5).unwrap();
        assert_eq!(it.by_ref().filter(|r| r.is_ok()).count(), 5);
        let mut it = instances_of(&gp, dims(1, 1), 5).unwrap();
        assert!(it.nth(5).unwrap().is_err());
    }

    #[test]
    fn lazy_matches_combine() {
        for (m, n) in [(1, 1), (1, 2), (2, 2), (2, 3)] {
            let e = build_elements(dims(m, n)).unwrap();
            for r in RelSet::all_subsets().filter(|r| !r.is_empty()) {
                let cells = leaves(&e.c);
                let spec = FamilySpec::combine("A", r, FamilySpec::base(BaseFamily::C));
                let lazy: Vec<_> = instances_of(&spec, dims(m, n), 1 << 20)
                    .unwrap()
                    .map(Result::unwrap)
                    .collect();
                assert_eq!(lazy, combine(r, &cells, 1 << 20).unwrap(), "{m}x{n} {r}");
            }
        }
    }
}
