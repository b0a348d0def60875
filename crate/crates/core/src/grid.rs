//! Grid elements, their canonical order, and the four positional relations.
//!
//! A grid of `m` rows and `n` columns of cells carries six kinds of elements:
//! grid points, cells, horizontal and vertical edges between grid points, and
//! horizontal and vertical edges between cells. Coordinates are 1-based and
//! always row first.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::ParseElementError;

/// Size of a grid in cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridDims {
    pub m: u32,
    pub n: u32,
}

impl GridDims {
    pub fn new(m: u32, n: u32) -> Result<Self, crate::Error> {
        if m == 0 || n == 0 {
            return Err(crate::Error::InvalidDims { m, n });
        }
        Ok(GridDims { m, n })
    }
}

impl fmt::Display for GridDims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.m, self.n)
    }
}

impl FromStr for GridDims {
    type Err = crate::Error;

    /// Parses `MxN`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || crate::Error::BadSize(s.to_string());
        let (m, n) = s.split_once(['x', 'X']).ok_or_else(bad)?;
        let m = m.trim().parse().map_err(|_| bad())?;
        let n = n.trim().parse().map_err(|_| bad())?;
        GridDims::new(m, n)
    }
}

/// The six element kinds, declared in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    Point,
    Cell,
    PointHEdge,
    PointVEdge,
    CellHEdge,
    CellVEdge,
}

impl ElementKind {
    pub const ALL: [ElementKind; 6] = [
        ElementKind::Point,
        ElementKind::Cell,
        ElementKind::PointHEdge,
        ElementKind::PointVEdge,
        ElementKind::CellHEdge,
        ElementKind::CellVEdge,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            ElementKind::Point => "p",
            ElementKind::Cell => "c",
            ElementKind::PointHEdge => "hp",
            ElementKind::PointVEdge => "vp",
            ElementKind::CellHEdge => "hc",
            ElementKind::CellVEdge => "vc",
        }
    }

    fn from_tag(tag: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.tag() == tag)
    }

    /// Number of rows and columns this kind spans on an `m x n` grid.
    pub fn extent(self, dims: GridDims) -> (u32, u32) {
        let (m, n) = (dims.m, dims.n);
        match self {
            ElementKind::Point => (m + 1, n + 1),
            ElementKind::Cell => (m, n),
            ElementKind::PointHEdge => (m + 1, n),
            ElementKind::PointVEdge => (m, n + 1),
            ElementKind::CellHEdge => (m, n - 1),
            ElementKind::CellVEdge => (m - 1, n),
        }
    }
}

/// One annotated grid object. Coordinates may lie outside the grid; use
/// [`Element::is_valid`] to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub kind: ElementKind,
    pub i: i32,
    pub j: i32,
}

impl Element {
    pub const fn new(kind: ElementKind, i: i32, j: i32) -> Self {
        Element { kind, i, j }
    }

    pub const fn p(i: i32, j: i32) -> Self {
        Self::new(ElementKind::Point, i, j)
    }
    pub const fn c(i: i32, j: i32) -> Self {
        Self::new(ElementKind::Cell, i, j)
    }
    pub const fn hp(i: i32, j: i32) -> Self {
        Self::new(ElementKind::PointHEdge, i, j)
    }
    pub const fn vp(i: i32, j: i32) -> Self {
        Self::new(ElementKind::PointVEdge, i, j)
    }
    pub const fn hc(i: i32, j: i32) -> Self {
        Self::new(ElementKind::CellHEdge, i, j)
    }
    pub const fn vc(i: i32, j: i32) -> Self {
        Self::new(ElementKind::CellVEdge, i, j)
    }

    pub fn is_valid(&self, dims: GridDims) -> bool {
        let (rows, cols) = self.kind.extent(dims);
        self.i >= 1 && self.j >= 1 && self.i as i64 <= rows as i64 && self.j as i64 <= cols as i64
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.kind.tag(), self.i, self.j)
    }
}

impl FromStr for Element {
    type Err = ParseElementError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseElementError(s.to_string());
        let open = s.find('(').ok_or_else(err)?;
        let kind = ElementKind::from_tag(&s[..open]).ok_or_else(err)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(err)?;
        let (i, j) = inner.split_once(',').ok_or_else(err)?;
        let i = i.parse().map_err(|_| err())?;
        let j = j.parse().map_err(|_| err())?;
        Ok(Element::new(kind, i, j))
    }
}

/// Every element of a grid, grouped by kind, each sequence in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementSet {
    pub dims: GridDims,
    pub p: Vec<Element>,
    pub c: Vec<Element>,
    pub hp: Vec<Element>,
    pub vp: Vec<Element>,
    pub hc: Vec<Element>,
    pub vc: Vec<Element>,
}

impl ElementSet {
    pub fn of_kind(&self, kind: ElementKind) -> &[Element] {
        match kind {
            ElementKind::Point => &self.p,
            ElementKind::Cell => &self.c,
            ElementKind::PointHEdge => &self.hp,
            ElementKind::PointVEdge => &self.vp,
            ElementKind::CellHEdge => &self.hc,
            ElementKind::CellVEdge => &self.vc,
        }
    }

    /// Grid point edges, horizontal before vertical.
    pub fn ep(&self) -> Vec<Element> {
        self.hp.iter().chain(&self.vp).copied().collect()
    }

    /// Cell edges, horizontal before vertical.
    pub fn ec(&self) -> Vec<Element> {
        self.hc.iter().chain(&self.vc).copied().collect()
    }

    /// The element sequence `(P, Ep, C, Ec)` as a nested structure.
    pub fn as_structure(&self) -> Structure {
        let seq = |v: Vec<Element>| Structure::Seq(v.into_iter().map(Structure::Leaf).collect());
        Structure::Seq(vec![
            seq(self.p.clone()),
            seq(self.ep()),
            seq(self.c.clone()),
            seq(self.ec()),
        ])
    }

    /// All elements in canonical order.
    pub fn all(&self) -> impl Iterator<Item = Element> + '_ {
        ElementKind::ALL
            .into_iter()
            .flat_map(move |k| self.of_kind(k).iter().copied())
    }

    pub fn len(&self) -> usize {
        ElementKind::ALL
            .iter()
            .map(|&k| self.of_kind(k).len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn build_elements(dims: GridDims) -> Result<ElementSet, crate::Error> {
    let dims = GridDims::new(dims.m, dims.n)?;
    let gen = |kind: ElementKind| {
        let (rows, cols) = kind.extent(dims);
        let mut out = Vec::with_capacity((rows * cols) as usize);
        for i in 1..=rows as i32 {
            for j in 1..=cols as i32 {
                out.push(Element::new(kind, i, j));
            }
        }
        out
    };
    Ok(ElementSet {
        dims,
        p: gen(ElementKind::Point),
        c: gen(ElementKind::Cell),
        hp: gen(ElementKind::PointHEdge),
        vp: gen(ElementKind::PointVEdge),
        hc: gen(ElementKind::CellHEdge),
        vc: gen(ElementKind::CellVEdge),
    })
}

/// Dense indexing of every valid element of a grid, in canonical order.
#[derive(Clone, Debug)]
pub struct Universe {
    dims: GridDims,
    offsets: [usize; 7],
    elements: Vec<Element>,
}

impl Universe {
    pub fn new(dims: GridDims) -> Self {
        let mut offsets = [0usize; 7];
        for (k, kind) in ElementKind::ALL.into_iter().enumerate() {
            let (r, c) = kind.extent(dims);
            offsets[k + 1] = offsets[k] + (r * c) as usize;
        }
        let elements = build_elements(dims)
            .expect("dims validated")
            .all()
            .collect();
        Universe {
            dims,
            offsets,
            elements,
        }
    }

    pub fn dims(&self) -> GridDims {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, idx: usize) -> Element {
        self.elements[idx]
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn index_of(&self, e: Element) -> Option<usize> {
        if !e.is_valid(self.dims) {
            return None;
        }
        let k = e.kind as usize;
        let (_, cols) = e.kind.extent(self.dims);
        Some(self.offsets[k] + (e.i as usize - 1) * cols as usize + (e.j as usize - 1))
    }

    /// Index range occupied by one kind.
    pub fn kind_range(&self, kind: ElementKind) -> std::ops::Range<usize> {
        let k = kind as usize;
        self.offsets[k]..self.offsets[k + 1]
    }
}

/// Positional relations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RelationKind {
    H,
    V,
    D,
    M,
}

impl RelationKind {
    pub const ALL: [RelationKind; 4] = [
        RelationKind::H,
        RelationKind::V,
        RelationKind::D,
        RelationKind::M,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationKind::H => "H",
            RelationKind::V => "V",
            RelationKind::D => "D",
            RelationKind::M => "M",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|r| r.name() == s)
    }
}

/// A subset of the four relations.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelSet(u8);

impl RelSet {
    pub const EMPTY: RelSet = RelSet(0);

    pub fn of(kinds: &[RelationKind]) -> Self {
        kinds.iter().fold(RelSet(0), |s, &k| s.with(k))
    }

    pub fn with(self, k: RelationKind) -> Self {
        RelSet(self.0 | (1 << k as u8))
    }

    pub fn contains(self, k: RelationKind) -> bool {
        self.0 & (1 << k as u8) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Dense index in `0..16`.
    pub fn bits(self) -> usize {
        self.0 as usize
    }

    pub fn iter(self) -> impl Iterator<Item = RelationKind> {
        RelationKind::ALL
            .into_iter()
            .filter(move |&k| self.contains(k))
    }

    /// All 16 subsets.
    pub fn all_subsets() -> impl Iterator<Item = RelSet> {
        (0u8..16).map(RelSet)
    }

    pub fn relates(self, x: &Structure, y: &Structure) -> bool {
        self.iter().any(|k| relate(k, x, y))
    }

    pub fn relates_elements(self, x: Element, y: Element) -> bool {
        self.iter().any(|k| relate_elements(k, x, y))
    }
}

impl fmt::Display for RelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<_> = self.iter().map(RelationKind::name).collect();
        write!(f, "{{{}}}", names.join(", "))
    }
}

fn within(d: i32, lo: i32, hi: i32) -> bool {
    d == lo || d == hi
}

/// Case tables for the four relations on single elements.
pub fn relate_elements(kind: RelationKind, x: Element, y: Element) -> bool {
    use ElementKind::*;
    let (di, dj) = (x.i - y.i, x.j - y.j);
    match kind {
        RelationKind::M => x == y,
        RelationKind::H => match (x.kind, y.kind) {
            (Point, Point) | (Cell, Cell) | (PointHEdge, PointHEdge) | (CellHEdge, CellHEdge) => {
                di == 0 && dj.abs() == 1
            }
            (Point, PointHEdge) | (Cell, CellHEdge) => di == 0 && within(dj, 0, 1),
            (PointHEdge, Point) | (CellHEdge, Cell) => di == 0 && within(dj, 0, -1),
            _ => false,
        },
        RelationKind::V => match (x.kind, y.kind) {
            (Point, Point) | (Cell, Cell) | (PointVEdge, PointVEdge) | (CellVEdge, CellVEdge) => {
                di.abs() == 1 && dj == 0
            }
            (Point, PointVEdge) | (Cell, CellVEdge) => within(di, 0, 1) && dj == 0,
            (PointVEdge, Point) | (CellVEdge, Cell) => within(di, 0, -1) && dj == 0,
            _ => false,
        },
        RelationKind::D => match (x.kind, y.kind) {
            (Point, Point) | (Cell, Cell) => di.abs() == 1 && dj.abs() == 1,
            (PointHEdge, PointVEdge) | (CellHEdge, CellVEdge) => {
                within(di, 0, 1) && within(dj, 0, -1)
            }
            (PointVEdge, PointHEdge) | (CellVEdge, CellHEdge) => {
                within(di, 0, -1) && within(dj, 0, 1)
            }
            _ => false,
        },
    }
}

/// A leaf element or a nested sequence of structures.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Structure {
    Leaf(Element),
    Seq(Vec<Structure>),
}

impl Structure {
    /// Nesting depth; elements are depth 0 and a flat sequence is depth 1.
    pub fn depth(&self) -> usize {
        match self {
            Structure::Leaf(_) => 0,
            Structure::Seq(xs) => 1 + xs.iter().map(Structure::depth).max().unwrap_or(0),
        }
    }

    pub fn leaves(elements: impl IntoIterator<Item = Element>) -> Structure {
        canonicalize(elements.into_iter().map(Structure::Leaf).collect())
    }

    pub fn as_element(&self) -> Option<Element> {
        match self {
            Structure::Leaf(e) => Some(*e),
            Structure::Seq(_) => None,
        }
    }

    pub fn members(&self) -> &[Structure] {
        match self {
            Structure::Leaf(_) => std::slice::from_ref(self),
            Structure::Seq(xs) => xs,
        }
    }
}

impl Ord for Structure {
    fn cmp(&self, other: &Self) -> Ordering {
        compare(self, other)
    }
}

impl PartialOrd for Structure {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Structure::Leaf(e) => write!(f, "{e}"),
            Structure::Seq(xs) => {
                f.write_str("(")?;
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Total order: elements by kind then coordinates; deeper sequences are
/// larger; equal-depth sequences compare lexicographically.
pub fn compare(a: &Structure, b: &Structure) -> Ordering {
    match (a, b) {
        (Structure::Leaf(x), Structure::Leaf(y)) => x.cmp(y),
        (Structure::Leaf(_), Structure::Seq(_)) => Ordering::Less,
        (Structure::Seq(_), Structure::Leaf(_)) => Ordering::Greater,
        (Structure::Seq(xs), Structure::Seq(ys)) => a.depth().cmp(&b.depth()).then_with(|| {
            for (x, y) in xs.iter().zip(ys) {
                let o = compare(x, y);
                if o != Ordering::Equal {
                    return o;
                }
            }
            xs.len().cmp(&ys.len())
        }),
    }
}

/// Sorts a sequence at every level and removes duplicates.
pub fn canonicalize(seq: Vec<Structure>) -> Structure {
    let mut out: Vec<Structure> = seq
        .into_iter()
        .map(|s| match s {
            Structure::Seq(inner) => canonicalize(inner),
            leaf => leaf,
        })
        .collect();
    out.sort_by(compare);
    out.dedup();
    Structure::Seq(out)
}

/// Leaf elements of a structure, deduplicated and canonically ordered.
pub fn flatten(s: &Structure) -> Vec<Element> {
    fn walk(s: &Structure, out: &mut Vec<Element>) {
        match s {
            Structure::Leaf(e) => out.push(*e),
            Structure::Seq(xs) => xs.iter().for_each(|x| walk(x, out)),
        }
    }
    let mut out = Vec::new();
    walk(s, &mut out);
    out.sort();
    out.dedup();
    out
}

/// Every subsequence of `a`, canonically ordered. Fails when `2^|a|` exceeds
/// `budget`.
pub fn power_seq(a: &Structure, budget: u64) -> Result<Vec<Structure>, crate::Error> {
    let members = match canonicalize(a.members().to_vec()) {
        Structure::Seq(xs) => xs,
        Structure::Leaf(_) => unreachable!(),
    };
    let total = 1u64
        .checked_shl(members.len() as u32)
        .filter(|&t| t <= budget);
    let Some(total) = total else {
        return Err(crate::Error::Budget {
            what: "power_seq",
            reached: budget,
        });
    };
    let mut out: Vec<Structure> = (0..total)
        .map(|mask| {
            Structure::Seq(
                members
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask >> k & 1 == 1)
                    .map(|(_, s)| s.clone())
                    .collect(),
            )
        })
        .collect();
    out.sort_by(compare);
    Ok(out)
}

/// A relation lifted to structures: true when some pair of members relate.
pub fn relate(kind: RelationKind, x: &Structure, y: &Structure) -> bool {
    match (x, y) {
        (Structure::Leaf(a), Structure::Leaf(b)) => relate_elements(kind, *a, *b),
        (Structure::Seq(xs), _) => xs.iter().any(|x| relate(kind, x, y)),
        (Structure::Leaf(_), Structure::Seq(ys)) => ys.iter().any(|y| relate(kind, x, y)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dims(m: u32, n: u32) -> GridDims {
        GridDims::new(m, n).unwrap()
    }

    #[test]
    fn element_counts() {
        let e = build_elements(dims(2, 2)).unwrap();
        assert_eq!((e.p.len(), e.hp.len(), e.vp.len()), (9, 6, 6));
        assert_eq!((e.c.len(), e.hc.len(), e.vc.len()), (4, 2, 2));
        assert_eq!(e.p.last(), Some(&Element::p(3, 3)));
        assert_eq!(e.vc, vec![Element::vc(1, 1), Element::vc(1, 2)]);

        let e = build_elements(dims(1, 1)).unwrap();
        assert_eq!(
            (e.p.len(), e.ep().len(), e.c.len(), e.ec().len()),
            (4, 4, 1, 0)
        );

        let e = build_elements(dims(1, 2)).unwrap();
        assert_eq!((e.hc.len(), e.vc.len()), (1, 0));
    }

    #[test]
    fn rejects_empty_grid() {
        assert!(GridDims::new(0, 3).is_err());
        assert!(build_elements(GridDims { m: 2, n: 0 }).is_err());
    }

    #[test]
    fn flatten_counts_match_formula() {
        for m in 1..5u32 {
            for n in 1..5u32 {
                let e = build_elements(dims(m, n)).unwrap();
                let expect = (m + 1) * (n + 1)
                    + (m + 1) * n
                    + m * (n + 1)
                    + m * n
                    + m * (n - 1)
                    + (m - 1) * n;
                assert_eq!(flatten(&e.as_structure()).len(), expect as usize);
                let u = Universe::new(dims(m, n));
                assert_eq!(u.len(), expect as usize);
                for (k, el) in u.elements().iter().enumerate() {
                    assert_eq!(u.index_of(*el), Some(k));
                }
            }
        }
    }

    #[test]
    fn relation_examples() {
        use RelationKind::*;
        assert!(relate_elements(H, Element::p(1, 1), Element::p(1, 2)));
        assert!(relate_elements(D, Element::hp(1, 1), Element::vp(1, 1)));
        assert!(!relate_elements(H, Element::p(1, 1), Element::c(1, 1)));
        let x = Structure::leaves([Element::c(1, 1), Element::c(2, 2)]);
        let y = Structure::leaves([Element::c(2, 2)]);
        assert!(relate(M, &x, &y));
    }

    #[test]
    fn order_examples() {
        let leaf = Structure::Leaf;
        assert_eq!(
            compare(&leaf(Element::p(1, 2)), &leaf(Element::p(2, 1))),
            Ordering::Less
        );
        assert_eq!(
            compare(&leaf(Element::c(3, 3)), &leaf(Element::hp(1, 1))),
            Ordering::Less
        );
        let a = Structure::leaves([Element::c(1, 1), Element::c(2, 3)]);
        let b = Structure::Seq(vec![Structure::leaves([Element::p(1, 1)])]);
        let c = Structure::leaves([Element::c(2, 1), Element::c(2, 3)]);
        assert_eq!(compare(&leaf(Element::hp(2, 1)), &a), Ordering::Less);
        assert_eq!(compare(&a, &b), Ordering::Less);
        assert_eq!(compare(&a, &c), Ordering::Less);
    }

    #[test]
    fn flatten_examples() {
        let s = Structure::Seq(vec![
            Structure::Seq(vec![Structure::Leaf(Element::p(1, 1))]),
            Structure::Leaf(Element::c(1, 2)),
        ]);
        assert_eq!(flatten(&s), vec![Element::p(1, 1), Element::c(1, 2)]);
        assert_eq!(
            flatten(&Structure::Leaf(Element::c(1, 1))),
            vec![Element::c(1, 1)]
        );
        let s = Structure::Seq(vec![
            Structure::leaves([Element::c(1, 1)]),
            Structure::leaves([Element::c(1, 1), Element::c(1, 2)]),
        ]);
        assert_eq!(flatten(&s), vec![Element::c(1, 1), Element::c(1, 2)]);
    }

    #[test]
    fn canonicalize_examples() {
        let s = canonicalize(vec![
            Structure::Leaf(Element::c(2, 1)),
            Structure::Leaf(Element::c(1, 1)),
        ]);
        assert_eq!(s, Structure::leaves([Element::c(1, 1), Element::c(2, 1)]));
        assert_eq!(canonicalize(s.members().to_vec()), s);
        let nested = canonicalize(vec![
            Structure::Seq(vec![
                Structure::Leaf(Element::c(2, 2)),
                Structure::Leaf(Element::c(1, 1)),
            ]),
            Structure::Leaf(Element::p(1, 1)),
        ]);
        assert_eq!(
            nested,
            Structure::Seq(vec![
                Structure::Leaf(Element::p(1, 1)),
                Structure::leaves([Element::c(1, 1), Element::c(2, 2)]),
            ])
        );
    }

    #[test]
    fn power_seq_examples() {
        let a = Structure::leaves([Element::c(1, 1), Element::c(1, 2)]);
        let ps = power_seq(&a, 1 << 20).unwrap();
        assert_eq!(
            ps,
            vec![
                Structure::Seq(vec![]),
                Structure::leaves([Element::c(1, 1)]),
                Structure::leaves([Element::c(1, 1), Element::c(1, 2)]),
                Structure::leaves([Element::c(1, 2)]),
            ]
        );
        assert_eq!(
            power_seq(&Structure::Seq(vec![]), 8).unwrap(),
            vec![Structure::Seq(vec![])]
        );
        let three = Structure::leaves([Element::c(1, 1), Element::c(1, 2), Element::c(1, 3)]);
        assert_eq!(power_seq(&three, 8).unwrap().len(), 8);
        assert!(power_seq(&three, 7).is_err());
    }

    #[test]
    fn element_ids_round_trip() {
        for s in [
            "p(1,1)", "c(3,2)", "hp(2,1)", "vp(1,4)", "hc(1,1)", "vc(2,3)",
        ] {
            assert_eq!(s.parse::<Element>().unwrap().to_string(), s);
        }
        assert!("q(1,1)".parse::<Element>().is_err());
        assert!("c(1, 1)".parse::<Element>().is_err());
        assert_eq!("3x4".parse::<GridDims>().unwrap(), GridDims { m: 3, n: 4 });
    }
}
