//! Classic-rule checkers for the corpus puzzles.
//!
//! These read a completed board as a player would see it (cell digits,
//! shading, drawn edges, rooms) and check the usual published rules with
//! plain grid code. They share nothing with the rule evaluator.

use std::collections::{BTreeSet, VecDeque};

use crate::board::CompletedBoard;
use crate::grid::{Element, ElementKind};
use crate::value::Value;

pub type Verdict = Result<(), String>;

type Cell = (usize, usize);

/// Cell grid of a board, 0-based.
struct Cells {
    m: usize,
    n: usize,
    v: Vec<Vec<Value>>,
}

impl Cells {
    fn of(b: &CompletedBoard) -> Cells {
        let (m, n) = (b.dims.m as usize, b.dims.n as usize);
        let v = (0..m)
            .map(|i| {
                (0..n)
                    .map(|j| b.value(Element::c(i as i32 + 1, j as i32 + 1)))
                    .collect()
            })
            .collect();
        Cells { m, n, v }
    }

    fn at(&self, (i, j): Cell) -> Value {
        self.v[i][j]
    }

    fn all(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.m).flat_map(move |i| (0..self.n).map(move |j| (i, j)))
    }

    fn around(&self, (i, j): Cell) -> Vec<Cell> {
        let mut out = Vec::with_capacity(4);
        if i > 0 {
            out.push((i - 1, j));
        }
        if i + 1 < self.m {
            out.push((i + 1, j));
        }
        if j > 0 {
            out.push((i, j - 1));
        }
        if j + 1 < self.n {
            out.push((i, j + 1));
        }
        out
    }

    /// Orthogonal components of the cells accepted by `keep`.
    fn components(&self, keep: impl Fn(Cell) -> bool) -> Vec<Vec<Cell>> {
        let mut seen = vec![vec![false; self.n]; self.m];
        let mut out = Vec::new();
        for s in self.all() {
            if seen[s.0][s.1] || !keep(s) {
                continue;
            }
            seen[s.0][s.1] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(c) = queue.pop_front() {
                for d in self.around(c) {
                    if !seen[d.0][d.1] && keep(d) {
                        seen[d.0][d.1] = true;
                        comp.push(d);
                        queue.push_back(d);
                    }
                }
            }
            out.push(comp);
        }
        out
    }
}

fn is_rect(cells: &[Cell]) -> bool {
    let Some(i0) = cells.iter().map(|c| c.0).min() else {
        return false;
    };
    let i1 = cells.iter().map(|c| c.0).max().unwrap();
    let j0 = cells.iter().map(|c| c.1).min().unwrap();
    let j1 = cells.iter().map(|c| c.1).max().unwrap();
    (i1 - i0 + 1) * (j1 - j0 + 1) == cells.len()
}

/// Rooms of a family as cell lists with their labels. Fails unless they
/// tile the grid exactly.
fn rooms(b: &CompletedBoard, g: &Cells, family: &str) -> Result<Vec<(Vec<Cell>, Value)>, String> {
    let mut owner = vec![vec![None; g.n]; g.m];
    let labels = b.instance_values.get(family).cloned().unwrap_or_default();
    let mut out = Vec::new();
    for (k, els) in b.instances(family).into_iter().enumerate() {
        let mut cells = Vec::new();
        for e in els {
            if e.kind != ElementKind::Cell {
                return Err(format!("{family} room holds non-cell {e}"));
            }
            let c = ((e.i - 1) as usize, (e.j - 1) as usize);
            if owner[c.0][c.1].replace(k).is_some() {
                return Err(format!("{e} lies in two {family} rooms"));
            }
            cells.push(c);
        }
        out.push((cells, labels.get(k).copied().unwrap_or(Value::Null)));
    }
    if let Some(c) = g.all().find(|c| owner[c.0][c.1].is_none()) {
        return Err(format!("c({},{}) is in no {family} room", c.0 + 1, c.1 + 1));
    }
    Ok(out)
}

fn cell_name((i, j): Cell) -> String {
    format!("c({},{})", i + 1, j + 1)
}

fn int(v: Value) -> Option<i64> {
    v.as_int()
}

/// Every row and column holds each of 1..=n once.
fn latin(g: &Cells) -> Verdict {
    let n = g.n as i64;
    let want: BTreeSet<i64> = (1..=n).collect();
    for i in 0..g.m {
        let row: BTreeSet<i64> = (0..g.n).filter_map(|j| int(g.v[i][j])).collect();
        if row != want || (0..g.n).any(|j| int(g.v[i][j]).is_none()) {
            return Err(format!("row {} is not a permutation of 1..{n}", i + 1));
        }
    }
    for j in 0..g.n {
        let col: BTreeSet<i64> = (0..g.m).filter_map(|i| int(g.v[i][j])).collect();
        if col != want {
            return Err(format!("column {} is not a permutation of 1..{n}", j + 1));
        }
    }
    Ok(())
}

pub fn slitherlink(b: &CompletedBoard) -> Verdict {
    let (m, n) = (b.dims.m as i32, b.dims.n as i32);
    let on = |e: Element| match b.value(e) {
        Value::Int(1) => Ok(true),
        Value::Int(0) => Ok(false),
        other => Err(format!("edge {e} has value {other}")),
    };
    // Points are numbered (i, j), 1-based, (m+1) x (n+1).
    let pid = |i: i32, j: i32| ((i - 1) * (n + 1) + (j - 1)) as usize;
    let np = ((m + 1) * (n + 1)) as usize;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); np];
    let mut edges = 0;
    for i in 1..=m + 1 {
        for j in 1..=n {
            if on(Element::hp(i, j))? {
                adj[pid(i, j)].push(pid(i, j + 1));
                adj[pid(i, j + 1)].push(pid(i, j));
                edges += 1;
            }
        }
    }
    for i in 1..=m {
        for j in 1..=n + 1 {
            if on(Element::vp(i, j))? {
                adj[pid(i, j)].push(pid(i + 1, j));
                adj[pid(i + 1, j)].push(pid(i, j));
                edges += 1;
            }
        }
    }
    if edges == 0 {
        return Err("no loop drawn".into());
    }
    if let Some(p) = (0..np).find(|&p| !matches!(adj[p].len(), 0 | 2)) {
        return Err(format!("point {} has degree {}", p, adj[p].len()));
    }
    // One loop: every used point is reachable from the first one.
    let start = (0..np).find(|&p| !adj[p].is_empty()).unwrap();
    let mut seen = vec![false; np];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(p) = stack.pop() {
        for &q in &adj[p] {
            if !seen[q] {
                seen[q] = true;
                stack.push(q);
            }
        }
    }
    if (0..np).any(|p| !adj[p].is_empty() && !seen[p]) {
        return Err("edges form more than one loop".into());
    }
    for i in 1..=m {
        for j in 1..=n {
            let around = [
                Element::hp(i, j),
                Element::hp(i + 1, j),
                Element::vp(i, j),
                Element::vp(i, j + 1),
            ];
            let mut k = 0;
            for e in around {
                k += i64::from(on(e)?);
            }
            match b.value(Element::c(i, j)) {
                Value::Int(v) if v == k => {}
                Value::Null | Value::Undecided => {}
                other => {
                    return Err(format!(
                        "c({i},{j}) shows {other} but touches {k} loop edges"
                    ))
                }
            }
        }
    }
    Ok(())
}

pub fn sudoku(b: &CompletedBoard) -> Verdict {
    let g = Cells::of(b);
    let k = (1..=g.n)
        .find(|k| k * k == g.n)
        .ok_or("side is not a square number")?;
    if g.m != g.n {
        return Err("grid is not square".into());
    }
    latin(&g)?;
    for bi in 0..k {
        for bj in 0..k {
            let boxed: BTreeSet<i64> = (0..k)
                .flat_map(|di| (0..k).map(move |dj| (bi * k + di, bj * k + dj)))
                .filter_map(|c| int(g.at(c)))
                .collect();
            if boxed.len() != g.n {
                return Err(format!("box ({}, {}) repeats a digit", bi + 1, bj + 1));
            }
        }
    }
    Ok(())
}

pub fn shikaku(b: &CompletedBoard) -> Verdict {
    let g = Cells::of(b);
    for (cells, v) in rooms(b, &g, "A")? {
        if !is_rect(&cells) {
            return Err(format!(
                "area at {} is not a rectangle",
                cell_name(cells[0])
            ));
        }
        if int(v) != Some(cells.len() as i64) {
            return Err(format!(
                "area at {} is labelled {v} but has {} cells",
                cell_name(cells[0]),
                cells.len()
            ));
        }
    }
    Ok(())
}

pub fn choco_banana(b: &CompletedBoard) -> Verdict {
    let g = Cells::of(b);
    let mut shaded = vec![vec![None; g.n]; g.m];
    let mut labelled = Vec::new();
    for (fam, dark) in [("A1", false), ("A2", true)] {
        let list = b.instances(fam);
        let vals = b.instance_values.get(fam).cloned().unwrap_or_default();
        for (els, v) in list.into_iter().zip(vals) {
            let cells: Vec<Cell> = els
                .iter()
                .map(|e| ((e.i - 1) as usize, (e.j - 1) as usize))
                .collect();
            for &(i, j) in &cells {
                if shaded[i][j].replace(dark).is_some() {
                    return Err(format!("{} is covered twice", cell_name((i, j))));
                }
            }
            labelled.push((cells, v));
        }
    }
    let colour = |c: Cell| shaded[c.0][c.1];
    if let Some(c) = g.all().find(|&c| colour(c).is_none()) {
        return Err(format!("{} has no colour", cell_name(c)));
    }
    let dark = g.components(|c| colour(c) == Some(true));
    let light = g.components(|c| colour(c) == Some(false));
    for comp in &dark {
        if !is_rect(comp) {
            return Err(format!(
                "shaded area at {} is not a rectangle",
                cell_name(comp[0])
            ));
        }
    }
    for comp in &light {
        if is_rect(comp) {
            return Err(format!(
                "unshaded area at {} is a rectangle",
                cell_name(comp[0])
            ));
        }
    }
    // Each number gives the size of the colour area it sits in.
    for (cells, v) in labelled {
        let area = dark
            .iter()
            .chain(&light)
            .find(|comp| comp.contains(&cells[0]))
            .map_or(0, Vec::len);
        if int(v) != Some(area as i64) {
            return Err(format!(
                "number {v} at {} but its area has {area} cells",
                cell_name(cells[0])
            ));
        }
    }
    Ok(())
}

pub fn inshi_no_heya(b: &CompletedBoard) -> Verdict {
    let g = Cells::of(b);
    if g.m != g.n {
        return Err("grid is not square".into());
    }
    latin(&g)?;
    for (cells, v) in rooms(b, &g, "A")? {
        if !is_rect(&cells) {
            return Err(format!(
                "room at {} is not a rectangle",
                cell_name(cells[0])
            ));
        }
        let product: i64 = cells.iter().map(|&c| int(g.at(c)).unwrap_or(0)).product();
        if int(v) != Some(product) {
            return Err(format!(
                "room at {} shows {v} but its digits multiply to {product}",
                cell_name(cells[0])
            ));
        }
    }
    Ok(())
}

pub fn fillomino(b: &CompletedBoard) -> Verdict {
    let g = Cells::of(b);
    if let Some(c) = g.all().find(|&c| int(g.at(c)).is_none()) {
        return Err(format!("{} holds no number", cell_name(c)));
    }
    // Blocks of equal numbers; a block of size k must be numbered k. Two
    // touching blocks of the same size would merge and fail this.
    let values: BTreeSet<Value> = g.all().map(|c| g.at(c)).collect();
    for v in values {
        for comp in g.components(|c| g.at(c) == v) {
            if int(v) != Some(comp.len() as i64) {
                return Err(format!(
                    "block of {v}s at {} has {} cells",
                    cell_name(comp[0]),
                    comp.len()
                ));
            }
        }
    }
    Ok(())
}

fn kurotto_with(b: &CompletedBoard, per_neighbour: bool) -> Verdict {
    let g = Cells::of(b);
    let black = |c: Cell| g.at(c) == Value::Mark;
    let blocks = g.components(black);
    let block_of = |c: Cell| blocks.iter().position(|blk| blk.contains(&c));
    for c in g.all() {
        let Value::Int(want) = g.at(c) else { continue };
        let touching: Vec<usize> = g.around(c).into_iter().filter_map(block_of).collect();
        let got: usize = if per_neighbour {
            touching.iter().map(|&k| blocks[k].len()).sum()
        } else {
            touching
                .iter()
                .copied()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .map(|k| blocks[k].len())
                .sum()
        };
        if got as i64 != want {
            return Err(format!(
                "{} shows {want} but sees {got} shaded cells",
                cell_name(c)
            ));
        }
    }
    Ok(())
}

pub fn kurotto(b: &CompletedBoard) -> Verdict {
    kurotto_with(b, false)
}

/// Kurotto where a block is counted once per neighbouring cell.
pub fn kurotto_literal(b: &CompletedBoard) -> Verdict {
    kurotto_with(b, true)
}

pub fn sukoro(b: &CompletedBoard) -> Verdict {
    let g = Cells::of(b);
    let numbered = |c: Cell| int(g.at(c)).is_some();
    for c in g.all() {
        match g.at(c) {
            Value::Null => continue,
            Value::Int(v) if (1..=4).contains(&v) => {
                let around = g.around(c);
                let k = around.iter().filter(|&&d| numbered(d)).count() as i64;
                if k != v {
                    return Err(format!(
                        "{} shows {v} but has {k} numbered neighbours",
                        cell_name(c)
                    ));
                }
                if around.iter().any(|&d| g.at(d) == Value::Int(v)) {
                    return Err(format!("{} touches an equal number", cell_name(c)));
                }
            }
            other => return Err(format!("{} holds {other}", cell_name(c))),
        }
    }
    match g.components(numbered).len() {
        1 => Ok(()),
        0 => Err("no numbers placed".into()),
        k => Err(format!("numbers form {k} separate groups")),
    }
}

pub fn norinori(b: &CompletedBoard) -> Verdict {
    let g = Cells::of(b);
    let black = |c: Cell| g.at(c) == Value::Mark;
    if let Some(c) = g
        .all()
        .find(|&c| !matches!(g.at(c), Value::Mark | Value::Null))
    {
        return Err(format!("{} holds {}", cell_name(c), g.at(c)));
    }
    for (cells, _) in rooms(b, &g, "A2")? {
        let k = cells.iter().filter(|&&c| black(c)).count();
        if k != 2 {
            return Err(format!(
                "room at {} has {k} shaded cells",
                cell_name(cells[0])
            ));
        }
    }
    for blk in g.components(black) {
        if blk.len() != 2 {
            return Err(format!(
                "shaded block at {} has {} cells",
                cell_name(blk[0]),
                blk.len()
            ));
        }
    }
    Ok(())
}

pub fn hitori(b: &CompletedBoard) -> Verdict {
    let g = Cells::of(b);
    let black = |c: Cell| g.at(c) == Value::Mark;
    for c in g.all() {
        match g.at(c) {
            Value::Mark => {
                if g.around(c).into_iter().any(black) {
                    return Err(format!("shaded cells touch at {}", cell_name(c)));
                }
            }
            Value::Int(v) if v >= 1 && v as usize <= g.n => {}
            other => return Err(format!("{} holds {other}", cell_name(c))),
        }
    }
    let lines = (0..g.m)
        .map(|i| (0..g.n).map(|j| (i, j)).collect::<Vec<_>>())
        .chain((0..g.n).map(|j| (0..g.m).map(|i| (i, j)).collect()));
    for line in lines {
        let mut seen = BTreeSet::new();
        for c in line {
            if let Value::Int(v) = g.at(c) {
                if !seen.insert(v) {
                    return Err(format!("{v} repeats in the line through {}", cell_name(c)));
                }
            }
        }
    }
    match g.components(|c| !black(c)).len() {
        1 => Ok(()),
        k => Err(format!("unshaded cells form {k} areas")),
    }
}
