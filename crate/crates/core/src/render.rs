//! Plain-text drawing of a board. The glyph table is in `docs/render.md`.
//!
//! An m x n grid becomes 2m+1 lines of 2n+1 characters. Even lines hold
//! grid points (`+`) with horizontal point edges between them; odd lines
//! hold vertical point edges and cell glyphs.

use crate::board::{CompletedBoard, Problem};
use crate::grid::{Element, GridDims};
use crate::value::Value;

/// Glyph for a cell value.
pub fn cell_glyph(v: Value) -> char {
    match v {
        Value::Null | Value::Undecided => '.',
        Value::Mark => '#',
        Value::Int(k @ 0..=9) => (b'0' + k as u8) as char,
        Value::Int(k @ 10..=35) => (b'a' + (k - 10) as u8) as char,
        Value::Int(k @ 36..=61) => (b'A' + (k - 36) as u8) as char,
        Value::Int(_) => '*',
    }
}

/// Draws any assignment given as a lookup from element to value.
pub fn render_with(dims: GridDims, value: impl Fn(Element) -> Value) -> String {
    let (m, n) = (dims.m as i32, dims.n as i32);
    let drawn = |e: Element| value(e) == Value::Int(1);
    let mut out = String::with_capacity(((2 * n + 2) * (2 * m + 1)) as usize);
    for i in 1..=m + 1 {
        for j in 1..=n {
            out.push('+');
            out.push(if drawn(Element::hp(i, j)) { '-' } else { ' ' });
        }
        out.push('+');
        out.push('\n');
        if i > m {
            break;
        }
        for j in 1..=n + 1 {
            out.push(if drawn(Element::vp(i, j)) { '|' } else { ' ' });
            if j <= n {
                out.push(cell_glyph(value(Element::c(i, j))));
            }
        }
        out.push('\n');
    }
    out
}

pub fn render(board: &CompletedBoard) -> String {
    render_with(board.dims, |e| board.value(e))
}

/// Draws the presented values of a problem; hidden values show as `.`.
pub fn render_problem(problem: &Problem) -> String {
    render_with(problem.dims, |e| {
        problem
            .elements
            .get(&e)
            .copied()
            .unwrap_or(Value::Undecided)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn glyph_table() {
        assert_eq!(cell_glyph(Value::Null), '.');
        assert_eq!(cell_glyph(Value::Undecided), '.');
        assert_eq!(cell_glyph(Value::Mark), '#');
        assert_eq!(cell_glyph(Value::Int(7)), '7');
        assert_eq!(cell_glyph(Value::Int(10)), 'a');
        assert_eq!(cell_glyph(Value::Int(35)), 'z');
        assert_eq!(cell_glyph(Value::Int(36)), 'A');
        assert_eq!(cell_glyph(Value::Int(61)), 'Z');
        assert_eq!(cell_glyph(Value::Int(62)), '*');
        assert_eq!(cell_glyph(Value::Int(-1)), '*');
    }

    #[test]
    fn empty_assignment() {
        let s = render_with(GridDims { m: 2, n: 3 }, |_| Value::Null);
        assert_eq!(s, "+ + + +\n . . . \n+ + + +\n . . . \n+ + + +\n");
    }

    #[test]
    fn loop_around_top_left() {
        let drawn = [
            Element::hp(1, 1),
            Element::hp(2, 1),
            Element::vp(1, 1),
            Element::vp(1, 2),
        ];
        let cells = [
            (Element::c(1, 1), 4),
            (Element::c(1, 2), 1),
            (Element::c(2, 1), 1),
            (Element::c(2, 2), 0),
        ];
        let s = render_with(GridDims { m: 2, n: 2 }, |e| {
            if drawn.contains(&e) {
                Value::Int(1)
            } else if let Some((_, v)) = cells.iter().find(|(c, _)| *c == e) {
                Value::Int(*v)
            } else {
                Value::Int(0)
            }
        });
        assert_eq!(s, "+-+ +\n|4|1 \n+-+ +\n 1 0 \n+ + +\n");
        assert_eq!(s.chars().filter(|c| matches!(c, '-' | '|')).count(), 4);
    }
}
