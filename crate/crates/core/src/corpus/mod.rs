//! The shipped puzzle rules, each paired with a hand-written checker of
//! the classic rules and a list of grid sizes it is exercised at.

pub mod oracle;

use crate::board::CompletedBoard;
use crate::dsl::{parse_rule, Rule};
use crate::grid::GridDims;
use crate::solver::Solver;
use crate::Error;
pub use oracle::Verdict;

pub struct CorpusEntry {
    /// File stem under `corpus/`.
    pub name: &'static str,
    pub title: &'static str,
    pub source: &'static str,
    pub notes: &'static str,
    pub oracle: fn(&CompletedBoard) -> Verdict,
    /// Sizes the entry is exercised at, smallest first.
    pub desk: &'static [GridDims],
    /// Part of the ten-puzzle table; the literal Kurotto variant is not.
    pub primary: bool,
}

impl CorpusEntry {
    pub fn rule(&self) -> Rule {
        parse_rule(self.source).expect("shipped rule parses")
    }

    pub fn validate(&self, board: &CompletedBoard) -> Verdict {
        if board.dims.m == 0 || board.dims.n == 0 {
            return Err("empty grid".into());
        }
        (self.oracle)(board)
    }
}

impl std::fmt::Debug for CorpusEntry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CorpusEntry")
            .field("name", &self.name)
            .field("desk", &self.desk)
            .finish()
    }
}

const fn d(m: u32, n: u32) -> GridDims {
    GridDims { m, n }
}

macro_rules! entry {
    ($name:literal, $title:literal, $oracle:path, $desk:expr, $primary:expr) => {
        CorpusEntry {
            name: $name,
            title: $title,
            source: include_str!(concat!("../../../../corpus/", $name, ".rule")),
            notes: include_str!(concat!("../../../../corpus/", $name, ".notes.md")),
            oracle: $oracle,
            desk: $desk,
            primary: $primary,
        }
    };
}

static ENTRIES: [CorpusEntry; 11] = [
    entry!(
        "choco_banana",
        "Choco Banana",
        oracle::choco_banana,
        &[d(3, 3), d(4, 4)],
        true
    ),
    entry!(
        "kurotto",
        "Kurotto",
        oracle::kurotto,
        &[d(3, 3), d(4, 4)],
        true
    ),
    entry!(
        "fillomino",
        "Fillomino",
        oracle::fillomino,
        &[d(3, 3), d(4, 4)],
        true
    ),
    entry!(
        "inshi_no_heya",
        "Inshi no heya",
        oracle::inshi_no_heya,
        &[d(3, 3), d(4, 4)],
        true
    ),
    entry!(
        "hitori",
        "Hitori",
        oracle::hitori,
        &[d(3, 3), d(4, 4)],
        true
    ),
    entry!("sudoku", "Sudoku", oracle::sudoku, &[d(4, 4)], true),
    entry!(
        "sukoro",
        "Sukoro",
        oracle::sukoro,
        &[d(3, 3), d(4, 4)],
        true
    ),
    entry!("norinori", "Norinori", oracle::norinori, &[d(4, 4)], true),
    entry!(
        "shikaku",
        "Shikaku",
        oracle::shikaku,
        &[d(3, 3), d(4, 4)],
        true
    ),
    entry!(
        "slitherlink",
        "Slitherlink",
        oracle::slitherlink,
        &[d(2, 2), d(3, 3)],
        true
    ),
    entry!(
        "kurotto-literal",
        "Kurotto (per-neighbour count)",
        oracle::kurotto_literal,
        &[d(3, 3), d(4, 4)],
        false
    ),
];

pub fn entries() -> &'static [CorpusEntry] {
    &ENTRIES
}

/// Looks an entry up by file stem or title, ignoring case, spaces,
/// hyphens and underscores.
pub fn entry(name: &str) -> Option<&'static CorpusEntry> {
    let key = |s: &str| {
        s.chars()
            .filter(|c| c.is_alphanumeric())
            .collect::<String>()
            .to_lowercase()
    };
    let want = key(name);
    ENTRIES
        .iter()
        .find(|e| key(e.name) == want || key(e.title) == want)
}

/// Whether `board` obeys the classic rules of the named puzzle.
pub fn oracle_validate(name: &str, board: &CompletedBoard) -> Result<bool, Error> {
    let e = entry(name).ok_or_else(|| Error::UnknownPuzzle(name.to_string()))?;
    Ok(e.validate(board).is_ok())
}

/// Outcome of generating boards for an entry and checking each one.
#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub dims: GridDims,
    pub boards: Vec<(CompletedBoard, Verdict)>,
    /// Generation stopped before reaching the requested count.
    pub partial: bool,
    pub nodes: u64,
}

impl VerifyReport {
    pub fn passed(&self) -> usize {
        self.boards.iter().filter(|(_, v)| v.is_ok()).count()
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.boards.len()
    }
}

/// Generates up to `count` completed boards and checks each one against
/// the entry's classic-rule checker.
pub fn verify(
    entry: &CorpusEntry,
    dims: GridDims,
    seed: u64,
    count: usize,
    budget: u64,
) -> Result<VerifyReport, Error> {
    let solver = Solver::from_rule(&entry.rule(), dims)?;
    let found = solver.generate(seed, count, budget)?;
    let boards = found
        .boards
        .into_iter()
        .map(|b| {
            let v = entry.validate(&b);
            (b, v)
        })
        .collect();
    Ok(VerifyReport {
        dims,
        boards,
        partial: found.partial,
        nodes: found.nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_by_title_or_stem() {
        assert_eq!(entry("Inshi no heya").unwrap().name, "inshi_no_heya");
        assert_eq!(entry("choco-banana").unwrap().name, "choco_banana");
        assert_eq!(entry("SUDOKU").unwrap().name, "sudoku");
        assert!(entry("nurikabe").is_none());
        assert_eq!(entries().iter().filter(|e| e.primary).count(), 10);
    }

    #[test]
    fn every_rule_parses() {
        for e in entries() {
            let r = e.rule();
            assert_eq!(r.name, e.name);
        }
    }
}
