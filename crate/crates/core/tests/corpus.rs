use std::collections::BTreeMap;

use pzl_core::board::{CompletedBoard, Given};
use pzl_core::corpus::{self, entries, verify, Verdict};
use pzl_core::dsl::static_check;
use pzl_core::grid::{Element, GridDims};
use pzl_core::solver::Solver;
use pzl_core::{Error, Value};

#[test]
fn only_documented_warnings() {
    for e in entries() {
        let codes: Vec<&str> = static_check(&e.rule())
            .iter()
            .map(|d| d.code.as_str())
            .collect();
        let expected: &[&str] = if e.name == "hitori" { &["W101"] } else { &[] };
        assert_eq!(codes, expected, "{}", e.name);
        assert!(e.notes.starts_with("# "), "{} notes", e.name);
    }
}

#[test]
fn every_completed_board_passes_on_small_grids() {
    for e in entries() {
        for (m, n) in [(2, 2), (2, 3), (3, 3)] {
            let solver = match Solver::from_rule(&e.rule(), GridDims { m, n }) {
                Ok(s) => s,
                Err(Error::Requirements(_)) => continue,
                Err(err) => panic!("{} {m}x{n}: {err}", e.name),
            };
            let all = solver
                .enumerate(&Given::default(), usize::MAX, 5_000_000)
                .unwrap()
                .boards;
            assert!(!all.is_empty(), "{} {m}x{n} has no boards", e.name);
            for b in &all {
                assert_eq!(e.validate(b), Ok(()), "{} {m}x{n}", e.name);
            }
        }
    }
}

#[test]
fn generated_boards_pass_at_desk_sizes() {
    for e in entries() {
        for &d in e.desk {
            let report = verify(e, d, 7, 5, 5_000_000).unwrap();
            assert_eq!(report.boards.len(), 5, "{} {d}", e.name);
            assert!(report.all_pass(), "{} {d}", e.name);
        }
    }
}

fn count(name: &str, m: u32, n: u32) -> usize {
    let e = corpus::entry(name).unwrap();
    let s = Solver::from_rule(&e.rule(), GridDims { m, n }).unwrap();
    s.count(&Given::default(), u64::MAX, 5_000_000).unwrap().0 as usize
}

/// Number of cell assignments over `alphabet` that `oracle` accepts.
fn brute_cells(
    m: u32,
    n: u32,
    alphabet: &[Value],
    oracle: fn(&CompletedBoard) -> Verdict,
) -> usize {
    let cells: Vec<Element> = (1..=m as i32)
        .flat_map(|i| (1..=n as i32).map(move |j| Element::c(i, j)))
        .collect();
    let mut digits = vec![0usize; cells.len()];
    let mut hits = 0;
    loop {
        let board = CompletedBoard {
            rule: "t".into(),
            dims: GridDims { m, n },
            families: BTreeMap::new(),
            elements: cells
                .iter()
                .zip(&digits)
                .map(|(c, &k)| (*c, alphabet[k]))
                .collect(),
            instance_values: BTreeMap::new(),
        };
        hits += usize::from(oracle(&board).is_ok());
        let mut k = 0;
        loop {
            if k == digits.len() {
                return hits;
            }
            digits[k] += 1;
            if digits[k] < alphabet.len() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
    }
}

fn ints(r: std::ops::RangeInclusive<i64>) -> Vec<Value> {
    r.map(Value::Int).collect()
}

#[test]
fn counts_agree_with_brute_force_over_cells() {
    use corpus::oracle;
    for (m, n) in [(2, 2), (2, 3)] {
        let size = i64::from(m * n);
        let mut kur = ints(0..=size - 1);
        kur.extend([Value::Null, Value::Mark]);
        assert_eq!(
            count("kurotto", m, n),
            brute_cells(m, n, &kur, oracle::kurotto),
            "kurotto {m}x{n}"
        );
        assert_eq!(
            count("kurotto-literal", m, n),
            brute_cells(m, n, &kur, oracle::kurotto_literal)
        );
        let mut suk = ints(1..=4);
        suk.push(Value::Null);
        assert_eq!(
            count("sukoro", m, n),
            brute_cells(m, n, &suk, oracle::sukoro),
            "sukoro {m}x{n}"
        );
        assert_eq!(
            count("fillomino", m, n),
            brute_cells(m, n, &ints(1..=size), oracle::fillomino)
        );
    }
    for k in [2, 3] {
        let mut hit = ints(1..=i64::from(k));
        hit.push(Value::Mark);
        assert_eq!(
            count("hitori", k, k),
            brute_cells(k, k, &hit, oracle::hitori),
            "hitori {k}x{k}"
        );
    }
}

#[test]
fn known_counts() {
    // Rectangle partitions of 2x2, 2x3 and 3x3 grids.
    assert_eq!(count("shikaku", 2, 2), 8);
    assert_eq!(count("shikaku", 2, 3), 34);
    assert_eq!(count("shikaku", 3, 3), 322);
    // Simple cycles in the point grids.
    assert_eq!(count("slitherlink", 2, 2), 13);
    assert_eq!(count("slitherlink", 3, 3), 213);
}

#[test]
fn unknown_puzzle_is_an_error() {
    let b = CompletedBoard {
        rule: "t".into(),
        dims: GridDims { m: 1, n: 1 },
        families: BTreeMap::new(),
        elements: BTreeMap::new(),
        instance_values: BTreeMap::new(),
    };
    assert!(matches!(
        corpus::oracle_validate("nurikabe", &b),
        Err(Error::UnknownPuzzle(_))
    ));
    assert!(!corpus::oracle_validate("sudoku", &b).unwrap());
}
