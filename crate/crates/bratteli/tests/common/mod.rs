#![allow(dead_code)]

use bratteli::{BratteliDiagram, DiagramOrder, IncidenceMatrix};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A diagram with the given vertex counts at levels `1..`, entries in `0..=max`,
/// patched so that no row or column is zero.
pub fn random_diagram(counts: &[usize], max: u64, seed: u64) -> BratteliDiagram {
    let mut r = rng(seed);
    let mut matrices = Vec::new();
    let mut prev = 1;
    for &k in counts {
        let mut rows: Vec<Vec<u64>> = (0..k).map(|_| (0..prev).map(|_| r.gen_range(0..=max)).collect()).collect();
        for row in rows.iter_mut() {
            if row.iter().all(|&x| x == 0) {
                let c = r.gen_range(0..prev);
                row[c] = 1;
            }
        }
        for c in 0..prev {
            if rows.iter().all(|row| row[c] == 0) {
                let i = r.gen_range(0..k);
                rows[i][c] = 1;
            }
        }
        matrices.push(IncidenceMatrix::from_rows(rows).unwrap());
        prev = k;
    }
    BratteliDiagram::from_matrices(matrices).unwrap()
}

pub fn shuffled_row(row: &[u64], r: &mut ChaCha8Rng) -> Vec<usize> {
    let mut w: Vec<usize> = row.iter().enumerate().flat_map(|(x, &c)| std::iter::repeat(x).take(c as usize)).collect();
    w.shuffle(r);
    w
}

pub fn random_order(b: &BratteliDiagram, seed: u64) -> DiagramOrder {
    let mut r = rng(seed);
    let words: Vec<Vec<Vec<usize>>> = (1..=b.depth())
        .map(|n| {
            let f = b.incidence_matrix(n - 1).unwrap();
            (0..f.rows()).map(|v| shuffled_row(f.row(v), &mut r)).collect()
        })
        .collect();
    DiagramOrder::from_source_words(b, &words).unwrap()
}

pub fn is_primitive(f: &IncidenceMatrix) -> bool {
    let d = f.rows();
    let mut p = f.clone();
    for _ in 0..(d - 1) * (d - 1) + 1 {
        if p.is_positive() {
            return true;
        }
        p = f.checked_mul(&p).unwrap();
    }
    p.is_positive()
}

/// A primitive `d x d` block with entries in `0..=max` and at most `max_row`
/// edges into each vertex.
pub fn random_primitive(d: usize, max: u64, max_row: u64, seed: u64) -> IncidenceMatrix {
    let mut r = rng(seed);
    loop {
        let rows: Vec<Vec<u64>> = (0..d).map(|_| (0..d).map(|_| r.gen_range(0..=max)).collect()).collect();
        if rows.iter().any(|row| row.iter().sum::<u64>() > max_row) {
            continue;
        }
        let f = IncidenceMatrix::from_rows(rows).unwrap();
        if is_primitive(&f) {
            return f;
        }
    }
}

pub fn random_stationary_block(f: &IncidenceMatrix, seed: u64) -> Vec<Vec<usize>> {
    let mut r = rng(seed);
    (0..f.rows()).map(|v| shuffled_row(f.row(v), &mut r)).collect()
}
