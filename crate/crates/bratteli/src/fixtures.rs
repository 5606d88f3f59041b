//! Worked examples as ready-made values. The JSON files under `fixtures/`
//! are generated from these builders.

use std::collections::{BTreeMap, BTreeSet};

use crate::diagram::{BratteliDiagram, Count, IncidenceMatrix};
use crate::io::{BundleFile, DecompositionFile, DiagramFile, OrderFile, SkeletonFile, FORMAT_VERSION};
use crate::ordering::DiagramOrder;
use crate::skeleton::{Correspondence, Skeleton};
use crate::synth::{solve_decomposition, BalanceDecomposition};

/// A diagram with a skeleton and a correspondence on it.
#[derive(Clone, Debug)]
pub struct SkeletonFixture {
    pub diagram: BratteliDiagram,
    pub skeleton: Skeleton,
    pub sigma: Correspondence,
}

fn mat(rows: &[&[Count]]) -> IncidenceMatrix {
    IncidenceMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
}

const ABCD: [&str; 4] = ["a", "b", "c", "d"];

pub fn four_by_four() -> IncidenceMatrix {
    mat(&[&[2, 1, 1, 1], &[1, 2, 1, 1], &[1, 1, 2, 1], &[1, 1, 1, 2]])
}

/// The stationary diagram with the 4x4 matrix having 2 on the diagonal.
pub fn example_2_6_diagram(depth: usize) -> BratteliDiagram {
    BratteliDiagram::stationary(four_by_four(), depth)
        .unwrap()
        .with_uniform_labels(&ABCD)
        .unwrap()
}

/// Source words of the order on the squared diagram.
pub fn example_2_6_words() -> Vec<Vec<usize>> {
    let parse = |s: &str| s.bytes().map(|c| (c - b'a') as usize).collect::<Vec<_>>();
    vec![
        parse(&("adbc".repeat(6) + "a")),
        parse(&("bcad".repeat(6) + "b")),
        parse(&("cadb".repeat(6) + "c")),
        parse(&("bca".to_string() + &"d".repeat(7) + &"bca".repeat(5))),
    ]
}

/// Diagram with block `F^2` carrying the stationary order above.
pub fn example_2_6_telescoped(depth: usize) -> (BratteliDiagram, DiagramOrder) {
    let f2 = four_by_four().checked_mul(&four_by_four()).unwrap();
    let b = BratteliDiagram::stationary(f2, depth)
        .unwrap()
        .with_uniform_labels(&ABCD)
        .unwrap();
    let omega = DiagramOrder::stationary(&b, &example_2_6_words()).unwrap();
    (b, omega)
}

fn point(pairs: &[(usize, usize)]) -> BTreeMap<usize, BTreeSet<usize>> {
    pairs.iter().map(|&(a, b)| (a, [b].into_iter().collect())).collect()
}

/// Skeleton with `s(ẽ) = (a,b,c,a)`, `s(ē) = (a,b,c,b)` and the cyclic
/// correspondence on the unsquared diagram.
pub fn example_4_4(depth: usize) -> SkeletonFixture {
    let diagram = example_2_6_diagram(depth);
    let skeleton = Skeleton::stationary(&diagram, &[0, 1, 2, 0], &[0, 1, 2, 1]).unwrap();
    let sigma = Correspondence::stationary(&point(&[(0, 1), (1, 2), (2, 0)]), depth);
    SkeletonFixture { diagram, skeleton, sigma }
}

/// The same skeleton and correspondence on the squared diagram.
pub fn example_2_6_skeleton(depth: usize) -> SkeletonFixture {
    let (diagram, _) = example_2_6_telescoped(depth);
    let skeleton = Skeleton::stationary(&diagram, &[0, 1, 2, 0], &[0, 1, 2, 1]).unwrap();
    let sigma = Correspondence::stationary(&point(&[(0, 1), (1, 2), (2, 0)]), depth);
    SkeletonFixture { diagram, skeleton, sigma }
}

/// Two maximal vertices, cells `a∈[a,a]`, `b∈[b,b]`, `c∈[a,b]`, `d∈[b,a]`,
/// identity correspondence.
pub fn example_5_2(depth: usize) -> SkeletonFixture {
    let diagram = example_2_6_diagram(depth);
    let skeleton = Skeleton::stationary(&diagram, &[0, 1, 1, 0], &[0, 1, 0, 1]).unwrap();
    let sigma = Correspondence::stationary(&point(&[(0, 0), (1, 1)]), depth);
    SkeletonFixture { diagram, skeleton, sigma }
}

/// The second graph on the same diagram: swapped correspondence.
pub fn example_5_3(depth: usize) -> SkeletonFixture {
    let diagram = example_2_6_diagram(depth);
    let skeleton = Skeleton::stationary(&diagram, &[0, 1, 0, 1], &[0, 1, 1, 0]).unwrap();
    let sigma = Correspondence::stationary(&point(&[(0, 1), (1, 0)]), depth);
    SkeletonFixture { diagram, skeleton, sigma }
}

/// Rows of the 4x4 family that keeps `(0,0,-1,1)` fixed.
pub fn example_5_2_family(
    free: [[Count; 2]; 4],
    alpha: Count,
    beta: Count,
    gamma: Count,
    delta: Count,
) -> IncidenceMatrix {
    mat(&[
        &[free[0][0], free[0][1], alpha, alpha],
        &[free[1][0], free[1][1], beta, beta],
        &[free[2][0], free[2][1], gamma + 1, gamma],
        &[free[3][0], free[3][1], delta, delta + 1],
    ])
}

fn growing_matrix(n: usize) -> IncidenceMatrix {
    // F_n : V_n -> V_{n+1}, |V_n| = n
    match n {
        0 => mat(&[&[1]]),
        1 => mat(&[&[2], &[2]]),
        _ => {
            let mut rows = Vec::with_capacity(n + 1);
            for i in 0..n - 1 {
                let mut r: Vec<Count> = (0..n - 1).map(|j| if i == j { 2 } else { 1 }).collect();
                r.push(1);
                rows.push(r);
            }
            let mut r = vec![1; n];
            r[n - 1] = 2;
            rows.push(r);
            rows.push(vec![1; n]);
            IncidenceMatrix::from_rows(rows).unwrap()
        }
    }
}

/// Growing diagram `V_n = {v_1..v_n}` with `s(ẽ_{v_i}) = v_i`,
/// `s(ẽ_{v_{n+1}}) = v_n`, `s(ē_{v_{n+1}}) = v_1` and the shift correspondence.
pub fn growing_example(depth: usize) -> SkeletonFixture {
    let diagram = BratteliDiagram::from_matrices((0..depth).map(growing_matrix).collect()).unwrap();
    let mut max_s = Vec::new();
    let mut min_s = Vec::new();
    let mut maxv = Vec::new();
    for n in 1..=depth {
        if n == 1 {
            max_s.push(vec![0]);
            min_s.push(vec![0]);
        } else {
            let prev = n - 1;
            let mut t: Vec<usize> = (0..prev).collect();
            t.push(prev - 1);
            let mut m: Vec<usize> = (0..prev).collect();
            m.push(0);
            max_s.push(t);
            min_s.push(m);
        }
        maxv.push((0..n).collect::<BTreeSet<usize>>());
    }
    let skeleton = Skeleton::from_sources(&diagram, &max_s, &min_s, &maxv, &maxv).unwrap();
    let mut levels = vec![BTreeMap::new()];
    for n in 1..=depth {
        let pairs: Vec<(usize, usize)> = (0..n).map(|i| (i, if i + 1 < n { i + 1 } else { 0 })).collect();
        levels.push(point(&pairs));
    }
    SkeletonFixture { diagram, skeleton, sigma: Correspondence::new(levels) }
}

/// Growing diagram whose correspondence sends `v_1` to `{v_2, v_3}` at every
/// level. All entries are 2 except the row `(4,2,2,3)` of `v_1` in `F_4`.
pub fn set_valued_example(depth: usize) -> SkeletonFixture {
    let matrices: Vec<IncidenceMatrix> = (0..depth)
        .map(|n| {
            if n == 0 {
                mat(&[&[1]])
            } else {
                let mut rows = vec![vec![2; n]; n + 1];
                if n == 4 {
                    rows[0] = vec![4, 2, 2, 3];
                }
                IncidenceMatrix::from_rows(rows).unwrap()
            }
        })
        .collect();
    let diagram = BratteliDiagram::from_matrices(matrices).unwrap();
    let mut max_s = Vec::new();
    let mut min_s = Vec::new();
    let mut maxv = Vec::new();
    for n in 1..=depth {
        let t: Vec<usize> = (0..n).map(|i| i.saturating_sub(1)).collect();
        let m: Vec<usize> = (0..n).map(|i| if i == 1 && n >= 3 { 1 } else { i.saturating_sub(1) }).collect();
        max_s.push(t);
        min_s.push(m);
        maxv.push((0..n).collect::<BTreeSet<usize>>());
    }
    let skeleton = Skeleton::from_sources(&diagram, &max_s, &min_s, &maxv, &maxv).unwrap();
    let mut levels = vec![BTreeMap::new()];
    for n in 1..=depth {
        let mut map: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for i in 0..n {
            let img: BTreeSet<usize> = if n == 1 {
                [0].into()
            } else if i == 0 {
                [1, 2].into_iter().filter(|&x| x < n).collect()
            } else if i + 1 < n {
                [i + 1].into()
            } else {
                [0].into()
            };
            map.insert(i, img);
        }
        levels.push(map);
    }
    SkeletonFixture { diagram, skeleton, sigma: Correspondence::new(levels) }
}

/// Decomposition used for the target `v_1` in `V_5`: `(w, v̄, amount)`.
pub fn set_valued_decomposition() -> Vec<(usize, usize, Count)> {
    vec![(0, 1, 2), (0, 2, 1), (1, 1, 2), (1, 2, 0), (2, 2, 2), (3, 0, 3)]
}

/// Class-A block with three minimal components and a 2x2 remainder.
pub fn obstruction_k3(depth: usize) -> BratteliDiagram {
    let block = mat(&[
        &[2, 0, 0, 0, 0],
        &[0, 2, 0, 0, 0],
        &[0, 0, 2, 0, 0],
        &[1, 1, 1, 1, 1],
        &[1, 1, 1, 1, 1],
    ]);
    BratteliDiagram::stationary(block, depth).unwrap()
}

/// Two minimal components, remainder `C = (2)`.
pub fn obstruction_k2_c2(depth: usize) -> BratteliDiagram {
    BratteliDiagram::stationary(mat(&[&[2, 0, 0], &[0, 2, 0], &[1, 1, 2]]), depth).unwrap()
}

/// Two minimal components, remainder `C = (1)`.
pub fn obstruction_k2_c1(depth: usize) -> BratteliDiagram {
    BratteliDiagram::stationary(mat(&[&[2, 0, 0], &[0, 2, 0], &[1, 1, 1]]), depth).unwrap()
}

fn bundle(name: &str, description: &str, diagram: &BratteliDiagram) -> BundleFile {
    BundleFile {
        version: FORMAT_VERSION,
        name: name.into(),
        description: description.into(),
        diagram: DiagramFile::from_diagram(diagram),
        order: None,
        skeleton: None,
        decomposition: None,
    }
}

/// Every worked example as a JSON bundle, keyed by file stem.
pub fn bundles() -> Vec<BundleFile> {
    let mut out = Vec::new();

    let (b, omega) = example_2_6_telescoped(4);
    let fx = example_2_6_skeleton(4);
    let mut f = bundle("example_2_6", "squared 4x4 diagram with the stationary order of period adbc", &b);
    f.order = Some(OrderFile::from_order(&b, &omega));
    f.skeleton = Some(SkeletonFile::stationary(&b, &[0, 1, 2, 0], &[0, 1, 2, 1], &fx.sigma));
    out.push(f);

    let fx = example_4_4(4);
    let mut f = bundle("example_4_4", "4x4 diagram, cyclic correspondence, row d not positively strongly connected", &fx.diagram);
    f.skeleton = Some(SkeletonFile::stationary(&fx.diagram, &[0, 1, 2, 0], &[0, 1, 2, 1], &fx.sigma));
    out.push(f);

    let fx = growing_example(6);
    let mut f = bundle("example_3_6", "growing diagram with point-map correspondence", &fx.diagram);
    f.skeleton = Some(SkeletonFile::per_level(&fx.diagram, &fx.skeleton, &fx.sigma));
    out.push(f);

    let mut f = bundle("example_4_6", "growing diagram, target v2 at level 4 with row (1,2,1)", &fx.diagram);
    f.skeleton = Some(SkeletonFile::per_level(&fx.diagram, &fx.skeleton, &fx.sigma));
    let dec = solve_decomposition(&fx.diagram, &fx.skeleton, &fx.sigma, 3, 1).unwrap().unwrap();
    f.decomposition = Some(DecompositionFile::from_decomposition(&fx.diagram, &dec));
    out.push(f);

    let fx = set_valued_example(6);
    let mut f = bundle("example_3_8", "growing diagram with set-valued correspondence", &fx.diagram);
    f.skeleton = Some(SkeletonFile::per_level(&fx.diagram, &fx.skeleton, &fx.sigma));
    out.push(f);

    let mut f = bundle("example_4_8", "set-valued example, target v1 at level 5 with row (4,2,2,3)", &fx.diagram);
    f.skeleton = Some(SkeletonFile::per_level(&fx.diagram, &fx.skeleton, &fx.sigma));
    let dec = BalanceDecomposition::new(4, 0, &set_valued_decomposition());
    f.decomposition = Some(DecompositionFile::from_decomposition(&fx.diagram, &dec));
    out.push(f);

    let fx = example_5_2(4);
    let mut f = bundle("example_5_2", "two maximal vertices, identity correspondence", &fx.diagram);
    f.skeleton = Some(SkeletonFile::stationary(&fx.diagram, &[0, 1, 1, 0], &[0, 1, 0, 1], &fx.sigma));
    out.push(f);

    let fx = example_5_3(4);
    let mut f = bundle("example_5_3", "two maximal vertices, swapped correspondence", &fx.diagram);
    f.skeleton = Some(SkeletonFile::stationary(&fx.diagram, &[0, 1, 0, 1], &[0, 1, 1, 0], &fx.sigma));
    out.push(f);

    out.push(bundle("class_a_k3", "three minimal components and a 2x2 remainder", &obstruction_k3(6)));
    out.push(bundle("class_a_k2_c2", "two minimal components, remainder (2)", &obstruction_k2_c2(6)));
    out.push(bundle("class_a_k2_c1", "two minimal components, remainder (1)", &obstruction_k2_c1(6)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growing_rows() {
        let g = growing_example(5);
        assert_eq!(g.diagram.incidence_matrix(3).unwrap().row(1), &[1, 2, 1]);
        assert_eq!(g.diagram.vertex_counts(), &[1, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn set_valued_rows() {
        let g = set_valued_example(6);
        assert_eq!(g.diagram.incidence_matrix(4).unwrap().row(0), &[4, 2, 2, 3]);
        assert_eq!(g.sigma.sigma(2, 0), [1].into());
        assert_eq!(g.sigma.sigma(4, 0), [1, 2].into());
    }

    #[test]
    fn squared_block() {
        let (b, omega) = example_2_6_telescoped(3);
        assert_eq!(b.stationary_block().unwrap().row(0), &[7, 6, 6, 6]);
        assert_eq!(omega.source_word(2, 3).len(), 25);
    }
}
