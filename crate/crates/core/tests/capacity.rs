use std::f64::consts::PI;

use holocomp_core::capacity::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[path = "support/capacity_oracle.rs"]
mod capacity_oracle;

use capacity_oracle::{brute_force, cell_rects};

#[test]
fn small_instances_match_brute_force() {
    let m = 8;
    let op = KernelOperator::new(TorusGrid::new(m).unwrap(), KernelKind::Bessel).unwrap();
    let cases: Vec<Vec<(usize, usize)>> = vec![
        vec![(3, 4)],
        vec![(0, 0), (0, 1)],
        vec![(2, 2), (5, 6)],
        vec![(1, 1), (1, 2), (2, 1)],
        vec![(0, 7), (4, 3), (7, 0)],
    ];
    for cells in cases {
        let e = cell_rects(m, &cells);
        let flat: Vec<usize> = cells.iter().map(|&(i, j)| i * m + j).collect();
        assert_eq!(e.cells(op.grid()), {
            let mut f = flat.clone();
            f.sort();
            f
        });
        let oracle = brute_force(m, &flat);
        let r = capacity(&op, &e, SolverConfig::default()).unwrap();
        assert!((r.value - oracle).abs() <= 0.02 * oracle, "{cells:?}: {} vs {oracle}", r.value);
        assert!(r.value >= oracle * (1.0 - 1e-9), "feasible value below the optimum");
    }
}

fn random_rect(rng: &mut ChaCha8Rng) -> Rect {
    let a = [rng.random_range(-PI..PI), rng.random_range(-PI..PI)];
    let s = [rng.random_range(0.3..2.0), rng.random_range(0.3..2.0)];
    Rect::new(a, [a[0] + s[0], a[1] + s[1]]).unwrap()
}

#[test]
fn monotone_and_subadditive() {
    let op = KernelOperator::new(TorusGrid::new(32).unwrap(), KernelKind::Bessel).unwrap();
    let cfg = SolverConfig::default();
    let tol = 1e-4;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let outer = random_rect(&mut rng);
        let s = outer.sides();
        let inner = Rect::new(outer.a(), [outer.a()[0] + 0.6 * s[0], outer.a()[1] + 0.6 * s[1]]).unwrap();
        let ci = capacity(&op, &RectUnion(vec![inner]), cfg).unwrap().value;
        let co = capacity(&op, &RectUnion(vec![outer]), cfg).unwrap().value;
        assert!(ci <= co * (1.0 + tol), "monotonicity: {ci} > {co}");
        let e1 = RectUnion(vec![random_rect(&mut rng)]);
        let e2 = RectUnion(vec![random_rect(&mut rng)]);
        let c1 = capacity(&op, &e1, cfg).unwrap().value;
        let c2 = capacity(&op, &e2, cfg).unwrap().value;
        let cu = capacity(&op, &e1.union(&e2), cfg).unwrap().value;
        assert!(cu <= (c1 + c2) * (1.0 + 2.0 * tol), "subadditivity: {cu} > {c1} + {c2}");
    }
}

#[test]
fn rotation_invariance() {
    let g = TorusGrid::new(64).unwrap();
    let op = KernelOperator::new(g, KernelKind::Bessel).unwrap();
    let e = Rect::new([0.0, 0.0], [1.0, 0.7]).unwrap();
    let base_cells = RectUnion(vec![e]).cells(g).len();
    let base = capacity(&op, &RectUnion(vec![e]), SolverConfig::default()).unwrap().value;
    let h = g.side();
    // grid-aligned shifts move the discrete set rigidly
    for by in [[3.0 * h, -11.0 * h], [20.0 * h, 25.0 * h], [-31.0 * h, h]] {
        let c = capacity(&op, &RectUnion(vec![e.translated(by)]), SolverConfig::default()).unwrap().value;
        assert!((c - base).abs() < 1e-3 * base, "{by:?}: {c} vs {base}");
    }
    // other shifts agree whenever the discretisation keeps the cell count
    for by in [[0.03, -0.02], [2.0, 2.5], [-3.0, 0.05], [0.3, -1.1]] {
        let t = RectUnion(vec![e.translated(by)]);
        if t.cells(g).len() != base_cells {
            continue;
        }
        let c = capacity(&op, &t, SolverConfig::default()).unwrap().value;
        assert!((c - base).abs() < 0.01 * base, "{by:?}: {c} vs {base}");
    }
}

#[test]
fn refinement_trend() {
    let e = RectUnion(vec![Rect::new([0.0, 0.0], [PI / 2.0, PI / 2.0]).unwrap()]);
    let values: Vec<f64> = [32, 64, 128]
        .iter()
        .map(|&m| {
            let op = KernelOperator::new(TorusGrid::new(m).unwrap(), KernelKind::Bessel).unwrap();
            capacity(&op, &e, SolverConfig::default()).unwrap().value
        })
        .collect();
    assert!(values[1] >= values[0] * 0.95 && values[2] >= values[1] * 0.95, "{values:?}");
    assert!((values[2] - values[1]).abs() < 0.05 * values[1]);
}

#[test]
fn quarter_torus_kernel_ratio_fixture() {
    let e = RectUnion(vec![Rect::new([0.0, 0.0], [PI / 2.0, PI / 2.0]).unwrap()]);
    let r = capacity_vs_box_remark(&e, TorusGrid::new(32).unwrap(), 1.0, SolverConfig::default()).unwrap();
    assert!(r.bessel.value > 0.0 && r.log.value > 0.0);
    println!("quarter torus, M = 32: bessel {:.6e} log {:.6e} ratio {:.6}", r.bessel.value, r.log.value, r.ratio.unwrap());
}
