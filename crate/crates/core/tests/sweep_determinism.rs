use nasearch_core::analytic::alg_ii_limit_prob;
use nasearch_core::sweep::{
    grid_meta, ode_limit_prob, sweep_ab, sweep_ab_sequential, write_grid_json, GridN, GridSpec,
    LONG_TIME_SWEEP,
};

fn spec(n: GridN) -> GridSpec {
    GridSpec { a_min: 0.2, a_max: 25.0, b_min: 0.0, b_max: 10.0, n_a: 13, n_b: 11, n }
}

fn json(g: &nasearch_core::sweep::ProbabilityGrid) -> Vec<u8> {
    let mut buf = vec![];
    write_grid_json(&mut buf, g, &grid_meta(g, None)).unwrap();
    buf
}

#[test]
fn concurrent_and_sequential_agree_bitwise() {
    for n in [GridN::Finite(100), GridN::Infinite] {
        let seq = sweep_ab_sequential(&spec(n)).unwrap();
        for workers in [1, 2, 7] {
            let par = sweep_ab(&spec(n), Some(workers)).unwrap();
            assert_eq!(json(&seq), json(&par), "N = {n}, {workers} workers");
        }
    }
}

#[test]
fn cells_are_pointwise_limits() {
    let g = sweep_ab(&spec(GridN::Finite(100)), Some(3)).unwrap();
    for (i, b) in g.b_values.iter().enumerate() {
        for (j, a) in g.a_values.iter().enumerate() {
            assert_eq!(g.p[i][j], Some(alg_ii_limit_prob(100, *a, *b).unwrap().value));
        }
    }
}

#[test]
fn spot_cells_match_long_time_ode() {
    let g = sweep_ab(&spec(GridN::Finite(100)), None).unwrap();
    // a fixed scatter of cells across the grid
    for (i, j) in [(0, 0), (3, 1), (5, 6), (10, 12), (7, 2), (2, 9)] {
        let (a, b) = (g.a_values[j], g.b_values[i]);
        let ode = ode_limit_prob(GridN::Finite(100), a, b, LONG_TIME_SWEEP, 1e-10).unwrap();
        let p = g.p[i][j].unwrap();
        assert!((p - ode).abs() < 1e-3, "a={a} b={b}: {p} vs {ode}");
    }
}

#[test]
fn finite_and_infinite_maps_differ_moderately() {
    let g100 = sweep_ab(&spec(GridN::Finite(100)), None).unwrap();
    let ginf = sweep_ab(&spec(GridN::Infinite), None).unwrap();
    let d = g100.max_abs_difference(&ginf).unwrap();
    assert!(d.is_finite() && d > 0.0 && d < 0.5, "max difference {d}");
}
