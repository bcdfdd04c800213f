use proptest::prelude::*;

use scms_ldpc::code::{
    degree_distributions, expand_qc, load_alist, load_qc, sample_irregular, write_alist, CodeError,
    DegreeDistribution, QcBaseMatrix, TannerGraph,
};

fn fixture(name: &str) -> String {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    std::fs::read_to_string(path).unwrap()
}

fn dense(g: &TannerGraph) -> Vec<Vec<u8>> {
    let mut h = vec![vec![0u8; g.n()]; g.m()];
    for c in 0..g.m() {
        for &v in g.chk_neighbors(c) {
            h[c][v] = 1;
        }
    }
    h
}

fn symmetric(g: &TannerGraph) -> bool {
    (0..g.n()).all(|v| g.var_neighbors(v).iter().all(|&c| g.chk_neighbors(c).contains(&v)))
        && (0..g.m()).all(|c| g.chk_neighbors(c).iter().all(|&v| g.var_neighbors(v).contains(&c)))
}

#[test]
fn mixed_fixture_hand_count() {
    let g = load_alist(&fixture("mixed.alist")).unwrap();
    assert_eq!((g.n(), g.m(), g.edge_count()), (8, 4, 13));
    assert!(symmetric(&g));
    let d = degree_distributions(&g);
    // degree-1 variables 2,4,7,8; degree 2: 1,3,6; degree 3: 5
    assert!((d.lambda(1) - 4.0 / 13.0).abs() < 1e-12);
    assert!((d.lambda(2) - 6.0 / 13.0).abs() < 1e-12);
    assert!((d.lambda(3) - 3.0 / 13.0).abs() < 1e-12);
    assert!((d.rho(3) - 9.0 / 13.0).abs() < 1e-12);
    assert!((d.rho(4) - 4.0 / 13.0).abs() < 1e-12);
    assert_eq!(g.var_neighbors(4), &[0, 1, 3]);
}

#[test]
fn mixed_fixture_round_trip() {
    let g = load_alist(&fixture("mixed.alist")).unwrap();
    let text = write_alist(&g);
    assert_eq!(load_alist(&text).unwrap(), g);
    assert_eq!(write_alist(&load_alist(&text).unwrap()), text);
}

#[test]
fn qc_fixture_expands() {
    let base = load_qc(&fixture("small.qc")).unwrap();
    assert_eq!((base.rows(), base.cols(), base.z()), (2, 4, 5));
    assert_eq!(base.shift(0, 2), None);
    assert_eq!(base.shift(1, 2), Some(4));
    let g = expand_qc(&base).unwrap();
    assert_eq!((g.n(), g.m(), g.edge_count()), (20, 10, 30));
    // cell (1, 2) with shift 4: variable 2*5 + (k+4) mod 5 on check 5 + k
    for k in 0..5 {
        assert!(g.chk_neighbors(5 + k).contains(&(10 + (k + 4) % 5)));
    }
    assert!(symmetric(&g));
    assert_eq!(load_qc(&base.to_text()).unwrap(), base);
}

#[test]
fn truncated_files_report_errors() {
    let text = fixture("mixed.alist");
    let cut: String = text.lines().take(9).collect::<Vec<_>>().join("\n");
    assert!(matches!(load_alist(&cut), Err(CodeError::Parse { .. })));
    assert!(load_qc("2 4 5\n0 1 -1 3\n").is_err());
    assert!(load_qc("1 1 3\n3\n").is_err());
}

fn small_graph() -> impl Strategy<Value = TannerGraph> {
    (2usize..10, 1usize..6)
        .prop_flat_map(|(n, m)| (Just(n), Just(m), prop::collection::vec(prop::bool::weighted(0.4), n * m)))
        .prop_filter_map("every node needs an edge", |(n, m, cells)| {
            let edges: Vec<(usize, usize)> = (0..n * m).filter(|&i| cells[i]).map(|i| (i % n, i / n)).collect();
            let covered = (0..n).all(|v| edges.iter().any(|e| e.0 == v)) && (0..m).all(|c| edges.iter().any(|e| e.1 == c));
            covered.then(|| TannerGraph::from_edges(n, m, &edges).unwrap())
        })
}

proptest! {
    #[test]
    fn alist_round_trip(g in small_graph()) {
        prop_assert!(symmetric(&g));
        let again = load_alist(&write_alist(&g)).unwrap();
        prop_assert_eq!(&again, &g);
    }

    #[test]
    fn syndrome_matches_matrix_product(g in small_graph(), word in prop::collection::vec(0u8..2, 10)) {
        let bits = &word[..g.n()];
        let h = dense(&g);
        let brute = h.iter().all(|row| row.iter().zip(bits).map(|(a, b)| a & b).sum::<u8>() % 2 == 0);
        prop_assert_eq!(g.syndrome_ok(bits).unwrap(), brute);
    }

    #[test]
    fn qc_edge_count(rows in 1usize..4, cols in 1usize..6, z in 1usize..12, raw in prop::collection::vec(-1i64..12, 24)) {
        let shifts: Vec<i64> = raw[..rows * cols].iter().map(|&s| if s < 0 { -1 } else { s % z as i64 }).collect();
        let filled = shifts.iter().filter(|&&s| s >= 0).count();
        // an all-sentinel base row or column leaves degree-0 nodes
        let empty_row = (0..rows).any(|r| (0..cols).all(|c| shifts[r * cols + c] < 0));
        let empty_col = (0..cols).any(|c| (0..rows).all(|r| shifts[r * cols + c] < 0));
        let base = QcBaseMatrix::new(rows, cols, z, shifts).unwrap();
        match expand_qc(&base) {
            Ok(g) => {
                prop_assert!(!empty_row && !empty_col);
                prop_assert_eq!(g.edge_count(), z * filled);
                prop_assert_eq!((g.n(), g.m()), (cols * z, rows * z));
                prop_assert!(symmetric(&g));
            }
            Err(e) => prop_assert!(empty_row || empty_col, "{}", e),
        }
    }

    #[test]
    fn sampled_graphs_follow_distribution(seed in 0u64..1000, k in 0usize..3) {
        let (d, n) = [
            (DegreeDistribution::regular(3, 6).unwrap(), 120),
            (DegreeDistribution::regular(4, 8).unwrap(), 96),
            (DegreeDistribution::new(&[(2, 0.5), (3, 0.5)], &[(5, 1.0)]).unwrap(), 100),
        ][k].clone();
        let g = sample_irregular(&d, n, seed).unwrap();
        prop_assert!(symmetric(&g));
        prop_assert!(degree_distributions(&g).max_abs_diff(&d) < 1e-12);
        prop_assert_eq!(sample_irregular(&d, n, seed).unwrap(), g);
    }
}
