use modhilbert::study::{
    check_tables, doubling, run_study, CheckOptions, CustomFunction, StudyConfig, TableId,
};

fn config(table: TableId, nus: &[usize], nmax: usize) -> StudyConfig {
    StudyConfig {
        table,
        nus: nus.to_vec(),
        ns: doubling(2, nmax),
        horizon: 2.0,
        function: None,
        checks: CheckOptions::default(),
        grid_points: 1000,
    }
}

#[test]
fn table1_prefix_has_no_mismatches() {
    let out = run_study(&config(TableId::Table1, &[0, 1, 2], 64)).unwrap();
    assert_eq!(out.tables.len(), 6);
    assert!(out.mismatches.is_empty(), "{:?}", out.mismatches);
}

#[test]
fn table5_matches_in_full() {
    let out = run_study(&config(TableId::Table5, &[0], 128)).unwrap();
    assert_eq!(out.tables.len(), 2);
    assert!(out.tables.iter().all(|t| t.quantity == "wh"));
    assert!(out.mismatches.is_empty(), "{:?}", out.mismatches);
}

#[test]
fn first_basis_function_is_reproduced() {
    // the first cell of the coarsest mesh is a union of cells on every finer one
    let mut cfg = config(TableId::Custom, &[0], 32);
    cfg.function = Some(CustomFunction::FirstCell);
    let out = run_study(&cfg).unwrap();
    let t = &out.tables[0];
    assert_eq!(t.function.as_deref(), Some("psi1"));
    assert_eq!(t.rows.len(), 5);
    for row in &t.rows {
        assert!(row.value < 1e-10, "n={}: {}", row.n, row.value);
    }
}

#[test]
fn relative_override_loosens_checks() {
    let out = run_study(&config(TableId::Table6, &[0], 32)).unwrap();
    let strict = check_tables(TableId::Table6, &out.tables, CheckOptions::default());
    let loose = check_tables(TableId::Table6, &out.tables, CheckOptions { relative_override: Some(0.5) });
    assert!(loose.len() <= strict.len());
    assert!(loose.iter().all(|m| m.quantity.contains("eoc")), "{loose:?}");
}

#[test]
fn fig2_grid_is_clean() {
    let out = run_study(&config(TableId::Fig2, &[0], 2)).unwrap();
    assert_eq!(out.grid.len(), 1000);
    assert!(out.mismatches.is_empty());
}

#[test]
fn bad_configs_are_rejected() {
    let mut cfg = config(TableId::Table2, &[0], 8);
    cfg.ns = vec![2, 6];
    assert!(run_study(&cfg).is_err());
    let mut cfg = config(TableId::Table2, &[0], 8);
    cfg.horizon = 0.0;
    assert!(run_study(&cfg).is_err());
}

#[test]
fn runs_are_deterministic() {
    let a = run_study(&config(TableId::Table3, &[0, 2], 16)).unwrap();
    let b = run_study(&config(TableId::Table3, &[0, 2], 16)).unwrap();
    let csv = |o: &modhilbert::study::StudyOutput| o.tables.iter().map(|t| t.to_csv()).collect::<String>();
    assert_eq!(csv(&a), csv(&b));
}
