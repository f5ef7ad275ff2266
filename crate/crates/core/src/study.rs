//! Convergence studies over doubling meshes, their tabular output and the
//! comparison against the published benchmark values.

use crate::analysis::{
    cs_of_residual, eoc, f_bound_gap, infsup_constant, HilbertProjector, InfSupReport, ResidualReport,
};
use crate::assembly::LoadSampler;
use crate::error::{domain, Result};
use crate::fem::{FeSpace, Mesh};
use crate::func::{TestFunction, TestKind, TimeFunction};
use crate::reference as refdata;
use rayon::prelude::*;
use std::fmt::{self, Write as _};
use std::str::FromStr;

/// How the value column is printed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueFormat {
    /// six significant digits, scientific
    Scientific,
    /// six decimals
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Row {
    pub n: usize,
    pub h: f64,
    pub value: f64,
    pub eoc: Option<f64>,
}

/// One quantity over a sequence of doubling meshes.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub quantity: String,
    pub nu: Option<usize>,
    pub horizon: f64,
    pub function: Option<String>,
    pub format: ValueFormat,
    pub rows: Vec<Row>,
}

impl ConvergenceTable {
    pub fn new(
        quantity: &str,
        nu: Option<usize>,
        horizon: f64,
        function: Option<&str>,
        format: ValueFormat,
        ns: &[usize],
        values: &[f64],
    ) -> Result<Self> {
        if ns.len() != values.len() {
            return domain("one value per mesh is required");
        }
        check_doubling(ns)?;
        let rates = if values.len() >= 2 && values.iter().all(|v| *v > 0.0) { Some(eoc(values)?) } else { None };
        let rows = ns
            .iter()
            .zip(values)
            .enumerate()
            .map(|(r, (&n, &value))| Row {
                n,
                h: horizon / n as f64,
                value,
                eoc: match (&rates, r) {
                    (Some(e), r) if r > 0 => Some(e[r - 1]),
                    _ => None,
                },
            })
            .collect();
        Ok(ConvergenceTable {
            quantity: quantity.to_string(),
            nu,
            horizon,
            function: function.map(str::to_string),
            format,
            rows,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.value).collect()
    }

    /// File name stem such as `error_nu1_sin_pi4`.
    pub fn stem(&self) -> String {
        let mut s = self.quantity.clone();
        if let Some(nu) = self.nu {
            let _ = write!(s, "_nu{nu}");
        }
        if let Some(f) = &self.function {
            let _ = write!(s, "_{f}");
        }
        s
    }

    fn value_text(&self, v: f64) -> String {
        match self.format {
            ValueFormat::Scientific => format!("{v:.5e}"),
            ValueFormat::Fixed => format!("{v:.6}"),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,h,value,eoc\n");
        for r in &self.rows {
            let e = r.eoc.map(|e| format!("{e:.4}")).unwrap_or_default();
            let _ = writeln!(out, "{},{:.6e},{},{}", r.n, r.h, self.value_text(r.value), e);
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("### {}", self.quantity);
        if let Some(nu) = self.nu {
            let _ = write!(out, ", ν = {nu}");
        }
        if let Some(f) = &self.function {
            let _ = write!(out, ", u = {f}");
        }
        let _ = write!(out, ", T = {}\n\n| n | h | value | eoc |\n|---:|---:|---:|---:|\n", self.horizon);
        for r in &self.rows {
            let e = r.eoc.map(|e| format!("{e:.2}")).unwrap_or_default();
            let _ = writeln!(out, "| {} | {:.6e} | {} | {} |", r.n, r.h, self.value_text(r.value), e);
        }
        out
    }
}

fn check_doubling(ns: &[usize]) -> Result<()> {
    if ns.is_empty() || ns[0] == 0 {
        return domain("mesh sequence must start with n ≥ 1");
    }
    if ns.windows(2).any(|w| w[1] != 2 * w[0]) {
        return domain(format!("mesh sizes must double row to row, got {ns:?}"));
    }
    Ok(())
}

/// `start, 2·start, …` up to `max`.
pub fn doubling(start: usize, max: usize) -> Vec<usize> {
    std::iter::successors(Some(start.max(1)), |n| Some(n * 2)).take_while(|n| *n <= max).collect()
}

/// Runs `job` for every mesh size, in parallel, keeping the input order.
fn per_mesh<T: Send>(ns: &[usize], job: impl Fn(usize) -> Result<T> + Sync) -> Result<Vec<T>> {
    ns.par_iter().map(|&n| job(n)).collect()
}

/// Inf-sup constants of one degree over the meshes.
pub fn infsup_study(nu: usize, ns: &[usize], horizon: f64) -> Result<Vec<InfSupReport>> {
    check_doubling(ns)?;
    per_mesh(ns, |n| infsup_constant(nu, n, horizon))
}

/// `c_S` and `c_S/h` tables for one degree.
pub fn infsup_tables(nu: usize, ns: &[usize], horizon: f64) -> Result<Vec<ConvergenceTable>> {
    let reports = infsup_study(nu, ns, horizon)?;
    let cs: Vec<f64> = reports.iter().map(|r| r.c_s).collect();
    let ratio: Vec<f64> = reports.iter().map(|r| r.c_s_over_h).collect();
    Ok(vec![
        ConvergenceTable::new("cs", Some(nu), horizon, None, ValueFormat::Fixed, ns, &cs)?,
        ConvergenceTable::new("cs_over_h", Some(nu), horizon, None, ValueFormat::Fixed, ns, &ratio)?,
    ])
}

/// A named function for the projection studies.
pub struct Subject<'a> {
    pub id: String,
    pub function: &'a dyn TimeFunction,
}

/// `‖u - u_h‖` for every subject, degree and mesh. One matrix and LU per
/// `(ν, n)` and one `H_T^{-1}u` sampler per `(u, n)` are shared.
pub fn projection_tables(subjects: &[Subject], nus: &[usize], ns: &[usize], horizon: f64) -> Result<Vec<ConvergenceTable>> {
    check_doubling(ns)?;
    let errors = per_mesh(ns, |n| {
        let mesh = Mesh::new(n, horizon)?;
        let samplers =
            subjects.iter().map(|s| LoadSampler::new(s.function, mesh)).collect::<Result<Vec<_>>>()?;
        let mut out = vec![vec![0.0; nus.len()]; subjects.len()];
        for (b, &nu) in nus.iter().enumerate() {
            let projector = HilbertProjector::new(FeSpace::new(mesh, nu)?)?;
            for (a, (s, sampler)) in subjects.iter().zip(&samplers).enumerate() {
                out[a][b] = projector.project_with(s.function, sampler)?.error;
            }
        }
        Ok(out)
    })?;
    let mut tables = Vec::new();
    for (a, s) in subjects.iter().enumerate() {
        for (b, &nu) in nus.iter().enumerate() {
            let col: Vec<f64> = errors.iter().map(|e| e[a][b]).collect();
            tables.push(ConvergenceTable::new("error", Some(nu), horizon, Some(&s.id), ValueFormat::Scientific, ns, &col)?);
        }
    }
    Ok(tables)
}

/// Residual analysis for piecewise constants over the meshes.
pub fn residual_study(u: &dyn TimeFunction, ns: &[usize], horizon: f64) -> Result<Vec<ResidualReport>> {
    check_doubling(ns)?;
    per_mesh(ns, |n| {
        let space = FeSpace::uniform(n, horizon, 0)?;
        let projector = HilbertProjector::new(space)?;
        let sampler = LoadSampler::new(u, space.mesh())?;
        cs_of_residual(&projector, u, &sampler)
    })
}

/// Tables of `‖Q_h H_T^{-1}(u - Q_h u)‖`, the realised ratio
/// `‖w_h‖/‖u_h - Q_h u‖` and the cut-off formula `c_S(u_h - Q_h u)`.
pub fn residual_tables(id: &str, u: &dyn TimeFunction, ns: &[usize], horizon: f64) -> Result<Vec<ConvergenceTable>> {
    let reports = residual_study(u, ns, horizon)?;
    let col = |f: fn(&ResidualReport) -> f64| reports.iter().map(f).collect::<Vec<f64>>();
    Ok(vec![
        ConvergenceTable::new("wh", Some(0), horizon, Some(id), ValueFormat::Scientific, ns, &col(|r| r.wh_norm))?,
        ConvergenceTable::new("cs", Some(0), horizon, Some(id), ValueFormat::Fixed, ns, &col(|r| r.cs_ratio))?,
        ConvergenceTable::new("cs_cutoff", Some(0), horizon, Some(id), ValueFormat::Fixed, ns, &col(|r| r.cs_formula))?,
    ])
}

/// `(x, [F(x)/x (cos x - sin x/x)]² - (2/(3π))x²)` on `points` equispaced
/// abscissae of `(0, π/2]`.
pub fn fbound_grid(points: usize) -> Result<Vec<(f64, f64)>> {
    (1..=points)
        .map(|i| {
            let x = 0.5 * std::f64::consts::PI * i as f64 / points as f64;
            Ok((x, f_bound_gap(x)?))
        })
        .collect()
}

/// The benchmark studies and a free-form projection study.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableId {
    Table1,
    Table2,
    Table3,
    Table4,
    Table5,
    Table6,
    Table7,
    Table8,
    Fig2,
    Custom,
}

impl TableId {
    pub const ALL: [TableId; 10] = [
        TableId::Table1,
        TableId::Table2,
        TableId::Table3,
        TableId::Table4,
        TableId::Table5,
        TableId::Table6,
        TableId::Table7,
        TableId::Table8,
        TableId::Fig2,
        TableId::Custom,
    ];

    pub fn id(self) -> &'static str {
        match self {
            TableId::Table1 => "table1",
            TableId::Table2 => "table2",
            TableId::Table3 => "table3",
            TableId::Table4 => "table4",
            TableId::Table5 => "table5",
            TableId::Table6 => "table6",
            TableId::Table7 => "table7",
            TableId::Table8 => "table8",
            TableId::Fig2 => "fig2",
            TableId::Custom => "custom",
        }
    }

    /// Benchmark function of the single-function studies.
    pub fn function(self) -> Option<TestKind> {
        match self {
            TableId::Table2 | TableId::Table6 => Some(TestKind::SinPi4),
            TableId::Table3 | TableId::Table7 => Some(TestKind::Pow23),
            TableId::Table4 | TableId::Table8 => Some(TestKind::BubblePow23),
            _ => None,
        }
    }

    /// Largest mesh of the published study.
    pub fn default_nmax(self) -> usize {
        match self {
            TableId::Table5 => 128,
            _ => 2048,
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for TableId {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        TableId::ALL.into_iter().find(|t| t.id() == s).map_or_else(|| domain(format!("unknown table '{s}'")), Ok)
    }
}

/// Admissible deviation from a reference value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Tolerance {
    Absolute(f64),
    Relative(f64),
    /// agreement to `k` significant figures: `|Δ| ≤ ½·10^{⌊log₁₀|ref|⌋+1-k}`
    SigFigs(f64),
}

impl Tolerance {
    pub fn bound(self, reference: f64) -> f64 {
        match self {
            Tolerance::Absolute(t) => t,
            Tolerance::Relative(r) => r * reference.abs(),
            Tolerance::SigFigs(k) => 0.5 * 10f64.powf(reference.abs().log10().floor() + 1.0 - k),
        }
    }

    pub fn admits(self, reference: f64, got: f64) -> bool {
        (got - reference).abs() <= self.bound(reference)
    }
}

/// A value outside its tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct Mismatch {
    pub quantity: String,
    pub n: usize,
    pub expected: f64,
    pub got: f64,
    pub tolerance: f64,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "quantity={} n={} expected={:e} got={:e} tolerance={:e}",
            self.quantity, self.n, self.expected, self.got, self.tolerance
        )
    }
}

fn table_label(t: &ConvergenceTable, what: &str) -> String {
    let mut s = t.stem();
    if !what.is_empty() {
        s.push('.');
        s.push_str(what);
    }
    s
}

/// Compares the value column with reference values given on `meshes`;
/// rows without a reference are skipped.
pub fn compare_values(t: &ConvergenceTable, reference: &[f64], meshes: &[usize], tol: Tolerance) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for r in &t.rows {
        if let Some(i) = meshes.iter().position(|&m| m == r.n) {
            let want = reference[i];
            if !tol.admits(want, r.value) {
                out.push(Mismatch {
                    quantity: table_label(t, ""),
                    n: r.n,
                    expected: want,
                    got: r.value,
                    tolerance: tol.bound(want),
                });
            }
        }
    }
    out
}

/// Compares every eoc from row `n ≥ from_n` on with a fixed rate.
pub fn compare_rate(t: &ConvergenceTable, rate: f64, tol: f64, from_n: usize) -> Vec<Mismatch> {
    t.rows
        .iter()
        .filter(|r| r.n >= from_n)
        .filter_map(|r| {
            let e = r.eoc?;
            ((e - rate).abs() > tol).then(|| Mismatch {
                quantity: table_label(t, "eoc"),
                n: r.n,
                expected: rate,
                got: e,
                tolerance: tol,
            })
        })
        .collect()
}

/// Compares the eoc column row by row with the rates of a reference column.
pub fn compare_rates(t: &ConvergenceTable, rates: &[f64], meshes: &[usize], tol: f64) -> Vec<Mismatch> {
    t.rows
        .iter()
        .filter_map(|r| {
            let e = r.eoc?;
            let i = meshes.iter().position(|&m| m == r.n)?;
            let want = *rates.get(i.checked_sub(1)?)?;
            ((e - want).abs() > tol).then(|| Mismatch {
                quantity: table_label(t, "eoc"),
                n: r.n,
                expected: want,
                got: e,
                tolerance: tol,
            })
        })
        .collect()
}

/// Rates `log2(v_{r-1}/v_r)` of a reference column.
pub fn reference_rates(values: &[f64]) -> Vec<f64> {
    values.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Settings of the comparisons against published values.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CheckOptions {
    /// replaces every value tolerance by this relative tolerance
    pub relative_override: Option<f64>,
}

impl CheckOptions {
    fn tol(&self, default: Tolerance) -> Tolerance {
        self.relative_override.map_or(default, Tolerance::Relative)
    }
}

/// Compares computed tables of a benchmark study against the published
/// values. Only rows at `T = 2` with a published counterpart are checked.
pub fn check_tables(id: TableId, tables: &[ConvergenceTable], opts: CheckOptions) -> Vec<Mismatch> {
    let mut out = Vec::new();
    for t in tables {
        if (t.horizon - 2.0).abs() > 1e-15 {
            continue;
        }
        let nu = t.nu.unwrap_or(0);
        let m = &refdata::MESHES[..];
        match (id, t.quantity.as_str()) {
            (TableId::Table1, "cs") if nu <= 2 => {
                let tol = if nu == 0 { 5e-6 } else { 5e-5 };
                out.extend(compare_values(t, &refdata::INFSUP[nu], m, opts.tol(Tolerance::Absolute(tol))));
            }
            (TableId::Table1, "cs_over_h") if nu <= 2 => {
                out.extend(compare_values(t, &refdata::INFSUP_OVER_H[nu], m, opts.tol(Tolerance::Absolute(0.002))));
            }
            (TableId::Table2, "error") if nu <= 2 => {
                out.extend(compare_values(t, &refdata::ERROR_SIN[nu], m, opts.tol(Tolerance::SigFigs(3.0))));
                out.extend(compare_rate(t, refdata::ORDER_SIN[nu], 0.02, 16));
            }
            (TableId::Table3, "error") if nu <= 2 => {
                out.extend(compare_values(t, &refdata::ERROR_POW[nu], m, opts.tol(Tolerance::SigFigs(2.5))));
                out.extend(compare_rate(t, 2.0 / 3.0, 0.02, 512));
            }
            (TableId::Table4, "error") if nu <= 2 => {
                out.extend(compare_values(t, &refdata::ERROR_BUBBLE[nu], m, opts.tol(Tolerance::SigFigs(2.5))));
                out.extend(compare_rate(t, refdata::ORDER_BUBBLE[nu], 0.02, 512));
            }
            (TableId::Table5, "wh") => {
                let (reference, rate) = match t.function.as_deref() {
                    Some("cubic_a") => (&refdata::RESIDUAL_CUBIC_A, 2.0),
                    Some("cubic_b") => (&refdata::RESIDUAL_CUBIC_B, 1.5),
                    _ => continue,
                };
                out.extend(compare_values(t, reference, &refdata::RESIDUAL_MESHES, opts.tol(Tolerance::Absolute(1e-6))));
                out.extend(compare_rate(t, rate, 0.01, 64));
            }
            (TableId::Table6 | TableId::Table7 | TableId::Table8, q @ ("cs" | "wh")) => {
                let data = match id {
                    TableId::Table6 => &refdata::RESIDUAL_SIN,
                    TableId::Table7 => &refdata::RESIDUAL_POW,
                    _ => &refdata::RESIDUAL_BUBBLE,
                };
                let col = usize::from(q == "wh");
                out.extend(compare_values(t, &data[col], m, opts.tol(Tolerance::SigFigs(3.0))));
                if id == TableId::Table8 {
                    out.extend(compare_rates(t, &refdata::RESIDUAL_BUBBLE_EOC[col], m, 0.03));
                } else {
                    out.extend(compare_rates(t, &reference_rates(&data[col]), m, 0.02));
                }
            }
            _ => {}
        }
    }
    out
}

/// Everything a study produces.
#[derive(Debug, Clone, Default)]
pub struct StudyOutput {
    pub tables: Vec<ConvergenceTable>,
    pub grid: Vec<(f64, f64)>,
    pub mismatches: Vec<Mismatch>,
}

/// Parameters of a study run.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub table: TableId,
    pub nus: Vec<usize>,
    pub ns: Vec<usize>,
    pub horizon: f64,
    /// function of the custom study
    pub function: Option<CustomFunction>,
    pub checks: CheckOptions,
    pub grid_points: usize,
}

/// Functions accepted by the custom study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CustomFunction {
    Benchmark(TestKind),
    /// the indicator of the first cell of the coarsest mesh
    FirstCell,
}

impl CustomFunction {
    pub fn id(self) -> String {
        match self {
            CustomFunction::Benchmark(k) => k.id().to_string(),
            CustomFunction::FirstCell => "psi1".to_string(),
        }
    }
}

impl FromStr for CustomFunction {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "psi1" {
            Ok(CustomFunction::FirstCell)
        } else {
            s.parse().map(CustomFunction::Benchmark)
        }
    }
}

/// Runs a study and compares it with the published values where they exist.
pub fn run_study(cfg: &StudyConfig) -> Result<StudyOutput> {
    if !(cfg.horizon > 0.0) {
        return domain(format!("horizon must be positive, got {}", cfg.horizon));
    }
    let mut out = StudyOutput::default();
    if cfg.table == TableId::Fig2 {
        out.grid = fbound_grid(cfg.grid_points)?;
        for (i, &(_, gap)) in out.grid.iter().enumerate() {
            if gap > 1e-14 {
                out.mismatches.push(Mismatch { quantity: "fbound_gap".into(), n: i + 1, expected: 0.0, got: gap, tolerance: 1e-14 });
            }
        }
        return Ok(out);
    }
    check_doubling(&cfg.ns)?;
    let h = cfg.horizon;
    match cfg.table {
        TableId::Table1 => {
            for &nu in &cfg.nus {
                out.tables.extend(infsup_tables(nu, &cfg.ns, h)?);
            }
        }
        TableId::Table2 | TableId::Table3 | TableId::Table4 => {
            let kind = cfg.table.function().expect("single-function study");
            let u = TestFunction::new(kind, h);
            let subjects = [Subject { id: kind.id().to_string(), function: &u }];
            out.tables = projection_tables(&subjects, &cfg.nus, &cfg.ns, h)?;
        }
        TableId::Table5 => {
            for kind in [TestKind::CubicA, TestKind::CubicB] {
                let u = TestFunction::new(kind, h);
                let t = residual_tables(kind.id(), &u, &cfg.ns, h)?;
                out.tables.extend(t.into_iter().filter(|t| t.quantity == "wh"));
            }
        }
        TableId::Table6 | TableId::Table7 | TableId::Table8 => {
            let kind = cfg.table.function().expect("single-function study");
            let u = TestFunction::new(kind, h);
            out.tables = residual_tables(kind.id(), &u, &cfg.ns, h)?;
        }
        TableId::Custom => {
            let f = cfg.function.unwrap_or(CustomFunction::Benchmark(TestKind::SinPi4));
            let first = crate::func::FirstCell { width: h / cfg.ns[0] as f64 };
            let bench;
            let function: &dyn TimeFunction = match f {
                CustomFunction::Benchmark(k) => {
                    bench = TestFunction::new(k, h);
                    &bench
                }
                CustomFunction::FirstCell => &first,
            };
            let subjects = [Subject { id: f.id(), function }];
            out.tables = projection_tables(&subjects, &cfg.nus, &cfg.ns, h)?;
        }
        TableId::Fig2 => unreachable!(),
    }
    out.mismatches = check_tables(cfg.table, &out.tables, cfg.checks);
    Ok(out)
}
