use clap::{Parser, ValueEnum};
use modhilbert::analysis::assemble;
use modhilbert::assembly::write_matrix_dump;
use modhilbert::fem::FeSpace;
use modhilbert::study::{doubling, run_study, CheckOptions, CustomFunction, Mismatch, StudyConfig, StudyOutput, TableId};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Md,
}

/// Reproduces the convergence tables of the modified Hilbert transform
/// finite element study and checks them against the published values.
#[derive(Debug, Parser)]
#[command(name = "modhilbert", version)]
struct Cli {
    /// table1..table8, fig2 or custom
    #[arg(long, value_parser = parse_table)]
    table: TableId,

    /// Polynomial degrees, comma separated (default: 0,1,2; 0 for tables 5-8)
    #[arg(long, value_delimiter = ',')]
    nu: Vec<usize>,

    /// Coarsest mesh; meshes double up to --nmax
    #[arg(long, default_value_t = 2)]
    nmin: usize,

    /// Finest mesh (default: the published range)
    #[arg(long)]
    nmax: Option<usize>,

    /// Time horizon T
    #[arg(long, default_value_t = 2.0)]
    horizon: f64,

    /// Function of the custom study: sin_pi4, t_23, t_Tt_23, cubic_a, cubic_b or psi1
    #[arg(long = "func", value_parser = parse_function)]
    function: Option<CustomFunction>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,

    /// Output directory
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Relative tolerance replacing the built-in value tolerances
    #[arg(long = "tol-table")]
    tol_table: Option<f64>,

    /// Worker threads
    #[arg(long, env = "HT_THREADS")]
    threads: Option<usize>,

    /// Also write the Hilbert matrix of every degree on the finest mesh
    #[arg(long)]
    dump_matrix: bool,

    /// Number of points of the fig2 grid
    #[arg(long, default_value_t = 10_000)]
    grid_points: usize,
}

fn parse_table(s: &str) -> Result<TableId, String> {
    s.parse().map_err(|e: modhilbert::Error| e.to_string())
}

fn parse_function(s: &str) -> Result<CustomFunction, String> {
    s.parse().map_err(|e: modhilbert::Error| e.to_string())
}

impl Cli {
    fn config(&self) -> Result<StudyConfig, String> {
        if !(self.horizon > 0.0) {
            return Err(format!("--horizon must be positive, got {}", self.horizon));
        }
        if self.function.is_some() && self.table != TableId::Custom {
            return Err("--func is only used with --table custom".into());
        }
        if self.tol_table.is_some_and(|t| !(t > 0.0)) {
            return Err("--tol-table must be positive".into());
        }
        let nmax = self.nmax.unwrap_or(self.table.default_nmax());
        if self.nmin == 0 || nmax < self.nmin || !self.nmin.is_power_of_two() || !nmax.is_power_of_two() {
            return Err(format!("mesh range {}..{nmax} must consist of powers of two", self.nmin));
        }
        let residual = matches!(self.table, TableId::Table5 | TableId::Table6 | TableId::Table7 | TableId::Table8);
        let nus = match (self.nu.is_empty(), residual) {
            (true, true) => vec![0],
            (true, false) => vec![0, 1, 2],
            (false, true) if self.nu != [0] => return Err("residual tables are defined for --nu 0 only".into()),
            (false, _) => self.nu.clone(),
        };
        if let Some(nu) = nus.iter().find(|&&nu| nu > 2) {
            return Err(format!("degree {nu} is not supported (0, 1 or 2)"));
        }
        Ok(StudyConfig {
            table: self.table,
            nus,
            ns: doubling(self.nmin, nmax),
            horizon: self.horizon,
            function: self.function,
            checks: CheckOptions { relative_override: self.tol_table },
            grid_points: self.grid_points,
        })
    }
}

fn write_outputs(out: &StudyOutput, cfg: &StudyConfig, cli: &Cli) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(&cli.out)?;
    let mut written = Vec::new();
    if cfg.table == TableId::Fig2 {
        let path = cli.out.join("fig2.csv");
        let mut w = BufWriter::new(fs::File::create(&path)?);
        writeln!(w, "x,gap")?;
        for (x, gap) in &out.grid {
            writeln!(w, "{x:.16e},{gap:.16e}")?;
        }
        w.flush()?;
        written.push(path);
    }
    for t in &out.tables {
        let (ext, body) = match cli.format {
            Format::Csv => ("csv", t.to_csv()),
            Format::Md => ("md", t.to_markdown()),
        };
        let path = cli.out.join(format!("{}.{ext}", t.stem()));
        fs::write(&path, body)?;
        written.push(path);
    }
    let failures = cli.out.join("failures.csv");
    if out.mismatches.is_empty() {
        if failures.exists() {
            fs::remove_file(&failures)?;
        }
    } else {
        fs::write(&failures, failure_csv(&out.mismatches))?;
        written.push(failures);
    }
    Ok(written)
}

fn failure_csv(ms: &[Mismatch]) -> String {
    let mut s = String::from("quantity,n,expected,got,tolerance\n");
    for m in ms {
        s.push_str(&format!("{},{},{:e},{:e},{:e}\n", m.quantity, m.n, m.expected, m.got, m.tolerance));
    }
    s
}

fn dump_matrices(cfg: &StudyConfig, dir: &Path) -> Result<(), String> {
    let n = *cfg.ns.last().expect("nonempty mesh list");
    for &nu in &cfg.nus {
        let space = FeSpace::uniform(n, cfg.horizon, nu).map_err(|e| e.to_string())?;
        let b = assemble(&space).map_err(|e| e.to_string())?;
        let path = dir.join(format!("matrix_nu{nu}_n{n}.bin"));
        let file = fs::File::create(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        write_matrix_dump(BufWriter::new(file), n as u32, nu as u32, &b).map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = match cli.config() {
        Ok(cfg) => cfg,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    };
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} worker threads: {e}");
            return ExitCode::from(1);
        }
    }
    let out = match run_study(&cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match write_outputs(&out, &cfg, &cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
        }
        Err(e) => {
            eprintln!("error: writing to {}: {e}", cli.out.display());
            return ExitCode::from(1);
        }
    }
    if cli.dump_matrix && cfg.table != TableId::Fig2 {
        if let Err(msg) = dump_matrices(&cfg, &cli.out) {
            eprintln!("error: {msg}");
            return ExitCode::from(1);
        }
    }
    if out.mismatches.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprint!("{}", failure_csv(&out.mismatches));
        ExitCode::from(2)
    }
}
