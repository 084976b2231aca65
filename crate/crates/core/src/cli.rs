//! The `legfact` command-line front end.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::asymptotics::{cross_check_constants, fit_main_terms, remainder_decay_check};
use crate::config::{Format, PerronConfig, Resolved, RunConfig};
use crate::dirichlet::{
    dirichlet_partial, laurent_extract, perron_estimate, zeta_times_h, DEFAULT_P_CAP,
};
use crate::error::{Error, Result};
use crate::factorial::{factorial_ideal, increments_upto, summatory, IncrementTable, TABLE_CAP};
use crate::field::prime_ideal_stream;
use crate::format::fmt_f64;

#[derive(Debug, Parser)]
#[command(
    name = "legfact",
    version,
    about = "Generalized Legendre factorials over Q and quadratic fields"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags below override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// `Q` or `Q(sqrt<d>)` with squarefree d.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// `norm`, `norm-1`, `c*norm:<c>`, `c*norm-1:<c>`, or `table:<path>`.
    #[arg(long, global = true)]
    pub fspec: Option<String>,
    /// Largest n in the increment table.
    #[arg(long = "x-max", global = true)]
    pub x_max: Option<u64>,
    /// Excluded primes, e.g. `2,5:one`.
    #[arg(long = "s-exclude", global = true)]
    pub s_exclude: Option<String>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Table format for primes, factorial, and increments output.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; 0 picks the machine's parallelism.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Prime ideals up to a norm bound.
    Primes {
        /// Defaults to x_max.
        #[arg(long = "norm-bound")]
        norm_bound: Option<u64>,
    },
    /// The exponent ideal of n!.
    Factorial {
        #[arg(long)]
        n: u64,
    },
    /// The increment table B(n), S(n) for n <= x_max.
    Increments,
    /// The increment table plus S at the sample points.
    Summatory,
    /// Fits, decay check, pole coefficients, and their cross-check.
    Analyze,
    /// Truncated Perron estimates of S(x) over a sweep of heights.
    Perron {
        /// Evaluation point; at least 0.25 past an integer. Defaults to 100.5.
        #[arg(long)]
        x: Option<f64>,
        /// Comma-separated heights. Defaults to 100,200,400,800.
        #[arg(long = "t", value_delimiter = ',')]
        t: Option<Vec<f64>>,
        /// Prime-ideal truncation. Defaults to every ideal with f(p) <= x, at least 1000.
        #[arg(long)]
        p: Option<u64>,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Parses `args` (including the program name) and runs the command, returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("legfact: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Domain(_) | Error::Size { .. } => EXIT_CONFIG,
        Error::Numeric(_) | Error::Io { .. } => EXIT_FAILURE,
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let g = &cli.global;
    let mut cfg = match &g.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = &g.field {
        cfg.field = v.clone();
    }
    if let Some(v) = &g.fspec {
        cfg.fspec.apply_flag(v)?;
    }
    if let Some(v) = g.x_max {
        cfg.x_max = v;
    }
    if let Some(v) = &g.s_exclude {
        cfg.set_s_exclude(v);
    }
    if let Some(v) = &g.out {
        cfg.output = v.clone();
    }
    if let Some(v) = g.format {
        cfg.format = v;
    }
    if let Command::Perron { x, t, p } = &cli.command {
        let mut pc = cfg.perron.take().unwrap_or_default();
        if let Some(x) = x {
            pc.x = *x;
        }
        if let Some(t) = t {
            pc.t = t.clone();
        }
        if p.is_some() {
            pc.p = *p;
        }
        cfg.perron = Some(pc);
    }
    let r = cfg.resolve()?;
    std::fs::create_dir_all(&r.config.output).map_err(|e| Error::io(&r.config.output, e))?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.threads)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Primes { norm_bound } => cmd_primes(&r, norm_bound.unwrap_or(r.config.x_max)),
        Command::Factorial { n } => cmd_factorial(&r, *n),
        Command::Increments => cmd_increments(&r),
        Command::Summatory => cmd_summatory(&r),
        Command::Analyze => cmd_analyze(&r),
        Command::Perron { .. } => cmd_perron(&r),
    })
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    Ok((path, BufWriter::new(file)))
}

fn write_with<F>(dir: &Path, name: &str, body: F) -> Result<PathBuf>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let (path, mut w) = create(dir, name)?;
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    write_with(dir, name, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)
    })
}

fn cmd_primes(r: &Resolved, norm_bound: u64) -> Result<i32> {
    if norm_bound > TABLE_CAP {
        return Err(Error::Size {
            requested: norm_bound,
            cap: TABLE_CAP,
        });
    }
    let ideals = prime_ideal_stream(&r.field, &r.s_set, norm_bound)?;
    let dir = &r.config.output;
    let path = match r.config.format {
        Format::Csv => write_with(dir, "primes.csv", |w| {
            writeln!(w, "p,residue_degree,norm")?;
            for i in &ideals {
                writeln!(w, "{},{},{}", i.p, i.residue_degree, i.norm)?;
            }
            Ok(())
        })?,
        Format::Json => {
            let rows: Vec<_> = ideals
                .iter()
                .map(|i| json!({"p": i.p, "residue_degree": i.residue_degree, "norm": i.norm}))
                .collect();
            write_json(dir, "primes.json", &rows)?
        }
    };
    println!("{} prime ideals -> {}", ideals.len(), path.display());
    Ok(EXIT_OK)
}

fn cmd_factorial(r: &Resolved, n: u64) -> Result<i32> {
    if n > TABLE_CAP {
        return Err(Error::Size {
            requested: n,
            cap: TABLE_CAP,
        });
    }
    let ideal = factorial_ideal(n, &r.field, &r.s_set, &r.fspec)?;
    let log_norm = ideal.log_norm();
    let dir = &r.config.output;
    let path = match r.config.format {
        Format::Csv => write_with(dir, "factorial.csv", |w| {
            writeln!(w, "p,residue_degree,norm,exponent")?;
            for (i, e) in ideal.iter() {
                writeln!(w, "{},{},{},{}", i.p, i.residue_degree, i.norm, e)?;
            }
            writeln!(w, "log_norm,{}", fmt_f64(log_norm))
        })?,
        Format::Json => {
            let rows: Vec<_> = ideal
                .iter()
                .map(|(i, e)| {
                    json!({"p": i.p, "residue_degree": i.residue_degree, "index": i.index,
                           "norm": i.norm, "exponent": e})
                })
                .collect();
            write_json(
                dir,
                "factorial.json",
                &json!({"n": n, "ideals": rows, "log_norm": log_norm}),
            )?
        }
    };
    println!("log N({n}!) = {} -> {}", fmt_f64(log_norm), path.display());
    Ok(EXIT_OK)
}

fn build_table(r: &Resolved) -> Result<IncrementTable> {
    increments_upto(r.config.x_max, &r.field, &r.s_set, &r.fspec)
}

fn write_table(r: &Resolved, table: &IncrementTable, stem: &str) -> Result<PathBuf> {
    let dir = &r.config.output;
    match r.config.format {
        Format::Csv => write_with(dir, &format!("{stem}.csv"), |w| table.write_csv(w)),
        Format::Json => {
            let rows: Vec<_> = (1..=table.x_max())
                .map(|n| json!({"n": n, "B": table.value(n), "S": table.prefix(n)}))
                .collect();
            write_json(dir, &format!("{stem}.json"), &rows)
        }
    }
}

fn cmd_increments(r: &Resolved) -> Result<i32> {
    let table = build_table(r)?;
    let path = write_table(r, &table, "increments")?;
    println!("{} increments -> {}", table.x_max(), path.display());
    Ok(EXIT_OK)
}

fn cmd_summatory(r: &Resolved) -> Result<i32> {
    let table = build_table(r)?;
    let x_max = table.x_max();
    let path = match r.config.format {
        Format::Csv => Some(write_table(r, &table, "summatory")?),
        Format::Json => None,
    };
    let samples: Vec<_> = r
        .config
        .samples
        .points(x_max)
        .into_iter()
        .map(|x| json!({"x": x, "S": table.prefix(x)}))
        .collect();
    let summary = json!({
        "field": r.field.to_string(),
        "fspec": r.fspec.to_string(),
        "s_set": r.s_set.to_string(),
        "x_max": x_max,
        "S": table.prefix(x_max),
        "samples": samples,
    });
    let json_path = write_json(&r.config.output, "summatory.json", &summary)?;
    println!("S({x_max}) = {}", fmt_f64(table.prefix(x_max)));
    if let Some(p) = path {
        println!("table -> {}", p.display());
    }
    println!("summary -> {}", json_path.display());
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct Failure {
    check: &'static str,
    detail: String,
}

fn cmd_analyze(r: &Resolved) -> Result<i32> {
    let cfg = &r.config;
    let dir = &cfg.output;
    let table = build_table(r)?;
    let mut failures = Vec::new();

    let fit = match fit_main_terms(&table, &cfg.samples.points(table.x_max())) {
        Ok(fit) => {
            write_json(dir, "fit_report.json", &fit)?;
            write_with(dir, "remainder.csv", |w| fit.write_remainder_csv(w))?;
            let decay = remainder_decay_check(&fit);
            if !decay.pass {
                failures.push(Failure {
                    check: "remainder_decay",
                    detail: decay.diagnostics.clone(),
                });
            }
            println!(
                "a_hat = {:.6}  C_hat = {:.6}  ({})",
                fit.a_hat, fit.c_hat, decay.diagnostics
            );
            Some(fit)
        }
        Err(e @ (Error::Config(_) | Error::Size { .. })) => return Err(e),
        Err(e) => {
            failures.push(Failure {
                check: "fit_main_terms",
                detail: e.to_string(),
            });
            None
        }
    };

    let mut eps = cfg.epsilons.clone();
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    let laurent = match laurent_extract(&r.field, &r.s_set, &r.fspec, &eps, DEFAULT_P_CAP) {
        Ok(l) => {
            write_json(dir, "laurent.json", &l)?;
            println!(
                "leading = {:.6}  subleading = {:.6}",
                l.leading, l.subleading
            );
            Some(l)
        }
        Err(e) => {
            failures.push(Failure {
                check: "laurent_extract",
                detail: e.to_string(),
            });
            None
        }
    };

    if let (Some(fit), Some(l)) = (&fit, &laurent) {
        let cc = cross_check_constants(l, fit);
        if !cc.leading_ok {
            failures.push(Failure {
                check: "leading_constant",
                detail: format!("|leading - a_hat| = {:.3e}", cc.leading_delta),
            });
        }
        if !cc.constant_ok {
            failures.push(Failure {
                check: "secondary_constant",
                detail: format!("|A - 1/c - C_hat| = {:.3e}", cc.constant_delta),
            });
        }
    }

    let mut series = Vec::new();
    for &s in &cfg.s_values {
        let lhs = dirichlet_partial(s, table.x_max(), &table)?;
        let rhs = zeta_times_h(s, table.x_max(), &r.field, &r.s_set, &r.fspec)?;
        series.push(json!({"s": s, "partial": lhs, "product": rhs}));
    }
    write_json(dir, "series.json", &series)?;

    let report = json!({"pass": failures.is_empty(), "failures": failures});
    write_json(dir, "checks.json", &report)?;
    if failures.is_empty() {
        println!("all checks passed");
        Ok(EXIT_OK)
    } else {
        println!("{}", serde_json::to_string(&report).expect("serializable"));
        Ok(EXIT_FAILURE)
    }
}

fn cmd_perron(r: &Resolved) -> Result<i32> {
    let pc: &PerronConfig = r
        .config
        .perron
        .as_ref()
        .expect("perron settings are filled in");
    let floor_x = pc.x.floor() as u64;
    let p =
        pc.p.unwrap_or_else(|| r.fspec.norm_bound(&r.field, floor_x).max(1000));
    let table = increments_upto(floor_x, &r.field, &r.s_set, &r.fspec)?;
    let direct = summatory(pc.x, &table)?;
    let mut rows = Vec::with_capacity(pc.t.len());
    for &t in &pc.t {
        let est = perron_estimate(pc.x, t, &r.field, &r.s_set, &r.fspec, p)?;
        rows.push((t, est, (est - direct).abs()));
    }
    let path = write_with(&r.config.output, "perron.csv", |w| {
        writeln!(w, "T,estimate,direct,abs_error")?;
        for &(t, est, err) in &rows {
            writeln!(
                w,
                "{},{},{},{}",
                fmt_f64(t),
                fmt_f64(est),
                fmt_f64(direct),
                fmt_f64(err)
            )?;
        }
        Ok(())
    })?;
    for &(t, est, err) in &rows {
        println!("T = {t}: estimate {est:.6}, direct {direct:.6}, |error| {err:.3e}");
    }
    println!("-> {}", path.display());
    Ok(EXIT_OK)
}
