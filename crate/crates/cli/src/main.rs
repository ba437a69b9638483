use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use negtype_core::io::{format_sig, read_matrix_csv, read_tree_edges, write_matrix_csv, GenSpec};
use negtype_core::verify::{run_suite, VerifyConfig};
use negtype_core::{
    brute_force_gap, check, gamma_fn, interval_scan, negative_type_gap, star_exact_type,
    supremal_negative_type, tree_gap, tree_type_lower_bound, zeta_bound, Error, ExtendedReal,
    FiniteSemiMetricSpace, LoadedSimplex, ToleranceConfig, WeightedTree,
};
use serde::Serialize;
use serde_json::{json, Value};

const DIGITS: usize = 9;

#[derive(Parser, Debug)]
#[command(
    name = "negtype",
    version,
    about = "Negative type of finite semi-metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide (strict) q-negative type at one exponent
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long = "q", visible_alias = "p")]
        q: f64,
        #[command(flatten)]
        opts: Opts,
    },
    /// Supremal negative type
    Sup {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
    },
    /// Normalized negative type gap
    Gap {
        #[command(flatten)]
        input: Input,
        #[arg(long = "p", visible_alias = "q")]
        p: f64,
        /// Also run the sampling oracle with this many draws
        #[arg(long)]
        samples: Option<usize>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Guaranteed strictness interval beyond p
    Zeta {
        #[command(flatten)]
        input: Input,
        #[arg(long = "p", visible_alias = "q")]
        p: f64,
        /// Use this gap instead of computing it
        #[arg(long)]
        gamma: Option<f64>,
        #[command(flatten)]
        opts: Opts,
    },
    /// Lower bound on the supremal type of a unit-weight tree
    TreeBound {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
    },
    /// Verdicts along an exponent grid
    Scan {
        #[command(flatten)]
        input: Input,
        /// `start:end:step`
        #[arg(long)]
        grid: String,
        #[command(flatten)]
        opts: Opts,
    },
    /// Print a generated space
    Gen {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        opts: Opts,
    },
    /// Run every property suite
    Verify {
        /// Extra distance matrices to include
        #[arg(long)]
        matrix: Vec<PathBuf>,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Input {
    /// CSV distance matrix
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Edge list file, or a tree generator such as `star:3`
    #[arg(long)]
    tree: Option<String>,
    /// Generator spec such as `discrete:4` or `circle:0;pi/2;pi;3pi/2`
    #[arg(long = "gen")]
    generator: Option<String>,
}

#[derive(Args, Debug)]
struct Opts {
    /// Print JSON instead of a table
    #[arg(long)]
    json: bool,
    /// Seed for random generators and the oracle
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative eigenvalue band [default: 1e-9]
    #[arg(long)]
    tol_eig: Option<f64>,
    /// Final bracket width of the supremum search [default: 1e-6]
    #[arg(long)]
    tol_bisect: Option<f64>,
    /// Relative stationarity threshold of the gap solver [default: 1e-10]
    #[arg(long)]
    tol_qp: Option<f64>,
    /// Exponents at or above this count as unbounded [default: 64]
    #[arg(long)]
    p_max: Option<f64>,
}

impl Opts {
    fn tolerances(&self) -> Result<ToleranceConfig, Error> {
        let mut tol = ToleranceConfig::default();
        if let Some(v) = self.tol_eig {
            tol.eig_tol = v;
        }
        if let Some(v) = self.tol_bisect {
            tol.bisect_tol = v;
        }
        if let Some(v) = self.tol_qp {
            tol.qp_tol = v;
        }
        if let Some(v) = self.p_max {
            tol.p_max = v;
        }
        tol.validate()?;
        Ok(tol)
    }
}

struct Loaded {
    space: FiniteSemiMetricSpace,
    tree: Option<WeightedTree>,
}

fn load(input: &Input, seed: u64) -> Result<Loaded, Error> {
    if let Some(path) = &input.matrix {
        return Ok(Loaded {
            space: read_matrix_csv(path)?,
            tree: None,
        });
    }
    if let Some(t) = &input.tree {
        let tree = if Path::new(t).exists() {
            read_tree_edges(Path::new(t))?
        } else {
            let spec: GenSpec = t.parse()?;
            spec.build(seed)?
                .tree
                .ok_or_else(|| Error::NotATree(format!("{t} does not generate a tree")))?
        };
        return Ok(Loaded {
            space: tree.space(),
            tree: Some(tree),
        });
    }
    let spec: GenSpec = input.generator.as_deref().unwrap_or_default().parse()?;
    let g = spec.build(seed)?;
    Ok(Loaded {
        space: g.space,
        tree: g.tree,
    })
}

/// What a verb produced: human text, the JSON document and the exit code.
struct Report {
    text: String,
    json: Value,
    code: u8,
}

impl Report {
    fn ok(text: String, json: Value) -> Self {
        Self {
            text,
            json,
            code: 0,
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn num(v: f64) -> String {
    format_sig(v, DIGITS)
}

fn ext(v: ExtendedReal) -> String {
    match v {
        ExtendedReal::Finite(x) => num(x),
        other => other.to_string(),
    }
}

fn simplex_text(s: &LoadedSimplex) -> String {
    let side = |idx: &[usize], w: &[f64]| {
        idx.iter()
            .zip(w)
            .map(|(i, w)| format!("{i} ({})", num(*w)))
            .collect::<Vec<_>>()
            .join(", ")
    };
    format!(
        "A = {{{}}}  B = {{{}}}",
        side(s.side_a(), s.weights_a()),
        side(s.side_b(), s.weights_b())
    )
}

fn run_check(x: &Loaded, q: f64, tol: &ToleranceConfig) -> Result<Report, Error> {
    let v = check(&x.space, q, tol)?;
    let mut t = String::new();
    let _ = writeln!(t, "q               {}", num(v.q));
    let _ = writeln!(t, "status          {}", v.status);
    let _ = writeln!(t, "critical value  {}", num(v.critical_value));
    if let Some(w) = &v.witness {
        let w: Vec<String> = w.iter().map(|c| num(*c)).collect();
        let _ = writeln!(t, "witness         [{}]", w.join(", "));
    }
    Ok(Report::ok(t, to_value(&v)))
}

fn run_sup(x: &Loaded, tol: &ToleranceConfig) -> Result<Report, Error> {
    let r = supremal_negative_type(&x.space, tol)?;
    let mut t = String::new();
    match r.p_sup {
        ExtendedReal::Finite(p) => {
            let _ = writeln!(t, "p_sup    {}", num(p));
        }
        _ => {
            let _ = writeln!(
                t,
                "p_sup    infinity (search capped at p_max = {})",
                num(r.p_max)
            );
        }
    }
    if let Some((lo, hi)) = r.bracket {
        let _ = writeln!(t, "bracket  [{}, {}]", num(lo), num(hi));
    }
    if let Some(v) = &r.verdict_at_sup {
        let _ = writeln!(t, "status   {}", v.status);
    }
    let _ = writeln!(t, "probes   {}", r.probes);
    Ok(Report::ok(t, to_value(&r)))
}

fn run_gap(
    x: &Loaded,
    p: f64,
    samples: Option<usize>,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<Report, Error> {
    let g = negative_type_gap(&x.space, p, tol)?;
    let mut t = String::new();
    let _ = writeln!(t, "p             {}", num(g.p));
    let _ = writeln!(t, "gamma         {}", ext(g.gamma));
    let _ = writeln!(t, "status        {}", g.status);
    let _ = writeln!(t, "arg simplex   {}", simplex_text(&g.arg_simplex));
    let _ = writeln!(t, "bipartitions  {}", g.bipartitions_searched);
    let _ = writeln!(t, "scale         {}", num(g.scale));
    let mut json = to_value(&g);
    if let Some(n) = samples {
        let o = brute_force_gap(&x.space, p, n, seed)?;
        let _ = writeln!(t, "oracle        {} ({} samples)", num(o.value), o.samples);
        json["oracle"] = to_value(&o);
    }
    let code = if g.converged {
        0
    } else {
        let _ = writeln!(t, "warning: {} cells did not converge", g.unconverged_cells);
        eprintln!(
            "warning: {} of {} cells hit the iteration cap",
            g.unconverged_cells, g.bipartitions_searched
        );
        3
    };
    Ok(Report {
        text: t,
        json,
        code,
    })
}

fn run_zeta(
    x: &Loaded,
    p: f64,
    gamma: Option<f64>,
    tol: &ToleranceConfig,
) -> Result<Report, Error> {
    let (gamma, source, code) = match (gamma, &x.tree) {
        (Some(g), _) => (g, "given", 0),
        (None, Some(tree)) if p == 1.0 => (tree_gap(tree), "tree formula", 0),
        (None, _) => {
            let g = negative_type_gap(&x.space, p, tol)?;
            let v = g
                .gamma
                .finite()
                .ok_or(Error::NegativeGap(f64::NEG_INFINITY))?;
            (v, "optimizer", if g.converged { 0 } else { 3 })
        }
    };
    let z = zeta_bound(&x.space, p, gamma)?;
    let mut t = String::new();
    let _ = writeln!(t, "p         {}", num(z.p));
    let _ = writeln!(t, "gamma     {} ({source})", num(z.gamma_gap));
    let _ = writeln!(t, "diam^p    {}", num(z.diam_p));
    let _ = writeln!(t, "n         {}", z.n);
    let _ = writeln!(t, "gamma(n)  {}", num(z.gamma_n));
    let _ = writeln!(t, "D         {}", num(z.frak_d));
    let _ = writeln!(t, "zeta      {}", ext(z.zeta));
    let _ = writeln!(
        t,
        "interval  [{}, {})",
        num(z.interval_lo),
        ext(z.interval_hi)
    );
    if code == 3 {
        eprintln!("warning: gap optimizer did not converge");
        let _ = writeln!(t, "warning: gap optimizer did not converge");
    }
    Ok(Report {
        text: t,
        json: to_value(&z),
        code,
    })
}

#[derive(Serialize)]
struct TreeBoundReport {
    n: usize,
    diameter: f64,
    gamma_n: f64,
    lower_bound: f64,
    /// Exact value when the tree is a unit star.
    star_exact: Option<f64>,
}

fn is_star(tree: &WeightedTree) -> bool {
    let n = tree.vertex_count();
    let mut degree = vec![0usize; n];
    for &(u, v, _) in tree.edges() {
        degree[u] += 1;
        degree[v] += 1;
    }
    degree.iter().any(|&d| d == n - 1)
}

fn run_tree_bound(x: &Loaded) -> Result<Report, Error> {
    let tree = x
        .tree
        .as_ref()
        .ok_or_else(|| Error::NotATree("tree-bound needs --tree or a tree generator".into()))?;
    let n = tree.vertex_count();
    let r = TreeBoundReport {
        n,
        diameter: x.space.diameter(),
        gamma_n: gamma_fn(n)?,
        lower_bound: tree_type_lower_bound(tree)?,
        star_exact: if is_star(tree) {
            Some(star_exact_type(n)?)
        } else {
            None
        },
    };
    let mut t = String::new();
    let _ = writeln!(t, "n            {}", r.n);
    let _ = writeln!(t, "diameter     {}", num(r.diameter));
    let _ = writeln!(t, "gamma(n)     {}", num(r.gamma_n));
    let _ = writeln!(t, "lower bound  {}", num(r.lower_bound));
    if let Some(s) = r.star_exact {
        let _ = writeln!(t, "star exact   {}", num(s));
    }
    Ok(Report::ok(t, to_value(&r)))
}

fn parse_grid(spec: &str) -> Result<Vec<f64>, Error> {
    let bad = || Error::Parse(format!("grid must be start:end:step, got {spec:?}"));
    let parts: Vec<f64> = spec
        .split(':')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    let [start, end, step] = parts[..] else {
        return Err(bad());
    };
    if !(step > 0.0 && start.is_finite() && end.is_finite() && end >= start) {
        return Err(Error::BadGrid);
    }
    let count = ((end - start) / step + 1e-9).floor() as usize;
    Ok((0..=count).map(|k| start + step * k as f64).collect())
}

fn run_scan(x: &Loaded, grid: &str, tol: &ToleranceConfig) -> Result<Report, Error> {
    let points = interval_scan(&x.space, &parse_grid(grid)?, tol)?;
    let mut t = String::new();
    let _ = writeln!(t, "{:<14}{:<10}critical value", "q", "status");
    for p in &points {
        let _ = writeln!(
            t,
            "{:<14}{:<10}{}",
            num(p.q),
            p.status.to_string(),
            num(p.critical_value)
        );
    }
    Ok(Report::ok(t, json!({ "points": points })))
}

fn run_gen(x: &Loaded) -> Report {
    Report::ok(write_matrix_csv(&x.space), x.space.to_json_value())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::IntervalAnomaly { .. } | Error::EigensolverFailure { .. } => 3,
        _ => 2,
    }
}

fn emit(r: Result<Report, Error>, json: bool) -> ExitCode {
    match r {
        Ok(r) => {
            if json {
                println!("{}", serde_json::to_string(&r.json).expect("JSON value"));
            } else {
                print!("{}", r.text);
            }
            ExitCode::from(r.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run_verify(matrices: &[PathBuf], samples: usize, opts: &Opts) -> ExitCode {
    let tol = match opts.tolerances() {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let extra = matrices
        .iter()
        .map(|p| (p.display().to_string(), read_matrix_csv(p)))
        .collect();
    let cfg = VerifyConfig {
        seed: opts.seed,
        samples,
        tol,
    };
    let report = run_suite(&cfg, extra);
    print!("{}", report.render());
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (input, opts) = match &cli.command {
        Command::Verify {
            matrix,
            samples,
            opts,
        } => return run_verify(matrix, *samples, opts),
        Command::Check { input, opts, .. }
        | Command::Sup { input, opts }
        | Command::Gap { input, opts, .. }
        | Command::Zeta { input, opts, .. }
        | Command::TreeBound { input, opts }
        | Command::Scan { input, opts, .. }
        | Command::Gen { input, opts } => (input, opts),
    };
    let result = opts.tolerances().and_then(|tol| {
        let x = load(input, opts.seed)?;
        match &cli.command {
            Command::Check { q, .. } => run_check(&x, *q, &tol),
            Command::Sup { .. } => run_sup(&x, &tol),
            Command::Gap { p, samples, .. } => run_gap(&x, *p, *samples, opts.seed, &tol),
            Command::Zeta { p, gamma, .. } => run_zeta(&x, *p, *gamma, &tol),
            Command::TreeBound { .. } => run_tree_bound(&x),
            Command::Scan { grid, .. } => run_scan(&x, grid, &tol),
            Command::Gen { .. } => Ok(run_gen(&x)),
            Command::Verify { .. } => unreachable!("handled above"),
        }
    });
    emit(result, opts.json)
}
