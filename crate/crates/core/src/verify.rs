//! Property suites over a seeded corpus of spaces.
//!
//! [`run_suite`] evaluates every invariant of the library on the default
//! corpus plus any caller-supplied inputs and collects one [`PropertyOutcome`]
//! per property. Inputs that fail to load are listed as rejected and the
//! remaining suites still run.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{gamma_fn, star_exact_type, tree_type_lower_bound, zeta_bound};
use crate::checker::{
    check, interval_scan, supremal_negative_type, witness_null_simplex, FormSpectrum, Status,
};
use crate::error::Result;
use crate::extended::ExtendedReal;
use crate::gap::{
    brute_force_gap, gap_from_eta, negative_type_gap, simplex_gap, tree_gap, LoadedSimplex,
};
use crate::generators::{
    gen_circle, gen_discrete, gen_enflo_truncation, gen_path, gen_random_semimetric, WeightedTree,
};
use crate::io::format_sig;
use crate::linalg::quadratic_form;
use crate::qp::SimplexQp;
use crate::space::FiniteSemiMetricSpace;
use crate::tolerance::ToleranceConfig;

/// One named space; `tree` is set for tree metrics.
#[derive(Debug, Clone)]
pub struct CorpusEntry {
    pub name: String,
    pub space: FiniteSemiMetricSpace,
    pub tree: Option<WeightedTree>,
}

impl CorpusEntry {
    fn plain(name: impl Into<String>, space: FiniteSemiMetricSpace) -> Self {
        Self {
            name: name.into(),
            space,
            tree: None,
        }
    }

    fn tree(name: impl Into<String>, tree: WeightedTree) -> Self {
        Self {
            name: name.into(),
            space: tree.space(),
            tree: Some(tree),
        }
    }
}

/// Discrete spaces, unit paths and stars, seeded random unit trees, circles
/// and seeded random semi-metrics. Everything has at most 8 points.
pub fn default_corpus(seed: u64) -> Result<Vec<CorpusEntry>> {
    use std::f64::consts::PI;
    let mut c = vec![];
    for n in 3..=5 {
        c.push(CorpusEntry::plain(
            format!("discrete:{n}"),
            gen_discrete(n)?,
        ));
    }
    for n in 3..=6 {
        c.push(CorpusEntry::tree(
            format!("path:{n}"),
            WeightedTree::path(n, 1.0)?,
        ));
    }
    for k in 3..=5 {
        c.push(CorpusEntry::tree(
            format!("star:{k}"),
            WeightedTree::star(k, 1.0)?,
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in [5, 6, 7] {
        let s = rng.random::<u64>();
        c.push(CorpusEntry::tree(
            format!("tree:{n},{s}"),
            WeightedTree::random(n, s, 1.0, 1.0)?,
        ));
    }
    c.push(CorpusEntry::plain(
        "circle:0;pi/2;pi;3pi/2",
        gen_circle(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0])?,
    ));
    c.push(CorpusEntry::plain(
        "circle:0;2pi/3;4pi/3",
        gen_circle(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0])?,
    ));
    c.push(CorpusEntry::plain(
        "circle:0;1;2.5;4",
        gen_circle(&[0.0, 1.0, 2.5, 4.0])?,
    ));
    for (n, lo, hi) in [
        (4, 1.0, 1.5),
        (5, 1.0, 1.5),
        (5, 0.5, 2.0),
        (6, 1.0, 1.5),
        (6, 0.5, 2.0),
    ] {
        let s = rng.random::<u64>();
        c.push(CorpusEntry::plain(
            format!("random:{n},{s},{lo},{hi}"),
            gen_random_semimetric(n, s, lo, hi)?,
        ));
    }
    c.push(CorpusEntry::plain(
        "enflo:1.8,4,[2]",
        gen_enflo_truncation(1.8, &[2.0], 4)?,
    ));
    Ok(c)
}

#[derive(Debug, Clone)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Oracle sample count.
    pub samples: usize,
    pub tol: ToleranceConfig,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100_000,
            tol: ToleranceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyOutcome {
    pub module: &'static str,
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
    /// First failing case.
    pub detail: Option<String>,
}

impl PropertyOutcome {
    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub outcomes: Vec<PropertyOutcome>,
    /// `(input name, reason)` for inputs that could not be loaded.
    pub rejected: Vec<(String, String)>,
    pub corpus_size: usize,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(PropertyOutcome::passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "corpus: {} spaces (seed {})",
            self.corpus_size, self.seed
        );
        for (name, why) in &self.rejected {
            let _ = writeln!(out, "rejected input {name}: {why}");
        }
        for o in &self.outcomes {
            let tag = if o.passed() { "PASS" } else { "FAIL" };
            let _ = write!(
                out,
                "{tag}  {}::{}  ({} checked, {} failed)",
                o.module, o.name, o.checked, o.failed
            );
            if let Some(d) = &o.detail {
                let _ = write!(out, "  first failure: {d}");
            }
            out.push('\n');
        }
        let failed = self.outcomes.iter().filter(|o| !o.passed()).count();
        let _ = writeln!(
            out,
            "{} properties, {} passed, {} failed",
            self.outcomes.len(),
            self.outcomes.len() - failed,
            failed
        );
        out
    }
}

struct Tally {
    module: &'static str,
    name: &'static str,
    checked: usize,
    failed: usize,
    detail: Option<String>,
}

impl Tally {
    fn new(module: &'static str, name: &'static str) -> Self {
        Self {
            module,
            name,
            checked: 0,
            failed: 0,
            detail: None,
        }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.detail.is_none() {
                self.detail = Some(what());
            }
        }
    }

    fn expect<T>(&mut self, r: Result<T>, ctx: impl FnOnce() -> String) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.record(false, || format!("{}: {e}", ctx()));
                None
            }
        }
    }

    fn done(self) -> PropertyOutcome {
        PropertyOutcome {
            module: self.module,
            name: self.name,
            checked: self.checked,
            failed: self.failed,
            detail: self.detail,
        }
    }
}

fn rel_close(a: f64, b: f64, rtol: f64) -> bool {
    (a - b).abs() <= rtol * a.abs().max(b.abs())
}

/// Runs every property on the default corpus for `cfg.seed` plus `extra`.
pub fn run_suite(
    cfg: &VerifyConfig,
    extra: Vec<(String, Result<FiniteSemiMetricSpace>)>,
) -> VerifyReport {
    let mut rejected = vec![];
    let mut corpus = match default_corpus(cfg.seed) {
        Ok(c) => c,
        Err(e) => {
            rejected.push(("default corpus".into(), e.to_string()));
            vec![]
        }
    };
    for (name, loaded) in extra {
        match loaded {
            Ok(space) => corpus.push(CorpusEntry::plain(name, space)),
            Err(e) => rejected.push((name, e.to_string())),
        }
    }
    let tol = &cfg.tol;
    let sups: Vec<Option<ExtendedReal>> = corpus
        .iter()
        .map(|e| supremal_negative_type(&e.space, tol).ok().map(|r| r.p_sup))
        .collect();
    let ctx = Ctx {
        cfg,
        corpus: &corpus,
        sups: &sups,
    };
    let suites: [fn(&Ctx) -> PropertyOutcome; 23] = [
        space_roundtrip,
        path_diameter,
        scaled_diameter_invariance,
        exponent_additivity,
        enflo_structure,
        status_scale_invariance,
        oracle_equivalence,
        strict_below_nonfailing,
        supremal_is_boundary,
        failing_witness,
        eta_identity,
        tree_formula,
        strict_iff_positive_gap,
        oracle_sandwich,
        gap_scaling,
        uniform_maximizer,
        gamma_monotone,
        gamma_dominates_splits,
        zeta_soundness,
        zeta_scale_invariance,
        tree_bound_consistency,
        json_roundtrip,
        table_json_agreement,
    ];
    VerifyReport {
        seed: cfg.seed,
        outcomes: suites.iter().map(|f| f(&ctx)).collect(),
        rejected,
        corpus_size: corpus.len(),
    }
}

struct Ctx<'a> {
    cfg: &'a VerifyConfig,
    corpus: &'a [CorpusEntry],
    sups: &'a [Option<ExtendedReal>],
}

impl Ctx<'_> {
    fn finite_sups(&self) -> impl Iterator<Item = (&CorpusEntry, f64)> {
        self.corpus
            .iter()
            .zip(self.sups)
            .filter_map(|(e, s)| s.and_then(ExtendedReal::finite).map(|p| (e, p)))
    }

    fn small(&self, max_n: usize) -> impl Iterator<Item = &CorpusEntry> {
        self.corpus.iter().filter(move |e| e.space.len() <= max_n)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ salt.wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }
}

fn space_roundtrip(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("core_space", "matrix_and_json_roundtrip");
    for e in ctx.corpus {
        let rows = e.space.to_rows();
        let ok = FiniteSemiMetricSpace::from_matrix(&rows).is_ok_and(|y| y.to_rows() == rows);
        t.record(ok, || format!("{}: matrix round-trip differs", e.name));
        let ok = FiniteSemiMetricSpace::from_json(&e.space.to_json()).is_ok_and(|y| y == e.space);
        t.record(ok, || format!("{}: JSON round-trip differs", e.name));
    }
    t.done()
}

fn path_diameter(_: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("core_space", "unit_path_diameter");
    for n in 2..=12 {
        if let Some(x) = t.expect(gen_path(n, 1.0), || format!("path {n}")) {
            let want = (n - 1) as f64;
            t.record(x.diameter() == want && x.scaled_diameter() == want, || {
                format!(
                    "path {n}: diam {} scaled {}",
                    x.diameter(),
                    x.scaled_diameter()
                )
            });
        }
    }
    t.done()
}

fn scaled_diameter_invariance(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("core_space", "scaled_diameter_rescale_invariant");
    for e in ctx.corpus {
        for c in [1e-3, 0.37, 2.5, 1e4] {
            if let Some(y) = t.expect(e.space.rescale(c), || e.name.clone()) {
                let (a, b) = (e.space.scaled_diameter(), y.scaled_diameter());
                t.record(rel_close(a, b, 4.0 * f64::EPSILON), || {
                    format!("{} c={c}: {a} vs {b}", e.name)
                });
            }
        }
    }
    t.done()
}

fn exponent_additivity(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("core_space", "power_exponent_additivity");
    for e in ctx.corpus {
        for (p, q) in [(0.5, 0.5), (1.0, 1.3), (0.25, 2.0), (0.0, 1.7)] {
            let mats = (
                e.space.power_matrix(p),
                e.space.power_matrix(q),
                e.space.power_matrix(p + q),
            );
            let (Ok(a), Ok(b), Ok(s)) = mats else {
                t.record(false, || format!("{}: power matrix error", e.name));
                continue;
            };
            let n = e.space.len();
            let ok = (0..n).all(|i| {
                (0..n).all(|j| i == j || rel_close(a[(i, j)] * b[(i, j)], s[(i, j)], 1e-12))
            });
            t.record(ok, || format!("{} p={p} q={q}", e.name));
        }
    }
    t.done()
}

fn enflo_structure(_: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("core_space", "enflo_block_distances");
    let cases: [(f64, &[f64], usize); 4] = [
        (1.8, &[2.0], 4),
        (1.5, &[1.7, 1.6], 4),
        (1.0, &[3.0, 2.0, 1.5], 2),
        (2.5, &[4.0, 3.0], 8),
    ];
    for (target, exps, n) in cases {
        let Some(x) = t.expect(gen_enflo_truncation(target, exps, n), || {
            format!("{exps:?}")
        }) else {
            continue;
        };
        let place = |p: usize| (p / (2 * n), (p / n) % 2);
        let mut ok = true;
        for a in 0..x.len() {
            for b in 0..x.len() {
                if a == b {
                    continue;
                }
                let ((ka, sa), (kb, sb)) = (place(a), place(b));
                let d = x.d(a, b);
                ok &= if ka == kb && sa != sb {
                    d > 0.5 && d < 1.0
                } else {
                    d == 1.0
                };
            }
        }
        t.record(ok, || format!("target {target} exps {exps:?} n {n}"));
    }
    t.done()
}

const GRID: [f64; 6] = [0.25, 0.5, 1.0, 1.5, 2.0, 3.0];

fn status_scale_invariance(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("negtype_checker", "status_rescale_invariant");
    for e in ctx.corpus {
        for c in [0.01, 0.5, 7.0, 300.0] {
            let Some(y) = t.expect(e.space.rescale(c), || e.name.clone()) else {
                continue;
            };
            for q in GRID {
                let pair = (check(&e.space, q, &ctx.cfg.tol), check(&y, q, &ctx.cfg.tol));
                let (Ok(a), Ok(b)) = pair else {
                    t.record(false, || format!("{} q={q}: checker error", e.name));
                    continue;
                };
                t.record(a.status == b.status, || {
                    format!("{} c={c} q={q}: {} vs {}", e.name, a.status, b.status)
                });
            }
        }
    }
    t.done()
}

fn oracle_equivalence(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("negtype_checker", "verdict_matches_oracle");
    let mut rng = ctx.rng(1);
    for k in 0..12 {
        let n = 3 + k % 4;
        let s = rng.random::<u64>();
        let Some(x) = t.expect(gen_random_semimetric(n, s, 0.5, 2.0), || {
            format!("random {n},{s}")
        }) else {
            continue;
        };
        for q in [0.5, 1.0, 2.0] {
            let Some(v) = t.expect(FormSpectrum::new(&x, q), || format!("random {n},{s}")) else {
                continue;
            };
            let status = v.status(&ctx.cfg.tol);
            let Some(o) = t.expect(brute_force_gap(&x, q, ctx.cfg.samples, s), || {
                format!("oracle {n},{s}")
            }) else {
                continue;
            };
            let band = 1e-9 * v.scale;
            let ok = match status {
                Status::Strict => o.value > band,
                Status::Boundary => o.value > -band,
                Status::Fail => o.value < 0.0,
            };
            t.record(ok, || {
                format!("random {n},{s} q={q}: {status} but oracle {}", o.value)
            });
        }
    }
    t.done()
}

fn strict_below_nonfailing(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("negtype_checker", "strict_below_any_nonfailing_exponent");
    for e in ctx.corpus {
        for p in GRID {
            let Some(v) = t.expect(check(&e.space, p, &ctx.cfg.tol), || e.name.clone()) else {
                continue;
            };
            if v.status == Status::Fail {
                continue;
            }
            for k in 0..10 {
                let q = p * k as f64 / 10.0;
                let s = check(&e.space, q, &ctx.cfg.tol).map(|v| v.status);
                t.record(s == Ok(Status::Strict), || {
                    format!("{} p={p} q={q}: {s:?}", e.name)
                });
            }
        }
    }
    t.done()
}

fn supremal_is_boundary(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("negtype_checker", "supremal_exponent_not_strict");
    for (e, p) in ctx.finite_sups() {
        let s = check(&e.space, p, &ctx.cfg.tol).map(|v| v.status);
        t.record(s == Ok(Status::Boundary), || {
            format!("{} at {p}: {s:?}", e.name)
        });
        if let Some(w) = t.expect(witness_null_simplex(&e.space, &ctx.cfg.tol), || {
            e.name.clone()
        }) {
            t.record(w.gap.abs() <= 1e-6 * w.scale, || {
                format!("{}: null gap {}", e.name, w.gap)
            });
        }
    }
    t.done()
}

fn failing_witness(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("negtype_checker", "failing_witness_violates_form");
    for (e, p) in ctx.finite_sups() {
        for q in [p * 1.05, p + 0.5, p + 2.0] {
            let Some(v) = t.expect(check(&e.space, q, &ctx.cfg.tol), || e.name.clone()) else {
                continue;
            };
            if v.status != Status::Fail {
                t.record(false, || {
                    format!("{} q={q}: {} above the supremum", e.name, v.status)
                });
                continue;
            }
            let form = match (&v.witness, e.space.power_matrix(q)) {
                (Some(w), Ok(m)) => quadratic_form(&m, w),
                _ => f64::NAN,
            };
            t.record(form > 0.0, || format!("{} q={q}: form {form}", e.name));
        }
    }
    t.done()
}

fn random_eta(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    loop {
        let eta: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        let pos: f64 = eta.iter().filter(|v| **v > 0.0).sum();
        let neg: f64 = -eta.iter().filter(|v| **v < 0.0).sum::<f64>();
        if pos > 0.0 && neg > 0.0 {
            return eta
                .into_iter()
                .map(|v| if v > 0.0 { v / pos } else { v / neg })
                .collect();
        }
    }
}

fn eta_identity(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("simplex_gap", "load_vector_identity");
    let mut rng = ctx.rng(2);
    for _ in 0..200 {
        let n = rng.random_range(2..=8);
        let s = rng.random::<u64>();
        let p = rng.random_range(0.0..3.0);
        let Some(x) = t.expect(gen_random_semimetric(n, s, 0.2, 5.0), || {
            format!("random {n},{s}")
        }) else {
            continue;
        };
        let eta = random_eta(&mut rng, n);
        let via_eta = gap_from_eta(&x, &eta, p);
        let direct = LoadedSimplex::from_eta(&eta, 0.0).and_then(|sx| simplex_gap(&x, &sx, p));
        let scale = x.diameter().powf(p).max(1.0);
        match (via_eta, direct) {
            (Ok(a), Ok(b)) => t.record((a - b).abs() <= 1e-12 * scale, || {
                format!("n={n} p={p}: {a} vs {b}")
            }),
            (a, b) => t.record(false, || format!("n={n} p={p}: {a:?} / {b:?}")),
        }
    }
    t.done()
}

fn tree_formula(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("simplex_gap", "tree_gap_matches_optimizer");
    let mut rng = ctx.rng(3);
    for _ in 0..20 {
        let n = rng.random_range(3..=9);
        let s = rng.random::<u64>();
        let Some(tree) = t.expect(WeightedTree::random(n, s, 0.5, 3.0), || {
            format!("tree {n},{s}")
        }) else {
            continue;
        };
        if let Some(g) = t.expect(negative_type_gap(&tree.space(), 1.0, &ctx.cfg.tol), || {
            format!("tree {n},{s}")
        }) {
            let (a, b) = (g.gamma.to_f64(), tree_gap(&tree));
            t.record((a - b).abs() <= 1e-5, || {
                format!("tree {n},{s}: {a} vs {b}")
            });
        }
    }
    t.done()
}

fn strict_iff_positive_gap(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("simplex_gap", "strict_iff_positive_gap");
    let tol = &ctx.cfg.tol;
    for (e, p_sup) in ctx.corpus.iter().zip(ctx.sups) {
        if e.space.len() > 8 {
            continue;
        }
        let n = e.space.len();
        let mut exps = vec![0.5, 1.0];
        if let Some(p) = p_sup.and_then(ExtendedReal::finite) {
            exps.push(p);
        }
        for q in exps {
            let Some(spec) = t.expect(FormSpectrum::new(&e.space, q), || e.name.clone()) else {
                continue;
            };
            let Some(g) = t.expect(negative_type_gap(&e.space, q, tol), || e.name.clone()) else {
                continue;
            };
            let gamma = g.gamma.to_f64();
            let ok = match spec.status(tol) {
                Status::Strict => {
                    let mass = 1.0 / (n / 2) as f64 + 1.0 / n.div_ceil(2) as f64;
                    let floor = 0.5 * spec.min_eigenvalue() * mass;
                    gamma > 0.0 && gamma >= floor - tol.qp_tol * g.scale
                }
                Status::Boundary => gamma.abs() <= 1e-6 * g.scale,
                Status::Fail => {
                    gamma == f64::NEG_INFINITY
                        && simplex_gap(&e.space, &g.arg_simplex, q).is_ok_and(|v| v < 0.0)
                }
            };
            t.record(ok, || {
                format!("{} q={q}: {} with gap {gamma}", e.name, g.status)
            });
        }
    }
    t.done()
}

fn oracle_sandwich(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("simplex_gap", "oracle_sandwich");
    let tol = &ctx.cfg.tol;
    for e in ctx.small(6) {
        for q in [0.5, 1.0, 1.5] {
            let Some(g) = t.expect(negative_type_gap(&e.space, q, tol), || e.name.clone()) else {
                continue;
            };
            let Some(gamma) = g.gamma.finite() else {
                continue;
            };
            let Some(o) = t.expect(
                brute_force_gap(&e.space, q, ctx.cfg.samples, ctx.cfg.seed),
                || e.name.clone(),
            ) else {
                continue;
            };
            let ok = o.value >= gamma - tol.qp_tol * g.scale && o.value - gamma <= 5e-3 * g.scale;
            t.record(ok, || {
                format!("{} q={q}: oracle {} vs {gamma}", e.name, o.value)
            });
        }
    }
    t.done()
}

fn gap_scaling(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("simplex_gap", "gap_scales_with_power");
    let tol = &ctx.cfg.tol;
    for e in ctx.small(6) {
        for (q, c) in [(1.0, 3.0), (0.5, 0.2), (1.5, 11.0)] {
            let Some(y) = t.expect(e.space.rescale(c), || e.name.clone()) else {
                continue;
            };
            let pair = (
                negative_type_gap(&e.space, q, tol),
                negative_type_gap(&y, q, tol),
            );
            let (Ok(a), Ok(b)) = pair else {
                t.record(false, || format!("{}: solver error", e.name));
                continue;
            };
            let ok = match (a.gamma.finite(), b.gamma.finite()) {
                (Some(ga), Some(gb)) => (gb - c.powf(q) * ga).abs() <= 1e-9 * gb.abs().max(b.scale),
                _ => a.gamma == b.gamma,
            };
            t.record(ok, || {
                format!("{} q={q} c={c}: {} vs {}", e.name, a.gamma, b.gamma)
            });
        }
    }
    t.done()
}

fn uniform_maximizer(_: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("simplex_gap", "pairwise_product_max_at_uniform");
    for s in 1..=6 {
        // -sum_{k1<k2} l_k1 l_k2 = 1/2 x^T (I - J) x on the simplex
        let h = DMatrix::from_fn(s, s, |i, j| if i == j { 0.0 } else { -1.0 });
        let groups = [(0..s).collect::<Vec<_>>()];
        let sol = SimplexQp {
            hessian: &h,
            groups: &groups,
            lipschitz: 1.0,
            tol: 1e-12,
            max_iter: 100_000,
        }
        .solve();
        let want = 0.5 * (1.0 - 1.0 / s as f64);
        let uniform = sol.x.iter().all(|v| (v - 1.0 / s as f64).abs() <= 1e-8);
        t.record(uniform && (-sol.value - want).abs() <= 1e-8, || {
            format!("s={s}: value {} at {:?}", -sol.value, sol.x)
        });
    }
    t.done()
}

fn gamma_monotone(_: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("bounds", "gamma_strictly_increasing");
    for m in 2..1000 {
        let pair = (gamma_fn(m), gamma_fn(m + 1));
        t.record(matches!(pair, (Ok(a), Ok(b)) if b > a), || {
            format!("m={m}: {pair:?}")
        });
    }
    t.done()
}

fn gamma_dominates_splits(_: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("bounds", "gamma_bounds_every_split");
    for m in 2..=40 {
        let Some(g) = t.expect(gamma_fn(m), || format!("m={m}")) else {
            continue;
        };
        for s in 1..m {
            let u = m - s;
            let v = 0.5 * (1.0 - 1.0 / s as f64) + 0.5 * (1.0 - 1.0 / u as f64);
            t.record(v <= g + 1e-15, || format!("m={m} s={s}: {v} > {g}"));
        }
    }
    t.done()
}

fn zeta_soundness(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("bounds", "zeta_interval_is_strict");
    let tol = &ctx.cfg.tol;
    for (e, _) in ctx.finite_sups() {
        if e.space.len() > 8 {
            continue;
        }
        for p in [0.5, 1.0] {
            let Some(g) = t.expect(negative_type_gap(&e.space, p, tol), || e.name.clone()) else {
                continue;
            };
            let Some(gamma) = g.gamma.finite().filter(|v| *v > 0.0) else {
                continue;
            };
            let Some(z) = t.expect(zeta_bound(&e.space, p, gamma), || e.name.clone()) else {
                continue;
            };
            let Some(zeta) = z.zeta.finite() else {
                continue;
            };
            let hi = p + zeta - 1e-6;
            if hi > p {
                let grid: Vec<f64> = (0..20).map(|k| p + (hi - p) * k as f64 / 19.0).collect();
                let scan = interval_scan(&e.space, &grid, tol);
                let ok = scan
                    .as_ref()
                    .is_ok_and(|pts| pts.iter().all(|s| s.status == Status::Strict));
                t.record(ok, || {
                    format!("{} p={p} zeta={zeta}: scan {scan:?}", e.name)
                });
            }
            let end = check(&e.space, p + zeta, tol).map(|v| v.status);
            t.record(matches!(end, Ok(s) if s != Status::Fail), || {
                format!("{} p={p}: {end:?} at p + zeta = {}", e.name, p + zeta)
            });
        }
    }
    t.done()
}

fn zeta_scale_invariance(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("bounds", "zeta_rescale_invariant");
    for e in ctx.corpus {
        for (p, gamma, c) in [(1.0, 0.2, 3.0), (0.5, 0.05, 0.1), (2.0, 1.0, 17.0)] {
            let Some(y) = t.expect(e.space.rescale(c), || e.name.clone()) else {
                continue;
            };
            let pair = (
                zeta_bound(&e.space, p, gamma),
                zeta_bound(&y, p, c.powf(p) * gamma),
            );
            let (Ok(a), Ok(b)) = pair else {
                t.record(false, || format!("{}: zeta error", e.name));
                continue;
            };
            let ok = match (a.zeta, b.zeta) {
                (ExtendedReal::Finite(u), ExtendedReal::Finite(v)) => rel_close(u, v, 1e-9),
                (u, v) => u == v,
            };
            t.record(ok, || format!("{} c={c}: {} vs {}", e.name, a.zeta, b.zeta));
        }
    }
    t.done()
}

fn tree_bound_consistency(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("bounds", "tree_bounds_below_supremum");
    let tol = &ctx.cfg.tol;
    for (e, sup) in ctx.corpus.iter().zip(ctx.sups) {
        let Some(tree) = e
            .tree
            .as_ref()
            .filter(|tr| tr.is_unit_weight() && tr.vertex_count() >= 3)
        else {
            continue;
        };
        let (Ok(bound), Some(p)) = (
            tree_type_lower_bound(tree),
            sup.and_then(ExtendedReal::finite),
        ) else {
            t.record(false, || format!("{}: no bound or supremum", e.name));
            continue;
        };
        t.record(bound <= p + tol.bisect_tol, || {
            format!("{}: bound {bound} > {p}", e.name)
        });
    }
    for n in 3..=7 {
        let sup =
            WeightedTree::star(n - 1, 1.0).and_then(|s| supremal_negative_type(&s.space(), tol));
        let exact = star_exact_type(n);
        let ok = match (&sup, &exact) {
            (Ok(s), Ok(x)) => s.p_sup.finite().is_some_and(|p| (p - x).abs() <= 1e-4),
            _ => false,
        };
        t.record(ok, || format!("star on {n} vertices: {sup:?} vs {exact:?}"));
    }
    t.done()
}

fn reserialized<T: serde::Serialize + serde::de::DeserializeOwned>(value: &T) -> bool {
    let Ok(text) = serde_json::to_string(value) else {
        return false;
    };
    serde_json::from_str::<T>(&text)
        .ok()
        .and_then(|v| serde_json::to_string(&v).ok())
        .is_some_and(|again| again == text)
}

fn json_roundtrip(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("cli", "json_reserializes_identically");
    let tol = &ctx.cfg.tol;
    for e in ctx.small(8) {
        let text = e.space.to_json();
        let ok = FiniteSemiMetricSpace::from_json(&text).is_ok_and(|y| y.to_json() == text);
        t.record(ok, || format!("{}: space", e.name));
        if let Ok(v) = check(&e.space, 1.5, tol) {
            t.record(reserialized(&v), || format!("{}: verdict", e.name));
        }
        if let Ok(s) = supremal_negative_type(&e.space, tol) {
            t.record(reserialized(&s), || format!("{}: supremum", e.name));
        }
        if let Ok(g) = negative_type_gap(&e.space, 1.0, tol) {
            t.record(reserialized(&g), || format!("{}: gap", e.name));
            if let Some(z) = g
                .gamma
                .finite()
                .and_then(|v| zeta_bound(&e.space, 1.0, v.max(0.0)).ok())
            {
                t.record(reserialized(&z), || format!("{}: zeta", e.name));
            }
        }
    }
    t.done()
}

fn table_json_agreement(ctx: &Ctx) -> PropertyOutcome {
    let mut t = Tally::new("cli", "table_matches_json_to_9_digits");
    let tol = &ctx.cfg.tol;
    for e in ctx.small(8) {
        let Ok(g) = negative_type_gap(&e.space, 1.0, tol) else {
            continue;
        };
        let Ok(text) = serde_json::to_string(&g) else {
            t.record(false, || format!("{}: serialize", e.name));
            continue;
        };
        let back: serde_json::Value = serde_json::from_str(&text).unwrap_or_default();
        let mut numbers = vec![(g.p, back["p"].as_f64()), (g.scale, back["scale"].as_f64())];
        if let Some(v) = g.gamma.finite() {
            numbers.push((v, back["gamma"].as_f64()));
        }
        for (shown, parsed) in numbers {
            let ok = parsed.is_some_and(|p| format_sig(p, 9) == format_sig(shown, 9));
            t.record(ok, || format!("{}: {shown} vs {parsed:?}", e.name));
        }
    }
    t.done()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_seeded() {
        let a = default_corpus(3).unwrap();
        let b = default_corpus(3).unwrap();
        let c = default_corpus(4).unwrap();
        let names = |v: &[CorpusEntry]| v.iter().map(|e| e.name.clone()).collect::<Vec<_>>();
        assert_eq!(names(&a), names(&b));
        assert_ne!(names(&a), names(&c));
        assert!(a.iter().all(|e| e.space.len() <= 8));
    }

    #[test]
    fn rejected_inputs_are_reported() {
        let bad = FiniteSemiMetricSpace::from_matrix(&[vec![0.0, 1.0], vec![2.0, 0.0]]);
        let mut r = VerifyReport {
            seed: 0,
            outcomes: vec![],
            rejected: vec![],
            corpus_size: 0,
        };
        if let Err(e) = bad {
            r.rejected.push(("bad.csv".into(), e.to_string()));
        }
        assert!(r.render().contains("rejected input bad.csv"));
        assert!(r.all_passed());
    }
}
