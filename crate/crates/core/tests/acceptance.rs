//! Acceptance criteria. Prints one PASS/FAIL line per item and exits nonzero
//! if any item fails.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use negtype_core::verify::{default_corpus, CorpusEntry};
use negtype_core::*;

type Outcome = std::result::Result<String, String>;
type Item<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn finite_sup(x: &FiniteSemiMetricSpace) -> Result<Option<f64>> {
    Ok(supremal_negative_type(x, &tol())?.p_sup.finite())
}

fn fail(msg: impl Into<String>) -> Outcome {
    Err(msg.into())
}

fn ac1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.random_range(3..=9);
        let seed = rng.random::<u64>();
        let tree = WeightedTree::random(n, seed, 0.5, 3.0).map_err(|e| e.to_string())?;
        let g = negative_type_gap(&tree.space(), 1.0, &tol()).map_err(|e| e.to_string())?;
        let err = (g.gamma.to_f64() - tree_gap(&tree)).abs();
        worst = worst.max(err);
        if err > 1e-5 {
            return fail(format!(
                "tree n={n} seed={seed}: QP {} vs formula {}",
                g.gamma,
                tree_gap(&tree)
            ));
        }
    }
    Ok(format!(
        "20 random trees, max |QP - harmonic| = {worst:.2e} (limit 1e-5)"
    ))
}

fn ac2() -> Outcome {
    let mut worst: f64 = 0.0;
    for k in 2..=6 {
        let p = finite_sup(&gen_star(k, 1.0).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .ok_or("unbounded star supremum")?;
        let want = 1.0 + (1.0 / (k - 1) as f64).ln_1p() / 2f64.ln();
        let err = (p - want).abs();
        worst = worst.max(err);
        if err > 1e-4 || (k == 2 && err > 1e-6) {
            return fail(format!("k={k}: bisection {p} vs formula {want}"));
        }
    }
    Ok(format!(
        "stars k=2..6, max |p_sup - formula| = {worst:.2e} (limit 1e-4)"
    ))
}

fn ac3(corpus: &[CorpusEntry]) -> Outcome {
    let mut count = 0;
    for e in corpus {
        let Some(tree) = e.tree.as_ref().filter(|t| t.is_unit_weight()) else {
            continue;
        };
        let g = negative_type_gap(&e.space, 1.0, &tol()).map_err(|e| e.to_string())?;
        let z = zeta_bound(&e.space, 1.0, g.gamma.to_f64()).map_err(|e| e.to_string())?;
        let zeta = z.zeta.finite().ok_or("infinite zeta on a tree")?;
        let p = finite_sup(&e.space)
            .map_err(|e| e.to_string())?
            .ok_or("unbounded tree")?;
        if 1.0 + zeta > p + 1e-4 {
            return fail(format!(
                "{}: 1 + zeta = {} exceeds p_sup = {p}",
                e.name,
                1.0 + zeta
            ));
        }
        // the optimizer's gap and the tree formula must give the same bound
        let exact = zeta_bound(&e.space, 1.0, tree_gap(tree)).map_err(|e| e.to_string())?;
        if (exact.zeta.to_f64() - zeta).abs() > 1e-6 {
            return fail(format!("{}: zeta {zeta} vs {}", e.name, exact.zeta));
        }
        count += 1;
    }
    let p3 = gen_path(3, 1.0).map_err(|e| e.to_string())?;
    let g = negative_type_gap(&p3, 1.0, &tol()).map_err(|e| e.to_string())?;
    let z = zeta_bound(&p3, 1.0, g.gamma.to_f64()).map_err(|e| e.to_string())?;
    let p = finite_sup(&p3)
        .map_err(|e| e.to_string())?
        .ok_or("unbounded P3")?;
    let one_plus = 1.0 + z.zeta.to_f64();
    if (one_plus - 2.0).abs() > 1e-6 || (p - 2.0).abs() > 1e-6 {
        return fail(format!("P3: 1 + zeta = {one_plus}, p_sup = {p}"));
    }
    Ok(format!("{count} unit trees satisfy 1 + zeta <= p_sup + 1e-4; P3: 1 + zeta = {one_plus:.9}, p_sup = {p:.9}"))
}

fn ac4(corpus: &[CorpusEntry]) -> Outcome {
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for e in corpus {
        let Some(p) = finite_sup(&e.space).map_err(|e| e.to_string())? else {
            continue;
        };
        let v = check(&e.space, p, &tol()).map_err(|e| e.to_string())?;
        if v.status != Status::Boundary {
            return fail(format!("{}: {} at p_sup = {p}", e.name, v.status));
        }
        let w =
            witness_null_simplex(&e.space, &tol()).map_err(|err| format!("{}: {err}", e.name))?;
        let rel = w.gap.abs() / w.scale;
        worst = worst.max(rel);
        if rel > 1e-6 {
            return fail(format!("{}: null simplex gap {}", e.name, w.gap));
        }
        count += 1;
    }
    Ok(format!(
        "{count} spaces BOUNDARY at p_sup, max |null gap|/scale = {worst:.2e} (limit 1e-6)"
    ))
}

fn ac5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut counts = [0usize; 3];
    for k in 0..30 {
        let n = 3 + k % 4;
        let seed = rng.random::<u64>();
        let (lo, hi) = if k % 2 == 0 { (0.5, 2.0) } else { (1.0, 1.5) };
        let x = gen_random_semimetric(n, seed, lo, hi).map_err(|e| e.to_string())?;
        for q in [0.5, 1.0, 1.5] {
            let g = negative_type_gap(&x, q, &tol()).map_err(|e| e.to_string())?;
            let gamma = g.gamma.to_f64();
            let ok = match g.status {
                Status::Strict => gamma > 1e-8 * g.scale,
                Status::Boundary => gamma.abs() <= 1e-6 * g.scale,
                Status::Fail => simplex_gap(&x, &g.arg_simplex, q).is_ok_and(|v| v < 0.0),
            };
            if !ok {
                return fail(format!(
                    "n={n} seed={seed} q={q}: {} with gap {gamma}",
                    g.status
                ));
            }
            counts[g.status as usize] += 1;
        }
    }
    Ok(format!(
        "90 cases: {} STRICT with gap > 1e-8*scale, {} BOUNDARY, {} FAIL with negative simplex",
        counts[0], counts[1], counts[2]
    ))
}

fn ac6(corpus: &[CorpusEntry]) -> Outcome {
    let bisect = tol().bisect_tol;
    let mut count = 0;
    for e in corpus {
        let p = finite_sup(&e.space).map_err(|e| e.to_string())?;
        let top = p.unwrap_or(9.0) + 1.0;
        let grid: Vec<f64> = (0..40).map(|k| top * k as f64 / 39.0).collect();
        let pts =
            interval_scan(&e.space, &grid, &tol()).map_err(|err| format!("{}: {err}", e.name))?;
        let below = p.unwrap_or(f64::INFINITY) - bisect;
        if let Some(bad) = pts
            .iter()
            .find(|s| s.q < below && s.status != Status::Strict)
        {
            return fail(format!(
                "{}: {} at q = {} below p_sup",
                e.name, bad.status, bad.q
            ));
        }
        count += 1;
    }
    Ok(format!(
        "{count} spaces scanned on 40-point grids: no anomaly, STRICT below p_sup"
    ))
}

fn ac7() -> Outcome {
    let x1 = gen_enflo_truncation(1.8, &[2.0], 4).map_err(|e| e.to_string())?;
    let x2 = gen_enflo_truncation(1.5, &[1.7, 1.6], 4).map_err(|e| e.to_string())?;
    let p1 = finite_sup(&x1)
        .map_err(|e| e.to_string())?
        .ok_or("X1 unbounded")?;
    let p2 = finite_sup(&x2)
        .map_err(|e| e.to_string())?
        .ok_or("X2 unbounded")?;
    if x1.len() != 8 || x2.len() != 16 {
        return fail(format!("sizes {} and {}", x1.len(), x2.len()));
    }
    if (p1 - 2.0).abs() > 1e-3 || (p2 - 1.6).abs() > 1e-3 {
        return fail(format!("p_sup(X1) = {p1}, p_sup(X2) = {p2}"));
    }
    Ok(format!(
        "p_sup(X1, 8 points) = {p1:.6}, p_sup(X2, 16 points) = {p2:.6}"
    ))
}

fn ac8() -> Outcome {
    let square = gen_circle(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]).map_err(|e| e.to_string())?;
    let p = finite_sup(&square)
        .map_err(|e| e.to_string())?
        .ok_or("square unbounded")?;
    let at_one = check(&square, 1.0, &tol()).map_err(|e| e.to_string())?;
    if (p - 1.0).abs() > 1e-4 || at_one.status != Status::Boundary {
        return fail(format!("4 equispaced: p_sup = {p}, {} at 1", at_one.status));
    }
    let tri = gen_circle(&[0.0, 2.0 * PI / 3.0, 4.0 * PI / 3.0]).map_err(|e| e.to_string())?;
    let v = check(&tri, 1.0, &tol()).map_err(|e| e.to_string())?;
    if v.status != Status::Strict {
        return fail(format!("3 equispaced: {} at 1", v.status));
    }
    Ok(format!(
        "4 equispaced: p_sup = {p:.7}, BOUNDARY at 1; 3 equispaced STRICT at 1"
    ))
}

fn ac9(corpus: &[CorpusEntry]) -> Outcome {
    let mut cases = 0;
    let mut worst: f64 = 0.0;
    for e in corpus.iter().filter(|e| e.space.len() <= 5) {
        for q in [0.5, 1.0, 1.5, 2.0] {
            let g = negative_type_gap(&e.space, q, &tol()).map_err(|e| e.to_string())?;
            let o = brute_force_gap(&e.space, q, 100_000, 9).map_err(|e| e.to_string())?;
            let band = 1e-9 * g.scale;
            let agree = match g.status {
                Status::Strict => o.value > band,
                Status::Boundary => o.value > -band,
                Status::Fail => o.value < 0.0,
            };
            if !agree {
                return fail(format!(
                    "{} q={q}: {} but oracle {}",
                    e.name, g.status, o.value
                ));
            }
            if let Some(gamma) = g.gamma.finite() {
                let diff = (o.value - gamma) / g.scale;
                worst = worst.max(diff.abs());
                if !(-tol().qp_tol..=5e-3).contains(&diff) {
                    return fail(format!(
                        "{} q={q}: QP {gamma} vs oracle {}",
                        e.name, o.value
                    ));
                }
            }
            cases += 1;
        }
    }
    Ok(format!(
        "{cases} cases agree, max |oracle - QP|/scale = {worst:.2e} (limit 5e-3)"
    ))
}

fn ac10() -> Outcome {
    let table = [(2, 0.0), (3, 0.25), (4, 0.5), (5, 7.0 / 12.0)];
    for (m, want) in table {
        let v = gamma_fn(m).map_err(|e| e.to_string())?;
        if (v - want).abs() > 1e-15 {
            return fail(format!("gamma({m}) = {v}"));
        }
    }
    for s in 1..=6usize {
        let h = nalgebra::DMatrix::from_fn(s, s, |i, j| if i == j { 0.0 } else { -1.0 });
        let groups = [(0..s).collect::<Vec<_>>()];
        let sol = qp::SimplexQp {
            hessian: &h,
            groups: &groups,
            lipschitz: 1.0,
            tol: 1e-12,
            max_iter: 100_000,
        }
        .solve();
        let uniform = sol.x.iter().all(|v| (v - 1.0 / s as f64).abs() <= 1e-8);
        if !uniform || (-sol.value - 0.5 * (1.0 - 1.0 / s as f64)).abs() > 1e-8 {
            return fail(format!("s={s}: maximizer {:?}", sol.x));
        }
    }
    let mut checked = 0;
    for m in 2..=40 {
        let g = gamma_fn(m).map_err(|e| e.to_string())?;
        for s in 1..m {
            let t = (m - s) as f64;
            if 0.5 * (1.0 - 1.0 / s as f64) + 0.5 * (1.0 - 1.0 / t) > g + 1e-15 {
                return fail(format!("split {s}+{t} of {m}"));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "gamma table exact, uniform maximizer for s <= 6, {checked} splits for m <= 40"
    ))
}

fn main() {
    let corpus = default_corpus(0).expect("corpus builds");
    let items: Vec<Item> = vec![
        ("tree gap formula", Box::new(ac1)),
        ("star exponent", Box::new(ac2)),
        ("zeta soundness and sharpness", Box::new(|| ac3(&corpus))),
        ("supremal type is boundary", Box::new(|| ac4(&corpus))),
        ("strict iff positive gap", Box::new(ac5)),
        ("interval structure", Box::new(|| ac6(&corpus))),
        ("Enflo blocks", Box::new(ac7)),
        ("antipodal circle", Box::new(ac8)),
        ("oracle equivalence", Box::new(|| ac9(&corpus))),
        ("formula unit checks", Box::new(ac10)),
    ];
    let mut failures = 0;
    for (k, (name, run)) in items.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("AC{:<2} PASS  {name}: {msg} [{secs:.1}s]", k + 1),
            Err(msg) => {
                failures += 1;
                println!("AC{:<2} FAIL  {name}: {msg} [{secs:.1}s]", k + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        items.len() - failures,
        items.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
