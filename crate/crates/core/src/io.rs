//! Input formats: CSV distance matrices, whitespace edge lists and the
//! generator mini-language (`discrete:5`, `star:3,1`, `circle:0;pi/2`, ...).

use std::f64::consts::PI;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generators::{
    gen_circle, gen_discrete, gen_enflo_truncation, gen_random_semimetric, Edge, WeightedTree,
};
use crate::space::FiniteSemiMetricSpace;

/// Parses `n` rows of `n` comma-separated decimals. A first row whose first
/// token is not a number is a header; its tokens become point labels.
pub fn parse_matrix_csv(text: &str) -> Result<FiniteSemiMetricSpace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    let mut header = None;
    for (idx, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let first = rec.get(0).unwrap_or("");
        if idx == 0 && first.parse::<f64>().is_err() {
            header = Some(rec.iter().map(str::to_string).collect::<Vec<_>>());
            continue;
        }
        let row = rec
            .iter()
            .enumerate()
            .map(|(c, f)| {
                f.parse::<f64>().map_err(|_| {
                    Error::Parse(format!(
                        "row {}, column {}: not a number: {f:?}",
                        rows.len(),
                        c
                    ))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    let space = FiniteSemiMetricSpace::from_matrix(&rows)?;
    match header {
        Some(labels) if labels.len() == space.len() => space.with_labels(labels),
        _ => Ok(space),
    }
}

pub fn read_matrix_csv(path: &Path) -> Result<FiniteSemiMetricSpace> {
    parse_matrix_csv(&std::fs::read_to_string(path)?)
}

pub fn write_matrix_csv(x: &FiniteSemiMetricSpace) -> String {
    let mut out = String::new();
    for row in x.to_rows() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// One `u v weight` triple per line; blank lines and `#` comments skipped.
pub fn parse_tree_edges(text: &str) -> Result<WeightedTree> {
    let mut edges: Vec<Edge> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let tok: Vec<&str> = line.split_whitespace().collect();
        let bad = || {
            Error::Parse(format!(
                "line {}: expected `u v weight`, got {line:?}",
                lineno + 1
            ))
        };
        if tok.len() != 3 {
            return Err(bad());
        }
        let u = tok[0].parse::<usize>().map_err(|_| bad())?;
        let v = tok[1].parse::<usize>().map_err(|_| bad())?;
        let w = tok[2].parse::<f64>().map_err(|_| bad())?;
        edges.push((u, v, w));
    }
    WeightedTree::new(edges)
}

pub fn read_tree_edges(path: &Path) -> Result<WeightedTree> {
    parse_tree_edges(&std::fs::read_to_string(path)?)
}

/// `v` rounded to `digits` significant digits, plain decimal for moderate
/// magnitudes and scientific otherwise, trailing zeros trimmed.
pub fn format_sig(v: f64, digits: usize) -> String {
    if !v.is_finite() {
        return format!("{v}");
    }
    if v == 0.0 {
        return "0".into();
    }
    let digits = digits.max(1);
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let trim = |s: &str| {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{:.*}", decimals, v))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

/// A parsed generator expression.
#[derive(Debug, Clone, PartialEq)]
pub enum GenSpec {
    Discrete(usize),
    Star {
        leaves: usize,
        weight: f64,
    },
    Path {
        n: usize,
        weight: f64,
    },
    Circle(Vec<f64>),
    Enflo {
        target: f64,
        n: usize,
        exps: Vec<f64>,
    },
    Random {
        n: usize,
        seed: Option<u64>,
        min: f64,
        max: f64,
    },
}

/// Built space, plus the tree when the generator produces one.
pub struct Generated {
    pub space: FiniteSemiMetricSpace,
    pub tree: Option<WeightedTree>,
}

fn num<T: FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| Error::Parse(format!("bad {what}: {s:?}")))
}

/// Accepts plain decimals and multiples of pi: `pi`, `2pi/3`, `3*pi/2`, `0.5pi`.
pub fn parse_angle(s: &str) -> Result<f64> {
    let t = s.trim().replace('*', "").replace('π', "pi");
    let Some(pos) = t.find("pi") else {
        return num(&t, "angle");
    };
    let coef = match &t[..pos] {
        "" => 1.0,
        c => num::<f64>(c, "angle coefficient")?,
    };
    let rest = &t[pos + 2..];
    let den = match rest.strip_prefix('/') {
        Some(d) => num::<f64>(d, "angle denominator")?,
        None if rest.is_empty() => 1.0,
        None => return Err(Error::Parse(format!("bad angle: {s:?}"))),
    };
    Ok(coef * PI / den)
}

impl FromStr for GenSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("generator spec needs `kind:args`, got {s:?}")))?;
        let parts: Vec<&str> = if args.trim().is_empty() {
            vec![]
        } else {
            args.split(',').collect()
        };
        let arity = |lo: usize, hi: usize| -> Result<()> {
            if parts.len() < lo || parts.len() > hi {
                Err(Error::Parse(format!(
                    "{kind} takes {lo}..={hi} arguments, got {}",
                    parts.len()
                )))
            } else {
                Ok(())
            }
        };
        match kind.trim() {
            "discrete" => {
                arity(1, 1)?;
                Ok(GenSpec::Discrete(num(parts[0], "point count")?))
            }
            "star" => {
                arity(1, 2)?;
                Ok(GenSpec::Star {
                    leaves: num(parts[0], "leaf count")?,
                    weight: parts.get(1).map_or(Ok(1.0), |w| num(w, "weight"))?,
                })
            }
            "path" => {
                arity(1, 2)?;
                Ok(GenSpec::Path {
                    n: num(parts[0], "point count")?,
                    weight: parts.get(1).map_or(Ok(1.0), |w| num(w, "weight"))?,
                })
            }
            "circle" => {
                let angles = args
                    .split(';')
                    .filter(|a| !a.trim().is_empty())
                    .map(parse_angle)
                    .collect::<Result<Vec<_>>>()?;
                Ok(GenSpec::Circle(angles))
            }
            "enflo" => {
                let (head, list) = args.split_once('[').ok_or_else(|| {
                    Error::Parse("enflo spec is `enflo:target,n,[e1;e2;...]`".into())
                })?;
                let head: Vec<&str> = head.split(',').filter(|t| !t.trim().is_empty()).collect();
                if head.len() != 2 {
                    return Err(Error::Parse(
                        "enflo spec is `enflo:target,n,[e1;e2;...]`".into(),
                    ));
                }
                let list = list
                    .strip_suffix(']')
                    .ok_or_else(|| Error::Parse("enflo exponent list must end with `]`".into()))?;
                let exps = list
                    .split(';')
                    .filter(|t| !t.trim().is_empty())
                    .map(|t| num::<f64>(t, "exponent"))
                    .collect::<Result<Vec<_>>>()?;
                Ok(GenSpec::Enflo {
                    target: num(head[0], "target exponent")?,
                    n: num(head[1], "block size")?,
                    exps,
                })
            }
            "random" => {
                if !(parts.len() == 1 || parts.len() == 2 || parts.len() == 4) {
                    return Err(Error::Parse(
                        "random spec is `random:N[,SEED[,MIN,MAX]]`".into(),
                    ));
                }
                let (min, max) = if parts.len() == 4 {
                    (
                        num(parts[2], "min distance")?,
                        num(parts[3], "max distance")?,
                    )
                } else {
                    (0.5, 2.0)
                };
                Ok(GenSpec::Random {
                    n: num(parts[0], "point count")?,
                    seed: parts.get(1).map(|s| num(s, "seed")).transpose()?,
                    min,
                    max,
                })
            }
            other => Err(Error::Parse(format!("unknown generator {other:?}"))),
        }
    }
}

impl GenSpec {
    /// `default_seed` is used by `random:` specs without an explicit seed.
    pub fn build(&self, default_seed: u64) -> Result<Generated> {
        let tree = match self {
            GenSpec::Star { leaves, weight } => Some(WeightedTree::star(*leaves, *weight)?),
            GenSpec::Path { n, weight } => Some(WeightedTree::path(*n, *weight)?),
            _ => None,
        };
        let space = match (self, &tree) {
            (_, Some(t)) => t.space(),
            (GenSpec::Discrete(n), _) => gen_discrete(*n)?,
            (GenSpec::Circle(a), _) => gen_circle(a)?,
            (GenSpec::Enflo { target, n, exps }, _) => gen_enflo_truncation(*target, exps, *n)?,
            (GenSpec::Random { n, seed, min, max }, _) => {
                gen_random_semimetric(*n, seed.unwrap_or(default_seed), *min, *max)?
            }
            _ => unreachable!("tree generators handled above"),
        };
        Ok(Generated { space, tree })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(format_sig(1.0 / 3.0, 9), "0.333333333");
        assert_eq!(format_sig(2.0, 9), "2");
        assert_eq!(format_sig(-1.5849625007211563, 9), "-1.5849625");
        assert_eq!(format_sig(0.0, 9), "0");
        assert_eq!(format_sig(1.234e-9, 9), "1.234e-9");
        assert_eq!(format_sig(6.02e23, 9), "6.02e23");
        assert_eq!(format_sig(123456789.4, 9), "123456789");
        assert_eq!(format_sig(999999999.7, 9), "1e9");
    }

    #[test]
    fn csv_with_and_without_header() {
        let x = parse_matrix_csv("0,1,2\n1,0,1\n2,1,0\n").unwrap();
        assert_eq!(x.d(0, 2), 2.0);
        assert!(x.labels().is_none());
        let y = parse_matrix_csv("a, b, c\n0, 1, 2\n1, 0, 1\n2, 1, 0\n").unwrap();
        assert_eq!(y.labels().unwrap(), &["a", "b", "c"]);
        assert_eq!(x.matrix(), y.matrix());
        assert!(matches!(
            parse_matrix_csv("0,1\n2,0\n"),
            Err(Error::AsymmetricMatrix { .. })
        ));
        assert!(matches!(
            parse_matrix_csv("0,1\n1,x\n"),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn csv_roundtrip_is_exact() {
        let x = gen_random_semimetric(5, 11, 0.3, 3.0).unwrap();
        let y = parse_matrix_csv(&write_matrix_csv(&x)).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn edge_lists() {
        let t = parse_tree_edges("# a path\n0 1 1\n\n1 2 1.5\n").unwrap();
        assert_eq!(t.space().d(0, 2), 2.5);
        assert!(matches!(parse_tree_edges("0 1\n"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_tree_edges("0 1 1\n1 0 1\n"),
            Err(Error::NotATree(_))
        ));
    }

    #[test]
    fn generator_specs() {
        assert_eq!(
            "discrete:4".parse::<GenSpec>().unwrap(),
            GenSpec::Discrete(4)
        );
        assert_eq!(
            "star:3".parse::<GenSpec>().unwrap(),
            GenSpec::Star {
                leaves: 3,
                weight: 1.0
            }
        );
        assert_eq!(
            "path:4,2.5".parse::<GenSpec>().unwrap(),
            GenSpec::Path { n: 4, weight: 2.5 }
        );
        let GenSpec::Circle(a) = "circle:0;pi/2;pi;3pi/2".parse().unwrap() else {
            panic!()
        };
        assert_eq!(a, vec![0.0, PI / 2.0, PI, 1.5 * PI]);
        assert_eq!(
            "enflo:1.5,4,[1.7;1.6]".parse::<GenSpec>().unwrap(),
            GenSpec::Enflo {
                target: 1.5,
                n: 4,
                exps: vec![1.7, 1.6]
            }
        );
        assert_eq!(
            "random:5,9".parse::<GenSpec>().unwrap(),
            GenSpec::Random {
                n: 5,
                seed: Some(9),
                min: 0.5,
                max: 2.0
            }
        );
        assert!("cube:3".parse::<GenSpec>().is_err());
        assert!("discrete".parse::<GenSpec>().is_err());
        assert!("star:3,1,2".parse::<GenSpec>().is_err());
    }

    #[test]
    fn build_generators() {
        let g = "star:3".parse::<GenSpec>().unwrap().build(0).unwrap();
        assert_eq!(g.space.len(), 4);
        assert!(g.tree.is_some());
        let g = "enflo:1.5,4,[2.0]"
            .parse::<GenSpec>()
            .unwrap()
            .build(0)
            .unwrap();
        assert_eq!(g.space.len(), 8);
        let a = "random:5".parse::<GenSpec>().unwrap().build(3).unwrap();
        let b = "random:5,3".parse::<GenSpec>().unwrap().build(99).unwrap();
        assert_eq!(a.space, b.space);
    }

    #[test]
    fn angles() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("2*pi/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("pix").is_err());
    }
}
