//! Line-based instance files.
//!
//! ```text
//! mode double
//! gamma 1 3
//! 1 1 1
//! c 2
//! delta 1 3
//! 1 1 2
//! d 3
//! seed 7
//! tol lagrangian 1e-9
//! ```
//!
//! `A <n> <m>` is followed by `n` rows of `m` integers (the facet normals
//! are its columns); `gamma`/`delta` blocks by one row per quadric.
//! Right-hand sides are rationals `p/q`. `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use quadtoric::exact_linalg::{IntegerMatrix, Rational};
use quadtoric::polytope::PolytopePresentation;
use quadtoric::quadric_config::{QuadricConfiguration, QuadricMode};
use quadtoric::reduction::Instance;
use quadtoric::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Polytope,
    Quadrics,
    Double,
}

impl Mode {
    fn word(self) -> &'static str {
        match self {
            Mode::Polytope => "polytope",
            Mode::Quadrics => "quadrics",
            Mode::Double => "double",
        }
    }
}

/// Tolerance names accepted by `tol` lines and `--tol`.
pub const TOLERANCE_NAMES: &[&str] = &[
    "membership",
    "frame",
    "lagrangian",
    "curvature",
    "variation",
    "noether",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigFile {
    pub instance: Instance,
    pub seed: Option<u64>,
    /// Raw tolerance overrides, kept as written so printing round-trips.
    pub tolerances: BTreeMap<String, String>,
}

fn perr(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_rational(tok: &str, line: usize) -> Result<Rational> {
    tok.parse::<Rational>()
        .map_err(|_| perr(line, format!("not a rational number: '{tok}'")))
}

fn parse_int<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T> {
    tok.parse::<T>().map_err(|_| perr(line, format!("not an integer: '{tok}'")))
}

struct Lines<'a> {
    items: Vec<(usize, Vec<&'a str>)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let items = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
            .filter(|(_, t)| !t.is_empty())
            .collect();
        Self { items, pos: 0 }
    }

    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let it = self.items.get(self.pos).cloned();
        self.pos += 1;
        it
    }

    fn last_line(&self) -> usize {
        self.items.last().map_or(1, |(l, _)| *l)
    }
}

fn parse_matrix(lines: &mut Lines, header: &[&str], line: usize) -> Result<Vec<Vec<BigInt>>> {
    if header.len() != 3 {
        return Err(perr(line, format!("expected '{} <rows> <cols>'", header[0])));
    }
    let rows: usize = parse_int(header[1], line)?;
    let cols: usize = parse_int(header[2], line)?;
    let mut out = Vec::with_capacity(rows);
    for _ in 0..rows {
        let (ln, toks) = lines
            .next()
            .ok_or_else(|| perr(lines.last_line(), format!("'{}' block ends early", header[0])))?;
        if toks.len() != cols {
            return Err(perr(ln, format!("expected {cols} entries, found {}", toks.len())));
        }
        out.push(toks.iter().map(|t| parse_int::<BigInt>(t, ln)).collect::<Result<_>>()?);
    }
    Ok(out)
}

#[derive(Default)]
struct Raw {
    a: Option<(Vec<Vec<BigInt>>, usize)>,
    gamma: Option<(Vec<Vec<BigInt>>, usize)>,
    delta: Option<(Vec<Vec<BigInt>>, usize)>,
    b: Option<Vec<Rational>>,
    c: Option<Vec<Rational>>,
    d: Option<Vec<Rational>>,
}

fn set_once<T>(slot: &mut Option<T>, v: T, key: &str, line: usize) -> Result<()> {
    if slot.is_some() {
        return Err(perr(line, format!("duplicate '{key}'")));
    }
    *slot = Some(v);
    Ok(())
}

fn quadric_block(
    m: Option<(Vec<Vec<BigInt>>, usize)>,
    rhs: Option<Vec<Rational>>,
    names: (&str, &str),
    line: usize,
) -> Result<QuadricConfiguration> {
    let (rows, cols) = m.ok_or_else(|| perr(line, format!("missing '{}' block", names.0)))?;
    let rhs = rhs.unwrap_or_default();
    if rhs.len() != rows.len() {
        return Err(perr(
            line,
            format!("'{}' has {} entries for {} rows", names.1, rhs.len(), rows.len()),
        ));
    }
    let g = IntegerMatrix::from_rows_with_cols(rows, cols).map_err(|e| perr(line, e.to_string()))?;
    QuadricConfiguration::new(g, rhs, QuadricMode::Complex)
}

impl ConfigFile {
    pub fn new(instance: Instance) -> Self {
        Self {
            instance,
            seed: None,
            tolerances: BTreeMap::new(),
        }
    }

    pub fn mode(&self) -> Mode {
        match self.instance {
            Instance::Polytope(_) => Mode::Polytope,
            Instance::Quadrics { .. } => Mode::Quadrics,
            Instance::Double { .. } => Mode::Double,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text);
        let (ln, first) = lines.next().ok_or_else(|| perr(1, "empty file"))?;
        let mode = match first.as_slice() {
            ["mode", "polytope"] => Mode::Polytope,
            ["mode", "quadrics"] => Mode::Quadrics,
            ["mode", "double"] => Mode::Double,
            _ => return Err(perr(ln, "first line must be 'mode polytope|quadrics|double'")),
        };
        let mut raw = Raw::default();
        let mut seed = None;
        let mut l = None;
        let mut tolerances = BTreeMap::new();
        while let Some((ln, toks)) = lines.next() {
            match toks[0] {
                "A" | "gamma" | "delta" => {
                    let cols = if toks.len() == 3 { parse_int::<usize>(toks[2], ln)? } else { 0 };
                    let m = (parse_matrix(&mut lines, &toks, ln)?, cols);
                    let slot = match toks[0] {
                        "A" => &mut raw.a,
                        "gamma" => &mut raw.gamma,
                        _ => &mut raw.delta,
                    };
                    set_once(slot, m, toks[0], ln)?;
                }
                "b" | "c" | "d" => {
                    let v = toks[1..].iter().map(|t| parse_rational(t, ln)).collect::<Result<Vec<_>>>()?;
                    let slot = match toks[0] {
                        "b" => &mut raw.b,
                        "c" => &mut raw.c,
                        _ => &mut raw.d,
                    };
                    set_once(slot, v, toks[0], ln)?;
                }
                "seed" if toks.len() == 2 => set_once(&mut seed, parse_int(toks[1], ln)?, "seed", ln)?,
                "l" if toks.len() == 2 => set_once(&mut l, parse_int(toks[1], ln)?, "l", ln)?,
                "tol" if toks.len() == 3 => {
                    if !TOLERANCE_NAMES.contains(&toks[1]) {
                        return Err(perr(ln, format!("unknown tolerance '{}'", toks[1])));
                    }
                    toks[2]
                        .parse::<f64>()
                        .map_err(|_| perr(ln, format!("not a number: '{}'", toks[2])))?;
                    if tolerances.insert(toks[1].to_string(), toks[2].to_string()).is_some() {
                        return Err(perr(ln, format!("duplicate tolerance '{}'", toks[1])));
                    }
                }
                other => return Err(perr(ln, format!("unexpected '{other}'"))),
            }
        }
        let end = lines.last_line();
        let unexpected = |present: bool, key: &str| -> Result<()> {
            if present {
                Err(perr(end, format!("'{key}' does not belong in {} mode", mode.word())))
            } else {
                Ok(())
            }
        };
        let instance = match mode {
            Mode::Polytope => {
                unexpected(raw.gamma.is_some() || raw.c.is_some(), "gamma/c")?;
                unexpected(raw.delta.is_some() || raw.d.is_some(), "delta/d")?;
                let (rows, m) = raw.a.ok_or_else(|| perr(end, "missing 'A' block"))?;
                let b = raw.b.ok_or_else(|| perr(end, "missing 'b'"))?;
                if b.len() != m {
                    return Err(perr(end, format!("'b' has {} entries for {m} facets", b.len())));
                }
                let normals: Vec<Vec<BigInt>> = (0..m).map(|j| rows.iter().map(|r| r[j].clone()).collect()).collect();
                Instance::Polytope(PolytopePresentation::new(normals, b)?)
            }
            Mode::Quadrics => {
                unexpected(raw.a.is_some() || raw.b.is_some(), "A/b")?;
                unexpected(raw.delta.is_some() || raw.d.is_some(), "delta/d")?;
                Instance::Quadrics {
                    q: quadric_block(raw.gamma, raw.c, ("gamma", "c"), end)?,
                    l,
                }
            }
            Mode::Double => {
                unexpected(raw.a.is_some() || raw.b.is_some(), "A/b")?;
                Instance::Double {
                    gamma: quadric_block(raw.gamma, raw.c, ("gamma", "c"), end)?,
                    delta: quadric_block(raw.delta, raw.d, ("delta", "d"), end)?,
                }
            }
        };
        if mode != Mode::Quadrics {
            unexpected(l.is_some(), "l")?;
        }
        Ok(Self {
            instance,
            seed,
            tolerances,
        })
    }

    /// Canonical text; `parse(print(x)) == x`.
    pub fn print(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "mode {}", self.mode().word());
        let row = |r: &[BigInt]| r.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ");
        let rats = |v: &[Rational]| v.iter().map(|x| format!(" {x}")).collect::<String>();
        let block = |out: &mut String, name: &str, m: &IntegerMatrix| {
            let _ = writeln!(out, "{name} {} {}", m.rows(), m.cols());
            for i in 0..m.rows() {
                let _ = writeln!(out, "{}", row(m.row(i)));
            }
        };
        match &self.instance {
            Instance::Polytope(p) => {
                let a = p.a_matrix();
                let _ = writeln!(out, "A {} {}", p.dim(), p.num_facets());
                for i in 0..a.rows() {
                    let _ = writeln!(out, "{}", row(a.row(i)));
                }
                let _ = writeln!(out, "b{}", rats(p.offsets()));
            }
            Instance::Quadrics { q, l } => {
                block(&mut out, "gamma", q.gamma());
                let _ = writeln!(out, "c{}", rats(q.c()));
                if let Some(l) = l {
                    let _ = writeln!(out, "l {l}");
                }
            }
            Instance::Double { gamma, delta } => {
                block(&mut out, "gamma", gamma.gamma());
                let _ = writeln!(out, "c{}", rats(gamma.c()));
                block(&mut out, "delta", delta.gamma());
                let _ = writeln!(out, "d{}", rats(delta.c()));
            }
        }
        if let Some(s) = self.seed {
            let _ = writeln!(out, "seed {s}");
        }
        for (k, v) in &self.tolerances {
            let _ = writeln!(out, "tol {k} {v}");
        }
        out
    }
}
