use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exact_linalg::{rat, IntegerMatrix, Rational};
use crate::polytope::PolytopePresentation;
use crate::quadric_config::{QuadricConfiguration, QuadricMode};

/// A named instance: a polytope, a quadric system, or a pair of systems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Polytope(PolytopePresentation),
    Quadrics {
        q: QuadricConfiguration,
        l: Option<usize>,
    },
    Double {
        gamma: QuadricConfiguration,
        delta: QuadricConfiguration,
    },
}

/// Names accepted by [`lookup`]; `n`, `m`, `p`, `q` are positive integers.
pub const CATALOG_NAMES: &[&str] = &[
    "triangle",
    "bad-triangle",
    "square",
    "pyramid",
    "simplex:n",
    "simplex-product:p,q",
    "cube:n",
    "one-quadric:m",
    "two-quadrics:p,q",
    "cp2-torus",
    "rp2",
];

fn rats(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x)).collect()
}

fn unit(n: usize, i: usize, s: i64) -> Vec<BigInt> {
    (0..n).map(|k| BigInt::from(if k == i { s } else { 0 })).collect()
}

fn polytope(normals: Vec<Vec<BigInt>>, b: Vec<Rational>) -> Result<Instance> {
    Ok(Instance::Polytope(PolytopePresentation::new(normals, b)?))
}

fn quadrics(rows: Vec<Vec<i64>>, c: &[i64]) -> Result<QuadricConfiguration> {
    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
    QuadricConfiguration::from_i64(&refs, &rats(c), QuadricMode::Complex)
}

/// `x_i ≥ 0`, `Σ x_i ≤ 1` on `ℝ^n`.
fn simplex_facets(n: usize, offset: usize, total: usize) -> (Vec<Vec<BigInt>>, Vec<Rational>) {
    let mut normals: Vec<Vec<BigInt>> = (0..n).map(|i| unit(total, offset + i, 1)).collect();
    normals.push(
        (0..total)
            .map(|k| BigInt::from(if (offset..offset + n).contains(&k) { -1 } else { 0 }))
            .collect(),
    );
    let mut b = vec![rat(0); n];
    b.push(rat(1));
    (normals, b)
}

fn parse_params(name: &str, args: &str, count: usize) -> Result<Vec<usize>> {
    let v: Vec<usize> = args
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::UnknownCatalog(name.into()))?;
    if v.len() != count || v.contains(&0) {
        return Err(Error::UnknownCatalog(name.into()));
    }
    Ok(v)
}

pub fn lookup(name: &str) -> Result<Instance> {
    let (head, args) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let params = |count| parse_params(name, args.ok_or_else(|| Error::UnknownCatalog(name.into()))?, count);
    match (head, args.is_some()) {
        ("triangle", false) => polytope(
            vec![unit(2, 0, 1), unit(2, 1, 1), vec![BigInt::from(-1), BigInt::from(-1)]],
            rats(&[0, 0, 1]),
        ),
        ("bad-triangle", false) => polytope(
            vec![unit(2, 0, 1), unit(2, 1, 1), vec![BigInt::from(-1), BigInt::from(-2)]],
            rats(&[0, 0, 2]),
        ),
        ("square", false) => polytope(
            vec![unit(2, 0, 1), unit(2, 1, 1), unit(2, 0, -1), unit(2, 1, -1)],
            rats(&[0, 0, 1, 1]),
        ),
        ("pyramid", false) => {
            let rows: [[i64; 3]; 5] = [[0, 0, 1], [-1, 0, -1], [1, 0, -1], [0, -1, -1], [0, 1, -1]];
            polytope(
                rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect(),
                rats(&[0, 1, 1, 1, 1]),
            )
        }
        ("simplex", true) => {
            let n = params(1)?[0];
            let (normals, b) = simplex_facets(n, 0, n);
            polytope(normals, b)
        }
        ("simplex-product", true) => {
            let v = params(2)?;
            let (p, q) = (v[0], v[1]);
            if p < 2 || q < 2 {
                return Err(Error::UnknownCatalog(name.into()));
            }
            let total = p + q - 2;
            let (mut normals, mut b) = simplex_facets(p - 1, 0, total);
            let (n2, b2) = simplex_facets(q - 1, p - 1, total);
            normals.extend(n2);
            b.extend(b2);
            polytope(normals, b)
        }
        ("cube", true) => {
            let n = params(1)?[0];
            let mut normals: Vec<Vec<BigInt>> = (0..n).map(|i| unit(n, i, 1)).collect();
            normals.extend((0..n).map(|i| unit(n, i, -1)));
            let mut b = vec![rat(0); n];
            b.extend(vec![rat(1); n]);
            polytope(normals, b)
        }
        ("one-quadric", true) => {
            let m = params(1)?[0];
            Ok(Instance::Quadrics {
                q: quadrics(vec![vec![1; m]], &[1])?,
                l: None,
            })
        }
        ("two-quadrics", true) => {
            let v = params(2)?;
            let (p, q) = (v[0], v[1]);
            let second: Vec<i64> = (0..p + q).map(|k| if k < p { 1 } else { -1 }).collect();
            Ok(Instance::Quadrics {
                q: quadrics(vec![vec![1; p + q], second], &[2, 0])?,
                l: None,
            })
        }
        ("cp2-torus", false) => Ok(Instance::Double {
            gamma: quadrics(vec![vec![1, 1, 1]], &[2])?,
            delta: quadrics(vec![vec![1, 1, 2]], &[3])?,
        }),
        ("rp2", false) => Ok(Instance::Double {
            gamma: quadrics(vec![vec![1, 1, 1]], &[1])?,
            delta: QuadricConfiguration::new(
                IntegerMatrix::from_rows_with_cols(vec![], 3)?,
                vec![],
                QuadricMode::Complex,
            )?,
        }),
        _ => Err(Error::UnknownCatalog(name.into())),
    }
}

impl Instance {
    /// The quadric system whose `N` the numeric checks run on: the Gale
    /// dual for a polytope, the stacked system for a pair.
    pub fn quadrics(&self) -> Result<QuadricConfiguration> {
        match self {
            Instance::Polytope(p) => Ok(QuadricConfiguration::gale_dual(p)),
            Instance::Quadrics { q, .. } => Ok(q.clone()),
            Instance::Double { gamma, delta } => gamma.stacked_with(delta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus_actions::freeness_check;

    fn gamma_of(name: &str) -> Vec<Vec<i64>> {
        let q = lookup(name).unwrap().quadrics().unwrap();
        q.gamma()
            .row_vecs()
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect()
    }

    #[test]
    fn triangle_gale() {
        assert_eq!(gamma_of("triangle"), vec![vec![1, 1, 1]]);
        assert_eq!(lookup("triangle").unwrap().quadrics().unwrap().c(), &[rat(1)]);
        assert_eq!(gamma_of("simplex:3"), vec![vec![1, 1, 1, 1]]);
    }

    #[test]
    fn products_and_cubes() {
        let Instance::Polytope(p) = lookup("simplex-product:2,3").unwrap() else {
            panic!()
        };
        assert_eq!(p.dim(), 3);
        assert_eq!(p.enumerate_vertices().unwrap().vertices.len(), 6);
        let Instance::Polytope(c) = lookup("cube:3").unwrap() else { panic!() };
        assert_eq!(c.enumerate_vertices().unwrap().vertices.len(), 8);
    }

    #[test]
    fn delzant_matches_freeness() {
        for name in ["triangle", "bad-triangle", "square", "simplex:4", "simplex-product:3,3", "cube:3"] {
            let Instance::Polytope(p) = lookup(name).unwrap() else { panic!() };
            let q = QuadricConfiguration::gale_dual(&p);
            assert_eq!(
                p.is_delzant().unwrap().holds(),
                freeness_check(&q).unwrap().free,
                "{name}"
            );
        }
    }

    #[test]
    fn unknown_names() {
        for bad in ["hexagon", "simplex", "simplex:0", "cube:x", "two-quadrics:2", "triangle:3", "simplex-product:1,2"] {
            assert!(matches!(lookup(bad), Err(Error::UnknownCatalog(_))), "{bad}");
        }
    }

    #[test]
    fn two_quadrics_rows() {
        assert_eq!(gamma_of("two-quadrics:2,2"), vec![vec![1, 1, 1, 1], vec![1, 1, -1, -1]]);
        assert_eq!(gamma_of("cp2-torus"), vec![vec![1, 1, 1], vec![1, 1, 2]]);
        assert_eq!(gamma_of("rp2"), vec![vec![1, 1, 1]]);
    }
}
