use std::fmt;

use crate::error::{Error, Result};
use crate::quadric_config::{QuadricConfiguration, DEFAULT_CANONICAL_BOUND};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyParams {
    OneQuadric { m: usize },
    TwoQuadrics { p: usize, q: usize, l: usize },
}

/// `total → base` with the given fiber. `trivial` is `None` when the
/// parity rules do not decide it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleFact {
    pub total: String,
    pub fiber: String,
    pub base: String,
    pub trivial: Option<bool>,
}

impl fmt::Display for BundleFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.trivial {
            Some(true) => "trivial bundle",
            Some(false) => "nontrivial bundle",
            None => "bundle",
        };
        write!(f, "{} → {}: {kind} with fiber {}", self.total, self.base, self.fiber)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopologyDescriptor {
    pub name: String,
    pub params: TopologyParams,
    pub facts: Vec<BundleFact>,
}

/// Name of `N(k)`; `T^2` stands for `N(2)` when it appears as a fiber or
/// base.
fn one_quadric_name(m: usize) -> String {
    if m % 2 == 0 {
        format!("S^{} × S^1", m - 1)
    } else {
        format!("K^{m}")
    }
}

fn short_name(m: usize) -> String {
    if m == 2 { "T^2".into() } else { one_quadric_name(m) }
}

fn sphere_product(p: usize, q: usize) -> String {
    format!("S^{} × S^{}", p - 1, q - 1)
}

/// Topological type of `N = R_Γ ×_{D_Γ} T_Γ` for one or two quadrics.
/// For two quadrics `p, q` come from the canonical form and `l` from the
/// caller.
pub fn classify_n(q: &QuadricConfiguration, l: Option<usize>) -> Result<TopologyDescriptor> {
    match q.num_quadrics() {
        1 => Ok(classify_one(q.ambient_dim())),
        2 => {
            let form = q.two_quadrics_canonical(DEFAULT_CANONICAL_BOUND)?;
            let l = l.ok_or_else(|| Error::Precondition("two quadrics need the parameter l".into()))?;
            classify_two(form.p, form.q, l)
        }
        k => Err(Error::Unsupported(format!("classification for {k} quadrics"))),
    }
}

pub fn classify_one(m: usize) -> TopologyDescriptor {
    TopologyDescriptor {
        name: one_quadric_name(m),
        params: TopologyParams::OneQuadric { m },
        facts: vec![BundleFact {
            total: format!("N({m})"),
            fiber: format!("S^{}", m - 1),
            base: "S^1".into(),
            trivial: Some(m % 2 == 0),
        }],
    }
}

pub fn classify_two(p: usize, q: usize, l: usize) -> Result<TopologyDescriptor> {
    if p == 0 || q == 0 {
        return Err(Error::Precondition(format!("block sizes must be positive, got ({p},{q})")));
    }
    if l > p {
        return Err(Error::Precondition(format!("l = {l} outside 0..={p}")));
    }
    let total = format!("N_{l}({p},{q})");
    let even = |x: usize| x % 2 == 0;
    let trivial = if even(p) && even(q) {
        Some(even(l))
    } else {
        None
    };
    let name = match (p, q, l) {
        (2, 2, 0) => "T^4".to_string(),
        _ => total.clone(),
    };
    let mut facts = vec![
        BundleFact {
            total: total.clone(),
            fiber: short_name(q),
            base: short_name(p),
            trivial,
        },
        BundleFact {
            total: total.clone(),
            fiber: if (p, q) == (2, 2) { "T^2".into() } else { sphere_product(p, q) },
            base: "T^2".into(),
            trivial: if (p, q) == (2, 2) { trivial } else { None },
        },
        BundleFact {
            total,
            fiber: "T^2".into(),
            base: "U_Γ".into(),
            trivial: None,
        },
    ];
    // for p = q = 2 the first two coincide
    facts.dedup();
    Ok(TopologyDescriptor {
        name,
        params: TopologyParams::TwoQuadrics { p, q, l },
        facts,
    })
}

impl TopologyDescriptor {
    /// The first bundle fact with the given base and fiber.
    pub fn fact(&self, fiber: &str, base: &str) -> Option<&BundleFact> {
        self.facts.iter().find(|f| f.fiber == fiber && f.base == base)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_linalg::rat;
    use crate::quadric_config::QuadricMode;

    #[test]
    fn one_quadric_names() {
        assert_eq!(classify_one(2).name, "S^1 × S^1");
        assert_eq!(classify_one(3).name, "K^3");
        assert_eq!(classify_one(4).name, "S^3 × S^1");
        assert_eq!(classify_one(5).facts[0].trivial, Some(false));
    }

    #[test]
    fn two_quadric_table() {
        let t = classify_two(2, 2, 0).unwrap();
        assert_eq!(t.name, "T^4");
        assert_eq!(t.fact("T^2", "T^2").unwrap().trivial, Some(true));
        let t = classify_two(2, 2, 1).unwrap();
        assert_eq!(t.name, "N_1(2,2)");
        assert_eq!(t.fact("T^2", "T^2").unwrap().trivial, Some(false));
        assert!(t.fact("T^2", "U_Γ").is_some());
        let t = classify_two(3, 2, 1).unwrap();
        assert_eq!(t.facts[0].trivial, None);
        assert_eq!(t.fact("S^2 × S^1", "T^2").unwrap().total, "N_1(3,2)");
        assert!(classify_two(2, 2, 3).is_err());
    }

    #[test]
    fn from_configuration() {
        let c = [rat(2), rat(0)];
        let q = QuadricConfiguration::from_i64(&[&[1, 1, 1, 1], &[1, 1, -1, -1]], &c, QuadricMode::Complex).unwrap();
        assert_eq!(classify_n(&q, Some(1)).unwrap().params, TopologyParams::TwoQuadrics { p: 2, q: 2, l: 1 });
        assert!(matches!(classify_n(&q, None), Err(Error::Precondition(_))));
        let one = QuadricConfiguration::from_i64(&[&[1, 1, 1]], &[rat(1)], QuadricMode::Complex).unwrap();
        assert_eq!(classify_n(&one, None).unwrap().name, "K^3");
        let three = QuadricConfiguration::from_i64(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]], &[rat(1), rat(1), rat(1)], QuadricMode::Complex)
            .unwrap();
        assert!(matches!(classify_n(&three, None), Err(Error::Unsupported(_))));
    }
}
