use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // P_n(x) and P_n'(x) by the three-term recurrence
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// `exp(1 − 1/(1 − t²))` on `(−1, 1)`, zero outside; `bump(0) = 1`.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

pub fn bump_derivative(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        let s = 1.0 - t * t;
        bump(t) * (-2.0 * t / (s * s))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    /// Trapezoid rule over a full period (weight 1).
    Periodic { lo: f64, hi: f64, n: usize },
    /// Gauss–Legendre on `[lo, hi]` (weight 1).
    Interval { lo: f64, hi: f64, n: usize },
    /// Gauss–Legendre on `[c − w, c + w]` with weight `bump((x − c)/w)`.
    Bump { center: f64, half_width: f64, n: usize },
}

impl Axis {
    fn range(&self) -> (f64, f64) {
        match *self {
            Axis::Periodic { lo, hi, .. } | Axis::Interval { lo, hi, .. } => (lo, hi),
            Axis::Bump { center, half_width, .. } => (center - half_width, center + half_width),
        }
    }

    fn rule(&self) -> Vec<(f64, f64)> {
        match *self {
            Axis::Periodic { lo, hi, n } => {
                let h = (hi - lo) / n as f64;
                (0..n).map(|i| (lo + i as f64 * h, h)).collect()
            }
            Axis::Interval { n, .. } | Axis::Bump { n, .. } => {
                let (lo, hi) = self.range();
                let (x, w) = gauss_legendre(n);
                let half = 0.5 * (hi - lo);
                x.iter()
                    .zip(&w)
                    .map(|(t, wt)| (lo + half * (t + 1.0), wt * half))
                    .collect()
            }
        }
    }

    fn weight(&self, x: f64) -> f64 {
        match *self {
            Axis::Bump { center, half_width, .. } => bump((x - center) / half_width),
            _ => 1.0,
        }
    }

    fn weight_derivative(&self, x: f64) -> f64 {
        match *self {
            Axis::Bump { center, half_width, .. } => bump_derivative((x - center) / half_width) / half_width,
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub x: Vec<f64>,
    pub weight: f64,
}

/// A box in chart coordinates with a product bump weight `ψ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub axes: Vec<Axis>,
    /// Sample count for the Monte Carlo rule used above four dimensions.
    pub mc_samples: usize,
    pub seed: u64,
}

impl Patch {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self {
            axes,
            mc_samples: 20_000,
            seed: 0,
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// `ψ(x)`.
    pub fn weight(&self, x: &[f64]) -> f64 {
        self.axes.iter().zip(x).map(|(a, &xi)| a.weight(xi)).product()
    }

    pub fn weight_gradient(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|a| {
                self.axes
                    .iter()
                    .zip(x)
                    .enumerate()
                    .map(|(b, (ax, &xi))| if a == b { ax.weight_derivative(xi) } else { ax.weight(xi) })
                    .product()
            })
            .collect()
    }

    pub fn volume(&self) -> f64 {
        self.axes.iter().map(|a| {
            let (lo, hi) = a.range();
            hi - lo
        }).product()
    }

    /// Tensor rule up to four dimensions, seeded Monte Carlo above.
    pub fn nodes(&self) -> Vec<Node> {
        if self.dim() > 4 {
            return self.monte_carlo_nodes();
        }
        let mut out = vec![Node { x: Vec::new(), weight: 1.0 }];
        for axis in &self.axes {
            let rule = axis.rule();
            out = out
                .iter()
                .flat_map(|node| {
                    rule.iter().map(move |&(x, w)| {
                        let mut xs = node.x.clone();
                        xs.push(x);
                        Node { x: xs, weight: node.weight * w }
                    })
                })
                .collect();
        }
        out
    }

    pub fn monte_carlo_nodes(&self) -> Vec<Node> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let w = self.volume() / self.mc_samples as f64;
        (0..self.mc_samples)
            .map(|_| Node {
                x: self
                    .axes
                    .iter()
                    .map(|a| {
                        let (lo, hi) = a.range();
                        lo + (hi - lo) * rng.random::<f64>()
                    })
                    .collect(),
                weight: w,
            })
            .collect()
    }

    /// `∫ f ψ` over the patch.
    pub fn integrate<F: FnMut(&[f64]) -> f64>(&self, mut f: F) -> f64 {
        self.nodes()
            .iter()
            .map(|n| n.weight * self.weight(&n.x) * f(&n.x))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_exact_for_polynomials() {
        let (x, w) = gauss_legendre(5);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // degree 8 integrates exactly
        let i: f64 = x.iter().zip(&w).map(|(t, wt)| wt * t.powi(8)).sum();
        assert!((i - 2.0 / 9.0).abs() < 1e-14);
        let (x, w) = gauss_legendre(32);
        let i: f64 = x.iter().zip(&w).map(|(t, wt)| wt * t.cos()).sum();
        assert!((i - 2.0 * 1f64.sin()).abs() < 1e-14);
    }

    #[test]
    fn bump_integral_converges() {
        // ∫ bump over (−1,1), reference from a much finer rule
        let reference = Patch::new(vec![Axis::Bump { center: 0.0, half_width: 1.0, n: 200 }]).integrate(|_| 1.0);
        let coarse = Patch::new(vec![Axis::Bump { center: 0.0, half_width: 1.0, n: 32 }]).integrate(|_| 1.0);
        assert!((coarse - reference).abs() < 1e-6 * reference);
        assert!((reference - 1.206_900_322_437_88).abs() < 1e-12);
    }

    #[test]
    fn bump_derivative_matches() {
        for t in [-0.8, -0.3, 0.0, 0.5, 0.95] {
            let fd = (bump(t + 1e-7) - bump(t - 1e-7)) / 2e-7;
            assert!((fd - bump_derivative(t)).abs() < 1e-6);
        }
        assert_eq!(bump(1.0), 0.0);
        assert_eq!(bump(0.0), 1.0);
    }

    #[test]
    fn periodic_rule_is_spectral() {
        let p = Patch::new(vec![Axis::Periodic { lo: 0.0, hi: 2.0 * PI, n: 24 }]);
        let i = p.integrate(|x| (x[0].cos()).exp());
        // 2π I_0(1)
        assert!((i - 2.0 * PI * 1.266_065_877_752_008_4).abs() < 1e-13);
    }

    #[test]
    fn weight_gradient_fd() {
        let p = Patch::new(vec![
            Axis::Bump { center: 0.2, half_width: 0.5, n: 4 },
            Axis::Periodic { lo: 0.0, hi: 1.0, n: 4 },
            Axis::Bump { center: -1.0, half_width: 2.0, n: 4 },
        ]);
        let x = [0.35, 0.4, -0.2];
        let g = p.weight_gradient(&x);
        for a in 0..3 {
            let mut xp = x;
            xp[a] += 1e-7;
            let mut xm = x;
            xm[a] -= 1e-7;
            assert!(((p.weight(&xp) - p.weight(&xm)) / 2e-7 - g[a]).abs() < 1e-6);
        }
    }

    #[test]
    fn monte_carlo_volume() {
        let axes = vec![Axis::Interval { lo: 0.0, hi: 1.0, n: 2 }; 5];
        let p = Patch::new(axes);
        let i = p.integrate(|_| 1.0);
        assert!((i - 1.0).abs() < 1e-12);
        assert_eq!(p.nodes(), p.nodes());
    }

    #[test]
    fn degenerate_patch() {
        let p = Patch::new(vec![Axis::Interval { lo: 0.3, hi: 0.3, n: 8 }]);
        assert_eq!(p.integrate(|_| 1.0), 0.0);
    }
}
