//! Momentum grids over the half Brillouin zone `(0, pi)`.
//!
//! Two flavours exist: Gauss-Legendre quadrature for thermodynamic-limit
//! integrals and the finite antiperiodic chain, whose paired momenta
//! `p = pi (2m - 1) / L` each carry weight `2 pi / L`. In both cases a
//! density is obtained as `sum_k w_k f(p_k) / (2 pi)`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const DEFAULT_GAUSS_NODES: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GridKind {
    GaussLegendre(usize),
    FiniteChain(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub p: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentumGrid {
    kind: GridKind,
    nodes: Vec<Node>,
}

impl MomentumGrid {
    pub fn new(kind: GridKind) -> Result<Self> {
        match kind {
            GridKind::GaussLegendre(n) => Self::gauss_legendre(n),
            GridKind::FiniteChain(l) => Self::finite_chain(l),
        }
    }

    /// Gauss-Legendre rule with `n` nodes mapped onto `(0, pi)`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("Gauss-Legendre needs n >= 1".into()));
        }
        let nodes = legendre_rule(n)
            .into_iter()
            .map(|(x, w)| Node {
                p: 0.5 * PI * (x + 1.0),
                weight: 0.5 * PI * w,
            })
            .collect();
        Ok(MomentumGrid {
            kind: GridKind::GaussLegendre(n),
            nodes,
        })
    }

    /// Paired momenta of an antiperiodic chain of even length `l`.
    pub fn finite_chain(l: usize) -> Result<Self> {
        if l < 2 || !l.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "finite chain needs even L >= 2, got {l}"
            )));
        }
        let weight = 2.0 * PI / l as f64;
        let nodes = (1..=l / 2)
            .map(|m| Node {
                p: PI * (2 * m - 1) as f64 / l as f64,
                weight,
            })
            .collect();
        Ok(MomentumGrid {
            kind: GridKind::FiniteChain(l),
            nodes,
        })
    }

    pub fn kind(&self) -> GridKind {
        self.kind
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn momenta(&self) -> impl Iterator<Item = f64> + '_ {
        self.nodes.iter().map(|n| n.p)
    }

    /// Chain length for finite grids.
    pub fn chain_length(&self) -> Option<usize> {
        match self.kind {
            GridKind::FiniteChain(l) => Some(l),
            GridKind::GaussLegendre(_) => None,
        }
    }

    /// `sum_k w_k f(p_k)`, i.e. an approximation of `int_0^pi f(p) dp`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|n| n.weight * f(n.p)).sum()
    }
}

/// Nodes and weights on `[-1, 1]`, ascending in `x`.
///
/// Newton iteration on the three-term recurrence, seeded with Tricomi's
/// asymptotic roots. O(n^2) overall, fine up to a few thousand nodes.
fn legendre_rule(n: usize) -> Vec<(f64, f64)> {
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for k in 0..n.div_ceil(2) {
        let theta = PI * (k as f64 + 0.75) / (nf + 0.5);
        let mut x = (theta.cos())
            * (1.0
                - (nf - 1.0) / (8.0 * nf * nf * nf)
                - 1.0 / (384.0 * nf.powi(4)) * (39.0 - 28.0 / (theta.sin() * theta.sin())));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // roots come out descending from +1
        out[n - 1 - k] = (x, w);
        out[k] = (-x, w);
    }
    if n % 2 == 1 {
        let (_, d) = legendre_with_derivative(n, 0.0);
        out[n / 2] = (0.0, 2.0 / (d * d));
    }
    out
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_weights_sum_to_pi_and_stay_inside() {
        for n in [1, 2, 7, 64, 2048] {
            let g = MomentumGrid::gauss_legendre(n).unwrap();
            let total: f64 = g.nodes().iter().map(|n| n.weight).sum();
            assert!((total - PI).abs() < 1e-12, "n={n}: {total}");
            for node in g.nodes() {
                assert!(node.p > 0.0 && node.p < PI);
                assert!(node.weight > 0.0);
            }
            assert!(g.nodes().windows(2).all(|w| w[0].p < w[1].p));
        }
    }

    #[test]
    fn gauss_is_exact_for_polynomials() {
        // int_0^pi p^9 dp = pi^10 / 10
        let g = MomentumGrid::gauss_legendre(5).unwrap();
        let v = g.integrate(|p| p.powi(9));
        assert!((v - PI.powi(10) / 10.0).abs() < 1e-9 * PI.powi(10));
        let g = MomentumGrid::gauss_legendre(2048).unwrap();
        let v = g.integrate(|p| (3.0 * p).cos().powi(2));
        assert!((v - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn finite_chain_momenta() {
        let g = MomentumGrid::finite_chain(8).unwrap();
        let ps: Vec<f64> = g.momenta().collect();
        let expected: Vec<f64> = [1.0, 3.0, 5.0, 7.0].iter().map(|m| PI * m / 8.0).collect();
        assert_eq!(ps, expected);
        assert!(g.nodes().iter().all(|n| n.weight == 2.0 * PI / 8.0));
        assert!(MomentumGrid::finite_chain(7).is_err());
        assert!(MomentumGrid::finite_chain(0).is_err());
    }
}
