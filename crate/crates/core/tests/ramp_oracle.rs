//! Ramp propagators against an independent fixed-step Gauss collocation
//! integrator (four stages, order eight).

use kdq_core::{
    fourier_couplings, observable_set, propagators, ramp_propagator, ModelSpec, MomentumGrid,
    Protocol, C64,
};
use nalgebra::{DMatrix, DVector};

/// Gauss-Legendre nodes on [0, 1] and the collocation matrix.
fn gauss_tableau() -> ([f64; 4], [[f64; 4]; 4], [f64; 4]) {
    let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
    let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
    let x = [-b, -a, a, b];
    let c = x.map(|v| 0.5 * (1.0 + v));
    // a_ij = int_0^{c_i} l_j(s) ds with l_j the Lagrange basis on c
    let mut coef = [[0.0; 4]; 4];
    for j in 0..4 {
        // polynomial coefficients of l_j, lowest degree first
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for m in 0..4 {
            if m == j {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (k, &pk) in poly.iter().enumerate() {
                next[k] -= pk * c[m];
                next[k + 1] += pk;
            }
            poly = next;
            denom *= c[j] - c[m];
        }
        for i in 0..4 {
            coef[i][j] = poly
                .iter()
                .enumerate()
                .map(|(k, pk)| pk * c[i].powi(k as i32 + 1) / (k as f64 + 1.0))
                .sum::<f64>()
                / denom;
        }
    }
    let w = [
        (18.0 - 30f64.sqrt()) / 72.0,
        (18.0 + 30f64.sqrt()) / 72.0,
        (18.0 + 30f64.sqrt()) / 72.0,
        (18.0 - 30f64.sqrt()) / 72.0,
    ];
    (c, coef, w)
}

/// `y' = -i M(t) y` for the 2x2 mode generator, fixed steps.
fn collocation_ramp(h1: f64, h2: f64, delta: f64, p: f64, steps: usize) -> (C64, C64) {
    let spec = ModelSpec::ising(1.0, 0.0, h1, h2, Protocol::SuddenQuench);
    let (tp, dp) = fourier_couplings(&spec, p);
    let duration = (h2 - h1).abs() / delta;
    let rate = (h2 - h1).signum() * delta;
    let gen = |t: f64| {
        let w = h1 + rate * t - tp;
        let d = -dp;
        let i = C64::new(0.0, 1.0);
        [[-i * w, -i * d], [-i * d, i * w]]
    };
    let (c, a, b) = gauss_tableau();
    let h = duration / steps as f64;
    let mut y = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
    for n in 0..steps {
        let t = n as f64 * h;
        let ms: Vec<_> = c.iter().map(|ci| gen(t + ci * h)).collect();
        // unknowns K_i (2 each): K_i - M_i (y + h sum_j a_ij K_j) = M_i y
        let mut sys = DMatrix::<C64>::zeros(8, 8);
        let mut rhs = DVector::<C64>::zeros(8);
        for i in 0..4 {
            for r in 0..2 {
                sys[(2 * i + r, 2 * i + r)] += C64::new(1.0, 0.0);
                for j in 0..4 {
                    for s in 0..2 {
                        sys[(2 * i + r, 2 * j + s)] -= ms[i][r][s] * (h * a[i][j]);
                    }
                }
                rhs[2 * i + r] = ms[i][r][0] * y[0] + ms[i][r][1] * y[1];
            }
        }
        let k = sys.lu().solve(&rhs).expect("collocation system");
        for r in 0..2 {
            for i in 0..4 {
                y[r] += k[2 * i + r] * (h * b[i]);
            }
        }
    }
    (y[0], y[1])
}

#[test]
fn adaptive_matches_collocation_oracle() {
    let spec = ModelSpec::ising(15.0, 2.0, 2.0, 0.5, Protocol::LinearRamp { delta: 4.0 });
    let p = std::f64::consts::FRAC_PI_2;
    let u = ramp_propagator(&spec, p, &Default::default()).unwrap();
    let (z, s) = collocation_ramp(2.0, 0.5, 4.0, p, 400);
    let (z2, s2) = collocation_ramp(2.0, 0.5, 4.0, p, 800);
    // the oracle itself is converged
    assert!((z - z2).norm() < 1e-13 && (s - s2).norm() < 1e-13);
    assert!((u.z - z).norm() < 1e-8, "{} vs {}", u.z, z);
    assert!((u.s - s).norm() < 1e-8, "{} vs {}", u.s, s);
}

#[test]
fn adaptive_matches_collocation_on_long_ramps() {
    for &(h1, h2, delta, p) in &[
        (-2.0, 2.0, 0.5, 0.3),
        (1.5, -1.0, 1.0, 2.9),
        (0.0, 1.0, 0.2, 1.0),
    ] {
        let spec = ModelSpec::ising(1.0, 0.0, h1, h2, Protocol::LinearRamp { delta });
        let u = ramp_propagator(&spec, p, &Default::default()).unwrap();
        let (z, s) = collocation_ramp(h1, h2, delta, p, 4000);
        assert!(
            (u.z - z).norm() < 1e-8 && (u.s - s).norm() < 1e-8,
            "{h1} {h2} {delta} {p}"
        );
    }
}

#[test]
fn fast_ramps_approach_the_quench_monotonically() {
    let grid = MomentumGrid::gauss_legendre(256).unwrap();
    for &(h0, h1) in &[(2.0, 0.0), (-1.5, 1.2), (0.3, -1.7)] {
        let quench = ModelSpec::ising(15.0, h0, h1, 0.5, Protocol::SuddenQuench);
        let q_props = propagators(&quench, &grid, &Default::default()).unwrap();
        let target = observable_set(&quench, &grid, &q_props).unwrap();
        let mut last = f64::INFINITY;
        for delta in [1e2, 1e3, 1e4] {
            let spec = quench.with_protocol(Protocol::LinearRamp { delta });
            let props = propagators(&spec, &grid, &Default::default()).unwrap();
            let set = observable_set(&spec, &grid, &props).unwrap();
            let gap = (set.mean_w - target.mean_w)
                .abs()
                .max((set.mean_w_dephased - target.mean_w_dephased).abs())
                .max((set.enhancement - target.enhancement).abs());
            assert!(gap < last, "delta {delta}: {gap} !< {last}");
            last = gap;
        }
        assert!(last < 1e-3);
    }
}
