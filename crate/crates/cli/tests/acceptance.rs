//! Acceptance suite: one PASS/FAIL line per criterion on stderr.
//!
//! Lines are written straight to the stderr handle so they show up even when
//! the harness captures test output.

use kdq_cli::recipes::recipe;
use kdq_cli::{run_sweep, AxisRange, Observable};
use kdq_core::{
    build_dense, char_function, coherence_entropy_density, default_u_samples, dense_char_function,
    dephased_mean_work_density, direct_witness, extraction_enhancement, imag_witness_closed_form,
    integrate_ramp, mean_overlap_qbar, mean_work_density, mode_kdq_distribution, observable_set,
    propagators, ramp_propagator, scan_nonclassicality, sudden_propagator, GridConfig, ModeFrames,
    ModePropagator, ModelSpec, MomentumGrid, Protocol, Scheme, C64,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::collections::HashSet;
use std::f64::consts::{LN_2, PI};
use std::io::Write;
use std::time::Instant;

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn report(id: usize, title: &str, v: &Verdict) {
    let tag = if v.pass { "PASS" } else { "FAIL" };
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "[{tag}] criterion {id:>2}: {title} :: {}", v.detail);
}

fn random_fields(rng: &mut StdRng) -> [f64; 3] {
    std::array::from_fn(|_| rng.gen_range(-2.0..2.0))
}

fn random_protocol(rng: &mut StdRng) -> Protocol {
    if rng.gen_bool(0.5) {
        Protocol::SuddenQuench
    } else {
        Protocol::LinearRamp {
            delta: rng.gen_range(0.5..8.0),
        }
    }
}

fn mode_propagator(spec: &ModelSpec, p: f64) -> ModePropagator {
    match spec.protocol {
        Protocol::SuddenQuench => sudden_propagator(p),
        Protocol::LinearRamp { .. } => ramp_propagator(spec, p, &Default::default()).unwrap(),
    }
}

fn gauss(n: usize) -> MomentumGrid {
    MomentumGrid::gauss_legendre(n).unwrap()
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for l in [4, 6, 8] {
        let grid = MomentumGrid::finite_chain(l).unwrap();
        for protocol in [Protocol::SuddenQuench, Protocol::LinearRamp { delta: 4.0 }] {
            for _ in 0..5 {
                let [h0, h1, h2] = random_fields(&mut rng);
                let spec = ModelSpec::ising(15.0, h0, h1, h2, protocol);
                let dense = build_dense(&spec, l).unwrap();
                let props = propagators(&spec, &grid, &Default::default()).unwrap();
                for k in 1..=10 {
                    let u = C64::from(0.2 * k as f64);
                    let a = dense_char_function(&dense, u, Scheme::Kdq).unwrap();
                    let b = char_function(&spec, &grid, &props, u, Scheme::Kdq).unwrap();
                    worst = worst.max((a - b).norm());
                }
                cases += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    verdict(
        worst <= 1e-8 && secs <= 60.0,
        format!("{cases} systems x 10 u, max |dG| = {worst:.2e}, {secs:.1} s"),
    )
}

fn normalization_and_marginals() -> Verdict {
    let mut rng = StdRng::seed_from_u64(2);
    let (mut norm_err, mut worst_marginal, mut marginal_imag): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let [h0, h1, h2] = random_fields(&mut rng);
        let beta = rng.gen_range(0.1..15.0);
        let p = rng.gen_range(0.01..PI - 0.01);
        let spec = ModelSpec::ising(beta, h0, h1, h2, random_protocol(&mut rng));
        let frames = ModeFrames::new(&spec, p).unwrap();
        let dist =
            mode_kdq_distribution(beta, &frames, &mode_propagator(&spec, p), Scheme::Kdq).unwrap();
        norm_err = norm_err.max((dist.total() - C64::from(1.0)).norm());
        for (_, q) in dist
            .initial_marginal()
            .into_iter()
            .chain(dist.final_marginal())
        {
            worst_marginal = worst_marginal.min(q.re);
            marginal_imag = marginal_imag.max(q.im.abs());
        }
    }
    verdict(
        norm_err <= 1e-12 && worst_marginal >= -1e-12 && marginal_imag <= 1e-12,
        format!(
            "100 modes, max |sum q - 1| = {norm_err:.1e}, min marginal = {worst_marginal:.1e}, \
             max |Im marginal| = {marginal_imag:.1e}"
        ),
    )
}

fn commuting_collapse() -> Verdict {
    let mut rng = StdRng::seed_from_u64(3);
    let grid = gauss(256);
    let (mut dist_gap, mut enh, mut wit): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..10 {
        let [h0, _, h2] = random_fields(&mut rng);
        let protocol = Protocol::LinearRamp {
            delta: rng.gen_range(0.5..8.0),
        };
        let spec = ModelSpec::ising(15.0, h0, h0, h2, protocol);
        for _ in 0..5 {
            let p = rng.gen_range(0.01..PI - 0.01);
            let frames = ModeFrames::new(&spec, p).unwrap();
            let prop = mode_propagator(&spec, p);
            let kdq = mode_kdq_distribution(15.0, &frames, &prop, Scheme::Kdq).unwrap();
            let tpm = mode_kdq_distribution(15.0, &frames, &prop, Scheme::Tpm).unwrap();
            for (a, b) in kdq.outcomes.iter().zip(&tpm.outcomes) {
                dist_gap = dist_gap.max((a.q - b.q).norm());
            }
        }
        let props = propagators(&spec, &grid, &Default::default()).unwrap();
        enh = enh.max(extraction_enhancement(&spec, &grid, &props).unwrap().abs());
        let r = scan_nonclassicality(&spec, &grid, &props, &default_u_samples()).unwrap();
        wit = wit.max(r.max_imag_witness);
    }
    verdict(
        dist_gap <= 1e-12 && enh <= 1e-10 && wit <= 1e-10,
        format!(
            "max |q_kdq - q_tpm| = {dist_gap:.1e}, |enhancement| = {enh:.1e}, witness = {wit:.1e}"
        ),
    )
}

fn quench_reality() -> Verdict {
    let mut rng = StdRng::seed_from_u64(4);
    let grid = gauss(256);
    let (mut imag, mut herm): (f64, f64) = (0.0, 0.0);
    for _ in 0..20 {
        let [h0, h1, h2] = random_fields(&mut rng);
        let beta = rng.gen_range(0.1..15.0);
        let spec = ModelSpec::ising(beta, h0, h1, h2, Protocol::SuddenQuench);
        for _ in 0..5 {
            let p = rng.gen_range(0.01..PI - 0.01);
            let frames = ModeFrames::new(&spec, p).unwrap();
            let dist =
                mode_kdq_distribution(beta, &frames, &sudden_propagator(p), Scheme::Kdq).unwrap();
            imag = imag.max(dist.max_imag());
        }
        let props = propagators(&spec, &grid, &Default::default()).unwrap();
        for k in 1..=10 {
            let u = C64::from(0.2 * k as f64);
            let a = char_function(&spec, &grid, &props, u, Scheme::Kdq).unwrap();
            let b = char_function(&spec, &grid, &props, -u, Scheme::Kdq).unwrap();
            herm = herm.max((a.conj() - b).norm());
        }
    }
    verdict(
        imag <= 1e-12 && herm <= 1e-10,
        format!("max |Im q| = {imag:.1e}, max |G*(u) - G(-u)| = {herm:.1e}"),
    )
}

fn odd_symmetry() -> Verdict {
    let grid = gauss(2048);
    let mut worst: f64 = 0.0;
    for h1 in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        for h2 in [-1.9, -0.95, 0.05, 0.95, 1.9] {
            let a = ModelSpec::ising(15.0, 0.7, h1, h2, Protocol::SuddenQuench);
            let b = a.with_fields(-0.7, h1, h2);
            let props = propagators(&a, &grid, &Default::default()).unwrap();
            let sum = mean_work_density(&a, &grid, &props).unwrap()
                + mean_work_density(&b, &grid, &props).unwrap();
            worst = worst.max(sum.abs());
        }
    }
    verdict(
        worst <= 1e-10,
        format!("5x5 (h1, h2), max |w(h0) + w(-h0)| = {worst:.1e}"),
    )
}

fn closed_form_witness() -> Verdict {
    let mut rng = StdRng::seed_from_u64(6);
    let (mut rel, mut abs): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let [h0, h1, h2] = random_fields(&mut rng);
        let beta = rng.gen_range(0.1..15.0);
        let p = rng.gen_range(0.01..PI - 0.01);
        let u = rng.gen_range(-2.0..2.0);
        let spec = ModelSpec::ising(
            beta,
            h0,
            h1,
            h2,
            Protocol::LinearRamp {
                delta: rng.gen_range(0.5..8.0),
            },
        );
        let frames = ModeFrames::new(&spec, p).unwrap();
        let prop = mode_propagator(&spec, p);
        let closed = imag_witness_closed_form(beta, &frames, &prop, u);
        let direct = direct_witness(beta, &frames, &prop, u).unwrap();
        let diff = (C64::new(0.0, closed) - direct).norm();
        let scale = 2.0 + 2.0 * (beta * frames.initial.omega).cosh();
        abs = abs.max(diff);
        rel = rel.max(diff / scale);
    }
    verdict(
        rel <= 1e-9,
        format!("100 ramp modes, max deviation / g_p(0) = {rel:.1e} (absolute {abs:.1e})"),
    )
}

fn entropy_limits() -> Verdict {
    let grid = gauss(2048);
    let at = |beta: f64, h0: f64, h1: f64| {
        coherence_entropy_density(
            &ModelSpec::ising(beta, h0, h1, 0.5, Protocol::SuddenQuench),
            &grid,
        )
        .unwrap()
    };
    let hot = at(1e-6, 1.0, -1.0);
    let cold = at(50.0, 1.0, -1.0);
    let spec = ModelSpec::ising(15.0, 0.0, 0.0, 0.5, Protocol::SuddenQuench);
    let qbar = mean_overlap_qbar(&spec, &grid, 1.0, -1.0)
        .unwrap()
        .abs()
        .max(mean_overlap_qbar(&spec, &grid, -1.0, 1.0).unwrap().abs());
    verdict(
        hot <= 1e-5 && (cold - LN_2).abs() <= 1e-3 && qbar <= 1e-12,
        format!(
            "beta=1e-6: {hot:.2e}; beta=50: {cold:.7} (ln 2 - {:.2e}); |Qbar01| = {qbar:.1e}",
            LN_2 - cold
        ),
    )
}

/// Cells with negative fourth central moment on a 41x41 quench scan.
fn negativity_set(beta: f64) -> HashSet<(usize, usize)> {
    let mut cfg = recipe("fig2a").unwrap();
    cfg.beta = beta;
    cfg.h0_range = AxisRange::new(-2.0, 2.0, 41);
    cfg.h1_range = AxisRange::new(-2.0, 2.0, 41);
    cfg.outputs = [Observable::Mu4].into();
    let res = run_sweep(&cfg, None).unwrap();
    assert_eq!(res.failed_cells(), 0);
    res.column(Observable::Mu4)
        .unwrap()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v < -1e-10)
        .map(|(k, _)| (k / 41, k % 41))
        .collect()
}

fn components(set: &HashSet<(usize, usize)>) -> Vec<usize> {
    let mut seen = HashSet::new();
    let mut sizes = Vec::new();
    for &start in set {
        if !seen.insert(start) {
            continue;
        }
        let (mut stack, mut size) = (vec![start], 0);
        while let Some((i, j)) = stack.pop() {
            size += 1;
            let nbrs = [
                (i.wrapping_sub(1), j),
                (i + 1, j),
                (i, j.wrapping_sub(1)),
                (i, j + 1),
            ];
            for n in nbrs {
                if set.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        sizes.push(size);
    }
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

fn negativity_region() -> Verdict {
    let cold = negativity_set(15.0);
    let warm = negativity_set(5.0);
    let parts = components(&cold);
    let exceptions = warm.difference(&cold).count();
    verdict(
        !parts.is_empty() && exceptions <= 2,
        format!(
            "beta=15: {} cells in components {:?}; beta=5: {} cells, {exceptions} outside the beta=15 set",
            cold.len(),
            parts,
            warm.len()
        ),
    )
}

fn enhancement_identity() -> Verdict {
    let mut rng = StdRng::seed_from_u64(9);
    let grid = gauss(512);
    let mut worst: f64 = 0.0;
    for _ in 0..12 {
        let [h0, h1, h2] = random_fields(&mut rng);
        let spec = ModelSpec::ising(
            rng.gen_range(0.5..15.0),
            h0,
            h1,
            h2,
            random_protocol(&mut rng),
        );
        let props = propagators(&spec, &grid, &Default::default()).unwrap();
        let diff = mean_work_density(&spec, &grid, &props).unwrap()
            - dephased_mean_work_density(&spec, &grid, &props).unwrap();
        let enh = extraction_enhancement(&spec, &grid, &props).unwrap();
        worst = worst.max((enh - diff).abs());
    }
    verdict(
        worst <= 1e-12,
        format!("12 points, max |enh - (w - w_deph)| = {worst:.1e}"),
    )
}

fn ramp_integrator() -> Verdict {
    let mut rng = StdRng::seed_from_u64(10);
    let mut defect: f64 = 0.0;
    for _ in 0..1000 {
        let [h0, h1, h2] = random_fields(&mut rng);
        let p = rng.gen_range(0.01..PI - 0.01);
        let spec = ModelSpec::ising(
            1.0,
            h0,
            h1,
            h2,
            Protocol::LinearRamp {
                delta: rng.gen_range(0.5..10.0),
            },
        );
        let raw = integrate_ramp(&spec, p, &Default::default()).unwrap();
        defect = defect.max(raw.unitarity_defect());
    }
    let grid = gauss(2048);
    let mut gap: f64 = 0.0;
    for (h0, h1) in [(2.0, 0.0), (-1.5, 1.2), (0.3, -1.7)] {
        let quench = ModelSpec::ising(15.0, h0, h1, 0.5, Protocol::SuddenQuench);
        let ramp = quench.with_protocol(Protocol::LinearRamp { delta: 1e4 });
        let q = observable_set(
            &quench,
            &grid,
            &propagators(&quench, &grid, &Default::default()).unwrap(),
        )
        .unwrap();
        let r = observable_set(
            &ramp,
            &grid,
            &propagators(&ramp, &grid, &Default::default()).unwrap(),
        )
        .unwrap();
        for (a, b) in [
            (q.mean_w, r.mean_w),
            (q.mean_w_dephased, r.mean_w_dephased),
            (q.enhancement, r.enhancement),
        ] {
            gap = gap.max((a - b).abs());
        }
    }
    verdict(
        defect <= 1e-10 && gap <= 1e-3,
        format!(
            "1000 raw modes, max defect = {defect:.1e}; delta=1e4 vs quench, max gap = {gap:.1e}"
        ),
    )
}

fn figure_shape() -> Verdict {
    let cfg = recipe("fig1a").unwrap();
    assert_eq!(cfg.grid, GridConfig::Gauss { n: 2048 });
    let start = Instant::now();
    let res = run_sweep(&cfg, Some(8)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let w = res.column(Observable::MeanW).unwrap();
    let (k, min) =
        w.iter().enumerate().fold(
            (0, f64::INFINITY),
            |best, (k, &v)| if v < best.1 { (k, v) } else { best },
        );
    let (h0, h1) = (res.rows[k].h0, res.rows[k].h1);
    let inside = (h0 > 1.0 && h1 < -1.0) || (h0 < -1.0 && h1 > 1.0);
    verdict(
        inside && secs <= 300.0 && res.failed_cells() == 0,
        format!("101x101, min <w> = {min:.4} at (h0, h1) = ({h0}, {h1}), {secs:.1} s"),
    )
}

type Criterion = (&'static str, fn() -> Verdict);

#[test]
fn acceptance() {
    let criteria: [Criterion; 11] = [
        ("oracle equivalence", oracle_equivalence),
        ("normalization and marginals", normalization_and_marginals),
        ("commuting-case collapse", commuting_collapse),
        ("quench reality", quench_reality),
        ("odd symmetry", odd_symmetry),
        ("closed-form witness", closed_form_witness),
        ("coherence-entropy limits", entropy_limits),
        ("non-classical region", negativity_region),
        ("enhancement identity", enhancement_identity),
        ("ramp integrator", ramp_integrator),
        ("figure shape", figure_shape),
    ];
    let mut failed = Vec::new();
    for (k, (title, check)) in criteria.iter().enumerate() {
        let v = check();
        report(k + 1, title, &v);
        if !v.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
