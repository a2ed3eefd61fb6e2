//! Characteristic functions, joint quasiprobabilities and work cumulants.
//!
//! Per mode pair the Fock space is four dimensional. The even-parity
//! sector `{|11>, |0>}` carries the 2x2 block `h_p`, the two singly
//! occupied states have zero energy and are left untouched by the
//! dynamics. Consequently
//!
//! ```text
//! g_p(u) = 2 + tr( exp(-b h0) exp(-iu h1) U^+ exp(iu h2) U )
//! ```
//!
//! and `g_p(0) = 2 (1 + cosh(b w0))`.
//!
//! Quasiprobabilities are `q[m, n] = Tr(rho P1_n U^+ P2_m U)` so that
//! `sum q exp(iu (e2 - e1)) = g_p(u) / g_p(0)`. The two-point scheme
//! replaces `rho` by its projection on the eigenbasis of `h1`.

use crate::dynamics::{check_momentum, ModePropagator};
use crate::error::{Error, Result};
use crate::grid::{GridKind, MomentumGrid};
use crate::linalg::{expm_scaled_hamiltonian, Mat2, C64, I, ONE, ZERO};
use crate::model::{mode_frame, ModeFrame, ModelSpec};
use nalgebra::Matrix4;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

/// Largest tolerated defect of the per-mode spectral projectors.
pub const PROJECTOR_TOL: f64 = 1e-10;

/// Ratios below this modulus make the logarithm meaningless.
pub const BRANCH_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    Kdq,
    Tpm,
}

/// Mode data at the three fields `h0` (state), `h1` (first measurement)
/// and `h2` (second measurement), all at the same momentum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeFrames {
    pub initial: ModeFrame,
    pub first: ModeFrame,
    pub second: ModeFrame,
}

impl ModeFrames {
    pub fn new(spec: &ModelSpec, p: f64) -> Result<Self> {
        Ok(ModeFrames {
            initial: mode_frame(spec, p, spec.h0)?,
            first: mode_frame(spec, p, spec.h1)?,
            second: mode_frame(spec, p, spec.h2)?,
        })
    }

    pub fn p(&self) -> f64 {
        self.initial.p
    }

    fn check(&self, prop: &ModePropagator) -> Result<()> {
        check_momentum(self.initial.p, self.first.p)?;
        check_momentum(self.initial.p, self.second.p)?;
        check_momentum(self.initial.p, prop.p)
    }
}

/// Frames on every grid node.
pub fn grid_frames(spec: &ModelSpec, grid: &MomentumGrid) -> Result<Vec<ModeFrames>> {
    grid.momenta().map(|p| ModeFrames::new(spec, p)).collect()
}

fn projector(v: [f64; 2]) -> Mat2 {
    Mat2::from_real([[v[0] * v[0], v[0] * v[1]], [v[1] * v[0], v[1] * v[1]]])
}

/// `exp(-b h0) / g_p(0)` on the even sector, written with `e^{-x}`, `x = b w0`,
/// so that it stays finite for any temperature.
struct ScaledState {
    even: Mat2,
    odd_weight: f64,
}

impl ScaledState {
    fn new(beta: f64, frames: &ModeFrames, scheme: Scheme) -> Self {
        let x = beta * frames.initial.omega;
        let decay = (-x).exp();
        let norm = (1.0 + decay) * (1.0 + decay);
        let plus = projector(frames.initial.v_plus());
        let minus = projector(frames.initial.v_minus());
        let mut even = (plus.scale(C64::from(decay * decay)) + minus).scale(C64::from(1.0 / norm));
        if scheme == Scheme::Tpm {
            let a = projector(frames.first.v_plus());
            let b = projector(frames.first.v_minus());
            even = a * even * a + b * even * b;
        }
        ScaledState {
            even,
            odd_weight: 2.0 * decay / norm,
        }
    }
}

/// `g_p(0) = 2 (1 + cosh(b w0))`.
pub fn partition_factor(beta: f64, frames: &ModeFrames) -> f64 {
    2.0 * (1.0 + (beta * frames.initial.omega).cosh())
}

fn evolution_product(frames: &ModeFrames, prop: &ModePropagator, u: C64) -> Mat2 {
    let first = expm_scaled_hamiltonian(&frames.first.hmat, frames.first.omega, -I * u);
    let second = expm_scaled_hamiltonian(&frames.second.hmat, frames.second.omega, I * u);
    let um = prop.matrix();
    first * um.adjoint() * second * um
}

/// Per-mode factor `g_p(u)` of the characteristic function.
pub fn mode_char_factor(
    beta: f64,
    frames: &ModeFrames,
    prop: &ModePropagator,
    u: C64,
    scheme: Scheme,
) -> Result<C64> {
    frames.check(prop)?;
    let ratio = char_ratio(beta, frames, prop, u, scheme);
    Ok(ratio * partition_factor(beta, frames))
}

/// `g_p(u) / g_p(0)` evaluated without forming `cosh(b w0)`.
pub fn char_ratio(
    beta: f64,
    frames: &ModeFrames,
    prop: &ModePropagator,
    u: C64,
    scheme: Scheme,
) -> C64 {
    let state = ScaledState::new(beta, frames, scheme);
    state
        .even
        .trace_product(&evolution_product(frames, prop, u))
        + state.odd_weight
}

/// Evaluator for a single mode's factor.
#[derive(Debug, Clone, Copy)]
pub struct CharFactor {
    pub p: f64,
    pub g0: f64,
    beta: f64,
    frames: ModeFrames,
    prop: ModePropagator,
    scheme: Scheme,
}

impl CharFactor {
    pub fn new(
        beta: f64,
        frames: ModeFrames,
        prop: ModePropagator,
        scheme: Scheme,
    ) -> Result<Self> {
        frames.check(&prop)?;
        Ok(CharFactor {
            p: frames.p(),
            g0: partition_factor(beta, &frames),
            beta,
            frames,
            prop,
            scheme,
        })
    }

    pub fn eval(&self, u: C64) -> C64 {
        self.ratio(u) * self.g0
    }

    pub fn ratio(&self, u: C64) -> C64 {
        char_ratio(self.beta, &self.frames, &self.prop, u, self.scheme)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub e1: f64,
    pub e2: f64,
    pub w: f64,
    pub q: C64,
}

/// Joint (quasi)distribution of the two energy outcomes of one mode pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KdqDistribution {
    pub p: f64,
    pub scheme: Scheme,
    pub outcomes: Vec<Outcome>,
}

impl KdqDistribution {
    pub fn total(&self) -> C64 {
        self.outcomes.iter().map(|o| o.q).sum()
    }

    fn marginal(&self, key: impl Fn(&Outcome) -> f64) -> Vec<(f64, C64)> {
        let mut out: Vec<(f64, C64)> = Vec::new();
        for o in &self.outcomes {
            let e = key(o);
            match out.iter_mut().find(|(x, _)| *x == e) {
                Some((_, acc)) => *acc += o.q,
                None => out.push((e, o.q)),
            }
        }
        out
    }

    /// Summed over the final outcome: the populations of the first measurement.
    pub fn initial_marginal(&self) -> Vec<(f64, C64)> {
        self.marginal(|o| o.e1)
    }

    /// Summed over the initial outcome: the populations of the second measurement.
    pub fn final_marginal(&self) -> Vec<(f64, C64)> {
        self.marginal(|o| o.e2)
    }

    pub fn raw_moment(&self, k: i32) -> C64 {
        self.outcomes.iter().map(|o| o.q * o.w.powi(k)).sum()
    }

    /// `sum q exp(iuw)`, equal to `g_p(u) / g_p(0)`.
    pub fn char_ratio(&self, u: C64) -> C64 {
        self.outcomes
            .iter()
            .map(|o| o.q * (I * u * o.w).exp())
            .sum()
    }

    pub fn max_imag(&self) -> f64 {
        self.outcomes.iter().fold(0.0, |m, o| m.max(o.q.im.abs()))
    }
}

type M4 = Matrix4<C64>;

/// Embeds an even-sector 2x2 operator into the pair Fock space with basis
/// `{|0>, c+_p|0>, c+_-p|0>, c+_p c+_-p|0>}`; the 2x2 basis is `(|11>, |0>)`.
fn embed_even(m: &Mat2, odd: C64) -> M4 {
    let mut out = M4::zeros();
    out[(3, 3)] = m.at(0, 0);
    out[(3, 0)] = m.at(0, 1);
    out[(0, 3)] = m.at(1, 0);
    out[(0, 0)] = m.at(1, 1);
    out[(1, 1)] = odd;
    out[(2, 2)] = odd;
    out
}

/// Spectral projectors of the pair Hamiltonian at one field, keyed by energy.
fn fock_projectors(frame: &ModeFrame) -> Result<[(f64, M4); 3]> {
    let plus = embed_even(&projector(frame.v_plus()), ZERO);
    let minus = embed_even(&projector(frame.v_minus()), ZERO);
    let zero = embed_even(&Mat2::zero(), ONE);
    let ham = embed_even(&Mat2::from_real(frame.hmat), ZERO);
    let set = [(frame.omega, plus), (0.0, zero), (-frame.omega, minus)];

    let mut defect: f64 = 0.0;
    let mut sum = M4::zeros();
    for (e, proj) in &set {
        defect = defect.max((proj * proj - proj).camax());
        defect = defect.max((ham * proj - proj * C64::from(*e)).camax());
        sum += proj;
    }
    defect = defect.max((sum - M4::identity()).camax());
    if defect > PROJECTOR_TOL {
        return Err(Error::ProjectorError { defect });
    }
    Ok(set)
}

/// Nine-outcome joint distribution for one mode pair.
pub fn mode_kdq_distribution(
    beta: f64,
    frames: &ModeFrames,
    prop: &ModePropagator,
    scheme: Scheme,
) -> Result<KdqDistribution> {
    frames.check(prop)?;
    let state = ScaledState::new(beta, frames, Scheme::Kdq);
    let rho = embed_even(&state.even, C64::from(0.5 * state.odd_weight));
    let first = fock_projectors(&frames.first)?;
    let second = fock_projectors(&frames.second)?;
    let u = embed_even(&prop.matrix(), ONE);
    let u_adj = u.adjoint();

    let mut outcomes = Vec::with_capacity(9);
    for (e1, p1) in &first {
        let left = match scheme {
            Scheme::Kdq => rho * p1,
            Scheme::Tpm => p1 * rho * p1,
        };
        for (e2, p2) in &second {
            let q = (left * u_adj * p2 * u).trace();
            outcomes.push(Outcome {
                e1: *e1,
                e2: *e2,
                w: e2 - e1,
                q,
            });
        }
    }
    Ok(KdqDistribution {
        p: frames.p(),
        scheme,
        outcomes,
    })
}

/// Raw moments `sum q w^k`, `k = 1..4`, from the even-sector 2x2 algebra.
///
/// Same numbers as [`mode_kdq_distribution`] without the 4x4 bookkeeping;
/// the singly occupied sector only contributes at `w = 0`.
fn mode_raw_moments(
    beta: f64,
    frames: &ModeFrames,
    prop: &ModePropagator,
    scheme: Scheme,
) -> [C64; 4] {
    let state = ScaledState::new(beta, frames, Scheme::Kdq);
    let um = prop.matrix();
    let p1 = [
        (frames.first.omega, projector(frames.first.v_plus())),
        (-frames.first.omega, projector(frames.first.v_minus())),
    ];
    let p2 = [
        (frames.second.omega, projector(frames.second.v_plus())),
        (-frames.second.omega, projector(frames.second.v_minus())),
    ];
    let mut m = [ZERO; 4];
    for (e1, a) in &p1 {
        let left = match scheme {
            Scheme::Kdq => state.even * *a,
            Scheme::Tpm => *a * state.even * *a,
        };
        for (e2, b) in &p2 {
            let q = left.trace_product(&(um.adjoint() * *b * um));
            let w = e2 - e1;
            let mut wk = 1.0;
            for slot in m.iter_mut() {
                wk *= w;
                *slot += q * wk;
            }
        }
    }
    m
}

fn cumulants_from_raw(m: [C64; 4]) -> [C64; 4] {
    let [m1, m2, m3, m4] = m;
    let k2 = m2 - m1 * m1;
    let k3 = m3 - m2 * m1 * 3.0 + m1 * m1 * m1 * 2.0;
    let k4 = m4 - m3 * m1 * 4.0 - m2 * m2 * 3.0 + m2 * m1 * m1 * 12.0 - m1 * m1 * m1 * m1 * 6.0;
    [m1, k2, k3, k4]
}

/// Work cumulants per site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorkMoments {
    pub scheme: Scheme,
    pub mean: f64,
    /// Imaginary part of the first cumulant; zero up to rounding.
    pub mean_imag: f64,
    pub variance: C64,
    pub third_cumulant: C64,
    pub fourth_cumulant: C64,
    /// `kappa4 + 3 kappa2^2`.
    pub fourth_central: C64,
    /// Cumulants `kappa1..kappa4` of every mode pair, in grid order.
    pub per_mode: Vec<[C64; 4]>,
}

pub fn work_moments(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    props: &[ModePropagator],
    scheme: Scheme,
) -> Result<WorkMoments> {
    let frames = grid_frames(spec, grid)?;
    work_moments_with_frames(spec.beta, grid, &frames, props, scheme)
}

pub fn work_moments_with_frames(
    beta: f64,
    grid: &MomentumGrid,
    frames: &[ModeFrames],
    props: &[ModePropagator],
    scheme: Scheme,
) -> Result<WorkMoments> {
    check_lengths(grid, frames.len(), props.len())?;
    let mut per_mode = Vec::with_capacity(grid.len());
    let mut acc = [ZERO; 4];
    for ((node, f), prop) in grid.nodes().iter().zip(frames).zip(props) {
        f.check(prop)?;
        let k = cumulants_from_raw(mode_raw_moments(beta, f, prop, scheme));
        for (a, kk) in acc.iter_mut().zip(k) {
            *a += kk * node.weight;
        }
        per_mode.push(k);
    }
    let scale = 1.0 / TAU;
    let [k1, k2, k3, k4] = acc.map(|a| a * scale);
    Ok(WorkMoments {
        scheme,
        mean: k1.re,
        mean_imag: k1.im,
        variance: k2,
        third_cumulant: k3,
        fourth_cumulant: k4,
        fourth_central: k4 + k2 * k2 * 3.0,
        per_mode,
    })
}

pub(crate) fn check_lengths(grid: &MomentumGrid, frames: usize, props: usize) -> Result<()> {
    if frames != grid.len() || props != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "grid has {} nodes but {} frames and {} propagators were given",
            grid.len(),
            frames,
            props
        )));
    }
    Ok(())
}

/// Continuous logarithm of `ratio(s u)` for `s` from 0 to 1.
fn tracked_log(factor: &CharFactor, u: C64) -> Result<C64> {
    const COARSE: usize = 16;
    const MAX_DEPTH: u32 = 40;

    let check = |r: C64| {
        let modulus = r.norm();
        if modulus < BRANCH_FLOOR || !modulus.is_finite() {
            Err(Error::BranchTrackingFailure {
                p: factor.p,
                modulus,
            })
        } else {
            Ok(r)
        }
    };

    fn advance(
        factor: &CharFactor,
        u: C64,
        s0: f64,
        r0: C64,
        s1: f64,
        depth: u32,
        check: &dyn Fn(C64) -> Result<C64>,
    ) -> Result<(C64, f64)> {
        let r1 = check(factor.ratio(u * s1))?;
        let step = (r1 / r0).arg();
        if step.abs() <= 0.5 * PI || depth >= MAX_DEPTH {
            return Ok((r1, step));
        }
        let mid = 0.5 * (s0 + s1);
        let (rm, a) = advance(factor, u, s0, r0, mid, depth + 1, check)?;
        let (r1, b) = advance(factor, u, mid, rm, s1, depth + 1, check)?;
        Ok((r1, a + b))
    }

    let mut r = check(factor.ratio(ZERO))?;
    let mut phase = r.arg();
    for k in 0..COARSE {
        let s0 = k as f64 / COARSE as f64;
        let s1 = (k + 1) as f64 / COARSE as f64;
        let (r1, step) = advance(factor, u, s0, r, s1, 0, &check)?;
        phase += step;
        r = r1;
    }
    Ok(C64::new(r.norm().ln(), phase))
}

/// Characteristic function of the work.
///
/// For a finite chain this is the full product `prod_p g_p(u)/g_p(0)`; on a
/// quadrature grid it is the per-site generating function
/// `exp[(1/2pi) int log(g_p(u)/g_p(0)) dp]`.
pub fn char_function(
    spec: &ModelSpec,
    grid: &MomentumGrid,
    props: &[ModePropagator],
    u: C64,
    scheme: Scheme,
) -> Result<C64> {
    let frames = grid_frames(spec, grid)?;
    char_function_with_frames(spec.beta, grid, &frames, props, u, scheme)
}

pub fn char_function_with_frames(
    beta: f64,
    grid: &MomentumGrid,
    frames: &[ModeFrames],
    props: &[ModePropagator],
    u: C64,
    scheme: Scheme,
) -> Result<C64> {
    check_lengths(grid, frames.len(), props.len())?;
    let factors = frames
        .iter()
        .zip(props)
        .map(|(f, prop)| CharFactor::new(beta, *f, *prop, scheme))
        .collect::<Result<Vec<_>>>()?;
    match grid.kind() {
        GridKind::FiniteChain(_) => Ok(factors.iter().map(|f| f.ratio(u)).product()),
        GridKind::GaussLegendre(_) => {
            let logs: Vec<C64> = factors
                .par_iter()
                .map(|f| tracked_log(f, u))
                .collect::<Result<_>>()?;
            let total: C64 = grid
                .nodes()
                .iter()
                .zip(&logs)
                .map(|(n, l)| l * n.weight)
                .sum();
            Ok((total / TAU).exp())
        }
    }
}
