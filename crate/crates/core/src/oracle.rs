//! Brute-force Fock-space reference for short chains.
//!
//! Builds the real-space Hamiltonian
//!
//! ```text
//! H(h) = -sum_j sum_r [ T(r) c+_j c_{j+r} + D(r) c+_j c+_{j+r} + h.c. ] + h sum_j (2 n_j - 1)
//! ```
//!
//! on all `2^L` occupation states, with `c_{j+L} = -c_j`. Nothing here uses
//! momentum space, so it serves as an independent check of the mode
//! decomposition. Ramp evolution is generated by `H(t) / 2`, matching the
//! mode propagators.

use crate::dynamics::ramp_schedule;
use crate::error::{Error, Result};
use crate::kdq::Scheme;
use crate::linalg::{C64, I, ZERO};
use crate::model::{ModelSpec, Protocol};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use std::sync::OnceLock;

pub const MIN_SITES: usize = 4;
pub const MAX_SITES: usize = 12;

/// Eigenvalues closer than this are treated as one level.
pub const CLUSTER_TOL: f64 = 1e-8;

/// Sparse real operator as `(row, col, value)` triplets.
#[derive(Debug, Clone)]
struct Triplets {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    fn apply(&self, y: &DMatrix<C64>) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(y.nrows(), y.ncols());
        for j in 0..y.ncols() {
            let src = y.column(j);
            let mut dst = out.column_mut(j);
            for &(r, c, v) in &self.entries {
                dst[r] += src[c] * v;
            }
        }
        out
    }
}

/// `c_j |state>`: new state and fermionic sign, or `None` if site `j` is empty.
fn annihilate(state: usize, j: usize) -> Option<(usize, f64)> {
    if state & (1 << j) == 0 {
        return None;
    }
    let below = (state & ((1 << j) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state ^ (1 << j), sign))
}

fn create(state: usize, j: usize) -> Option<(usize, f64)> {
    if state & (1 << j) != 0 {
        return None;
    }
    let below = (state & ((1 << j) - 1)).count_ones();
    let sign = if below.is_multiple_of(2) { 1.0 } else { -1.0 };
    Some((state | (1 << j), sign))
}

enum Op {
    Create(usize),
    Annihilate(usize),
}

/// Applies `ops` right to left.
fn apply_string(state: usize, ops: &[Op]) -> Option<(usize, f64)> {
    let mut s = state;
    let mut sign = 1.0;
    for op in ops.iter().rev() {
        let (next, sg) = match *op {
            Op::Create(j) => create(s, j)?,
            Op::Annihilate(j) => annihilate(s, j)?,
        };
        s = next;
        sign *= sg;
    }
    Some((s, sign))
}

/// Coupling part `A` and field part `B` with `H(h) = A + h B`.
fn hamiltonian_parts(spec: &ModelSpec, l: usize) -> (Triplets, Vec<f64>) {
    let dim = 1usize << l;
    let mut entries = Vec::new();
    for state in 0..dim {
        for j in 0..l {
            for (ri, (&t, &d)) in spec.hopping.iter().zip(&spec.pairing).enumerate() {
                let r = ri + 1;
                let wraps = (j + r) / l;
                let k = (j + r) % l;
                let bc = if wraps.is_multiple_of(2) { 1.0 } else { -1.0 };
                let terms = [
                    (-t * bc, [Op::Create(j), Op::Annihilate(k)]),
                    (-t * bc, [Op::Create(k), Op::Annihilate(j)]),
                    (-d * bc, [Op::Create(j), Op::Create(k)]),
                    (-d * bc, [Op::Annihilate(k), Op::Annihilate(j)]),
                ];
                for (coef, ops) in terms {
                    if coef == 0.0 {
                        continue;
                    }
                    if let Some((target, sign)) = apply_string(state, &ops) {
                        entries.push((target, state, coef * sign));
                    }
                }
            }
        }
    }
    let field = (0..dim)
        .map(|s| 2.0 * (s as u32).count_ones() as f64 - l as f64)
        .collect();
    (Triplets { dim, entries }, field)
}

fn check_sites(l: usize) -> Result<()> {
    if !l.is_multiple_of(2) || !(MIN_SITES..=MAX_SITES).contains(&l) {
        return Err(Error::DimensionTooLarge(l));
    }
    Ok(())
}

/// Real-space Hamiltonian at field `h` as a dense matrix.
pub fn dense_hamiltonian(spec: &ModelSpec, l: usize, h: f64) -> Result<DMatrix<f64>> {
    check_sites(l)?;
    let (a, b) = hamiltonian_parts(spec, l);
    let mut m = a.to_dense();
    for (i, v) in b.iter().enumerate() {
        m[(i, i)] += h * v;
    }
    Ok(m)
}

/// Eigenpairs sorted by ascending energy.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub energies: DVector<f64>,
    pub vectors: DMatrix<f64>,
}

impl Spectrum {
    fn of(m: DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies =
            DVector::from_iterator(order.len(), order.iter().map(|&i| eig.eigenvalues[i]));
        let vectors = DMatrix::from_columns(
            &order
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect::<Vec<_>>(),
        );
        Spectrum { energies, vectors }
    }

    /// Index ranges of degenerate levels.
    pub fn clusters(&self) -> Result<Vec<std::ops::Range<usize>>> {
        let e = &self.energies;
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=e.len() {
            if i == e.len() || e[i] - e[i - 1] > CLUSTER_TOL {
                if i < e.len() && e[i] - e[i - 1] < 10.0 * CLUSTER_TOL {
                    return Err(Error::DegeneracyClusteringAmbiguous {
                        gap: e[i] - e[i - 1],
                    });
                }
                out.push(start..i);
                start = i;
            }
        }
        Ok(out)
    }

    fn level(&self, range: &std::ops::Range<usize>) -> f64 {
        let n = range.len() as f64;
        range.clone().map(|i| self.energies[i]).sum::<f64>() / n
    }
}

/// Full many-body data for one protocol.
#[derive(Debug)]
pub struct DenseSystem {
    pub sites: usize,
    pub beta: f64,
    pub h0: DMatrix<f64>,
    pub h1: DMatrix<f64>,
    pub h2: DMatrix<f64>,
    pub rho0: DMatrix<f64>,
    pub u: DMatrix<C64>,
    pub initial: Spectrum,
    pub first: Spectrum,
    pub second: Spectrum,
    /// `V1^T U^+ V2`
    transfer: DMatrix<C64>,
    kdq_weights: OnceLock<DMatrix<C64>>,
    tpm_weights: OnceLock<Result<DMatrix<C64>>>,
}

/// Time-ordered `exp(-i/2 int H dt)` for `h(t) = h1 + rate t` by Taylor stepping.
fn ramp_unitary(
    a: &Triplets,
    field: &[f64],
    h1: f64,
    rate: f64,
    duration: f64,
    norm_bound: f64,
) -> DMatrix<C64> {
    let dim = a.dim;
    let mut u = DMatrix::<C64>::identity(dim, dim);
    if duration == 0.0 {
        return u;
    }
    let steps = (0.5 * norm_bound * duration).ceil().max(1.0) as usize;
    let dt = duration / steps as f64;
    let field_times = |y: &DMatrix<C64>| {
        let mut out = y.clone();
        for (i, mut row) in out.row_iter_mut().enumerate() {
            row *= C64::from(field[i]);
        }
        out
    };
    let half_i = -0.5 * I;
    for n in 0..steps {
        let h_start = h1 + rate * (n as f64 * dt);
        // Taylor coefficients Y_k of Y(tau) = sum Y_k tau^k
        let mut prev = DMatrix::<C64>::zeros(dim, dim);
        let mut cur = u.clone();
        let mut acc = u.clone();
        let mut power = 1.0;
        for k in 0..200 {
            let hy = a.apply(&cur) + field_times(&cur) * C64::from(h_start);
            let by = field_times(&prev) * C64::from(rate);
            let next = (hy + by) * (half_i / (k + 1) as f64);
            power *= dt;
            let term = &next * C64::from(power);
            let size = term.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
            acc += term;
            prev = cur;
            cur = next;
            if size < 1e-17 && k > 4 {
                break;
            }
        }
        u = acc;
    }
    u
}

fn max_abs_energy(s: &Spectrum) -> f64 {
    let e = &s.energies;
    e[0].abs().max(e[e.len() - 1].abs())
}

pub fn build_dense(spec: &ModelSpec, l: usize) -> Result<DenseSystem> {
    check_sites(l)?;
    spec.validate()?;
    let (a, field) = hamiltonian_parts(spec, l);
    let with_field = |h: f64| {
        let mut m = a.to_dense();
        for (i, v) in field.iter().enumerate() {
            m[(i, i)] += h * v;
        }
        m
    };
    let (h0, h1, h2) = (
        with_field(spec.h0),
        with_field(spec.h1),
        with_field(spec.h2),
    );
    let initial = Spectrum::of(h0.clone());
    let first = Spectrum::of(h1.clone());
    let second = Spectrum::of(h2.clone());

    let e0 = &initial.energies;
    let emin = e0[0];
    let boltz: Vec<f64> = e0.iter().map(|e| (-spec.beta * (e - emin)).exp()).collect();
    let z: f64 = boltz.iter().sum();
    let v0 = &initial.vectors;
    let mut scaled = v0.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= boltz[j] / z;
    }
    let rho0 = &scaled * v0.transpose();

    let u = match spec.protocol {
        Protocol::SuddenQuench => DMatrix::identity(a.dim, a.dim),
        Protocol::LinearRamp { delta } => {
            let (duration, rate) = ramp_schedule(spec.h1, spec.h2, delta);
            // |H(t)| is convex in the field, so the endpoints bound it
            let bound = max_abs_energy(&first).max(max_abs_energy(&second));
            ramp_unitary(&a, &field, spec.h1, rate, duration, bound)
        }
    };

    let v1 = first.vectors.map(C64::from);
    let v2 = second.vectors.map(C64::from);
    let transfer = v1.transpose() * u.adjoint() * v2;
    Ok(DenseSystem {
        sites: l,
        beta: spec.beta,
        h0,
        h1,
        h2,
        rho0,
        u,
        initial,
        first,
        second,
        transfer,
        kdq_weights: OnceLock::new(),
        tpm_weights: OnceLock::new(),
    })
}

impl DenseSystem {
    pub fn dim(&self) -> usize {
        self.rho0.nrows()
    }

    /// Initial state in the eigenbasis of `H1`.
    fn state_in_first_basis(&self) -> DMatrix<f64> {
        let v1 = &self.first.vectors;
        v1.transpose() * &self.rho0 * v1
    }

    fn dephased_in_first_basis(&self) -> Result<DMatrix<f64>> {
        let x = self.state_in_first_basis();
        let clusters = self.first.clusters()?;
        let mut out = DMatrix::zeros(x.nrows(), x.ncols());
        for c in &clusters {
            for i in c.clone() {
                for j in c.clone() {
                    out[(i, j)] = x[(i, j)];
                }
            }
        }
        Ok(out)
    }

    fn weights_from(&self, x: &DMatrix<f64>) -> DMatrix<C64> {
        let k = &self.transfer;
        let m = k.adjoint() * x.map(C64::from);
        DMatrix::from_fn(k.nrows(), k.ncols(), |a, b| k[(a, b)] * m[(b, a)])
    }

    /// `w[a, b]`: weight of the eigenstate pair `(a of H1, b of H2)`.
    pub fn weights(&self, scheme: Scheme) -> Result<&DMatrix<C64>> {
        match scheme {
            Scheme::Kdq => Ok(self
                .kdq_weights
                .get_or_init(|| self.weights_from(&self.state_in_first_basis()))),
            Scheme::Tpm => self
                .tpm_weights
                .get_or_init(|| Ok(self.weights_from(&self.dephased_in_first_basis()?)))
                .as_ref()
                .map_err(Clone::clone),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        [&self.h0, &self.h1, &self.h2]
            .iter()
            .map(|h| (*h - h.transpose()).amax())
            .fold(0.0, f64::max)
    }

    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        (self.u.adjoint() * &self.u - DMatrix::<C64>::identity(n, n)).camax()
    }
}

/// `Tr[X exp(-iu H1) U^+ exp(iu H2) U]` with `X = rho0` or its dephased form.
pub fn dense_char_function(sys: &DenseSystem, u: C64, scheme: Scheme) -> Result<C64> {
    let w = sys.weights(scheme)?;
    let e1 = &sys.first.energies;
    let e2 = &sys.second.energies;
    let left: Vec<C64> = e1.iter().map(|e| (-I * u * *e).exp()).collect();
    let right: Vec<C64> = e2.iter().map(|e| (I * u * *e).exp()).collect();
    let mut acc = ZERO;
    for b in 0..w.ncols() {
        let mut col = ZERO;
        for a in 0..w.nrows() {
            col += left[a] * w[(a, b)];
        }
        acc += col * right[b];
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseOutcome {
    pub e1: f64,
    pub e2: f64,
    pub q: C64,
}

/// Joint distribution over pairs of energy levels.
pub fn dense_joint_distribution(sys: &DenseSystem, scheme: Scheme) -> Result<Vec<DenseOutcome>> {
    let w = sys.weights(scheme)?;
    let c1 = sys.first.clusters()?;
    let c2 = sys.second.clusters()?;
    let mut out = Vec::with_capacity(c1.len() * c2.len());
    for r1 in &c1 {
        for r2 in &c2 {
            let mut q = ZERO;
            for a in r1.clone() {
                for b in r2.clone() {
                    q += w[(a, b)];
                }
            }
            out.push(DenseOutcome {
                e1: sys.first.level(r1),
                e2: sys.second.level(r2),
                q,
            });
        }
    }
    Ok(out)
}

/// `Tr[U rho0 U^+ H2] - Tr[rho0 H1]`.
pub fn dense_mean_work(sys: &DenseSystem) -> f64 {
    let rho = sys.rho0.map(C64::from);
    let evolved = &sys.u * rho * sys.u.adjoint();
    let h2 = sys.h2.map(C64::from);
    let final_energy = (evolved * h2).trace().re;
    let initial_energy = (&sys.rho0 * &sys.h1).trace();
    final_energy - initial_energy
}

fn entropy(values: impl Iterator<Item = f64>) -> f64 {
    values.filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum()
}

/// `S[dephased rho0] - S[rho0]`, with dephasing in the eigenbasis of `H1`.
pub fn dense_coherence_entropy(sys: &DenseSystem) -> Result<f64> {
    let e0 = &sys.initial.energies;
    let emin = e0[0];
    let boltz: Vec<f64> = e0.iter().map(|e| (-sys.beta * (e - emin)).exp()).collect();
    let z: f64 = boltz.iter().sum();
    let s_rho = entropy(boltz.iter().map(|b| b / z));

    let x = sys.state_in_first_basis();
    let mut s_deph = 0.0;
    for c in sys.first.clusters()? {
        let block = x.view((c.start, c.start), (c.len(), c.len())).into_owned();
        let eig = SymmetricEigen::new(block);
        s_deph += entropy(eig.eigenvalues.iter().copied());
    }
    Ok(s_deph - s_rho)
}

/// Many-body levels `sum_p (+-w_p or 0)` predicted by the mode decomposition
/// for the antiperiodic chain, sorted ascending.
pub fn momentum_spectrum(spec: &ModelSpec, l: usize, h: f64) -> Result<Vec<f64>> {
    let grid = crate::grid::MomentumGrid::finite_chain(l)?;
    let mut levels = vec![0.0];
    for p in grid.momenta() {
        let w = crate::model::mode_frame(spec, p, h)?.omega;
        levels = levels.iter().flat_map(|e| [e + w, *e, *e, e - w]).collect();
    }
    levels.sort_by(f64::total_cmp);
    Ok(levels)
}
