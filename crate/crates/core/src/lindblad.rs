//! Lindblad master equation: dissipators, the vectorized Liouvillian, time
//! propagation and the steady state.
//!
//! Vectorization stacks columns, `vec(ρ)[i + j·d] = ρ[i, j]`, which is the
//! native storage order of nalgebra matrices. With this convention
//! `vec(AXB) = (Bᵀ ⊗ A) vec(X)`.
//!
//! Propagation accepts arbitrary (non-Hermitian, non-normalized) matrices;
//! the Liouvillian is linear, so quantum-regression seeds such as `a ρ a†`
//! evolve with the same map as states.

use faer::sparse::{SparseColMat, Triplet};
use faer::linalg::solvers::Solve;
use faer::Mat;

use crate::hilbert::{hermitize, DensityMatrix, Level, Operator, Space};
use crate::model::{hamiltonian, SystemParams};
use crate::sparse::{dense_triplets, kron_triplets, CsrMatrix};
use crate::{hilbert, Error, Result, C64};

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// Jump operator `O` with rate `Γ`, contributing `(Γ/2)(2OρO† − ρO†O − O†Oρ)`.
#[derive(Debug, Clone)]
pub struct CollapseOperator {
    pub label: &'static str,
    pub op: Operator,
    pub rate: f64,
}

/// The six decay channels: cavity loss of both modes and radiative decay of
/// both cascade branches.
pub fn collapse_operators(params: &SystemParams, space: &Space) -> Vec<CollapseOperator> {
    let emit = |i: Level, j: Level| hilbert::embed_emitter4(&hilbert::transition(i, j), space);
    vec![
        CollapseOperator { label: "a_H", op: space.a_h(), rate: params.kappa },
        CollapseOperator { label: "a_V", op: space.a_v(), rate: params.kappa },
        CollapseOperator { label: "G<-X_H", op: emit(Level::G, Level::XH), rate: params.gamma },
        CollapseOperator { label: "G<-X_V", op: emit(Level::G, Level::XV), rate: params.gamma },
        CollapseOperator { label: "X_H<-XX", op: emit(Level::XH, Level::XX), rate: params.gamma },
        CollapseOperator { label: "X_V<-XX", op: emit(Level::XV, Level::XX), rate: params.gamma },
    ]
}

/// `(Γ/2)(2OρO† − ρO†O − O†Oρ)`.
pub fn dissipator(op: &Operator, rate: f64, rho: &Operator) -> Result<Operator> {
    if op.shape() != rho.shape() {
        return Err(Error::DimensionMismatch { expected: rho.nrows(), found: op.nrows() });
    }
    if rate < 0.0 {
        return Err(Error::InvalidParams(format!("negative rate {rate}")));
    }
    let od = op.adjoint();
    let odo = &od * op;
    let jump = op * rho * &od * C64::new(2.0, 0.0);
    Ok((jump - rho * &odo - &odo * rho) * C64::new(0.5 * rate, 0.0))
}

/// Linear generator `dρ/dt = L[ρ]` in both matrix-free and sparse
/// superoperator form.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    space: Space,
    params: Option<SystemParams>,
    hamiltonian: Operator,
    collapse: Vec<CollapseOperator>,
    superop: CsrMatrix,
    bound: f64,
}

impl Liouvillian {
    /// Assembles the Liouvillian of the emitter-cavity system.
    pub fn new(params: &SystemParams) -> Result<Self> {
        params.validate()?;
        let space = params.space()?;
        let h = hamiltonian(params, &space);
        let mut l = Self::from_parts(space, h, collapse_operators(params, &space))?;
        l.params = Some(*params);
        Ok(l)
    }

    /// Builds a Liouvillian from an arbitrary Hamiltonian and jump operators.
    pub fn from_parts(space: Space, hamiltonian: Operator, collapse: Vec<CollapseOperator>) -> Result<Self> {
        let d = space.dim();
        if hamiltonian.nrows() != d || hamiltonian.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: hamiltonian.nrows() });
        }
        for c in &collapse {
            if c.op.nrows() != d || c.op.ncols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: c.op.nrows() });
            }
            if c.rate < 0.0 || !c.rate.is_finite() {
                return Err(Error::InvalidParams(format!("rate of {} is {}", c.label, c.rate)));
            }
        }
        let superop = assemble(d, &hamiltonian, &collapse);
        let bound = superop.norm_inf().max(superop.norm_one());
        Ok(Self { space, params: None, hamiltonian, collapse, superop, bound })
    }

    pub fn space(&self) -> &Space {
        &self.space
    }

    pub fn params(&self) -> Option<&SystemParams> {
        self.params.as_ref()
    }

    pub fn hamiltonian(&self) -> &Operator {
        &self.hamiltonian
    }

    pub fn collapse(&self) -> &[CollapseOperator] {
        &self.collapse
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// Dimension of the vectorized space, `dim²`.
    pub fn superdim(&self) -> usize {
        self.dim() * self.dim()
    }

    pub fn superoperator(&self) -> &CsrMatrix {
        &self.superop
    }

    /// Upper bound on the induced norm of the superoperator.
    pub fn norm_bound(&self) -> f64 {
        self.bound
    }

    /// Matrix-free action `L[ρ]` computed from dense operator products.
    pub fn apply(&self, rho: &Operator) -> Operator {
        let h = &self.hamiltonian;
        let mut out = (h * rho - rho * h) * C64::new(0.0, -1.0);
        for c in &self.collapse {
            if c.rate > 0.0 {
                out += dissipator(&c.op, c.rate, rho).expect("dimensions checked at construction");
            }
        }
        out
    }

    /// `y = L x` on column-stacked vectors.
    pub fn apply_vec(&self, x: &[C64], y: &mut [C64]) {
        self.superop.matvec(x, y);
    }

    /// Dense superoperator assembled column by column from [`Liouvillian::apply`].
    pub fn dense_superoperator(&self) -> Mat<C64> {
        let d = self.dim();
        let n = d * d;
        let mut m = Mat::<C64>::zeros(n, n);
        let mut e = Operator::zeros(d, d);
        for j in 0..d {
            for i in 0..d {
                e[(i, j)] = ONE;
                let col = self.apply(&e);
                let k = i + j * d;
                for (r, v) in col.as_slice().iter().enumerate() {
                    m[(r, k)] = *v;
                }
                e[(i, j)] = ZERO;
            }
        }
        m
    }

    /// `max |L[ρ]|` elementwise.
    pub fn residual(&self, rho: &Operator) -> f64 {
        let x = vectorize(rho);
        let mut y = vec![ZERO; x.len()];
        self.apply_vec(&x, &mut y);
        y.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

fn assemble(d: usize, h: &Operator, collapse: &[CollapseOperator]) -> CsrMatrix {
    let id: Vec<(usize, usize, C64)> = (0..d).map(|i| (i, i, ONE)).collect();
    let mut trip = Vec::new();
    // −i(I ⊗ H − Hᵀ ⊗ I)
    let mi = C64::new(0.0, -1.0);
    let h_t = dense_triplets(h);
    let ht: Vec<_> = h_t.iter().map(|&(i, j, v)| (j, i, v)).collect();
    kron_triplets(&id, &scale(&h_t, mi), d, &mut trip);
    kron_triplets(&scale(&ht, -mi), &id, d, &mut trip);
    for c in collapse.iter().filter(|c| c.rate > 0.0) {
        let half = C64::new(0.5 * c.rate, 0.0);
        let o = dense_triplets(&c.op);
        let oconj: Vec<_> = o.iter().map(|&(i, j, v)| (i, j, v.conj())).collect();
        let odo = c.op.adjoint() * &c.op;
        let odo_t = dense_triplets(&odo);
        let odo_tr: Vec<_> = odo_t.iter().map(|&(i, j, v)| (j, i, v)).collect();
        // conj(O) ⊗ O, −½ I ⊗ O†O, −½ (O†O)ᵀ ⊗ I
        kron_triplets(&oconj, &scale(&o, half * 2.0), d, &mut trip);
        kron_triplets(&id, &scale(&odo_t, -half), d, &mut trip);
        kron_triplets(&scale(&odo_tr, -half), &id, d, &mut trip);
    }
    CsrMatrix::from_triplets(d * d, d * d, trip)
}

fn scale(t: &[(usize, usize, C64)], s: C64) -> Vec<(usize, usize, C64)> {
    t.iter().map(|&(i, j, v)| (i, j, v * s)).collect()
}

pub fn vectorize(m: &Operator) -> Vec<C64> {
    m.as_slice().to_vec()
}

pub fn unvectorize(v: &[C64], d: usize) -> Operator {
    Operator::from_column_slice(d, d, v)
}

/// Time-stepping scheme for [`propagate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integrator {
    /// Truncated Taylor series of `exp(hL)` on substeps with `h·‖L‖ ≤ theta`;
    /// a series stops once two consecutive terms fall below `tol` relative.
    Taylor { tol: f64, theta: f64 },
    /// Classical fixed-step fourth-order Runge-Kutta.
    Rk4 { step: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Taylor { tol: 1e-15, theta: 4.0 }
    }
}

const MAX_TAYLOR_TERMS: usize = 120;
const TRACE_DRIFT_LIMIT: f64 = 1e-4;

/// Reusable buffers for vector propagation.
pub struct Workspace {
    a: Vec<C64>,
    b: Vec<C64>,
    c: Vec<C64>,
}

impl Workspace {
    pub fn new(n: usize) -> Self {
        Self { a: vec![ZERO; n], b: vec![ZERO; n], c: vec![ZERO; n] }
    }
}

fn inf_norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.re.abs().max(v.im.abs())).fold(0.0, f64::max)
}

fn vec_trace(x: &[C64], d: usize) -> C64 {
    (0..d).map(|i| x[i + i * d]).sum()
}

/// Evolves the column-stacked matrix `x` by `t` in place.
pub fn propagate_vec(l: &Liouvillian, x: &mut [C64], t: f64, integ: Integrator, ws: &mut Workspace) -> Result<()> {
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParams(format!("propagation time {t}")));
    }
    if t == 0.0 {
        return Ok(());
    }
    let d = l.dim();
    let tr0 = vec_trace(x, d);
    let scale0: f64 = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let step;
    match integ {
        Integrator::Taylor { tol, theta } => {
            let n_sub = ((t * l.norm_bound() / theta).ceil() as usize).max(1);
            let h = t / n_sub as f64;
            step = h;
            for _ in 0..n_sub {
                taylor_step(l, x, h, tol, ws);
            }
        }
        Integrator::Rk4 { step: h_max } => {
            if h_max <= 0.0 {
                return Err(Error::InvalidParams(format!("RK4 step {h_max}")));
            }
            let n = ((t / h_max).ceil() as usize).max(1);
            let h = t / n as f64;
            step = h;
            for _ in 0..n {
                rk4_step(l, x, h, ws);
                if !x[0].re.is_finite() {
                    break;
                }
            }
        }
    }
    let drift = (vec_trace(x, d) - tr0).norm() / scale0.max(f64::MIN_POSITIVE);
    if !drift.is_finite() || x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) || drift > TRACE_DRIFT_LIMIT {
        return Err(Error::IntegrationFailure { drift, step });
    }
    Ok(())
}

fn taylor_step(l: &Liouvillian, x: &mut [C64], h: f64, tol: f64, ws: &mut Workspace) {
    let term = &mut ws.a;
    let next = &mut ws.b;
    term.copy_from_slice(x);
    let mut small = 0;
    for k in 1..=MAX_TAYLOR_TERMS {
        l.apply_vec(term, next);
        let f = C64::new(h / k as f64, 0.0);
        for (t, n) in term.iter_mut().zip(next.iter()) {
            *t = n * f;
        }
        for (xi, t) in x.iter_mut().zip(term.iter()) {
            *xi += t;
        }
        if inf_norm(term) <= tol * inf_norm(x) {
            small += 1;
            if small == 2 {
                break;
            }
        } else {
            small = 0;
        }
    }
}

fn rk4_step(l: &Liouvillian, x: &mut [C64], h: f64, ws: &mut Workspace) {
    let Workspace { a: k, b: tmp, c: acc } = ws;
    let hc = C64::new(h, 0.0);
    // k1
    l.apply_vec(x, k);
    for i in 0..x.len() {
        acc[i] = k[i];
        tmp[i] = x[i] + k[i] * (hc * 0.5);
    }
    // k2
    l.apply_vec(tmp, k);
    for i in 0..x.len() {
        acc[i] += k[i] * 2.0;
        tmp[i] = x[i] + k[i] * (hc * 0.5);
    }
    // k3
    l.apply_vec(tmp, k);
    for i in 0..x.len() {
        acc[i] += k[i] * 2.0;
        tmp[i] = x[i] + k[i] * hc;
    }
    // k4
    l.apply_vec(tmp, k);
    for i in 0..x.len() {
        x[i] += (acc[i] + k[i]) * (hc / 6.0);
    }
}

/// Evolves a general matrix `x0` (state or regression seed) by `t`.
pub fn propagate(l: &Liouvillian, x0: &Operator, t: f64, integ: Integrator) -> Result<Operator> {
    let d = l.dim();
    if x0.nrows() != d || x0.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x0.nrows() });
    }
    let mut x = vectorize(x0);
    let mut ws = Workspace::new(x.len());
    propagate_vec(l, &mut x, t, integ, &mut ws)?;
    Ok(unvectorize(&x, d))
}

/// Residual threshold for an accepted steady state.
pub const STEADY_STATE_TOL: f64 = 1e-10;

/// Steady state from the sparse linear system `L vec(ρ) = 0` with the first
/// equation replaced by `Tr ρ = 1`, followed by iterative refinement.
pub fn steady_state(l: &Liouvillian) -> Result<DensityMatrix> {
    let d = l.dim();
    let n = d * d;
    let mut trip: Vec<(usize, usize, C64)> = l.superoperator().triplets().filter(|&(r, _, _)| r != 0).collect();
    trip.extend((0..d).map(|i| (0, i + i * d, ONE)));
    let a = CsrMatrix::from_triplets(n, n, trip);
    let ftrip: Vec<Triplet<usize, usize, C64>> = a.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
    let sp = SparseColMat::<usize, C64>::try_new_from_triplets(n, n, &ftrip)
        .map_err(|e| Error::Linalg(format!("{e:?}")))?;
    let lu = sp.sp_lu().map_err(|e| Error::Linalg(format!("{e:?}")))?;

    let mut b = vec![ZERO; n];
    b[0] = ONE;
    let mut x = Mat::<C64>::from_fn(n, 1, |i, _| b[i]);
    lu.solve_in_place(x.as_mut());
    let mut xv: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
    let mut ax = vec![ZERO; n];
    let mut best = f64::INFINITY;
    let mut rho = Operator::zeros(d, d);
    for _ in 0..4 {
        rho = unvectorize(&xv, d);
        rho = hermitize(&rho);
        rho /= rho.trace();
        best = l.residual(&rho);
        if best < 0.1 * STEADY_STATE_TOL {
            break;
        }
        a.matvec(&xv, &mut ax);
        let mut r = Mat::<C64>::from_fn(n, 1, |i, _| b[i] - ax[i]);
        lu.solve_in_place(r.as_mut());
        for (i, v) in xv.iter_mut().enumerate() {
            *v += r[(i, 0)];
        }
    }
    if !(best < STEADY_STATE_TOL) {
        return Err(Error::SteadyStateFailure { residual: best });
    }
    Ok(DensityMatrix::new_unchecked(rho))
}

/// Settings for [`steady_state_by_propagation`].
#[derive(Debug, Clone, Copy)]
pub struct PropagationSettings {
    /// Time between stationarity checks, in `ħ/g`.
    pub check_interval: f64,
    /// Threshold on `max |ρ(t + interval) − ρ(t)|`.
    pub tol: f64,
    pub max_time: f64,
    pub integrator: Integrator,
    /// Above this superoperator dimension the interval propagator is applied
    /// with `integrator` instead of as a precomputed dense exponential.
    pub dense_limit: usize,
}

impl Default for PropagationSettings {
    fn default() -> Self {
        Self { check_interval: 10.0, tol: 1e-12, max_time: 1e6, integrator: Integrator::default(), dense_limit: 2500 }
    }
}

/// Steady state by evolving `|G,0,0⟩` until the state stops changing.
pub fn steady_state_by_propagation(l: &Liouvillian, settings: &PropagationSettings) -> Result<DensityMatrix> {
    let space = *l.space();
    let d = space.dim();
    let n = d * d;
    let g = space.index(Level::G.index(), 0, 0);
    let mut x = vec![ZERO; n];
    x[g + g * d] = ONE;
    let dense = (n <= settings.dense_limit).then(|| {
        let mut m = l.dense_superoperator();
        m *= faer::Scale(C64::new(settings.check_interval, 0.0));
        dense_expm(&m)
    });
    let mut ws = Workspace::new(n);
    let mut t = 0.0;
    let mut change = f64::INFINITY;
    while t < settings.max_time {
        let prev = x.clone();
        match &dense {
            Some(p) => {
                let col = Mat::<C64>::from_fn(n, 1, |i, _| prev[i]);
                let y = p * &col;
                for (i, v) in x.iter_mut().enumerate() {
                    *v = y[(i, 0)];
                }
            }
            None => propagate_vec(l, &mut x, settings.check_interval, settings.integrator, &mut ws)?,
        }
        t += settings.check_interval;
        change = x.iter().zip(&prev).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        if change < settings.tol {
            let mut rho = hermitize(&unvectorize(&x, d));
            rho /= rho.trace();
            return Ok(DensityMatrix::new_unchecked(rho));
        }
    }
    Err(Error::SteadyStateFailure { residual: change })
}

/// Dense matrix exponential `exp(A)` by scaling and squaring of a Taylor
/// series; intended for small superoperators.
pub fn dense_expm(a: &Mat<C64>) -> Mat<C64> {
    let n = a.nrows();
    let norm = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
    let mut scaled = a.clone();
    scaled *= faer::Scale(C64::new(0.5f64.powi(s), 0.0));
    let mut result = Mat::<C64>::identity(n, n);
    let mut term = Mat::<C64>::identity(n, n);
    for k in 1..=30 {
        term = &scaled * &term;
        term *= faer::Scale(C64::new(1.0 / k as f64, 0.0));
        result += &term;
        let tn = (0..n).flat_map(|j| (0..n).map(move |i| (i, j))).map(|(i, j)| term[(i, j)].norm()).fold(0.0, f64::max);
        if tn < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        result = &result * &result;
    }
    result
}

/// `⟨a_H†a_H + a_V†a_V⟩`.
pub fn mean_photon_number(rho: &DensityMatrix, space: &Space) -> f64 {
    let m = rho.as_matrix();
    (0..space.dim())
        .map(|i| {
            let (_, nh, nv) = space.label(i);
            m[(i, i)].re * (nh + nv) as f64
        })
        .sum()
}
