//! Two-time photon correlations from the quantum regression theorem and the
//! reconstructed two-photon polarization density matrix.
//!
//! Two-photon basis order is `HH, HV, VH, VV`; the first letter is the
//! earlier photon. `G_{jk,lm}(τ') = Tr{a_k† a_m e^{Lτ'}(a_l ρ_s a_j†)}` sits at
//! row `2j + k`, column `2l + m`.

use nalgebra::{Matrix4, SymmetricEigen};
use rayon::prelude::*;

use crate::hilbert::{trace_product, DensityMatrix, Operator};
use crate::lindblad::{propagate_vec, vectorize, Integrator, Liouvillian, Workspace};
use crate::units::{ps_to_internal, DEFAULT_G_MEV};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H = 0,
    V = 1,
}

impl Polarization {
    pub const ALL: [Polarization; 2] = [Polarization::H, Polarization::V];
}

pub const PAIR_LABELS: [&str; 4] = ["HH", "HV", "VH", "VV"];

/// Index of the photon pair `(first, second)` in the two-photon basis.
pub fn pair_index(first: Polarization, second: Polarization) -> usize {
    2 * first as usize + second as usize
}

/// Time-averaged correlation matrix `Ḡ⁽²⁾`.
#[derive(Debug, Clone, PartialEq)]
pub struct G2Matrix {
    pub entries: Matrix4<C64>,
    /// Averaging window τ in `ħ/g`.
    pub tau_window: f64,
}

impl G2Matrix {
    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect4(&self.entries)
    }
}

fn hermitian_defect4(m: &Matrix4<C64>) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Normalized two-photon polarization density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPhotonDm(Matrix4<C64>);

impl TwoPhotonDm {
    /// Wraps `m` after checking Hermiticity (1e-10), unit trace (1e-10) and
    /// positivity (−1e-8).
    pub fn new(m: Matrix4<C64>) -> Result<Self> {
        let rho = Self(m);
        rho.check()?;
        Ok(rho)
    }

    pub fn new_unchecked(m: Matrix4<C64>) -> Self {
        Self(m)
    }

    /// Projector onto the normalized pure state `psi`.
    pub fn pure(psi: [C64; 4]) -> Self {
        let v = nalgebra::Vector4::from(psi);
        let v = &v / C64::new(v.norm(), 0.0);
        Self(v * v.adjoint())
    }

    pub fn as_matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.0[(row, col)]
    }

    pub fn abs(&self) -> Matrix4<f64> {
        self.0.map(|z| z.norm())
    }

    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect4(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let h = (self.0 + self.0.adjoint()) * C64::new(0.5, 0.0);
        SymmetricEigen::new(h).eigenvalues.min()
    }

    pub fn check(&self) -> Result<()> {
        let herm = self.hermitian_defect();
        if !(herm <= 1e-10) {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:.3e}")));
        }
        let tr = self.0.trace();
        if !((tr - C64::new(1.0, 0.0)).norm() <= 1e-10) {
            return Err(Error::InvalidState(format!("trace {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -1e-8 {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

/// Residual above which a state is not accepted as stationary.
pub const STATIONARITY_TOL: f64 = 1e-8;

fn check_stationary(l: &Liouvillian, rho_s: &DensityMatrix) -> Result<()> {
    let d = l.dim();
    if rho_s.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: rho_s.dim() });
    }
    let residual = l.residual(rho_s.as_matrix());
    if !(residual <= STATIONARITY_TOL) {
        return Err(Error::NotStationary { residual });
    }
    Ok(())
}

fn mode(l: &Liouvillian, p: Polarization) -> Operator {
    match p {
        Polarization::H => l.space().a_h(),
        Polarization::V => l.space().a_v(),
    }
}

/// Sparse readout `X ↦ Tr(A X)` on a column-stacked `X`.
struct Readout {
    entries: Vec<(usize, C64)>,
}

impl Readout {
    fn new(a: &Operator) -> Self {
        let d = a.nrows();
        let mut entries = Vec::new();
        for r in 0..d {
            for c in 0..d {
                let v = a[(r, c)];
                if v != C64::new(0.0, 0.0) {
                    // A_rc X_cr
                    entries.push((c + r * d, v));
                }
            }
        }
        Self { entries }
    }

    fn eval(&self, x: &[C64]) -> C64 {
        self.entries.iter().map(|&(i, v)| v * x[i]).sum()
    }
}

/// Single correlation `G_{jk,lm}(τ')`.
#[allow(clippy::too_many_arguments)]
pub fn g2(
    l: &Liouvillian,
    rho_s: &DensityMatrix,
    j: Polarization,
    k: Polarization,
    lp: Polarization,
    m: Polarization,
    tau_p: f64,
    integrator: Integrator,
) -> Result<C64> {
    check_stationary(l, rho_s)?;
    let seed = mode(l, lp) * rho_s.as_matrix() * mode(l, j).adjoint();
    let mut x = vectorize(&seed);
    let mut ws = Workspace::new(x.len());
    propagate_vec(l, &mut x, tau_p, integrator, &mut ws)?;
    let readout = Readout::new(&(mode(l, k).adjoint() * mode(l, m)));
    Ok(readout.eval(&x))
}

/// Settings for [`averaged_g2`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G2Options {
    /// Averaging window τ in `ħ/g`.
    pub tau_window: f64,
    /// Number of trapezoid nodes on `[0, τ]`.
    pub n_tau: usize,
    pub integrator: Integrator,
    /// Run the four seed propagations on the rayon pool.
    pub parallel: bool,
}

impl Default for G2Options {
    fn default() -> Self {
        Self {
            tau_window: ps_to_internal(50.0, DEFAULT_G_MEV),
            n_tau: 200,
            integrator: Integrator::default(),
            parallel: false,
        }
    }
}

/// `Ḡ = (1/τ)∫₀^τ G(τ') dτ'` by the trapezoid rule.
///
/// Each seed `a_l ρ_s a_j†` is propagated once across the grid and read out
/// for all four `(k, m)` combinations.
pub fn averaged_g2(l: &Liouvillian, rho_s: &DensityMatrix, opts: &G2Options) -> Result<G2Matrix> {
    check_stationary(l, rho_s)?;
    if !(opts.tau_window >= 0.0) || !opts.tau_window.is_finite() {
        return Err(Error::InvalidParams(format!("tau window {}", opts.tau_window)));
    }
    if opts.tau_window > 0.0 && opts.n_tau < 2 {
        return Err(Error::InvalidParams("n_tau must be at least 2".into()));
    }
    let n_tau = if opts.tau_window > 0.0 { opts.n_tau } else { 1 };
    let dt = if n_tau > 1 { opts.tau_window / (n_tau - 1) as f64 } else { 0.0 };
    let weight = |i: usize| -> f64 {
        if n_tau == 1 {
            1.0
        } else if i == 0 || i == n_tau - 1 {
            0.5 * dt / opts.tau_window
        } else {
            dt / opts.tau_window
        }
    };

    use Polarization::{H, V};
    let pols = [H, V];
    let readouts: Vec<(usize, usize, Readout)> = pols
        .iter()
        .flat_map(|&k| pols.iter().map(move |&m| (k, m)))
        .map(|(k, m)| (k as usize, m as usize, Readout::new(&(mode(l, k).adjoint() * mode(l, m)))))
        .collect();
    let seeds: Vec<(usize, usize)> = vec![(0, 0), (0, 1), (1, 0), (1, 1)];

    let run = |&(j, lp): &(usize, usize)| -> Result<Vec<(usize, usize, C64)>> {
        let seed = mode(l, pols[lp]) * rho_s.as_matrix() * mode(l, pols[j]).adjoint();
        let mut x = vectorize(&seed);
        let mut ws = Workspace::new(x.len());
        let mut acc = [C64::new(0.0, 0.0); 4];
        for i in 0..n_tau {
            if i > 0 {
                propagate_vec(l, &mut x, dt, opts.integrator, &mut ws)?;
            }
            let w = weight(i);
            for (slot, (_, _, r)) in acc.iter_mut().zip(&readouts) {
                *slot += r.eval(&x) * w;
            }
        }
        Ok(readouts
            .iter()
            .zip(acc)
            .map(|((k, m, _), v)| (2 * j + k, 2 * lp + m, v))
            .collect())
    };

    let parts: Vec<Result<Vec<(usize, usize, C64)>>> =
        if opts.parallel { seeds.par_iter().map(run).collect() } else { seeds.iter().map(run).collect() };
    let mut entries = Matrix4::zeros();
    for part in parts {
        for (r, c, v) in part? {
            entries[(r, c)] = v;
        }
    }
    Ok(G2Matrix { entries, tau_window: opts.tau_window })
}

/// Smallest `Tr Ḡ` accepted as a two-photon signal.
pub const MIN_SIGNAL: f64 = 1e-15;

/// `ρ²ᵖ = Ḡ / Tr Ḡ`.
pub fn two_photon_dm(g: &G2Matrix) -> Result<TwoPhotonDm> {
    normalize(&g.entries)
}

fn normalize(m: &Matrix4<C64>) -> Result<TwoPhotonDm> {
    let trace = m.trace().re;
    if !(trace > MIN_SIGNAL) {
        return Err(Error::DegenerateSignal { trace });
    }
    let mut rho = m / C64::new(trace, 0.0);
    for i in 0..4 {
        rho[(i, i)].im = 0.0;
    }
    Ok(TwoPhotonDm(rho))
}

/// Short-window limit: `ρ²ᵖ_{jk,lm} ∝ ⟨a_j† a_k† a_m a_l⟩` in the steady state.
pub fn approx_two_photon_dm(rho_s: &DensityMatrix) -> Result<TwoPhotonDm> {
    let d = rho_s.dim();
    let f = ((d / 4) as f64).sqrt().round() as usize;
    if 4 * f * f != d || f < 2 {
        return Err(Error::DimensionMismatch { expected: 4 * f * f, found: d });
    }
    let space = crate::hilbert::Space::new(f - 1)?;
    let a = [space.a_h(), space.a_v()];
    let mut m = Matrix4::zeros();
    for j in 0..2 {
        for k in 0..2 {
            for lp in 0..2 {
                for mm in 0..2 {
                    let op = a[j].adjoint() * a[k].adjoint() * &a[mm] * &a[lp];
                    m[(2 * j + k, 2 * lp + mm)] = trace_product(&op, rho_s.as_matrix());
                }
            }
        }
    }
    normalize(&m)
}

/// `ρ_approx(r) = [[1,−r,−r,1],[−r,r²,r²,−r],[−r,r²,r²,−r],[1,−r,−r,1]] / (2(1+r²))`.
pub fn analytic_rho_approx(r: f64) -> TwoPhotonDm {
    let n = 1.0 / (2.0 * (1.0 + r * r));
    let v = [1.0, -r, -r, 1.0];
    TwoPhotonDm(Matrix4::from_fn(|i, j| {
        let outer = if (i == 0 || i == 3) && (j == 0 || j == 3) { 1.0 } else { v[i] * v[j] };
        C64::new(outer * n, 0.0)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::steady_state;
    use crate::model::{Resonance, SystemParams};
    use crate::units::{internal_to_ps, HBAR_MEV_PS};

    fn setup(omega: f64, n_max: usize) -> (Liouvillian, DensityMatrix) {
        let p = SystemParams { omega, n_max, ..Default::default() }.at_resonance(Resonance::UL);
        let l = Liouvillian::new(&p).unwrap();
        let ss = steady_state(&l).unwrap();
        (l, ss)
    }

    #[test]
    fn window_conversion() {
        let opts = G2Options::default();
        assert!((opts.tau_window - 50.0 * 0.051 / HBAR_MEV_PS).abs() < 1e-12);
        assert!((internal_to_ps(opts.tau_window, DEFAULT_G_MEV) - 50.0).abs() < 1e-10);
        assert_eq!(opts.n_tau, 200);
    }

    #[test]
    fn vacuum_gives_no_signal() {
        let (l, ss) = setup(0.0, 2);
        let g = averaged_g2(&l, &ss, &G2Options { n_tau: 5, ..Default::default() }).unwrap();
        assert_eq!(g.entries.camax(), 0.0);
        assert!(matches!(two_photon_dm(&g), Err(Error::DegenerateSignal { .. })));
        assert!(matches!(approx_two_photon_dm(&ss), Err(Error::DegenerateSignal { .. })));
    }

    #[test]
    fn rejects_non_stationary_state() {
        let (l, _) = setup(8.0, 2);
        let rho = l.space().basis_state(1, 1, 0);
        let err = averaged_g2(&l, &rho, &G2Options::default()).unwrap_err();
        assert!(matches!(err, Error::NotStationary { .. }));
    }

    #[test]
    fn zero_delay_equals_fourth_moment() {
        let (l, ss) = setup(8.0, 2);
        use Polarization::{H, V};
        let g = averaged_g2(&l, &ss, &G2Options { tau_window: 0.0, ..Default::default() }).unwrap();
        let hh = g2(&l, &ss, H, H, H, H, 0.0, Integrator::default()).unwrap();
        assert!(hh.re > 0.0 && hh.im.abs() < 1e-14);
        let approx = approx_two_photon_dm(&ss).unwrap();
        let tr = g.trace();
        assert!((g.entries / C64::new(tr, 0.0) - approx.as_matrix()).camax() < 1e-10);
        let hv_vh = g2(&l, &ss, H, V, V, H, 0.0, Integrator::default()).unwrap();
        assert!((hv_vh - g.entries[(1, 2)]).norm() < 1e-14);
    }

    #[test]
    fn averaged_matrix_is_hermitian() {
        let (l, ss) = setup(8.0, 2);
        let g = averaged_g2(&l, &ss, &G2Options { n_tau: 40, ..Default::default() }).unwrap();
        assert!(g.hermitian_defect() < 1e-10 * g.entries.camax().max(1e-300) + 1e-18);
        for i in 0..4 {
            assert!(g.entries[(i, i)].re >= -1e-12);
        }
        let rho = two_photon_dm(&g).unwrap();
        rho.check().unwrap();
        assert_eq!(rho.as_matrix().trace().re, rho.as_matrix().trace().re);
        assert!((rho.as_matrix().trace() - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn parallel_matches_serial() {
        let (l, ss) = setup(12.25, 2);
        let base = G2Options { n_tau: 20, ..Default::default() };
        let a = averaged_g2(&l, &ss, &base).unwrap();
        let b = averaged_g2(&l, &ss, &G2Options { parallel: true, ..base }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn analytic_matrix_cases() {
        let sp = analytic_rho_approx(1.0);
        for z in sp.as_matrix().iter() {
            assert!((z.norm() - 0.25).abs() < 1e-15);
        }
        let psi = TwoPhotonDm::pure([1.0, -1.0, -1.0, 1.0].map(|x| C64::new(x, 0.0)));
        assert!((sp.as_matrix() - psi.as_matrix()).camax() < 1e-15);
        let phi = analytic_rho_approx(0.0);
        let phi_plus = TwoPhotonDm::pure([1.0, 0.0, 0.0, 1.0].map(|x| C64::new(x, 0.0)));
        assert!((phi.as_matrix() - phi_plus.as_matrix()).camax() < 1e-15);
        for r in [-2.5, -0.3, 0.0, 0.7, 4.0, 1e3] {
            let m = analytic_rho_approx(r);
            assert!((m.as_matrix().trace().re - 1.0).abs() < 1e-14);
            m.check().unwrap();
        }
    }
}
