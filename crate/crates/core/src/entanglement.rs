//! Wootters concurrence of the two-photon state, Bell-type classification and
//! the closed-form predictions in terms of the channel ratio `r`.

use nalgebra::{Matrix4, SymmetricEigen};

use crate::correlations::TwoPhotonDm;
use crate::{Error, Result, C64};

/// Dominant two-photon entanglement pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellType {
    /// HH/VV occupations and coherence dominate.
    Phi,
    /// HV/VH occupations and coherence dominate.
    Psi,
    None,
}

impl BellType {
    pub fn label(self) -> &'static str {
        match self {
            BellType::Phi => "PhiBS",
            BellType::Psi => "PsiBS",
            BellType::None => "None",
        }
    }
}

impl std::fmt::Display for BellType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConcurrenceResult {
    pub value: f64,
    /// `√λ₁ ≥ … ≥ √λ₄`, the square roots of the spectrum of `M = ρ T ρ* T`.
    pub sqrt_lambdas: [f64; 4],
    /// Spectrum of `M` from a general eigensolver, real parts descending.
    pub m_eigenvalues: [C64; 4],
    pub bell_type: BellType,
}

/// Classification threshold below which a state counts as unentangled.
pub const CLASSIFY_THRESHOLD: f64 = 0.01;

/// Relative size below which eigenvalues of ρ are treated as exact zeros.
const RANK_CUTOFF: f64 = 1e-13;

/// Largest tolerated imaginary part in the spectrum of `M`.
pub const MAX_IMAGINARY: f64 = 1e-8;

/// `σ_y ⊗ σ_y`: anti-diagonal `{−1, 1, 1, −1}`.
pub fn spin_flip() -> Matrix4<C64> {
    let mut t = Matrix4::zeros();
    t[(0, 3)] = C64::new(-1.0, 0.0);
    t[(1, 2)] = C64::new(1.0, 0.0);
    t[(2, 1)] = C64::new(1.0, 0.0);
    t[(3, 0)] = C64::new(-1.0, 0.0);
    t
}

/// Concurrence `C = max(0, √λ₁ − √λ₂ − √λ₃ − √λ₄)`.
///
/// The `√λ` are computed as singular values of `√ρ T √ρ*`, whose square is
/// similar to `M`. This avoids taking square roots of rounding-level
/// eigenvalues of `M`, which would cost about eight digits for pure states.
/// The spectrum of `M` itself is also computed with a general eigensolver
/// and must be real.
pub fn concurrence(rho: &TwoPhotonDm) -> Result<ConcurrenceResult> {
    let m = rho.as_matrix();
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::InvalidState("non-finite two-photon matrix".into()));
    }
    let t = spin_flip();

    let herm = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let w_max = eig.eigenvalues.max().max(0.0);
    let sqrt_w = eig.eigenvalues.map(|w| if w > RANK_CUTOFF * w_max { w.sqrt() } else { 0.0 });
    let v = eig.eigenvectors;
    let root = v * Matrix4::from_diagonal(&sqrt_w.map(|x| C64::new(x, 0.0))) * v.adjoint();
    let b = root * t * root.conjugate();
    let mut s: Vec<f64> = b.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let sqrt_lambdas = [s[0], s[1], s[2], s[3]];
    let value = (sqrt_lambdas[0] - sqrt_lambdas[1] - sqrt_lambdas[2] - sqrt_lambdas[3]).clamp(0.0, 1.0);

    let mm = m * t * m.conjugate() * t;
    let ev = mm
        .eigenvalues()
        .ok_or_else(|| Error::Linalg("eigenvalues of M did not converge".into()))?;
    let mut evs: Vec<C64> = ev.iter().copied().collect();
    evs.sort_by(|a, b| b.re.partial_cmp(&a.re).unwrap());
    let imag = evs.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > MAX_IMAGINARY {
        return Err(Error::NumericalDegeneracy { imag });
    }
    let m_eigenvalues = [evs[0], evs[1], evs[2], evs[3]];

    Ok(ConcurrenceResult { value, sqrt_lambdas, m_eigenvalues, bell_type: classify(rho, value) })
}

/// Concurrence from `√λ_i = √max(λ_i, 0)` of the general-eigensolver
/// spectrum of `M`; less accurate near rank deficiency.
pub fn concurrence_from_spectrum(res: &ConcurrenceResult) -> f64 {
    let r: Vec<f64> = res.m_eigenvalues.iter().map(|z| z.re.max(0.0).sqrt()).collect();
    (r[0] - r[1] - r[2] - r[3]).clamp(0.0, 1.0)
}

pub fn classify(rho: &TwoPhotonDm, c: f64) -> BellType {
    classify_with(rho, c, CLASSIFY_THRESHOLD)
}

/// `None` below `threshold`, otherwise Φ if `|ρ_{HH,VV}| > |ρ_{HV,VH}|`, else Ψ.
pub fn classify_with(rho: &TwoPhotonDm, c: f64, threshold: f64) -> BellType {
    if c < threshold {
        BellType::None
    } else if rho.entry(0, 3).norm() > rho.entry(1, 2).norm() {
        BellType::Phi
    } else {
        BellType::Psi
    }
}

/// Ratio of the two UL emission channels, `r = 4(Ω/Δ0)² − ½`.
pub fn ratio_r(omega: f64, delta0: f64) -> f64 {
    4.0 * (omega / delta0).powi(2) - 0.5
}

/// `C(r) = |1 − r²| / (1 + r²)`.
pub fn analytic_concurrence(r: f64) -> f64 {
    if r.abs() <= 1.0 {
        (1.0 - r * r) / (1.0 + r * r)
    } else {
        let q = 1.0 / (r * r);
        (1.0 - q) / (1.0 + q)
    }
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

pub fn bell_state(kind: Bell) -> TwoPhotonDm {
    let (a, b) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    let psi = match kind {
        Bell::PhiPlus => [a, b, b, a],
        Bell::PhiMinus => [a, b, b, -a],
        Bell::PsiPlus => [b, a, a, b],
        Bell::PsiMinus => [b, a, -a, b],
    };
    TwoPhotonDm::pure(psi)
}
