//! Rotating-frame Hamiltonian of the driven emitter-cavity system and the
//! laser-dressed-state analytics.

use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;

use crate::hilbert::{embed_emitter4, transition, Level, Operator, Space};
use crate::{Error, Result, C64};

/// Physical parameters in units of `g` (energies) and `g/ħ` (rates).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    pub g: f64,
    /// Emitter-laser detuning Δ0 (half the binding energy).
    pub delta0: f64,
    /// Cavity-laser detuning Δ.
    pub delta: f64,
    /// Drive strength Ω.
    pub omega: f64,
    pub kappa: f64,
    pub gamma: f64,
    pub n_max: usize,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self { g: 1.0, delta0: 20.0, delta: 10.0, omega: 0.0, kappa: 0.1, gamma: 0.01, n_max: 4 }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.g, self.delta0, self.delta, self.omega, self.kappa, self.gamma]
            .iter()
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if self.g <= 0.0 {
            return Err(Error::InvalidParams(format!("g must be positive, got {}", self.g)));
        }
        if self.delta0 <= 0.0 {
            return Err(Error::InvalidParams(format!("delta0 must be positive, got {}", self.delta0)));
        }
        if self.omega < 0.0 || self.kappa < 0.0 || self.gamma < 0.0 {
            return Err(Error::InvalidParams("omega, kappa and gamma must be non-negative".into()));
        }
        Space::new(self.n_max)?;
        Ok(())
    }

    pub fn space(&self) -> Result<Space> {
        Space::new(self.n_max)
    }

    /// Same parameters with the cavity tuned to a two-photon resonance.
    pub fn at_resonance(mut self, res: Resonance) -> Self {
        self.delta = resonance_detuning(res, self.delta0, self.omega);
        self
    }

    pub fn dressed(&self) -> DressedBasis {
        dressed_basis(self.delta0, self.omega)
    }
}

/// Laser-dressed emitter states, ordered by index `U, M, N, L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DressedState {
    U = 0,
    M = 1,
    N = 2,
    L = 3,
}

impl DressedState {
    pub const ALL: [DressedState; 4] = [DressedState::U, DressedState::M, DressedState::N, DressedState::L];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            DressedState::U => "U",
            DressedState::M => "M",
            DressedState::N => "N",
            DressedState::L => "L",
        }
    }
}

/// Closed-form dressed states of the emitter under the drive.
#[derive(Debug, Clone, PartialEq)]
pub struct DressedBasis {
    pub c: f64,
    pub c_tilde: f64,
    /// `[E_U, E_M, E_N, E_L]`.
    pub energies: [f64; 4],
    /// Columns are `|U⟩, |M⟩, |N⟩, |L⟩` over the bare basis `{XX, X_H, X_V, G}`.
    pub vectors: Matrix4<f64>,
}

impl DressedBasis {
    pub fn energy(&self, s: DressedState) -> f64 {
        self.energies[s.index()]
    }

    /// `E_U − E_L = √(Δ0² + 8Ω²)`.
    pub fn splitting(&self) -> f64 {
        self.energies[0] - self.energies[3]
    }

    /// Bare-to-dressed transformation as a complex matrix.
    pub fn unitary(&self) -> Matrix4<C64> {
        self.vectors.map(|x| C64::new(x, 0.0))
    }
}

/// Dressed energies, amplitudes and vectors for detuning `delta0` and drive `omega`.
///
/// `|U⟩ = c|XX⟩ + c̃|X_H⟩ + c̃|X_V⟩ + c|G⟩`, `|M⟩ = (|X_H⟩ − |X_V⟩)/√2`,
/// `|N⟩ = (|G⟩ − |XX⟩)/√2`, `|L⟩ = c̃|XX⟩ − c|X_H⟩ − c|X_V⟩ + c̃|G⟩`.
pub fn dressed_basis(delta0: f64, omega: f64) -> DressedBasis {
    let r = (delta0 * delta0 + 8.0 * omega * omega).sqrt();
    let c = 2.0 * omega / (8.0 * omega * omega + (delta0 + r).powi(2)).sqrt();
    let c_tilde = (0.5 - c * c).max(0.0).sqrt();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let vectors = Matrix4::new(
        c,       0.0, -s,  c_tilde,
        c_tilde, s,   0.0, -c,
        c_tilde, -s,  0.0, -c,
        c,       0.0, s,   c_tilde,
    );
    DressedBasis {
        c,
        c_tilde,
        energies: [0.5 * (delta0 + r), delta0, 0.0, 0.5 * (delta0 - r)],
        vectors,
    }
}

/// Two-photon resonances between a higher dressed state χ1 and a lower χ2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Resonance {
    UL,
    UM,
    NL,
    UN,
    ML,
    MN,
}

impl Resonance {
    pub const ALL: [Resonance; 6] =
        [Resonance::UL, Resonance::MN, Resonance::UM, Resonance::NL, Resonance::UN, Resonance::ML];

    /// `(χ1, χ2)` with `E_χ1 > E_χ2` for Ω > 0.
    pub fn pair(self) -> (DressedState, DressedState) {
        use DressedState::*;
        match self {
            Resonance::UL => (U, L),
            Resonance::UM => (U, M),
            Resonance::NL => (N, L),
            Resonance::UN => (U, N),
            Resonance::ML => (M, L),
            Resonance::MN => (M, N),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Resonance::UL => "UL",
            Resonance::UM => "UM",
            Resonance::NL => "NL",
            Resonance::UN => "UN",
            Resonance::ML => "ML",
            Resonance::MN => "MN",
        }
    }
}

impl fmt::Display for Resonance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Resonance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Resonance::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::UnknownResonance(s.to_string()))
    }
}

/// Cavity detuning Δ placing `2Δ = E_χ1 − E_χ2`.
pub fn resonance_detuning(res: Resonance, delta0: f64, omega: f64) -> f64 {
    let r = (delta0 * delta0 + 8.0 * omega * omega).sqrt();
    match res {
        Resonance::UL => 0.5 * r,
        Resonance::UM | Resonance::NL => 0.25 * (r - delta0),
        Resonance::UN | Resonance::ML => 0.25 * (r + delta0),
        Resonance::MN => 0.5 * delta0,
    }
}

/// Drive strengths `(Ω_sp, Ω_m) = (√(3/8)·Δ0, √3·Δ0)`.
///
/// `Ω_sp` is where the two UL emission channels balance; `Ω_m` is where
/// `E_U − E_M = 2Δ0` and the shifted UM and NL resonances swap order.
pub fn special_points(delta0: f64) -> (f64, f64) {
    ((3.0f64 / 8.0).sqrt() * delta0, 3f64.sqrt() * delta0)
}

/// `σ_H = |G⟩⟨X_H| + |X_H⟩⟨XX|`.
pub fn sigma_h() -> Matrix4<C64> {
    transition(Level::G, Level::XH) + transition(Level::XH, Level::XX)
}

pub fn sigma_v() -> Matrix4<C64> {
    transition(Level::G, Level::XV) + transition(Level::XV, Level::XX)
}

/// Emitter and drive part: `Δ0(|X_H⟩⟨X_H| + |X_V⟩⟨X_V|) + Ω(σ_D + σ_D†)`.
pub fn emitter_hamiltonian(delta0: f64, omega: f64) -> Matrix4<C64> {
    let sd = (sigma_h() + sigma_v()) * C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let mut h = (sd + sd.adjoint()) * C64::new(omega, 0.0);
    h[(1, 1)] += C64::new(delta0, 0.0);
    h[(2, 2)] += C64::new(delta0, 0.0);
    h
}

/// `g(|XX⟩⟨X_H| a_H + |XX⟩⟨X_V| a_V + |X_H⟩⟨G| a_H + |X_V⟩⟨G| a_V) + h.c.`
pub fn coupling_hamiltonian(g: f64, space: &Space) -> Operator {
    let ah = space.a_h();
    let av = space.a_v();
    let up_h = embed_emitter4(&(transition(Level::XX, Level::XH) + transition(Level::XH, Level::G)), space);
    let up_v = embed_emitter4(&(transition(Level::XX, Level::XV) + transition(Level::XV, Level::G)), space);
    let h = (up_h * ah + up_v * av) * C64::new(g, 0.0);
    &h + h.adjoint()
}

/// Full rotating-frame Hamiltonian on `space`.
pub fn hamiltonian(params: &SystemParams, space: &Space) -> Operator {
    let mut h = embed_emitter4(&emitter_hamiltonian(params.delta0, params.omega), space);
    h += space.number() * C64::new(params.delta, 0.0);
    h += coupling_hamiltonian(params.g, space);
    h
}

/// Coefficient matrices `(K_D, K_A)` of the dressed coupling: entry `(i, j)`
/// multiplies `|i⟩⟨j| a_D†` (resp. `a_A†`) in the dressed emitter basis.
pub fn dressed_coupling_coefficients(basis: &DressedBasis) -> (Matrix4<f64>, Matrix4<f64>) {
    let (c, ct) = (basis.c, basis.c_tilde);
    let s2 = std::f64::consts::SQRT_2;
    let x = ct * ct - c * c;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let kd = Matrix4::new(
        2.0 * s2 * c * ct, 0.0, -ct, s2 * x,
        0.0,               0.0, 0.0, 0.0,
        ct,                0.0, 0.0, -c,
        s2 * x,            0.0, c,   -2.0 * s2 * c * ct,
    );
    #[rustfmt::skip]
    let ka = Matrix4::new(
        0.0, c,   0.0, 0.0,
        c,   0.0, -h,  ct,
        0.0, h,   0.0, 0.0,
        0.0, ct,  0.0, 0.0,
    );
    (kd, ka)
}

/// Emitter-cavity coupling in the dressed basis, with the emitter factor
/// indexed `U, M, N, L` and photon factors unchanged.
pub fn dressed_coupling_hamiltonian(basis: &DressedBasis, g: f64, space: &Space) -> Operator {
    let (kd, ka) = dressed_coupling_coefficients(basis);
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let ah = space.a_h();
    let av = space.a_v();
    let ad_dag = (&ah + &av).adjoint() * s;
    let aa_dag = (&ah - &av).adjoint() * s;
    let kd = embed_emitter4(&kd.map(|v| C64::new(v, 0.0)), space);
    let ka = embed_emitter4(&ka.map(|v| C64::new(v, 0.0)), space);
    let h = (kd * ad_dag + ka * aa_dag) * C64::new(g, 0.0);
    &h + h.adjoint()
}
