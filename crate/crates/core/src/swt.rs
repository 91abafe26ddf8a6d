//! Second-order Schrieffer-Wolff effective Hamiltonians for the two-photon
//! resonances between dressed states.
//!
//! The resonant set A is `{|χ1,0,0⟩, |χ2,1,1⟩, |χ2,2,0⟩, |χ2,0,2⟩}`; the
//! eliminated set B holds all one- and three-photon states. After the
//! transformation the two-photon states are rotated to
//! `{|χ1,0,0⟩, |χ2,1,1⟩, |χ2,Φ+⟩, |χ2,Φ−⟩}`. Matrices are stored in units of
//! `g²` (coefficients carry `1/energy`), the constant `E_A` is dropped.

use nalgebra::{Matrix4, SymmetricEigen};

use crate::correlations::TwoPhotonDm;
use crate::hilbert::Space;
use crate::model::{dressed_basis, dressed_coupling_hamiltonian, resonance_detuning, DressedState, Resonance};
use crate::{Error, Result, C64};

/// Dressed emitter state with photon numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DressedFock {
    pub chi: DressedState,
    pub n_h: usize,
    pub n_v: usize,
}

impl std::fmt::Display for DressedFock {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|{},{},{}⟩", self.chi.name(), self.n_h, self.n_v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubspacePartition {
    pub set_a: [DressedFock; 4],
    pub set_b: Vec<DressedFock>,
}

impl SubspacePartition {
    pub fn new(res: Resonance) -> Self {
        let (hi, lo) = res.pair();
        let st = |chi, n_h, n_v| DressedFock { chi, n_h, n_v };
        let set_a = [st(hi, 0, 0), st(lo, 1, 1), st(lo, 2, 0), st(lo, 0, 2)];
        let photons = [(1, 0), (0, 1), (3, 0), (2, 1), (1, 2), (0, 3)];
        let set_b = DressedState::ALL
            .iter()
            .flat_map(|&chi| photons.iter().map(move |&(h, v)| st(chi, h, v)))
            .collect();
        Self { set_a, set_b }
    }
}

/// Which closed-form expressions to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Full,
    /// Shortened UL and MN forms that keep only the dominant contributions.
    LeadingOrder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwEffectiveH {
    pub resonance: Resonance,
    /// Effective Hamiltonian divided by `g²`.
    pub matrix: Matrix4<f64>,
    pub coefficients: Vec<(&'static str, f64)>,
    /// Smallest `|E_a − E_b|` over A×B (generic route only).
    pub min_gap: Option<f64>,
}

impl SwEffectiveH {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.coefficients.iter().find(|(n, _)| *n == name).map(|(_, v)| *v)
    }

    /// Matrix in energy units for coupling `g`.
    pub fn scaled(&self, g: f64) -> Matrix4<f64> {
        self.matrix * (g * g)
    }

    pub fn to_complex(&self) -> Matrix4<C64> {
        self.matrix.map(|x| C64::new(x, 0.0))
    }
}

/// Threshold below which an energy denominator counts as degenerate.
pub const DEGENERACY_GUARD: f64 = 1e-9;

fn bell_rotation() -> Matrix4<f64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let t = Matrix4::new(
        1.0, 0.0, 0.0, 0.0,
        0.0, 1.0, 0.0, 0.0,
        0.0, 0.0, s,   s,
        0.0, 0.0, s,   -s,
    );
    t
}

/// Smallest energy gap between set A and set B and the B state attaining it.
pub fn min_energy_gap(res: Resonance, delta0: f64, omega: f64) -> (f64, DressedFock) {
    let basis = dressed_basis(delta0, omega);
    let delta = resonance_detuning(res, delta0, omega);
    let energy = |s: &DressedFock| basis.energy(s.chi) + (s.n_h + s.n_v) as f64 * delta;
    let part = SubspacePartition::new(res);
    let ea = energy(&part.set_a[0]);
    part.set_b
        .iter()
        .map(|b| ((ea - energy(b)).abs(), *b))
        .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
        .expect("set B is non-empty")
}

/// Effective Hamiltonian from the second-order formula
/// `H_aa' = ½ Σ_b H_ab H_ba' [1/(E_a − E_b) + 1/(E_a' − E_b)]`, evaluated
/// numerically on the dressed coupling matrix with cavity detuning on resonance.
pub fn sw_generic(res: Resonance, delta0: f64, omega: f64) -> Result<SwEffectiveH> {
    if !(delta0 > 0.0) || !(omega >= 0.0) {
        return Err(Error::InvalidParams(format!("delta0 = {delta0}, omega = {omega}")));
    }
    let basis = dressed_basis(delta0, omega);
    let delta = resonance_detuning(res, delta0, omega);
    let space = Space::new(3)?;
    let h = dressed_coupling_hamiltonian(&basis, 1.0, &space);
    let idx = |s: &DressedFock| space.index(s.chi.index(), s.n_h, s.n_v);
    let energy = |s: &DressedFock| basis.energy(s.chi) + (s.n_h + s.n_v) as f64 * delta;
    let part = SubspacePartition::new(res);

    let mut min_gap = f64::INFINITY;
    for a in &part.set_a {
        for b in &part.set_b {
            let gap = (energy(a) - energy(b)).abs();
            if gap < DEGENERACY_GUARD {
                return Err(Error::SwDegeneracy { state: b.to_string(), gap });
            }
            min_gap = min_gap.min(gap);
        }
    }

    let mut m = Matrix4::<f64>::zeros();
    for (i, a) in part.set_a.iter().enumerate() {
        for (j, ap) in part.set_a.iter().enumerate() {
            let mut acc = h[(idx(a), idx(ap))];
            for b in &part.set_b {
                let hab = h[(idx(a), idx(b))];
                let hba = h[(idx(b), idx(ap))];
                if hab.norm() == 0.0 || hba.norm() == 0.0 {
                    continue;
                }
                let eb = energy(b);
                acc += hab * hba * (0.5 * (1.0 / (energy(a) - eb) + 1.0 / (energy(ap) - eb)));
            }
            m[(i, j)] = acc.re;
        }
    }
    let t = bell_rotation();
    let matrix = t.transpose() * m * t;
    Ok(SwEffectiveH { resonance: res, matrix, coefficients: Vec::new(), min_gap: Some(min_gap) })
}

/// Closed-form effective Hamiltonians.
///
/// Matrix layouts, with `d = −δ − δ3` (UL) or `d = −δ + δ3` (MN):
///
/// ```text
/// UL, NL, UN: [[h00, γ1, ±γ2, 0], [γ1, d, α, 0], [±γ2, α, d, 0], [0, 0, 0, d]]
/// MN, UM, ML: [[h00, 0, 0, γ],    [0, d, α, 0],  [0, α, d, 0],   [γ, 0, 0, d]]
/// ```
///
/// The Φ+ coupling enters with a minus sign for UL only.
pub fn sw_closed_form(res: Resonance, delta0: f64, omega: f64, variant: Variant) -> Result<SwEffectiveH> {
    if !(delta0 > 0.0) || !(omega > 0.0) {
        return Err(Error::InvalidParams(format!("delta0 = {delta0}, omega = {omega}")));
    }
    if variant == Variant::LeadingOrder && !matches!(res, Resonance::UL | Resonance::MN) {
        return Err(Error::InvalidParams(format!("no shortened form for the {res} resonance")));
    }
    let b = dressed_basis(delta0, omega);
    let (c, ct) = (b.c, b.c_tilde);
    let (c2, ct2) = (c * c, ct * ct);
    let x = ct2 - c2;
    let x2 = x * x;
    let d0 = delta0;
    let s2 = std::f64::consts::SQRT_2;
    let d_ul = b.splitting();
    let d_um = b.energy(DressedState::U) - b.energy(DressedState::M);
    let d_un = b.energy(DressedState::U) - b.energy(DressedState::N);

    let couple_both = |h00: f64, diag: f64, g1: f64, g2: f64, alpha: f64| {
        #[rustfmt::skip]
        let m = Matrix4::new(
            h00, g1,    g2,    0.0,
            g1,  diag,  alpha, 0.0,
            g2,  alpha, diag,  0.0,
            0.0, 0.0,   0.0,   diag,
        );
        m
    };
    let couple_minus = |h00: f64, diag: f64, g: f64, alpha: f64| {
        #[rustfmt::skip]
        let m = Matrix4::new(
            h00, 0.0,   0.0,   g,
            0.0, diag,  alpha, 0.0,
            0.0, alpha, diag,  0.0,
            g,   0.0,   0.0,   diag,
        );
        m
    };

    let (matrix, coefficients): (Matrix4<f64>, Vec<(&'static str, f64)>) = match res {
        Resonance::UL => {
            let u = d_ul;
            let delta = 2.0 * x / d0 + (4.0 * x2 - 16.0 * c2 * ct2) / u;
            let gamma1 = 4.0 * c * ct / d0 - 16.0 * c * ct * x / u;
            let gamma2 = 16.0 * c * ct * x / u;
            let (delta3, alpha) = match variant {
                Variant::Full => (
                    8.0 * x2 / (3.0 * u) + 32.0 * c2 * ct2 / u + 2.0 * ct2 / (u + 0.5 * d0) + 2.0 * c2 / (u - 0.5 * d0),
                    1.0 / d0 + ct2 / (u + 0.5 * d0) - c2 / (u - 0.5 * d0) - 16.0 * x2 / (3.0 * u),
                ),
                Variant::LeadingOrder => (0.0, 1.0 / d0 - (1.0 - 16.0 * c2 * ct2) / u),
            };
            let m = couple_both(delta, -delta - delta3, gamma1, -gamma2, alpha);
            (m, vec![("delta", delta), ("delta3", delta3), ("gamma1", gamma1), ("gamma2", gamma2), ("alpha", alpha)])
        }
        Resonance::MN => {
            let u = d_ul;
            let delta = 2.0 * x / u + 1.0 / d0;
            let gamma2 = -4.0 * c * ct / u;
            let (delta3, alpha) = match variant {
                Variant::Full => {
                    let delta3 = -4.0 * ct2 / (2.0 * d0 + u) - 2.0 / (3.0 * d0) - 4.0 * c2 / (2.0 * d0 - u);
                    (delta3, -delta + 0.5 * delta3 + 8.0 / (3.0 * d0))
                }
                Variant::LeadingOrder => (0.0, -delta),
            };
            let m = couple_minus(delta, -delta + delta3, gamma2, alpha);
            (m, vec![("delta", delta), ("delta3", delta3), ("gamma2", gamma2), ("alpha", alpha)])
        }
        Resonance::UM | Resonance::NL => {
            let u = d_um;
            let (p1, p3, p5) = (2.0 * d0 + u, 2.0 * d0 + 3.0 * u, 2.0 * d0 + 5.0 * u);
            let delta2 = -2.0 * c2 / u + 1.0 / p1 + 2.0 * ct2 / p3;
            let gamma2_um = -4.0 * s2 * c2 * ct / u - s2 * ct / p1 + 2.0 * s2 * x * ct / p3;
            if res == Resonance::UM {
                let delta1 = -16.0 * c2 * ct2 / u + (1.0 + 2.0 * ct2) / p1 + (4.0 * x2 + 2.0 * ct2) / p3;
                let delta3 = -10.0 * c2 / (3.0 * u) + 2.0 / (2.0 * d0 - u) + (1.0 + 4.0 * ct2) / p1 + 2.0 * ct2 / p3;
                let alpha = -0.5 * (delta2 + delta3);
                let m = couple_minus(delta1 - delta2, delta3, gamma2_um, alpha);
                (
                    m,
                    vec![("delta1", delta1), ("delta2", delta2), ("delta3", delta3), ("gamma2", gamma2_um), ("alpha", alpha)],
                )
            } else {
                let delta3 = -16.0 * c2 * ct2 / u
                    - 10.0 * c2 / (3.0 * u)
                    - 2.0 * ct2 / p1
                    - 4.0 * (x2 + ct2) / p3
                    - 8.0 * x2 / p5;
                let gamma1 = gamma2_um;
                let gamma2 = gamma2_um + 2.0 * s2 * ct / p1;
                let alpha = -8.0 * c2 / (3.0 * u) + 2.0 * ct2 / p1 - 2.0 * (2.0 * x2 - ct2) / p3 - 4.0 * x2 / p5;
                let m = couple_both(-delta2, delta3, gamma1, gamma2, alpha);
                (
                    m,
                    vec![("delta2", delta2), ("delta3", delta3), ("gamma1", gamma1), ("gamma2", gamma2), ("alpha", alpha)],
                )
            }
        }
        Resonance::UN | Resonance::ML => {
            let u = d_un;
            let (q1, q3, q5) = (u - 2.0 * d0, 3.0 * u - 2.0 * d0, 5.0 * u - 2.0 * d0);
            let delta2 = -2.0 * ct2 / u + 1.0 / q1 + 2.0 * c2 / q3;
            let gamma1_un = -4.0 * s2 * c * ct2 / u - s2 * c / q1 - 2.0 * s2 * x * c / q3;
            if res == Resonance::UN {
                let delta1 = -16.0 * c2 * ct2 / u + (1.0 + 2.0 * c2) / q1 + (4.0 * x2 + 2.0 * c2) / q3;
                let delta3 = -10.0 * ct2 / (3.0 * u) - 2.0 / (2.0 * d0 + u) + (1.0 + 4.0 * c2) / q1 + 2.0 * c2 / q3;
                let gamma2 = gamma1_un + 2.0 * s2 * c / q1;
                let alpha = 1.0 / (2.0 * d0 + u) + (2.0 * c2 - 1.0) / q1 + 2.0 * c2 / q3 - 8.0 * ct2 / (3.0 * u);
                let m = couple_both(delta1 - delta2, delta3, gamma1_un, gamma2, alpha);
                (
                    m,
                    vec![
                        ("delta1", delta1),
                        ("delta2", delta2),
                        ("delta3", delta3),
                        ("gamma1", gamma1_un),
                        ("gamma2", gamma2),
                        ("alpha", alpha),
                    ],
                )
            } else {
                let delta3 = -16.0 * c2 * ct2 / u
                    - 10.0 * ct2 / (3.0 * u)
                    - 2.0 * c2 / q1
                    - 4.0 * (x2 + c2) / q3
                    - 8.0 * x2 / q5;
                let alpha = 8.0 * ct2 / (3.0 * u) - 2.0 * c2 / q1 - 2.0 * (2.0 * x2 + c2) / q3 - 4.0 * x2 / q5;
                let m = couple_minus(-delta2, delta3, gamma1_un, alpha);
                (m, vec![("delta2", delta2), ("delta3", delta3), ("gamma1", gamma1_un), ("alpha", alpha)])
            }
        }
    };
    Ok(SwEffectiveH { resonance: res, matrix, coefficients, min_gap: None })
}

/// Cavity detunings `(Δ̃_UM, Δ̃_NL)` of the UM and NL resonances including
/// the second-order level shifts, `Δ̃ = ½(Δ_UM + g²(H00 − H11))`, for `g = 1`.
pub fn shifted_resonances(delta0: f64, omega: f64) -> Result<(f64, f64)> {
    let b = dressed_basis(delta0, omega);
    let d_um = b.energy(DressedState::U) - b.energy(DressedState::M);
    let shift = |res| -> Result<f64> {
        let h = sw_closed_form(res, delta0, omega, Variant::Full)?;
        Ok(0.5 * (d_um + h.matrix[(0, 0)] - h.matrix[(1, 1)]))
    };
    Ok((shift(Resonance::UM)?, shift(Resonance::NL)?))
}

/// Equal mixture of `½(|HH⟩ ± i|HV⟩ ± i|VH⟩ − |VV⟩)`, the two-photon state
/// expected where the UM and NL resonances overlap.
pub fn special_point_dm() -> TwoPhotonDm {
    let i = C64::new(0.0, 1.0);
    let one = C64::new(1.0, 0.0);
    let plus = TwoPhotonDm::pure([one, i, i, -one]);
    let minus = TwoPhotonDm::pure([one, -i, -i, -one]);
    TwoPhotonDm::new_unchecked((plus.as_matrix() + minus.as_matrix()) * C64::new(0.5, 0.0))
}

/// Eigenvalues of the exact Hamiltonian restricted to A ∪ B that lie
/// closest to the set-A energy, ascending, relative to that energy.
pub fn exact_levels_near_resonance(res: Resonance, delta0: f64, omega: f64, g: f64) -> Vec<f64> {
    let basis = dressed_basis(delta0, omega);
    let delta = resonance_detuning(res, delta0, omega);
    let space = Space::new(3).expect("valid cutoff");
    let h = dressed_coupling_hamiltonian(&basis, g, &space);
    let part = SubspacePartition::new(res);
    let states: Vec<DressedFock> = part.set_a.iter().chain(part.set_b.iter()).copied().collect();
    let energy = |s: &DressedFock| basis.energy(s.chi) + (s.n_h + s.n_v) as f64 * delta;
    let ea = energy(&part.set_a[0]);
    let n = states.len();
    let mut m = nalgebra::DMatrix::<f64>::zeros(n, n);
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            m[(i, j)] = h[(space.index(a.chi.index(), a.n_h, a.n_v), space.index(b.chi.index(), b.n_h, b.n_v))].re;
        }
        m[(i, i)] += energy(a) - ea;
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.abs().partial_cmp(&b.abs()).unwrap());
    let mut near: Vec<f64> = ev.into_iter().take(4).collect();
    near.sort_by(|a, b| a.partial_cmp(b).unwrap());
    near
}
