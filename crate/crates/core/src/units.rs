//! Conversions between laboratory units (meV, ps) and the internal units
//! (energies in `g`, times in `ħ/g`).

/// Reduced Planck constant in meV·ps.
pub const HBAR_MEV_PS: f64 = 0.658212;

/// Emitter-cavity coupling used for the reference parameter set, in meV.
pub const DEFAULT_G_MEV: f64 = 0.051;

/// Converts a time in ps to units of `ħ/g`.
pub fn ps_to_internal(t_ps: f64, g_mev: f64) -> f64 {
    t_ps * g_mev / HBAR_MEV_PS
}

pub fn internal_to_ps(t: f64, g_mev: f64) -> f64 {
    t * HBAR_MEV_PS / g_mev
}

/// Converts an energy in meV to units of `g`.
pub fn mev_to_internal(e_mev: f64, g_mev: f64) -> f64 {
    e_mev / g_mev
}

/// Converts a rate in ns⁻¹ to units of `g/ħ`.
pub fn per_ns_to_internal(rate_per_ns: f64, g_mev: f64) -> f64 {
    rate_per_ns * 1e-3 * HBAR_MEV_PS / g_mev
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fifty_ps_window() {
        // 50 ps · 0.051 meV / 0.658212 meV·ps
        let tau = ps_to_internal(50.0, DEFAULT_G_MEV);
        assert!((tau - 3.874_131_739).abs() < 1e-8, "{tau}");
        assert!((internal_to_ps(tau, DEFAULT_G_MEV) - 50.0).abs() < 1e-12);
    }

    #[test]
    fn reference_rates() {
        // κ = 0.1 g/ħ ≈ 7.8 ns⁻¹, γ = 0.01 g/ħ ≈ 0.78 ns⁻¹
        assert!((per_ns_to_internal(7.748, DEFAULT_G_MEV) - 0.1).abs() < 1e-3);
        assert!((per_ns_to_internal(0.7748, DEFAULT_G_MEV) - 0.01).abs() < 1e-4);
        assert!((mev_to_internal(1.02, DEFAULT_G_MEV) - 20.0).abs() < 1e-12);
    }
}
