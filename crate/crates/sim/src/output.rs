//! CSV writers. Every file starts with `#`-prefixed metadata lines echoing
//! the effective configuration.

use std::io::{self, Write};

use fle_core::correlations::PAIR_LABELS;
use fle_core::model::{dressed_basis, DressedState};

use crate::config::SweepConfig;
use crate::sweep::{PointResult, SweepRecord};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub fn write_metadata<W: Write>(w: &mut W, cfg: &SweepConfig) -> io::Result<()> {
    writeln!(w, "# fle-sim {VERSION}")?;
    for (k, v) in cfg.echo() {
        writeln!(w, "# {k} = {v}")?;
    }
    Ok(())
}

pub fn sweep_columns() -> Vec<String> {
    let mut cols: Vec<String> =
        ["omega_g", "delta_g", "concurrence", "bell_type", "mean_n", "r", "analytic_C"].map(String::from).to_vec();
    for i in 0..4 {
        for j in 0..4 {
            cols.push(format!("re_rho_{i}_{j}"));
            cols.push(format!("im_rho_{i}_{j}"));
        }
    }
    cols.push("status".into());
    cols
}

pub fn write_sweep_header<W: Write>(w: &mut W, cfg: &SweepConfig) -> io::Result<()> {
    write_metadata(w, cfg)?;
    writeln!(w, "# grid = {} points from {} to {} (g units)", cfg.n_points, cfg.start, cfg.stop)?;
    writeln!(w, "{}", sweep_columns().join(","))
}

pub fn sweep_row(rec: &SweepRecord) -> String {
    let mut f = vec![
        rec.omega.to_string(),
        rec.delta.to_string(),
        rec.concurrence.to_string(),
        rec.bell_type.map_or(String::new(), |b| b.label().to_string()),
        rec.mean_n.to_string(),
        rec.r.to_string(),
        rec.analytic_c.to_string(),
    ];
    for i in 0..4 {
        for j in 0..4 {
            let z = rec.rho2p().map(|m| m[(i, j)]);
            f.push(z.map_or(f64::NAN, |z| z.re).to_string());
            f.push(z.map_or(f64::NAN, |z| z.im).to_string());
        }
    }
    f.push(match &rec.status {
        Ok(()) => "ok".to_string(),
        Err((kind, _)) => format!("error:{kind}"),
    });
    f.join(",")
}

/// Long-format dump of ρ²ᵖ, one matrix element per line.
pub fn write_tomography<W: Write>(w: &mut W, cfg: &SweepConfig, p: &PointResult) -> io::Result<()> {
    write_metadata(w, cfg)?;
    writeln!(w, "# point omega_g = {} delta_g = {}", p.params.omega, p.params.delta)?;
    writeln!(w, "# concurrence = {}", p.concurrence.value)?;
    writeln!(w, "# bell_type = {}", p.concurrence.bell_type)?;
    writeln!(w, "# mean_n = {}", p.mean_n)?;
    writeln!(w, "row,col,row_label,col_label,abs,re,im")?;
    for i in 0..4 {
        for j in 0..4 {
            let z = p.rho2p.entry(i, j);
            writeln!(w, "{i},{j},{},{},{},{},{}", PAIR_LABELS[i], PAIR_LABELS[j], z.norm(), z.re, z.im)?;
        }
    }
    Ok(())
}

pub fn dressed_columns() -> &'static str {
    "omega_g,omega_d0,E_U_g,E_M_g,E_N_g,E_L_g,E_U_d0,E_M_d0,E_N_d0,E_L_d0"
}

/// Dressed energies over `n` evenly spaced drive strengths in `[start, stop]`.
pub fn dressed_rows(delta0: f64, start: f64, stop: f64, n: usize) -> Vec<[f64; 5]> {
    (0..n)
        .map(|i| {
            let om = if n > 1 { start + (stop - start) * i as f64 / (n - 1) as f64 } else { start };
            let b = dressed_basis(delta0, om);
            let e = |s| b.energy(s);
            [om, e(DressedState::U), e(DressedState::M), e(DressedState::N), e(DressedState::L)]
        })
        .collect()
}

pub fn write_dressed<W: Write>(w: &mut W, cfg: &SweepConfig, rows: &[[f64; 5]]) -> io::Result<()> {
    write_metadata(w, cfg)?;
    writeln!(w, "{}", dressed_columns())?;
    let d0 = cfg.params.delta0;
    for r in rows {
        let scaled: Vec<String> = r.iter().map(|x| (x / d0).to_string()).collect();
        let raw: Vec<String> = r[1..].iter().map(|x| x.to_string()).collect();
        writeln!(w, "{},{},{},{}", r[0], scaled[0], raw.join(","), scaled[1..].join(","))?;
    }
    Ok(())
}
