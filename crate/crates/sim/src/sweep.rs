use std::collections::BTreeMap;
use std::sync::mpsc;
use std::time::Instant;

use nalgebra::Matrix4;
use rayon::prelude::*;

use fle_core::correlations::{averaged_g2, two_photon_dm, G2Options, TwoPhotonDm};
use fle_core::entanglement::{analytic_concurrence, concurrence, ratio_r, BellType, ConcurrenceResult};
use fle_core::hilbert::DensityMatrix;
use fle_core::lindblad::{mean_photon_number, steady_state, Liouvillian};
use fle_core::model::{resonance_detuning, SystemParams};
use fle_core::C64;

use crate::config::{Mode, SweepConfig};
use crate::SimError;

/// Everything computed for one parameter point.
#[derive(Debug, Clone)]
pub struct PointResult {
    pub params: SystemParams,
    pub steady_state: DensityMatrix,
    pub rho2p: TwoPhotonDm,
    pub concurrence: ConcurrenceResult,
    pub mean_n: f64,
}

/// Steady state → averaged G⁽²⁾ → ρ²ᵖ → concurrence.
pub fn evaluate_point(params: &SystemParams, opts: &G2Options) -> fle_core::Result<PointResult> {
    let l = Liouvillian::new(params)?;
    let rho = steady_state(&l)?;
    let g = averaged_g2(&l, &rho, opts)?;
    let rho2p = two_photon_dm(&g)?;
    let c = concurrence(&rho2p)?;
    Ok(PointResult { params: *params, mean_n: mean_photon_number(&rho, l.space()), steady_state: rho, rho2p, concurrence: c })
}

#[derive(Debug, Clone)]
pub struct SweepRecord {
    pub omega: f64,
    pub delta: f64,
    pub concurrence: f64,
    pub bell_type: Option<BellType>,
    pub mean_n: f64,
    pub r: f64,
    pub analytic_c: f64,
    /// Full result of a successful point.
    pub point: Option<Box<PointResult>>,
    /// Wall time of the point; kept out of the CSV so output is reproducible.
    pub timing_ms: f64,
    /// `Err((kind, message))` for a failed point.
    pub status: Result<(), (String, String)>,
}

impl SweepRecord {
    pub fn is_ok(&self) -> bool {
        self.status.is_ok()
    }

    pub fn rho2p(&self) -> Option<&Matrix4<C64>> {
        self.point.as_ref().map(|p| p.rho2p.as_matrix())
    }
}

/// Parameters of the point at swept value `x`.
pub fn point_params(cfg: &SweepConfig, x: f64) -> SystemParams {
    let mut p = cfg.params;
    match cfg.mode {
        Mode::DeltaSweep => p.delta = x,
        _ => {
            p.omega = x;
            if let Some(res) = cfg.tracking {
                p.delta = resonance_detuning(res, p.delta0, p.omega);
            }
        }
    }
    p
}

pub fn g2_options(cfg: &SweepConfig) -> G2Options {
    G2Options { tau_window: cfg.tau_window(), n_tau: cfg.n_tau, ..Default::default() }
}

/// Evaluates one point into a record; failures are captured, not returned.
pub fn evaluate_record(cfg: &SweepConfig, params: &SystemParams) -> SweepRecord {
    let t0 = Instant::now();
    let r = ratio_r(params.omega, params.delta0);
    let mut rec = SweepRecord {
        omega: params.omega,
        delta: params.delta,
        concurrence: f64::NAN,
        bell_type: None,
        mean_n: f64::NAN,
        r,
        analytic_c: analytic_concurrence(r),
        point: None,
        timing_ms: 0.0,
        status: Ok(()),
    };
    match evaluate_point(params, &g2_options(cfg)) {
        Ok(p) => {
            rec.concurrence = p.concurrence.value;
            rec.bell_type = Some(p.concurrence.bell_type);
            rec.mean_n = p.mean_n;
            rec.point = Some(Box::new(p));
        }
        Err(e) => rec.status = Err((e.kind().to_string(), e.to_string())),
    }
    rec.timing_ms = t0.elapsed().as_secs_f64() * 1e3;
    rec
}

/// Runs all grid points on a pool of `cfg.threads` workers and hands the
/// records to `sink` in grid order as soon as each prefix is complete.
pub fn run_sweep<F>(cfg: &SweepConfig, mut sink: F) -> Result<Vec<SweepRecord>, SimError>
where
    F: FnMut(&SweepRecord) -> std::io::Result<()>,
{
    if !matches!(cfg.mode, Mode::OmegaSweep | Mode::DeltaSweep) {
        return Err(SimError::Config(format!("mode {} is not a sweep", cfg.mode.name())));
    }
    cfg.validate()?;
    let grid = cfg.grid();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build()?;
    let (tx, rx) = mpsc::channel::<(usize, SweepRecord)>();
    let mut out = Vec::with_capacity(grid.len());
    let mut sink_err = None;
    std::thread::scope(|s| {
        s.spawn(|| {
            pool.install(|| {
                grid.par_iter().enumerate().for_each_with(tx, |tx, (i, &x)| {
                    let rec = evaluate_record(cfg, &point_params(cfg, x));
                    let _ = tx.send((i, rec));
                })
            })
        });
        let mut pending = BTreeMap::new();
        for (i, rec) in rx {
            pending.insert(i, rec);
            while let Some(rec) = pending.remove(&out.len()) {
                if sink_err.is_none() {
                    sink_err = sink(&rec).err();
                }
                out.push(rec);
            }
        }
    });
    match sink_err {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

/// Single parameter point of a tomography dump.
pub fn tomography(cfg: &SweepConfig) -> Result<PointResult, SimError> {
    let mut p = cfg.params;
    if let Some(res) = cfg.tracking {
        p.delta = resonance_detuning(res, p.delta0, p.omega);
    }
    Ok(evaluate_point(&p, &g2_options(cfg))?)
}
