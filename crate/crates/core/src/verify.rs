//! Certificates that targets are decoupled from disturbances: power-series
//! residuals, literal invariance of node sets and of the closed-loop
//! extension subspace, and fixed-step simulation.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::set::NodeSet;
use crate::synthesis::{ClosedLoop, FeedbackKind, Synthesis};

/// Absolute tolerance on every residual.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Largest admissible `dt · ‖A_c‖∞` for the fixed-step integrator.
pub const STEP_GUARD: f64 = 0.5;

/// `max_{0 ≤ k < horizon} ‖T A^k D‖_max`, propagating the block `A^k D`
/// instead of forming powers of `A`.
pub fn decoupling_residual(
    a_cl: &DenseMatrix,
    d_cols: &DenseMatrix,
    t_rows: &DenseMatrix,
    horizon: usize,
) -> Result<f64> {
    if !a_cl.is_square() || d_cols.rows() != a_cl.rows() || t_rows.cols() != a_cl.rows() {
        return Err(Error::DimensionMismatch(format!(
            "A {:?}, D {:?}, T {:?}",
            a_cl.shape(),
            d_cols.shape(),
            t_rows.shape()
        )));
    }
    let mut block = d_cols.clone();
    let mut worst: f64 = 0.0;
    for k in 0..horizon {
        worst = worst.max(t_rows.mul(&block)?.max_abs());
        if k + 1 < horizon {
            block = a_cl.mul(&block)?;
        }
    }
    Ok(worst)
}

/// [`decoupling_residual`] of a closed loop over its own dimension.
pub fn closed_loop_residual(cl: &ClosedLoop) -> Result<f64> {
    decoupling_residual(&cl.a_c, &cl.d_c, &cl.t_c, cl.dim())
}

/// Largest entry of `a` in a row outside `w` and a column inside `w`; zero
/// iff `w` is literally invariant under `a`.
pub fn invariance_residual(a: &DenseMatrix, w: &NodeSet) -> f64 {
    let n = a.rows();
    let inside = w.mask(n);
    let mut worst: f64 = 0.0;
    for j in w.iter() {
        for i in (0..n).filter(|&i| !inside[i]) {
            worst = worst.max(a[(i, j - 1)].abs());
        }
    }
    worst
}

/// Distance of `[x; x̂]` from `W_c = {[x; P x] : supp x ⊆ z}`.
fn extension_distance(v: &[f64], z: &[bool], projection: &DenseMatrix) -> f64 {
    let n = projection.cols();
    let (x, xh) = v.split_at(n);
    let outside = (0..n).filter(|&i| !z[i]).fold(0.0_f64, |m, i| m.max(x[i].abs()));
    let px = projection.mul_vec(x);
    let mismatch = px.iter().zip(xh).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    outside.max(mismatch)
}

fn extension_basis(z: &NodeSet, projection: &DenseMatrix) -> Vec<Vec<f64>> {
    let n = projection.cols();
    z.iter()
        .map(|v| {
            let mut e = vec![0.0; n];
            e[v - 1] = 1.0;
            let pe = projection.mul_vec(&e);
            e.extend(pe);
            e
        })
        .collect()
}

/// Invariance residual of the extension subspace `W_c = {[x; P x] : x ∈ Z*}`
/// under `A_c`, measured on its elementary spanning set.
pub fn extension_invariance_residual(cl: &ClosedLoop, z_star: &NodeSet, projection: &DenseMatrix) -> Result<f64> {
    let n = cl.plant_dim;
    if projection.cols() != n || projection.rows() + n != cl.dim() {
        return Err(Error::DimensionMismatch(format!(
            "projection {:?} for a closed loop of dimension {}",
            projection.shape(),
            cl.dim()
        )));
    }
    let mask = z_star.mask(n);
    Ok(extension_basis(z_star, projection)
        .iter()
        .map(|b| extension_distance(&cl.a_c.mul_vec(b), &mask, projection))
        .fold(0.0, f64::max))
}

/// Recovers `(∩ W_c, π W_c)`: the plant nodes whose elementary vector lies
/// in `W_c` with zero compensator part, and the plant support of `W_c`.
pub fn recover_pair(z_star: &NodeSet, projection: &DenseMatrix) -> (NodeSet, NodeSet) {
    let n = projection.cols();
    let mask = z_star.mask(n);
    let basis = extension_basis(z_star, projection);
    let support = NodeSet::from_ids((1..=n).filter(|&v| basis.iter().any(|b| b[v - 1] != 0.0)));
    let kernel = NodeSet::from_ids(support.iter().filter(|&v| {
        let mut e = vec![0.0; n + projection.rows()];
        e[v - 1] = 1.0;
        extension_distance(&e, &mask, projection) == 0.0
    }));
    (kernel, support)
}

/// Whether a disturbance coordinate reaches a target coordinate in the
/// support graph of `A_c` (entry `(i, j) ≠ 0` is an edge `j → i`).
///
/// For static feedback a zero residual is equivalent to the absence of such
/// a path. Observer-based loops decouple by cancellation between plant and
/// compensator paths, so their support graph generally stays connected.
pub fn support_path_exists(cl: &ClosedLoop) -> bool {
    let dim = cl.dim();
    let sources: Vec<usize> = (0..dim).filter(|&i| cl.d_c.row(i).iter().any(|&x| x != 0.0)).collect();
    let is_target: Vec<bool> = (0..dim)
        .map(|j| (0..cl.t_c.rows()).any(|r| cl.t_c[(r, j)] != 0.0))
        .collect();
    let mut seen = vec![false; dim];
    let mut queue = VecDeque::new();
    for s in sources {
        seen[s] = true;
        queue.push_back(s);
    }
    while let Some(j) = queue.pop_front() {
        if is_target[j] {
            return true;
        }
        for (i, seen_i) in seen.iter_mut().enumerate() {
            if !*seen_i && cl.a_c[(i, j)] != 0.0 {
                *seen_i = true;
                queue.push_back(i);
            }
        }
    }
    false
}

/// Seeded piecewise-constant disturbance, each channel uniform in
/// `[-amplitude, amplitude]` and resampled every `period` time units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisturbanceSignal {
    pub seed: u64,
    pub period: f64,
    pub amplitude: f64,
}

impl DisturbanceSignal {
    pub fn new(seed: u64) -> Self {
        DisturbanceSignal {
            seed,
            period: 0.5,
            amplitude: 1.0,
        }
    }

    /// The identically zero signal.
    pub fn zero() -> Self {
        DisturbanceSignal {
            seed: 0,
            period: 0.5,
            amplitude: 0.0,
        }
    }

    /// Values of the first `segments` pieces for `channels` channels.
    pub fn samples(&self, segments: usize, channels: usize) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        (0..segments)
            .map(|_| {
                (0..channels)
                    .map(|_| self.amplitude * rng.gen_range(-1.0..=1.0))
                    .collect()
            })
            .collect()
    }
}

/// State sampled at a signal switching time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub z: Vec<f64>,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Simulation {
    /// `max_t |z(t)|`.
    pub peak_z: f64,
    /// `max_t |x_i(t)|` over plant coordinates that are not targets.
    pub peak_state: f64,
    pub trajectory: Vec<TrajectorySample>,
}

/// Largest step dividing `period` evenly that is at most 0.01 and keeps
/// `dt · ‖A_c‖∞` at or below 0.4.
pub fn default_step(cl: &ClosedLoop, period: f64) -> f64 {
    let norm = cl.a_c.norm_inf();
    let cap = if norm > 0.0 { 0.01_f64.min(0.4 / norm) } else { 0.01 };
    period / (period / cap).ceil()
}

/// Fourth-order Runge–Kutta integration of `x' = A_c x + D_c w` from rest.
///
/// `dt` should divide the signal period so every step sees a constant
/// disturbance.
pub fn simulate(cl: &ClosedLoop, signal: &DisturbanceSignal, dt: f64, steps: usize) -> Result<Simulation> {
    let guard = dt * cl.a_c.norm_inf();
    if dt.is_nan() || dt <= 0.0 || guard >= STEP_GUARD {
        return Err(Error::StepSizeGuard(guard));
    }
    let dim = cl.dim();
    let channels = cl.d_c.cols();
    let duration = dt * steps as f64;
    let segments = (duration / signal.period).ceil() as usize + 1;
    let values = signal.samples(segments, channels);
    let target_cols: Vec<bool> = (0..dim)
        .map(|j| (0..cl.t_c.rows()).any(|r| cl.t_c[(r, j)] != 0.0))
        .collect();
    let watched: Vec<usize> = (0..cl.plant_dim).filter(|&j| !target_cols[j]).collect();

    let deriv = |x: &[f64], w: &[f64]| -> Vec<f64> {
        let mut dx = cl.a_c.mul_vec(x);
        for (d, f) in dx.iter_mut().zip(cl.d_c.mul_vec(w)) {
            *d += f;
        }
        dx
    };
    let axpy = |x: &[f64], k: &[f64], h: f64| -> Vec<f64> { x.iter().zip(k).map(|(a, b)| a + h * b).collect() };

    let mut x = vec![0.0; dim];
    let mut peak_z: f64 = 0.0;
    let mut peak_state: f64 = 0.0;
    let mut trajectory = Vec::new();
    let per_segment = (signal.period / dt).round().max(1.0) as usize;
    for step in 0..=steps {
        let z = cl.t_c.mul_vec(&x);
        peak_z = z.iter().fold(peak_z, |m, v| m.max(v.abs()));
        peak_state = watched.iter().fold(peak_state, |m, &j| m.max(x[j].abs()));
        if step % per_segment == 0 || step == steps {
            trajectory.push(TrajectorySample {
                t: step as f64 * dt,
                z,
                x: x.clone(),
            });
        }
        if step == steps {
            break;
        }
        let t = step as f64 * dt;
        let w = &values[((t / signal.period) + 1e-9).floor() as usize];
        let k1 = deriv(&x, w);
        let k2 = deriv(&axpy(&x, &k1, dt / 2.0), w);
        let k3 = deriv(&axpy(&x, &k2, dt / 2.0), w);
        let k4 = deriv(&axpy(&x, &k3, dt), w);
        for i in 0..dim {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
    Ok(Simulation {
        peak_z,
        peak_state,
        trajectory,
    })
}

/// Options for [`verify_synthesis`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub tolerance: f64,
    /// Power-series horizon; defaults to the closed-loop dimension.
    pub horizon: Option<usize>,
    /// Simulate for this many time units with the given signal seed.
    pub simulation: Option<(u64, f64)>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tolerance: DEFAULT_TOLERANCE,
            horizon: None,
            simulation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub mode: FeedbackKind,
    pub residual: f64,
    pub horizon: usize,
    pub invariance_residual: f64,
    pub simulation_peak_z: Option<f64>,
    pub tolerance: f64,
    pub pass: bool,
}

/// Residual, invariance and optional simulation checks of a synthesized law.
///
/// The invariance residual is that of the certified node set under the
/// closed-loop plant matrix for sf and of, and that of the extension
/// subspace `W_c` under `A_c` for df.
pub fn verify_synthesis(syn: &Synthesis, opts: &VerifyOptions) -> Result<VerificationReport> {
    let cl = &syn.closed_loop;
    let horizon = opts.horizon.unwrap_or(cl.dim());
    if horizon < cl.dim() {
        return Err(Error::Premise(format!(
            "horizon {horizon} is below the closed-loop dimension {}",
            cl.dim()
        )));
    }
    let residual = decoupling_residual(&cl.a_c, &cl.d_c, &cl.t_c, horizon)?;
    let invariance = match (&syn.kind, &syn.compensator) {
        (FeedbackKind::Df, Some(comp)) => extension_invariance_residual(cl, &syn.z_star, &comp.projection)?,
        _ => invariance_residual(&cl.a_c, &syn.invariant),
    };
    let simulation_peak_z = match opts.simulation {
        Some((seed, duration)) => {
            let signal = DisturbanceSignal::new(seed);
            let dt = default_step(cl, signal.period);
            let steps = (duration / dt).round() as usize;
            Some(simulate(cl, &signal, dt, steps)?.peak_z)
        }
        None => None,
    };
    Ok(VerificationReport {
        mode: syn.kind,
        residual,
        horizon,
        invariance_residual: invariance,
        simulation_peak_z,
        tolerance: opts.tolerance,
        pass: residual <= opts.tolerance && invariance <= opts.tolerance,
    })
}
