//! Implicit-Euler gradient flows of `TV_m` plus an L² or L¹ fidelity.

use serde::{Deserialize, Serialize};

use crate::decompose_l1::l1_energy;
use crate::decompose_l2::{rof_energy, solve_rof_with};
use crate::error::{Error, Result};
use crate::geometry;
use crate::levelset::{range, solve_prox, ProxProblem};
use crate::scalar::{self, Scalar};
use crate::space::RandomWalkSpace;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    L1,
    L2,
}

impl std::str::FromStr for Fidelity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "1" => Ok(Fidelity::L1),
            "l2" | "2" => Ok(Fidelity::L2),
            _ => Err(Error::Parse(format!("unknown fidelity `{s}`"))),
        }
    }
}

/// Energy decreased by the flow.
pub fn flow_energy<S: Scalar>(
    space: &RandomWalkSpace<S>,
    u: &[S],
    f: &[S],
    lambda: &S,
    fidelity: Fidelity,
) -> S {
    match fidelity {
        Fidelity::L2 => rof_energy(space, u, f, lambda),
        Fidelity::L1 => l1_energy(space, u, f, lambda),
    }
}

/// One implicit step: the minimizer of
/// `TV_m(u) + fidelity(u, f) + ‖u − v_prev‖²/(2 dt)`.
pub fn step_implicit<S: Scalar>(
    space: &RandomWalkSpace<S>,
    v_prev: &[S],
    dt: &S,
    f: &[S],
    lambda: &S,
    fidelity: Fidelity,
) -> Result<Vec<S>> {
    if !dt.positive() {
        return Err(Error::invalid("time step must be positive"));
    }
    if !lambda.positive() {
        return Err(Error::invalid("lambda must be positive"));
    }
    if v_prev.len() != space.n() || f.len() != space.n() {
        return Err(Error::invalid("function length does not match the space"));
    }
    let inv = S::one() / dt.clone();
    match fidelity {
        Fidelity::L2 => {
            let mu = lambda.clone() + inv.clone();
            let datum: Vec<S> = f
                .iter()
                .zip(v_prev)
                .map(|(a, b)| (lambda.clone() * a.clone() + inv.clone() * b.clone()) / mu.clone())
                .collect();
            Ok(solve_rof_with(space, &datum, &mu, false)?.u)
        }
        Fidelity::L1 => {
            space.require_ergodic()?;
            let (flo, fhi) = range(f);
            let (vlo, vhi) = range(v_prev);
            let pad = lambda.clone() * dt.clone() + S::one();
            let problem = ProxProblem {
                slope: vec![inv.clone(); space.n()],
                offset: v_prev
                    .iter()
                    .map(|v| -(inv.clone() * v.clone()) - lambda.clone())
                    .collect(),
                knots: f
                    .iter()
                    .map(|k| Some((k.clone(), lambda.clone() * S::int(2))))
                    .collect(),
                lower: S::min_of(flo, vlo) - pad.clone(),
                upper: S::max_of(fhi, vhi) + pad,
            };
            Ok(solve_prox(space, &problem)?.u)
        }
    }
}

#[derive(Clone, Debug)]
pub struct FlowTrajectory<S> {
    pub times: Vec<S>,
    pub states: Vec<Vec<S>>,
    /// Flow energy at each stored state.
    pub energy_series: Vec<S>,
    /// `∫ v(t) dν` at each stored state.
    pub mass_series: Vec<S>,
    pub lambda: S,
    pub dt: S,
    pub fidelity: Fidelity,
    pub steps: usize,
    pub stride: usize,
    /// Energy never increased over all steps, stored or not.
    pub energy_nonincreasing: bool,
    pub target: Option<Vec<S>>,
}

/// Runs `⌈T/dt⌉` implicit steps from `v0`, storing every `stride`-th state
/// (the initial and final states are always stored).
#[allow(clippy::too_many_arguments)]
pub fn simulate<S: Scalar>(
    space: &RandomWalkSpace<S>,
    v0: &[S],
    f: &[S],
    lambda: &S,
    t_final: &S,
    dt: &S,
    fidelity: Fidelity,
    stride: usize,
) -> Result<FlowTrajectory<S>> {
    if !t_final.positive() {
        return Err(Error::invalid("final time must be positive"));
    }
    if !dt.positive() {
        return Err(Error::invalid("time step must be positive"));
    }
    if stride == 0 {
        return Err(Error::invalid("stride must be at least 1"));
    }
    let steps = ((t_final.as_f64() / dt.as_f64()) - 1e-9).ceil().max(1.0) as usize;
    let mut v = v0.to_vec();
    let mut energy = flow_energy(space, &v, f, lambda, fidelity);
    let mut traj = FlowTrajectory {
        times: vec![S::zero()],
        states: vec![v.clone()],
        energy_series: vec![energy.clone()],
        mass_series: vec![geometry::integral(space, &v)],
        lambda: lambda.clone(),
        dt: dt.clone(),
        fidelity,
        steps,
        stride,
        energy_nonincreasing: true,
        target: None,
    };
    for k in 1..=steps {
        v = step_implicit(space, &v, dt, f, lambda, fidelity)?;
        let e = flow_energy(space, &v, f, lambda, fidelity);
        if !scalar::le_tol(&e, &energy, &S::max_of(energy.abs(), S::one())) {
            traj.energy_nonincreasing = false;
        }
        energy = e;
        if k % stride == 0 || k == steps {
            traj.times.push(dt.clone() * S::int(k as i64));
            traj.states.push(v.clone());
            traj.energy_series.push(energy.clone());
            traj.mass_series.push(geometry::integral(space, &v));
        }
    }
    Ok(traj)
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayReport {
    pub fidelity: Fidelity,
    /// `‖v(t) − u*‖₂`, ν-weighted, at each stored time.
    pub distances: Vec<f64>,
    /// L²: `‖v(t) − u*‖₂ / (‖v₀ − u*‖₂ e^{−λt})`; empty for L¹.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// L² pass threshold `1 + 5 λ dt`.
    pub ratio_bound: f64,
    pub monotone: bool,
    pub terminal_distance: f64,
    pub passed: bool,
}

/// Terminal distance accepted for L¹ convergence.
pub const L1_TERMINAL_TOLERANCE: f64 = 1e-6;

pub fn decay_report<S: Scalar>(
    space: &RandomWalkSpace<S>,
    traj: &FlowTrajectory<S>,
) -> Result<DecayReport> {
    let target = traj
        .target
        .as_ref()
        .ok_or_else(|| Error::invalid("decay report needs a target minimizer"))?;
    let distances: Vec<f64> = traj
        .states
        .iter()
        .map(|v| geometry::l2_distance_sq(space, v, target).as_f64().sqrt())
        .collect();
    let lambda = traj.lambda.as_f64();
    let dt = traj.dt.as_f64();
    let d0 = distances[0];
    let monotone = distances
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-12 * (1.0 + w[0]));
    let terminal_distance = *distances.last().expect("initial state stored");
    let ratio_bound = 1.0 + 5.0 * lambda * dt;
    let (ratios, passed) = match traj.fidelity {
        Fidelity::L2 => {
            let ratios: Vec<f64> = traj
                .times
                .iter()
                .zip(&distances)
                .map(|(t, d)| {
                    if d0 == 0.0 {
                        0.0
                    } else {
                        d / (d0 * (-lambda * t.as_f64()).exp())
                    }
                })
                .collect();
            let ok = ratios.iter().all(|r| *r <= ratio_bound);
            (ratios, ok)
        }
        Fidelity::L1 => (Vec::new(), monotone && terminal_distance <= L1_TERMINAL_TOLERANCE),
    };
    Ok(DecayReport {
        fidelity: traj.fidelity,
        max_ratio: ratios.iter().cloned().fold(0.0, f64::max),
        distances,
        ratios,
        ratio_bound,
        monotone,
        terminal_distance,
        passed,
    })
}
