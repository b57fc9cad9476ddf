//! The (BV, L²) decomposition `min TV_m(u) + (λ/2) ∫ |u − f|² dν`.

use serde::Serialize;

use crate::certificate::{l2_certificate, CertificateReport};
use crate::error::{Error, Result};
use crate::geometry::{self, NodeSet};
use crate::levelset::{range, solve_prox, ProxProblem};
use crate::mincut::solve_geometric_affine;
use crate::scalar::{self, Scalar};
use crate::space::RandomWalkSpace;

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    /// Number of minimum-cut solves.
    pub iterations: usize,
    pub breakpoints: usize,
    pub unique: bool,
    pub mean_in: f64,
    pub mean_out: f64,
}

/// `f = u + v` with `u` the ROF minimizer.
#[derive(Clone, Debug)]
pub struct DecompositionResult<S> {
    pub u: Vec<S>,
    pub v: Vec<S>,
    pub energy: S,
    pub lambda: S,
    pub certificate: Option<CertificateReport<S>>,
    pub diagnostics: Diagnostics,
}

/// `TV_m(u) + (λ/2) ∫ |u − f|² dν`.
pub fn rof_energy<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S], f: &[S], lambda: &S) -> S {
    geometry::tv_pairs(space, u)
        + lambda.clone() * geometry::l2_distance_sq(space, u, f) / S::int(2)
}

fn check_input<S: Scalar>(space: &RandomWalkSpace<S>, f: &[S], lambda: &S) -> Result<()> {
    space.require_ergodic()?;
    if f.len() != space.n() {
        return Err(Error::invalid("signal length does not match the space"));
    }
    if !lambda.positive() {
        return Err(Error::invalid("lambda must be positive"));
    }
    Ok(())
}

/// Exact ROF minimizer by the parametric level-set method.
pub fn solve_rof<S: Scalar>(
    space: &RandomWalkSpace<S>,
    f: &[S],
    lambda: &S,
) -> Result<DecompositionResult<S>> {
    solve_rof_with(space, f, lambda, true)
}

/// [`solve_rof`], optionally skipping the certificate search.
pub fn solve_rof_with<S: Scalar>(
    space: &RandomWalkSpace<S>,
    f: &[S],
    lambda: &S,
    certify: bool,
) -> Result<DecompositionResult<S>> {
    check_input(space, f, lambda)?;
    let (lo, hi) = range(f);
    let problem = ProxProblem {
        slope: vec![lambda.clone(); space.n()],
        offset: f.iter().map(|v| -(lambda.clone() * v.clone())).collect(),
        knots: vec![None; space.n()],
        lower: lo - S::one(),
        upper: hi + S::one(),
    };
    let sol = solve_prox(space, &problem)?;
    let u = sol.u;
    let v: Vec<S> = f.iter().zip(&u).map(|(a, b)| a.clone() - b.clone()).collect();
    let total = space.total_measure();
    let mean_in = geometry::integral(space, f) / total.clone();
    let mean_out = geometry::integral(space, &u) / total;
    let certificate = if certify {
        Some(l2_certificate(space, &u, f, lambda)?)
    } else {
        None
    };
    Ok(DecompositionResult {
        energy: rof_energy(space, &u, f, lambda),
        lambda: lambda.clone(),
        certificate,
        diagnostics: Diagnostics {
            iterations: sol.cut_solves,
            breakpoints: sol.breakpoints,
            unique: true,
            mean_in: mean_in.as_f64(),
            mean_out: mean_out.as_f64(),
        },
        u,
        v,
    })
}

#[derive(Clone, Debug)]
pub struct L2Report<S> {
    /// `λ ∫ (f − u) u dν`.
    pub identity_lhs: S,
    /// `TV_m(u)`.
    pub identity_rhs: S,
    pub identity_ok: bool,
    pub certificate: CertificateReport<S>,
    pub perturbation_ok: bool,
    pub optimal: bool,
}

/// Checks `u` against the scalar identity, the certificate system and
/// coordinate perturbations.
pub fn verify_l2_optimality<S: Scalar>(
    space: &RandomWalkSpace<S>,
    f: &[S],
    u: &[S],
    lambda: &S,
) -> Result<L2Report<S>> {
    check_input(space, f, lambda)?;
    if u.len() != space.n() {
        return Err(Error::invalid("candidate length does not match the space"));
    }
    let diff: Vec<S> = f
        .iter()
        .zip(u)
        .map(|(a, b)| (a.clone() - b.clone()) * b.clone())
        .collect();
    let lhs = lambda.clone() * geometry::integral(space, &diff);
    let rhs = geometry::total_variation(space, u);
    let identity_ok = if S::EXACT {
        lhs == rhs
    } else {
        let scale = S::max_of(S::one(), S::max_of(lhs.abs(), rhs.abs()));
        (lhs.clone() - rhs.clone()).abs() <= S::from_float(1e-8) * scale
    };
    let certificate = l2_certificate(space, u, f, lambda)?;

    let (lo, hi) = range(f);
    let eps = if S::EXACT {
        S::ratio(1, 1_000_000)
    } else {
        S::from_float(1e-6) * (S::one() + hi - lo)
    };
    let base = rof_energy(space, u, f, lambda);
    let tol = S::tol(&S::max_of(base.abs(), S::one())) * S::int(16);
    let mut perturbation_ok = true;
    let mut w = u.to_vec();
    'outer: for x in 0..space.n() {
        for sign in [S::one(), -S::one()] {
            w[x] = u[x].clone() + sign * eps.clone();
            if rof_energy(space, &w, f, lambda) + tol.clone() < base {
                perturbation_ok = false;
                break 'outer;
            }
        }
        w[x] = u[x].clone();
    }
    Ok(L2Report {
        optimal: identity_ok && certificate.feasible && perturbation_ok,
        identity_lhs: lhs,
        identity_rhs: rhs,
        identity_ok,
        certificate,
        perturbation_ok,
    })
}

/// Result of the dual projected-gradient solver.
#[derive(Clone, Debug, Serialize)]
pub struct DualAscent {
    pub u: Vec<f64>,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub iterations: usize,
}

/// Accelerated projected ascent on the dual of the ROF problem.
///
/// The dual variable is `g_p ∈ [−1, 1]` per pair; the primal point is
/// `u = f − (D g) / (λ ν)`. Steps are diagonally preconditioned so that
/// each coordinate moves by `(λ/2)(u_b − u_a)`.
pub fn dual_ascent(
    space: &RandomWalkSpace<f64>,
    f: &[f64],
    lambda: f64,
    gap_tol: f64,
    max_iter: usize,
) -> Result<DualAscent> {
    check_input(space, f, &lambda)?;
    let pairs = space.pairs();
    let nu = space.measure();
    let primal_of = |g: &[f64]| -> (Vec<f64>, f64, f64) {
        let mut dg = vec![0.0; space.n()];
        for (p, gv) in pairs.iter().zip(g) {
            dg[p.b] += p.weight * gv;
            dg[p.a] -= p.weight * gv;
        }
        let u: Vec<f64> = (0..space.n())
            .map(|x| f[x] - dg[x] / (lambda * nu[x]))
            .collect();
        let dual: f64 = (0..space.n())
            .map(|x| dg[x] * f[x] - dg[x] * dg[x] / (2.0 * lambda * nu[x]))
            .sum();
        let primal = rof_energy(space, &u, f, &lambda);
        (u, primal, dual)
    };
    let mut g = vec![0.0; pairs.len()];
    let mut y = g.clone();
    let mut t = 1.0f64;
    let (mut u, mut primal, mut dual) = primal_of(&g);
    let mut iterations = 0;
    while iterations < max_iter {
        let gap = primal - dual;
        if gap <= gap_tol * primal.abs().max(1.0) {
            break;
        }
        iterations += 1;
        let (uy, _, _) = primal_of(&y);
        let next: Vec<f64> = pairs
            .iter()
            .zip(&y)
            .map(|(p, yv)| (yv + 0.5 * lambda * (uy[p.b] - uy[p.a])).clamp(-1.0, 1.0))
            .collect();
        let (un, pn, dn) = primal_of(&next);
        if dn < dual {
            // restart momentum when the dual objective drops
            t = 1.0;
            y = g.clone();
            continue;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        let beta = (t - 1.0) / t_next;
        y = next
            .iter()
            .zip(&g)
            .map(|(a, b)| a + beta * (a - b))
            .collect();
        g = next;
        t = t_next;
        u = un;
        primal = pn;
        dual = dn;
    }
    log::debug!("dual ascent: {iterations} iterations, gap {}", primal - dual);
    Ok(DualAscent {
        gap: primal - dual,
        u,
        primal,
        dual,
        iterations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct MeyerNorm {
    pub value: f64,
    /// Largest tested `λ` with `u_λ ≡ 0`.
    pub lambda_low: f64,
    /// Smallest tested `λ` with `u_λ ≢ 0`.
    pub lambda_high: f64,
    pub solves: usize,
}

fn require_zero_mean<S: Scalar>(space: &RandomWalkSpace<S>, f: &[S]) -> Result<()> {
    if f.len() != space.n() {
        return Err(Error::invalid("signal length does not match the space"));
    }
    let mean = geometry::integral(space, f);
    let scale = f
        .iter()
        .zip(space.measure())
        .fold(S::zero(), |a, (v, m)| a + v.abs() * m.clone());
    if scalar::pos_tol(&mean.abs(), &S::max_of(scale, S::one())) {
        return Err(Error::NotZeroMean(mean.as_f64()));
    }
    Ok(())
}

/// `‖f‖_{m,*}` by bisection on the largest `λ` with `u_λ ≡ 0`.
pub fn meyer_norm<S: Scalar>(space: &RandomWalkSpace<S>, f: &[S]) -> Result<MeyerNorm> {
    space.require_ergodic()?;
    require_zero_mean(space, f)?;
    let space = space.to_f64();
    let f: Vec<f64> = f.iter().map(|v| v.as_f64()).collect();
    let sup = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sup == 0.0 {
        return Ok(MeyerNorm {
            value: 0.0,
            lambda_low: f64::INFINITY,
            lambda_high: f64::INFINITY,
            solves: 0,
        });
    }
    let mut solves = 0;
    let mut vanishes = |lambda: f64| -> Result<bool> {
        solves += 1;
        let r = solve_rof_with(&space, &f, &lambda, false)?;
        Ok(r.u.iter().all(|v| v.abs() <= 1e-12 * sup))
    };
    let (mut lo, mut hi) = (1.0, 1.0);
    if vanishes(1.0)? {
        hi = 2.0;
        while vanishes(hi)? {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::internal("no scale separates zero from nonzero"));
            }
        }
    } else {
        lo = 0.5;
        while !vanishes(lo)? {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::internal("no scale separates zero from nonzero"));
            }
        }
    }
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if vanishes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    log::debug!("Meyer norm bracket [{lo}, {hi}] after {solves} solves");
    Ok(MeyerNorm {
        value: 2.0 / (lo + hi),
        lambda_low: lo,
        lambda_high: hi,
        solves,
    })
}

/// `‖f‖_{m,*} = max_E ∫_E f dν / P_m(E)` by Dinkelbach iteration; exact on
/// rational spaces. Returns the value and a maximizing set.
pub fn meyer_norm_ratio<S: Scalar>(space: &RandomWalkSpace<S>, f: &[S]) -> Result<(S, NodeSet)> {
    space.require_ergodic()?;
    require_zero_mean(space, f)?;
    let n = space.n();
    let mass = |e: &NodeSet| -> S {
        e.indices()
            .into_iter()
            .fold(S::zero(), |a, x| a + f[x].clone() * space.measure()[x].clone())
    };
    let mut set = NodeSet::from_fn(n, |x| f[x].positive());
    if set.is_empty() {
        return Ok((S::zero(), set));
    }
    let mut rho = mass(&set) / geometry::perimeter(space, &set);
    let scale = space.total_measure();
    for _ in 0..10_000 {
        let weights: Vec<S> = (0..n)
            .map(|x| -(f[x].clone() * space.measure()[x].clone()) / rho.clone())
            .collect();
        let sol = solve_geometric_affine(space, &weights, None)?;
        if scalar::pos_tol(&(-sol.energy.clone()), &scale) {
            let e = sol.minimal;
            let next = mass(&e) / geometry::perimeter(space, &e);
            if !(next > rho) {
                return Ok((rho, set));
            }
            rho = next;
            set = e;
        } else {
            return Ok((rho, set));
        }
    }
    Err(Error::internal("Dinkelbach iteration did not terminate"))
}

/// Iterated decomposition of residuals along an increasing `λ` schedule.
pub fn multiscale<S: Scalar>(
    space: &RandomWalkSpace<S>,
    f: &[S],
    schedule: &[S],
) -> Result<Vec<DecompositionResult<S>>> {
    if schedule.is_empty() {
        return Err(Error::invalid("empty lambda schedule"));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("lambda schedule must be strictly increasing"));
    }
    let mut residual = f.to_vec();
    let mut out = Vec::with_capacity(schedule.len());
    for lambda in schedule {
        let r = solve_rof(space, &residual, lambda)?;
        residual = r.v.clone();
        out.push(r);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::space::EdgeWeightGraph;

    fn two_node<S: Scalar>() -> RandomWalkSpace<S> {
        let mut g = EdgeWeightGraph::with_vertices(2);
        g.add_edge(0, 1, S::one());
        RandomWalkSpace::from_weighted_graph(&g).unwrap()
    }

    #[test]
    fn two_node_closed_forms() {
        let s = two_node::<Rational>();
        let f = [rat(1, 1), rat(0, 1)];
        let r = solve_rof(&s, &f, &rat(4, 1)).unwrap();
        assert_eq!(r.u, vec![rat(3, 4), rat(1, 4)]);
        assert!(r.certificate.unwrap().feasible);
        let r = solve_rof(&s, &f, &rat(1, 1)).unwrap();
        assert_eq!(r.u, vec![rat(1, 2), rat(1, 2)]);
        let r = solve_rof(&s, &[rat(3, 1), rat(3, 1)], &rat(7, 1)).unwrap();
        assert_eq!(r.u, vec![rat(3, 1), rat(3, 1)]);
        assert!(solve_rof(&s, &f, &rat(0, 1)).is_err());
    }

    #[test]
    fn verification_reports() {
        let s = two_node::<Rational>();
        let f = [rat(1, 1), rat(0, 1)];
        let rep = verify_l2_optimality(&s, &f, &[rat(3, 4), rat(1, 4)], &rat(4, 1)).unwrap();
        assert!(rep.optimal);
        let rep = verify_l2_optimality(&s, &f, &f, &rat(4, 1)).unwrap();
        assert!(!rep.identity_ok && !rep.optimal);
    }

    #[test]
    fn dual_ascent_agrees() {
        let s = two_node::<f64>();
        let d = dual_ascent(&s, &[1.0, 0.0], 4.0, 1e-12, 100_000).unwrap();
        assert!((d.u[0] - 0.75).abs() < 1e-6);
        assert!(d.gap < 1e-9);
    }

    #[test]
    fn meyer_two_node() {
        let s = two_node::<Rational>();
        let f = [rat(1, 1), rat(-1, 1)];
        let m = meyer_norm(&s, &f).unwrap();
        assert!((m.value - 1.0).abs() < 1e-8);
        let (exact, _) = meyer_norm_ratio(&s, &f).unwrap();
        assert_eq!(exact, rat(1, 1));
        assert!(matches!(
            meyer_norm(&s, &[rat(1, 1), rat(0, 1)]),
            Err(Error::NotZeroMean(_))
        ));
        assert_eq!(meyer_norm(&s, &[rat(0, 1), rat(0, 1)]).unwrap().value, 0.0);
    }

    #[test]
    fn multiscale_reconstructs() {
        let s = two_node::<Rational>();
        let f = [rat(1, 1), rat(0, 1)];
        let steps = multiscale(&s, &f, &[rat(1, 1), rat(4, 1)]).unwrap();
        assert_eq!(steps[0].u, vec![rat(1, 2), rat(1, 2)]);
        let mut sum = steps.last().unwrap().v.clone();
        for st in &steps {
            for (a, b) in sum.iter_mut().zip(&st.u) {
                *a = a.clone() + b.clone();
            }
        }
        assert_eq!(sum, f.to_vec());
        assert!(multiscale(&s, &f, &[rat(2, 1), rat(1, 1)]).is_err());
    }
}
