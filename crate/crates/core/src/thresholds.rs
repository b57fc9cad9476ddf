//! Thresholding parameters of indicator data `f = χ_Ω` under the L¹
//! fidelity, and the piecewise-constant scale space `λ ↦ M(χ_Ω, λ)`.

use crate::decompose_l1::{l1_energy, solve_l1_with};
use crate::error::{Error, Result};
use crate::geometry::{
    self, cheeger, curvature, divergence, jump_mass, lambda_ratio, measure_of, perimeter,
    require_nontrivial_set, EdgeField, NodeSet,
};
use crate::mincut::{geometric_energy, solve_geometric, GeometricSolution};
use crate::scalar::{self, Scalar};
use crate::space::RandomWalkSpace;

const MAX_ITER: usize = 100_000;

/// A parameter together with the set attaining it.
#[derive(Clone, Debug)]
pub struct Witnessed<S> {
    pub value: S,
    pub witness: NodeSet,
}

/// A jump of the geometric scale space: on `(previous λ, lambda)` the
/// minimizer is `below`, on `(lambda, next λ)` it is `above`.
#[derive(Clone, Debug)]
pub struct Transition<S> {
    pub lambda: S,
    pub below: NodeSet,
    pub above: NodeSet,
    /// Extreme minimizers at the transition itself.
    pub minimal: NodeSet,
    pub maximal: NodeSet,
}

#[derive(Clone, Debug)]
pub struct ThresholdReport<S> {
    /// `λ(Ω)`: smallest `λ` with `χ_Ω ∈ M(χ_Ω, λ)`.
    pub lambda_omega: Witnessed<S>,
    /// `λ⁰(Ω)`: largest `λ` with `0 ∈ M(χ_Ω, λ)`; zero with `lambda0_attained`
    /// false when no positive `λ` works.
    pub lambda0: Witnessed<S>,
    pub lambda0_attained: bool,
    /// `λ¹(Ω) = λ⁰(X∖Ω)`.
    pub lambda1: Witnessed<S>,
    pub lambda1_attained: bool,
    /// `λ*(Ω) = ‖χ_Ω − m_(·)(Ω)‖_∞`.
    pub lambda_star: S,
    /// `λ_Ω = P_m(Ω)/ν(Ω)`.
    pub lambda_ratio: S,
    pub lambda_ratio_complement: S,
    pub cheeger: Witnessed<S>,
    pub cheeger_complement: Witnessed<S>,
    pub eigenpair: bool,
    pub scale_space: Vec<Transition<S>>,
}

fn sym_measure<S: Scalar>(space: &RandomWalkSpace<S>, a: &NodeSet, b: &NodeSet) -> S {
    measure_of(space, &a.symmetric_difference(b))
}

fn less<S: Scalar>(a: &S, b: &S, scale: &S) -> bool {
    scalar::pos_tol(&(b.clone() - a.clone()), scale)
}

/// `λ(Ω) = sup { (P(Ω) − P(E)) / ν(Ω△E) : ν(Ω△E) > 0 }`.
pub fn lambda_omega<S: Scalar>(space: &RandomWalkSpace<S>, omega: &NodeSet) -> Result<Witnessed<S>> {
    require_nontrivial_set(space, omega)?;
    let p_omega = perimeter(space, omega);
    let empty = NodeSet::empty(space.n());
    let full = NodeSet::full(space.n());
    let from_empty = p_omega.clone() / measure_of(space, omega);
    let from_full = p_omega.clone() / measure_of(space, &omega.complement());
    let (mut lambda, mut witness) = if from_full > from_empty {
        (from_full, full)
    } else {
        (from_empty, empty)
    };
    let scale = S::max_of(p_omega.clone(), S::one());
    for _ in 0..MAX_ITER {
        let sol = solve_geometric(space, omega, &lambda)?;
        if !less(&sol.energy, &p_omega, &scale) {
            log::debug!("lambda(Omega) = {lambda}");
            return Ok(Witnessed {
                value: lambda,
                witness,
            });
        }
        let e = sol.minimal;
        let next = (p_omega.clone() - perimeter(space, &e)) / sym_measure(space, &e, omega);
        if !(next > lambda) {
            return Err(Error::internal("threshold iteration failed to increase"));
        }
        lambda = next;
        witness = e;
    }
    Err(Error::internal("threshold iteration did not terminate"))
}

/// `λ⁰(Ω) = inf { P(E) / (ν(Ω) − ν(Ω△E)) : ν(Ω△E) < ν(Ω) }`. The flag is
/// false when the infimum is zero, i.e. no positive `λ` admits `0`.
pub fn lambda_zero<S: Scalar>(
    space: &RandomWalkSpace<S>,
    omega: &NodeSet,
) -> Result<(Witnessed<S>, bool)> {
    require_nontrivial_set(space, omega)?;
    let m_omega = measure_of(space, omega);
    let mut lambda = perimeter(space, omega) / m_omega.clone();
    let mut witness = omega.clone();
    let scale = space.total_measure();
    for _ in 0..MAX_ITER {
        if lambda.is_zero() {
            return Ok((Witnessed { value: lambda, witness }, false));
        }
        let sol = solve_geometric(space, omega, &lambda)?;
        let baseline = lambda.clone() * m_omega.clone();
        if !less(&sol.energy, &baseline, &scale) {
            return Ok((Witnessed { value: lambda, witness }, true));
        }
        let e = sol.maximal;
        let denom = m_omega.clone() - sym_measure(space, &e, omega);
        if !denom.positive() {
            return Err(Error::internal("threshold witness has empty overlap"));
        }
        let next = perimeter(space, &e) / denom;
        if !(next < lambda) {
            return Err(Error::internal("threshold iteration failed to decrease"));
        }
        lambda = next;
        witness = e;
    }
    Err(Error::internal("threshold iteration did not terminate"))
}

/// `λ*(Ω) = max_x |χ_Ω(x) − m_x(Ω)|`.
pub fn lambda_star<S: Scalar>(space: &RandomWalkSpace<S>, omega: &NodeSet) -> Result<S> {
    require_nontrivial_set(space, omega)?;
    Ok(jump_mass(space, omega)
        .into_iter()
        .enumerate()
        .map(|(x, m)| {
            let chi = if omega.contains(x) { S::one() } else { S::zero() };
            (chi - m).abs()
        })
        .fold(S::zero(), S::max_of))
}

/// Whether `(λ_Ω, χ_Ω/ν(Ω))` is an eigenpair, decided by checking that `Ω`
/// minimizes `E^G(·, Ω, λ_Ω)`.
pub fn eigenpair_check<S: Scalar>(space: &RandomWalkSpace<S>, omega: &NodeSet) -> Result<bool> {
    let lambda = lambda_ratio(space, omega)?;
    let sol = solve_geometric(space, omega, &lambda)?;
    let p = perimeter(space, omega);
    Ok(!less(&sol.energy, &p, &S::max_of(p.clone(), S::one())))
}

#[derive(Clone, Debug)]
pub struct MaximalFunctionReport<S> {
    pub lambda_star: S,
    pub z0: EdgeField<S>,
    /// `div z₀ = χ_Ω − m_(·)(Ω)`.
    pub divergence_ok: bool,
    /// `∫ χ_Ω div z₀ dν = P_m(Ω)`.
    pub pairing_ok: bool,
    /// `χ_Ω ∈ M(χ_Ω, λ*)`.
    pub minimizer_ok: bool,
}

/// Builds the field `z₀` (+1 from `Ω` to its complement, −1 back, 0
/// elsewhere) and checks that `χ_Ω` is a maximal function for it.
pub fn maximal_function_check<S: Scalar>(
    space: &RandomWalkSpace<S>,
    omega: &NodeSet,
) -> Result<MaximalFunctionReport<S>> {
    require_nontrivial_set(space, omega)?;
    let z0 = EdgeField::from_fn(space, |x, y| match (omega.contains(x), omega.contains(y)) {
        (true, false) => S::one(),
        (false, true) => -S::one(),
        _ => S::zero(),
    });
    let div = divergence(space, &z0)?;
    let mass = jump_mass(space, omega);
    let tol_scale = S::one();
    let divergence_ok = (0..space.n()).all(|x| {
        let chi = if omega.contains(x) { S::one() } else { S::zero() };
        scalar::eq_tol(&div[x], &(chi - mass[x].clone()), &tol_scale)
    });
    let chi: Vec<S> = omega.indicator();
    let pairing: Vec<S> = chi.iter().zip(&div).map(|(a, b)| a.clone() * b.clone()).collect();
    let p = perimeter(space, omega);
    let pairing_ok = scalar::eq_tol(
        &geometry::integral(space, &pairing),
        &p,
        &S::max_of(p.clone(), S::one()),
    );
    let lambda_star = div.iter().map(|v| v.abs()).fold(S::zero(), S::max_of);
    let sol = solve_geometric(space, omega, &lambda_star)?;
    let minimizer_ok = !less(&sol.energy, &p, &S::max_of(p.clone(), S::one()));
    Ok(MaximalFunctionReport {
        lambda_star,
        z0,
        divergence_ok,
        pairing_ok,
        minimizer_ok,
    })
}

/// Bounds `[λ⁻(E), λ⁺(E)]` that contain every `λ` for which `χ_E` minimizes
/// with datum `χ_Ω`. `None` stands for `−∞` (lower) or `+∞` (upper).
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalBounds<S> {
    pub lower: Option<S>,
    pub upper: Option<S>,
}

/// Largest state count for which [`minimizer_interval_bounds`] enumerates.
pub const ENUMERATION_LIMIT: usize = 20;

/// Exact bounds by enumeration for small spaces; for larger spaces by
/// Dinkelbach iteration along the lower envelope, which requires `E` to be
/// a geometric minimizer for some `λ ≥ 0` and reports `λ⁻` clamped at 0.
pub fn minimizer_interval_bounds<S: Scalar>(
    space: &RandomWalkSpace<S>,
    omega: &NodeSet,
    e: &NodeSet,
) -> Result<IntervalBounds<S>> {
    if omega.n() != space.n() || e.n() != space.n() {
        return Err(Error::invalid("set size does not match the space"));
    }
    if space.n() <= ENUMERATION_LIMIT {
        Ok(interval_bounds_enumerated(space, omega, e))
    } else {
        interval_bounds_envelope(space, omega, e)
    }
}

/// Enumerates all subsets; only for small state counts.
pub fn interval_bounds_enumerated<S: Scalar>(
    space: &RandomWalkSpace<S>,
    omega: &NodeSet,
    e: &NodeSet,
) -> IntervalBounds<S> {
    let n = space.n();
    assert!(n <= ENUMERATION_LIMIT, "enumeration limited to {ENUMERATION_LIMIT} states");
    let p_e = perimeter(space, e);
    let d_e = sym_measure(space, e, omega);
    let mut lower: Option<S> = None;
    let mut upper: Option<S> = None;
    for bits in 0..(1u64 << n) {
        let u = NodeSet::from_bits(n, bits);
        let d_u = sym_measure(space, &u, omega);
        if d_u == d_e {
            continue;
        }
        let ratio = (perimeter(space, &u) - p_e.clone()) / (d_e.clone() - d_u.clone());
        if d_u > d_e {
            if lower.as_ref().map_or(true, |l| ratio > *l) {
                lower = Some(ratio);
            }
        } else if upper.as_ref().map_or(true, |h| ratio < *h) {
            upper = Some(ratio);
        }
    }
    IntervalBounds { lower, upper }
}

fn interval_bounds_envelope<S: Scalar>(
    space: &RandomWalkSpace<S>,
    omega: &NodeSet,
    e: &NodeSet,
) -> Result<IntervalBounds<S>> {
    let p_e = perimeter(space, e);
    let d_e = sym_measure(space, e, omega);
    let scale = space.total_measure() + p_e.clone();
    let not_on_envelope = || Error::invalid("the set is not a geometric minimizer for any lambda");
    let beats = |sol: &GeometricSolution<S>, lambda: &S| {
        less(&sol.energy, &(p_e.clone() + lambda.clone() * d_e.clone()), &scale)
    };

    let upper = if *e == *omega {
        None
    } else {
        let mut lambda = (perimeter(space, omega) - p_e.clone()) / d_e.clone();
        let mut done = false;
        for _ in 0..MAX_ITER {
            if lambda.negative() {
                return Err(not_on_envelope());
            }
            let sol = solve_geometric(space, omega, &lambda)?;
            if !beats(&sol, &lambda) {
                done = true;
                break;
            }
            let u = sol.minimal;
            let d_u = sym_measure(space, &u, omega);
            if !(d_u < d_e) {
                return Err(not_on_envelope());
            }
            lambda = (perimeter(space, &u) - p_e.clone()) / (d_e.clone() - d_u);
        }
        if !done {
            return Err(Error::internal("threshold iteration did not terminate"));
        }
        Some(lambda)
    };

    let lower = if *e == omega.complement() {
        None
    } else {
        let mut lambda = S::zero();
        let mut done = false;
        for _ in 0..MAX_ITER {
            let sol = solve_geometric(space, omega, &lambda)?;
            if !beats(&sol, &lambda) {
                done = true;
                break;
            }
            let u = sol.maximal;
            let d_u = sym_measure(space, &u, omega);
            if !(d_u > d_e) {
                return Err(not_on_envelope());
            }
            let next = (p_e.clone() - perimeter(space, &u)) / (d_u - d_e.clone());
            if !(next > lambda) {
                return Err(not_on_envelope());
            }
            lambda = next;
        }
        if !done {
            return Err(Error::internal("threshold iteration did not terminate"));
        }
        Some(lambda)
    };
    if let (Some(l), Some(h)) = (&lower, &upper) {
        if less(h, l, &scale) {
            return Err(not_on_envelope());
        }
    }
    Ok(IntervalBounds { lower, upper })
}

/// All transitions of `λ ↦ argmin E^G(·, Ω, λ)` on `λ > 0`, found by
/// intersecting envelope lines.
pub fn scale_space<S: Scalar>(space: &RandomWalkSpace<S>, omega: &NodeSet) -> Result<Vec<Transition<S>>> {
    require_nontrivial_set(space, omega)?;
    let n = space.n();
    let line = |a: &NodeSet| (perimeter(space, a), sym_measure(space, a, omega));
    let empty = NodeSet::empty(n);
    let full = NodeSet::full(n);
    let start = if measure_of(space, &omega.complement()) < measure_of(space, omega) {
        full
    } else {
        empty
    };
    let scale = space.total_measure() + perimeter(space, omega);
    let mut out = Vec::new();
    // (left set with larger slope, right set with smaller slope)
    let mut stack = vec![(start, omega.clone())];
    while let Some((a, b)) = stack.pop() {
        let (pa, da) = line(&a);
        let (pb, db) = line(&b);
        if !(da > db) {
            return Err(Error::internal("scale-space slopes are not ordered"));
        }
        let lambda = (pb - pa.clone()) / (da.clone() - db);
        let sol = solve_geometric(space, omega, &lambda)?;
        let on_line = pa + lambda.clone() * da;
        if less(&sol.energy, &on_line, &scale) {
            let c = sol.minimal;
            stack.push((a, c.clone()));
            stack.push((c, b));
        } else {
            out.push(Transition {
                lambda,
                below: a,
                above: b,
                minimal: sol.minimal,
                maximal: sol.maximal,
            });
        }
    }
    out.sort_by(|x, y| x.lambda.partial_cmp(&y.lambda).expect("comparable"));
    Ok(out)
}

pub fn minimizer_thresholds<S: Scalar>(
    space: &RandomWalkSpace<S>,
    omega: &NodeSet,
) -> Result<ThresholdReport<S>> {
    space.require_ergodic()?;
    require_nontrivial_set(space, omega)?;
    let complement = omega.complement();
    let lambda_omega = lambda_omega(space, omega)?;
    let (lambda0, lambda0_attained) = lambda_zero(space, omega)?;
    let (lambda1, lambda1_attained) = lambda_zero(space, &complement)?;
    let lambda_star = lambda_star(space, omega)?;
    let ratio = lambda_ratio(space, omega)?;
    let ratio_c = lambda_ratio(space, &complement)?;
    let h = cheeger(space, omega)?;
    let h_c = cheeger(space, &complement)?;
    let report = ThresholdReport {
        eigenpair: eigenpair_check(space, omega)?,
        scale_space: scale_space(space, omega)?,
        lambda_omega,
        lambda0,
        lambda0_attained,
        lambda1,
        lambda1_attained,
        lambda_star,
        lambda_ratio: ratio,
        lambda_ratio_complement: ratio_c,
        cheeger: Witnessed {
            value: h.value,
            witness: h.set,
        },
        cheeger_complement: Witnessed {
            value: h_c.value,
            witness: h_c.set,
        },
    };
    report.check_invariants()?;
    Ok(report)
}

impl<S: Scalar> ThresholdReport<S> {
    /// `max(λ_Ω, λ_{X∖Ω}) ≤ λ(Ω) ≤ λ*(Ω)`, `λ⁰ ≤ h₁(Ω)`, `λ¹ ≤ h₁(X∖Ω)`.
    pub fn check_invariants(&self) -> Result<()> {
        let scale = S::max_of(self.lambda_star.clone(), S::one());
        let le = |a: &S, b: &S| scalar::le_tol(a, b, &scale);
        let lo = S::max_of(self.lambda_ratio.clone(), self.lambda_ratio_complement.clone());
        let checks = [
            (le(&lo, &self.lambda_omega.value), "max ratio ≤ λ(Ω)"),
            (le(&self.lambda_omega.value, &self.lambda_star), "λ(Ω) ≤ λ*"),
            (le(&self.lambda0.value, &self.cheeger.value), "λ⁰ ≤ h₁(Ω)"),
            (le(&self.lambda1.value, &self.cheeger_complement.value), "λ¹ ≤ h₁(X∖Ω)"),
        ];
        for (ok, what) in checks {
            if !ok {
                return Err(Error::internal(format!("threshold invariant violated: {what}")));
            }
        }
        Ok(())
    }
}

/// Outcome of [`thresholding_regimes`].
#[derive(Clone, Debug)]
pub struct RegimeCheck {
    pub below: bool,
    pub at: bool,
    pub above: bool,
}

impl RegimeCheck {
    pub fn passed(&self) -> bool {
        self.below && self.at && self.above
    }
}

/// Confirms by L¹ solves that the minimizers for datum `χ_Ω` follow the
/// three regimes of an indicator eigenpair: medians below `λ_Ω`, `c χ_Ω`
/// (and, when `ν(Ω) = ν(X)/2`, the constants) at `λ_Ω`, and `χ_Ω` alone
/// above. `samples` values are probed on each side.
pub fn thresholding_regimes<S: Scalar>(
    space: &RandomWalkSpace<S>,
    omega: &NodeSet,
    samples: usize,
) -> Result<RegimeCheck> {
    let ratio = lambda_ratio(space, omega)?;
    let n = space.n();
    let chi: Vec<S> = omega.indicator();
    let zero = vec![S::zero(); n];
    let one = vec![S::one(); n];
    let twice = measure_of(space, omega) * S::int(2);
    let total = space.total_measure();
    let half = if scalar::eq_tol(&twice, &total, &total) {
        true
    } else if twice < total {
        false
    } else {
        return Err(Error::invalid("the set carries more than half of the measure"));
    };
    let k = samples.max(1) as i64;
    let mut below = true;
    for i in 1..=k {
        let lambda = ratio.clone() * S::ratio(i, k + 1);
        let r = solve_l1_with(space, &chi, &lambda, false)?;
        below &= if half {
            r.minimal_u == zero && r.maximal_u == one
        } else {
            r.unique && r.u == zero
        };
    }
    let mut above = true;
    for i in 1..=k {
        let lambda = ratio.clone() * (S::one() + S::ratio(i, k));
        let r = solve_l1_with(space, &chi, &lambda, false)?;
        above &= r.unique && r.u == chi;
    }
    let r = solve_l1_with(space, &chi, &ratio, false)?;
    let best = r.energy.clone();
    let scale = S::max_of(best.abs(), S::one());
    let optimal = |u: &[S]| scalar::eq_tol(&l1_energy(space, u, &chi, &ratio), &best, &scale);
    let mut at = optimal(&zero) && optimal(&chi);
    if half {
        at &= optimal(&one);
    }
    Ok(RegimeCheck { below, at, above })
}

/// Curvature bounds that every geometric minimizer `E` for `(F, λ)` obeys on
/// a graph space: with `ℓ_x = m_x({x})` and `H = H_{∂E}`,
/// `λ ≤ −H(x) − ℓ_x` on `E∖F`, `λ ≤ H(x) − ℓ_x` on `F∖E`,
/// `λ ≥ H(x) + ℓ_x` on `E∩F` and `λ ≥ −H(x) + ℓ_x` outside `E∪F`.
/// Returns the states violating them.
pub fn curvature_bound_violations<S: Scalar>(
    space: &RandomWalkSpace<S>,
    e: &NodeSet,
    f: &NodeSet,
    lambda: &S,
) -> Vec<usize> {
    let h = curvature(space, e);
    let scale = S::max_of(lambda.abs(), S::one());
    (0..space.n())
        .filter(|&x| {
            let l = space.loop_fraction(x);
            let hx = h[x].clone();
            let ok = match (e.contains(x), f.contains(x)) {
                (true, false) => scalar::le_tol(lambda, &(-hx - l), &scale),
                (false, true) => scalar::le_tol(lambda, &(hx - l), &scale),
                (true, true) => scalar::le_tol(&(hx + l), lambda, &scale),
                (false, false) => scalar::le_tol(&(l - hx), lambda, &scale),
            };
            !ok
        })
        .collect()
}

/// Geometric energy of `E` relative to datum `Ω`.
pub fn indicator_energy<S: Scalar>(
    space: &RandomWalkSpace<S>,
    e: &NodeSet,
    omega: &NodeSet,
    lambda: &S,
) -> S {
    geometric_energy(space, e, omega, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::space::EdgeWeightGraph;

    fn chain6() -> RandomWalkSpace<Rational> {
        let mut g = EdgeWeightGraph::with_vertices(6);
        for (i, w) in [5, 6, 2, 1, 3].into_iter().enumerate() {
            g.add_edge(i, i + 1, rat(w, 1));
        }
        RandomWalkSpace::from_weighted_graph(&g).unwrap()
    }

    fn set(idx: &[usize]) -> NodeSet {
        NodeSet::from_indices(6, idx)
    }

    #[test]
    fn chain_thresholds() {
        let s = chain6();
        let r = minimizer_thresholds(&s, &set(&[0, 1])).unwrap();
        assert_eq!(r.lambda_omega.value, rat(1, 2));
        assert_eq!(r.lambda_omega.witness, set(&[0, 1, 2]));
        assert_eq!(r.lambda0.value, rat(1, 5));
        assert_eq!(r.lambda0.witness, set(&[0, 1, 2, 3]));
        assert!(r.lambda0_attained);
        assert_eq!(r.lambda_star, rat(3, 4));
        assert_eq!(r.lambda_ratio, rat(3, 8));
        assert!(!r.eigenpair);
        let lambdas: Vec<_> = r.scale_space.iter().map(|t| t.lambda.clone()).collect();
        assert_eq!(lambdas, vec![rat(1, 5), rat(1, 3), rat(1, 2)]);
        assert_eq!(r.scale_space[1].below, set(&[0, 1, 2, 3]));
        assert_eq!(r.scale_space[1].above, set(&[0, 1, 2]));
    }

    #[test]
    fn chain_interval_bounds() {
        let s = chain6();
        let omega = set(&[0, 1]);
        let b = minimizer_interval_bounds(&s, &omega, &set(&[0, 1, 2])).unwrap();
        assert_eq!(b, IntervalBounds { lower: Some(rat(1, 3)), upper: Some(rat(1, 2)) });
        let b = minimizer_interval_bounds(&s, &omega, &set(&[0, 1, 2, 3])).unwrap();
        assert_eq!(b, IntervalBounds { lower: Some(rat(1, 5)), upper: Some(rat(1, 3)) });
        let b = minimizer_interval_bounds(&s, &omega, &omega).unwrap();
        assert_eq!(b.upper, None);
        assert_eq!(b.lower, Some(rat(1, 2)));
        for e in [set(&[0, 1, 2]), set(&[0, 1, 2, 3]), omega.clone()] {
            assert_eq!(
                interval_bounds_envelope(&s, &omega, &e).unwrap(),
                interval_bounds_enumerated(&s, &omega, &e)
            );
        }
        assert!(interval_bounds_envelope(&s, &omega, &set(&[4])).is_err());
    }

    #[test]
    fn two_node_eigenpair() {
        let mut g = EdgeWeightGraph::with_vertices(2);
        g.add_edge(0, 1, rat(1, 1));
        let s = RandomWalkSpace::from_weighted_graph(&g).unwrap();
        let omega = NodeSet::from_indices(2, &[0]);
        let r = minimizer_thresholds(&s, &omega).unwrap();
        assert_eq!(r.lambda_omega.value, rat(1, 1));
        assert_eq!(r.lambda0.value, rat(1, 1));
        assert_eq!(r.lambda_ratio, rat(1, 1));
        assert!(r.eigenpair);
        assert!(thresholding_regimes(&s, &omega, 3).unwrap().passed());
    }

    #[test]
    fn maximal_function() {
        let s = chain6();
        let r = maximal_function_check(&s, &set(&[0, 1])).unwrap();
        assert_eq!(r.lambda_star, rat(3, 4));
        assert!(r.divergence_ok && r.pairing_ok && r.minimizer_ok);
        let c = maximal_function_check(&s, &set(&[2, 3, 4, 5])).unwrap();
        assert_eq!(c.lambda_star, r.lambda_star);
    }

    #[test]
    fn curvature_bounds_on_chain() {
        let s = chain6();
        let omega = set(&[0, 1]);
        let e = set(&[0, 1, 2, 3]);
        assert!(curvature_bound_violations(&s, &e, &omega, &rat(1, 4)).is_empty());
        assert_eq!(curvature_bound_violations(&s, &e, &omega, &rat(1, 2)), vec![3]);
    }
}
