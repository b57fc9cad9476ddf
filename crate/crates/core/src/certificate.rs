//! Optimality certificates for the L¹ and L² problems.
//!
//! A certificate is an antisymmetric edge field `g` with `|g| ≤ 1`,
//! `g(x,y) = sign(u(y) − u(x))` wherever `u(x) ≠ u(y)`, and
//! `Σ_y m_x({y}) g(x,y) = λ t_x` at every state, where `t = u − f` for the
//! quadratic fidelity and `t = ξ ∈ sign(u − f)` for the absolute one.
//!
//! Multiplying by `ν_x` turns `F(x,y) = c_xy g(x,y)` into a flow with net
//! outflow `λ ν_x t_x` at `x`. Pinned edges contribute fixed amounts, free
//! edges carry at most `c_xy` either way, and free `ξ_x` become arcs to a
//! ground node with capacity `λ ν_x`. The system is feasible iff the
//! resulting supply/demand problem saturates, which one max flow decides.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::EdgeField;
use crate::maxflow::FlowNetwork;
use crate::scalar::{self, Scalar};
use crate::space::RandomWalkSpace;

/// Required net outflow (in flow units `ν_x · …`) at a state.
#[derive(Clone, Debug)]
pub(crate) enum Target<S> {
    Fixed(S),
    /// Anywhere in `[−h, h]`.
    Free(S),
}

#[derive(Clone, Debug)]
pub struct CertificateReport<S> {
    pub feasible: bool,
    /// Total supply that could not be routed (zero when feasible).
    pub shortfall: S,
    pub demand: S,
    pub g: EdgeField<S>,
    /// `ξ` for the absolute fidelity.
    pub xi: Option<Vec<S>>,
}

/// Outcome of checking a user-supplied certificate.
#[derive(Clone, Debug, Serialize)]
pub struct WitnessCheck {
    pub ok: bool,
    pub max_residual: f64,
    pub violations: Vec<String>,
}

pub(crate) fn values_equal<S: Scalar>(a: &S, b: &S, scale: &S) -> bool {
    scalar::eq_tol(a, b, scale)
}

fn max_abs<S: Scalar>(v: &[S]) -> S {
    v.iter().fold(S::one(), |m, x| S::max_of(m, x.abs()))
}

pub(crate) fn solve_flow_certificate<S: Scalar>(
    space: &RandomWalkSpace<S>,
    u: &[S],
    targets: &[Target<S>],
) -> Result<(bool, S, S, Vec<S>, Vec<S>)> {
    let n = space.n();
    let scale = max_abs(u);
    let (ground, source, sink) = (n, n + 1, n + 2);
    let mut net = FlowNetwork::new(n + 3);
    let mut pinned = vec![S::zero(); n];
    let mut pair_values = Vec::with_capacity(space.pairs().len());
    let mut free_arcs = Vec::new();
    for (k, p) in space.pairs().iter().enumerate() {
        if values_equal(&u[p.a], &u[p.b], &scale) {
            free_arcs.push((k, net.add_edge(p.a, p.b, p.weight.clone())));
            pair_values.push(S::zero());
        } else {
            let sign = scalar::sign(&(u[p.b].clone() - u[p.a].clone()));
            let flow = p.weight.clone() * sign.clone();
            pinned[p.a] = pinned[p.a].clone() + flow.clone();
            pinned[p.b] = pinned[p.b].clone() - flow;
            pair_values.push(sign);
        }
    }
    let mut supply = vec![S::zero(); n + 1];
    let mut ground_arcs = vec![None; n];
    for x in 0..n {
        match &targets[x] {
            Target::Fixed(t) => supply[x] = t.clone() - pinned[x].clone(),
            Target::Free(h) => {
                supply[x] = -pinned[x].clone();
                if h.positive() {
                    ground_arcs[x] = Some(net.add_edge(x, ground, h.clone()));
                }
            }
        }
    }
    supply[ground] = -supply[..n].iter().fold(S::zero(), |a, v| a + v.clone());
    let mut demand = S::zero();
    for (v, b) in supply.iter().enumerate() {
        if b.positive() {
            net.add_arc(source, v, b.clone());
            demand = demand + b.clone();
        } else if b.negative() {
            net.add_arc(v, sink, -b.clone());
        }
    }
    let routed = net.max_flow(source, sink);
    let shortfall = demand.clone() - routed;
    let feasible = !scalar::pos_tol(&shortfall, &S::max_of(demand.clone(), S::one()));
    for (k, arc) in free_arcs {
        let w = space.pairs()[k].weight.clone();
        pair_values[k] = net.flow(arc) / w;
    }
    let free_values = (0..n)
        .map(|x| match (&targets[x], ground_arcs[x]) {
            (Target::Free(h), Some(arc)) => -(net.flow(arc) / h.clone()),
            _ => S::zero(),
        })
        .collect();
    Ok((feasible, shortfall, demand, pair_values, free_values))
}

/// Searches for `g` with `div_m g = λ (u − f)`, `g ∈ sign(∇u)`.
pub fn l2_certificate<S: Scalar>(
    space: &RandomWalkSpace<S>,
    u: &[S],
    f: &[S],
    lambda: &S,
) -> Result<CertificateReport<S>> {
    check_lengths(space, &[u, f])?;
    let targets: Vec<Target<S>> = (0..space.n())
        .map(|x| {
            Target::Fixed(
                lambda.clone() * space.measure()[x].clone() * (u[x].clone() - f[x].clone()),
            )
        })
        .collect();
    let (feasible, shortfall, demand, pairs, _) = solve_flow_certificate(space, u, &targets)?;
    Ok(CertificateReport {
        feasible,
        shortfall,
        demand,
        g: EdgeField::from_pair_values(space, &pairs),
        xi: None,
    })
}

/// Searches for `(ξ, g)` with `ξ ∈ sign(u − f)`, `g ∈ sign(∇u)` and
/// `Σ_y m_x({y}) g(x,y) = λ ξ(x)`.
pub fn l1_certificate<S: Scalar>(
    space: &RandomWalkSpace<S>,
    u: &[S],
    f: &[S],
    lambda: &S,
) -> Result<CertificateReport<S>> {
    check_lengths(space, &[u, f])?;
    let scale = S::max_of(max_abs(u), max_abs(f));
    let mut fixed_xi = vec![None; space.n()];
    let targets: Vec<Target<S>> = (0..space.n())
        .map(|x| {
            let h = lambda.clone() * space.measure()[x].clone();
            if values_equal(&u[x], &f[x], &scale) {
                Target::Free(h)
            } else {
                let s = scalar::sign(&(u[x].clone() - f[x].clone()));
                fixed_xi[x] = Some(s.clone());
                Target::Fixed(h * s)
            }
        })
        .collect();
    let (feasible, shortfall, demand, pairs, free) = solve_flow_certificate(space, u, &targets)?;
    let xi = (0..space.n())
        .map(|x| fixed_xi[x].clone().unwrap_or_else(|| free[x].clone()))
        .collect();
    Ok(CertificateReport {
        feasible,
        shortfall,
        demand,
        g: EdgeField::from_pair_values(space, &pairs),
        xi: Some(xi),
    })
}

fn check_lengths<S: Scalar>(space: &RandomWalkSpace<S>, vs: &[&[S]]) -> Result<()> {
    if vs.iter().any(|v| v.len() != space.n()) {
        return Err(Error::invalid("function length does not match the space"));
    }
    Ok(())
}

/// Checks a given `(g, ξ)` against every condition of the L¹ certificate.
pub fn check_l1_witness<S: Scalar>(
    space: &RandomWalkSpace<S>,
    u: &[S],
    f: &[S],
    lambda: &S,
    g: &EdgeField<S>,
    xi: &[S],
) -> Result<WitnessCheck> {
    check_lengths(space, &[u, f, xi])?;
    let scale = S::max_of(max_abs(u), max_abs(f));
    let mut violations = Vec::new();
    let names = space.states();
    for x in 0..space.n() {
        if xi[x].abs() > S::one() + S::tol(&S::one()) {
            violations.push(format!("|xi({})| > 1", names[x]));
        }
        if !values_equal(&u[x], &f[x], &scale) {
            let s = scalar::sign(&(u[x].clone() - f[x].clone()));
            if !values_equal(&xi[x], &s, &S::one()) {
                violations.push(format!("xi({}) must equal {s}", names[x]));
            }
        }
    }
    let rhs: Vec<S> = xi.iter().map(|v| lambda.clone() * v.clone()).collect();
    let max_residual = check_edge_conditions(space, u, g, &rhs, &mut violations)?;
    Ok(WitnessCheck {
        ok: violations.is_empty(),
        max_residual,
        violations,
    })
}

/// Checks a given `g` against the L² certificate conditions.
pub fn check_l2_witness<S: Scalar>(
    space: &RandomWalkSpace<S>,
    u: &[S],
    f: &[S],
    lambda: &S,
    g: &EdgeField<S>,
) -> Result<WitnessCheck> {
    check_lengths(space, &[u, f])?;
    let mut violations = Vec::new();
    let rhs: Vec<S> = u
        .iter()
        .zip(f)
        .map(|(a, b)| lambda.clone() * (a.clone() - b.clone()))
        .collect();
    let max_residual = check_edge_conditions(space, u, g, &rhs, &mut violations)?;
    Ok(WitnessCheck {
        ok: violations.is_empty(),
        max_residual,
        violations,
    })
}

fn check_edge_conditions<S: Scalar>(
    space: &RandomWalkSpace<S>,
    u: &[S],
    g: &EdgeField<S>,
    rhs: &[S],
    violations: &mut Vec<String>,
) -> Result<f64> {
    let names = space.states();
    let scale = max_abs(u);
    let one_tol = S::one() + S::tol(&S::one());
    if scalar::pos_tol(&g.antisymmetry_residual(), &S::one()) {
        violations.push("g is not antisymmetric".into());
    }
    let mut worst = 0.0f64;
    for x in 0..space.n() {
        let mut acc = S::zero();
        for (y, p) in space.jump_row(x) {
            let v = g.get(x, *y).cloned().ok_or_else(|| {
                Error::invalid(format!("g undefined at ({}, {})", names[x], names[*y]))
            })?;
            if v.abs() > one_tol {
                violations.push(format!("|g({}, {})| > 1", names[x], names[*y]));
            }
            if *y != x && !values_equal(&u[x], &u[*y], &scale) {
                let s = scalar::sign(&(u[*y].clone() - u[x].clone()));
                if !values_equal(&v, &s, &S::one()) {
                    violations.push(format!("g({}, {}) must equal {s}", names[x], names[*y]));
                }
            }
            acc = acc + p.clone() * v;
        }
        let r = (acc - rhs[x].clone()).abs();
        worst = worst.max(r.as_f64());
        if scalar::pos_tol(&r, &S::max_of(rhs[x].abs(), S::one())) {
            violations.push(format!(
                "divergence equation fails at {} by {}",
                names[x],
                r.as_f64()
            ));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::space::EdgeWeightGraph;

    #[test]
    fn two_node_l2_certificate() {
        let mut g = EdgeWeightGraph::with_vertices(2);
        g.add_edge(0, 1, rat(1, 1));
        let s = RandomWalkSpace::from_weighted_graph(&g).unwrap();
        let f = [rat(1, 1), rat(0, 1)];
        let u = [rat(3, 4), rat(1, 4)];
        let rep = l2_certificate(&s, &u, &f, &rat(4, 1)).unwrap();
        assert!(rep.feasible);
        assert_eq!(rep.g.get(0, 1), Some(&rat(-1, 1)));
        assert!(check_l2_witness(&s, &u, &f, &rat(4, 1), &rep.g).unwrap().ok);
        let wrong = [rat(2, 3), rat(1, 3)];
        assert!(!l2_certificate(&s, &wrong, &f, &rat(4, 1)).unwrap().feasible);
    }

    #[test]
    fn l1_certificate_for_constant() {
        let mut g = EdgeWeightGraph::with_vertices(2);
        g.add_edge(0, 1, rat(1, 1));
        let s = RandomWalkSpace::from_weighted_graph(&g).unwrap();
        let f: Vec<Rational> = vec![rat(1, 1), rat(0, 1)];
        // u = f costs TV 1 = λ·1 at λ = 1; both f and the medians are optimal
        let rep = l1_certificate(&s, &f, &f, &rat(1, 1)).unwrap();
        assert!(rep.feasible);
        let rep = l1_certificate(&s, &f, &f, &rat(1, 2)).unwrap();
        assert!(!rep.feasible);
        let rep = l1_certificate(&s, &[rat(0, 1), rat(0, 1)], &f, &rat(1, 2)).unwrap();
        assert!(rep.feasible);
        let xi = rep.xi.unwrap();
        assert!(check_l1_witness(&s, &[rat(0, 1), rat(0, 1)], &f, &rat(1, 2), &rep.g, &xi)
            .unwrap()
            .ok);
    }
}
