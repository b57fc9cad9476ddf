//! The (BV, L¹) problem `min TV_m(u) + λ ∫ |u − f| dν`, solved level by
//! level through the geometric problem.

use rayon::prelude::*;

use crate::certificate::{l1_certificate, CertificateReport};
use crate::error::{Error, Result};
use crate::geometry::{self, distinct_sorted, NodeSet};
use crate::mincut::{check_nested, solve_geometric, GeometricSolution, Select};
use crate::scalar::{self, Scalar};
use crate::space::RandomWalkSpace;

#[derive(Clone, Debug)]
pub struct L1Result<S> {
    /// Equal to `minimal_u`.
    pub u: Vec<S>,
    pub minimal_u: Vec<S>,
    pub maximal_u: Vec<S>,
    pub energy: S,
    pub unique: bool,
    /// Number of levels (distinct values of `f` minus one).
    pub levels: usize,
    pub certificate: Option<CertificateReport<S>>,
}

impl<S: Clone> L1Result<S> {
    pub fn selected(&self, select: Select) -> &[S] {
        match select {
            Select::Minimal => &self.minimal_u,
            Select::Maximal => &self.maximal_u,
        }
    }
}

/// `TV_m(u) + λ ∫ |u − f| dν`.
pub fn l1_energy<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S], f: &[S], lambda: &S) -> S {
    geometry::tv_pairs(space, u) + lambda.clone() * geometry::l1_distance(space, u, f)
}

pub fn solve_l1<S: Scalar>(space: &RandomWalkSpace<S>, f: &[S], lambda: &S) -> Result<L1Result<S>> {
    solve_l1_with(space, f, lambda, true)
}

/// [`solve_l1`], optionally skipping the certificate search.
pub fn solve_l1_with<S: Scalar>(
    space: &RandomWalkSpace<S>,
    f: &[S],
    lambda: &S,
    certify: bool,
) -> Result<L1Result<S>> {
    space.require_ergodic()?;
    if f.len() != space.n() {
        return Err(Error::invalid("signal length does not match the space"));
    }
    if !lambda.positive() {
        return Err(Error::invalid("lambda must be positive"));
    }
    let values = distinct_sorted(f);
    let sets: Vec<NodeSet> = values[1..]
        .iter()
        .map(|v| NodeSet::from_fn(space.n(), |x| f[x] >= *v))
        .collect();
    let solutions: Vec<GeometricSolution<S>> = sets
        .par_iter()
        .map(|set| solve_geometric(space, set, lambda))
        .collect::<Result<_>>()?;
    let stack = |select: Select| -> Result<Vec<S>> {
        let family: Vec<NodeSet> = solutions.iter().map(|s| s.selected(select).clone()).collect();
        check_nested(&family)?;
        let mut u = vec![values[0].clone(); space.n()];
        for (w, a) in values.windows(2).zip(&family) {
            let step = w[1].clone() - w[0].clone();
            for x in a.indices() {
                u[x] = u[x].clone() + step.clone();
            }
        }
        Ok(u)
    };
    let minimal_u = stack(Select::Minimal)?;
    let maximal_u = stack(Select::Maximal)?;
    let level_energy = values
        .windows(2)
        .zip(&solutions)
        .fold(S::zero(), |a, (w, s)| {
            a + (w[1].clone() - w[0].clone()) * s.energy.clone()
        });
    let energy = l1_energy(space, &minimal_u, f, lambda);
    let scale = S::max_of(energy.abs(), S::one());
    for (u, which) in [(&minimal_u, "minimal"), (&maximal_u, "maximal")] {
        let e = l1_energy(space, u, f, lambda);
        if !scalar::eq_tol(&e, &level_energy, &scale) {
            return Err(Error::internal(format!(
                "{which} stack has energy {e}, level integral gives {level_energy}"
            )));
        }
    }
    log::debug!("L1 solve: {} levels, lambda {lambda}, energy {energy}", solutions.len());
    let certificate = if certify {
        Some(l1_certificate(space, &minimal_u, f, lambda)?)
    } else {
        None
    };
    Ok(L1Result {
        unique: minimal_u == maximal_u,
        u: minimal_u.clone(),
        minimal_u,
        maximal_u,
        energy,
        levels: solutions.len(),
        certificate,
    })
}

#[derive(Clone, Debug)]
pub struct L1Report<S> {
    pub energy: S,
    pub certificate: CertificateReport<S>,
    pub optimal: bool,
}

/// Decides optimality of `u` by searching for a certificate `(ξ, g)`.
pub fn verify_l1_optimality<S: Scalar>(
    space: &RandomWalkSpace<S>,
    u: &[S],
    f: &[S],
    lambda: &S,
) -> Result<L1Report<S>> {
    space.require_ergodic()?;
    if !lambda.positive() {
        return Err(Error::invalid("lambda must be positive"));
    }
    let certificate = l1_certificate(space, u, f, lambda)?;
    Ok(L1Report {
        energy: l1_energy(space, u, f, lambda),
        optimal: certificate.feasible,
        certificate,
    })
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

    fn ind(n: usize, idx: &[usize]) -> Vec<Rational> {
        NodeSet::from_indices(n, idx).indicator()
    }

    #[test]
    fn chain_indicator_regimes() {
        let s = chain6();
        let f = ind(6, &[0, 1]);
        let r = solve_l1(&s, &f, &rat(1, 1)).unwrap();
        assert!(r.unique);
        assert_eq!(r.u, f);
        assert!(r.certificate.unwrap().feasible);
        let r = solve_l1(&s, &f, &rat(1, 2)).unwrap();
        assert!(!r.unique);
        assert_eq!(r.minimal_u, f);
        assert_eq!(r.maximal_u, ind(6, &[0, 1, 2]));
        let r = solve_l1(&s, &f, &rat(1, 4)).unwrap();
        assert_eq!(r.u, ind(6, &[0, 1, 2, 3]));
        let r = solve_l1(&s, &f, &rat(1, 10)).unwrap();
        assert!(r.unique);
        assert_eq!(r.u, vec![rat(0, 1); 6]);
    }

    #[test]
    fn constant_data_is_fixed() {
        let s = chain6();
        let f = vec![rat(7, 3); 6];
        let r = solve_l1(&s, &f, &rat(1, 100)).unwrap();
        assert_eq!(r.u, f);
        assert_eq!(r.levels, 0);
        assert_eq!(r.energy, rat(0, 1));
    }

    #[test]
    fn verification_rejects_data_at_small_lambda() {
        let s = chain6();
        let f = ind(6, &[0, 1]);
        assert!(verify_l1_optimality(&s, &f, &f, &rat(1, 1)).unwrap().optimal);
        assert!(!verify_l1_optimality(&s, &f, &f, &rat(1, 10)).unwrap().optimal);
        assert!(solve_l1(&s, &f, &rat(0, 1)).is_err());
    }
}
