//! Exact level-set solver for `min TV_m(u) + Σ_x ν_x φ_x(u_x)` with convex
//! `φ_x` whose derivative is piecewise linear and increasing:
//!
//! `φ_x'(s) = q_x s + r_x + J_x [s > κ_x]`, `q_x > 0`, `J_x ≥ 0`.
//!
//! For every `s` the superlevel set `{u > s}` minimizes
//! `P_m(E) + Σ_{x∈E} ν_x φ_x'(s)`. Between knots these weights are affine in
//! `s`, so the lower envelope of the set energies is concave and piecewise
//! linear; its breakpoints are exactly the values taken by `u`. They are
//! located by recursive line intersection, one cut per probe.

use crate::error::{Error, Result};
use crate::geometry::{self, NodeSet};
use crate::mincut::{solve_geometric_affine, GeometricSolution};
use crate::scalar::Scalar;
use crate::space::RandomWalkSpace;

#[derive(Clone, Debug)]
pub struct ProxProblem<S> {
    pub slope: Vec<S>,
    pub offset: Vec<S>,
    /// `(κ_x, J_x)` per node.
    pub knots: Vec<Option<(S, S)>>,
    /// Strictly below every value of the solution.
    pub lower: S,
    /// Strictly above every value of the solution.
    pub upper: S,
}

#[derive(Clone, Debug)]
pub struct ProxSolution<S> {
    pub u: Vec<S>,
    pub cut_solves: usize,
    pub breakpoints: usize,
}

struct Engine<'a, S: Scalar> {
    space: &'a RandomWalkSpace<S>,
    problem: &'a ProxProblem<S>,
    cut_solves: usize,
}

impl<'a, S: Scalar> Engine<'a, S> {
    /// Weights on the interval whose left end is `left`, evaluated at `s`.
    fn weights(&self, left: &S, s: &S) -> Vec<S> {
        let p = self.problem;
        (0..self.space.n())
            .map(|x| {
                let mut d = p.slope[x].clone() * s.clone() + p.offset[x].clone();
                if let Some((k, j)) = &p.knots[x] {
                    if k <= left {
                        d = d + j.clone();
                    }
                }
                self.space.measure()[x].clone() * d
            })
            .collect()
    }

    fn solve(&mut self, left: &S, s: &S) -> Result<GeometricSolution<S>> {
        self.cut_solves += 1;
        solve_geometric_affine(self.space, &self.weights(left, s), None)
    }

    /// `(β, α)` with energy of `set` equal to `β + α s` on the interval.
    fn line(&self, left: &S, set: &NodeSet) -> (S, S) {
        let p = self.problem;
        let mut beta = geometry::cut_weight(self.space, set);
        let mut alpha = S::zero();
        for x in set.indices() {
            let m = self.space.measure()[x].clone();
            let mut r = p.offset[x].clone();
            if let Some((k, j)) = &p.knots[x] {
                if k <= left {
                    r = r + j.clone();
                }
            }
            beta = beta + m.clone() * r;
            alpha = alpha + m * p.slope[x].clone();
        }
        (beta, alpha)
    }

    /// Assigns values to `outer ∖ inner` where both are envelope sets of the
    /// interval starting at `left`.
    fn refine(
        &mut self,
        left: &S,
        outer: NodeSet,
        inner: NodeSet,
        u: &mut [Option<S>],
        breakpoints: &mut usize,
    ) -> Result<()> {
        let mut stack = vec![(outer, inner)];
        while let Some((big, small)) = stack.pop() {
            if big == small {
                continue;
            }
            if !small.is_subset_of(&big) {
                return Err(Error::internal(format!(
                    "level sets not nested: {small:?} outside {big:?}"
                )));
            }
            let (beta_b, alpha_b) = self.line(left, &big);
            let (beta_s, alpha_s) = self.line(left, &small);
            let denom = alpha_b.clone() - alpha_s;
            if !denom.positive() {
                return Err(Error::internal("envelope slopes are not ordered"));
            }
            let s_c = (beta_s - beta_b.clone()) / denom;
            let sol = self.solve(left, &s_c)?;
            let on_line = beta_b.clone() + alpha_b.clone() * s_c.clone();
            let scale = beta_b.abs() + (alpha_b * s_c.clone()).abs() + S::one();
            let below = sol.energy.clone() + S::tol(&scale) * S::int(64) < on_line;
            let mid = sol.maximal.intersection(&big).union(&small);
            if below && mid != big && mid != small {
                stack.push((big, mid.clone()));
                stack.push((mid, small));
            } else {
                *breakpoints += 1;
                for x in big.difference(&small).indices() {
                    u[x] = Some(s_c.clone());
                }
            }
        }
        Ok(())
    }
}

/// Solves the problem exactly (up to float rounding for `f64`).
pub fn solve_prox<S: Scalar>(
    space: &RandomWalkSpace<S>,
    problem: &ProxProblem<S>,
) -> Result<ProxSolution<S>> {
    let n = space.n();
    if problem.slope.iter().any(|q| !q.positive()) {
        return Err(Error::invalid("quadratic coefficients must be positive"));
    }
    if problem.knots.iter().flatten().any(|(_, j)| j.negative()) {
        return Err(Error::invalid("derivative jumps must be nonnegative"));
    }
    if !(problem.lower < problem.upper) {
        return Err(Error::invalid("empty value range"));
    }
    let mut points = vec![problem.lower.clone()];
    let mut knots: Vec<S> = problem
        .knots
        .iter()
        .flatten()
        .map(|(k, _)| k.clone())
        .filter(|k| *k > problem.lower && *k < problem.upper)
        .collect();
    knots.sort_by(|a, b| a.partial_cmp(b).expect("comparable knots"));
    knots.dedup();
    points.extend(knots);
    points.push(problem.upper.clone());

    let mut engine = Engine {
        space,
        problem,
        cut_solves: 0,
    };
    let mut u: Vec<Option<S>> = vec![None; n];
    let mut breakpoints = 0;
    let mut previous = NodeSet::full(n);
    for (i, w) in points.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        let left = engine.solve(a, a)?.minimal;
        let right = engine.solve(a, b)?.maximal;
        if i == 0 && !left.is_full() {
            return Err(Error::internal("lower bound is not below the solution"));
        }
        if !left.is_subset_of(&previous) || !right.is_subset_of(&left) {
            return Err(Error::internal(format!(
                "level sets not nested around {a}: {previous:?} ⊇ {left:?} ⊇ {right:?} fails"
            )));
        }
        for x in previous.difference(&left).indices() {
            u[x] = Some(a.clone());
        }
        engine.refine(a, left, right.clone(), &mut u, &mut breakpoints)?;
        previous = right;
    }
    if !previous.is_empty() {
        return Err(Error::internal("upper bound is not above the solution"));
    }
    let u = u
        .into_iter()
        .map(|v| v.ok_or_else(|| Error::internal("node left without a value")))
        .collect::<Result<Vec<_>>>()?;
    log::debug!(
        "prox solve: {} states, {} cuts, {breakpoints} breakpoints",
        n,
        engine.cut_solves
    );
    Ok(ProxSolution {
        u,
        cut_solves: engine.cut_solves,
        breakpoints,
    })
}

/// `(min, max)` of a nonempty slice.
pub(crate) fn range<S: Scalar>(v: &[S]) -> (S, S) {
    let lo = v.iter().cloned().reduce(S::min_of).expect("nonempty");
    let hi = v.iter().cloned().reduce(S::max_of).expect("nonempty");
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::space::EdgeWeightGraph;

    #[test]
    fn two_node_rof() {
        let mut g = EdgeWeightGraph::with_vertices(2);
        g.add_edge(0, 1, rat(1, 1));
        let s = RandomWalkSpace::from_weighted_graph(&g).unwrap();
        let lambda = rat(4, 1);
        let f = [rat(1, 1), rat(0, 1)];
        let p = ProxProblem {
            slope: vec![lambda.clone(); 2],
            offset: f.iter().map(|v| -(lambda.clone() * v)).collect(),
            knots: vec![None, None],
            lower: rat(-1, 1),
            upper: rat(2, 1),
        };
        let sol = solve_prox(&s, &p).unwrap();
        assert_eq!(sol.u, vec![rat(3, 4), rat(1, 4)]);
    }
}
