//! Exact minimization of `P_m(A) + λ ν(A △ F)` and of affine-perturbed
//! perimeters by s-t minimum cut.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{self, NodeSet};
use crate::maxflow::FlowNetwork;
use crate::scalar::{self, Scalar};
use crate::space::RandomWalkSpace;

/// Which extreme minimizer to report when several exist.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Select {
    Minimal,
    Maximal,
}

/// Pairwise cut energy
/// `Σ_{x∈A, y∉A} c_xy + Σ_{x∈A} a_x + Σ_{x∉A} b_x`, optionally with some
/// states forced out of `A`.
#[derive(Clone, Debug)]
pub struct CutProblem<S> {
    pub n: usize,
    pub pairs: Vec<(usize, usize, S)>,
    pub cost_in: Vec<S>,
    pub cost_out: Vec<S>,
    pub allowed: Option<NodeSet>,
}

#[derive(Clone, Debug)]
pub struct CutSolution<S> {
    pub minimal: NodeSet,
    pub maximal: NodeSet,
    pub energy: S,
    pub flow_value: S,
}

impl<S: Scalar> CutProblem<S> {
    /// Pair weights of `space`, zero unary terms.
    pub fn from_space(space: &RandomWalkSpace<S>) -> Self {
        CutProblem {
            n: space.n(),
            pairs: space
                .pairs()
                .iter()
                .map(|p| (p.a, p.b, p.weight.clone()))
                .collect(),
            cost_in: vec![S::zero(); space.n()],
            cost_out: vec![S::zero(); space.n()],
            allowed: None,
        }
    }

    pub fn energy(&self, a: &NodeSet) -> S {
        let mut e = S::zero();
        for (x, y, c) in &self.pairs {
            if a.contains(*x) != a.contains(*y) {
                e = e + c.clone();
            }
        }
        for x in 0..self.n {
            e = e + if a.contains(x) {
                self.cost_in[x].clone()
            } else {
                self.cost_out[x].clone()
            };
        }
        e
    }

    fn is_allowed(&self, x: usize) -> bool {
        self.allowed.as_ref().map_or(true, |s| s.contains(x))
    }

    /// Minimal and maximal minimizers from one maximum flow.
    pub fn solve(&self) -> Result<CutSolution<S>> {
        let n = self.n;
        let (source, sink) = (n, n + 1);
        let mut cost_in = self.cost_in.clone();
        let mut net = FlowNetwork::new(n + 2);
        for (x, y, c) in &self.pairs {
            match (self.is_allowed(*x), self.is_allowed(*y)) {
                (true, true) => {
                    net.add_edge(*x, *y, c.clone());
                }
                (true, false) => cost_in[*x] = cost_in[*x].clone() + c.clone(),
                (false, true) => cost_in[*y] = cost_in[*y].clone() + c.clone(),
                (false, false) => {}
            }
        }
        let mut constant = S::zero();
        for x in 0..n {
            if !self.is_allowed(x) {
                constant = constant + self.cost_out[x].clone();
                continue;
            }
            let (a, b) = (cost_in[x].clone(), self.cost_out[x].clone());
            constant = constant + S::min_of(a.clone(), b.clone());
            let d = b - a;
            if d.positive() {
                net.add_arc(source, x, d);
            } else if d.negative() {
                net.add_arc(x, sink, -d);
            }
        }
        let flow_value = net.max_flow(source, sink);
        let from_source = net.reachable_from(source);
        let to_sink = net.reaching(sink);
        let minimal = NodeSet::from_fn(n, |x| self.is_allowed(x) && from_source[x]);
        let maximal = NodeSet::from_fn(n, |x| self.is_allowed(x) && !to_sink[x]);
        let energy = constant + flow_value.clone();
        let e_min = self.energy(&minimal);
        let e_max = self.energy(&maximal);
        let magnitude = self
            .pairs
            .iter()
            .map(|p| p.2.abs())
            .chain(self.cost_in.iter().chain(&self.cost_out).map(|c| c.abs()))
            .fold(S::zero(), |a, c| a + c);
        let scale = S::max_of(energy.abs(), magnitude);
        if !scalar::eq_tol(&e_min, &energy, &scale) || !scalar::eq_tol(&e_max, &energy, &scale) {
            return Err(Error::internal(format!(
                "cut energies disagree: flow {energy}, minimal {e_min}, maximal {e_max}"
            )));
        }
        if !minimal.is_subset_of(&maximal) {
            return Err(Error::internal("minimal cut is not inside the maximal cut"));
        }
        Ok(CutSolution {
            minimal,
            maximal,
            energy: e_min,
            flow_value,
        })
    }
}

/// Extreme minimizers of a geometric or affine problem.
#[derive(Clone, Debug)]
pub struct GeometricSolution<S> {
    pub minimal: NodeSet,
    pub maximal: NodeSet,
    pub energy: S,
    /// True when the minimizer is unique (`minimal == maximal`).
    pub unique: bool,
}

impl<S> GeometricSolution<S> {
    pub fn selected(&self, select: Select) -> &NodeSet {
        match select {
            Select::Minimal => &self.minimal,
            Select::Maximal => &self.maximal,
        }
    }
}

/// `E^G(A, F, λ) = P_m(A) + λ ν(A △ F)`.
pub fn geometric_energy<S: Scalar>(
    space: &RandomWalkSpace<S>,
    a: &NodeSet,
    f: &NodeSet,
    lambda: &S,
) -> S {
    geometry::perimeter(space, a)
        + lambda.clone() * geometry::measure_of(space, &a.symmetric_difference(f))
}

/// Minimizes `P_m(A) + λ ν(A △ F)` over all subsets.
pub fn solve_geometric<S: Scalar>(
    space: &RandomWalkSpace<S>,
    f: &NodeSet,
    lambda: &S,
) -> Result<GeometricSolution<S>> {
    if lambda.negative() {
        return Err(Error::invalid("lambda must be nonnegative"));
    }
    if f.n() != space.n() {
        return Err(Error::invalid("set size does not match the space"));
    }
    let mut problem = CutProblem::from_space(space);
    for x in 0..space.n() {
        let cost = lambda.clone() * space.measure()[x].clone();
        if f.contains(x) {
            problem.cost_out[x] = cost;
        } else {
            problem.cost_in[x] = cost;
        }
    }
    let sol = problem.solve()?;
    let check = geometric_energy(space, &sol.minimal, f, lambda);
    let scale = space.total_measure() * (S::one() + lambda.clone());
    if !scalar::eq_tol(&check, &sol.energy, &S::max_of(check.abs(), scale)) {
        return Err(Error::internal(format!(
            "geometric energy {check} differs from cut value {}",
            sol.energy
        )));
    }
    Ok(GeometricSolution {
        unique: sol.minimal == sol.maximal,
        minimal: sol.minimal,
        maximal: sol.maximal,
        energy: sol.energy,
    })
}

/// Minimizes `P_m(A) + Σ_{x∈A} w_x` over subsets of `restrict_to`
/// (everything when `None`).
pub fn solve_geometric_affine<S: Scalar>(
    space: &RandomWalkSpace<S>,
    weights: &[S],
    restrict_to: Option<&NodeSet>,
) -> Result<GeometricSolution<S>> {
    if weights.len() != space.n() {
        return Err(Error::invalid("one weight per state is required"));
    }
    let mut problem = CutProblem::from_space(space);
    problem.cost_in = weights.to_vec();
    problem.allowed = restrict_to.cloned();
    let sol = problem.solve()?;
    let check = geometry::perimeter(space, &sol.minimal)
        + sol
            .minimal
            .indices()
            .into_iter()
            .fold(S::zero(), |a, x| a + weights[x].clone());
    let scale = weights
        .iter()
        .fold(space.total_measure(), |a, w| a + w.abs());
    if !scalar::eq_tol(&check, &sol.energy, &S::max_of(check.abs(), scale)) {
        return Err(Error::internal(format!(
            "affine energy {check} differs from cut value {}",
            sol.energy
        )));
    }
    Ok(GeometricSolution {
        unique: sol.minimal == sol.maximal,
        minimal: sol.minimal,
        maximal: sol.maximal,
        energy: sol.energy,
    })
}

/// Selected minimizers of `E^G(·, F_i, λ)` for decreasing sets `F_0 ⊇ F_1 ⊇ …`,
/// checked to be nested the same way.
pub fn nested_family<S: Scalar>(
    space: &RandomWalkSpace<S>,
    sets: &[NodeSet],
    lambda: &S,
    select: Select,
) -> Result<Vec<NodeSet>> {
    for w in sets.windows(2) {
        if !w[1].is_subset_of(&w[0]) {
            return Err(Error::invalid("data sets must be decreasing"));
        }
    }
    let family: Vec<NodeSet> = sets
        .par_iter()
        .map(|f| solve_geometric(space, f, lambda).map(|s| s.selected(select).clone()))
        .collect::<Result<_>>()?;
    check_nested(&family)?;
    Ok(family)
}

/// [`nested_family`] for the superlevel sets `{f > t}` at increasing levels.
pub fn nested_family_levels<S: Scalar>(
    space: &RandomWalkSpace<S>,
    f: &[S],
    levels: &[S],
    lambda: &S,
    select: Select,
) -> Result<Vec<NodeSet>> {
    if levels.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("levels must be strictly increasing"));
    }
    let sets: Vec<NodeSet> = levels.iter().map(|t| NodeSet::superlevel(f, t)).collect();
    nested_family(space, &sets, lambda, select)
}

pub(crate) fn check_nested(family: &[NodeSet]) -> Result<()> {
    for (i, w) in family.windows(2).enumerate() {
        if !w[1].is_subset_of(&w[0]) {
            return Err(Error::internal(format!(
                "minimizers at positions {i} and {} are not nested: {:?} vs {:?}",
                i + 1,
                w[0],
                w[1]
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};
    use crate::space::EdgeWeightGraph;

    fn chain6() -> RandomWalkSpace<Rational> {
        let mut g = EdgeWeightGraph::with_vertices(6);
        for (i, w) in [5, 6, 2, 1, 3].iter().enumerate() {
            g.add_edge(i, i + 1, rat(*w, 1));
        }
        RandomWalkSpace::from_weighted_graph(&g).unwrap()
    }

    fn set(idx: &[usize]) -> NodeSet {
        NodeSet::from_indices(6, &idx.iter().map(|i| i - 1).collect::<Vec<_>>())
    }

    #[test]
    fn chain_geometric_minimizers() {
        let s = chain6();
        let f = set(&[1, 2]);
        let cases = [
            (rat(2, 5), set(&[1, 2, 3]), rat(26, 5)),
            (rat(1, 4), set(&[1, 2, 3, 4]), rat(15, 4)),
            (rat(1, 10), NodeSet::empty(6), rat(8, 5)),
        ];
        for (lambda, expected, energy) in cases {
            let sol = solve_geometric(&s, &f, &lambda).unwrap();
            assert!(sol.unique);
            assert_eq!(sol.minimal, expected);
            assert_eq!(sol.energy, energy);
        }
        let sol = solve_geometric(&s, &f, &rat(1, 3)).unwrap();
        assert!(!sol.unique);
        assert_eq!(sol.minimal, set(&[1, 2, 3]));
        assert_eq!(sol.maximal, set(&[1, 2, 3, 4]));
        assert!(solve_geometric(&s, &f, &rat(-1, 1)).is_err());
    }

    #[test]
    fn float_chain_matches() {
        let s = chain6().to_f64();
        let sol = solve_geometric(&s, &set(&[1, 2]), &0.4).unwrap();
        assert_eq!(sol.minimal, set(&[1, 2, 3]));
        assert!((sol.energy - 5.2).abs() < 1e-12);
    }

    #[test]
    fn affine_problems() {
        let s = chain6();
        let huge = rat(1_000_000, 1);
        let sol = solve_geometric_affine(&s, &vec![huge.clone(); 6], None).unwrap();
        assert!(sol.minimal.is_empty() && sol.maximal.is_empty());
        let omega = set(&[1, 2, 3, 4]);
        let sol = solve_geometric_affine(&s, &vec![-huge; 6], Some(&omega)).unwrap();
        assert_eq!(sol.minimal, omega);
        let w: Vec<Rational> = s.measure().iter().map(|m| -(m * rat(1, 27))).collect();
        let sol = solve_geometric_affine(&s, &w, Some(&omega)).unwrap();
        assert_eq!(sol.energy, rat(0, 1));
        assert!(sol.minimal.is_empty());
        assert_eq!(sol.maximal, omega);
    }

    #[test]
    fn nested_levels() {
        let s = chain6();
        let chi: Vec<Rational> = set(&[1, 2]).indicator();
        let fam = nested_family_levels(&s, &chi, &[rat(1, 2)], &rat(2, 5), Select::Minimal).unwrap();
        assert_eq!(fam, vec![set(&[1, 2, 3])]);
        let f: Vec<Rational> = [2, 2, 1, 1, 0, 0].iter().map(|v| rat(*v, 1)).collect();
        let fam = nested_family_levels(&s, &f, &[rat(1, 2), rat(3, 2)], &rat(10, 1), Select::Maximal)
            .unwrap();
        assert_eq!(fam, vec![set(&[1, 2, 3, 4]), set(&[1, 2])]);
    }
}
