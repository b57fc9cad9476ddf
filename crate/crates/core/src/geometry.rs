//! Sets, functions and edge fields on a space, and the nonlocal functionals
//! built from them: interaction, perimeter, total variation, gradient,
//! divergence, mean curvature, Cheeger constant and medians.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::mincut;
use crate::scalar::{self, Scalar};
use crate::space::RandomWalkSpace;

/// Real function on the states, indexed like the space.
pub type NodeFunction<S> = Vec<S>;

/// Subset of the states as a membership mask.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet {
    mask: Vec<bool>,
}

impl NodeSet {
    pub fn empty(n: usize) -> Self {
        NodeSet {
            mask: vec![false; n],
        }
    }

    pub fn full(n: usize) -> Self {
        NodeSet { mask: vec![true; n] }
    }

    pub fn from_mask(mask: Vec<bool>) -> Self {
        NodeSet { mask }
    }

    pub fn from_indices(n: usize, idx: &[usize]) -> Self {
        let mut s = Self::empty(n);
        for &i in idx {
            s.mask[i] = true;
        }
        s
    }

    pub fn from_fn(n: usize, f: impl Fn(usize) -> bool) -> Self {
        NodeSet {
            mask: (0..n).map(f).collect(),
        }
    }

    /// `{x : u(x) > t}`.
    pub fn superlevel<S: Scalar>(u: &[S], t: &S) -> Self {
        NodeSet {
            mask: u.iter().map(|v| v > t).collect(),
        }
    }

    /// Subset encoded by the low `n` bits of `bits`.
    pub fn from_bits(n: usize, bits: u64) -> Self {
        Self::from_fn(n, |i| bits >> i & 1 == 1)
    }

    pub fn n(&self) -> usize {
        self.mask.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.mask[i] = true;
    }

    pub fn remove(&mut self, i: usize) {
        self.mask[i] = false;
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.n()).filter(|&i| self.mask[i]).collect()
    }

    pub fn count(&self) -> usize {
        self.mask.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|b| *b)
    }

    pub fn is_full(&self) -> bool {
        self.mask.iter().all(|b| *b)
    }

    pub fn complement(&self) -> Self {
        NodeSet {
            mask: self.mask.iter().map(|b| !b).collect(),
        }
    }

    fn zip(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        assert_eq!(self.n(), other.n(), "sets over different spaces");
        NodeSet {
            mask: self
                .mask
                .iter()
                .zip(&other.mask)
                .map(|(a, b)| op(*a, *b))
                .collect(),
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a || b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a && !b)
    }

    pub fn symmetric_difference(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a != b)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.mask.iter().zip(&other.mask).all(|(a, b)| !a || *b)
    }

    pub fn indicator<S: Scalar>(&self) -> NodeFunction<S> {
        self.mask
            .iter()
            .map(|b| if *b { S::one() } else { S::zero() })
            .collect()
    }

    /// State names of the members, in index order.
    pub fn names<S>(&self, space: &RandomWalkSpace<S>) -> Vec<String>
    where
        S: Scalar,
    {
        self.indices()
            .into_iter()
            .map(|i| space.states()[i].clone())
            .collect()
    }
}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.indices().iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

/// Function on the directed pairs `(x, y)` with `m_x({y}) > 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeField<S> {
    rows: Vec<Vec<(usize, S)>>,
}

impl<S: Scalar> EdgeField<S> {
    pub fn from_fn(space: &RandomWalkSpace<S>, f: impl Fn(usize, usize) -> S) -> Self {
        EdgeField {
            rows: space
                .jump()
                .iter()
                .enumerate()
                .map(|(x, row)| row.iter().map(|(y, _)| (*y, f(x, *y))).collect())
                .collect(),
        }
    }

    pub fn zeros(space: &RandomWalkSpace<S>) -> Self {
        Self::from_fn(space, |_, _| S::zero())
    }

    /// Field from explicit entries; every pair of the jump support must be given.
    pub fn from_map(space: &RandomWalkSpace<S>, map: &HashMap<(usize, usize), S>) -> Result<Self> {
        let mut rows = Vec::with_capacity(space.n());
        for (x, row) in space.jump().iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (y, _) in row {
                let v = map.get(&(x, *y)).ok_or_else(|| {
                    Error::invalid(format!(
                        "edge field has no entry for ({}, {})",
                        space.states()[x],
                        space.states()[*y]
                    ))
                })?;
                out.push((*y, v.clone()));
            }
            rows.push(out);
        }
        Ok(EdgeField { rows })
    }

    /// Antisymmetric field with `g(a,b) = values[k]` for the `k`-th pair and
    /// zero on self-loops.
    pub fn from_pair_values(space: &RandomWalkSpace<S>, values: &[S]) -> Self {
        let mut lookup = HashMap::with_capacity(values.len());
        for (p, v) in space.pairs().iter().zip(values) {
            lookup.insert((p.a, p.b), v.clone());
        }
        Self::from_fn(space, |x, y| {
            if x == y {
                S::zero()
            } else if x < y {
                lookup.get(&(x, y)).cloned().unwrap_or_else(S::zero)
            } else {
                -lookup.get(&(y, x)).cloned().unwrap_or_else(S::zero)
            }
        })
    }

    pub fn row(&self, x: usize) -> &[(usize, S)] {
        &self.rows[x]
    }

    pub fn get(&self, x: usize, y: usize) -> Option<&S> {
        self.rows[x]
            .binary_search_by_key(&y, |e| e.0)
            .ok()
            .map(|k| &self.rows[x][k].1)
    }

    pub fn sup_norm(&self) -> S {
        self.rows
            .iter()
            .flatten()
            .fold(S::zero(), |m, (_, v)| S::max_of(m, v.abs()))
    }

    /// `max |z(x,y) + z(y,x)|` over the support.
    pub fn antisymmetry_residual(&self) -> S {
        let mut worst = S::zero();
        for (x, row) in self.rows.iter().enumerate() {
            for (y, v) in row {
                let back = self.get(*y, x).cloned().unwrap_or_else(S::zero);
                worst = S::max_of(worst, (v.clone() + back).abs());
            }
        }
        worst
    }
}

pub fn measure_of<S: Scalar>(space: &RandomWalkSpace<S>, e: &NodeSet) -> S {
    e.indices()
        .into_iter()
        .fold(S::zero(), |a, x| a + space.measure()[x].clone())
}

/// `∫ u dν`.
pub fn integral<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S]) -> S {
    u.iter()
        .zip(space.measure())
        .fold(S::zero(), |a, (v, m)| a + v.clone() * m.clone())
}

/// `∫ |u - v| dν`.
pub fn l1_distance<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S], v: &[S]) -> S {
    u.iter()
        .zip(v)
        .zip(space.measure())
        .fold(S::zero(), |a, ((p, q), m)| {
            a + (p.clone() - q.clone()).abs() * m.clone()
        })
}

/// `∫ |u - v|² dν`.
pub fn l2_distance_sq<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S], v: &[S]) -> S {
    u.iter()
        .zip(v)
        .zip(space.measure())
        .fold(S::zero(), |a, ((p, q), m)| {
            let d = p.clone() - q.clone();
            a + d.clone() * d * m.clone()
        })
}

/// `L_m(A, B) = Σ_{x∈A} ν_x Σ_{y∈B} m_x({y})`.
pub fn interaction<S: Scalar>(space: &RandomWalkSpace<S>, a: &NodeSet, b: &NodeSet) -> S {
    let mut total = S::zero();
    for x in a.indices() {
        let mass = space
            .jump_row(x)
            .iter()
            .filter(|(y, _)| b.contains(*y))
            .fold(S::zero(), |acc, (_, p)| acc + p.clone());
        total = total + space.measure()[x].clone() * mass;
    }
    total
}

/// `P_m(E) = L_m(E, X∖E)`.
pub fn perimeter<S: Scalar>(space: &RandomWalkSpace<S>, e: &NodeSet) -> S {
    interaction(space, e, &e.complement())
}

/// `P_m(E) = ν(E) − L_m(E, E)`; cross-check for [`perimeter`].
pub fn perimeter_by_inner_interaction<S: Scalar>(space: &RandomWalkSpace<S>, e: &NodeSet) -> S {
    measure_of(space, e) - interaction(space, e, e)
}

/// Perimeter summed over the symmetric pair weights.
pub(crate) fn cut_weight<S: Scalar>(space: &RandomWalkSpace<S>, e: &NodeSet) -> S {
    space
        .pairs()
        .iter()
        .filter(|p| e.contains(p.a) != e.contains(p.b))
        .fold(S::zero(), |a, p| a + p.weight.clone())
}

/// `TV_m(u) = ½ Σ_x ν_x Σ_y m_x({y}) |u(y) − u(x)|`.
pub fn total_variation<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S]) -> S {
    let mut total = S::zero();
    for x in 0..space.n() {
        let row = space.jump_row(x).iter().fold(S::zero(), |acc, (y, p)| {
            acc + p.clone() * (u[*y].clone() - u[x].clone()).abs()
        });
        total = total + space.measure()[x].clone() * row;
    }
    total / S::int(2)
}

/// Same value as [`total_variation`], summed over pair weights.
pub(crate) fn tv_pairs<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S]) -> S {
    space.pairs().iter().fold(S::zero(), |a, p| {
        a + p.weight.clone() * (u[p.b].clone() - u[p.a].clone()).abs()
    })
}

/// Superlevel perimeters of `u` at its distinct values.
#[derive(Clone, Debug)]
pub struct CoareaProfile<S> {
    pub levels: Vec<S>,
    /// `perimeters[i] = P_m({u > levels[i]})`.
    pub perimeters: Vec<S>,
    /// `Σ (t_{i+1} − t_i) P_m({u > t_i})`.
    pub integral: S,
}

pub fn coarea_profile<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S]) -> CoareaProfile<S> {
    let levels = distinct_sorted(u);
    let perimeters: Vec<S> = levels
        .iter()
        .map(|t| perimeter(space, &NodeSet::superlevel(u, t)))
        .collect();
    let integral = levels
        .windows(2)
        .zip(&perimeters)
        .fold(S::zero(), |a, (w, p)| {
            a + (w[1].clone() - w[0].clone()) * p.clone()
        });
    CoareaProfile {
        levels,
        perimeters,
        integral,
    }
}

/// Distinct values of `u` in increasing order.
pub fn distinct_sorted<S: Scalar>(u: &[S]) -> Vec<S> {
    let mut v = u.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("comparable values"));
    v.dedup();
    v
}

/// `∇u(x,y) = u(y) − u(x)`.
pub fn gradient<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S]) -> EdgeField<S> {
    EdgeField::from_fn(space, |x, y| u[y].clone() - u[x].clone())
}

/// `(div_m z)(x) = ½ Σ_y m_x({y}) (z(x,y) − z(y,x))`.
pub fn divergence<S: Scalar>(space: &RandomWalkSpace<S>, z: &EdgeField<S>) -> Result<NodeFunction<S>> {
    let two = S::int(2);
    let mut out = Vec::with_capacity(space.n());
    for x in 0..space.n() {
        let mut acc = S::zero();
        for (k, (y, p)) in space.jump_row(x).iter().enumerate() {
            let zxy = z.get(x, *y).ok_or_else(|| missing(space, x, *y))?;
            let zyx = match space.reverse_position(x, k) {
                Some(_) => z.get(*y, x).ok_or_else(|| missing(space, *y, x))?.clone(),
                None => return Err(missing(space, *y, x)),
            };
            acc = acc + p.clone() * (zxy.clone() - zyx);
        }
        out.push(acc / two.clone());
    }
    Ok(out)
}

fn missing<S: Scalar>(space: &RandomWalkSpace<S>, x: usize, y: usize) -> Error {
    Error::invalid(format!(
        "edge field undefined at ({}, {})",
        space.states()[x],
        space.states()[y]
    ))
}

/// `∫ u div_m z dν + ½ ⟨∇u, z⟩_{ν⊗m}`; zero by Green's formula.
pub fn green_residual<S: Scalar>(space: &RandomWalkSpace<S>, u: &[S], z: &EdgeField<S>) -> Result<S> {
    let div = divergence(space, z)?;
    let lhs = integral(
        space,
        &div.iter().zip(u).map(|(d, v)| d.clone() * v.clone()).collect::<Vec<_>>(),
    );
    let mut pairing = S::zero();
    for x in 0..space.n() {
        for (y, p) in space.jump_row(x) {
            let zxy = z.get(x, *y).ok_or_else(|| missing(space, x, *y))?;
            pairing = pairing
                + space.measure()[x].clone()
                    * p.clone()
                    * (u[*y].clone() - u[x].clone())
                    * zxy.clone();
        }
    }
    Ok(lhs + pairing / S::int(2))
}

/// `m_x(E)` for every state.
pub fn jump_mass<S: Scalar>(space: &RandomWalkSpace<S>, e: &NodeSet) -> NodeFunction<S> {
    (0..space.n())
        .map(|x| {
            space
                .jump_row(x)
                .iter()
                .filter(|(y, _)| e.contains(*y))
                .fold(S::zero(), |a, (_, p)| a + p.clone())
        })
        .collect()
}

/// Nonlocal mean curvature `H_{∂E}(x) = 1 − 2 m_x(E)`.
pub fn curvature<S: Scalar>(space: &RandomWalkSpace<S>, e: &NodeSet) -> NodeFunction<S> {
    let two = S::int(2);
    jump_mass(space, e)
        .into_iter()
        .map(|m| S::one() - two.clone() * m)
        .collect()
}

fn require_nontrivial<S: Scalar>(space: &RandomWalkSpace<S>, omega: &NodeSet) -> Result<()> {
    if omega.n() != space.n() {
        return Err(Error::invalid("set size does not match the space"));
    }
    if omega.is_empty() || omega.is_full() {
        return Err(Error::invalid("the set must be neither empty nor everything"));
    }
    Ok(())
}

pub(crate) fn require_nontrivial_set<S: Scalar>(
    space: &RandomWalkSpace<S>,
    omega: &NodeSet,
) -> Result<()> {
    require_nontrivial(space, omega)
}

/// `λ_Ω = P_m(Ω) / ν(Ω)`.
pub fn lambda_ratio<S: Scalar>(space: &RandomWalkSpace<S>, omega: &NodeSet) -> Result<S> {
    require_nontrivial(space, omega)?;
    Ok(perimeter(space, omega) / measure_of(space, omega))
}

#[derive(Clone, Debug)]
pub struct Cheeger<S> {
    pub value: S,
    /// The largest subset of `Ω` attaining the minimal ratio.
    pub set: NodeSet,
    pub iterations: usize,
}

/// `h_1(Ω) = min { P_m(E)/ν(E) : ∅ ≠ E ⊆ Ω }` by Dinkelbach iteration on
/// `min_{E⊆Ω} P_m(E) − h ν(E)`.
pub fn cheeger<S: Scalar>(space: &RandomWalkSpace<S>, omega: &NodeSet) -> Result<Cheeger<S>> {
    if omega.n() != space.n() || omega.is_empty() {
        return Err(Error::invalid("Cheeger constant needs a nonempty set"));
    }
    let mut set = omega.clone();
    let mut value = perimeter(space, &set) / measure_of(space, &set);
    let scale = space.total_measure();
    for iterations in 1..=10_000 {
        let weights: Vec<S> = space
            .measure()
            .iter()
            .map(|m| -(value.clone() * m.clone()))
            .collect();
        let sol = mincut::solve_geometric_affine(space, &weights, Some(omega))?;
        let best = sol.maximal.clone();
        if scalar::pos_tol(&(-sol.energy.clone()), &scale) && !best.is_empty() {
            let next = perimeter(space, &best) / measure_of(space, &best);
            if !(next < value) {
                return Err(Error::internal("Dinkelbach ratio failed to decrease"));
            }
            value = next;
            set = best;
        } else {
            if !best.is_empty() {
                set = best;
            }
            return Ok(Cheeger {
                value,
                set,
                iterations,
            });
        }
    }
    Err(Error::internal("Cheeger iteration did not terminate"))
}

/// Whether `Ω` attains its own Cheeger constant.
pub fn is_calibrable<S: Scalar>(space: &RandomWalkSpace<S>, omega: &NodeSet) -> Result<bool> {
    let h = cheeger(space, omega)?;
    let ratio = perimeter(space, omega) / measure_of(space, omega);
    Ok(scalar::eq_tol(&h.value, &ratio, &ratio))
}

/// Closed interval of ν-medians of `f`.
pub fn median_interval<S: Scalar>(space: &RandomWalkSpace<S>, f: &[S]) -> (S, S) {
    let mut order: Vec<usize> = (0..f.len()).collect();
    order.sort_by(|a, b| f[*a].partial_cmp(&f[*b]).expect("comparable values"));
    let half = space.total_measure() / S::int(2);
    let mut cum = S::zero();
    let mut lower = None;
    let mut k = 0;
    while k < order.len() {
        let v = f[order[k]].clone();
        while k < order.len() && f[order[k]] == v {
            cum = cum + space.measure()[order[k]].clone();
            k += 1;
        }
        if lower.is_none() && cum >= half {
            lower = Some(v.clone());
        }
        if cum > half {
            return (lower.unwrap_or_else(|| v.clone()), v);
        }
    }
    let last = f[order[order.len() - 1]].clone();
    (lower.unwrap_or_else(|| last.clone()), last)
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

    fn r(v: i64) -> Rational {
        rat(v, 1)
    }

    #[test]
    fn chain_perimeters() {
        let s = chain6();
        assert_eq!(interaction(&s, &set(&[1, 2]), &set(&[3, 4, 5, 6])), r(6));
        assert_eq!(interaction(&s, &set(&[1, 2]), &set(&[3])), r(6));
        assert_eq!(interaction(&s, &set(&[3]), &set(&[1, 2])), r(6));
        assert_eq!(interaction(&s, &NodeSet::empty(6), &set(&[3])), r(0));
        assert_eq!(perimeter(&s, &set(&[1, 2, 3, 4])), r(1));
        assert_eq!(perimeter(&s, &set(&[1, 2, 3])), r(2));
        assert_eq!(perimeter(&s, &NodeSet::full(6)), r(0));
        assert_eq!(perimeter(&s, &NodeSet::empty(6)), r(0));
        for bits in 0..64u64 {
            let e = NodeSet::from_bits(6, bits);
            assert_eq!(perimeter(&s, &e), perimeter_by_inner_interaction(&s, &e));
            assert_eq!(perimeter(&s, &e), cut_weight(&s, &e));
        }
    }

    #[test]
    fn chain_total_variation_and_coarea() {
        let s = chain6();
        let chi: Vec<Rational> = set(&[1, 2]).indicator();
        assert_eq!(total_variation(&s, &chi), r(6));
        let twice: Vec<Rational> = chi.iter().map(|v| v * r(2)).collect();
        assert_eq!(total_variation(&s, &twice), r(12));
        assert_eq!(total_variation(&s, &vec![r(4); 6]), r(0));
        let u: Vec<Rational> = [3, 3, 2, 2, 0, 0].iter().map(|v| r(*v)).collect();
        let prof = coarea_profile(&s, &u);
        assert_eq!(prof.integral, r(8));
        assert_eq!(total_variation(&s, &u), r(8));
        assert_eq!(tv_pairs(&s, &u), r(8));
        assert_eq!(coarea_profile(&s, &vec![r(1); 6]).integral, r(0));
    }

    #[test]
    fn divergence_of_indicator_field() {
        let s = chain6();
        let omega = set(&[1, 2]);
        let z0 = EdgeField::from_fn(&s, |x, y| match (omega.contains(x), omega.contains(y)) {
            (true, false) => r(1),
            (false, true) => r(-1),
            _ => r(0),
        });
        let div = divergence(&s, &z0).unwrap();
        assert_eq!(
            div,
            vec![r(0), rat(6, 11), rat(-3, 4), r(0), r(0), r(0)]
        );
        let u: Vec<Rational> = [1, -2, 5, 0, 3, 7].iter().map(|v| r(*v)).collect();
        assert_eq!(green_residual(&s, &u, &z0).unwrap(), r(0));
        assert!(gradient(&s, &vec![r(2); 6]).sup_norm() == r(0));
    }

    #[test]
    fn curvature_values() {
        let s = chain6();
        assert_eq!(curvature(&s, &set(&[1, 2, 3, 4]))[3], rat(-1, 3));
        assert_eq!(curvature(&s, &set(&[1, 2]))[2], rat(-1, 2));
        assert!(curvature(&s, &NodeSet::full(6)).iter().all(|v| *v == r(-1)));
        assert!(curvature(&s, &NodeSet::empty(6)).iter().all(|v| *v == r(1)));
    }

    #[test]
    fn ratios_and_cheeger() {
        let s = chain6();
        assert_eq!(lambda_ratio(&s, &set(&[1, 2])).unwrap(), rat(3, 8));
        assert_eq!(lambda_ratio(&s, &set(&[1, 2, 3, 4])).unwrap(), rat(1, 27));
        assert!(lambda_ratio(&s, &NodeSet::empty(6)).is_err());
        let h = cheeger(&s, &set(&[1, 2, 3, 4])).unwrap();
        assert_eq!(h.value, rat(1, 27));
        assert_eq!(h.set, set(&[1, 2, 3, 4]));
        let h = cheeger(&s, &set(&[3, 4])).unwrap();
        assert_eq!(h.value, rat(7, 11));
        assert_eq!(h.set, set(&[3, 4]));
        assert!(is_calibrable(&s, &set(&[1, 2, 3, 4])).unwrap());
        assert!(is_calibrable(&s, &set(&[1, 2])).unwrap());
        assert!(is_calibrable(&s, &set(&[1, 4])).unwrap());
    }

    #[test]
    fn medians() {
        let s = chain6();
        let chi: Vec<Rational> = set(&[1, 2]).indicator();
        assert_eq!(median_interval(&s, &chi), (r(0), r(0)));
        assert_eq!(median_interval(&s, &vec![r(2); 6]), (r(2), r(2)));
        let mut g = EdgeWeightGraph::with_vertices(2);
        g.add_edge(0, 1, r(1));
        let two = RandomWalkSpace::from_weighted_graph(&g).unwrap();
        assert_eq!(median_interval(&two, &[r(1), r(0)]), (r(0), r(1)));
    }
}
