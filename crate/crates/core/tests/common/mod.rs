//! Random instances and brute-force oracles shared by the integration tests.
//!
//! The oracles work on integer weights (the graph weights times
//! [`WEIGHT_DEN`]) and never touch the solver code paths.

#![allow(dead_code)]

use mrwtv::space::EdgeWeightGraph;
use mrwtv::{rat, NodeSet, RandomWalkSpace, Rational};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Common denominator of all random rational weights.
pub const WEIGHT_DEN: i64 = 12;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Undirected weighted graph with weights stored as multiples of
/// `1/WEIGHT_DEN`; `(x, x, w)` is a loop.
#[derive(Clone, Debug)]
pub struct IntGraph {
    pub n: usize,
    pub edges: Vec<(usize, usize, i64)>,
}

impl IntGraph {
    /// `ν_x` times `WEIGHT_DEN`.
    pub fn measure(&self) -> Vec<i64> {
        let mut m = vec![0; self.n];
        for &(x, y, w) in &self.edges {
            m[x] += w;
            if x != y {
                m[y] += w;
            }
        }
        m
    }

    /// Cut weight of `mask` times `WEIGHT_DEN`.
    pub fn cut(&self, mask: u64) -> i64 {
        self.edges
            .iter()
            .filter(|(x, y, _)| (mask >> x & 1) != (mask >> y & 1))
            .map(|e| e.2)
            .sum()
    }

    pub fn loop_weight(&self, x: usize) -> i64 {
        self.edges
            .iter()
            .filter(|(a, b, _)| *a == x && *b == x)
            .map(|e| e.2)
            .sum()
    }

    pub fn graph<S: mrwtv::Scalar>(&self) -> EdgeWeightGraph<S> {
        let mut g = EdgeWeightGraph::with_vertices(self.n);
        for &(x, y, w) in &self.edges {
            g.add_edge(x, y, S::ratio(w, WEIGHT_DEN));
        }
        g
    }

    pub fn space(&self) -> RandomWalkSpace<Rational> {
        RandomWalkSpace::from_weighted_graph(&self.graph()).unwrap()
    }

    pub fn space_f64(&self) -> RandomWalkSpace<f64> {
        RandomWalkSpace::from_weighted_graph(&self.graph()).unwrap()
    }
}

fn random_weight(r: &mut impl Rng) -> i64 {
    let den = *[1i64, 2, 3, 4, 6, 12].choose(r).unwrap();
    r.gen_range(1..=9i64) * (WEIGHT_DEN / den)
}

/// Connected graph: a random spanning tree plus extra edges with
/// probability `density`, weights in `{1/12, …, 9}`; loops with probability
/// `loops`.
pub fn random_graph(r: &mut impl Rng, n: usize, density: f64, loops: f64) -> IntGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(r);
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    for i in 1..n {
        let a = order[i];
        let b = order[r.gen_range(0..i)];
        present[a][b] = true;
        present[b][a] = true;
        edges.push((a.min(b), a.max(b), random_weight(r)));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !present[a][b] && r.gen_bool(density) {
                edges.push((a, b, random_weight(r)));
            }
        }
        if r.gen_bool(loops) {
            edges.push((a, a, random_weight(r)));
        }
    }
    IntGraph { n, edges }
}

pub fn random_set(r: &mut impl Rng, n: usize) -> NodeSet {
    NodeSet::from_mask((0..n).map(|_| r.gen_bool(0.5)).collect())
}

/// Nonempty proper subset.
pub fn random_proper_set(r: &mut impl Rng, n: usize) -> NodeSet {
    loop {
        let s = random_set(r, n);
        if !s.is_empty() && !s.is_full() {
            return s;
        }
    }
}

pub fn mask_of(s: &NodeSet) -> u64 {
    s.indices().iter().fold(0, |m, i| m | 1 << i)
}

pub fn set_of(n: usize, mask: u64) -> NodeSet {
    NodeSet::from_bits(n, mask)
}

/// Geometric energy `P(A) + (p/q) ν(A △ F)` times `q · WEIGHT_DEN`.
pub fn geometric_energy_scaled(g: &IntGraph, nu: &[i64], a: u64, f: u64, p: i64, q: i64) -> i128 {
    let diff = a ^ f;
    let m: i64 = (0..g.n).filter(|x| diff >> x & 1 == 1).map(|x| nu[x]).sum();
    q as i128 * g.cut(a) as i128 + p as i128 * m as i128
}

/// Brute-force minimizers of the geometric problem with `λ = p/q`.
pub struct BruteGeometric {
    pub energy: Rational,
    /// Intersection of all minimizers.
    pub minimal: NodeSet,
    /// Union of all minimizers.
    pub maximal: NodeSet,
    pub count: usize,
}

pub fn brute_geometric(g: &IntGraph, f: &NodeSet, p: i64, q: i64) -> BruteGeometric {
    let nu = g.measure();
    let fm = mask_of(f);
    let mut best = i128::MAX;
    let (mut and, mut or, mut count) = (0u64, 0u64, 0usize);
    for a in 0..1u64 << g.n {
        let e = geometric_energy_scaled(g, &nu, a, fm, p, q);
        if e < best {
            best = e;
            and = a;
            or = a;
            count = 1;
        } else if e == best {
            and &= a;
            or |= a;
            count += 1;
        }
    }
    BruteGeometric {
        energy: Rational::new((best as i64).into(), (q * WEIGHT_DEN).into()),
        minimal: set_of(g.n, and),
        maximal: set_of(g.n, or),
        count,
    }
}

/// L¹ energy `TV(u) + (p/q) ∫|u − f| dν` times `q · WEIGHT_DEN` for integer
/// valued `u`, `f`.
pub fn l1_energy_scaled(g: &IntGraph, nu: &[i64], u: &[i64], f: &[i64], p: i64, q: i64) -> i128 {
    let tv: i128 = g
        .edges
        .iter()
        .map(|&(x, y, w)| w as i128 * (u[x] - u[y]).abs() as i128)
        .sum();
    let fid: i128 = (0..g.n)
        .map(|x| nu[x] as i128 * (u[x] - f[x]).abs() as i128)
        .sum();
    q as i128 * tv + p as i128 * fid
}

/// Minimum L¹ energy over all functions with values among those of `f`,
/// which contains a global minimizer; also returns every minimizer found.
pub fn brute_l1(g: &IntGraph, f: &[i64], p: i64, q: i64) -> (i128, Vec<Vec<i64>>) {
    let nu = g.measure();
    let mut values: Vec<i64> = f.to_vec();
    values.sort();
    values.dedup();
    let k = values.len();
    let total = k.pow(g.n as u32);
    let mut best = i128::MAX;
    let mut argmins = Vec::new();
    let mut u = vec![0i64; g.n];
    for code in 0..total {
        let mut c = code;
        for slot in u.iter_mut() {
            *slot = values[c % k];
            c /= k;
        }
        let e = l1_energy_scaled(g, &nu, &u, f, p, q);
        if e < best {
            best = e;
            argmins.clear();
            argmins.push(u.clone());
        } else if e == best {
            argmins.push(u.clone());
        }
    }
    (best, argmins)
}

/// `λ(Ω) = max over A ≠ Ω of (P(Ω) − P(A)) / ν(A △ Ω)`.
pub fn brute_lambda_omega(g: &IntGraph, omega: &NodeSet) -> Rational {
    let nu = g.measure();
    let om = mask_of(omega);
    let p_omega = g.cut(om);
    let mut best: Option<Rational> = None;
    for a in 0..1u64 << g.n {
        if a == om {
            continue;
        }
        let diff = a ^ om;
        let m: i64 = (0..g.n).filter(|x| diff >> x & 1 == 1).map(|x| nu[x]).sum();
        let v = Rational::new((p_omega - g.cut(a)).into(), m.into());
        if best.as_ref().map_or(true, |b| v > *b) {
            best = Some(v);
        }
    }
    best.unwrap()
}

/// `h₁(Ω) = min over nonempty E ⊆ Ω of P(E)/ν(E)`.
pub fn brute_cheeger(g: &IntGraph, omega: &NodeSet) -> Rational {
    let nu = g.measure();
    let om = mask_of(omega);
    let mut best: Option<Rational> = None;
    for e in 1..1u64 << g.n {
        if e & !om != 0 {
            continue;
        }
        let m: i64 = (0..g.n).filter(|x| e >> x & 1 == 1).map(|x| nu[x]).sum();
        let v = Rational::new(g.cut(e).into(), m.into());
        if best.as_ref().map_or(true, |b| v < *b) {
            best = Some(v);
        }
    }
    best.unwrap()
}

/// Random positive rational `p/q` with `p/q ∈ (0, max]`.
pub fn random_lambda(r: &mut impl Rng, max: i64) -> (i64, i64) {
    let q = r.gen_range(1..=12i64);
    let p = r.gen_range(1..=max * q);
    (p, q)
}

pub fn ratio(p: i64, q: i64) -> Rational {
    rat(p, q)
}

/// `ν`-weighted `‖u‖_q` for `q ∈ {1, 2, ∞}` (`q = 0` stands for `∞`).
pub fn lq_norm(nu: &[f64], u: &[f64], q: u32) -> f64 {
    match q {
        0 => u.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        1 => u.iter().zip(nu).map(|(v, m)| v.abs() * m).sum(),
        _ => u.iter().zip(nu).map(|(v, m)| v * v * m).sum::<f64>().sqrt(),
    }
}

pub fn positive_part(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| (a - b).max(0.0)).collect()
}

pub fn difference(u: &[f64], v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}
