//! Finite random walk spaces: states, jump distributions and a reversible measure.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::NodeSet;
use crate::scalar::Scalar;

/// Symmetric pair weight `c_xy = ν_x m_x({y})` for `x < y`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair<S> {
    pub a: usize,
    pub b: usize,
    pub weight: S,
}

/// How a space was built. Carried through serialization.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub kind: String,
    #[serde(default)]
    pub notes: Vec<String>,
    #[serde(default)]
    pub params: serde_json::Value,
}

impl Provenance {
    pub fn new(kind: &str) -> Self {
        Provenance {
            kind: kind.to_string(),
            notes: Vec::new(),
            params: serde_json::Value::Null,
        }
    }
}

/// Finite state set with row-stochastic jumps and a reversible measure.
///
/// Immutable once built; every solver reads it through shared references.
#[derive(Clone, Debug)]
pub struct RandomWalkSpace<S> {
    states: Vec<String>,
    index: HashMap<String, usize>,
    jump: Vec<Vec<(usize, S)>>,
    measure: Vec<S>,
    reverse: Vec<Vec<Option<usize>>>,
    pairs: Vec<Pair<S>>,
    loops: Vec<S>,
    ergodic: bool,
    distance: Option<Vec<Vec<f64>>>,
    provenance: Provenance,
}

/// Undirected weighted graph; `w_xy = w_yx > 0`, self-loops allowed.
#[derive(Clone, Debug, Default)]
pub struct EdgeWeightGraph<S> {
    pub vertices: Vec<String>,
    pub edges: Vec<(usize, usize, S)>,
}

impl<S: Scalar> EdgeWeightGraph<S> {
    pub fn new() -> Self {
        EdgeWeightGraph {
            vertices: Vec::new(),
            edges: Vec::new(),
        }
    }

    /// Graph on vertices named `1..=n`.
    pub fn with_vertices(n: usize) -> Self {
        EdgeWeightGraph {
            vertices: (1..=n).map(|i| i.to_string()).collect(),
            edges: Vec::new(),
        }
    }

    pub fn vertex(&mut self, name: &str) -> usize {
        match self.vertices.iter().position(|v| v == name) {
            Some(i) => i,
            None => {
                self.vertices.push(name.to_string());
                self.vertices.len() - 1
            }
        }
    }

    pub fn add_edge(&mut self, x: usize, y: usize, w: S) -> &mut Self {
        self.edges.push((x, y, w));
        self
    }

    pub fn add_named_edge(&mut self, x: &str, y: &str, w: S) -> &mut Self {
        let (x, y) = (self.vertex(x), self.vertex(y));
        self.add_edge(x, y, w)
    }
}

/// Outcome of [`RandomWalkSpace::validate`].
#[derive(Clone, Debug, Serialize)]
pub struct ValidationReport {
    pub states: usize,
    pub stochasticity_residual: f64,
    pub worst_row: Option<usize>,
    pub balance_residual: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub min_measure: f64,
    pub measure_positive: bool,
    pub stochastic: bool,
    pub reversible: bool,
    pub ergodic: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.measure_positive && self.stochastic && self.reversible && self.ergodic
    }
}

/// Radial kernel profile for grid discretizations.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KernelSpec {
    #[serde(rename = "type")]
    pub kind: KernelKind,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Uniform,
    Triangle,
    Table,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum CellsPerAxis {
    Uniform(usize),
    PerAxis(Vec<usize>),
}

/// Regular grid over a box domain with a radial jump kernel.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct KernelGridConfig {
    pub domain: Vec<[f64; 2]>,
    pub cells_per_axis: CellsPerAxis,
    pub kernel: KernelSpec,
}

impl KernelSpec {
    fn profile(&self, rho: f64) -> f64 {
        let r = self.radius;
        if rho > r * (1.0 + 1e-9) {
            return 0.0;
        }
        match self.kind {
            KernelKind::Uniform => 1.0,
            KernelKind::Triangle => (1.0 - rho / r).max(0.0),
            KernelKind::Table => {
                let s = self.samples.as_deref().unwrap_or(&[]);
                let t = (rho / r).min(1.0) * (s.len() - 1) as f64;
                let i = (t.floor() as usize).min(s.len() - 2);
                let frac = t - i as f64;
                s[i] * (1.0 - frac) + s[i + 1] * frac
            }
        }
    }

    fn check(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::invalid("kernel radius must be positive"));
        }
        if self.kind == KernelKind::Table {
            let s = self
                .samples
                .as_ref()
                .ok_or_else(|| Error::invalid("table kernel needs samples"))?;
            if s.len() < 2 || s.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::invalid(
                    "table kernel needs at least two nonnegative samples",
                ));
            }
        }
        Ok(())
    }
}

impl<S: Scalar> RandomWalkSpace<S> {
    /// Builds a space from raw parts without checking stochasticity,
    /// reversibility or connectivity; use [`validate`](Self::validate).
    ///
    /// Zero entries are dropped and repeated targets are merged.
    pub fn from_parts(
        states: Vec<String>,
        jump: Vec<Vec<(usize, S)>>,
        measure: Vec<S>,
        provenance: Provenance,
    ) -> Result<Self> {
        let n = states.len();
        if n == 0 {
            return Err(Error::invalid("a space needs at least one state"));
        }
        if jump.len() != n || measure.len() != n {
            return Err(Error::invalid(format!(
                "{n} states but {} jump rows and {} measure entries",
                jump.len(),
                measure.len()
            )));
        }
        let mut index = HashMap::with_capacity(n);
        for (i, s) in states.iter().enumerate() {
            if index.insert(s.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate state `{s}`")));
            }
        }
        for (i, m) in measure.iter().enumerate() {
            if !m.positive() {
                return Err(Error::invalid(format!(
                    "measure of state `{}` must be positive",
                    states[i]
                )));
            }
        }
        let mut rows = Vec::with_capacity(n);
        for (x, row) in jump.into_iter().enumerate() {
            let mut merged: BTreeMap<usize, S> = BTreeMap::new();
            for (y, p) in row {
                if y >= n {
                    return Err(Error::invalid(format!("jump target {y} out of range")));
                }
                if p.negative() {
                    return Err(Error::invalid(format!(
                        "negative jump probability from `{}`",
                        states[x]
                    )));
                }
                let e = merged.entry(y).or_insert_with(S::zero);
                *e = e.clone() + p;
            }
            rows.push(
                merged
                    .into_iter()
                    .filter(|(_, p)| !p.is_zero())
                    .collect::<Vec<_>>(),
            );
        }
        Ok(Self::assemble(states, index, rows, measure, provenance))
    }

    fn assemble(
        states: Vec<String>,
        index: HashMap<String, usize>,
        jump: Vec<Vec<(usize, S)>>,
        measure: Vec<S>,
        provenance: Provenance,
    ) -> Self {
        let n = states.len();
        let reverse: Vec<Vec<Option<usize>>> = jump
            .iter()
            .enumerate()
            .map(|(x, row)| {
                row.iter()
                    .map(|(y, _)| jump[*y].binary_search_by_key(&x, |e| e.0).ok())
                    .collect()
            })
            .collect();
        let two = S::int(2);
        let mut pairs = Vec::new();
        let mut loops = vec![S::zero(); n];
        for x in 0..n {
            for (k, (y, p)) in jump[x].iter().enumerate() {
                let forward = measure[x].clone() * p.clone();
                if *y == x {
                    loops[x] = forward;
                } else if x < *y {
                    let weight = match reverse[x][k] {
                        Some(r) => (forward + measure[*y].clone() * jump[*y][r].1.clone()) / two.clone(),
                        None => forward / two.clone(),
                    };
                    pairs.push(Pair { a: x, b: *y, weight });
                } else if reverse[x][k].is_none() {
                    pairs.push(Pair {
                        a: *y,
                        b: x,
                        weight: forward / two.clone(),
                    });
                }
            }
        }
        pairs.sort_by_key(|p| (p.a, p.b));
        let ergodic = strongly_connected(&jump);
        RandomWalkSpace {
            states,
            index,
            jump,
            measure,
            reverse,
            pairs,
            loops,
            ergodic,
            distance: None,
            provenance,
        }
    }

    /// Graph walk `m_x = (1/d_x) Σ_y w_xy δ_y` with measure `ν_x = d_x`.
    ///
    /// Fails when the graph is disconnected; see [`graph_space`](Self::graph_space)
    /// for a constructor that only flags it.
    pub fn from_weighted_graph(g: &EdgeWeightGraph<S>) -> Result<Self> {
        let space = Self::graph_space(g)?;
        if !space.ergodic {
            return Err(Error::NotErgodic("graph is disconnected".into()));
        }
        Ok(space)
    }

    /// Like [`from_weighted_graph`](Self::from_weighted_graph) but keeps
    /// disconnected graphs, recording `ergodic = false`.
    pub fn graph_space(g: &EdgeWeightGraph<S>) -> Result<Self> {
        let n = g.vertices.len();
        let mut w: Vec<BTreeMap<usize, S>> = vec![BTreeMap::new(); n];
        for (x, y, weight) in &g.edges {
            let (x, y) = (*x, *y);
            if x >= n || y >= n {
                return Err(Error::invalid(format!("edge ({x}, {y}) out of range")));
            }
            if weight.negative() || (x != y && weight.is_zero()) {
                return Err(Error::invalid(format!(
                    "edge ({}, {}) needs a positive weight",
                    g.vertices[x], g.vertices[y]
                )));
            }
            let e = w[x].entry(y).or_insert_with(S::zero);
            *e = e.clone() + weight.clone();
            if x != y {
                let e = w[y].entry(x).or_insert_with(S::zero);
                *e = e.clone() + weight.clone();
            }
        }
        let mut jump = Vec::with_capacity(n);
        let mut measure = Vec::with_capacity(n);
        for (x, row) in w.into_iter().enumerate() {
            let d = row.values().fold(S::zero(), |a, v| a + v.clone());
            if !d.positive() {
                return Err(Error::invalid(format!(
                    "vertex `{}` has zero degree",
                    g.vertices[x]
                )));
            }
            jump.push(
                row.into_iter()
                    .map(|(y, v)| (y, v / d.clone()))
                    .collect::<Vec<_>>(),
            );
            measure.push(d);
        }
        Self::from_parts(
            g.vertices.clone(),
            jump,
            measure,
            Provenance::new("weighted_graph"),
        )
    }

    /// Markov kernel `K` with reversible measure `pi` (the stationary
    /// distribution when omitted).
    pub fn from_markov_kernel(
        states: Vec<String>,
        kernel: &[Vec<S>],
        pi: Option<Vec<S>>,
    ) -> Result<Self> {
        let n = kernel.len();
        if kernel.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("kernel must be square"));
        }
        if states.len() != n {
            return Err(Error::invalid("state count does not match kernel size"));
        }
        for (x, row) in kernel.iter().enumerate() {
            let s = row.iter().fold(S::zero(), |a, v| a + v.clone());
            if !crate::scalar::eq_tol(&s, &S::one(), &S::one()) {
                return Err(Error::invalid(format!(
                    "row `{}` sums to {s}, not 1",
                    states[x]
                )));
            }
        }
        let pi = match pi {
            Some(p) => p,
            None => stationary_distribution(kernel)?,
        };
        let jump = kernel
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, p)| !p.is_zero())
                    .map(|(y, p)| (y, p.clone()))
                    .collect()
            })
            .collect();
        let space = Self::from_parts(states, jump, pi, Provenance::new("markov_kernel"))?;
        let report = space.validate();
        if !report.reversible {
            let (x, y) = report.worst_pair.unwrap_or((0, 0));
            return Err(Error::DetailedBalance {
                x: space.states[x].clone(),
                y: space.states[y].clone(),
                residual: report.balance_residual,
            });
        }
        Ok(space)
    }

    /// Midpoint discretization of a radial kernel on a regular grid.
    ///
    /// Kernel mass landing outside the domain stays at the cell as a
    /// self-loop; the measure is the cell volume.
    pub fn from_kernel_grid(cfg: &KernelGridConfig) -> Result<Self> {
        cfg.kernel.check()?;
        let dim = cfg.domain.len();
        if dim == 0 {
            return Err(Error::invalid("kernel grid needs at least one axis"));
        }
        let counts: Vec<usize> = match &cfg.cells_per_axis {
            CellsPerAxis::Uniform(c) => vec![*c; dim],
            CellsPerAxis::PerAxis(v) => v.clone(),
        };
        if counts.len() != dim || counts.iter().any(|c| *c == 0) {
            return Err(Error::invalid("cells_per_axis must be positive per axis"));
        }
        let mut widths = Vec::with_capacity(dim);
        for (&[lo, hi], &c) in cfg.domain.iter().zip(&counts) {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(Error::invalid("domain intervals need lo < hi"));
            }
            widths.push((hi - lo) / c as f64);
        }
        let r = cfg.kernel.radius;
        let reach: Vec<i64> = widths.iter().map(|h| (r / h).floor() as i64 + 1).collect();

        let mut offsets: Vec<(Vec<i64>, f64)> = Vec::new();
        let mut k = reach.iter().map(|r| -r).collect::<Vec<_>>();
        'outer: loop {
            if k.iter().any(|v| *v != 0) {
                let rho = k
                    .iter()
                    .zip(&widths)
                    .map(|(ki, h)| (*ki as f64 * h).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let w = cfg.kernel.profile(rho);
                if w > 0.0 {
                    offsets.push((k.clone(), w));
                }
            }
            for axis in 0..dim {
                if k[axis] < reach[axis] {
                    k[axis] += 1;
                    continue 'outer;
                }
                k[axis] = -reach[axis];
            }
            break;
        }
        // average J(z) and J(-z) so the discrete kernel is exactly symmetric
        let lookup: HashMap<Vec<i64>, f64> = offsets.iter().cloned().collect();
        let sym: Vec<(Vec<i64>, S)> = offsets
            .iter()
            .map(|(k, w)| {
                let neg: Vec<i64> = k.iter().map(|v| -v).collect();
                let wn = lookup.get(&neg).copied().unwrap_or(0.0);
                (k.clone(), S::from_float(0.5 * (w + wn)))
            })
            .collect();
        let total = sym.iter().fold(S::zero(), |a, (_, w)| a + w.clone());
        if !total.positive() {
            return Err(Error::invalid(
                "kernel has zero mass on the grid (radius below cell width?)",
            ));
        }
        let probs: Vec<(Vec<i64>, S)> = sym
            .into_iter()
            .map(|(k, w)| (k, w / total.clone()))
            .collect();

        let n: usize = counts.iter().product();
        let mut states = Vec::with_capacity(n);
        let mut jump = Vec::with_capacity(n);
        let volume = S::from_float(widths.iter().product());
        for cell in 0..n {
            let coord = unflatten(cell, &counts);
            states.push(
                coord
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(":"),
            );
            let mut row = Vec::new();
            let mut out = S::zero();
            for (k, p) in &probs {
                let target: Option<Vec<usize>> = coord
                    .iter()
                    .zip(k)
                    .zip(&counts)
                    .map(|((c, d), m)| {
                        let t = *c as i64 + d;
                        (t >= 0 && t < *m as i64).then_some(t as usize)
                    })
                    .collect();
                match target {
                    Some(t) => row.push((flatten(&t, &counts), p.clone())),
                    None => out = out + p.clone(),
                }
            }
            if !out.is_zero() {
                row.push((cell, out));
            }
            jump.push(row);
        }
        let mut prov = Provenance::new("kernel_grid");
        prov.params = serde_json::to_value(cfg)?;
        let space = Self::from_parts(states, jump, vec![volume; n], prov)?;
        if !space.ergodic {
            return Err(Error::NotErgodic("kernel grid is disconnected".into()));
        }
        Ok(space)
    }

    /// ε-step walk `m_x = μ⌞B(x,ε) / μ(B(x,ε))` on a finite point set.
    ///
    /// The stored measure is `ν_x = μ_x μ(B(x,ε))`, which is reversible for
    /// these jumps; `μ` itself is only invariant when ball masses agree.
    pub fn from_epsilon_step<D>(
        ids: Vec<String>,
        masses: Vec<S>,
        eps: f64,
        metric: D,
    ) -> Result<Self>
    where
        D: Fn(usize, usize) -> f64,
    {
        let n = ids.len();
        if masses.len() != n {
            return Err(Error::invalid("one mass per point is required"));
        }
        if !(eps >= 0.0) {
            return Err(Error::invalid("eps must be nonnegative"));
        }
        if masses.iter().any(|m| !m.positive()) {
            return Err(Error::invalid("point masses must be positive"));
        }
        let mut dist = vec![vec![0.0; n]; n];
        for x in 0..n {
            for y in 0..n {
                dist[x][y] = if x == y { 0.0 } else { metric(x, y) };
            }
        }
        let mut jump = Vec::with_capacity(n);
        let mut measure = Vec::with_capacity(n);
        for x in 0..n {
            let ball: Vec<usize> = (0..n).filter(|&y| dist[x][y] <= eps).collect();
            if ball.len() <= 1 {
                return Err(Error::invalid(format!(
                    "point `{}` is isolated at eps = {eps}",
                    ids[x]
                )));
            }
            let mass = ball.iter().fold(S::zero(), |a, &y| a + masses[y].clone());
            jump.push(
                ball.iter()
                    .map(|&y| (y, masses[y].clone() / mass.clone()))
                    .collect::<Vec<_>>(),
            );
            measure.push(masses[x].clone() * mass);
        }
        let mut prov = Provenance::new("epsilon_step");
        prov.params = serde_json::json!({ "eps": eps });
        prov.notes.push(
            "reversible measure nu_x = mu_x * mu(B(x, eps)) stored in place of mu".into(),
        );
        let mut space = Self::from_parts(ids, jump, measure, prov)?;
        if !space.ergodic {
            return Err(Error::NotErgodic(
                "eps-neighbourhood graph is disconnected".into(),
            ));
        }
        space.distance = Some(dist);
        Ok(space)
    }

    /// ε-step walk on Euclidean points.
    pub fn from_point_cloud(
        ids: Vec<String>,
        coords: &[Vec<f64>],
        masses: Vec<S>,
        eps: f64,
    ) -> Result<Self> {
        if coords.len() != ids.len() {
            return Err(Error::invalid("one coordinate vector per point is required"));
        }
        Self::from_epsilon_step(ids, masses, eps, |x, y| {
            coords[x]
                .iter()
                .zip(&coords[y])
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
    }

    /// Walk restricted to `omega`: mass leaving `omega` becomes a self-loop.
    pub fn restrict(&self, omega: &NodeSet) -> Result<Self> {
        if omega.n() != self.n() {
            return Err(Error::invalid("set size does not match the space"));
        }
        let keep = omega.indices();
        if keep.is_empty() {
            return Err(Error::invalid("cannot restrict to the empty set"));
        }
        let mut new_index = vec![usize::MAX; self.n()];
        for (i, &x) in keep.iter().enumerate() {
            new_index[x] = i;
        }
        let mut jump = Vec::with_capacity(keep.len());
        for &x in &keep {
            let mut row = Vec::new();
            let mut folded = S::zero();
            for (y, p) in &self.jump[x] {
                if omega.contains(*y) {
                    row.push((new_index[*y], p.clone()));
                } else {
                    folded = folded + p.clone();
                }
            }
            if !folded.is_zero() {
                row.push((new_index[x], folded));
            }
            jump.push(row);
        }
        let states = keep.iter().map(|&x| self.states[x].clone()).collect();
        let measure = keep.iter().map(|&x| self.measure[x].clone()).collect();
        let prov = if self.provenance.kind.starts_with("restricted") {
            self.provenance.clone()
        } else {
            let mut p = self.provenance.clone();
            p.kind = format!("restricted({})", self.provenance.kind);
            p
        };
        let mut space = Self::from_parts(states, jump, measure, prov)?;
        space.distance = self.distance.as_ref().map(|d| {
            keep.iter()
                .map(|&x| keep.iter().map(|&y| d[x][y]).collect())
                .collect()
        });
        Ok(space)
    }

    /// Checks stochasticity, detailed balance and connectivity.
    pub fn validate(&self) -> ValidationReport {
        let tol = if S::EXACT { 0.0 } else { 1e-12 };
        let mut stoch = 0.0f64;
        let mut worst_row = None;
        for (x, row) in self.jump.iter().enumerate() {
            let s = row.iter().fold(S::zero(), |a, (_, p)| a + p.clone());
            let r = (s - S::one()).abs().as_f64();
            if r > stoch {
                stoch = r;
                worst_row = Some(x);
            }
        }
        let mut balance = 0.0f64;
        let mut worst_pair = None;
        for x in 0..self.n() {
            for (k, (y, p)) in self.jump[x].iter().enumerate() {
                let fwd = self.measure[x].clone() * p.clone();
                let bwd = match self.reverse[x][k] {
                    Some(r) => self.measure[*y].clone() * self.jump[*y][r].1.clone(),
                    None => S::zero(),
                };
                let r = ((fwd.clone() - bwd).abs() / (S::one() + fwd)).as_f64();
                if r > balance {
                    balance = r;
                    worst_pair = Some((x, *y));
                }
            }
        }
        let min_measure = self
            .measure
            .iter()
            .map(|m| m.as_f64())
            .fold(f64::INFINITY, f64::min);
        ValidationReport {
            states: self.n(),
            stochasticity_residual: stoch,
            worst_row,
            balance_residual: balance,
            worst_pair,
            min_measure,
            measure_positive: self.measure.iter().all(|m| m.positive()),
            stochastic: stoch <= tol,
            reversible: balance <= tol,
            ergodic: self.ergodic,
        }
    }

    /// Converts every number to another scalar type.
    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> RandomWalkSpace<T> {
        let jump = self
            .jump
            .iter()
            .map(|row| row.iter().map(|(y, p)| (*y, f(p))).collect())
            .collect();
        let measure = self.measure.iter().map(&f).collect();
        let mut space = RandomWalkSpace::assemble(
            self.states.clone(),
            self.index.clone(),
            jump,
            measure,
            self.provenance.clone(),
        );
        space.distance = self.distance.clone();
        space
    }

    pub fn to_f64(&self) -> RandomWalkSpace<f64> {
        self.map_scalar(|v| v.as_f64())
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn jump_row(&self, x: usize) -> &[(usize, S)] {
        &self.jump[x]
    }

    pub fn jump(&self) -> &[Vec<(usize, S)>] {
        &self.jump
    }

    /// `m_x({y})`, zero when absent.
    pub fn jump_prob(&self, x: usize, y: usize) -> S {
        match self.jump[x].binary_search_by_key(&y, |e| e.0) {
            Ok(k) => self.jump[x][k].1.clone(),
            Err(_) => S::zero(),
        }
    }

    /// Position of `x` inside the row of the `k`-th target of `x`.
    pub fn reverse_position(&self, x: usize, k: usize) -> Option<usize> {
        self.reverse[x][k]
    }

    pub fn measure(&self) -> &[S] {
        &self.measure
    }

    pub fn total_measure(&self) -> S {
        crate::scalar::sum(&self.measure)
    }

    /// Symmetric weights `c_xy` for `x < y`, sorted.
    pub fn pairs(&self) -> &[Pair<S>] {
        &self.pairs
    }

    /// Self-loop weights `ν_x m_x({x})`.
    pub fn loops(&self) -> &[S] {
        &self.loops
    }

    /// Degree-like weight `ν_x m_x({x}) / ν_x = m_x({x})`.
    pub fn loop_fraction(&self, x: usize) -> S {
        self.jump_prob(x, x)
    }

    pub fn is_ergodic(&self) -> bool {
        self.ergodic
    }

    pub fn distance(&self) -> Option<&Vec<Vec<f64>>> {
        self.distance.as_ref()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Error unless the space is strongly connected.
    pub fn require_ergodic(&self) -> Result<()> {
        if self.ergodic {
            Ok(())
        } else {
            Err(Error::NotErgodic(
                "the positive-jump graph is not strongly connected".into(),
            ))
        }
    }

    pub fn set_from_names<I, T>(&self, names: I) -> Result<NodeSet>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut set = NodeSet::empty(self.n());
        for name in names {
            let name = name.as_ref();
            let i = self
                .state_index(name)
                .ok_or_else(|| Error::invalid(format!("unknown state `{name}`")))?;
            set.insert(i);
        }
        Ok(set)
    }
}

fn unflatten(mut i: usize, counts: &[usize]) -> Vec<usize> {
    let mut out = vec![0; counts.len()];
    for axis in (0..counts.len()).rev() {
        out[axis] = i % counts[axis];
        i /= counts[axis];
    }
    out
}

fn flatten(c: &[usize], counts: &[usize]) -> usize {
    c.iter().zip(counts).fold(0, |acc, (ci, m)| acc * m + ci)
}

fn strongly_connected<S>(jump: &[Vec<(usize, S)>]) -> bool {
    let n = jump.len();
    if n <= 1 {
        return true;
    }
    let mut backward = vec![Vec::new(); n];
    for (x, row) in jump.iter().enumerate() {
        for (y, _) in row {
            if *y != x {
                backward[*y].push(x);
            }
        }
    }
    let forward: Vec<Vec<usize>> = jump
        .iter()
        .enumerate()
        .map(|(x, row)| row.iter().map(|e| e.0).filter(|&y| y != x).collect())
        .collect();
    reaches_all(&forward) && reaches_all(&backward)
}

fn reaches_all(adj: &[Vec<usize>]) -> bool {
    let mut seen = vec![false; adj.len()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut count = 1;
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                count += 1;
                queue.push_back(y);
            }
        }
    }
    count == adj.len()
}

/// Solves `π K = π`, `Σ π = 1` by Gaussian elimination.
fn stationary_distribution<S: Scalar>(kernel: &[Vec<S>]) -> Result<Vec<S>> {
    let n = kernel.len();
    // rows are equations: Σ_x π_x (K_xy - δ_xy) = 0 for y < n-1, and Σ π = 1
    let mut a: Vec<Vec<S>> = (0..n)
        .map(|y| {
            let mut row: Vec<S> = (0..n)
                .map(|x| {
                    let mut v = kernel[x][y].clone();
                    if x == y {
                        v = v - S::one();
                    }
                    v
                })
                .collect();
            row.push(S::zero());
            row
        })
        .collect();
    a[n - 1] = vec![S::one(); n + 1];
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                a[i][col]
                    .abs()
                    .partial_cmp(&a[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if !crate::scalar::pos_tol(&a[pivot][col].abs(), &S::one()) {
            return Err(Error::NotErgodic(
                "kernel has no unique stationary distribution".into(),
            ));
        }
        a.swap(col, pivot);
        let p = a[col][col].clone();
        for j in col..=n {
            a[col][j] = a[col][j].clone() / p.clone();
        }
        for i in 0..n {
            if i != col && !a[i][col].is_zero() {
                let factor = a[i][col].clone();
                for j in col..=n {
                    let v = a[col][j].clone() * factor.clone();
                    a[i][j] = a[i][j].clone() - v;
                }
            }
        }
    }
    let pi: Vec<S> = (0..n).map(|i| a[i][n].clone()).collect();
    if pi.iter().any(|p| !p.positive()) {
        return Err(Error::NotErgodic(
            "stationary distribution is not strictly positive".into(),
        ));
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn chain6() -> RandomWalkSpace<Rational> {
        let mut g = EdgeWeightGraph::with_vertices(6);
        for (i, w) in [5, 6, 2, 1, 3].iter().enumerate() {
            g.add_edge(i, i + 1, rat(*w, 1));
        }
        RandomWalkSpace::from_weighted_graph(&g).unwrap()
    }

    #[test]
    fn chain_measure_and_rows() {
        let s = chain6();
        let expected: Vec<Rational> = [5, 11, 8, 3, 4, 3].iter().map(|v| rat(*v, 1)).collect();
        assert_eq!(s.measure(), &expected[..]);
        assert_eq!(s.total_measure(), rat(34, 1));
        assert_eq!(s.jump_row(3), &[(2, rat(2, 3)), (4, rat(1, 3))]);
        assert!(s.validate().passed());
        for p in s.pairs() {
            assert_eq!(s.measure()[p.a].clone() * s.jump_prob(p.a, p.b), p.weight);
        }
    }

    #[test]
    fn two_node_graph() {
        let mut g = EdgeWeightGraph::with_vertices(2);
        g.add_edge(0, 1, 1.0);
        let s = RandomWalkSpace::from_weighted_graph(&g).unwrap();
        assert_eq!(s.jump_prob(0, 1), 1.0);
        assert_eq!(s.jump_prob(0, 0), 0.0);
        assert_eq!(s.measure(), &[1.0, 1.0]);
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let mut g = EdgeWeightGraph::with_vertices(6);
        for (i, w) in [5, 6, 2, 1, 3].iter().enumerate() {
            if i != 2 {
                g.add_edge(i, i + 1, rat(*w, 1));
            }
        }
        assert!(matches!(
            RandomWalkSpace::from_weighted_graph(&g),
            Err(Error::NotErgodic(_))
        ));
        let s = RandomWalkSpace::graph_space(&g).unwrap();
        let report = s.validate();
        assert!(!report.ergodic);
        assert!(report.stochastic && report.reversible);
    }

    #[test]
    fn zero_degree_vertex_is_rejected() {
        let mut g = EdgeWeightGraph::with_vertices(3);
        g.add_edge(0, 1, 1.0);
        assert!(RandomWalkSpace::graph_space(&g).is_err());
    }

    #[test]
    fn markov_kernel_constructions() {
        let names = vec!["a".to_string(), "b".to_string()];
        let k = vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]];
        let s = RandomWalkSpace::from_markov_kernel(names.clone(), &k, None).unwrap();
        assert_eq!(s.measure(), &[rat(1, 2), rat(1, 2)]);

        let bad = vec![vec![0.5, 0.5], vec![0.9, 0.1]];
        let err = RandomWalkSpace::from_markov_kernel(names, &bad, Some(vec![0.5, 0.5]));
        assert!(matches!(err, Err(Error::DetailedBalance { .. })));

        let chain = chain6();
        let dense: Vec<Vec<Rational>> = (0..6)
            .map(|x| (0..6).map(|y| chain.jump_prob(x, y)).collect())
            .collect();
        let pi: Vec<Rational> = chain.measure().iter().map(|m| m / rat(34, 1)).collect();
        let names: Vec<String> = chain.states().to_vec();
        let s = RandomWalkSpace::from_markov_kernel(names.clone(), &dense, Some(pi.clone())).unwrap();
        assert!(s.validate().passed());
        let s = RandomWalkSpace::from_markov_kernel(names, &dense, None).unwrap();
        assert_eq!(s.measure(), &pi[..]);
    }

    #[test]
    fn kernel_grid_boundary_mass() {
        let cfg = KernelGridConfig {
            domain: vec![[0.0, 1.0]],
            cells_per_axis: CellsPerAxis::Uniform(10),
            kernel: KernelSpec {
                kind: KernelKind::Uniform,
                radius: 0.25,
                samples: None,
            },
        };
        let s = RandomWalkSpace::<Rational>::from_kernel_grid(&cfg).unwrap();
        assert!(s.validate().passed());
        assert_eq!(s.jump_prob(0, 0), rat(1, 2));
        assert_eq!(s.jump_prob(1, 1), rat(1, 4));
        for x in 2..8 {
            assert_eq!(s.jump_prob(x, x), rat(0, 1));
        }
        let f = RandomWalkSpace::<f64>::from_kernel_grid(&cfg).unwrap();
        assert!(f.validate().passed());
    }

    #[test]
    fn two_cell_grid() {
        let cfg = KernelGridConfig {
            domain: vec![[0.0, 2.0]],
            cells_per_axis: CellsPerAxis::Uniform(2),
            kernel: KernelSpec {
                kind: KernelKind::Uniform,
                radius: 1.0,
                samples: None,
            },
        };
        let s = RandomWalkSpace::<Rational>::from_kernel_grid(&cfg).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                assert_eq!(s.jump_prob(x, y), rat(1, 2));
            }
        }
    }

    #[test]
    fn kernel_too_narrow() {
        let cfg = KernelGridConfig {
            domain: vec![[0.0, 1.0]],
            cells_per_axis: CellsPerAxis::Uniform(4),
            kernel: KernelSpec {
                kind: KernelKind::Triangle,
                radius: 0.1,
                samples: None,
            },
        };
        assert!(RandomWalkSpace::<f64>::from_kernel_grid(&cfg).is_err());
    }

    #[test]
    fn epsilon_step_line() {
        let ids = vec!["0".into(), "1".into(), "2".into()];
        let coords = vec![vec![0.0], vec![1.0], vec![2.0]];
        let s =
            RandomWalkSpace::from_point_cloud(ids.clone(), &coords, vec![rat(1, 1); 3], 1.0).unwrap();
        assert_eq!(s.jump_row(0), &[(0, rat(1, 2)), (1, rat(1, 2))]);
        assert_eq!(s.measure(), &[rat(2, 1), rat(3, 1), rat(2, 1)]);
        assert!(s.validate().passed());

        let wide = RandomWalkSpace::from_point_cloud(ids.clone(), &coords, vec![rat(1, 1); 3], 5.0)
            .unwrap();
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(wide.jump_prob(x, y), rat(1, 3));
            }
        }
        assert!(RandomWalkSpace::from_point_cloud(ids, &coords, vec![rat(1, 1); 3], 0.5).is_err());
    }

    #[test]
    fn restriction() {
        let s = chain6();
        let all = NodeSet::full(6);
        let same = s.restrict(&all).unwrap();
        assert_eq!(same.jump(), s.jump());
        let omega = NodeSet::from_indices(6, &[0, 1, 2]);
        let r = s.restrict(&omega).unwrap();
        assert_eq!(r.jump_prob(2, 2), rat(2, 8));
        assert_eq!(r.measure(), &[rat(5, 1), rat(11, 1), rat(8, 1)]);
        assert!(r.validate().passed());
        let rr = r.restrict(&NodeSet::full(3)).unwrap();
        assert_eq!(rr.jump(), r.jump());
        let split = s.restrict(&NodeSet::from_indices(6, &[0, 5])).unwrap();
        assert!(!split.is_ergodic());
    }

    #[test]
    fn perturbation_is_reported() {
        let s = chain6().to_f64();
        let mut jump = s.jump().to_vec();
        jump[1][0].1 += 1e-6;
        jump[1][1].1 -= 1e-6;
        let p = RandomWalkSpace::from_parts(
            s.states().to_vec(),
            jump,
            s.measure().to_vec(),
            Provenance::new("test"),
        )
        .unwrap();
        let report = p.validate();
        assert!(!report.reversible);
        assert!(report.stochastic);
        assert!(report.balance_residual > 1e-6 && report.balance_residual < 2e-6);
    }
}
