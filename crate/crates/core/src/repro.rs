//! Built-in worked examples with their known values: the six-state weighted
//! chain and the merge of two rectangles on a lattice.

use serde::Serialize;

use crate::certificate::check_l1_witness;
use crate::decompose_l1::solve_l1_with;
use crate::error::Result;
use crate::geometry::{curvature, measure_of, perimeter, EdgeField, NodeSet};
use crate::mincut::{geometric_energy, solve_geometric};
use crate::scalar::{rat, Rational};
use crate::space::{EdgeWeightGraph, Provenance, RandomWalkSpace};
use crate::thresholds::{minimizer_interval_bounds, minimizer_thresholds, scale_space};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReproReport {
    pub example: String,
    /// `(λ range, minimizer set)` rows of the scale-space table.
    pub table: Vec<(String, String)>,
    pub checks: Vec<Check>,
}

impl ReproReport {
    fn new(example: &str) -> Self {
        ReproReport {
            example: example.to_string(),
            table: Vec::new(),
            checks: Vec::new(),
        }
    }

    fn check(&mut self, name: impl Into<String>, expected: impl ToString, actual: impl ToString) {
        let (expected, actual) = (expected.to_string(), actual.to_string());
        self.checks.push(Check {
            name: name.into(),
            pass: expected == actual,
            expected,
            actual,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.pass).count()
    }

    /// Plain-text rendering with one line per table row and per check.
    pub fn render(&self) -> String {
        let mut out = format!("{}\n", self.example);
        if !self.table.is_empty() {
            out.push_str("  lambda                 minimizers of the L1 problem\n");
            for (range, sets) in &self.table {
                out.push_str(&format!("  {range:<22} {sets}\n"));
            }
        }
        for c in &self.checks {
            let mark = if c.pass { "ok  " } else { "FAIL" };
            if c.pass {
                out.push_str(&format!("  [{mark}] {} = {}\n", c.name, c.actual));
            } else {
                out.push_str(&format!(
                    "  [{mark}] {}: expected {}, got {}\n",
                    c.name, c.expected, c.actual
                ));
            }
        }
        if self.passed() {
            out.push_str("ALL CHECKS PASS\n");
        } else {
            out.push_str(&format!("{} CHECK(S) FAILED\n", self.failures()));
        }
        out
    }
}

/// Path `1 - 2 - … - 6` with weights 5, 6, 2, 1, 3 and an optional loop at
/// state 4.
pub fn chain6(loop_at_4: Option<Rational>) -> Result<RandomWalkSpace<Rational>> {
    let mut g = EdgeWeightGraph::with_vertices(6);
    for (i, w) in [5, 6, 2, 1, 3].into_iter().enumerate() {
        g.add_edge(i, i + 1, rat(w, 1));
    }
    if let Some(alpha) = loop_at_4 {
        g.add_edge(3, 3, alpha);
    }
    RandomWalkSpace::from_weighted_graph(&g)
}

fn set_str(space: &RandomWalkSpace<Rational>, s: &NodeSet) -> String {
    format!("{{{}}}", s.names(space).join(","))
}

fn fn_str(u: &[Rational]) -> String {
    let parts: Vec<String> = u.iter().map(|v| v.to_string()).collect();
    format!("({})", parts.join(","))
}

fn chain_field(space: &RandomWalkSpace<Rational>, g: &[Rational]) -> EdgeField<Rational> {
    EdgeField::from_fn(space, |x, y| {
        if y == x + 1 {
            g[x].clone()
        } else if x == y + 1 {
            -g[y].clone()
        } else {
            rat(0, 1)
        }
    })
}

fn rats(v: &[(i64, i64)]) -> Vec<Rational> {
    v.iter().map(|(a, b)| rat(*a, *b)).collect()
}

/// The full chain example: the piecewise table of minimizers for datum
/// `χ_{1,2}`, the thresholding parameters, explicit certificates and the
/// curvature bound.
pub fn chain6_report() -> Result<ReproReport> {
    chain6_report_for(&chain6(None)?)
}

/// Runs the chain checks against an arbitrary six-state space; any change to
/// the chain shows up as failed checks.
pub fn chain6_report_for(s: &RandomWalkSpace<Rational>) -> Result<ReproReport> {
    if s.n() != 6 {
        return Err(crate::error::Error::invalid("the chain example has six states"));
    }
    let mut r = ReproReport::new("six-state chain, datum chi_{1,2}");
    let set = |idx: &[usize]| NodeSet::from_indices(6, idx);
    let omega = set(&[0, 1]);
    let f: Vec<Rational> = omega.indicator();

    r.check("measure", "(5,11,8,3,4,3)", fn_str(s.measure()));
    r.check("P(Omega)", "6", perimeter(s, &omega));

    let pieces = [
        ("(0, 1/5)", rat(1, 10), set(&[])),
        ("(1/5, 1/3)", rat(1, 4), set(&[0, 1, 2, 3])),
        ("(1/3, 1/2)", rat(2, 5), set(&[0, 1, 2])),
        ("(1/2, inf)", rat(1, 1), set(&[0, 1])),
    ];
    for (range, lambda, expected) in &pieces {
        let sol = solve_l1_with(s, &f, lambda, true)?;
        let actual = if sol.unique {
            format!("chi{}", set_str(s, &NodeSet::superlevel(&sol.u, &rat(1, 2))))
        } else {
            format!("not unique: {} .. {}", fn_str(&sol.minimal_u), fn_str(&sol.maximal_u))
        };
        r.table.push((range.to_string(), actual.clone()));
        r.check(
            format!("minimizer at lambda={lambda}"),
            format!("chi{}", set_str(s, expected)),
            actual,
        );
        let cert = sol.certificate.map(|c| c.feasible).unwrap_or(false);
        r.check(format!("certificate found at lambda={lambda}"), true, cert);
    }
    let boundaries = [
        ("1/5", rat(1, 5), set(&[]), set(&[0, 1, 2, 3])),
        ("1/3", rat(1, 3), set(&[0, 1, 2]), set(&[0, 1, 2, 3])),
        ("1/2", rat(1, 2), set(&[0, 1]), set(&[0, 1, 2])),
    ];
    for (label, lambda, lo, hi) in &boundaries {
        let sol = solve_l1_with(s, &f, lambda, false)?;
        let desc = format!(
            "segment chi{} .. chi{}",
            set_str(s, lo),
            set_str(s, hi)
        );
        let actual = format!(
            "segment chi{} .. chi{}",
            set_str(s, &NodeSet::superlevel(&sol.minimal_u, &rat(1, 2))),
            set_str(s, &NodeSet::superlevel(&sol.maximal_u, &rat(1, 2)))
        );
        r.table.push((label.to_string(), actual.clone()));
        r.check(format!("extreme minimizers at lambda={label}"), desc, actual);
    }

    let lines = [
        (set(&[0, 1]), "6"),
        (set(&[0, 1, 2]), "2 + 8 lambda"),
        (set(&[0, 1, 2, 3]), "1 + 11 lambda"),
        (set(&[]), "16 lambda"),
    ];
    for (e, expected) in &lines {
        let p = perimeter(s, e);
        let d = measure_of(s, &e.symmetric_difference(&omega));
        let actual = match (p.to_string().as_str(), d.to_string().as_str()) {
            (p, "0") => p.to_string(),
            ("0", d) => format!("{d} lambda"),
            (p, d) => format!("{p} + {d} lambda"),
        };
        r.check(format!("energy of chi{}", set_str(s, e)), expected, actual);
    }

    let th = minimizer_thresholds(s, &omega)?;
    r.check("lambda_Omega (P/nu)", "3/8", &th.lambda_ratio);
    r.check("lambda(Omega)", "1/2", &th.lambda_omega.value);
    r.check("lambda(Omega) witness", "{1,2,3}", set_str(s, &th.lambda_omega.witness));
    r.check("lambda0(Omega)", "1/5", &th.lambda0.value);
    r.check("lambda0(Omega) witness", "{1,2,3,4}", set_str(s, &th.lambda0.witness));
    r.check("lambda*(Omega)", "3/4", &th.lambda_star);
    r.check("eigenpair", false, th.eigenpair);
    let transitions: Vec<String> = th.scale_space.iter().map(|t| t.lambda.to_string()).collect();
    r.check("scale-space transitions", "1/5, 1/3, 1/2", transitions.join(", "));

    let b = minimizer_interval_bounds(s, &omega, &set(&[0, 1, 2, 3]))?;
    r.check(
        "interval of chi{1,2,3,4}",
        "[1/5, 1/3]",
        format!("[{}, {}]", opt(&b.lower), opt(&b.upper)),
    );
    let b = minimizer_interval_bounds(s, &omega, &set(&[0, 1, 2]))?;
    r.check(
        "interval of chi{1,2,3}",
        "[1/3, 1/2]",
        format!("[{}, {}]", opt(&b.lower), opt(&b.upper)),
    );

    let witnesses = [
        (
            rat(1, 2),
            set(&[0, 1]),
            rats(&[(-1, 10), (-1, 1), (-1, 1), (-1, 2), (0, 1)]),
            rats(&[(-1, 5), (-1, 1), (1, 1), (1, 1), (1, 4), (0, 1)]),
        ),
        (
            rat(1, 3),
            set(&[0, 1, 2]),
            rats(&[(-1, 5), (-7, 9), (-1, 1), (-1, 1), (0, 1)]),
            rats(&[(-3, 5), (-1, 1), (1, 1), (1, 1), (3, 4), (0, 1)]),
        ),
        (
            rat(1, 5),
            set(&[0, 1, 2, 3]),
            rats(&[(-1, 5), (-8, 15), (-4, 5), (-1, 1), (-1, 15)]),
            rats(&[(-1, 1), (-1, 1), (1, 1), (1, 1), (1, 1), (1, 3)]),
        ),
    ];
    for (lambda, u_set, g, xi) in &witnesses {
        let u: Vec<Rational> = u_set.indicator();
        let check = check_l1_witness(s, &u, &f, lambda, &chain_field(s, g), xi)?;
        r.check(
            format!("explicit certificate for chi{} at lambda={lambda}", set_str(s, u_set)),
            "valid",
            if check.ok {
                "valid".to_string()
            } else {
                check.violations.join("; ")
            },
        );
    }

    let h = curvature(s, &set(&[0, 1, 2, 3]));
    r.check("H of {1,2,3,4} at state 4", "-1/3", &h[3]);
    Ok(r)
}

fn opt(v: &Option<Rational>) -> String {
    v.as_ref().map_or("inf".to_string(), |x| x.to_string())
}

/// The chain with a loop of weight `alpha` at state 4: `{1,2,3,4}` can only
/// minimize for `λ ≤ 1/(3+α)`. Probes `λ` on a grid of the given step up to 1.
pub fn chain6_loop_report(alpha: &Rational, step: &Rational) -> Result<ReproReport> {
    let s = chain6(Some(alpha.clone()))?;
    let mut r = ReproReport::new(&format!("six-state chain with loop {alpha} at state 4"));
    let omega = NodeSet::from_indices(6, &[0, 1]);
    let e = NodeSet::from_indices(6, &[0, 1, 2, 3]);
    let bound = rat(1, 1) / (rat(3, 1) + alpha.clone());
    let h = curvature(&s, &e)[3].clone();
    let loop_term = s.loop_fraction(3);
    r.check("-H(4) - loop fraction", &bound, -h - loop_term);
    let mut offending = Vec::new();
    let mut lambda = step.clone();
    while lambda <= rat(1, 1) {
        if lambda > bound {
            let sol = solve_geometric(&s, &omega, &lambda)?;
            let energy = geometric_energy(&s, &e, &omega, &lambda);
            if energy == sol.energy {
                offending.push(lambda.to_string());
            }
        }
        lambda = lambda + step.clone();
    }
    r.check(
        format!("lambda > {bound} where chi{{1,2,3,4}} still minimizes"),
        "none",
        if offending.is_empty() {
            "none".to_string()
        } else {
            offending.join(", ")
        },
    );
    Ok(r)
}

/// Lattice box of `width × height` cells with unit weights between
/// horizontal and vertical neighbours; the weight a boundary cell loses to
/// the outside is put on its loop, so every cell has measure 4.
pub fn lattice_box(width: usize, height: usize) -> Result<RandomWalkSpace<Rational>> {
    let mut g = EdgeWeightGraph::new();
    let name = |x: usize, y: usize| format!("{x}:{y}");
    for y in 0..height {
        for x in 0..width {
            g.vertex(&name(x, y));
        }
    }
    let id = |x: usize, y: usize| y * width + x;
    for y in 0..height {
        for x in 0..width {
            let mut inside = 0;
            if x + 1 < width {
                g.add_edge(id(x, y), id(x + 1, y), rat(1, 1));
            }
            if y + 1 < height {
                g.add_edge(id(x, y), id(x, y + 1), rat(1, 1));
            }
            inside += usize::from(x > 0) + usize::from(x + 1 < width);
            inside += usize::from(y > 0) + usize::from(y + 1 < height);
            if inside < 4 {
                g.add_edge(id(x, y), id(x, y), rat(4 - inside as i64, 1));
            }
        }
    }
    let mut space = RandomWalkSpace::from_weighted_graph(&g)?;
    let mut prov = Provenance::new("lattice");
    prov.params = serde_json::json!({ "width": width, "height": height });
    space = space.with_provenance(prov);
    Ok(space)
}

/// Two `5 × 2` rectangles one row apart, in a box with `margin` free cells
/// on every side. For `1/3 < λ < 2/5` the minimizer is the `5 × 5` square
/// that merges them.
pub fn lattice_merge_report(margin: usize) -> Result<ReproReport> {
    let (w, h) = (5 + 2 * margin, 5 + 2 * margin);
    let s = lattice_box(w, h)?;
    let n = s.n();
    let id = |x: usize, y: usize| (y + margin) * w + x + margin;
    let mut omega = NodeSet::empty(n);
    let mut merged = NodeSet::empty(n);
    for y in 0..5 {
        for x in 0..5 {
            merged.insert(id(x, y));
            if y != 2 {
                omega.insert(id(x, y));
            }
        }
    }
    let mut r = ReproReport::new(&format!(
        "two rectangles on a {w}x{h} lattice box, datum chi_Omega"
    ));
    let lambda_probe = rat(7, 20);
    let e_omega = geometric_energy(&s, &omega, &omega, &lambda_probe);
    let e_merged = geometric_energy(&s, &merged, &omega, &lambda_probe);
    let e_empty = geometric_energy(&s, &NodeSet::empty(n), &omega, &lambda_probe);
    r.check("energy of chi_Omega", "28", e_omega);
    r.check(
        "energy of the merged square at lambda=7/20",
        (rat(20, 1) + rat(20, 1) * lambda_probe.clone()).to_string(),
        e_merged,
    );
    r.check(
        "energy of 0 at lambda=7/20",
        (rat(80, 1) * lambda_probe.clone()).to_string(),
        e_empty,
    );
    let describe = |set: &NodeSet| -> String {
        if *set == omega {
            "Omega".into()
        } else if *set == merged {
            "merged square".into()
        } else if set.is_empty() {
            "empty".into()
        } else {
            format!("{} cells", set.count())
        }
    };
    let transitions = scale_space(&s, &omega)?;
    let mut prev = rat(0, 1);
    for t in &transitions {
        r.table.push((format!("({prev}, {})", t.lambda), describe(&t.below)));
        prev = t.lambda.clone();
    }
    if let Some(last) = transitions.last() {
        r.table.push((format!("({prev}, inf)"), describe(&last.above)));
    }
    r.check("components of Omega", 2, components(&s, &omega));
    let listed: Vec<String> = transitions.iter().map(|t| t.lambda.to_string()).collect();
    r.check("scale-space transitions", "1/3, 2/5", listed.join(", "));
    for lambda in [rat(17, 50), rat(3, 8), rat(39, 100)] {
        let sol = solve_geometric(&s, &omega, &lambda)?;
        r.check(
            format!("components of the minimizer at lambda={lambda}"),
            1,
            components(&s, &sol.minimal),
        );
        r.check(
            format!("minimizer at lambda={lambda}"),
            "merged square (unique)",
            format!(
                "{}{}",
                describe(&sol.minimal),
                if sol.unique { " (unique)" } else { " (not unique)" }
            ),
        );
    }
    Ok(r)
}

/// Connected components of the subgraph induced by `set`.
pub fn components<S: crate::scalar::Scalar>(space: &RandomWalkSpace<S>, set: &NodeSet) -> usize {
    let mut seen = vec![false; space.n()];
    let mut count = 0;
    for start in set.indices() {
        if seen[start] {
            continue;
        }
        count += 1;
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for (y, _) in space.jump_row(x) {
                if set.contains(*y) && !seen[*y] {
                    seen[*y] = true;
                    stack.push(*y);
                }
            }
        }
    }
    count
}
