//! Decision and optimization front-ends.
//!
//! Every YES outcome carries a witness that is L-free, has the requested
//! size and satisfies any containment constraint.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::bounds::{construct_large_lfree, lambda_of, three_term_shape};
use crate::equation::LinearEquation;
use crate::error::{precondition, Error, Result};
use crate::hypergraph::{to_hitting_set_instance, CancelToken, HittingSetSearch, Hypergraph, SearchStats};
use crate::setcore::IntegerSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    HittingSet,
    FptThreshold,
    TwoVariable,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::HittingSet => "hitting-set",
            Method::FptThreshold => "fpt-threshold",
            Method::TwoVariable => "two-variable",
            Method::BruteForce => "brute-force",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub answer: bool,
    pub witness: Option<IntegerSet>,
    pub method: Method,
    pub stats: SearchStats,
}

impl SolveOutcome {
    fn no(method: Method, stats: SearchStats) -> Self {
        Self { answer: false, witness: None, method, stats }
    }

    fn yes(witness: IntegerSet, method: Method, stats: SearchStats) -> Self {
        Self { answer: true, witness: Some(witness), method, stats }
    }
}

/// Largest L-free subset with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaxOutcome {
    pub size: usize,
    pub witness: IntegerSet,
    pub stats: SearchStats,
}

/// Solver entry points sharing an optional cancellation token.
#[derive(Debug, Clone, Default)]
pub struct Solver {
    cancel: Option<CancelToken>,
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_cancel(token: CancelToken) -> Self {
        Self { cancel: Some(token) }
    }

    fn search<'a>(&self, h: &'a Hypergraph) -> HittingSetSearch<'a> {
        match &self.cancel {
            Some(t) => HittingSetSearch::new(h).with_cancel(t.clone()),
            None => HittingSetSearch::new(h),
        }
    }

    fn check_cancel(&self) -> Result<()> {
        match &self.cancel {
            Some(t) if t.is_cancelled() => Err(Error::Cancelled),
            _ => Ok(()),
        }
    }

    /// Is there an L-free subset of exactly `k` elements? Decided as a
    /// hitting set of size `|A| - k` in the solution hypergraph.
    pub fn decide(&self, eq: &LinearEquation, a: &IntegerSet, k: usize) -> Result<SolveOutcome> {
        if k > a.len() {
            return precondition(format!("k = {k} exceeds |A| = {}", a.len()));
        }
        let (h, map) = to_hitting_set_instance(eq, a);
        let mut search = self.search(&h);
        let found = search.decide(a.len() - k)?;
        let stats = search.stats();
        Ok(match found {
            Some(hit) => SolveOutcome::yes(map.complement_of(&hit), Method::HittingSet, stats),
            None => SolveOutcome::no(Method::HittingSet, stats),
        })
    }

    /// Maximum L-free subset: the smallest `s` admitting a hitting set.
    pub fn max_lfree(&self, eq: &LinearEquation, a: &IntegerSet) -> Result<MaxOutcome> {
        let (h, map) = to_hitting_set_instance(eq, a);
        let mut search = self.search(&h);
        for s in 0..=a.len() {
            if let Some(hit) = search.decide(s)? {
                return Ok(MaxOutcome { size: a.len() - s, witness: map.complement_of(&hit), stats: search.stats() });
            }
        }
        Err(Error::Internal("the full vertex set is always a hitting set".into()))
    }

    /// Threshold algorithm parameterized by `k`: above `k/λ` nonzero
    /// elements the answer is YES, below the subsets are searched
    /// exhaustively.
    pub fn decide_fpt_by_k(&self, eq: &LinearEquation, a: &IntegerSet, k: usize) -> Result<SolveOutcome> {
        let bounds = lambda_of(eq)?;
        let nonzero = a.without_zero();
        if k == 0 {
            return Ok(SolveOutcome::yes(IntegerSet::empty(), Method::FptThreshold, SearchStats::default()));
        }
        let size = BigRational::from_integer(BigInt::from(nonzero.len()));
        if size * &bounds.lambda <= BigRational::from_integer(BigInt::from(k)) {
            return self.exhaustive(eq, &nonzero, &IntegerSet::empty(), k);
        }
        let large = construct_large_lfree(eq, &nonzero, None)?;
        if large.len() < k {
            return Err(Error::Internal(format!("extractor returned {} < k = {k} elements", large.len())));
        }
        Ok(SolveOutcome::yes(large.take(k), Method::FptThreshold, SearchStats::default()))
    }

    /// Exhaustive search for a `k`-subset of `a` that contains `required`
    /// and is L-free. Vertices are tried in ascending order; a branch is cut
    /// as soon as it completes a solution support.
    fn exhaustive(
        &self,
        eq: &LinearEquation,
        a: &IntegerSet,
        required: &IntegerSet,
        k: usize,
    ) -> Result<SolveOutcome> {
        let (h, map) = to_hitting_set_instance(eq, a);
        let req = map.vertices_of(required)?;
        let mut dfs = SubsetDfs::new(&h, self)?;
        let found = dfs.find(k, &req)?;
        let stats = SearchStats { nodes: dfs.nodes };
        Ok(match found {
            Some(vs) => SolveOutcome::yes(map.set_of(&vs), Method::BruteForce, stats),
            None => SolveOutcome::no(Method::BruteForce, stats),
        })
    }

    /// Two-variable equations: the solution graph is a disjoint union of
    /// paths, cycles, loops and isolated vertices, whose maximum independent
    /// sets are read off per component.
    pub fn decide_two_variable(&self, eq: &LinearEquation, a: &IntegerSet, k: usize) -> Result<SolveOutcome> {
        let best = two_variable_max(eq, a)?;
        if k > best.len() {
            return Ok(SolveOutcome::no(Method::TwoVariable, SearchStats::default()));
        }
        Ok(SolveOutcome::yes(best.take(k), Method::TwoVariable, SearchStats::default()))
    }

    /// Is there an L-free subset with at least `ceil(ε|A|)` elements?
    pub fn decide_epsilon(&self, eq: &LinearEquation, a: &IntegerSet, epsilon: &BigRational) -> Result<SolveOutcome> {
        if a.contains(&BigInt::zero()) {
            return precondition("the input set must not contain 0");
        }
        if !epsilon.is_positive() || *epsilon >= BigRational::from_integer(1.into()) {
            return precondition(format!("ε = {epsilon} must lie strictly between 0 and 1"));
        }
        let k = (epsilon * BigRational::from_integer(BigInt::from(a.len()))).ceil().to_integer();
        let k: usize = k.try_into().map_err(|_| Error::Internal("ceil(ε|A|) overflow".into()))?;
        if a.is_empty() {
            return Ok(SolveOutcome::yes(IntegerSet::empty(), Method::FptThreshold, SearchStats::default()));
        }
        if let Ok(bounds) = lambda_of(eq) {
            if *epsilon <= bounds.lambda {
                let large = construct_large_lfree(eq, a, None)?;
                return Ok(SolveOutcome::yes(large.take(k), Method::FptThreshold, SearchStats::default()));
            }
        }
        self.decide(eq, a, k)
    }

    /// L-free `k`-subset of `a` containing `b`, via hitting sets of size
    /// `|A| - k` that avoid the vertices of `b`.
    pub fn decide_extension(&self, eq: &LinearEquation, a: &IntegerSet, b: &IntegerSet, k: usize) -> Result<SolveOutcome> {
        if !b.is_subset(a) {
            return precondition("B is not a subset of A");
        }
        if k > a.len() || k < b.len() || !eq.is_l_free(b) {
            return Ok(SolveOutcome::no(Method::HittingSet, SearchStats::default()));
        }
        let (h, map) = to_hitting_set_instance(eq, a);
        let forbidden = map.vertices_of(b)?;
        let mut search = self.search(&h);
        let mut found = None;
        search.for_each(a.len() - k, &forbidden, |hit| {
            found = Some(hit.to_vec());
            ControlFlow::Break(())
        })?;
        let stats = search.stats();
        Ok(match found {
            Some(hit) => SolveOutcome::yes(map.complement_of(&hit), Method::HittingSet, stats),
            None => SolveOutcome::no(Method::HittingSet, stats),
        })
    }

    /// Extension parameterized by `k` for `a1*x + a2*y = b*z` with
    /// `a1 + a2 != b`.
    ///
    /// Elements that form a solution with `B` are discarded first. Above the
    /// threshold `((6|B|+1)/λ)(k - |B|) + |B|` the answer is YES: a greedy set
    /// `C` whose solutions avoid `B` entirely has more than `(k - |B|)/λ`
    /// elements, and its large L-free subset completes `B`.
    pub fn extension_fpt_by_k(&self, eq: &LinearEquation, a: &IntegerSet, b: &IntegerSet, k: usize) -> Result<SolveOutcome> {
        let (ca, cb, cc) = three_term_shape(eq)?;
        if &ca + &cb == cc {
            return precondition("extension_fpt_by_k needs a1 + a2 != b");
        }
        let bounds = lambda_of(eq)?;
        if !b.is_subset(a) {
            return precondition("B is not a subset of A");
        }
        let none = SearchStats::default();
        if k < b.len() || k > a.len() || !eq.is_l_free(b) {
            return Ok(SolveOutcome::no(Method::FptThreshold, none));
        }
        let mut a1: Vec<BigInt> = Vec::new();
        for x in a.difference(b).iter() {
            self.check_cancel()?;
            if !x.is_zero() && eq.is_l_free(&b.with(x.clone())) {
                a1.push(x.clone());
            }
        }
        let a1 = IntegerSet::from_sorted_unchecked(a1).union(b);

        let extra = BigInt::from(k - b.len());
        let threshold = BigRational::from_integer(BigInt::from(6 * b.len() + 1)) / &bounds.lambda
            * BigRational::from_integer(extra)
            + BigRational::from_integer(BigInt::from(b.len()));
        if BigRational::from_integer(BigInt::from(a1.len())) < threshold {
            let mut out = self.exhaustive(eq, &a1, b, k)?;
            out.method = Method::BruteForce;
            return Ok(out);
        }
        if k == b.len() {
            return Ok(SolveOutcome::yes(b.clone(), Method::FptThreshold, none));
        }

        let c = greedy_avoiding_b(eq, &a1.difference(b), b);
        let large = construct_large_lfree(eq, &c, None)?;
        if large.len() < k - b.len() {
            return Err(Error::Internal(format!(
                "greedy set of {} elements gave only {} L-free elements",
                c.len(),
                large.len()
            )));
        }
        let witness = b.union(&large.take(k - b.len()));
        if !eq.is_l_free(&witness) {
            return Err(Error::Internal("extension witness is not L-free".into()));
        }
        Ok(SolveOutcome::yes(witness, Method::FptThreshold, none))
    }
}

/// Ascending greedy: keep the smallest remaining `u`, then discard every `w`
/// that completes a solution with `u` and some `v` in `b`. For each `v` the
/// six placements of `(u, v)` among the three positions each fix at most one
/// `w`.
fn greedy_avoiding_b(eq: &LinearEquation, pool: &IntegerSet, b: &IntegerSet) -> IntegerSet {
    let c = eq.coeffs();
    let mut alive: BTreeSet<BigInt> = pool.iter().cloned().collect();
    let mut chosen = Vec::new();
    while let Some(u) = alive.pop_first() {
        for v in b.iter() {
            for pu in 0..3 {
                for pv in (0..3).filter(|&p| p != pu) {
                    let pw = 3 - pu - pv;
                    let rest = -(&c[pu] * &u + &c[pv] * v);
                    let (w, r) = rest.div_rem(&c[pw]);
                    if r.is_zero() {
                        alive.remove(&w);
                    }
                }
            }
        }
        chosen.push(u);
    }
    IntegerSet::from_sorted_unchecked(chosen)
}

/// Maximum L-free subset for a two-variable equation, built component by
/// component of the solution graph.
pub fn two_variable_max(eq: &LinearEquation, a: &IntegerSet) -> Result<IntegerSet> {
    if eq.arity() != 2 {
        return precondition(format!("{eq} has {} variables, not 2", eq.arity()));
    }
    let n = a.len();
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut looped = vec![false; n];
    eq.for_each_solution(a, |t| {
        if !eq.is_trivial(t).expect("arity 2") {
            let i = a.index_of(&t[0]).expect("drawn from set");
            let j = a.index_of(&t[1]).expect("drawn from set");
            if i == j {
                looped[i] = true;
            } else {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
        ControlFlow::Continue(())
    });
    if adj.iter().any(|s| s.len() > 2) {
        return Err(Error::Internal("two-variable solution graph has a vertex of degree > 2".into()));
    }

    let mut seen = vec![false; n];
    let mut keep = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        if looped[start] {
            seen[start] = true;
            continue;
        }
        // Walk a path from its smaller endpoint, or a cycle from its
        // smallest vertex, and keep every other vertex.
        let mut component = vec![start];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    component.push(w);
                    stack.push(w);
                }
            }
        }
        let is_cycle = component.iter().all(|&v| adj[v].len() == 2);
        let first = if is_cycle {
            *component.iter().min().expect("nonempty")
        } else {
            *component.iter().filter(|&&v| adj[v].len() < 2).min().expect("paths have endpoints")
        };
        let mut order = vec![first];
        let mut prev = usize::MAX;
        let mut cur = first;
        loop {
            let next = adj[cur].iter().copied().filter(|&w| w != prev && w != first).min();
            match next {
                Some(w) if order.len() < component.len() => {
                    order.push(w);
                    prev = cur;
                    cur = w;
                }
                _ => break,
            }
        }
        let t = order.len();
        let take = if is_cycle { t / 2 } else { t.div_ceil(2) };
        keep.extend(order.iter().step_by(2).take(take).copied());
    }
    keep.sort_unstable();
    Ok(IntegerSet::from_sorted_unchecked(keep.into_iter().map(|i| a.as_slice()[i].clone()).collect()))
}

/// Depth-first search over vertex subsets in ascending order that never
/// completes an edge.
struct SubsetDfs<'a> {
    h: &'a Hypergraph,
    /// Edges through each vertex, by index into `h.edges()`.
    incident: Vec<Vec<usize>>,
    chosen: Vec<bool>,
    nodes: u64,
    solver: &'a Solver,
}

impl<'a> SubsetDfs<'a> {
    fn new(h: &'a Hypergraph, solver: &'a Solver) -> Result<Self> {
        let mut incident = vec![Vec::new(); h.n() + 1];
        for (i, e) in h.edges().iter().enumerate() {
            for &v in e {
                incident[v].push(i);
            }
        }
        Ok(Self { h, incident, chosen: vec![false; h.n() + 1], nodes: 0, solver })
    }

    fn closes_edge(&self, v: usize) -> bool {
        self.incident[v]
            .iter()
            .any(|&i| self.h.edges()[i].iter().all(|&w| w == v || self.chosen[w]))
    }

    fn find(&mut self, k: usize, required: &[usize]) -> Result<Option<Vec<usize>>> {
        if k > self.h.n() || required.len() > k {
            return Ok(None);
        }
        for &v in required {
            if self.closes_edge(v) {
                return Ok(None);
            }
            self.chosen[v] = true;
        }
        let mut picked: Vec<usize> = required.to_vec();
        let found = self.go(1, k - required.len(), &mut picked)?;
        Ok(found.then(|| {
            picked.sort_unstable();
            picked
        }))
    }

    fn go(&mut self, v: usize, budget: usize, picked: &mut Vec<usize>) -> Result<bool> {
        self.nodes += 1;
        self.solver.check_cancel()?;
        if budget == 0 {
            return Ok(true);
        }
        let remaining = (v..=self.h.n()).filter(|&w| !self.chosen[w]).count();
        if remaining < budget {
            return Ok(false);
        }
        for w in v..=self.h.n() {
            if self.chosen[w] || self.closes_edge(w) {
                continue;
            }
            self.chosen[w] = true;
            picked.push(w);
            if self.go(w + 1, budget - 1, picked)? {
                return Ok(true);
            }
            picked.pop();
            self.chosen[w] = false;
        }
        Ok(false)
    }
}

pub fn decide(eq: &LinearEquation, a: &IntegerSet, k: usize) -> Result<SolveOutcome> {
    Solver::new().decide(eq, a, k)
}

pub fn max_lfree(eq: &LinearEquation, a: &IntegerSet) -> Result<MaxOutcome> {
    Solver::new().max_lfree(eq, a)
}

pub fn decide_fpt_by_k(eq: &LinearEquation, a: &IntegerSet, k: usize) -> Result<SolveOutcome> {
    Solver::new().decide_fpt_by_k(eq, a, k)
}

pub fn decide_two_variable(eq: &LinearEquation, a: &IntegerSet, k: usize) -> Result<SolveOutcome> {
    Solver::new().decide_two_variable(eq, a, k)
}

pub fn decide_epsilon(eq: &LinearEquation, a: &IntegerSet, epsilon: &BigRational) -> Result<SolveOutcome> {
    Solver::new().decide_epsilon(eq, a, epsilon)
}

pub fn decide_extension(eq: &LinearEquation, a: &IntegerSet, b: &IntegerSet, k: usize) -> Result<SolveOutcome> {
    Solver::new().decide_extension(eq, a, b, k)
}

pub fn extension_fpt_by_k(eq: &LinearEquation, a: &IntegerSet, b: &IntegerSet, k: usize) -> Result<SolveOutcome> {
    Solver::new().extension_fpt_by_k(eq, a, b, k)
}
