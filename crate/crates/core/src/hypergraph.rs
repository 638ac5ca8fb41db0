//! Hypergraphs, the reduction from L-free subsets to hitting sets, and a
//! bounded search tree that decides, counts and enumerates hitting sets of
//! a fixed size.
//!
//! Vertices are `1..=n`. Edges are stored sorted, deduplicated and in
//! lexicographic order, so "the first unhit edge" is well defined.
//!
//! The search tree branches on the first unhit edge `e = {v1, ..., vd}`:
//! child `i` puts `vi` into the solution and keeps `v1, ..., v(i-1)` out.
//! Children therefore describe disjoint families of hitting sets, and a
//! node whose edges are all hit stands for every way of spending the
//! remaining budget on its free vertices.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::equation::LinearEquation;
use crate::error::{Error, Result};
use crate::setcore::IntegerSet;

/// `C(n, k)`, zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<Vec<usize>>,
}

impl Hypergraph {
    /// Normalizes every edge (sorted, no repeated vertex) and drops repeated
    /// edges. Empty edges and out-of-range vertices are rejected.
    pub fn new(n: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        let mut normalized = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::InvalidHypergraph("empty edge".into()));
            }
            if e[0] == 0 || e[e.len() - 1] > n {
                return Err(Error::InvalidHypergraph(format!(
                    "edge {e:?} has a vertex outside 1..={n}"
                )));
            }
            normalized.push(e);
        }
        normalized.sort();
        normalized.dedup();
        Ok(Self { n, edges: normalized })
    }

    pub fn edgeless(n: usize) -> Self {
        Self { n, edges: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Largest edge size; 0 for an edgeless hypergraph.
    pub fn d_max(&self) -> usize {
        self.edges.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Common edge size, if every edge has the same size and there is at
    /// least one edge.
    pub fn uniformity(&self) -> Option<usize> {
        let d = self.edges.first()?.len();
        self.edges.iter().all(|e| e.len() == d).then_some(d)
    }

    /// Whether every edge has exactly `l` vertices (vacuous when edgeless).
    pub fn is_uniform(&self, l: usize) -> bool {
        self.edges.iter().all(|e| e.len() == l)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.binary_search(&v).is_ok()).count()
    }

    pub fn max_degree(&self) -> usize {
        (1..=self.n).map(|v| self.degree(v)).max().unwrap_or(0)
    }

    pub fn contains_edge(&self, e: &[usize]) -> bool {
        self.edges.binary_search_by(|x| x.as_slice().cmp(e)).is_ok()
    }

    pub fn is_hitting_set(&self, vertices: &[usize]) -> bool {
        let mut mark = vec![false; self.n + 1];
        for &v in vertices {
            if let Some(m) = mark.get_mut(v) {
                *m = true;
            }
        }
        self.edges.iter().all(|e| e.iter().any(|&v| mark[v]))
    }

    /// No edge lies entirely inside `vertices`.
    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        let mut mark = vec![false; self.n + 1];
        for &v in vertices {
            if let Some(m) = mark.get_mut(v) {
                *m = true;
            }
        }
        self.edges.iter().all(|e| e.iter().any(|&v| !mark[v]))
    }

    /// Parses the text format: a header `n m`, then `m` edge lines of
    /// 1-based vertices.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("missing `n m` header".into()))?;
        let nums = parse_usizes(header)?;
        let [n, m] = nums[..] else {
            return Err(Error::Parse(format!("header `{header}` must be `n m`")));
        };
        let edges = lines.map(parse_usizes).collect::<Result<Vec<_>>>()?;
        if edges.len() != m {
            return Err(Error::Parse(format!("header promises {m} edges, found {}", edges.len())));
        }
        Self::new(n, edges)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.edges.len());
        for e in &self.edges {
            s.push_str(&e.iter().join(" "));
            s.push('\n');
        }
        s
    }
}

pub(crate) fn parse_usizes(line: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>()
                .map_err(|_| Error::Parse(format!("`{tok}` is not a natural number")))
        })
        .collect()
}

/// Vertex `i` of a reduced instance stands for the `i`-th smallest element
/// of the source set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceMap {
    elements: Vec<BigInt>,
}

impl InstanceMap {
    pub fn new(set: &IntegerSet) -> Self {
        Self { elements: set.as_slice().to_vec() }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element_of(&self, vertex: usize) -> Option<&BigInt> {
        vertex.checked_sub(1).and_then(|i| self.elements.get(i))
    }

    pub fn vertex_of(&self, x: &BigInt) -> Option<usize> {
        self.elements.binary_search(x).ok().map(|i| i + 1)
    }

    /// Vertices of the members of `set`, ascending. Errors when a member is
    /// not in the source set.
    pub fn vertices_of(&self, set: &IntegerSet) -> Result<Vec<usize>> {
        set.iter()
            .map(|x| {
                self.vertex_of(x)
                    .ok_or_else(|| Error::Precondition(format!("{x} is not an element of the instance")))
            })
            .collect()
    }

    pub fn set_of(&self, vertices: &[usize]) -> IntegerSet {
        vertices.iter().filter_map(|&v| self.element_of(v).cloned()).collect()
    }

    /// Source elements whose vertices are not in `vertices`.
    pub fn complement_of(&self, vertices: &[usize]) -> IntegerSet {
        let mut mark = vec![false; self.elements.len() + 1];
        for &v in vertices {
            if let Some(m) = mark.get_mut(v) {
                *m = true;
            }
        }
        let kept = (1..=self.elements.len())
            .filter(|&v| !mark[v])
            .map(|v| self.elements[v - 1].clone())
            .collect();
        IntegerSet::from_sorted_unchecked(kept)
    }
}

/// One vertex per element of `set`, one edge per distinct support of a
/// non-trivial solution. `B` is L-free iff `set \ B` hits every edge.
pub fn to_hitting_set_instance(eq: &LinearEquation, set: &IntegerSet) -> (Hypergraph, InstanceMap) {
    let map = InstanceMap::new(set);
    let mut edges = Vec::new();
    eq.for_each_solution(set, |tuple| {
        if !eq.is_trivial(tuple).expect("tuple has equation arity") {
            edges.push(tuple.iter().map(|x| map.vertex_of(x).expect("solution drawn from set")).collect());
        }
        ControlFlow::Continue(())
    });
    let h = Hypergraph::new(set.len(), edges).expect("solution vertices lie in range");
    (h, map)
}

/// Shared flag for cooperative cancellation of long searches.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, Ordering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(Ordering::Relaxed)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Search-tree nodes visited.
    pub nodes: u64,
}

/// How `count` evaluates the number of hitting sets.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum CountStrategy {
    /// Search tree when its worst case is small, components otherwise.
    #[default]
    Auto,
    SearchTree,
    /// Sums `(-1)^|G| C(n - u, n - s - u)` over edge families `G` whose
    /// union with the forbidden vertices has `u <= n - s` vertices.
    InclusionExclusion,
    /// Coefficient of `x^(n-s)` in the independence polynomial of the
    /// complement side, truncated at that degree and factored over
    /// connected components.
    Components,
}

const FREE: u8 = 0;
const IN: u8 = 1;
const OUT: u8 = 2;

struct State {
    mark: Vec<u8>,
    free: usize,
}

impl State {
    fn in_and_free(&self) -> (Vec<usize>, Vec<usize>) {
        let mut chosen = Vec::new();
        let mut free = Vec::new();
        for (v, &m) in self.mark.iter().enumerate().skip(1) {
            match m {
                IN => chosen.push(v),
                FREE => free.push(v),
                _ => {}
            }
        }
        (chosen, free)
    }
}

/// Search-tree engine over one hypergraph, with node accounting and an
/// optional cancellation token.
pub struct HittingSetSearch<'a> {
    h: &'a Hypergraph,
    cancel: Option<CancelToken>,
    stats: SearchStats,
}

impl<'a> HittingSetSearch<'a> {
    pub fn new(h: &'a Hypergraph) -> Self {
        Self { h, cancel: None, stats: SearchStats::default() }
    }

    pub fn with_cancel(mut self, token: CancelToken) -> Self {
        self.cancel = Some(token);
        self
    }

    pub fn stats(&self) -> SearchStats {
        self.stats
    }

    /// A hitting set of size exactly `s`, sorted, if one exists.
    pub fn decide(&mut self, s: usize) -> Result<Option<Vec<usize>>> {
        if s > self.h.n {
            return Err(Error::Precondition(format!(
                "hitting set size {s} exceeds vertex count {}",
                self.h.n
            )));
        }
        let mut found = None;
        self.search(s, &[], &mut |st, budget| {
            let (mut chosen, free) = st.in_and_free();
            chosen.extend_from_slice(&free[..budget]);
            chosen.sort_unstable();
            found = Some(chosen);
            ControlFlow::Break(())
        })?;
        Ok(found)
    }

    /// Number of size-`s` hitting sets disjoint from `forbidden`.
    pub fn count(&mut self, s: usize, forbidden: &[usize], strategy: CountStrategy) -> Result<BigUint> {
        self.check_forbidden(forbidden)?;
        if s > self.h.n {
            return Ok(BigUint::zero());
        }
        let strategy = match strategy {
            CountStrategy::Auto if tree_bound(self.h.d_max(), s.min(self.h.edge_count())) <= 1 << 20 => {
                CountStrategy::SearchTree
            }
            CountStrategy::Auto => CountStrategy::Components,
            other => other,
        };
        match strategy {
            CountStrategy::InclusionExclusion => return self.count_inclusion_exclusion(s, forbidden),
            CountStrategy::Components => return self.count_components(s, forbidden),
            _ => {}
        }
        let mut total = BigUint::zero();
        self.search(s, forbidden, &mut |st, budget| {
            total += binomial(st.free, budget);
            ControlFlow::Continue(())
        })?;
        Ok(total)
    }

    /// Visits each size-`s` hitting set avoiding `forbidden` exactly once,
    /// as a sorted vertex list, in search-tree order.
    pub fn for_each<F>(&mut self, s: usize, forbidden: &[usize], mut visit: F) -> Result<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        self.check_forbidden(forbidden)?;
        if s > self.h.n {
            return Ok(());
        }
        self.search(s, forbidden, &mut |st, budget| {
            let (chosen, free) = st.in_and_free();
            for extra in free.into_iter().combinations(budget) {
                let mut set: Vec<usize> = chosen.iter().copied().chain(extra).collect();
                set.sort_unstable();
                visit(&set)?;
            }
            ControlFlow::Continue(())
        })
    }

    fn check_forbidden(&self, forbidden: &[usize]) -> Result<()> {
        match forbidden.iter().find(|&&v| v == 0 || v > self.h.n) {
            Some(v) => Err(Error::Precondition(format!("forbidden vertex {v} outside 1..={}", self.h.n))),
            None => Ok(()),
        }
    }

    fn search(
        &mut self,
        s: usize,
        forbidden: &[usize],
        leaf: &mut dyn FnMut(&State, usize) -> ControlFlow<()>,
    ) -> Result<()> {
        let mut mark = vec![FREE; self.h.n + 1];
        mark[0] = OUT;
        for &v in forbidden {
            mark[v] = OUT;
        }
        let free = mark.iter().filter(|&&m| m == FREE).count();
        let mut st = State { mark, free };
        self.node(0, s, &mut st, leaf).map(|_| ())
    }

    fn node(
        &mut self,
        start: usize,
        budget: usize,
        st: &mut State,
        leaf: &mut dyn FnMut(&State, usize) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        self.stats.nodes += 1;
        if self.cancel.as_ref().is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        let h = self.h;
        // Edges before `start` are already hit.
        let unhit = (start..h.edges.len()).find(|&i| h.edges[i].iter().all(|&v| st.mark[v] != IN));
        let Some(ei) = unhit else {
            if budget > st.free {
                return Ok(ControlFlow::Continue(()));
            }
            return Ok(leaf(st, budget));
        };
        if budget == 0 {
            return Ok(ControlFlow::Continue(()));
        }
        let candidates: Vec<usize> = h.edges[ei].iter().copied().filter(|&v| st.mark[v] == FREE).collect();
        let mut flow = ControlFlow::Continue(());
        for &v in &candidates {
            st.mark[v] = IN;
            st.free -= 1;
            flow = self.node(ei + 1, budget - 1, st, leaf)?;
            st.mark[v] = OUT;
            if flow.is_break() {
                break;
            }
        }
        for &v in &candidates {
            if st.mark[v] == OUT {
                st.mark[v] = FREE;
                st.free += 1;
            }
        }
        Ok(flow)
    }

    fn count_components(&mut self, s: usize, forbidden: &[usize]) -> Result<BigUint> {
        let r = self.h.n - s;
        let mut must: Vec<usize> = forbidden.to_vec();
        must.sort_unstable();
        must.dedup();
        if must.len() > r {
            return Ok(BigUint::zero());
        }
        let vertices: Vec<usize> = (1..=self.h.n).collect();
        let mut sub = Residual { vertices, edges: self.h.edges.clone() };
        for &v in &must {
            if !sub.vertices.contains(&v) {
                return Ok(BigUint::zero());
            }
            match sub.include(v) {
                Some(next) => sub = next,
                None => return Ok(BigUint::zero()),
            }
        }
        let cap = r - must.len();
        let mut memo = HashMap::new();
        let poly = self.components_poly(sub, cap, &mut memo)?;
        Ok(poly.get(cap).cloned().unwrap_or_default())
    }

    /// Independence polynomial of `g`, truncated above degree `cap`.
    fn components_poly(
        &mut self,
        g: Residual,
        cap: usize,
        memo: &mut HashMap<(Residual, usize), Vec<BigUint>>,
    ) -> Result<Vec<BigUint>> {
        self.stats.nodes += 1;
        if self.cancel.as_ref().is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        if let Some(p) = memo.get(&(g.clone(), cap)) {
            return Ok(p.clone());
        }
        let key = (g.clone(), cap);
        let parts = g.split();
        let result = if parts.len() > 1 {
            let mut acc = vec![BigUint::one()];
            for part in parts {
                let p = self.components_poly(part, cap, memo)?;
                acc = truncated_product(&acc, &p, cap);
            }
            acc
        } else if g.edges.is_empty() {
            (0..=cap.min(g.vertices.len())).map(|j| binomial(g.vertices.len(), j)).collect()
        } else {
            let v = g.max_degree_vertex();
            let mut out = self.components_poly(g.exclude(v), cap, memo)?;
            if cap > 0 {
                if let Some(inc) = g.include(v) {
                    let with = self.components_poly(inc, cap - 1, memo)?;
                    if out.len() < with.len() + 1 {
                        out.resize(with.len() + 1, BigUint::zero());
                    }
                    for (j, c) in with.into_iter().enumerate() {
                        out[j + 1] += c;
                    }
                }
            }
            out
        };
        memo.insert(key, result.clone());
        Ok(result)
    }

    fn count_inclusion_exclusion(&mut self, s: usize, forbidden: &[usize]) -> Result<BigUint> {
        let n = self.h.n;
        let r = n - s;
        let mut cover = vec![0u32; n + 1];
        let mut u = 0usize;
        for &v in forbidden {
            if cover[v] == 0 {
                u += 1;
            }
            cover[v] += 1;
        }
        if u > r {
            return Ok(BigUint::zero());
        }
        if self.h.edges.iter().any(|e| e.iter().all(|&v| cover[v] > 0)) {
            return Ok(BigUint::zero());
        }
        let mut total = BigInt::zero();
        self.ie_node(0, r, true, &mut cover, &mut u, &mut total)?;
        total
            .to_biguint()
            .ok_or_else(|| Error::Internal("inclusion-exclusion produced a negative count".into()))
    }

    fn ie_node(
        &mut self,
        i: usize,
        r: usize,
        positive: bool,
        cover: &mut [u32],
        u: &mut usize,
        total: &mut BigInt,
    ) -> Result<()> {
        self.stats.nodes += 1;
        if self.cancel.as_ref().is_some_and(CancelToken::is_cancelled) {
            return Err(Error::Cancelled);
        }
        let h = self.h;
        if i == h.edges.len() {
            let term = BigInt::from(binomial(h.n - *u, r - *u));
            if positive {
                *total += term;
            } else {
                *total -= term;
            }
            return Ok(());
        }
        self.ie_node(i + 1, r, positive, cover, u, total)?;
        let e = &h.edges[i];
        let added = e.iter().filter(|&&v| cover[v] == 0).count();
        if *u + added <= r {
            for &v in e {
                cover[v] += 1;
            }
            *u += added;
            self.ie_node(i + 1, r, !positive, cover, u, total)?;
            *u -= added;
            for &v in e {
                cover[v] -= 1;
            }
        }
        Ok(())
    }
}

/// Vertex-induced remainder of a hypergraph during the component count.
/// An edge is violated once all of its vertices are chosen, so edges only
/// ever shrink; an empty edge means the current choice is infeasible.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct Residual {
    vertices: Vec<usize>,
    edges: Vec<Vec<usize>>,
}

impl Residual {
    fn max_degree_vertex(&self) -> usize {
        let mut deg: HashMap<usize, usize> = HashMap::new();
        for &v in self.edges.iter().flatten() {
            *deg.entry(v).or_default() += 1;
        }
        self.vertices
            .iter()
            .copied()
            .max_by_key(|v| (deg.get(v).copied().unwrap_or(0), std::cmp::Reverse(*v)))
            .expect("nonempty when edges exist")
    }

    /// `v` left out: edges through `v` can no longer be completed.
    fn exclude(&self, v: usize) -> Residual {
        Residual {
            vertices: self.vertices.iter().copied().filter(|&w| w != v).collect(),
            edges: self.edges.iter().filter(|e| !e.contains(&v)).cloned().collect(),
        }
    }

    /// `v` chosen: edges through `v` lose it, and a resulting singleton
    /// `{w}` forces `w` out. `None` when an edge is completed.
    fn include(&self, v: usize) -> Option<Residual> {
        let mut edges = Vec::with_capacity(self.edges.len());
        let mut banned = Vec::new();
        for e in &self.edges {
            if e.contains(&v) {
                match e.len() {
                    1 => return None,
                    2 => banned.push(if e[0] == v { e[1] } else { e[0] }),
                    _ => edges.push(e.iter().copied().filter(|&w| w != v).collect()),
                }
            } else {
                edges.push(e.clone());
            }
        }
        let mut edges: Vec<Vec<usize>> = edges
            .into_iter()
            .filter(|e: &Vec<usize>| !e.iter().any(|w| banned.contains(w)))
            .collect();
        edges.sort();
        edges.dedup();
        let vertices = self.vertices.iter().copied().filter(|&w| w != v && !banned.contains(&w)).collect();
        Some(Residual { vertices, edges })
    }

    fn split(&self) -> Vec<Residual> {
        let index: HashMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn root(p: &mut [usize], mut i: usize) -> usize {
            while p[i] != i {
                p[i] = p[p[i]];
                i = p[i];
            }
            i
        }
        for e in &self.edges {
            let a = root(&mut parent, index[&e[0]]);
            for w in &e[1..] {
                let b = root(&mut parent, index[w]);
                parent[b] = a;
            }
        }
        let mut groups: Vec<(usize, Residual)> = Vec::new();
        let mut isolated = Vec::new();
        let mut touched = vec![false; self.vertices.len()];
        for &v in self.edges.iter().flatten() {
            touched[index[&v]] = true;
        }
        for (i, &v) in self.vertices.iter().enumerate() {
            if !touched[i] {
                isolated.push(v);
                continue;
            }
            let r = root(&mut parent, i);
            match groups.iter_mut().find(|(g, _)| *g == r) {
                Some((_, part)) => part.vertices.push(v),
                None => groups.push((r, Residual { vertices: vec![v], edges: Vec::new() })),
            }
        }
        for e in &self.edges {
            let r = root(&mut parent, index[&e[0]]);
            let (_, part) = groups.iter_mut().find(|(g, _)| *g == r).expect("edge vertices are grouped");
            part.edges.push(e.clone());
        }
        let mut parts: Vec<Residual> = groups.into_iter().map(|(_, p)| p).collect();
        if !isolated.is_empty() {
            parts.push(Residual { vertices: isolated, edges: Vec::new() });
        }
        parts
    }
}

fn truncated_product(a: &[BigUint], b: &[BigUint], cap: usize) -> Vec<BigUint> {
    let len = (a.len() + b.len()).saturating_sub(1).min(cap + 1);
    let mut out = vec![BigUint::zero(); len];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate().take(len.saturating_sub(i)) {
            out[i + j] += x * y;
        }
    }
    out
}

fn tree_bound(d: usize, depth: usize) -> u64 {
    let d = d.max(1) as u64;
    let mut acc: u64 = 1;
    let mut pow: u64 = 1;
    for _ in 0..depth {
        pow = pow.saturating_mul(d);
        acc = acc.saturating_add(pow);
    }
    acc
}

/// A hitting set of size exactly `s`, if any.
pub fn decide_hitting_set(h: &Hypergraph, s: usize) -> Result<Option<Vec<usize>>> {
    HittingSetSearch::new(h).decide(s)
}

/// Number of size-`s` hitting sets disjoint from `forbidden`.
pub fn count_hitting_sets(h: &Hypergraph, s: usize, forbidden: &[usize]) -> Result<BigUint> {
    HittingSetSearch::new(h).count(s, forbidden, CountStrategy::Auto)
}

/// Every size-`s` hitting set disjoint from `forbidden`, in ascending
/// lexicographic order.
pub fn enumerate_hitting_sets(h: &Hypergraph, s: usize, forbidden: &[usize]) -> Result<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    HittingSetSearch::new(h).for_each(s, forbidden, |set| {
        out.push(set.to_vec());
        ControlFlow::Continue(())
    })?;
    out.sort();
    Ok(out)
}
