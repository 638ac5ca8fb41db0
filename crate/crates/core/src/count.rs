//! Exact and approximate counting of L-free `k`-subsets, the multicolour
//! inclusion-exclusion counter, and multicolour clique counting by
//! polynomial interpolation over gadget instances.

use std::fmt;

use itertools::Itertools;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{extend_disjoint, extend_geometric, lambda_of, three_term_shape, EquationBounds};
use crate::equation::LinearEquation;
use crate::error::{precondition, Error, Result};
use crate::gadget::build_gadget;
use crate::hypergraph::{binomial, parse_usizes, to_hitting_set_instance, CountStrategy, HittingSetSearch, Hypergraph};
use crate::setcore::IntegerSet;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxParams {
    pub epsilon: BigRational,
    pub delta: BigRational,
    pub seed: u64,
    /// Forces sampling with exactly this many trials.
    pub t_override: Option<u64>,
}

impl ApproxParams {
    pub fn new(epsilon: BigRational, delta: BigRational, seed: u64) -> Result<Self> {
        if !epsilon.is_positive() {
            return precondition(format!("ε = {epsilon} must be positive"));
        }
        if !delta.is_positive() || delta >= BigRational::one() {
            return precondition(format!("δ = {delta} must lie strictly between 0 and 1"));
        }
        Ok(Self { epsilon, delta, seed, t_override: None })
    }

    pub fn with_samples(mut self, t: u64) -> Self {
        self.t_override = Some(t);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CountValue {
    Exact(BigUint),
    Estimate(BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimateMeta {
    pub params: ApproxParams,
    pub samples: u64,
    pub successes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub value: CountValue,
    /// Present exactly when the value is an estimate.
    pub meta: Option<EstimateMeta>,
}

impl CountResult {
    pub fn exact(n: BigUint) -> Self {
        Self { value: CountValue::Exact(n), meta: None }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.value, CountValue::Exact(_))
    }

    pub fn kind(&self) -> &'static str {
        if self.is_exact() {
            "exact"
        } else {
            "estimate"
        }
    }

    pub fn exact_value(&self) -> Option<&BigUint> {
        match &self.value {
            CountValue::Exact(n) => Some(n),
            CountValue::Estimate(_) => None,
        }
    }

    pub fn as_rational(&self) -> BigRational {
        match &self.value {
            CountValue::Exact(n) => BigRational::from_integer(BigInt::from(n.clone())),
            CountValue::Estimate(r) => r.clone(),
        }
    }
}

impl fmt::Display for CountResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            CountValue::Exact(n) => write!(f, "{n}"),
            CountValue::Estimate(r) => write!(f, "{r}"),
        }
    }
}

/// Number of L-free `k`-subsets of `a` containing `contain`, counted as
/// hitting sets of size `|A| - k` that avoid the vertices of `contain`.
pub fn count_exact(eq: &LinearEquation, a: &IntegerSet, k: usize, contain: &IntegerSet) -> Result<CountResult> {
    if !contain.is_subset(a) {
        return precondition("the contained set is not a subset of A");
    }
    if k > a.len() || !eq.is_l_free(contain) {
        return Ok(CountResult::exact(BigUint::zero()));
    }
    let (h, map) = to_hitting_set_instance(eq, a);
    let forbidden = map.vertices_of(contain)?;
    let n = HittingSetSearch::new(&h).count(a.len() - k, &forbidden, CountStrategy::Auto)?;
    Ok(CountResult::exact(n))
}

/// Rigorous rational upper bound on `ln x` for `x >= 1`, within `2^-40`.
pub fn ln_upper(x: &BigRational) -> Result<BigRational> {
    if *x < BigRational::one() {
        return precondition(format!("ln bound needs x >= 1, got {x}"));
    }
    let two = BigRational::from_integer(2.into());
    let mut m = 0u64;
    let mut y = x.clone();
    while y >= two {
        y /= &two;
        m += 1;
    }
    Ok(ln_series_upper(&two) * BigRational::from_integer(m.into()) + ln_series_upper(&y))
}

/// `ln y = 2 Σ z^(2j+1)/(2j+1)` with `z = (y-1)/(y+1)`, for `y` in `[1, 2]`,
/// plus the geometric tail bound, rounded up to a multiple of `2^-48`.
fn ln_series_upper(y: &BigRational) -> BigRational {
    let one = BigRational::one();
    let z = (y - &one) / (y + &one);
    if z.is_zero() {
        return BigRational::zero();
    }
    let z2 = &z * &z;
    let eps = BigRational::new(BigInt::one(), BigInt::one() << 44);
    let mut sum = BigRational::zero();
    let mut power = z.clone();
    let mut j = 0u64;
    loop {
        let denom = BigRational::from_integer((2 * j + 1).into());
        sum += &power / &denom;
        power *= &z2;
        j += 1;
        let tail = &power / (BigRational::from_integer((2 * j + 1).into()) * (&one - &z2));
        if tail < eps {
            let bound = (sum + tail) * BigRational::from_integer(2.into());
            let scale = BigRational::from_integer(BigInt::one() << 48);
            return (bound * &scale).ceil() / scale;
        }
    }
}

/// `ceil(ratio · (2/ε² + 1/ε) · (ln 2 + ln(1/δ)))` with both logarithms
/// over-approximated, where `ratio` bounds `C(|A'|, k) / N` from above.
pub fn sample_size(ratio: &BigRational, epsilon: &BigRational, delta: &BigRational) -> Result<BigUint> {
    let two = BigRational::from_integer(2.into());
    let accuracy = &two / (epsilon * epsilon) + epsilon.recip();
    let logs = ln_upper(&two)? + ln_upper(&delta.recip())?;
    let t = (ratio * accuracy * logs).ceil().to_integer();
    Ok(t.to_biguint().expect("positive"))
}

/// Sample size from the density guarantee `C(|A'|, k)/N <= (1/λ + k/λ²)^k`.
pub fn default_sample_size(bounds: &EquationBounds, k: usize, epsilon: &BigRational, delta: &BigRational) -> Result<BigUint> {
    let inv = bounds.lambda.recip();
    let base = &inv + &inv * &inv * BigRational::from_integer(BigInt::from(k));
    let ratio = num_traits::pow(base, k);
    sample_size(&ratio, epsilon, delta)
}

/// Randomized estimate of the number of L-free `k`-subsets. Small inputs
/// (`|A'| < k/λ + 2`) are counted exactly unless a sample count is forced.
pub fn count_fptras(eq: &LinearEquation, a: &IntegerSet, k: usize, params: &ApproxParams) -> Result<CountResult> {
    let bounds = lambda_of(eq)?;
    let pool = a.without_zero();
    let size = BigRational::from_integer(BigInt::from(pool.len()));
    let small = size < BigRational::from_integer(BigInt::from(k)) / &bounds.lambda + BigRational::from_integer(2.into());
    if params.t_override.is_none() && small {
        return count_exact(eq, &pool, k, &IntegerSet::empty());
    }
    if k > pool.len() {
        return Ok(CountResult::exact(BigUint::zero()));
    }
    let t = match params.t_override {
        Some(t) => t,
        None => {
            let t = default_sample_size(&bounds, k, &params.epsilon, &params.delta)?;
            t.to_u64().ok_or_else(|| Error::Precondition(format!("sample size {t} is out of range")))?
        }
    };
    if t == 0 {
        return precondition("sample count must be positive");
    }
    let successes = sample_successes(eq, &pool, k, t, params.seed);
    let total = BigInt::from(binomial(pool.len(), k));
    let estimate = BigRational::new(BigInt::from(successes) * total, BigInt::from(t));
    Ok(CountResult {
        value: CountValue::Estimate(estimate),
        meta: Some(EstimateMeta { params: params.clone(), samples: t, successes }),
    })
}

/// Trial `i` draws from its own stream of the seeded generator, so the
/// total is independent of how trials are scheduled.
fn sample_successes(eq: &LinearEquation, pool: &IntegerSet, k: usize, t: u64, seed: u64) -> u64 {
    let n = pool.len();
    (0..t)
        .into_par_iter()
        .map_init(
            || (0..n).collect::<Vec<usize>>(),
            |idx, trial| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(trial);
                for i in 0..k {
                    let j = rng.random_range(i..n);
                    idx.swap(i, j);
                }
                let subset: IntegerSet = idx[..k].iter().map(|&i| pool.as_slice()[i].clone()).collect();
                u64::from(eq.is_l_free(&subset))
            },
        )
        .sum()
}

/// Number of L-free transversals of `parts`: sets with exactly one element
/// from each part. Inclusion-exclusion over the `2^k - 1` nonempty families
/// of parts, each term an exact count on the induced instance.
pub fn count_multicolour(eq: &LinearEquation, parts: &[IntegerSet]) -> Result<CountResult> {
    let k = parts.len();
    if k >= 63 {
        return precondition(format!("{k} parts exceed the 62-part limit"));
    }
    let mut union = IntegerSet::empty();
    for p in parts {
        if !union.is_disjoint(p) {
            return precondition("parts are not pairwise disjoint");
        }
        union = union.union(p);
    }
    if k == 0 {
        return Ok(CountResult::exact(BigUint::one()));
    }
    let (h, map) = to_hitting_set_instance(eq, &union);
    let part_of: Vec<usize> = (1..=union.len())
        .map(|v| {
            let x = map.element_of(v).expect("vertex in range");
            parts.iter().position(|p| p.contains(x)).expect("union of parts")
        })
        .collect();
    let mut total = BigInt::zero();
    for family in 1u64..(1 << k) {
        let keep: Vec<usize> = (1..=union.len()).filter(|&v| family >> part_of[v - 1] & 1 == 1).collect();
        let n_i = count_induced(&h, &keep, k)?;
        if (k - family.count_ones() as usize).is_multiple_of(2) {
            total += BigInt::from(n_i);
        } else {
            total -= BigInt::from(n_i);
        }
    }
    let n = total
        .to_biguint()
        .ok_or_else(|| Error::Internal("inclusion-exclusion produced a negative count".into()))?;
    Ok(CountResult::exact(n))
}

/// Independent `k`-sets of the sub-hypergraph induced by `keep`.
fn count_induced(h: &Hypergraph, keep: &[usize], k: usize) -> Result<BigUint> {
    if k > keep.len() {
        return Ok(BigUint::zero());
    }
    let mut relabel = vec![0usize; h.n() + 1];
    for (i, &v) in keep.iter().enumerate() {
        relabel[v] = i + 1;
    }
    let edges: Vec<Vec<usize>> = h
        .edges()
        .iter()
        .filter(|e| e.iter().all(|&v| relabel[v] != 0))
        .map(|e| e.iter().map(|&v| relabel[v]).collect())
        .collect();
    let sub = Hypergraph::new(keep.len(), edges)?;
    HittingSetSearch::new(&sub).count(keep.len() - k, &[], CountStrategy::Auto)
}

/// Graph whose vertices `1..=n` each carry a class in `1..=k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColouredGraph {
    n: usize,
    k: usize,
    classes: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl ColouredGraph {
    /// Edges are stored as sorted pairs without duplicates.
    pub fn new(k: usize, classes: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let n = classes.len();
        if let Some(c) = classes.iter().find(|&&c| c == 0 || c > k) {
            return Err(Error::Precondition(format!("class {c} outside 1..={k}")));
        }
        let mut norm = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::InvalidHypergraph(format!("edge ({u}, {v}) outside 1..={n}")));
            }
            if u == v {
                return Err(Error::InvalidHypergraph(format!("self-loop at {u}")));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        norm.dedup();
        Ok(Self { n, k, classes, edges: norm })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.classes[v - 1]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Vertices of class `c`, ascending.
    pub fn class(&self, c: usize) -> Vec<usize> {
        (1..=self.n).filter(|&v| self.class_of(v) == c).collect()
    }

    /// `n m k`, then the class of each vertex, then one edge per line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = parse_usizes(lines.next().ok_or_else(|| Error::Parse("empty graph file".into()))?)?;
        let [n, m, k] = header[..] else {
            return Err(Error::Parse("graph header must be `n m k`".into()));
        };
        let classes = if n == 0 {
            Vec::new()
        } else {
            parse_usizes(lines.next().ok_or_else(|| Error::Parse("missing class line".into()))?)?
        };
        if classes.len() != n {
            return Err(Error::Parse(format!("expected {n} class indices, got {}", classes.len())));
        }
        let mut edges = Vec::with_capacity(m);
        for line in lines {
            match parse_usizes(line)?[..] {
                [u, v] => edges.push((u, v)),
                _ => return Err(Error::Parse(format!("edge line `{line}` must hold two vertices"))),
            }
        }
        if edges.len() != m {
            return Err(Error::Parse(format!("expected {m} edges, got {}", edges.len())));
        }
        Self::new(k, classes, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.edges.len(), self.k);
        if self.n > 0 {
            out.push_str(&self.classes.iter().join(" "));
            out.push('\n');
        }
        for (u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }
}

/// Multicolour `k`-cliques by direct enumeration of transversals.
pub fn brute_force_multicolour_cliques(g: &ColouredGraph, cap: usize) -> Result<BigUint> {
    if g.n() > cap {
        return Err(Error::OracleCap { size: g.n(), cap });
    }
    let adjacent = |u: usize, v: usize| g.edges.binary_search(&(u.min(v), u.max(v))).is_ok();
    let classes: Vec<Vec<usize>> = (1..=g.k()).map(|c| g.class(c)).collect();
    let mut count = BigUint::zero();
    for pick in classes.into_iter().multi_cartesian_product() {
        if pick.iter().tuple_combinations().all(|(&u, &v)| adjacent(u, v)) {
            count += 1u32;
        }
    }
    Ok(count)
}

/// Intermediate data of the interpolation pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueInterpolation {
    pub count: BigUint,
    /// Common number of edges between any two classes after padding.
    pub q: usize,
    /// Matched dummy pairs added to equalize class-pair edge counts.
    pub dummy_pairs: usize,
    /// `N(A[t])` for `t = 0..=C(k,2)`, taken at `z = q + t`.
    pub values: Vec<BigUint>,
    /// Coefficients of `p(z)`, constant term first.
    pub coefficients: Vec<BigRational>,
    /// `p(q + t) - N(A[t])` for each node.
    pub residuals: Vec<BigRational>,
}

/// Multicolour `k`-cliques of `g` through L-free transversal counts for
/// `a1*x + a2*y = b*z` with positive coefficients.
///
/// Class pairs are padded with matched dummy edges to a common count `q`.
/// Each gadget edge class `(i, j)` then receives `t` inert extra elements,
/// so a transversal through vertex choice `U` is counted
/// `(q+t)^(C(k,2)-e(U)) (q+t-1)^e(U)` times. Interpolating the degree
/// `C(k,2)` polynomial in `z = q + t` and reading its constant term gives
/// the number of choices with `e(U) = C(k,2)`.
pub fn count_multicolour_cliques(eq: &LinearEquation, g: &ColouredGraph) -> Result<CliqueInterpolation> {
    let k = g.k();
    if k < 2 {
        return precondition("multicolour clique counting needs k >= 2");
    }
    let (a1, a2, b) = three_term_shape(eq)?;
    if !(a1.is_positive() && a2.is_positive() && b.is_positive()) {
        return precondition(format!("{eq} must have the shape a1*x + a2*y = b*z with positive a1, a2, b"));
    }
    let pairs: Vec<(usize, usize)> = (1..=k).tuple_combinations().collect();
    let degree = pairs.len();

    // Intra-class edges never lie in a multicolour clique.
    let mut classes = g.classes.clone();
    let mut edges: Vec<(usize, usize)> =
        g.edges().iter().copied().filter(|&(u, v)| g.class_of(u) != g.class_of(v)).collect();
    let pair_count = |edges: &[(usize, usize)], classes: &[usize], (i, j): (usize, usize)| {
        edges
            .iter()
            .filter(|&&(u, v)| {
                let (cu, cv) = (classes[u - 1], classes[v - 1]);
                (cu.min(cv), cu.max(cv)) == (i, j)
            })
            .count()
    };
    let q = pairs.iter().map(|&p| pair_count(&edges, &classes, p)).max().unwrap_or(0);
    let mut dummy_pairs = 0;
    for &(i, j) in &pairs {
        for _ in pair_count(&edges, &classes, (i, j))..q {
            classes.push(i);
            classes.push(j);
            edges.push((classes.len() - 1, classes.len()));
            dummy_pairs += 1;
        }
    }
    let n = classes.len();

    let h = Hypergraph::new(n, edges.iter().map(|&(u, v)| vec![u, v]).collect())?;
    let gadget = build_gadget(eq, &h)?;
    let a = gadget.union().clone();
    let vertex_parts: Vec<IntegerSet> = (1..=k)
        .map(|c| {
            let vs: Vec<usize> = (1..=n).filter(|&v| classes[v - 1] == c).collect();
            gadget.numbers_of(&vs)
        })
        .collect::<Result<_>>()?;
    let edge_parts: Vec<IntegerSet> = pairs
        .iter()
        .map(|&(i, j)| {
            h.edges()
                .iter()
                .enumerate()
                .filter(|(_, e)| {
                    let (cu, cv) = (classes[e[0] - 1], classes[e[1] - 1]);
                    (cu.min(cv), cu.max(cv)) == (i, j)
                })
                .map(|(idx, _)| gadget.edge_number(idx).expect("edge index").clone())
                .collect()
        })
        .collect();

    let inert = &a1 + &a2 != b;
    let mut values = Vec::with_capacity(degree + 1);
    for t in 0..=degree {
        let extra = t * degree;
        let x_t = if extra == 0 {
            IntegerSet::empty()
        } else if inert {
            extend_disjoint(eq, &a, a.len() + extra)?.set.difference(&a)
        } else {
            extend_geometric(eq, &a, extra)?.difference(&a)
        };
        if x_t.len() != extra {
            return Err(Error::Internal(format!("extension produced {} elements, wanted {extra}", x_t.len())));
        }
        let blocks = x_t.as_slice().chunks(t.max(1));
        let mut parts = vertex_parts.clone();
        for (p, block) in edge_parts.iter().zip(blocks.chain(std::iter::repeat(&[][..]))) {
            parts.push(p.union(&IntegerSet::from_sorted_unchecked(block.to_vec())));
        }
        let n_t = count_multicolour(eq, &parts)?;
        values.push(n_t.exact_value().expect("multicolour counts are exact").clone());
    }

    let nodes: Vec<BigRational> = (0..=degree).map(|t| BigRational::from_integer(BigInt::from(q + t))).collect();
    let targets: Vec<BigRational> = values.iter().map(|v| BigRational::from_integer(BigInt::from(v.clone()))).collect();
    let coefficients = solve_vandermonde(&nodes, &targets)?;
    let residuals: Vec<BigRational> =
        nodes.iter().zip(&targets).map(|(z, y)| evaluate(&coefficients, z) - y).collect();
    if residuals.iter().any(|r| !r.is_zero()) {
        return Err(Error::Internal("interpolating polynomial misses a node".into()));
    }
    let constant = &coefficients[0];
    if !constant.is_integer() {
        return Err(Error::Internal(format!("constant term {constant} is not an integer")));
    }
    let count = constant.abs().to_integer().to_biguint().expect("absolute value");
    Ok(CliqueInterpolation { count, q, dummy_pairs, values, coefficients, residuals })
}

/// Horner evaluation, constant term first.
pub fn evaluate(coefficients: &[BigRational], z: &BigRational) -> BigRational {
    coefficients.iter().rev().fold(BigRational::zero(), |acc, c| acc * z + c)
}

/// Coefficients `c` with `Σ c_j z_i^j = y_i`, by Gaussian elimination on the
/// Vandermonde matrix of distinct nodes.
pub fn solve_vandermonde(nodes: &[BigRational], values: &[BigRational]) -> Result<Vec<BigRational>> {
    let n = nodes.len();
    if values.len() != n {
        return precondition("node and value counts differ");
    }
    let mut rows: Vec<Vec<BigRational>> = nodes
        .iter()
        .zip(values)
        .map(|(z, y)| {
            let mut row: Vec<BigRational> = Vec::with_capacity(n + 1);
            let mut power = BigRational::one();
            for _ in 0..n {
                row.push(power.clone());
                power *= z;
            }
            row.push(y.clone());
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !rows[r][col].is_zero())
            .ok_or_else(|| Error::Precondition("interpolation nodes are not distinct".into()))?;
        rows.swap(col, pivot);
        let lead = rows[col][col].clone();
        for x in rows[col].iter_mut() {
            *x /= &lead;
        }
        for r in 0..n {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let (src, dst) = if r < col {
                    let (lo, hi) = rows.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = rows.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for (d, s) in dst.iter_mut().zip(src.iter()) {
                    *d -= &f * s;
                }
            }
        }
    }
    Ok(rows.into_iter().map(|mut r| r.pop().expect("augmented column")).collect())
}
