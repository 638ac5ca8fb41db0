//! Base-`d` encoding of a uniform hypergraph as a set of integers.
//!
//! For `a1*x1 + ... + al*xl = b*y` with positive coefficients and
//! `d = 2 l a^2 b^2` (`a` the largest `aj`), vertex `vi` becomes `b * d^i` and
//! an edge `{vi1 < ... < vil}` becomes `a1 d^i1 + ... + al d^il`. In base `d`
//! no carries occur, so the non-trivial solutions in the union are exactly
//! the encoded edges with their vertex numbers in the x positions.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed};

use crate::equation::{LinearEquation, YForm};
use crate::error::{precondition, Error, Result};
use crate::hypergraph::Hypergraph;
use crate::setcore::IntegerSet;

#[derive(Debug, Clone)]
pub struct GadgetEncoding {
    eq: LinearEquation,
    form: YForm,
    h: Hypergraph,
    d: BigInt,
    /// `vertex_numbers[i - 1] = b * d^i`.
    vertex_numbers: Vec<BigInt>,
    /// Parallel to `h.edges()`.
    edge_numbers: Vec<BigInt>,
    a_prime: IntegerSet,
    a_doubleprime: IntegerSet,
    union: IntegerSet,
}

impl GadgetEncoding {
    pub fn equation(&self) -> &LinearEquation {
        &self.eq
    }

    pub fn hypergraph(&self) -> &Hypergraph {
        &self.h
    }

    pub fn d(&self) -> &BigInt {
        &self.d
    }

    /// Vertex numbers `{b d^i}`.
    pub fn a_prime(&self) -> &IntegerSet {
        &self.a_prime
    }

    /// Edge numbers.
    pub fn a_doubleprime(&self) -> &IntegerSet {
        &self.a_doubleprime
    }

    pub fn union(&self) -> &IntegerSet {
        &self.union
    }

    pub fn vertex_number(&self, v: usize) -> Option<&BigInt> {
        v.checked_sub(1).and_then(|i| self.vertex_numbers.get(i))
    }

    /// Number of the `i`-th edge of the hypergraph, in its edge order.
    pub fn edge_number(&self, i: usize) -> Option<&BigInt> {
        self.edge_numbers.get(i)
    }

    /// `φ_V`: the vertex encoded by `x`.
    pub fn vertex_of(&self, x: &BigInt) -> Option<usize> {
        self.a_prime.index_of(x).map(|i| i + 1)
    }

    /// `φ_E`: the edge encoded by `y`.
    pub fn edge_of(&self, y: &BigInt) -> Option<&[usize]> {
        self.edge_numbers.iter().position(|e| e == y).map(|i| self.h.edges()[i].as_slice())
    }

    /// `φ_V^{-1}` applied to a vertex list.
    pub fn numbers_of(&self, vertices: &[usize]) -> Result<IntegerSet> {
        vertices
            .iter()
            .map(|&v| {
                self.vertex_number(v)
                    .cloned()
                    .ok_or_else(|| Error::Precondition(format!("vertex {v} outside 1..={}", self.h.n())))
            })
            .collect()
    }

    /// `φ_V` applied to the vertex numbers in `set`, sorted; other elements
    /// are ignored.
    pub fn vertices_in(&self, set: &IntegerSet) -> Vec<usize> {
        set.iter().filter_map(|x| self.vertex_of(x)).collect()
    }

    /// Every edge as the integer set `φ_V^{-1}(e) ∪ {φ_E^{-1}(e)}`.
    pub fn encoded_supports(&self) -> Vec<IntegerSet> {
        self.h
            .edges()
            .iter()
            .zip(&self.edge_numbers)
            .map(|(e, y)| self.numbers_of(e).expect("edge vertices in range").with(y.clone()))
            .collect()
    }
}

/// Encodes `h` for a `y`-form equation whose x-count matches the edge size.
pub fn build_gadget(eq: &LinearEquation, h: &Hypergraph) -> Result<GadgetEncoding> {
    let form = eq
        .y_form()
        .ok_or_else(|| Error::Precondition(format!("{eq} is not of the form a1*x1 + ... + al*xl = b*y")))?;
    let l = form.x_coeffs.len();
    if !h.is_uniform(l) {
        return precondition(format!("hypergraph must be {l}-uniform to match the equation"));
    }
    let a = form.x_coeffs.iter().max().expect("arity >= 2").clone();
    let b = form.y_coeff.clone();
    let d = BigInt::from(2 * l) * &a * &a * &b * &b;

    let mut powers = Vec::with_capacity(h.n() + 1);
    powers.push(BigInt::one());
    for i in 1..=h.n() {
        let next = &powers[i - 1] * &d;
        powers.push(next);
    }
    let vertex_numbers: Vec<BigInt> = (1..=h.n()).map(|i| &b * &powers[i]).collect();
    let edge_numbers: Vec<BigInt> = h
        .edges()
        .iter()
        .map(|e| e.iter().zip(&form.x_coeffs).map(|(&v, aj)| aj * &powers[v]).sum())
        .collect();

    let a_prime = IntegerSet::new(vertex_numbers.clone()).expect("powers of d are distinct");
    let a_doubleprime = IntegerSet::new(edge_numbers.clone()).expect("base-d digits determine the edge");
    if !a_prime.is_disjoint(&a_doubleprime) {
        return precondition("vertex and edge numbers collide (a single x-coefficient equal to b)");
    }
    let union = a_prime.union(&a_doubleprime);
    Ok(GadgetEncoding {
        eq: eq.clone(),
        form,
        h: h.clone(),
        d,
        vertex_numbers,
        edge_numbers,
        a_prime,
        a_doubleprime,
        union,
    })
}

/// `φ_V^{-1}(I) ∪ A''` for an independent vertex set `I`.
pub fn lfree_of_independent_set(g: &GadgetEncoding, independent: &[usize]) -> Result<IntegerSet> {
    if !g.h.is_independent(independent) {
        return precondition("vertex set is not independent");
    }
    Ok(g.numbers_of(independent)?.union(&g.a_doubleprime))
}

/// Adds every missing edge number to the L-free set `s`. When all `l`
/// vertex numbers of that edge are present, the largest of them is evicted.
pub fn normalize_to_contain_adp(g: &GadgetEncoding, s: &IntegerSet) -> Result<IntegerSet> {
    if !s.is_subset(&g.union) {
        return precondition("set is not a subset of the gadget set");
    }
    if !g.eq.is_l_free(s) {
        return precondition("set is not L-free");
    }
    let mut out = s.clone();
    for (e, y) in g.h.edges().iter().zip(&g.edge_numbers) {
        if out.contains(y) {
            continue;
        }
        let support = g.numbers_of(e)?;
        if support.is_subset(&out) {
            out = out.without(support.max().expect("edges are nonempty"));
        }
        out = out.with(y.clone());
    }
    debug_assert!(g.eq.is_l_free(&out));
    Ok(out)
}

/// `(A, |A| - s)`: `h` has a hitting set of size `s` iff `A` has an L-free
/// subset of size `|A| - s`.
pub fn np_instance(h: &Hypergraph, s: usize, eq: &LinearEquation) -> Result<(IntegerSet, usize)> {
    if s > h.n() {
        return precondition(format!("s = {s} exceeds the vertex count {}", h.n()));
    }
    let g = build_gadget(eq, h)?;
    let k = g.union.len() - s;
    Ok((g.union, k))
}

fn require_positive(epsilon: &BigRational) -> Result<()> {
    if !epsilon.is_positive() {
        return precondition(format!("ε = {epsilon} must be positive"));
    }
    Ok(())
}

/// Instance map of the PTAS reduction from independent set on graphs of
/// maximum degree 3: the gadget set of the graph. It does not depend on `ε`.
pub fn ptas_f(eq: &LinearEquation, graph: &Hypergraph, epsilon: &BigRational) -> Result<GadgetEncoding> {
    require_positive(epsilon)?;
    if eq.arity() != 3 {
        return precondition("the PTAS reduction needs a three-variable equation a1*x1 + a2*x2 = b*y");
    }
    if !graph.is_uniform(2) {
        return precondition("input must be a graph");
    }
    if graph.max_degree() > 3 {
        return precondition(format!("maximum degree {} exceeds 3", graph.max_degree()));
    }
    build_gadget(eq, graph)
}

/// Solution map of the PTAS reduction: completes the L-free `b` to a
/// maximal L-free set containing every edge number, then reads off its
/// vertices, which form a maximal independent set.
pub fn ptas_g(g: &GadgetEncoding, b: &IntegerSet, epsilon: &BigRational) -> Result<Vec<usize>> {
    require_positive(epsilon)?;
    let mut full = normalize_to_contain_adp(g, b)?;
    for x in g.a_prime.iter() {
        if full.contains(x) {
            continue;
        }
        let grown = full.with(x.clone());
        if g.eq.is_l_free(&grown) {
            full = grown;
        }
    }
    Ok(g.vertices_in(&full))
}

/// `α(ε) = 1 + ε/7`.
pub fn ptas_alpha(epsilon: &BigRational) -> BigRational {
    BigRational::one() + epsilon / BigRational::from_integer(BigInt::from(7))
}

/// `b * d^(n+1)`, a strict upper bound on every element of the gadget set.
pub fn magnitude_bound(g: &GadgetEncoding) -> BigInt {
    &g.form.y_coeff * Pow::pow(&g.d, g.h.n() + 1)
}
