//! Linear equations `c1*x1 + ... + cl*xl = b` over the integers, and the
//! tuple-level tests every other module is built on.
//!
//! A solution is *trivial* when its indices can be partitioned into classes
//! that hold equal values and whose coefficients sum to zero. We test this
//! through the partition induced by equal values. Every class of the value
//! partition is a union of classes of any witness partition, so the value
//! partition is a witness whenever one exists.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::setcore::IntegerSet;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearEquation {
    coeffs: Vec<BigInt>,
    constant: BigInt,
}

/// The shape `a1*x1 + ... + am*xm = b*y` with every `ai` and `b` positive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YForm {
    /// Positive coefficients of the x-variables, in equation order.
    pub x_coeffs: Vec<BigInt>,
    /// Positive coefficient `b` on the y side.
    pub y_coeff: BigInt,
    /// Position of `y` in the equation's variable list.
    pub y_index: usize,
}

impl YForm {
    /// Places x-values and a y-value back into the equation's variable order.
    pub fn arrange<T: Clone>(&self, xs: &[T], y: &T) -> Vec<T> {
        let mut out = Vec::with_capacity(xs.len() + 1);
        let mut xi = xs.iter();
        for pos in 0..=xs.len() {
            if pos == self.y_index {
                out.push(y.clone());
            } else {
                out.push(xi.next().expect("x count matches").clone());
            }
        }
        out
    }
}

impl LinearEquation {
    pub fn new(coeffs: Vec<BigInt>, constant: BigInt) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::InvalidEquation(format!(
                "arity must be at least 2, got {}",
                coeffs.len()
            )));
        }
        if coeffs.iter().any(Zero::is_zero) {
            return Err(Error::InvalidEquation("zero coefficient".into()));
        }
        Ok(Self { coeffs, constant })
    }

    /// Convenience constructor for small literal coefficients.
    pub fn from_i64(coeffs: &[i64], constant: i64) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect(), BigInt::from(constant))
    }

    /// x + y = z
    pub fn sum_free() -> Self {
        Self::from_i64(&[1, 1, -1], 0).unwrap()
    }

    /// x + y = 2z
    pub fn progression() -> Self {
        Self::from_i64(&[1, 1, -2], 0).unwrap()
    }

    /// x + y = z + w
    pub fn sidon() -> Self {
        Self::from_i64(&[1, 1, -1, -1], 0).unwrap()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn constant(&self) -> &BigInt {
        &self.constant
    }

    pub fn arity(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant.is_zero()
    }

    pub fn is_translation_invariant(&self) -> bool {
        self.is_homogeneous() && self.coeffs.iter().sum::<BigInt>().is_zero()
    }

    pub fn is_y_form(&self) -> bool {
        self.y_form().is_some()
    }

    /// Rewrites the equation as `a1*x1 + ... = b*y` when it is homogeneous
    /// with exactly one coefficient whose sign differs from the rest.
    /// Equations with a single negative coefficient are preferred as given;
    /// otherwise the equation is negated.
    pub fn y_form(&self) -> Option<YForm> {
        if !self.is_homogeneous() {
            return None;
        }
        let single = |negative: bool| {
            let mut it = self.coeffs.iter().enumerate().filter(|(_, c)| c.is_negative() == negative);
            let first = it.next()?;
            it.next().is_none().then_some(first.0)
        };
        let (y_index, flip) = match single(true) {
            Some(i) => (i, false),
            None => (single(false)?, true),
        };
        let signed = |c: &BigInt| if flip { -c } else { c.clone() };
        let x_coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != y_index)
            .map(|(_, c)| signed(c))
            .collect();
        Some(YForm { x_coeffs, y_coeff: -signed(&self.coeffs[y_index]), y_index })
    }

    fn check_len(&self, tuple: &[BigInt]) -> Result<()> {
        if tuple.len() != self.arity() {
            return Err(Error::TupleLength { expected: self.arity(), got: tuple.len() });
        }
        Ok(())
    }

    /// Exact evaluation of `sum ci*xi == b`.
    pub fn is_solution(&self, tuple: &[BigInt]) -> Result<bool> {
        self.check_len(tuple)?;
        Ok(self.lhs(tuple) == self.constant)
    }

    fn lhs(&self, tuple: &[BigInt]) -> BigInt {
        self.coeffs.iter().zip(tuple).map(|(c, x)| c * x).sum()
    }

    pub fn is_trivial(&self, tuple: &[BigInt]) -> Result<bool> {
        self.check_len(tuple)?;
        Ok(self.is_trivial_unchecked(tuple))
    }

    fn is_trivial_unchecked(&self, tuple: &[BigInt]) -> bool {
        let mut groups: BTreeMap<&BigInt, BigInt> = BTreeMap::new();
        for (x, c) in tuple.iter().zip(&self.coeffs) {
            *groups.entry(x).or_default() += c;
        }
        groups.values().all(Zero::is_zero)
    }

    /// Visits every solution tuple over `set` (repeats allowed) in
    /// lexicographic order. The last variable is solved for directly, so the
    /// scan costs `|set|^(l-1)` prefix evaluations.
    pub fn for_each_solution<F>(&self, set: &IntegerSet, mut visit: F)
    where
        F: FnMut(&[BigInt]) -> ControlFlow<()>,
    {
        let elems = set.as_slice();
        if elems.is_empty() {
            return;
        }
        let mut tuple = Vec::with_capacity(self.arity());
        let _ = self.prefix_walk(elems, &mut tuple, BigInt::zero(), &mut visit);
    }

    fn prefix_walk<F>(
        &self,
        elems: &[BigInt],
        tuple: &mut Vec<BigInt>,
        partial: BigInt,
        visit: &mut F,
    ) -> ControlFlow<()>
    where
        F: FnMut(&[BigInt]) -> ControlFlow<()>,
    {
        let pos = tuple.len();
        let last = self.arity() - 1;
        if pos == last {
            let residual = &self.constant - &partial;
            let c = &self.coeffs[last];
            let (q, r) = residual.div_rem(c);
            if r.is_zero() && elems.binary_search(&q).is_ok() {
                tuple.push(q);
                let flow = visit(tuple);
                tuple.pop();
                return flow;
            }
            return ControlFlow::Continue(());
        }
        for x in elems {
            let next = &partial + &self.coeffs[pos] * x;
            tuple.push(x.clone());
            let flow = self.prefix_walk(elems, tuple, next, visit);
            tuple.pop();
            flow?;
        }
        ControlFlow::Continue(())
    }

    /// Every solution tuple over `set`, trivial ones included.
    pub fn enumerate_solutions(&self, set: &IntegerSet) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        self.for_each_solution(set, |t| {
            out.push(t.to_vec());
            ControlFlow::Continue(())
        });
        out
    }

    pub fn enumerate_nontrivial_solutions(&self, set: &IntegerSet) -> Vec<Vec<BigInt>> {
        let mut out = Vec::new();
        self.for_each_solution(set, |t| {
            if !self.is_trivial_unchecked(t) {
                out.push(t.to_vec());
            }
            ControlFlow::Continue(())
        });
        out
    }

    /// The lexicographically first non-trivial solution over `set`.
    pub fn first_nontrivial_solution(&self, set: &IntegerSet) -> Option<Vec<BigInt>> {
        let mut found = None;
        self.for_each_solution(set, |t| {
            if self.is_trivial_unchecked(t) {
                ControlFlow::Continue(())
            } else {
                found = Some(t.to_vec());
                ControlFlow::Break(())
            }
        });
        found
    }

    pub fn is_l_free(&self, set: &IntegerSet) -> bool {
        self.first_nontrivial_solution(set).is_none()
    }
}

impl fmt::Display for LinearEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coeffs: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        write!(f, "{}={}", coeffs.join(","), self.constant)
    }
}

impl FromStr for LinearEquation {
    type Err = Error;

    fn from_str(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        match spec {
            "sum-free" => return Ok(Self::sum_free()),
            "progression" => return Ok(Self::progression()),
            "sidon" => return Ok(Self::sidon()),
            _ => {}
        }
        let (lhs, rhs) = spec
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("equation `{spec}` has no `=`")))?;
        let constant = parse_int(rhs)?;
        let coeffs = lhs.split(',').map(parse_int).collect::<Result<Vec<_>>>()?;
        Self::new(coeffs, constant)
    }
}

fn parse_int(s: &str) -> Result<BigInt> {
    let s = s.trim();
    let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::Parse(format!("`{s}` is not a decimal integer")));
    }
    s.parse::<BigInt>().map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}
