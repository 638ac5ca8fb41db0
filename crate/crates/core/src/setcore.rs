//! The integer-set universe and the brute-force oracles that certify the
//! rest of the crate.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::equation::LinearEquation;
use crate::error::{Error, Result};

/// Largest set the subset-enumeration oracles accept by default.
pub const DEFAULT_ORACLE_CAP: usize = 20;

/// A finite set of distinct integers, stored in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IntegerSet(Vec<BigInt>);

impl IntegerSet {
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    /// Builds a set, rejecting duplicate values.
    pub fn new(mut elements: Vec<BigInt>) -> Result<Self> {
        elements.sort();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0].to_string()));
        }
        Ok(Self(elements))
    }

    pub fn from_i64(values: &[i64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| BigInt::from(v)).collect())
    }

    /// `{lo, lo+1, ..., hi}`; empty when `hi < lo`.
    pub fn range(lo: i64, hi: i64) -> Self {
        Self((lo..=hi).map(BigInt::from).collect())
    }

    /// `[n] = {1, ..., n}`.
    pub fn interval(n: u64) -> Self {
        Self((1..=n).map(BigInt::from).collect())
    }

    pub(crate) fn from_sorted_unchecked(elements: Vec<BigInt>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        Self(elements)
    }

    pub fn as_slice(&self) -> &[BigInt] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<BigInt> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, BigInt> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: &BigInt) -> bool {
        self.0.binary_search(x).is_ok()
    }

    /// Zero-based position of `x` in ascending order.
    pub fn index_of(&self, x: &BigInt) -> Option<usize> {
        self.0.binary_search(x).ok()
    }

    pub fn get(&self, index: usize) -> Option<&BigInt> {
        self.0.get(index)
    }

    pub fn max(&self) -> Option<&BigInt> {
        self.0.last()
    }

    pub fn min(&self) -> Option<&BigInt> {
        self.0.first()
    }

    /// `max*(A) = max |a|`.
    pub fn max_abs(&self) -> Option<BigInt> {
        self.0.iter().map(Signed::abs).max()
    }

    /// `min*(A) = min |a|`.
    pub fn min_abs(&self) -> Option<BigInt> {
        self.0.iter().map(Signed::abs).min()
    }

    /// Bits needed to write the set down: each element costs its magnitude's
    /// bit length plus one sign bit.
    pub fn size_bits(&self) -> u64 {
        self.0.iter().map(|a| a.magnitude().bits() + 1).sum()
    }

    pub fn is_subset(&self, other: &IntegerSet) -> bool {
        self.0.iter().all(|x| other.contains(x))
    }

    pub fn union(&self, other: &IntegerSet) -> IntegerSet {
        let mut v: Vec<BigInt> = self.0.iter().chain(other.0.iter()).cloned().collect();
        v.sort();
        v.dedup();
        Self(v)
    }

    pub fn difference(&self, other: &IntegerSet) -> IntegerSet {
        Self(self.0.iter().filter(|x| !other.contains(x)).cloned().collect())
    }

    pub fn is_disjoint(&self, other: &IntegerSet) -> bool {
        self.0.iter().all(|x| !other.contains(x))
    }

    pub fn with(&self, x: BigInt) -> IntegerSet {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&x) {
            v.insert(pos, x);
        }
        Self(v)
    }

    pub fn without(&self, x: &BigInt) -> IntegerSet {
        Self(self.0.iter().filter(|y| *y != x).cloned().collect())
    }

    pub fn without_zero(&self) -> IntegerSet {
        Self(self.0.iter().filter(|y| !y.is_zero()).cloned().collect())
    }

    /// The first `k` elements in ascending order.
    pub fn take(&self, k: usize) -> IntegerSet {
        Self(self.0.iter().take(k).cloned().collect())
    }

    /// `{c * a : a in A}`.
    pub fn scaled(&self, c: &BigInt) -> IntegerSet {
        let mut v: Vec<BigInt> = self.0.iter().map(|a| a * c).collect();
        v.sort();
        Self(v)
    }

    /// Elements selected by the bits of `mask` (bit `i` is the `i`-th smallest).
    pub fn select(&self, mask: u64) -> IntegerSet {
        Self(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, x)| x.clone())
                .collect(),
        )
    }

    /// Parses whitespace-separated decimal integers. Duplicates are an error.
    pub fn parse(text: &str) -> Result<Self> {
        let values = text
            .split_whitespace()
            .map(|tok| {
                let digits = tok.strip_prefix('-').unwrap_or(tok);
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(Error::Parse(format!("`{tok}` is not a decimal integer")));
                }
                tok.parse::<BigInt>().map_err(|e| Error::Parse(e.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(values)
    }

    /// One element per line, ascending.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for x in &self.0 {
            s.push_str(&x.to_string());
            s.push('\n');
        }
        s
    }
}

impl FromIterator<BigInt> for IntegerSet {
    /// Collects into a set, silently merging repeated values.
    fn from_iter<I: IntoIterator<Item = BigInt>>(iter: I) -> Self {
        let mut v: Vec<BigInt> = iter.into_iter().collect();
        v.sort();
        v.dedup();
        Self(v)
    }
}

impl<'a> IntoIterator for &'a IntegerSet {
    type Item = &'a BigInt;
    type IntoIter = std::slice::Iter<'a, BigInt>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Display for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

/// Exhaustive subset oracle over a fixed `(eq, A)`.
///
/// Subsets are bit masks over the ascending element list. The non-trivial
/// solution supports of `A` are collected once; a subset is L-free exactly
/// when it contains none of them.
#[derive(Debug, Clone)]
pub struct SubsetOracle {
    set: IntegerSet,
    supports: Vec<u64>,
}

impl SubsetOracle {
    pub fn new(eq: &LinearEquation, set: &IntegerSet, cap: usize) -> Result<Self> {
        if set.len() > cap || set.len() > 63 {
            return Err(Error::OracleCap { size: set.len(), cap: cap.min(63) });
        }
        let mut supports: Vec<u64> = eq
            .enumerate_nontrivial_solutions(set)
            .iter()
            .map(|tuple| {
                tuple
                    .iter()
                    .map(|x| 1u64 << set.index_of(x).expect("solution drawn from set"))
                    .fold(0, |m, b| m | b)
            })
            .collect();
        supports.sort_unstable();
        supports.dedup();
        Ok(Self { set: set.clone(), supports })
    }

    pub fn set(&self) -> &IntegerSet {
        &self.set
    }

    pub fn is_free(&self, mask: u64) -> bool {
        self.supports.iter().all(|&s| s & mask != s)
    }

    /// Visits every `k`-subset mask in increasing numeric order.
    pub fn for_each_k_subset(&self, k: usize, mut visit: impl FnMut(u64) -> bool) {
        let n = self.set.len();
        if k > n {
            return;
        }
        if k == 0 {
            visit(0);
            return;
        }
        let limit = 1u64 << n;
        let mut mask: u64 = (1u64 << k) - 1;
        while mask < limit {
            if !visit(mask) {
                return;
            }
            // Gosper's hack: next mask with the same popcount.
            let c = mask & mask.wrapping_neg();
            let r = mask + c;
            mask = (((r ^ mask) >> 2) / c) | r;
        }
    }

    /// Largest L-free subset, searching sizes in decreasing order.
    pub fn max(&self) -> (usize, IntegerSet) {
        for k in (0..=self.set.len()).rev() {
            let mut found = None;
            self.for_each_k_subset(k, |m| {
                if self.is_free(m) {
                    found = Some(m);
                    false
                } else {
                    true
                }
            });
            if let Some(m) = found {
                return (k, self.set.select(m));
            }
        }
        unreachable!("the empty set is always L-free")
    }

    pub fn count(&self, k: usize) -> BigUint {
        let mut n: u64 = 0;
        self.for_each_k_subset(k, |m| {
            if self.is_free(m) {
                n += 1;
            }
            true
        });
        BigUint::from(n)
    }

    /// Every L-free subset as a mask, ascending.
    pub fn free_masks(&self) -> Vec<u64> {
        (0..1u64 << self.set.len()).filter(|&m| self.is_free(m)).collect()
    }
}

/// Exact maximum cardinality of an L-free subset of `set`, with a witness.
pub fn brute_force_max_lfree(
    eq: &LinearEquation,
    set: &IntegerSet,
    cap: usize,
) -> Result<(usize, IntegerSet)> {
    Ok(SubsetOracle::new(eq, set, cap)?.max())
}

/// Exact number of L-free subsets of `set` with exactly `k` elements.
pub fn brute_force_count_lfree(
    eq: &LinearEquation,
    set: &IntegerSet,
    k: usize,
    cap: usize,
) -> Result<BigUint> {
    Ok(SubsetOracle::new(eq, set, cap)?.count(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntegerSet {
        IntegerSet::from_i64(v).unwrap()
    }

    #[test]
    fn construction_and_accessors() {
        let a = set(&[5, -7, 2]);
        assert_eq!(a.as_slice(), &[BigInt::from(-7), BigInt::from(2), BigInt::from(5)]);
        assert_eq!(a.max(), Some(&BigInt::from(5)));
        assert_eq!(a.min(), Some(&BigInt::from(-7)));
        assert_eq!(a.max_abs(), Some(BigInt::from(7)));
        assert_eq!(a.min_abs(), Some(BigInt::from(2)));
        assert_eq!(IntegerSet::from_i64(&[1, 2, 1]), Err(Error::DuplicateElement("1".into())));
        assert_eq!(IntegerSet::empty().max_abs(), None);
    }

    #[test]
    fn size_bits_examples() {
        assert_eq!(set(&[]).size_bits(), 0);
        assert_eq!(set(&[1]).size_bits(), 2);
        // 3 has two bits, 5 has three.
        assert_eq!(set(&[3, 5]).size_bits(), 7);
    }

    #[test]
    fn parse_set_file() {
        let a = IntegerSet::parse("3 -1\n  10\n\n").unwrap();
        assert_eq!(a, set(&[-1, 3, 10]));
        assert!(matches!(IntegerSet::parse("1 2 2"), Err(Error::DuplicateElement(_))));
        assert!(matches!(IntegerSet::parse("1 x"), Err(Error::Parse(_))));
        assert!(matches!(IntegerSet::parse("1 --2"), Err(Error::Parse(_))));
        assert_eq!(IntegerSet::parse(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn max_oracle_examples() {
        let s = LinearEquation::sum_free();
        let (size, w) = brute_force_max_lfree(&s, &IntegerSet::interval(8), 20).unwrap();
        assert_eq!(size, 4);
        assert!(s.is_l_free(&w));
        assert_eq!(brute_force_max_lfree(&s, &IntegerSet::empty(), 20).unwrap(), (0, IntegerSet::empty()));
        let p = LinearEquation::progression();
        let (size, w) = brute_force_max_lfree(&p, &IntegerSet::interval(9), 20).unwrap();
        // Largest 3-AP-free subset of [9], e.g. {1,2,4,8,9}.
        assert_eq!(size, 5);
        assert!(p.is_l_free(&w));
    }

    #[test]
    fn count_oracle_examples() {
        let s = LinearEquation::sum_free();
        let a = set(&[1, 2, 3]);
        assert_eq!(brute_force_count_lfree(&s, &a, 3, 20).unwrap(), BigUint::from(0u32));
        // 1+1=2 is a non-trivial solution, leaving {1,3} and {2,3}.
        assert_eq!(brute_force_count_lfree(&s, &a, 2, 20).unwrap(), BigUint::from(2u32));
        assert_eq!(brute_force_count_lfree(&s, &a, 0, 20).unwrap(), BigUint::from(1u32));
        assert_eq!(brute_force_count_lfree(&s, &a, 4, 20).unwrap(), BigUint::from(0u32));
    }

    #[test]
    fn cap_is_enforced() {
        let s = LinearEquation::sum_free();
        assert_eq!(
            brute_force_max_lfree(&s, &IntegerSet::interval(21), DEFAULT_ORACLE_CAP),
            Err(Error::OracleCap { size: 21, cap: 20 })
        );
        assert!(brute_force_count_lfree(&s, &IntegerSet::interval(5), 2, 4).is_err());
    }

    #[test]
    fn sum_free_max_on_intervals() {
        let s = LinearEquation::sum_free();
        for n in 1..=16u64 {
            let (size, _) = brute_force_max_lfree(&s, &IntegerSet::interval(n), 20).unwrap();
            assert_eq!(size as u64, n.div_ceil(2), "n = {n}");
        }
    }

    #[test]
    fn max_is_largest_nonzero_count() {
        let e = LinearEquation::from_i64(&[1, 1, -3], 0).unwrap();
        let a = set(&[1, 2, 3, 4, 5, 6, 9, 12]);
        let (size, _) = brute_force_max_lfree(&e, &a, 20).unwrap();
        let largest = (0..=a.len())
            .filter(|&k| !brute_force_count_lfree(&e, &a, k, 20).unwrap().is_zero())
            .max()
            .unwrap();
        assert_eq!(size, largest);
    }
}
