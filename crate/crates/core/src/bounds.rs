//! Lower bounds on the size of L-free subsets and the set builders that
//! realize them: the density constant λ, the L-free top interval of `[n]`,
//! the modular-multiplier extractor, two ways of extending a set without
//! creating solutions, and the ε-threshold instance builder.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::equation::LinearEquation;
use crate::error::{precondition, Error, Result};
use crate::setcore::{brute_force_max_lfree, IntegerSet};

/// Side sums of a homogeneous non-translation-invariant equation written as
/// `a1*x1 + ... + ak*xk = b1*y1 + ... + bl*yl` with positive coefficients
/// and `a_sum > b_sum`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquationBounds {
    pub lambda: BigRational,
    /// Best known lower bound on κ, which is λ itself.
    pub kappa_lower: BigRational,
    pub a_sum: BigInt,
    pub b_sum: BigInt,
    /// `max(a_sum, b_sum)`, that is `a_sum`.
    pub c: BigInt,
}

/// `λ = (1 - b_sum/a_sum) / (2c)`.
pub fn lambda_of(eq: &LinearEquation) -> Result<EquationBounds> {
    if !eq.is_homogeneous() {
        return precondition(format!("{eq} is not homogeneous"));
    }
    let positive: BigInt = eq.coeffs().iter().filter(|c| c.is_positive()).sum();
    let negative: BigInt = eq.coeffs().iter().filter(|c| c.is_negative()).map(Signed::abs).sum();
    if positive == negative {
        return precondition(format!("{eq} is translation-invariant"));
    }
    let (a_sum, b_sum) = if positive > negative { (positive, negative) } else { (negative, positive) };
    let c = a_sum.clone();
    let lambda = (BigRational::one() - BigRational::new(b_sum.clone(), a_sum.clone()))
        / BigRational::from_integer(BigInt::from(2) * &c);
    Ok(EquationBounds { kappa_lower: lambda.clone(), lambda, a_sum, b_sum, c })
}

/// `[floor(b_sum*n/a_sum) + 1, n]`, which contains no solution at all since
/// `a_sum * min > b_sum * max` on it.
pub fn lfree_interval(eq: &LinearEquation, n: u64) -> Result<IntegerSet> {
    let b = lambda_of(eq)?;
    if n == 0 {
        return precondition("interval length must be at least 1");
    }
    let lo: BigInt = (&b.b_sum * BigInt::from(n)).div_floor(&b.a_sum) + 1;
    let lo = lo.to_u64().expect("lo <= n");
    Ok(IntegerSet::from_sorted_unchecked((lo..=n).map(BigInt::from).collect()))
}

const SMALL_PRIMES: [u32; 20] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71];

/// Trial division below 1000, then Miller-Rabin over the first 20 prime
/// bases. Deterministic below 3.3e24; a strong probable-prime test above.
pub fn is_prime(n: &BigUint) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    for d in (2u32..1000).filter(|d| SMALL_PRIMES.iter().take_while(|&&p| p * p <= *d).all(|&p| d % p != 0)) {
        let d = BigUint::from(d);
        if *n == d {
            return true;
        }
        if (n % &d).is_zero() {
            return false;
        }
    }
    let one = BigUint::one();
    let n1 = n - &one;
    let zeros = n1.trailing_zeros().expect("n > 1");
    let odd = &n1 >> zeros;
    'bases: for &a in &SMALL_PRIMES {
        let mut x = BigUint::from(a).modpow(&odd, n);
        if x == one || x == n1 {
            continue;
        }
        for _ in 1..zeros {
            x = x.modpow(&two, n);
            if x == n1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime_above(n: &BigInt) -> BigInt {
    let mut p = if n.is_negative() { BigInt::one() } else { n + 1 };
    loop {
        if let Some(u) = p.to_biguint() {
            if is_prime(&u) {
                return p;
            }
        }
        p += 1;
    }
}

/// The extractor's output together with the modulus and multiplier that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LargeLfree {
    pub set: IntegerSet,
    pub p: BigInt,
    pub multiplier: BigInt,
}

/// An L-free subset of `z` with more than `λ|z|` elements.
///
/// With `p` prime and `S` the L-free top interval of `[floor(p/c)]`, every
/// multiplier `x` maps `z` into `Z_p`; the elements landing in `S` form an
/// L-free set. Averaging over `x` gives an expected `|z||S|/(p-1)` elements,
/// which exceeds `λ|z|` once `p > 2c - 3`, so choosing
/// `p > max(2 max*(z), 2c)` makes some multiplier succeed for every `z`.
pub fn construct_large_lfree(eq: &LinearEquation, z: &IntegerSet, seed: Option<u64>) -> Result<IntegerSet> {
    construct_large_lfree_traced(eq, z, seed).map(|r| r.set)
}

/// As [`construct_large_lfree`], also reporting `p` and the multiplier.
///
/// Multipliers are scanned upward from 1; with a seed the scan starts at a
/// seeded random multiplier and wraps around.
pub fn construct_large_lfree_traced(eq: &LinearEquation, z: &IntegerSet, seed: Option<u64>) -> Result<LargeLfree> {
    let bounds = lambda_of(eq)?;
    if z.is_empty() {
        return precondition("the input set must be nonempty");
    }
    if z.contains(&BigInt::zero()) {
        return precondition("the input set must not contain 0");
    }
    let two = BigInt::from(2);
    let floor = (&two * z.max_abs().expect("nonempty")).max(&two * &bounds.c);
    let p = next_prime_above(&floor);
    let m_prime = p.div_floor(&bounds.c);
    let lo = (&bounds.b_sum * &m_prime).div_floor(&bounds.a_sum) + 1;
    let in_s = |r: &BigInt| *r >= lo && *r <= m_prime;

    // |Z_x| > λ|Z| as an exact comparison.
    let need = &bounds.lambda * BigRational::from_integer(BigInt::from(z.len()));
    let succeeds = |count: usize| BigRational::from_integer(BigInt::from(count)) > need;

    let residues: Vec<BigInt> = z.iter().map(|v| v.mod_floor(&p)).collect();
    let select = |x: &BigInt| -> Vec<BigInt> {
        z.iter()
            .zip(&residues)
            .filter(|(_, r)| in_s(&(x * *r).mod_floor(&p)))
            .map(|(v, _)| v.clone())
            .collect()
    };

    if let (Some(p64), Some(lo64), Some(hi64)) = (p.to_u64(), lo.to_u64(), m_prime.to_u64()) {
        let res64: Vec<u64> = residues.iter().map(|r| r.to_u64().expect("r < p")).collect();
        let start = match seed {
            Some(seed) => ChaCha8Rng::seed_from_u64(seed).random_range(0..p64 - 1),
            None => 0,
        };
        for x in (start..p64 - 1).chain(0..start).map(|i| i + 1) {
            let count = res64
                .iter()
                .filter(|&&r| {
                    let d = (x as u128 * r as u128 % p64 as u128) as u64;
                    d >= lo64 && d <= hi64
                })
                .count();
            if succeeds(count) {
                let x = BigInt::from(x);
                let set = IntegerSet::from_sorted_unchecked(select(&x));
                return Ok(LargeLfree { set, p, multiplier: x });
            }
        }
    } else {
        let span = &p - 1u32;
        let start = match seed {
            Some(seed) => BigInt::from(ChaCha8Rng::seed_from_u64(seed).random::<u128>()) % &span,
            None => BigInt::zero(),
        };
        let mut i = start.clone();
        loop {
            let x = &i + 1u32;
            let chosen = select(&x);
            if succeeds(chosen.len()) {
                return Ok(LargeLfree { set: IntegerSet::from_sorted_unchecked(chosen), p, multiplier: x });
            }
            i = (i + 1u32) % &span;
            if i == start {
                break;
            }
        }
    }
    Err(Error::Internal("no multiplier reached the averaging bound".into()))
}

/// Coefficients `(a, b, c)` of an equation of the shape `a*x + b*y = c*z`
/// with all three positive.
pub fn three_term_shape(eq: &LinearEquation) -> Result<(BigInt, BigInt, BigInt)> {
    match eq.y_form() {
        Some(y) if y.x_coeffs.len() == 2 => Ok((y.x_coeffs[0].clone(), y.x_coeffs[1].clone(), y.y_coeff)),
        _ => precondition(format!("{eq} is not of the form a*x + b*y = c*z with a, b, c positive")),
    }
}

fn require_naturals(a: &IntegerSet) -> Result<()> {
    if a.is_empty() {
        return precondition("the base set must be nonempty");
    }
    if a.min().is_some_and(|m| m.sign() != Sign::Plus) {
        return precondition("the base set must contain only positive integers");
    }
    Ok(())
}

/// Intermediate values of [`extend_disjoint`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointExtension {
    pub set: IntegerSet,
    pub tau: BigRational,
    pub n: BigInt,
    pub i_prime: IntegerSet,
    pub p: BigInt,
}

/// Grows `a` to exactly `t` elements for `a*x + b*y = c*z` with
/// `a + b != c`, so that every solution inside the result, trivial ones
/// included, lies inside `a`.
///
/// The new elements are `p * I'`, where `I'` is taken from the top of the
/// L-free interval `[floor(τN) + 1, N]` and `p` is the smallest prime above
/// `abc * max(a)`. When `abc * max(a) = 1` the prime is 2, which still
/// exceeds every coefficient and `max(a)`.
pub fn extend_disjoint(eq: &LinearEquation, a: &IntegerSet, t: usize) -> Result<DisjointExtension> {
    let (ca, cb, cc) = three_term_shape(eq)?;
    if &ca + &cb == cc {
        return precondition("extend_disjoint needs a + b != c");
    }
    require_naturals(a)?;
    if t <= a.len() {
        return precondition(format!("target size {t} must exceed |A| = {}", a.len()));
    }
    let m = a.max().expect("nonempty").clone();
    let sum = &ca + &cb;
    let tau = if cc < sum { BigRational::new(cc.clone(), sum.clone()) } else { BigRational::new(sum.clone(), cc.clone()) };
    let x = BigInt::from(2) * (&ca + &cb + &cc) * &m;
    let t_big = BigInt::from(t);

    // Smallest N with floor(τN) >= x, and smallest N with N - floor(τN) >= t.
    // Both quantities are monotone in N, so the larger of the two works.
    let n1 = (BigRational::from_integer(x.clone()) / &tau).ceil().to_integer();
    let one_minus = BigRational::one() - &tau;
    let n2 = (BigRational::from_integer(&t_big - 1) / &one_minus).floor().to_integer() + 1;
    let n = n1.max(n2);
    let floor_tau = |v: &BigInt| (&tau * BigRational::from_integer(v.clone())).floor().to_integer();
    let ok = |v: &BigInt| floor_tau(v) >= x && v - floor_tau(v) >= t_big;
    if !ok(&n) || ok(&(&n - 1)) {
        return Err(Error::Internal(format!("N = {n} is not the least admissible value")));
    }

    let extra = t - a.len();
    let lo = &n - BigInt::from(extra) + 1;
    let i_prime: IntegerSet = num_iter(&lo, &n).collect();
    let p = next_prime_above(&(&ca * &cb * &cc * &m));
    let set = a.union(&i_prime.scaled(&p));
    debug_assert_eq!(set.len(), t);
    Ok(DisjointExtension { set, tau, n, i_prime, p })
}

fn num_iter(lo: &BigInt, hi: &BigInt) -> impl Iterator<Item = BigInt> {
    let hi = hi.clone();
    let mut cur = lo.clone();
    std::iter::from_fn(move || {
        if cur > hi {
            return None;
        }
        let out = cur.clone();
        cur += 1;
        Some(out)
    })
}

/// `a ∪ {c^i * 2 max(a) : 1 <= i <= t}` for `a*x + b*y = c*z` with
/// `a + b = c`. The only non-trivial solutions in the result lie in `a`.
pub fn extend_geometric(eq: &LinearEquation, a: &IntegerSet, t: usize) -> Result<IntegerSet> {
    let (ca, cb, cc) = three_term_shape(eq)?;
    if &ca + &cb != cc {
        return precondition("extend_geometric needs a + b = c");
    }
    require_naturals(a)?;
    let base = BigInt::from(2) * a.max().expect("nonempty");
    let mut power = cc.clone();
    let mut extra = Vec::with_capacity(t);
    for _ in 0..t {
        extra.push(&power * &base);
        power *= &cc;
    }
    Ok(a.union(&IntegerSet::from_sorted_unchecked(extra)))
}

/// Anchor set for the `k > ε|A|` regime: a set `S` of positive integers
/// whose largest L-free subset has exactly `ε'|S|` elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonAnchor {
    pub set: IntegerSet,
    pub epsilon_prime: BigRational,
}

/// The builder's output and the quantities it derived.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EpsilonInstance {
    pub set: IntegerSet,
    /// Elements appended by padding.
    pub d: usize,
    /// Scaled anchor copies appended (0 in the `k <= ε|A|` regime).
    pub r: usize,
    /// `k + r ε'|S|`.
    pub k_star: usize,
    /// `ceil(ε|B|)`, equal to `k_star + d`.
    pub target: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum EpsilonShape {
    SumFree,
    Balanced,
}

fn ceil_ratio(q: &BigRational) -> BigInt {
    q.ceil().to_integer()
}

fn to_usize(v: &BigInt, what: &str) -> Result<usize> {
    v.to_usize().ok_or_else(|| Error::Precondition(format!("{what} = {v} is out of range")))
}

/// Builds `B` such that `B` has an L-free subset of at least `ceil(ε|B|)`
/// elements iff `a` has one of exactly `k` elements.
///
/// Supported equations are `x + y = z` and `a*x + b*y = c*z` with
/// `a + b = c`. `oracle_cap` bounds the size of an anchor whose density is
/// checked by brute force; larger anchors are trusted as given.
pub fn epsilon_instance(
    eq: &LinearEquation,
    a: &IntegerSet,
    k: usize,
    epsilon: &BigRational,
    anchor: Option<&EpsilonAnchor>,
    oracle_cap: usize,
) -> Result<EpsilonInstance> {
    let (ca, cb, cc) = three_term_shape(eq)?;
    let shape = if ca.is_one() && cb.is_one() && cc.is_one() {
        EpsilonShape::SumFree
    } else if &ca + &cb == cc {
        EpsilonShape::Balanced
    } else {
        return precondition("epsilon_instance supports x + y = z and a*x + b*y = c*z with a + b = c");
    };
    require_naturals(a)?;
    if !(epsilon.is_positive() && *epsilon < BigRational::one()) {
        return precondition(format!("ε = {epsilon} must lie strictly between 0 and 1"));
    }
    if k > a.len() {
        return precondition(format!("k = {k} exceeds |A| = {}", a.len()));
    }
    let eps_a = epsilon * BigRational::from_integer(BigInt::from(a.len()));
    let kq = BigRational::from_integer(BigInt::from(k));

    let (base, k_star, r) = if kq <= eps_a {
        (a.clone(), k, 0)
    } else {
        let anchor = anchor.ok_or_else(|| {
            Error::Precondition(format!("k = {k} exceeds ε|A| = {eps_a}; an anchor set is required"))
        })?;
        let s = &anchor.set;
        require_naturals(s)?;
        let eps_p = &anchor.epsilon_prime;
        if !(eps_p.is_positive() && eps_p < epsilon) {
            return precondition(format!("ε' = {eps_p} must satisfy 0 < ε' < ε"));
        }
        let dense = eps_p * BigRational::from_integer(BigInt::from(s.len()));
        if !dense.is_integer() {
            return precondition(format!("ε'|S| = {dense} is not an integer"));
        }
        let dense = to_usize(&dense.to_integer(), "ε'|S|")?;
        if s.len() <= oracle_cap {
            let (max, _) = brute_force_max_lfree(eq, s, oracle_cap)?;
            if max != dense {
                return precondition(format!("anchor's largest L-free subset has {max} elements, not ε'|S| = {dense}"));
            }
        }
        let r_q = (&kq - &eps_a) / ((epsilon - eps_p) * BigRational::from_integer(BigInt::from(s.len())));
        let r = to_usize(&ceil_ratio(&r_q), "r")?;
        let m = a.max().expect("nonempty").clone();
        let m_prime = s.max().expect("nonempty").clone();
        let three = BigInt::from(3);
        let step = match shape {
            EpsilonShape::SumFree => three.clone(),
            EpsilonShape::Balanced => &three * &cc,
        };
        // d_i = step^i * m * m'^(i-1)
        let mut base = a.clone();
        let mut d_i = &step * &m;
        for _ in 0..r {
            base = base.union(&s.scaled(&d_i));
            d_i = d_i * &step * &m_prime;
        }
        (base, k + r * dense, r)
    };

    let n = base.len();
    let eps_n = epsilon * BigRational::from_integer(BigInt::from(n));
    let ks = BigRational::from_integer(BigInt::from(k_star));
    let d = to_usize(&ceil_ratio(&((eps_n - ks) / (BigRational::one() - epsilon))), "d")?;
    let set = match (d, shape) {
        (0, _) => base,
        (_, EpsilonShape::SumFree) => extend_disjoint(eq, &base, n + d)?.set,
        (_, EpsilonShape::Balanced) => extend_geometric(eq, &base, d)?,
    };
    let target = to_usize(&ceil_ratio(&(epsilon * BigRational::from_integer(BigInt::from(set.len())))), "target")?;
    if target != k_star + d {
        return Err(Error::Internal(format!("ceil(ε|B|) = {target} but k* + d = {}", k_star + d)));
    }
    Ok(EpsilonInstance { set, d, r, k_star, target })
}
