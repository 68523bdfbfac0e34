//! Ordered odd-index sets, Koszul merge signs, and generalized binomials.
//!
//! An [`IndexSet`] is a subset of {1, .., N} for small N, stored as a bitmask
//! but with sorted-list semantics: iteration is ascending and all sign
//! conventions are phrased in terms of the sorted order.

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Hard cap on N. Presets use N <= 4; the mask leaves headroom.
pub const MAX_N: usize = 8;

/// Subset of {1, .., N}, N <= MAX_N. Indices are 1-based.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(into = "Vec<u8>", try_from = "Vec<u8>")]
pub struct IndexSet(u8);

impl IndexSet {
    pub const EMPTY: IndexSet = IndexSet(0);

    pub fn empty() -> Self {
        IndexSet(0)
    }

    /// {1, .., n}.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_N, "index cap exceeded");
        IndexSet(((1u16 << n) - 1) as u8)
    }

    /// The singleton {i}, 1-based.
    pub fn singleton(i: u8) -> Self {
        assert!(i >= 1 && i as usize <= MAX_N, "index out of range");
        IndexSet(1 << (i - 1))
    }

    pub fn from_indices(ix: &[u8]) -> Self {
        let mut s = IndexSet(0);
        for &i in ix {
            assert!(i >= 1 && i as usize <= MAX_N, "index out of range");
            assert!(!s.contains(i), "repeated index");
            s.0 |= 1 << (i - 1);
        }
        s
    }

    pub fn contains(self, i: u8) -> bool {
        i >= 1 && i as usize <= MAX_N && self.0 & (1 << (i - 1)) != 0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 | other.0)
    }

    pub fn intersection(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & other.0)
    }

    /// Set difference self \ other.
    pub fn difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 & !other.0)
    }

    pub fn symmetric_difference(self, other: IndexSet) -> IndexSet {
        IndexSet(self.0 ^ other.0)
    }

    pub fn is_disjoint(self, other: IndexSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset(self, other: IndexSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement inside {1, .., n}.
    pub fn complement(self, n: usize) -> IndexSet {
        assert!(self.is_subset(IndexSet::full(n)), "set exceeds ambient {{1..n}}");
        IndexSet(IndexSet::full(n).0 & !self.0)
    }

    /// Ascending iteration over members.
    pub fn iter(self) -> impl Iterator<Item = u8> {
        (1..=MAX_N as u8).filter(move |&i| self.contains(i))
    }

    /// All subsets of self, in mask order (deterministic).
    pub fn subsets(self) -> impl Iterator<Item = IndexSet> {
        let m = self.0;
        // Enumerate submasks ascending by iterating all masks and filtering;
        // fine for MAX_N <= 8.
        (0..=m).filter(move |s| s & !m == 0).map(IndexSet)
    }

    pub fn to_vec(self) -> Vec<u8> {
        self.iter().collect()
    }
}

impl From<IndexSet> for Vec<u8> {
    fn from(s: IndexSet) -> Vec<u8> {
        s.to_vec()
    }
}

impl TryFrom<Vec<u8>> for IndexSet {
    type Error = String;
    fn try_from(v: Vec<u8>) -> Result<Self, String> {
        let mut s = IndexSet(0);
        for i in v {
            if !(1..=MAX_N as u8).contains(&i) {
                return Err(format!("index {i} out of range 1..={MAX_N}"));
            }
            if s.contains(i) {
                return Err(format!("repeated index {i}"));
            }
            s.0 |= 1 << (i - 1);
        }
        Ok(s)
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        let mut first = true;
        for i in self.iter() {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
            first = false;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Merge sign: zeta^I zeta^J = sigma(I,J) zeta^{I union J} for sorted products
/// of pairwise anticommuting odd symbols. Zero when the sets overlap,
/// otherwise (-1)^inversions where an inversion is a pair (i,j) in I x J
/// with i > j.
pub fn sigma(i: IndexSet, j: IndexSet) -> i64 {
    if !i.is_disjoint(j) {
        return 0;
    }
    let mut inversions = 0u32;
    for a in i.iter() {
        for b in j.iter() {
            if a > b {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of concatenating several sorted blocks into one sorted block:
/// zeta^{A_1} ... zeta^{A_r} = concat_sign([A_1, .., A_r]) zeta^{A_1 union .. union A_r}.
/// Zero when blocks overlap.
pub fn concat_sign(blocks: &[IndexSet]) -> i64 {
    let mut acc = IndexSet::empty();
    let mut sign = 1i64;
    for &b in blocks {
        let s = sigma(acc, b);
        if s == 0 {
            return 0;
        }
        sign *= s;
        acc = acc.union(b);
    }
    sign
}

/// Falling factorial l (l-1) ... (l-k+1) for integer l, natural k.
pub fn falling(l: i64, k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for t in 0..k as i64 {
        acc *= BigInt::from(l - t);
    }
    acc
}

/// Factorial.
pub fn factorial(k: u32) -> BigInt {
    let mut acc = BigInt::one();
    for t in 2..=k as u64 {
        acc *= BigInt::from(t);
    }
    acc
}

/// Generalized binomial coefficient over the integers:
/// binom(l, k) = falling(l, k) / k!, defined for any integer l and natural k.
pub fn binom_general(l: i64, k: u32) -> BigInt {
    falling(l, k) / factorial(k)
}

/// Generalized trinomial binom(l; i, j) = binom(l, i) binom(l - i, j)
/// = falling(l, i+j) / (i! j!), symmetric in (i, j).
pub fn trinom_general(l: i64, i: u32, j: u32) -> BigInt {
    falling(l, i + j) / (factorial(i) * factorial(j))
}

/// (-1)^e for signed exponents.
pub fn neg1_pow(e: i64) -> i64 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// binom(m, 2) = m(m-1)/2 as a sign exponent helper.
pub fn choose2(m: i64) -> i64 {
    m * (m - 1) / 2
}

/// Normalize a word of odd symbols into (sign, sorted set). Each symbol is a
/// small integer key; returns None when a symbol repeats (square of an odd
/// symbol). Used for zeta/omega word reordering in the distribution calculus.
pub fn sort_odd_word(word: &[u16]) -> Option<(i64, Vec<u16>)> {
    let mut v: Vec<u16> = word.to_vec();
    // Insertion sort counting transpositions; words are tiny.
    let mut sign = 1i64;
    for i in 1..v.len() {
        let mut k = i;
        while k > 0 && v[k - 1] > v[k] {
            v.swap(k - 1, k);
            sign = -sign;
            k -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((sign, v))
}
