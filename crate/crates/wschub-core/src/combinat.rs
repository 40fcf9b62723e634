//! Combinatorics of the index set {n choose d}: the d-element subsets of
//! {1..n} that label torus-fixed points and Schubert classes.
//!
//! The Bruhat order follows the convention
//!
//! ```text
//!     lambda >= mu   iff   lambda_i <= mu_i  for all i,
//! ```
//!
//! so *smaller* entries sit *higher*: id = {n-d+1,..,n} is the unique minimum
//! and {1,..,d} the unique maximum.  An inversion of lambda is a pair (k,l)
//! with k in lambda, l not in lambda, k < l; the length l(lambda) counts
//! inversions.  lambda' covers lambda (written lambda' -> lambda) when
//! lambda' >= lambda and l(lambda') = l(lambda) + 1.
//!
//! All orderings are deterministic (lexicographic on element lists) so that
//! every downstream table serializes byte-for-byte reproducibly.

use crate::{Error, Result};
use itertools::Itertools;

/// Hard guard on the ambient |[n]|; the packed monomial representation in
/// `poly` also relies on it.
pub const MAX_N: u32 = 12;

/// Default cap on the number of vertices C(n,d); GKM tables are quadratic in it.
pub const DEFAULT_VERTEX_CAP: u64 = 10_000;

/// A sorted d-element subset of {1..n}.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexSet {
    n: u8,
    elems: Vec<u8>,
}

/// An inversion (k,l) of some lambda: k in lambda, l not in lambda, k < l.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Inversion {
    pub k: u8,
    pub l: u8,
}

impl std::fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{self}")
    }
}

impl std::fmt::Display for IndexSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{{{}}}", self.elems.iter().join(","))
    }
}

impl IndexSet {
    /// Checked constructor; `elems` must be strictly increasing in [1..n].
    pub fn new(n: u32, elems: Vec<u8>) -> Result<Self> {
        let d = elems.len() as u32;
        if n == 0 || n > MAX_N || d == 0 || d >= n {
            return Err(Error::Domain(format!("need 0 < d < n <= {MAX_N}, got n={n} d={d}")));
        }
        let ok = elems.iter().all(|&e| e >= 1 && e as u32 <= n)
            && elems.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(Error::Domain(format!(
                "elements must be strictly increasing in [1..{n}]: {elems:?}"
            )));
        }
        Ok(IndexSet { n: n as u8, elems })
    }

    pub fn n(&self) -> u32 {
        self.n as u32
    }

    pub fn d(&self) -> u32 {
        self.elems.len() as u32
    }

    pub fn elems(&self) -> &[u8] {
        &self.elems
    }

    pub fn contains(&self, i: u8) -> bool {
        self.elems.binary_search(&i).is_ok()
    }

    /// Elements of [n] not in the set, ascending.
    pub fn complement(&self) -> Vec<u8> {
        (1..=self.n).filter(|&i| !self.contains(i)).collect()
    }

    /// l(lambda) = #inversions = sum_i (n - lambda_i - d + i) with i one-based.
    pub fn length(&self) -> u32 {
        let (n, d) = (self.n as i32, self.elems.len() as i32);
        self.elems
            .iter()
            .enumerate()
            .map(|(i0, &e)| (n - e as i32 - d + (i0 as i32 + 1)) as u32)
            .sum()
    }

    /// All inversions (k,l), ordered by k then l.
    pub fn inversions(&self) -> Vec<Inversion> {
        let mut out = Vec::new();
        for &k in &self.elems {
            for l in (k + 1)..=self.n {
                if !self.contains(l) {
                    out.push(Inversion { k, l });
                }
            }
        }
        out
    }

    /// (k,l)lambda: replace k by l.  Errors unless (k,l) is an inversion.
    pub fn apply_inversion(&self, inv: Inversion) -> Result<IndexSet> {
        if !(self.contains(inv.k) && !self.contains(inv.l) && inv.k < inv.l && inv.l <= self.n) {
            return Err(Error::Domain(format!(
                "({},{}) is not an inversion of {self}",
                inv.k, inv.l
            )));
        }
        let mut elems: Vec<u8> = self
            .elems
            .iter()
            .map(|&e| if e == inv.k { inv.l } else { e })
            .collect();
        elems.sort_unstable();
        Ok(IndexSet { n: self.n, elems })
    }

    /// All lambda' with lambda' -> lambda (one step up: replace some m in
    /// lambda by m-1 not in lambda), in lexicographic order.
    pub fn covering_elements(&self) -> Vec<IndexSet> {
        let mut out = Vec::new();
        for &m in &self.elems {
            if m >= 2 && !self.contains(m - 1) {
                let mut elems: Vec<u8> = self
                    .elems
                    .iter()
                    .map(|&e| if e == m { m - 1 } else { e })
                    .collect();
                elems.sort_unstable();
                out.push(IndexSet { n: self.n, elems });
            }
        }
        out.sort();
        out
    }

    /// All nu' with nu -> nu' (one step down: replace some m by m+1), in
    /// lexicographic order.
    pub fn covered_elements(&self) -> Vec<IndexSet> {
        let mut out = Vec::new();
        for &m in &self.elems {
            if (m as u32) < self.n() && !self.contains(m + 1) {
                let mut elems: Vec<u8> = self
                    .elems
                    .iter()
                    .map(|&e| if e == m { m + 1 } else { e })
                    .collect();
                elems.sort_unstable();
                out.push(IndexSet { n: self.n, elems });
            }
        }
        out.sort();
        out
    }

    /// The 0/1 string with a one in each lambda_i-th position; a formatting
    /// helper for cross-referencing puzzle-style conventions only.
    pub fn binary_string(&self) -> String {
        (1..=self.n)
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }

    /// Comma-joined elements, e.g. "2,3"; the JSON vertex key.
    pub fn key(&self) -> String {
        self.elems.iter().join(",")
    }

    /// Parse "2,3" back into a set.
    pub fn parse(n: u32, s: &str) -> Result<IndexSet> {
        let elems: std::result::Result<Vec<u8>, _> =
            s.split(',').map(|t| t.trim().parse::<u8>()).collect();
        let elems = elems.map_err(|e| Error::Domain(format!("bad index set {s:?}: {e}")))?;
        IndexSet::new(n, elems)
    }
}

/// All of {n choose d} in lexicographic order, under the default vertex cap.
pub fn enumerate_index_sets(n: u32, d: u32) -> Result<Vec<IndexSet>> {
    enumerate_index_sets_capped(n, d, DEFAULT_VERTEX_CAP)
}

/// As [`enumerate_index_sets`] with an explicit cap on C(n,d).
pub fn enumerate_index_sets_capped(n: u32, d: u32, cap: u64) -> Result<Vec<IndexSet>> {
    if n == 0 || n > MAX_N || d == 0 || d >= n {
        return Err(Error::Domain(format!("need 0 < d < n <= {MAX_N}, got n={n} d={d}")));
    }
    let size = binomial(n as u64, d as u64);
    if size > cap {
        return Err(Error::ResourceCap { n, d, size, cap });
    }
    Ok((1..=n as u8)
        .combinations(d as usize)
        .map(|elems| IndexSet { n: n as u8, elems })
        .collect())
}

fn binomial(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// True iff lambda >= mu in Bruhat order, i.e. lambda_i <= mu_i for all i.
/// Note the argument order: `bruhat_leq(mu, lambda)` says "mu is below lambda".
pub fn bruhat_leq(mu: &IndexSet, lambda: &IndexSet) -> bool {
    assert_eq!(
        (mu.n, mu.d()),
        (lambda.n, lambda.d()),
        "Bruhat comparison across different ambient (n,d)"
    );
    lambda.elems.iter().zip(&mu.elems).all(|(&l, &m)| l <= m)
}

/// (id, div): the unique length-0 and length-1 elements.
pub fn distinguished_elements(n: u32, d: u32) -> Result<(IndexSet, IndexSet)> {
    if n == 0 || n > MAX_N || d == 0 || d >= n {
        return Err(Error::Domain(format!("need 0 < d < n <= {MAX_N}, got n={n} d={d}")));
    }
    let id: Vec<u8> = ((n - d + 1) as u8..=n as u8).collect();
    // div = {n-d, n-d+2, ..., n}: drop the smallest of id one step down.
    let mut div = id.clone();
    div[0] -= 1;
    Ok((
        IndexSet { n: n as u8, elems: id },
        IndexSet { n: n as u8, elems: div },
    ))
}

/// The join lambda v mu (least upper bound): componentwise minimum.
pub fn join(a: &IndexSet, b: &IndexSet) -> IndexSet {
    assert_eq!((a.n, a.d()), (b.n, b.d()));
    let elems = a
        .elems
        .iter()
        .zip(&b.elems)
        .map(|(&x, &y)| x.min(y))
        .collect();
    IndexSet { n: a.n, elems }
}

/// (length, lex) comparison; any linear extension of the Bruhat order works
/// for basis expansion and this fixes one.
pub fn length_lex(a: &IndexSet, b: &IndexSet) -> std::cmp::Ordering {
    a.length().cmp(&b.length()).then_with(|| a.cmp(b))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ix(n: u32, elems: &[u8]) -> IndexSet {
        IndexSet::new(n, elems.to_vec()).unwrap()
    }

    #[test]
    fn enumerate_4_2_lists_all_six() {
        let all = enumerate_index_sets(4, 2).unwrap();
        let got: Vec<String> = all.iter().map(|s| s.key()).collect();
        assert_eq!(got, vec!["1,2", "1,3", "1,4", "2,3", "2,4", "3,4"]);
    }

    #[test]
    fn enumerate_2_1_base_case() {
        let all = enumerate_index_sets(2, 1).unwrap();
        let got: Vec<String> = all.iter().map(|s| s.key()).collect();
        assert_eq!(got, vec!["1", "2"]);
    }

    #[test]
    fn enumerate_rejects_bad_arity() {
        assert!(enumerate_index_sets(4, 0).is_err());
        assert!(enumerate_index_sets(4, 4).is_err());
        assert!(enumerate_index_sets(13, 2).is_err());
    }

    #[test]
    fn enumerate_respects_cap() {
        match enumerate_index_sets_capped(10, 5, 100) {
            Err(Error::ResourceCap { size: 252, cap: 100, .. }) => {}
            other => panic!("expected cap error, got {other:?}"),
        }
    }

    #[test]
    fn lengths_cover_full_range_once_at_extremes() {
        let all = enumerate_index_sets(4, 2).unwrap();
        let lens: Vec<u32> = all.iter().map(|s| s.length()).collect();
        assert_eq!(lens, vec![4, 3, 2, 2, 1, 0]);
        // exactly one of length 0 (id = {3,4}) and one of max length 4 ({1,2})
        assert_eq!(lens.iter().filter(|&&l| l == 0).count(), 1);
        assert_eq!(lens.iter().filter(|&&l| l == 4).count(), 1);
        for l in 0..=4 {
            assert!(lens.contains(&l));
        }
    }

    #[test]
    fn bruhat_examples() {
        // {1,4} >= {3,4}: {3,4} is the unique minimum id
        assert!(bruhat_leq(&ix(4, &[3, 4]), &ix(4, &[1, 4])));
        // {1,4} and {2,3} are incomparable: 1<=2 but 4>3
        assert!(!bruhat_leq(&ix(4, &[2, 3]), &ix(4, &[1, 4])));
        assert!(!bruhat_leq(&ix(4, &[1, 4]), &ix(4, &[2, 3])));
        // reflexive
        assert!(bruhat_leq(&ix(4, &[1, 4]), &ix(4, &[1, 4])));
    }

    #[test]
    fn bruhat_is_partial_order_and_respects_length() {
        let all = enumerate_index_sets(5, 2).unwrap();
        for a in &all {
            for b in &all {
                let ab = bruhat_leq(a, b);
                let ba = bruhat_leq(b, a);
                if ab && ba {
                    assert_eq!(a, b); // antisymmetry
                }
                if ab {
                    assert!(b.length() >= a.length());
                }
                for c in &all {
                    if ab && bruhat_leq(b, c) {
                        assert!(bruhat_leq(a, c)); // transitivity
                    }
                }
            }
        }
    }

    #[test]
    fn inversions_of_13_in_n4() {
        let inv = ix(4, &[1, 3]).inversions();
        let pairs: Vec<(u8, u8)> = inv.iter().map(|i| (i.k, i.l)).collect();
        assert_eq!(pairs, vec![(1, 2), (1, 4), (3, 4)]);
        assert_eq!(ix(4, &[1, 3]).length(), 3);
    }

    #[test]
    fn id_has_no_inversions_div_has_one() {
        assert!(ix(4, &[3, 4]).inversions().is_empty());
        let inv = ix(4, &[2, 4]).inversions();
        assert_eq!(inv.len(), 1);
        assert_eq!((inv[0].k, inv[0].l), (2, 3));
    }

    #[test]
    fn length_equals_inversion_count_everywhere() {
        for (n, d) in [(4, 2), (5, 2), (6, 3)] {
            for s in enumerate_index_sets(n, d).unwrap() {
                assert_eq!(s.length() as usize, s.inversions().len(), "{s}");
            }
        }
    }

    #[test]
    fn apply_inversion_examples() {
        assert_eq!(
            ix(4, &[2, 4]).apply_inversion(Inversion { k: 2, l: 3 }).unwrap(),
            ix(4, &[3, 4])
        );
        assert_eq!(
            ix(4, &[1, 3]).apply_inversion(Inversion { k: 1, l: 2 }).unwrap(),
            ix(4, &[2, 3])
        );
        assert_eq!(
            ix(4, &[1, 3]).apply_inversion(Inversion { k: 3, l: 4 }).unwrap(),
            ix(4, &[1, 4])
        );
        assert!(ix(4, &[1, 3]).apply_inversion(Inversion { k: 2, l: 4 }).is_err());
    }

    #[test]
    fn apply_inversion_moves_down_in_bruhat() {
        for s in enumerate_index_sets(5, 2).unwrap() {
            for inv in s.inversions() {
                let t = s.apply_inversion(inv).unwrap();
                assert!(bruhat_leq(&t, &s), "{s} >= ({},{}){s} = {t}", inv.k, inv.l);
            }
        }
    }

    #[test]
    fn covers_examples() {
        assert_eq!(
            ix(4, &[2, 4]).covering_elements(),
            vec![ix(4, &[1, 4]), ix(4, &[2, 3])]
        );
        // only div covers id
        assert_eq!(ix(4, &[3, 4]).covering_elements(), vec![ix(4, &[2, 4])]);
        // the maximum has no covers
        assert!(ix(4, &[1, 2]).covering_elements().is_empty());
    }

    #[test]
    fn covers_match_brute_force() {
        for (n, d) in [(4, 2), (5, 2), (6, 3)] {
            let all = enumerate_index_sets(n, d).unwrap();
            for s in &all {
                let brute: Vec<IndexSet> = all
                    .iter()
                    .filter(|t| bruhat_leq(s, t) && t.length() == s.length() + 1)
                    .cloned()
                    .collect();
                assert_eq!(s.covering_elements(), brute, "covers of {s}");
                let brute_down: Vec<IndexSet> = all
                    .iter()
                    .filter(|t| bruhat_leq(t, s) && s.length() == t.length() + 1)
                    .cloned()
                    .collect();
                assert_eq!(s.covered_elements(), brute_down, "covered by {s}");
            }
        }
    }

    #[test]
    fn distinguished_examples() {
        let (id, div) = distinguished_elements(4, 2).unwrap();
        assert_eq!((id.key(), div.key()), ("3,4".into(), "2,4".into()));
        let (id, div) = distinguished_elements(5, 2).unwrap();
        assert_eq!((id.key(), div.key()), ("4,5".into(), "3,5".into()));
        let (id, div) = distinguished_elements(2, 1).unwrap();
        assert_eq!((id.key(), div.key()), ("2".into(), "1".into()));
        assert_eq!(id.length(), 0);
        assert_eq!(div.length(), 1);
    }

    #[test]
    fn join_is_least_upper_bound() {
        let all = enumerate_index_sets(5, 2).unwrap();
        for a in &all {
            for b in &all {
                let j = join(a, b);
                assert!(bruhat_leq(a, &j) && bruhat_leq(b, &j));
                for c in &all {
                    if bruhat_leq(a, c) && bruhat_leq(b, c) {
                        assert!(bruhat_leq(&j, c));
                    }
                }
            }
        }
    }

    #[test]
    fn binary_string_marks_member_positions() {
        assert_eq!(ix(4, &[2, 3]).binary_string(), "0110");
        assert_eq!(ix(5, &[1, 5]).binary_string(), "10001");
    }

    #[test]
    fn key_round_trips() {
        let s = ix(6, &[2, 4, 5]);
        assert_eq!(IndexSet::parse(6, &s.key()).unwrap(), s);
        assert!(IndexSet::parse(4, "2,2").is_err());
        assert!(IndexSet::parse(4, "0,3").is_err());
    }
}
