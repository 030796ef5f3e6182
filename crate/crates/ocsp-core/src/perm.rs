//! Permutations in one-line notation, the sorting permutation `ord`, and
//! lexicographic rank/unrank (Lehmer code).
//!
//! A `Permutation` stores the image `[pi(0) .. pi(k-1)]`. Ranks are
//! lexicographic over one-line notation, so the identity has rank 0 and the
//! reversal has rank `k! - 1`. Predicate files rely on this encoding.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest arity for which `k!` fits in a `u64`.
pub const MAX_ARITY: usize = 20;

/// `k!` for `k <= MAX_ARITY`.
pub fn factorial(k: usize) -> Result<u64> {
    if k > MAX_ARITY {
        return Err(Error::TooLarge {
            size: k as u128,
            limit: MAX_ARITY as u128,
        });
    }
    Ok((1..=k as u64).product())
}

/// A bijection on `[k]` in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    /// Build from one-line notation, checking that `image` is a bijection on `[k]`.
    pub fn from_image(image: Vec<usize>) -> Result<Self> {
        let k = image.len();
        if k == 0 {
            return Err(Error::InvalidPermutation("empty image".into()));
        }
        if k > MAX_ARITY {
            return Err(Error::InvalidPermutation(format!(
                "arity {k} exceeds supported maximum {MAX_ARITY}"
            )));
        }
        let mut seen = vec![false; k];
        for &v in &image {
            if v >= k {
                return Err(Error::InvalidPermutation(format!(
                    "entry {v} out of range for arity {k}"
                )));
            }
            if seen[v] {
                return Err(Error::InvalidPermutation(format!("entry {v} repeated")));
            }
            seen[v] = true;
        }
        Ok(Self { image })
    }

    pub fn identity(k: usize) -> Self {
        Self {
            image: (0..k).collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.image.len()
    }

    /// `pi(i)`.
    pub fn apply(&self, i: usize) -> usize {
        self.image[i]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// Composition `self . tau`, mapping `i` to `self(tau(i))`.
    pub fn compose(&self, tau: &Permutation) -> Result<Permutation> {
        if self.arity() != tau.arity() {
            return Err(Error::ArityMismatch {
                expected: self.arity(),
                found: tau.arity(),
            });
        }
        Ok(Permutation {
            image: tau.image.iter().map(|&i| self.image[i]).collect(),
        })
    }

    /// The inverse permutation: `compose(pi, pi.invert())` is the identity.
    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0; self.arity()];
        for (i, &v) in self.image.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { image: inv }
    }

    /// Lexicographic rank of the one-line notation among all of `S_k`.
    pub fn rank(&self) -> u64 {
        let k = self.arity();
        let mut rank = 0u64;
        // Lehmer digits: how many later entries are smaller than image[i].
        for i in 0..k {
            let smaller_after = self.image[i + 1..]
                .iter()
                .filter(|&&v| v < self.image[i])
                .count() as u64;
            let suffix = factorial(k - 1 - i).expect("arity bounded by MAX_ARITY");
            rank += smaller_after * suffix;
        }
        rank
    }

    /// Inverse of [`Permutation::rank`].
    pub fn unrank(k: usize, rank: u64) -> Result<Permutation> {
        let total = factorial(k)?;
        if k == 0 || rank >= total {
            return Err(Error::OutOfRange {
                value: rank,
                bound: total,
            });
        }
        let mut remaining: Vec<usize> = (0..k).collect();
        let mut image = Vec::with_capacity(k);
        let mut r = rank;
        for i in 0..k {
            let suffix = factorial(k - 1 - i)?;
            let digit = (r / suffix) as usize;
            r %= suffix;
            image.push(remaining.remove(digit));
        }
        Ok(Permutation { image })
    }

    /// All of `S_k` in lexicographic order.
    pub fn all(k: usize) -> Result<impl Iterator<Item = Permutation>> {
        let total = factorial(k)?;
        Ok((0..total).map(move |r| Permutation::unrank(k, r).expect("rank in range")))
    }

    /// Uniformly random permutation via Fisher-Yates.
    pub fn random<R: rand::Rng + ?Sized>(k: usize, rng: &mut R) -> Permutation {
        use rand::seq::SliceRandom;
        let mut image: Vec<usize> = (0..k).collect();
        image.shuffle(rng);
        Permutation { image }
    }
}

/// The unique permutation sorting a tuple of distinct values:
/// `a[ord(a)(0)] < a[ord(a)(1)] < ...`.
pub fn ord<T: Ord>(a: &[T]) -> Result<Permutation> {
    if a.is_empty() {
        return Err(Error::InvalidPermutation("empty tuple".into()));
    }
    if a.len() > MAX_ARITY {
        return Err(Error::InvalidPermutation(format!(
            "arity {} exceeds supported maximum {MAX_ARITY}",
            a.len()
        )));
    }
    let mut idx: Vec<usize> = (0..a.len()).collect();
    idx.sort_by(|&i, &j| a[i].cmp(&a[j]));
    for w in idx.windows(2) {
        if a[w[0]] == a[w[1]] {
            return Err(Error::DuplicateEntries);
        }
    }
    Ok(Permutation { image: idx })
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parse one-line notation: `"1 0 2"`, `"[1 0 2]"`, and `"1,0,2"` all work.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        let mut image = Vec::new();
        for tok in trimmed.split(|c: char| c.is_whitespace() || c == ',') {
            if tok.is_empty() {
                continue;
            }
            let v: usize = tok
                .parse()
                .map_err(|_| Error::InvalidPermutation(format!("bad entry {tok:?}")))?;
            image.push(v);
        }
        Permutation::from_image(image)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(image: &[usize]) -> Permutation {
        Permutation::from_image(image.to_vec()).unwrap()
    }

    #[test]
    fn ord_sorts() {
        assert_eq!(ord(&[5, 9]).unwrap(), p(&[0, 1]));
        assert_eq!(ord(&[3, 1, 2]).unwrap(), p(&[1, 2, 0]));
        assert_eq!(ord(&[10, 20, 15, 5]).unwrap(), p(&[3, 0, 2, 1]));
    }

    #[test]
    fn ord_rejects_duplicates() {
        assert_eq!(ord(&[4, 4]).unwrap_err(), Error::DuplicateEntries);
        assert_eq!(ord(&[1, 2, 1]).unwrap_err(), Error::DuplicateEntries);
    }

    #[test]
    fn compose_cases() {
        assert_eq!(p(&[1, 0]).compose(&p(&[1, 0])).unwrap(), p(&[0, 1]));
        let tau = p(&[2, 0, 1]);
        assert_eq!(Permutation::identity(3).compose(&tau).unwrap(), tau);
        assert_eq!(
            p(&[1, 2, 0]).compose(&p(&[2, 0, 1])).unwrap(),
            p(&[0, 1, 2])
        );
        assert!(matches!(
            p(&[0, 1]).compose(&p(&[0, 1, 2])),
            Err(Error::ArityMismatch { .. })
        ));
    }

    #[test]
    fn invert_cases() {
        assert_eq!(p(&[0, 1, 2]).invert(), p(&[0, 1, 2]));
        assert_eq!(p(&[1, 2, 0]).invert(), p(&[2, 0, 1]));
        assert_eq!(p(&[1, 0]).invert(), p(&[1, 0]));
        for k in 1..=5 {
            for pi in Permutation::all(k).unwrap() {
                assert_eq!(pi.compose(&pi.invert()).unwrap(), Permutation::identity(k));
            }
        }
    }

    #[test]
    fn rank_unrank_round_trip() {
        for k in 1..=7 {
            let total = factorial(k).unwrap();
            for r in 0..total {
                let pi = Permutation::unrank(k, r).unwrap();
                assert_eq!(pi.rank(), r, "k={k} r={r}");
            }
        }
    }

    #[test]
    fn rank_is_lexicographic() {
        assert_eq!(Permutation::identity(4).rank(), 0);
        assert_eq!(p(&[2, 1, 0]).rank(), 5);
        assert_eq!(p(&[3, 2, 1, 0]).rank(), 23);
        // Lexicographic order of images matches numeric order of ranks.
        let perms: Vec<Permutation> = Permutation::all(4).unwrap().collect();
        for w in perms.windows(2) {
            assert!(w[0].image() < w[1].image());
        }
    }

    #[test]
    fn unrank_out_of_range() {
        assert!(matches!(
            Permutation::unrank(3, 6),
            Err(Error::OutOfRange { .. })
        ));
        assert!(Permutation::unrank(0, 0).is_err());
    }

    #[test]
    fn parse_and_display() {
        let pi: Permutation = "[1 0 2]".parse().unwrap();
        assert_eq!(pi, p(&[1, 0, 2]));
        assert_eq!("1,0,2".parse::<Permutation>().unwrap(), p(&[1, 0, 2]));
        assert_eq!(" 2 0 1 ".parse::<Permutation>().unwrap(), p(&[2, 0, 1]));
        assert_eq!(pi.to_string(), "[1 0 2]");
        assert!("".parse::<Permutation>().is_err());
        assert!("0 0".parse::<Permutation>().is_err());
        assert!("0 2".parse::<Permutation>().is_err());
    }

    #[test]
    fn invalid_images_rejected() {
        assert!(Permutation::from_image(vec![]).is_err());
        assert!(Permutation::from_image(vec![0, 0]).is_err());
        assert!(Permutation::from_image(vec![1, 2]).is_err());
    }
}
