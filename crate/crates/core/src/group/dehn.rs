//! Dehn's algorithm for the genus-`g` surface group
//! `<a1, b1, ..., ag, bg | [a1,b1]...[ag,bg]>`, `g >= 2`.
//!
//! The relator has length `4g` and every piece is a single letter, so the
//! presentation is `C'(1/6)` and Dehn reduction decides triviality.

use std::collections::HashMap;

use super::word::{free_reduce, inverse_word, shortlex_cmp, Letter};

#[derive(Debug, Clone)]
pub struct DehnReducer {
    rel_len: usize,
    /// All cyclic rotations of the relator and its inverse.
    rotations: Vec<Vec<Letter>>,
    /// A two-letter prefix determines the rotation uniquely (pieces have length 1).
    by_prefix: HashMap<(Letter, Letter), usize>,
}

/// Generator `2i` is `a_{i+1}`, generator `2i+1` is `b_{i+1}`.
pub fn surface_relator(genus: usize) -> Vec<Letter> {
    let mut r = Vec::with_capacity(4 * genus);
    for i in 0..genus {
        let a = (2 * i + 1) as Letter;
        let b = (2 * i + 2) as Letter;
        r.extend([a, b, -a, -b]);
    }
    r
}

impl DehnReducer {
    pub fn new(genus: usize) -> Self {
        let r = surface_relator(genus);
        let rinv = inverse_word(&r);
        let n = r.len();
        let mut rotations = Vec::with_capacity(2 * n);
        for base in [&r, &rinv] {
            for s in 0..n {
                rotations.push((0..n).map(|i| base[(s + i) % n]).collect::<Vec<_>>());
            }
        }
        let mut by_prefix = HashMap::new();
        for (i, rot) in rotations.iter().enumerate() {
            let prev = by_prefix.insert((rot[0], rot[1]), i);
            debug_assert!(prev.is_none(), "two rotations share a two-letter prefix");
        }
        DehnReducer {
            rel_len: n,
            rotations,
            by_prefix,
        }
    }

    pub fn relator_len(&self) -> usize {
        self.rel_len
    }

    /// Candidate rewrites of one Dehn step: every subword that is more than
    /// half of a cyclic relator, replaced by the inverse of the complement.
    fn candidates(&self, w: &[Letter]) -> Vec<Vec<Letter>> {
        let half = self.rel_len / 2;
        let mut out = Vec::new();
        for p in 0..w.len().saturating_sub(1) {
            let Some(&ri) = self.by_prefix.get(&(w[p], w[p + 1])) else {
                continue;
            };
            let rot = &self.rotations[ri];
            let mut m = 2;
            while m < self.rel_len && p + m < w.len() && w[p + m] == rot[m] {
                m += 1;
            }
            if m > half {
                let mut next = Vec::with_capacity(w.len());
                next.extend_from_slice(&w[..p]);
                next.extend(rot[m..].iter().rev().map(|l| -l));
                next.extend_from_slice(&w[p + m..]);
                out.push(free_reduce(&next));
            }
        }
        out
    }

    /// Freely reduce, then apply Dehn steps until none applies. Among several
    /// applicable replacements the shortlex-least result is taken.
    pub fn reduce(&self, w: &[Letter]) -> Vec<Letter> {
        let mut cur = free_reduce(w);
        loop {
            let cands = self.candidates(&cur);
            match cands.into_iter().min_by(|a, b| shortlex_cmp(a, b)) {
                Some(next) => cur = next,
                None => return cur,
            }
        }
    }

    pub fn is_trivial(&self, w: &[Letter]) -> bool {
        self.reduce(w).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relator_reduces_to_identity() {
        let d = DehnReducer::new(2);
        let r = surface_relator(2);
        assert!(d.is_trivial(&r));
        assert!(d.is_trivial(&inverse_word(&r)));
        // any cyclic conjugate
        let rot: Vec<_> = r[3..].iter().chain(&r[..3]).copied().collect();
        assert!(d.is_trivial(&rot));
    }

    #[test]
    fn generators_are_nontrivial() {
        let d = DehnReducer::new(2);
        for l in [1, 2, 3, 4, -1] {
            assert!(!d.is_trivial(&[l]));
        }
        // a1 b1 a1^-1 b1^-1 is half the relator; it is not trivial
        assert!(!d.is_trivial(&[1, 2, -1, -2]));
    }

    #[test]
    fn long_subword_is_shortened() {
        let d = DehnReducer::new(2);
        // five letters of the relator become the inverse of the other three
        let w = [1, 2, -1, -2, 3];
        let out = d.reduce(&w);
        assert_eq!(out.len(), 3);
        assert!(d.is_trivial(&[w.as_slice(), &inverse_word(&out)].concat()));
    }
}
