//! Canonical forms for surface-group elements.
//!
//! Elements are interned while the word-metric ball is enumerated
//! breadth-first in shortlex order, so the first word that reaches an element
//! is its shortlex-least geodesic. Lookups bucket candidates by images under
//! homomorphisms (abelianization and retractions onto `F(x, y)`) and confirm
//! equality with Dehn's algorithm.

use std::collections::HashMap;

use super::dehn::DehnReducer;
use super::word::{alphabet, free_reduce, gen_index, inverse_word, Letter};

type Key = (Vec<i32>, Vec<Vec<Letter>>);

#[derive(Debug, Default)]
pub(crate) struct SurfaceCache {
    /// Ball is complete up to this radius.
    pub radius: usize,
    pub words: Vec<Vec<Letter>>,
    pub spheres: Vec<Vec<u32>>,
    buckets: HashMap<Key, Vec<u32>>,
}

#[derive(Debug)]
pub(crate) struct SurfaceCtx {
    pub genus: usize,
    pub dehn: DehnReducer,
    pairs: Vec<(usize, usize)>,
}

impl SurfaceCtx {
    pub fn new(genus: usize) -> Self {
        let mut pairs = Vec::new();
        for i in 0..genus {
            for j in (i + 1)..genus {
                pairs.push((i, j));
            }
        }
        SurfaceCtx {
            genus,
            dehn: DehnReducer::new(genus),
            pairs,
        }
    }

    /// Homomorphism-invariant bucket key. Each handle pair `(i, j)` gives the
    /// retraction a_i->x, b_i->y, a_j->y, b_j->x (others trivial), which kills
    /// `[a_i,b_i][a_j,b_j]` and hence the relator.
    fn key(&self, w: &[Letter]) -> Key {
        let mut ab = vec![0i32; 2 * self.genus];
        for &l in w {
            ab[gen_index(l)] += l.signum();
        }
        let mut images = Vec::with_capacity(self.pairs.len());
        for &(i, j) in &self.pairs {
            let mut img = Vec::with_capacity(w.len());
            for &l in w {
                let g = gen_index(l);
                let target = if g == 2 * i || g == 2 * j + 1 {
                    1
                } else if g == 2 * i + 1 || g == 2 * j {
                    2
                } else {
                    continue;
                };
                img.push(target * l.signum());
            }
            images.push(free_reduce(&img));
        }
        (ab, images)
    }

    fn find(&self, cache: &SurfaceCache, w: &[Letter]) -> Option<u32> {
        let bucket = cache.buckets.get(&self.key(w))?;
        bucket.iter().copied().find(|&id| {
            let mut probe = w.to_vec();
            probe.extend(inverse_word(&cache.words[id as usize]));
            self.dehn.is_trivial(&probe)
        })
    }

    fn insert(&self, cache: &mut SurfaceCache, w: Vec<Letter>) -> u32 {
        let id = cache.words.len() as u32;
        cache.buckets.entry(self.key(&w)).or_default().push(id);
        cache.words.push(w);
        id
    }

    /// Extend the interned ball until it is complete up to `radius`.
    pub fn grow(&self, cache: &mut SurfaceCache, radius: usize) {
        if cache.words.is_empty() {
            let id = self.insert(cache, Vec::new());
            cache.spheres.push(vec![id]);
            cache.radius = 0;
        }
        let letters = alphabet(2 * self.genus);
        while cache.radius < radius {
            let mut next = Vec::new();
            let current = cache.spheres[cache.radius].clone();
            for id in current {
                let base = cache.words[id as usize].clone();
                for &l in &letters {
                    if base.last() == Some(&-l) {
                        continue;
                    }
                    let mut w = base.clone();
                    w.push(l);
                    if self.find(cache, &w).is_none() {
                        next.push(self.insert(cache, w));
                    }
                }
            }
            cache.spheres.push(next);
            cache.radius += 1;
        }
    }

    /// Canonical word of `w`, provided the ball of radius `|dehn(w)|` is interned.
    pub fn lookup(&self, cache: &SurfaceCache, reduced: &[Letter]) -> Option<Vec<Letter>> {
        self.find(cache, reduced)
            .map(|id| cache.words[id as usize].clone())
    }
}
