//! Bounded functions `G -> Z` of the form `c * 1 + (finitely supported)`.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::group::{Elem, MarkedGroup};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClassFunction {
    pub constant: i64,
    /// Deviation from the constant; zero entries are never stored.
    pub finite: BTreeMap<Elem, i64>,
}

impl ClassFunction {
    pub fn constant(c: i64) -> Self {
        ClassFunction {
            constant: c,
            finite: BTreeMap::new(),
        }
    }

    pub fn zero() -> Self {
        Self::constant(0)
    }

    pub fn from_parts(constant: i64, finite: impl IntoIterator<Item = (Elem, i64)>) -> Self {
        let mut f = Self::constant(constant);
        for (g, v) in finite {
            f.add_at(g, v);
        }
        f
    }

    pub fn add_at(&mut self, g: Elem, v: i64) {
        if v == 0 {
            return;
        }
        match self.finite.entry(g) {
            Entry::Occupied(mut o) => {
                *o.get_mut() += v;
                if *o.get() == 0 {
                    o.remove();
                }
            }
            Entry::Vacant(slot) => {
                slot.insert(v);
            }
        }
    }

    pub fn value(&self, g: &Elem) -> i64 {
        self.constant + self.finite.get(g).copied().unwrap_or(0)
    }

    /// Sum of the finite part.
    pub fn finite_total(&self) -> i64 {
        self.finite.values().sum()
    }

    /// `sum |finite part|`.
    pub fn finite_mass(&self) -> i64 {
        self.finite.values().map(|v| v.abs()).sum()
    }

    /// `sup |f| <= |c| + max |finite part|`.
    pub fn sup_bound(&self) -> i64 {
        self.constant.abs() + self.finite.values().map(|v| v.abs()).max().unwrap_or(0)
    }

    pub fn is_zero_function(&self) -> bool {
        self.constant == 0 && self.finite.is_empty()
    }

    pub fn sub(&self, other: &ClassFunction) -> ClassFunction {
        let mut out = self.clone();
        out.constant -= other.constant;
        for (g, v) in &other.finite {
            out.add_at(g.clone(), -v);
        }
        out
    }

    pub fn scale(&self, k: i64) -> ClassFunction {
        ClassFunction::from_parts(
            self.constant * k,
            self.finite.iter().map(|(g, v)| (g.clone(), v * k)),
        )
    }

    /// Right translate `x -> f(x g)`. Right translation moves mass along the
    /// edges `x -- x s` of the Cayley graph, so `f - f.shifted(g)` is a
    /// uniformly finite boundary.
    pub fn shifted(&self, group: &MarkedGroup, g: &Elem) -> Result<ClassFunction> {
        let ginv = group.inv(g)?;
        let mut out = ClassFunction::constant(self.constant);
        for (x, v) in &self.finite {
            // f(x g) = v at x g = h  <=>  x = h g^-1
            out.add_at(group.mul(x, &ginv)?, *v);
        }
        Ok(out)
    }

    pub fn to_doc(&self, group: &MarkedGroup) -> ClassFunctionDoc {
        ClassFunctionDoc {
            constant: self.constant,
            finite: self
                .finite
                .iter()
                .map(|(g, v)| (group.format(g), *v))
                .collect(),
        }
    }
}

/// `{constant, finite: [[word, int]]}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFunctionDoc {
    #[serde(default)]
    pub constant: i64,
    #[serde(default)]
    pub finite: Vec<(String, i64)>,
}

impl ClassFunctionDoc {
    pub fn resolve(&self, group: &MarkedGroup) -> Result<ClassFunction> {
        let mut f = ClassFunction::constant(self.constant);
        for (w, v) in &self.finite {
            f.add_at(group.parse(w)?, *v);
        }
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_and_cancelling() {
        let g = MarkedGroup::free_abelian(2);
        let mut f = ClassFunction::constant(2);
        f.add_at(g.parse("a").unwrap(), -5);
        assert_eq!(f.sup_bound(), 7);
        assert_eq!(f.value(&g.parse("a").unwrap()), -3);
        f.add_at(g.parse("a").unwrap(), 5);
        assert!(f.finite.is_empty());
    }

    #[test]
    fn shift_moves_support() {
        let g = MarkedGroup::free(2);
        let f = ClassFunction::from_parts(0, [(g.parse("a").unwrap(), 1)]);
        let s = f.shifted(&g, &g.parse("b").unwrap()).unwrap();
        // s(x) = f(x b): nonzero at x = a b^-1
        assert_eq!(s.value(&g.parse("a b^-1").unwrap()), 1);
        assert_eq!(f.sub(&s).finite_total(), 0);
    }
}
