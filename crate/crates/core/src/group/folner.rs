//! Følner schemes for the amenable kinds.
//!
//! Neighborhoods are closed: `N_r(A) = {x : d(x, A) <= r}` in the word metric.
//! On an integer-valued metric this is the open `(r+1)`-neighborhood.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::{Elem, GroupKind, MarkedGroup};
use crate::class_fn::ClassFunction;
use crate::error::{Error, Result};
use crate::Q;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FolnerFamily {
    /// `F_t = [-t, t]^k` in `Z^k`.
    Boxes,
    /// `F_t = G` for a finite group.
    Whole,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FolnerScheme {
    pub family: FolnerFamily,
    pub rank: usize,
    /// Neighborhood radius `r >= 1`.
    pub radius: usize,
}

impl FolnerScheme {
    pub fn for_group(group: &MarkedGroup, radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(Error::input("Følner neighborhood radius must be positive"));
        }
        match group.kind() {
            GroupKind::FreeAbelian { rank } => Ok(FolnerScheme {
                family: FolnerFamily::Boxes,
                rank: *rank,
                radius,
            }),
            GroupKind::Finite { .. } => Ok(FolnerScheme {
                family: FolnerFamily::Whole,
                rank: group.rank(),
                radius,
            }),
            _ => Err(Error::Unsupported(format!(
                "no Følner scheme for {group}; vanishing there is certified by flow certificates"
            ))),
        }
    }

    /// `|F_t|`.
    pub fn size(&self, group: &MarkedGroup, t: usize) -> usize {
        match self.family {
            FolnerFamily::Boxes => (2 * t + 1).pow(self.rank as u32),
            FolnerFamily::Whole => group.order().unwrap_or(1),
        }
    }

    pub fn contains(&self, g: &Elem, t: usize) -> bool {
        match self.family {
            FolnerFamily::Boxes => g.0.iter().all(|x| x.unsigned_abs() as usize <= t),
            FolnerFamily::Whole => true,
        }
    }

    pub fn set(&self, group: &MarkedGroup, t: usize) -> Vec<Elem> {
        match self.family {
            FolnerFamily::Boxes => box_points(self.rank, t as i64)
                .into_iter()
                .map(Elem)
                .collect(),
            FolnerFamily::Whole => group.elements().unwrap_or_default(),
        }
    }

    /// `|N_r(F_t) ∩ N_r(G - F_t)|` by direct enumeration of the enlarged box.
    pub fn boundary_count(&self, t: usize) -> usize {
        match self.family {
            FolnerFamily::Whole => 0,
            FolnerFamily::Boxes => {
                let t = t as i64;
                let r = self.radius as i64;
                box_points(self.rank, t + r)
                    .into_iter()
                    .filter(|x| {
                        let to_f: i64 = x.iter().map(|c| (c.abs() - t).max(0)).sum();
                        let inside = x.iter().all(|c| c.abs() <= t);
                        let to_out = if inside {
                            x.iter().map(|c| t - c.abs() + 1).min().unwrap_or(1)
                        } else {
                            0
                        };
                        to_f <= r && to_out <= r
                    })
                    .count()
            }
        }
    }

    pub fn ratio(&self, group: &MarkedGroup, t: usize) -> Q {
        Q::new(
            BigInt::from(self.boundary_count(t)),
            BigInt::from(self.size(group, t)),
        )
    }
}

fn box_points(rank: usize, t: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::with_capacity(rank)];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                (-t..=t).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

/// `(sum_{g in F_t} f(g)) / |F_t|` as an exact rational.
pub fn folner_average(
    scheme: &FolnerScheme,
    group: &MarkedGroup,
    f: &ClassFunction,
    t: usize,
) -> Result<Q> {
    if FolnerScheme::for_group(group, scheme.radius)?.family != scheme.family {
        return Err(Error::input("Følner scheme does not belong to this group"));
    }
    let size = scheme.size(group, t) as i64;
    let inside: i64 = f
        .finite
        .iter()
        .filter(|(g, _)| scheme.contains(g, t))
        .map(|(_, v)| *v)
        .sum();
    let total = BigInt::from(f.constant) * BigInt::from(size) + BigInt::from(inside);
    Ok(Q::new(total, BigInt::from(size)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    #[test]
    fn constants_average_to_themselves() {
        let g = MarkedGroup::free_abelian(2);
        let s = FolnerScheme::for_group(&g, 1).unwrap();
        for t in 0..5 {
            assert_eq!(folner_average(&s, &g, &ClassFunction::constant(2), t).unwrap(), q(2, 1));
        }
    }

    #[test]
    fn delta_at_origin_diluted() {
        let g = MarkedGroup::free_abelian(2);
        let s = FolnerScheme::for_group(&g, 1).unwrap();
        let f = ClassFunction::from_parts(1, [(g.identity(), 3)]);
        // side 5 box is t = 2
        assert_eq!(folner_average(&s, &g, &f, 2).unwrap(), q(1, 1) + q(3, 25));
        let m = ClassFunction::from_parts(0, [(g.identity(), 4), (g.parse("a").unwrap(), 3)]);
        assert_eq!(folner_average(&s, &g, &m, 3).unwrap(), q(7, 49));
    }

    #[test]
    fn nonamenable_kinds_have_no_scheme() {
        assert!(matches!(
            FolnerScheme::for_group(&MarkedGroup::free(2), 1),
            Err(Error::Unsupported(_))
        ));
    }
}
