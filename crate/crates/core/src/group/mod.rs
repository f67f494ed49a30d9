//! Deck groups with an exact word problem.
//!
//! Four families are supported: free abelian `Z^k`, free `F_k`, closed
//! orientable surface groups of genus `g >= 2`, and finite groups given by a
//! multiplication table. Every element has a canonical coordinate vector
//! ([`Elem`]) so deck elements can be hashed and compared exactly.

pub mod dehn;
pub mod folner;
mod surface;
pub mod word;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use surface::{SurfaceCache, SurfaceCtx};
use word::{alphabet, default_names, format_word, free_reduce, gen_index, inverse_word, Letter};

pub use folner::{folner_average, FolnerScheme};

/// Canonical coordinates of a group element.
///
/// Free abelian: exponent vector. Free and surface: letters of the
/// shortlex-least geodesic word. Finite: `[index]` into the table.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elem(pub Vec<i64>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    FreeAbelian { rank: usize },
    Free { rank: usize },
    Surface { genus: usize },
    Finite { table: Vec<Vec<usize>>, generators: Vec<usize> },
}

impl GroupKind {
    pub fn tag(&self) -> &'static str {
        match self {
            GroupKind::FreeAbelian { .. } => "free-abelian",
            GroupKind::Free { .. } => "free",
            GroupKind::Surface { .. } => "surface",
            GroupKind::Finite { .. } => "finite",
        }
    }
}

/// Whether invariant means exist. Free groups of rank >= 2 and surface
/// groups carry the nonamenable tag; `F_1 = Z` is amenable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Amenability {
    Amenable,
    Nonamenable,
}

#[derive(Debug)]
struct FiniteData {
    identity: usize,
    inverse: Vec<usize>,
    dist: Vec<usize>,
    /// Shortlex-least geodesic word per element.
    words: Vec<Vec<Letter>>,
}

/// A deck group with its marked generating set.
///
/// Immutable from the caller's point of view; surface groups memoize the
/// interned ball behind a lock, so a shared `&MarkedGroup` is usable from
/// several threads.
#[derive(Debug)]
pub struct MarkedGroup {
    kind: GroupKind,
    names: Vec<String>,
    ball_budget: usize,
    finite: Option<FiniteData>,
    surface: Option<(SurfaceCtx, RwLock<SurfaceCache>)>,
}

pub const DEFAULT_NONABELIAN_BALL_BUDGET: usize = 8;
pub const DEFAULT_ABELIAN_BALL_BUDGET: usize = 64;
/// Surface canonical forms intern whole balls (~7x per radius): radius 7
/// already takes most of a minute.
pub const DEFAULT_SURFACE_BALL_BUDGET: usize = 6;

impl Clone for MarkedGroup {
    fn clone(&self) -> Self {
        let mut g = MarkedGroup::new(self.kind.clone(), Some(self.names.clone()))
            .expect("cloning a valid group");
        g.ball_budget = self.ball_budget;
        g
    }
}

impl PartialEq for MarkedGroup {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.names == other.names
    }
}

impl MarkedGroup {
    pub fn new(kind: GroupKind, names: Option<Vec<String>>) -> Result<Self> {
        let rank = match &kind {
            GroupKind::FreeAbelian { rank } | GroupKind::Free { rank } => *rank,
            GroupKind::Surface { genus } => {
                if *genus < 2 {
                    return Err(Error::input("surface groups need genus >= 2"));
                }
                2 * genus
            }
            GroupKind::Finite { generators, .. } => generators.len(),
        };
        let names = match names {
            Some(n) => {
                if n.len() != rank {
                    return Err(Error::input(format!(
                        "expected {rank} generator names, got {}",
                        n.len()
                    )));
                }
                let uniq: HashSet<_> = n.iter().collect();
                if uniq.len() != n.len() || n.iter().any(|s| s == "e" || s.is_empty()) {
                    return Err(Error::input("generator names must be distinct and not `e`"));
                }
                n
            }
            None => match &kind {
                GroupKind::Surface { genus } => (1..=*genus)
                    .flat_map(|i| [format!("a{i}"), format!("b{i}")])
                    .collect(),
                GroupKind::Finite { .. } => (1..=rank).map(|i| format!("s{i}")).collect(),
                _ => default_names(rank),
            },
        };
        let finite = match &kind {
            GroupKind::Finite { table, generators } => Some(finite_data(table, generators)?),
            _ => None,
        };
        let surface = match &kind {
            GroupKind::Surface { genus } => Some((
                SurfaceCtx::new(*genus),
                RwLock::new(SurfaceCache::default()),
            )),
            _ => None,
        };
        let ball_budget = match kind {
            GroupKind::FreeAbelian { .. } | GroupKind::Finite { .. } => DEFAULT_ABELIAN_BALL_BUDGET,
            GroupKind::Surface { .. } => DEFAULT_SURFACE_BALL_BUDGET,
            _ => DEFAULT_NONABELIAN_BALL_BUDGET,
        };
        Ok(MarkedGroup {
            kind,
            names,
            ball_budget,
            finite,
            surface,
        })
    }

    pub fn free_abelian(rank: usize) -> Self {
        Self::new(GroupKind::FreeAbelian { rank }, None).unwrap()
    }

    pub fn free(rank: usize) -> Self {
        Self::new(GroupKind::Free { rank }, None).unwrap()
    }

    pub fn surface(genus: usize) -> Self {
        Self::new(GroupKind::Surface { genus }, None).unwrap()
    }

    /// Cyclic group of order `n` as a multiplication table with one generator.
    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        let generators = vec![if n > 1 { 1 } else { 0 }];
        Self::new(GroupKind::Finite { table, generators }, None).unwrap()
    }

    /// The trivial group, presented with one (trivial) generator.
    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn with_ball_budget(mut self, budget: usize) -> Self {
        self.ball_budget = budget;
        self
    }

    pub fn ball_budget(&self) -> usize {
        self.ball_budget
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn amenability(&self) -> Amenability {
        match self.kind {
            GroupKind::Free { rank } if rank >= 2 => Amenability::Nonamenable,
            GroupKind::Surface { .. } => Amenability::Nonamenable,
            _ => Amenability::Amenable,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self.kind, GroupKind::Finite { .. })
    }

    pub fn order(&self) -> Option<usize> {
        match &self.kind {
            GroupKind::Finite { table, .. } => Some(table.len()),
            GroupKind::FreeAbelian { rank: 0 } | GroupKind::Free { rank: 0 } => Some(1),
            _ => None,
        }
    }

    pub fn identity(&self) -> Elem {
        match &self.kind {
            GroupKind::FreeAbelian { rank } => Elem(vec![0; *rank]),
            GroupKind::Free { .. } | GroupKind::Surface { .. } => Elem(Vec::new()),
            GroupKind::Finite { .. } => Elem(vec![self.finite.as_ref().unwrap().identity as i64]),
        }
    }

    pub fn is_identity(&self, g: &Elem) -> bool {
        *g == self.identity()
    }

    /// The element named by a single letter.
    pub fn letter_elem(&self, l: Letter) -> Result<Elem> {
        self.from_letters(&[l])
    }

    /// Symmetric generating set in shortlex alphabet order, paired with the letter.
    pub fn generators(&self) -> Vec<(Letter, Elem)> {
        alphabet(self.rank())
            .into_iter()
            .map(|l| (l, self.letter_elem(l).expect("generator letter")))
            .collect()
    }

    fn check_letters(&self, w: &[Letter]) -> Result<()> {
        match w.iter().find(|l| **l == 0 || gen_index(**l) >= self.rank()) {
            Some(l) => Err(Error::input(format!("letter {l} is not a declared generator"))),
            None => Ok(()),
        }
    }

    fn surface_canon(&self, w: &[Letter]) -> Result<Vec<Letter>> {
        let (ctx, lock) = self.surface.as_ref().expect("surface data");
        let reduced = ctx.dehn.reduce(w);
        let need = reduced.len();
        if need > self.ball_budget {
            return Err(Error::Budget {
                what: format!("canonical form of a surface-group word of Dehn length {need}"),
                flag: "--radius",
                needed: need,
                limit: self.ball_budget,
            });
        }
        {
            let cache = lock.read().expect("surface cache poisoned");
            if cache.radius >= need && !cache.words.is_empty() {
                return ctx
                    .lookup(&cache, &reduced)
                    .ok_or_else(|| Error::Invariant("interned ball misses an element".into()));
            }
        }
        let mut cache = lock.write().expect("surface cache poisoned");
        if cache.words.is_empty() || cache.radius < need {
            ctx.grow(&mut cache, need);
        }
        ctx.lookup(&cache, &reduced)
            .ok_or_else(|| Error::Invariant("interned ball misses an element".into()))
    }

    /// Canonical element of a word over the generators.
    pub fn from_letters(&self, w: &[Letter]) -> Result<Elem> {
        self.check_letters(w)?;
        Ok(match &self.kind {
            GroupKind::FreeAbelian { rank } => {
                let mut v = vec![0i64; *rank];
                for &l in w {
                    v[gen_index(l)] += i64::from(l.signum());
                }
                Elem(v)
            }
            GroupKind::Free { .. } => Elem(free_reduce(w).into_iter().map(i64::from).collect()),
            GroupKind::Surface { .. } => {
                Elem(self.surface_canon(w)?.into_iter().map(i64::from).collect())
            }
            GroupKind::Finite { table, generators } => {
                let fd = self.finite.as_ref().unwrap();
                let mut cur = fd.identity;
                for &l in w {
                    let g = generators[gen_index(l)];
                    let g = if l < 0 { fd.inverse[g] } else { g };
                    cur = table[cur][g];
                }
                Elem(vec![cur as i64])
            }
        })
    }

    /// Parse a word in generator names and canonicalize it.
    pub fn parse(&self, src: &str) -> Result<Elem> {
        let w = word::parse_word(src, &self.names)?;
        self.from_letters(&w)
    }

    /// Normal form as a generator sequence. Equal elements give identical
    /// sequences; for free abelian groups this is the sorted word `a^x b^y ...`.
    pub fn normal_form(&self, w: &[Letter]) -> Result<Vec<Letter>> {
        let e = self.from_letters(w)?;
        Ok(self.to_letters(&e))
    }

    pub fn to_letters(&self, g: &Elem) -> Vec<Letter> {
        match &self.kind {
            GroupKind::FreeAbelian { .. } => {
                let mut out = Vec::new();
                for (i, &x) in g.0.iter().enumerate() {
                    let l = word::letter(i, x < 0);
                    out.extend(std::iter::repeat_n(l, x.unsigned_abs() as usize));
                }
                out
            }
            GroupKind::Free { .. } | GroupKind::Surface { .. } => {
                g.0.iter().map(|&l| l as Letter).collect()
            }
            GroupKind::Finite { .. } => {
                self.finite.as_ref().unwrap().words[g.0[0] as usize].clone()
            }
        }
    }

    pub fn format(&self, g: &Elem) -> String {
        format_word(&self.to_letters(g), &self.names)
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Result<Elem> {
        Ok(match &self.kind {
            GroupKind::FreeAbelian { .. } => {
                Elem(a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect())
            }
            GroupKind::Free { .. } => {
                let w: Vec<Letter> = a.0.iter().chain(&b.0).map(|&l| l as Letter).collect();
                Elem(free_reduce(&w).into_iter().map(i64::from).collect())
            }
            GroupKind::Surface { .. } => {
                let w: Vec<Letter> = a.0.iter().chain(&b.0).map(|&l| l as Letter).collect();
                Elem(self.surface_canon(&w)?.into_iter().map(i64::from).collect())
            }
            GroupKind::Finite { table, .. } => {
                Elem(vec![table[a.0[0] as usize][b.0[0] as usize] as i64])
            }
        })
    }

    pub fn inv(&self, a: &Elem) -> Result<Elem> {
        Ok(match &self.kind {
            GroupKind::FreeAbelian { .. } => Elem(a.0.iter().map(|x| -x).collect()),
            GroupKind::Free { .. } => Elem(a.0.iter().rev().map(|x| -x).collect()),
            GroupKind::Surface { .. } => {
                let w: Vec<Letter> = a.0.iter().map(|&l| l as Letter).collect();
                Elem(
                    self.surface_canon(&inverse_word(&w))?
                        .into_iter()
                        .map(i64::from)
                        .collect(),
                )
            }
            GroupKind::Finite { .. } => {
                Elem(vec![self.finite.as_ref().unwrap().inverse[a.0[0] as usize] as i64])
            }
        })
    }

    /// Word length `|g|`.
    pub fn length(&self, g: &Elem) -> usize {
        match &self.kind {
            GroupKind::FreeAbelian { .. } => g.0.iter().map(|x| x.unsigned_abs() as usize).sum(),
            GroupKind::Free { .. } | GroupKind::Surface { .. } => g.0.len(),
            GroupKind::Finite { .. } => self.finite.as_ref().unwrap().dist[g.0[0] as usize],
        }
    }

    /// Word metric `d(g, h) = |g^-1 h|`.
    pub fn distance(&self, g: &Elem, h: &Elem) -> Result<usize> {
        Ok(self.length(&self.mul(&self.inv(g)?, h)?))
    }

    fn check_ball_budget(&self, radius: usize) -> Result<()> {
        if radius > self.ball_budget {
            return Err(Error::Budget {
                what: format!("ball of radius {radius}"),
                flag: "--radius",
                needed: radius,
                limit: self.ball_budget,
            });
        }
        Ok(())
    }

    /// Exact word-metric ball, ordered by (length, shortlex normal form).
    pub fn ball(&self, radius: usize) -> Result<Vec<Elem>> {
        self.check_ball_budget(radius)?;
        if let Some((ctx, lock)) = &self.surface {
            {
                let cache = lock.read().expect("surface cache poisoned");
                if !cache.words.is_empty() && cache.radius >= radius {
                    return Ok(surface_ball(&cache, radius));
                }
            }
            let mut cache = lock.write().expect("surface cache poisoned");
            ctx.grow(&mut cache, radius);
            return Ok(surface_ball(&cache, radius));
        }
        let gens = self.generators();
        let mut seen: HashSet<Elem> = HashSet::new();
        let id = self.identity();
        seen.insert(id.clone());
        let mut layer = vec![id];
        let mut out = layer.clone();
        for _ in 0..radius {
            let mut next = Vec::new();
            for g in &layer {
                for (_, s) in &gens {
                    let h = self.mul(g, s)?;
                    if seen.insert(h.clone()) {
                        next.push(h);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        Ok(out)
    }

    /// Elements at distance exactly `radius` from the identity.
    pub fn sphere(&self, radius: usize) -> Result<Vec<Elem>> {
        Ok(self
            .ball(radius)?
            .into_iter()
            .filter(|g| self.length(g) == radius)
            .collect())
    }

    /// All elements of a finite group, in table order.
    pub fn elements(&self) -> Option<Vec<Elem>> {
        match &self.kind {
            GroupKind::Finite { table, .. } => {
                Some((0..table.len()).map(|i| Elem(vec![i as i64])).collect())
            }
            _ => None,
        }
    }

    /// Element as an integer vector, for free abelian groups.
    pub fn as_vector(&self, g: &Elem) -> Option<Vec<i64>> {
        match self.kind {
            GroupKind::FreeAbelian { .. } => Some(g.0.clone()),
            _ => None,
        }
    }

    pub fn from_vector(&self, v: &[i64]) -> Result<Elem> {
        match self.kind {
            GroupKind::FreeAbelian { rank } if rank == v.len() => Ok(Elem(v.to_vec())),
            _ => Err(Error::input("vector coordinates need a free abelian group of matching rank")),
        }
    }

    /// Serializable description of this group.
    pub fn spec(&self) -> GroupSpec {
        let (rank, genus, table, generators) = match &self.kind {
            GroupKind::FreeAbelian { rank } | GroupKind::Free { rank } => (Some(*rank), None, None, None),
            GroupKind::Surface { genus } => (None, Some(*genus), None, None),
            GroupKind::Finite { table, generators } => {
                (None, None, Some(table.clone()), Some(generators.clone()))
            }
        };
        GroupSpec {
            kind: self.kind.tag().to_string(),
            rank,
            genus,
            table,
            generators,
            names: Some(self.names.clone()),
            ball_budget: Some(self.ball_budget),
        }
    }
}

fn surface_ball(cache: &SurfaceCache, radius: usize) -> Vec<Elem> {
    cache.spheres[..=radius]
        .iter()
        .flat_map(|s| s.iter())
        .map(|&id| Elem(cache.words[id as usize].iter().map(|&l| i64::from(l)).collect()))
        .collect()
}

fn finite_data(table: &[Vec<usize>], generators: &[usize]) -> Result<FiniteData> {
    let n = table.len();
    if n == 0 {
        return Err(Error::input("multiplication table is empty"));
    }
    if table.iter().any(|row| row.len() != n || row.iter().any(|&x| x >= n)) {
        return Err(Error::input("multiplication table must be n x n with entries < n"));
    }
    let identity = (0..n)
        .find(|&e| (0..n).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or_else(|| Error::input("multiplication table has no identity"))?;
    if n <= 100 {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::input(format!(
                            "multiplication table is not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
    }
    let mut inverse = vec![usize::MAX; n];
    for a in 0..n {
        inverse[a] = (0..n)
            .find(|&b| table[a][b] == identity)
            .ok_or_else(|| Error::input(format!("element {a} has no inverse")))?;
    }
    if generators.iter().any(|&g| g >= n) {
        return Err(Error::input("generator index out of range"));
    }
    // BFS in shortlex order gives geodesic distances and shortlex-least words.
    let mut dist = vec![usize::MAX; n];
    let mut words = vec![Vec::new(); n];
    dist[identity] = 0;
    let mut queue = VecDeque::from([identity]);
    let letters = alphabet(generators.len());
    while let Some(x) = queue.pop_front() {
        for &l in &letters {
            let g = generators[gen_index(l)];
            let g = if l < 0 { inverse[g] } else { g };
            let y = table[x][g];
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                let mut w = words[x].clone();
                w.push(l);
                words[y] = w;
                queue.push_back(y);
            }
        }
    }
    if dist.contains(&usize::MAX) {
        return Err(Error::input("generators do not generate the finite group"));
    }
    Ok(FiniteData {
        identity,
        inverse,
        dist,
        words,
    })
}

/// The group block of input documents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupSpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_budget: Option<usize>,
}

impl GroupSpec {
    pub fn build(&self) -> Result<MarkedGroup> {
        let need = |v: Option<usize>, what: &str| {
            v.ok_or_else(|| Error::input(format!("group kind `{}` needs `{what}`", self.kind)))
        };
        let kind = match self.kind.as_str() {
            "free-abelian" | "Z^k" | "abelian" => GroupKind::FreeAbelian {
                rank: need(self.rank, "rank")?,
            },
            "free" => GroupKind::Free {
                rank: need(self.rank, "rank")?,
            },
            "surface" => GroupKind::Surface {
                genus: need(self.genus, "genus")?,
            },
            "finite" => {
                let table = self
                    .table
                    .clone()
                    .ok_or_else(|| Error::input("finite group needs `table`"))?;
                let generators = match &self.generators {
                    Some(g) => g.clone(),
                    None => (0..table.len()).collect(),
                };
                GroupKind::Finite { table, generators }
            }
            other => {
                return Err(Error::input(format!(
                    "unsupported group kind `{other}` (expected free-abelian, free, surface or finite)"
                )))
            }
        };
        let g = MarkedGroup::new(kind, self.names.clone())?;
        Ok(match self.ball_budget {
            Some(b) => g.with_ball_budget(b),
            None => g,
        })
    }
}

impl fmt::Display for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            GroupKind::FreeAbelian { rank } => write!(f, "Z^{rank}"),
            GroupKind::Free { rank } => write!(f, "F_{rank}"),
            GroupKind::Surface { genus } => write!(f, "pi_1(S_{genus})"),
            GroupKind::Finite { table, .. } => write!(f, "finite group of order {}", table.len()),
        }
    }
}

/// Multiply a base element by a word, letter by letter (keeps intermediate
/// lengths small, which matters for surface groups).
pub fn mul_word(group: &MarkedGroup, base: &Elem, w: &[Letter]) -> Result<Elem> {
    let mut cur = base.clone();
    let mut cache: HashMap<Letter, Elem> = HashMap::new();
    for &l in w {
        let s = match cache.get(&l) {
            Some(s) => s.clone(),
            None => {
                let s = group.letter_elem(l)?;
                cache.insert(l, s.clone());
                s
            }
        };
        cur = group.mul(&cur, &s)?;
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use word::parse_word;

    #[test]
    fn z2_cancellation() {
        let g = MarkedGroup::free_abelian(2);
        let w = parse_word("a b a^-1", g.names()).unwrap();
        assert_eq!(g.from_letters(&w).unwrap(), Elem(vec![0, 1]));
        assert_eq!(g.normal_form(&w).unwrap(), vec![2]);
    }

    #[test]
    fn f2_free_reduction() {
        let g = MarkedGroup::free(2);
        let w = parse_word("a b b^-1 a", g.names()).unwrap();
        assert_eq!(g.normal_form(&w).unwrap(), vec![1, 1]);
    }

    #[test]
    fn genus_two_relator_is_identity() {
        let g = MarkedGroup::surface(2);
        let e = g.parse("a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1").unwrap();
        assert!(g.is_identity(&e));
    }

    #[test]
    fn radius_zero_ball_is_identity() {
        for g in [
            MarkedGroup::free_abelian(2),
            MarkedGroup::free(2),
            MarkedGroup::surface(2),
            MarkedGroup::cyclic(5),
        ] {
            assert_eq!(g.ball(0).unwrap(), vec![g.identity()]);
        }
    }

    #[test]
    fn ball_counts_closed_forms() {
        let z2 = MarkedGroup::free_abelian(2);
        let f2 = MarkedGroup::free(2);
        for r in 0..=5usize {
            assert_eq!(z2.ball(r).unwrap().len(), 2 * r * r + 2 * r + 1);
            assert_eq!(f2.ball(r).unwrap().len(), 2 * 3usize.pow(r as u32) - 1);
        }
        assert_eq!(MarkedGroup::surface(2).ball(1).unwrap().len(), 9);
    }

    #[test]
    fn budget_error_names_flag() {
        let g = MarkedGroup::free(2);
        match g.ball(9).unwrap_err() {
            Error::Budget { flag, limit, .. } => {
                assert_eq!(flag, "--radius");
                assert_eq!(limit, 8);
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn finite_table_validation() {
        let bad = GroupKind::Finite {
            table: vec![vec![0, 1], vec![1, 1]],
            generators: vec![1],
        };
        assert!(MarkedGroup::new(bad, None).is_err());
        let c3 = MarkedGroup::cyclic(3);
        let s = c3.parse("s1 s1 s1").unwrap();
        assert!(c3.is_identity(&s));
        assert_eq!(c3.length(&c3.parse("s1 s1").unwrap()), 1);
    }

    #[test]
    fn surface_inverse_and_metric() {
        let g = MarkedGroup::surface(2);
        let x = g.parse("a1 b1 a2").unwrap();
        let y = g.inv(&x).unwrap();
        assert!(g.is_identity(&g.mul(&x, &y).unwrap()));
        assert_eq!(g.distance(&x, &x).unwrap(), 0);
        // half-relator words: a1 b1 a1^-1 b1^-1 equals b2 a2 b2^-1 a2^-1
        let p = g.parse("a1 b1 a1^-1 b1^-1").unwrap();
        let q = g.parse("b2 a2 b2^-1 a2^-1").unwrap();
        assert_eq!(p, q);
        assert_eq!(g.length(&p), 4);
    }
}
