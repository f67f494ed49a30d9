//! Letters and words over a finite symmetric generating set.
//!
//! A letter is a nonzero `i32`: `+(i+1)` is generator `i`, `-(i+1)` its formal inverse.

use crate::error::{Error, Result};

pub type Letter = i32;

#[inline]
pub fn gen_index(l: Letter) -> usize {
    (l.unsigned_abs() - 1) as usize
}

#[inline]
pub fn letter(gen: usize, inverse: bool) -> Letter {
    let l = gen as Letter + 1;
    if inverse {
        -l
    } else {
        l
    }
}

/// Position of a letter in the shortlex alphabet `g0, g0^-1, g1, g1^-1, ...`.
#[inline]
pub fn letter_rank(l: Letter) -> usize {
    2 * gen_index(l) + usize::from(l < 0)
}

/// All letters of a rank-`k` generating set in shortlex order.
pub fn alphabet(k: usize) -> Vec<Letter> {
    (0..k).flat_map(|g| [letter(g, false), letter(g, true)]).collect()
}

pub fn inverse_word(w: &[Letter]) -> Vec<Letter> {
    w.iter().rev().map(|l| -l).collect()
}

/// Free reduction with a stack; linear time.
pub fn free_reduce(w: &[Letter]) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Shortlex comparison in the alphabet order of [`letter_rank`].
pub fn shortlex_cmp(a: &[Letter], b: &[Letter]) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        for (x, y) in a.iter().zip(b) {
            let o = letter_rank(*x).cmp(&letter_rank(*y));
            if o.is_ne() {
                return o;
            }
        }
        std::cmp::Ordering::Equal
    })
}

/// Default generator names: `a, b, c, ...` up to 26, `x1, x2, ...` beyond.
pub fn default_names(rank: usize) -> Vec<String> {
    if rank <= 26 {
        (0..rank)
            .map(|i| ((b'a' + i as u8) as char).to_string())
            .collect()
    } else {
        (1..=rank).map(|i| format!("x{i}")).collect()
    }
}

/// Parse a word such as `"a b a^-1"`, `"a*b^2"` or `"e"`.
///
/// Tokens are separated by whitespace, `*` or `.`; a token is a generator name
/// optionally followed by `^n` for an integer exponent `n`.
pub fn parse_word(src: &str, names: &[String]) -> Result<Vec<Letter>> {
    let mut out = Vec::new();
    for tok in src
        .split(|c: char| c.is_whitespace() || c == '*' || c == '.')
        .filter(|t| !t.is_empty())
    {
        if tok == "e" || tok == "1" {
            continue;
        }
        let (name, exp) = match tok.split_once('^') {
            Some((n, e)) => {
                let e: i64 = e
                    .trim_matches(|c| c == '(' || c == ')')
                    .parse()
                    .map_err(|_| Error::input(format!("bad exponent in `{tok}`")))?;
                (n, e)
            }
            None => (tok, 1),
        };
        let gen = names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::input(format!("unknown generator symbol `{name}`")))?;
        if exp.unsigned_abs() > 1_000_000 {
            return Err(Error::input(format!("exponent too large in `{tok}`")));
        }
        let l = letter(gen, exp < 0);
        out.extend(std::iter::repeat_n(l, exp.unsigned_abs() as usize));
    }
    Ok(out)
}

pub fn format_word(w: &[Letter], names: &[String]) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    // run-length encode for readability: a a a -> a^3
    let mut parts = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let mut j = i;
        while j < w.len() && w[j] == w[i] {
            j += 1;
        }
        let run = (j - i) as i64;
        let name = &names[gen_index(w[i])];
        let exp = if w[i] < 0 { -run } else { run };
        parts.push(if exp == 1 {
            name.clone()
        } else {
            format!("{name}^{exp}")
        });
        i = j;
    }
    parts.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        default_names(2)
    }

    #[test]
    fn parse_and_format() {
        let w = parse_word("a b a^-1", &names()).unwrap();
        assert_eq!(w, vec![1, 2, -1]);
        assert_eq!(format_word(&w, &names()), "a b a^-1");
        assert_eq!(parse_word("a^3*b", &names()).unwrap(), vec![1, 1, 1, 2]);
        assert_eq!(format_word(&[1, 1, 1, 2], &names()), "a^3 b");
        assert!(parse_word("e", &names()).unwrap().is_empty());
    }

    #[test]
    fn unknown_symbol_is_input_error() {
        let err = parse_word("a q", &names()).unwrap_err();
        assert!(matches!(err, Error::Input(ref m) if m.contains("`q`")));
    }

    #[test]
    fn free_reduction() {
        assert_eq!(free_reduce(&[1, 2, -2, 1]), vec![1, 1]);
        assert_eq!(free_reduce(&[1, 2, -2, -1]), Vec::<Letter>::new());
    }
}
