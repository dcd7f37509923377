use std::fmt;

use super::{Space, Word};
use crate::error::{Error, Result};

/// An ultimately periodic point `prefix · period^ω` of `Σ^ω`, or a point of a
/// finite space.
///
/// Constructed values are canonical: the period is primitive and the prefix
/// does not end with the last letter of the period, so equal points compare
/// equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UPPoint {
    Index(usize),
    Periodic { prefix: Word, period: Word },
}

impl UPPoint {
    pub fn periodic(prefix: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("period of a point must be nonempty".into()));
        }
        let mut prefix = prefix;
        let mut period = primitive_root(period);
        while let (Some(&p), Some(&q)) = (prefix.last(), period.last()) {
            if p != q {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(UPPoint::Periodic { prefix, period })
    }

    pub fn parse(space: &Space, text: &str) -> Result<Self> {
        let text = text.trim();
        match space {
            Space::Finite(n) => {
                let i: usize = text
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point index {text:?}")))?;
                if i >= *n {
                    return Err(Error::Parse(format!("point {i} outside space of size {n}")));
                }
                Ok(UPPoint::Index(i))
            }
            Space::Cantor(alpha) => {
                let open = text
                    .find('(')
                    .ok_or_else(|| Error::Parse(format!("point {text:?} must look like u(v)")))?;
                if !text.ends_with(')') {
                    return Err(Error::Parse(format!("point {text:?} must look like u(v)")));
                }
                let prefix = alpha.parse_word(&text[..open])?;
                let period = alpha.parse_word(&text[open + 1..text.len() - 1])?;
                UPPoint::periodic(prefix, period)
            }
        }
    }

    pub fn display<'a>(&'a self, space: &'a Space) -> impl fmt::Display + 'a {
        PointDisplay { point: self, space }
    }

    /// The `i`-th letter of the infinite word.
    pub fn letter(&self, i: usize) -> Option<u8> {
        match self {
            UPPoint::Index(_) => None,
            UPPoint::Periodic { prefix, period } => Some(if i < prefix.len() {
                prefix[i]
            } else {
                period[(i - prefix.len()) % period.len()]
            }),
        }
    }

    pub fn has_prefix(&self, word: &[u8]) -> bool {
        word.iter()
            .enumerate()
            .all(|(i, &a)| self.letter(i) == Some(a))
    }

    /// The point with its first `n` letters removed.
    pub fn shift(&self, n: usize) -> UPPoint {
        match self {
            UPPoint::Index(_) => self.clone(),
            UPPoint::Periodic { prefix, period } => {
                if n <= prefix.len() {
                    UPPoint::periodic(prefix[n..].to_vec(), period.clone()).unwrap()
                } else {
                    let mut p = period.clone();
                    p.rotate_left((n - prefix.len()) % period.len());
                    UPPoint::periodic(Vec::new(), p).unwrap()
                }
            }
        }
    }

    /// `word · self`.
    pub fn prepend(&self, word: &[u8]) -> UPPoint {
        match self {
            UPPoint::Index(_) => self.clone(),
            UPPoint::Periodic { prefix, period } => {
                let mut w = word.to_vec();
                w.extend_from_slice(prefix);
                UPPoint::periodic(w, period.clone()).unwrap()
            }
        }
    }
}

fn primitive_root(period: Word) -> Word {
    let n = period.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d]) {
            return period[..d].to_vec();
        }
    }
    period
}

struct PointDisplay<'a> {
    point: &'a UPPoint,
    space: &'a Space,
}

impl fmt::Display for PointDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.point, self.space) {
            (UPPoint::Index(i), _) => write!(f, "{i}"),
            (UPPoint::Periodic { prefix, period }, Space::Cantor(a)) => {
                let u: String = prefix.iter().map(|&s| a.letters()[s as usize]).collect();
                let v: String = period.iter().map(|&s| a.letters()[s as usize]).collect();
                write!(f, "{u}({v})")
            }
            (UPPoint::Periodic { prefix, period }, Space::Finite(_)) => {
                write!(f, "{prefix:?}({period:?})")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_forms() {
        let p = UPPoint::periodic(vec![0], vec![1, 0]).unwrap();
        assert_eq!(p, UPPoint::periodic(vec![], vec![0, 1]).unwrap());
        let q = UPPoint::periodic(vec![0, 0, 0], vec![0, 0]).unwrap();
        assert_eq!(q, UPPoint::periodic(vec![], vec![0]).unwrap());
        let r = UPPoint::periodic(vec![1, 0], vec![1, 0, 1, 0]).unwrap();
        assert_eq!(r, UPPoint::periodic(vec![], vec![1, 0]).unwrap());
    }

    #[test]
    fn parse_and_display() {
        let space = Space::cantor("01").unwrap();
        let p = UPPoint::parse(&space, "01(1)").unwrap();
        assert_eq!(p.display(&space).to_string(), "0(1)");
        assert_eq!(UPPoint::parse(&space, "(0)").unwrap().display(&space).to_string(), "(0)");
        assert!(UPPoint::parse(&space, "01").is_err());
        assert!(UPPoint::parse(&space, "0()").is_err());
    }

    #[test]
    fn shift_and_prepend() {
        let p = UPPoint::periodic(vec![1], vec![0, 1]).unwrap();
        assert_eq!(p.shift(2), UPPoint::periodic(vec![], vec![1, 0]).unwrap());
        assert_eq!(p.shift(2).prepend(&[1, 0]), p);
        assert!(p.has_prefix(&[1, 0, 1, 0]));
        assert!(!p.has_prefix(&[0]));
    }
}
