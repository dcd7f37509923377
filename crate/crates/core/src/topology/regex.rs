//! Anchored regular expressions over a scenario alphabet.
//!
//! Grammar: concatenation, `|`, postfix `*` `+` `?`, parentheses, `ε` for
//! the empty word, `∅` for the empty language and `.` for any letter.
//! Whitespace is ignored.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::dfa::Dfa;
use super::Alphabet;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum Ast {
    Empty,
    Epsilon,
    Letter(u8),
    Any,
    Concat(Vec<Ast>),
    Alt(Vec<Ast>),
    Star(Box<Ast>),
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let pos = self.chars.get(self.pos).map(|c| c.0).unwrap_or(usize::MAX);
        Err(Error::Regex {
            pos,
            msg: msg.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|c| c.1)
    }

    fn alt(&mut self) -> Result<Ast> {
        let mut branches = vec![self.concat()?];
        while self.peek() == Some('|') {
            self.pos += 1;
            branches.push(self.concat()?);
        }
        Ok(if branches.len() == 1 {
            branches.pop().unwrap()
        } else {
            Ast::Alt(branches)
        })
    }

    fn concat(&mut self) -> Result<Ast> {
        let mut parts = Vec::new();
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            parts.push(self.postfix()?);
        }
        Ok(match parts.len() {
            0 => Ast::Epsilon,
            1 => parts.pop().unwrap(),
            _ => Ast::Concat(parts),
        })
    }

    fn postfix(&mut self) -> Result<Ast> {
        let mut atom = self.atom()?;
        while let Some(c) = self.peek() {
            atom = match c {
                '*' => Ast::Star(Box::new(atom)),
                '+' => Ast::Concat(vec![atom.clone(), Ast::Star(Box::new(atom))]),
                '?' => Ast::Alt(vec![atom, Ast::Epsilon]),
                _ => break,
            };
            self.pos += 1;
        }
        Ok(atom)
    }

    fn atom(&mut self) -> Result<Ast> {
        let Some(c) = self.peek() else {
            return self.err("unexpected end of expression");
        };
        self.pos += 1;
        match c {
            '(' => {
                let inner = self.alt()?;
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            'ε' => Ok(Ast::Epsilon),
            '∅' => Ok(Ast::Empty),
            '.' => Ok(Ast::Any),
            '*' | '+' | '?' => {
                self.pos -= 1;
                self.err(format!("dangling {c:?}"))
            }
            _ => match self.alphabet.index_of(c) {
                Some(i) => Ok(Ast::Letter(i)),
                None => {
                    self.pos -= 1;
                    self.err(format!("letter {c:?} is not in the alphabet"))
                }
            },
        }
    }
}

/// Thompson-style NFA with epsilon moves.
struct Nfa {
    eps: Vec<Vec<usize>>,
    moves: Vec<Vec<(Option<u8>, usize)>>,
}

impl Nfa {
    fn state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.moves.push(Vec::new());
        self.eps.len() - 1
    }

    /// Builds a fragment for `ast`, returning its (entry, exit).
    fn build(&mut self, ast: &Ast) -> (usize, usize) {
        let s = self.state();
        let t = self.state();
        match ast {
            Ast::Empty => {}
            Ast::Epsilon => self.eps[s].push(t),
            Ast::Letter(a) => self.moves[s].push((Some(*a), t)),
            Ast::Any => self.moves[s].push((None, t)),
            Ast::Concat(parts) => {
                let mut cur = s;
                for p in parts {
                    let (ps, pt) = self.build(p);
                    self.eps[cur].push(ps);
                    cur = pt;
                }
                self.eps[cur].push(t);
            }
            Ast::Alt(branches) => {
                for b in branches {
                    let (bs, bt) = self.build(b);
                    self.eps[s].push(bs);
                    self.eps[bt].push(t);
                }
            }
            Ast::Star(inner) => {
                let (is, it) = self.build(inner);
                self.eps[s].push(is);
                self.eps[s].push(t);
                self.eps[it].push(is);
                self.eps[it].push(t);
            }
        }
        (s, t)
    }

    fn closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &r in &self.eps[q] {
                if set.insert(r) {
                    stack.push(r);
                }
            }
        }
    }
}

/// Compiles an anchored regular expression into the canonical automaton of
/// the open set `⋃ { [w] : w ∈ L }`.
pub(crate) fn compile(alphabet: &Alphabet, text: &str) -> Result<Dfa> {
    let chars: Vec<(usize, char)> = text.char_indices().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut parser = Parser {
        chars,
        pos: 0,
        alphabet,
    };
    let ast = parser.alt()?;
    if parser.pos != parser.chars.len() {
        return parser.err("unbalanced ')'");
    }
    let k = alphabet.len();
    let mut nfa = Nfa {
        eps: Vec::new(),
        moves: Vec::new(),
    };
    let (entry, exit) = nfa.build(&ast);

    let mut start = BTreeSet::from([entry]);
    nfa.closure(&mut start);
    let mut ids: HashMap<BTreeSet<usize>, u32> = HashMap::new();
    let mut sets = vec![start.clone()];
    ids.insert(start, 0);
    let mut queue = VecDeque::from([0usize]);
    let mut delta = Vec::new();
    while let Some(i) = queue.pop_front() {
        // states are processed in creation order, so delta rows line up
        debug_assert_eq!(delta.len(), i * k);
        for a in 0..k as u8 {
            let mut next = BTreeSet::new();
            for &q in &sets[i] {
                for &(sym, r) in &nfa.moves[q] {
                    if sym.is_none() || sym == Some(a) {
                        next.insert(r);
                    }
                }
            }
            nfa.closure(&mut next);
            let fresh = sets.len() as u32;
            let id = *ids.entry(next.clone()).or_insert(fresh);
            if id == fresh {
                sets.push(next);
                queue.push_back(fresh as usize);
            }
            delta.push(id);
        }
    }
    let accept = sets.iter().map(|s| s.contains(&exit)).collect();
    Ok(Dfa {
        k,
        start: 0,
        delta,
        accept,
    }
    .canonical_open())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new("01").unwrap()
    }

    #[test]
    fn basic_languages() {
        let a = ab();
        assert_eq!(compile(&a, "ε").unwrap(), Dfa::constant(2, true));
        assert_eq!(compile(&a, "∅").unwrap(), Dfa::constant(2, false));
        assert_eq!(compile(&a, "0|1").unwrap(), Dfa::constant(2, true));
        assert_eq!(compile(&a, "1").unwrap(), Dfa::cylinder(2, &[1]));
        assert_eq!(compile(&a, "0 1").unwrap(), Dfa::cylinder(2, &[0, 1]));
        // every word containing a 0: the complement of the single point 1^ω
        let d = compile(&a, "(0|1)*0").unwrap();
        assert_eq!(d.len(), 2);
        assert!(!d.accept[d.run(&[1, 1, 1]) as usize]);
    }

    #[test]
    fn errors_are_located() {
        let a = ab();
        assert!(matches!(compile(&a, "0(1"), Err(Error::Regex { .. })));
        assert!(matches!(compile(&a, "02"), Err(Error::Regex { pos: 1, .. })));
        assert!(matches!(compile(&a, "*0"), Err(Error::Regex { pos: 0, .. })));
        assert!(matches!(compile(&a, "0)"), Err(Error::Regex { .. })));
    }
}
