//! Complete deterministic automata over symbol indices, and the graph
//! analysis used to decide topological questions about the sets they define.

use std::collections::{HashMap, VecDeque};

/// A complete DFA over the symbols `0..k`.
///
/// As an open set it denotes `⋃ { [w] : w accepted }`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Dfa {
    pub k: usize,
    pub start: u32,
    pub delta: Vec<u32>,
    pub accept: Vec<bool>,
}

impl Dfa {
    pub fn len(&self) -> usize {
        self.accept.len()
    }

    #[inline]
    pub fn step(&self, q: u32, a: u8) -> u32 {
        self.delta[q as usize * self.k + a as usize]
    }

    pub fn run_from(&self, mut q: u32, word: &[u8]) -> u32 {
        for &a in word {
            q = self.step(q, a);
        }
        q
    }

    pub fn run(&self, word: &[u8]) -> u32 {
        self.run_from(self.start, word)
    }

    /// The empty open set (`accept = false`) or the whole space.
    pub fn constant(k: usize, accept: bool) -> Dfa {
        Dfa {
            k,
            start: 0,
            delta: vec![0; k],
            accept: vec![accept],
        }
    }

    /// Canonical automaton of the cylinder `[word]`.
    pub fn cylinder(k: usize, word: &[u8]) -> Dfa {
        // states 0..=len: progress along word; len+1: dead
        let n = word.len() + 2;
        let dead = (word.len() + 1) as u32;
        let mut delta = vec![dead; n * k];
        let mut accept = vec![false; n];
        for (i, &a) in word.iter().enumerate() {
            delta[i * k + a as usize] = (i + 1) as u32;
        }
        let full = word.len();
        for a in 0..k {
            delta[full * k + a] = full as u32;
        }
        accept[full] = true;
        Dfa {
            k,
            start: 0,
            delta,
            accept,
        }
        .canonical_open()
    }

    /// Canonical form of the open set denoted by this automaton: the minimal
    /// automaton of `{w : [w] ⊆ U}`, states numbered breadth-first.
    pub fn canonical_open(mut self) -> Dfa {
        let n = self.len();
        // States from which some infinite run avoids acceptance forever.
        let mut escape: Vec<bool> = self.accept.iter().map(|&a| !a).collect();
        loop {
            let mut changed = false;
            for q in 0..n {
                if escape[q] && !(0..self.k).any(|a| escape[self.delta[q * self.k + a] as usize]) {
                    escape[q] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for q in 0..n {
            self.accept[q] = !escape[q];
            if self.accept[q] {
                for a in 0..self.k {
                    self.delta[q * self.k + a] = q as u32;
                }
            }
        }
        self.minimize()
    }

    /// Moore minimisation followed by breadth-first renumbering.
    pub fn minimize(&self) -> Dfa {
        let n = self.len();
        let k = self.k;
        let mut class: Vec<u32> = self.accept.iter().map(|&a| a as u32).collect();
        let mut count = {
            let mut seen = [false; 2];
            for &c in &class {
                seen[c as usize] = true;
            }
            seen.iter().filter(|&&s| s).count()
        };
        loop {
            let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
            let mut next = vec![0u32; n];
            for q in 0..n {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(class[q]);
                for a in 0..k {
                    sig.push(class[self.delta[q * k + a] as usize]);
                }
                let fresh = ids.len() as u32;
                next[q] = *ids.entry(sig).or_insert(fresh);
            }
            let new_count = ids.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        // BFS renumbering of the quotient, from the start class
        let mut number: HashMap<u32, u32> = HashMap::new();
        let mut rep: Vec<usize> = Vec::new();
        let mut queue = VecDeque::new();
        number.insert(class[self.start as usize], 0);
        rep.push(self.start as usize);
        queue.push_back(self.start as usize);
        let mut delta = Vec::new();
        while let Some(q) = queue.pop_front() {
            for a in 0..k {
                let t = self.delta[q * k + a] as usize;
                let c = class[t];
                let id = match number.get(&c) {
                    Some(&id) => id,
                    None => {
                        let id = rep.len() as u32;
                        number.insert(c, id);
                        rep.push(t);
                        queue.push_back(t);
                        id
                    }
                };
                delta.push(id);
            }
        }
        let accept = rep.iter().map(|&q| self.accept[q]).collect();
        Dfa {
            k,
            start: 0,
            delta,
            accept,
        }
    }

    /// States of a canonical automaton from which acceptance is unreachable.
    pub fn dead_states(&self) -> Vec<bool> {
        let g = Graph::new(self.k, self.delta.clone());
        let live = g.backward_reach(&self.accept);
        live.into_iter().map(|l| !l).collect()
    }
}

/// Transition graph with SCC data and reverse edges.
pub(crate) struct Graph {
    pub k: usize,
    pub delta: Vec<u32>,
    /// `true` if the state lies on a cycle.
    pub cyclic: Vec<bool>,
    /// SCC index of each state; components are numbered in reverse
    /// topological order (sinks first).
    pub comp: Vec<u32>,
    pub ncomp: usize,
    rev: Vec<Vec<u32>>,
}

impl Graph {
    pub fn new(k: usize, delta: Vec<u32>) -> Graph {
        let n = delta.len() / k;
        let mut rev = vec![Vec::new(); n];
        for q in 0..n {
            for a in 0..k {
                let t = delta[q * k + a] as usize;
                if rev[t].last() != Some(&(q as u32)) {
                    rev[t].push(q as u32);
                }
            }
        }
        let (comp, ncomp) = tarjan(n, k, &delta);
        let mut size = vec![0usize; ncomp];
        for &c in &comp {
            size[c as usize] += 1;
        }
        let cyclic = (0..n)
            .map(|q| {
                size[comp[q] as usize] > 1 || (0..k).any(|a| delta[q * k + a] as usize == q)
            })
            .collect();
        Graph {
            k,
            delta,
            cyclic,
            comp,
            ncomp,
            rev,
        }
    }

    pub fn len(&self) -> usize {
        self.cyclic.len()
    }

    #[inline]
    pub fn step(&self, q: u32, a: u8) -> u32 {
        self.delta[q as usize * self.k + a as usize]
    }

    /// States from which some target state is reachable (targets included).
    pub fn backward_reach(&self, targets: &[bool]) -> Vec<bool> {
        let mut seen = targets.to_vec();
        let mut stack: Vec<u32> = (0..self.len() as u32).filter(|&q| targets[q as usize]).collect();
        while let Some(q) = stack.pop() {
            for &p in &self.rev[q as usize] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        seen
    }

    /// States from which a cycle state satisfying `pred` is reachable.
    pub fn reaches_cycle(&self, pred: impl Fn(usize) -> bool) -> Vec<bool> {
        let targets: Vec<bool> = (0..self.len()).map(|q| self.cyclic[q] && pred(q)).collect();
        self.backward_reach(&targets)
    }

    /// `true` for states whose component has no edge leaving it.
    pub fn bottom(&self) -> Vec<bool> {
        let mut leaves = vec![false; self.ncomp];
        for q in 0..self.len() {
            for a in 0..self.k {
                let t = self.delta[q * self.k + a] as usize;
                if self.comp[t] != self.comp[q] {
                    leaves[self.comp[q] as usize] = true;
                }
            }
        }
        (0..self.len()).map(|q| !leaves[self.comp[q] as usize]).collect()
    }
}

fn tarjan(n: usize, k: usize, delta: &[u32]) -> (Vec<u32>, usize) {
    const UNSET: u32 = u32::MAX;
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let mut counter = 0u32;
    let mut ncomp = 0usize;
    for root in 0..n {
        if index[root] != UNSET {
            continue;
        }
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        call.push((root as u32, 0));
        while let Some(top) = call.last_mut() {
            let v = top.0 as usize;
            if top.1 < k {
                let w = delta[v * k + top.1] as usize;
                top.1 += 1;
                if index[w] == UNSET {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(parent) = call.last() {
                    let u = parent.0 as usize;
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow") as usize;
                        on_stack[w] = false;
                        comp[w] = ncomp as u32;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    (comp, ncomp)
}

/// Reachable part of the synchronous product of several automata.
pub(crate) struct Product {
    pub k: usize,
    pub delta: Vec<u32>,
    /// Component states of each product state; state 0 is the start.
    pub tuples: Vec<Box<[u32]>>,
}

impl Product {
    pub fn new(k: usize, parts: &[&Dfa]) -> Product {
        let start: Box<[u32]> = parts.iter().map(|d| d.start).collect();
        let mut ids: HashMap<Box<[u32]>, u32> = HashMap::new();
        ids.insert(start.clone(), 0);
        let mut tuples = vec![start];
        let mut delta = Vec::new();
        let mut i = 0;
        while i < tuples.len() {
            for a in 0..k {
                let next: Box<[u32]> = tuples[i]
                    .iter()
                    .zip(parts)
                    .map(|(&q, d)| d.step(q, a as u8))
                    .collect();
                let fresh = tuples.len() as u32;
                let id = *ids.entry(next.clone()).or_insert_with(|| fresh);
                if id == fresh {
                    tuples.push(next);
                }
                delta.push(id);
            }
            i += 1;
        }
        Product { k, delta, tuples }
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    /// Open set of the words reaching a state in `accept`, canonicalised.
    pub fn open_from(&self, accept: Vec<bool>) -> Dfa {
        Dfa {
            k: self.k,
            start: 0,
            delta: self.delta.clone(),
            accept,
        }
        .canonical_open()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lang_0star1() -> Dfa {
        // q0 -0-> q0, q0 -1-> acc
        Dfa {
            k: 2,
            start: 0,
            delta: vec![0, 1, 1, 1],
            accept: vec![false, true],
        }
        .canonical_open()
    }

    #[test]
    fn saturation_identifies_covering_languages() {
        // {0, 1} covers the whole space
        let d = Dfa {
            k: 2,
            start: 0,
            delta: vec![1, 1, 2, 2, 2, 2],
            accept: vec![false, true, false],
        }
        .canonical_open();
        assert_eq!(d, Dfa::constant(2, true));
    }

    #[test]
    fn cylinders_are_canonical() {
        let c = Dfa::cylinder(2, &[1]);
        assert_eq!(c.len(), 3);
        assert!(c.accept[c.run(&[1]) as usize]);
        assert!(!c.accept[c.run(&[0, 1, 1]) as usize]);
        assert_eq!(Dfa::cylinder(2, &[]), Dfa::constant(2, true));
    }

    #[test]
    fn scc_flags_cycles() {
        let d = lang_0star1();
        let g = Graph::new(2, d.delta.clone());
        assert!(g.cyclic.iter().all(|&c| c));
        let bottom = g.bottom();
        let acc = d.run(&[1]) as usize;
        assert!(bottom[acc]);
        assert!(!bottom[d.start as usize]);
    }
}
