//! Exact model checking of sentences on finite incidence graphs.
//!
//! The domain is every node of both sides, indexed densely (vertices first).
//! Quantifiers whose body is guarded by an ∈-atom on an outer variable range
//! over that variable's neighbours only; this is exact because every other
//! value makes the body false (∃) or true (∀). Quantified subformulas with at
//! most one free variable are memoised per value of that variable.

use std::collections::HashMap;

use super::formula::Formula;
use crate::incidence::IncidenceGraph;
use crate::{Error, Result};

type Id = usize;
type Slot = usize;

#[derive(Debug, Clone, Copy)]
enum Guard {
    /// Vertices of the edge in the slot.
    Members(Slot),
    /// Edges containing the vertex in the slot.
    Containers(Slot),
    Neighbours(Slot),
}

#[derive(Debug, Clone)]
enum Op {
    Const(bool),
    Eq(Slot, Slot),
    In(Slot, Slot),
    Not(Id),
    And(Vec<Id>),
    Or(Vec<Id>),
    Implies(Id, Id),
    Quant {
        exists: bool,
        slot: Slot,
        body: Id,
        guard: Option<Guard>,
        /// Memo key slot: `Some(None)` for closed subformulas, `Some(Some(s))`
        /// for a single free slot, `None` when not memoised.
        memo: Option<Option<Slot>>,
    },
}

/// A sentence compiled for repeated evaluation.
#[derive(Debug, Clone)]
pub struct CompiledSentence {
    ops: Vec<Op>,
    root: Id,
    slots: usize,
}

struct Compiler {
    ops: Vec<Op>,
    free: Vec<Vec<Slot>>,
    slots: usize,
    unbound: Vec<String>,
}

impl Compiler {
    fn push(&mut self, op: Op, free: Vec<Slot>) -> Id {
        self.ops.push(op);
        self.free.push(free);
        self.ops.len() - 1
    }

    fn merge(&self, ids: &[Id]) -> Vec<Slot> {
        let mut out: Vec<Slot> = ids.iter().flat_map(|&i| self.free[i].iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    fn lookup(&mut self, scope: &[(String, Slot)], name: &str) -> Slot {
        match scope.iter().rev().find(|(n, _)| n == name) {
            Some(&(_, s)) => s,
            None => {
                if !self.unbound.iter().any(|u| u == name) {
                    self.unbound.push(name.to_string());
                }
                usize::MAX
            }
        }
    }

    fn compile(&mut self, f: &Formula, scope: &mut Vec<(String, Slot)>) -> Id {
        match f {
            Formula::True => self.push(Op::Const(true), vec![]),
            Formula::False => self.push(Op::Const(false), vec![]),
            Formula::Eq(a, b) | Formula::In(a, b) => {
                let (x, y) = (self.lookup(scope, a), self.lookup(scope, b));
                let mut free = vec![x, y];
                free.sort_unstable();
                free.dedup();
                let op = if matches!(f, Formula::Eq(..)) {
                    Op::Eq(x, y)
                } else {
                    Op::In(x, y)
                };
                self.push(op, free)
            }
            Formula::Not(inner) => {
                let i = self.compile(inner, scope);
                let free = self.free[i].clone();
                self.push(Op::Not(i), free)
            }
            Formula::And(fs) | Formula::Or(fs) => {
                let ids: Vec<Id> = fs.iter().map(|g| self.compile(g, scope)).collect();
                let free = self.merge(&ids);
                let op = if matches!(f, Formula::And(_)) {
                    Op::And(ids)
                } else {
                    Op::Or(ids)
                };
                self.push(op, free)
            }
            Formula::Implies(a, b) => {
                let (i, j) = (self.compile(a, scope), self.compile(b, scope));
                let free = self.merge(&[i, j]);
                self.push(Op::Implies(i, j), free)
            }
            Formula::Exists(x, body) | Formula::Forall(x, body) => {
                let exists = matches!(f, Formula::Exists(..));
                // ∀x (a ∧ b) = ∀x a ∧ ∀x b and ∃x (a ∨ b) = ∃x a ∨ ∃x b, so
                // each part can find its own guard.
                let split = match (exists, body.as_ref()) {
                    (false, Formula::And(parts)) | (true, Formula::Or(parts)) if parts.len() > 1 => Some(parts),
                    _ => None,
                };
                if let Some(parts) = split {
                    let ids: Vec<Id> = parts
                        .iter()
                        .map(|p| {
                            let q = if exists {
                                Formula::Exists(x.clone(), Box::new(p.clone()))
                            } else {
                                Formula::Forall(x.clone(), Box::new(p.clone()))
                            };
                            self.compile(&q, scope)
                        })
                        .collect();
                    let free = self.merge(&ids);
                    let op = if exists { Op::Or(ids) } else { Op::And(ids) };
                    return self.push(op, free);
                }
                let slot = self.slots;
                self.slots += 1;
                scope.push((x.clone(), slot));
                let b = self.compile(body, scope);
                scope.pop();
                let free: Vec<Slot> = self.free[b].iter().copied().filter(|&s| s != slot).collect();
                let guard = self.guard(b, slot, exists);
                let memo = match free.as_slice() {
                    [] => Some(None),
                    [s] => Some(Some(*s)),
                    _ => None,
                };
                self.push(
                    Op::Quant {
                        exists,
                        slot,
                        body: b,
                        guard,
                        memo,
                    },
                    free,
                )
            }
            _ => {
                let expanded = f.expand();
                self.compile(&expanded, scope)
            }
        }
    }

    /// Guard atom `g` on `slot` with the other side bound outside.
    fn atom_guard(&self, g: Id, slot: Slot) -> Option<Guard> {
        match &self.ops[g] {
            Op::In(a, b) if *a == slot && *b != slot && *b != usize::MAX => Some(Guard::Members(*b)),
            Op::In(a, b) if *b == slot && *a != slot && *a != usize::MAX => Some(Guard::Containers(*a)),
            Op::Or(parts) if parts.len() == 2 => {
                match (self.atom_guard(parts[0], slot), self.atom_guard(parts[1], slot)) {
                    (Some(Guard::Members(t)), Some(Guard::Containers(u)))
                    | (Some(Guard::Containers(u)), Some(Guard::Members(t)))
                        if t == u =>
                    {
                        Some(Guard::Neighbours(t))
                    }
                    _ => None,
                }
            }
            _ => None,
        }
    }

    fn guard(&self, body: Id, slot: Slot, exists: bool) -> Option<Guard> {
        if exists {
            match &self.ops[body] {
                Op::And(parts) => parts.iter().find_map(|&p| self.atom_guard(p, slot)),
                _ => self.atom_guard(body, slot),
            }
        } else {
            let negated = |p: Id| match &self.ops[p] {
                Op::Not(inner) => self.atom_guard(*inner, slot),
                _ => None,
            };
            match &self.ops[body] {
                Op::Implies(a, _) => self.atom_guard(*a, slot),
                Op::Or(parts) => parts.iter().find_map(|&p| negated(p)),
                Op::Not(_) => negated(body),
                _ => None,
            }
        }
    }
}

impl CompiledSentence {
    pub fn new(f: &Formula) -> Result<Self> {
        let mut c = Compiler {
            ops: Vec::new(),
            free: Vec::new(),
            slots: 0,
            unbound: Vec::new(),
        };
        let root = c.compile(f, &mut Vec::new());
        if !c.unbound.is_empty() {
            c.unbound.sort();
            return Err(Error::NotASentence(c.unbound));
        }
        Ok(CompiledSentence {
            ops: c.ops,
            root,
            slots: c.slots,
        })
    }

    pub fn evaluate(&self, g: &IncidenceGraph) -> bool {
        let mut run = Run {
            s: self,
            g,
            env: vec![0; self.slots],
            memo: HashMap::new(),
        };
        run.eval(self.root)
    }
}

struct Run<'a> {
    s: &'a CompiledSentence,
    g: &'a IncidenceGraph,
    env: Vec<usize>,
    memo: HashMap<(Id, usize), bool>,
}

impl Run<'_> {
    fn member(&self, x: usize, y: usize) -> bool {
        let nv = self.g.n_v();
        x < nv && y >= nv && self.g.multiplicity(x, y - nv) > 0
    }

    fn eval(&mut self, id: Id) -> bool {
        match &self.s.ops[id] {
            Op::Const(b) => *b,
            Op::Eq(a, b) => self.env[*a] == self.env[*b],
            Op::In(a, b) => self.member(self.env[*a], self.env[*b]),
            Op::Not(i) => !self.eval(*i),
            Op::And(ids) => ids.iter().all(|&i| self.eval(i)),
            Op::Or(ids) => ids.iter().any(|&i| self.eval(i)),
            Op::Implies(a, b) => !self.eval(*a) || self.eval(*b),
            Op::Quant {
                exists,
                slot,
                body,
                guard,
                memo,
            } => {
                let (exists, slot, body, guard, memo) = (*exists, *slot, *body, *guard, *memo);
                let key = memo.map(|m| (id, m.map_or(usize::MAX, |s| self.env[s])));
                if let Some(k) = key {
                    if let Some(&v) = self.memo.get(&k) {
                        return v;
                    }
                }
                let saved = self.env[slot];
                let value = match guard {
                    Some(guard) => {
                        let range = self.guard_range(guard);
                        range.into_iter().any(|x| {
                            self.env[slot] = x;
                            self.eval(body) == exists
                        }) == exists
                    }
                    None => (0..self.g.n_nodes()).any(|x| {
                        self.env[slot] = x;
                        self.eval(body) == exists
                    }) == exists,
                };
                self.env[slot] = saved;
                if let Some(k) = key {
                    self.memo.insert(k, value);
                }
                value
            }
        }
    }

    fn guard_range(&self, guard: Guard) -> Vec<usize> {
        let nv = self.g.n_v();
        let members = |t: usize| -> Vec<usize> {
            if t >= nv {
                self.g.e_neighbors(t - nv).iter().map(|p| p.0).collect()
            } else {
                Vec::new()
            }
        };
        let containers = |t: usize| -> Vec<usize> {
            if t < nv {
                self.g.v_neighbors(t).iter().map(|p| nv + p.0).collect()
            } else {
                Vec::new()
            }
        };
        match guard {
            Guard::Members(s) => members(self.env[s]),
            Guard::Containers(s) => containers(self.env[s]),
            Guard::Neighbours(s) => {
                let t = self.env[s];
                let mut out = members(t);
                out.extend(containers(t));
                out
            }
        }
    }
}

/// Truth value of the sentence `f` on `g`.
pub fn evaluate(f: &Formula, g: &IncidenceGraph) -> Result<bool> {
    Ok(CompiledSentence::new(f)?.evaluate(g))
}
