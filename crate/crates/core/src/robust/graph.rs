//! Lazily explored weighted graph of product configurations and the
//! shortest-path search over it.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use crate::automata::guard::Operand;
use crate::rational::Rational;
use crate::robust::hyper::{candidates, renormalize, Hyper};
use crate::robust::project::ProductRaa;
use crate::robust::RobustError;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Vertex {
    pub state: usize,
    pub registers: Vec<Hyper>,
    /// A head-2 letter already read by a move of head 1 but not yet consumed.
    pub pending: Option<Hyper>,
    /// Whether head 2 has consumed at least one letter.
    pub nonempty: bool,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub to: usize,
    pub weight: Rational,
    pub transition: usize,
    /// The head-2 letter read, in the valuation of the source vertex.
    pub letter: Option<Hyper>,
}

/// Vertices are `(product state, registers, pending letter, nonempty)` with
/// register values drawn from `constants` up to infinitesimal offsets.
pub struct CoverabilityGraph<'a> {
    pub product: &'a ProductRaa,
    pub constants: Vec<Rational>,
    pub vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    /// `None` until the vertex has been expanded.
    edges: Vec<Option<Vec<Edge>>>,
    pub max_vertices: usize,
}

pub const SOURCE: usize = 0;

/// The constant set: 0, every product constant, the letters of `v`, `±alpha`
/// and every root `-b / a` of a cost update.
pub fn constant_set(product: &ProductRaa) -> Vec<Rational> {
    let mut cs = product.raa.constants();
    cs.push(Rational::zero());
    cs.extend(product.v.iter().cloned());
    cs.push(product.alpha.clone());
    cs.push(-&product.alpha);
    for t in &product.raa.transitions {
        if !t.acc.a2.is_zero() {
            cs.push(-(&t.acc.b / &t.acc.a2));
        }
    }
    cs.sort();
    cs.dedup();
    cs
}

impl<'a> CoverabilityGraph<'a> {
    pub fn new(product: &'a ProductRaa, max_vertices: usize) -> Self {
        let source = Vertex {
            state: product.raa.initial,
            registers: vec![Hyper::exact(Rational::zero()); product.raa.num_registers],
            pending: None,
            nonempty: false,
        };
        let mut g = CoverabilityGraph {
            product,
            constants: constant_set(product),
            vertices: Vec::new(),
            index: HashMap::new(),
            edges: Vec::new(),
            max_vertices,
        };
        g.intern(source).expect("room for the source vertex");
        g
    }

    fn intern(&mut self, v: Vertex) -> Result<usize, RobustError> {
        if let Some(&i) = self.index.get(&v) {
            return Ok(i);
        }
        if self.vertices.len() >= self.max_vertices {
            return Err(RobustError::VertexLimit {
                limit: self.max_vertices,
            });
        }
        let i = self.vertices.len();
        self.index.insert(v.clone(), i);
        self.vertices.push(v);
        self.edges.push(None);
        Ok(i)
    }

    pub fn is_target(&self, i: usize) -> bool {
        let v = &self.vertices[i];
        v.nonempty && v.pending.is_none() && self.product.raa.accepting[v.state]
    }

    pub fn edges(&mut self, i: usize) -> Result<&[Edge], RobustError> {
        if self.edges[i].is_none() {
            let out = self.successors(i)?;
            self.edges[i] = Some(out);
        }
        Ok(self.edges[i].as_deref().unwrap())
    }

    /// Edges already expanded from `i`.
    pub fn expanded(&self, i: usize) -> Option<&[Edge]> {
        self.edges[i].as_deref()
    }

    /// Expands every reachable vertex.
    pub fn explore_all(&mut self) -> Result<(), RobustError> {
        let mut i = 0;
        while i < self.vertices.len() {
            self.edges(i)?;
            i += 1;
        }
        Ok(())
    }

    fn successors(&mut self, i: usize) -> Result<Vec<Edge>, RobustError> {
        let x = self.vertices[i].clone();
        let raa = &self.product.raa;
        let c1 = self.product.curr1(x.state).map(|c| Hyper::exact(c.clone()));
        let mut live: Vec<&Hyper> = x.registers.iter().collect();
        live.extend(x.pending.iter());
        let fresh = candidates(&self.constants, &live);
        let mut found: Vec<(Vertex, Edge)> = Vec::new();
        for (ti, t) in raa.transitions.iter().enumerate() {
            if t.from != x.state {
                continue;
            }
            let needs_letter = t.mov.moves_head2() || t.reads_curr2();
            let letters: Vec<Option<Hyper>> = match (&x.pending, needs_letter) {
                (_, false) => vec![None],
                (Some(p), true) => vec![Some(p.clone())],
                (None, true) => fresh.iter().cloned().map(Some).collect(),
            };
            for d in letters {
                let lookup = |o: &Operand| match o {
                    Operand::Reg(r) => x.registers.get(*r).cloned(),
                    Operand::Curr1 => c1.clone(),
                    Operand::Curr2 => d.clone(),
                    _ => None,
                };
                if t.guard.eval_with(&lookup) != Some(true) {
                    continue;
                }
                debug_assert!(t.acc.a1.is_zero(), "head 1 is folded into constants");
                let (std, inf) = match &d {
                    Some(h) if !t.acc.a2.is_zero() => {
                        (&(&t.acc.a2 * &h.std) + &t.acc.b, t.acc.a2.signum() * h.inf)
                    }
                    _ => (t.acc.b.clone(), 0),
                };
                if std.is_negative() || (std.is_zero() && inf < 0) {
                    continue;
                }
                let Some(mut registers) = t.assign.apply(&x.registers, &lookup) else {
                    continue;
                };
                let mut pending = if t.mov.moves_head2() {
                    None
                } else if needs_letter {
                    d.clone()
                } else {
                    x.pending.clone()
                };
                renormalize(registers.iter_mut().chain(pending.iter_mut()));
                let next = Vertex {
                    state: t.to,
                    registers,
                    pending,
                    nonempty: x.nonempty || t.mov.moves_head2(),
                };
                found.push((
                    next,
                    Edge {
                        to: 0,
                        weight: std,
                        transition: ti,
                        letter: d,
                    },
                ));
            }
        }
        let mut out = Vec::with_capacity(found.len());
        for (v, mut e) in found {
            e.to = self.intern(v)?;
            out.push(e);
        }
        Ok(out)
    }
}

/// A least-weight path from the source to a target vertex.
#[derive(Clone, Debug)]
pub struct GraphPath {
    pub weight: Rational,
    /// `(source vertex, edge)` pairs in order.
    pub steps: Vec<(usize, Edge)>,
}

/// Dijkstra with exact weights. Ties in distance go to the vertex discovered
/// first, which makes the returned path reproducible.
pub fn shortest_path(g: &mut CoverabilityGraph<'_>) -> Result<Option<GraphPath>, RobustError> {
    let mut dist: Vec<Option<Rational>> = vec![Some(Rational::zero())];
    let mut pred: Vec<Option<(usize, Edge)>> = vec![None];
    let mut done: Vec<bool> = vec![false];
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((Rational::zero(), SOURCE)));
    while let Some(Reverse((d, u))) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        if g.is_target(u) {
            let mut steps = Vec::new();
            let mut at = u;
            while let Some((from, e)) = pred[at].clone() {
                steps.push((from, e));
                at = from;
            }
            steps.reverse();
            return Ok(Some(GraphPath { weight: d, steps }));
        }
        let edges = g.edges(u)?.to_vec();
        let n = g.vertices.len();
        if dist.len() < n {
            dist.resize(n, None);
            pred.resize(n, None);
            done.resize(n, false);
        }
        for e in edges {
            if done[e.to] {
                continue;
            }
            let cand = &d + &e.weight;
            if dist[e.to].as_ref().is_none_or(|old| cand < *old) {
                dist[e.to] = Some(cand.clone());
                pred[e.to] = Some((u, e.clone()));
                heap.push(Reverse((cand, e.to)));
            }
        }
    }
    Ok(None)
}
