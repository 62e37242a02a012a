//! Satisfiability of conjunctions of order constraints over the rationals.
//!
//! Constraints relate variables and constants with `<`, `<=`, `=` and `!=`.
//! The `!=`-free part is decided on the graph of `<=` edges: it is
//! unsatisfiable exactly when a strongly connected component contains a
//! strict edge (constants are chained by strict edges in their numeric
//! order, so two distinct constants can never share a component).
//! Disequalities are handled by splitting into `<` and `>`. A satisfying
//! assignment is built component by component in topological order and then
//! re-checked.

use std::collections::BTreeMap;

use crate::automata::guard::{Atom, CmpOp, Operand};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term<V> {
    Var(V),
    Const(Rational),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    Lt,
    Le,
    Eq,
    Ne,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Constraint<V> {
    pub lhs: Term<V>,
    pub rel: Rel,
    pub rhs: Term<V>,
}

impl<V> Constraint<V> {
    pub fn new(lhs: Term<V>, rel: Rel, rhs: Term<V>) -> Self {
        Constraint { lhs, rel, rhs }
    }
}

fn term_value<'a, V: Ord>(
    t: &'a Term<V>,
    vals: &'a BTreeMap<V, Rational>,
    zero: &'a Rational,
) -> &'a Rational {
    match t {
        Term::Const(c) => c,
        Term::Var(v) => vals.get(v).unwrap_or(zero),
    }
}

/// Checks a candidate assignment (unassigned variables read as 0).
pub fn holds<V: Ord>(cs: &[Constraint<V>], vals: &BTreeMap<V, Rational>) -> bool {
    let zero = Rational::zero();
    cs.iter().all(|c| {
        let l = term_value(&c.lhs, vals, &zero);
        let r = term_value(&c.rhs, vals, &zero);
        match c.rel {
            Rel::Lt => l < r,
            Rel::Le => l <= r,
            Rel::Eq => l == r,
            Rel::Ne => l != r,
        }
    })
}

/// Returns a satisfying assignment of every variable mentioned, or `None`.
pub fn solve<V: Ord + Clone>(cs: &[Constraint<V>]) -> Option<BTreeMap<V, Rational>> {
    if let Some(i) = cs.iter().position(|c| c.rel == Rel::Ne) {
        let mut rest: Vec<Constraint<V>> = cs.to_vec();
        let ne = rest.remove(i);
        // A cheap pre-check keeps the case split from exploring doomed branches.
        let eq_free: Vec<Constraint<V>> =
            rest.iter().filter(|c| c.rel != Rel::Ne).cloned().collect();
        solve_basic(&eq_free)?;
        for (l, r) in [
            (ne.lhs.clone(), ne.rhs.clone()),
            (ne.rhs.clone(), ne.lhs.clone()),
        ] {
            let mut branch = rest.clone();
            branch.push(Constraint::new(l, Rel::Lt, r));
            if let Some(sol) = solve(&branch) {
                return Some(sol);
            }
        }
        return None;
    }
    solve_basic(cs)
}

pub fn satisfiable<V: Ord + Clone>(cs: &[Constraint<V>]) -> bool {
    solve(cs).is_some()
}

struct Graph {
    adj: Vec<Vec<(usize, bool)>>,
}

fn tarjan(adj: &[Vec<(usize, bool)>]) -> (Vec<usize>, usize) {
    // Iterative Tarjan; components are numbered in completion order, which is
    // a reverse topological order of the condensation.
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut ncomp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut ei)) = call.last_mut() {
            if *ei < adj[v].len() {
                let (w, _) = adj[v][*ei];
                *ei += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = ncomp;
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

/// Bound on a value: the rational and whether it is strict.
type Bound = (Rational, bool);

fn tighter_upper(a: Option<Bound>, b: Bound) -> Option<Bound> {
    match a {
        None => Some(b),
        Some(a) => Some(match a.0.cmp(&b.0) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => (a.0, a.1 || b.1),
        }),
    }
}

fn tighter_lower(a: Option<Bound>, b: Bound) -> Option<Bound> {
    match a {
        None => Some(b),
        Some(a) => Some(match a.0.cmp(&b.0) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => (a.0, a.1 || b.1),
        }),
    }
}

fn solve_basic<V: Ord + Clone>(cs: &[Constraint<V>]) -> Option<BTreeMap<V, Rational>> {
    let mut vars: BTreeMap<V, usize> = BTreeMap::new();
    let mut consts: BTreeMap<Rational, usize> = BTreeMap::new();
    for c in cs {
        for t in [&c.lhs, &c.rhs] {
            match t {
                Term::Var(v) => {
                    let n = vars.len();
                    vars.entry(v.clone()).or_insert(n);
                }
                Term::Const(k) => {
                    consts.entry(k.clone()).or_insert(0);
                }
            }
        }
    }
    let nv = vars.len();
    let const_list: Vec<Rational> = consts.keys().cloned().collect();
    for (i, k) in const_list.iter().enumerate() {
        consts.insert(k.clone(), nv + i);
    }
    let n = nv + const_list.len();
    let node = |t: &Term<V>| match t {
        Term::Var(v) => vars[v],
        Term::Const(k) => consts[k],
    };
    let mut g = Graph {
        adj: vec![Vec::new(); n],
    };
    for c in cs {
        let (a, b) = (node(&c.lhs), node(&c.rhs));
        match c.rel {
            Rel::Lt => g.adj[a].push((b, true)),
            Rel::Le => g.adj[a].push((b, false)),
            Rel::Eq => {
                g.adj[a].push((b, false));
                g.adj[b].push((a, false));
            }
            Rel::Ne => unreachable!("disequalities are split before solve_basic"),
        }
    }
    for i in 1..const_list.len() {
        g.adj[nv + i - 1].push((nv + i, true));
    }
    let (comp, ncomp) = tarjan(&g.adj);
    for (u, edges) in g.adj.iter().enumerate() {
        for &(w, strict) in edges {
            if strict && comp[u] == comp[w] {
                return None;
            }
        }
    }
    let mut comp_const: Vec<Option<Rational>> = vec![None; ncomp];
    for (i, k) in const_list.iter().enumerate() {
        let c = comp[nv + i];
        if comp_const[c].is_some() {
            return None;
        }
        comp_const[c] = Some(k.clone());
    }
    let mut succ: Vec<Vec<(usize, bool)>> = vec![Vec::new(); ncomp];
    let mut pred: Vec<Vec<(usize, bool)>> = vec![Vec::new(); ncomp];
    for (u, edges) in g.adj.iter().enumerate() {
        for &(w, strict) in edges {
            if comp[u] != comp[w] {
                succ[comp[u]].push((comp[w], strict));
                pred[comp[w]].push((comp[u], strict));
            }
        }
    }
    // Components are numbered sinks first.
    let mut upper: Vec<Option<Bound>> = vec![None; ncomp];
    for s in 0..ncomp {
        let mut u = comp_const[s].clone().map(|c| (c, false));
        for &(t, strict) in &succ[s] {
            if let Some((val, st)) = &upper[t] {
                u = tighter_upper(u, (val.clone(), *st || strict));
            }
        }
        upper[s] = u;
    }
    let mut value: Vec<Rational> = vec![Rational::zero(); ncomp];
    for s in (0..ncomp).rev() {
        if let Some(c) = &comp_const[s] {
            value[s] = c.clone();
            continue;
        }
        let mut lower: Option<Bound> = None;
        for &(p, strict) in &pred[s] {
            lower = tighter_lower(lower, (value[p].clone(), strict));
        }
        value[s] = match (&lower, &upper[s]) {
            (None, None) => Rational::zero(),
            (Some((l, _)), None) => l + &Rational::one(),
            (None, Some((u, _))) => u - &Rational::one(),
            (Some((l, ls)), Some((u, us))) => {
                if l < u {
                    Rational::midpoint(l, u)
                } else if l == u && !ls && !us {
                    l.clone()
                } else {
                    return None;
                }
            }
        };
    }
    let sol: BTreeMap<V, Rational> = vars
        .iter()
        .map(|(v, &i)| (v.clone(), value[comp[i]].clone()))
        .collect();
    debug_assert!(
        holds(cs, &sol),
        "order witness must satisfy its constraints"
    );
    if holds(cs, &sol) {
        Some(sol)
    } else {
        None
    }
}

/// Result of translating a guard atom into an order constraint.
#[derive(Clone, Debug, PartialEq)]
pub enum Normalized {
    True,
    False,
    Constraint(Constraint<Operand>),
    /// Offsets between two non-constant operands are outside the order theory.
    Unsupported,
}

/// Translates `lhs op rhs + offset` into `Term op' Term` form.
pub fn normalize(atom: &Atom) -> Normalized {
    let (mut lhs, mut op, mut rhs, mut off) = (
        atom.lhs.clone(),
        atom.op,
        atom.rhs.clone(),
        atom.offset.clone(),
    );
    if matches!(op, CmpOp::Gt | CmpOp::Ge) {
        // x > y + o  <=>  y < x - o
        std::mem::swap(&mut lhs, &mut rhs);
        op = op.mirrored();
        off = -off;
    }
    if !off.is_zero() {
        match (&lhs, &rhs) {
            (_, Operand::Const(c)) => rhs = Operand::Const(c + &off),
            (Operand::Const(c), _) => lhs = Operand::Const(c - &off),
            _ => return Normalized::Unsupported,
        }
    }
    if let (Operand::Const(a), Operand::Const(b)) = (&lhs, &rhs) {
        return if op.holds(a.cmp(b)) {
            Normalized::True
        } else {
            Normalized::False
        };
    }
    let term = |o: Operand| match o {
        Operand::Const(c) => Term::Const(c),
        v => Term::Var(v),
    };
    let rel = match op {
        CmpOp::Lt => Rel::Lt,
        CmpOp::Le => Rel::Le,
        CmpOp::Eq => Rel::Eq,
        CmpOp::Ne => Rel::Ne,
        _ => unreachable!(),
    };
    Normalized::Constraint(Constraint::new(term(lhs), rel, term(rhs)))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sat {
    Sat(BTreeMap<Operand, Rational>),
    Unsat,
    Unknown,
}

/// Decides a conjunction of guard atoms.
pub fn check_atoms<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> Sat {
    let mut cs = Vec::new();
    let mut unknown = false;
    for a in atoms {
        match normalize(a) {
            Normalized::True => {}
            Normalized::False => return Sat::Unsat,
            Normalized::Constraint(c) => cs.push(c),
            Normalized::Unsupported => unknown = true,
        }
    }
    match solve(&cs) {
        None => Sat::Unsat,
        Some(_) if unknown => Sat::Unknown,
        Some(w) => Sat::Sat(w),
    }
}

/// `false` only when the conjunction is certainly unsatisfiable.
pub fn maybe_satisfiable<'a>(atoms: impl IntoIterator<Item = &'a Atom>) -> bool {
    !matches!(check_atoms(atoms), Sat::Unsat)
}
