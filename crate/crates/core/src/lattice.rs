//! Lattice decomposition of a circulant into `L_n`, `Hook(n)` and `New(n)`.
//!
//! Vertex `(u, v)` of the `(p n + s)`-vertex circulant sits in row `u` at
//! column `v` and has index `u n + v`; rows `0..p-1` have `n` columns and the
//! last row has `n + s`. An edge for jump `p_i n + s_i` belongs to the lattice
//! graph when it does not wrap: either `f2 - f1 = p_i n + s_i` with
//! `u2 - u1 = p_i`, or it wraps once around the whole circulant with
//! `p + u2 - u1 = p_i`. Everything else is a hook edge.
//!
//! Hook and New edges are stored symbolically, anchored to the left edge of a
//! row (`v = offset`) or to its right end (`v = len_u(n) + offset`), which
//! makes them literally independent of `n`.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spec::CirculantSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Anchor {
    Left,
    Right,
}

/// A vertex named relative to a row boundary. `Right` with offset 0 is the
/// new vertex of that row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymVertex {
    pub row: usize,
    pub anchor: Anchor,
    pub offset: i64,
}

impl SymVertex {
    pub const fn left(row: usize, offset: i64) -> Self {
        SymVertex {
            row,
            anchor: Anchor::Left,
            offset,
        }
    }

    pub const fn right(row: usize, offset: i64) -> Self {
        SymVertex {
            row,
            anchor: Anchor::Right,
            offset,
        }
    }

    pub fn is_new(&self) -> bool {
        self.anchor == Anchor::Right && self.offset == 0
    }

    /// Column of this vertex at parameter `n`.
    pub fn column(&self, geom: &Geometry, n: i64) -> i64 {
        match self.anchor {
            Anchor::Left => self.offset,
            Anchor::Right => geom.row_len(self.row, n) + self.offset,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SymbolicEdge {
    pub tail: SymVertex,
    pub head: SymVertex,
    pub jump: usize,
}

/// Row layout shared by every member of a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Geometry {
    pub p: i64,
    pub s: i64,
}

impl Geometry {
    pub fn of(spec: &CirculantSpec) -> Self {
        Geometry {
            p: spec.p(),
            s: spec.s(),
        }
    }

    pub fn rows(&self) -> usize {
        self.p as usize
    }

    pub fn row_len(&self, row: usize, n: i64) -> i64 {
        if row as i64 == self.p - 1 {
            n + self.s
        } else {
            n
        }
    }

    pub fn size(&self, n: i64) -> i64 {
        self.p * n + self.s
    }

    pub fn index(&self, row: usize, col: i64, n: i64) -> usize {
        (row as i64 * n + col) as usize
    }

    pub fn coord(&self, index: usize, n: i64) -> (usize, i64) {
        let i = index as i64;
        let row = (i / n).min(self.p - 1);
        (row as usize, i - row * n)
    }
}

/// Boundary slot sets: `L(n)`, `R(n)` and `NV(n)`, in slot order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundarySets {
    pub left: Vec<SymVertex>,
    pub right: Vec<SymVertex>,
    pub new_vertices: Vec<SymVertex>,
    pub bar_s: usize,
}

impl BoundarySets {
    pub fn new(rows: usize, bar_s: usize) -> Self {
        let mut left = Vec::with_capacity(rows * bar_s);
        let mut right = Vec::with_capacity(rows * bar_s);
        for row in 0..rows {
            for j in 0..bar_s {
                left.push(SymVertex::left(row, j as i64));
                right.push(SymVertex::right(row, -1 - j as i64));
            }
        }
        BoundarySets {
            left,
            right,
            new_vertices: (0..rows).map(|r| SymVertex::right(r, 0)).collect(),
            bar_s,
        }
    }

    /// Slot width `p * s̄` of each tuple in a classification.
    pub fn width(&self) -> usize {
        self.left.len()
    }

    pub fn left_slot(&self, v: &SymVertex) -> Option<usize> {
        (v.anchor == Anchor::Left && (0..self.bar_s as i64).contains(&v.offset))
            .then(|| v.row * self.bar_s + v.offset as usize)
    }

    pub fn right_slot(&self, v: &SymVertex) -> Option<usize> {
        (v.anchor == Anchor::Right && (-(self.bar_s as i64)..0).contains(&v.offset))
            .then(|| v.row * self.bar_s + (-v.offset - 1) as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub tail: usize,
    pub head: usize,
    pub jump: usize,
}

/// The concrete lattice graph `L_n` together with the hook edges of `C_n`.
#[derive(Clone, Debug)]
pub struct Lattice {
    pub n: i64,
    pub geom: Geometry,
    pub size: usize,
    pub edges: Vec<Edge>,
    pub hook: Vec<Edge>,
}

impl Lattice {
    pub fn build(spec: &CirculantSpec, n: i64) -> Result<Self> {
        let residues = spec.residues(n)?;
        let geom = Geometry::of(spec);
        let size = geom.size(n) as usize;
        let mut edges = Vec::new();
        let mut hook = Vec::new();
        for tail in 0..size {
            let (u1, _) = geom.coord(tail, n);
            for (i, (jump, &r)) in spec.jumps().iter().zip(&residues).enumerate() {
                let head = (tail + r as usize) % size;
                let (u2, _) = geom.coord(head, n);
                let (f1, f2) = (tail as i64, head as i64);
                let du = u2 as i64 - u1 as i64;
                let value = jump.eval(n);
                let in_lattice = if f2 >= f1 {
                    f2 - f1 == value && du == jump.coeff
                } else {
                    geom.size(n) + f2 - f1 == value && geom.p + du == jump.coeff
                };
                let e = Edge { tail, head, jump: i };
                if in_lattice {
                    edges.push(e);
                } else {
                    hook.push(e);
                }
            }
        }
        Ok(Lattice {
            n,
            geom,
            size,
            edges,
            hook,
        })
    }

    /// Symbolic name of a concrete vertex of this lattice, or of `L_{n+1}`
    /// when `grown` (so the new column maps to offset 0).
    pub fn symbolic(&self, index: usize, grown: bool) -> SymVertex {
        let at = if grown { self.n + 1 } else { self.n };
        let (row, col) = self.geom.coord(index, at);
        let len = self.geom.row_len(row, at);
        if col < len / 2 {
            SymVertex::left(row, col)
        } else {
            SymVertex::right(row, col - self.geom.row_len(row, self.n))
        }
    }

    pub fn concrete(&self, v: &SymVertex) -> usize {
        self.geom.index(v.row, v.column(&self.geom, self.n), self.n)
    }

    fn coord_edges(&self) -> HashSet<((usize, i64), (usize, i64), usize)> {
        self.edges
            .iter()
            .map(|e| (self.geom.coord(e.tail, self.n), self.geom.coord(e.head, self.n), e.jump))
            .collect()
    }
}

/// Result of decomposing a normalized family.
#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    #[serde(skip)]
    pub spec: CirculantSpec,
    pub hook: Vec<SymbolicEdge>,
    pub new: Vec<SymbolicEdge>,
    pub boundaries: BoundarySets,
    pub n0: i64,
}

impl Decomposition {
    pub fn geometry(&self) -> Geometry {
        Geometry::of(&self.spec)
    }

    pub fn width(&self) -> usize {
        self.boundaries.width()
    }

    /// Evaluates `Hook(n)` at a concrete `n`.
    pub fn hook_at(&self, n: i64) -> Vec<Edge> {
        self.eval_edges(&self.hook, n, n)
    }

    /// Evaluates `New(n)` as edges of `L_{n+1}`.
    pub fn new_at(&self, n: i64) -> Vec<Edge> {
        let geom = self.geometry();
        self.new
            .iter()
            .map(|e| {
                let t = geom.index(e.tail.row, e.tail.column(&geom, n), n + 1);
                let h = geom.index(e.head.row, e.head.column(&geom, n), n + 1);
                Edge {
                    tail: t,
                    head: h,
                    jump: e.jump,
                }
            })
            .collect()
    }

    fn eval_edges(&self, edges: &[SymbolicEdge], n: i64, at: i64) -> Vec<Edge> {
        let geom = self.geometry();
        edges
            .iter()
            .map(|e| Edge {
                tail: geom.index(e.tail.row, e.tail.column(&geom, n), at),
                head: geom.index(e.head.row, e.head.column(&geom, n), at),
                jump: e.jump,
            })
            .collect()
    }
}

fn symbolic_hook(l: &Lattice) -> BTreeSet<SymbolicEdge> {
    l.hook
        .iter()
        .map(|e| SymbolicEdge {
            tail: l.symbolic(e.tail, false),
            head: l.symbolic(e.head, false),
            jump: e.jump,
        })
        .collect()
}

fn symbolic_new(l: &Lattice, next: &Lattice) -> BTreeSet<SymbolicEdge> {
    let old = l.coord_edges();
    next.edges
        .iter()
        .filter(|e| {
            let key = (
                next.geom.coord(e.tail, next.n),
                next.geom.coord(e.head, next.n),
                e.jump,
            );
            !old.contains(&key)
        })
        .map(|e| SymbolicEdge {
            tail: l.symbolic(e.tail, true),
            head: l.symbolic(e.head, true),
            jump: e.jump,
        })
        .collect()
}

/// Computes `Hook`, `New` and the boundary sets of a normalized family.
///
/// The sets are read off concrete lattices at `n0` and `n0 + 1` and must be
/// reproduced at `n0 + 2`; any drift is reported as an error.
pub fn decompose(spec: &CirculantSpec) -> Result<Decomposition> {
    if !spec.is_normalized() {
        return Err(Error::Unsupported(format!(
            "decompose expects a normalized family, got {spec}"
        )));
    }
    let bar_s = spec.bar_s();
    let n0 = (2 * bar_s).max(1);
    let lats = (0..4)
        .map(|k| Lattice::build(spec, n0 + k))
        .collect::<Result<Vec<_>>>()?;

    for pair in lats.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let grown = b.coord_edges();
        if !a.coord_edges().is_subset(&grown) {
            return Err(Error::Decomposition(format!(
                "E_L({}) is not contained in E_L({})",
                a.n, b.n
            )));
        }
    }
    let hooks: Vec<_> = lats[..3].iter().map(symbolic_hook).collect();
    let news: Vec<_> = lats.windows(2).take(2).map(|w| symbolic_new(&w[0], &w[1])).collect();
    if hooks.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::Decomposition("Hook(n) changes with n".into()));
    }
    if news[0] != news[1] {
        return Err(Error::Decomposition("New(n) changes with n".into()));
    }

    let boundaries = BoundarySets::new(spec.p() as usize, bar_s as usize);
    for e in &hooks[0] {
        if boundaries.right_slot(&e.tail).is_none() || boundaries.left_slot(&e.head).is_none() {
            return Err(Error::Decomposition(format!("hook edge {e:?} is not in R(n) x L(n)")));
        }
    }
    for e in &news[0] {
        let tail_ok = e.tail.is_new() || boundaries.right_slot(&e.tail).is_some();
        if !tail_ok || !e.head.is_new() {
            return Err(Error::Decomposition(format!(
                "new edge {e:?} is not in (R(n) u NV(n)) x NV(n)"
            )));
        }
    }

    Ok(Decomposition {
        spec: spec.clone(),
        hook: hooks[0].iter().copied().collect(),
        new: news[0].iter().copied().collect(),
        boundaries,
        n0,
    })
}
