//! Legal covers of `L_n` and their boundary classifications.
//!
//! A legal cover is a set of lattice edges where every vertex has in- and
//! out-degree at most one, in-degree exactly one off `L(n)` and out-degree
//! exactly one off `R(n)`. Its classification records the in-degree bits of
//! the `L(n)` slots and the out-degree bits of the `R(n)` slots. Both
//! [`extend`] and [`completes`] work on the classification alone.

use std::fmt;

use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{BoundarySets, Decomposition, Edge, Lattice, SymbolicEdge};
use crate::num::Rat;

/// Boundary degree profile; bit `i` of `left` is `L(i)`, bit `i` of `right`
/// is `R(i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Classification {
    pub left: u64,
    pub right: u64,
    pub width: usize,
}

impl Classification {
    pub fn new(left: &[u8], right: &[u8]) -> Self {
        assert_eq!(left.len(), right.len());
        let pack = |bits: &[u8]| {
            bits.iter()
                .enumerate()
                .fold(0u64, |acc, (i, &b)| acc | (u64::from(b & 1) << i))
        };
        Classification {
            left: pack(left),
            right: pack(right),
            width: left.len(),
        }
    }

    pub fn from_key(key: u64, width: usize) -> Self {
        let mask = (1u64 << width) - 1;
        Classification {
            left: key & mask,
            right: (key >> width) & mask,
            width,
        }
    }

    /// Packed key: left tuple in the low `width` bits, right tuple above it.
    pub fn key(&self) -> u64 {
        self.left | (self.right << self.width)
    }

    pub fn left_bit(&self, i: usize) -> bool {
        self.left >> i & 1 == 1
    }

    pub fn right_bit(&self, i: usize) -> bool {
        self.right >> i & 1 == 1
    }

    pub fn left_zeros(&self) -> Vec<usize> {
        (0..self.width).filter(|&i| !self.left_bit(i)).collect()
    }

    pub fn right_zeros(&self) -> Vec<usize> {
        (0..self.width).filter(|&i| !self.right_bit(i)).collect()
    }

    pub fn zero_count(&self) -> usize {
        2 * self.width - (self.left.count_ones() + self.right.count_ones()) as usize
    }

    pub fn bit_string(&self) -> String {
        let render = |v: u64| {
            (0..self.width)
                .map(|i| if v >> i & 1 == 1 { "1" } else { "0" })
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("(({}),({}))", render(self.left), render(self.right))
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.bit_string())
    }
}

/// A linear order on all `2^(2w)` classifications.
///
/// The canonical order is consistent: left tuples are the major key, ranked
/// by `sum L(i) 2^i`; within a left tuple, right tuples are grouped by
/// increasing number of ones (so by decreasing zero count) and ranked inside
/// a group by `sum R(i) 2^(w-1-i)`. For `w = 2` this is the plain
/// lexicographic order of the bit string `L(1) L(0) R(0) R(1)`.
#[derive(Clone, Debug)]
pub struct ClassOrder {
    width: usize,
    position_of: Vec<u32>,
    key_at: Vec<u64>,
}

impl ClassOrder {
    pub fn canonical(width: usize) -> Self {
        let side = 1usize << width;
        let rights = right_order(width);
        let mut key_at = Vec::with_capacity(side * side);
        for left in 0..side as u64 {
            for &right in &rights {
                key_at.push(left | (right << width));
            }
        }
        ClassOrder::from_keys(width, key_at).expect("canonical order is a permutation")
    }

    /// An arbitrary order, given as the keys in order.
    pub fn from_keys(width: usize, key_at: Vec<u64>) -> Result<Self> {
        let total = 1usize << (2 * width);
        if key_at.len() != total {
            return Err(Error::Inconsistency(format!(
                "order lists {} classifications, expected {total}",
                key_at.len()
            )));
        }
        let mut position_of = vec![u32::MAX; total];
        for (pos, &k) in key_at.iter().enumerate() {
            let slot = position_of
                .get_mut(k as usize)
                .ok_or_else(|| Error::Inconsistency(format!("key {k} out of range")))?;
            if *slot != u32::MAX {
                return Err(Error::Inconsistency(format!("key {k} listed twice")));
            }
            *slot = pos as u32;
        }
        Ok(ClassOrder {
            width,
            position_of,
            key_at,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.key_at.len()
    }

    pub fn is_empty(&self) -> bool {
        self.key_at.is_empty()
    }

    pub fn position(&self, x: &Classification) -> usize {
        self.position_of[x.key() as usize] as usize
    }

    pub fn at(&self, pos: usize) -> Classification {
        Classification::from_key(self.key_at[pos], self.width)
    }

    pub fn iter(&self) -> impl Iterator<Item = Classification> + '_ {
        self.key_at
            .iter()
            .map(move |&k| Classification::from_key(k, self.width))
    }

    /// Sizes of the zero-count groups within one left block of the canonical
    /// order: `C(w, w), C(w, w-1), ..., C(w, 0)`.
    pub fn zero_groups(width: usize) -> Vec<(usize, usize)> {
        // (zeros, size), in canonical order
        (0..=width)
            .map(|ones| (width - ones, binomial(width, ones)))
            .collect()
    }
}

fn right_order(width: usize) -> Vec<u64> {
    let mut rights: Vec<u64> = (0..1u64 << width).collect();
    let big_endian = |r: u64| (0..width).fold(0u64, |acc, i| (acc << 1) | (r >> i & 1));
    rights.sort_by_key(|&r| (r.count_ones(), big_endian(r)));
    rights
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All classifications in canonical order.
pub fn enumerate_classifications(decomp: &Decomposition) -> Vec<Classification> {
    ClassOrder::canonical(decomp.width()).iter().collect()
}

/// Edge set over a concrete lattice.
#[derive(Clone, Debug)]
pub struct PartialCover<'a> {
    pub lattice: &'a Lattice,
    pub edges: Vec<Edge>,
}

impl<'a> PartialCover<'a> {
    pub fn new(lattice: &'a Lattice, edges: Vec<Edge>) -> Self {
        PartialCover { lattice, edges }
    }

    pub fn degrees(&self) -> (Vec<u32>, Vec<u32>) {
        let mut indeg = vec![0u32; self.lattice.size];
        let mut outdeg = vec![0u32; self.lattice.size];
        for e in &self.edges {
            indeg[e.head] += 1;
            outdeg[e.tail] += 1;
        }
        (indeg, outdeg)
    }
}

/// Concrete indices of the boundary slots of a lattice.
pub fn slot_vertices(bounds: &BoundarySets, lattice: &Lattice) -> (Vec<usize>, Vec<usize>) {
    (
        bounds.left.iter().map(|v| lattice.concrete(v)).collect(),
        bounds.right.iter().map(|v| lattice.concrete(v)).collect(),
    )
}

/// Classification of a cover, or `None` if it is not a legal cover.
pub fn classify(bounds: &BoundarySets, cover: &PartialCover<'_>) -> Option<Classification> {
    let (indeg, outdeg) = cover.degrees();
    let (lv, rv) = slot_vertices(bounds, cover.lattice);
    let size = cover.lattice.size;
    let mut in_left = vec![false; size];
    let mut in_right = vec![false; size];
    lv.iter().for_each(|&v| in_left[v] = true);
    rv.iter().for_each(|&v| in_right[v] = true);
    for v in 0..size {
        if indeg[v] > 1 || outdeg[v] > 1 {
            return None;
        }
        if !in_left[v] && indeg[v] != 1 {
            return None;
        }
        if !in_right[v] && outdeg[v] != 1 {
            return None;
        }
    }
    let left: Vec<u8> = lv.iter().map(|&v| indeg[v] as u8).collect();
    let right: Vec<u8> = rv.iter().map(|&v| outdeg[v] as u8).collect();
    Some(Classification::new(&left, &right))
}

/// Classification of `T ∪ s_new` in `L_{n+1}` for any legal `T` classified
/// as `x`, or `None` if the union is not legal.
///
/// Applies the new edges to the right-hand bits, retires the vertex that
/// leaves each row's right window (it must have out-degree 1) and admits the
/// new vertex of each row (it must have in-degree exactly 1).
pub fn extend(decomp: &Decomposition, x: &Classification, s_new: &[SymbolicEdge]) -> Option<Classification> {
    let b = &decomp.boundaries;
    let rows = b.new_vertices.len();
    let bar_s = b.bar_s;
    let mut right = x.right;
    let mut new_in = vec![0u8; rows];
    let mut new_out = vec![0u8; rows];
    for e in s_new {
        if !e.head.is_new() {
            return None;
        }
        new_in[e.head.row] += 1;
        if e.tail.is_new() {
            new_out[e.tail.row] += 1;
        } else {
            let slot = b.right_slot(&e.tail)?;
            if right >> slot & 1 == 1 {
                return None;
            }
            right |= 1 << slot;
        }
    }
    if new_in.iter().any(|&d| d != 1) || new_out.iter().any(|&d| d > 1) {
        return None;
    }
    let mut shifted = 0u64;
    for row in 0..rows {
        let base = row * bar_s;
        if bar_s == 0 {
            if new_out[row] != 1 {
                return None;
            }
            continue;
        }
        if right >> (base + bar_s - 1) & 1 == 0 {
            return None;
        }
        shifted |= u64::from(new_out[row]) << base;
        for j in 0..bar_s - 1 {
            shifted |= (right >> (base + j) & 1) << (base + j + 1);
        }
    }
    Some(Classification {
        left: x.left,
        right: shifted,
        width: x.width,
    })
}

/// Whether adding `s_hook` to a cover classified as `x` yields a cycle cover.
pub fn completes(decomp: &Decomposition, x: &Classification, s_hook: &[SymbolicEdge]) -> bool {
    let b = &decomp.boundaries;
    let mut left = x.left;
    let mut right = x.right;
    for e in s_hook {
        let (Some(r), Some(l)) = (b.right_slot(&e.tail), b.left_slot(&e.head)) else {
            return false;
        };
        if right >> r & 1 == 1 || left >> l & 1 == 1 {
            return false;
        }
        right |= 1 << r;
        left |= 1 << l;
    }
    let full = if x.width == 0 { 0 } else { u64::MAX >> (64 - x.width) };
    left == full && right == full
}

/// All one-edge-per-new-vertex choices from `New(n)` that keep `x` legal,
/// with the resulting classification and the product of jump weights.
pub fn successors(decomp: &Decomposition, x: &Classification) -> Vec<(Classification, Rat)> {
    let rows = decomp.boundaries.new_vertices.len();
    let mut by_row: Vec<Vec<&SymbolicEdge>> = vec![Vec::new(); rows];
    for e in &decomp.new {
        by_row[e.head.row].push(e);
    }
    let mut out = Vec::new();
    let mut chosen: Vec<SymbolicEdge> = Vec::with_capacity(rows);
    fn rec(
        decomp: &Decomposition,
        x: &Classification,
        by_row: &[Vec<&SymbolicEdge>],
        chosen: &mut Vec<SymbolicEdge>,
        out: &mut Vec<(Classification, Rat)>,
    ) {
        let row = chosen.len();
        if row == by_row.len() {
            if let Some(next) = extend(decomp, x, chosen) {
                let w = chosen
                    .iter()
                    .fold(Rat::one(), |acc, e| acc * decomp.spec.weight(e.jump));
                out.push((next, w));
            }
            return;
        }
        for &e in &by_row[row] {
            chosen.push(*e);
            rec(decomp, x, by_row, chosen, out);
            chosen.pop();
        }
    }
    rec(decomp, x, &by_row, &mut chosen, &mut out);
    out
}

/// Enumerates every legal cover of a concrete lattice by backtracking over
/// each vertex's out-edge, calling `visit` with the chosen edges.
pub fn for_each_legal_cover(bounds: &BoundarySets, lattice: &Lattice, mut visit: impl FnMut(&[Edge])) {
    let (lv, rv) = slot_vertices(bounds, lattice);
    let size = lattice.size;
    let mut may_lack_in = vec![false; size];
    let mut may_lack_out = vec![false; size];
    lv.iter().for_each(|&v| may_lack_in[v] = true);
    rv.iter().for_each(|&v| may_lack_out[v] = true);
    let mut out_edges: Vec<Vec<Edge>> = vec![Vec::new(); size];
    for e in &lattice.edges {
        out_edges[e.tail].push(*e);
    }
    let mut used_in = vec![false; size];
    let mut chosen = Vec::with_capacity(size);
    struct Ctx<'c, F> {
        out_edges: &'c [Vec<Edge>],
        may_lack_in: &'c [bool],
        may_lack_out: &'c [bool],
        used_in: &'c mut Vec<bool>,
        chosen: &'c mut Vec<Edge>,
        visit: &'c mut F,
    }
    fn rec<F: FnMut(&[Edge])>(ctx: &mut Ctx<'_, F>, v: usize) {
        if v == ctx.out_edges.len() {
            let ok = (0..v).all(|w| ctx.used_in[w] || ctx.may_lack_in[w]);
            if ok {
                (ctx.visit)(ctx.chosen);
            }
            return;
        }
        if ctx.may_lack_out[v] {
            rec(ctx, v + 1);
        }
        for i in 0..ctx.out_edges[v].len() {
            let e = ctx.out_edges[v][i];
            if !ctx.used_in[e.head] {
                ctx.used_in[e.head] = true;
                ctx.chosen.push(e);
                rec(ctx, v + 1);
                ctx.chosen.pop();
                ctx.used_in[e.head] = false;
            }
        }
    }
    let mut ctx = Ctx {
        out_edges: &out_edges,
        may_lack_in: &may_lack_in,
        may_lack_out: &may_lack_out,
        used_in: &mut used_in,
        chosen: &mut chosen,
        visit: &mut visit,
    };
    rec(&mut ctx, 0);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{decompose, SymVertex};
    use crate::spec::{normalize, parse_spec, CirculantSpec};

    fn c012() -> Decomposition {
        decompose(&CirculantSpec::constant(&[0, 1, 2]).unwrap()).unwrap()
    }

    fn new_edge(d: &Decomposition, tail_offset: i64) -> SymbolicEdge {
        *d.new
            .iter()
            .find(|e| e.tail == SymVertex::right(0, tail_offset))
            .unwrap()
    }

    #[test]
    fn sixteen_classifications_for_width_two() {
        let all = enumerate_classifications(&c012());
        assert_eq!(all.len(), 16);
        assert_eq!(all[5].bit_string(), "((1,0),(0,1))");
        assert_eq!(ClassOrder::zero_groups(2), vec![(2, 1), (1, 2), (0, 1)]);
        assert_eq!(ClassOrder::canonical(3).len(), 64);
    }

    #[test]
    fn extend_matches_worked_examples() {
        let d = c012();
        let t3 = Classification::new(&[0, 0], &[0, 0]);
        let t1 = Classification::new(&[0, 1], &[0, 1]);
        let e = new_edge(&d, -2);
        assert_eq!(extend(&d, &t3, &[e]), Some(t3));
        assert_eq!(extend(&d, &t1, &[e]), None);
        // the new vertex needs an incoming edge
        assert_eq!(extend(&d, &t3, &[]), None);
    }

    #[test]
    fn completes_trivial_cases() {
        let d = c012();
        let ones = Classification::new(&[1, 1], &[1, 1]);
        assert!(completes(&d, &ones, &[]));
        let zeros = Classification::new(&[0, 0], &[0, 0]);
        assert!(!completes(&d, &zeros, &[]));
    }

    #[test]
    fn linear_extension_matches_hand_count() {
        // C_{4n+1}^{1,n+2,2n+1}, n = 4 -> 5, S = {(3,14),(13,20),(14,4),(19,9)}
        let spec = normalize(&parse_spec("1,n+2,2n+1", Some("4n+1")).unwrap());
        let d = decompose(&spec).unwrap();
        let geom = d.geometry();
        let concrete = d.new_at(4);
        let pick = |t: usize, h: usize| {
            let i = concrete.iter().position(|e| e.tail == t && e.head == h).unwrap();
            d.new[i]
        };
        let s = [pick(3, 14), pick(13, 20), pick(14, 4), pick(19, 9)];
        assert_eq!(geom.coord(20, 5), (3, 5));
        let t1 = Classification::new(&[1, 1, 1, 1, 0, 0, 0, 0], &[0, 1, 0, 1, 0, 1, 0, 1]);
        let grown = extend(&d, &t1, &s).unwrap();
        assert_eq!(grown.bit_string(), "((1,1,1,1,0,0,0,0),(0,1,0,0,1,1,0,1))");
        let t3 = Classification::new(&[0, 1, 1, 1, 0, 1, 0, 0], &[0, 0, 0, 1, 1, 1, 0, 1]);
        assert_eq!(extend(&d, &t3, &s), None);
    }

    #[test]
    fn empty_cover_is_illegal_when_interior_exists() {
        let d = c012();
        let lat = Lattice::build(&d.spec, 6).unwrap();
        let cover = PartialCover::new(&lat, vec![]);
        assert_eq!(classify(&d.boundaries, &cover), None);
    }
}
