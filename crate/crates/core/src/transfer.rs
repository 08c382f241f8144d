//! The transfer system `(A, Ā, B_i, β, T̄(n0))` and its iteration.
//!
//! `A` is kept as a sparse transition list; under a consistent ordering it
//! is `diag(Ā, ..., Ā)`, which [`TransferSystem::build`] verifies before
//! anything else uses `Ā`.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::algebra::{char_poly, eval_matrix_poly, Polynomial};
use crate::classify::{successors, ClassOrder, Classification};
use crate::error::{Error, Result};
use crate::lattice::{decompose, Decomposition, Lattice};
use crate::matrix::Matrix;
use crate::num::Rat;
use crate::oracle::ryser_permanent_capped;
use crate::par;
use crate::spec::CirculantSpec;

/// Largest `G_X` handed to Ryser while building `T̄(n0)`.
pub const INITIAL_DIM_CAP: usize = 30;

/// One zero-count block of `Ā`.
#[derive(Clone, Debug, Serialize)]
pub struct ZeroBlock {
    /// Number of 0-bits in the right tuples of this block.
    pub zeros: usize,
    /// Positions inside `Ā`.
    pub positions: Vec<usize>,
    #[serde(skip)]
    pub matrix: Matrix,
}

#[derive(Clone, Debug)]
pub struct TransferSystem {
    pub decomp: Decomposition,
    pub order: ClassOrder,
    /// Nonzero entries `(row, col, value)` of `A`, sorted.
    pub transitions: Vec<(usize, usize, Rat)>,
    pub abar: Matrix,
    /// Nonzero entries of each row of `Ā`.
    abar_rows: Vec<Vec<(usize, Rat)>>,
    pub blocks: Vec<ZeroBlock>,
    pub beta: Vec<Rat>,
    pub t0: Vec<Rat>,
    pub n0: i64,
    pub weighted: bool,
}

impl TransferSystem {
    /// Builds the system for a normalized family under the canonical order.
    pub fn build(spec: &CirculantSpec) -> Result<Self> {
        let decomp = decompose(spec)?;
        let order = ClassOrder::canonical(decomp.width());
        TransferSystem::build_with_order(decomp, order)
    }

    pub fn build_with_order(decomp: Decomposition, order: ClassOrder) -> Result<Self> {
        if order.width() != decomp.width() {
            return Err(Error::Inconsistency(format!(
                "order width {} differs from slot width {}",
                order.width(),
                decomp.width()
            )));
        }
        let transitions = build_alpha(&decomp, &order);
        let abar = reduce_blocks(&order, &transitions)?;
        let blocks = zero_blocks(&order, &abar)?;
        let beta = build_beta(&decomp, &order)?;
        let t0 = build_initial(&decomp, &order)?;
        let abar_rows = (0..abar.rows())
            .map(|i| {
                abar.row(i)
                    .iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect()
            })
            .collect();
        Ok(TransferSystem {
            n0: decomp.n0,
            weighted: decomp.spec.is_weighted(),
            decomp,
            order,
            transitions,
            abar,
            abar_rows,
            blocks,
            beta,
            t0,
        })
    }

    pub fn width(&self) -> usize {
        self.decomp.width()
    }

    /// Number of classifications, `2^(2w)`.
    pub fn states(&self) -> usize {
        self.order.len()
    }

    /// Dense `A`; only for small widths.
    pub fn full_a(&self) -> Result<Matrix> {
        let m = self.states();
        if m > 1024 {
            return Err(Error::SizeCap { dim: m, cap: 1024 });
        }
        let mut a = Matrix::zeros(m, m);
        for (i, j, v) in &self.transitions {
            a[(*i, *j)] = v.clone();
        }
        Ok(a)
    }

    /// `T̄(n+1) = A T̄(n)`, applied block by block with `Ā`.
    pub fn step(&self, v: &[Rat]) -> Vec<Rat> {
        let b = self.abar.rows();
        let parts = par::map_range(v.len() / b, |k| {
            let chunk = &v[k * b..(k + 1) * b];
            self.abar_rows
                .iter()
                .map(|row| {
                    row.iter()
                        .fold(Rat::zero(), |acc, (j, a)| acc + a * &chunk[*j])
                })
                .collect::<Vec<_>>()
        });
        parts.concat()
    }

    pub fn dot_beta(&self, v: &[Rat]) -> Rat {
        self.beta
            .iter()
            .zip(v)
            .filter(|(b, _)| !b.is_zero())
            .fold(Rat::zero(), |acc, (b, x)| acc + b * x)
    }

    /// `T(n0), ..., T(n_max)`.
    pub fn sequence(&self, n_max: i64) -> Vec<Rat> {
        let mut out = Vec::new();
        let mut v = self.t0.clone();
        let mut n = self.n0;
        while n <= n_max {
            out.push(self.dot_beta(&v));
            n += 1;
            if n <= n_max {
                v = self.step(&v);
            }
        }
        out
    }

    /// Product of the distinct zero-count block characteristic polynomials,
    /// checked to annihilate `Ā`.
    pub fn annihilator(&self) -> Result<Polynomial> {
        let mut factors: Vec<Polynomial> = Vec::new();
        for b in &self.blocks {
            let p = char_poly(&b.matrix);
            if !factors.contains(&p) {
                factors.push(p);
            }
        }
        let product = factors.iter().fold(Polynomial::one(), |acc, f| &acc * f);
        if !eval_matrix_poly(&product, &self.abar).is_zero() {
            return Err(Error::Annihilation(format!("P(Ā) is not zero for P = {product}")));
        }
        Ok(product)
    }

    pub fn block_polynomials(&self) -> Vec<Polynomial> {
        self.blocks.iter().map(|b| char_poly(&b.matrix)).collect()
    }
}

/// Free function form of [`TransferSystem::annihilator`].
pub fn annihilator(system: &TransferSystem) -> Result<Polynomial> {
    system.annihilator()
}

/// Nonzero entries of `A`: `A[x][x']` is the total weight of the New-edge
/// choices that take `x'` to `x`.
pub fn build_alpha(decomp: &Decomposition, order: &ClassOrder) -> Vec<(usize, usize, Rat)> {
    let per_source = par::map_range(order.len(), |j| {
        let mut acc: HashMap<usize, Rat> = HashMap::new();
        for (x, w) in successors(decomp, &order.at(j)) {
            *acc.entry(order.position(&x)).or_insert_with(Rat::zero) += w;
        }
        let mut row: Vec<(usize, usize, Rat)> = acc
            .into_iter()
            .filter(|(_, w)| !w.is_zero())
            .map(|(i, w)| (i, j, w))
            .collect();
        row.sort_by_key(|e| e.0);
        row
    });
    let mut all: Vec<_> = per_source.into_iter().flatten().collect();
    all.sort_by_key(|a| (a.0, a.1));
    all
}

/// Checks `A = diag(Ā, ..., Ā)` and returns `Ā`.
fn reduce_blocks(order: &ClassOrder, transitions: &[(usize, usize, Rat)]) -> Result<Matrix> {
    let b = 1usize << order.width();
    let mut abar = Matrix::zeros(b, b);
    let mut per_block = vec![0usize; order.len() / b];
    for (i, j, v) in transitions {
        if i / b != j / b {
            return Err(Error::BlockStructure(format!(
                "A has a nonzero entry at ({i}, {j}) outside the diagonal blocks"
            )));
        }
        if i / b == 0 {
            abar[(*i, *j)] = v.clone();
        }
        per_block[i / b] += 1;
    }
    for (i, j, v) in transitions {
        if abar[(i % b, j % b)] != *v {
            return Err(Error::BlockStructure(format!(
                "diagonal block {} differs from the first at ({}, {})",
                i / b,
                i % b,
                j % b
            )));
        }
    }
    if per_block.iter().any(|&c| c != per_block[0]) {
        return Err(Error::BlockStructure("diagonal blocks differ in support".into()));
    }
    Ok(abar)
}

/// Splits `Ā` by the zero count of the right tuple and checks that no entry
/// crosses groups.
fn zero_blocks(order: &ClassOrder, abar: &Matrix) -> Result<Vec<ZeroBlock>> {
    let b = abar.rows();
    let zeros: Vec<usize> = (0..b)
        .map(|i| {
            let x = order.at(i);
            x.width - x.right.count_ones() as usize
        })
        .collect();
    for i in 0..b {
        for j in 0..b {
            if zeros[i] != zeros[j] && !abar[(i, j)].is_zero() {
                return Err(Error::BlockStructure(format!(
                    "Ā links zero counts {} and {} at ({i}, {j})",
                    zeros[j], zeros[i]
                )));
            }
        }
    }
    let mut groups: Vec<ZeroBlock> = Vec::new();
    for (i, &z) in zeros.iter().enumerate() {
        match groups.iter_mut().find(|g| g.zeros == z) {
            Some(g) => g.positions.push(i),
            None => groups.push(ZeroBlock {
                zeros: z,
                positions: vec![i],
                matrix: Matrix::zeros(0, 0),
            }),
        }
    }
    for g in &mut groups {
        g.matrix = abar.select(&g.positions);
    }
    Ok(groups)
}

/// `β_X`: total weight of Hook-edge sets completing `X`, as the permanent of
/// the bipartite matrix from the right 0-slots to the left 0-slots.
pub fn build_beta(decomp: &Decomposition, order: &ClassOrder) -> Result<Vec<Rat>> {
    let b = &decomp.boundaries;
    let hook: Vec<(usize, usize, Rat)> = decomp
        .hook
        .iter()
        .map(|e| {
            (
                b.right_slot(&e.tail).expect("hook tail in R(n)"),
                b.left_slot(&e.head).expect("hook head in L(n)"),
                decomp.spec.weight(e.jump),
            )
        })
        .collect();
    let values = par::map_range(order.len(), |pos| {
        let x = order.at(pos);
        let (lz, rz) = (x.left_zeros(), x.right_zeros());
        if lz.len() != rz.len() {
            return Ok(Rat::zero());
        }
        let mut m = Matrix::zeros(rz.len(), lz.len());
        for (r, l, w) in &hook {
            if let (Some(j), Some(k)) = (rz.iter().position(|v| v == r), lz.iter().position(|v| v == l)) {
                m[(j, k)] += w;
            }
        }
        ryser_permanent_capped(&m, INITIAL_DIM_CAP)
    });
    values.into_iter().collect()
}

/// `T̄(n0)`: for each `X`, the weighted number of legal covers of `L_{n0}`
/// classified as `X`, as the permanent of `G_X`.
///
/// `G_X` is `L_{n0}` with the in-edges of left 0-slots and the out-edges of
/// right 0-slots removed, plus an edge from the `j`-th right 0-slot to the
/// `j`-th left 0-slot.
pub fn build_initial(decomp: &Decomposition, order: &ClassOrder) -> Result<Vec<Rat>> {
    let spec = &decomp.spec;
    let lattice = Lattice::build(spec, decomp.n0)?;
    let size = lattice.size;
    let mut base = Matrix::zeros(size, size);
    for e in &lattice.edges {
        base[(e.tail, e.head)] += spec.weight(e.jump);
    }
    let left: Vec<usize> = decomp.boundaries.left.iter().map(|v| lattice.concrete(v)).collect();
    let right: Vec<usize> = decomp.boundaries.right.iter().map(|v| lattice.concrete(v)).collect();
    let values = par::map_range(order.len(), |pos| {
        let x = order.at(pos);
        g_x_permanent(&base, &x, &left, &right)
    });
    values.into_iter().collect()
}

fn g_x_permanent(base: &Matrix, x: &Classification, left: &[usize], right: &[usize]) -> Result<Rat> {
    let (lz, rz) = (x.left_zeros(), x.right_zeros());
    if lz.len() != rz.len() {
        return Ok(Rat::zero());
    }
    let mut g = base.clone();
    let size = g.rows();
    for &l in &lz {
        for t in 0..size {
            g[(t, left[l])] = Rat::zero();
        }
    }
    for &r in &rz {
        for h in 0..size {
            g[(right[r], h)] = Rat::zero();
        }
    }
    for (&r, &l) in rz.iter().zip(&lz) {
        g[(right[r], left[l])] = Rat::one();
    }
    ryser_permanent_capped(&g, INITIAL_DIM_CAP)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{classify, for_each_legal_cover, PartialCover};
    use crate::num::rat;
    use crate::spec::{normalize, parse_spec};

    fn ints(v: &[Rat]) -> Vec<i64> {
        v.iter().map(|x| x.to_integer().try_into().unwrap()).collect()
    }

    fn system(jumps: &str, size: Option<&str>) -> TransferSystem {
        TransferSystem::build(&normalize(&parse_spec(jumps, size).unwrap())).unwrap()
    }

    #[test]
    fn self_loop_family() {
        let s = system("0", None);
        assert_eq!(s.states(), 1);
        assert_eq!(s.abar, Matrix::from_i64(&[&[1]]));
        assert_eq!(ints(&s.sequence(5)), vec![1; 5]);
    }

    #[test]
    fn initial_vector_counts_legal_covers() {
        for (jumps, size) in [("0,1,2", None), ("1,2", None), ("0,1n+0,2n-1", Some("3n")), ("0,2,3", None)] {
            let s = system(jumps, size);
            let counts = class_counts(&s, s.n0);
            assert_eq!(ints(&s.t0), counts, "{jumps}");
        }
    }

    #[test]
    fn beta_matches_exhaustive_hook_subsets() {
        use crate::classify::completes;
        let s = system("0,1,2", None);
        let hook = &s.decomp.hook;
        for pos in 0..s.states() {
            let x = s.order.at(pos);
            let mut count = 0;
            for mask in 0u32..1 << hook.len() {
                let subset: Vec<_> = (0..hook.len()).filter(|i| mask >> i & 1 == 1).map(|i| hook[i]).collect();
                if completes(&s.decomp, &x, &subset) {
                    count += 1;
                }
            }
            assert_eq!(s.beta[pos], rat(count), "{x}");
        }
    }

    fn class_counts(s: &TransferSystem, n: i64) -> Vec<i64> {
        let lattice = Lattice::build(&s.decomp.spec, n).unwrap();
        let mut counts = vec![0i64; s.states()];
        for_each_legal_cover(&s.decomp.boundaries, &lattice, |edges| {
            let x = classify(&s.decomp.boundaries, &PartialCover::new(&lattice, edges.to_vec())).unwrap();
            counts[s.order.position(&x)] += 1;
        });
        counts
    }

    #[test]
    fn extend_agrees_with_direct_classification() {
        use crate::classify::extend;
        for (jumps, size) in [("1,2", None), ("0,1,2", None), ("0,1n+0,2n-1", Some("3n"))] {
            let s = system(jumps, size);
            let n = s.n0;
            let small = Lattice::build(&s.decomp.spec, n).unwrap();
            let big = Lattice::build(&s.decomp.spec, n + 1).unwrap();
            let new = s.decomp.new_at(n);
            let lift = |e: &crate::lattice::Edge| {
                let (tr, tc) = small.geom.coord(e.tail, n);
                let (hr, hc) = small.geom.coord(e.head, n);
                crate::lattice::Edge {
                    tail: big.geom.index(tr, tc, n + 1),
                    head: big.geom.index(hr, hc, n + 1),
                    jump: e.jump,
                }
            };
            for_each_legal_cover(&s.decomp.boundaries, &small, |edges| {
                let x = classify(&s.decomp.boundaries, &PartialCover::new(&small, edges.to_vec())).unwrap();
                for mask in 0u32..1 << new.len() {
                    let chosen: Vec<usize> = (0..new.len()).filter(|i| mask >> i & 1 == 1).collect();
                    let mut all: Vec<_> = edges.iter().map(lift).collect();
                    all.extend(chosen.iter().map(|&i| new[i]));
                    let direct = classify(&s.decomp.boundaries, &PartialCover::new(&big, all));
                    let symbolic: Vec<_> = chosen.iter().map(|&i| s.decomp.new[i]).collect();
                    assert_eq!(extend(&s.decomp, &x, &symbolic), direct, "{jumps} {x}");
                }
            });
        }
    }

    #[test]
    fn one_step_matches_enumeration() {
        for (jumps, size) in [("1,2", None), ("0,1,2", None), ("0,1n+0,2n-1", Some("3n"))] {
            let s = system(jumps, size);
            assert_eq!(ints(&s.step(&s.t0)), class_counts(&s, s.n0 + 1), "{jumps}");
        }
    }

    #[test]
    fn scrambled_order_breaks_block_structure() {
        let spec = CirculantSpec::constant(&[0, 1, 2]).unwrap();
        let d = decompose(&spec).unwrap();
        let mut keys: Vec<u64> = ClassOrder::canonical(2).iter().map(|x| x.key()).collect();
        keys.swap(1, 7);
        let order = ClassOrder::from_keys(2, keys).unwrap();
        let err = TransferSystem::build_with_order(d, order).unwrap_err();
        assert!(matches!(err, Error::BlockStructure(_)));
        assert_eq!(err.exit_code(), 1);
    }
}
