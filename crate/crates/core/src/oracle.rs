//! Brute-force ground truth: Ryser permanents and exhaustive cycle-cover
//! enumeration with per-cover cycle statistics.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{Int, Rat};
use crate::par;
use crate::spec::CirculantSpec;

/// Oracle and state-space caps. Exceeding one is an error, never a silent
/// truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Budget {
    /// Largest matrix dimension handed to Ryser.
    pub ryser_dim: usize,
    /// Largest circulant size handed to exhaustive enumeration.
    pub enum_size: usize,
    /// Largest jump count handed to exhaustive enumeration.
    pub enum_jumps: usize,
    /// Largest pairing-state graph built by the extensions.
    pub states: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            ryser_dim: 24,
            enum_size: 20,
            enum_jumps: 4,
            states: 200_000,
        }
    }
}

pub const BUDGET_ENV: &str = "CIRCPERM_BUDGET";

impl Budget {
    /// Parses `"ryser=24,enum=20,jumps=4,states=200000"`; any subset of keys
    /// may be given. A bare number sets both dimension caps.
    pub fn parse(text: &str, base: Budget) -> Result<Budget> {
        let mut b = base;
        let text = text.trim();
        if text.is_empty() {
            return Ok(b);
        }
        if let Ok(dim) = text.parse::<usize>() {
            b.ryser_dim = dim;
            b.enum_size = dim;
            return Ok(b);
        }
        for part in text.split(',') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Syntax(format!("budget entry `{part}` is not key=value")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| Error::Syntax(format!("budget value `{value}` is not an integer")))?;
            match key.trim() {
                "ryser" => b.ryser_dim = value,
                "enum" => b.enum_size = value,
                "jumps" => b.enum_jumps = value,
                "states" => b.states = value,
                other => return Err(Error::Syntax(format!("unknown budget key `{other}`"))),
            }
        }
        Ok(b)
    }

    /// Defaults overridden by the environment, if set.
    pub fn from_env() -> Result<Budget> {
        match std::env::var(BUDGET_ENV) {
            Ok(text) => Budget::parse(&text, Budget::default()),
            Err(_) => Ok(Budget::default()),
        }
    }
}

/// Permanent with the default dimension cap.
pub fn ryser_permanent(m: &Matrix) -> Result<Rat> {
    ryser_permanent_capped(m, Budget::default().ryser_dim)
}

/// Ryser's inclusion-exclusion formula with Gray-code column updates.
///
/// Rows are scaled to integers first. When `2^n` times the product of the
/// row absolute sums fits in an `i128` the sum runs in machine integers,
/// otherwise in big integers.
pub fn ryser_permanent_capped(m: &Matrix, cap: usize) -> Result<Rat> {
    assert!(m.is_square(), "permanent of a non-square matrix");
    let n = m.rows();
    if n > cap {
        return Err(Error::SizeCap { dim: n, cap });
    }
    if n == 0 {
        return Ok(Rat::one());
    }
    let mut scale = Int::one();
    let mut rows: Vec<Vec<Int>> = Vec::with_capacity(n);
    for i in 0..n {
        let lcm = m
            .row(i)
            .iter()
            .fold(Int::one(), |acc, x| acc.lcm(x.denom()));
        rows.push(m.row(i).iter().map(|x| (x * &lcm).to_integer()).collect());
        scale *= lcm;
    }
    // an empty row or column makes the permanent vanish
    if rows.iter().any(|r| r.iter().all(Zero::is_zero))
        || (0..n).any(|j| rows.iter().all(|r| r[j].is_zero()))
    {
        return Ok(Rat::zero());
    }
    let bound_bits: u64 = rows
        .iter()
        .map(|r| r.iter().fold(Int::zero(), |acc, x| acc + x.abs()).bits())
        .sum::<u64>()
        + n as u64
        + 1;
    let total = if bound_bits < 126 {
        let small: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|x| x.to_i128().expect("bounded entry")).collect())
            .collect();
        Int::from(ryser_i128(&small))
    } else {
        ryser_big(&rows)
    };
    Ok(Rat::new(total, scale))
}

/// Nonzero entries of each column as `(row, value)`.
fn columns<T: Clone + Zero>(rows: &[Vec<T>]) -> Vec<Vec<(usize, T)>> {
    let n = rows.len();
    (0..n)
        .map(|j| {
            (0..n)
                .filter(|&i| !rows[i][j].is_zero())
                .map(|i| (i, rows[i][j].clone()))
                .collect()
        })
        .collect()
}

fn gray(k: u64) -> u64 {
    k ^ (k >> 1)
}

fn chunking(n: usize) -> (u64, u64) {
    let total = 1u64 << n;
    let chunks = if n >= 12 { 64 } else { 1 };
    (total, total / chunks)
}

fn ryser_i128(rows: &[Vec<i128>]) -> i128 {
    let n = rows.len();
    let cols = columns(rows);
    let (total, chunk) = chunking(n);
    let starts: Vec<u64> = (0..total / chunk).map(|c| c * chunk).collect();
    let partials = par::map_slice(&starts, |&start| {
        let mut sums = vec![0i128; n];
        let mut set = gray(start);
        for (j, col) in cols.iter().enumerate() {
            if set >> j & 1 == 1 {
                col.iter().for_each(|(i, v)| sums[*i] += v);
            }
        }
        let mut zeros = sums.iter().filter(|s| **s == 0).count();
        let mut acc = 0i128;
        for k in start..start + chunk {
            if k != start {
                let j = (k.trailing_zeros()) as usize;
                let adding = set >> j & 1 == 0;
                set ^= 1 << j;
                for (i, v) in &cols[j] {
                    let before = sums[*i] == 0;
                    if adding {
                        sums[*i] += v;
                    } else {
                        sums[*i] -= v;
                    }
                    match (before, sums[*i] == 0) {
                        (true, false) => zeros -= 1,
                        (false, true) => zeros += 1,
                        _ => {}
                    }
                }
            }
            if zeros == 0 {
                let prod: i128 = sums.iter().product();
                if set.count_ones().is_multiple_of(2) {
                    acc += prod;
                } else {
                    acc -= prod;
                }
            }
        }
        acc
    });
    let sum: i128 = partials.into_iter().sum();
    if n.is_multiple_of(2) {
        sum
    } else {
        -sum
    }
}

fn ryser_big(rows: &[Vec<BigInt>]) -> BigInt {
    let n = rows.len();
    let cols = columns(rows);
    let (total, chunk) = chunking(n);
    let starts: Vec<u64> = (0..total / chunk).map(|c| c * chunk).collect();
    let partials = par::map_slice(&starts, |&start| {
        let mut sums = vec![BigInt::zero(); n];
        let mut set = gray(start);
        for (j, col) in cols.iter().enumerate() {
            if set >> j & 1 == 1 {
                col.iter().for_each(|(i, v)| sums[*i] += v);
            }
        }
        let mut acc = BigInt::zero();
        for k in start..start + chunk {
            if k != start {
                let j = (k.trailing_zeros()) as usize;
                let adding = set >> j & 1 == 0;
                set ^= 1 << j;
                for (i, v) in &cols[j] {
                    if adding {
                        sums[*i] += v;
                    } else {
                        sums[*i] -= v;
                    }
                }
            }
            if sums.iter().all(|s| !s.is_zero()) {
                let prod: BigInt = sums.iter().product();
                if set.count_ones().is_multiple_of(2) {
                    acc += prod;
                } else {
                    acc -= prod;
                }
            }
        }
        acc
    });
    let sum: BigInt = partials.into_iter().sum();
    if n.is_multiple_of(2) {
        sum
    } else {
        -sum
    }
}

/// Cycle statistics over every cycle cover of one circulant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverStats {
    pub count: Int,
    /// `moment_sums[i]` is the sum over covers of `cycles^i`.
    pub moment_sums: Vec<Int>,
    pub hamiltonian_count: Int,
}

#[derive(Clone, Default)]
struct Acc {
    moments: Vec<u128>,
    hamiltonian: u128,
}

impl Acc {
    fn merge(mut self, other: Acc) -> Acc {
        if self.moments.is_empty() {
            return other;
        }
        for (a, b) in self.moments.iter_mut().zip(other.moments) {
            *a += b;
        }
        self.hamiltonian += other.hamiltonian;
        self
    }
}

struct Search<'a> {
    size: usize,
    residues: &'a [usize],
    perm: Vec<usize>,
    i_max: usize,
}

impl Search<'_> {
    fn run(&mut self, row: usize, used: u64, acc: &mut Acc) {
        if row == self.size {
            let cycles = orbits(&self.perm) as u128;
            let mut power = 1u128;
            for m in acc.moments.iter_mut() {
                *m += power;
                power *= cycles;
            }
            if cycles == 1 {
                acc.hamiltonian += 1;
            }
            return;
        }
        for &r in self.residues {
            let col = (row + r) % self.size;
            if used >> col & 1 == 0 {
                self.perm[row] = col;
                self.run(row + 1, used | 1 << col, acc);
            }
        }
    }
}

fn orbits(perm: &[usize]) -> usize {
    let mut seen = 0u64;
    let mut count = 0;
    for start in 0..perm.len() {
        if seen >> start & 1 == 1 {
            continue;
        }
        count += 1;
        let mut v = start;
        while seen >> v & 1 == 0 {
            seen |= 1 << v;
            v = perm[v];
        }
    }
    count
}

/// Enumerates every cycle cover of the circulant at `n` (weights ignored),
/// accumulating moments `0..=i_max` of the cycle count and the number of
/// single-cycle covers.
pub fn enumerate_stats(spec: &CirculantSpec, n: i64, i_max: usize, budget: &Budget) -> Result<CoverStats> {
    let size = spec.size(n);
    let cap = budget.enum_size.min(63);
    if size < 1 || size as usize > cap {
        return Err(Error::SizeCap {
            dim: size.max(0) as usize,
            cap,
        });
    }
    if spec.jumps().len() > budget.enum_jumps {
        return Err(Error::SizeCap {
            dim: spec.jumps().len(),
            cap: budget.enum_jumps,
        });
    }
    let size = size as usize;
    let residues: Vec<usize> = spec.residues(n)?.into_iter().map(|r| r as usize).collect();

    // fan out over the choices of the first rows
    let depth = size.min(3);
    let mut prefixes: Vec<(Vec<usize>, u64)> = vec![(Vec::new(), 0)];
    for row in 0..depth {
        prefixes = prefixes
            .into_iter()
            .flat_map(|(p, used)| {
                residues
                    .iter()
                    .filter_map(|&r| {
                        let col = (row + r) % size;
                        (used >> col & 1 == 0).then(|| {
                            let mut q = p.clone();
                            q.push(col);
                            (q, used | 1 << col)
                        })
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    let partials = par::map_slice(&prefixes, |(prefix, used)| {
        let mut search = Search {
            size,
            residues: &residues,
            perm: vec![0; size],
            i_max,
        };
        search.perm[..depth].copy_from_slice(prefix);
        let mut acc = Acc {
            moments: vec![0; search.i_max + 1],
            hamiltonian: 0,
        };
        search.run(depth, *used, &mut acc);
        acc
    });
    let total = partials.into_iter().fold(Acc::default(), Acc::merge);
    let moments: Vec<Int> = if total.moments.is_empty() {
        vec![Int::zero(); i_max + 1]
    } else {
        total.moments.iter().map(|&m| Int::from(m)).collect()
    };
    Ok(CoverStats {
        count: moments[0].clone(),
        moment_sums: moments,
        hamiltonian_count: Int::from(total.hamiltonian),
    })
}

/// Number of Hamiltonian cycles, by exhaustive enumeration.
pub fn brute_hamiltonian(spec: &CirculantSpec, n: i64, budget: &Budget) -> Result<Int> {
    Ok(enumerate_stats(spec, n, 0, budget)?.hamiltonian_count)
}
