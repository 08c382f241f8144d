//! Circulant families: parsing, normalization and concrete matrices.
//!
//! A `CirculantSpec` describes the family of `(p n + s)`-vertex directed
//! circulants whose jumps are `p_i n + s_i`. The constant-jump family is the
//! special case `p = 1`, `s = 0`, all `p_i = 0`.

use std::collections::HashSet;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::num::{parse_rat, rat_to_string, Rat};

/// One jump `coeff * n + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Jump {
    pub coeff: i64,
    pub offset: i64,
}

impl Jump {
    pub const fn constant(offset: i64) -> Self {
        Jump { coeff: 0, offset }
    }

    pub fn eval(&self, n: i64) -> i64 {
        self.coeff * n + self.offset
    }
}

impl fmt::Display for Jump {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_linear(f, self.coeff, self.offset)
    }
}

fn fmt_linear(f: &mut fmt::Formatter<'_>, coeff: i64, offset: i64) -> fmt::Result {
    match (coeff, offset) {
        (0, c) => write!(f, "{c}"),
        (a, 0) => write!(f, "{a}n"),
        (a, c) if c > 0 => write!(f, "{a}n+{c}"),
        (a, c) => write!(f, "{a}n-{}", -c),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Constant,
    Linear,
}

/// How a normalized family relates to the one it came from.
///
/// The normalized family at index `n + n_shift` is the original family at
/// index `n`, with every jump offset increased by `jump_shift`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub n_shift: i64,
    pub jump_shift: i64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CirculantSpec {
    p: i64,
    s: i64,
    jumps: Vec<Jump>,
    weights: Option<Vec<Rat>>,
    provenance: Option<Provenance>,
}

impl CirculantSpec {
    /// Builds and validates a family. `weights`, when given, parallels `jumps`.
    pub fn new(p: i64, s: i64, jumps: Vec<Jump>, weights: Option<Vec<Rat>>) -> Result<Self> {
        if p < 1 {
            return Err(Error::Inconsistency(format!("size slope must be positive, got {p}")));
        }
        if jumps.is_empty() {
            return Err(Error::Syntax("no jumps given".into()));
        }
        let mut seen = HashSet::new();
        for j in &jumps {
            if !seen.insert(*j) {
                return Err(Error::Syntax(format!("duplicate jump {j}")));
            }
            if j.coeff < 0 || j.coeff >= p {
                return Err(Error::Inconsistency(format!(
                    "jump {j} has n-coefficient outside [0, {p})"
                )));
            }
        }
        if let Some(w) = &weights {
            if w.len() != jumps.len() {
                return Err(Error::Inconsistency(format!(
                    "{} weights for {} jumps",
                    w.len(),
                    jumps.len()
                )));
            }
        }
        Ok(CirculantSpec {
            p,
            s,
            jumps,
            weights,
            provenance: None,
        })
    }

    /// Constant-jump family `C_n^{jumps}`.
    pub fn constant(jumps: &[i64]) -> Result<Self> {
        CirculantSpec::new(1, 0, jumps.iter().map(|&o| Jump::constant(o)).collect(), None)
    }

    pub fn with_weights(mut self, weights: Vec<Rat>) -> Result<Self> {
        if weights.len() != self.jumps.len() {
            return Err(Error::Inconsistency(format!(
                "{} weights for {} jumps",
                weights.len(),
                self.jumps.len()
            )));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn s(&self) -> i64 {
        self.s
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn weights(&self) -> Option<&[Rat]> {
        self.weights.as_deref()
    }

    /// Weight of jump `i` (1 when unweighted).
    pub fn weight(&self, i: usize) -> Rat {
        self.weights
            .as_ref()
            .map_or_else(Rat::one, |w| w[i].clone())
    }

    pub fn is_weighted(&self) -> bool {
        self.weights
            .as_ref()
            .is_some_and(|w| w.iter().any(|x| !x.is_one()))
    }

    /// Drops the weights, keeping the jump structure.
    pub fn unweighted(&self) -> Self {
        CirculantSpec {
            weights: None,
            ..self.clone()
        }
    }

    pub fn mode(&self) -> Mode {
        if self.p == 1 && self.s == 0 && self.jumps.iter().all(|j| j.coeff == 0) {
            Mode::Constant
        } else {
            Mode::Linear
        }
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    /// Number of vertices at parameter `n`.
    pub fn size(&self, n: i64) -> i64 {
        self.p * n + self.s
    }

    /// Largest jump offset; the boundary width of the decomposition.
    pub fn bar_s(&self) -> i64 {
        self.jumps.iter().map(|j| j.offset).max().unwrap_or(0)
    }

    /// Whether the family is in the form the transfer construction expects.
    pub fn is_normalized(&self) -> bool {
        let min = self.jumps.iter().map(|j| j.offset).min().unwrap_or(0);
        match self.mode() {
            Mode::Constant => min == 0,
            Mode::Linear => (0..self.p).contains(&self.s) && min == self.s,
        }
    }

    /// Jump residues modulo the size at `n`, rejecting collisions.
    pub fn residues(&self, n: i64) -> Result<Vec<i64>> {
        let size = self.size(n);
        if size < 1 {
            return Err(Error::Inconsistency(format!("size {size} at n = {n} is not positive")));
        }
        let res: Vec<i64> = self.jumps.iter().map(|j| j.eval(n).rem_euclid(size)).collect();
        for a in 0..res.len() {
            for b in a + 1..res.len() {
                if res[a] == res[b] {
                    return Err(Error::Collision {
                        n,
                        modulus: size,
                        first: self.jumps[a].to_string(),
                        second: self.jumps[b].to_string(),
                    });
                }
            }
        }
        Ok(res)
    }

    /// Canonical jump-grammar text, e.g. `"0,1n+0,2n-1"` renders as `"0,1n,2n-1"`.
    pub fn jumps_text(&self) -> String {
        self.jumps.iter().map(Jump::to_string).collect::<Vec<_>>().join(",")
    }

    /// Size-law text, or `None` for the constant family.
    pub fn size_text(&self) -> Option<String> {
        if self.mode() == Mode::Constant {
            return None;
        }
        Some(SizeLaw { p: self.p, s: self.s }.to_string())
    }

    pub fn weights_text(&self) -> Option<String> {
        self.weights
            .as_ref()
            .map(|w| w.iter().map(rat_to_string).collect::<Vec<_>>().join(","))
    }
}

struct SizeLaw {
    p: i64,
    s: i64,
}

impl fmt::Display for SizeLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_linear(f, self.p, self.s)
    }
}

impl fmt::Display for CirculantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.size_text() {
            None => write!(f, "C_n^{{{}}}", self.jumps_text())?,
            Some(size) => write!(f, "C_{{{}}}^{{{}}}", size, self.jumps_text())?,
        }
        if let Some(w) = self.weights_text() {
            write!(f, " weights ({w})")?;
        }
        Ok(())
    }
}

/// Parses the jump grammar and optional size law.
///
/// ```text
/// jumps := term ("," term)*
/// term  := INT | [INT] "n" [("+"|"-") UINT]
/// size  := UINT "n" [("+"|"-") UINT]
/// ```
pub fn parse_spec(text: &str, size: Option<&str>) -> Result<CirculantSpec> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::Syntax("empty jump list".into()));
    }
    let jumps = text
        .split(',')
        .map(|t| parse_term(t, false))
        .collect::<Result<Vec<_>>>()?;
    let any_linear = jumps.iter().any(|j| j.coeff != 0);
    let (p, s) = match size {
        Some(law) => {
            let j = parse_term(law, true)?;
            if j.coeff < 1 {
                return Err(Error::Syntax(format!("size law `{law}` must be `p n [+/- s]`")));
            }
            (j.coeff, j.offset)
        }
        None if any_linear => {
            return Err(Error::Inconsistency(
                "jumps depend on n but no size law was given".into(),
            ))
        }
        None => (1, 0),
    };
    CirculantSpec::new(p, s, jumps, None)
}

/// Parses comma-separated rational weights (`"2,1/3,-1"`).
pub fn parse_weights(text: &str) -> Result<Vec<Rat>> {
    text.split(',').map(parse_rat).collect()
}

fn parse_term(raw: &str, size_law: bool) -> Result<Jump> {
    let t: String = raw.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Syntax(format!("malformed term `{}`", raw.trim()));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(npos) = t.find('n') else {
        if size_law {
            return Err(bad());
        }
        let c: i64 = t.parse().map_err(|_| bad())?;
        return Ok(Jump::constant(c));
    };
    let (head, tail) = (&t[..npos], &t[npos + 1..]);
    let coeff: i64 = match head {
        "" | "+" => 1,
        "-" => -1,
        h => {
            if size_law && h.starts_with(['+', '-']) {
                return Err(bad());
            }
            h.parse().map_err(|_| bad())?
        }
    };
    let offset: i64 = if tail.is_empty() {
        0
    } else {
        let (sign, digits) = match tail.as_bytes()[0] {
            b'+' => (1, &tail[1..]),
            b'-' => (-1, &tail[1..]),
            _ => return Err(bad()),
        };
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        sign * digits.parse::<i64>().map_err(|_| bad())?
    };
    Ok(Jump { coeff, offset })
}

/// Rewrites a family into the form the transfer construction analyzes.
///
/// Constant jumps are shifted so the smallest offset is 0. For linear jumps
/// the parameter is re-indexed so `0 <= s < p`, then offsets are shifted so
/// the smallest is exactly `s`. Both moves are cyclic row shifts of the
/// adjacency matrix, so the permanent is unchanged; cycle statistics are not,
/// which is why the moment and Hamiltonian analyses work on raw jumps.
pub fn normalize(spec: &CirculantSpec) -> CirculantSpec {
    let alpha = spec.s.div_euclid(spec.p);
    let s = spec.s.rem_euclid(spec.p);
    let reindexed: Vec<Jump> = spec
        .jumps
        .iter()
        .map(|j| Jump {
            coeff: j.coeff,
            offset: j.offset - alpha * j.coeff,
        })
        .collect();
    let min = reindexed.iter().map(|j| j.offset).min().unwrap_or(0);
    let shift = s - min;
    let mut pairs: Vec<(Jump, Rat)> = reindexed
        .into_iter()
        .enumerate()
        .map(|(i, j)| {
            (
                Jump {
                    coeff: j.coeff,
                    offset: j.offset + shift,
                },
                spec.weight(i),
            )
        })
        .collect();
    pairs.sort_by_key(|(j, _)| (j.coeff, j.offset));
    let weights = spec
        .weights
        .as_ref()
        .map(|_| pairs.iter().map(|(_, w)| w.clone()).collect());
    let prior = spec.provenance.unwrap_or_default();
    CirculantSpec {
        p: spec.p,
        s,
        jumps: pairs.into_iter().map(|(j, _)| j).collect(),
        weights,
        provenance: Some(Provenance {
            n_shift: prior.n_shift + alpha,
            jump_shift: prior.jump_shift + shift,
        }),
    }
}

/// Weighted adjacency matrix of the circulant at parameter `n`.
pub fn adjacency_matrix(spec: &CirculantSpec, n: i64) -> Result<Matrix> {
    let res = spec.residues(n)?;
    let size = spec.size(n) as usize;
    let mut m = Matrix::zeros(size, size);
    for (t, &r) in res.iter().enumerate() {
        let w = spec.weight(t);
        if w.is_zero() {
            continue;
        }
        for i in 0..size {
            m[(i, (i + r as usize) % size)] = w.clone();
        }
    }
    Ok(m)
}
