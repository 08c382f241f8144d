//! The bundled regression corpus.
//!
//! Each entry pins a recurrence (and optionally sample values, a growth
//! constant, a moment slope or the full transfer system) for one family.
//! [`replay`] re-derives every entry, compares the result with the pinned
//! data, and checks the recurrence against the oracles for every `n` whose
//! matrix fits the size limit.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Deserialize;

use crate::algebra::{eval_recurrence, Recurrence};
use crate::derive::{derive, oracle_permanent, Options};
use crate::error::{Error, Result};
use crate::extensions::{hamiltonian_derive, moments_derive, moments_slope};
use crate::num::{parse_rat, rat_to_f64, rat_to_string, Rat};
use crate::oracle::{brute_hamiltonian, enumerate_stats, Budget};
use crate::spec::{parse_spec, parse_weights, CirculantSpec};

pub const BUNDLED: &str = include_str!("../corpus/regression.json");

/// Largest matrix the oracle sweep of [`replay`] visits by default.
pub const DEFAULT_MAX_SIZE: i64 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Count,
    Moment,
    Hamiltonian,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PinnedRecurrence {
    pub coeffs: Vec<String>,
    pub base: String,
    pub initials: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct PinnedTransfer {
    pub beta: Vec<String>,
    pub t0: Vec<String>,
    pub abar: Vec<Vec<String>>,
    pub blocks: Vec<Vec<Vec<String>>>,
    pub annihilator: String,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Entry {
    pub name: String,
    pub kind: Kind,
    pub jumps: String,
    #[serde(default)]
    pub size: Option<String>,
    #[serde(default)]
    pub weights: Option<String>,
    /// Moment index for [`Kind::Moment`] entries.
    #[serde(default)]
    pub moment: Option<String>,
    pub recurrence: PinnedRecurrence,
    /// Sample values keyed by `n`.
    #[serde(default)]
    pub values: BTreeMap<String, String>,
    /// Dominant root, matched to the printed precision.
    #[serde(default)]
    pub growth: Option<String>,
    /// Limit of `TC_1(n) / TC_0(n) / n`, matched to the printed precision.
    #[serde(default)]
    pub slope: Option<String>,
    /// Other jump sets of the same size whose permanents coincide.
    #[serde(default)]
    pub equivalent: Vec<String>,
    #[serde(default)]
    pub transfer: Option<PinnedTransfer>,
    #[serde(default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
pub struct Corpus {
    pub schema: u64,
    pub entries: Vec<Entry>,
}

impl Corpus {
    pub fn bundled() -> Corpus {
        Corpus::from_json(BUNDLED).expect("bundled corpus parses")
    }

    pub fn from_json(text: &str) -> Result<Corpus> {
        let corpus: Corpus =
            serde_json::from_str(text).map_err(|e| Error::Syntax(format!("corpus: {e}")))?;
        if corpus.schema != crate::report::SCHEMA {
            return Err(Error::Syntax(format!(
                "corpus schema {} is not {}",
                corpus.schema,
                crate::report::SCHEMA
            )));
        }
        for e in &corpus.entries {
            e.spec()?;
            e.pinned()?;
            e.moment_index()?;
        }
        Ok(corpus)
    }

    pub fn get(&self, name: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

fn int(text: &str, what: &str) -> Result<i64> {
    text.parse()
        .map_err(|_| Error::Syntax(format!("{what} `{text}` is not an integer")))
}

fn rats(values: &[String]) -> Result<Vec<Rat>> {
    values.iter().map(|v| parse_rat(v)).collect()
}

/// True when `x` rounds to the decimal `pinned` at its printed precision.
fn matches_decimal(x: f64, pinned: &str) -> Result<bool> {
    let p: f64 = pinned
        .parse()
        .map_err(|_| Error::Syntax(format!("`{pinned}` is not a decimal")))?;
    let digits = pinned.split_once('.').map_or(0, |(_, f)| f.len()) as i32;
    Ok((x - p).abs() <= 0.5 * 10f64.powi(-digits) + 1e-12)
}

impl Entry {
    pub fn spec(&self) -> Result<CirculantSpec> {
        let spec = parse_spec(&self.jumps, self.size.as_deref())?;
        match &self.weights {
            Some(w) => spec.with_weights(parse_weights(w)?),
            None => Ok(spec),
        }
    }

    pub fn pinned(&self) -> Result<Recurrence> {
        let r = &self.recurrence;
        Recurrence::new(rats(&r.coeffs)?, int(&r.base, "base")?, rats(&r.initials)?)
    }

    pub fn moment_index(&self) -> Result<usize> {
        match (self.kind, &self.moment) {
            (Kind::Moment, Some(m)) => Ok(int(m, "moment")? as usize),
            (Kind::Moment, None) => Err(Error::Syntax(format!("{}: moment index missing", self.name))),
            _ => Ok(0),
        }
    }

    pub fn equivalents(&self) -> Result<Vec<CirculantSpec>> {
        self.equivalent
            .iter()
            .map(|j| parse_spec(j, self.size.as_deref()))
            .collect()
    }
}

/// Result of replaying one entry.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: String,
    pub kind: Kind,
    /// The freshly derived recurrence.
    pub derived: Recurrence,
    /// Proven order bound, for counting entries.
    pub degree_bound: Option<u128>,
    /// Every `n` compared against an oracle.
    pub checked: Vec<i64>,
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn replay(corpus: &Corpus, max_size: i64, budget: &Budget) -> Result<Vec<Outcome>> {
    corpus
        .entries
        .iter()
        .map(|e| replay_entry(e, max_size, budget))
        .collect()
}

pub fn replay_entry(entry: &Entry, max_size: i64, budget: &Budget) -> Result<Outcome> {
    let spec = entry.spec()?;
    let pinned = entry.pinned()?;
    let mut failures = Vec::new();
    let mut checked = Vec::new();
    let mut degree_bound = None;

    let derived = match entry.kind {
        Kind::Count => {
            let d = derive(&spec, &Options { budget: *budget })?;
            degree_bound = Some(d.degree_bound());
            if d.recurrence.order() as u128 > d.degree_bound() {
                failures.push(format!(
                    "order {} exceeds the bound {}",
                    d.recurrence.order(),
                    d.degree_bound()
                ));
            }
            if let Some(g) = &entry.growth {
                if !d.growth.real || !matches_decimal(d.growth.dominant_root, g)? {
                    failures.push(format!("growth {} does not match {g}", d.growth.dominant_root));
                }
            }
            if let Some(t) = &entry.transfer {
                compare_transfer(&d, t, &mut failures)?;
            }
            d.recurrence
        }
        Kind::Moment => {
            let i = entry.moment_index()?;
            let a = moments_derive(&spec, i, budget)?;
            if let Some(s) = &entry.slope {
                let slope = rat_to_f64(&moments_slope(&a, 4096)?);
                if !matches_decimal(slope, s)? {
                    failures.push(format!("slope {slope} does not match {s}"));
                }
            }
            a.recurrences[i].clone()
        }
        Kind::Hamiltonian => hamiltonian_derive(&spec, budget)?.recurrence,
    };
    if derived != pinned {
        failures.push(format!(
            "derived {} from n = {} with initials {:?}, pinned {} from n = {} with initials {:?}",
            derived.equation("T"),
            derived.base,
            derived.initial_strings(),
            pinned.equation("T"),
            pinned.base,
            pinned.initial_strings()
        ));
    }

    for (n, v) in &entry.values {
        let n = int(n, "n")?;
        let want = parse_rat(v)?;
        let got = eval_recurrence(&pinned, n)?;
        if got != want {
            failures.push(format!("pinned T({n}) = {v}, recurrence gives {}", rat_to_string(&got)));
        }
    }

    let equivalents = entry.equivalents()?;
    let moment = entry.moment_index()?;
    let mut n = pinned.base;
    while spec.size(n) <= max_size {
        let want = pinned.terms(n, 1)?.remove(0);
        let mut seen = false;
        match entry.kind {
            Kind::Count => {
                if let Some(r) = oracle_permanent(&spec, n, budget)? {
                    seen = true;
                    if r != want {
                        failures.push(format!("n = {n}: Ryser {}, recurrence {}", rat_to_string(&r), rat_to_string(&want)));
                    }
                    if !spec.is_weighted() {
                        let c = Rat::from_integer(enumerate_stats(&spec, n, 0, budget)?.count);
                        if c != want {
                            failures.push(format!("n = {n}: enumeration {}, recurrence {}", rat_to_string(&c), rat_to_string(&want)));
                        }
                    }
                }
                for other in &equivalents {
                    if let Some(r) = oracle_permanent(other, n, budget)? {
                        if r != want {
                            failures.push(format!("n = {n}: {other} has permanent {}", rat_to_string(&r)));
                        }
                    }
                }
            }
            Kind::Moment => {
                if spec.residues(n).is_ok() {
                    seen = true;
                    let s = enumerate_stats(&spec, n, moment, budget)?;
                    let got = Rat::from_integer(s.moment_sums[moment].clone());
                    if got != want {
                        failures.push(format!("n = {n}: enumeration {}, recurrence {}", rat_to_string(&got), rat_to_string(&want)));
                    }
                }
            }
            Kind::Hamiltonian => {
                if spec.residues(n).is_ok() {
                    seen = true;
                    let got = Rat::from_integer(brute_hamiltonian(&spec, n, budget)?);
                    if got != want {
                        failures.push(format!("n = {n}: brute force {}, recurrence {}", rat_to_string(&got), rat_to_string(&want)));
                    }
                }
            }
        }
        if seen {
            checked.push(n);
        }
        n += 1;
    }
    if checked.is_empty() && !pinned.coeffs.iter().all(Zero::is_zero) {
        failures.push("no n within the size limit was checked".into());
    }

    Ok(Outcome {
        name: entry.name.clone(),
        kind: entry.kind,
        derived,
        degree_bound,
        checked,
        failures,
    })
}

fn compare_transfer(
    d: &crate::derive::Derivation,
    pinned: &PinnedTransfer,
    failures: &mut Vec<String>,
) -> Result<()> {
    let sys = &d.system;
    let strings = |v: &[Rat]| v.iter().map(rat_to_string).collect::<Vec<_>>();
    if strings(&sys.beta) != pinned.beta {
        failures.push(format!("beta {:?}", strings(&sys.beta)));
    }
    if strings(&sys.t0) != pinned.t0 {
        failures.push(format!("initial vector {:?}", strings(&sys.t0)));
    }
    if sys.abar.to_string_rows() != pinned.abar {
        failures.push(format!("reduced matrix {:?}", sys.abar.to_string_rows()));
    }
    let blocks: Vec<Vec<Vec<String>>> = sys.blocks.iter().map(|b| b.matrix.to_string_rows()).collect();
    if blocks != pinned.blocks {
        failures.push(format!("blocks {blocks:?}"));
    }
    if d.annihilator.to_string() != pinned.annihilator {
        failures.push(format!("annihilator {}", d.annihilator));
    }
    Ok(())
}
