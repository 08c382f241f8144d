use num_traits::{One, Zero};
use serde::Serialize;

use super::poly::Polynomial;
use crate::error::{Error, Result};
use crate::num::{rat_to_string, Rat};

/// Extra terms every fitted recurrence must reproduce beyond its fitting
/// window.
pub const GUARD: usize = 4;

/// `T(n) = sum_j c_j T(n - j)` for `n >= base + order`, with
/// `T(base..base + order)` given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Recurrence {
    pub coeffs: Vec<Rat>,
    pub base: i64,
    pub initials: Vec<Rat>,
}

impl Recurrence {
    pub fn new(coeffs: Vec<Rat>, base: i64, initials: Vec<Rat>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() != initials.len() {
            return Err(Error::Inconsistency(format!(
                "recurrence of order {} needs as many initial values, got {}",
                coeffs.len(),
                initials.len()
            )));
        }
        Ok(Recurrence {
            coeffs,
            base,
            initials,
        })
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// `x^d - c_1 x^(d-1) - ... - c_d`.
    pub fn characteristic(&self) -> Polynomial {
        let d = self.order();
        let mut c = vec![Rat::zero(); d + 1];
        c[d] = Rat::one();
        for (j, cj) in self.coeffs.iter().enumerate() {
            c[d - 1 - j] = -cj.clone();
        }
        Polynomial::new(c)
    }

    /// `T(from), ..., T(from + count - 1)` by linear iteration.
    pub fn terms(&self, from: i64, count: usize) -> Result<Vec<Rat>> {
        if from < self.base {
            return Err(Error::Unsupported(format!(
                "recurrence starts at n = {}, asked for n = {from}",
                self.base
            )));
        }
        let skip = (from - self.base) as usize;
        let mut seq = self.initials.clone();
        let d = self.order();
        while seq.len() < skip + count {
            let m = seq.len();
            let next = (0..d).fold(Rat::zero(), |acc, j| acc + &self.coeffs[j] * &seq[m - 1 - j]);
            seq.push(next);
        }
        Ok(seq[skip..skip + count].to_vec())
    }

    /// Whether `values[k] = T(from + k)` for every `k`.
    pub fn reproduces(&self, from: i64, values: &[Rat]) -> bool {
        self.terms(from, values.len())
            .map(|t| t == values)
            .unwrap_or(false)
    }

    /// Same recurrence started `earlier.len()` steps sooner.
    pub fn prepend(&self, earlier: &[Rat]) -> Recurrence {
        let d = self.order();
        let mut initials = earlier.to_vec();
        initials.extend(self.initials.iter().cloned());
        initials.truncate(d);
        Recurrence {
            coeffs: self.coeffs.clone(),
            base: self.base - earlier.len() as i64,
            initials,
        }
    }

    pub fn coeff_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(rat_to_string).collect()
    }

    pub fn initial_strings(&self) -> Vec<String> {
        self.initials.iter().map(rat_to_string).collect()
    }

    /// Human form, e.g. `T(n) = 2T(n-1) - T(n-3)`.
    pub fn equation(&self, name: &str) -> String {
        let mut out = format!("{name}(n) =");
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rat::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            let sign = match (first, neg) {
                (true, false) => " ",
                (true, true) => " -",
                (false, false) => " + ",
                (false, true) => " - ",
            };
            let factor = if mag.is_one() { String::new() } else { rat_to_string(&mag) };
            out.push_str(&format!("{sign}{factor}{name}(n-{})", j + 1));
            first = false;
        }
        if first {
            out.push_str(" 0");
        }
        out
    }
}

impl Serialize for Recurrence {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("Recurrence", 4)?;
        st.serialize_field("order", &self.order().to_string())?;
        st.serialize_field("coeffs", &self.coeff_strings())?;
        st.serialize_field("base", &self.base.to_string())?;
        st.serialize_field("initials", &self.initial_strings())?;
        st.end()
    }
}

/// Berlekamp-Massey over the rationals: the shortest `c` with
/// `s[m] = sum_j c[j-1] s[m-j]` for every `m >= c.len()`.
fn berlekamp_massey(s: &[Rat]) -> Vec<Rat> {
    // connection polynomials with constant term 1: s[m] + sum conn[j] s[m-j] = 0
    let mut conn = vec![Rat::one()];
    let mut prev = vec![Rat::one()];
    let mut len = 0usize;
    let mut shift = 1usize;
    let mut prev_disc = Rat::one();
    for m in 0..s.len() {
        let mut disc = s[m].clone();
        for j in 1..=len.min(conn.len() - 1) {
            disc += &conn[j] * &s[m - j];
        }
        if disc.is_zero() {
            shift += 1;
            continue;
        }
        let factor = &disc / &prev_disc;
        let mut next = conn.clone();
        if next.len() < prev.len() + shift {
            next.resize(prev.len() + shift, Rat::zero());
        }
        for (j, p) in prev.iter().enumerate() {
            next[j + shift] -= &factor * p;
        }
        if 2 * len <= m {
            prev = std::mem::replace(&mut conn, next);
            len = m + 1 - len;
            prev_disc = disc;
            shift = 1;
        } else {
            conn = next;
            shift += 1;
        }
    }
    conn.resize(len + 1, Rat::zero());
    conn[1..].iter().map(|c| -c).collect()
}

/// Smallest-order recurrence reproducing every term.
///
/// The order `d` is the linear complexity of the whole sequence, found by
/// Berlekamp-Massey; it is accepted only if `2d + GUARD` terms back it, so
/// the recurrence is determined by the data with [`GUARD`] terms to spare.
pub fn min_recurrence(terms: &[Rat], base: i64, degree_cap: usize) -> Result<Recurrence> {
    let fail = Error::NoRecurrence {
        cap: degree_cap,
        terms: terms.len(),
    };
    if terms.len() < 2 + GUARD {
        return Err(fail);
    }
    if terms.iter().all(Zero::is_zero) {
        return Recurrence::new(vec![Rat::zero()], base, vec![Rat::zero()]);
    }
    let coeffs = berlekamp_massey(terms);
    let d = coeffs.len();
    if d == 0 || d > degree_cap || 2 * d + GUARD > terms.len() {
        return Err(fail);
    }
    let rec = Recurrence::new(coeffs, base, terms[..d].to_vec())?;
    if !rec.reproduces(base, terms) {
        return Err(Error::Inconsistency("Berlekamp-Massey result does not reproduce its input".into()));
    }
    Ok(rec)
}

fn mul_mod(a: &Polynomial, b: &Polynomial, m: &Polynomial) -> Polynomial {
    (a * b).rem(m)
}

/// `T(n)`, by iteration for moderate `n` and by reducing `x^(n - base)`
/// modulo the characteristic polynomial for large `n`.
pub fn eval_recurrence(rec: &Recurrence, n: i64) -> Result<Rat> {
    if n < rec.base {
        return Err(Error::Unsupported(format!(
            "recurrence starts at n = {}, asked for n = {n}",
            rec.base
        )));
    }
    let steps = (n - rec.base) as u64;
    let d = rec.order();
    if steps < 4096 || d == 0 {
        return Ok(rec.terms(n, 1)?.remove(0));
    }
    let modulus = rec.characteristic();
    let mut result = Polynomial::one();
    let mut power = Polynomial::from_i64(&[0, 1]).rem(&modulus);
    let mut e = steps;
    while e > 0 {
        if e & 1 == 1 {
            result = mul_mod(&result, &power, &modulus);
        }
        power = mul_mod(&power, &power, &modulus);
        e >>= 1;
    }
    Ok((0..d).fold(Rat::zero(), |acc, i| acc + result.coeff(i) * &rec.initials[i]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;

    fn rats(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn fits_order_three() {
        let rec = Recurrence::new(rats(&[2, 0, -1]), 4, rats(&[9, 13, 12])).unwrap();
        let terms = rec.terms(4, 12).unwrap();
        assert_eq!(terms[3], rat(15));
        let fit = min_recurrence(&terms, 4, 7).unwrap();
        assert_eq!(fit, rec);
        assert_eq!(fit.equation("T"), "T(n) = 2T(n-1) - T(n-3)");
    }

    #[test]
    fn too_few_terms_is_an_error() {
        let err = min_recurrence(&rats(&[1, 2, 3]), 0, 3).unwrap_err();
        assert!(matches!(err, Error::NoRecurrence { .. }));
    }

    #[test]
    fn geometric_and_zero() {
        let terms: Vec<Rat> = (0..10).map(|i| rat(3i64.pow(i))).collect();
        let fit = min_recurrence(&terms, 0, 4).unwrap();
        assert_eq!(fit.coeffs, rats(&[3]));
        let z = min_recurrence(&rats(&[0; 8]), 2, 3).unwrap();
        assert_eq!(z.coeffs, rats(&[0]));
    }

    #[test]
    fn singular_hankel_still_fits() {
        let fit = min_recurrence(&rats(&[0, 0, 1, 1, 1, 1, 1, 1, 1, 1]), 0, 4).unwrap();
        assert_eq!(fit.order(), 3);
        assert!(fit.reproduces(0, &rats(&[0, 0, 1, 1, 1, 1, 1])));
    }

    #[test]
    fn fast_evaluation_matches_iteration() {
        let fib = Recurrence::new(rats(&[1, 1]), 0, rats(&[0, 1])).unwrap();
        let slow = fib.terms(5000, 1).unwrap().remove(0);
        assert_eq!(eval_recurrence(&fib, 5000).unwrap(), slow);
        assert_eq!(eval_recurrence(&fib, 0).unwrap(), rat(0));
        assert!(eval_recurrence(&fib, -1).is_err());
    }

    #[test]
    fn prepend_moves_base() {
        let rec = Recurrence::new(rats(&[2, 0, -1]), 4, rats(&[9, 13, 12])).unwrap();
        let earlier = rec.prepend(&rats(&[7]));
        assert_eq!(earlier.base, 3);
        assert_eq!(earlier.initials, rats(&[7, 9, 13]));
    }

    proptest::proptest! {
        #[test]
        fn recovers_generating_recurrence(
            coeffs in proptest::collection::vec(-3i64..=3, 1..=5),
            initials in proptest::collection::vec(-5i64..=5, 5),
        ) {
            let d = coeffs.len();
            let gen = Recurrence::new(rats(&coeffs), 1, rats(&initials[..d])).unwrap();
            let terms = gen.terms(1, 2 * d + GUARD + 3).unwrap();
            let fit = min_recurrence(&terms, 1, d).unwrap();
            proptest::prop_assert!(fit.order() <= d);
            proptest::prop_assert!(fit.reproduces(1, &terms));
            // no shorter recurrence exists: each shorter order fails somewhere
            for k in 1..fit.order() {
                let shorter = min_recurrence(&terms, 1, k);
                proptest::prop_assert!(shorter.is_err());
            }
        }
    }
}
