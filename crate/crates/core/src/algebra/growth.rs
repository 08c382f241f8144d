use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::Polynomial;
use super::recurrence::Recurrence;
use crate::num::{rat, rat_to_f64, Rat};

/// Width to which real roots are bracketed.
const TOLERANCE: f64 = 1e-12;

/// Largest-modulus root of a recurrence's characteristic polynomial.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthEstimate {
    /// Midpoint of the bracket around the dominant real root, or the modulus
    /// of a dominant non-real pair.
    pub dominant_root: f64,
    /// Half-width of the bracket; the true root lies within this distance.
    pub error_bound: f64,
    pub multiplicity: usize,
    /// `false` when a non-real pair strictly dominates every real root.
    pub real: bool,
    pub modulus: f64,
}

/// Yun's square-free factorization: `(factor, multiplicity)` pairs.
fn squarefree_factors(p: &Polynomial) -> Vec<(Polynomial, usize)> {
    let f = p.monic();
    let mut out = Vec::new();
    if f.degree() == 0 {
        return out;
    }
    let fp = f.derivative();
    let a0 = f.gcd(&fp);
    let mut b = f.div_rem(&a0).0;
    let c = fp.div_rem(&a0).0;
    let mut d = &c - &b.derivative();
    let mut i = 1;
    while b.degree() > 0 {
        let a = b.gcd(&d);
        if a.degree() > 0 {
            out.push((a.clone(), i));
        }
        b = b.div_rem(&a).0;
        let c = d.div_rem(&a).0;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

fn sign(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

struct Sturm {
    chain: Vec<Polynomial>,
}

impl Sturm {
    fn new(p: &Polynomial) -> Self {
        let mut chain = vec![p.clone(), p.derivative()];
        loop {
            let k = chain.len();
            if chain[k - 1].is_zero() {
                chain.pop();
                break;
            }
            let r = chain[k - 2].rem(&chain[k - 1]);
            if r.is_zero() {
                break;
            }
            chain.push(-&r);
        }
        Sturm { chain }
    }

    fn variations(&self, x: &Rat) -> usize {
        let signs: Vec<i8> = self.chain.iter().map(|p| sign(&p.eval(x))).filter(|&s| s != 0).collect();
        signs.windows(2).filter(|w| w[0] != w[1]).count()
    }

    /// Distinct roots in `(a, b]`.
    fn count(&self, a: &Rat, b: &Rat) -> usize {
        self.variations(a) - self.variations(b)
    }
}

/// Brackets `(lo, hi]` each containing exactly one root of square-free `p`.
fn isolate(p: &Polynomial) -> Vec<(Rat, Rat)> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let sturm = Sturm::new(p);
    let bound = p.cauchy_bound();
    let mut stack = vec![(-bound.clone(), bound)];
    let mut out = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        match sturm.count(&lo, &hi) {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = (&lo + &hi) / rat(2);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort();
    out
}

/// Shrinks a one-root bracket of square-free `p` below [`TOLERANCE`].
fn refine(p: &Polynomial, mut lo: Rat, mut hi: Rat) -> (Rat, Rat) {
    if p.eval(&hi).is_zero() {
        return (hi.clone(), hi);
    }
    let tol = Rat::new(1.into(), (1u64 << 40).into()) / rat(1 << 10);
    let s_hi = sign(&p.eval(&hi));
    while &hi - &lo > tol {
        let mid = (&lo + &hi) / rat(2);
        let s = sign(&p.eval(&mid));
        if s == 0 {
            return (mid.clone(), mid);
        }
        if s == s_hi {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// All roots of `p` in floating point, by the Aberth iteration.
fn complex_roots(p: &Polynomial) -> Vec<Complex64> {
    let d = p.degree();
    if d == 0 {
        return Vec::new();
    }
    let lead = rat_to_f64(&p.leading());
    let c: Vec<Complex64> = p
        .coeffs()
        .iter()
        .map(|x| Complex64::new(rat_to_f64(x) / lead, 0.0))
        .collect();
    let eval = |z: Complex64| {
        let mut v = Complex64::zero();
        let mut dv = Complex64::zero();
        for a in c.iter().rev() {
            dv = dv * z + v;
            v = v * z + a;
        }
        (v, dv)
    };
    let radius = rat_to_f64(&p.cauchy_bound());
    let mut z: Vec<Complex64> = (0..d)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / d as f64))
        .collect();
    for _ in 0..1000 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let (v, dv) = eval(z[i]);
            if v == Complex64::zero() {
                continue;
            }
            let ratio = v / dv;
            let repulsion: Complex64 = (0..d)
                .filter(|&j| j != i)
                .map(|j| Complex64::one() / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::one() - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Dominant root of the characteristic polynomial, with its multiplicity.
pub fn growth(rec: &Recurrence) -> GrowthEstimate {
    let chi = rec.characteristic();
    let mut best: Option<(Rat, Rat, usize)> = None;
    for (factor, mult) in squarefree_factors(&chi) {
        for (lo, hi) in isolate(&factor) {
            let (lo, hi) = refine(&factor, lo, hi);
            let mid = (&lo + &hi) / rat(2);
            let better = match &best {
                None => true,
                Some((b_lo, b_hi, _)) => {
                    let b_mid = (b_lo + b_hi) / rat(2);
                    mid.abs() > b_mid.abs() || (mid.abs() == b_mid.abs() && mid > b_mid)
                }
            };
            if better {
                best = Some((lo, hi, mult));
            }
        }
    }
    let (root, error, multiplicity) = match &best {
        Some((lo, hi, m)) => (
            rat_to_f64(&((lo + hi) / rat(2))),
            rat_to_f64(&((hi - lo) / rat(2))).max(TOLERANCE / 2.0),
            *m,
        ),
        None => (0.0, 0.0, 0),
    };
    let real_modulus = root.abs();
    let complex_max = complex_roots(&chi.squarefree())
        .into_iter()
        .filter(|z| z.im.abs() > 1e-7 * z.norm().max(1.0))
        .map(|z| z.norm())
        .fold(0.0f64, f64::max);
    if complex_max > real_modulus * (1.0 + 1e-9) + 1e-12 {
        return GrowthEstimate {
            dominant_root: complex_max,
            error_bound: 1e-9 * complex_max.max(1.0),
            multiplicity: 1,
            real: false,
            modulus: complex_max,
        };
    }
    GrowthEstimate {
        dominant_root: root,
        error_bound: error,
        multiplicity,
        real: true,
        modulus: real_modulus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(c: &[i64]) -> Recurrence {
        let coeffs = c.iter().map(|&x| rat(x)).collect();
        Recurrence::new(coeffs, 0, vec![Rat::one(); c.len()]).unwrap()
    }

    #[test]
    fn golden_ratio() {
        let g = growth(&rec(&[2, 0, -1]));
        assert!((g.dominant_root - 1.618_033_988_75).abs() < 1e-9);
        assert!(g.real);
        assert_eq!(g.multiplicity, 1);
    }

    #[test]
    fn two_plus_root_five() {
        let g = growth(&rec(&[4, 1]));
        assert!((g.dominant_root - (2.0 + 5f64.sqrt())).abs() < 1e-9);
    }

    #[test]
    fn constant_and_repeated() {
        let g = growth(&rec(&[1]));
        assert!((g.dominant_root - 1.0).abs() < 1e-9);
        // (x - 3)^2
        let g = growth(&rec(&[6, -9]));
        assert!((g.dominant_root - 3.0).abs() < 1e-9);
        assert_eq!(g.multiplicity, 2);
    }

    #[test]
    fn complex_pair_dominates() {
        // (x^2 + 4)(x - 1) = x^3 - x^2 + 4x - 4
        let g = growth(&rec(&[1, -4, 4]));
        assert!(!g.real);
        assert!((g.modulus - 2.0).abs() < 1e-6);
    }

    #[test]
    fn yun_factors() {
        let p = &(&Polynomial::from_i64(&[-1, 1]) * &Polynomial::from_i64(&[-1, 1]))
            * &Polynomial::from_i64(&[2, 1]);
        let f = squarefree_factors(&p);
        assert_eq!(f, vec![(Polynomial::from_i64(&[2, 1]), 1), (Polynomial::from_i64(&[-1, 1]), 2)]);
    }
}
