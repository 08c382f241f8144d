use num_traits::{One, Zero};

use super::poly::Polynomial;
use crate::matrix::Matrix;
use crate::num::Rat;

/// Monic `det(xI - M)`.
///
/// Reduces `M` to upper Hessenberg form by exact similarity transforms, then
/// expands the determinant along the subdiagonal.
pub fn char_poly(m: &Matrix) -> Polynomial {
    assert!(m.is_square(), "characteristic polynomial of a non-square matrix");
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let Some(pivot) = (k + 1..n).find(|&i| !h[(i, k)].is_zero()) else {
            continue;
        };
        if pivot != k + 1 {
            for j in 0..n {
                let tmp = h[(pivot, j)].clone();
                h[(pivot, j)] = h[(k + 1, j)].clone();
                h[(k + 1, j)] = tmp;
            }
            for i in 0..n {
                let tmp = h[(i, pivot)].clone();
                h[(i, pivot)] = h[(i, k + 1)].clone();
                h[(i, k + 1)] = tmp;
            }
        }
        let p = h[(k + 1, k)].clone();
        for i in k + 2..n {
            if h[(i, k)].is_zero() {
                continue;
            }
            let t = &h[(i, k)] / &p;
            for j in 0..n {
                let delta = &t * &h[(k + 1, j)];
                h[(i, j)] -= delta;
            }
            for r in 0..n {
                let delta = &t * &h[(r, i)];
                h[(r, k + 1)] += delta;
            }
        }
    }

    let mut polys: Vec<Polynomial> = vec![Polynomial::one()];
    for mi in 0..n {
        let x_minus = Polynomial::new(vec![-h[(mi, mi)].clone(), Rat::one()]);
        let mut next = &x_minus * &polys[mi];
        let mut sub = Rat::one();
        for i in 1..=mi {
            sub *= &h[(mi - i + 1, mi - i)];
            if sub.is_zero() {
                break;
            }
            let c = &h[(mi - i, mi)] * &sub;
            if !c.is_zero() {
                next = &next - &polys[mi - i].scale(&c);
            }
        }
        polys.push(next);
    }
    polys.pop().expect("at least the constant polynomial")
}

/// `p(M)` by Horner's rule.
pub fn eval_matrix_poly(p: &Polynomial, m: &Matrix) -> Matrix {
    let n = m.rows();
    let mut acc = Matrix::zeros(n, n);
    for c in p.coeffs().iter().rev() {
        acc = m.mul(&acc).add_scalar_diag(c);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::rat;
    use proptest::prelude::*;

    /// Faddeev-LeVerrier, kept as an independent check.
    fn faddeev(m: &Matrix) -> Polynomial {
        let n = m.rows();
        let mut coeffs = vec![Rat::zero(); n + 1];
        coeffs[n] = Rat::one();
        let mut mk = Matrix::zeros(n, n);
        for k in 1..=n {
            let prev = coeffs[n - k + 1].clone();
            mk = m.mul(&mk.add_scalar_diag(&prev));
            let trace = (0..n).fold(Rat::zero(), |acc, i| acc + &mk[(i, i)]);
            coeffs[n - k] = -trace / rat(k as i64);
        }
        Polynomial::new(coeffs)
    }

    #[test]
    fn small_blocks() {
        assert_eq!(
            char_poly(&Matrix::from_i64(&[&[1, 1], &[1, 0]])),
            Polynomial::from_i64(&[-1, -1, 1])
        );
        assert_eq!(char_poly(&Matrix::from_i64(&[&[1]])), Polynomial::from_i64(&[-1, 1]));
        assert_eq!(char_poly(&Matrix::identity(3)), Polynomial::from_i64(&[-1, 3, -3, 1]));
        assert_eq!(char_poly(&Matrix::zeros(0, 0)), Polynomial::one());
    }

    #[test]
    fn pivoting_needed() {
        let m = Matrix::from_i64(&[&[2, 0, 1, 3], &[0, 1, 0, 0], &[5, 0, 0, 1], &[1, 2, 0, 4]]);
        assert_eq!(char_poly(&m), faddeev(&m));
        assert!(eval_matrix_poly(&char_poly(&m), &m).is_zero());
    }

    fn small_matrix(max: usize) -> impl Strategy<Value = Matrix> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(-3i64..=3, n * n).prop_map(move |v| {
                let rows: Vec<Vec<Rat>> = v.chunks(n).map(|r| r.iter().map(|&x| rat(x)).collect()).collect();
                Matrix::from_rows(rows)
            })
        })
    }

    proptest! {
        #[test]
        fn agrees_with_faddeev(m in small_matrix(6)) {
            prop_assert_eq!(char_poly(&m), faddeev(&m));
        }

        #[test]
        fn block_diagonal_multiplies(a in small_matrix(4), b in small_matrix(4)) {
            let d = Matrix::block_diag(&[a.clone(), b.clone()]);
            prop_assert_eq!(char_poly(&d), &char_poly(&a) * &char_poly(&b));
        }
    }
}
