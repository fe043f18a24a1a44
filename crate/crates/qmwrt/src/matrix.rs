//! Small exact integer matrix routines: determinant, characteristic
//! polynomial, signature, rational inverse.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::number_theory::Q;

pub type IntMatrix = Vec<Vec<i64>>;

pub fn is_symmetric(b: &IntMatrix) -> bool {
    let n = b.len();
    b.iter().all(|row| row.len() == n)
        && (0..n).all(|i| (0..n).all(|j| b[i][j] == b[j][i]))
}

fn to_q(b: &IntMatrix) -> Vec<Vec<Q>> {
    b.iter()
        .map(|row| row.iter().map(|&x| Q::from_integer(BigInt::from(x))).collect())
        .collect()
}

/// Exact determinant by Bareiss elimination.
pub fn det(b: &IntMatrix) -> BigInt {
    let n = b.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Vec<Vec<BigInt>> = b
        .iter()
        .map(|row| row.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Coefficients of `det(λI − B)`, ascending, via Faddeev–LeVerrier.
pub fn char_poly(b: &IntMatrix) -> Vec<Q> {
    let n = b.len();
    let a = to_q(b);
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut m = vec![vec![Q::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![Q::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = Q::zero();
                for t in 0..n {
                    acc += &a[i][t] * &m[t][j];
                }
                next[i][j] = acc;
            }
            next[i][i] += &coeffs[n - k + 1];
        }
        m = next;
        let mut tr = Q::zero();
        for i in 0..n {
            for t in 0..n {
                tr += &a[i][t] * &m[t][i];
            }
        }
        coeffs[n - k] = -tr / Q::from_integer(BigInt::from(k as i64));
    }
    coeffs
}

fn sign_changes(c: &[Q]) -> usize {
    let signs: Vec<bool> = c.iter().filter(|x| !x.is_zero()).map(|x| x.is_positive()).collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Numbers of positive, negative and zero eigenvalues of a symmetric matrix.
///
/// The characteristic polynomial of a symmetric matrix is real-rooted, so
/// Descartes' rule of signs counts roots exactly.
pub fn inertia(b: &IntMatrix) -> (usize, usize, usize) {
    let p = char_poly(b);
    let zeros = p.iter().take_while(|c| c.is_zero()).count();
    let pos = sign_changes(&p);
    let flipped: Vec<Q> = p
        .iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 1 { -c.clone() } else { c.clone() })
        .collect();
    let neg = sign_changes(&flipped);
    (pos, neg, zeros)
}

pub fn signature(b: &IntMatrix) -> i64 {
    let (p, n, _) = inertia(b);
    p as i64 - n as i64
}

/// Rational inverse by Gauss–Jordan; `None` if singular.
pub fn inverse(b: &IntMatrix) -> Option<Vec<Vec<Q>>> {
    let n = b.len();
    let mut a = to_q(b);
    let mut inv: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    for k in 0..n {
        let piv = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(piv, k);
        inv.swap(piv, k);
        let p = a[k][k].clone();
        for j in 0..n {
            a[k][j] = &a[k][j] / &p;
            inv[k][j] = &inv[k][j] / &p;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in 0..n {
                    let (akj, ikj) = (a[k][j].clone(), inv[k][j].clone());
                    a[i][j] -= &f * akj;
                    inv[i][j] -= &f * ikj;
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inertia() {
        let b = vec![vec![2, 1], vec![1, -3]];
        assert_eq!(det(&b), BigInt::from(-7));
        assert_eq!(inertia(&b), (1, 1, 0));
        let c = vec![vec![0, 1, 1, 1], vec![1, -2, 0, 0], vec![1, 0, 3, 0], vec![1, 0, 0, 5]];
        assert_eq!(det(&c), BigInt::from(1));
        let s = vec![vec![1, 1], vec![1, 1]];
        assert_eq!(inertia(&s), (1, 0, 1));
    }

    #[test]
    fn inverse_times_matrix() {
        let b = vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]];
        let inv = inverse(&b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = Q::zero();
                for t in 0..3 {
                    acc += Q::from_integer(BigInt::from(b[i][t])) * &inv[t][j];
                }
                assert_eq!(acc, if i == j { Q::one() } else { Q::zero() });
            }
        }
    }
}
