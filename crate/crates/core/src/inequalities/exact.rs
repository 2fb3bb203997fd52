//! Exact rational linear algebra shared by the feasibility checker and the
//! facet enumerator.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat_int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn rat_frac(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Exact dyadic rational equal to the given finite f64.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

/// Inverse of a square rational matrix by Gauss–Jordan elimination.
pub fn invert(matrix: &[Vec<Rat>]) -> Option<Vec<Vec<Rat>>> {
    let n = matrix.len();
    assert!(matrix.iter().all(|r| r.len() == n));
    let mut a: Vec<Vec<Rat>> = matrix.to_vec();
    let mut inv: Vec<Vec<Rat>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &scale;
            inv[col][j] /= &scale;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in 0..n {
                    let adj = &factor * &a[col][j];
                    a[r][j] -= adj;
                    let adj = &factor * &inv[col][j];
                    inv[r][j] -= adj;
                }
            }
        }
    }
    Some(inv)
}

/// Greedily select `want` linearly independent rows; returns their indices.
pub fn independent_rows(rows: &[Vec<Rat>], want: usize) -> Option<Vec<usize>> {
    let width = rows.first()?.len();
    let mut basis: Vec<Vec<Rat>> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        if chosen.len() == want {
            break;
        }
        // Reduce the candidate against the current basis.
        let mut cand = row.clone();
        for b in &basis {
            let lead = b.iter().position(|v| !v.is_zero()).unwrap();
            if !cand[lead].is_zero() {
                let factor = &cand[lead] / &b[lead];
                for j in 0..width {
                    let adj = &factor * &b[j];
                    cand[j] -= adj;
                }
            }
        }
        if cand.iter().any(|v| !v.is_zero()) {
            basis.push(cand);
            chosen.push(idx);
        }
    }
    (chosen.len() == want).then_some(chosen)
}

/// Scale a rational vector to the shortest integer vector with the same
/// direction (positive multiple).
pub fn primitive(vec: &[Rat]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for v in vec {
        lcm = lcm.lcm(v.denom());
    }
    let mut ints: Vec<BigInt> = vec.iter().map(|v| (v * &lcm).to_integer()).collect();
    let mut gcd = BigInt::zero();
    for v in &ints {
        gcd = gcd.gcd(&v.abs());
    }
    if !gcd.is_zero() && !gcd.is_one() {
        for v in &mut ints {
            *v /= &gcd;
        }
    }
    ints
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_a_small_matrix() {
        let m = vec![
            vec![rat_int(1), rat_int(1)],
            vec![rat_int(1), rat_int(2)],
        ];
        let inv = invert(&m).unwrap();
        assert_eq!(inv[0][0], rat_int(2));
        assert_eq!(inv[0][1], rat_int(-1));
        assert_eq!(inv[1][0], rat_int(-1));
        assert_eq!(inv[1][1], rat_int(1));
        let singular = vec![
            vec![rat_int(1), rat_int(2)],
            vec![rat_int(2), rat_int(4)],
        ];
        assert!(invert(&singular).is_none());
    }

    #[test]
    fn picks_independent_rows_in_order() {
        let rows = vec![
            vec![rat_int(1), rat_int(0)],
            vec![rat_int(2), rat_int(0)],
            vec![rat_int(0), rat_int(3)],
        ];
        assert_eq!(independent_rows(&rows, 2).unwrap(), vec![0, 2]);
        assert!(independent_rows(&rows[..2], 2).is_none());
    }

    #[test]
    fn primitive_clears_denominators_and_common_factors() {
        let v = vec![rat_frac(2, 3), rat_frac(-4, 3), rat_int(2)];
        let ints: Vec<i64> = primitive(&v)
            .into_iter()
            .map(|b| i64::try_from(b).unwrap())
            .collect();
        assert_eq!(ints, vec![1, -2, 3]);
    }

    #[test]
    fn f64_conversion_is_exact_for_dyadics() {
        assert_eq!(rat_from_f64(0.25).unwrap(), rat_frac(1, 4));
        assert_eq!(rat_from_f64(0.5).unwrap(), rat_frac(1, 2));
        assert!(rat_from_f64(f64::NAN).is_none());
    }
}
