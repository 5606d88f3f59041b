//! Exact rank and integer dependencies of small integer vector families.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..m.len() {
            for j in c + 1..cols {
                let v = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
                m[i][j] = v;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Coefficients `c` (coprime integers, not all zero) with `Σ c_i v_i = 0`,
/// if the vectors are dependent.
pub fn integer_dependency(vectors: &[Vec<i64>]) -> Option<Vec<BigInt>> {
    let m = vectors.len();
    if m == 0 {
        return None;
    }
    let dim = vectors[0].len();
    // matrix with the vectors as columns
    let mut a: Vec<Vec<BigRational>> = (0..dim)
        .map(|i| (0..m).map(|j| BigRational::from_integer(BigInt::from(vectors[j][i]))).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(p) = (r..dim).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in 0..m {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..dim {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..m {
                    let t = &f * &a[r][j];
                    a[i][j] = &a[i][j] - t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == dim {
            break;
        }
    }
    let free = (0..m).find(|c| !pivots.contains(c))?;
    let mut x = vec![BigRational::zero(); m];
    x[free] = BigRational::one();
    for (row, &pc) in pivots.iter().enumerate() {
        x[pc] = -a[row][free].clone();
    }
    let lcm = x.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let ints: Vec<BigInt> = x.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let mut ints: Vec<BigInt> = ints.into_iter().map(|v| v / &g).collect();
    if let Some(first) = ints.iter().find(|v| !v.is_zero()) {
        if first.is_negative() {
            ints = ints.into_iter().map(|v| -v).collect();
        }
    }
    Some(ints)
}

pub fn to_i64_vec(v: &[BigInt]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(rank(&[vec![0, 0, -1, 1], vec![0, 0, 1, -1]]), 1);
        assert_eq!(rank(&[vec![0, 0, -1, 1], vec![1, -1, 0, 0]]), 2);
        assert_eq!(rank(&[vec![0, 0]]), 0);
        assert_eq!(rank(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]), 2);
    }

    #[test]
    fn dependency_witness() {
        let d = integer_dependency(&[vec![0, 0, -1, 1], vec![0, 0, 1, -1]]).unwrap();
        assert_eq!(to_i64_vec(&d).unwrap(), vec![1, 1]);
        assert!(integer_dependency(&[vec![0, 0, -1, 1], vec![1, -1, 0, 0]]).is_none());
        let d = integer_dependency(&[vec![2, 0], vec![0, 3], vec![4, 3]]).unwrap();
        assert_eq!(to_i64_vec(&d).unwrap(), vec![2, 1, -1]);
    }
}
