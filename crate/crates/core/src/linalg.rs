//! Exact integer/rational linear algebra and real-root isolation for integer polynomials.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::Rat;

pub type IntMatrix = Vec<Vec<BigInt>>;

pub fn int_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect()
}

pub fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for t in 0..k {
                        if !a[i][t].is_zero() && !b[t][j].is_zero() {
                            s += &a[i][t] * &b[t][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &IntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn mat_pow(a: &IntMatrix, k: u32) -> IntMatrix {
    let mut acc = identity(a.len());
    for _ in 0..k {
        acc = mat_mul(&acc, a);
    }
    acc
}

pub fn kronecker(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![BigInt::zero(); n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = &a[i][j] * &b[k][l];
                }
            }
        }
    }
    out
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &IntMatrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[k][k].clone();
    }
    sign * a[n - 1][n - 1].clone()
}

/// Rank over Q of an arbitrary integer matrix.
pub fn rank(m: &IntMatrix) -> usize {
    if m.is_empty() {
        return 0;
    }
    let mut a = m.clone();
    let rows = a.len();
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot_row = a[r].clone();
        for row in a.iter_mut().skip(r + 1) {
            if row[c].is_zero() {
                continue;
            }
            let factor = row[c].clone();
            for j in c..cols {
                row[j] = &row[j] * &pivot_row[c] - &factor * &pivot_row[j];
            }
            let g = row.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
            if !g.is_zero() && !g.is_one() {
                for v in row.iter_mut() {
                    *v = &*v / &g;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Solves `a x = b` over Q for square nonsingular `a`.
pub fn solve(a: &[Vec<Rat>], b: &[Rat]) -> Option<Vec<Rat>> {
    let n = a.len();
    let mut m: Vec<Vec<Rat>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let inv = m[c][c].recip();
        for j in c..=n {
            m[c][j] = &m[c][j] * &inv;
        }
        let pivot_row = m[c].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..=n {
                row[j] = &row[j] - &f * &pivot_row[j];
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Characteristic polynomial `det(tI - m)`, ascending coefficients, via Faddeev-LeVerrier.
/// All intermediate quantities are integers for an integer matrix.
pub fn char_poly(m: &IntMatrix) -> Vec<BigInt> {
    let n = m.len();
    let mut coeffs = vec![BigInt::zero(); n + 1];
    coeffs[n] = BigInt::one();
    let mut aux = identity(n);
    for k in 1..=n {
        let am = mat_mul(m, &aux);
        let trace: BigInt = (0..n).map(|i| am[i][i].clone()).sum();
        let c = -trace / BigInt::from(k);
        coeffs[n - k] = c.clone();
        aux = am;
        for (i, row) in aux.iter_mut().enumerate() {
            row[i] += &c;
        }
    }
    coeffs
}

/// Integer polynomial helpers (ascending coefficient vectors).
pub mod upoly {
    use super::*;

    pub fn trim(mut p: Vec<BigInt>) -> Vec<BigInt> {
        while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
            p.pop();
        }
        p
    }

    pub fn degree(p: &[BigInt]) -> usize {
        p.len().saturating_sub(1)
    }

    pub fn is_zero(p: &[BigInt]) -> bool {
        p.iter().all(|c| c.is_zero())
    }

    pub fn derivative(p: &[BigInt]) -> Vec<BigInt> {
        if p.len() <= 1 {
            return vec![BigInt::zero()];
        }
        p.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigInt::from(i))
            .collect()
    }

    pub fn content(p: &[BigInt]) -> BigInt {
        p.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c))
    }

    /// Divides out the (positive) content.
    pub fn primitive(p: &[BigInt]) -> Vec<BigInt> {
        let c = content(p);
        if c.is_zero() || c.is_one() {
            return p.to_vec();
        }
        p.iter().map(|v| v / &c).collect()
    }

    /// `|lc(b)|^(deg a - deg b + 1) * a mod b`: same sign pattern as the true remainder.
    pub fn signed_prem(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut r = a.to_vec();
        let db = degree(b);
        let lc = b[db].clone();
        let lc_abs = lc.abs();
        let lc_sign = if lc.is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        while !is_zero(&r) && degree(&r) >= db {
            let dr = degree(&r);
            let lead = r[dr].clone();
            // r <- |lc| r - sign(lc) lead x^(dr-db) b
            for v in r.iter_mut() {
                *v *= &lc_abs;
            }
            for (i, bc) in b.iter().enumerate() {
                r[dr - db + i] -= &lc_sign * &lead * bc;
            }
            r = trim(r);
        }
        trim(r)
    }

    pub fn gcd(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let mut x = primitive(&trim(a.to_vec()));
        let mut y = primitive(&trim(b.to_vec()));
        if degree(&x) < degree(&y) {
            std::mem::swap(&mut x, &mut y);
        }
        while !is_zero(&y) {
            let r = signed_prem(&x, &y);
            x = y;
            y = if is_zero(&r) { r } else { primitive(&r) };
        }
        let x = primitive(&x);
        if x.last().is_some_and(|c| c.is_negative()) {
            x.iter().map(|c| -c).collect()
        } else {
            x
        }
    }

    /// Exact quotient `a / b` over Q, returned primitive.
    pub fn exact_div(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let db = degree(b);
        let da = degree(a);
        if da < db {
            return vec![BigInt::one()];
        }
        let mut r: Vec<Rat> = a.iter().map(|c| Rat::from_integer(c.clone())).collect();
        let mut q = vec![Rat::zero(); da - db + 1];
        let lc = Rat::from_integer(b[db].clone());
        for k in (0..=da - db).rev() {
            let coef = &r[k + db] / &lc;
            for (i, bc) in b.iter().enumerate() {
                r[k + i] = &r[k + i] - &coef * Rat::from_integer(bc.clone());
            }
            q[k] = coef;
        }
        let lcm = q.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = q
            .iter()
            .map(|c| (c * Rat::from_integer(lcm.clone())).to_integer())
            .collect();
        primitive(&ints)
    }

    pub fn squarefree_part(p: &[BigInt]) -> Vec<BigInt> {
        let p = trim(p.to_vec());
        if degree(&p) == 0 {
            return p;
        }
        let g = gcd(&p, &derivative(&p));
        if degree(&g) == 0 {
            return primitive(&p);
        }
        exact_div(&p, &g)
    }

    /// Sign of `p(num / 2^k)`.
    pub fn sign_at_dyadic(p: &[BigInt], num: &BigInt, k: u64) -> i32 {
        let d = degree(p);
        let mut acc = BigInt::zero();
        let mut npow = BigInt::one();
        for (i, c) in p.iter().enumerate() {
            if !c.is_zero() {
                acc += (c * &npow) << ((d - i) as u64 * k);
            }
            npow *= num;
        }
        if acc.is_zero() {
            0
        } else if acc.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn sturm_chain(p: &[BigInt]) -> Vec<Vec<BigInt>> {
        let mut chain = vec![primitive(p), primitive(&derivative(p))];
        loop {
            let n = chain.len();
            if degree(&chain[n - 1]) == 0 {
                break;
            }
            let r = signed_prem(&chain[n - 2], &chain[n - 1]);
            if is_zero(&r) {
                break;
            }
            let neg: Vec<BigInt> = primitive(&r).iter().map(|c| -c).collect();
            chain.push(neg);
        }
        chain
    }

    /// Number of sign changes of the chain at `num / 2^k`, zeros skipped.
    pub fn variations(chain: &[Vec<BigInt>], num: &BigInt, k: u64) -> usize {
        let mut last = 0;
        let mut count = 0;
        for p in chain {
            let s = sign_at_dyadic(p, num, k);
            if s == 0 {
                continue;
            }
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Integer `U` with every real root `< U` (Cauchy bound).
    pub fn cauchy_bound(p: &[BigInt]) -> BigInt {
        let d = degree(p);
        let lc = p[d].abs();
        let max = p[..d]
            .iter()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(BigInt::zero);
        max.div_ceil(&lc) + BigInt::from(2)
    }

    /// Encloses the largest real root of `p` (which must have a nonnegative real root) in
    /// `(lo, hi]` with `lo = L / 2^k`, `hi = H / 2^k`, bisecting until `H - L <= 1`.
    /// Returns `(L, H)`; when the largest nonnegative root is zero returns `(0, 0)`.
    pub fn largest_real_root(p: &[BigInt], k: u64) -> (BigInt, BigInt) {
        let sf = squarefree_part(p);
        if degree(&sf) == 0 {
            return (BigInt::zero(), BigInt::zero());
        }
        let chain = sturm_chain(&sf);
        let mut hi = cauchy_bound(&sf) << k;
        let mut lo = BigInt::zero();
        let v_hi = variations(&chain, &hi, k);
        if variations(&chain, &lo, k) == v_hi {
            return (BigInt::zero(), BigInt::zero());
        }
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1u32;
            if variations(&chain, &mid, k) > v_hi {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let m = int_matrix(&[vec![2, -1, 0], vec![1, 3, 4], vec![0, 5, -2]]);
        // 2*(3*-2 - 4*5) - (-1)*(1*-2 - 0) + 0 = 2*(-26) + (-2) = -54
        assert_eq!(determinant(&m), BigInt::from(-54));
        let singular = int_matrix(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(determinant(&singular), BigInt::zero());
        assert_eq!(rank(&singular), 1);
    }

    #[test]
    fn char_poly_of_fibonacci_matrix() {
        let m = int_matrix(&[vec![1, 1], vec![1, 0]]);
        let cp = char_poly(&m);
        assert_eq!(
            cp,
            vec![BigInt::from(-1), BigInt::from(-1), BigInt::from(1)]
        );
    }

    #[test]
    fn largest_root_of_x2_minus_2() {
        let p = vec![BigInt::from(-2), BigInt::zero(), BigInt::one()];
        let (lo, hi) = upoly::largest_real_root(&p, 40);
        let scale = (1u64 << 40) as f64;
        let l = lo.to_string().parse::<f64>().unwrap() / scale;
        let h = hi.to_string().parse::<f64>().unwrap() / scale;
        assert!(l < 2f64.sqrt() && 2f64.sqrt() <= h + 1e-15);
    }

    #[test]
    fn squarefree_part_removes_repeats() {
        // (x-1)^2 (x+2)
        let p = vec![
            BigInt::from(2),
            BigInt::from(-3),
            BigInt::zero(),
            BigInt::one(),
        ];
        let sf = upoly::squarefree_part(&p);
        assert_eq!(sf, vec![BigInt::from(-2), BigInt::from(1), BigInt::from(1)]);
    }
}
