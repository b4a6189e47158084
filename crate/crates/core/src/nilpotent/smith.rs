use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
pub type IMat = Vec<Vec<i64>>;

pub fn identity(n: usize) -> IMat {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn zeros(rows: usize, cols: usize) -> IMat {
    vec![vec![0; cols]; rows]
}

pub fn cols(m: &IMat) -> usize {
    m.first().map_or(0, Vec::len)
}

pub fn mat_mul(a: &IMat, b: &IMat) -> IMat {
    let (n, k, p) = (a.len(), b.len(), cols(b));
    let mut out = zeros(n, p);
    for i in 0..n {
        for l in 0..k {
            if a[i][l] != 0 {
                for j in 0..p {
                    out[i][j] += a[i][l] * b[l][j];
                }
            }
        }
    }
    out
}

pub fn transpose(a: &IMat) -> IMat {
    (0..cols(a)).map(|j| a.iter().map(|row| row[j]).collect()).collect()
}

/// Dense arbitrary-precision integer matrix, row-major.
pub type BMat = Vec<Vec<BigInt>>;

pub fn to_big(m: &IMat) -> BMat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

/// The matrix as `i64` entries, or a range error.
pub fn to_small(m: &BMat) -> Result<IMat> {
    m.iter()
        .map(|r| r.iter().map(|x| i64::try_from(x).map_err(|_| Error::Range(format!("matrix entry {x} exceeds i64")))).collect())
        .collect()
}

pub fn big_mat_mul(a: &BMat, b: &BMat) -> BMat {
    let p = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..p).map(|j| row.iter().zip(b).map(|(x, brow)| x * &brow[j]).sum()).collect())
        .collect()
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &IMat) -> BigInt {
    big_det(&to_big(m))
}

pub fn big_det(m: &BMat) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
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

/// Entries as JSON numbers when they fit `i64`, else decimal strings.
mod bigser {
    use num_bigint::BigInt;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::BMat;

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Entry {
        Small(i64),
        Big(String),
    }

    pub fn serialize<S: Serializer>(m: &BMat, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Entry>> = m
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).map_or_else(|_| Entry::Big(x.to_string()), Entry::Small)).collect())
            .collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BMat, D::Error> {
        let rows: Vec<Vec<Entry>> = Vec::deserialize(d)?;
        rows.into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|e| match e {
                        Entry::Small(x) => Ok(BigInt::from(x)),
                        Entry::Big(t) => t.parse().map_err(D::Error::custom),
                    })
                    .collect()
            })
            .collect()
    }
}

/// `U·M·V = D` with `U`, `V` unimodular and `D` in Smith form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snf {
    /// Row transform; its entries can outgrow `i64` even for small inputs.
    #[serde(with = "bigser")]
    pub u: BMat,
    pub d: IMat,
    #[serde(with = "bigser")]
    pub v: BMat,
}

impl Snf {
    /// Diagonal entries `d_1 | d_2 | …`.
    pub fn diag(&self) -> Vec<i64> {
        (0..self.d.len().min(cols(&self.d))).map(|i| self.d[i][i]).collect()
    }
}

type W = BMat;

fn narrow(m: &W) -> Result<IMat> {
    m.iter()
        .map(|r| r.iter().map(|x| i64::try_from(x).map_err(|_| Error::Range("Smith form entry exceeds i64".into()))).collect())
        .collect()
}

/// Replace rows `(a, b)` by `(s·a + t·b, c·a + d·b)`; the caller keeps the
/// 2×2 matrix unimodular.
fn rows_mix(m: &mut W, a: usize, b: usize, [s, t, c, d]: &[BigInt; 4]) {
    for j in 0..m[a].len() {
        let (x, y) = (m[a][j].clone(), m[b][j].clone());
        m[a][j] = s * &x + t * &y;
        m[b][j] = c * &x + d * &y;
    }
}

fn cols_mix(m: &mut W, a: usize, b: usize, [s, t, c, d]: &[BigInt; 4]) {
    for row in m.iter_mut() {
        let (x, y) = (row[a].clone(), row[b].clone());
        row[a] = s * &x + t * &y;
        row[b] = c * &x + d * &y;
    }
}

fn col_swap(m: &mut W, a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

/// Unimodular `[[s, t], [c, d]]` sending `(p, x)` to `(gcd, 0)`.
fn elim(p: &BigInt, x: &BigInt) -> [BigInt; 4] {
    if (x % p).is_zero() {
        return [BigInt::one(), BigInt::zero(), -(x / p), BigInt::one()];
    }
    let e = p.extended_gcd(x);
    [e.x, e.y, -(x / &e.gcd), p / &e.gcd]
}

/// Nearest-integer quotient, used to size-reduce one vector against another.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// Add integer multiples of the kernel rows (rows of `u` from `rank` on,
/// which `u·m` sends to zero) to shrink every row of `u`.
fn reduce_rows(u: &mut W, rank: usize) {
    for i in 0..u.len() {
        for k in rank..u.len() {
            if k == i {
                continue;
            }
            let (nk, dot): (BigInt, BigInt) = u[k].iter().zip(&u[i]).fold((BigInt::zero(), BigInt::zero()), |(n, d), (a, b)| (n + a * a, d + a * b));
            if nk.is_zero() {
                continue;
            }
            let q = round_div(&dot, &nk);
            if !q.is_zero() {
                let src = u[k].clone();
                for (x, y) in u[i].iter_mut().zip(&src) {
                    *x -= &q * y;
                }
            }
        }
    }
}

/// Smith normal form by gcd elimination of each pivot row and column. All
/// arithmetic is in `BigInt`; `D` must fit `i64`.
pub fn smith_normal_form(m: &IMat) -> Result<Snf> {
    let rows = m.len();
    let ncols = cols(m);
    if m.iter().any(|r| r.len() != ncols) {
        return Err(Error::Validation("ragged matrix".into()));
    }
    let mut a = to_big(m);
    let mut u = to_big(&identity(rows));
    let mut v = to_big(&identity(ncols));
    let mut rank = 0;
    for t in 0..rows.min(ncols) {
        let pivot = (t..rows)
            .flat_map(|i| (t..ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| a[i][j].magnitude().clone());
        let Some((pi, pj)) = pivot else { break };
        rank += 1;
        a.swap(t, pi);
        u.swap(t, pi);
        col_swap(&mut a, t, pj);
        col_swap(&mut v, t, pj);
        loop {
            for i in t + 1..rows {
                if !a[i][t].is_zero() {
                    let g = elim(&a[t][t], &a[i][t]);
                    rows_mix(&mut a, t, i, &g);
                    rows_mix(&mut u, t, i, &g);
                }
            }
            for j in t + 1..ncols {
                if !a[t][j].is_zero() {
                    let g = elim(&a[t][t], &a[t][j]);
                    cols_mix(&mut a, t, j, &g);
                    cols_mix(&mut v, t, j, &g);
                }
            }
            // column elimination can refill column t below the pivot
            if (t + 1..rows).any(|i| !a[i][t].is_zero()) {
                continue;
            }
            let p = a[t][t].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..ncols).any(|j| !(&a[i][j] % &p).is_zero()));
            match bad {
                Some(i) => {
                    let one = [BigInt::one(), BigInt::one(), BigInt::zero(), BigInt::one()];
                    rows_mix(&mut a, t, i, &one);
                    rows_mix(&mut u, t, i, &one);
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut().chain(u[t].iter_mut()) {
                *x = -&*x;
            }
        }
    }
    reduce_rows(&mut u, rank);
    let mut vt: W = (0..ncols).map(|j| v.iter().map(|r| r[j].clone()).collect()).collect();
    reduce_rows(&mut vt, rank);
    let v: W = (0..ncols).map(|i| vt.iter().map(|r| r[i].clone()).collect()).collect();
    Ok(Snf { u, d: narrow(&a)?, v })
}
