use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use super::malcev::{MalcevPresentation, Nil2Group};
use super::smith::{det, mat_mul, smith_normal_form, to_small, IMat};
use crate::error::{Error, Result};
use crate::group::Group;
use crate::scheme::{CheckRow, VerifyReport};

/// A Malcev basis `(x, x_3, …, x_r, y, z, w_2, …, w_s)` with a Heisenberg
/// direction: `[y, x] = z^mu` and `[x_j, x]` has no `z`-component.
///
/// Non-central index `0` is `x`, `r-1` is `y`, central index `0` is `z`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MalcevHeisData {
    pub presentation: MalcevPresentation,
    pub mu: i64,
    /// Columns are the new non-central basis in input coordinates.
    pub p: IMat,
    /// New central coordinates are `u · old`.
    pub u: IMat,
}

impl MalcevHeisData {
    pub fn x_index(&self) -> usize {
        0
    }

    pub fn y_index(&self) -> usize {
        self.presentation.r() - 1
    }

    pub fn group(&self) -> Nil2Group {
        Nil2Group::new(self.presentation.clone())
    }
}

fn transform(pres: &MalcevPresentation, p: &IMat, u: &IMat) -> Result<MalcevPresentation> {
    let (r, s) = (pres.r(), pres.s());
    let mut table = vec![vec![vec![0i64; s]; r]; r];
    for k in 0..r {
        for l in 0..r {
            let mut acc = vec![0i64; s];
            for i in 0..r {
                for j in 0..r {
                    let f = p[i][k] * p[j][l];
                    if f != 0 {
                        for (c, w) in pres.comm(i, j).iter().enumerate() {
                            acc[c] += f * w;
                        }
                    }
                }
            }
            let col: IMat = acc.iter().map(|&x| vec![x]).collect();
            table[k][l] = mat_mul(u, &col).into_iter().map(|row| row[0]).collect();
        }
    }
    MalcevPresentation::from_table(r, s, table)
}

/// Adapt the basis so that it has a Heisenberg direction.
///
/// `x` is the first basis element with `ω(·, x) ≠ 0`. The map
/// `β: A' → Z, a ↦ ω(a, x)` on the span `A'` of the other non-central basis
/// elements is put in Smith form `U·β·V = D`; `y` is the first new basis
/// vector of `A'` and `μ = d_1`.
pub fn find_heisenberg_direction(pres: &MalcevPresentation) -> Result<MalcevHeisData> {
    let (r, s) = (pres.r(), pres.s());
    let x = (0..r)
        .find(|&i| (0..r).any(|j| pres.comm(j, i).iter().any(|&c| c != 0)))
        .ok_or(Error::Abelian)?;
    let others: Vec<usize> = (0..r).filter(|&i| i != x).collect();
    let beta: IMat = (0..s).map(|c| others.iter().map(|&j| pres.comm(j, x)[c]).collect()).collect();
    let snf = smith_normal_form(&beta)?;
    let mu = snf.d[0][0];
    let (u, v) = (to_small(&snf.u)?, to_small(&snf.v)?);
    // new basis order: x, V col 1, …, V col r-2, V col 0
    let mut order: Vec<Option<usize>> = vec![None];
    order.extend((1..others.len()).map(Some));
    order.push(Some(0));
    let mut p = vec![vec![0i64; r]; r];
    for (new, src) in order.iter().enumerate() {
        match src {
            None => p[x][new] = 1,
            Some(col) => {
                for (row, &old) in others.iter().enumerate() {
                    p[old][new] = v[row][*col];
                }
            }
        }
    }
    let presentation = transform(pres, &p, &u)?;
    Ok(MalcevHeisData { presentation, mu, p, u })
}

/// Re-verify the adapted basis from the transformed table.
pub fn check_heisenberg_direction(input: &MalcevPresentation, data: &MalcevHeisData) -> VerifyReport {
    let mut rep = VerifyReport::default();
    let one = |d: BigInt| d.abs() == BigInt::from(1);
    rep.push(CheckRow::check("heis-dir: det U = ±1", "central", one(det(&data.u))));
    rep.push(CheckRow::check("heis-dir: det P = ±1", "non-central", one(det(&data.p))));
    let pres = &data.presentation;
    let (r, s) = (pres.r(), pres.s());
    let yx = pres.comm(r - 1, 0);
    let mut want = vec![0; s];
    want[0] = data.mu;
    rep.push(
        CheckRow::check("heis-dir: [y,x] = z^mu, mu > 0", "y,x", data.mu > 0 && yx == want.as_slice())
            .with_value(format!("{yx:?}")),
    );
    for j in 1..r - 1 {
        let v = pres.comm(j, 0);
        rep.push(CheckRow::check("heis-dir: [x_j,x] has no z part", format!("j={j}"), v[0] == 0).with_value(format!("{v:?}")));
    }
    let exact = transform(input, &data.p, &data.u).map(|t| &t == pres).unwrap_or(false);
    rep.push(CheckRow::check("heis-dir: table transforms exactly", "all pairs", exact));
    rep
}

/// `χ_y(h x^k) = χ_y(h)` and `χ_z(h x^k) = χ_z(h) + μ k χ_y(h)` for `h` with
/// no `x`-coordinate.
pub fn nil2coords_holds(data: &MalcevHeisData, h: &[i64], k: i64) -> bool {
    let g = data.group();
    let r = data.presentation.r();
    let yi = data.y_index();
    let mut xk = g.identity();
    xk[0] = k;
    let out = g.mul(&h.to_vec(), &xk);
    out[yi] == h[yi] && out[r] == h[r] + data.mu * k * h[yi]
}

#[cfg(test)]
mod tests {
    use super::super::smith::identity;
    use super::*;

    fn run(p: &MalcevPresentation) -> MalcevHeisData {
        let d = find_heisenberg_direction(p).unwrap();
        let rep = check_heisenberg_direction(p, &d);
        assert!(rep.all_pass(), "{:?}", rep.failures().collect::<Vec<_>>());
        d
    }

    #[test]
    fn h3_is_already_adapted() {
        let d = run(&MalcevPresentation::heisenberg(1));
        assert_eq!(d.mu, 1);
        assert_eq!(d.p, identity(2));
        assert_eq!(d.u, identity(1));
    }

    #[test]
    fn rescaled_h3_has_height_two() {
        assert_eq!(run(&MalcevPresentation::heisenberg(2)).mu, 2);
    }

    #[test]
    fn h5_height_one() {
        let d = run(&MalcevPresentation::heisenberg5());
        assert_eq!(d.mu, 1);
    }

    #[test]
    fn abelian_refused() {
        let p = MalcevPresentation::from_entries(3, 1, vec![]).unwrap();
        assert!(matches!(find_heisenberg_direction(&p), Err(Error::Abelian)));
    }

    #[test]
    fn mixed_basis() {
        // x enters only through [u_2, u_0] = 4z - 6w and [u_1, u_0] = 6z
        let p = MalcevPresentation::from_entries(3, 2, vec![(1, 0, vec![6, 0]), (2, 0, vec![4, -6]), (2, 1, vec![1, 1])]).unwrap();
        let d = run(&p);
        assert_eq!(d.mu, 2);
        let g = d.group();
        let h = vec![0, 3, -2, 5, 7];
        for k in -20..=20 {
            assert!(nil2coords_holds(&d, &h, k));
        }
        assert!(g.is_valid(&h));
    }
}
