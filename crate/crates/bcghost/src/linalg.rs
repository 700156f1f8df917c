//! Exact sparse Gaussian elimination over the rationals.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::rational::Q;

pub type SparseRow = BTreeMap<usize, Q>;

/// Incremental row echelon form. Each stored row has leading column equal to
/// its key and leading coefficient 1.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    ncols: usize,
    pivots: BTreeMap<usize, SparseRow>,
}

fn axpy(row: &mut SparseRow, c: &Q, other: &SparseRow) {
    for (k, v) in other {
        let e = row.entry(*k).or_insert_with(Q::zero);
        *e -= c * v;
        if e.is_zero() {
            row.remove(k);
        }
    }
}

impl Echelon {
    pub fn new(ncols: usize) -> Self {
        Echelon { ncols, pivots: BTreeMap::new() }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Adds a row; returns `true` when it raised the rank.
    pub fn push(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        loop {
            let Some((&lead, c)) = row.iter().next() else {
                return false;
            };
            match self.pivots.get(&lead) {
                Some(p) => {
                    let c = c.clone();
                    axpy(&mut row, &c, p);
                }
                None => {
                    let inv = c.recip();
                    for v in row.values_mut() {
                        *v *= &inv;
                    }
                    self.pivots.insert(lead, row);
                    return true;
                }
            }
        }
    }

    /// Basis of the null space, one vector per free column (in increasing order),
    /// each with a 1 in its free column and 0 in the other free columns.
    pub fn kernel(&self) -> Vec<Vec<Q>> {
        let free: Vec<usize> = (0..self.ncols).filter(|c| !self.pivots.contains_key(c)).collect();
        free.iter().map(|&f| self.back_substitute(|c| if c == f { Q::one() } else { Q::zero() })).collect()
    }

    fn back_substitute(&self, free_value: impl Fn(usize) -> Q) -> Vec<Q> {
        let mut x: Vec<Q> = (0..self.ncols)
            .map(|c| if self.pivots.contains_key(&c) { Q::zero() } else { free_value(c) })
            .collect();
        for (&p, row) in self.pivots.iter().rev() {
            let mut s = Q::zero();
            for (c, v) in row.range(p + 1..) {
                s += v * &x[*c];
            }
            x[p] = -s;
        }
        x
    }
}

/// Solves `A x = b` for rows `(a, b)`; free unknowns are set to 0.
/// `None` when the system is inconsistent.
pub fn solve_affine(ncols: usize, rows: impl IntoIterator<Item = (SparseRow, Q)>) -> Option<Vec<Q>> {
    // the right-hand side sits in the last column so it is never a pivot unless inconsistent
    let mut ech = Echelon::new(ncols + 1);
    for (mut a, b) in rows {
        if !b.is_zero() {
            a.insert(ncols, -b);
        }
        ech.push(a);
    }
    if ech.pivots.contains_key(&ncols) {
        return None;
    }
    let x = ech.back_substitute(|c| if c == ncols { Q::one() } else { Q::zero() });
    Some(x[..ncols].to_vec())
}

/// Kernel of a list of rows over `ncols` unknowns.
pub fn kernel(ncols: usize, rows: impl IntoIterator<Item = SparseRow>) -> Vec<Vec<Q>> {
    let mut ech = Echelon::new(ncols);
    for r in rows {
        ech.push(r);
    }
    ech.kernel()
}

/// Determinant of a dense square matrix by fraction-free elimination over `Q`.
pub fn det(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut d = Q::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Q::zero();
        };
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        let p = m[col][col].clone();
        d *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let sub = &f * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn row(v: &[(usize, i64)]) -> SparseRow {
        v.iter().map(|(c, x)| (*c, q(*x))).collect()
    }

    #[test]
    fn kernel_of_rank_one() {
        let k = kernel(3, [row(&[(0, 1), (1, 2), (2, 3)]), row(&[(0, 2), (1, 4), (2, 6)])]);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(&v[0] + q(2) * &v[1] + q(3) * &v[2], q(0));
        }
    }

    #[test]
    fn affine_and_det() {
        let x = solve_affine(2, [(row(&[(0, 1), (1, 1)]), q(3)), (row(&[(0, 1), (1, -1)]), q(1))]).unwrap();
        assert_eq!(x, vec![q(2), q(1)]);
        assert!(solve_affine(1, [(row(&[(0, 1)]), q(1)), (row(&[(0, 2)]), q(1))]).is_none());
        assert_eq!(det(vec![vec![q(0), q(1)], vec![q(1), q(0)]]), q(-1));
        assert_eq!(det(vec![vec![q(2), q(1)], vec![q(4), q(5)]]), q(6));
    }
}
