//! Smith normal form of dense integer matrices with unimodular transforms.

use crate::integer::Integer;
use crate::matrix::DenseMatrix;

/// `u · a · v = s` with `s` diagonal, `d₀ | d₁ | …`, all `dᵢ ≥ 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snf {
    pub diagonal: Vec<Integer>,
    pub rank: usize,
    pub u: DenseMatrix,
    pub u_inv: DenseMatrix,
    pub v: DenseMatrix,
    pub v_inv: DenseMatrix,
}

impl Snf {
    /// Nonzero diagonal entries that are not units.
    pub fn invariant_factors(&self) -> Vec<Integer> {
        self.diagonal[..self.rank]
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

struct Work {
    s: DenseMatrix,
    u: DenseMatrix,
    u_inv: DenseMatrix,
    v: DenseMatrix,
    v_inv: DenseMatrix,
}

impl Work {
    fn add_row(&mut self, dst: usize, src: usize, c: &Integer) {
        self.s.add_row(dst, src, c);
        self.u.add_row(dst, src, c);
        self.u_inv.add_col(src, dst, &-c);
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        self.s.swap_rows(a, b);
        self.u.swap_rows(a, b);
        self.u_inv.swap_cols(a, b);
    }

    fn negate_row(&mut self, r: usize) {
        self.s.negate_row(r);
        self.u.negate_row(r);
        self.u_inv.negate_col(r);
    }

    fn add_col(&mut self, dst: usize, src: usize, c: &Integer) {
        self.s.add_col(dst, src, c);
        self.v.add_col(dst, src, c);
        self.v_inv.add_row(src, dst, &-c);
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        self.s.swap_cols(a, b);
        self.v.swap_cols(a, b);
        self.v_inv.swap_rows(a, b);
    }
}

pub fn smith_normal_form(a: &DenseMatrix) -> Snf {
    let (m, n) = (a.rows(), a.cols());
    let mut w = Work {
        s: a.clone(),
        u: DenseMatrix::identity(m),
        u_inv: DenseMatrix::identity(m),
        v: DenseMatrix::identity(n),
        v_inv: DenseMatrix::identity(n),
    };
    let mut t = 0;
    while t < m.min(n) {
        // pivot on a nonzero entry of least absolute value
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                let x = &w.s[(i, j)];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < w.s[(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.swap_rows(t, pi);
        w.swap_cols(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if w.s[(i, t)].is_zero() {
                    continue;
                }
                let (q, _) = w.s[(i, t)].div_rem_euclid(&w.s[(t, t)]);
                w.add_row(i, t, &-q);
                if !w.s[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if w.s[(t, j)].is_zero() {
                    continue;
                }
                let (q, _) = w.s[(t, j)].div_rem_euclid(&w.s[(t, t)]);
                w.add_col(j, t, &-q);
                if !w.s[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // a smaller remainder exists; move it to the pivot
                let mut best = (t, t);
                for i in t + 1..m {
                    let x = &w.s[(i, t)];
                    if !x.is_zero() && x.abs() < w.s[best].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..n {
                    let x = &w.s[(t, j)];
                    if !x.is_zero() && x.abs() < w.s[best].abs() {
                        best = (t, j);
                    }
                }
                w.swap_rows(t, best.0);
                w.swap_cols(t, best.1);
                continue;
            }
            let pivot = w.s[(t, t)].clone();
            let offender = (t + 1..m).find(|&i| {
                (t + 1..n).any(|j| !w.s[(i, j)].is_divisible_by(&pivot))
            });
            match offender {
                Some(i) => w.add_row(t, i, &Integer::ONE),
                None => break,
            }
        }
        if w.s[(t, t)].is_negative() {
            w.negate_row(t);
        }
        t += 1;
    }
    let diagonal: Vec<Integer> = (0..m.min(n)).map(|i| w.s[(i, i)].clone()).collect();
    let rank = diagonal.iter().take_while(|d| !d.is_zero()).count();
    Snf {
        diagonal,
        rank,
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
        v_inv: w.v_inv,
    }
}

/// Solves `a · x = b` over ℤ, if possible.
pub fn solve_integer(a: &DenseMatrix, b: &[Integer]) -> Option<Vec<Integer>> {
    let snf = smith_normal_form(a);
    let ub = snf.u.mul_vec(b);
    let mut y = vec![Integer::ZERO; a.cols()];
    for (i, c) in ub.iter().enumerate() {
        if i < snf.rank {
            if !c.is_divisible_by(&snf.diagonal[i]) {
                return None;
            }
            y[i] = c.div_rem_euclid(&snf.diagonal[i]).0;
        } else if !c.is_zero() {
            return None;
        }
    }
    Some(snf.v.mul_vec(&y))
}

/// A basis of the integer kernel `{x : a·x = 0}`, as columns.
pub fn integer_kernel(a: &DenseMatrix) -> DenseMatrix {
    let snf = smith_normal_form(a);
    snf.v.select_cols(snf.rank..a.cols())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &DenseMatrix) -> Snf {
        let snf = smith_normal_form(a);
        let s = snf.u.mul(a).mul(&snf.v);
        for i in 0..s.rows() {
            for j in 0..s.cols() {
                if i != j {
                    assert!(s[(i, j)].is_zero(), "off-diagonal entry");
                } else {
                    assert_eq!(s[(i, i)], snf.diagonal[i]);
                    assert!(!s[(i, i)].is_negative());
                }
            }
        }
        for w in snf.diagonal.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_divisible_by(&w[0]));
            } else {
                let _ = &w[0];
            }
        }
        assert!(snf.diagonal[snf.rank..].iter().all(Integer::is_zero));
        assert_eq!(snf.u.mul(&snf.u_inv), DenseMatrix::identity(a.rows()));
        assert_eq!(snf.v.mul(&snf.v_inv), DenseMatrix::identity(a.cols()));
        snf
    }

    #[test]
    fn examples() {
        let snf = check(&DenseMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(snf.diagonal, vec![Integer::from(2), 4.into()]);
        let snf = check(&DenseMatrix::identity(3));
        assert_eq!(snf.diagonal, vec![Integer::ONE; 3]);
        let snf = check(&DenseMatrix::from_rows(&[vec![0]]));
        assert_eq!(snf.diagonal, vec![Integer::ZERO]);
        assert_eq!(snf.rank, 0);
        let snf = check(&DenseMatrix::from_rows(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(snf.diagonal, vec![Integer::ONE, 6.into()]);
        check(&DenseMatrix::zeros(0, 3));
        check(&DenseMatrix::zeros(2, 0));
    }

    #[test]
    fn solver_and_kernel() {
        let a = DenseMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert!(solve_integer(&a, &[1.into(), 0.into()]).is_none());
        let x = solve_integer(&a, &[2.into(), 6.into()]).unwrap();
        assert_eq!(a.mul_vec(&x), vec![Integer::from(2), 6.into()]);
        let k = integer_kernel(&DenseMatrix::from_rows(&[vec![1, 2, 3]]));
        assert_eq!(k.cols(), 2);
        assert!(DenseMatrix::from_rows(&[vec![1, 2, 3]]).mul(&k).is_zero());
    }

    fn det(a: &[Vec<i64>]) -> i128 {
        let n = a.len();
        if n == 0 {
            return 1;
        }
        let mut total = 0i128;
        for c in 0..n {
            let minor: Vec<Vec<i64>> = a[1..]
                .iter()
                .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &x)| x).collect())
                .collect();
            let sign = if c % 2 == 0 { 1 } else { -1 };
            total += sign * a[0][c] as i128 * det(&minor);
        }
        total
    }

    proptest! {
        #[test]
        fn round_trip(rows in 0usize..5, cols in 0usize..5, seed in prop::collection::vec(-9i64..10, 25)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 5 + j]).collect()).collect();
            let a = if rows == 0 { DenseMatrix::zeros(0, cols) } else { DenseMatrix::from_rows(&data) };
            let snf = check(&a);
            if rows == cols && rows > 0 {
                // product of invariant factors is |det|
                let prod = snf.diagonal.iter().fold(Integer::ONE, |acc, d| &acc * d);
                prop_assert_eq!(prod, Integer::from(det(&data).unsigned_abs() as i64));
            }
        }
    }
}
