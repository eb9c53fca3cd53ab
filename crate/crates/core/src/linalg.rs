//! Dense linear algebra over exact rationals. Matrices are row-major
//! `Vec<Vec<Rational>>`; sizes here never exceed a few dozen.

use num::{Signed, Zero};

use crate::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place. Returns the pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut().skip(c) {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in c..cols {
                    let delta = &f * &m[r][j];
                    m[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &[Vec<Rational>]) -> usize {
    let mut work = m.to_vec();
    rref(&mut work).len()
}

/// Determinant of a square matrix by fraction-exact elimination.
pub fn determinant(m: &[Vec<Rational>]) -> Rational {
    let n = m.len();
    let mut a = m.to_vec();
    let mut det = Rational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let delta = &f * &a[c][j];
                a[i][j] -= delta;
            }
        }
    }
    det
}

/// General solution of `A x = b`: a particular solution and a basis of the
/// null space of `A`, or `None` when the system is inconsistent.
pub fn solve_affine(a: &[Vec<Rational>], b: &[Rational]) -> Option<(Vec<Rational>, Vec<Vec<Rational>>)> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut aug: Matrix = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let mut particular = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug[r][cols].clone();
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let null = free
        .iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::from_integer(1.into());
            for (r, &c) in pivots.iter().enumerate() {
                v[c] = -aug[r][f].clone();
            }
            v
        })
        .collect();
    Some((particular, null))
}

/// Unique solution of a square nonsingular system, `None` if singular.
pub fn solve_square(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let (x, null) = solve_affine(a, b)?;
    null.is_empty().then_some(x)
}

pub fn transpose(m: &[Vec<Rational>]) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn gram(vectors: &[Vec<Rational>]) -> Matrix {
    vectors
        .iter()
        .map(|u| vectors.iter().map(|v| dot(u, v)).collect())
        .collect()
}

pub fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).fold(Rational::zero(), |acc, (a, b)| acc + a * b)
}

pub fn sign(x: &Rational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter()
            .map(|r| r.iter().map(|&x| rat(x, 1)).collect())
            .collect()
    }

    #[test]
    fn determinant_and_rank() {
        let a = m(&[&[2, 1], &[1, 3]]);
        assert_eq!(determinant(&a), rat(5, 1));
        let s = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(determinant(&s), rat(0, 1));
        assert_eq!(rank(&s), 1);
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), rat(-1, 1));
    }

    #[test]
    fn affine_solution_with_null_space() {
        let a = m(&[&[1, 1, 0]]);
        let (x, null) = solve_affine(&a, &[rat(2, 1)]).unwrap();
        assert_eq!(dot(&a[0], &x), rat(2, 1));
        assert_eq!(null.len(), 2);
        for v in &null {
            assert_eq!(dot(&a[0], v), rat(0, 1));
        }
        assert!(solve_affine(&m(&[&[1, 1], &[1, 1]]), &[rat(1, 1), rat(2, 1)]).is_none());
    }
}
