//! Integer solutions of linear systems via column Hermite reduction.

use super::arith::extended_gcd;
use crate::scalar::Coord;

/// Solution set `{particular + Σ kᵢ·kernel[i] : kᵢ ∈ Z}` of `A·s = target`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution<T> {
    pub particular: Vec<T>,
    pub kernel: Vec<Vec<T>>,
}

/// Any integer `s` with `A·s = target` for a 2×4 system, or `None` when the
/// target lies outside the column lattice of `A`.
pub fn solve_linear_integer_system<T: Coord>(a: &[[T; 4]; 2], target: &[T; 2]) -> Option<[T; 4]> {
    let rows: Vec<Vec<T>> = a.iter().map(|r| r.to_vec()).collect();
    let sol = solve_affine_system(&rows, target)?;
    let mut it = sol.particular.into_iter();
    Some(std::array::from_fn(|_| it.next().expect("four unknowns")))
}

/// General `m×n` version returning the particular solution and a kernel basis.
pub fn solve_affine_system<T: Coord>(a: &[Vec<T>], target: &[T]) -> Option<AffineSolution<T>> {
    let m = a.len();
    assert_eq!(m, target.len(), "row count mismatch");
    let n = a.first().map_or(0, Vec::len);
    let mut h: Vec<Vec<T>> = a.to_vec();
    let mut u: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect();

    // Column operations keep h = a·u lower echelon: row i has its pivot at
    // column pivots[i] (if any) and zeros to the right of it.
    let mut pivot_col = 0;
    let mut pivots: Vec<Option<usize>> = Vec::with_capacity(m);
    for row in 0..m {
        if pivot_col == n {
            pivots.push(None);
            continue;
        }
        for j in pivot_col + 1..n {
            if h[row][j].is_zero() {
                continue;
            }
            let (x, y) = (h[row][pivot_col].clone(), h[row][j].clone());
            let (g, s, t) = extended_gcd(&x, &y);
            let (xg, yg) = (x / g.clone(), y / g);
            combine_columns(&mut h, pivot_col, j, &s, &t, &xg, &yg);
            combine_columns(&mut u, pivot_col, j, &s, &t, &xg, &yg);
        }
        if h[row][pivot_col].is_zero() {
            pivots.push(None);
        } else {
            pivots.push(Some(pivot_col));
            pivot_col += 1;
        }
    }

    let mut y = vec![T::zero(); n];
    for row in 0..m {
        let mut rest = target[row].clone();
        for (j, yj) in y.iter().enumerate().take(pivot_col) {
            if Some(j) != pivots[row] {
                rest = rest - h[row][j].clone() * yj.clone();
            }
        }
        match pivots[row] {
            Some(p) => {
                let (q, r) = rest.div_rem(&h[row][p]);
                if !r.is_zero() {
                    return None;
                }
                y[p] = q;
            }
            None if !rest.is_zero() => return None,
            None => {}
        }
    }

    let particular = (0..n)
        .map(|i| (0..n).fold(T::zero(), |acc, j| acc + u[i][j].clone() * y[j].clone()))
        .collect();
    let kernel = (pivot_col..n).map(|j| (0..n).map(|i| u[i][j].clone()).collect()).collect();
    Some(AffineSolution { particular, kernel })
}

/// `(col_p, col_j) ← (s·col_p + t·col_j, −yg·col_p + xg·col_j)`, a unimodular move.
fn combine_columns<T: Coord>(mat: &mut [Vec<T>], p: usize, j: usize, s: &T, t: &T, xg: &T, yg: &T) {
    for row in mat.iter_mut() {
        let (cp, cj) = (row[p].clone(), row[j].clone());
        row[p] = s.clone() * cp.clone() + t.clone() * cj.clone();
        row[j] = xg.clone() * cj - yg.clone() * cp;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn apply(a: &[[i64; 4]; 2], s: &[i64; 4]) -> [i64; 2] {
        [0, 1].map(|i| (0..4).map(|j| a[i][j] * s[j]).sum())
    }

    #[test]
    fn identity_system() {
        let a = [[1, 0, 0, 0], [0, 1, 0, 0]];
        assert_eq!(solve_linear_integer_system(&a, &[5i64, 7]), Some([5, 7, 0, 0]));
    }

    #[test]
    fn parity_obstruction() {
        let a = [[2, 0, 0, 0], [0, 2, 0, 0]];
        assert_eq!(solve_linear_integer_system(&a, &[1i64, 0]), None);
    }

    #[test]
    fn non_principal_pair_in_z_sqrt10() {
        // Columns: coordinates of 3, 3√10, 1+√10, (1+√10)√10 = 10+√10.
        let a = [[3, 0, 1, 10], [0, 3, 1, 1]];
        assert_eq!(solve_linear_integer_system(&a, &[1i64, 0]), None);
        // But 3 itself is reachable.
        let s = solve_linear_integer_system(&a, &[3i64, 0]).unwrap();
        assert_eq!(apply(&a, &s), [3, 0]);
    }

    #[test]
    fn kernel_spans_solutions() {
        let a = vec![vec![2i64, 4, 6], vec![0, 0, 0]];
        let sol = solve_affine_system(&a, &[10, 0]).unwrap();
        assert_eq!(sol.kernel.len(), 2);
        for k in &sol.kernel {
            assert_eq!(k.iter().zip(&a[0]).map(|(x, y)| x * y).sum::<i64>(), 0);
        }
        assert!(solve_affine_system(&a, &[10, 1]).is_none());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn agrees_with_box_search(
            entries in proptest::array::uniform8(-4i64..=4),
            target in proptest::array::uniform2(-6i64..=6),
        ) {
            let a = [
                [entries[0], entries[1], entries[2], entries[3]],
                [entries[4], entries[5], entries[6], entries[7]],
            ];
            let found = solve_linear_integer_system(&a, &target);
            if let Some(s) = found {
                prop_assert_eq!(apply(&a, &s), target);
            } else {
                // No solution anywhere in the box [-20, 20]^4.
                let r = -20i64..=20;
                for s0 in r.clone() { for s1 in r.clone() { for s2 in r.clone() {
                    let rest = [0, 1].map(|i| target[i] - a[i][0] * s0 - a[i][1] * s1 - a[i][2] * s2);
                    let hit = r.clone().any(|s3| rest[0] == a[0][3] * s3 && rest[1] == a[1][3] * s3);
                    prop_assert!(!hit, "missed solution at ({}, {}, {})", s0, s1, s2);
                }}}
            }
        }
    }
}
