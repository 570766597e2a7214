//! Dense exact linear algebra over a field.

use super::field::Field;

/// Reduced row echelon form in place; returns the pivot columns.
pub fn rref<F: Field>(rows: &mut [Vec<F>]) -> Vec<usize> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][col].inv().expect("nonzero pivot");
        for x in rows[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][col].is_zero() {
                let f = rows[i][col].clone();
                for j in 0..ncols {
                    let v = rows[r][j].clone() * f.clone();
                    rows[i][j] = rows[i][j].clone() - v;
                }
            }
        }
        pivots.push(col);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

/// Basis of the right kernel of a matrix with `ncols` columns.
pub fn nullspace<F: Field>(rows: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m: Vec<Vec<F>> = rows.to_vec();
    let pivots = rref(&mut m);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![F::zero(); ncols];
            v[f] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -m[i][f].clone();
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{qi, Q};

    #[test]
    fn kernel_of_rank_two() {
        let rows: Vec<Vec<Q>> = vec![vec![qi(1), qi(2), qi(3)], vec![qi(2), qi(4), qi(7)]];
        let k = nullspace(&rows, 3);
        assert_eq!(k, vec![vec![qi(-2), qi(1), qi(0)]]);
    }

    #[test]
    fn full_rank_has_trivial_kernel() {
        let rows: Vec<Vec<Q>> = vec![vec![qi(1), qi(0)], vec![qi(1), qi(1)]];
        assert!(nullspace(&rows, 2).is_empty());
    }
}
