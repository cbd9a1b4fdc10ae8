/// Numerical rank of a dense row-major matrix by Gaussian elimination with
/// partial pivoting. Pivots with magnitude at most `tol * max|entry|` count
/// as zero.
pub fn rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let ncols = m.iter().map(Vec::len).max().unwrap_or(0);
    for row in &mut m {
        row.resize(ncols, 0.0);
    }
    let scale = m.iter().flat_map(|r| r.iter()).fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return 0;
    }
    let cutoff = tol * scale;
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot) = (rank..m.len())
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .filter(|&r| m[r][col].abs() > cutoff)
        else {
            continue;
        };
        m.swap(rank, pivot);
        let (top, bottom) = m.split_at_mut(rank + 1);
        let pivot_row = &top[rank];
        for row in bottom {
            let factor = row[col] / pivot_row[col];
            if factor != 0.0 {
                for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                    *x -= factor * p;
                }
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::rank;

    #[test]
    fn ranks() {
        assert_eq!(rank(&[], 1e-12), 0);
        assert_eq!(rank(&[vec![0.0, 0.0]], 1e-12), 0);
        assert_eq!(rank(&[vec![2.0, 0.0], vec![0.0, 3.0]], 1e-12), 2);
        assert_eq!(rank(&[vec![1.0, 2.0], vec![2.0, 4.0]], 1e-12), 1);
        let m = vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 0.0], vec![0.0, 0.0, 5.0]];
        assert_eq!(rank(&m, 1e-12), 2);
    }
}
