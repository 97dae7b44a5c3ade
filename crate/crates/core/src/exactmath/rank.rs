use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

/// Rank of an integer matrix by fraction-free row reduction.
///
/// Each elimination step replaces `row` with `pivot * row - lead * pivot_row`
/// and divides the result by its content, so entries stay small. Falls back
/// to [`rank_integer_rows_big`] when an intermediate overflows `i128`.
pub fn rank_integer_rows(mut rows: Vec<Vec<i128>>, cols: usize) -> usize {
    match try_rank_i128(&mut rows, cols) {
        Some(r) => r,
        None => {
            let big = rows
                .into_iter()
                .map(|r| r.into_iter().map(BigInt::from).collect())
                .collect();
            rank_integer_rows_big(big, cols)
        }
    }
}

fn try_rank_i128(rows: &mut [Vec<i128>], cols: usize) -> Option<usize> {
    // Work on a copy so the caller can retry with big integers from the original.
    let mut a: Vec<Vec<i128>> = rows.to_vec();
    let n = a.len();
    let mut rank = 0;
    for col in 0..cols {
        if rank == n {
            break;
        }
        let Some(pivot) = (rank..n).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, pivot);
        let p = a[rank][col];
        for r in rank + 1..n {
            let lead = a[r][col];
            if lead == 0 {
                continue;
            }
            let mut content: i128 = 0;
            for c in col..cols {
                let v = p
                    .checked_mul(a[r][c])?
                    .checked_sub(lead.checked_mul(a[rank][c])?)?;
                a[r][c] = v;
                content = content.gcd(&v);
            }
            if content > 1 {
                for c in col..cols {
                    a[r][c] /= content;
                }
            }
        }
        rank += 1;
    }
    Some(rank)
}

pub fn rank_integer_rows_big(mut a: Vec<Vec<BigInt>>, cols: usize) -> usize {
    let n = a.len();
    let mut rank = 0;
    for col in 0..cols {
        if rank == n {
            break;
        }
        let Some(pivot) = (rank..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let p = a[rank][col].clone();
        for r in rank + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let lead = a[r][col].clone();
            let mut content = BigInt::zero();
            for c in col..cols {
                let v = &p * &a[r][c] - &lead * &a[rank][c];
                content = content.gcd(&v);
                a[r][c] = v;
            }
            if content.abs() > BigInt::from(1) {
                for c in col..cols {
                    a[r][c] = &a[r][c] / &content;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_ranks() {
        assert_eq!(rank_integer_rows(vec![vec![1, 0], vec![0, 1]], 2), 2);
        assert_eq!(rank_integer_rows(vec![vec![0, 0, 0]], 3), 0);
        assert_eq!(rank_integer_rows(vec![], 4), 0);
        assert_eq!(rank_integer_rows(vec![vec![0, 2], vec![0, 3]], 2), 1);
    }

    #[test]
    fn overflow_falls_back() {
        let big = i128::MAX / 2;
        let rows = vec![vec![big, 3], vec![3, big], vec![1, 1]];
        assert_eq!(rank_integer_rows(rows.clone(), 2), 2);
        let as_big = rows
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        assert_eq!(rank_integer_rows_big(as_big, 2), 2);
    }
}
