use crate::closest_string::RcsInstance;
use crate::error::{budget, Result};

const MAX_POINTS: u64 = 1 << 22;

/// Frequencies never increase along the alphabet.
fn normalized(column: &[usize], sigma: usize) -> bool {
    let freq: Vec<usize> = (0..sigma).map(|s| column.iter().filter(|v| **v == s).count()).collect();
    freq.windows(2).all(|w| w[0] >= w[1])
}

/// All words of length `len` over `0..sigma`, in lexicographic order.
fn words(len: usize, sigma: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = (sigma as u64).pow(len as u32);
    (0..total).map(move |mut code| {
        let mut w = vec![0; len];
        for slot in w.iter_mut().rev() {
            *slot = (code % sigma as u64) as usize;
            code /= sigma as u64;
        }
        w
    })
}

fn has_center(rows: &[Vec<usize>], sigma: usize, d: usize) -> bool {
    let len = rows[0].len();
    words(len, sigma).any(|s| {
        rows.iter()
            .all(|r| r.iter().zip(&s).filter(|(a, b)| a != b).count() <= d)
    })
}

/// Whether some string is within Hamming distance `d` of every row.
pub fn closest_string_oracle(rows: &[Vec<usize>], sigma: usize, d: usize) -> Result<bool> {
    let len = rows.first().map_or(0, Vec::len);
    budget("oracle-points", MAX_POINTS, (sigma as u64).saturating_pow(len as u32))?;
    Ok(has_center(rows, sigma, d))
}

/// Every normalized matrix within distance `m` of the input must have a
/// `d`-close string.
pub fn rcs_oracle(inst: &RcsInstance) -> Result<bool> {
    let rows = inst.matrix.rows();
    let sigma = inst.alphabet.len();
    let k = rows.len();
    let len = rows[0].len();
    let cells = k * len;
    budget(
        "oracle-points",
        MAX_POINTS,
        (sigma as u64)
            .saturating_pow(cells as u32)
            .saturating_add((sigma as u64).saturating_pow(len as u32)),
    )?;
    let flat: Vec<usize> = rows.iter().flatten().copied().collect();
    for cand in words(cells, sigma) {
        let changed = cand.iter().zip(&flat).filter(|(a, b)| a != b).count();
        if changed > inst.m {
            continue;
        }
        let matrix: Vec<Vec<usize>> = cand.chunks(len).map(<[usize]>::to_vec).collect();
        let all_normalized = (0..len).all(|c| {
            let column: Vec<usize> = matrix.iter().map(|r| r[c]).collect();
            normalized(&column, sigma)
        });
        if all_normalized && !has_center(&matrix, sigma, inst.d) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closest_string::{Alphabet, StringMatrix};

    fn inst(rows: Vec<Vec<usize>>, d: usize, m: usize) -> RcsInstance {
        RcsInstance::new(
            Alphabet::new(vec!['a', 'b']).unwrap(),
            StringMatrix::from_indices(rows).unwrap(),
            d,
            m,
        )
        .unwrap()
    }

    #[test]
    fn examples() {
        assert!(rcs_oracle(&inst(vec![vec![0, 0], vec![0, 0]], 0, 0)).unwrap());
        assert!(!rcs_oracle(&inst(vec![vec![0], vec![0]], 0, 1)).unwrap());
        assert!(rcs_oracle(&inst(vec![vec![0, 0], vec![0, 0]], 1, 1)).unwrap());
        assert!(rcs_oracle(&inst(vec![vec![0]], 0, 0)).unwrap());
    }

    #[test]
    fn plain_closest_string() {
        assert!(closest_string_oracle(&[vec![0, 1], vec![1, 0]], 2, 1).unwrap());
        assert!(!closest_string_oracle(&[vec![0, 0], vec![1, 1]], 2, 0).unwrap());
    }
}
