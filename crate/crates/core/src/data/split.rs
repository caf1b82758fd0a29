use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{DataError, Dataset};

/// Seeded random permutation of `0..m`.
pub fn permutation(m: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Permutes the rows with `seed` and returns `(train, test)`, the test set
/// being the last `test_count` permuted rows.
pub fn split(data: &Dataset, test_count: usize, seed: u64) -> Result<(Dataset, Dataset), DataError> {
    let m = data.n_rows();
    if test_count == 0 || test_count >= m {
        return Err(DataError::TestCountOutOfRange { test_count, rows: m });
    }
    let order = permutation(m, seed);
    let (train, test) = order.split_at(m - test_count);
    Ok((data.select_rows(train), data.select_rows(test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn rows(m: usize) -> Dataset {
        Dataset::continuous(&["i"], DMatrix::from_fn(m, 1, |i, _| i as f64)).unwrap()
    }

    #[test]
    fn sizes_and_partition() {
        let (train, test) = split(&rows(10), 3, 1).unwrap();
        assert_eq!((train.n_rows(), test.n_rows()), (7, 3));
        let mut all: Vec<f64> = train.column_vector(0).iter().chain(test.column_vector(0).iter()).copied().collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..10).map(f64::from).collect::<Vec<_>>());
    }

    #[test]
    fn same_seed_same_split() {
        assert_eq!(split(&rows(20), 5, 8).unwrap(), split(&rows(20), 5, 8).unwrap());
    }

    #[test]
    fn out_of_range_test_count() {
        assert!(split(&rows(5), 0, 0).is_err());
        assert!(split(&rows(5), 5, 0).is_err());
    }
}
