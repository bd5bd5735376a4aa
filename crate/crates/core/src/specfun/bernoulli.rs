use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::sync::{OnceLock, RwLock};

static CACHE: OnceLock<RwLock<Vec<BigRational>>> = OnceLock::new();

fn binomial(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::from(1u32);
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact Bernoulli number `B_k` with `z/(e^z − 1) = Σ B_k z^k/k!`, so that
/// `B_1 = −1/2`.
pub fn bernoulli(k: usize) -> BigRational {
    let cache = CACHE.get_or_init(|| RwLock::new(vec![BigRational::from_integer(1.into())]));
    if let Some(b) = cache.read().expect("bernoulli cache poisoned").get(k) {
        return b.clone();
    }
    let mut table = cache.write().expect("bernoulli cache poisoned");
    // Σ_{j=0}^{n} C(n+1, j) B_j = 0
    while table.len() <= k {
        let n = table.len();
        let mut acc = BigRational::zero();
        for (j, b) in table.iter().enumerate() {
            acc += BigRational::from_integer(binomial(n + 1, j)) * b;
        }
        table.push(-acc / BigRational::from_integer(BigInt::from(n + 1)));
    }
    table[k].clone()
}

pub fn bernoulli_f64(k: usize) -> f64 {
    bernoulli(k).to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    /// Independent route: invert (e^z − 1)/z = Σ z^j/(j+1)! over the rationals.
    fn series_inverse_oracle(n: usize) -> Vec<BigRational> {
        let mut fact = vec![BigInt::one()];
        for i in 1..=n + 2 {
            let f = &fact[i - 1] * BigInt::from(i);
            fact.push(f);
        }
        let a: Vec<BigRational> =
            (0..=n).map(|j| BigRational::new(BigInt::one(), fact[j + 1].clone())).collect();
        let mut inv = vec![BigRational::one()];
        for m in 1..=n {
            let mut s = BigRational::zero();
            for j in 1..=m {
                s += &a[j] * &inv[m - j];
            }
            inv.push(-s);
        }
        // inv[k] = B_k / k!
        inv.iter()
            .enumerate()
            .map(|(k, c)| c * BigRational::from_integer(fact[k].clone()))
            .collect()
    }

    #[test]
    fn first_values() {
        assert_eq!(bernoulli(0), BigRational::one());
        assert_eq!(bernoulli(1), BigRational::new((-1).into(), 2.into()));
        assert_eq!(bernoulli(2), BigRational::new(1.into(), 6.into()));
        assert!(bernoulli(3).is_zero());
    }

    #[test]
    fn matches_series_inversion() {
        let oracle = series_inverse_oracle(24);
        for (k, b) in oracle.iter().enumerate() {
            assert_eq!(&bernoulli(k), b, "B_{k}");
        }
    }

    #[test]
    fn concurrent_reads_agree() {
        let handles: Vec<_> =
            (0..8).map(|t| std::thread::spawn(move || bernoulli(10 + 2 * t))).collect();
        for (t, h) in handles.into_iter().enumerate() {
            assert_eq!(h.join().unwrap(), bernoulli(10 + 2 * t));
        }
    }
}
