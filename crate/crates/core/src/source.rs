use num_complex::Complex64;

use crate::modarith::Character;
use crate::rmf::RmfSample;

/// A completely multiplicative function, known through its values at primes.
pub trait MultiplicativeSource: Sync {
    fn at_prime(&self, p: u64) -> Complex64;

    /// Largest prime the source can evaluate, `None` if unbounded.
    fn prime_limit(&self) -> Option<u64> {
        None
    }
}

impl MultiplicativeSource for Character<'_> {
    fn at_prime(&self, p: u64) -> Complex64 {
        self.value(p)
    }
}

impl MultiplicativeSource for RmfSample {
    fn at_prime(&self, p: u64) -> Complex64 {
        RmfSample::at_prime(self, p).expect("prime within sample limit")
    }

    fn prime_limit(&self) -> Option<u64> {
        Some(self.limit())
    }
}

/// The same value at every prime; `ConstantSource(1)` is `f = 1`.
#[derive(Debug, Clone, Copy)]
pub struct ConstantSource(pub Complex64);

impl MultiplicativeSource for ConstantSource {
    fn at_prime(&self, _p: u64) -> Complex64 {
        self.0
    }
}
