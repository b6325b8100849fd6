//! Run configuration shared by the library checks and the command line.

use serde::{Deserialize, Serialize};

use crate::exactcore::{int, rat, Rational};
use crate::{Error, Result};

/// Report encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Knobs for a verification run. `validate` enforces the documented ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Significant decimal digits for `BigReal` work.
    pub precision: u32,
    /// Largest `d` kept in exact rational form by the partial-zeta scans.
    pub crossover: u64,
    /// Tail-window exponent: `ε = x^(−ν)`.
    pub nu: Rational,
    /// Values substituted for the formal generator `τ*χ`.
    pub chi_samples: Vec<Rational>,
    pub q: Rational,
    pub seed: u64,
    pub format: OutputFormat,
    /// Multiplier `c` in tolerances of the form `c·ln(n)^j/n^k`.
    pub tolerance_scale: Rational,
    /// Worker threads for independent samples; `1` means sequential.
    pub workers: usize,
}

pub const DEFAULT_CROSSOVER: u64 = 2000;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: crate::exactcore::DEFAULT_PRECISION,
            crossover: DEFAULT_CROSSOVER,
            nu: rat(2, 5),
            chi_samples: vec![int(1), int(-2), int(-13)],
            q: int(1),
            seed: 0x5eed,
            format: OutputFormat::Json,
            tolerance_scale: int(10),
            workers: 1,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.precision < 20 {
            return Err(Error::Config(format!(
                "precision must be at least 20 digits, got {}",
                self.precision
            )));
        }
        if self.crossover > 5000 {
            return Err(Error::Config(format!(
                "crossover must be at most 5000, got {}",
                self.crossover
            )));
        }
        if self.nu <= int(0) || self.nu > rat(1, 2) {
            return Err(Error::Config(format!("nu must lie in (0, 1/2], got {}", self.nu)));
        }
        if self.chi_samples.is_empty() {
            return Err(Error::Config("at least one chi sample is required".into()));
        }
        if self.tolerance_scale <= int(0) {
            return Err(Error::Config("tolerance scale must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// Runs `f` over `items`, in parallel when more than one worker is configured.
    /// Output order always follows input order.
    pub fn map_samples<T, U, F>(&self, items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync + Send,
    {
        if self.workers <= 1 {
            return items.into_iter().map(f).collect();
        }
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.workers)
            .build()
            .expect("thread pool");
        pool.install(|| items.into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            RunConfig { precision: 19, ..Default::default() },
            RunConfig { crossover: 5001, ..Default::default() },
            RunConfig { nu: int(0), ..Default::default() },
            RunConfig { nu: rat(3, 5), ..Default::default() },
            RunConfig { workers: 0, ..Default::default() },
        ];
        for c in bad {
            assert!(matches!(c.validate(), Err(Error::Config(_))), "{c:?}");
        }
        let edge = RunConfig { nu: rat(1, 2), crossover: 5000, precision: 20, ..Default::default() };
        edge.validate().unwrap();
    }

    #[test]
    fn parallel_map_keeps_order() {
        let c = RunConfig { workers: 3, ..Default::default() };
        assert_eq!(c.map_samples((0..20).collect(), |x: i32| x * x), (0..20).map(|x| x * x).collect::<Vec<_>>());
    }
}
