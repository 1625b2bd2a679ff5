#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChainConfig {
    pub seed: u64,
    /// Burn-in sweeps; proposal scales adapt only here.
    pub n_burn: usize,
    /// Sweeps after burn-in. Every `thin`-th is stored.
    pub n_keep: usize,
    pub thin: usize,
    pub n_chains: usize,
    pub adapt_target: f64,
    /// Hold `ν` at this value instead of sampling it.
    pub fix_nu_at: Option<f64>,
    /// Sample from the prior alone.
    pub prior_only: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_burn: 10_000,
            n_keep: 20_000,
            thin: 5,
            n_chains: 4,
            adapt_target: 0.3,
            fix_nu_at: None,
            prior_only: false,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if self.n_burn == 0 || self.n_keep == 0 || self.thin == 0 || self.n_chains == 0 {
            return Err(crate::Error::InvalidParameter(
                "chain counts must all be at least 1".into(),
            ));
        }
        if !(self.adapt_target > 0.0 && self.adapt_target < 1.0) {
            return Err(crate::Error::InvalidParameter(alloc::format!(
                "adapt_target must lie in (0, 1), got {}",
                self.adapt_target
            )));
        }
        if let Some(nu) = self.fix_nu_at {
            if !(nu >= 0.0 && nu.is_finite()) {
                return Err(crate::Error::InvalidParameter(alloc::format!(
                    "fixed nu must be non-negative, got {nu}"
                )));
            }
        }
        Ok(())
    }

    /// Stored draws per chain.
    pub fn kept_per_chain(&self) -> usize {
        self.n_keep / self.thin
    }
}
