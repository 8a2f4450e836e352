//! Size guards for the exhaustive operations. Everything in this crate is
//! exact and exponential; the guards keep accidental `--p 9` invocations from
//! running for a week. `MELONICA_GUARD_MAX_P` raises (or lowers) every limit.

use crate::error::{Error, Result};

pub const ENV_OVERRIDE: &str = "MELONICA_GUARD_MAX_P";

fn override_limit() -> Option<usize> {
    std::env::var(ENV_OVERRIDE).ok()?.trim().parse().ok()
}

/// Check `value <= default_limit`, with the environment override taking
/// precedence when set.
pub fn check(what: &str, value: usize, default_limit: usize) -> Result<()> {
    let limit = override_limit().unwrap_or(default_limit);
    if value > limit {
        return Err(Error::SizeLimitExceeded {
            what: what.to_string(),
            got: value,
            limit,
        });
    }
    Ok(())
}

/// Default per-`p` limit for exhaustive class enumeration with `num_colors`
/// colors: the search space is (p!)^(num_colors - 1).
pub fn enumeration_limit(num_colors: usize) -> usize {
    match num_colors {
        0..=2 => 8,
        3 => 6,
        4 => 4,
        _ => 3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_fires_above_limit() {
        assert!(check("p", 7, 6).is_err());
        assert!(check("p", 6, 6).is_ok());
    }
}
