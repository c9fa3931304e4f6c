//! Default caps, overridable through `ELASTIGRAPH_BUDGET=key=value,...`.

use anyhow::{bail, Context, Result};
use elastigraph::energy::CertifyBudget;
use elastigraph::ribbon::DEFAULT_BUDGET;

pub const ENV: &str = "ELASTIGRAPH_BUDGET";

pub const KEYS: [&str; 9] =
    ["restarts", "levels", "evaluations", "curve_len", "components", "scan_len", "scan_cap", "tower_cap", "ribbon"];

#[derive(Clone, Debug)]
pub struct Budget {
    pub certify: CertifyBudget,
    /// Node budget for ribbon-map searches.
    pub ribbon: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { certify: CertifyBudget::default(), ribbon: DEFAULT_BUDGET }
    }
}

impl Budget {
    pub fn parse(text: &str) -> Result<Budget> {
        let mut b = Budget::default();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, val) = item.split_once('=').with_context(|| format!("budget entry `{item}` is not key=value"))?;
            let (key, val) = (key.trim(), val.trim());
            let n: u64 = val.parse().with_context(|| format!("budget `{key}` needs a nonnegative integer, got `{val}`"))?;
            let c = &mut b.certify;
            match key {
                "restarts" => c.minimize.restarts = n.max(1) as usize,
                "levels" => c.minimize.levels = n.min(20) as u32,
                "evaluations" => c.minimize.max_evaluations = n,
                "curve_len" => c.max_len = n as usize,
                "components" => c.max_components = n as usize,
                "scan_len" => c.scan_len = n as usize,
                "scan_cap" => c.scan_cap = n as usize,
                "tower_cap" => c.tower_cap = n as usize,
                "ribbon" => b.ribbon = n,
                _ => bail!("unknown budget key `{key}` (known: {})", KEYS.join(", ")),
            }
        }
        Ok(b)
    }

    pub fn from_env() -> Result<Budget> {
        match std::env::var(ENV) {
            Ok(s) => Budget::parse(&s).with_context(|| format!("in {ENV}")),
            Err(std::env::VarError::NotPresent) => Ok(Budget::default()),
            Err(e) => bail!("{ENV}: {e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let b = Budget::parse("restarts=3, levels=2,curve_len=5,ribbon=10").unwrap();
        assert_eq!(b.certify.minimize.restarts, 3);
        assert_eq!(b.certify.minimize.levels, 2);
        assert_eq!(b.certify.max_len, 5);
        assert_eq!(b.ribbon, 10);
        assert_eq!(b.certify.scan_len, CertifyBudget::default().scan_len);
        assert!(Budget::parse("").is_ok());
        assert!(Budget::parse("speed=3").is_err());
        assert!(Budget::parse("restarts").is_err());
        assert!(Budget::parse("restarts=-1").is_err());
    }
}
