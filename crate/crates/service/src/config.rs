use std::net::SocketAddr;
use std::path::PathBuf;

pub const LISTEN_VAR: &str = "CONSORTIUM_LISTEN";
pub const LEDGER_VAR: &str = "CONSORTIUM_LEDGER";
pub const TOKENS_VAR: &str = "CONSORTIUM_TOKENS";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ServiceConfig {
    pub listen: SocketAddr,
    /// Log file; `None` keeps the ledger in memory.
    pub ledger_path: Option<PathBuf>,
    /// Token file; `None` disables authentication.
    pub token_path: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            ledger_path: None,
            token_path: None,
        }
    }
}

impl ServiceConfig {
    pub fn from_env() -> Result<Self, String> {
        Self::from_lookup(|key| std::env::var(key).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self, String> {
        let mut config = ServiceConfig::default();
        if let Some(addr) = lookup(LISTEN_VAR).filter(|v| !v.is_empty()) {
            config.listen = addr.parse().map_err(|e| format!("{LISTEN_VAR}={addr}: {e}"))?;
        }
        config.ledger_path = lookup(LEDGER_VAR).filter(|v| !v.is_empty()).map(PathBuf::from);
        config.token_path = lookup(TOKENS_VAR).filter(|v| !v.is_empty()).map(PathBuf::from);
        Ok(config)
    }
}
