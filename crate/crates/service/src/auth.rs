use std::collections::HashMap;
use std::path::Path;

/// Maps the bearer token of a request (if any) to an actor id.
pub trait Authenticator: Send + Sync {
    fn actor(&self, token: Option<&str>) -> Option<String>;
}

/// Accepts every request, with or without a token, as one fixed actor.
#[derive(Debug, Clone)]
pub struct OpenAccess {
    pub actor: String,
}

impl Default for OpenAccess {
    fn default() -> Self {
        OpenAccess { actor: "urn:consortium:anonymous".into() }
    }
}

impl Authenticator for OpenAccess {
    fn actor(&self, _token: Option<&str>) -> Option<String> {
        Some(self.actor.clone())
    }
}

/// Static token table.
///
/// File format: one `token actorId` pair per line; blank lines and lines
/// starting with `#` are ignored.
#[derive(Debug, Clone, Default)]
pub struct TokenTable {
    tokens: HashMap<String, String>,
}

impl TokenTable {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut tokens = HashMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(token), Some(actor), None) => {
                    tokens.insert(token.to_string(), actor.to_string());
                }
                _ => return Err(format!("line {}: expected `token actorId`", n + 1)),
            }
        }
        Ok(TokenTable { tokens })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, String> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Self::parse(&text)
    }

    pub fn insert(&mut self, token: impl Into<String>, actor: impl Into<String>) {
        self.tokens.insert(token.into(), actor.into());
    }
}

impl Authenticator for TokenTable {
    fn actor(&self, token: Option<&str>) -> Option<String> {
        token.and_then(|t| self.tokens.get(t)).cloned()
    }
}
