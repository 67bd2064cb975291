use std::process::ExitCode;

use consortium_core::Ledger;
use consortium_service::{router, AppState, OpenAccess, ServiceConfig, TokenTable};
use tracing_subscriber::EnvFilter;

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(EnvFilter::try_from_default_env().unwrap_or_else(|_| EnvFilter::new("info")))
        .init();

    match serve().await {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            tracing::error!("{e}");
            ExitCode::FAILURE
        }
    }
}

async fn serve() -> Result<(), String> {
    let config = ServiceConfig::from_env()?;
    let ledger = match &config.ledger_path {
        Some(path) => Ledger::open(path).map_err(|e| format!("{}: {e}", path.display()))?,
        None => Ledger::new(),
    };
    tracing::info!(blocks = ledger.len(), state_hash = %ledger.state_hash(), "ledger loaded");

    let state = match &config.token_path {
        Some(path) => AppState::new(ledger, TokenTable::load(path)?),
        None => {
            tracing::warn!("no token file configured, accepting unauthenticated writes");
            AppState::new(ledger, OpenAccess::default())
        }
    };

    let listener = tokio::net::TcpListener::bind(config.listen)
        .await
        .map_err(|e| format!("bind {}: {e}", config.listen))?;
    tracing::info!("listening on {}", config.listen);
    axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| e.to_string())
}
