//! HTTP service over a dashboard document store.

pub mod api;
pub mod store;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

pub use api::{router, AppState};
pub use store::{DocumentStore, FileStore, MemoryStore, ModelSummary, StoreError};

#[derive(Debug, Clone)]
pub struct ServeConfig {
    pub port: u16,
    pub data_dir: PathBuf,
    /// Allowed browser origin, or `*`. No CORS headers when unset.
    pub cors_origin: Option<String>,
    pub seed: u64,
}

#[derive(Debug, Error)]
pub enum ServeError {
    #[error("port {0} is already in use")]
    PortInUse(u16),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Open the store under `data_dir` and serve until ctrl-c.
pub async fn serve(config: ServeConfig) -> Result<(), ServeError> {
    let (store, quarantined) = FileStore::open(&config.data_dir)?;
    for name in &quarantined {
        tracing::warn!(file = %name, "quarantined unreadable document");
    }
    let state = AppState {
        store: Arc::new(store),
        seed: config.seed,
    };
    let app = router(state, config.cors_origin.as_deref());
    let addr = SocketAddr::from(([127, 0, 0, 1], config.port));
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| match e.kind() {
        std::io::ErrorKind::AddrInUse => ServeError::PortInUse(config.port),
        _ => ServeError::Io(e),
    })?;
    tracing::info!(%addr, "listening");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
