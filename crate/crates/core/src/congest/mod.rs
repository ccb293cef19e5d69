//! Synchronous message-passing simulation with per-channel cost accounting.

pub mod bfs;
pub mod engine;
pub mod ledger;

pub use bfs::{hop_bounded_bfs, modified_hop_bounded_bfs, multi_source_bfs, BfsTree, MarkedBfsTree};
pub use engine::{run, Network, Outbox, Payload, Protocol, RunReport};
pub use ledger::{CostLedger, LedgerError, PhaseRecord};

#[derive(Debug, thiserror::Error)]
pub enum CostModelError {
    #[error("trade-off parameter q = {q} outside [1, {t}]")]
    QOutOfRange { q: f64, t: f64 },
    #[error("cost model needs n >= 1 and a finite diameter")]
    BadInput,
}

/// Reference round bound of an exact SSSP: `D + sqrt(n) + n^{2/5} D^{2/5}`.
pub fn sssp_round_bound(n: usize, diameter: usize) -> f64 {
    let (n, d) = (n as f64, diameter as f64);
    d + libm::sqrt(n) + libm::pow(n, 0.4) * libm::pow(d, 0.4)
}

/// `(dilation, congestion) = (T q, T / q)` for the SSSP trade-off with
/// `T = sssp_round_bound(n, D)`; their product is always `T^2`.
pub fn charge_sssp_cost(n: usize, diameter: usize, q: f64) -> Result<(f64, f64), CostModelError> {
    if n == 0 {
        return Err(CostModelError::BadInput);
    }
    let t = sssp_round_bound(n, diameter);
    if !(1.0..=t).contains(&q) {
        return Err(CostModelError::QOutOfRange { q, t });
    }
    Ok((t * q, t / q))
}
