//! Central numerical tolerances.

use serde::{Deserialize, Serialize};

/// Thresholds used by validators, invariant checks and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Algebraic identities that hold exactly on the grid (Weyl relations,
    /// Pauli algebra, normalization).
    pub algebraic: f64,
    /// Round trips through exact discrete transforms (DFT, Zak).
    pub round_trip: f64,
    /// Identities that go through the chirp decomposition of the fractional
    /// Fourier transform.
    pub fractional: f64,
    /// Cross-checks between independent expectation-value routes.
    pub cross_path: f64,
    /// Amplitude below which a modular fiber is treated as empty.
    pub degenerate_amplitude: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            algebraic: 1e-10,
            round_trip: 1e-12,
            fractional: 1e-8,
            cross_path: 1e-6,
            degenerate_amplitude: 1e-14,
        }
    }
}
