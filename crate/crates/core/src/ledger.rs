use serde::{Deserialize, Serialize};

/// Oracle usage, summed over every primitive call behind an estimate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CostLedger {
    /// Total cost in oracle query units.
    pub queries: f64,
    /// Amplitude-estimation iterations (Grover rounds).
    pub ae_rounds: f64,
    /// Repeated measurements of a Hadamard test or a sampler.
    pub shots: f64,
    /// Coherent singular value estimation calls.
    pub sve_calls: f64,
    /// Classical matrix-vector products.
    pub matvecs: f64,
    /// Independent repetitions run for success amplification.
    pub repetitions: f64,
}

impl CostLedger {
    pub fn merge(&mut self, other: &CostLedger) {
        self.queries += other.queries;
        self.ae_rounds += other.ae_rounds;
        self.shots += other.shots;
        self.sve_calls += other.sve_calls;
        self.matvecs += other.matvecs;
        self.repetitions += other.repetitions;
    }
}
