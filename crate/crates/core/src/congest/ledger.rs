use std::collections::HashMap;

/// Per-phase communication record.
///
/// Channels are directed: edge `e` of the network owns channels `2e`
/// (from `edge.u`) and `2e + 1` (from `edge.v`). Runs recorded under one
/// phase are scheduled together, so their rounds combine by `max` and their
/// messages by sum.
#[derive(Clone, Debug, Default)]
pub struct PhaseRecord {
    pub rounds: u64,
    pub channel_messages: Vec<u64>,
    pub model_dilation: f64,
    pub model_congestion: f64,
}

impl PhaseRecord {
    pub fn max_channel_messages(&self) -> u64 {
        self.channel_messages.iter().copied().max().unwrap_or(0)
    }

    pub fn dilation(&self) -> f64 {
        (self.rounds as f64).max(self.model_dilation)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("unknown phase `{0}`")]
    UnknownPhase(String),
}

#[derive(Clone, Debug)]
pub struct CostLedger {
    channels: usize,
    order: Vec<String>,
    phases: HashMap<String, PhaseRecord>,
}

impl CostLedger {
    pub fn new(edges: usize) -> Self {
        CostLedger {
            channels: 2 * edges,
            order: Vec::new(),
            phases: HashMap::new(),
        }
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    fn phase_mut(&mut self, label: &str) -> &mut PhaseRecord {
        if !self.phases.contains_key(label) {
            self.order.push(label.to_string());
            self.phases.insert(
                label.to_string(),
                PhaseRecord {
                    channel_messages: vec![0; self.channels],
                    ..Default::default()
                },
            );
        }
        self.phases.get_mut(label).unwrap()
    }

    /// Adds one message-level run to `label`.
    pub fn record_run(&mut self, label: &str, rounds: u64, channel_messages: &[u64]) {
        assert_eq!(channel_messages.len(), self.channels, "channel count mismatch");
        let p = self.phase_mut(label);
        p.rounds = p.rounds.max(rounds);
        for (acc, &m) in p.channel_messages.iter_mut().zip(channel_messages) {
            *acc += m;
        }
    }

    /// Adds an analytic charge for a subroutine that is not message-simulated.
    /// Model congestion is charged to every channel.
    pub fn charge_model(&mut self, label: &str, dilation: f64, congestion: f64) {
        let p = self.phase_mut(label);
        p.model_dilation = p.model_dilation.max(dilation);
        p.model_congestion += congestion;
    }

    /// Folds every phase of `other` into this ledger, scheduled alongside.
    pub fn absorb(&mut self, other: &CostLedger) {
        for label in &other.order {
            let q = &other.phases[label];
            self.record_run(label, q.rounds, &q.channel_messages);
            let p = self.phase_mut(label);
            p.model_dilation = p.model_dilation.max(q.model_dilation);
            p.model_congestion += q.model_congestion;
        }
    }

    pub fn phase(&self, label: &str) -> Option<&PhaseRecord> {
        self.phases.get(label)
    }

    pub fn labels(&self) -> &[String] {
        &self.order
    }

    fn select<'a>(&'a self, labels: &[&str]) -> Result<Vec<&'a PhaseRecord>, LedgerError> {
        labels
            .iter()
            .map(|l| self.phases.get(*l).ok_or_else(|| LedgerError::UnknownPhase(l.to_string())))
            .collect()
    }

    pub fn dilation(&self, labels: &[&str]) -> Result<f64, LedgerError> {
        Ok(self.select(labels)?.iter().map(|p| p.dilation()).fold(0.0, f64::max))
    }

    /// Largest per-channel message total over the selected phases.
    pub fn congestion(&self, labels: &[&str]) -> Result<f64, LedgerError> {
        let phases = self.select(labels)?;
        let measured = (0..self.channels)
            .map(|c| phases.iter().map(|p| p.channel_messages[c]).sum::<u64>())
            .max()
            .unwrap_or(0);
        Ok(measured as f64 + phases.iter().map(|p| p.model_congestion).sum::<f64>())
    }

    /// Rounds needed to run the selected phases together: dilation plus congestion.
    pub fn scheduled_cost(&self, labels: &[&str]) -> Result<f64, LedgerError> {
        Ok(self.dilation(labels)? + self.congestion(labels)?)
    }

    pub fn all_labels(&self) -> Vec<&str> {
        self.order.iter().map(String::as_str).collect()
    }

    /// One row per phase: `phase,rounds,max_edge_messages`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("phase,rounds,max_edge_messages\n");
        for label in &self.order {
            let p = &self.phases[label];
            let msgs = p.max_channel_messages() as f64 + p.model_congestion;
            s.push_str(&format!("{label},{},{}\n", p.dilation(), msgs));
        }
        s
    }
}
