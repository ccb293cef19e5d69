//! Hop-bounded BFS protocols.
//!
//! The source transmits in round 1. A node first reached in round `t` takes
//! `d = t`, adopts the smallest-id sender as parent and transmits in round
//! `t + 1`. Every run lasts exactly `r` rounds.

use super::engine::{run, Network, Outbox, Payload, Protocol};
use super::ledger::CostLedger;
use crate::graph::{Dist, EdgeId, NodeId, WeightedGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BfsTree {
    pub source: NodeId,
    pub dist: Vec<Dist>,
    pub parent: Vec<Option<NodeId>>,
}

impl BfsTree {
    pub fn path_to(&self, v: NodeId) -> Option<Vec<NodeId>> {
        if !self.dist[v].is_finite() {
            return None;
        }
        let mut p = vec![v];
        let mut x = v;
        while let Some(y) = self.parent[x] {
            p.push(y);
            x = y;
        }
        p.reverse();
        Some(p)
    }
}

#[derive(Clone, Copy, Debug)]
struct SourceId(#[allow(dead_code)] NodeId);

impl Payload for SourceId {}

struct Bfs {
    source: NodeId,
    rounds: u64,
    dist: Vec<Dist>,
    parent: Vec<Option<NodeId>>,
}

impl Protocol for Bfs {
    type Msg = SourceId;

    fn init(&mut self, node: NodeId, out: &mut Outbox<'_, SourceId>) {
        if node == self.source {
            self.dist[node] = Dist::Finite(0);
            out.send_all(SourceId(self.source));
        }
    }

    fn receive(&mut self, node: NodeId, t: u64, inbox: &[(NodeId, EdgeId, SourceId)], out: &mut Outbox<'_, SourceId>) {
        if self.dist[node].is_finite() {
            return;
        }
        self.dist[node] = Dist::Finite(t as u128);
        self.parent[node] = Some(inbox[0].0);
        if t < self.rounds {
            out.send_all(SourceId(self.source));
        }
    }
}

fn bfs_run(net: &Network, s: NodeId, r: u64) -> (BfsTree, super::engine::RunReport) {
    let mut p = Bfs {
        source: s,
        rounds: r,
        dist: vec![Dist::Infinite; net.n()],
        parent: vec![None; net.n()],
    };
    let report = run(net, &mut p, r);
    (
        BfsTree {
            source: s,
            dist: p.dist,
            parent: p.parent,
        },
        report,
    )
}

/// `r`-round BFS from `s`; weights are ignored. Cost goes to phase `label`.
pub fn hop_bounded_bfs(g: &WeightedGraph, s: NodeId, r: u64, ledger: &mut CostLedger, label: &str) -> BfsTree {
    let net = Network::new(g);
    let (tree, report) = bfs_run(&net, s, r);
    ledger.record_run(label, report.rounds, &report.channel_messages);
    tree
}

/// Independent BFS runs from every source, scheduled as one phase.
pub fn multi_source_bfs(
    g: &WeightedGraph,
    sources: &[NodeId],
    r: u64,
    ledger: &mut CostLedger,
    label: &str,
) -> Vec<BfsTree> {
    let net = Network::new(g);
    sources
        .iter()
        .map(|&s| {
            let (tree, report) = bfs_run(&net, s, r);
            ledger.record_run(label, report.rounds, &report.channel_messages);
            tree
        })
        .collect()
}

/// BFS tree plus the record `B(s, u)`: whether the tree path from `s` to `u`
/// uses only marked edges. `None` means `u` was not reached.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MarkedBfsTree {
    pub tree: BfsTree,
    pub record: Vec<Option<bool>>,
}

#[derive(Clone, Copy, Debug)]
struct FlaggedId {
    #[allow(dead_code)]
    source: NodeId,
    flag: bool,
}

impl Payload for FlaggedId {}

struct MarkedBfs<'a> {
    bfs: Bfs,
    marked: &'a [bool],
    record: Vec<Option<bool>>,
}

impl Protocol for MarkedBfs<'_> {
    type Msg = FlaggedId;

    fn init(&mut self, node: NodeId, out: &mut Outbox<'_, FlaggedId>) {
        if node != self.bfs.source {
            return;
        }
        self.bfs.dist[node] = Dist::Finite(0);
        let source = self.bfs.source;
        let marked = self.marked;
        let mut any = false;
        out.send_each(|_, e| {
            any |= marked[e];
            Some(FlaggedId { source, flag: marked[e] })
        });
        self.record[node] = Some(any);
    }

    fn receive(&mut self, node: NodeId, t: u64, inbox: &[(NodeId, EdgeId, FlaggedId)], out: &mut Outbox<'_, FlaggedId>) {
        if self.bfs.dist[node].is_finite() {
            return;
        }
        let (from, _, msg) = inbox[0];
        self.bfs.dist[node] = Dist::Finite(t as u128);
        self.bfs.parent[node] = Some(from);
        self.record[node] = Some(msg.flag);
        if t < self.bfs.rounds {
            let source = self.bfs.source;
            let marked = self.marked;
            out.send_each(|_, e| Some(FlaggedId { source, flag: msg.flag && marked[e] }));
        }
    }
}

/// `r`-round BFS carrying one flag bit per message. `marked[e]` selects the
/// edge subset. The source's own record is `true` iff one of its edges is
/// marked.
pub fn modified_hop_bounded_bfs(
    g: &WeightedGraph,
    s: NodeId,
    r: u64,
    marked: &[bool],
    ledger: &mut CostLedger,
    label: &str,
) -> MarkedBfsTree {
    assert_eq!(marked.len(), g.m(), "one mark per edge");
    let net = Network::new(g);
    let mut p = MarkedBfs {
        bfs: Bfs {
            source: s,
            rounds: r,
            dist: vec![Dist::Infinite; g.n()],
            parent: vec![None; g.n()],
        },
        marked,
        record: vec![None; g.n()],
    };
    let report = run(&net, &mut p, r);
    ledger.record_run(label, report.rounds, &report.channel_messages);
    MarkedBfsTree {
        tree: BfsTree {
            source: s,
            dist: p.bfs.dist,
            parent: p.bfs.parent,
        },
        record: p.record,
    }
}
