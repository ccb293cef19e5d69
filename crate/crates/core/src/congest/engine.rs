use crate::graph::{EdgeId, NodeId, WeightedGraph};

/// Size of a message in `O(log n)`-bit units. A payload larger than
/// `(id, distance, flag)` must report more than one unit.
pub trait Payload {
    fn units(&self) -> u64 {
        1
    }
}

/// A neighbour as seen from one node: `(neighbour, edge, outgoing channel)`.
pub type Link = (NodeId, EdgeId, usize);

/// The communication network: the underlying undirected graph.
#[derive(Clone, Debug)]
pub struct Network {
    links: Vec<Vec<Link>>,
    edges: usize,
}

impl Network {
    pub fn new(g: &WeightedGraph) -> Self {
        let links = (0..g.n())
            .map(|x| {
                g.links(x)
                    .into_iter()
                    .map(|(y, e)| (y, e, if g.edge(e).u == x { 2 * e } else { 2 * e + 1 }))
                    .collect()
            })
            .collect();
        Network { links, edges: g.m() }
    }

    pub fn n(&self) -> usize {
        self.links.len()
    }

    pub fn channels(&self) -> usize {
        2 * self.edges
    }

    pub fn links(&self, x: NodeId) -> &[Link] {
        &self.links[x]
    }
}

/// Messages a node queues during one round; delivered the next round.
pub struct Outbox<'a, M> {
    links: &'a [Link],
    queued: Vec<(usize, M)>,
}

impl<M: Clone> Outbox<'_, M> {
    pub fn send_all(&mut self, m: M) {
        for i in 0..self.links.len() {
            self.queued.push((i, m.clone()));
        }
    }

    /// Sends `f(neighbour, edge)` to every neighbour where it is `Some`.
    pub fn send_each(&mut self, mut f: impl FnMut(NodeId, EdgeId) -> Option<M>) {
        for (i, &(y, e, _)) in self.links.iter().enumerate() {
            if let Some(m) = f(y, e) {
                self.queued.push((i, m));
            }
        }
    }
}

/// A synchronous distributed algorithm.
pub trait Protocol {
    type Msg: Clone + Payload;

    /// Runs before round 1 at every node; queued messages arrive in round 1.
    fn init(&mut self, node: NodeId, out: &mut Outbox<'_, Self::Msg>);

    /// Runs in round `t` at every node whose inbox is non-empty. The inbox
    /// holds `(sender, edge, message)` sorted by sender id.
    fn receive(
        &mut self,
        node: NodeId,
        t: u64,
        inbox: &[(NodeId, EdgeId, Self::Msg)],
        out: &mut Outbox<'_, Self::Msg>,
    );
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub rounds: u64,
    pub channel_messages: Vec<u64>,
}

impl RunReport {
    pub fn max_channel_messages(&self) -> u64 {
        self.channel_messages.iter().copied().max().unwrap_or(0)
    }

    /// Messages on edge `e` summed over both directions.
    pub fn edge_messages(&self, e: EdgeId) -> u64 {
        self.channel_messages[2 * e] + self.channel_messages[2 * e + 1]
    }
}

/// Executes exactly `rounds` synchronous rounds. Messages queued in the
/// last round are never delivered and are not metered.
pub fn run<P: Protocol>(net: &Network, proto: &mut P, rounds: u64) -> RunReport {
    let mut metered = vec![0u64; net.channels()];
    // (receiver, sender, edge, channel, message)
    let mut pending: Vec<(NodeId, NodeId, EdgeId, usize, P::Msg)> = Vec::new();
    let collect = |x: NodeId, out: Outbox<'_, P::Msg>, into: &mut Vec<_>| {
        for (i, m) in out.queued {
            let (y, e, ch) = out.links[i];
            into.push((y, x, e, ch, m));
        }
    };
    for x in 0..net.n() {
        let mut out = Outbox { links: net.links(x), queued: Vec::new() };
        proto.init(x, &mut out);
        collect(x, out, &mut pending);
    }
    for t in 1..=rounds {
        if pending.is_empty() {
            break;
        }
        pending.sort_by_key(|&(to, from, ..)| (to, from));
        let mut next = Vec::new();
        let mut i = 0;
        while i < pending.len() {
            let to = pending[i].0;
            let mut inbox = Vec::new();
            while i < pending.len() && pending[i].0 == to {
                let (_, from, e, ch, ref m) = pending[i];
                metered[ch] += m.units();
                inbox.push((from, e, m.clone()));
                i += 1;
            }
            let mut out = Outbox { links: net.links(to), queued: Vec::new() };
            proto.receive(to, t, &inbox, &mut out);
            if t < rounds {
                collect(to, out, &mut next);
            }
        }
        pending = next;
    }
    RunReport {
        rounds,
        channel_messages: metered,
    }
}
