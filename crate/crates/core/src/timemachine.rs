//! Replays an ordered gossip feed up to an instant and materializes the
//! public view of the channel graph at that instant.
//!
//! Gossip never announces closes, so channels only accumulate; policies are
//! superseded per `(short_channel_id, direction)` by later updates.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{ChannelUpdate, GossipMessage, NodeId, ShortChannelId};
use crate::store::OrderedFeed;

pub const SNAPSHOT_FORMAT_VERSION: u32 = 1;

/// Conventional staleness window: two weeks.
pub const DEFAULT_STALE_WINDOW_SECS: u64 = 1_209_600;

pub const NODE_COUNT_DEFINITION: &str =
    "every endpoint of an announced channel, including leaves and nodes without policies";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelPolicy {
    pub cltv_expiry_delta: u16,
    pub disabled: bool,
    pub fee_base_msat: u32,
    pub fee_proportional_millionths: u32,
    pub htlc_maximum_msat: Option<u64>,
    pub htlc_minimum_msat: u64,
    pub last_update_ts: u32,
}

impl From<&ChannelUpdate> for ChannelPolicy {
    fn from(u: &ChannelUpdate) -> Self {
        ChannelPolicy {
            cltv_expiry_delta: u.cltv_expiry_delta,
            disabled: u.is_disabled(),
            fee_base_msat: u.fee_base_msat,
            fee_proportional_millionths: u.fee_proportional_millionths,
            htlc_maximum_msat: u.htlc_maximum_msat,
            htlc_minimum_msat: u.htlc_minimum_msat,
            last_update_ts: u.timestamp,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeInfo {
    pub alias: Option<String>,
    pub rgb: Option<[u8; 3]>,
    /// Timestamp of the node_announcement the metadata came from.
    pub last_seen: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Channel {
    pub short_channel_id: ShortChannelId,
    pub node_1: NodeId,
    pub node_2: NodeId,
    pub announced_at: u64,
    /// Indexed by direction bit.
    pub policies: [Option<ChannelPolicy>; 2],
}

impl Channel {
    /// `(source, target)` for a direction bit.
    pub fn endpoints(&self, direction: u8) -> (NodeId, NodeId) {
        if direction == 0 {
            (self.node_1, self.node_2)
        } else {
            (self.node_2, self.node_1)
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayDiagnostics {
    /// Later channel_announcements reusing an already-announced scid.
    pub conflicting_channel_announcements: u64,
    /// channel_updates whose scid was never announced by `as_of`.
    pub dropped_channel_updates: u64,
    /// node_announcements for nodes with no announced channel by `as_of`.
    pub orphan_node_announcements: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkSnapshot {
    pub as_of: u64,
    pub nodes: BTreeMap<NodeId, NodeInfo>,
    pub channels: BTreeMap<ShortChannelId, Channel>,
    pub diagnostics: ReplayDiagnostics,
}

impl NetworkSnapshot {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn policy_count(&self) -> usize {
        self.channels
            .values()
            .map(|c| c.policies.iter().flatten().count())
            .sum()
    }
}

pub fn replay(feed: &OrderedFeed, as_of: u64) -> NetworkSnapshot {
    let mut channels: BTreeMap<ShortChannelId, Channel> = BTreeMap::new();
    let mut policies: BTreeMap<(ShortChannelId, u8), ChannelPolicy> = BTreeMap::new();
    let mut updates_seen: BTreeMap<ShortChannelId, u64> = BTreeMap::new();
    let mut node_meta: BTreeMap<NodeId, NodeInfo> = BTreeMap::new();
    let mut node_anns_seen: BTreeMap<NodeId, u64> = BTreeMap::new();
    let mut diagnostics = ReplayDiagnostics::default();

    for entry in feed.prefix(as_of) {
        match &entry.message {
            GossipMessage::ChannelAnnouncement(a) => {
                if channels.contains_key(&a.short_channel_id) {
                    diagnostics.conflicting_channel_announcements += 1;
                    continue;
                }
                channels.insert(
                    a.short_channel_id,
                    Channel {
                        short_channel_id: a.short_channel_id,
                        node_1: a.node_id_1,
                        node_2: a.node_id_2,
                        announced_at: entry.effective_ts,
                        policies: [None, None],
                    },
                );
            }
            GossipMessage::NodeAnnouncement(n) => {
                *node_anns_seen.entry(n.node_id).or_default() += 1;
                let newer = node_meta
                    .get(&n.node_id)
                    .and_then(|m| m.last_seen)
                    .is_none_or(|seen| n.timestamp >= seen);
                if newer {
                    node_meta.insert(
                        n.node_id,
                        NodeInfo {
                            alias: Some(n.alias_lossy()),
                            rgb: Some(n.rgb_color),
                            last_seen: Some(n.timestamp),
                        },
                    );
                }
            }
            GossipMessage::ChannelUpdate(u) => {
                *updates_seen.entry(u.short_channel_id).or_default() += 1;
                let key = (u.short_channel_id, u.direction());
                let newer = policies
                    .get(&key)
                    .is_none_or(|p| u.timestamp >= p.last_update_ts);
                if newer {
                    policies.insert(key, ChannelPolicy::from(u));
                }
            }
        }
    }

    // Updates may legitimately precede their announcement in the feed: the
    // announcement is ordered by arrival, the update by its own timestamp.
    for ((scid, direction), policy) in policies {
        if let Some(channel) = channels.get_mut(&scid) {
            channel.policies[direction as usize] = Some(policy);
        }
    }
    diagnostics.dropped_channel_updates = updates_seen
        .iter()
        .filter(|(scid, _)| !channels.contains_key(scid))
        .map(|(_, n)| n)
        .sum();

    let mut nodes: BTreeMap<NodeId, NodeInfo> = BTreeMap::new();
    for channel in channels.values() {
        for id in [channel.node_1, channel.node_2] {
            nodes
                .entry(id)
                .or_insert_with(|| node_meta.get(&id).cloned().unwrap_or_default());
        }
    }
    diagnostics.orphan_node_announcements = node_anns_seen
        .iter()
        .filter(|(id, _)| !nodes.contains_key(id))
        .map(|(_, n)| n)
        .sum();

    NetworkSnapshot {
        as_of,
        nodes,
        channels,
        diagnostics,
    }
}

/// A usable direction of a channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoutingArc {
    pub short_channel_id: ShortChannelId,
    pub direction: u8,
    pub source: NodeId,
    pub target: NodeId,
    pub policy: ChannelPolicy,
}

/// Directed view over the snapshot's usable channel directions. Keeps every
/// snapshot node, including ones left without any arc.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingView {
    pub as_of: u64,
    pub nodes: Vec<NodeId>,
    pub arcs: Vec<RoutingArc>,
}

pub fn routing_view(snapshot: &NetworkSnapshot, prune_stale_after: Option<u64>) -> RoutingView {
    let cutoff = prune_stale_after.map(|window| snapshot.as_of.saturating_sub(window));
    let mut arcs = Vec::new();
    for channel in snapshot.channels.values() {
        for direction in 0..2u8 {
            let Some(policy) = channel.policies[direction as usize] else {
                continue;
            };
            if policy.disabled {
                continue;
            }
            if cutoff.is_some_and(|c| u64::from(policy.last_update_ts) < c) {
                continue;
            }
            let (source, target) = channel.endpoints(direction);
            arcs.push(RoutingArc {
                short_channel_id: channel.short_channel_id,
                direction,
                source,
                target,
                policy,
            });
        }
    }
    RoutingView {
        as_of: snapshot.as_of,
        nodes: snapshot.nodes.keys().copied().collect(),
        arcs,
    }
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("snapshot JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported snapshot version {0}")]
    Version(u32),
    #[error("invalid {what} {value:?}")]
    Field { what: &'static str, value: String },
    #[error("channel {0} references a node missing from nodes[]")]
    DanglingEndpoint(String),
}

// Serialized form. Fields are declared in alphabetical order so the emitted
// keys are sorted.

#[derive(Serialize, Deserialize)]
struct SnapshotDoc {
    as_of: u64,
    channels: Vec<ChannelDoc>,
    diagnostics: ReplayDiagnostics,
    node_count_definition: String,
    nodes: Vec<NodeDoc>,
    version: u32,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    alias: Option<String>,
    id: String,
    last_seen: Option<u32>,
    rgb: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct ChannelDoc {
    announced_at: u64,
    node1: String,
    node2: String,
    policies: [Option<ChannelPolicy>; 2],
    scid: String,
}

fn parse_node(s: &str) -> Result<NodeId, SnapshotError> {
    NodeId::from_hex(s).map_err(|_| SnapshotError::Field {
        what: "node id",
        value: s.to_owned(),
    })
}

impl NetworkSnapshot {
    /// Pretty JSON with a trailing newline. Identical snapshots serialize to
    /// identical bytes.
    pub fn to_json(&self) -> String {
        let doc = SnapshotDoc {
            as_of: self.as_of,
            channels: self
                .channels
                .values()
                .map(|c| ChannelDoc {
                    announced_at: c.announced_at,
                    node1: c.node_1.to_hex(),
                    node2: c.node_2.to_hex(),
                    policies: c.policies,
                    scid: c.short_channel_id.to_string(),
                })
                .collect(),
            diagnostics: self.diagnostics,
            node_count_definition: NODE_COUNT_DEFINITION.to_owned(),
            nodes: self
                .nodes
                .iter()
                .map(|(id, info)| NodeDoc {
                    alias: info.alias.clone(),
                    id: id.to_hex(),
                    last_seen: info.last_seen,
                    rgb: info.rgb.map(hex::encode),
                })
                .collect(),
            version: SNAPSHOT_FORMAT_VERSION,
        };
        let mut out = serde_json::to_string_pretty(&doc).expect("snapshot serializes");
        out.push('\n');
        out
    }

    pub fn from_json(text: &str) -> Result<Self, SnapshotError> {
        let doc: SnapshotDoc = serde_json::from_str(text)?;
        if doc.version != SNAPSHOT_FORMAT_VERSION {
            return Err(SnapshotError::Version(doc.version));
        }
        let mut nodes = BTreeMap::new();
        for n in doc.nodes {
            let rgb = match n.rgb {
                Some(h) => Some(
                    hex::decode(&h)
                        .ok()
                        .and_then(|v| <[u8; 3]>::try_from(v).ok())
                        .ok_or(SnapshotError::Field {
                            what: "rgb",
                            value: h,
                        })?,
                ),
                None => None,
            };
            nodes.insert(
                parse_node(&n.id)?,
                NodeInfo {
                    alias: n.alias,
                    rgb,
                    last_seen: n.last_seen,
                },
            );
        }
        let mut channels = BTreeMap::new();
        for c in doc.channels {
            let scid = ShortChannelId::parse(&c.scid).ok_or_else(|| SnapshotError::Field {
                what: "scid",
                value: c.scid.clone(),
            })?;
            let node_1 = parse_node(&c.node1)?;
            let node_2 = parse_node(&c.node2)?;
            if !nodes.contains_key(&node_1) || !nodes.contains_key(&node_2) {
                return Err(SnapshotError::DanglingEndpoint(c.scid));
            }
            channels.insert(
                scid,
                Channel {
                    short_channel_id: scid,
                    node_1,
                    node_2,
                    announced_at: c.announced_at,
                    policies: c.policies,
                },
            );
        }
        Ok(NetworkSnapshot {
            as_of: doc.as_of,
            nodes,
            channels,
            diagnostics: doc.diagnostics,
        })
    }

    /// Node ids referenced by channels; equals `nodes` for replayed snapshots.
    pub fn channel_endpoints(&self) -> BTreeSet<NodeId> {
        self.channels
            .values()
            .flat_map(|c| [c.node_1, c.node_2])
            .collect()
    }
}
