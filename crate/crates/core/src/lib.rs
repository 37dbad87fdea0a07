//! Reconstruct historical Lightning Network snapshots from archived gossip
//! and measure how concentrated fee-weighted routing is.
//!
//! Pipeline: [`store`] reads and orders archived messages decoded by
//! [`codec`]; [`timemachine`] replays them up to an instant; [`metrics`]
//! turns the resulting routing view into a fee-weighted digraph and computes
//! betweenness; [`inequality`] summarizes the distribution.

pub mod codec;
pub mod inequality;
pub mod metrics;
pub mod store;
pub mod synth;
pub mod timemachine;

pub use codec::{decode_message, encode_message, GossipMessage, NodeId, ShortChannelId};
pub use metrics::{build_graph, CentralityReport, WeightedDigraph};
pub use store::{deduplicate_and_order, OrderedFeed, StoreRecord};
pub use timemachine::{replay, routing_view, NetworkSnapshot, RoutingView};

/// Transaction sizes analysed by default: 0.0001, 0.01 and 0.1 BTC.
pub const DEFAULT_AMOUNTS_MSAT: [u64; 3] = [10_000_000, 1_000_000_000, 10_000_000_000];
