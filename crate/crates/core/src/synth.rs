//! Builders for well-formed gossip messages with dummy signatures and keys.
//! Used by fixtures and synthetic corpora; nothing here is cryptographically
//! valid.

use crate::codec::{
    encode_message, ChannelAnnouncement, ChannelUpdate, GossipMessage, NodeAnnouncement, NodeId,
    ShortChannelId, CHAN_FLAG_DIRECTION, CHAN_FLAG_DISABLED, MSG_FLAG_HTLC_MAX,
};
use crate::store::StoreRecord;

/// Bitcoin mainnet genesis hash in gossip byte order.
pub const MAINNET_CHAIN_HASH: [u8; 32] = [
    0x6f, 0xe2, 0x8c, 0x0a, 0xb6, 0xf1, 0xb3, 0x72, 0xc1, 0xa6, 0xa2, 0x46, 0xae, 0x63, 0xf7, 0x4f,
    0x93, 0x1e, 0x83, 0x65, 0xe1, 0x5a, 0x08, 0x9c, 0x68, 0xd6, 0x19, 0x00, 0x00, 0x00, 0x00, 0x00,
];

fn dummy_key(node: &NodeId) -> [u8; 33] {
    *node.as_bytes()
}

/// Announcement for a channel between `a` and `b`, in either order.
pub fn channel_announcement(scid: ShortChannelId, a: NodeId, b: NodeId) -> GossipMessage {
    let (node_id_1, node_id_2) = if a < b { (a, b) } else { (b, a) };
    GossipMessage::ChannelAnnouncement(ChannelAnnouncement {
        node_signature_1: [1; 64],
        node_signature_2: [2; 64],
        bitcoin_signature_1: [3; 64],
        bitcoin_signature_2: [4; 64],
        features: Vec::new(),
        chain_hash: MAINNET_CHAIN_HASH,
        short_channel_id: scid,
        node_id_1,
        node_id_2,
        bitcoin_key_1: dummy_key(&node_id_1),
        bitcoin_key_2: dummy_key(&node_id_2),
        extra: Vec::new(),
    })
}

/// Policy fields for [`channel_update`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicySpec {
    pub fee_base_msat: u32,
    pub fee_proportional_millionths: u32,
    pub htlc_minimum_msat: u64,
    pub htlc_maximum_msat: Option<u64>,
    pub cltv_expiry_delta: u16,
    pub disabled: bool,
}

impl PolicySpec {
    pub fn fees(base: u32, ppm: u32) -> Self {
        PolicySpec {
            fee_base_msat: base,
            fee_proportional_millionths: ppm,
            htlc_minimum_msat: 1,
            htlc_maximum_msat: None,
            cltv_expiry_delta: 40,
            disabled: false,
        }
    }

    pub fn disabled(mut self) -> Self {
        self.disabled = true;
        self
    }

    pub fn with_htlc_bounds(mut self, min: u64, max: Option<u64>) -> Self {
        self.htlc_minimum_msat = min;
        self.htlc_maximum_msat = max;
        self
    }
}

pub fn channel_update(
    scid: ShortChannelId,
    direction: u8,
    timestamp: u32,
    policy: PolicySpec,
) -> GossipMessage {
    let mut channel_flags = direction & CHAN_FLAG_DIRECTION;
    if policy.disabled {
        channel_flags |= CHAN_FLAG_DISABLED;
    }
    GossipMessage::ChannelUpdate(ChannelUpdate {
        signature: [5; 64],
        chain_hash: MAINNET_CHAIN_HASH,
        short_channel_id: scid,
        timestamp,
        message_flags: if policy.htlc_maximum_msat.is_some() {
            MSG_FLAG_HTLC_MAX
        } else {
            0
        },
        channel_flags,
        cltv_expiry_delta: policy.cltv_expiry_delta,
        htlc_minimum_msat: policy.htlc_minimum_msat,
        fee_base_msat: policy.fee_base_msat,
        fee_proportional_millionths: policy.fee_proportional_millionths,
        htlc_maximum_msat: policy.htlc_maximum_msat,
        extra: Vec::new(),
    })
}

pub fn node_announcement(node: NodeId, timestamp: u32, alias: &str) -> GossipMessage {
    let mut padded = [0u8; 32];
    let bytes = alias.as_bytes();
    let n = bytes.len().min(32);
    padded[..n].copy_from_slice(&bytes[..n]);
    GossipMessage::NodeAnnouncement(NodeAnnouncement {
        signature: [6; 64],
        features: Vec::new(),
        timestamp,
        node_id: node,
        rgb_color: [0x33, 0x99, 0xff],
        alias: padded,
        addresses: Vec::new(),
        extra: Vec::new(),
    })
}

/// Encodes `msg` as an archive record. Panics only on messages that
/// cannot be encoded, which the builders above never produce.
pub fn record(arrival_ts: u64, msg: &GossipMessage) -> StoreRecord {
    StoreRecord {
        arrival_ts,
        payload: encode_message(msg).expect("builder messages encode"),
    }
}

/// Channel id with a synthetic block height, unique per `index`.
pub fn scid(index: u32) -> ShortChannelId {
    ShortChannelId::new(500_000 + index / 1000, index % 1000, 0).expect("in range")
}
