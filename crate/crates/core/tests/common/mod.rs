#![allow(dead_code)]

use lntm_core::codec::{
    ChannelAnnouncement, ChannelUpdate, GossipMessage, NodeAnnouncement, NodeId, ShortChannelId,
};
use lntm_core::metrics::WeightedDigraph;
use lntm_core::synth::{self, PolicySpec};
use lntm_core::StoreRecord;
use proptest::collection::vec;
use proptest::prelude::*;

pub fn node_id() -> impl Strategy<Value = NodeId> {
    (prop_oneof![Just(0x02u8), Just(0x03u8)], any::<[u8; 32]>()).prop_map(|(prefix, rest)| {
        let mut bytes = [0u8; 33];
        bytes[0] = prefix;
        bytes[1..].copy_from_slice(&rest);
        NodeId::from_bytes(bytes).unwrap()
    })
}

fn sig() -> impl Strategy<Value = [u8; 64]> {
    vec(any::<u8>(), 64).prop_map(|v| v.try_into().unwrap())
}

fn blob() -> impl Strategy<Value = Vec<u8>> {
    vec(any::<u8>(), 0..24)
}

pub fn channel_announcement() -> impl Strategy<Value = GossipMessage> {
    (
        (sig(), sig(), sig(), sig()),
        blob(),
        any::<[u8; 32]>(),
        any::<u64>(),
        (node_id(), node_id()).prop_filter("distinct endpoints", |(a, b)| a != b),
        (any::<[u8; 32]>(), any::<[u8; 32]>()),
        blob(),
    )
        .prop_map(
            |((s1, s2, s3, s4), features, chain_hash, scid, (a, b), (k1, k2), extra)| {
                let (node_id_1, node_id_2) = if a < b { (a, b) } else { (b, a) };
                let key = |k: [u8; 32]| {
                    let mut out = [0x02; 33];
                    out[1..].copy_from_slice(&k);
                    out
                };
                GossipMessage::ChannelAnnouncement(ChannelAnnouncement {
                    node_signature_1: s1,
                    node_signature_2: s2,
                    bitcoin_signature_1: s3,
                    bitcoin_signature_2: s4,
                    features,
                    chain_hash,
                    short_channel_id: ShortChannelId::from_u64(scid),
                    node_id_1,
                    node_id_2,
                    bitcoin_key_1: key(k1),
                    bitcoin_key_2: key(k2),
                    extra,
                })
            },
        )
}

pub fn node_announcement() -> impl Strategy<Value = GossipMessage> {
    (
        sig(),
        blob(),
        any::<u32>(),
        node_id(),
        any::<[u8; 3]>(),
        any::<[u8; 32]>(),
        blob(),
        blob(),
    )
        .prop_map(
            |(signature, features, timestamp, node_id, rgb_color, alias, addresses, extra)| {
                GossipMessage::NodeAnnouncement(NodeAnnouncement {
                    signature,
                    features,
                    timestamp,
                    node_id,
                    rgb_color,
                    alias,
                    addresses,
                    extra,
                })
            },
        )
}

pub fn channel_update() -> impl Strategy<Value = GossipMessage> {
    (
        sig(),
        any::<[u8; 32]>(),
        any::<u64>(),
        any::<u32>(),
        (any::<u8>(), any::<u8>(), any::<u16>()),
        (any::<u64>(), any::<u32>(), any::<u32>()),
        any::<u64>(),
        blob(),
    )
        .prop_map(
            |(
                signature,
                chain_hash,
                scid,
                timestamp,
                (mflags, cflags, cltv),
                (min, base, ppm),
                max,
                extra,
            )| {
                let has_max = mflags & 1 == 1;
                GossipMessage::ChannelUpdate(ChannelUpdate {
                    signature,
                    chain_hash,
                    short_channel_id: ShortChannelId::from_u64(scid),
                    timestamp,
                    message_flags: mflags,
                    channel_flags: cflags,
                    cltv_expiry_delta: cltv,
                    htlc_minimum_msat: min,
                    fee_base_msat: base,
                    fee_proportional_millionths: ppm,
                    htlc_maximum_msat: has_max.then_some(max),
                    extra,
                })
            },
        )
}

/// Small corpus over a handful of nodes and channels, with colliding
/// timestamps, duplicates and updates for unknown channels.
pub fn corpus() -> impl Strategy<Value = Vec<StoreRecord>> {
    let event = prop_oneof![
        (0u32..6, 0u64..6, 0u64..6, 0u64..40).prop_map(|(c, a, b, t)| (0u8, c, a, b, t)),
        (0u32..7, 0u64..2, 0u64..4, 0u64..40).prop_map(|(c, d, fee, t)| (1u8, c, d, fee, t)),
        (0u64..7, 0u64..40).prop_map(|(n, t)| (2u8, 0, n, 0, t)),
    ];
    vec(event, 0..40).prop_map(|events| {
        events
            .into_iter()
            .map(|(kind, c, x, y, t)| match kind {
                0 => {
                    let (a, b) = (
                        NodeId::synthetic(x),
                        NodeId::synthetic(if x == y { (y + 1) % 7 } else { y }),
                    );
                    synth::record(t, &synth::channel_announcement(synth::scid(c), a, b))
                }
                1 => synth::record(
                    t + 3,
                    &synth::channel_update(
                        synth::scid(c),
                        x as u8,
                        t as u32,
                        PolicySpec::fees(y as u32 * 100, 10),
                    ),
                ),
                _ => synth::record(
                    t + 1,
                    &synth::node_announcement(NodeId::synthetic(x), t as u32, "n"),
                ),
            })
            .collect()
    })
}

/// Digraph on `2..=max_nodes` nodes with sparse random arcs; zero weights are
/// drawn often so zero-cost ties and cycles show up.
pub fn digraph(max_nodes: usize, max_arcs: usize) -> impl Strategy<Value = WeightedDigraph> {
    (2..=max_nodes).prop_flat_map(move |n| {
        let weight = prop_oneof![2 => Just(0u64), 1 => 1u64..4, 2 => 0u64..=1000];
        vec((0..n, 0..n, weight), 0..=max_arcs).prop_map(move |arcs| {
            WeightedDigraph::new((0..n as u64).map(NodeId::synthetic).collect(), arcs).unwrap()
        })
    })
}
