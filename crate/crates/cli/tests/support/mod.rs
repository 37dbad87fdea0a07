#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lntm_core::store::write_store;
use lntm_core::synth::{self, PolicySpec};
use lntm_core::{NodeId, StoreRecord};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn node(i: u64) -> NodeId {
    NodeId::synthetic(i)
}

pub fn write_gsr1(dir: &Path, name: &str, records: &[StoreRecord]) -> PathBuf {
    let path = dir.join(name);
    let mut buf = Vec::new();
    write_store(&mut buf, records).unwrap();
    std::fs::write(&path, buf).unwrap();
    path
}

fn dir_of(a: NodeId, b: NodeId) -> u8 {
    u8::from(a > b)
}

/// Announcement plus an update for the `from -> to` direction.
pub fn routed_channel(
    index: u32,
    from: NodeId,
    to: NodeId,
    at: u64,
    policy: PolicySpec,
) -> Vec<StoreRecord> {
    let scid = synth::scid(index);
    vec![
        synth::record(at, &synth::channel_announcement(scid, from, to)),
        synth::record(
            at,
            &synth::channel_update(scid, dir_of(from, to), at as u32, policy),
        ),
    ]
}

/// Six nodes A..F (synthetic ids 1..6) on a chain of five channels
/// announced at 100, 200, ..., 500, with updates that arrive early, late,
/// twice, superseded, conflicting at one timestamp, or for an unknown channel.
pub fn six_node_corpus() -> Vec<StoreRecord> {
    let [a, b, c, d, e, f] = [1, 2, 3, 4, 5, 6].map(node);
    let ch = synth::scid;
    let upd = |i, dir, ts, policy| synth::channel_update(ch(i), dir, ts, policy);
    let fees = PolicySpec::fees;
    vec![
        synth::record(100, &synth::channel_announcement(ch(1), a, b)),
        synth::record(200, &synth::channel_announcement(ch(2), b, c)),
        synth::record(300, &synth::channel_announcement(ch(3), c, d)),
        synth::record(400, &synth::channel_announcement(ch(4), d, e)),
        synth::record(500, &synth::channel_announcement(ch(5), e, f)),
        // Precedes its channel's announcement.
        synth::record(95, &upd(1, 0, 90, fees(1000, 1))),
        synth::record(155, &upd(1, 0, 150, fees(1100, 1))),
        // Byte-identical resend.
        synth::record(700, &upd(1, 0, 150, fees(1100, 1))),
        synth::record(125, &upd(1, 1, 120, fees(2000, 1))),
        // Arrives long after a newer update for the same direction.
        synth::record(600, &upd(2, 0, 250, fees(10, 1))),
        synth::record(215, &upd(2, 0, 210, fees(5, 1))),
        synth::record(311, &upd(3, 1, 310, fees(7, 1).disabled())),
        synth::record(351, &upd(3, 1, 350, fees(7, 1))),
        // Two different updates claiming the same timestamp.
        synth::record(512, &upd(5, 0, 510, fees(4, 1))),
        synth::record(511, &upd(5, 0, 510, fees(3, 1))),
        // Unknown channel.
        synth::record(121, &upd(9, 0, 120, fees(1, 1))),
        synth::record(131, &synth::node_announcement(a, 130, "alpha")),
        synth::record(141, &synth::node_announcement(f, 140, "foxtrot")),
        synth::record(261, &synth::node_announcement(a, 260, "alpha2")),
    ]
}

/// Two routes from node 1 to node 4: via node 2 (0 msat + 100 ppm) and via
/// node 3 (5000 msat + 0 ppm). The first is cheaper below 5*10^7 msat.
pub fn two_route_corpus() -> Vec<StoreRecord> {
    let [s, x, y, t] = [1, 2, 3, 4].map(node);
    let low_base = PolicySpec::fees(0, 100);
    let high_base = PolicySpec::fees(5000, 0);
    [
        (s, x, low_base),
        (x, t, low_base),
        (s, y, high_base),
        (y, t, high_base),
    ]
    .into_iter()
    .enumerate()
    .flat_map(|(i, (from, to, policy))| routed_channel(i as u32, from, to, 10, policy))
    .collect()
}

/// Connected random network with bidirectional policies, fee ties and
/// some zero-fee channels.
pub fn random_corpus(seed: u64, nodes: u64, extra_channels: usize) -> Vec<StoreRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut index = 0u32;
    let mut add = |rng: &mut ChaCha8Rng, x: u64, y: u64, records: &mut Vec<StoreRecord>| {
        let scid = synth::scid(index);
        index += 1;
        let at = rng.gen_range(1_000..2_000u64);
        records.push(synth::record(
            at,
            &synth::channel_announcement(scid, node(x), node(y)),
        ));
        for dir in 0..2u8 {
            let base = [0, 1000, 1000, rng.gen_range(0..5000)][rng.gen_range(0..4)];
            let ppm = [0, 1, 100, rng.gen_range(0..2000)][rng.gen_range(0..4)];
            let ts = rng.gen_range(1_000..3_000u32);
            records.push(synth::record(
                u64::from(ts) + 5,
                &synth::channel_update(scid, dir, ts, PolicySpec::fees(base, ppm)),
            ));
        }
    };
    for v in 1..nodes {
        let parent = rng.gen_range(0..v);
        add(&mut rng, parent, v, &mut records);
    }
    for _ in 0..extra_channels {
        let x = rng.gen_range(0..nodes);
        let y = rng.gen_range(0..nodes);
        if x != y {
            add(&mut rng, x, y, &mut records);
        }
    }
    records
}
