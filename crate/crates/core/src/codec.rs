//! Wire codec for the three gossip messages that describe the public
//! channel graph.
//!
//! ```text
//! 256 channel_announcement:
//!   node_signature_1(64) || node_signature_2(64) || bitcoin_signature_1(64)
//!   || bitcoin_signature_2(64) || features_len:u16 || features
//!   || chain_hash(32) || short_channel_id(8) || node_id_1(33) || node_id_2(33)
//!   || bitcoin_key_1(33) || bitcoin_key_2(33)
//!
//! 257 node_announcement:
//!   signature(64) || features_len:u16 || features || timestamp:u32
//!   || node_id(33) || rgb_color(3) || alias(32) || addr_len:u16 || addresses
//!
//! 258 channel_update:
//!   signature(64) || chain_hash(32) || short_channel_id(8) || timestamp:u32
//!   || message_flags:u8 || channel_flags:u8 || cltv_expiry_delta:u16
//!   || htlc_minimum_msat:u64 || fee_base_msat:u32
//!   || fee_proportional_millionths:u32 || [htlc_maximum_msat:u64]
//! ```
//!
//! All integers are big-endian. Bytes following the last defined field are
//! kept in `extra` so that re-encoding reproduces the input exactly.
//! Signatures are carried but never checked.

use std::fmt;

use thiserror::Error;

pub const CHANNEL_ANNOUNCEMENT: u16 = 256;
pub const NODE_ANNOUNCEMENT: u16 = 257;
pub const CHANNEL_UPDATE: u16 = 258;

/// `message_flags` bit signalling a trailing `htlc_maximum_msat`.
pub const MSG_FLAG_HTLC_MAX: u8 = 0b0000_0001;
/// `channel_flags` direction bit: clear means node_id_1 -> node_id_2.
pub const CHAN_FLAG_DIRECTION: u8 = 0b0000_0001;
pub const CHAN_FLAG_DISABLED: u8 = 0b0000_0010;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("unknown message type {code} at offset {offset}")]
    UnknownType { code: u16, offset: usize },
    #[error("truncated message: needed {needed} bytes at offset {offset}, {available} available")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("invalid node id prefix 0x{prefix:02x} at offset {offset}")]
    InvalidNodeId { offset: usize, prefix: u8 },
    #[error("channel_announcement node ids out of order at offset {offset}")]
    NodeOrder { offset: usize },
    #[error("field {field} has wrong length: {detail}")]
    FieldLength { field: &'static str, detail: String },
}

pub type Result<T> = std::result::Result<T, CodecError>;

/// 33-byte compressed public key. The curve point is not validated, only the
/// parity prefix.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId([u8; 33]);

impl NodeId {
    pub const LEN: usize = 33;

    pub fn from_bytes(bytes: [u8; 33]) -> std::result::Result<Self, InvalidNodeId> {
        match bytes[0] {
            0x02 | 0x03 => Ok(NodeId(bytes)),
            prefix => Err(InvalidNodeId { prefix }),
        }
    }

    pub fn from_slice(bytes: &[u8]) -> std::result::Result<Self, InvalidNodeId> {
        let arr: [u8; 33] = bytes.try_into().map_err(|_| InvalidNodeId {
            prefix: bytes.first().copied().unwrap_or(0),
        })?;
        Self::from_bytes(arr)
    }

    pub fn from_hex(s: &str) -> std::result::Result<Self, InvalidNodeId> {
        let raw = hex::decode(s).map_err(|_| InvalidNodeId { prefix: 0 })?;
        Self::from_slice(&raw)
    }

    /// Deterministic id derived from an integer; handy for fixtures and
    /// synthetic corpora. Ordering of ids follows ordering of `index`.
    pub fn synthetic(index: u64) -> Self {
        let mut bytes = [0u8; 33];
        bytes[0] = 0x02;
        bytes[25..].copy_from_slice(&index.to_be_bytes());
        NodeId(bytes)
    }

    pub fn as_bytes(&self) -> &[u8; 33] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }
}

impl fmt::Debug for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeId({})", self.to_hex())
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("invalid node id (prefix 0x{prefix:02x})")]
pub struct InvalidNodeId {
    pub prefix: u8,
}

/// Funding output locator: 3 bytes block height, 3 bytes transaction index,
/// 2 bytes output index, packed into a big-endian u64.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShortChannelId(u64);

impl ShortChannelId {
    pub const MAX_BLOCK: u32 = (1 << 24) - 1;
    pub const MAX_TX_INDEX: u32 = (1 << 24) - 1;

    pub fn new(block: u32, tx_index: u32, output_index: u16) -> Option<Self> {
        if block > Self::MAX_BLOCK || tx_index > Self::MAX_TX_INDEX {
            return None;
        }
        Some(ShortChannelId(
            (u64::from(block) << 40) | (u64::from(tx_index) << 16) | u64::from(output_index),
        ))
    }

    pub fn from_u64(raw: u64) -> Self {
        ShortChannelId(raw)
    }

    pub fn to_u64(self) -> u64 {
        self.0
    }

    pub fn block(self) -> u32 {
        (self.0 >> 40) as u32
    }

    pub fn tx_index(self) -> u32 {
        ((self.0 >> 16) & 0xff_ffff) as u32
    }

    pub fn output_index(self) -> u16 {
        (self.0 & 0xffff) as u16
    }

    /// Parses the `BLOCKxTXxOUT` form produced by `Display`.
    pub fn parse(s: &str) -> Option<Self> {
        let mut parts = s.split('x');
        let block = parts.next()?.parse().ok()?;
        let tx = parts.next()?.parse().ok()?;
        let out = parts.next()?.parse().ok()?;
        if parts.next().is_some() {
            return None;
        }
        Self::new(block, tx, out)
    }
}

impl fmt::Display for ShortChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}x{}x{}",
            self.block(),
            self.tx_index(),
            self.output_index()
        )
    }
}

impl fmt::Debug for ShortChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ShortChannelId({self})")
    }
}

pub type Signature = [u8; 64];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelAnnouncement {
    pub node_signature_1: Signature,
    pub node_signature_2: Signature,
    pub bitcoin_signature_1: Signature,
    pub bitcoin_signature_2: Signature,
    pub features: Vec<u8>,
    pub chain_hash: [u8; 32],
    pub short_channel_id: ShortChannelId,
    pub node_id_1: NodeId,
    pub node_id_2: NodeId,
    pub bitcoin_key_1: [u8; 33],
    pub bitcoin_key_2: [u8; 33],
    pub extra: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeAnnouncement {
    pub signature: Signature,
    pub features: Vec<u8>,
    pub timestamp: u32,
    pub node_id: NodeId,
    pub rgb_color: [u8; 3],
    /// Raw zero-padded alias; wild aliases are not always valid UTF-8.
    pub alias: [u8; 32],
    pub addresses: Vec<u8>,
    pub extra: Vec<u8>,
}

impl NodeAnnouncement {
    /// Alias as text with trailing NUL padding removed and invalid UTF-8
    /// replaced.
    pub fn alias_lossy(&self) -> String {
        alias_lossy(&self.alias)
    }
}

pub fn alias_lossy(alias: &[u8; 32]) -> String {
    let end = alias.iter().rposition(|&b| b != 0).map_or(0, |i| i + 1);
    String::from_utf8_lossy(&alias[..end]).into_owned()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelUpdate {
    pub signature: Signature,
    pub chain_hash: [u8; 32],
    pub short_channel_id: ShortChannelId,
    pub timestamp: u32,
    pub message_flags: u8,
    pub channel_flags: u8,
    pub cltv_expiry_delta: u16,
    pub htlc_minimum_msat: u64,
    pub fee_base_msat: u32,
    pub fee_proportional_millionths: u32,
    /// Present iff `message_flags & MSG_FLAG_HTLC_MAX`. Not checked against
    /// `htlc_minimum_msat`.
    pub htlc_maximum_msat: Option<u64>,
    pub extra: Vec<u8>,
}

impl ChannelUpdate {
    /// 0 for node_id_1 -> node_id_2, 1 for the reverse.
    pub fn direction(&self) -> u8 {
        self.channel_flags & CHAN_FLAG_DIRECTION
    }

    pub fn is_disabled(&self) -> bool {
        self.channel_flags & CHAN_FLAG_DISABLED != 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[allow(clippy::large_enum_variant)]
pub enum GossipMessage {
    ChannelAnnouncement(ChannelAnnouncement),
    NodeAnnouncement(NodeAnnouncement),
    ChannelUpdate(ChannelUpdate),
}

impl GossipMessage {
    pub fn type_code(&self) -> u16 {
        match self {
            GossipMessage::ChannelAnnouncement(_) => CHANNEL_ANNOUNCEMENT,
            GossipMessage::NodeAnnouncement(_) => NODE_ANNOUNCEMENT,
            GossipMessage::ChannelUpdate(_) => CHANNEL_UPDATE,
        }
    }

    /// Timestamp carried inside the message, if the type has one.
    pub fn embedded_timestamp(&self) -> Option<u32> {
        match self {
            GossipMessage::ChannelAnnouncement(_) => None,
            GossipMessage::NodeAnnouncement(m) => Some(m.timestamp),
            GossipMessage::ChannelUpdate(m) => Some(m.timestamp),
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(buf: &'a [u8]) -> Self {
        Reader { buf, pos: 0 }
    }

    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let available = self.buf.len() - self.pos;
        if available < len {
            return Err(CodecError::Truncated {
                offset: self.pos,
                needed: len,
                available,
            });
        }
        let out = &self.buf[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    fn array<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut out = [0u8; N];
        out.copy_from_slice(self.take(N)?);
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes(self.array()?))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.array()?))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.array()?))
    }

    fn var_bytes(&mut self) -> Result<Vec<u8>> {
        let len = self.u16()? as usize;
        Ok(self.take(len)?.to_vec())
    }

    fn node_id(&mut self) -> Result<NodeId> {
        let offset = self.pos;
        let raw = self.array::<33>()?;
        NodeId::from_bytes(raw).map_err(|e| CodecError::InvalidNodeId {
            offset,
            prefix: e.prefix,
        })
    }

    fn rest(&mut self) -> Vec<u8> {
        let out = self.buf[self.pos..].to_vec();
        self.pos = self.buf.len();
        out
    }
}

pub fn decode_message(bytes: &[u8]) -> Result<GossipMessage> {
    let mut r = Reader::new(bytes);
    let code = r.u16()?;
    match code {
        CHANNEL_ANNOUNCEMENT => {
            decode_channel_announcement(&mut r).map(GossipMessage::ChannelAnnouncement)
        }
        NODE_ANNOUNCEMENT => decode_node_announcement(&mut r).map(GossipMessage::NodeAnnouncement),
        CHANNEL_UPDATE => decode_channel_update(&mut r).map(GossipMessage::ChannelUpdate),
        code => Err(CodecError::UnknownType { code, offset: 0 }),
    }
}

fn decode_channel_announcement(r: &mut Reader<'_>) -> Result<ChannelAnnouncement> {
    let node_signature_1 = r.array()?;
    let node_signature_2 = r.array()?;
    let bitcoin_signature_1 = r.array()?;
    let bitcoin_signature_2 = r.array()?;
    let features = r.var_bytes()?;
    let chain_hash = r.array()?;
    let short_channel_id = ShortChannelId(r.u64()?);
    let ids_offset = r.pos;
    let node_id_1 = r.node_id()?;
    let node_id_2 = r.node_id()?;
    if node_id_1 >= node_id_2 {
        return Err(CodecError::NodeOrder { offset: ids_offset });
    }
    Ok(ChannelAnnouncement {
        node_signature_1,
        node_signature_2,
        bitcoin_signature_1,
        bitcoin_signature_2,
        features,
        chain_hash,
        short_channel_id,
        node_id_1,
        node_id_2,
        bitcoin_key_1: r.array()?,
        bitcoin_key_2: r.array()?,
        extra: r.rest(),
    })
}

fn decode_node_announcement(r: &mut Reader<'_>) -> Result<NodeAnnouncement> {
    Ok(NodeAnnouncement {
        signature: r.array()?,
        features: r.var_bytes()?,
        timestamp: r.u32()?,
        node_id: r.node_id()?,
        rgb_color: r.array()?,
        alias: r.array()?,
        addresses: r.var_bytes()?,
        extra: r.rest(),
    })
}

fn decode_channel_update(r: &mut Reader<'_>) -> Result<ChannelUpdate> {
    let signature = r.array()?;
    let chain_hash = r.array()?;
    let short_channel_id = ShortChannelId(r.u64()?);
    let timestamp = r.u32()?;
    let message_flags = r.u8()?;
    let channel_flags = r.u8()?;
    let cltv_expiry_delta = r.u16()?;
    let htlc_minimum_msat = r.u64()?;
    let fee_base_msat = r.u32()?;
    let fee_proportional_millionths = r.u32()?;
    let htlc_maximum_msat = if message_flags & MSG_FLAG_HTLC_MAX != 0 {
        Some(r.u64()?)
    } else {
        None
    };
    Ok(ChannelUpdate {
        signature,
        chain_hash,
        short_channel_id,
        timestamp,
        message_flags,
        channel_flags,
        cltv_expiry_delta,
        htlc_minimum_msat,
        fee_base_msat,
        fee_proportional_millionths,
        htlc_maximum_msat,
        extra: r.rest(),
    })
}

fn put_var_bytes(out: &mut Vec<u8>, field: &'static str, bytes: &[u8]) -> Result<()> {
    let len = u16::try_from(bytes.len()).map_err(|_| CodecError::FieldLength {
        field,
        detail: format!("{} bytes exceeds the u16 length prefix", bytes.len()),
    })?;
    out.extend_from_slice(&len.to_be_bytes());
    out.extend_from_slice(bytes);
    Ok(())
}

pub fn encode_message(msg: &GossipMessage) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(512);
    out.extend_from_slice(&msg.type_code().to_be_bytes());
    match msg {
        GossipMessage::ChannelAnnouncement(m) => {
            out.extend_from_slice(&m.node_signature_1);
            out.extend_from_slice(&m.node_signature_2);
            out.extend_from_slice(&m.bitcoin_signature_1);
            out.extend_from_slice(&m.bitcoin_signature_2);
            put_var_bytes(&mut out, "features", &m.features)?;
            out.extend_from_slice(&m.chain_hash);
            out.extend_from_slice(&m.short_channel_id.0.to_be_bytes());
            out.extend_from_slice(m.node_id_1.as_bytes());
            out.extend_from_slice(m.node_id_2.as_bytes());
            out.extend_from_slice(&m.bitcoin_key_1);
            out.extend_from_slice(&m.bitcoin_key_2);
            out.extend_from_slice(&m.extra);
        }
        GossipMessage::NodeAnnouncement(m) => {
            out.extend_from_slice(&m.signature);
            put_var_bytes(&mut out, "features", &m.features)?;
            out.extend_from_slice(&m.timestamp.to_be_bytes());
            out.extend_from_slice(m.node_id.as_bytes());
            out.extend_from_slice(&m.rgb_color);
            out.extend_from_slice(&m.alias);
            put_var_bytes(&mut out, "addresses", &m.addresses)?;
            out.extend_from_slice(&m.extra);
        }
        GossipMessage::ChannelUpdate(m) => {
            let flagged = m.message_flags & MSG_FLAG_HTLC_MAX != 0;
            if flagged != m.htlc_maximum_msat.is_some() {
                return Err(CodecError::FieldLength {
                    field: "htlc_maximum_msat",
                    detail: format!(
                        "message_flags bit 0 is {} but the field is {}",
                        if flagged { "set" } else { "clear" },
                        if m.htlc_maximum_msat.is_some() {
                            "present"
                        } else {
                            "absent"
                        },
                    ),
                });
            }
            out.extend_from_slice(&m.signature);
            out.extend_from_slice(&m.chain_hash);
            out.extend_from_slice(&m.short_channel_id.0.to_be_bytes());
            out.extend_from_slice(&m.timestamp.to_be_bytes());
            out.push(m.message_flags);
            out.push(m.channel_flags);
            out.extend_from_slice(&m.cltv_expiry_delta.to_be_bytes());
            out.extend_from_slice(&m.htlc_minimum_msat.to_be_bytes());
            out.extend_from_slice(&m.fee_base_msat.to_be_bytes());
            out.extend_from_slice(&m.fee_proportional_millionths.to_be_bytes());
            if let Some(max) = m.htlc_maximum_msat {
                out.extend_from_slice(&max.to_be_bytes());
            }
            out.extend_from_slice(&m.extra);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_update(with_max: bool) -> ChannelUpdate {
        ChannelUpdate {
            signature: [7; 64],
            chain_hash: [0x6f; 32],
            short_channel_id: ShortChannelId::new(600_000, 1234, 1).unwrap(),
            timestamp: 1_600_000_000,
            message_flags: if with_max { MSG_FLAG_HTLC_MAX } else { 0 },
            channel_flags: CHAN_FLAG_DIRECTION,
            cltv_expiry_delta: 40,
            htlc_minimum_msat: 1000,
            fee_base_msat: 1000,
            fee_proportional_millionths: 100,
            htlc_maximum_msat: with_max.then_some(5_000_000_000),
            extra: vec![],
        }
    }

    #[test]
    fn hand_built_channel_update_decodes_field_by_field() {
        let mut body = vec![0x01, 0x02];
        body.extend_from_slice(&[0xaa; 64]);
        body.extend_from_slice(&[0xbb; 32]);
        // 600000x1234x1
        body.extend_from_slice(&[0x09, 0x27, 0xc0, 0x00, 0x04, 0xd2, 0x00, 0x01]);
        body.extend_from_slice(&1_600_000_000u32.to_be_bytes());
        body.push(0x01);
        body.push(0x03);
        body.extend_from_slice(&144u16.to_be_bytes());
        body.extend_from_slice(&1000u64.to_be_bytes());
        body.extend_from_slice(&1000u32.to_be_bytes());
        body.extend_from_slice(&100u32.to_be_bytes());
        body.extend_from_slice(&990_000_000u64.to_be_bytes());
        assert_eq!(body.len(), 2 + 64 + 32 + 8 + 4 + 1 + 1 + 2 + 8 + 4 + 4 + 8);

        let GossipMessage::ChannelUpdate(u) = decode_message(&body).unwrap() else {
            panic!("expected channel_update");
        };
        assert_eq!(u.signature, [0xaa; 64]);
        assert_eq!(u.chain_hash, [0xbb; 32]);
        assert_eq!(u.short_channel_id.block(), 600_000);
        assert_eq!(u.short_channel_id.tx_index(), 1234);
        assert_eq!(u.short_channel_id.output_index(), 1);
        assert_eq!(u.timestamp, 1_600_000_000);
        assert_eq!(u.message_flags, 1);
        assert_eq!(u.channel_flags, 3);
        assert_eq!(u.direction(), 1);
        assert!(u.is_disabled());
        assert_eq!(u.cltv_expiry_delta, 144);
        assert_eq!(u.htlc_minimum_msat, 1000);
        assert_eq!(u.fee_base_msat, 1000);
        assert_eq!(u.fee_proportional_millionths, 100);
        assert_eq!(u.htlc_maximum_msat, Some(990_000_000));
        assert!(u.extra.is_empty());
        assert_eq!(
            encode_message(&GossipMessage::ChannelUpdate(u)).unwrap(),
            body
        );
    }

    #[test]
    fn empty_input_is_truncated_at_zero() {
        assert_eq!(
            decode_message(&[]),
            Err(CodecError::Truncated {
                offset: 0,
                needed: 2,
                available: 0
            })
        );
    }

    #[test]
    fn unknown_type_is_rejected() {
        assert!(matches!(
            decode_message(&[0x01, 0x03, 0, 0]),
            Err(CodecError::UnknownType {
                code: 259,
                offset: 0
            })
        ));
        assert!(matches!(
            decode_message(&[0x00, 0x10]),
            Err(CodecError::UnknownType { code: 16, .. })
        ));
    }

    #[test]
    fn update_without_max_omits_trailing_field() {
        let with = encode_message(&GossipMessage::ChannelUpdate(sample_update(true))).unwrap();
        let without = encode_message(&GossipMessage::ChannelUpdate(sample_update(false))).unwrap();
        assert_eq!(with.len(), without.len() + 8);
        assert_eq!(without.len(), 130);
    }

    #[test]
    fn flag_and_field_mismatch_is_field_length_error() {
        let mut u = sample_update(true);
        u.htlc_maximum_msat = None;
        assert!(matches!(
            encode_message(&GossipMessage::ChannelUpdate(u)),
            Err(CodecError::FieldLength {
                field: "htlc_maximum_msat",
                ..
            })
        ));
        let mut u = sample_update(false);
        u.htlc_maximum_msat = Some(1);
        assert!(encode_message(&GossipMessage::ChannelUpdate(u)).is_err());
    }

    #[test]
    fn oversized_features_rejected() {
        let msg = GossipMessage::NodeAnnouncement(NodeAnnouncement {
            signature: [0; 64],
            features: vec![0; 70_000],
            timestamp: 1,
            node_id: NodeId::synthetic(1),
            rgb_color: [0; 3],
            alias: [0; 32],
            addresses: vec![],
            extra: vec![],
        });
        assert!(matches!(
            encode_message(&msg),
            Err(CodecError::FieldLength {
                field: "features",
                ..
            })
        ));
    }

    #[test]
    fn trailing_bytes_survive_round_trip() {
        let mut u = sample_update(false);
        u.extra = vec![1, 2, 3, 4, 5, 6, 7, 8, 9];
        let bytes = encode_message(&GossipMessage::ChannelUpdate(u.clone())).unwrap();
        assert_eq!(
            decode_message(&bytes).unwrap(),
            GossipMessage::ChannelUpdate(u)
        );
    }

    #[test]
    fn truncation_reports_offset() {
        let bytes = encode_message(&GossipMessage::ChannelUpdate(sample_update(true))).unwrap();
        let err = decode_message(&bytes[..bytes.len() - 3]).unwrap_err();
        assert_eq!(
            err,
            CodecError::Truncated {
                offset: bytes.len() - 8,
                needed: 8,
                available: 5
            }
        );
    }

    #[test]
    fn channel_announcement_rejects_unordered_ids() {
        let ann = ChannelAnnouncement {
            node_signature_1: [1; 64],
            node_signature_2: [2; 64],
            bitcoin_signature_1: [3; 64],
            bitcoin_signature_2: [4; 64],
            features: vec![],
            chain_hash: [0; 32],
            short_channel_id: ShortChannelId::new(1, 2, 3).unwrap(),
            node_id_1: NodeId::synthetic(9),
            node_id_2: NodeId::synthetic(3),
            bitcoin_key_1: [2; 33],
            bitcoin_key_2: [3; 33],
            extra: vec![],
        };
        let bytes = encode_message(&GossipMessage::ChannelAnnouncement(ann)).unwrap();
        assert_eq!(
            decode_message(&bytes),
            Err(CodecError::NodeOrder {
                offset: 2 + 4 * 64 + 2 + 32 + 8
            })
        );
    }

    #[test]
    fn scid_display_and_parse() {
        let scid = ShortChannelId::new(565_000, 2_000, 7).unwrap();
        assert_eq!(scid.to_string(), "565000x2000x7");
        assert_eq!(ShortChannelId::parse("565000x2000x7"), Some(scid));
        assert_eq!(ShortChannelId::from_u64(scid.to_u64()), scid);
        assert!(ShortChannelId::new(1 << 24, 0, 0).is_none());
        assert!(ShortChannelId::parse("1x2").is_none());
    }

    #[test]
    fn alias_lossy_trims_padding_and_tolerates_bad_utf8() {
        let mut alias = [0u8; 32];
        alias[..5].copy_from_slice(b"ACINQ");
        assert_eq!(alias_lossy(&alias), "ACINQ");
        alias[5] = 0xe2;
        assert_eq!(alias_lossy(&alias), "ACINQ\u{fffd}");
    }

    #[test]
    fn node_id_prefix_checked() {
        let mut raw = [0u8; 33];
        assert!(NodeId::from_bytes(raw).is_err());
        raw[0] = 0x03;
        assert!(NodeId::from_bytes(raw).is_ok());
        let id = NodeId::synthetic(42);
        assert_eq!(NodeId::from_hex(&id.to_hex()).unwrap(), id);
        assert!(NodeId::synthetic(1) < NodeId::synthetic(2));
    }
}
