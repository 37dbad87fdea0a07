//! Archive ingestion: framed gossip files in, a deduplicated and totally
//! ordered feed out.
//!
//! The binary `GSR1` framing is:
//!
//! ```text
//! "GSR1" || { arrival_ts:u64 BE || msg_len:u32 BE || message(msg_len) }*
//! ```
//!
//! A line-oriented debug form is also accepted, one JSON object per line:
//! `{"arrival_ts": 1554112800, "hex": "0102..."}`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{decode_message, CodecError, GossipMessage, ShortChannelId};

pub const MAGIC: &[u8; 4] = b"GSR1";
const FRAME_HEADER_LEN: usize = 12;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("bad magic: expected \"GSR1\"")]
    BadMagic,
    #[error("corrupt frame at byte offset {offset}: {reason}")]
    CorruptFrame { offset: u64, reason: String },
    #[error("malformed line {line}: {reason}")]
    BadLine { line: usize, reason: String },
    #[error("record {index} failed to decode: {source}")]
    DecodeFailure {
        index: usize,
        #[source]
        source: CodecError,
    },
    #[error("unknown archive format {0:?}")]
    UnknownFormat(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, StoreError>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StoreRecord {
    /// When the collector first saw the message, Unix seconds.
    pub arrival_ts: u64,
    pub payload: Vec<u8>,
}

/// Streaming reader over `GSR1` frames.
pub struct StoreReader<R> {
    inner: R,
    offset: u64,
    done: bool,
}

impl<R: Read> StoreReader<R> {
    /// Consumes and checks the magic.
    pub fn new(mut inner: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        read_full(&mut inner, &mut magic).and_then(|n| {
            if n == 4 && &magic == MAGIC {
                Ok(())
            } else {
                Err(StoreError::BadMagic)
            }
        })?;
        Ok(StoreReader {
            inner,
            offset: 4,
            done: false,
        })
    }

    fn next_record(&mut self) -> Result<Option<StoreRecord>> {
        let frame_offset = self.offset;
        let mut header = [0u8; FRAME_HEADER_LEN];
        let got = read_full(&mut self.inner, &mut header)?;
        if got == 0 {
            return Ok(None);
        }
        if got < FRAME_HEADER_LEN {
            return Err(StoreError::CorruptFrame {
                offset: frame_offset,
                reason: format!("frame header cut short after {got} of {FRAME_HEADER_LEN} bytes"),
            });
        }
        let arrival_ts = u64::from_be_bytes(header[..8].try_into().unwrap());
        let len = u32::from_be_bytes(header[8..].try_into().unwrap()) as usize;
        let mut payload = Vec::new();
        let got = (&mut self.inner)
            .take(len as u64)
            .read_to_end(&mut payload)?;
        if got < len {
            return Err(StoreError::CorruptFrame {
                offset: frame_offset,
                reason: format!("length field {len} exceeds the {got} remaining bytes"),
            });
        }
        self.offset += (FRAME_HEADER_LEN + len) as u64;
        Ok(Some(StoreRecord {
            arrival_ts,
            payload,
        }))
    }
}

impl<R: Read> Iterator for StoreReader<R> {
    type Item = Result<StoreRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.next_record() {
            Ok(Some(rec)) => Some(Ok(rec)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Like `read_exact`, but reports how many bytes arrived before EOF.
fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Ok(filled)
}

pub fn read_store(path: &Path) -> Result<StoreReader<BufReader<File>>> {
    StoreReader::new(BufReader::new(File::open(path)?))
}

pub fn write_store<W: Write>(mut out: W, records: &[StoreRecord]) -> io::Result<()> {
    out.write_all(MAGIC)?;
    for rec in records {
        let len = u32::try_from(rec.payload.len()).map_err(|_| {
            io::Error::new(io::ErrorKind::InvalidInput, "payload exceeds u32 length")
        })?;
        out.write_all(&rec.arrival_ts.to_be_bytes())?;
        out.write_all(&len.to_be_bytes())?;
        out.write_all(&rec.payload)?;
    }
    out.flush()
}

#[derive(Serialize, Deserialize)]
struct JsonLine {
    arrival_ts: u64,
    hex: String,
}

pub fn read_jsonl<R: BufRead>(input: R) -> impl Iterator<Item = Result<StoreRecord>> {
    input.lines().enumerate().filter_map(|(i, line)| {
        let line = match line {
            Ok(l) => l,
            Err(e) => return Some(Err(e.into())),
        };
        if line.trim().is_empty() {
            return None;
        }
        let bad = |reason: String| StoreError::BadLine {
            line: i + 1,
            reason,
        };
        Some(
            serde_json::from_str::<JsonLine>(&line)
                .map_err(|e| bad(e.to_string()))
                .and_then(|j| {
                    let payload = hex::decode(j.hex.trim()).map_err(|e| bad(e.to_string()))?;
                    Ok(StoreRecord {
                        arrival_ts: j.arrival_ts,
                        payload,
                    })
                }),
        )
    })
}

pub fn write_jsonl<W: Write>(mut out: W, records: &[StoreRecord]) -> io::Result<()> {
    for rec in records {
        let line = serde_json::to_string(&JsonLine {
            arrival_ts: rec.arrival_ts,
            hex: hex::encode(&rec.payload),
        })?;
        writeln!(out, "{line}")?;
    }
    out.flush()
}

pub type RecordStream = Box<dyn Iterator<Item = Result<StoreRecord>>>;

/// An on-disk archive layout that can be turned into a record stream.
pub trait ArchiveFormat: Send + Sync {
    fn name(&self) -> &'static str;
    fn open(&self, path: &Path) -> Result<RecordStream>;
    fn write(&self, out: &mut dyn Write, records: &[StoreRecord]) -> io::Result<()>;
}

pub struct Gsr1Format;

impl ArchiveFormat for Gsr1Format {
    fn name(&self) -> &'static str {
        "gsr1"
    }

    fn open(&self, path: &Path) -> Result<RecordStream> {
        Ok(Box::new(read_store(path)?))
    }

    fn write(&self, out: &mut dyn Write, records: &[StoreRecord]) -> io::Result<()> {
        write_store(out, records)
    }
}

pub struct JsonLinesFormat;

impl ArchiveFormat for JsonLinesFormat {
    fn name(&self) -> &'static str {
        "jsonl"
    }

    fn open(&self, path: &Path) -> Result<RecordStream> {
        let file = BufReader::new(File::open(path)?);
        Ok(Box::new(read_jsonl(file)))
    }

    fn write(&self, out: &mut dyn Write, records: &[StoreRecord]) -> io::Result<()> {
        write_jsonl(out, records)
    }
}

/// Archive formats keyed by name.
#[derive(Clone)]
pub struct FormatRegistry {
    formats: BTreeMap<&'static str, Arc<dyn ArchiveFormat>>,
}

impl FormatRegistry {
    pub fn empty() -> Self {
        FormatRegistry {
            formats: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, format: Arc<dyn ArchiveFormat>) {
        self.formats.insert(format.name(), format);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn ArchiveFormat>> {
        self.formats
            .get(name)
            .cloned()
            .ok_or_else(|| StoreError::UnknownFormat(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.formats.keys().copied()
    }
}

impl Default for FormatRegistry {
    fn default() -> Self {
        let mut reg = Self::empty();
        reg.register(Arc::new(Gsr1Format));
        reg.register(Arc::new(JsonLinesFormat));
        reg
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeedEntry {
    pub effective_ts: u64,
    pub raw: Vec<u8>,
    pub message: GossipMessage,
}

/// Gossip sorted by `(effective_ts, raw bytes)` with duplicates removed.
/// Every distinct-timestamp version of an update is kept; supersession is
/// the replay engine's job.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrderedFeed {
    entries: Vec<FeedEntry>,
}

impl OrderedFeed {
    pub fn entries(&self) -> &[FeedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries with `effective_ts <= until`.
    pub fn prefix(&self, until: u64) -> &[FeedEntry] {
        let end = self.entries.partition_point(|e| e.effective_ts <= until);
        &self.entries[..end]
    }

    /// Re-frames the feed with `arrival_ts = effective_ts`; feeding the
    /// result back through ingestion yields the same feed.
    pub fn to_records(&self) -> Vec<StoreRecord> {
        self.entries
            .iter()
            .map(|e| StoreRecord {
                arrival_ts: e.effective_ts,
                payload: e.raw.clone(),
            })
            .collect()
    }

    /// Builds a feed from entries the caller has already ordered. Used by
    /// tests that need a hand-built feed; `deduplicate_and_order` is the
    /// normal constructor.
    pub fn from_sorted(entries: Vec<FeedEntry>) -> Self {
        debug_assert!(entries
            .windows(2)
            .all(|w| (w[0].effective_ts, &w[0].raw) <= (w[1].effective_ts, &w[1].raw)));
        OrderedFeed { entries }
    }
}

pub fn deduplicate_and_order<I>(records: I) -> Result<OrderedFeed>
where
    I: IntoIterator<Item = Result<StoreRecord>>,
{
    // Byte-identical payloads collapse to the earliest arrival.
    let mut by_bytes: HashMap<Vec<u8>, u64> = HashMap::new();
    for (index, rec) in records.into_iter().enumerate() {
        let rec = rec?;
        decode_message(&rec.payload)
            .map_err(|source| StoreError::DecodeFailure { index, source })?;
        by_bytes
            .entry(rec.payload)
            .and_modify(|ts| *ts = (*ts).min(rec.arrival_ts))
            .or_insert(rec.arrival_ts);
    }

    let mut entries: Vec<FeedEntry> = by_bytes
        .into_iter()
        .map(|(raw, arrival)| {
            let message = decode_message(&raw).expect("validated above");
            let effective_ts = message.embedded_timestamp().map_or(arrival, u64::from);
            FeedEntry {
                effective_ts,
                raw,
                message,
            }
        })
        .collect();
    entries.sort_unstable_by(|a, b| (a.effective_ts, &a.raw).cmp(&(b.effective_ts, &b.raw)));

    // One channel_update per (scid, direction, timestamp): keep the smallest
    // encoding, which sorts first.
    let mut seen: HashSet<(ShortChannelId, u8, u32)> = HashSet::new();
    entries.retain(|e| match &e.message {
        GossipMessage::ChannelUpdate(u) => {
            seen.insert((u.short_channel_id, u.direction(), u.timestamp))
        }
        _ => true,
    });

    Ok(OrderedFeed { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::{encode_message, ChannelUpdate, NodeAnnouncement, NodeId};
    use std::io::Cursor;

    fn update(ts: u32, fee: u32) -> Vec<u8> {
        encode_message(&GossipMessage::ChannelUpdate(ChannelUpdate {
            signature: [1; 64],
            chain_hash: [0; 32],
            short_channel_id: ShortChannelId::new(10, 1, 0).unwrap(),
            timestamp: ts,
            message_flags: 0,
            channel_flags: 0,
            cltv_expiry_delta: 40,
            htlc_minimum_msat: 1,
            fee_base_msat: fee,
            fee_proportional_millionths: 1,
            htlc_maximum_msat: None,
            extra: vec![],
        }))
        .unwrap()
    }

    fn node_ann() -> Vec<u8> {
        encode_message(&GossipMessage::NodeAnnouncement(NodeAnnouncement {
            signature: [9; 64],
            features: vec![],
            timestamp: 500,
            node_id: NodeId::synthetic(1),
            rgb_color: [1, 2, 3],
            alias: [0; 32],
            addresses: vec![],
            extra: vec![],
        }))
        .unwrap()
    }

    fn rec(arrival_ts: u64, payload: Vec<u8>) -> StoreRecord {
        StoreRecord {
            arrival_ts,
            payload,
        }
    }

    #[test]
    fn magic_only_is_empty() {
        let reader = StoreReader::new(Cursor::new(MAGIC.to_vec())).unwrap();
        assert_eq!(reader.count(), 0);
    }

    #[test]
    fn bad_magic() {
        assert!(matches!(
            StoreReader::new(Cursor::new(b"GSR2".to_vec())),
            Err(StoreError::BadMagic)
        ));
        assert!(matches!(
            StoreReader::new(Cursor::new(b"GS".to_vec())),
            Err(StoreError::BadMagic)
        ));
    }

    #[test]
    fn single_frame_round_trip() {
        let mut buf = Vec::new();
        let records = vec![rec(1234, node_ann())];
        write_store(&mut buf, &records).unwrap();
        let back: Vec<_> = StoreReader::new(Cursor::new(buf))
            .unwrap()
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn overlong_length_is_corrupt_frame_at_its_offset() {
        let mut buf = Vec::new();
        write_store(&mut buf, &[rec(1, node_ann())]).unwrap();
        let second = buf.len() as u64;
        buf.extend_from_slice(&2u64.to_be_bytes());
        buf.extend_from_slice(&1000u32.to_be_bytes());
        buf.extend_from_slice(&[0u8; 10]);
        let out: Vec<_> = StoreReader::new(Cursor::new(buf)).unwrap().collect();
        assert_eq!(out.len(), 2);
        assert!(out[0].is_ok());
        match &out[1] {
            Err(StoreError::CorruptFrame { offset, .. }) => assert_eq!(*offset, second),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn short_header_is_corrupt() {
        let mut buf = MAGIC.to_vec();
        buf.extend_from_slice(&[0u8; 5]);
        let out: Vec<_> = StoreReader::new(Cursor::new(buf)).unwrap().collect();
        assert!(matches!(
            out[..],
            [Err(StoreError::CorruptFrame { offset: 4, .. })]
        ));
    }

    #[test]
    fn jsonl_parses_and_reports_line() {
        let text = format!(
            "{{\"arrival_ts\": 5, \"hex\": \"{}\"}}\n\n{{\"arrival_ts\": 6}}\n",
            hex::encode(node_ann())
        );
        let out: Vec<_> = read_jsonl(Cursor::new(text)).collect();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].as_ref().unwrap().arrival_ts, 5);
        assert!(matches!(out[1], Err(StoreError::BadLine { line: 3, .. })));
    }

    #[test]
    fn identical_updates_collapse() {
        let feed =
            deduplicate_and_order(vec![Ok(rec(1, update(100, 5))), Ok(rec(9, update(100, 5)))])
                .unwrap();
        assert_eq!(feed.len(), 1);
        assert_eq!(feed.entries()[0].effective_ts, 100);
    }

    #[test]
    fn versions_are_kept_and_ordered() {
        let feed =
            deduplicate_and_order(vec![Ok(rec(1, update(100, 5))), Ok(rec(2, update(50, 7)))])
                .unwrap();
        let ts: Vec<_> = feed.entries().iter().map(|e| e.effective_ts).collect();
        assert_eq!(ts, vec![50, 100]);
    }

    #[test]
    fn same_timestamp_conflict_keeps_one() {
        let feed =
            deduplicate_and_order(vec![Ok(rec(1, update(100, 9))), Ok(rec(2, update(100, 3)))])
                .unwrap();
        assert_eq!(feed.len(), 1);
        let GossipMessage::ChannelUpdate(u) = &feed.entries()[0].message else {
            unreachable!()
        };
        assert_eq!(u.fee_base_msat, 3);
    }

    #[test]
    fn decode_failure_names_record_index() {
        let err = deduplicate_and_order(vec![Ok(rec(1, node_ann())), Ok(rec(2, vec![0, 1, 2]))])
            .unwrap_err();
        assert!(matches!(err, StoreError::DecodeFailure { index: 1, .. }));
    }

    #[test]
    fn registry_lookup() {
        let reg = FormatRegistry::default();
        assert_eq!(reg.names().collect::<Vec<_>>(), vec!["gsr1", "jsonl"]);
        assert!(matches!(reg.get("pcap"), Err(StoreError::UnknownFormat(_))));
    }
}
