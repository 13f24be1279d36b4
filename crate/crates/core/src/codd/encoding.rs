//! Bit-exact serialization of expressions.
//!
//! Layout: 16-bit big-endian node count, then each node in canonical order
//! as a 3-bit tag followed by its payload:
//!
//! | tag | node   | payload                                        |
//! |-----|--------|------------------------------------------------|
//! | 000 | Leaf   | 16-bit length, then the bits                   |
//! | 001 | Decide | 16-bit bit index, 16-bit zero, 16-bit one      |
//! | 010 | K      |                                                |
//! | 011 | S      |                                                |
//! | 100 | Sp     |                                                |
//! | 101 | Encode |                                                |
//! | 110 | Decode |                                                |
//! | 111 | Apply  | 16-bit function, 16-bit argument               |
//!
//! References point at earlier nodes; the last node is the root. The
//! stream is zero-padded to a byte boundary.

use super::{CoddExpr, DagBuilder, Node, NodeId};
use crate::bits::BitString;
use crate::error::{Error, Result};

/// The canonical bit string of an expression, padding included.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EncodedCodd(pub BitString);

impl EncodedCodd {
    pub fn bits(&self) -> &BitString {
        &self.0
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.to_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        EncodedCodd(BitString::from_bytes(bytes))
    }
}

const TAG_LEAF: u16 = 0b000;
const TAG_DECIDE: u16 = 0b001;
const TAG_K: u16 = 0b010;
const TAG_S: u16 = 0b011;
const TAG_SP: u16 = 0b100;
const TAG_ENCODE: u16 = 0b101;
const TAG_DECODE: u16 = 0b110;
const TAG_APPLY: u16 = 0b111;

struct Writer(Vec<bool>);

impl Writer {
    fn put(&mut self, value: u16, width: u32) {
        for i in (0..width).rev() {
            self.0.push(value >> i & 1 == 1);
        }
    }
}

fn u16_field(value: usize, what: &'static str) -> Result<u16> {
    u16::try_from(value).map_err(|_| Error::Capacity { what, max: 16, got: usize::BITS - value.leading_zeros() })
}

/// Fails only when a count, length or index does not fit in 16 bits.
pub fn encode(e: &CoddExpr) -> Result<EncodedCodd> {
    let mut w = Writer(Vec::new());
    w.put(u16_field(e.len(), "encoded node count")?, 16);
    for node in e.nodes() {
        match node {
            Node::Leaf(bits) => {
                w.put(TAG_LEAF, 3);
                w.put(u16_field(bits.len(), "encoded leaf length")?, 16);
                w.0.extend(bits.iter());
            }
            Node::Decide { bit, zero, one } => {
                w.put(TAG_DECIDE, 3);
                w.put(*bit, 16);
                w.put(*zero as u16, 16);
                w.put(*one as u16, 16);
            }
            Node::K => w.put(TAG_K, 3),
            Node::S => w.put(TAG_S, 3),
            Node::Sp => w.put(TAG_SP, 3),
            Node::Encode => w.put(TAG_ENCODE, 3),
            Node::Decode => w.put(TAG_DECODE, 3),
            Node::Apply { func, arg } => {
                w.put(TAG_APPLY, 3);
                w.put(*func as u16, 16);
                w.put(*arg as u16, 16);
            }
        }
    }
    while !w.0.len().is_multiple_of(8) {
        w.0.push(false);
    }
    Ok(EncodedCodd(BitString::from_bits(w.0)))
}

struct Reader<'a> {
    bits: &'a [bool],
    pos: usize,
}

impl Reader<'_> {
    fn take(&mut self, width: usize, what: &str) -> Result<u16> {
        if self.bits.len() - self.pos < width {
            return Err(Error::decode(self.pos, format!("truncated {what}")));
        }
        let v = self.bits[self.pos..self.pos + width].iter().fold(0u16, |acc, &b| (acc << 1) | b as u16);
        self.pos += width;
        Ok(v)
    }

    /// A reference from node `index` to an earlier node.
    fn reference(&mut self, index: usize, what: &str) -> Result<NodeId> {
        let at = self.pos;
        let target = self.take(16, what)? as usize;
        if target >= index {
            return Err(Error::decode(
                at,
                format!("node {index} has {what} reference to node {target}, which is not an earlier node"),
            ));
        }
        Ok(target as NodeId)
    }
}

/// Inverse of [`encode`]. Errors carry the bit offset of the problem.
pub fn decode(bits: &BitString) -> Result<CoddExpr> {
    let mut r = Reader { bits: bits.as_slice(), pos: 0 };
    let count = r.take(16, "header")? as usize;
    if count == 0 {
        return Err(Error::decode(0, "header declares zero nodes"));
    }
    let mut b = DagBuilder::new();
    let mut ids: Vec<NodeId> = Vec::with_capacity(count);
    for index in 0..count {
        let node = match r.take(3, "tag")? {
            TAG_LEAF => {
                let len = r.take(16, "leaf length")? as usize;
                if r.bits.len() - r.pos < len {
                    return Err(Error::decode(r.pos, "truncated leaf bits"));
                }
                let leaf = BitString::from_bits(r.bits[r.pos..r.pos + len].to_vec());
                r.pos += len;
                Node::Leaf(leaf)
            }
            TAG_DECIDE => {
                let bit = r.take(16, "bit index")?;
                let zero = r.reference(index, "zero-child")?;
                let one = r.reference(index, "one-child")?;
                Node::Decide { bit, zero: ids[zero as usize], one: ids[one as usize] }
            }
            TAG_K => Node::K,
            TAG_S => Node::S,
            TAG_SP => Node::Sp,
            TAG_ENCODE => Node::Encode,
            TAG_DECODE => Node::Decode,
            TAG_APPLY => {
                let func = r.reference(index, "function")?;
                let arg = r.reference(index, "argument")?;
                Node::Apply { func: ids[func as usize], arg: ids[arg as usize] }
            }
            _ => unreachable!("3-bit tag"),
        };
        ids.push(b.node(node));
    }
    let end = r.pos.div_ceil(8) * 8;
    if bits.len() > end {
        return Err(Error::decode(end, format!("{} trailing bits after the root", bits.len() - end)));
    }
    if bits.len() < end {
        return Err(Error::decode(bits.len(), "stream does not end on a byte boundary"));
    }
    if let Some(i) = (r.pos..end).find(|&i| bits.get(i)) {
        return Err(Error::decode(i, "nonzero padding"));
    }
    Ok(b.finish(*ids.last().expect("count > 0")))
}
