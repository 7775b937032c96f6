//! Canonical fixed-width state encodings. Each leaf's local state index is
//! bit-packed at a per-leaf width fixed by the model, in leaf order;
//! product states append the claim index. Canonical bytes make hashing,
//! ownership partitioning and cross-run digests trivial.

use std::hash::{Hash, Hasher};

use crate::hierarchy::{GlobalState, HierarchyTree};
use crate::ltl::ProductState;

#[derive(Clone, Debug)]
pub struct StateCodec {
    /// Bit width per leaf, in leaf order.
    widths: Vec<u8>,
    /// Starting bit of each leaf's field.
    offsets: Vec<u32>,
    bytes: usize,
}

impl StateCodec {
    pub fn for_tree(tree: &HierarchyTree) -> Self {
        let widths: Vec<u8> = tree
            .leaves
            .iter()
            .map(|p| {
                let max = (p.state_count() - 1) as u16;
                (16 - max.leading_zeros()) as u8
            })
            .collect();
        let mut offsets = Vec::with_capacity(widths.len());
        let mut bit = 0u32;
        for &w in &widths {
            offsets.push(bit);
            bit += w as u32;
        }
        StateCodec { widths, offsets, bytes: (bit as usize).div_ceil(8) }
    }

    pub fn encoded_len(&self) -> usize {
        self.bytes
    }

    pub fn encode_into(&self, state: &GlobalState, out: &mut Vec<u8>) {
        let start = out.len();
        out.resize(start + self.bytes, 0);
        let buf = &mut out[start..];
        let mut bit = 0usize;
        for (i, &w) in self.widths.iter().enumerate() {
            let mut v = state.locals()[i] as u32;
            for _ in 0..w {
                if v & 1 != 0 {
                    buf[bit / 8] |= 1 << (bit % 8);
                }
                v >>= 1;
                bit += 1;
            }
        }
    }

    pub fn encode(&self, state: &GlobalState) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.bytes);
        self.encode_into(state, &mut out);
        out
    }

    pub fn decode(&self, bytes: &[u8]) -> GlobalState {
        debug_assert_eq!(bytes.len(), self.bytes);
        let mut locals = Vec::with_capacity(self.widths.len());
        let mut bit = 0usize;
        for &w in &self.widths {
            let mut v = 0u16;
            for k in 0..w {
                if bytes[bit / 8] & (1 << (bit % 8)) != 0 {
                    v |= 1 << k;
                }
                bit += 1;
            }
            locals.push(v);
        }
        GlobalState::new(locals)
    }

    /// Appends a copy of `src` with up to two leaves moved, rewriting the
    /// affected bit fields in place of a decode/encode round trip.
    #[allow(clippy::explicit_counter_loop)]
    pub fn patch_into(&self, src: &[u8], changes: &[(u32, u16)], out: &mut Vec<u8>) {
        debug_assert_eq!(src.len(), self.bytes);
        let start = out.len();
        out.extend_from_slice(src);
        let buf = &mut out[start..];
        for &(leaf, value) in changes {
            let mut bit = self.offsets[leaf as usize] as usize;
            let mut v = value as u32;
            for _ in 0..self.widths[leaf as usize] {
                let mask = 1u8 << (bit % 8);
                if v & 1 != 0 {
                    buf[bit / 8] |= mask;
                } else {
                    buf[bit / 8] &= !mask;
                }
                v >>= 1;
                bit += 1;
            }
            debug_assert_eq!(v, 0, "value exceeds the leaf's bit width");
        }
    }
}

/// Model-state codec extended with a trailing 32-bit claim index.
#[derive(Clone, Debug)]
pub struct ProductCodec {
    pub model: StateCodec,
}

impl ProductCodec {
    pub fn new(model: StateCodec) -> Self {
        ProductCodec { model }
    }

    pub fn encoded_len(&self) -> usize {
        self.model.encoded_len() + 4
    }

    pub fn encode_into(&self, state: &ProductState, out: &mut Vec<u8>) {
        self.model.encode_into(&state.model, out);
        out.extend_from_slice(&state.claim.to_le_bytes());
    }

    pub fn encode(&self, state: &ProductState) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.encoded_len());
        self.encode_into(state, &mut out);
        out
    }

    pub fn decode(&self, bytes: &[u8]) -> ProductState {
        let split = self.model.encoded_len();
        let model = self.model.decode(&bytes[..split]);
        let claim = u32::from_le_bytes(bytes[split..].try_into().unwrap());
        ProductState { model, claim }
    }
}

/// Deterministic 64-bit hash of canonical state bytes; the basis of both
/// ownership partitioning and the order-independent state-set digest.
pub fn hash_bytes(bytes: &[u8], seed: u64) -> u64 {
    let mut h = std::collections::hash_map::DefaultHasher::new();
    seed.hash(&mut h);
    bytes.hash(&mut h);
    h.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{elaborate, parse_model};
    use crate::testgen::{random_model, RandomModelCfg, DEMO_MODEL};

    #[test]
    fn round_trips_demo_states() {
        let tree = elaborate(&parse_model(DEMO_MODEL).unwrap());
        let codec = StateCodec::for_tree(&tree);
        // A has 3 states (2 bits), B has 1 state (0 bits): one byte total.
        assert_eq!(codec.encoded_len(), 1);
        for a in 0..3u16 {
            let s = GlobalState::new(vec![a, 0]);
            assert_eq!(codec.decode(&codec.encode(&s)), s);
        }
    }

    #[test]
    fn round_trips_random_models() {
        for seed in 0..20 {
            let tree = elaborate(
                &parse_model(&random_model(seed, &RandomModelCfg::default())).unwrap(),
            );
            let codec = StateCodec::for_tree(&tree);
            let init = crate::hierarchy::initial_state(&tree);
            assert_eq!(codec.decode(&codec.encode(&init)), init);
        }
    }

    #[test]
    fn product_codec_appends_claim() {
        let tree = elaborate(&parse_model(DEMO_MODEL).unwrap());
        let codec = ProductCodec::new(StateCodec::for_tree(&tree));
        let p = ProductState { model: GlobalState::new(vec![2, 0]), claim: 7 };
        assert_eq!(codec.decode(&codec.encode(&p)), p);
    }
}
