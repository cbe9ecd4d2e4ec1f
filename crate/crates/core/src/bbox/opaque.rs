use super::{BlackBoxGroup, ElementString, GlobalExponent, SharedBox};
use sha2::{Digest, Sha256};
use std::sync::atomic::{AtomicU64, Ordering};

const ROUNDS: u8 = 6;
const NONCE_BYTES: usize = 8;

/// Wraps a box so that its strings become keyed pseudorandom encodings.
///
/// A string is a Feistel encryption of `inner string || nonce`. Every new
/// string gets a fresh nonce, so one element has many encodings and callers
/// cannot read the inner representation. Nonces come from a counter rather
/// than the caller's random stream, so wrapping a box does not change any
/// random choices made by an algorithm running on it.
pub struct OpaqueBox {
    inner: SharedBox,
    key: [u8; 32],
    counter: AtomicU64,
    generators: Vec<ElementString>,
}

impl OpaqueBox {
    pub fn new(inner: SharedBox, key: u64) -> Self {
        let key: [u8; 32] = Sha256::new()
            .chain_update(b"opaque-box-key")
            .chain_update(key.to_le_bytes())
            .finalize()
            .into();
        let mut bx = OpaqueBox {
            inner,
            key,
            counter: AtomicU64::new(0),
            generators: Vec::new(),
        };
        bx.generators = bx.inner.generators().iter().map(|g| bx.conceal(g)).collect();
        bx
    }

    /// Round function: SHA-256 in counter mode, keyed, truncated to `len`.
    fn round_mask(&self, round: u8, input: &[u8], len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        let mut block = 0u32;
        while out.len() < len {
            let digest = Sha256::new()
                .chain_update(self.key)
                .chain_update([round])
                .chain_update(block.to_le_bytes())
                .chain_update(input)
                .finalize();
            out.extend_from_slice(&digest);
            block += 1;
        }
        out.truncate(len);
        out
    }

    fn feistel(&self, data: &mut [u8], decrypt: bool) {
        let half = data.len() / 2;
        let rounds: Vec<u8> = if decrypt { (0..ROUNDS).rev().collect() } else { (0..ROUNDS).collect() };
        for r in rounds {
            let (left, right) = data.split_at_mut(half);
            if r % 2 == 0 {
                let mask = self.round_mask(r, right, left.len());
                left.iter_mut().zip(mask).for_each(|(a, m)| *a ^= m);
            } else {
                let mask = self.round_mask(r, left, right.len());
                right.iter_mut().zip(mask).for_each(|(a, m)| *a ^= m);
            }
        }
    }

    /// Encrypts an inner string under a fresh nonce.
    pub fn conceal(&self, plain: &ElementString) -> ElementString {
        let nonce = self.counter.fetch_add(1, Ordering::Relaxed);
        let mut data = Vec::with_capacity(plain.as_bytes().len() + NONCE_BYTES);
        data.extend_from_slice(plain.as_bytes());
        data.extend_from_slice(&nonce.to_le_bytes());
        self.feistel(&mut data, false);
        ElementString::new(data)
    }

    /// Decrypts to the inner string. Harness use only.
    pub fn reveal(&self, s: &ElementString) -> ElementString {
        let mut data = s.as_bytes().to_vec();
        self.feistel(&mut data, true);
        data.truncate(data.len() - NONCE_BYTES);
        ElementString::new(data)
    }
}

impl BlackBoxGroup for OpaqueBox {
    fn byte_len(&self) -> usize {
        self.inner.byte_len() + NONCE_BYTES
    }

    fn exponent(&self) -> &GlobalExponent {
        self.inner.exponent()
    }

    fn generators(&self) -> &[ElementString] {
        &self.generators
    }

    fn mul(&self, a: &ElementString, b: &ElementString) -> ElementString {
        self.conceal(&self.inner.mul(&self.reveal(a), &self.reveal(b)))
    }

    fn inv(&self, a: &ElementString) -> ElementString {
        self.conceal(&self.inner.inv(&self.reveal(a)))
    }

    fn eq(&self, a: &ElementString, b: &ElementString) -> bool {
        self.inner.eq(&self.reveal(a), &self.reveal(b))
    }

    fn identity(&self) -> ElementString {
        self.conceal(&self.inner.identity())
    }
}
