//! Keccak-f[1600] and the SHA3-512 sponge used as the per-task signature.
//!
//! Lanes are addressed as `lanes[x + 5 * y]` and serialized little-endian,
//! lane 0 first, matching FIPS 202. A 200-byte string therefore maps one to
//! one onto a state.

use core::fmt;

use crate::error::{Error, Result};

/// Number of 64-bit lanes in the state.
pub const LANES: usize = 25;
/// Permutation rounds for Keccak-f[1600].
pub const ROUNDS: usize = 24;
/// Width of the permutation in bits.
pub const STATE_BITS: usize = 1600;
/// Width of the permutation in bytes.
pub const STATE_BYTES: usize = STATE_BITS / 8;

const ROUND_CONSTANTS: [u64; ROUNDS] = [
    0x0000_0000_0000_0001,
    0x0000_0000_0000_8082,
    0x8000_0000_0000_808A,
    0x8000_0000_8000_8000,
    0x0000_0000_0000_808B,
    0x0000_0000_8000_0001,
    0x8000_0000_8000_8081,
    0x8000_0000_0000_8009,
    0x0000_0000_0000_008A,
    0x0000_0000_0000_0088,
    0x0000_0000_8000_8009,
    0x0000_0000_8000_000A,
    0x0000_0000_8000_808B,
    0x8000_0000_0000_008B,
    0x8000_0000_0000_8089,
    0x8000_0000_0000_8003,
    0x8000_0000_0000_8002,
    0x8000_0000_0000_0080,
    0x0000_0000_0000_800A,
    0x8000_0000_8000_000A,
    0x8000_0000_8000_8081,
    0x8000_0000_0000_8080,
    0x0000_0000_8000_0001,
    0x8000_0000_8000_8008,
];

// Rotation offsets indexed by x + 5 * y.
const RHO_OFFSETS: [u32; LANES] = [
    0, 1, 62, 28, 27, //
    36, 44, 6, 55, 20, //
    3, 10, 43, 25, 39, //
    41, 45, 15, 21, 8, //
    18, 2, 61, 56, 14,
];

/// The 1600-bit Keccak state as a 5x5 matrix of 64-bit lanes.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct KeccakState {
    lanes: [u64; LANES],
}

impl KeccakState {
    pub const fn zero() -> Self {
        Self { lanes: [0; LANES] }
    }

    pub const fn from_lanes(lanes: [u64; LANES]) -> Self {
        Self { lanes }
    }

    pub const fn lanes(&self) -> &[u64; LANES] {
        &self.lanes
    }

    /// Lane at column `x`, row `y` (both taken mod 5).
    pub fn lane(&self, x: usize, y: usize) -> u64 {
        self.lanes[(x % 5) + 5 * (y % 5)]
    }

    pub fn set_lane(&mut self, x: usize, y: usize, value: u64) {
        self.lanes[(x % 5) + 5 * (y % 5)] = value;
    }

    pub fn from_bytes(bytes: &[u8; STATE_BYTES]) -> Self {
        let mut lanes = [0u64; LANES];
        for (lane, chunk) in lanes.iter_mut().zip(bytes.chunks_exact(8)) {
            let mut word = [0u8; 8];
            word.copy_from_slice(chunk);
            *lane = u64::from_le_bytes(word);
        }
        Self { lanes }
    }

    pub fn to_bytes(&self) -> [u8; STATE_BYTES] {
        let mut out = [0u8; STATE_BYTES];
        for (chunk, lane) in out.chunks_exact_mut(8).zip(self.lanes.iter()) {
            chunk.copy_from_slice(&lane.to_le_bytes());
        }
        out
    }

    /// XORs `bytes` into the leading bytes of the state.
    ///
    /// Only the first `bytes.len()` bytes are touched, so absorbing a block
    /// of `rate` bytes can never reach the capacity part.
    pub fn xor_bytes(&mut self, bytes: &[u8]) {
        assert!(bytes.len() <= STATE_BYTES);
        for (i, b) in bytes.iter().enumerate() {
            self.lanes[i / 8] ^= u64::from(*b) << (8 * (i % 8));
        }
    }

    pub fn theta(&mut self) {
        let a = &mut self.lanes;
        let mut c = [0u64; 5];
        for x in 0..5 {
            c[x] = a[x] ^ a[x + 5] ^ a[x + 10] ^ a[x + 15] ^ a[x + 20];
        }
        for x in 0..5 {
            let d = c[(x + 4) % 5] ^ c[(x + 1) % 5].rotate_left(1);
            for y in 0..5 {
                a[x + 5 * y] ^= d;
            }
        }
    }

    pub fn rho(&mut self) {
        for (lane, off) in self.lanes.iter_mut().zip(RHO_OFFSETS.iter()) {
            *lane = lane.rotate_left(*off);
        }
    }

    /// B[y, 2x + 3y] = A[x, y]
    pub fn pi(&mut self) {
        let a = self.lanes;
        for x in 0..5 {
            for y in 0..5 {
                self.lanes[y + 5 * ((2 * x + 3 * y) % 5)] = a[x + 5 * y];
            }
        }
    }

    pub fn chi(&mut self) {
        for y in 0..5 {
            let row = [
                self.lanes[5 * y],
                self.lanes[1 + 5 * y],
                self.lanes[2 + 5 * y],
                self.lanes[3 + 5 * y],
                self.lanes[4 + 5 * y],
            ];
            for x in 0..5 {
                self.lanes[x + 5 * y] = row[x] ^ (!row[(x + 1) % 5] & row[(x + 2) % 5]);
            }
        }
    }

    pub fn iota(&mut self, round_index: usize) {
        self.lanes[0] ^= ROUND_CONSTANTS[round_index];
    }

    /// One full round: theta, rho, pi, chi, iota.
    ///
    /// Panics if `round_index >= 24`.
    pub fn round(&mut self, round_index: usize) {
        assert!(round_index < ROUNDS, "round index {round_index} out of range");
        self.theta();
        self.rho();
        self.pi();
        self.chi();
        self.iota(round_index);
    }

    /// Keccak-f[1600]: all 24 rounds.
    pub fn permute(&mut self) {
        for r in 0..ROUNDS {
            self.round(r);
        }
    }
}

impl fmt::Debug for KeccakState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        struct Lane(u64);
        impl fmt::Debug for Lane {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "{:016X}", self.0)
            }
        }
        f.debug_list().entries(self.lanes.iter().map(|&l| Lane(l))).finish()
    }
}

/// Applies round `round_index` to a copy of `state`.
pub fn keccak_round(state: KeccakState, round_index: usize) -> KeccakState {
    let mut s = state;
    s.round(round_index);
    s
}

/// Applies Keccak-f[1600] to a copy of `state`.
pub fn keccak_f(state: KeccakState) -> KeccakState {
    let mut s = state;
    s.permute();
    s
}

/// Sponge rate/capacity split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpongeParams {
    pub rate_bits: usize,
    pub capacity_bits: usize,
    pub rounds: usize,
}

impl SpongeParams {
    pub const SHA3_512: SpongeParams = SpongeParams {
        rate_bits: 576,
        capacity_bits: 1024,
        rounds: ROUNDS,
    };

    pub const fn rate_bytes(&self) -> usize {
        self.rate_bits / 8
    }
}

const SHA3_512_RATE: usize = SpongeParams::SHA3_512.rate_bytes();

/// A 512-bit digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Digest512(pub [u8; 64]);

impl Digest512 {
    pub const BYTES: usize = 64;
    pub const HEX_LEN: usize = 128;

    pub fn as_bytes(&self) -> &[u8; 64] {
        &self.0
    }

    /// Parses 128 hex characters (either case).
    pub fn from_hex(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() != Self::HEX_LEN {
            return Err(Error::Parse("digest must be 128 hex characters"));
        }
        let mut out = [0u8; 64];
        hex::decode_to_slice(s, &mut out).map_err(|_| Error::Parse("invalid hex digit in digest"))?;
        Ok(Self(out))
    }
}

impl fmt::LowerHex for Digest512 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.0.iter() {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl fmt::Display for Digest512 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::LowerHex::fmt(self, f)
    }
}

impl fmt::Debug for Digest512 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest512({self:x})")
    }
}

/// Incremental SHA3-512.
#[derive(Clone)]
pub struct Sha3_512 {
    state: KeccakState,
    buf: [u8; SHA3_512_RATE],
    buf_len: usize,
}

impl Default for Sha3_512 {
    fn default() -> Self {
        Self::new()
    }
}

impl Sha3_512 {
    pub fn new() -> Self {
        Self {
            state: KeccakState::zero(),
            buf: [0; SHA3_512_RATE],
            buf_len: 0,
        }
    }

    pub fn update(&mut self, mut data: &[u8]) {
        if self.buf_len > 0 {
            let take = (SHA3_512_RATE - self.buf_len).min(data.len());
            self.buf[self.buf_len..self.buf_len + take].copy_from_slice(&data[..take]);
            self.buf_len += take;
            data = &data[take..];
            if self.buf_len < SHA3_512_RATE {
                return;
            }
            self.state.xor_bytes(&self.buf);
            self.state.permute();
            self.buf_len = 0;
        }
        let mut blocks = data.chunks_exact(SHA3_512_RATE);
        for block in &mut blocks {
            self.state.xor_bytes(block);
            self.state.permute();
        }
        let rest = blocks.remainder();
        self.buf[..rest.len()].copy_from_slice(rest);
        self.buf_len = rest.len();
    }

    pub fn finalize(mut self) -> Digest512 {
        // SHA-3 domain suffix 01 followed by pad10*1.
        self.buf[self.buf_len..].fill(0);
        self.buf[self.buf_len] ^= 0x06;
        self.buf[SHA3_512_RATE - 1] ^= 0x80;
        self.state.xor_bytes(&self.buf);
        self.state.permute();
        let bytes = self.state.to_bytes();
        let mut out = [0u8; 64];
        out.copy_from_slice(&bytes[..64]);
        Digest512(out)
    }
}

pub fn sha3_512(message: &[u8]) -> Digest512 {
    let mut h = Sha3_512::new();
    h.update(message);
    h.finalize()
}

/// Hash-engine throughput in bits per second:
/// `block_bits * f_max / clock_cycles * n_msg`.
pub fn detection_throughput(
    block_bits: u64,
    f_max_hz: f64,
    clock_cycles: u64,
    n_msg: u64,
) -> Result<f64> {
    if clock_cycles == 0 {
        return Err(Error::InvalidArgument("clock cycle count must be positive"));
    }
    if block_bits == 0 || n_msg == 0 || !(f_max_hz > 0.0) || !f_max_hz.is_finite() {
        return Err(Error::InvalidArgument(
            "block size, f_max and message count must be positive",
        ));
    }
    Ok(block_bits as f64 * f_max_hz / clock_cycles as f64 * n_msg as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    // Published Keccak-f[1600] output for the all-zero input state.
    const ZERO_STATE_PERMUTED: [u64; LANES] = [
        0xF1258F7940E1DDE7,
        0x84D5CCF933C0478A,
        0xD598261EA65AA9EE,
        0xBD1547306F80494D,
        0x8B284E056253D057,
        0xFF97A42D7F8E6FD4,
        0x90FEE5A0A44647C4,
        0x8C5BDA0CD6192E76,
        0xAD30A6F71B19059C,
        0x30935AB7D08FFC64,
        0xEB5AA93F2317D635,
        0xA9A6E6260D712103,
        0x81A57C16DBCF555F,
        0x43B831CD0347C826,
        0x01F22F1A11A5569F,
        0x05E5635A21D9AE61,
        0x64BEFEF28CC970F2,
        0x613670957BC46611,
        0xB87C5A554FD00ECB,
        0x8C3EE88A1CCF32C8,
        0x940C7922AE3A2614,
        0x1841F924A2C509E4,
        0x16F53526E70465C2,
        0x75F644E97F30A13B,
        0xEAF1FF7B5CECA249,
    ];

    fn hex(d: &Digest512) -> alloc::string::String {
        alloc::format!("{d:x}")
    }

    #[test]
    fn zero_state_known_answer() {
        let out = keccak_f(KeccakState::zero());
        assert_eq!(out.lanes(), &ZERO_STATE_PERMUTED);
    }

    #[test]
    fn rounds_compose_into_permutation() {
        let mut s = KeccakState::zero();
        for r in 0..ROUNDS {
            s = keccak_round(s, r);
        }
        assert_eq!(s, keccak_f(KeccakState::zero()));
    }

    #[test]
    fn theta_fixes_even_parity_columns() {
        let mut s = KeccakState::zero();
        // two equal lanes in every column -> every column parity is zero
        for x in 0..5 {
            let v = 0x0123_4567_89AB_CDEFu64.rotate_left(x as u32 * 7);
            s.set_lane(x, 1, v);
            s.set_lane(x, 3, v);
        }
        let before = s;
        s.theta();
        assert_eq!(s, before);
    }

    #[test]
    fn iota_round_zero_on_zero_state() {
        let mut s = KeccakState::zero();
        s.iota(0);
        assert_eq!(s.lane(0, 0), 1);
        assert!(s.lanes()[1..].iter().all(|&l| l == 0));
    }

    #[test]
    #[should_panic]
    fn round_index_out_of_range() {
        keccak_round(KeccakState::zero(), 24);
    }

    #[test]
    fn byte_serialization_round_trips() {
        let mut bytes = [0u8; STATE_BYTES];
        for (i, b) in bytes.iter_mut().enumerate() {
            *b = (i * 37 + 11) as u8;
        }
        let s = KeccakState::from_bytes(&bytes);
        assert_eq!(s.to_bytes(), bytes);
        assert_eq!(s.lane(0, 0) & 0xFF, 11);
    }

    #[test]
    fn empty_and_abc() {
        assert_eq!(
            hex(&sha3_512(b"")),
            "a69f73cca23a9ac5c8b567dc185a756e97c982164fe25859e0d1dcc1475c80a6\
             15b2123af1f5f94c11e3e9402c3ac558f500199d95b6d3e301758586281dcd26"
        );
        assert_eq!(
            hex(&sha3_512(b"abc")),
            "b751850b1a57168a5693cd924b6b096e08f621827444f70d884f5d0240d2712e\
             10e116e9192af3c91a7ec57647e3934057340b4cf408d5a56592f8274eec53f0"
        );
    }

    #[test]
    fn incremental_matches_one_shot() {
        let msg: alloc::vec::Vec<u8> = (0..1000u32).map(|i| (i * 7) as u8).collect();
        let whole = sha3_512(&msg);
        for split in [0, 1, 71, 72, 73, 144, 500, 999, 1000] {
            let mut h = Sha3_512::new();
            h.update(&msg[..split]);
            h.update(&msg[split..]);
            assert_eq!(h.finalize(), whole, "split at {split}");
        }
    }

    #[test]
    fn single_bit_flip_changes_digest() {
        let mut msg = [0x5Au8; 100];
        let a = sha3_512(&msg);
        msg[40] ^= 0x10;
        assert_ne!(a, sha3_512(&msg));
    }

    #[test]
    fn digest_hex_round_trip() {
        let d = sha3_512(b"frame");
        let s = hex(&d);
        assert_eq!(s.len(), 128);
        assert_eq!(Digest512::from_hex(&s).unwrap(), d);
        assert_eq!(Digest512::from_hex(&s.to_uppercase()).unwrap(), d);
        assert!(Digest512::from_hex(&s[..126]).is_err());
    }

    #[test]
    fn sha3_512_params() {
        let p = SpongeParams::SHA3_512;
        assert_eq!(p.rate_bits + p.capacity_bits, STATE_BITS);
        assert_eq!((p.rate_bits, p.capacity_bits, p.rounds), (576, 1024, 24));
    }

    #[test]
    fn throughput_formula() {
        let two = detection_throughput(576, 344e6, 24, 2).unwrap();
        let gbps = two / 1e9;
        assert!((gbps - 16.51).abs() / 16.51 < 1e-3, "{gbps}");
        let one = detection_throughput(576, 344e6, 24, 1).unwrap();
        assert_eq!(one * 2.0, two);
        assert_eq!(detection_throughput(576, 1.0, 576, 1).unwrap(), 1.0);
        assert_eq!(
            detection_throughput(576, 1.0, 0, 1),
            Err(Error::InvalidArgument("clock cycle count must be positive"))
        );
    }
}
