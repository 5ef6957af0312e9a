//! SHA3-512 against the NIST CAVP response files and the Keccak team's
//! short-message KAT.

use cmguard_core::keccak::{sha3_512, Digest512, Sha3_512};

struct Vector {
    len_bits: usize,
    msg: Vec<u8>,
    md: Digest512,
}

fn field<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    let (k, v) = line.split_once('=')?;
    (k.trim() == key).then(|| v.trim())
}

/// `Len`/`Msg`/`MD` triples. `Len = 0` carries a placeholder `Msg = 00`.
fn parse_vectors(text: &str) -> Vec<Vector> {
    let mut out = Vec::new();
    let mut len = None;
    let mut msg = None;
    for line in text.lines() {
        if let Some(v) = field(line, "Len") {
            len = Some(v.parse::<usize>().unwrap());
        } else if let Some(v) = field(line, "Msg") {
            msg = Some(hex::decode(v).unwrap());
        } else if let Some(v) = field(line, "MD") {
            let len_bits = len.take().expect("MD without Len");
            let mut m = msg.take().expect("MD without Msg");
            m.truncate(len_bits / 8);
            out.push(Vector { len_bits, msg: m, md: Digest512::from_hex(v).unwrap() });
        }
    }
    out
}

fn check(file: &str, text: &str, expected_count: usize) {
    let vectors = parse_vectors(text);
    assert_eq!(vectors.len(), expected_count, "{file}: vector count");
    for v in &vectors {
        assert_eq!(v.len_bits % 8, 0, "{file}: bit-oriented vector");
        assert_eq!(sha3_512(&v.msg), v.md, "{file}: Len = {}", v.len_bits);
    }
}

#[test]
fn nist_short_messages() {
    check("ShortMsg", include_str!("data/SHA3_512ShortMsg.rsp"), 73);
}

#[test]
fn nist_long_messages() {
    check("LongMsg", include_str!("data/SHA3_512LongMsg.rsp"), 100);
}

#[test]
fn keccak_team_short_messages() {
    check("ShortMsgKAT", include_str!("data/ShortMsgKAT_SHA3-512.txt"), 256);
}

/// Each checkpoint is 1000 chained hashes of the previous one.
#[test]
fn nist_monte_carlo() {
    let text = include_str!("data/SHA3_512Monte.rsp");
    let seed = text.lines().find_map(|l| field(l, "Seed")).unwrap();
    let mut md = hex::decode(seed).unwrap();
    let checkpoints: Vec<Digest512> =
        text.lines().filter_map(|l| field(l, "MD")).map(|v| Digest512::from_hex(v).unwrap()).collect();
    assert_eq!(checkpoints.len(), 100);
    for (count, expected) in checkpoints.iter().enumerate() {
        for _ in 0..1000 {
            md = sha3_512(&md).0.to_vec();
        }
        assert_eq!(&md[..], &expected.0[..], "COUNT = {count}");
    }
}

#[test]
fn incremental_matches_one_shot_on_long_messages() {
    for v in parse_vectors(include_str!("data/SHA3_512LongMsg.rsp")).iter().step_by(7) {
        for chunk in [1, 71, 72, 73, 500] {
            let mut h = Sha3_512::new();
            for c in v.msg.chunks(chunk) {
                h.update(c);
            }
            assert_eq!(h.finalize(), v.md, "Len = {} chunk {chunk}", v.len_bits);
        }
    }
}
