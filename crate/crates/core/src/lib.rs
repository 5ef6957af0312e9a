//! Soft-error mitigation for SRAM FPGA configuration memory.
//!
//! Tasks occupy rows of configuration frames. Each task is signed with
//! SHA3-512 ([`keccak`]); a horizontal parity frame per task and a vertical
//! parity frame per frame index form a two-dimensional erasure product code
//! ([`memory`], [`correct`]). Faulty tasks found by read-back ([`detect`]) are
//! repaired one at a time through a single download port, ordered by a
//! slack/criticality priority ([`sched`]). [`sim`] drives whole fault-injection
//! campaigns and the blind-scrubbing baseline.
//!
//! The crate is `no_std` and only needs `alloc`.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod correct;
pub mod detect;
pub mod error;
pub mod fault;
pub mod frame;
pub mod keccak;
pub mod memory;
pub mod sched;
pub mod sim;
pub mod timing;

pub use error::{Error, Result};
pub use frame::{Frame, FrameGeometry};
pub use keccak::{sha3_512, Digest512};
pub use memory::{ConfigMemory, GoldenStore, TaskSpec};
