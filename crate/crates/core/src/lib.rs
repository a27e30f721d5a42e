//! QoS-aware uplink power allocation for NOMA-based video streaming.
//!
//! The library models an uplink cell in which IoT devices stream scalable
//! (layered) video to a common base station over non-orthogonal multiple
//! access. Received quality is a staircase function of per-device rate, and
//! the allocation problem — maximize average video quality subject to power
//! caps, energy-efficiency floors, and base-layer rate guarantees — is solved
//! globally by polyblock outer approximation over the SINR space. Throughput-
//! maximizing NOMA and time-division OMA allocators are included as
//! comparison schemes, along with brute-force reference solvers and a
//! reproducible simulation harness.

pub mod channel;
pub mod error;
pub mod experiments;
pub mod io;
pub mod noma;
pub mod oracle;
pub mod qos;
pub mod schemes;
pub mod solver;

pub use error::Error;
