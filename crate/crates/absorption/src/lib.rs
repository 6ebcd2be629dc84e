//! Codes for the q-ary absorption channel, where adjacent symbols may merge into their
//! saturating sum. Includes error-ball enumeration, single- and multi-absorption codes
//! with decoders, marker-based constrained encoding, size bounds, and the link between
//! contraction and deletion channels.

pub mod binary_vt;
pub mod bounds;
pub mod channel;
pub mod equivalence;
pub mod error;
pub mod improved;
pub mod marker;
pub mod multi;
pub mod qary;
pub mod stats;
pub mod verify;
pub mod word;

pub use error::{Error, Result};
pub use word::{AbsorptionPattern, Event, Symbol, Word};
