//! Relay power allocation for MIMO decode-and-forward two-way relaying.
//!
//! Two source nodes exchange messages through a multi-antenna relay in two
//! time slots: a multiple-access (MA) phase in which both sources transmit to
//! the relay, and a broadcast (BC) phase in which the relay re-encodes both
//! messages with superposition coding. Given the sources' transmit
//! covariances, the relay picks one water level per BC direction so that the
//! two-way sum-rate is maximal while its transmit power is minimal.
//!
//! The crate is layered bottom-up:
//!
//! * [`waterfill`] - scalar water-filling kernels (power to level, rate to level).
//! * [`channel`] - seeded channel draws and SVD of the relay-to-node channels.
//! * [`ma_phase`] - MA-phase log-det rates and the sum-rate maximizing source strategy.
//! * [`relay_opt`] - relative water levels, power thresholds and the seven-step relay algorithm.
//! * [`oracle`] - brute-force grid search over level pairs, used to certify [`relay_opt`].
//! * [`trial`] - glue that turns `(config, trial index)` into a ready-to-solve instance.
//!
//! All rates are in nats.

pub mod channel;
pub mod error;
pub mod linalg;
pub mod ma_phase;
pub mod oracle;
pub mod relay_opt;
pub mod trial;
pub mod waterfill;

pub use channel::{ChannelSet, DirectionGains, SubchannelGains, SystemConfig};
pub use error::{Error, Result};
pub use ma_phase::{MaRates, SourceStrategy};
pub use oracle::{Baseline, OracleResult};
pub use relay_opt::{RelativeLevels, RelaySolution, StepPath, ThresholdLedger};
pub use waterfill::LevelAllocation;

pub use nalgebra::Complex;
use nalgebra::DMatrix;

/// Dense complex matrix used for channels and covariances.
pub type CMatrix = DMatrix<Complex<f64>>;

/// One of the two source nodes.
///
/// BC directions are named after their destination: direction `Node::One`
/// carries node 2's message from the relay to node 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Node {
    One,
    Two,
}

impl Node {
    pub const BOTH: [Node; 2] = [Node::One, Node::Two];

    pub fn index(self) -> usize {
        match self {
            Node::One => 0,
            Node::Two => 1,
        }
    }

    pub fn other(self) -> Node {
        match self {
            Node::One => Node::Two,
            Node::Two => Node::One,
        }
    }

    pub fn from_index(i: usize) -> Node {
        match i {
            0 => Node::One,
            1 => Node::Two,
            _ => panic!("node index out of range: {i}"),
        }
    }
}
