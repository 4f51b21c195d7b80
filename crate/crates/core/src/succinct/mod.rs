//! Succinct-structure building blocks: bitvectors with rank/select, a wavelet
//! tree, range-minimum queries and invertible permutations.

pub mod bitvector;
pub mod permutation;
pub mod rmq;
pub mod wavelet;

pub use bitvector::{BitBuilder, DenseBitvector, SparseBitvector};
pub use permutation::Permutation;
pub use rmq::RmqStructure;
pub use wavelet::WaveletTree;

pub(crate) use wavelet::levels_for;
