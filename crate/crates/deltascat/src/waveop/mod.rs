//! Low-energy wave-operator pieces on annular-Fourier-support test functions.

pub mod cutoff;
pub mod decay;
pub mod field;
pub mod kop;
pub mod lowenergy;
pub mod multiplier;
pub mod probe;
pub mod testfn;

pub use cutoff::CutoffPair;
pub use field::{LpNorm, PolarGrid, SampledField};
pub use testfn::TestFunction;
