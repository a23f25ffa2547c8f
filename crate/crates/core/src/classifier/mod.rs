//! Structure theorems for small sumsets as decision procedures.

mod beyond;
mod extend;
mod freiman;
mod holes;
mod kst;
mod verify;

pub use beyond::{beyond_classify, BeyondCertificate, BeyondOutcome, BeyondType, BeyondWitness, Side, StructuredMatch};
pub use extend::{dual_pairs, half_dual, is_extendible, DualPairs, Extendibility};
pub use freiman::is_freiman_isomorphism;
pub use holes::{hole_placement, HoleCase, HolePlacement};
pub use kst::{kst_classify, kst_periodic_reduce, KstCertificate, KstType, KstWitness, PeriodicReduction};
pub use verify::{verify_beyond_certificate, verify_kst_certificate, Verification};

pub(crate) use beyond::find_extension;
pub(crate) use extend::{extension, is_non_extendible_pair};
#[cfg(test)]
use kst::{classify_with, search_order};

#[cfg(test)]
mod tests;
