//! Constructive packers.

mod akpq;
mod balance;
mod complete;
mod supply;

pub use akpq::{pack_akpq_heuristic, AkpqConfig, AkpqRun};
pub use balance::{
    balance_full, balance_gcd1, phi_centre, BalanceRun, Gcd1Run, PhiShift, SearchShift, ShiftSource,
    UnbalancedShift,
};
pub use complete::{
    pack_balanced, pack_lopsided, pack_nearly_balanced, smallest_unbalanced_s, BalancedObstruction,
    BalancedOutcome, CompletePattern, LopsidedRun, NearlyBalancedRun, PackerConfig,
};
pub use supply::{place_gadget, place_realisation, transfer_gadget, CopySupplier, FreshVertices};
