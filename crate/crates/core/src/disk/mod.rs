//! The disk algebra `A(D)`: functions continuous on the closed unit disk and
//! holomorphic inside.
//!
//! Elements are quotients of polynomials whose denominators are certified
//! free of zeros on the closed disk. Each element also remembers how it was
//! built, and enclosures over small disks are evaluated through that history.
//! Invertibility of a single element is decided by the argument principle on
//! the boundary circle; tuples get a certified minimum of their Euclidean
//! magnitude over the disk.

mod certify;
mod element;
mod enclosure;
mod peak;
mod poly;
mod reduce;

pub use certify::{
    angle_of, boundary_min, denominator_bound, disk_check_invertible, disk_min, disk_sup_norm, sup_norm_bounds,
    winding_number, DiskBudget, InvertibilityCheck, MinBound, SupBound, Verdict, Winding,
};
pub use element::{DiskElement, DiskExpr, DiskTuple};
pub use enclosure::{poly_ball, Ball};
pub use peak::{mobius, mobius_param, peak_exponent, peak_function, peak_off_region_bound, MobiusParams};
pub use poly::Poly;
pub use reduce::{
    boundary_argmin, disk_norm_one_reduce, disk_small_norm_witness, verify_disk_witness, DiskOptions,
    DiskReductionWitness, DiskWitnessParams,
};
