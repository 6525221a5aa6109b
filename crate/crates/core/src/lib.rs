//! Numerical certification of spectral stability for Schrödinger operators
//! `-Δ + V` with complex potentials.
//!
//! The crate is `no_std` (with `alloc`). Enable the `parallel` feature to
//! spread per-sector and per-point work over a rayon pool.

#![no_std]
// `num_traits::Float` supplies float methods without std; with std linked the
// inherent methods win and the import looks unused.
#![allow(unused_imports)]
// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod bs;
pub mod conditions;
pub mod error;
pub mod multiplier;
pub mod numerics;
pub mod potential;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Map `f` over `0..n`, in parallel when the `parallel` feature is on.
pub(crate) fn par_map<T, F>(n: usize, f: F) -> alloc::vec::Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}
