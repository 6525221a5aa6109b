//! Grids, quadrature, dense complex linear algebra and scalar root finding.

pub mod eig;
pub mod extrapolate;
pub mod grid;
pub mod lu;
pub mod matrix;
pub mod quadrature;
pub mod roots;
pub mod special;
pub mod svd;
pub mod tridiag;

pub use eig::{eig_complex, EigPair};
pub use grid::{BoxGrid, Grading, RadialGrid};
pub use matrix::DenseComplexMatrix;
pub use quadrature::gauss_legendre;
pub use roots::find_root_increasing;
pub use svd::{largest_singular_value, smallest_singular_value, SigmaMin};
