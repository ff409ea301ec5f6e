//! Multiplicative free convolution powers of probability measures on the
//! positive half-line and on the unit circle.

// `!(x > y)` is used on purpose so that NaN takes the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod boundary_r;
pub mod boundary_t;
pub mod cli;
pub mod error;
pub mod freepower;
pub mod herglotz;
pub mod measures;
pub mod oracle;
pub mod quadrature;
pub mod roots;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Fixed 17-significant-digit float formatting used in CSV output.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}
