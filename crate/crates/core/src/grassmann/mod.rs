//! Exact arithmetic in the complex Grassmann algebra on `ζ₁…ζ_k, ζ̄₁…ζ̄_k`:
//! products, the star operator, Berezin extraction of the top coefficient,
//! left odd derivations and the degree filtration.

mod blade;
mod coeff;
mod element;
mod kernel;
mod text;

pub use blade::{blade_product, Blade, Sign, MAX_PAIRS};
pub use coeff::{complex, format_coeff, i_power_reduced, imag_unit, parse_decimal, rational, real, to_f64_pair, Coeff, Rational};
pub use element::{star, GrassmannElement, Parity};
pub use kernel::{joint_derivation_kernel, joint_derivation_kernel_bounded, rational_kernel, DEFAULT_BASIS_BOUND};
pub use text::{parse_element, Naming};
