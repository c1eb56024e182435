//! Half-integral weight Eisenstein series on `Γ₀(4)`: evaluation of the three
//! series attached to the cusps `∞`, `0` and `½`, trigonometric approximants
//! along the lines `Re z = ±½`, and certified location of their zeroes.
//!
//! ```
//! use eisenzero::{series, ComplexPoint, TruncationPolicy, Weight};
//!
//! let k = Weight::new(15).unwrap();
//! let z = ComplexPoint::new(0.0, 10.0).unwrap();
//! let e = series::eval_e_inf(z, k, &TruncationPolicy::default()).unwrap();
//! assert!((e.value - 1.0).norm() < 1e-6);
//! ```

pub mod approx;
pub mod arithmetic;
pub mod domains;
pub mod series;
pub mod zerofinder;

pub use num_complex::Complex64;
pub use series::{ComplexPoint, EvalResult, Series, TruncationPolicy, Weight};
pub use zerofinder::{compile_report, AxisGrid, ZeroReport};
