//! Isotropy of bilinear forms over F2 and the uniform-quotient problem for
//! imaginary quadratic fields.

pub mod arith;
pub mod classgroup;
pub mod density;
pub mod forms;
pub mod gf2;
pub mod quadfield;
pub mod survey;

pub use forms::{BilinearForm, NuBounds};
pub use gf2::{BitMatrix, BitVec};
pub use quadfield::{build_field, FieldRecord};
