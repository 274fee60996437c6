//! Tabulation of cubic function fields over F_q(t) with imaginary or unusual
//! Hessian, via reduced binary cubic forms over F_q[t].

pub mod cli;
pub mod cubform;
pub mod error;
pub mod field;
pub mod oracle;
pub mod poly;
pub mod quadform;
pub mod sieve;
pub mod tabulate;

pub use cubform::BinaryCubicForm;
pub use error::{Error, Result};
pub use field::{FieldElement, PrimeField};
pub use poly::{PolyRing, Polynomial};
pub use quadform::{BinaryQuadraticForm, DiscriminantClass, TransformMatrix};
pub use sieve::in_u;
pub use tabulate::{
    tabulate, tabulate_basic, Parity, ParityChoice, TabulateError, TabulationRecord, TabulationRequest,
    TabulationSummary,
};
