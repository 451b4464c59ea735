//! Convergence-rate certificates for incremental gradient methods written as
//! Markov jump linear systems with a sector-bounded nonlinearity.

pub mod certificates;
pub mod error;
pub mod function_classes;
pub mod jump_models;
pub mod linalg;
pub mod lmi;
pub mod scalar;
pub mod search;
pub mod simulation;

pub use certificates::{RateCertificate, Statement};
pub use error::{Error, Result};
pub use function_classes::{AssumptionProfile, IndividualAssumption};
pub use jump_models::{FiniteSum, JumpRealization, Method};
pub use linalg::{Mat, SparseMat, SymMatrix};
pub use lmi::{LmiBundle, MultiplierPair, Rate, StructuredP};
pub use scalar::Scalar;
pub use simulation::QuadraticFiniteSum;

pub type SymMatrixF64 = SymMatrix<f64>;
pub type RateF64 = Rate<f64>;
pub type LmiBundleF64 = LmiBundle<f64>;
pub type StructuredPF64 = StructuredP<f64>;
pub type JumpRealizationF64 = JumpRealization<f64>;
pub type RateCertificateF64 = certificates::RateCertificate<f64>;
