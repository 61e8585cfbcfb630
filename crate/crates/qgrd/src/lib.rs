pub mod cqms;
pub mod error;
pub mod format;
pub mod fun_alg;
pub mod grp_alg;
pub mod instance;
pub mod label;
pub mod length;
pub mod linalg;
pub mod random;
pub mod rd;
mod serial;
pub mod spectral;

pub use error::{Error, Result};
pub use instance::{InstanceDescriptor, IrrepInfo, QuantumGroupInstance};
pub use label::Label;
