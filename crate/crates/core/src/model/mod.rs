//! Domain data and its translation into the LP/SOS model.

mod build;
mod instance;
mod lp;
pub mod toy;

pub use build::{build_model, column_name, BuildError};
pub use instance::{decompose_by_business, validate_instance, BidLevel, Business, Campaign, Instance, Violation};
pub use lp::{Column, LpModel, ModelError, ObjectiveSense, Row, RowSense, SosSet, SosType};
