//! Scalar abstraction for value-typed data.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive};

/// Numeric type carried by estimate tables, criteria weights, edge costs and
/// forecast arithmetic. Implemented for `f32` and `f64` out of the box.
pub trait Scalar: Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static {}

impl<T> Scalar for T where T: Float + FromPrimitive + Sum + Debug + Display + Send + Sync + 'static {}
