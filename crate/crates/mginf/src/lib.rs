//! Analysis toolkit for the infinite-server queue with Poisson arrivals.
//!
//! The queue's state is the number of customers in service. A Markov
//! renewal process approximates the state-sojourn means, sojourn
//! distributions, state-0 recurrence time, busy-period mean and per-cycle
//! visit counts; closed-form bounds and relative-error criteria qualify the
//! approximation, known exact values anchor it, and a regenerative
//! discrete-event simulator supplies ground truth for everything else.
//!
//! The analytic modules are generic over the scalar type through
//! [`real::Real`]; the simulator and the CLI tables run on `f64`.

pub mod bounds;
pub mod dist;
pub mod exact;
pub mod quad;
pub mod real;
pub mod renewal;
pub mod sim;
pub mod table;

pub use bounds::{BoundSource, BoundValue, Direction, ErrorReport};
pub use dist::{ClassTags, DistError, Moments, ServiceDistribution};
pub use exact::ExactAnchors;
pub use real::Real;
pub use renewal::{CycleMetrics, QueueConfig, RenewalError, SojournMethod, SojournRow};
pub use sim::{Estimate, SimConfig, SimError, SimReport};
pub use table::{AnalysisTable, ComparisonTable};

/// Concrete `f64` aliases; the default precision everywhere.
pub type ServiceDistribution64 = dist::ServiceDistribution<f64>;
pub type QueueConfig64 = renewal::QueueConfig<f64>;
pub type Moments64 = dist::Moments<f64>;
pub type BoundValue64 = bounds::BoundValue<f64>;
pub type ErrorReport64 = bounds::ErrorReport<f64>;
pub type ExactAnchors64 = exact::ExactAnchors<f64>;

/// Concrete `f32` aliases, mainly for precision experiments.
pub type ServiceDistribution32 = dist::ServiceDistribution<f32>;
pub type QueueConfig32 = renewal::QueueConfig<f32>;
pub type Moments32 = dist::Moments<f32>;
