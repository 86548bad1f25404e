//! Informative path planning and mapping with multiple UAVs in a wind field.
//!
//! The pipeline has four stages:
//!
//! 1. [`placement`]: choose task locations that maximize the mutual
//!    information between the task variables and a grid of test points.
//! 2. [`planner`]: compute wind-aware minimum-energy paths and the asymmetric
//!    cost matrix between depots and tasks with a multi-query FMT*.
//! 3. [`routing`]: split the tasks among the UAVs minimizing the longest
//!    tour (min-max multi-depot multiple TSP).
//! 4. [`mission`]: fly the tours with Dubins kinematics, take noisy
//!    measurements and build a Gaussian-process belief map.
//!
//! [`scenario`] holds the region, wind field and RF ground truth, and
//! [`gp`] the Gaussian-process machinery shared by stages 1 and 4.

pub mod cli;
pub mod config;
pub mod error;
pub mod geometry;
pub mod gp;
pub mod io;
pub mod mission;
pub mod optim;
pub mod pipeline;
pub mod placement;
pub mod planner;
pub mod routing;
pub mod scenario;

pub use error::{Error, Result};
pub use geometry::Point;
