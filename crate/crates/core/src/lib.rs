//! Access-point placement and beam steering for mmWave coverage of seated venues.
//!
//! Users sit at fixed grid positions but turn their heads and bodies at random,
//! so every link is up only for part of the orientation circle. A plan picks
//! ceiling sites, one steered beam per site and the seats each beam serves, so
//! that enough of the expected audience is connected with high probability.
//!
//! ```
//! use mmwave_planner::{generate_venue, greedy_place, ChannelParams, GeneratorOverrides,
//!                      Instance, Parallelism, VenueKind};
//!
//! let venue = generate_venue(VenueKind::Toy, &GeneratorOverrides::default());
//! let params = ChannelParams { capacity_per_beam: 3, ..ChannelParams::default() };
//! let inst = Instance::with_beta(&venue, &params, 0.7).unwrap();
//! let (plan, _trace) = greedy_place(&inst, 0.5, Parallelism::Serial).unwrap();
//! assert!(plan.normalized_coverage >= 0.5);
//! ```

pub mod angles;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod instance;
pub mod io;
pub mod montecarlo;
pub mod orientation;
pub mod render;
pub mod scenarios;
pub mod solver;
pub mod venue;

/// Version stamped into every file this crate writes.
pub const FORMAT_VERSION: u32 = 1;

pub(crate) fn default_format_version() -> u32 {
    FORMAT_VERSION
}

pub use angles::{AngularInterval, ArcSet};
pub use channel::{link_profile, ChannelParams, LinkClass, LinkProfile, Steering};
pub use error::{Error, Result};
pub use geometry::{BodyPrism, Point3};
pub use instance::{resolve_betas, Instance};
pub use montecarlo::{monte_carlo_connectivity, monte_carlo_coverage, McConfig};
pub use orientation::OrientationDistribution;
pub use render::render_svg;
pub use scenarios::{LinkMask, ScenarioPartition};
pub use solver::{
    approximation_bound, audit_greedy_prices, evaluate_coverage, exact_place, greedy_place,
    location_difference, uniform_place, Deployment, ExactLimits, GreedyTrace, Parallelism,
};
pub use venue::{generate_venue, GeneratorOverrides, Venue, VenueKind};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    struct Introduction;
    #[doc = include_str!("../../../book/src/venues.md")]
    struct Venues;
    #[doc = include_str!("../../../book/src/links.md")]
    struct Links;
    #[doc = include_str!("../../../book/src/scenarios.md")]
    struct Scenarios;
    #[doc = include_str!("../../../book/src/placement.md")]
    struct Placement;
    #[doc = include_str!("../../../book/src/guarantee.md")]
    struct Guarantee;
    #[doc = include_str!("../../../book/src/validation.md")]
    struct Validation;
    #[doc = include_str!("../../../book/src/cli.md")]
    struct Cli;
}
