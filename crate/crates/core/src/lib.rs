//! Probabilistic building thermal-load analysis under input uncertainty.
//!
//! The pipeline: load a building project description plus material and climate
//! tables ([`model`]), draw a Latin-Hypercube sample matrix over the declared
//! uncertain inputs ([`sampling`]), push every sample row through an embedded
//! monthly quasi-steady-state load engine ([`engine`], driven by
//! [`orchestrator`]), then summarize the output distributions ([`stats`]) and
//! rank the design options under deterministic, expected-value, maximax and
//! maximin criteria ([`decision`]). [`report`] renders the SVG figures.

pub mod decision;
pub mod engine;
pub mod model;
pub mod orchestrator;
pub mod report;
pub mod sampling;
pub mod stats;
pub mod textfmt;

pub use decision::{CriterionRanking, RankCriterion, RiskReport};
pub use engine::{LoadBreakdown, ThermalModel};
pub use model::{
    BuildingGeometry, ClimateTable, DesignOption, EnvelopeAreas, GlazingSpec, HvacSettings,
    MaterialRecord, ProjectConfig, SystemLoads,
};
pub use orchestrator::{CampaignConfig, CampaignResult, OutputDistribution};
pub use sampling::{Distribution, SampleMatrix, UncertainInput};
pub use stats::{HistogramSpec, NormalityResult, SummaryStats};
