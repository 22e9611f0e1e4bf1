//! Constructions that refine an embedding: pillar points, edge and vertex
//! functions, and the faithfulness and smoothing pipelines.

mod image;
pub mod functions;
pub mod pillars;
pub mod pipeline;
pub mod tate;

pub use pillars::{select_pillars, select_pillars_with, PillarChoice, PillarConfig, PillarLedger, PillarOptions, PillarTarget};
pub use tate::{tate_demo, tate_skeleton, TateDemo};
pub use functions::{default_delta, edge_function_finite, edge_function_infinite, tent_support, trapezoids, vertex_function, Construction};
pub use pipeline::{core_of, fully_faithful_pipeline, smoothing_pipeline, PipelineOptions, PipelineReport, PipelineStep};
