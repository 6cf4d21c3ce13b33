//! Noun sense disambiguation by Conceptual Density.
//!
//! A window of nouns is mapped onto a lexical taxonomy (a DAG of synsets
//! linked by hypernymy). Every concept that dominates at least two of the
//! window's candidate senses is scored by how densely those senses pack its
//! subhierarchy; the densest concept fixes the senses beneath it, and the
//! process repeats until nothing dense enough remains.
//!
//! Modules:
//! - [`taxonomy`]: loading, validation and per-concept statistics.
//! - [`density`]: the Conceptual Density formula and the branching-factor solver.
//! - [`wsd`]: the lattice and the sliding-window disambiguation loop.
//! - [`corpus`]: gold-tagged and plain lemma input formats.
//! - [`eval`]: precision/coverage/recall scoring, baselines and window sweeps.
//! - [`cli`]: the batch command-line front end.

pub mod cli;
pub mod corpus;
pub mod density;
pub mod eval;
pub mod taxonomy;
pub mod wsd;

pub use corpus::{parse_plain, parse_semcor, Document, GoldToken, SenseKey};
pub use density::{conceptual_density, conceptual_density_base, solve_nhyp, DensityParams};
pub use eval::{Population, ScoreReport};
pub use taxonomy::{load_taxonomy, Concept, ConceptStats, SynsetId, Taxonomy};
pub use wsd::{disambiguate_document, disambiguate_window, DisambiguationOutcome, Status, WindowConfig};
