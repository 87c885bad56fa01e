//! Free-group parameter bookkeeping for compressions of amalgamated free
//! products, the canonical-form rewriter and centralizer structure.

pub mod canonical;
pub mod centralizer;
pub mod expr;
pub mod partition;
pub mod scenario;
pub mod sequence;

pub use canonical::{dichotomy_promote, known_fdim, single_steps, to_canonical};
pub use centralizer::{centralizer_structure, Branch, CentralizerReport};
pub use expr::StructureExpr;
pub use partition::{connectivity_layers, ordered_index, Adjacency, Partition};
pub use scenario::{compression_formula, CompressionScenario, GammaChoice, ScenarioIndex};
pub use sequence::{choose_increasing_sequence, PowerOrder};
