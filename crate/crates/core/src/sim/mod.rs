//! Synthetic stand-in for the robot's sensors: the fixed tutoring lexicon,
//! category prototypes, and the full 5 x 5 x 5 scenario of instructions.

mod lexicon;
mod scenario;

pub use lexicon::{build_lexicon, CategoryEntry, Lexicon};
pub use scenario::{
    generate_scenario, shuffle_sequences, CategoryPrototype, Scenario, ScenarioConfig,
    N_CATEGORIES,
};
