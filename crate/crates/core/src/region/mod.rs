//! Relaxed decision regions: positive/negative sets, unanimous candidates, greedy
//! principal-neuron selection and membership.

mod profile;
mod rdr;
mod report;
mod select;
mod sets;

pub use profile::{FrequencyProfile, Objective, Score};
pub use rdr::{build_rdr, members, RelaxedDecisionRegion, DEFAULT_K, DEFAULT_T};
pub use report::{RegionReport, SelectedNeuron};
pub use select::{brute_force_select, greedy_select, PrincipalConfiguration, PrincipalEntry, BRUTE_FORCE_LIMIT};
pub use sets::{build_concept_sets, candidate_neurons, ConceptSets, NegativePolicy};
