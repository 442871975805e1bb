//! Explorations of the origin's cluster: the fattening exploration for
//! worms, the sprinkled branching exploration on free products, the cap
//! threshold that makes the latter supercritical, and a harness for the
//! abstract growth lemma behind the former.

mod free_product;
mod growth;
mod moments;
mod threshold;
mod worms;

pub use free_product::{
    branching_survival, favored_direction, free_product_explore, phi_map, psi_inverse, psi_map, reproduction_bound,
    reproduction_mean_estimate, BranchingConfig, BranchingState, BranchingSurvival, ReproductionRecord,
};
pub use growth::{growth_lemma_harness, GrowthParams, GrowthRecord, IncrementModel};
pub use moments::{fat_second_moment, FatMoments};
pub use threshold::{reproduction_threshold, required_r, required_r_with, RequiredCap, DEFAULT_SEARCH_CAP};
pub use worms::{default_growth_a, worms_explore, worms_survival, ExplorationState, StepLog, SurvivalRecord, WormsConfig};
