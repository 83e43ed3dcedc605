//! Corpus analytics over labeled tuple stores. Documents are books.

pub mod citation;
pub mod divergence;
pub mod hedging;
pub mod holders;

pub use citation::{citation_ratios, CitationRanking, CitationRatioRow, DEFAULT_MIN_BOOKS};
pub use divergence::{epistemological_difference, expected_stance, source_score, Divergence, SourceSelector};
pub use hedging::{hedging_uncertainty, HedgingReport};
pub use holders::{
    belief_holder_eval, belief_holders, belief_score_by_type, belief_set, canonicalize, jaccard, ner_entity_set,
    BeliefHolderRecord, HolderEval, NerIndex,
};
