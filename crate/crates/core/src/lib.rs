//! Exact machinery for paradoxical decompositions of free products of cyclic
//! groups: the group law, clopen set algebras for the boundary and self
//! actions, bounded certificate search, invariant-measure linear programs,
//! type-semigroup equidecomposition, and a symbolic crossed-product algebra.

pub mod catalog;
pub mod clopen;
pub mod cp;
pub mod error;
pub mod group;
pub mod json;
pub mod measure;
pub mod paradox;
pub mod random;
pub mod search;
pub mod tsg;

pub use clopen::{atoms, refine_cover_to_partition, ActionKind, ActionModel, Cell, ClopenSet, Model, Refinement};
pub use cp::{
    build_witness, check_expectation_identities, expectation_sides, extract_paradox, freeness_projections, trace,
    trace_check, verify_witness, CpElement, ExpectationSides, FreenessReport, SimpleFunction,
};
pub use error::{Error, Result, SearchOutcome, Verdict};
pub use group::{Factor, GroupSpec, Letter, Order, PartitionCert, Path, Word};
pub use measure::{check_farkas, check_measure, lp_feasibility, FarkasCert, LpInstance, LpOutcome, MeasureTable};
pub use paradox::{doubling_check, find_paradox, find_paradox_with, DoublingReport, ParadoxCert, Piece};
pub use tsg::{
    compose, find_equi, leq, paradox_to_tsg, properly_infinite, reverse, tsg_to_paradox, unperforation_probe,
    verify_equi, verify_leq, EquidecompCert, Move, ProbeReport, TsgElement,
};
