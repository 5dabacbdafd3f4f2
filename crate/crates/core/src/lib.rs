//! Axiomatic analysis of learning algorithms that aggregate risks across
//! several environments.
//!
//! A learning algorithm is modeled as a choice correspondence: given a menu
//! of hypotheses it returns the nonempty subset it considers best. The crate
//! provides
//!
//! - the finite domain model ([`model`]) and the rule interface ([`rule`]),
//! - executable axiom checkers with replayable witnesses ([`axioms`]),
//! - revealed-preference reconstruction ([`revealed`]),
//! - a zoo of reference aggregation rules and an auditor ([`zoo`]),
//! - an exhaustive search over pairwise aggregation rules ([`verify`]),
//! - risk-profile construction from data and losses ([`risk`]).

pub mod axioms;
pub mod cli;
pub mod error;
pub mod model;
pub mod report;
pub mod revealed;
pub mod risk;
pub mod rule;
pub mod verify;
pub mod zoo;
