//! Core of the OPAL text-to-database engine.
//!
//! Everything in this crate is a pure function over in-memory values: the
//! relational database model and its diff, the plan language, the tool
//! registry with its offline backends, the observer/planner/analyzer agents,
//! the plan executor and the benchmark scoring. File formats, HTTP and the
//! command line live in the `opal` crate.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod analyzer;
pub mod config;
pub mod db;
pub mod engine;
pub mod eval;
pub mod executor;
pub mod feedback;
pub mod observer;
pub mod plan;
pub mod planner;
pub mod text;
pub mod tools;

pub use config::EngineConfig;
pub use db::{
    ColumnDef, DataType, Database, Date, DbError, DiffTuple, ForeignKey, Literal, Row, Table,
};
pub use feedback::{Feedback, FeedbackCategory};
