//! Finite-scale verification toolkit for hyperbolic-style geometry of group
//! actions: exact metric graphs with Gromov products and measured
//! hyperbolicity, a truncated free-group boundary with an exact cylinder
//! algebra, action probes for acylindricity and weak proper discontinuity,
//! diagonal-separation checks, annulus systems with their crossratio, and the
//! quasimetric triple-space graph with its certificates.
//!
//! Everything is computed with exact integer or rational arithmetic; sampled
//! measurements take explicit seeds and report their budgets.

pub mod action;
pub mod annulus;
pub mod boundary;
pub mod clopen;
pub mod condition;
pub mod dynamics;
pub mod error;
pub mod free;
pub mod gen;
pub mod graph;
pub mod io;
pub mod lemmas;
pub mod rat;
pub mod report;
pub mod triples;

pub use action::{Action, BoundaryAction, CayleyAction, Element, Elements, FinitenessProbe, GraphAction};
pub use annulus::{Annulus, AnnulusSystem, CrossValue, Crossratio};
pub use boundary::{BoundaryModel, Cylinder, Zeta};
pub use clopen::ClopenSet;
pub use dynamics::{Classification, DynamicsCertificate, DynamicsKind, ElementKind};
pub use error::{Error, Result};
pub use free::FreeWord;
pub use graph::{DeltaReport, Geodesic, MetricGraph, SampleMode};
pub use rat::Rat;
pub use report::{Record, Report, Status};
pub use triples::TripleSpaceGraph;
