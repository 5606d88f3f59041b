//! Finite-depth Bratteli diagrams and the orders that live on them.
//!
//! The crate covers the combinatorial side of perfect orderings: incidence
//! matrices and telescoping, lexicographic words and languages, skeletons and
//! correspondences, the associated cell graphs, order synthesis from balance
//! relations, perfectness verification, and the infinitesimal vectors that a
//! perfect order produces in the dimension group.
//!
//! Everything is evaluated on a finite prefix of the (infinite) diagram.
//! Stationary diagrams carry their repeating block so callers can extend them.

pub mod diagram;
pub mod error;
pub mod fixtures;
pub mod hgraph;
pub mod infinitesimal;
pub mod io;
pub mod linalg;
pub mod ordering;
pub mod skeleton;
pub mod synth;
pub mod verify;

mod flow;

pub use diagram::{BratteliDiagram, EdgeId, IncidenceMatrix};
pub use error::{Error, Result};
pub use ordering::DiagramOrder;
pub use skeleton::{Correspondence, Skeleton};
