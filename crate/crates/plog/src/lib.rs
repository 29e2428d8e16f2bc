//! Decision procedures for polymodal provability logics.
//!
//! The crate decides GLP.3 theoremhood by bounded countermodel search over
//! finite hereditarily linear J-frames, decides the closed fragment of GLP
//! symbolically over Ignatiev's frame, and constructs the projection
//! machinery connecting the two, so that the agreement of the two provers is
//! machine-checkable.

pub mod cells;
pub mod decide;
pub mod formula;
pub mod ignatiev;
pub mod jline;
pub mod kripke;
pub mod ordinal;
pub mod projection;

pub use cells::{Cell, CellSet};
pub use decide::{glp3_decide, jlin_satisfy, Countermodel, Status, Verdict};
pub use formula::{
    closure_sigma, m_guard, m_plus, parse_formula, render_formula, subformulas,
    substitute_closed, Formula, Worm,
};
pub use ignatiev::{
    axis_defining_formula, axis_witness, closed_truthset, cover_k, glp_closed_decide,
    ordinal_worm, worm_ordinal, ClosedVerdict, IgPoint,
};
pub use jline::{enumerate_jlines, jline_size_bound, JLineShape};
pub use kripke::{FiniteFrame, FrameReport, Valuation};
pub use ordinal::Ordinal;
pub use projection::{build_projection, closed_substitution_witness, ProjectionSpec};
