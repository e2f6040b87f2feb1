//! A contextual-modal calculus for algebraic effects and handlers.
//!
//! Effects are tracked by the modal type `[Ψ]A`: a computation returning `A`
//! that may call exactly the operations of the algebraic theory `Ψ`. The
//! `box` form binds a theory over a computation, `let box` eliminates it into
//! a modal variable, and handlers guard modal variables at their use sites.
//! Reduction is β-reduction plus a family of subsidiary operations (monadic,
//! continuation and modal substitution, handling and handling sequences).
//!
//! The crate is organised bottom-up:
//!
//! - [`syntax`]: types, contexts, the five term categories, free variables,
//!   α-equivalence and fresh names.
//! - [`surface`]: the concrete ASCII syntax (parser, desugaring, printer).
//! - [`typeck`]: the synthesis-mode typechecker.
//! - [`subst`]: the subsidiary operations that drive reduction.
//! - [`eval`]: the call-by-value small-step semantics and a fueled driver.
//! - [`corpus`]: the worked example programs with their expected outcomes.
//! - [`gen`]: a type-directed random generator of well-typed terms.
//! - [`props`]: executable checks of preservation, progress and the
//!   substitution principles.

pub mod corpus;
pub mod eval;
pub mod gen;
pub mod props;
pub mod subst;
pub mod surface;
pub mod syntax;
pub mod typeck;

pub use surface::{parse, pretty, Diagnostic, SourceFile};
pub use syntax::*;

pub use eval::{evaluate, evaluate_with, is_value, step, Outcome, StepResult, StuckReason, Trace};
pub use subst::{Engine, SubstError};
pub use typeck::{TypeError, TypeErrorKind};
