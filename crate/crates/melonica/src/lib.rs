//! Exact combinatorics of closed bipartite edge-colored graphs.
//!
//! The crate implements the calculus behind invariant tensor models at desk
//! scale, with every quantity exact (big integers and rationals, no floats on
//! the main paths):
//!
//! - [`graph`] — colored graphs as permutation tuples: faces, connectivity,
//!   canonical forms, automorphism counts, JSON encoding.
//! - [`degree`] — jackets, genera, the degree ω, and the large-N exponent
//!   computed two independent ways (degree route vs. face loop counting).
//! - [`enumeration`] — exhaustive catalogs of connected classes and of the
//!   color-0 closures of bubble collections.
//! - [`melonic`] — dipole reduction, the melon ↔ colored-tree bijection,
//!   melon counting by two generators, tree counting and the critical point
//!   of the tree series.
//! - [`topology`] — the cell structure of the dual gluing for 4-colored
//!   graphs: Euler characteristic, bubble surface genera, manifold detection.
//! - [`series`] — exact perturbative free-energy coefficients with a
//!   per-graph ledger, plus independent oracles (Gaussian pairing sums, an
//!   N=1 integral, numeric invariant evaluation with unitary-invariance
//!   checks).
//! - [`verify`] — the named exhaustive suites wired to the CLI.

pub mod degree;
pub mod enumeration;
pub mod error;
pub mod graph;
pub mod guard;
pub mod melonic;
pub mod perm;
pub mod series;
pub mod topology;
pub mod verify;

pub use degree::{
    amplitude_exponent, amplitude_exponent_bruteforce, amplitude_exponent_via_bubbles, bubbles,
    degree, jackets, ribbon_face_check, AmplitudeExponent, DegreeReport, Jacket,
};
pub use enumeration::{
    enumerate_bubbles, enumerate_closures, BubbleCatalog, CatalogEntry, ClosureCatalog,
    ClosureClass,
};
pub use error::{Error, Result};
pub use graph::{dipole, CanonicalForm, ColoredGraph, Face, GraphDoc};
pub use melonic::{
    count_colored_trees, count_melons_exhaustive, estimate_critical_point, is_melonic,
    melon_to_tree, melons_by_insertion, reduce, tree_to_melon, CriticalEstimate, MelonTree,
    ReductionTrace,
};
pub use series::{
    free_energy_series, gaussian_expectation, n1_integral_oracle, numeric_invariant_eval,
    unitary_invariance_check, Coupling, ModelSpec, NPolynomial, NumericTensor, SeriesTable,
};
pub use topology::{bubble_surfaces, cell_complex, is_manifold, CellComplexSummary, LinkReport};
