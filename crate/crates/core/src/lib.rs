//! Compositional distributional semantics on top of a vector-symbolic
//! architecture.
//!
//! Words are typed by grammar: nouns are vectors, adjectives and intransitive
//! verbs are matrices, transitive verbs are order-3 tensors. The same lexicon
//! can be realized two ways:
//!
//! * [`BindingBackend::Tensor`]: exact tensor products, composition by
//!   contraction.
//! * [`BindingBackend::Hrr`]: holographic reduced representations, where the
//!   tensor product becomes circular convolution and contraction becomes
//!   circular correlation. Results are the exact answer plus crosstalk noise.
//!
//! The [`petfish`] module rebuilds the pet-fish concept-combination demo and
//! [`learning`] implements online convex-mixture learning of word
//! representations from labelled percepts.

pub mod binding;
pub mod cleanup;
pub mod error;
pub mod hypervector;
pub mod learning;
pub mod lexicon;
pub mod petfish;
pub mod rng;
pub mod tensor;

pub use binding::{BindingBackend, RoleFillerStructure, UnbindingBasis};
pub use cleanup::{CleanupMemory, Match};
pub use error::{Error, Result};
pub use hypervector::{
    circ_conv, circ_conv_fft, circ_conv_naive, circ_corr, cosine, involution, random_unit,
    HyperVector,
};
pub use lexicon::{Category, LexicalEntry, Lexicon};
pub use rng::SeededRng;
pub use tensor::{contract3, matvec, outer, Contraction, DenseMatrix, Order3Tensor, Payload};
