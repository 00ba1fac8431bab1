//! Steenrod operations: the algebra and its action on mod-2 cochains.

pub mod algebra;
pub mod cochain;

pub use algebra::{
    admissible_mod2, admissible_odd, binomial_mod, cartan_expand, is_admissible, parse_word, Op, RewriteOrder,
    SteenrodElement, Word,
};
pub use cochain::{apply, cup_i, sq};
