//! Kazhdan-Lusztig combinatorics for affine Weyl groups: spherical and
//! antispherical canonical bases, inverse polynomials, tilting-character
//! polynomials, and the layer-balancing algorithm for tilting-module
//! Loewy series.

pub mod affine_weyl;
pub mod balance;
pub mod characters;
pub mod cli;
pub mod hecke;
pub mod kl;
pub mod laurent;

pub use affine_weyl::{
    enumerate_wplus, identity, parse_word, right_mult, weight_of, AffineWeylError, AlcoveElement,
    RootDatum, StepResult,
};
pub use balance::{balance_from_alcove, balance_run, BalanceError, BalanceState, ParityBlock};
pub use characters::{
    basis_change, delta_filtration_order, parity_layer, partial_character, tilting_layers,
    tilting_poly, tilting_weyl_mults,
    wall_cross_char, weyl_simple_mults, Basis, CharError, CharTables, GradedCharacter,
    WallCrossChar,
};
pub use hecke::{act_tilde_hs, act_underline_hs, dualize, ModuleVector, Parity};
pub use kl::{KLTable, KlError};
pub use laurent::LaurentPoly;
