//! Abelian two-block group algebra (2BGA) quantum codes on lattice quotients.
//!
//! The crate builds 2BGA CSS codes from pairs of group-algebra elements,
//! computes their parameters exactly, embeds them on a quotient `ℤ^D / Λ`,
//! evaluates the lattice-quotient Bravyi–Terhal distance bound and produces,
//! by repeated cleaning, a nontrivial logical operator confined to one slab of
//! a parallelotope partition.

pub mod bound;
pub mod certify;
pub mod cleaning;
pub mod code;
pub mod embedding;
pub mod f2;
pub mod group;
pub mod lattice;
pub mod realnum;
