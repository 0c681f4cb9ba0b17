//! Exact, desk-scale computational group theory:
//!
//! - free-group words and their cyclic calculus ([`words`]),
//! - folded subgroup graphs of free groups ([`stallings`]),
//! - small-cancellation presentations, Dehn's algorithm, abelianization ([`smallcanc`]),
//! - coset enumeration with explicit budgets ([`cosetenum`]),
//! - finite groups as multiplication tables: automorphisms, characters, and
//!   phased basis maps of group algebras ([`fingrp`]),
//! - wreath-like products and their coordinate calculus ([`wlp`]),
//! - quotients of free products with commuting conjugate copies and
//!   small-cancellation generator families in free groups ([`clyndon`]),
//! - explicit presentation families ([`builders`]).
//!
//! Everything is exact: rationals are `num_rational::Ratio`, matrix arithmetic is
//! `num_bigint::BigInt`, and no floating point appears anywhere.

pub mod builders;
pub mod clyndon;
pub mod cosetenum;
pub mod fingrp;
pub mod smallcanc;
pub mod stallings;
pub mod wlp;
pub mod words;
