//! Exact conductor calculus for representations of finite filtered groups.

pub mod arith;
pub mod character;
pub mod cyclo;
mod dixon;
pub mod group;
mod modp;
pub mod rational;
pub mod filtration;
pub mod generate;
pub mod wd;
pub mod global;
pub mod schema;
pub mod sharpness;
pub mod corpus;
pub mod suite;
