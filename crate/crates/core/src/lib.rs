//! Amalgamation of finite groups over a common subgroup, quantifier-free
//! types of tuples, scheme constructions and bounded closure certification.

pub mod amalgam;
pub mod closure;
pub mod corpus;
pub mod group;
pub mod io;
pub mod nf3;
pub mod perm;
pub mod schemes;
pub mod types;
