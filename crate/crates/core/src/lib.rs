//! Cryptanalysis toolkit.

pub mod gf2;
pub mod arith;
pub mod puzzles;
pub mod permclose;
pub mod fpe;
pub mod dlog;
pub mod mask;
pub mod gfs;
pub mod boolshare;
pub mod boolanalysis;
pub mod quantum;
pub mod routing;
pub mod selftest;
