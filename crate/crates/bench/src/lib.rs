//! Shared fixtures for the kernel benchmarks.

use freecover_core::covers::{BasedCover, CoverTower, FiniteQuotient};
use freecover_core::nilpotent::counterexample_endomorphism;
use freecover_core::word::Endomorphism;
use freecover_core::DEFAULT_MAX_VERTICES;

pub fn counterexample() -> Endomorphism {
    counterexample_endomorphism(2).expect("rank 2 is valid")
}

pub fn mod2_cover() -> BasedCover {
    BasedCover::build(FiniteQuotient::mod_q(2, 2).expect("q = 2 is valid"))
}

pub fn mod2_tower_depth2() -> CoverTower {
    CoverTower::build(2, 2, 2, DEFAULT_MAX_VERTICES).expect("within budget")
}
