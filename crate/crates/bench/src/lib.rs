//! Shared fixtures for the benchmarks.

use awlift_core::MapSpec;

pub fn scaled_enneper(r: f64) -> MapSpec {
    MapSpec::harmonic(
        &format!("{r}*z"),
        &format!("{}*z^3/3", r * r * r),
        &format!("{r}*z"),
    )
    .expect("fixture parses")
}

pub fn power(alpha: f64) -> MapSpec {
    MapSpec::analytic(&format!("((1+z)/(1-z))^{alpha}")).expect("fixture parses")
}
