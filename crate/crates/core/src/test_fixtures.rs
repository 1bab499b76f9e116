//! Shared unit-test structures.

use crate::signature::Signature;
use crate::structure::{Point, RelStructure};

pub fn pts(names: &[&str]) -> Vec<Point> {
    names.iter().map(|s| Point::new(s)).collect()
}

/// Four points carrying the single 4-ary tuple (a,b,c,d).
pub fn s1() -> RelStructure {
    RelStructure::new(Signature::uniform(4), ["a", "b", "c", "d"], [("R", pts(&["a", "b", "c", "d"]))])
        .unwrap()
}

/// Three points with three 3-ary tuples; predimension 0.
pub fn s2() -> RelStructure {
    RelStructure::new(
        Signature::uniform(3),
        ["a", "b", "c"],
        [("R", pts(&["a", "b", "c"])), ("R", pts(&["a", "c", "b"])), ("R", pts(&["b", "a", "c"]))],
    )
    .unwrap()
}

/// Six points: a diagonal loop on `e`, a triangle of 3-tuples, one free point.
pub fn mixed_fixture() -> RelStructure {
    RelStructure::new(
        Signature::uniform(3),
        ["a", "b", "c", "d", "e", "f"],
        [
            ("R", pts(&["a", "b", "c"])),
            ("R", pts(&["b", "c", "d"])),
            ("R", pts(&["a", "c", "d"])),
            ("R", pts(&["e", "e", "e"])),
            ("R", pts(&["d", "e", "a"])),
        ],
    )
    .unwrap()
}
