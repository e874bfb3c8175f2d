//! Small reference quivers shipped with the crate, in DSL form.

use crate::dsl::{parse_dsl, QuiverDocument};
use crate::gentle::{gentle, GentleQuiver};
use crate::quiver::QuiverWithRelations;

/// `(key, text)` for every fixture, in key order.
pub const FIXTURES: [(&str, &str); 8] = [
    ("f1", include_str!("../fixtures/f1.quiver")),
    ("f2", include_str!("../fixtures/f2.quiver")),
    ("f3", include_str!("../fixtures/f3.quiver")),
    ("f4", include_str!("../fixtures/f4.quiver")),
    ("f5", include_str!("../fixtures/f5.quiver")),
    ("f6", include_str!("../fixtures/f6.quiver")),
    ("f7", include_str!("../fixtures/f7.quiver")),
    ("f8", include_str!("../fixtures/f8.quiver")),
];

pub fn document(key: &str) -> Option<QuiverDocument> {
    FIXTURES
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, text)| parse_dsl(text).expect("fixtures parse"))
}

pub fn quiver(key: &str) -> Option<QuiverWithRelations> {
    document(key).map(|d| d.body)
}

/// The fixture validated as a gentle quiver; panics on an unknown key.
pub fn gentle_fixture(key: &str) -> GentleQuiver {
    gentle(&quiver(key).unwrap_or_else(|| panic!("no fixture `{key}`"))).expect("fixtures are gentle")
}
