//! Built-in fixtures, addressable from the command line by name.

pub const B2: &str = include_str!("../fixtures/B2.veq");
pub const T3: &str = include_str!("../fixtures/T3.veq");
pub const F1: &str = include_str!("../fixtures/F1.veq");

/// The source of the fixture called `name`, with or without `.veq`.
pub fn source(name: &str) -> Option<&'static str> {
    match name.strip_suffix(".veq").unwrap_or(name) {
        "B2" => Some(B2),
        "T3" => Some(T3),
        "F1" => Some(F1),
        _ => None,
    }
}
