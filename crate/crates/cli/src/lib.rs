//! Support library for the `varsep` binary: expression parsing, JSON
//! report formatting, and seeded random instance generation. The
//! numerical machinery lives in the `varsep` crate; this one only adapts
//! it to the command line.

pub mod parse;
pub mod random;
pub mod report;
