//! File formats, numerical Weyl-calculus checks, the acceptance suite and
//! the command-line front end built on `flatorbit-core`.

pub mod cli;
pub mod io;
pub mod numeric;
pub mod report;
pub mod suite;
pub mod weyl;
