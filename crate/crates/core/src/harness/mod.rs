pub mod batch;
pub mod fixtures;
pub mod generate;
pub mod io;
pub mod oracle;
pub mod selftest;
