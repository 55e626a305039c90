//! File formats, command-line plumbing and parallel scans around
//! [`entropy_lab_core`].

pub mod cli;
pub mod csv_io;
pub mod fit_report;
pub mod random_sets;
pub mod runner;
pub mod spec_file;
pub mod verify;
