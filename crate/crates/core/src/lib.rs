pub mod cli;
pub mod error;
pub mod float;
pub mod frame;
pub mod gallery;
pub mod io;
pub mod norm;
pub mod operator;
pub mod pattern;
pub mod perturb;
pub mod random;
pub mod report;
pub mod reproduce;
pub mod restricted;
pub mod search;
pub mod subspace;
pub mod unc;
pub mod weave;
