pub mod engine;
pub mod harness;
pub mod index;
pub mod ostree;
pub mod similarity;
pub mod stock;
pub mod stream;
