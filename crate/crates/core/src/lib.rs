pub mod branch;
pub mod coherent;
pub mod error;
pub mod model;
pub mod numerics;
pub mod path;
pub mod fock;
pub mod thermal;
pub mod experiment;
