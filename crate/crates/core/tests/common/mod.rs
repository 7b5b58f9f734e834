#![allow(dead_code)]

pub mod fixtures;
pub mod negatives;
pub mod gen;
