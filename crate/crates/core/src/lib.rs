//! Measurement toolkit for representational harms in image-captioning corpora.
//!
//! The library compares four stages of information about an image — human
//! labels, system labels, human captions, system captions — by converting
//! captions to scene graphs and words to taxonomy synsets, then running
//! stereotyping and demeaning measurement suites over the paired stages.

pub mod corpus;
pub mod demeaning;
pub mod error;
pub mod report;
pub mod scenegraph;
pub mod stats;
pub mod stereotyping;
pub mod wordnet;

pub use error::{Error, Result};
