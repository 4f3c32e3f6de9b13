pub mod cli;
pub mod context;
pub mod lexicon;
pub mod metrics;
pub mod ml;
pub mod score;
pub mod split;
pub mod svg;
pub mod synth;
pub mod text;
pub mod translate;
pub mod xai;
