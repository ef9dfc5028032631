pub mod markov;
pub mod prediction;
pub mod scheme;
pub mod sim;
pub mod sweep;
