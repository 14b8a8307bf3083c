pub mod bench;
pub mod capacity;
pub mod demo_sentence;
pub mod learn;
pub mod petfish;
