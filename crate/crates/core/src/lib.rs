pub mod kernel;
pub mod lazy_stream;
pub mod scriptgen;
pub mod strategy_lang;
pub mod tactics;
pub mod trace;
