pub mod amm;
pub mod backtest;
pub mod frontier;
pub mod ingest;
pub mod synthetic;
