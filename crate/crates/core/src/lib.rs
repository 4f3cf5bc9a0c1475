pub mod analytic;
pub mod cli;
pub mod model;
pub mod propagator;
pub mod specfun;
pub mod sweep;
