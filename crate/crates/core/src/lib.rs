pub mod aluthge;
pub mod cli;
pub mod ensemble;
pub mod error;
pub mod estimators;
pub mod io;
pub mod matrix;
pub mod normaloid;
pub mod numrange;
pub mod orbitopt;
pub mod simplex;
