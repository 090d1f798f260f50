pub mod bounds;
pub mod fields;
pub mod format;
pub mod groebner;
pub mod poly;
pub mod search;
pub mod sos;
pub mod zeta;
