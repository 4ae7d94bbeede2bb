pub mod cscaling;
pub mod darboux;
pub mod decay;
pub mod gamow;
pub mod numerics;
pub mod oscillator;
pub mod scattering;
