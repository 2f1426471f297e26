pub mod archsing;
pub mod bonds;
pub mod dirkin;
pub mod error;
pub mod geom;
pub mod kinmap;
pub mod polyalg;
pub mod rearrange;
pub mod selfmotion;

pub use error::{Error, Result};

pub type Rat = num::rational::BigRational;
pub type GaussRat = num::complex::Complex<Rat>;
pub type C64 = num::complex::Complex64;
