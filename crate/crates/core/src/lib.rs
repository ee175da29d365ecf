//! Vibration asymptotics of thin clamped axisymmetric shells.
//!
//! The crate is `no_std` with `alloc`. It covers midsurface geometry and
//! classification, the membrane symbol calculus and its scalar reductions,
//! 1D conforming finite elements, the per-class wavenumber power laws, and
//! a Fourier-decomposed 2D elasticity eigensolver on the meridian domain.

#![no_std]

extern crate alloc;

pub mod airy;
pub mod asymptotics;
pub mod eig;
pub mod error;
pub mod exec;
pub mod fem1d;
pub mod geometry;
pub mod jet;
pub mod lame2d;
pub mod optimize;
pub mod quadrature;
pub mod symbols;

pub use error::{Result, ShellError};
pub use exec::{Executor, Sequential};
pub use geometry::{classify, frame_at, preset, GeometryFrame, Model, ShellClass, ShellProfile, ShellTag};
