//! Exact and `p`-adic tools for orbits of polynomial maps: fixed-precision
//! `p`-adic integers, strictly convergent power series with Strassman and
//! Weierstrass machinery, Mahler interpolation of orbits, orbit-intersection
//! solving, and Weil heights.

pub mod arclemma;
pub mod dml;
pub mod dynsys;
pub mod error;
pub mod heights;
pub mod padic;
pub mod poly;
pub mod series;

pub use arclemma::{interpolate_orbit, mahler_fit, Certification, MahlerExpansion, OrbitInterpolation};
pub use dml::{solve_dml, DmlConfig, DmlSolution, DmlSolver, TargetSpec};
pub use dynsys::{good_reduction_check, residue_period, Observable, PolyMap, RationalPoint, ResiduePeriod};
pub use error::{Error, ErrorKind, Result};
pub use heights::{count_height_le, gap_ratio_series, weil_height, HeightValue};
pub use padic::{PadicInt, Valuation};
pub use poly::Polynomial;
pub use series::{PadicSeries, RootList, WeierstrassFactorization};
