pub mod jetmat;
pub mod kfield;
pub mod kspace;
pub mod linalg;
pub mod polygon;
pub mod slattice;
pub mod smat;
pub mod wlattice;

pub use jetmat::{JetMat, JetSmith, JetSmithFull};
pub use kfield::KField;
pub use kspace::{k_kernel, k_rref, KSpace};
pub use linalg::{Mat, Subspace};
pub use polygon::{polygon_sequence_check, Hypothesis, PolygonVerdict};
pub use slattice::{intersect_with_ejet_lattice, series_det_class, EJetLattice, SLattice};
pub use smat::SMat;
pub use wlattice::{elementary_divisors, smith_exponents, DivisorProfile, WLattice};
