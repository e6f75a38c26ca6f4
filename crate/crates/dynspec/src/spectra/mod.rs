//! Dynamical Markov and Lagrange spectra of observables on subshifts, and the
//! splicing constructions relating them.

pub mod observable;
pub mod surgery;
pub mod values;

pub use surgery::{
    surgery_a, surgery_a1_prefix, verify_limsup_identity, verify_sup_identity, LimsupReport, MaxPoint, SupCertificate,
    SurgeryA1, SurgeryContext,
};
pub use observable::{LocalTable, SequenceObservable, ShiftObservable};
pub use values::{
    check_l_subset_m, classical_lagrange, lagrange_value, markov_value, spectrum_scan, Attained, Gap,
    InclusionWitness, MarkovValue, SampleKind, SpectrumSample, SpectrumScan,
};
