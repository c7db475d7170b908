//! Compiles and runs the listings of the guide in `book/` as doc-tests.
//! One module per chapter so a failure points at its chapter.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/simulator.md")]
pub mod simulator {}
#[doc = include_str!("../../../book/src/ansatz.md")]
pub mod ansatz {}
#[doc = include_str!("../../../book/src/dataset.md")]
pub mod dataset {}
#[doc = include_str!("../../../book/src/metrics.md")]
pub mod metrics {}
#[doc = include_str!("../../../book/src/qsvm.md")]
pub mod qsvm {}
#[doc = include_str!("../../../book/src/experiments.md")]
pub mod experiments {}
