//! M/M/1 → M/D/1 tandem and the M/D/1 waiting time it is built on.

mod tandem;
pub mod wait;

pub use tandem::{
    case_probabilities_md1, paoi_distribution_md1, paoi_pdf_md1_case, single_md1_paoi_cdf,
    Md1Tandem,
};
pub use wait::{
    erlang_wait_cdf, md1_wait_cdf, md1_wait_distribution, theta, theta_branch, ErlangValue, Kernel,
    KernelSource, ThetaBranch, WaitTable,
};
