//! Exact peak age of information (PAoI) distributions for two FCFS
//! tandems fed by Poisson traffic: an M/M/1 node followed by either an
//! M/D/1 or an M/M/1 node. A seeded simulator of the same systems is
//! included for validation.
//!
//! ```
//! use tandem_paoi::{Tandem, TandemParams};
//!
//! let params = TandemParams::md1(0.5, 1.0, 0.8).unwrap();
//! let model = Tandem::new(&params).unwrap();
//! let table = model.cdf_table().unwrap();
//! assert_eq!(table.cdf(1.5), 0.0);
//! assert!(table.quantile(0.99).unwrap() > 10.0);
//! ```

// `!(x > 0.0)` guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod md1;
pub mod mm1;
pub mod model;
pub mod numerics;
pub mod par;
pub mod sim;

use std::sync::Arc;

pub use error::{Error, Result};
pub use md1::Md1Tandem;
pub use mm1::Mm1Tandem;
pub use model::{
    classify_case, paoi_from_record, Atom, CaseLabel, MixedDistribution, PacketRecord, ServerSpec,
    TandemParams,
};
pub use numerics::{CdfTable, EmpiricalDistribution, QuadratureSpec};
pub use par::Execution;

/// Probabilities of the four occupancy cases.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CaseProbabilities {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl CaseProbabilities {
    pub fn get(&self, case: CaseLabel) -> f64 {
        self.as_array()[case.index()]
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn sum(&self) -> f64 {
        self.a + self.b + self.c + self.d
    }
}

/// Either analytic tandem behind one interface.
#[derive(Debug, Clone)]
pub enum Tandem {
    Md1(Arc<Md1Tandem>),
    Mm1(Arc<Mm1Tandem>),
}

impl Tandem {
    pub fn new(params: &TandemParams) -> Result<Self> {
        Ok(match params.second() {
            ServerSpec::Deterministic(_) => Tandem::Md1(Arc::new(Md1Tandem::new(params)?)),
            ServerSpec::Exponential(_) => Tandem::Mm1(Arc::new(Mm1Tandem::new(params)?)),
        })
    }

    pub fn probabilities(&self) -> CaseProbabilities {
        match self {
            Tandem::Md1(t) => t.probabilities(),
            Tandem::Mm1(t) => t.probabilities(),
        }
    }

    pub fn pdf(&self, tau: f64) -> f64 {
        match self {
            Tandem::Md1(t) => t.pdf(tau),
            Tandem::Mm1(t) => t.pdf(tau),
        }
    }

    pub fn case_pdf(&self, case: CaseLabel, tau: f64) -> f64 {
        match self {
            Tandem::Md1(t) => t.case_pdf(case, tau),
            Tandem::Mm1(t) => t.case_pdf(case, tau),
        }
    }

    pub fn support_lower(&self) -> f64 {
        match self {
            Tandem::Md1(t) => t.support_lower(),
            Tandem::Mm1(t) => t.support_lower(),
        }
    }

    pub fn quadrature_spec(&self) -> QuadratureSpec {
        match self {
            Tandem::Md1(t) => t.quadrature_spec(),
            Tandem::Mm1(t) => t.quadrature_spec(),
        }
    }

    pub fn distribution(&self) -> MixedDistribution {
        match self {
            Tandem::Md1(t) => t.distribution(),
            Tandem::Mm1(t) => t.distribution(),
        }
    }

    pub fn case_distribution(&self, case: CaseLabel) -> MixedDistribution {
        match self {
            Tandem::Md1(t) => t.case_distribution(case),
            Tandem::Mm1(t) => t.case_distribution(case),
        }
    }

    /// Panel width for tabulation: a twentieth of the fastest time scale.
    pub fn panel_width(&self) -> f64 {
        let fastest = match self {
            Tandem::Md1(t) => t.max_rate(),
            Tandem::Mm1(t) => t.max_rate(),
        };
        let scale = fastest.max(1.0);
        0.05 / scale
    }

    pub fn cdf_table(&self) -> Result<CdfTable> {
        self.cdf_table_with(Execution::default())
    }

    pub fn cdf_table_with(&self, exec: Execution) -> Result<CdfTable> {
        CdfTable::build_with(
            &self.distribution(),
            &self.quadrature_spec(),
            self.panel_width(),
            exec,
        )
    }

    pub fn case_table_with(&self, case: CaseLabel, exec: Execution) -> Result<CdfTable> {
        CdfTable::build_with(
            &self.case_distribution(case),
            &self.quadrature_spec(),
            self.panel_width(),
            exec,
        )
    }
}
