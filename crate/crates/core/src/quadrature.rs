//! Cached Gauss rules on `[-1, 1]`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::num::NonZeroUsize;
use std::rc::Rc;

use gauss_quad::{GaussJacobi, GaussLegendre};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature controls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Nodes per panel; doubled once to estimate the error.
    pub node_count: usize,
    /// Initial ray truncation radius for exponential periods.
    pub truncation_radius: f64,
    pub target_tol: f64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            node_count: 24,
            truncation_radius: 6.0,
            target_tol: 1e-13,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.node_count < 8 {
            return Err(Error::InvalidPath(format!("node_count {} < 8", self.node_count)));
        }
        if !(self.truncation_radius > 0.0) || !(self.target_tol > 0.0) {
            return Err(Error::InvalidPath("radius and tolerance must be positive".into()));
        }
        Ok(())
    }
}

pub(crate) type Rule = Rc<Vec<(f64, f64)>>;

thread_local! {
    static RULES: RefCell<HashMap<(usize, u64, u64), Rule>> = RefCell::new(HashMap::new());
}

/// Nodes and weights for `(1-x)^alpha (1+x)^beta` on `[-1, 1]`.
pub(crate) fn jacobi_rule(n: usize, alpha: f64, beta: f64) -> Rule {
    let key = (n, alpha.to_bits(), beta.to_bits());
    RULES.with(|cache| {
        if let Some(r) = cache.borrow().get(&key) {
            return r.clone();
        }
        let deg = NonZeroUsize::new(n).expect("positive node count");
        let pairs: Vec<(f64, f64)> = if alpha == 0.0 && beta == 0.0 {
            GaussLegendre::new(deg).as_node_weight_pairs().to_vec()
        } else {
            let a = alpha.try_into().expect("exponent above -1");
            let b = beta.try_into().expect("exponent above -1");
            GaussJacobi::new(deg, a, b).as_node_weight_pairs().to_vec()
        };
        let rule = Rc::new(pairs);
        cache.borrow_mut().insert(key, rule.clone());
        rule
    })
}

pub(crate) fn legendre_rule(n: usize) -> Rule {
    jacobi_rule(n, 0.0, 0.0)
}
