use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exact::{int, Rational};
use crate::poly::Polynomial;
use crate::problems::{
    maxcut_objective, maxkcsp_objective, maxksat_objective, CnfFormula, CspInstance, Graph,
};
use crate::relax::{ConstrainedProgram, PolyConstraint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    MaxCut,
    MaxKSat,
    MaxKCsp,
    Polynomial,
}

/// A maximization problem with its cost ceiling `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub kind: ProblemKind,
    pub program: ConstrainedProgram,
    /// Upper bound on the objective over `{0,1}^n`.
    pub cost_ceiling: Rational,
}

impl Instance {
    /// `H = |E|`.
    pub fn from_graph(name: impl Into<String>, g: &Graph) -> Self {
        Instance {
            name: name.into(),
            kind: ProblemKind::MaxCut,
            program: ConstrainedProgram::unconstrained(maxcut_objective(g)),
            cost_ceiling: int(g.num_edges() as i64),
        }
    }

    /// `H = m`, the clause count.
    pub fn from_cnf(name: impl Into<String>, f: &CnfFormula) -> Result<Self> {
        Ok(Instance {
            name: name.into(),
            kind: ProblemKind::MaxKSat,
            program: ConstrainedProgram::unconstrained(maxksat_objective(f)?),
            cost_ceiling: int(f.num_clauses() as i64),
        })
    }

    /// `H = m`, the constraint count.
    pub fn from_csp(name: impl Into<String>, c: &CspInstance) -> Self {
        Instance {
            name: name.into(),
            kind: ProblemKind::MaxKCsp,
            program: ConstrainedProgram::unconstrained(maxkcsp_objective(c)),
            cost_ceiling: int(c.num_constraints() as i64),
        }
    }

    /// `H` is the sum of the positive coefficients, which bounds `p` on the
    /// cube for a multilinear `p`.
    pub fn from_polynomial(name: impl Into<String>, p: Polynomial) -> Self {
        let ml = p.multilinearize();
        let h = ml
            .terms()
            .map(|(_, c)| c)
            .filter(|c| c.is_positive())
            .fold(Rational::zero(), |acc, c| acc + c);
        Instance {
            name: name.into(),
            kind: ProblemKind::Polynomial,
            program: ConstrainedProgram::unconstrained(p),
            cost_ceiling: h,
        }
    }

    pub fn with_constraints(mut self, constraints: Vec<PolyConstraint>) -> Result<Self> {
        self.program = ConstrainedProgram::new(self.program.objective, constraints)?;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.program.n()
    }

    pub fn objective(&self) -> &Polynomial {
        &self.program.objective
    }

    pub fn is_constrained(&self) -> bool {
        !self.program.constraints.is_empty()
    }
}
