//! Symbolic isolation bounds as functions of `k`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::FlatsError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", content = "args", rename_all = "kebab-case")]
pub enum SymbolicBound {
    /// The variable `k`.
    K,
    Num(u64),
    /// A named constant such as an edge-space diameter.
    Const(String),
    /// A named nondecreasing function of `k` with no known formula.
    Atom(String),
    Max(Box<SymbolicBound>, Box<SymbolicBound>),
    /// `D(f)(k) = f(2k) + 2k`.
    Double(Box<SymbolicBound>),
}

/// Values for constants, and polynomial coefficients (constant term first)
/// for atoms.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundEnv {
    pub consts: BTreeMap<String, u64>,
    pub atoms: BTreeMap<String, Vec<u64>>,
}

impl BoundEnv {
    pub fn constant(mut self, name: &str, v: u64) -> Self {
        self.consts.insert(name.into(), v);
        self
    }

    pub fn atom(mut self, name: &str, coeffs: &[u64]) -> Self {
        self.atoms.insert(name.into(), coeffs.to_vec());
        self
    }
}

impl SymbolicBound {
    pub fn atom(name: &str) -> Self {
        SymbolicBound::Atom(name.into())
    }

    pub fn constant(name: &str) -> Self {
        SymbolicBound::Const(name.into())
    }

    pub fn max(a: SymbolicBound, b: SymbolicBound) -> Self {
        SymbolicBound::Max(Box::new(a), Box::new(b))
    }

    pub fn double(f: SymbolicBound) -> Self {
        SymbolicBound::Double(Box::new(f))
    }

    pub fn eval(&self, k: u64, env: &BoundEnv) -> Result<u64, FlatsError> {
        let over = || FlatsError::Overflow(k);
        match self {
            SymbolicBound::K => Ok(k),
            SymbolicBound::Num(n) => Ok(*n),
            SymbolicBound::Const(c) => env.consts.get(c).copied().ok_or_else(|| FlatsError::Unassigned(c.clone())),
            SymbolicBound::Atom(a) => {
                let coeffs = env.atoms.get(a).ok_or_else(|| FlatsError::Unassigned(a.clone()))?;
                let mut acc: u64 = 0;
                for &c in coeffs.iter().rev() {
                    acc = acc.checked_mul(k).and_then(|x| x.checked_add(c)).ok_or_else(over)?;
                }
                Ok(acc)
            }
            SymbolicBound::Max(a, b) => Ok(a.eval(k, env)?.max(b.eval(k, env)?)),
            SymbolicBound::Double(f) => {
                let k2 = k.checked_mul(2).ok_or_else(over)?;
                f.eval(k2, env)?.checked_add(k2).ok_or_else(over)
            }
        }
    }

    /// Maximum over the leaves of a tree of `Max` nodes.
    pub fn terms(&self) -> Vec<&SymbolicBound> {
        match self {
            SymbolicBound::Max(a, b) => {
                let mut t = a.terms();
                t.extend(b.terms());
                t
            }
            x => vec![x],
        }
    }

    /// Text with every `D` expanded, `k` scaled by `m`.
    fn render(&self, m: u64) -> String {
        let arg = if m == 1 { "k".to_string() } else { format!("{m}k") };
        match self {
            SymbolicBound::K => arg,
            SymbolicBound::Num(n) => n.to_string(),
            SymbolicBound::Const(c) => c.clone(),
            SymbolicBound::Atom(a) => format!("{a}({arg})"),
            SymbolicBound::Max(..) => {
                let parts: Vec<String> = self.terms().iter().map(|t| t.render(m)).collect();
                format!("max{{{}}}", parts.join(", "))
            }
            SymbolicBound::Double(f) => format!("{} + {}k", f.render(2 * m), 2 * m),
        }
    }
}

impl fmt::Display for SymbolicBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(1))
    }
}

/// The bound for a one-edge combination: the maximum of `D` applied to each
/// vertex bound, each edge bound and the half-flat bound, and `diam + 2k`
/// for each edge-space diameter.
pub fn compose_isolation_bound(
    phi_v: &[SymbolicBound],
    psi_e: &[SymbolicBound],
    psi_prime: Option<&SymbolicBound>,
    edge_diams: &[String],
) -> Result<SymbolicBound, FlatsError> {
    let terms: Vec<SymbolicBound> = phi_v
        .iter()
        .chain(psi_e)
        .chain(psi_prime)
        .cloned()
        .chain(edge_diams.iter().map(|d| SymbolicBound::Const(d.clone())))
        .map(SymbolicBound::double)
        .collect();
    terms.into_iter().reduce(SymbolicBound::max).ok_or(FlatsError::EmptyBound)
}
