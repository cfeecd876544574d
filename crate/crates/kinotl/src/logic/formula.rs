use nalgebra::DVector;

use super::LogicError;

/// Which side of a hyperrectangle a predicate asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PredicateKind {
    /// State lies strictly inside the box.
    Inside,
    /// State lies outside the (closed) box.
    Outside,
}

/// Region-membership predicate over workspace coordinates.
///
/// For a box with uniform halfwidth `d` the robustness of the inside
/// predicate is `d - |x - center|_inf`: positive inside, zero on the
/// boundary, negative outside. Boxes with per-axis halfwidths are handled
/// by rescaling each coordinate by `min_halfwidth / halfwidth_i` before
/// taking the infinity norm, which reduces to the uniform rule for cubes
/// and still vanishes exactly on the box boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct Predicate {
    pub kind: PredicateKind,
    pub name: String,
    pub center: DVector<f64>,
    pub halfwidths: DVector<f64>,
}

impl Predicate {
    pub fn inside(name: impl Into<String>, center: DVector<f64>, halfwidths: DVector<f64>) -> Self {
        assert_eq!(center.len(), halfwidths.len());
        assert!(halfwidths.iter().all(|h| *h > 0.0), "halfwidths must be positive");
        Predicate { kind: PredicateKind::Inside, name: name.into(), center, halfwidths }
    }

    pub fn negated(&self) -> Predicate {
        let kind = match self.kind {
            PredicateKind::Inside => PredicateKind::Outside,
            PredicateKind::Outside => PredicateKind::Inside,
        };
        Predicate { kind, ..self.clone() }
    }

    /// Signed distance-to-satisfaction at a single workspace point.
    pub fn robustness(&self, x: &[f64]) -> Result<f64, LogicError> {
        if x.len() != self.center.len() {
            return Err(LogicError::DimensionMismatch { predicate: self.center.len(), state: x.len() });
        }
        let d_min = self.halfwidths.min();
        let mut dist = 0.0f64;
        for i in 0..x.len() {
            let scaled = (x[i] - self.center[i]).abs() * (d_min / self.halfwidths[i]);
            dist = dist.max(scaled);
        }
        let inside = d_min - dist;
        Ok(match self.kind {
            PredicateKind::Inside => inside,
            PredicateKind::Outside => -inside,
        })
    }
}

/// Formula AST. `And`/`Or` are strictly binary; n-ary conjunctions from the
/// parser are folded left.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    True,
    Predicate(Predicate),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
}

impl Formula {
    /// Rewrites into negation normal form.
    ///
    /// Negation is pushed down through connectives and temporal operators
    /// (`!F p` becomes `G !p`, `!G p` becomes `F p`-dual) and absorbed into
    /// predicates by flipping their side. After this pass `Not` survives
    /// only directly above `True`.
    pub fn into_nnf(self) -> Formula {
        match self {
            Formula::True | Formula::Predicate(_) => self,
            Formula::Not(inner) => inner.negate_nnf(),
            Formula::And(a, b) => Formula::And(Box::new(a.into_nnf()), Box::new(b.into_nnf())),
            Formula::Or(a, b) => Formula::Or(Box::new(a.into_nnf()), Box::new(b.into_nnf())),
            Formula::Eventually(a) => Formula::Eventually(Box::new(a.into_nnf())),
            Formula::Always(a) => Formula::Always(Box::new(a.into_nnf())),
        }
    }

    fn negate_nnf(self) -> Formula {
        match self {
            Formula::True => Formula::Not(Box::new(Formula::True)),
            Formula::Predicate(p) => Formula::Predicate(p.negated()),
            Formula::Not(inner) => inner.into_nnf(),
            Formula::And(a, b) => Formula::Or(Box::new(a.negate_nnf()), Box::new(b.negate_nnf())),
            Formula::Or(a, b) => Formula::And(Box::new(a.negate_nnf()), Box::new(b.negate_nnf())),
            Formula::Eventually(a) => Formula::Always(Box::new(a.negate_nnf())),
            Formula::Always(a) => Formula::Eventually(Box::new(a.negate_nnf())),
        }
    }

    /// Number of subformula nodes (size of a robustness state).
    pub fn node_count(&self) -> usize {
        match self {
            Formula::True | Formula::Predicate(_) => 1,
            Formula::Not(a) | Formula::Eventually(a) | Formula::Always(a) => 1 + a.node_count(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.node_count() + b.node_count(),
        }
    }
}
