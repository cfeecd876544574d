use super::formula::{Formula, Predicate};
use super::LogicError;

/// Per-node robustness memo: one value per subformula, indexed by the
/// canonical postorder enumeration of the compiled formula. The root slot is
/// last.
///
/// Slot semantics after folding a trajectory prefix:
/// - predicate / boolean slots hold the value at the prefix endpoint,
/// - `F` slots hold the running maximum of the child's pointwise value,
/// - `G` slots hold the running minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessState {
    values: Vec<f64>,
}

impl RobustnessState {
    /// Robustness of the whole formula for the monitored prefix.
    pub fn root(&self) -> f64 {
        *self.values.last().expect("robustness state is never empty")
    }

    /// Capped root robustness (violation part only, always <= 0).
    pub fn capped_root(&self) -> f64 {
        super::capped(self.root())
    }

    pub fn slots(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, Copy)]
enum Node {
    True,
    Pred(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Eventually(usize),
    Always(usize),
}

/// Formula flattened into a postorder arena for fast repeated evaluation.
///
/// `rho_max` is the robustness assigned to the `true` literal; callers pick
/// a scale that dominates any meaningful signed distance in the workspace
/// (the workspace diagonal is the conventional choice).
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
    predicates: Vec<Predicate>,
    rho_max: f64,
}

impl CompiledFormula {
    pub fn compile(formula: &Formula, rho_max: f64) -> Self {
        let mut compiled = CompiledFormula { nodes: Vec::new(), predicates: Vec::new(), rho_max };
        compiled.push(formula);
        compiled
    }

    fn push(&mut self, formula: &Formula) -> usize {
        let node = match formula {
            Formula::True => Node::True,
            Formula::Predicate(p) => {
                self.predicates.push(p.clone());
                Node::Pred(self.predicates.len() - 1)
            }
            Formula::Not(a) => Node::Not(self.push(a)),
            Formula::And(a, b) => {
                let ia = self.push(a);
                let ib = self.push(b);
                Node::And(ia, ib)
            }
            Formula::Or(a, b) => {
                let ia = self.push(a);
                let ib = self.push(b);
                Node::Or(ia, ib)
            }
            Formula::Eventually(a) => Node::Eventually(self.push(a)),
            Formula::Always(a) => Node::Always(self.push(a)),
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    /// Pointwise values of every subformula at a single state. Temporal
    /// operators collapse to their child: over a single instant, "eventually"
    /// and "always" both reduce to "now".
    fn pointwise_into(&self, x: &[f64], out: &mut [f64]) -> Result<(), LogicError> {
        for (i, node) in self.nodes.iter().enumerate() {
            out[i] = match *node {
                Node::True => self.rho_max,
                Node::Pred(p) => self.predicates[p].robustness(x)?,
                Node::Not(c) => -out[c],
                Node::And(a, b) => out[a].min(out[b]),
                Node::Or(a, b) => out[a].max(out[b]),
                Node::Eventually(c) | Node::Always(c) => out[c],
            };
        }
        Ok(())
    }

    /// Robustness state for the length-one prefix consisting of `x0` alone.
    /// Temporal slots are seeded with the child's pointwise value.
    pub fn init(&self, x0: &[f64]) -> Result<RobustnessState, LogicError> {
        let mut pw = vec![0.0; self.nodes.len()];
        self.pointwise_into(x0, &mut pw)?;
        // At a single point every slot equals the pointwise collapse.
        Ok(RobustnessState { values: pw })
    }

    /// Folds a sampled edge segment into a parent state.
    ///
    /// The segment must exclude the parent's endpoint (already counted) and
    /// include the new endpoint. Samples are processed in trajectory order:
    /// `F`/`G` slots take running max/min of the child's pointwise values,
    /// boolean and predicate slots end up reflecting the segment endpoint.
    pub fn update(
        &self,
        parent: &RobustnessState,
        segment: impl IntoIterator<Item = impl AsRef<[f64]>>,
    ) -> Result<RobustnessState, LogicError> {
        let mut values = parent.values.clone();
        let mut pw = vec![0.0; self.nodes.len()];
        let mut saw_sample = false;
        for sample in segment {
            saw_sample = true;
            let x = sample.as_ref();
            self.pointwise_into(x, &mut pw)?;
            for (i, node) in self.nodes.iter().enumerate() {
                values[i] = match *node {
                    Node::True => self.rho_max,
                    Node::Pred(p) => self.predicates[p].robustness(x)?,
                    Node::Not(c) => -values[c],
                    Node::And(a, b) => values[a].min(values[b]),
                    Node::Or(a, b) => values[a].max(values[b]),
                    Node::Eventually(c) => values[i].max(pw[c]),
                    Node::Always(c) => values[i].min(pw[c]),
                };
            }
        }
        if !saw_sample {
            return Err(LogicError::EmptySegment);
        }
        Ok(RobustnessState { values })
    }

    /// Robustness of a whole sampled trajectory monitored from scratch.
    pub fn trace_robustness(
        &self,
        trace: &[impl AsRef<[f64]>],
    ) -> Result<RobustnessState, LogicError> {
        if trace.is_empty() {
            return Err(LogicError::EmptySegment);
        }
        let mut state = self.init(trace[0].as_ref())?;
        if trace.len() > 1 {
            state = self.update(&state, trace[1..].iter().map(|x| x.as_ref()))?;
        }
        Ok(state)
    }

    /// Edge cost contributed by the specification: the drop in capped root
    /// robustness from parent to child, negated. Costs over a path telescope
    /// to `capped(start prefix) - capped(full path)`, so minimizing their sum
    /// maximizes the capped robustness of the whole trajectory. Values may be
    /// negative when an edge improves robustness.
    pub fn edge_cost(&self, parent: &RobustnessState, child: &RobustnessState) -> f64 {
        parent.capped_root() - child.capped_root()
    }
}
