//! Robustness-monitor properties checked against the independent batch
//! oracle in `common`.

mod common;

use common::{batch_robustness, pointwise, random_formula, random_segments, random_trace};
use kinotl::logic::{capped, CompiledFormula, Formula, Predicate, PredicateKind};
use nalgebra::{dvector, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const RHO_MAX: f64 = 8.49;

/// Incremental monitoring with an arbitrary segmentation must equal the
/// from-scratch batch evaluation.
fn incremental_root(formula: &Formula, trace: &[Vec<f64>], rng: &mut impl Rng) -> f64 {
    let compiled = CompiledFormula::compile(formula, RHO_MAX);
    let mut state = compiled.init(&trace[0]).unwrap();
    if trace.len() > 1 {
        for segment in random_segments(rng, &trace[1..]) {
            state = compiled.update(&state, segment.iter().map(|s| s.as_slice())).unwrap();
        }
    }
    state.root()
}

#[test]
fn incremental_monitor_matches_batch_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for case in 0..1000 {
        let formula = random_formula(&mut rng, 4).into_nnf();
        let trace = random_trace(&mut rng, 50);
        let incremental = incremental_root(&formula, &trace, &mut rng);
        let batch = batch_robustness(&formula, &trace, RHO_MAX);
        assert!(
            (incremental - batch).abs() <= 1e-12,
            "case {case}: incremental {incremental} vs batch {batch}\nformula: {formula:?}"
        );
    }
}

#[test]
fn nnf_preserves_batch_semantics() {
    // Negation pushing is a semantic no-op, checked on sampled trajectories.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let formula = random_formula(&mut rng, 3);
        let nnf = formula.clone().into_nnf();
        let trace = random_trace(&mut rng, 5);
        let direct = batch_robustness(&formula, &trace, RHO_MAX);
        let normalized = batch_robustness(&nnf, &trace, RHO_MAX);
        assert!(
            (direct - normalized).abs() <= 1e-12,
            "formula {formula:?} vs nnf {nnf:?}: {direct} vs {normalized}"
        );
    }
}

#[test]
fn eventually_prefix_monotone_always_antitone() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..200 {
        let child = random_formula(&mut rng, 2).into_nnf();
        let trace = random_trace(&mut rng, 30);
        for (formula, sign) in [
            (Formula::Eventually(Box::new(child.clone())), 1.0),
            (Formula::Always(Box::new(child.clone())), -1.0),
        ] {
            let compiled = CompiledFormula::compile(&formula, RHO_MAX);
            let mut state = compiled.init(&trace[0]).unwrap();
            let mut prev = state.root();
            for sample in &trace[1..] {
                state = compiled.update(&state, [sample.as_slice()]).unwrap();
                let cur = state.root();
                assert!(
                    sign * (cur - prev) >= -1e-15,
                    "prefix monotonicity violated: {prev} -> {cur}"
                );
                prev = cur;
            }
        }
    }
}

#[test]
fn edge_costs_telescope_to_capped_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let formula = random_formula(&mut rng, 3).into_nnf();
        let compiled = CompiledFormula::compile(&formula, RHO_MAX);
        let trace = random_trace(&mut rng, 40);
        let mut state = compiled.init(&trace[0]).unwrap();
        let first_capped = state.capped_root();
        let mut total_cost = 0.0;
        if trace.len() > 1 {
            for segment in random_segments(&mut rng, &trace[1..]) {
                let next = compiled.update(&state, segment.iter().map(|s| s.as_slice())).unwrap();
                total_cost += compiled.edge_cost(&state, &next);
                state = next;
            }
        }
        let telescoped = first_capped - state.capped_root();
        assert!(
            (total_cost - telescoped).abs() <= 1e-12,
            "sum {total_cost} vs telescoped {telescoped}"
        );
        // Satisfied trajectories accumulate nonpositive total cost from a
        // satisfied start.
        if first_capped == 0.0 && state.capped_root() == 0.0 {
            assert_eq!(total_cost, 0.0);
        }
    }
}

proptest! {
    /// Negating a predicate exactly negates its robustness everywhere.
    #[test]
    fn predicate_negation_duality(
        cx in 0.0..6.0f64, cy in 0.0..6.0f64,
        hx in 0.05..2.0f64, hy in 0.05..2.0f64,
        px in -2.0..8.0f64, py in -2.0..8.0f64,
    ) {
        let p = Predicate::inside("R", dvector![cx, cy], dvector![hx, hy]);
        let value = p.robustness(&[px, py]).unwrap();
        let negated = p.negated().robustness(&[px, py]).unwrap();
        prop_assert_eq!(value, -negated);
        prop_assert_eq!(p.negated().kind, PredicateKind::Outside);
    }

    /// Capped robustness never goes positive.
    #[test]
    fn capped_robustness_is_nonpositive(v in -100.0..100.0f64) {
        prop_assert!(capped(v) <= 0.0);
        if v <= 0.0 { prop_assert_eq!(capped(v), v); }
    }
}

#[test]
fn lattice_laws_hold_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..300 {
        let a = random_formula(&mut rng, 2).into_nnf();
        let b = random_formula(&mut rng, 2).into_nnf();
        let x = [rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0)];
        let and = Formula::And(Box::new(a.clone()), Box::new(b.clone()));
        let or = Formula::Or(Box::new(a.clone()), Box::new(b.clone()));
        // Oracle-side law.
        let (va, vb) = (pointwise(&a, &x, RHO_MAX), pointwise(&b, &x, RHO_MAX));
        assert_eq!(pointwise(&and, &x, RHO_MAX), va.min(vb));
        assert_eq!(pointwise(&or, &x, RHO_MAX), va.max(vb));
        // Monitor-side law on a single-point trace, exact within the
        // implementation's own arithmetic.
        let (ca, cb) = (
            CompiledFormula::compile(&a, RHO_MAX).init(&x).unwrap().root(),
            CompiledFormula::compile(&b, RHO_MAX).init(&x).unwrap().root(),
        );
        let c_and = CompiledFormula::compile(&and, RHO_MAX);
        let c_or = CompiledFormula::compile(&or, RHO_MAX);
        assert_eq!(c_and.init(&x).unwrap().root(), ca.min(cb));
        assert_eq!(c_or.init(&x).unwrap().root(), ca.max(cb));
    }
}

#[test]
fn satisfaction_threshold_matches_boolean_semantics() {
    // Positive robustness implies every sampled point respects the formula
    // under the boolean reading; checked for a concrete reach-avoid case.
    let target = Predicate::inside("T", dvector![1.0, 1.0], dvector![0.5, 0.5]);
    let obstacle = Predicate::inside("O", dvector![3.0, 3.0], dvector![0.5, 0.5]);
    let formula = Formula::And(
        Box::new(Formula::Eventually(Box::new(Formula::Predicate(target.clone())))),
        Box::new(Formula::Not(Box::new(Formula::Eventually(Box::new(
            Formula::Predicate(obstacle.clone()),
        ))))),
    )
    .into_nnf();
    let compiled = CompiledFormula::compile(&formula, RHO_MAX);
    let trace: Vec<Vec<f64>> = vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]];
    let root = compiled.trace_robustness(&trace).unwrap().root();
    assert!(root > 0.0);
    let visits_target = trace.iter().any(|p| target.robustness(p).unwrap() > 0.0);
    let avoids_obstacle = trace.iter().all(|p| obstacle.robustness(p).unwrap() < 0.0);
    assert!(visits_target && avoids_obstacle);
}

#[test]
fn update_over_dvector_segments() {
    // The monitor accepts any AsRef<[f64]> sample container.
    let formula = Formula::Eventually(Box::new(Formula::Predicate(Predicate::inside(
        "T",
        dvector![1.0, 1.0],
        dvector![0.5, 0.5],
    ))));
    let compiled = CompiledFormula::compile(&formula, RHO_MAX);
    let state = compiled.init(&[0.0, 0.0]).unwrap();
    let segment: Vec<DVector<f64>> = vec![dvector![0.5, 0.5], dvector![1.0, 1.0]];
    let segment: Vec<Vec<f64>> = segment.iter().map(|v| v.iter().copied().collect()).collect();
    let next = compiled.update(&state, segment.iter().map(|s| s.as_slice())).unwrap();
    assert_eq!(next.root(), 0.5);
}
