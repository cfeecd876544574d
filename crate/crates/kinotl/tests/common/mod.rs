//! Shared test oracles, independent of the library's incremental
//! implementations: a from-scratch batch robustness evaluator, random
//! formula/trace generators, and quadrature helpers.

#![allow(dead_code)]

use kinotl::logic::{Formula, Predicate, PredicateKind};
use nalgebra::{DMatrix, DVector};
use rand::Rng;

/// Pointwise robustness with temporal operators collapsed to their child:
/// over a single instant, "eventually" and "always" both mean "now".
pub fn pointwise(f: &Formula, x: &[f64], rho_max: f64) -> f64 {
    match f {
        Formula::True => rho_max,
        Formula::Predicate(p) => predicate_value(p, x),
        Formula::Not(a) => -pointwise(a, x, rho_max),
        Formula::And(a, b) => pointwise(a, x, rho_max).min(pointwise(b, x, rho_max)),
        Formula::Or(a, b) => pointwise(a, x, rho_max).max(pointwise(b, x, rho_max)),
        Formula::Eventually(a) | Formula::Always(a) => pointwise(a, x, rho_max),
    }
}

/// Box robustness recomputed from the region geometry (not via the
/// library's predicate code): min-halfwidth minus the rescaled
/// infinity-norm distance, sign-flipped for outside predicates.
fn predicate_value(p: &Predicate, x: &[f64]) -> f64 {
    let d_min = p.halfwidths.iter().copied().fold(f64::INFINITY, f64::min);
    let mut dist = 0.0f64;
    for i in 0..x.len() {
        dist = dist.max((x[i] - p.center[i]).abs() * d_min / p.halfwidths[i]);
    }
    match p.kind {
        PredicateKind::Inside => d_min - dist,
        PredicateKind::Outside => dist - d_min,
    }
}

/// Batch robustness of a finite sampled trajectory: temporal operators
/// scan the whole trace pointwise, boolean connectives combine their
/// children, and non-temporal leaves read the trace endpoint.
pub fn batch_robustness(f: &Formula, trace: &[Vec<f64>], rho_max: f64) -> f64 {
    match f {
        Formula::True => rho_max,
        Formula::Predicate(p) => predicate_value(p, trace.last().expect("nonempty trace")),
        Formula::Not(a) => -batch_robustness(a, trace, rho_max),
        Formula::And(a, b) => {
            batch_robustness(a, trace, rho_max).min(batch_robustness(b, trace, rho_max))
        }
        Formula::Or(a, b) => {
            batch_robustness(a, trace, rho_max).max(batch_robustness(b, trace, rho_max))
        }
        Formula::Eventually(a) => trace
            .iter()
            .map(|x| pointwise(a, x, rho_max))
            .fold(f64::NEG_INFINITY, f64::max),
        Formula::Always(a) => trace
            .iter()
            .map(|x| pointwise(a, x, rho_max))
            .fold(f64::INFINITY, f64::min),
    }
}

/// Random formula over 2-D boxes inside [0, 6]^2, depth-bounded.
pub fn random_formula(rng: &mut impl Rng, depth: usize) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        if rng.gen_bool(0.15) {
            return Formula::True;
        }
        let center = DVector::from_fn(2, |_, _| rng.gen_range(0.5..5.5));
        let halfwidths = DVector::from_fn(2, |_, _| rng.gen_range(0.2..1.2));
        let p = Predicate::inside(format!("R{}", rng.gen_range(0..100)), center, halfwidths);
        return Formula::Predicate(p);
    }
    match rng.gen_range(0..5) {
        0 => Formula::Not(Box::new(random_formula(rng, depth - 1))),
        1 => Formula::And(
            Box::new(random_formula(rng, depth - 1)),
            Box::new(random_formula(rng, depth - 1)),
        ),
        2 => Formula::Or(
            Box::new(random_formula(rng, depth - 1)),
            Box::new(random_formula(rng, depth - 1)),
        ),
        3 => Formula::Eventually(Box::new(random_formula(rng, depth - 1))),
        _ => Formula::Always(Box::new(random_formula(rng, depth - 1))),
    }
}

/// Random-walk trace of up to `max_len` samples in [0, 6]^2.
pub fn random_trace(rng: &mut impl Rng, max_len: usize) -> Vec<Vec<f64>> {
    let len = rng.gen_range(1..=max_len);
    let mut point = vec![rng.gen_range(0.0..6.0), rng.gen_range(0.0..6.0)];
    let mut trace = vec![point.clone()];
    for _ in 1..len {
        for coord in point.iter_mut() {
            *coord = (*coord + rng.gen_range(-0.4..0.4f64)).clamp(0.0, 6.0);
        }
        trace.push(point.clone());
    }
    trace
}

/// Splits `items` into random contiguous nonempty chunks.
pub fn random_segments<'a, T>(rng: &mut impl Rng, items: &'a [T]) -> Vec<&'a [T]> {
    let mut segments = Vec::new();
    let mut start = 0;
    while start < items.len() {
        let len = rng.gen_range(1..=(items.len() - start).min(7));
        segments.push(&items[start..start + len]);
        start += len;
    }
    segments
}

/// Classical RK4 with an exact step count, so sample indices align with an
/// outer grid (the library integrator rounds the step count up, which can
/// shift the grid by one step).
pub fn rk4_fixed_steps(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    d: &DVector<f64>,
    x0: &DVector<f64>,
    u: &dyn Fn(f64) -> DVector<f64>,
    tau: f64,
    steps: usize,
) -> Vec<DVector<f64>> {
    let h = tau / steps as f64;
    let deriv = |t: f64, x: &DVector<f64>| -> DVector<f64> { a * x + b * u(t) + d };
    let mut states = Vec::with_capacity(steps + 1);
    let mut x = x0.clone();
    states.push(x.clone());
    for k in 0..steps {
        let t = k as f64 * h;
        let k1 = deriv(t, &x);
        let k2 = deriv(t + 0.5 * h, &(&x + &k1 * (0.5 * h)));
        let k3 = deriv(t + 0.5 * h, &(&x + &k2 * (0.5 * h)));
        let k4 = deriv(t + h, &(&x + &k3 * h));
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        states.push(x.clone());
    }
    states
}

/// Adaptive Simpson quadrature of a matrix-valued integrand, refined until
/// successive halvings agree entrywise below `tol`.
pub fn simpson_matrix(
    f: &dyn Fn(f64) -> DMatrix<f64>,
    a: f64,
    b: f64,
    tol: f64,
) -> DMatrix<f64> {
    let mut intervals = 8usize;
    let mut prev = composite_simpson(f, a, b, intervals);
    loop {
        intervals *= 2;
        let next = composite_simpson(f, a, b, intervals);
        let diff = (&next - &prev).amax();
        if diff < tol || intervals >= 4096 {
            return next;
        }
        prev = next;
    }
}

fn composite_simpson(f: &dyn Fn(f64) -> DMatrix<f64>, a: f64, b: f64, n: usize) -> DMatrix<f64> {
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let weight = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(a + k as f64 * h) * weight;
    }
    acc * (h / 3.0)
}

/// Scalar composite Simpson over tabulated values with uniform spacing.
/// An odd interval count ends in a 3/8 panel so the rule stays exact for
/// cubics; only a 2-point table falls back to a trapezoid.
pub fn simpson_tabulated(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    if n == 2 {
        return 0.5 * h * (values[0] + values[1]);
    }
    let intervals = n - 1;
    let (simpson_end, tail_38) = if intervals % 2 == 0 { (n - 1, false) } else { (n - 4, true) };
    let mut total = 0.0;
    let mut i = 0;
    while i + 2 <= simpson_end {
        total += h / 3.0 * (values[i] + 4.0 * values[i + 1] + values[i + 2]);
        i += 2;
    }
    if tail_38 {
        let j = n - 4;
        total += 3.0 * h / 8.0
            * (values[j] + 3.0 * values[j + 1] + 3.0 * values[j + 2] + values[j + 3]);
    }
    total
}
