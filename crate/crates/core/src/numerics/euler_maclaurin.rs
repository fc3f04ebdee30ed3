//! Euler–Maclaurin summation and the even Bernoulli numbers it needs.

/// `B_{2k}` for `k = 0..=15`.
#[allow(clippy::excessive_precision)]
const BERNOULLI_EVEN: [f64; 16] = [
    1.0,
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
    8553103.0 / 6.0,
    -23749461029.0 / 870.0,
    8615841276005.0 / 14322.0,
];

/// The Bernoulli number `B_{2k}`, `k ≤ 15`.
pub fn bernoulli_even(k: usize) -> f64 {
    BERNOULLI_EVEN[k]
}

/// A smooth summand with the analytic data Euler–Maclaurin needs.
pub trait Summand {
    fn value(&self, x: f64) -> f64;

    /// `∫_a^b f(x) dx`.
    fn integral(&self, a: f64, b: f64) -> f64;

    /// The derivative `f^{(order)}(x)`; only odd orders are requested.
    fn derivative(&self, order: usize, x: f64) -> f64;
}

/// A [`Summand`] assembled from closures.
pub struct FnSummand<V, I, D> {
    pub value: V,
    pub antiderivative: I,
    pub derivative: D,
}

impl<V, I, D> Summand for FnSummand<V, I, D>
where
    V: Fn(f64) -> f64,
    I: Fn(f64) -> f64,
    D: Fn(usize, f64) -> f64,
{
    fn value(&self, x: f64) -> f64 {
        (self.value)(x)
    }

    fn integral(&self, a: f64, b: f64) -> f64 {
        (self.antiderivative)(b) - (self.antiderivative)(a)
    }

    fn derivative(&self, order: usize, x: f64) -> f64 {
        (self.derivative)(order, x)
    }
}

/// Approximates `Σ_{j=m}^{n} f(j)` by
/// `∫_m^n f + (f(m)+f(n))/2 + Σ_{k=1}^{orders} B_{2k}/(2k)! (f^{(2k−1)}(n) − f^{(2k−1)}(m))`.
///
/// The result is exact for polynomials of degree at most `2·orders + 1`.
pub fn euler_maclaurin_sum<S: Summand + ?Sized>(f: &S, m: i64, n: i64, orders: usize) -> f64 {
    assert!(m <= n, "empty summation range {m}..={n}");
    assert!(
        orders < BERNOULLI_EVEN.len(),
        "at most {} correction terms",
        BERNOULLI_EVEN.len() - 1
    );
    let (a, b) = (m as f64, n as f64);
    let mut total = f.integral(a, b) + 0.5 * (f.value(a) + f.value(b));
    let mut factorial = 1.0;
    for (k, bernoulli) in BERNOULLI_EVEN.iter().enumerate().take(orders + 1).skip(1) {
        let two_k = 2 * k;
        factorial *= (two_k - 1) as f64 * two_k as f64;
        let order = two_k - 1;
        total += bernoulli / factorial * (f.derivative(order, b) - f.derivative(order, a));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> f64 {
        (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
    }

    #[test]
    fn bernoulli_recurrence() {
        // Σ_{k=0}^{m} C(m+1, k) B_k = 0 for m ≥ 1, with B_1 = −1/2 and odd B_k = 0 beyond.
        for m in 2..=30u64 {
            let mut s = 0.0;
            let mut scale: f64 = 0.0;
            for k in 0..=m {
                let b = match k {
                    1 => -0.5,
                    k if k % 2 == 1 => 0.0,
                    k => bernoulli_even((k / 2) as usize),
                };
                let term = binomial(m + 1, k) * b;
                scale = scale.max(term.abs());
                s += term;
            }
            assert!(s.abs() <= 1e-13 * scale.max(1.0), "m = {m}: {s}");
        }
    }

    fn polynomial(coeffs: Vec<f64>) -> impl Summand {
        let c1 = coeffs.clone();
        let c2 = coeffs.clone();
        FnSummand {
            value: move |x: f64| c1.iter().rev().fold(0.0, |acc, &c| acc * x + c),
            antiderivative: move |x: f64| {
                c2.iter()
                    .enumerate()
                    .map(|(i, &c)| c * x.powi(i as i32 + 1) / (i as f64 + 1.0))
                    .sum()
            },
            derivative: move |order: usize, x: f64| {
                coeffs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i >= order)
                    .map(|(i, &c)| {
                        let falling: f64 = (0..order).map(|t| (i - t) as f64).product();
                        c * falling * x.powi((i - order) as i32)
                    })
                    .sum()
            },
        }
    }

    #[test]
    fn linear_and_quadratic_sums() {
        assert_eq!(euler_maclaurin_sum(&polynomial(vec![0.0, 1.0]), 0, 10, 1), 55.0);
        assert_eq!(
            euler_maclaurin_sum(&polynomial(vec![0.0, 0.0, 1.0]), 1, 100, 1),
            338350.0
        );
    }

    #[test]
    fn exact_up_to_degree_two_k_plus_one() {
        for orders in 1..=4usize {
            let degree = 2 * orders + 1;
            let coeffs: Vec<f64> = (0..=degree).map(|i| 1.0 + 0.25 * i as f64).collect();
            let p = polynomial(coeffs);
            let direct: f64 = (-3..=17).map(|j| p.value(j as f64)).sum();
            let em = euler_maclaurin_sum(&p, -3, 17, orders);
            assert!(
                ((em - direct) / direct).abs() < 1e-13,
                "orders {orders}: {em} vs {direct}"
            );
        }
    }

    #[test]
    fn log_sum_within_remainder_bound() {
        let f = FnSummand {
            value: |x: f64| x.ln(),
            antiderivative: |x: f64| x * x.ln() - x,
            derivative: |order: usize, x: f64| {
                let sign = if order % 2 == 1 { 1.0 } else { -1.0 };
                let fact: f64 = (1..order).map(|t| t as f64).product();
                sign * fact / x.powi(order as i32)
            },
        };
        let em = euler_maclaurin_sum(&f, 1, 50, 1);
        let exact = crate::specfun::log_factorial(50);
        // |R_2| ≤ 2ζ(4)/(2π)^4 ∫_1^50 |f''''|, with f'''' = −6/x^4.
        let zeta4 = std::f64::consts::PI.powi(4) / 90.0;
        let bound = 2.0 * zeta4 / (2.0 * std::f64::consts::PI).powi(4) * 2.0 * (1.0 - 50f64.powi(-3));
        assert!((em - exact).abs() <= bound, "{} > {bound}", (em - exact).abs());
        // A second correction tightens it substantially.
        let em2 = euler_maclaurin_sum(&f, 1, 50, 2);
        assert!((em2 - exact).abs() < 0.3 * (em - exact).abs());
    }
}
