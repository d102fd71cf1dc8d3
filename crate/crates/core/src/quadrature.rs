//! Quadrature rules, deterministic summation and monotone interpolation.
//!
//! Every reduction here runs in a fixed index order so that results do not
//! depend on how work was split between threads.

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on `P_n`, started at the Chebyshev-like
    /// guess `cos(π(i - 1/4)/(n + 1/2))`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss–Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// `∫_a^b f` with the nodes mapped onto `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// Pairwise (cascade) summation with a fixed split point.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Running sums `out[0] = 0`, `out[k] = Σ_{j<k} values[j]` with Neumaier
/// compensation.
pub fn compensated_prefix(values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len() + 1);
    out.push(0.0);
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for &v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
        out.push(sum + comp);
    }
    out
}

/// Trapezoid rule on uniformly spaced samples.
pub fn trapezoid_uniform(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (pairwise_sum(&values[1..n - 1]) + 0.5 * (values[0] + values[n - 1])),
    }
}

/// Cumulative trapezoid: `out[k] ≈ ∫_{x_0}^{x_k}`.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let panels: Vec<f64> = values.windows(2).map(|w| 0.5 * h * (w[0] + w[1])).collect();
    compensated_prefix(&panels)
}

/// Fritsch–Carlson slopes for monotone piecewise-cubic Hermite interpolation
/// of uniformly spaced data.
pub fn pchip_slopes(y: &[f64], h: f64) -> Vec<f64> {
    let n = y.len();
    if n < 2 {
        return vec![0.0; n];
    }
    let delta: Vec<f64> = y.windows(2).map(|w| (w[1] - w[0]) / h).collect();
    let mut m = vec![0.0; n];
    m[0] = delta[0];
    m[n - 1] = delta[n - 2];
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        m[k] = if a * b <= 0.0 {
            0.0
        } else {
            // harmonic mean keeps the interpolant monotone on uniform grids
            2.0 * a * b / (a + b)
        };
    }
    m
}

/// Evaluate the Hermite cubic on cell `k` (`x_k = x0 + k h`) at local offset
/// `s ∈ [0, 1]`.
pub fn hermite(y: &[f64], m: &[f64], h: f64, k: usize, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y[k] + h10 * h * m[k] + h01 * y[k + 1] + h11 * h * m[k + 1]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_point_rule_is_exact_to_degree_fifteen() {
        let gl = GaussLegendre::new(8);
        assert!((gl.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for deg in 0..=15 {
            let got = gl.integrate(0.0, 1.0, |x| x.powi(deg));
            assert!(
                (got - 1.0 / f64::from(deg + 1)).abs() < 1e-14,
                "degree {deg}"
            );
        }
        // known largest node of the 8-point rule
        assert!((gl.nodes[7] - 0.960_289_856_497_536_3).abs() < 1e-15);
    }

    #[test]
    fn odd_rules_contain_zero() {
        let gl = GaussLegendre::new(5);
        assert_eq!(gl.nodes[2], 0.0);
        assert!((gl.integrate(-1.0, 1.0, |x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn pairwise_and_compensated_sums() {
        let v: Vec<f64> = (0..10_000).map(|i| 0.1 + f64::from(i) * 1e-3).collect();
        let exact = 10_000.0 * 0.1 + 1e-3 * 9999.0 * 10_000.0 / 2.0;
        assert!((pairwise_sum(&v) - exact).abs() < 1e-9);
        let p = compensated_prefix(&v);
        assert_eq!(p.len(), v.len() + 1);
        assert_eq!(p[0], 0.0);
        assert!((p[10_000] - exact).abs() < 1e-9);
    }

    #[test]
    fn trapezoid_on_a_line_is_exact() {
        let h = 0.5;
        let y: Vec<f64> = (0..9).map(|i| 3.0 * f64::from(i) * h + 1.0).collect();
        assert!((trapezoid_uniform(&y, h) - (1.5 * 16.0 + 4.0)).abs() < 1e-12);
        let c = cumulative_trapezoid(&y, h);
        assert!((c[8] - trapezoid_uniform(&y, h)).abs() < 1e-12);
    }

    #[test]
    fn pchip_preserves_monotone_data() {
        let h = 1.0;
        let y = [0.0, 0.1, 0.1, 5.0, 5.2, 9.0];
        let m = pchip_slopes(&y, h);
        for k in 0..y.len() - 1 {
            let mut prev = y[k];
            for i in 1..=20 {
                let v = hermite(&y, &m, h, k, f64::from(i) / 20.0);
                assert!(v >= prev - 1e-12);
                prev = v;
            }
        }
    }
}
