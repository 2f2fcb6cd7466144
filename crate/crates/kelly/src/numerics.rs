//! Shared numerical kernels: a log-factorial table, a bracketing root
//! finder, and adaptive Gauss-Kronrod quadrature.

/// Table of ln k! for k = 0..=max_n, accumulated with compensated summation
/// so binomial log-weights stay accurate for large n.
pub(crate) struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(max_n: usize) -> Self {
        let mut table = Vec::with_capacity(max_n + 1);
        table.push(0.0);
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for k in 1..=max_n {
            let y = (k as f64).ln() - comp;
            let t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            table.push(sum);
        }
        LnFactorial { table }
    }

    pub fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.table[n] - self.table[k] - self.table[n - k]
    }

    /// ln P(k | n, p) for the binomial distribution. The degenerate p = 0
    /// and p = 1 cases put all mass on k = 0 and k = n respectively.
    pub fn ln_pmf(&self, n: usize, k: usize, p: f64) -> f64 {
        if p == 0.0 {
            return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
        }
        if p == 1.0 {
            return if k == n { 0.0 } else { f64::NEG_INFINITY };
        }
        self.ln_choose(n, k) + k as f64 * p.ln() + (n - k) as f64 * (-p).ln_1p()
    }

    pub fn pmf(&self, n: usize, k: usize, p: f64) -> f64 {
        self.ln_pmf(n, k, p).exp()
    }
}

/// Root of f on [a, b], assuming f(a) and f(b) straddle zero. Secant steps
/// alternate with bisection, so the bracket shrinks geometrically no matter
/// how badly f is scaled; stops once the bracket is narrower than xtol.
pub(crate) fn solve_bracketed<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let fb0 = f(b);
    if fa == 0.0 {
        return a;
    }
    if fb0 == 0.0 {
        return b;
    }
    debug_assert!((fa < 0.0) != (fb0 < 0.0), "root not bracketed");
    let mut fb = fb0;
    for iter in 0..200 {
        if (b - a).abs() <= xtol {
            break;
        }
        let mid = 0.5 * (a + b);
        let x = if iter % 2 == 0 && fb != fa {
            let s = b - fb * (b - a) / (fb - fa);
            if s > a && s < b {
                s
            } else {
                mid
            }
        } else {
            mid
        };
        if x == a || x == b {
            break; // bracket is already at float resolution
        }
        let fx = f(x);
        if fx == 0.0 {
            return x;
        }
        if (fx < 0.0) == (fa < 0.0) {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    0.5 * (a + b)
}

// 15-point Kronrod nodes with the embedded 7-point Gauss rule, quoted at
// published precision (tail digits round away in f64).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639207,
    0.949107912342758524526,
    0.864864423359769072789,
    0.741531185599394439864,
    0.586087235467691130294,
    0.405845151377397166907,
    0.207784955007898467601,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693271,
    0.279705391489276667901,
    0.381830050505118944950,
    0.417959183673469387755,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224964,
    0.063092092629978553291,
    0.104790010322250183839,
    0.140653259715525918745,
    0.169004726639267902827,
    0.190350578064785409913,
    0.204432940075298892414,
    0.209482141084727828013,
];

fn qk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        resk += WGK[j] * s;
        if j % 2 == 1 {
            resg += WG[j / 2] * s;
        }
    }
    (resk * h, ((resk - resg) * h).abs())
}

/// Adaptive integral of f over [a, b] to absolute tolerance tol. Panels
/// split recursively wherever the Kronrod error estimate is too large.
pub(crate) fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn go<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
        let (v, e) = qk15(f, a, b);
        if e <= tol || depth >= 48 || (b - a).abs() <= 1e-14 {
            return v;
        }
        let mid = 0.5 * (a + b);
        go(f, a, mid, 0.5 * tol, depth + 1) + go(f, mid, b, 0.5 * tol, depth + 1)
    }
    if a == b {
        return 0.0;
    }
    go(f, a, b, tol, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ln_factorial_matches_direct_product() {
        let lf = LnFactorial::new(20);
        let mut fact = 1.0f64;
        for k in 1..=20usize {
            fact *= k as f64;
            assert!((lf.table[k] - fact.ln()).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn binomial_pmf_normalizes() {
        for &(n, p) in &[(10usize, 0.3f64), (100, 0.5), (400, 0.97), (1000, 0.01)] {
            let lf = LnFactorial::new(n);
            let total: f64 = (0..=n).map(|k| lf.pmf(n, k, p)).sum();
            assert!((total - 1.0).abs() < 1e-12, "n = {n}, p = {p}");
        }
    }

    #[test]
    fn binomial_pmf_mean() {
        let (n, p) = (250usize, 0.37f64);
        let lf = LnFactorial::new(n);
        let mean: f64 = (0..=n).map(|k| k as f64 * lf.pmf(n, k, p)).sum();
        assert!((mean - n as f64 * p).abs() < 1e-9);
    }

    #[test]
    fn binomial_pmf_degenerate_edges() {
        let lf = LnFactorial::new(5);
        assert_eq!(lf.pmf(5, 0, 0.0), 1.0);
        assert_eq!(lf.pmf(5, 3, 0.0), 0.0);
        assert_eq!(lf.pmf(5, 5, 1.0), 1.0);
        assert_eq!(lf.pmf(5, 4, 1.0), 0.0);
    }

    #[test]
    fn bracketed_root_cubic() {
        let root = solve_bracketed(|x| x * x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((root - 2.0f64.powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn bracketed_root_badly_scaled() {
        // Steep pole on one side, nearly flat on the other.
        let f = |x: f64| 1.0 / (1.0 - x) - 1e6;
        let root = solve_bracketed(f, 0.0, 1.0 - 1e-9, 1e-15);
        assert!((root - (1.0 - 1e-6)).abs() < 1e-12);
    }

    #[test]
    fn quadrature_polynomial_exact() {
        let v = integrate(&|x: f64| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn quadrature_exponential() {
        let v = integrate(&|x: f64| x.exp(), 0.0, 1.0, 1e-12);
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn quadrature_narrow_peak() {
        // Gaussian of width 0.01 placed off-center.
        let s = 0.01f64;
        let f = |x: f64| (-0.5 * ((x - 0.3) / s).powi(2)).exp();
        let v = integrate(&f, 0.0, 1.0, 1e-12);
        let exact = s * (2.0 * std::f64::consts::PI).sqrt();
        assert!((v - exact).abs() < 1e-10);
    }
}
