//! Independent numerical oracles for the integration tests. Nothing here
//! calls into the library's special functions.
#![allow(dead_code)]

/// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Piece {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod quadrature of `f` over `[a, b]`: the
/// interval with the largest error estimate is bisected until the summed
/// estimate drops below `tol` or 2000 intervals are in use.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let piece = |lo: f64, hi: f64| {
        let (value, err) = gk15(&f, lo, hi);
        Piece { lo, hi, value, err }
    };
    let mut heap = std::collections::BinaryHeap::new();
    let first = piece(a, b);
    let mut total_err = first.err;
    heap.push(first);
    while total_err > tol && heap.len() < 2000 {
        let worst = heap.pop().unwrap();
        let mid = 0.5 * (worst.lo + worst.hi);
        let (l, r) = (piece(worst.lo, mid), piece(mid, worst.hi));
        total_err += l.err + r.err - worst.err;
        heap.push(l);
        heap.push(r);
    }
    let mut acc = DoubleDouble::default();
    for p in heap.iter() {
        acc.add(p.value);
    }
    acc.value()
}

/// `∫_0^x t^(a-1) (1-t)^(b-1) dt` for `x ≤ 1/2`, substituting `t = u^(1/a)`
/// to remove the endpoint singularity.
fn lower_beta_integral(x: f64, a: f64, b: f64) -> f64 {
    assert!(x <= 0.5);
    let upper = x.powf(a);
    integrate(
        |u: f64| (1.0 - u.powf(1.0 / a)).powf(b - 1.0) / a,
        0.0,
        upper,
        1e-15,
    )
}

/// Beta function by quadrature.
pub fn beta_fn(a: f64, b: f64) -> f64 {
    lower_beta_integral(0.5, a, b) + lower_beta_integral(0.5, b, a)
}

/// Regularized incomplete beta by quadrature.
pub fn inc_beta_quad(x: f64, a: f64, b: f64) -> f64 {
    let total = beta_fn(a, b);
    if x <= 0.5 {
        lower_beta_integral(x, a, b) / total
    } else {
        1.0 - lower_beta_integral(1.0 - x, b, a) / total
    }
}

/// Beta log density with a quadrature normalizer.
pub fn beta_log_density_quad(r: f64, a: f64, b: f64) -> f64 {
    (a - 1.0) * r.ln() + (b - 1.0) * (1.0 - r).ln() - beta_fn(a, b).ln()
}

/// Double-double accumulator (Knuth two-sum), ~32 significant digits.
#[derive(Default, Clone, Copy)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    pub fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let bp = s - self.hi;
        let err = (self.hi - (s - bp)) + (x - bp);
        let lo = self.lo + err;
        self.hi = s + lo;
        self.lo = lo - (self.hi - s);
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Brute-force COM-Poisson oracle: 1e5 terms built from a cumulative sum of
/// `ln i` (not log-gamma), accumulated in double-double after scaling by the
/// largest term.
pub struct CmpOracle {
    pub log_terms: Vec<f64>,
    pub log_z: f64,
}

impl CmpOracle {
    pub fn new(lambda: f64, nu: f64) -> Self {
        const N: usize = 100_000;
        let ln_l = lambda.ln();
        let mut ln_fact = DoubleDouble::default();
        let mut log_terms = Vec::with_capacity(N);
        for k in 0..N {
            if k > 0 {
                ln_fact.add((k as f64).ln());
            }
            log_terms.push(k as f64 * ln_l - nu * ln_fact.value());
        }
        let max = log_terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut acc = DoubleDouble::default();
        for &t in &log_terms {
            acc.add((t - max).exp());
        }
        Self {
            log_terms,
            log_z: max + acc.value().ln(),
        }
    }

    pub fn log_pmf(&self, k: usize) -> f64 {
        self.log_terms[k] - self.log_z
    }

    pub fn mean(&self) -> f64 {
        let mut acc = DoubleDouble::default();
        for (k, &t) in self.log_terms.iter().enumerate() {
            acc.add(k as f64 * (t - self.log_z).exp());
        }
        acc.value()
    }
}

/// `ln k!` by direct summation.
pub fn ln_factorial_sum(k: u64) -> f64 {
    let mut acc = DoubleDouble::default();
    for i in 2..=k {
        acc.add((i as f64).ln());
    }
    acc.value()
}
