//! Quadrature building blocks: a 7/15 Gauss-Kronrod panel rule, adaptive
//! refinement driven by a global error budget, a half-line integrator using
//! the substitution r = e^u, and Gauss-Legendre node tables.

/// Value plus an estimate of the absolute error.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Quadrature {
    pub value: f64,
    pub abs_error: f64,
}

// 15-point Kronrod nodes (positive half) and weights; the embedded 7-point
// Gauss rule uses nodes 1, 3, 5, 7.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_7,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_17,
    0.207_784_955_007_898_27,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_69,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// One Gauss-Kronrod panel. Returns (K15 value, |K15 - G7| error estimate).
fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let x = half * XGK[j];
        let fsum = f(center - x) + f(center + x);
        kronrod += WGK[j] * fsum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * fsum;
        }
    }
    kronrod *= half;
    gauss *= half;
    (kronrod, (kronrod - gauss).abs())
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// Refine a set of panels until the summed error estimate drops below
/// `abs_tol + rel_tol * |integral|`, always splitting the panel with the
/// largest estimate.
fn refine(
    f: &mut impl FnMut(f64) -> f64,
    panels: &mut Vec<Panel>,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Quadrature {
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        let value: f64 = panels.iter().map(|p| p.value).sum();
        if total_err <= abs_tol + rel_tol * value.abs() || panels.len() >= max_panels {
            return Quadrature {
                value,
                abs_error: total_err,
            };
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("non-empty panel list");
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        for (lo, hi) in [(p.a, mid), (mid, p.b)] {
            let (value, error) = gk15(f, lo, hi);
            panels.push(Panel {
                a: lo,
                b: hi,
                value,
                error,
            });
        }
    }
}

/// Adaptive integration of `f` over the finite interval `[a, b]`.
pub(crate) fn adaptive(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    initial_panels: usize,
) -> Quadrature {
    let n = initial_panels.max(1);
    let mut panels = Vec::with_capacity(2 * n);
    for i in 0..n {
        let lo = a + (b - a) * i as f64 / n as f64;
        let hi = a + (b - a) * (i + 1) as f64 / n as f64;
        let (value, error) = gk15(f, lo, hi);
        panels.push(Panel {
            a: lo,
            b: hi,
            value,
            error,
        });
    }
    refine(f, &mut panels, abs_tol, rel_tol, 4000)
}

/// Integrate `f` over (0, inf) through the substitution r = e^u.
///
/// Panels of width 2 in u are laid out from u = 0 in both directions until
/// their contribution is negligible against the running total, then refined
/// adaptively. The integrand must decay to zero at both ends after the
/// substitution (true for all kernels in this crate: power-law behaviour at
/// r -> 0 and exponential damping at r -> inf).
pub(crate) fn integrate_half_line(
    f: &mut impl FnMut(f64) -> f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Quadrature {
    let mut g = |u: f64| {
        let r = u.exp();
        let v = f(r) * r;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };

    let mut panels: Vec<Panel> = Vec::new();
    let mut magnitude = 0.0_f64;
    for direction in [1.0_f64, -1.0] {
        let mut quiet = 0;
        for k in 0..350 {
            let (a, b) = if direction > 0.0 {
                (2.0 * k as f64, 2.0 * (k + 1) as f64)
            } else {
                (-2.0 * (k + 1) as f64, -2.0 * k as f64)
            };
            let (value, error) = gk15(&mut g, a, b);
            panels.push(Panel { a, b, value, error });
            magnitude = magnitude.max(value.abs());
            let floor = f64::EPSILON * magnitude + 1e-300;
            if value.abs() + error < floor {
                quiet += 1;
                if quiet >= 2 && k >= 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
            if b.abs() >= 700.0 {
                break;
            }
        }
    }
    refine(&mut g, &mut panels, abs_tol, rel_tol, 4000)
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0_f64, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            // P_n = p1, P_{n-1} = p0
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Gauss-Legendre rule mapped onto [a, b].
pub(crate) fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (xs, ws) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    (
        xs.iter().map(|x| mid + half * x).collect(),
        ws.iter().map(|w| half * w).collect(),
    )
}
