//! Classical fixed-step fourth-order Runge–Kutta on small fixed-size states.

/// One RK4 step of `y' = f(t, y)` from `t` with step `h` (which may be negative).
#[inline]
pub fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let y2 = axpy(y, 0.5 * h, &k1);
    let k2 = f(t + 0.5 * h, &y2);
    let y3 = axpy(y, 0.5 * h, &k2);
    let k3 = f(t + 0.5 * h, &y3);
    let y4 = axpy(y, h, &k3);
    let k4 = f(t + h, &y4);
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], a: f64, k: &[f64; N]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        out[i] += a * k[i];
    }
    out
}

/// Integrates from `t0` to `t1` in `steps` equal steps; `observe` sees every node
/// including the initial one. The final node is placed exactly at `t1`.
pub fn rk4_integrate<const N: usize, F, O>(
    f: &F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    steps: usize,
    mut observe: O,
) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N]),
{
    let steps = steps.max(1);
    let h = (t1 - t0) / steps as f64;
    let mut y = y0;
    observe(t0, &y);
    for i in 0..steps {
        let t = t0 + h * i as f64;
        y = rk4_step(f, t, &y, h);
        let t_next = if i + 1 == steps {
            t1
        } else {
            t0 + h * (i + 1) as f64
        };
        observe(t_next, &y);
    }
    y
}
