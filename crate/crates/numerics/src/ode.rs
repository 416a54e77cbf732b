//! Adaptive Dormand–Prince 5(4) integration of complex ODE systems, reporting the
//! solution at prescribed nodes.

use crate::error::{NumericsError, Result};
use crate::grid::C64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-10, atol: 1e-12, max_steps: 50_000_000 }
    }
}

impl OdeOptions {
    pub fn tight() -> Self {
        OdeOptions { rtol: 1e-13, atol: 1e-15, ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 35.0 / 384.0 - 5179.0 / 57600.0;
const E3: f64 = 500.0 / 1113.0 - 7571.0 / 16695.0;
const E4: f64 = 125.0 / 192.0 - 393.0 / 640.0;
const E5: f64 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
const E6: f64 = 11.0 / 84.0 - 187.0 / 2100.0;
const E7: f64 = -1.0 / 40.0;

/// Integrates `y′ = f(x, y)` from `nodes[0]` through every node in order (increasing or
/// decreasing) and returns the state at each node.
pub fn solve_on_nodes<F>(mut f: F, nodes: &[f64], y0: &[C64], opts: &OdeOptions) -> Result<(Vec<Vec<C64>>, OdeStats)>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let dim = y0.len();
    let mut out = Vec::with_capacity(nodes.len());
    out.push(y0.to_vec());
    if nodes.len() < 2 {
        return Ok((out, OdeStats::default()));
    }
    let dir = (nodes[nodes.len() - 1] - nodes[0]).signum();
    let zero = C64::new(0.0, 0.0);
    let mut k: Vec<Vec<C64>> = vec![vec![zero; dim]; 7];
    let mut tmp = vec![zero; dim];
    let mut ynew = vec![zero; dim];
    let mut y = y0.to_vec();
    let mut x = nodes[0];
    let mut h = (nodes[1] - nodes[0]).abs();
    let mut stats = OdeStats::default();
    f(x, &y, &mut k[0]);

    for &target in &nodes[1..] {
        while (target - x) * dir > 0.0 {
            let remaining = (target - x).abs();
            let last = h >= remaining * (1.0 - 1e-12);
            let step = if last { remaining } else { h } * dir;

            for i in 0..dim {
                tmp[i] = y[i] + k[0][i] * (step * A21);
            }
            f(x + C2 * step, &tmp, &mut k[1]);
            for i in 0..dim {
                tmp[i] = y[i] + (k[0][i] * A31 + k[1][i] * A32) * step;
            }
            f(x + C3 * step, &tmp, &mut k[2]);
            for i in 0..dim {
                tmp[i] = y[i] + (k[0][i] * A41 + k[1][i] * A42 + k[2][i] * A43) * step;
            }
            f(x + C4 * step, &tmp, &mut k[3]);
            for i in 0..dim {
                tmp[i] = y[i] + (k[0][i] * A51 + k[1][i] * A52 + k[2][i] * A53 + k[3][i] * A54) * step;
            }
            f(x + C5 * step, &tmp, &mut k[4]);
            for i in 0..dim {
                tmp[i] = y[i] + (k[0][i] * A61 + k[1][i] * A62 + k[2][i] * A63 + k[3][i] * A64 + k[4][i] * A65) * step;
            }
            f(x + step, &tmp, &mut k[5]);
            for i in 0..dim {
                ynew[i] = y[i] + (k[0][i] * B1 + k[2][i] * B3 + k[3][i] * B4 + k[4][i] * B5 + k[5][i] * B6) * step;
            }
            let xnew = if last { target } else { x + step };
            f(xnew, &ynew, &mut k[6]);

            let mut err = 0.0;
            for i in 0..dim {
                let e = (k[0][i] * E1 + k[2][i] * E3 + k[3][i] * E4 + k[4][i] * E5 + k[5][i] * E6 + k[6][i] * E7) * step;
                let sc = opts.atol + opts.rtol * y[i].norm().max(ynew[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / dim as f64).sqrt();
            if !err.is_finite() {
                return Err(NumericsError::StiffnessFailure { x, h });
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if err <= 1.0 {
                x = xnew;
                std::mem::swap(&mut y, &mut ynew);
                k.swap(0, 6);
                stats.accepted += 1;
                if !last || factor < 1.0 {
                    h = step.abs() * factor;
                }
            } else {
                stats.rejected += 1;
                h = step.abs() * factor.min(1.0);
                if h < 1e-14 * (1.0 + x.abs()) {
                    return Err(NumericsError::StiffnessFailure { x, h });
                }
            }
            if stats.accepted + stats.rejected > opts.max_steps {
                return Err(NumericsError::StiffnessFailure { x, h });
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}
