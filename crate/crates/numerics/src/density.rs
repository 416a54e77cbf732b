//! Pointwise evaluation and quadrature of symbolic densities on grids.

use crate::error::{NumericsError, Result};
use crate::grid::{GridFunction, C64};
use hierarchylab_core::algebra::{CompiledPoly, DiffPolynomial, Var};
use std::collections::BTreeMap;

/// Field assignment for evaluation. `S` is derived from `V` as `1/(1+v)` when not given.
pub type Fields<'a> = [(Var, &'a GridFunction)];

/// Jet values `(var, order)` of the given fields, computed once per key.
pub struct Jets<'a> {
    fields: BTreeMap<Var, GridFunction>,
    cache: BTreeMap<(Var, u16), GridFunction>,
    _marker: std::marker::PhantomData<&'a ()>,
}

impl<'a> Jets<'a> {
    pub fn new(fields: &Fields<'a>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut first: Option<&GridFunction> = None;
        for &(v, g) in fields {
            if let Some(f) = first {
                f.ensure_same_grid(g)?;
            } else {
                first = Some(g);
            }
            map.insert(v, g.clone());
        }
        if !map.contains_key(&Var::S) {
            if let Some(v) = map.get(&Var::V) {
                let min = v.samples().iter().map(|c| 1.0 + c.re).fold(f64::INFINITY, f64::min);
                if !(min > 0.0) {
                    return Err(NumericsError::SingularS(min));
                }
                let s = v.map(|c| 1.0 / (1.0 + c));
                map.insert(Var::S, s);
            }
        }
        Ok(Jets { fields: map, cache: BTreeMap::new(), _marker: std::marker::PhantomData })
    }

    pub fn get(&mut self, v: Var, k: u16) -> Result<&GridFunction> {
        if !self.cache.contains_key(&(v, k)) {
            let base = self
                .fields
                .get(&v)
                .ok_or_else(|| NumericsError::Invalid(format!("no field supplied for {v}")))?;
            let d = base.derivative(k as usize);
            self.cache.insert((v, k), d);
        }
        Ok(&self.cache[&(v, k)])
    }
}

/// Samples of `p` evaluated pointwise on the grid.
pub fn density_samples(p: &DiffPolynomial, fields: &Fields<'_>, tau: C64, tau0: C64) -> Result<GridFunction> {
    let grid = fields.first().ok_or_else(|| NumericsError::Invalid("no fields".into()))?.1;
    let compiled = CompiledPoly::new(p, tau, tau0);
    let mut jets = Jets::new(fields)?;
    let mut columns = Vec::with_capacity(compiled.slots().len());
    for &(v, k) in compiled.slots() {
        columns.push(jets.get(v, k)?.samples().to_vec());
    }
    let mut vals = vec![C64::new(0.0, 0.0); columns.len()];
    let out = (0..grid.len())
        .map(|j| {
            for (slot, col) in vals.iter_mut().zip(&columns) {
                *slot = col[j];
            }
            compiled.eval(&vals)
        })
        .collect();
    Ok(grid.with_samples(out))
}

/// `∫ p dx` over the grid (rectangle rule on periodic grids, trapezoid on lines).
pub fn evaluate_density(p: &DiffPolynomial, fields: &Fields<'_>, tau: C64, tau0: C64) -> Result<C64> {
    Ok(density_samples(p, fields, tau, tau0)?.integral())
}

/// Convenience for real parameters.
pub fn evaluate_density_real_params(p: &DiffPolynomial, fields: &Fields<'_>, tau0: f64) -> Result<C64> {
    evaluate_density(p, fields, C64::new(0.0, 0.0), C64::new(tau0, 0.0))
}
