//! Variables and differential monomials.

use std::fmt;

/// Field variables. `S` stands for `(1+v)⁻¹` and only ever appears underived.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Q,
    R,
    QBar,
    U,
    W,
    V,
    S,
}

impl Var {
    pub const ALL: [Var; 7] = [Var::Q, Var::R, Var::QBar, Var::U, Var::W, Var::V, Var::S];

    pub fn name(self) -> &'static str {
        match self {
            Var::Q => "q",
            Var::R => "r",
            Var::QBar => "qbar",
            Var::U => "u",
            Var::W => "w",
            Var::V => "v",
            Var::S => "s",
        }
    }

    /// Display symbol used by the pretty-printer.
    pub fn symbol(self) -> &'static str {
        match self {
            Var::QBar => "q̄",
            other => other.name(),
        }
    }

    pub fn from_name(s: &str) -> Option<Var> {
        Var::ALL.iter().copied().find(|v| v.name() == s)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One factor `(var^{(order)})^power`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub var: Var,
    pub order: u16,
    pub power: u16,
}

/// A product of factors, sorted by `(var, order)` with no repeated keys.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct DiffMonomial {
    factors: Vec<Factor>,
}

impl DiffMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn var(v: Var, order: u16) -> Self {
        Self::var_pow(v, order, 1)
    }

    pub fn var_pow(v: Var, order: u16, power: u16) -> Self {
        if power == 0 {
            return Self::one();
        }
        DiffMonomial { factors: vec![Factor { var: v, order, power }] }
    }

    /// Builds a monomial from arbitrary factors, merging repeated keys.
    pub fn from_factors(fs: impl IntoIterator<Item = Factor>) -> Self {
        let mut m = Self::one();
        for f in fs {
            m.mul_factor(f.var, f.order, f.power);
        }
        m
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Multiplies in `(v^{(order)})^power` in place.
    pub fn mul_factor(&mut self, v: Var, order: u16, power: u16) {
        if power == 0 {
            return;
        }
        match self.factors.binary_search_by(|f| (f.var, f.order).cmp(&(v, order))) {
            Ok(i) => self.factors[i].power += power,
            Err(i) => self.factors.insert(i, Factor { var: v, order, power }),
        }
    }

    pub fn mul(&self, o: &DiffMonomial) -> DiffMonomial {
        let mut out = Vec::with_capacity(self.factors.len() + o.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < o.factors.len() {
            let a = self.factors[i];
            let b = o.factors[j];
            match (a.var, a.order).cmp(&(b.var, b.order)) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(Factor { var: a.var, order: a.order, power: a.power + b.power });
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&o.factors[j..]);
        DiffMonomial { factors: out }
    }

    /// Power of `v^{(order)}` in this monomial.
    pub fn power_of(&self, v: Var, order: u16) -> u16 {
        self.factors
            .binary_search_by(|f| (f.var, f.order).cmp(&(v, order)))
            .map(|i| self.factors[i].power)
            .unwrap_or(0)
    }

    /// Removes one copy of `v^{(order)}`; returns `None` if absent.
    pub fn divide_factor(&self, v: Var, order: u16) -> Option<DiffMonomial> {
        let i = self.factors.binary_search_by(|f| (f.var, f.order).cmp(&(v, order))).ok()?;
        let mut m = self.clone();
        if m.factors[i].power == 1 {
            m.factors.remove(i);
        } else {
            m.factors[i].power -= 1;
        }
        Some(m)
    }

    /// Removes all copies of `v^{(order)}`, returning the cofactor and the removed power.
    pub fn split_off(&self, v: Var, order: u16) -> (DiffMonomial, u16) {
        match self.factors.binary_search_by(|f| (f.var, f.order).cmp(&(v, order))) {
            Ok(i) => {
                let mut m = self.clone();
                let f = m.factors.remove(i);
                (m, f.power)
            }
            Err(_) => (self.clone(), 0),
        }
    }

    /// Maximal derivative order of `v` occurring, if any.
    pub fn max_order_of(&self, v: Var) -> Option<u16> {
        self.factors.iter().filter(|f| f.var == v).map(|f| f.order).max()
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.factors.iter().any(|f| f.var == v)
    }

    /// Number of factors counted with multiplicity, excluding `s`.
    pub fn homogeneity(&self) -> u32 {
        self.factors.iter().filter(|f| f.var != Var::S).map(|f| f.power as u32).sum()
    }

    /// Total number of derivatives.
    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|f| f.order as u32 * f.power as u32).sum()
    }

    /// Power of `s = (1+v)⁻¹`.
    pub fn s_power(&self) -> u32 {
        self.power_of(Var::S, 0) as u32
    }

    /// Number of factors (with multiplicity) carrying at least one derivative.
    pub fn derivative_factor_count(&self) -> u32 {
        self.factors.iter().filter(|f| f.order > 0).map(|f| f.power as u32).sum()
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.factors.iter().map(|f| f.var)
    }

    /// Applies a variable renaming (merging factors that collide).
    pub fn rename(&self, map: impl Fn(Var) -> Var) -> DiffMonomial {
        DiffMonomial::from_factors(self.factors.iter().map(|f| Factor { var: map(f.var), ..*f }))
    }
}

/// Superscript digits for pretty-printing.
pub fn superscript(n: u32) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string().chars().map(|c| SUP[c.to_digit(10).unwrap() as usize]).collect()
}

impl fmt::Display for DiffMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for fac in &self.factors {
            if !first {
                write!(f, " ")?;
            }
            first = false;
            let base = match fac.order {
                0 => fac.var.symbol().to_string(),
                1..=3 => format!("{}{}", fac.var.symbol(), "'".repeat(fac.order as usize)),
                k => format!("{}⁽{}⁾", fac.var.symbol(), superscript(k as u32).trim()),
            };
            if fac.power == 1 {
                write!(f, "{}", base)?;
            } else if fac.order >= 1 && fac.order <= 3 {
                write!(f, "({}){}", base, superscript(fac.power as u32))?;
            } else {
                write!(f, "{}{}", base, superscript(fac.power as u32))?;
            }
        }
        Ok(())
    }
}
