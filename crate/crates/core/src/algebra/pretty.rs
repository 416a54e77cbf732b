//! Human-readable rendering, e.g. `i q'' − 2i q² r`.

use super::coeff::{Param, ParamCoefficient, ParamExp};
use super::monomial::{superscript, DiffMonomial};
use super::poly::DiffPolynomial;
use super::rational::GaussianRational;
use num_traits::{One, Signed, Zero};

fn param_part(e: &ParamExp) -> String {
    let mut s = String::new();
    for p in Param::ALL {
        let k = e[p.index()];
        if k == 0 {
            continue;
        }
        s.push_str(p.symbol());
        if k > 1 {
            s.push_str(&superscript(k as u32));
        }
    }
    s
}

/// Renders `c` as a signed scalar; returns (is_negative, magnitude text without the unit 1).
fn scalar(c: &GaussianRational) -> (bool, String) {
    if c.im.is_zero() {
        let neg = c.re.is_negative();
        let a = c.re.abs();
        return (neg, if a.is_one() { String::new() } else { a.to_string() });
    }
    if c.re.is_zero() {
        let neg = c.im.is_negative();
        let a = c.im.abs();
        return (neg, if a.is_one() { "i".to_string() } else { format!("{a}i") });
    }
    (false, format!("({c})"))
}

fn term_text(c: &ParamCoefficient, m: &DiffMonomial) -> (bool, String) {
    let mono = if m.is_one() { String::new() } else { m.to_string() };
    if c.len() == 1 {
        let (e, g) = c.terms().next().unwrap();
        let (neg, mut s) = scalar(g);
        let pp = param_part(e);
        if !pp.is_empty() {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(&pp);
        }
        if !mono.is_empty() {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(&mono);
        }
        if s.is_empty() {
            s.push('1');
        }
        return (neg, s);
    }
    let mut inner = String::new();
    for (k, (e, g)) in c.terms().enumerate() {
        let (neg, mut s) = scalar(g);
        let pp = param_part(e);
        if !pp.is_empty() {
            if !s.is_empty() {
                s.push(' ');
            }
            s.push_str(&pp);
        }
        if s.is_empty() {
            s.push('1');
        }
        if k == 0 {
            inner.push_str(if neg { "−" } else { "" });
        } else {
            inner.push_str(if neg { " − " } else { " + " });
        }
        inner.push_str(&s);
    }
    (false, if mono.is_empty() { format!("({inner})") } else { format!("({inner}) {mono}") })
}

/// Renders a polynomial; terms are listed by decreasing total derivative order.
pub fn pretty(p: &DiffPolynomial) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut terms: Vec<_> = p.terms().collect();
    terms.sort_by(|(a, _), (b, _)| b.weight().cmp(&a.weight()).then(a.homogeneity().cmp(&b.homogeneity())).then(b.cmp(a)));
    let mut out = String::new();
    for (k, (m, c)) in terms.into_iter().enumerate() {
        let (neg, s) = term_text(c, m);
        if k == 0 {
            if neg {
                out.push('−');
            }
        } else {
            out.push_str(if neg { " − " } else { " + " });
        }
        out.push_str(&s);
    }
    out
}

/// `1/2 ∫ …` style rendering of a functional density.
pub fn pretty_integral(p: &DiffPolynomial) -> String {
    if p.is_zero() {
        return "0".into();
    }
    format!("∫ {} dx", pretty(p))
}
