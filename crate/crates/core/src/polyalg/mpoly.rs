use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, Zero};

use super::scalar::Scalar;
use super::upoly::UPoly;

type Monomial = Vec<u16>;

fn trim(mut m: Monomial) -> Monomial {
    while m.last() == Some(&0) {
        m.pop();
    }
    m
}

fn mono_mul(a: &[u16], b: &[u16]) -> Monomial {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|k| a.get(k).copied().unwrap_or(0) + b.get(k).copied().unwrap_or(0))
            .collect(),
    )
}

/// Sparse multivariate polynomial. Variables are indexed from 0; a monomial
/// is its exponent vector with trailing zeros removed, so polynomials do not
/// carry a fixed variable count.
#[derive(Clone, PartialEq)]
pub struct MPoly<T: Scalar> {
    terms: BTreeMap<Monomial, T>,
}

impl<T: Scalar> MPoly<T> {
    pub fn constant(c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MPoly { terms }
    }

    pub fn var(i: usize) -> Self {
        let mut m = vec![0u16; i + 1];
        m[i] = 1;
        Self::monomial(m, T::one())
    }

    pub fn monomial(exps: Vec<u16>, c: T) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(trim(exps), c);
        }
        MPoly { terms }
    }

    /// Linear form `c0 + Σ c[k+1]·x_k`.
    pub fn linear(c: &[T]) -> Self {
        let mut p = Self::constant(c[0].clone());
        for (k, ck) in c.iter().enumerate().skip(1) {
            p = &p + &Self::var(k - 1).scale(ck);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u16], &T)> {
        self.terms.iter().map(|(m, c)| (m.as_slice(), c))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn insert_add(&mut self, m: Monomial, c: T) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = v.clone() + c;
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn total_degree(&self) -> Option<usize> {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .max()
    }

    pub fn degree_in(&self, var: usize) -> Option<usize> {
        self.terms
            .keys()
            .map(|m| m.get(var).copied().unwrap_or(0) as usize)
            .max()
    }

    /// Number of variable slots in use (one past the largest index).
    pub fn arity(&self) -> usize {
        self.terms.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        MPoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c.clone() * s.clone()))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn map_coeffs<U: Scalar>(&self, f: impl Fn(&T) -> U) -> MPoly<U> {
        let mut out = MPoly::<U>::zero();
        for (m, c) in &self.terms {
            out.insert_add(m.clone(), f(c));
        }
        out
    }

    /// Coefficients of `self` viewed as a polynomial in `var`, indexed by power.
    pub fn coeffs_in(&self, var: usize) -> Vec<MPoly<T>> {
        let d = self.degree_in(var).unwrap_or(0);
        let mut out = vec![MPoly::zero(); d + 1];
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0) as usize;
            let mut mm = m.clone();
            if e > 0 {
                mm[var] = 0;
            }
            out[e].insert_add(trim(mm), c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `x_var -> value`.
    pub fn subs(&self, var: usize, value: &T) -> Self {
        let mut out = Self::zero();
        let mut powers: Vec<T> = vec![T::one()];
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap().clone() * value.clone();
                powers.push(next);
            }
            let mut mm = m.clone();
            if e > 0 {
                mm[var] = 0;
            }
            out.insert_add(trim(mm), c.clone() * powers[e].clone());
        }
        out
    }

    /// Substitute `x_var -> q`.
    pub fn subs_poly(&self, var: usize, q: &MPoly<T>) -> Self {
        let cs = self.coeffs_in(var);
        let mut acc = Self::zero();
        for c in cs.iter().rev() {
            acc = &(&acc * q) + c;
        }
        acc
    }

    /// Full evaluation; missing variables beyond `vals.len()` are an error.
    pub fn eval(&self, vals: &[T]) -> T {
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = t * vals[k].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn eval_with<U: Scalar>(&self, vals: &[U], lift: impl Fn(&T) -> U) -> U {
        let mut acc = U::zero();
        for (m, c) in &self.terms {
            let mut t = lift(c);
            for (k, &e) in m.iter().enumerate() {
                for _ in 0..e {
                    t = t * vals[k].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let e = m.get(var).copied().unwrap_or(0);
            if e == 0 {
                continue;
            }
            let mut mm = m.clone();
            mm[var] -= 1;
            out.insert_add(trim(mm), c.clone() * T::from_i64(e as i64));
        }
        out
    }

    /// Univariate view, if only `var` occurs.
    pub fn to_upoly(&self, var: usize) -> Option<UPoly<T>> {
        let cs = self.coeffs_in(var);
        let mut out = Vec::with_capacity(cs.len());
        for c in cs {
            if c.is_zero() {
                out.push(T::zero());
            } else if c.terms.len() == 1 && c.terms.contains_key(&Vec::new()) {
                out.push(c.terms[&Vec::new()].clone());
            } else {
                return None;
            }
        }
        Some(UPoly::new(out))
    }

    pub fn from_upoly(p: &UPoly<T>, var: usize) -> Self {
        let mut out = Self::zero();
        for (k, c) in p.coeffs().iter().enumerate() {
            let mut m = vec![0u16; var + 1];
            m[var] = k as u16;
            out.insert_add(trim(m), c.clone());
        }
        out
    }

    /// Rename variables: `x_k -> x_{perm[k]}`.
    pub fn permute_vars(&self, perm: &[usize]) -> Self {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut mm = vec![0u16; perm.iter().copied().max().unwrap_or(0) + 1];
            for (k, &e) in m.iter().enumerate() {
                mm[perm[k]] += e;
            }
            out.insert_add(trim(mm), c.clone());
        }
        out
    }

    /// True if every term has total degree `d`.
    pub fn is_homogeneous(&self, d: usize) -> bool {
        self.terms
            .keys()
            .all(|m| m.iter().map(|&e| e as usize).sum::<usize>() == d)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.magnitude())
            .fold(0.0, f64::max)
    }
}

impl<T: Scalar> Zero for MPoly<T> {
    fn zero() -> Self {
        MPoly {
            terms: BTreeMap::new(),
        }
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<T: Scalar> One for MPoly<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Scalar> fmt::Debug for MPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(k, &e)| {
                        if e == 1 {
                            format!("u{k}")
                        } else {
                            format!("u{k}^{e}")
                        }
                    })
                    .collect();
                if vars.is_empty() {
                    format!("({c:?})")
                } else {
                    format!("({c:?})*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl<T: Scalar> Add for &MPoly<T> {
    type Output = MPoly<T>;
    fn add(self, rhs: &MPoly<T>) -> MPoly<T> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), c.clone());
        }
        out
    }
}

impl<T: Scalar> Sub for &MPoly<T> {
    type Output = MPoly<T>;
    fn sub(self, rhs: &MPoly<T>) -> MPoly<T> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_add(m.clone(), -c.clone());
        }
        out
    }
}

impl<T: Scalar> Mul for &MPoly<T> {
    type Output = MPoly<T>;
    fn mul(self, rhs: &MPoly<T>) -> MPoly<T> {
        let mut out = MPoly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_add(mono_mul(ma, mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<T: Scalar> Neg for &MPoly<T> {
    type Output = MPoly<T>;
    fn neg(self) -> MPoly<T> {
        self.scale(&-T::one())
    }
}

impl<T: Scalar> Neg for MPoly<T> {
    type Output = MPoly<T>;
    fn neg(self) -> MPoly<T> {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for MPoly<T> {
            type Output = MPoly<T>;
            fn $m(self, rhs: MPoly<T>) -> MPoly<T> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::rat_int;
    use num::rational::BigRational;

    type P = MPoly<BigRational>;

    #[test]
    fn coeffs_in_reassembles() {
        let x = P::var(0);
        let y = P::var(1);
        let f = &(&x * &x) * &y + y.scale(&rat_int(3)) - P::constant(rat_int(7));
        let cs = f.coeffs_in(0);
        assert_eq!(cs.len(), 3);
        let back = &(&cs[2] * &(&x * &x)) + &cs[0];
        assert_eq!(back, f);
    }

    #[test]
    fn substitution_matches_evaluation() {
        let x = P::var(0);
        let y = P::var(2);
        let f = &(&x * &y) + &(&y * &y);
        let g = f.subs(2, &rat_int(3));
        assert_eq!(
            g.eval(&[rat_int(2)]),
            f.eval(&[rat_int(2), rat_int(0), rat_int(3)])
        );
        let h = f.subs_poly(0, &(&y + &P::one()));
        assert_eq!(h.eval(&[rat_int(0), rat_int(0), rat_int(2)]), rat_int(10));
    }
}
