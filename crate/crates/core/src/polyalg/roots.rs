use num::bigint::{BigInt, Sign};
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

use super::scalar::{rat_to_f64, RealScalar, Scalar};
use super::upoly::{int_prem, int_primitive, int_square_free, UPoly};
use crate::error::{Error, Result};

/// An isolated real root: `lo < root <= hi`, with `hi - lo` below the
/// requested tolerance (or `lo == hi` when the root is rational and hit).
#[derive(Clone, Debug, PartialEq)]
pub struct RealRoot {
    pub value: f64,
    pub multiplicity: usize,
    pub lo: BigRational,
    pub hi: BigRational,
}

impl RealRoot {
    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }
}

const MAX_BISECTIONS: usize = 4000;

type IPoly = Vec<BigInt>;

fn int_derivative(f: &[BigInt]) -> IPoly {
    f.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigInt::from(i))
        .collect()
}

fn sturm_sequence(f: &[BigInt]) -> Vec<IPoly> {
    // Integer pseudo-remainders, rescaled by positive factors only.
    let f1 = int_primitive(&int_derivative(f));
    let mut seq = vec![f.to_vec(), f1];
    loop {
        let n = seq.len();
        if seq[n - 1].len() <= 1 {
            break;
        }
        let (r, k) = int_prem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        let lb_negative = seq[n - 1].last().unwrap().is_negative();
        let flip = !(lb_negative && k % 2 == 1);
        let r = int_primitive(&r);
        seq.push(if flip {
            r.into_iter().map(|c| -c).collect()
        } else {
            r
        });
    }
    seq
}

/// Sign of `f(m / 2^k)`.
fn sign_at(f: &[BigInt], m: &BigInt, k: u64) -> i8 {
    let mut v = BigInt::zero();
    let mut pw = BigInt::one();
    for c in f.iter().rev() {
        v = v * m + c * &pw;
        pw <<= k;
    }
    match v.sign() {
        Sign::Plus => 1,
        Sign::Minus => -1,
        Sign::NoSign => 0,
    }
}

fn sign_variations(seq: &[IPoly], m: &BigInt, k: u64) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in seq {
        let s = sign_at(p, m, k);
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Dyadic interval `(lo / 2^k, hi / 2^k]`.
#[derive(Clone, Debug)]
struct Dyadic {
    lo: BigInt,
    hi: BigInt,
    k: u64,
}

impl Dyadic {
    fn halves(&self) -> (Dyadic, Dyadic) {
        let mid = &self.lo + &self.hi;
        let k = self.k + 1;
        (
            Dyadic {
                lo: &self.lo << 1u32,
                hi: mid.clone(),
                k,
            },
            Dyadic {
                lo: mid,
                hi: &self.hi << 1u32,
                k,
            },
        )
    }

    fn width(&self) -> f64 {
        let w = rat_to_f64(&BigRational::from_integer(&self.hi - &self.lo));
        w / 2f64.powi(self.k as i32)
    }

    fn to_rat(m: &BigInt, k: u64) -> BigRational {
        BigRational::new(m.clone(), BigInt::one() << k)
    }
}

fn count_in(seq: &[IPoly], iv: &Dyadic) -> usize {
    sign_variations(seq, &iv.lo, iv.k).saturating_sub(sign_variations(seq, &iv.hi, iv.k))
}

/// Power of two bounding all root moduli.
fn cauchy_exponent(f: &[BigInt]) -> u64 {
    let lead_bits = f.last().unwrap().bits();
    let max_bits = f.iter().map(|c| c.bits()).max().unwrap_or(0);
    max_bits.saturating_sub(lead_bits) + 2
}

fn isolate(seq: &[IPoly], iv: Dyadic, out: &mut Vec<Dyadic>, depth: usize) -> Result<()> {
    let n = count_in(seq, &iv);
    if n == 0 {
        return Ok(());
    }
    if n == 1 {
        out.push(iv);
        return Ok(());
    }
    if depth > MAX_BISECTIONS {
        return Err(Error::NonConvergence {
            lo: rat_to_f64(&Dyadic::to_rat(&iv.lo, iv.k)),
            hi: rat_to_f64(&Dyadic::to_rat(&iv.hi, iv.k)),
        });
    }
    let (a, b) = iv.halves();
    isolate(seq, a, out, depth + 1)?;
    isolate(seq, b, out, depth + 1)
}

/// Shrink an isolating interval of a square-free `f` to width `< tol`.
/// Returns `(lo, hi)`, equal when a dyadic root is hit exactly.
fn refine(
    f: &[BigInt],
    seq: &[IPoly],
    mut iv: Dyadic,
    tol: f64,
) -> Result<(BigRational, BigRational)> {
    if sign_at(f, &iv.hi, iv.k) == 0 {
        let r = Dyadic::to_rat(&iv.hi, iv.k);
        return Ok((r.clone(), r));
    }
    let mut steps = 0;
    while iv.width() >= tol {
        steps += 1;
        if steps > MAX_BISECTIONS {
            return Err(Error::NonConvergence {
                lo: rat_to_f64(&Dyadic::to_rat(&iv.lo, iv.k)),
                hi: rat_to_f64(&Dyadic::to_rat(&iv.hi, iv.k)),
            });
        }
        let (a, b) = iv.halves();
        let fm = sign_at(f, &a.hi, a.k);
        if fm == 0 {
            let r = Dyadic::to_rat(&a.hi, a.k);
            return Ok((r.clone(), r));
        }
        let flo = sign_at(f, &a.lo, a.k);
        iv = if flo == 0 {
            // lo itself is excluded from (lo, hi]; fall back on Sturm counts.
            if count_in(seq, &a) == 1 {
                a
            } else {
                b
            }
        } else if flo != fm {
            a
        } else {
            b
        };
    }
    Ok((Dyadic::to_rat(&iv.lo, iv.k), Dyadic::to_rat(&iv.hi, iv.k)))
}

/// All real roots of an exact rational polynomial, with multiplicity,
/// sorted ascending and refined to width `tol`.
pub fn real_roots_exact(p: &UPoly<BigRational>, tol: f64) -> Result<Vec<RealRoot>> {
    if p.is_zero() {
        return Err(Error::InvalidArgument(
            "real roots of the zero polynomial".into(),
        ));
    }
    let tol = tol.max(1e-300);
    let mut roots = Vec::new();
    for (mult, f) in int_square_free(&p.primitive_integer()) {
        let seq = sturm_sequence(&f);
        let e = cauchy_exponent(&f);
        let b = BigInt::one() << e;
        let mut intervals = Vec::new();
        isolate(
            &seq,
            Dyadic {
                lo: -b.clone(),
                hi: b,
                k: 0,
            },
            &mut intervals,
            0,
        )?;
        let fr = UPoly::new(f.iter().cloned().map(BigRational::from_integer).collect());
        for iv in intervals {
            let (lo, hi) = refine(&f, &seq, iv, tol)?;
            let value = if lo == hi {
                rat_to_f64(&lo)
            } else {
                polish_in(&fr, &lo, &hi)
            };
            roots.push(RealRoot {
                value,
                multiplicity: mult,
                lo,
                hi,
            });
        }
    }
    roots.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
    Ok(roots)
}

/// A rational root of `p` near `x` with a moderate denominator, verified
/// exactly.
pub fn rational_root_near(p: &UPoly<BigRational>, x: f64) -> Option<BigRational> {
    if p.degree() == Some(1) {
        return Some(-p.coeff(0) / p.coeff(1));
    }
    [1_000i64, 1_000_000, 1_000_000_000]
        .iter()
        .filter_map(|&den| crate::polyalg::scalar::rationalize(x, den))
        .find(|r| p.eval(r).is_zero())
}

/// Double-precision root inside a small bracketing interval.
fn polish_in(f: &UPoly<BigRational>, lo: &BigRational, hi: &BigRational) -> f64 {
    let (a, b) = (rat_to_f64(lo), rat_to_f64(hi));
    let g = f.to_f64();
    let (mut a, mut b) = (a, b);
    let mut fa = g.eval(&a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = g.eval(&m);
        if fm == 0.0 {
            return m;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Real roots of a polynomial over any real scalar; floating coefficients
/// are converted exactly to rationals first.
pub fn real_roots<T: RealScalar>(p: &UPoly<T>, tol: f64) -> Result<Vec<RealRoot>> {
    let cs = p
        .coeffs()
        .iter()
        .map(|c| {
            c.to_rat()
                .ok_or_else(|| Error::InvalidArgument("non-finite coefficient".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    real_roots_exact(&UPoly::new(cs), tol)
}

/// All complex roots by the Aberth–Ehrlich iteration, followed by Newton
/// polishing. Degree-0 input yields no roots.
pub fn complex_roots(p: &UPoly<Complex64>) -> Vec<Complex64> {
    let n = match p.degree() {
        Some(d) if d > 0 => d,
        _ => return Vec::new(),
    };
    let lead = p.lead();
    let monic: Vec<Complex64> = p.coeffs().iter().map(|c| c / lead).collect();
    if n == 1 {
        return vec![-monic[0]];
    }
    let eval = |z: Complex64| -> (Complex64, Complex64) {
        let mut v = Complex64::zero();
        let mut d = Complex64::zero();
        for c in monic.iter().rev() {
            d = d * z + v;
            v = v * z + c;
        }
        (v, d)
    };
    // Geometric mean of the root moduli as the starting radius.
    let c0 = monic[0].norm();
    let r0 = if c0 > 0.0 {
        c0.powf(1.0 / n as f64)
    } else {
        1.0
    };
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(r0, th)
        })
        .collect();
    for _ in 0..800 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (v, d) = eval(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let s: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(1e-14, 0.0).inv()
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let w = ratio / (Complex64::one() - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-16 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..4 {
            let (v, d) = eval(*zi);
            if d.norm() == 0.0 {
                break;
            }
            let step = v / d;
            if !step.re.is_finite() || !step.im.is_finite() {
                break;
            }
            *zi -= step;
        }
    }
    z
}

/// Complex roots of an exact or floating polynomial over any scalar.
pub fn complex_roots_of<T: Scalar>(p: &UPoly<T>) -> Vec<Complex64> {
    complex_roots(&p.map(|c| c.to_c64()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::rat_int;

    fn p(cs: &[i64]) -> UPoly<BigRational> {
        UPoly::new(cs.iter().map(|&c| rat_int(c)).collect())
    }

    #[test]
    fn simple_real_roots() {
        let r = real_roots_exact(&p(&[-1, 0, 1]), 1e-12).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0].value, -1.0);
        assert_eq!(r[1].value, 1.0);
        let r = real_roots_exact(&p(&[4, -4, 1]), 1e-12).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].multiplicity, 2);
        assert_eq!(r[0].value, 2.0);
    }

    #[test]
    fn irrational_root_refined() {
        let r = real_roots_exact(&p(&[-2, 0, 1]), 1e-14).unwrap();
        assert!((r[1].value - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn floating_input() {
        let q = UPoly::new(vec![-2.0f64, 0.0, 1.0]);
        let r = real_roots(&q, 1e-12).unwrap();
        assert_eq!(r.len(), 2);
    }

    #[test]
    fn aberth_cubic() {
        let q = UPoly::new(vec![
            Complex64::new(-6.0, 0.0),
            Complex64::new(11.0, 0.0),
            Complex64::new(-6.0, 0.0),
            Complex64::new(1.0, 0.0),
        ]);
        let mut r: Vec<f64> = complex_roots(&q).iter().map(|z| z.re).collect();
        r.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).abs() < 1e-10);
        }
    }
}
