//! Arithmetic in the truncated power series ring `F_p[T]/(T^n)`.
//!
//! Elements are stored least-degree-first with every coefficient reduced into
//! `[0, p)`, so structural equality is ring equality. The distinguished element
//! `gamma = 1 + T` plays the role of a topological generator of the group whose
//! mod-p group ring this ring models; [`Series::iota`] is the involution induced
//! by `gamma -> gamma^{-1}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;

use crate::error::{Error, Result};

/// Largest supported prime.
pub const MAX_PRIME: u32 = 97;
/// Largest supported truncation level.
pub const MAX_LEVEL: usize = 12;

/// An odd prime in `3..=97`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Prime(u32);

impl Prime {
    pub fn new(p: u32) -> Result<Self> {
        if !(3..=MAX_PRIME).contains(&p) || p.is_multiple_of(2) {
            return Err(Error::InvalidPrime(p));
        }
        if (3..).step_by(2).take_while(|d| d * d <= p).any(|d| p.is_multiple_of(d)) {
            return Err(Error::InvalidPrime(p));
        }
        Ok(Prime(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        (a + self.0 - b) % self.0
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        (a * b) % self.0
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        (self.0 - a) % self.0
    }

    /// Multiplicative inverse of a nonzero residue.
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0), "zero has no inverse");
        self.pow(a, self.0 - 2)
    }

    pub fn pow(self, mut base: u32, mut exp: u32) -> u32 {
        let mut acc = 1 % self.0;
        base %= self.0;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// `p^k`, or `None` on overflow.
    pub fn checked_power(self, k: usize) -> Option<u128> {
        (self.0 as u128).checked_pow(k as u32)
    }

    /// Returns `Some(k)` when `n = p^k`.
    pub fn log_exact(self, n: usize) -> Option<u32> {
        if n == 0 {
            return None;
        }
        let (mut m, mut k) = (n, 0);
        while m % self.0 as usize == 0 {
            m /= self.0 as usize;
            k += 1;
        }
        (m == 1).then_some(k)
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub(crate) fn check_level(level: usize, min: usize) -> Result<()> {
    if level < min || level > MAX_LEVEL {
        return Err(Error::InvalidLevel {
            level,
            min,
            max: MAX_LEVEL,
        });
    }
    Ok(())
}

/// An element of `F_p[T]/(T^n)`.
///
/// Level 0 (the zero ring) is admitted so that the level-`n-1` parameter of a
/// type-B canonical form exists at `n = 1`; every other public entry point
/// works at levels `1..=MAX_LEVEL`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Series {
    p: Prime,
    coeffs: Vec<u32>,
}

impl Series {
    /// Builds a series from raw coefficients, reducing each mod `p`.
    pub fn new(p: Prime, coeffs: Vec<u32>) -> Result<Self> {
        check_level(coeffs.len(), 0)?;
        let coeffs = coeffs.into_iter().map(|c| c % p.get()).collect();
        Ok(Series { p, coeffs })
    }

    pub fn from_signed(p: Prime, coeffs: &[i64]) -> Result<Self> {
        check_level(coeffs.len(), 0)?;
        Ok(Series {
            p,
            coeffs: coeffs.iter().map(|&c| p.reduce(c)).collect(),
        })
    }

    pub(crate) fn from_raw(p: Prime, coeffs: Vec<u32>) -> Self {
        debug_assert!(coeffs.iter().all(|&c| c < p.get()));
        Series { p, coeffs }
    }

    pub fn zero(p: Prime, level: usize) -> Self {
        Series {
            p,
            coeffs: vec![0; level],
        }
    }

    pub fn constant(p: Prime, level: usize, c: i64) -> Self {
        let mut s = Self::zero(p, level);
        if level > 0 {
            s.coeffs[0] = p.reduce(c);
        }
        s
    }

    pub fn one(p: Prime, level: usize) -> Self {
        Self::constant(p, level, 1)
    }

    /// `c * T^k` (zero when `k >= level`).
    pub fn monomial(p: Prime, level: usize, k: usize, c: i64) -> Self {
        let mut s = Self::zero(p, level);
        if k < level {
            s.coeffs[k] = p.reduce(c);
        }
        s
    }

    pub fn t(p: Prime, level: usize) -> Self {
        Self::monomial(p, level, 1, 1)
    }

    /// The group element `gamma = 1 + T`.
    pub fn gamma(p: Prime, level: usize) -> Self {
        let mut s = Self::one(p, level);
        if level > 1 {
            s.coeffs[1] = 1;
        }
        s
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.p
    }

    #[inline]
    pub fn level(&self) -> usize {
        self.coeffs.len()
    }

    #[inline]
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> u32 {
        self.coeffs.get(i).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// T-adic valuation; the zero element has valuation equal to the level.
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|&c| c != 0)
            .unwrap_or(self.level())
    }

    pub fn is_unit(&self) -> bool {
        self.level() > 0 && self.coeffs[0] != 0
    }

    fn check_compatible(&self, other: &Series) -> Result<()> {
        if self.p != other.p || self.level() != other.level() {
            return Err(Error::Mismatch(format!(
                "series over F_{} at level {} vs F_{} at level {}",
                self.p,
                self.level(),
                other.p,
                other.level()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Series) -> Result<Series> {
        self.check_compatible(other)?;
        let p = self.p;
        Ok(Series::from_raw(
            p,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| p.add(a, b))
                .collect(),
        ))
    }

    pub fn try_sub(&self, other: &Series) -> Result<Series> {
        self.check_compatible(other)?;
        let p = self.p;
        Ok(Series::from_raw(
            p,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| p.sub(a, b))
                .collect(),
        ))
    }

    /// Truncated convolution.
    pub fn try_mul(&self, other: &Series) -> Result<Series> {
        self.check_compatible(other)?;
        let n = self.level();
        let p = self.p.get();
        let mut acc = vec![0u32; n];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs[..n - i].iter().enumerate() {
                acc[i + j] = (acc[i + j] + a * b) % p;
            }
        }
        Ok(Series::from_raw(self.p, acc))
    }

    pub fn scale(&self, c: i64) -> Series {
        let c = self.p.reduce(c);
        let p = self.p;
        Series::from_raw(p, self.coeffs.iter().map(|&a| p.mul(a, c)).collect())
    }

    /// Multiplication by `T^k`.
    pub fn shift_up(&self, k: usize) -> Series {
        let n = self.level();
        let mut out = vec![0; n];
        if k < n {
            out[k..].copy_from_slice(&self.coeffs[..n - k]);
        }
        Series::from_raw(self.p, out)
    }

    pub fn pow(&self, mut k: u64) -> Series {
        let mut acc = Series::one(self.p, self.level());
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        acc
    }

    /// Inverse of a unit by the coefficient recursion
    /// `y_k = -x_0^{-1} * sum_{i=1..k} x_i y_{k-i}`.
    pub fn invert_unit(&self) -> Result<Series> {
        if !self.is_unit() {
            return Err(Error::NotUnit(self.valuation()));
        }
        let p = self.p;
        let n = self.level();
        let c0 = p.inv(self.coeffs[0]);
        let mut y = vec![0u32; n];
        y[0] = c0;
        for k in 1..n {
            let s = (1..=k).fold(0, |s, i| p.add(s, p.mul(self.coeffs[i], y[k - i])));
            y[k] = p.mul(p.neg(s), c0);
        }
        Ok(Series::from_raw(p, y))
    }

    /// The ring involution `T -> (1 + T)^{-1} - 1`.
    pub fn iota(&self) -> Series {
        let n = self.level();
        if n == 0 {
            return self.clone();
        }
        let image_of_t = &Series::gamma(self.p, n)
            .invert_unit()
            .expect("gamma is a unit")
            - &Series::one(self.p, n);
        // Horner evaluation of sum c_i u^i at u = image_of_t.
        let mut acc = Series::zero(self.p, n);
        for &c in self.coeffs.iter().rev() {
            acc = &(&acc * &image_of_t) + &Series::constant(self.p, n, c as i64);
        }
        acc
    }

    /// Reduction to a lower level.
    pub fn truncate(&self, level: usize) -> Result<Series> {
        if level > self.level() {
            return Err(Error::Precondition(format!(
                "cannot truncate level {} series to level {level}",
                self.level()
            )));
        }
        Ok(Series::from_raw(self.p, self.coeffs[..level].to_vec()))
    }

    /// The zero-padded lift to a higher level.
    pub fn extend(&self, level: usize) -> Result<Series> {
        if level < self.level() {
            return Err(Error::Precondition(format!(
                "cannot extend level {} series to level {level}",
                self.level()
            )));
        }
        check_level(level, 0)?;
        let mut c = self.coeffs.clone();
        c.resize(level, 0);
        Ok(Series::from_raw(self.p, c))
    }

    /// Coefficients in the basis `gamma^0, ..., gamma^{n-1}`.
    ///
    /// Only defined when `n` is a power of `p`, where `(1+T)^n = 1` and the ring
    /// is the group ring of a cyclic group of order `n`.
    pub fn gamma_basis(&self) -> Result<Vec<u32>> {
        let n = self.level();
        require_power_of_prime(self.p, n)?;
        let binom = binomials_mod(self.p, n);
        let p = self.p;
        // T^i = (gamma - 1)^i = sum_j C(i, j) (-1)^{i-j} gamma^j
        let mut out = vec![0u32; n];
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, slot) in out.iter_mut().enumerate().take(i + 1) {
                let mut term = p.mul(c, binom[i][j]);
                if (i - j) % 2 == 1 {
                    term = p.neg(term);
                }
                *slot = p.add(*slot, term);
            }
        }
        Ok(out)
    }

    /// Inverse of [`Series::gamma_basis`]: `gamma^j = sum_i C(j, i) T^i`.
    pub fn from_gamma_basis(p: Prime, coords: &[u32]) -> Result<Series> {
        let n = coords.len();
        check_level(n, 1)?;
        require_power_of_prime(p, n)?;
        let binom = binomials_mod(p, n);
        let mut out = vec![0u32; n];
        for (j, &d) in coords.iter().enumerate() {
            let d = d % p.get();
            for (i, slot) in out.iter_mut().enumerate().take(j + 1) {
                *slot = p.add(*slot, p.mul(d, binom[j][i]));
            }
        }
        Ok(Series::from_raw(p, out))
    }

    /// Position in the lexicographic (base-p, constant term least significant)
    /// enumeration of the level.
    pub fn to_index(&self) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p.get() as u64 + c as u64)
    }

    pub fn from_index(p: Prime, level: usize, mut index: u64) -> Series {
        let mut c = Vec::with_capacity(level);
        for _ in 0..level {
            c.push((index % p.get() as u64) as u32);
            index /= p.get() as u64;
        }
        Series::from_raw(p, c)
    }

    /// Every element of the level, in index order.
    pub fn all(p: Prime, level: usize) -> impl Iterator<Item = Series> + Clone {
        let count = (p.get() as u64).pow(level as u32);
        (0..count).map(move |i| Series::from_index(p, level, i))
    }

    pub fn random<R: Rng + ?Sized>(p: Prime, level: usize, rng: &mut R) -> Series {
        Series::from_raw(p, (0..level).map(|_| rng.gen_range(0..p.get())).collect())
    }
}

pub(crate) fn require_power_of_prime(p: Prime, n: usize) -> Result<()> {
    if p.log_exact(n).is_none() {
        return Err(Error::NotPowerOfPrime { level: n, p: p.get() });
    }
    Ok(())
}

/// Pascal's triangle mod p, rows `0..n`.
fn binomials_mod(p: Prime, n: usize) -> Vec<Vec<u32>> {
    let mut rows: Vec<Vec<u32>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = vec![0u32; i + 1];
        row[0] = 1;
        row[i] = 1;
        for j in 1..i {
            row[j] = p.add(rows[i - 1][j - 1], rows[i - 1][j]);
        }
        rows.push(row);
    }
    rows
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Series> for &Series {
            type Output = Series;
            /// Panics when the operands differ in prime or level; use the
            /// `try_` form to get an error instead.
            fn $method(self, rhs: &Series) -> Series {
                self.$checked(rhs).unwrap_or_else(|e| panic!("{e}"))
            }
        }
        impl $tr<Series> for Series {
            type Output = Series;
            fn $method(self, rhs: Series) -> Series {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, try_add);
forward_binop!(Sub, sub, try_sub);
forward_binop!(Mul, mul, try_mul);

impl Neg for &Series {
    type Output = Series;
    fn neg(self) -> Series {
        let p = self.p;
        Series::from_raw(p, self.coeffs.iter().map(|&a| p.neg(a)).collect())
    }
}

impl Neg for Series {
    type Output = Series;
    fn neg(self) -> Series {
        -&self
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if wrote {
                f.write_str(" + ")?;
            }
            match (i, c) {
                (0, _) => write!(f, "{c}")?,
                (1, 1) => f.write_str("T")?,
                (1, _) => write!(f, "{c}T")?,
                (_, 1) => write!(f, "T^{i}")?,
                _ => write!(f, "{c}T^{i}")?,
            }
            wrote = true;
        }
        if !wrote {
            f.write_str("0")?;
        }
        Ok(())
    }
}
