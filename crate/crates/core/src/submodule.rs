//! Maximal cyclic submodules of `Omega_n^2`.
//!
//! A cyclic submodule is maximal when it has a generator with a unit
//! coordinate. Every such submodule has exactly one canonical generator:
//!
//! * type A: `(1, g)` with `g` in `Omega_n` (`p^n` of these),
//! * type B: `(T*h, 1)` with `h` in `Omega_{n-1}` (`p^(n-1)` of these),
//!
//! for a total of `p^(n-1) (p+1)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::series::{check_level, Prime, Series};

/// Upper bound on the number of objects any exhaustive routine will visit.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

pub(crate) fn check_enumeration(what: &'static str, value: u128) -> Result<()> {
    if value > ENUMERATION_LIMIT {
        return Err(Error::ResourceBound {
            what,
            value,
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(())
}

fn checked_pow(p: Prime, k: usize, what: &'static str) -> Result<u128> {
    p.checked_power(k).ok_or(Error::ResourceBound {
        what,
        value: u128::MAX,
        limit: u128::MAX,
    })
}

/// An element `(first, second)` of `Omega_n^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModuleVector {
    pub first: Series,
    pub second: Series,
}

impl ModuleVector {
    pub fn new(first: Series, second: Series) -> Result<Self> {
        if first.prime() != second.prime() || first.level() != second.level() {
            return Err(Error::Mismatch(format!(
                "components at levels {} and {}",
                first.level(),
                second.level()
            )));
        }
        Ok(ModuleVector { first, second })
    }

    pub fn zero(p: Prime, level: usize) -> Self {
        ModuleVector {
            first: Series::zero(p, level),
            second: Series::zero(p, level),
        }
    }

    pub fn prime(&self) -> Prime {
        self.first.prime()
    }

    pub fn level(&self) -> usize {
        self.first.level()
    }

    pub fn valuation(&self) -> usize {
        self.first.valuation().min(self.second.valuation())
    }

    /// True when the vector generates a maximal cyclic submodule.
    pub fn is_maximal(&self) -> bool {
        self.valuation() == 0
    }

    pub fn scale(&self, tau: &Series) -> ModuleVector {
        ModuleVector {
            first: tau * &self.first,
            second: tau * &self.second,
        }
    }

    pub fn shift_up(&self, k: usize) -> ModuleVector {
        ModuleVector {
            first: self.first.shift_up(k),
            second: self.second.shift_up(k),
        }
    }

    /// Coordinates over `F_p`: the first component's coefficients, then the second's.
    pub fn to_flat(&self) -> Vec<u32> {
        let mut v = self.first.coeffs().to_vec();
        v.extend_from_slice(self.second.coeffs());
        v
    }

    pub fn from_flat(p: Prime, flat: &[u32]) -> Result<Self> {
        if !flat.len().is_multiple_of(2) {
            return Err(Error::Mismatch(format!("odd flat length {}", flat.len())));
        }
        let n = flat.len() / 2;
        ModuleVector::new(
            Series::new(p, flat[..n].to_vec())?,
            Series::new(p, flat[n..].to_vec())?,
        )
    }

    /// Every element of `Omega_n^2`.
    pub fn all(p: Prime, level: usize) -> impl Iterator<Item = ModuleVector> {
        Series::all(p, level).flat_map(move |a| {
            Series::all(p, level).map(move |b| ModuleVector {
                first: a.clone(),
                second: b,
            })
        })
    }

    /// Reduces to `canonical_form`; errors on non-maximal input.
    pub fn canonical_form(&self) -> Result<CyclicSubmodule> {
        CyclicSubmodule::from_generator(self)
    }
}

impl fmt::Display for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.first, self.second)
    }
}

/// The canonical generator parameter.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalForm {
    /// `<(1, g)>`, `g` at level `n`.
    A(Series),
    /// `<(T*h, 1)>`, `h` at level `n - 1`.
    B(Series),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicSubmodule {
    p: Prime,
    level: usize,
    form: CanonicalForm,
}

/// `N1 ∩ N2` as a cyclic module of order `p^size_exponent`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intersection {
    pub size_exponent: usize,
    pub generator: Option<ModuleVector>,
}

/// Invariants of `Omega_n^2 / (N1 + N2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuotientInvariants {
    pub quotient_size_exponent: usize,
    /// Exponents `e` of the cyclic factors `Omega/(T^e)`, largest first.
    pub cyclic_structure: Vec<usize>,
}

impl CyclicSubmodule {
    pub fn type_a(g: Series) -> Result<Self> {
        check_level(g.level(), 1)?;
        Ok(CyclicSubmodule {
            p: g.prime(),
            level: g.level(),
            form: CanonicalForm::A(g),
        })
    }

    /// `<(T*h, 1)>` at level `h.level() + 1`.
    pub fn type_b(h: Series) -> Result<Self> {
        let level = h.level() + 1;
        check_level(level, 1)?;
        Ok(CyclicSubmodule {
            p: h.prime(),
            level,
            form: CanonicalForm::B(h),
        })
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn form(&self) -> &CanonicalForm {
        &self.form
    }

    pub fn is_type_a(&self) -> bool {
        matches!(self.form, CanonicalForm::A(_))
    }

    /// Normalizes a maximal generator by the unit in its first unit coordinate.
    pub fn from_generator(v: &ModuleVector) -> Result<Self> {
        if !v.is_maximal() {
            return Err(Error::NotMaximal);
        }
        let n = v.level();
        if v.first.is_unit() {
            let g = &v.first.invert_unit()? * &v.second;
            return CyclicSubmodule::type_a(g);
        }
        // first has positive valuation, so u^{-1} * first = T * h~ with h~ mod T^{n-1} unique
        let scaled = &v.second.invert_unit()? * &v.first;
        let h = Series::new(v.prime(), scaled.coeffs()[1..].to_vec())?;
        debug_assert_eq!(h.level(), n - 1);
        CyclicSubmodule::type_b(h)
    }

    pub fn generator(&self) -> ModuleVector {
        let (p, n) = (self.p, self.level);
        match &self.form {
            CanonicalForm::A(g) => ModuleVector {
                first: Series::one(p, n),
                second: g.clone(),
            },
            CanonicalForm::B(h) => {
                let lifted = h.extend(n).expect("h sits one level below n");
                ModuleVector {
                    first: lifted.shift_up(1),
                    second: Series::one(p, n),
                }
            }
        }
    }

    /// `F_p`-basis `{T^i * generator : i < n}` in flattened coordinates.
    pub fn fp_basis(&self) -> Vec<Vec<u32>> {
        let g = self.generator();
        (0..self.level).map(|i| g.shift_up(i).to_flat()).collect()
    }

    pub fn span(&self) -> Subspace {
        Subspace::span(self.p, 2 * self.level, self.fp_basis())
            .expect("basis vectors have length 2n")
    }

    /// All `p^n` elements `tau * generator`.
    pub fn elements(&self) -> impl Iterator<Item = ModuleVector> + '_ {
        let g = self.generator();
        Series::all(self.p, self.level).map(move |tau| g.scale(&tau))
    }

    /// Position in [`enumerate_maximal`] order: type A by parameter index,
    /// then type B offset by `p^n`.
    pub fn index(&self) -> u64 {
        match &self.form {
            CanonicalForm::A(g) => g.to_index(),
            CanonicalForm::B(h) => (self.p.get() as u64).pow(self.level as u32) + h.to_index(),
        }
    }

    pub fn from_index(p: Prime, level: usize, index: u64) -> Result<Self> {
        check_level(level, 1)?;
        let type_a = (p.get() as u64).pow(level as u32);
        let total = type_a + type_a / p.get() as u64;
        if index >= total {
            return Err(Error::Precondition(format!(
                "index {index} out of range for {total} maximal submodules"
            )));
        }
        if index < type_a {
            CyclicSubmodule::type_a(Series::from_index(p, level, index))
        } else {
            CyclicSubmodule::type_b(Series::from_index(p, level - 1, index - type_a))
        }
    }

    fn check_pair(&self, other: &CyclicSubmodule) -> Result<()> {
        if self.p != other.p || self.level != other.level {
            return Err(Error::Mismatch(format!(
                "submodules over F_{} level {} and F_{} level {}",
                self.p, self.level, other.p, other.level
            )));
        }
        Ok(())
    }

    /// `N1 ∩ N2`. Matching types use the valuation closed form; mixed types
    /// go through [`CyclicSubmodule::intersect_linear`].
    pub fn intersect(&self, other: &CyclicSubmodule) -> Result<Intersection> {
        self.check_pair(other)?;
        let n = self.level;
        let v = match (&self.form, &other.form) {
            (CanonicalForm::A(g1), CanonicalForm::A(g2)) => (g1 - g2).valuation(),
            // T*(h1 - h2) at level n
            (CanonicalForm::B(h1), CanonicalForm::B(h2)) => (1 + (h1 - h2).valuation()).min(n),
            _ => return self.intersect_linear(other),
        };
        Ok(Intersection {
            size_exponent: v,
            generator: (v > 0).then(|| self.generator().shift_up(n - v)),
        })
    }

    /// `N1 ∩ N2` by `F_p` linear algebra on the spans.
    pub fn intersect_linear(&self, other: &CyclicSubmodule) -> Result<Intersection> {
        self.check_pair(other)?;
        let d = self.span().intersection(&other.span())?.dim();
        // a submodule of N1 ≅ Omega_n of order p^d is T^{n-d} N1
        Ok(Intersection {
            size_exponent: d,
            generator: (d > 0).then(|| self.generator().shift_up(self.level - d)),
        })
    }

    /// Order and cyclic decomposition of `Omega_n^2 / (N1 + N2)`.
    pub fn sum_and_quotient(&self, other: &CyclicSubmodule) -> Result<QuotientInvariants> {
        self.check_pair(other)?;
        let n = self.level;
        let sum = self.span().sum(&other.span())?;
        let whole_dim = 2 * n;
        // dim T^k Q = dim(T^k Omega_n^2 + S) - dim S
        let t_power_dims: Vec<usize> = (0..=n)
            .map(|k| {
                let t_k = Subspace::span(
                    self.p,
                    whole_dim,
                    (k..n).flat_map(|i| [i, n + i]).map(|pos| {
                        let mut e = vec![0u32; whole_dim];
                        e[pos] = 1;
                        e
                    }),
                )
                .expect("unit vectors");
                t_k.sum(&sum).expect("same ambient").dim() - sum.dim()
            })
            .collect();
        // number of factors of length >= k+1 is dim T^k Q - dim T^{k+1} Q
        let mut cyclic_structure = Vec::new();
        for k in (0..n).rev() {
            let at_least = t_power_dims[k] - t_power_dims[k + 1];
            let longer = cyclic_structure.len();
            cyclic_structure.extend(std::iter::repeat_n(k + 1, at_least - longer));
        }
        Ok(QuotientInvariants {
            quotient_size_exponent: whole_dim - sum.dim(),
            cyclic_structure,
        })
    }

    /// Image under `Omega_n^2 -> Omega_m^2`; keeps the type.
    pub fn project(&self, target_level: usize) -> Result<CyclicSubmodule> {
        if target_level > self.level || target_level == 0 {
            return Err(Error::Precondition(format!(
                "projection from level {} to level {target_level}",
                self.level
            )));
        }
        match &self.form {
            CanonicalForm::A(g) => CyclicSubmodule::type_a(g.truncate(target_level)?),
            CanonicalForm::B(h) => CyclicSubmodule::type_b(h.truncate(target_level - 1)?),
        }
    }

    /// All canonical forms at `target_level` projecting onto `self`.
    pub fn lifts(&self, target_level: usize) -> Result<impl Iterator<Item = CyclicSubmodule> + '_> {
        if target_level < self.level {
            return Err(Error::Precondition(format!(
                "lift from level {} to level {target_level}",
                self.level
            )));
        }
        check_level(target_level, 1)?;
        let extra = target_level - self.level;
        check_enumeration("lift fiber size", checked_pow(self.p, extra, "lift fiber size")?)?;
        let (base, offset) = match &self.form {
            CanonicalForm::A(g) => (g.extend(target_level)?, self.level),
            CanonicalForm::B(h) => (h.extend(target_level - 1)?, self.level - 1),
        };
        let is_a = self.is_type_a();
        Ok(Series::all(self.p, extra).map(move |tail| {
            let shift = tail
                .extend(base.level())
                .expect("tail fits")
                .shift_up(offset);
            let param = &base + &shift;
            if is_a {
                CyclicSubmodule::type_a(param).expect("valid level")
            } else {
                CyclicSubmodule::type_b(param).expect("valid level")
            }
        }))
    }
}

impl fmt::Display for CyclicSubmodule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            CanonicalForm::A(g) => write!(f, "A<(1, {g})>"),
            CanonicalForm::B(h) => write!(f, "B<(T*({h}), 1)>"),
        }
    }
}

/// `p^(n-1) (p+1)`.
pub fn count_maximal(p: Prime, n: usize) -> Result<u128> {
    check_level(n, 1)?;
    let base = checked_pow(p, n - 1, "maximal submodule count")?;
    base.checked_mul(p.get() as u128 + 1).ok_or(Error::ResourceBound {
        what: "maximal submodule count",
        value: u128::MAX,
        limit: u128::MAX,
    })
}

/// `p^(2n) - p^(2(n-1))`.
pub fn count_maximal_generators(p: Prime, n: usize) -> Result<u128> {
    check_level(n, 1)?;
    let all = checked_pow(p, 2 * n, "element count of Omega_n^2")?;
    Ok(all - checked_pow(p, 2 * (n - 1), "element count of Omega_n^2")?)
}

/// Exhaustive census of maximal generators over all of `Omega_n^2`.
pub fn census_maximal_generators(p: Prime, n: usize) -> Result<u128> {
    check_level(n, 1)?;
    check_enumeration("element count of Omega_n^2", checked_pow(p, 2 * n, "element count of Omega_n^2")?)?;
    Ok(ModuleVector::all(p, n).filter(ModuleVector::is_maximal).count() as u128)
}

/// Every maximal cyclic submodule once, type A first.
pub fn enumerate_maximal(p: Prime, n: usize) -> Result<impl Iterator<Item = CyclicSubmodule> + Clone> {
    check_enumeration("maximal submodule count", count_maximal(p, n)?)?;
    let a = Series::all(p, n).map(|g| CyclicSubmodule::type_a(g).expect("valid level"));
    let b = Series::all(p, n - 1).map(|h| CyclicSubmodule::type_b(h).expect("valid level"));
    Ok(a.chain(b))
}

/// A compatible family of canonical submodules at ascending levels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubmoduleTower {
    stages: Vec<CyclicSubmodule>,
}

impl SubmoduleTower {
    pub fn new(stages: Vec<CyclicSubmodule>) -> Result<Self> {
        if stages.is_empty() {
            return Err(Error::Precondition("a tower needs at least one stage".into()));
        }
        for w in stages.windows(2) {
            if w[0].prime() != w[1].prime() || w[0].level() >= w[1].level() {
                return Err(Error::Precondition(
                    "tower levels must ascend over a common prime".into(),
                ));
            }
            if w[1].project(w[0].level())? != w[0] {
                return Err(Error::Precondition(format!(
                    "stage at level {} does not project onto stage at level {}",
                    w[1].level(),
                    w[0].level()
                )));
            }
        }
        Ok(SubmoduleTower { stages })
    }

    /// Projects `top` onto each of `1..=top.level()`.
    pub fn from_top(top: &CyclicSubmodule) -> Self {
        let stages = (1..=top.level())
            .map(|l| top.project(l).expect("level in range"))
            .collect();
        SubmoduleTower { stages }
    }

    pub fn prime(&self) -> Prime {
        self.stages[0].prime()
    }

    pub fn levels(&self) -> Vec<usize> {
        self.stages.iter().map(CyclicSubmodule::level).collect()
    }

    pub fn stages(&self) -> &[CyclicSubmodule] {
        &self.stages
    }

    pub fn top(&self) -> &CyclicSubmodule {
        self.stages.last().expect("non-empty")
    }

    /// `(level, size_exponent of the intersection)` at each shared level.
    pub fn intersection_profile(&self, other: &SubmoduleTower) -> Result<Vec<(usize, usize)>> {
        if self.levels() != other.levels() {
            return Err(Error::Mismatch("towers over different level sets".into()));
        }
        self.stages
            .iter()
            .zip(&other.stages)
            .map(|(a, b)| Ok((a.level(), a.intersect(b)?.size_exponent)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn p3() -> Prime {
        Prime::new(3).unwrap()
    }

    fn s(p: Prime, c: &[i64]) -> Series {
        Series::from_signed(p, c).unwrap()
    }

    fn mv(p: Prime, a: &[i64], b: &[i64]) -> ModuleVector {
        ModuleVector::new(s(p, a), s(p, b)).unwrap()
    }

    fn element_set(it: impl Iterator<Item = ModuleVector>) -> HashSet<ModuleVector> {
        it.collect()
    }

    /// Submodule generated by an arbitrary vector, by brute force.
    fn generated(v: &ModuleVector) -> HashSet<ModuleVector> {
        element_set(Series::all(v.prime(), v.level()).map(|t| v.scale(&t)))
    }

    #[test]
    fn maximality_examples() {
        let p = p3();
        assert!(mv(p, &[1, 0], &[0, 0]).is_maximal());
        assert!(!mv(p, &[0, 1], &[0, 1]).is_maximal());
        assert!(mv(p, &[2, 0], &[1, 1]).is_maximal());
    }

    #[test]
    fn canonical_form_examples() {
        let p = p3();
        let v = mv(p, &[2, 0], &[1, 1]);
        let c = v.canonical_form().unwrap();
        assert_eq!(c, CyclicSubmodule::type_a(s(p, &[2, 2])).unwrap());
        assert_eq!(generated(&v), element_set(c.elements()));

        let g = s(p, &[1, 2]);
        assert_eq!(
            mv(p, &[1, 0], &[1, 2]).canonical_form().unwrap(),
            CyclicSubmodule::type_a(g).unwrap()
        );

        let w = mv(p, &[0, 1], &[2, 0]);
        let c = w.canonical_form().unwrap();
        assert_eq!(c, CyclicSubmodule::type_b(s(p, &[2])).unwrap());
        assert_eq!(generated(&w), element_set(c.elements()));

        assert_eq!(mv(p, &[0, 1], &[0, 2]).canonical_form(), Err(Error::NotMaximal));
    }

    #[test]
    fn canonical_form_sound_exhaustive() {
        let p = p3();
        for n in 1..=2 {
            for v in ModuleVector::all(p, n).filter(ModuleVector::is_maximal) {
                let c = v.canonical_form().unwrap();
                assert_eq!(generated(&v), element_set(c.elements()), "{v}");
            }
        }
    }

    #[test]
    fn counts() {
        for (pp, n, want) in [(3, 1, 4u128), (3, 2, 12), (5, 2, 30)] {
            let p = Prime::new(pp).unwrap();
            assert_eq!(count_maximal(p, n).unwrap(), want);
            let forms: HashSet<_> = enumerate_maximal(p, n).unwrap().collect();
            assert_eq!(forms.len() as u128, want);
        }
        for (pp, n, want) in [(3, 1, 8u128), (3, 2, 72), (5, 1, 24)] {
            let p = Prime::new(pp).unwrap();
            assert_eq!(count_maximal_generators(p, n).unwrap(), want);
            assert_eq!(census_maximal_generators(p, n).unwrap(), want);
        }
    }

    #[test]
    fn enumeration_is_index_order() {
        let p = p3();
        for (i, m) in enumerate_maximal(p, 3).unwrap().enumerate() {
            assert_eq!(m.index(), i as u64);
            assert_eq!(CyclicSubmodule::from_index(p, 3, i as u64).unwrap(), m);
        }
        assert!(CyclicSubmodule::from_index(p, 3, 36).is_err());
    }

    #[test]
    fn resource_bounds() {
        let p = Prime::new(97).unwrap();
        assert!(enumerate_maximal(p, 5).err().unwrap().is_resource());
        assert!(census_maximal_generators(p, 4).unwrap_err().is_resource());
        assert!(count_maximal(p, 12).is_ok());
    }

    #[test]
    fn intersection_examples() {
        let p = p3();
        let n1 = CyclicSubmodule::type_a(s(p, &[0, 0])).unwrap();
        let n2 = CyclicSubmodule::type_a(s(p, &[0, 1])).unwrap();
        let i = n1.intersect(&n2).unwrap();
        assert_eq!(i.size_exponent, 1);
        let brute: HashSet<_> = element_set(n1.elements())
            .intersection(&element_set(n2.elements()))
            .cloned()
            .collect();
        assert_eq!(brute.len(), 3);
        assert_eq!(generated(&i.generator.unwrap()), brute);

        assert_eq!(n1.intersect(&n1).unwrap().size_exponent, 2);

        let lines: Vec<_> = enumerate_maximal(p, 1).unwrap().collect();
        for a in &lines {
            for b in &lines {
                let e = a.intersect(b).unwrap().size_exponent;
                assert_eq!(e, usize::from(a == b));
            }
        }
    }

    #[test]
    fn closed_form_matches_brute_force_p3_n2() {
        let p = p3();
        let all: Vec<_> = enumerate_maximal(p, 2).unwrap().collect();
        for a in &all {
            let ea = element_set(a.elements());
            for b in &all {
                let brute = ea.intersection(&element_set(b.elements())).count();
                let i = a.intersect(b).unwrap();
                assert_eq!(3usize.pow(i.size_exponent as u32), brute);
                assert_eq!(i, a.intersect_linear(b).unwrap());
                match &i.generator {
                    Some(g) => {
                        let gen = generated(g);
                        assert_eq!(gen.len(), brute);
                        assert!(gen.iter().all(|x| ea.contains(x)));
                    }
                    None => assert_eq!(brute, 1),
                }
            }
        }
    }

    #[test]
    fn quotient_examples() {
        let p = p3();
        let a = CyclicSubmodule::type_a(s(p, &[1, 2])).unwrap();
        let q = a.sum_and_quotient(&a).unwrap();
        assert_eq!(q.quotient_size_exponent, 2);
        assert_eq!(q.cyclic_structure, vec![2]);

        let n1 = CyclicSubmodule::type_a(s(p, &[0, 0])).unwrap();
        let n2 = CyclicSubmodule::type_a(s(p, &[0, 1])).unwrap();
        let q = n1.sum_and_quotient(&n2).unwrap();
        assert_eq!(q.quotient_size_exponent, 1);
        assert_eq!(q.cyclic_structure, vec![1]);
        // brute-force coset count: |Omega_2^2| / |N1 + N2|
        let sum: HashSet<_> = n1
            .elements()
            .flat_map(|x| {
                n2.elements()
                    .map(move |y| ModuleVector::new(&x.first + &y.first, &x.second + &y.second).unwrap())
            })
            .collect();
        assert_eq!(81 / sum.len(), 3);

        let lines: Vec<_> = enumerate_maximal(p, 1).unwrap().collect();
        let q = lines[0].sum_and_quotient(&lines[3]).unwrap();
        assert_eq!(q.quotient_size_exponent, 0);
        assert!(q.cyclic_structure.is_empty());
    }

    #[test]
    fn duality_all_pairs_p3_n2() {
        let p = p3();
        let all: Vec<_> = enumerate_maximal(p, 2).unwrap().collect();
        let mut pairs = 0;
        for a in &all {
            for b in &all {
                let v = a.intersect(b).unwrap().size_exponent;
                let q = a.sum_and_quotient(b).unwrap();
                assert_eq!(v, q.quotient_size_exponent);
                assert_eq!(q.cyclic_structure.iter().sum::<usize>(), v);
                pairs += 1;
            }
        }
        assert_eq!(pairs, 144);
    }

    #[test]
    fn projection_and_lifts() {
        let p = p3();
        let level2: Vec<_> = enumerate_maximal(p, 2).unwrap().collect();
        for n in enumerate_maximal(p, 1).unwrap() {
            assert_eq!(n.project(1).unwrap(), n);
            let lifts: Vec<_> = n.lifts(2).unwrap().collect();
            assert_eq!(lifts.len(), 3);
            assert!(lifts.iter().all(|l| l.project(1).unwrap() == n && l.is_type_a() == n.is_type_a()));
            let fiber = level2.iter().filter(|m| m.project(1).unwrap() == n).count();
            assert_eq!(fiber, 3);
        }
        let g = s(p, &[1, 2]);
        let a = CyclicSubmodule::type_a(g.clone()).unwrap();
        let lifted: HashSet<_> = a.lifts(3).unwrap().collect();
        let expected: HashSet<_> = (0..3)
            .map(|c| {
                let mut coeffs = g.coeffs().to_vec();
                coeffs.push(c);
                CyclicSubmodule::type_a(Series::new(p, coeffs).unwrap()).unwrap()
            })
            .collect();
        assert_eq!(lifted, expected);
        assert!(a.project(3).is_err());
        assert!(a.lifts(1).is_err());
        assert!(a.project(0).is_err());
    }

    #[test]
    fn tower_validation_and_profile() {
        let p = p3();
        let top = CyclicSubmodule::type_a(s(p, &[0, 1, 0, 0])).unwrap();
        let t1 = SubmoduleTower::from_top(&top);
        assert_eq!(t1.levels(), vec![1, 2, 3, 4]);
        assert!(SubmoduleTower::new(t1.stages().to_vec()).is_ok());
        let t0 = SubmoduleTower::from_top(&CyclicSubmodule::type_a(Series::zero(p, 4)).unwrap());
        let profile = t0.intersection_profile(&t1).unwrap();
        assert_eq!(profile, vec![(1, 1), (2, 1), (3, 1), (4, 1)]);
        let same = t1.intersection_profile(&t1).unwrap();
        assert!(same.iter().all(|&(l, e)| l == e));

        let bad = vec![
            CyclicSubmodule::type_a(s(p, &[1])).unwrap(),
            CyclicSubmodule::type_a(s(p, &[0, 1])).unwrap(),
        ];
        assert!(SubmoduleTower::new(bad).is_err());
    }

    #[test]
    fn mismatched_pairs_rejected() {
        let p = p3();
        let a = CyclicSubmodule::type_a(s(p, &[1])).unwrap();
        let b = CyclicSubmodule::type_a(s(p, &[1, 0])).unwrap();
        assert!(matches!(a.intersect(&b), Err(Error::Mismatch(_))));
        assert!(matches!(a.sum_and_quotient(&b), Err(Error::Mismatch(_))));
    }
}
