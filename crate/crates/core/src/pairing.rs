//! A finite model of a self-dual `Omega`-module with an involution-equivariant
//! pairing.
//!
//! The space is a rank block `Omega_n a + Omega_n b` followed by torsion blocks
//! `Omega_{m_i} e_i + Omega_{m_i} f_i`. Within a block of level `m` the pairing is
//!
//! ```text
//! (x_a a + x_b b, y_a a + y_b b) = eps(x_a * iota(y_b) - x_b * iota(y_a))
//! ```
//!
//! where `eps` reads off the `gamma^0` coordinate in the group-ring basis.
//! Distinct blocks are orthogonal. Every level must be a power of `p` so that
//! `Omega_m` is the group ring of a cyclic group of order `m`.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::linalg::{FpMatrix, Subspace};
use crate::series::{check_level, require_power_of_prime, Prime, Series};

/// Total `F_p`-dimension accepted by linear-algebra routines.
pub const LINEAR_ALGEBRA_DIM_LIMIT: usize = 4096;
/// Total `F_p`-dimension accepted by maximal-isotropic enumeration.
pub const ENUMERATION_DIM_LIMIT: usize = 12;
/// Cap on the number of maximal isotropic subspaces one enumeration may return.
pub const ISOTROPIC_RESULT_LIMIT: usize = 250_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceShape {
    p: Prime,
    rank_level: usize,
    torsion_levels: Vec<usize>,
}

impl SpaceShape {
    pub fn new(p: Prime, rank_level: usize, torsion_levels: Vec<usize>) -> Result<Self> {
        for &m in std::iter::once(&rank_level).chain(&torsion_levels) {
            check_level(m, 1)?;
            require_power_of_prime(p, m)?;
        }
        let shape = SpaceShape {
            p,
            rank_level,
            torsion_levels,
        };
        if shape.dim() > LINEAR_ALGEBRA_DIM_LIMIT {
            return Err(Error::ResourceBound {
                what: "pairing space dimension",
                value: shape.dim() as u128,
                limit: LINEAR_ALGEBRA_DIM_LIMIT as u128,
            });
        }
        Ok(shape)
    }

    pub fn prime(&self) -> Prime {
        self.p
    }

    pub fn rank_level(&self) -> usize {
        self.rank_level
    }

    pub fn torsion_levels(&self) -> &[usize] {
        &self.torsion_levels
    }

    /// Levels of the blocks, rank block first.
    pub fn block_levels(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.rank_level).chain(self.torsion_levels.iter().copied())
    }

    /// Levels of the generators `a, b, e_1, f_1, ...`.
    pub fn generator_levels(&self) -> Vec<usize> {
        self.block_levels().flat_map(|m| [m, m]).collect()
    }

    pub fn generator_names(&self) -> Vec<String> {
        let mut names = vec!["a".to_string(), "b".to_string()];
        for i in 1..=self.torsion_levels.len() {
            names.push(format!("e{i}"));
            names.push(format!("f{i}"));
        }
        names
    }

    pub fn dim(&self) -> usize {
        2 * self.block_levels().sum::<usize>()
    }

    /// Flattened dimension of the rank block.
    pub fn rank_dim(&self) -> usize {
        2 * self.rank_level
    }

    /// Start offset of each generator's coordinates in the flattened space.
    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.generator_levels()
            .into_iter()
            .map(|m| {
                let o = acc;
                acc += m;
                o
            })
            .collect()
    }

    /// Multiplication by `T` on flattened coordinates.
    pub fn apply_t(&self, v: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; v.len()];
        for (o, m) in self.offsets().into_iter().zip(self.generator_levels()) {
            out[o + 1..o + m].copy_from_slice(&v[o..o + m - 1]);
        }
        out
    }

    /// The Gram matrix `G[i][j] = (e_i, e_j)` on the flattened basis
    /// `T^k * generator`.
    pub fn gram_matrix(&self) -> FpMatrix {
        let p = self.p;
        let dim = self.dim();
        let mut g = FpMatrix::zeros(p, dim, dim);
        let offsets = self.offsets();
        for (block, m) in self.block_levels().enumerate() {
            let (oa, ob) = (offsets[2 * block], offsets[2 * block + 1]);
            let a_basis = |k: usize| Series::monomial(p, m, k, 1);
            for i in 0..m {
                for j in 0..m {
                    // (T^i a, T^j b) = eps(T^i iota(T^j)); the form is alternating
                    let v = block_form(&a_basis(i), &Series::zero(p, m), &Series::zero(p, m), &a_basis(j));
                    g.set(oa + i, ob + j, v);
                    g.set(ob + j, oa + i, p.neg(v));
                }
            }
        }
        g
    }
}

/// `eps(x_a iota(y_b) - x_b iota(y_a))`.
fn block_form(xa: &Series, xb: &Series, ya: &Series, yb: &Series) -> u32 {
    let inner = &(xa * &yb.iota()) - &(xb * &ya.iota());
    identity_coefficient(&inner)
}

/// The `gamma^0` coordinate.
pub fn identity_coefficient(x: &Series) -> u32 {
    x.gamma_basis().expect("block levels are powers of p")[0]
}

/// An element of the space: one coordinate per generator `a, b, e_1, f_1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceElement {
    shape: SpaceShape,
    coords: Vec<Series>,
}

impl SpaceElement {
    pub fn new(shape: &SpaceShape, coords: Vec<Series>) -> Result<Self> {
        let levels = shape.generator_levels();
        if coords.len() != levels.len()
            || coords
                .iter()
                .zip(&levels)
                .any(|(c, &m)| c.level() != m || c.prime() != shape.p)
        {
            return Err(Error::Mismatch(
                "coordinates do not match the block levels of the shape".into(),
            ));
        }
        Ok(SpaceElement {
            shape: shape.clone(),
            coords,
        })
    }

    pub fn zero(shape: &SpaceShape) -> Self {
        let coords = shape
            .generator_levels()
            .into_iter()
            .map(|m| Series::zero(shape.p, m))
            .collect();
        SpaceElement {
            shape: shape.clone(),
            coords,
        }
    }

    /// The generator with the given index in `a, b, e_1, f_1, ...` order.
    pub fn generator(shape: &SpaceShape, index: usize) -> Result<Self> {
        let mut x = Self::zero(shape);
        let Some(c) = x.coords.get_mut(index) else {
            return Err(Error::Precondition(format!("no generator with index {index}")));
        };
        *c = Series::one(shape.p, c.level());
        Ok(x)
    }

    pub fn from_flat(shape: &SpaceShape, flat: &[u32]) -> Result<Self> {
        if flat.len() != shape.dim() {
            return Err(Error::Mismatch(format!(
                "flat vector of length {} for a space of dimension {}",
                flat.len(),
                shape.dim()
            )));
        }
        let mut coords = Vec::new();
        let mut at = 0;
        for m in shape.generator_levels() {
            coords.push(Series::new(shape.p, flat[at..at + m].to_vec())?);
            at += m;
        }
        Ok(SpaceElement {
            shape: shape.clone(),
            coords,
        })
    }

    pub fn random<R: rand::Rng + ?Sized>(shape: &SpaceShape, rng: &mut R) -> Self {
        let coords = shape
            .generator_levels()
            .into_iter()
            .map(|m| Series::random(shape.p, m, rng))
            .collect();
        SpaceElement {
            shape: shape.clone(),
            coords,
        }
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn coords(&self) -> &[Series] {
        &self.coords
    }

    pub fn to_flat(&self) -> Vec<u32> {
        self.coords.iter().flat_map(|c| c.coeffs().iter().copied()).collect()
    }

    /// The action of `tau`, given at a level at least the largest block level.
    pub fn act(&self, tau: &Series) -> Result<SpaceElement> {
        let coords = self
            .coords
            .iter()
            .map(|c| Ok(&tau.truncate(c.level())? * c))
            .collect::<Result<_>>()?;
        Ok(SpaceElement {
            shape: self.shape.clone(),
            coords,
        })
    }

    pub fn try_add(&self, other: &SpaceElement) -> Result<SpaceElement> {
        if self.shape != other.shape {
            return Err(Error::Mismatch("elements of different spaces".into()));
        }
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a + b)
            .collect();
        Ok(SpaceElement {
            shape: self.shape.clone(),
            coords,
        })
    }

    pub fn scale(&self, c: i64) -> SpaceElement {
        SpaceElement {
            shape: self.shape.clone(),
            coords: self.coords.iter().map(|x| x.scale(c)).collect(),
        }
    }
}

/// The pairing `(x, y)`, summed over blocks.
pub fn pairing(x: &SpaceElement, y: &SpaceElement) -> Result<u32> {
    if x.shape != y.shape {
        return Err(Error::Mismatch("pairing of elements of different spaces".into()));
    }
    let p = x.shape.p;
    Ok(x
        .coords
        .chunks(2)
        .zip(y.coords.chunks(2))
        .fold(0, |acc, (xs, ys)| {
            p.add(acc, block_form(&xs[0], &xs[1], &ys[0], &ys[1]))
        }))
}

/// An `F_p`-subspace of the flattened space, in canonical echelon form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FpSubspace {
    shape: SpaceShape,
    space: Subspace,
    t_stable: bool,
}

impl FpSubspace {
    fn wrap(shape: &SpaceShape, space: Subspace) -> Self {
        let t_stable = space.basis().iter().all(|b| space.contains(&shape.apply_t(b)));
        FpSubspace {
            shape: shape.clone(),
            space,
            t_stable,
        }
    }

    pub fn zero(shape: &SpaceShape) -> Self {
        Self::wrap(shape, Subspace::zero(shape.p, shape.dim()))
    }

    pub fn whole(shape: &SpaceShape) -> Self {
        Self::wrap(shape, Subspace::whole(shape.p, shape.dim()))
    }

    pub fn span<I>(shape: &SpaceShape, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        Ok(Self::wrap(shape, Subspace::span(shape.p, shape.dim(), vectors)?))
    }

    pub fn span_elements<'a, I>(shape: &SpaceShape, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a SpaceElement>,
    {
        let mut flats = Vec::new();
        for e in elements {
            if e.shape != *shape {
                return Err(Error::Mismatch("element of a different space".into()));
            }
            flats.push(e.to_flat());
        }
        Self::span(shape, flats)
    }

    /// The `Omega`-submodule generated by the given vectors.
    pub fn module_span<I>(shape: &SpaceShape, vectors: I) -> Result<Self>
    where
        I: IntoIterator<Item = Vec<u32>>,
    {
        let mut all = Vec::new();
        let max_level = shape.block_levels().max().unwrap_or(0);
        for v in vectors {
            let mut cur = v;
            for _ in 0..max_level {
                let next = shape.apply_t(&cur);
                all.push(cur);
                cur = next;
            }
        }
        Self::span(shape, all)
    }

    pub fn shape(&self) -> &SpaceShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        self.space.basis()
    }

    pub fn subspace(&self) -> &Subspace {
        &self.space
    }

    pub fn is_t_stable(&self) -> bool {
        self.t_stable
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.space.contains(v)
    }

    pub fn t_closure(&self) -> FpSubspace {
        Self::module_span(&self.shape, self.basis().iter().cloned()).expect("same ambient")
    }

    /// `M^perp = {x : (x, m) = 0 for all m in M}`.
    pub fn orthogonal_complement(&self) -> FpSubspace {
        self.complement_with(&self.shape.gram_matrix())
    }

    pub(crate) fn complement_with(&self, gram: &FpMatrix) -> FpSubspace {
        let dim = self.shape.dim();
        if self.dim() == 0 {
            return Self::whole(&self.shape);
        }
        // (x, m) = x^T G m, so each basis vector m contributes the row G m
        let rows: Vec<Vec<u32>> = self.basis().iter().map(|m| gram.mul_vec(m)).collect();
        let constraints = FpMatrix::from_rows(self.shape.p, dim, &rows).expect("rows have ambient length");
        Self::span(&self.shape, constraints.kernel()).expect("kernel vectors have ambient length")
    }

    pub fn is_isotropic(&self) -> bool {
        self.space.is_subspace_of(&self.orthogonal_complement().space)
    }

    pub fn is_maximal_isotropic(&self) -> bool {
        self.orthogonal_complement() == *self
    }

    pub fn intersection(&self, other: &FpSubspace) -> Result<FpSubspace> {
        if self.shape != other.shape {
            return Err(Error::Mismatch("subspaces of different spaces".into()));
        }
        Ok(Self::wrap(&self.shape, self.space.intersection(&other.space)?))
    }

    /// The rank block `Omega_n a + Omega_n b` as a subspace.
    pub fn rank_part(shape: &SpaceShape) -> FpSubspace {
        Self::coordinate_block(shape, 0..shape.rank_dim())
    }

    /// The torsion blocks as a subspace.
    pub fn torsion_part(shape: &SpaceShape) -> FpSubspace {
        Self::coordinate_block(shape, shape.rank_dim()..shape.dim())
    }

    fn coordinate_block(shape: &SpaceShape, range: std::ops::Range<usize>) -> FpSubspace {
        let dim = shape.dim();
        Self::span(
            shape,
            range.map(|i| {
                let mut e = vec![0u32; dim];
                e[i] = 1;
                e
            }),
        )
        .expect("unit vectors")
    }
}

/// Structural diagnostics of a maximal isotropic submodule `W` relative to the
/// rank/torsion splitting.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsotropicDiagnostics {
    pub subspace: FpSubspace,
    /// `dim` of the image of `W` under projection to the rank block.
    pub rank_projection_dim: usize,
    pub rank_intersection_dim: usize,
    pub torsion_intersection_dim: usize,
    /// `W ∩ rank` is a cyclic module (at most one generator mod `T`).
    pub rank_intersection_cyclic: bool,
    /// `W = (W ∩ rank) + (W ∩ torsion)` with the rank summand cyclic.
    pub decomposes: bool,
}

impl IsotropicDiagnostics {
    pub fn of(w: &FpSubspace) -> Self {
        let shape = w.shape();
        let rank_dim = shape.rank_dim();
        let projected = FpSubspace::span(
            shape,
            w.basis().iter().map(|b| {
                let mut v = b.clone();
                v[rank_dim..].iter_mut().for_each(|x| *x = 0);
                v
            }),
        )
        .expect("same ambient");
        let rank_int = w.intersection(&FpSubspace::rank_part(shape)).expect("same shape");
        let tors_int = w.intersection(&FpSubspace::torsion_part(shape)).expect("same shape");
        let t_image = FpSubspace::span(shape, rank_int.basis().iter().map(|b| shape.apply_t(b)))
            .expect("same ambient");
        let rank_intersection_cyclic = rank_int.dim() - t_image.dim() <= 1;
        let decomposes =
            rank_intersection_cyclic && rank_int.dim() + tors_int.dim() == w.dim();
        IsotropicDiagnostics {
            subspace: w.clone(),
            rank_projection_dim: projected.dim(),
            rank_intersection_dim: rank_int.dim(),
            torsion_intersection_dim: tors_int.dim(),
            rank_intersection_cyclic,
            decomposes,
        }
    }
}

/// Every `T`-stable subspace `W` with `W = W^perp`, with diagnostics, sorted
/// by echelon basis.
///
/// Grows isotropic submodules one dimension at a time: for an isotropic
/// submodule `M`, the submodules `M + <x>` of one more dimension are those with
/// `x` in `M^perp` and `T x` in `M`. Every isotropic submodule arises this way
/// from a `T`-stable hyperplane containing its image under `T`.
pub fn enumerate_maximal_isotropic(shape: &SpaceShape) -> Result<Vec<IsotropicDiagnostics>> {
    let dim = shape.dim();
    if dim > ENUMERATION_DIM_LIMIT {
        return Err(Error::ResourceBound {
            what: "pairing space dimension for enumeration",
            value: dim as u128,
            limit: ENUMERATION_DIM_LIMIT as u128,
        });
    }
    let p = shape.p;
    let gram = shape.gram_matrix();
    let t_matrix = FpMatrix::from_rows(
        p,
        dim,
        &(0..dim)
            .map(|i| {
                let mut e = vec![0u32; dim];
                e[i] = 1;
                shape.apply_t(&e)
            })
            .collect::<Vec<_>>(),
    )?
    .transpose();

    let mut frontier = vec![FpSubspace::zero(shape)];
    for _ in 0..dim / 2 {
        let mut next: HashSet<FpSubspace> = HashSet::new();
        for m in &frontier {
            let perp = m.complement_with(&gram);
            let candidates = preimage_under_t(&t_matrix, m)?.intersection(&perp)?;
            for x in projective_representatives(candidates.subspace(), m.subspace()) {
                let grown = FpSubspace::span(shape, m.basis().iter().cloned().chain([x]))?;
                debug_assert!(grown.is_t_stable());
                next.insert(grown);
                if next.len() > ISOTROPIC_RESULT_LIMIT {
                    return Err(Error::ResourceBound {
                        what: "isotropic submodules in one layer",
                        value: next.len() as u128,
                        limit: ISOTROPIC_RESULT_LIMIT as u128,
                    });
                }
            }
        }
        frontier = next.into_iter().collect();
    }
    frontier.sort_by(|a, b| a.basis().cmp(b.basis()));
    Ok(frontier.iter().map(IsotropicDiagnostics::of).collect())
}

/// `{x : T x in M}`.
fn preimage_under_t(t_matrix: &FpMatrix, m: &FpSubspace) -> Result<FpSubspace> {
    let shape = m.shape();
    let dim = shape.dim();
    let p = shape.p;
    // x with T x ∈ M  <=>  (T x) is annihilated by a basis of the standard dual of M
    let dual: Vec<Vec<u32>> = FpMatrix::from_rows(p, dim, m.basis())?.kernel();
    if dual.is_empty() {
        return Ok(FpSubspace::whole(shape));
    }
    let rows: Vec<Vec<u32>> = dual
        .iter()
        .map(|d| t_matrix.transpose().mul_vec(d))
        .collect();
    FpSubspace::span(shape, FpMatrix::from_rows(p, dim, &rows)?.kernel())
}

/// One representative for each line of `outer / inner`, with `inner ⊂ outer`.
fn projective_representatives(outer: &Subspace, inner: &Subspace) -> Vec<Vec<u32>> {
    let p = outer.prime();
    // extend inner's basis to outer's and keep the added vectors
    let mut acc = inner.clone();
    let mut extra = Vec::new();
    for b in outer.basis() {
        if !acc.contains(b) {
            extra.push(b.clone());
            acc = acc.sum(&Subspace::span(p, outer.ambient(), [b.clone()]).expect("ambient")).expect("ambient");
        }
    }
    let k = extra.len();
    let mut out = Vec::new();
    for lead in 0..k {
        // coefficient vectors whose first nonzero entry is a 1 at position `lead`
        let tail = k - lead - 1;
        for idx in 0..(p.get() as u64).pow(tail as u32) {
            let mut v = extra[lead].clone();
            let mut rest = idx;
            for e in &extra[lead + 1..] {
                let c = (rest % p.get() as u64) as u32;
                rest /= p.get() as u64;
                if c != 0 {
                    for (x, &r) in v.iter_mut().zip(e) {
                        *x = p.add(*x, p.mul(c, r));
                    }
                }
            }
            out.push(v);
        }
    }
    out
}
