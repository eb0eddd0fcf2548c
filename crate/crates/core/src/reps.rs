//! Real representations on `ℝ^{4n}`: irreducibles from left ideals of the regular
//! representation, direct sums, classification, and an intertwiner search.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hcore::{AlgebraParams, Basis, HElement, StructureTable};
use crate::linalg::{self, float_column_space, float_nullspace, float_rank};
use crate::sigforms::{self, AlgebraClass};

/// Tolerance used when rounding a recovered multiplicity to an integer.
pub const MULTIPLICITY_TOL: f64 = 1e-6;

/// Floor for the relation check performed before classifying a representation.
pub const RELATION_TOL: f64 = 1e-8;

/// Retry budget and acceptance threshold for random intertwiner sampling.
pub const INTERTWINER_RETRIES: usize = 20;
pub const INTERTWINER_MIN_RCOND: f64 = 1e-8;

/// Operator 2-norm.
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    linalg::singular_values(m).first().copied().unwrap_or(0.0)
}

/// A representation given by the images of `e1, e2, e3`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatRep {
    n: usize,
    params: AlgebraParams<f64>,
    gens: [DMatrix<f64>; 3],
}

/// Residuals of the five defining relations.
#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub residuals: Vec<(String, f64)>,
    pub tol: f64,
}

impl RelationCheck {
    pub fn ok(&self) -> bool {
        self.residuals.iter().all(|(_, r)| *r <= self.tol)
    }

    pub fn violated(&self) -> Vec<&str> {
        self.residuals
            .iter()
            .filter(|(_, r)| *r > self.tol)
            .map(|(name, _)| name.as_str())
            .collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| *r).fold(0.0, f64::max)
    }

    pub fn into_result(self) -> Result<()> {
        match self.residuals.iter().find(|(_, r)| *r > self.tol) {
            None => Ok(()),
            Some((name, r)) => Err(Error::RelationViolated {
                relation: name.clone(),
                residual: *r,
                tol: self.tol,
            }),
        }
    }
}

fn check_square_family(mats: &[DMatrix<f64>]) -> Result<usize> {
    let d = mats.first().map_or(0, DMatrix::nrows);
    if d == 0 {
        return Err(Error::Invalid("empty matrices".into()));
    }
    for m in mats {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::Invalid(format!(
                "expected {d}x{d} matrices, found {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::Invalid("matrix entries must be finite".into()));
        }
    }
    Ok(d)
}

impl MatRep {
    pub fn new(params: AlgebraParams<f64>, gens: [DMatrix<f64>; 3]) -> Result<Self> {
        let d = check_square_family(&gens)?;
        if d % 4 != 0 {
            return Err(Error::Invalid(format!("dimension {d} is not divisible by 4")));
        }
        if !params.is_finite() {
            return Err(Error::Invalid("parameters must be finite".into()));
        }
        Ok(Self { n: d / 4, params, gens })
    }

    /// Reads the parameters off the traces `Tr(J1J2)/4n, Tr(J2J3)/4n, Tr(J3J1)/4n`.
    pub fn from_generators(gens: [DMatrix<f64>; 3]) -> Result<Self> {
        let d = check_square_family(&gens)?;
        let t = |a: &DMatrix<f64>, b: &DMatrix<f64>| (a * b).trace() / d as f64;
        let params = AlgebraParams::new(
            t(&gens[0], &gens[1]),
            t(&gens[1], &gens[2]),
            t(&gens[2], &gens[0]),
        );
        Self::new(params, gens)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        4 * self.n
    }

    pub fn params(&self) -> &AlgebraParams<f64> {
        &self.params
    }

    pub fn gens(&self) -> &[DMatrix<f64>; 3] {
        &self.gens
    }

    pub fn table(&self) -> StructureTable<f64> {
        StructureTable::new(self.params.clone())
    }

    /// Images of the eight basis monomials.
    pub fn monomial_images(&self) -> [DMatrix<f64>; 8] {
        let [j1, j2, j3] = &self.gens;
        let d = self.dim();
        [
            DMatrix::identity(d, d),
            j1.clone(),
            j2.clone(),
            j3.clone(),
            j1 * j2,
            j2 * j3,
            j3 * j1,
            j1 * j2 * j3,
        ]
    }

    pub fn image(&self, x: &HElement<f64>) -> DMatrix<f64> {
        let imgs = self.monomial_images();
        let d = self.dim();
        Basis::ALL
            .iter()
            .fold(DMatrix::zeros(d, d), |acc, b| acc + &imgs[b.index()] * *x.coord(*b))
    }

    /// Rank of the span of the monomial images, i.e. the dimension of the image algebra.
    pub fn image_dim(&self, tol: f64) -> usize {
        let imgs = self.monomial_images();
        let d2 = self.dim() * self.dim();
        let stacked = DMatrix::from_fn(d2, 8, |i, j| imgs[j].as_slice()[i]);
        float_rank(&stacked, tol)
    }

    /// Residuals are measured in operator norm relative to `max(1, ‖A‖‖B‖)` for a
    /// relation in `A` and `B`, so they are insensitive to the conditioning of a change
    /// of basis.
    pub fn verify_relations(&self, tol: f64) -> RelationCheck {
        let d = self.dim();
        let id = DMatrix::<f64>::identity(d, d);
        let [j1, j2, j3] = &self.gens;
        let norms = self.gens.clone().map(|j| op_norm(&j));
        let p = &self.params;
        let rel = |r: f64, a: usize, b: usize| r / (norms[a] * norms[b]).max(1.0);
        let anti = |a: usize, b: usize, s: f64| {
            let (x, y) = (&self.gens[a], &self.gens[b]);
            rel(op_norm(&(x * y + y * x - &id * (2.0 * s))), a, b)
        };
        let residuals = vec![
            ("J1^2 = -Id".to_string(), rel(op_norm(&(j1 * j1 + &id)), 0, 0)),
            ("J2^2 = -Id".to_string(), rel(op_norm(&(j2 * j2 + &id)), 1, 1)),
            ("J3^2 = -Id".to_string(), rel(op_norm(&(j3 * j3 + &id)), 2, 2)),
            ("J1J2 + J2J1 = 2 alpha Id".to_string(), anti(0, 1, p.alpha)),
            ("J2J3 + J3J2 = 2 beta Id".to_string(), anti(1, 2, p.beta)),
            ("J1J3 + J3J1 = 2 gamma Id".to_string(), anti(0, 2, p.gamma)),
        ];
        RelationCheck { residuals, tol }
    }

    /// `g Jᵢ g⁻¹`.
    pub fn conjugate(&self, g: &DMatrix<f64>) -> Result<Self> {
        if g.nrows() != self.dim() || g.ncols() != self.dim() {
            return Err(Error::Invalid("conjugating matrix has the wrong size".into()));
        }
        let inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Invalid("conjugating matrix is singular".into()))?;
        Ok(Self {
            n: self.n,
            params: self.params.clone(),
            gens: self.gens.clone().map(|j| g * j * &inv),
        })
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * (1.0 + a.abs());
        let (p, q) = (&self.params, &other.params);
        if !(same(p.alpha, q.alpha) && same(p.beta, q.beta) && same(p.gamma, q.gamma)) {
            return Err(Error::MixedParams);
        }
        let (d1, d2) = (self.dim(), other.dim());
        let gens = std::array::from_fn(|i| {
            let mut m = DMatrix::zeros(d1 + d2, d1 + d2);
            m.view_mut((0, 0), (d1, d1)).copy_from(&self.gens[i]);
            m.view_mut((d1, d1), (d2, d2)).copy_from(&other.gens[i]);
            m
        });
        Ok(Self {
            n: self.n + other.n,
            params: self.params.clone(),
            gens,
        })
    }

    pub fn direct_sum_all(parts: &[Self]) -> Result<Self> {
        let (first, rest) = parts
            .split_first()
            .ok_or_else(|| Error::Invalid("empty direct sum".into()))?;
        rest.iter().try_fold(first.clone(), |acc, r| acc.direct_sum(r))
    }
}

/// Irreducible (or, for `Rho8`, indecomposable) representations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum IrrepKind {
    /// Hyperbolic: restriction to the ideal `𝓗(w + c)` for a unit `w` in a quaternion
    /// subalgebra.
    Rho0 { w: [f64; 3] },
    /// Spherical: restriction to `𝓗(1 + c)`.
    Rho1,
    /// Spherical: restriction to `𝓗(1 − c)`.
    Rho2,
    /// Cylindrical: restriction to the two-sided ideal `𝓗c`.
    Rho4,
    /// Cylindrical: the regular representation.
    Rho8,
}

impl IrrepKind {
    pub const RHO0_DEFAULT: IrrepKind = IrrepKind::Rho0 { w: [1.0, 0.0, 0.0] };

    fn required_class(&self) -> AlgebraClass {
        match self {
            IrrepKind::Rho0 { .. } => AlgebraClass::Hyperbolic,
            IrrepKind::Rho1 | IrrepKind::Rho2 => AlgebraClass::Spherical,
            IrrepKind::Rho4 | IrrepKind::Rho8 => AlgebraClass::Cylindrical,
        }
    }
}

/// Orthonormal basis (as columns) of the left ideal `𝓗g`.
pub fn left_ideal_basis(table: &StructureTable<f64>, g: &HElement<f64>, tol: f64) -> Result<DMatrix<f64>> {
    if g.is_zero(0.0) {
        return Err(Error::Invalid("left ideal of the zero element".into()));
    }
    Ok(float_column_space(&table.right_rep(g).to_dmatrix(), tol))
}

/// Quaternion units `i, j, k = ij` inside the algebra.
pub fn quaternion_frame(table: &StructureTable<f64>, tol: f64) -> Result<[HElement<f64>; 3]> {
    let (i, j) = sigforms::quaternion_pair(table, tol)?;
    let k = table.mul(&i, &j);
    Ok([i, j, k])
}

fn unit_vector(w: [f64; 3]) -> Result<[f64; 3]> {
    let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::Invalid("w must be a nonzero finite vector".into()));
    }
    Ok(w.map(|x| x / norm))
}

/// The generator `w_x i + w_y j + w_z k + c` of the hyperbolic ideal.
pub fn hyperbolic_ideal_generator(table: &StructureTable<f64>, w: [f64; 3], tol: f64) -> Result<HElement<f64>> {
    let w = unit_vector(w)?;
    let [i, j, k] = quaternion_frame(table, tol)?;
    let c = table.central_element().normalized_f64();
    Ok(&(&(&i.scale(&w[0]) + &j.scale(&w[1])) + &k.scale(&w[2])) + &c)
}

fn ensure_class(table: &StructureTable<f64>, wanted: AlgebraClass, tol: f64) -> Result<AlgebraClass> {
    let class = sigforms::classify(table.params(), tol).class;
    if class != wanted {
        return Err(Error::WrongClass(format!("need {wanted}, parameters are {class}")));
    }
    Ok(class)
}

fn restrict_to(table: &StructureTable<f64>, basis: &DMatrix<f64>, tol: f64) -> Result<MatRep> {
    let gens = [Basis::E1, Basis::E2, Basis::E3].map(|b| {
        let l = table.regular_rep(&HElement::basis(b)).to_dmatrix();
        (basis.transpose() * &l * basis, l)
    });
    for (r, l) in &gens {
        let residual = (l * basis - basis * r).norm();
        if residual > tol.max(1e-9) * (1.0 + l.norm()) {
            return Err(Error::Numerical(format!(
                "subspace is not invariant (residual {residual:.3e})"
            )));
        }
    }
    MatRep::new(table.params().clone(), gens.map(|(r, _)| r))
}

pub fn irrep(table: &StructureTable<f64>, kind: IrrepKind, tol: f64) -> Result<MatRep> {
    ensure_class(table, kind.required_class(), tol)?;
    let one = table.one();
    let c = table.central_element().normalized_f64();
    let generator = match kind {
        IrrepKind::Rho1 => &one + &c,
        IrrepKind::Rho2 => &one - &c,
        IrrepKind::Rho4 => c,
        IrrepKind::Rho0 { w } => hyperbolic_ideal_generator(table, w, tol)?,
        IrrepKind::Rho8 => {
            let gens = [Basis::E1, Basis::E2, Basis::E3]
                .map(|b| table.regular_rep(&HElement::basis(b)).to_dmatrix());
            return MatRep::new(table.params().clone(), gens);
        }
    };
    let basis = left_ideal_basis(table, &generator, tol)?;
    if basis.ncols() != 4 {
        return Err(Error::Numerical(format!(
            "ideal has dimension {}, expected 4",
            basis.ncols()
        )));
    }
    restrict_to(table, &basis, tol)
}

/// Canonical representative of each class on `ℝ^{4n}`.
///
/// `k` counts copies of `ρ1` (spherical) or of `ρ8` (cylindrical); hyperbolic
/// representations are `n` copies of `ρ0` and accept only `k = n` or `None`.
pub fn build(table: &StructureTable<f64>, n: usize, k: Option<usize>, tol: f64) -> Result<MatRep> {
    if n == 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    let class = sigforms::classify(table.params(), tol).class;
    let parts: Vec<MatRep> = match class {
        AlgebraClass::Spherical => {
            let k = k.ok_or_else(|| Error::Invalid("spherical representations need k".into()))?;
            if k > n {
                return Err(Error::Invalid(format!("need 0 <= k <= n, got k = {k}, n = {n}")));
            }
            let r1 = irrep(table, IrrepKind::Rho1, tol)?;
            let r2 = irrep(table, IrrepKind::Rho2, tol)?;
            std::iter::repeat_n(r1, k).chain(std::iter::repeat_n(r2, n - k)).collect()
        }
        AlgebraClass::Cylindrical => {
            let k = k.ok_or_else(|| Error::Invalid("cylindrical representations need k".into()))?;
            if 2 * k > n {
                return Err(Error::Invalid(format!("need 0 <= 2k <= n, got k = {k}, n = {n}")));
            }
            let r4 = irrep(table, IrrepKind::Rho4, tol)?;
            let r8 = irrep(table, IrrepKind::Rho8, tol)?;
            std::iter::repeat_n(r4, n - 2 * k).chain(std::iter::repeat_n(r8, k)).collect()
        }
        AlgebraClass::Hyperbolic => {
            if let Some(k) = k.filter(|&k| k != n) {
                return Err(Error::Invalid(format!(
                    "hyperbolic representations are n copies of rho0; k = {k} differs from n = {n}"
                )));
            }
            vec![irrep(table, IrrepKind::RHO0_DEFAULT, tol)?; n]
        }
        AlgebraClass::NonQuaternionic(sig) => {
            return Err(Error::WrongClass(format!(
                "Q has signature {sig}; the algebra contains no quaternions and has no representation on R^(4n)"
            )))
        }
    };
    MatRep::direct_sum_all(&parts)
}

/// Range of `k` accepted by [`build`] for the class.
pub fn admissible_multiplicities(class: AlgebraClass, n: usize) -> Vec<usize> {
    match class {
        AlgebraClass::Spherical => (0..=n).collect(),
        AlgebraClass::Cylindrical => (0..=n / 2).collect(),
        AlgebraClass::Hyperbolic => vec![n],
        AlgebraClass::NonQuaternionic(_) => Vec::new(),
    }
}

/// A faithful representation on `ℝ^{4n}`, or the reason none exists.
pub fn build_faithful(table: &StructureTable<f64>, n: usize, tol: f64) -> Result<MatRep> {
    let class = sigforms::classify(table.params(), tol).class;
    match class {
        AlgebraClass::Spherical | AlgebraClass::Cylindrical if n == 1 => Err(Error::NoSolution(format!(
            "for {class} parameters and n = 1 only non-faithful representations exist: \
             every representation on R^4 has image a quaternion subalgebra"
        ))),
        AlgebraClass::Spherical | AlgebraClass::Cylindrical => build(table, n, Some(1), tol),
        _ => build(table, n, None, tol),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RepClass {
    pub class: AlgebraClass,
    pub k: usize,
    pub faithful: bool,
    pub image_dim: usize,
}

pub fn classify_rep(rep: &MatRep, tol: f64) -> Result<RepClass> {
    rep.verify_relations(tol.max(RELATION_TOL)).into_result()?;
    let table = rep.table();
    let class = sigforms::classify(rep.params(), tol).class;
    let n = rep.n();
    let c = table.central_element().normalized_f64();
    let rho_c = rep.image(&c);
    let k = match class {
        AlgebraClass::Spherical => {
            let kf = (rho_c.trace() + 4.0 * n as f64) / 8.0;
            round_multiplicity(kf, n, "(Tr rho(c) + 4n)/8")?
        }
        AlgebraClass::Cylindrical => {
            let rank = float_rank(&rho_c, tol.max(MULTIPLICITY_TOL));
            if !rank.is_multiple_of(4) {
                return Err(Error::Numerical(format!("rank rho(c) = {rank} is not divisible by 4")));
            }
            round_multiplicity(rank as f64 / 4.0, n / 2, "rank rho(c)/4")?
        }
        AlgebraClass::Hyperbolic => n,
        AlgebraClass::NonQuaternionic(sig) => {
            return Err(Error::WrongClass(format!("Q has signature {sig}")));
        }
    };
    let image_dim = rep.image_dim(tol.max(1e-9));
    Ok(RepClass {
        class,
        k,
        faithful: image_dim == 8,
        image_dim,
    })
}

fn round_multiplicity(kf: f64, max: usize, formula: &str) -> Result<usize> {
    let k = kf.round();
    if (kf - k).abs() > MULTIPLICITY_TOL || k < 0.0 || k > max as f64 {
        return Err(Error::Numerical(format!(
            "{formula} = {kf} is not an admissible multiplicity in 0..={max}"
        )));
    }
    Ok(k as usize)
}

/// Result of [`intertwiner`].
#[derive(Clone, Debug)]
pub struct IntertwinerSearch {
    /// Dimension of `{X : X Aᵢ = Bᵢ X}`.
    pub nullspace_dim: usize,
    pub attempts: usize,
    pub best_rcond: f64,
    pub intertwiner: Option<DMatrix<f64>>,
}

impl IntertwinerSearch {
    pub fn found(&self) -> bool {
        self.intertwiner.is_some()
    }

    /// No nonzero solution at all: the families are certainly inequivalent.
    pub fn certainly_inequivalent(&self) -> bool {
        self.nullspace_dim == 0
    }
}

/// Basis of `{X : X Aᵢ = Bᵢ X for all i}` as matrices.
pub fn intertwiner_space(a: &[DMatrix<f64>], b: &[DMatrix<f64>], tol: f64) -> Result<Vec<DMatrix<f64>>> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Invalid("need two non-empty lists of equal length".into()));
    }
    let da = check_square_family(a)?;
    let db = check_square_family(b)?;
    // X is db × da; vec(X A) = (Aᵀ ⊗ I) vec X, vec(B X) = (I ⊗ B) vec X
    let id_a = DMatrix::<f64>::identity(da, da);
    let id_b = DMatrix::<f64>::identity(db, db);
    let block = da * db;
    let mut stacked = DMatrix::zeros(block * a.len(), block);
    for (i, (ai, bi)) in a.iter().zip(b).enumerate() {
        let op = linalg::kron(&ai.transpose(), &id_b) - linalg::kron(&id_a, bi);
        stacked.view_mut((i * block, 0), (block, block)).copy_from(&op);
    }
    let ns = float_nullspace(&stacked, tol);
    Ok((0..ns.ncols())
        .map(|j| linalg::unvec_col(ns.column(j).as_slice(), db, da))
        .collect())
}

/// Searches for an invertible `T` with `T Aᵢ = Bᵢ T`.
pub fn intertwiner(a: &[DMatrix<f64>], b: &[DMatrix<f64>], seed: u64, tol: f64) -> Result<IntertwinerSearch> {
    let space = intertwiner_space(a, b, tol)?;
    let mut search = IntertwinerSearch {
        nullspace_dim: space.len(),
        attempts: 0,
        best_rcond: 0.0,
        intertwiner: None,
    };
    if space.is_empty() || a[0].nrows() != b[0].nrows() {
        return Ok(search);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..INTERTWINER_RETRIES {
        search.attempts += 1;
        let t = space.iter().fold(DMatrix::zeros(b[0].nrows(), a[0].nrows()), |acc, x| {
            let c: f64 = StandardNormal.sample(&mut rng);
            acc + x * c
        });
        let rcond = linalg::reciprocal_condition(&t);
        search.best_rcond = search.best_rcond.max(rcond);
        if rcond > INTERTWINER_MIN_RCOND {
            search.intertwiner = Some(t);
            break;
        }
    }
    Ok(search)
}

/// Whether `T` intertwines the two families.
pub fn is_intertwiner(t: &DMatrix<f64>, a: &[DMatrix<f64>], b: &[DMatrix<f64>], tol: f64) -> bool {
    let scale = t.norm().max(1.0);
    a.iter()
        .zip(b)
        .all(|(ai, bi)| (t * ai - bi * t).norm() <= tol * scale * (1.0 + ai.norm()))
        && linalg::reciprocal_condition(t) > INTERTWINER_MIN_RCOND
}

pub fn equivalent(r1: &MatRep, r2: &MatRep, seed: u64, tol: f64) -> Result<bool> {
    if r1.dim() != r2.dim() {
        return Ok(false);
    }
    Ok(intertwiner(r1.gens(), r2.gens(), seed, tol)?.found())
}

/// Partition of a list of representations into equivalence classes.
pub fn equivalence_classes(reps: &[MatRep], seed: u64, tol: f64) -> Result<Vec<Vec<usize>>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    'outer: for (i, r) in reps.iter().enumerate() {
        for class in classes.iter_mut() {
            if equivalent(&reps[class[0]], r, seed.wrapping_add(i as u64), tol)? {
                class.push(i);
                continue 'outer;
            }
        }
        classes.push(vec![i]);
    }
    Ok(classes)
}

/// Measured count of classes among the canonical builds on `ℝ^{4n}`.
#[derive(Clone, Debug, Serialize)]
pub struct ClassCount {
    pub n: usize,
    pub classes: usize,
    pub non_faithful: usize,
    pub multiplicities: Vec<usize>,
}

pub fn count_classes(table: &StructureTable<f64>, n: usize, seed: u64, tol: f64) -> Result<ClassCount> {
    let class = sigforms::classify(table.params(), tol).class;
    let ks = admissible_multiplicities(class, n);
    let reps = ks
        .iter()
        .map(|&k| build(table, n, Some(k), tol))
        .collect::<Result<Vec<_>>>()?;
    let classes = equivalence_classes(&reps, seed, tol)?;
    let mut non_faithful = 0;
    for class in &classes {
        if !classify_rep(&reps[class[0]], tol)?.faithful {
            non_faithful += 1;
        }
    }
    Ok(ClassCount {
        n,
        classes: classes.len(),
        non_faithful,
        multiplicities: ks,
    })
}

/// Matrix of `L_c` on `𝓗(w + c)` in the basis `v, iv, jv, kv` with `v = w + c`.
pub fn hyperbolic_lc_matrix(table: &StructureTable<f64>, w: [f64; 3], tol: f64) -> Result<DMatrix<f64>> {
    ensure_class(table, AlgebraClass::Hyperbolic, tol)?;
    let v = hyperbolic_ideal_generator(table, w, tol)?;
    let [i, j, k] = quaternion_frame(table, tol)?;
    let cols = [v.clone(), table.mul(&i, &v), table.mul(&j, &v), table.mul(&k, &v)];
    let basis = DMatrix::from_fn(8, 4, |r, c| cols[c].coords()[r]);
    let c = table.central_element().normalized_f64();
    let lc = table.regular_rep(&c).to_dmatrix();
    coordinates_in(&basis, &(lc * &basis), tol)
}

/// The expected matrix of `L_c` on `𝓗(w + c)` for a unit `w = (x, y, z)`.
pub fn hyperbolic_lc_expected(w: [f64; 3]) -> DMatrix<f64> {
    let [x, y, z] = w;
    DMatrix::from_row_slice(
        4,
        4,
        &[0.0, -x, -y, -z, x, 0.0, z, -y, y, -z, 0.0, x, z, y, -x, 0.0],
    )
}

/// Matrix of `L_c` on the whole algebra in the basis `c, ic, jc, kc, 1, i, j, k`.
pub fn cylindrical_lc_matrix(table: &StructureTable<f64>, tol: f64) -> Result<DMatrix<f64>> {
    ensure_class(table, AlgebraClass::Cylindrical, tol)?;
    let [i, j, k] = quaternion_frame(table, tol)?;
    let c = table.central_element().raw;
    let one = table.one();
    let cols = [
        c.clone(),
        table.mul(&i, &c),
        table.mul(&j, &c),
        table.mul(&k, &c),
        one,
        i,
        j,
        k,
    ];
    let basis = DMatrix::from_fn(8, 8, |r, col| cols[col].coords()[r]);
    let lc = table.regular_rep(&c).to_dmatrix();
    coordinates_in(&basis, &(lc * &basis), tol)
}

/// Solves `basis · X = images` for a full-column-rank basis.
fn coordinates_in(basis: &DMatrix<f64>, images: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let x = linalg::pseudo_solve(basis, images, tol);
    let residual = (basis * &x - images).norm();
    if residual > 1e-8 * (1.0 + images.norm()) {
        return Err(Error::Numerical(format!(
            "images leave the span of the basis (residual {residual:.3e})"
        )));
    }
    Ok(x)
}
