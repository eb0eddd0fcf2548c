//! Complex structures on `ℝ^{4n}`, twistor spheres, triangles and their invariants.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hcore::{AlgebraParams, StructureTable};
use crate::linalg::{self, exp_complex_structure, float_inertia, float_nullspace, Signature};
use crate::reps::{op_norm, MatRep};
use crate::sigforms::{self, form_q};

/// Default tolerance for `M² = −Id`, in operator norm.
pub const COMPLEX_STRUCTURE_TOL: f64 = 1e-8;

/// `(A, B) = −tr(AB) / dim`.
pub fn pseudo_inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape(), "pseudo_inner of matrices of different sizes");
    // tr(AB) = Σ A_ij B_ji
    let tr: f64 = (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * b[(j, i)]).sum::<f64>())
        .sum();
    -tr / a.nrows() as f64
}

/// Inertia of the pseudometric on all of `End(ℝ^{4n})`.
pub fn pseudometric_signature(n: usize, tol: f64) -> Signature {
    let d = 4 * n;
    // (E_ij, E_kl) = −δ_jk δ_il / d
    let gram = DMatrix::from_fn(d * d, d * d, |r, c| {
        let (i, j) = (r / d, r % d);
        let (k, l) = (c / d, c % d);
        if j == k && i == l {
            -1.0 / d as f64
        } else {
            0.0
        }
    });
    float_inertia(&gram, tol)
}

/// Basis of the tangent space `{A : AI = −IA}` at a complex structure.
pub fn tangent_basis(i: &ComplexStructure, tol: f64) -> Vec<DMatrix<f64>> {
    let m = i.matrix();
    let d = m.nrows();
    let id = DMatrix::<f64>::identity(d, d);
    // vec(AI + IA) = (Iᵀ ⊗ Id + Id ⊗ I) vec A
    let op = linalg::kron(&m.transpose(), &id) + linalg::kron(&id, m);
    let ns = float_nullspace(&op, tol);
    (0..ns.ncols())
        .map(|j| linalg::unvec_col(ns.column(j).as_slice(), d, d))
        .collect()
}

/// Gram matrix of the pseudometric on a list of matrices.
pub fn pseudo_gram(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    DMatrix::from_fn(mats.len(), mats.len(), |a, b| pseudo_inner(&mats[a], &mats[b]))
}

/// Inertia of the pseudometric on the tangent space at `i`.
pub fn tangent_signature(i: &ComplexStructure, tol: f64) -> Signature {
    float_inertia(&pseudo_gram(&tangent_basis(i, tol)), tol)
}

/// A matrix squaring to `−Id`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexStructure(DMatrix<f64>);

impl ComplexStructure {
    pub fn new(m: DMatrix<f64>, tol: f64) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 || !m.nrows().is_multiple_of(4) {
            return Err(Error::Invalid(format!(
                "a complex structure here is a 4n x 4n matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let d = m.nrows();
        let residual = op_norm(&(&m * &m + DMatrix::identity(d, d))) / op_norm(&m).powi(2).max(1.0);
        // rejects NaN as well
        if residual.is_nan() || residual > tol {
            return Err(Error::RelationViolated {
                relation: "M^2 = -Id".into(),
                residual,
                tol,
            });
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n(&self) -> usize {
        self.dim() / 4
    }

    /// `g M g⁻¹`.
    pub fn conjugated(&self, g: &DMatrix<f64>) -> Result<Self> {
        let inv = g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::Invalid("conjugating matrix is singular".into()))?;
        Ok(Self(g * &self.0 * inv))
    }
}

/// Quaternionic triple `I, J, K = IJ`.
#[derive(Clone, Debug)]
pub struct TwistorSphere {
    frame: [ComplexStructure; 3],
}

impl TwistorSphere {
    pub fn new(i: ComplexStructure, j: ComplexStructure, k: ComplexStructure, tol: f64) -> Result<Self> {
        if i.dim() != j.dim() || j.dim() != k.dim() {
            return Err(Error::Invalid("sphere frame of mixed sizes".into()));
        }
        let (mi, mj, mk) = (i.matrix(), j.matrix(), k.matrix());
        let scale = op_norm(mi) * op_norm(mj);
        let checks = [
            ("IJ = K", op_norm(&(mi * mj - mk))),
            ("IJ = -JI", op_norm(&(mi * mj + mj * mi))),
            ("JK = -KJ", op_norm(&(mj * mk + mk * mj))),
            ("KI = -IK", op_norm(&(mk * mi + mi * mk))),
        ];
        for (name, r) in checks {
            let r = r / scale.max(1.0);
            if r > tol {
                return Err(Error::RelationViolated {
                    relation: name.into(),
                    residual: r,
                    tol,
                });
            }
        }
        Ok(Self { frame: [i, j, k] })
    }

    pub fn frame(&self) -> [&DMatrix<f64>; 3] {
        [self.frame[0].matrix(), self.frame[1].matrix(), self.frame[2].matrix()]
    }

    pub fn i(&self) -> &ComplexStructure {
        &self.frame[0]
    }

    pub fn j(&self) -> &ComplexStructure {
        &self.frame[1]
    }

    pub fn k(&self) -> &ComplexStructure {
        &self.frame[2]
    }

    pub fn point(&self, v: [f64; 3]) -> DMatrix<f64> {
        let [i, j, k] = self.frame();
        i * v[0] + j * v[1] + k * v[2]
    }

    /// Coordinates `((X, I), (X, J), (X, K))` in the orthonormal frame.
    pub fn coordinates(&self, x: &DMatrix<f64>) -> [f64; 3] {
        self.frame().map(|f| pseudo_inner(x, f))
    }

    /// Distance of `x` from the span of the frame, relative to `‖x‖`.
    pub fn off_span_residual(&self, x: &DMatrix<f64>) -> f64 {
        let proj = self.point(self.coordinates(x));
        (x - proj).norm() / x.norm().max(1.0)
    }
}

/// Left multiplication by `i, j, k` on `ℍⁿ ≅ ℝ^{4n}`.
pub fn standard_quaternionic_triple(n: usize) -> [DMatrix<f64>; 3] {
    let i4 = DMatrix::from_row_slice(4, 4, &[
        0.0, -1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0,
    ]);
    let j4 = DMatrix::from_row_slice(4, 4, &[
        0.0, 0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0,
    ]);
    let k4 = &i4 * &j4;
    let id = DMatrix::<f64>::identity(n, n);
    [i4, j4, k4].map(|m| linalg::kron(&id, &m))
}

pub fn standard_sphere(n: usize) -> TwistorSphere {
    let [i, j, k] = standard_quaternionic_triple(n).map(ComplexStructure);
    TwistorSphere { frame: [i, j, k] }
}

/// A degenerate spherical triangle with invariant `params`, inside the standard sphere:
/// `Jᵢ = Σ Lᵢⱼ Fⱼ` where `−Q = LLᵀ` and `F` is the standard frame.
pub fn triangle_on_sphere(params: &AlgebraParams<f64>, n: usize, tol: f64) -> Result<(Triangle, TwistorSphere)> {
    let minus_q = form_q(params).to_dmatrix() * -1.0;
    let chol = minus_q.cholesky().ok_or_else(|| {
        Error::WrongClass("the triangle lies on a compact sphere only for spherical parameters".into())
    })?;
    let l = chol.l();
    let sphere = standard_sphere(n);
    let js: [DMatrix<f64>; 3] = std::array::from_fn(|r| sphere.point([l[(r, 0)], l[(r, 1)], l[(r, 2)]]));
    let [a, b, c] = js;
    Ok((Triangle::new(a, b, c, tol)?, sphere))
}

/// Ordered triple of complex structures with scalar pairwise anticommutators.
#[derive(Clone, Debug)]
pub struct Triangle {
    verts: [ComplexStructure; 3],
}

impl Triangle {
    pub fn new(j1: DMatrix<f64>, j2: DMatrix<f64>, j3: DMatrix<f64>, tol: f64) -> Result<Self> {
        let verts = [
            ComplexStructure::new(j1, tol)?,
            ComplexStructure::new(j2, tol)?,
            ComplexStructure::new(j3, tol)?,
        ];
        let d = verts[0].dim();
        if verts.iter().any(|v| v.dim() != d) {
            return Err(Error::Invalid("triangle vertices of mixed sizes".into()));
        }
        let id = DMatrix::<f64>::identity(d, d);
        for (a, b, name) in [(0, 1, "J1J2 + J2J1"), (1, 2, "J2J3 + J3J2"), (2, 0, "J3J1 + J1J3")] {
            let (x, y) = (verts[a].matrix(), verts[b].matrix());
            let anti = x * y + y * x;
            let s = anti.trace() / d as f64;
            let r = op_norm(&(anti - &id * s)) / (op_norm(x) * op_norm(y)).max(1.0);
            if r > tol {
                return Err(Error::RelationViolated {
                    relation: format!("{name} is a multiple of Id"),
                    residual: r,
                    tol,
                });
            }
        }
        Ok(Self { verts })
    }

    pub fn from_rep(rep: &MatRep, tol: f64) -> Result<Self> {
        let [a, b, c] = rep.gens().clone();
        Self::new(a, b, c, tol)
    }

    pub fn to_rep(&self) -> Result<MatRep> {
        MatRep::from_generators(self.matrices().map(Clone::clone))
    }

    pub fn vertices(&self) -> &[ComplexStructure; 3] {
        &self.verts
    }

    pub fn matrices(&self) -> [&DMatrix<f64>; 3] {
        [self.verts[0].matrix(), self.verts[1].matrix(), self.verts[2].matrix()]
    }

    pub fn dim(&self) -> usize {
        self.verts[0].dim()
    }

    pub fn n(&self) -> usize {
        self.verts[0].n()
    }

    /// `(Tr J1J2, Tr J2J3, Tr J3J1) / 4n`.
    pub fn t_invariant(&self) -> AlgebraParams<f64> {
        let [a, b, c] = self.matrices();
        let d = self.dim() as f64;
        AlgebraParams::new((a * b).trace() / d, (b * c).trace() / d, (c * a).trace() / d)
    }

    pub fn conjugated(&self, g: &DMatrix<f64>) -> Result<Self> {
        let [a, b, c] = self.verts.clone().map(|v| v.conjugated(g));
        Ok(Self { verts: [a?, b?, c?] })
    }
}

pub fn t_invariant(tri: &Triangle) -> AlgebraParams<f64> {
    tri.t_invariant()
}

/// The compact twistor sphere through two complex structures.
pub fn sphere_from_pair(j1: &ComplexStructure, j2: &ComplexStructure, tol: f64) -> Result<TwistorSphere> {
    let (a, b) = (j1.matrix(), j2.matrix());
    if a.shape() != b.shape() {
        return Err(Error::Invalid("complex structures of different sizes".into()));
    }
    let scale = a.norm().max(1.0);
    if (a - b).norm() <= tol * scale || (a + b).norm() <= tol * scale {
        return Err(Error::Degenerate("J2 = ±J1 determines no sphere".into()));
    }
    let d = a.nrows();
    let alpha = (a * b).trace() / d as f64;
    let anti = a * b + b * a - DMatrix::identity(d, d) * (2.0 * alpha);
    if op_norm(&anti) > tol.max(COMPLEX_STRUCTURE_TOL) * (op_norm(a) * op_norm(b)).max(1.0) {
        return Err(Error::RelationViolated {
            relation: "J1J2 + J2J1 is a multiple of Id".into(),
            residual: op_norm(&anti),
            tol,
        });
    }
    if alpha.abs() >= 1.0 - tol {
        return Err(Error::WrongClass(format!(
            "|alpha| = {} >= 1: the pair spans a non-compact line",
            alpha.abs()
        )));
    }
    let jp = (a * alpha + b) / (1.0 - alpha * alpha).sqrt();
    let k = a * &jp;
    let looser = tol.max(COMPLEX_STRUCTURE_TOL);
    TwistorSphere::new(
        j1.clone(),
        ComplexStructure::new(jp, looser)?,
        ComplexStructure::new(k, looser)?,
        looser,
    )
}

/// `e^{tI} = cos t · Id + sin t · I`.
pub fn rotation(i: &ComplexStructure, t: f64) -> DMatrix<f64> {
    exp_complex_structure(i.matrix(), t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Degeneracy {
    pub degenerate: bool,
    pub image_dim: usize,
}

/// A triangle is degenerate when its vertices generate a 4-dimensional algebra.
pub fn degeneracy_test(tri: &Triangle, tol: f64) -> Result<Degeneracy> {
    let rep = tri.to_rep()?;
    let image_dim = rep.image_dim(tol.max(1e-9));
    match image_dim {
        4 => Ok(Degeneracy {
            degenerate: true,
            image_dim,
        }),
        8 => Ok(Degeneracy {
            degenerate: false,
            image_dim,
        }),
        other => Err(Error::Numerical(format!(
            "the vertices span an algebra of dimension {other}, expected 4 or 8"
        ))),
    }
}

/// Real affine type of `{v : vᵀQv = −1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum QuadricKind {
    Ellipsoid,
    OneSheetedHyperboloid,
    TwoSheetedHyperboloid,
    EllipticCylinder,
    HyperbolicCylinder,
    ParallelPlanes,
    Empty,
}

impl QuadricKind {
    pub fn from_signature(sig: Signature) -> Self {
        match (sig.positive, sig.negative, sig.zero) {
            (_, 0, _) => QuadricKind::Empty,
            (0, 3, 0) => QuadricKind::Ellipsoid,
            (1, 2, 0) => QuadricKind::OneSheetedHyperboloid,
            (2, 1, 0) => QuadricKind::TwoSheetedHyperboloid,
            (0, 2, 1) => QuadricKind::EllipticCylinder,
            (1, 1, 1) => QuadricKind::HyperbolicCylinder,
            _ => QuadricKind::ParallelPlanes,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadricSample {
    pub kind: QuadricKind,
    pub points: Vec<[f64; 3]>,
    /// Largest `‖M² + Id‖` over the sampled `M = aJ1 + bJ2 + cJ3`, when a triangle was given.
    pub max_square_residual: Option<f64>,
}

/// Samples `vᵀQv = −1` in the eigenbasis of `Q`: free coordinates along non-negative
/// eigendirections are drawn from a normal distribution, and the remaining negative
/// directions are scaled to hit the level set.
pub fn quadric_points(params: &AlgebraParams<f64>, count: usize, seed: u64, tol: f64) -> QuadricSample {
    let q = form_q(params).to_dmatrix();
    let kind = QuadricKind::from_signature(float_inertia(&q, tol));
    if kind == QuadricKind::Empty {
        return QuadricSample {
            kind,
            points: Vec::new(),
            max_square_residual: None,
        };
    }
    let eig = q.symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let neg: Vec<usize> = (0..3).filter(|&i| eig.eigenvalues[i] < -tol * scale).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(count);
    while points.len() < count {
        let mut y = [0.0f64; 3];
        for (i, yi) in y.iter_mut().enumerate() {
            if !neg.contains(&i) {
                *yi = StandardNormal.sample(&mut rng);
            }
        }
        let positive_part: f64 = (0..3)
            .filter(|i| !neg.contains(i))
            .map(|i| eig.eigenvalues[i] * y[i] * y[i])
            .sum();
        let rhs = 1.0 + positive_part;
        let dir: Vec<f64> = neg.iter().map(|_| StandardNormal.sample(&mut rng)).collect();
        let weight: f64 = neg
            .iter()
            .zip(&dir)
            .map(|(&i, u)| -eig.eigenvalues[i] * u * u)
            .sum();
        if rhs <= 0.0 || weight <= 0.0 {
            continue;
        }
        let t = (rhs / weight).sqrt();
        for (&i, u) in neg.iter().zip(&dir) {
            y[i] = t * u;
        }
        let v = &eig.eigenvectors * nalgebra::Vector3::from(y);
        points.push([v[0], v[1], v[2]]);
    }
    QuadricSample {
        kind,
        points,
        max_square_residual: None,
    }
}

/// Solutions of `(aJ1 + bJ2 + cJ3)² = −Id`, with the residual of each realised point.
pub fn quadric_classify_and_sample(tri: &Triangle, count: usize, seed: u64, tol: f64) -> QuadricSample {
    let mut sample = quadric_points(&tri.t_invariant(), count, seed, tol);
    let [a, b, c] = tri.matrices();
    let d = tri.dim();
    let id = DMatrix::<f64>::identity(d, d);
    let worst = sample
        .points
        .iter()
        .map(|v| {
            let m = a * v[0] + b * v[1] + c * v[2];
            op_norm(&(&m * &m + &id))
        })
        .fold(0.0, f64::max);
    sample.max_square_residual = (!sample.points.is_empty()).then_some(worst);
    sample
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Vertex {
    One,
    Two,
    Three,
}

impl Vertex {
    pub const ALL: [Vertex; 3] = [Vertex::One, Vertex::Two, Vertex::Three];

    pub fn from_index(i: usize) -> Result<Self> {
        match i {
            1 => Ok(Vertex::One),
            2 => Ok(Vertex::Two),
            3 => Ok(Vertex::Three),
            other => Err(Error::Invalid(format!("vertex must be 1, 2 or 3, got {other}"))),
        }
    }

    /// Vertex followed by its two neighbours, in cyclic order.
    fn order(self) -> [usize; 3] {
        match self {
            Vertex::One => [0, 1, 2],
            Vertex::Two => [1, 2, 0],
            Vertex::Three => [2, 0, 1],
        }
    }
}

/// Unit tangent circles `c_t`, `d_s` at a vertex, and the data for the closed form.
struct VertexFrame {
    c: [DMatrix<f64>; 2],
    d: [DMatrix<f64>; 2],
    /// `T` along the two sides at the vertex and along the opposite side.
    a1: f64,
    a2: f64,
    b: f64,
    /// `Tr(A B1 B2) / 4n`, computed as `−Tr ρ(c) / 4n`.
    mu: f64,
}

fn vertex_frame(tri: &Triangle, vertex: Vertex, tol: f64) -> Result<VertexFrame> {
    let [ia, ib1, ib2] = vertex.order();
    let m = tri.matrices();
    let (a, b1, b2) = (m[ia], m[ib1], m[ib2]);
    let d = tri.dim();
    let dn = d as f64;
    let t = |x: &DMatrix<f64>, y: &DMatrix<f64>| (x * y).trace() / dn;
    let (a1, a2, b) = (t(a, b1), t(a, b2), t(b1, b2));
    for (v, side) in [(a1, "first"), (a2, "second")] {
        if v.abs() >= 1.0 - tol {
            return Err(Error::WrongClass(format!(
                "the {side} side at vertex {vertex:?} is non-compact (|T| = {}); the angle is undefined",
                v.abs()
            )));
        }
    }
    let id = DMatrix::<f64>::identity(d, d);
    let circle = |av: f64, bm: &DMatrix<f64>| {
        let s = (1.0 - av * av).sqrt();
        let x = (a * av + bm) / s;
        let y = (a * bm - &id * av) / s;
        [x, y]
    };
    // ρ(c) for the representation on the triangle's span, in vertex order
    let rep = MatRep::from_generators([a.clone(), b1.clone(), b2.clone()])?;
    let c_raw = rep.table().central_element().raw;
    let mu = -rep.image(&c_raw).trace() / dn;
    Ok(VertexFrame {
        c: circle(a1, b1),
        d: circle(a2, b2),
        a1,
        a2,
        b,
        mu,
    })
}

impl VertexFrame {
    fn c_at(&self, t: f64) -> DMatrix<f64> {
        &self.c[0] * t.cos() + &self.c[1] * t.sin()
    }

    fn d_at(&self, s: f64) -> DMatrix<f64> {
        &self.d[0] * s.cos() + &self.d[1] * s.sin()
    }

    fn closed_form(&self, t: f64, s: f64) -> f64 {
        let denom = (1.0 - self.a1 * self.a1).sqrt() * (1.0 - self.a2 * self.a2).sqrt();
        -((self.b + self.a1 * self.a2) * (t - s).cos() + self.mu * (t - s).sin()) / denom
    }

    fn cross_gram(&self) -> nalgebra::Matrix2<f64> {
        nalgebra::Matrix2::from_fn(|i, j| pseudo_inner(&self.c[i], &self.d[j]))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VertexFormValue {
    pub closed_form: f64,
    pub direct: f64,
}

/// `(c_t, d_s)` both from the closed form and as a direct trace.
pub fn vertex_angle_form(tri: &Triangle, vertex: Vertex, t: f64, s: f64, tol: f64) -> Result<VertexFormValue> {
    let f = vertex_frame(tri, vertex, tol)?;
    Ok(VertexFormValue {
        closed_form: f.closed_form(t, s),
        direct: pseudo_inner(&f.c_at(t), &f.d_at(s)),
    })
}

/// Which of `θ` and `π − θ` the reported angle is.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum AngleBranch {
    Direct,
    Complement,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexAngle {
    pub vertex: Vertex,
    /// `(c_0, d_0)`: cosine between the geodesic sides leaving the vertex.
    pub geodesic_cos: f64,
    /// `max_{t,s} |(c_t, d_s)|`.
    pub extremal: f64,
    /// The span of both tangent circles is pseudometric-positive.
    pub certified: bool,
    /// Angle between the sides folded into `[0, π/2]`, when certified.
    pub angle: Option<f64>,
    pub branch: Option<AngleBranch>,
    /// `m = −Tr ρ(c_normalized)` when the parameters are spherical.
    pub m: Option<f64>,
}

pub fn vertex_angle(tri: &Triangle, vertex: Vertex, tol: f64) -> Result<VertexAngle> {
    let f = vertex_frame(tri, vertex, tol)?;
    let cross = f.cross_gram();
    let extremal = linalg::singular_values(&DMatrix::from_fn(2, 2, |i, j| cross[(i, j)]))[0];
    let geodesic_cos = cross[(0, 0)];
    let all = [f.c[0].clone(), f.c[1].clone(), f.d[0].clone(), f.d[1].clone()];
    let gram = pseudo_gram(&all);
    let sig = float_inertia(&gram, tol.max(1e-9));
    let certified = sig.negative == 0 && geodesic_cos.abs() <= 1.0 + tol.max(1e-9);
    let (angle, branch) = if certified {
        let theta = geodesic_cos.clamp(-1.0, 1.0).acos();
        if theta <= FRAC_PI_2 {
            (Some(theta), Some(AngleBranch::Direct))
        } else {
            (Some(std::f64::consts::PI - theta), Some(AngleBranch::Complement))
        }
    } else {
        (None, None)
    };
    let params = tri.t_invariant();
    let det = params.det_q();
    // μ = (m/4n)·r with r = √(−det Q)
    let m = (det < 0.0).then(|| f.mu * tri.dim() as f64 / (-det).sqrt());
    Ok(VertexAngle {
        vertex,
        geodesic_cos,
        extremal,
        certified,
        angle,
        branch,
        m,
    })
}

/// Cosines `(−q(f1,f2), −q(f2,f3), −q(f3,f1))` of the polar triangle built from the
/// normalised basis of `Ṽ`.
pub fn polar_triangle(params: &AlgebraParams<f64>, tol: f64) -> Result<[f64; 3]> {
    let [a, b, c] = params.as_array();
    if a.abs() >= 1.0 || b.abs() >= 1.0 || c.abs() >= 1.0 {
        return Err(Error::WrongClass("the polar triangle needs |alpha|, |beta|, |gamma| < 1".into()));
    }
    if sigforms::classify(params, tol).class != sigforms::AlgebraClass::Spherical {
        return Err(Error::WrongClass("the polar triangle needs det Q < 0".into()));
    }
    let table = StructureTable::new(params.clone());
    let [f1, f2, f3] = table.vtilde_basis();
    let norm = |f: &crate::hcore::HElement<f64>, x: f64| f.scale(&(1.0 / (1.0 - x * x).sqrt()));
    let f = [norm(&f1, b), norm(&f2, c), norm(&f3, a)];
    Ok([
        -table.q(&f[0], &f[1]),
        -table.q(&f[1], &f[2]),
        -table.q(&f[2], &f[0]),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const TOL: f64 = 1e-9;

    fn params(a: f64, b: f64, c: f64) -> AlgebraParams<f64> {
        AlgebraParams::new(a, b, c)
    }

    fn frame_triangle(n: usize) -> (Triangle, TwistorSphere) {
        let s = standard_sphere(n);
        let [i, j, k] = s.frame().map(Clone::clone);
        (Triangle::new(i, j, k, TOL).unwrap(), s)
    }

    #[test]
    fn pseudo_inner_basics() {
        let s = standard_sphere(1);
        assert!((pseudo_inner(s.i().matrix(), s.i().matrix()) - 1.0).abs() < 1e-15);
        let id = DMatrix::<f64>::identity(4, 4);
        assert!((pseudo_inner(&id, &id) + 1.0).abs() < 1e-15);
        assert_eq!(pseudometric_signature(1, TOL), Signature::new(6, 10, 0));
    }

    #[test]
    fn tangent_space_signature() {
        for n in [1, 2] {
            let s = standard_sphere(n);
            let sig = tangent_signature(s.i(), TOL);
            assert_eq!(sig, Signature::new(4 * n * n - 2 * n, 4 * n * n + 2 * n, 0));
        }
    }

    #[test]
    fn tangent_plane_of_sphere_is_positive() {
        let s = standard_sphere(2);
        let g = pseudo_gram(&[s.j().matrix().clone(), s.i().matrix() * s.j().matrix()]);
        assert!(g.symmetric_eigen().eigenvalues.iter().all(|&v| v > 0.5));
    }

    #[test]
    fn t_invariant_examples() {
        let (tri, _) = frame_triangle(1);
        let t = tri.t_invariant();
        assert!(t.alpha.abs() + t.beta.abs() + t.gamma.abs() < 1e-15);
        let [a, b, _] = tri.matrices().map(Clone::clone);
        let tri2 = Triangle::new(a, b.clone(), b, TOL).unwrap();
        assert!((tri2.t_invariant().beta + 1.0).abs() < 1e-15);
    }

    #[test]
    fn t_invariant_is_conjugation_invariant() {
        let (tri, _) = triangle_on_sphere(&params(0.3, -0.4, 0.2), 2, TOL).unwrap();
        let g = DMatrix::from_fn(8, 8, |i, j| if i == j { 2.0 } else { ((i * 7 + j * 3) % 5) as f64 * 0.1 });
        let t0 = tri.t_invariant();
        let t1 = tri.conjugated(&g).unwrap().t_invariant();
        assert!((t0.alpha - t1.alpha).abs() < 1e-12);
        assert!((t0.beta - t1.beta).abs() < 1e-12);
        assert!((t0.gamma - t1.gamma).abs() < 1e-12);
    }

    #[test]
    fn sphere_from_anticommuting_pair() {
        let s = standard_sphere(1);
        let out = sphere_from_pair(s.i(), s.j(), TOL).unwrap();
        assert!((out.j().matrix() - s.j().matrix()).norm() < 1e-14);
        for v in [[0.6, 0.8, 0.0], [0.0, 0.6, -0.8], [1.0 / 3f64.sqrt(); 3]] {
            let m = out.point(v);
            assert!((&m * &m + DMatrix::identity(4, 4)).norm() < 1e-12);
        }
    }

    #[test]
    fn sphere_from_pair_errors() {
        let s = standard_sphere(1);
        assert!(matches!(sphere_from_pair(s.i(), s.i(), TOL), Err(Error::Degenerate(_))));
        let neg = ComplexStructure::new(-s.i().matrix(), TOL).unwrap();
        assert!(matches!(sphere_from_pair(s.i(), &neg, TOL), Err(Error::Degenerate(_))));
        let t = StructureTable::new(params(2.0, 2.0, 2.0));
        let rep = crate::reps::build(&t, 1, None, TOL).unwrap();
        let [a, b, _] = rep.gens().clone();
        let (a, b) = (ComplexStructure::new(a, 1e-8).unwrap(), ComplexStructure::new(b, 1e-8).unwrap());
        assert!(matches!(sphere_from_pair(&a, &b, TOL), Err(Error::WrongClass(_))));
    }

    #[test]
    fn arc_length_matches_arccos() {
        let alpha: f64 = -0.35;
        let s = standard_sphere(1);
        let [i, j, _] = s.frame();
        // J2 at angle θ from J1 = I along the circle towards J
        let theta = (-alpha).acos();
        let j2 = i * theta.cos() + j * theta.sin();
        let (j1c, j2c) = (s.i().clone(), ComplexStructure::new(j2.clone(), TOL).unwrap());
        let sphere = sphere_from_pair(&j1c, &j2c, TOL).unwrap();
        let axis = sphere.k().clone();
        // conjugation by e^{tK} rotates by 2t; find where the path reaches J2
        let path = |t: f64| {
            let g = rotation(&axis, t);
            &g * i * g.try_inverse().unwrap()
        };
        let steps = 4000;
        let mut length = 0.0;
        let mut best = (f64::INFINITY, 0.0);
        let h = PI / steps as f64;
        for step in 0..steps {
            let t0 = step as f64 * h;
            let (x0, x1) = (path(t0), path(t0 + h));
            let dx = &x1 - &x0;
            length += pseudo_inner(&dx, &dx).sqrt();
            let dist = (&x1 - &j2).norm();
            if dist < best.0 {
                best = (dist, length);
            }
        }
        assert!(best.0 < 1e-2);
        assert!((best.1 - theta).abs() < 2e-3, "{} vs {theta}", best.1);
    }

    #[test]
    fn rotation_examples() {
        let s = standard_sphere(1);
        let id = DMatrix::<f64>::identity(4, 4);
        assert!((rotation(s.i(), 0.0) - &id).norm() < 1e-15);
        assert!((rotation(s.i(), PI) + &id).norm() < 1e-14);
        for t in [0.2, 1.1, -0.7] {
            let g = rotation(s.i(), t);
            let moved = &g * s.j().matrix() * rotation(s.i(), -t);
            let expected = s.j().matrix() * (2.0 * t).cos() + s.k().matrix() * (2.0 * t).sin();
            assert!((moved - expected).norm() < 1e-13);
        }
    }

    #[test]
    fn degeneracy_examples() {
        let (tri, _) = frame_triangle(2);
        assert_eq!(degeneracy_test(&tri, TOL).unwrap(), Degeneracy { degenerate: true, image_dim: 4 });
        let t = StructureTable::new(params(0.0, 0.0, 0.0));
        let rep = crate::reps::build(&t, 2, Some(1), TOL).unwrap();
        let tri = Triangle::from_rep(&rep, TOL).unwrap();
        assert!(!degeneracy_test(&tri, TOL).unwrap().degenerate);
        let rep = crate::reps::build(&t, 2, Some(0), TOL).unwrap();
        assert!(degeneracy_test(&Triangle::from_rep(&rep, TOL).unwrap(), TOL).unwrap().degenerate);
    }

    #[test]
    fn quadric_kinds_and_samples() {
        let (tri, _) = frame_triangle(1);
        let s = quadric_classify_and_sample(&tri, 16, 3, TOL);
        assert_eq!(s.kind, QuadricKind::Ellipsoid);
        for p in &s.points {
            assert!((p[0] * p[0] + p[1] * p[1] + p[2] * p[2] - 1.0).abs() < 1e-12);
        }
        let t = StructureTable::new(params(2.0, 2.0, 2.0));
        let tri = Triangle::from_rep(&crate::reps::build(&t, 1, None, TOL).unwrap(), 1e-8).unwrap();
        let s = quadric_classify_and_sample(&tri, 16, 4, TOL);
        assert_eq!(s.kind, QuadricKind::OneSheetedHyperboloid);
        assert!(s.max_square_residual.unwrap() < 1e-8);
        assert_eq!(quadric_points(&params(0.0, 0.0, 1.0), 4, 1, TOL).kind, QuadricKind::EllipticCylinder);
        assert_eq!(quadric_points(&params(-2.0, -2.0, -2.0), 4, 1, TOL).kind, QuadricKind::TwoSheetedHyperboloid);
        assert_eq!(quadric_points(&params(1.0, 1.0, -1.0), 4, 1, TOL).kind, QuadricKind::ParallelPlanes);
    }

    #[test]
    fn right_triangle_has_zero_mixed_values() {
        let (tri, _) = frame_triangle(1);
        for v in Vertex::ALL {
            let val = vertex_angle_form(&tri, v, 0.0, 0.0, TOL).unwrap();
            assert!(val.closed_form.abs() < 1e-15 && val.direct.abs() < 1e-15);
        }
    }

    #[test]
    fn vertex_angle_matches_sphere_geometry() {
        let p = params(0.3, -0.45, 0.2);
        let (tri, sphere) = triangle_on_sphere(&p, 1, TOL).unwrap();
        let xs = tri.matrices().map(|m| nalgebra::Vector3::from(sphere.coordinates(m)));
        for v in Vertex::ALL {
            let [ia, ib1, ib2] = v.order();
            let x = xs[ia];
            let t1 = xs[ib1] - x * x.dot(&xs[ib1]);
            let t2 = xs[ib2] - x * x.dot(&xs[ib2]);
            let oracle = t1.dot(&t2) / (t1.norm() * t2.norm());
            let ang = vertex_angle(&tri, v, TOL).unwrap();
            assert!((ang.geodesic_cos - oracle).abs() < 1e-12, "{v:?}");
            assert!(ang.certified);
            // a degenerate triangle has both tangent circles in one plane
            assert!((ang.extremal - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn non_compact_vertex_is_rejected() {
        let t = StructureTable::new(params(2.0, 0.5, 0.5));
        let rep = crate::reps::build(&t, 1, None, TOL);
        if let Ok(rep) = rep {
            let tri = Triangle::from_rep(&rep, 1e-8).unwrap();
            assert!(matches!(vertex_angle_form(&tri, Vertex::One, 0.0, 0.0, TOL), Err(Error::WrongClass(_))));
        }
    }

    #[test]
    fn polar_triangle_examples() {
        let z = polar_triangle(&params(0.0, 0.0, 0.0), TOL).unwrap();
        assert!(z.iter().all(|x| x.abs() < 1e-15));
        let (a, b, c) = (0.3, -0.45, 0.2);
        let pol = polar_triangle(&params(a, b, c), TOL).unwrap();
        let expected = (a + b * c) / ((1.0f64 - b * b).sqrt() * (1.0f64 - c * c).sqrt());
        assert!((pol[0] - expected).abs() < 1e-12);
        assert!(polar_triangle(&params(1.5, 0.0, 0.0), TOL).is_err());
    }

    #[test]
    fn polar_cosines_are_minus_vertex_cosines() {
        for p in [(0.3, -0.45, 0.2), (-0.1, 0.6, 0.5), (0.7, 0.1, -0.2)] {
            let pr = params(p.0, p.1, p.2);
            let pol = polar_triangle(&pr, TOL).unwrap();
            // unit vectors with ⟨Xᵢ, Xⱼ⟩ = −T from the Cholesky factor of −Q
            let l = (form_q(&pr).to_dmatrix() * -1.0).cholesky().unwrap().l();
            let x: Vec<nalgebra::Vector3<f64>> =
                (0..3).map(|r| nalgebra::Vector3::new(l[(r, 0)], l[(r, 1)], l[(r, 2)])).collect();
            let cos_at = |v: usize, a: usize, b: usize| {
                let ta = x[a] - x[v] * x[v].dot(&x[a]);
                let tb = x[b] - x[v] * x[v].dot(&x[b]);
                ta.dot(&tb) / (ta.norm() * tb.norm())
            };
            let expected = [-cos_at(2, 0, 1), -cos_at(0, 1, 2), -cos_at(1, 2, 0)];
            for (got, want) in pol.iter().zip(expected) {
                assert!((got - want).abs() < 1e-12, "{p:?}: {pol:?} vs {expected:?}");
            }
        }
    }
}
