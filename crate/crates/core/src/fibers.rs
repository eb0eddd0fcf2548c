//! Triples `(g1, g2, g3)` with `gᵢ` commuting with `Iᵢ` and product in the stabilizer of a
//! quaternionic triple, and the triangles they produce.

use nalgebra::{DMatrix, Matrix3, Rotation3, Unit, Vector3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hcore::{AlgebraParams, Basis, StructureTable};
use crate::linalg::reciprocal_condition;
use crate::periods::{rotation, triangle_on_sphere, ComplexStructure, Triangle, TwistorSphere};
use crate::reps::{self, classify_rep, intertwiner, intertwiner_space, op_norm, MatRep, RepClass};
use crate::sigforms::{classify, AlgebraClass};

/// Relative tolerance for commutation tests and for the preserved invariant.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

fn commutes(g: &DMatrix<f64>, m: &DMatrix<f64>, tol: f64) -> bool {
    op_norm(&(g * m - m * g)) <= tol * (op_norm(g) * op_norm(m)).max(1.0)
}

fn check_invertible(g: &DMatrix<f64>) -> Result<()> {
    if g.nrows() != g.ncols() || reciprocal_condition(g) <= 1e-12 {
        return Err(Error::Invalid("group element is singular or not square".into()));
    }
    Ok(())
}

/// `g` commutes with `I1` and `I2`, hence with the quaternions they generate.
pub fn in_gh(g: &DMatrix<f64>, i1: &ComplexStructure, i2: &ComplexStructure, tol: f64) -> Result<bool> {
    check_invertible(g)?;
    if g.nrows() != i1.dim() || g.nrows() != i2.dim() {
        return Err(Error::Invalid("group element and complex structures differ in size".into()));
    }
    Ok(commutes(g, i1.matrix(), tol) && commutes(g, i2.matrix(), tol))
}

/// Basis of the joint commutant `{X : XM = MX}`.
pub fn commutant_basis(mats: &[DMatrix<f64>], tol: f64) -> Result<Vec<DMatrix<f64>>> {
    intertwiner_space(mats, mats, tol)
}

/// Dimension of the joint commutant: the Lie algebra of the pointwise stabilizer.
pub fn centralizer_dim(mats: &[DMatrix<f64>], tol: f64) -> Result<usize> {
    Ok(commutant_basis(mats, tol)?.len())
}

/// Random element of the commutant, rejected until well conditioned.
pub fn random_commutant_element(mats: &[DMatrix<f64>], rng: &mut ChaCha8Rng, tol: f64) -> Result<DMatrix<f64>> {
    let basis = commutant_basis(mats, tol)?;
    let d = mats[0].nrows();
    for _ in 0..reps::INTERTWINER_RETRIES {
        let g = basis.iter().fold(DMatrix::zeros(d, d), |acc, x| {
            let c: f64 = StandardNormal.sample(rng);
            acc + x * c
        });
        if reciprocal_condition(&g) > reps::INTERTWINER_MIN_RCOND {
            return Ok(g);
        }
    }
    Err(Error::Numerical("no well-conditioned commutant element found".into()))
}

/// `(g1, g2, g3)` with `gᵢ ∈ G_{Iᵢ}`.
#[derive(Clone, Debug)]
pub struct GroupTriple {
    g: [DMatrix<f64>; 3],
    context: [ComplexStructure; 3],
}

impl GroupTriple {
    pub fn new(g: [DMatrix<f64>; 3], context: [ComplexStructure; 3], tol: f64) -> Result<Self> {
        for (idx, (gi, ii)) in g.iter().zip(&context).enumerate() {
            check_invertible(gi)?;
            if gi.nrows() != ii.dim() {
                return Err(Error::Invalid(format!("g{} has the wrong size", idx + 1)));
            }
            if !commutes(gi, ii.matrix(), tol) {
                return Err(Error::RelationViolated {
                    relation: format!("g{0} I{0} = I{0} g{0}", idx + 1),
                    residual: op_norm(&(gi * ii.matrix() - ii.matrix() * gi)),
                    tol,
                });
            }
        }
        Ok(Self { g, context })
    }

    pub fn factors(&self) -> &[DMatrix<f64>; 3] {
        &self.g
    }

    pub fn context(&self) -> &[ComplexStructure; 3] {
        &self.context
    }

    pub fn product(&self) -> DMatrix<f64> {
        &self.g[0] * &self.g[1] * &self.g[2]
    }

    pub fn product_in_gh(&self, tol: f64) -> Result<bool> {
        in_gh(&self.product(), &self.context[0], &self.context[1], tol)
    }

    /// Which of the factors lie in `G_ℍ` on their own.
    pub fn factors_in_gh(&self, tol: f64) -> Result<[bool; 3]> {
        let [a, b, c] = &self.g;
        let (i1, i2) = (&self.context[0], &self.context[1]);
        Ok([in_gh(a, i1, i2, tol)?, in_gh(b, i1, i2, tol)?, in_gh(c, i1, i2, tol)?])
    }
}

/// `(g1, g2, g3) ↦ (I1, I2, g2 I3 g2⁻¹)`.
pub fn tau(triple: &GroupTriple, tol: f64) -> Result<Triangle> {
    if !triple.product_in_gh(tol)? {
        return Err(Error::Invalid("g1 g2 g3 does not commute with I1 and I2".into()));
    }
    let [i1, i2, i3] = triple.context();
    let j3 = i3.conjugated(&triple.g[1])?;
    Triangle::new(
        i1.matrix().clone(),
        i2.matrix().clone(),
        j3.into_matrix(),
        tol.max(MEMBERSHIP_TOL),
    )
}

/// `(α Id − I1I2)⁻¹ (s·r Id − β I1 + γ I2)` with `(α Id − I1I2)⁻¹ = (α Id − I2I1)/(1 − α²)`.
pub fn vertex_from_formula(
    i1: &DMatrix<f64>,
    i2: &DMatrix<f64>,
    params: &AlgebraParams<f64>,
    sign: f64,
) -> Result<DMatrix<f64>> {
    let det = params.det_q();
    if det >= 0.0 || params.alpha.abs() >= 1.0 {
        return Err(Error::WrongClass("the vertex formula needs det Q < 0 and |alpha| < 1".into()));
    }
    let r = (-det).sqrt();
    let d = i1.nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let inv = (&id * params.alpha - i2 * i1) / (1.0 - params.alpha * params.alpha);
    Ok(inv * (&id * (sign * r) - i1 * params.beta + i2 * params.gamma))
}

/// The other solution of the vertex formula: the degenerate vertex not equal to `I3`.
pub fn second_degenerate_vertex(
    i1: &ComplexStructure,
    i2: &ComplexStructure,
    i3: &ComplexStructure,
    tol: f64,
) -> Result<ComplexStructure> {
    let tri = Triangle::new(i1.matrix().clone(), i2.matrix().clone(), i3.matrix().clone(), tol.max(MEMBERSHIP_TOL))?;
    let params = tri.t_invariant();
    if classify(&params, tol).class != AlgebraClass::Spherical {
        return Err(Error::WrongClass("second vertex needs spherical parameters".into()));
    }
    let plus = vertex_from_formula(i1.matrix(), i2.matrix(), &params, 1.0)?;
    let minus = vertex_from_formula(i1.matrix(), i2.matrix(), &params, -1.0)?;
    let scale = i3.matrix().norm();
    let (dp, dm) = ((&plus - i3.matrix()).norm() / scale, (&minus - i3.matrix()).norm() / scale);
    let other = if dp <= dm { minus } else { plus };
    if dp.min(dm) > tol.max(MEMBERSHIP_TOL).sqrt() {
        return Err(Error::Numerical(format!(
            "neither sign reproduces I3 (distances {dp:e}, {dm:e}); the triangle is not degenerate"
        )));
    }
    ComplexStructure::new(other, tol.max(MEMBERSHIP_TOL))
}

fn sphere_vector(s: &TwistorSphere, m: &DMatrix<f64>) -> Vector3<f64> {
    Vector3::from(s.coordinates(m))
}

/// Signed angle about `axis` carrying the component of `from` orthogonal to it onto that of `to`.
fn angle_about(axis: &Vector3<f64>, from: &Vector3<f64>, to: &Vector3<f64>, tol: f64) -> Result<f64> {
    let p = from - axis * axis.dot(from);
    let q = to - axis * axis.dot(to);
    if p.norm() <= tol || q.norm() <= tol {
        return Err(Error::Degenerate("the moved vertex lies on the rotation axis".into()));
    }
    Ok(axis.dot(&p.cross(&q)).atan2(p.dot(&q)))
}

/// Conjugation by `e^{tI}` rotates the sphere by `2t` about the point `I`.
fn sphere_rotation(axis: &Vector3<f64>, t: f64) -> Matrix3<f64> {
    Rotation3::from_axis_angle(&Unit::new_normalize(*axis), 2.0 * t).into_inner()
}

/// Rotation triple `(e^{−t1 I1}, e^{t2 I2}, e^{t3 I3})` with product `Id`, sending `I3` to the
/// second degenerate vertex under `g2`.
pub fn so3_triple(
    sphere: &TwistorSphere,
    i1: &ComplexStructure,
    i2: &ComplexStructure,
    i3: &ComplexStructure,
    tol: f64,
) -> Result<GroupTriple> {
    let loose = tol.max(MEMBERSHIP_TOL);
    let x: [Vector3<f64>; 3] = [i1, i2, i3].map(|i| sphere_vector(sphere, i.matrix()));
    for (idx, (xi, ii)) in x.iter().zip([i1, i2, i3]).enumerate() {
        if sphere.off_span_residual(ii.matrix()) > loose || (xi.norm() - 1.0).abs() > loose {
            return Err(Error::Invalid(format!("I{} is not on the sphere", idx + 1)));
        }
    }
    if Matrix3::from_columns(&x).determinant().abs() <= loose {
        return Err(Error::Degenerate("I1, I2, I3 are linearly dependent".into()));
    }
    let i3p = second_degenerate_vertex(i1, i2, i3, tol)?;
    let x3p = sphere_vector(sphere, i3p.matrix());
    // g2 = e^{t2 I2}: I3 → I3′ about I2
    let t2 = angle_about(&x[1], &x[2], &x3p, loose)? / 2.0;
    // g1 = e^{−t1 I1}: I3′ → I3 about I1
    let t1 = -angle_about(&x[0], &x3p, &x[2], loose)? / 2.0;
    let composite = sphere_rotation(&x[0], -t1) * sphere_rotation(&x[1], t2);
    // the composite fixes I3; undo it with g3
    let u = x[2].cross(&x[0]).normalize();
    let theta = angle_about(&x[2], &u, &(composite * u), loose)?;
    let mut t3 = -theta / 2.0;
    let g1 = rotation(i1, -t1);
    let g2 = rotation(i2, t2);
    let d = i1.dim();
    // the product is a unit quaternion acting trivially on the sphere, i.e. ±Id
    let trial = &g1 * &g2 * rotation(i3, t3);
    if (trial.trace() / d as f64) < 0.0 {
        t3 += std::f64::consts::PI;
    }
    let g3 = rotation(i3, t3);
    GroupTriple::new([g1, g2, g3], [i1.clone(), i2.clone(), i3.clone()], loose)
}

/// The spherical context: a degenerate triangle `I1, I2, I3` inside its sphere.
#[derive(Clone, Debug)]
pub struct FiberContext {
    pub params: AlgebraParams<f64>,
    pub sphere: TwistorSphere,
    pub triangle: Triangle,
}

impl FiberContext {
    pub fn new(params: &AlgebraParams<f64>, n: usize, tol: f64) -> Result<Self> {
        if classify(params, tol).class != AlgebraClass::Spherical {
            return Err(Error::WrongClass("fiber constructions need spherical parameters".into()));
        }
        let (triangle, sphere) = triangle_on_sphere(params, n, tol.max(MEMBERSHIP_TOL))?;
        Ok(Self {
            params: params.clone(),
            sphere,
            triangle,
        })
    }

    pub fn vertices(&self) -> &[ComplexStructure; 3] {
        self.triangle.vertices()
    }

    pub fn so3_triple(&self, tol: f64) -> Result<GroupTriple> {
        let [i1, i2, i3] = self.vertices();
        so3_triple(&self.sphere, i1, i2, i3, tol)
    }

    /// The trivial component: any triple in `G_ℍ³`.
    pub fn trivial_triple(&self, seed: u64, tol: f64) -> Result<GroupTriple> {
        let [i1, i2, _] = self.vertices();
        let mats = [i1.matrix().clone(), i2.matrix().clone()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = [
            random_commutant_element(&mats, &mut rng, tol)?,
            random_commutant_element(&mats, &mut rng, tol)?,
            random_commutant_element(&mats, &mut rng, tol)?,
        ];
        GroupTriple::new(g, self.vertices().clone(), tol.max(MEMBERSHIP_TOL))
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub triple: GroupTriple,
    /// `ρ_k(e3)` in the frame where `ρ_k(e1) = I1`, `ρ_k(e2) = I2`.
    pub j3: DMatrix<f64>,
    pub rep: MatRep,
}

fn find_intertwiner(a: &[DMatrix<f64>], b: &[DMatrix<f64>], seed: u64, what: &str, tol: f64) -> Result<DMatrix<f64>> {
    let search = intertwiner(a, b, seed, tol)?;
    search.intertwiner.ok_or_else(|| {
        Error::NoSolution(format!(
            "no invertible {what}: nullspace dimension {}, best rcond {:e} after {} attempts",
            search.nullspace_dim, search.best_rcond, search.attempts
        ))
    })
}

/// A triple whose triangle is the nondegenerate `(I1, I2, ρ_k(e3))`. The product is `h`
/// (default `Id`), which must lie in `G_ℍ`.
pub fn nondegenerate_witness(
    params: &AlgebraParams<f64>,
    n: usize,
    k: usize,
    seed: u64,
    h: Option<&DMatrix<f64>>,
    tol: f64,
) -> Result<Witness> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::Invalid(format!(
            "a nondegenerate witness needs n >= 2 and 0 < k < n, got n = {n}, k = {k}"
        )));
    }
    let ctx = FiberContext::new(params, n, tol)?;
    let [i1, i2, i3] = ctx.vertices().clone();
    let table = StructureTable::new(params.clone());
    let built = reps::build(&table, n, Some(k), tol)?;
    let [r1, r2, _] = built.gens().clone();
    let p = find_intertwiner(
        &[r1, r2],
        &[i1.matrix().clone(), i2.matrix().clone()],
        seed,
        "frame change",
        tol,
    )?;
    let rep = built.conjugate(&p)?;
    let j3 = rep.gens()[2].clone();
    let g2 = find_intertwiner(
        &[i2.matrix().clone(), i3.matrix().clone()],
        &[i2.matrix().clone(), j3.clone()],
        seed.wrapping_add(1),
        "g2",
        tol,
    )?;
    let g1 = find_intertwiner(
        &[i1.matrix().clone(), j3.clone()],
        &[i1.matrix().clone(), i3.matrix().clone()],
        seed.wrapping_add(2),
        "g1",
        tol,
    )?;
    let mut g3 = (&g1 * &g2)
        .try_inverse()
        .ok_or_else(|| Error::Numerical("g1 g2 is singular".into()))?;
    if let Some(h) = h {
        if !in_gh(h, &i1, &i2, tol.max(MEMBERSHIP_TOL))? {
            return Err(Error::Invalid("h must commute with I1 and I2".into()));
        }
        g3 *= h;
    }
    let triple = GroupTriple::new([g1, g2, g3], [i1, i2, i3], tol.max(MEMBERSHIP_TOL))?;
    Ok(Witness { triple, j3, rep })
}

/// Representation class of the triangle produced by a triple.
pub fn certify_component(triple: &GroupTriple, tol: f64) -> Result<RepClass> {
    let tri = tau(triple, tol)?;
    classify_rep(&tri.to_rep()?, tol)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiberComponentReport {
    pub n: usize,
    pub k: usize,
    pub stabilizer_dim: usize,
    pub component_dim: usize,
    pub stabilizer_closed_form: usize,
    pub component_closed_form: usize,
}

pub fn stabilizer_closed_form(n: usize, k: usize) -> usize {
    4 * k * k + 4 * (n - k) * (n - k)
}

pub fn component_closed_form(n: usize, k: usize) -> usize {
    12 * n * n + 8 * n * k - 8 * k * k
}

/// Measures the stabilizer of `ρ_k` and compares with the closed forms.
pub fn component_report(params: &AlgebraParams<f64>, n: usize, k: usize, tol: f64) -> Result<FiberComponentReport> {
    if k > n {
        return Err(Error::Invalid(format!("k = {k} exceeds n = {n}")));
    }
    let table = StructureTable::new(params.clone());
    if classify(params, tol).class != AlgebraClass::Spherical {
        return Err(Error::WrongClass("component dimensions are computed for spherical parameters".into()));
    }
    let rep = reps::build(&table, n, Some(k), tol)?;
    let c = table
        .central_element()
        .normalized
        .ok_or_else(|| Error::Numerical("central element is not normalisable".into()))?;
    let mats = [rep.image(&table.basis(Basis::E1)), rep.image(&table.basis(Basis::E2)), rep.image(&c)];
    let stabilizer_dim = centralizer_dim(&mats, tol)?;
    let report = FiberComponentReport {
        n,
        k,
        stabilizer_dim,
        component_dim: 16 * n * n - stabilizer_dim,
        stabilizer_closed_form: stabilizer_closed_form(n, k),
        component_closed_form: component_closed_form(n, k),
    };
    if report.stabilizer_dim != report.stabilizer_closed_form || report.component_dim != report.component_closed_form {
        return Err(Error::Numerical(format!(
            "measured stabilizer dimension {} differs from 4k^2 + 4(n-k)^2 = {}",
            report.stabilizer_dim, report.stabilizer_closed_form
        )));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::{degeneracy_test, standard_sphere, vertex_angle, Vertex};

    const TOL: f64 = 1e-9;

    fn params(a: f64, b: f64, c: f64) -> AlgebraParams<f64> {
        AlgebraParams::new(a, b, c)
    }

    fn close(a: &AlgebraParams<f64>, b: &AlgebraParams<f64>, tol: f64) -> bool {
        (a.alpha - b.alpha).abs() < tol && (a.beta - b.beta).abs() < tol && (a.gamma - b.gamma).abs() < tol
    }

    #[test]
    fn in_gh_examples() {
        let s = standard_sphere(1);
        let id = DMatrix::<f64>::identity(4, 4);
        assert!(in_gh(&id, s.i(), s.j(), TOL).unwrap());
        assert!(!in_gh(&rotation(s.i(), 0.3), s.i(), s.j(), TOL).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mats = [s.i().matrix().clone(), s.j().matrix().clone()];
        let g = random_commutant_element(&mats, &mut rng, TOL).unwrap();
        assert!(in_gh(&g, s.i(), s.j(), TOL).unwrap());
        assert!(in_gh(&DMatrix::zeros(4, 4), s.i(), s.j(), TOL).is_err());
    }

    #[test]
    fn centralizer_examples() {
        let s = standard_sphere(1);
        assert_eq!(centralizer_dim(&[s.i().matrix().clone()], TOL).unwrap(), 8);
        assert_eq!(centralizer_dim(&[s.i().matrix().clone(), s.j().matrix().clone()], TOL).unwrap(), 4);
        let s2 = standard_sphere(2);
        assert_eq!(centralizer_dim(&[s2.i().matrix().clone(), s2.j().matrix().clone()], TOL).unwrap(), 16);
    }

    #[test]
    fn second_vertex_of_quaternionic_frame() {
        let s = standard_sphere(1);
        let i3p = second_degenerate_vertex(s.i(), s.j(), s.k(), TOL).unwrap();
        assert!((i3p.matrix() + s.k().matrix()).norm() < 1e-14);
    }

    #[test]
    fn second_vertex_preserves_invariant() {
        let p = params(0.3, -0.45, 0.2);
        let ctx = FiberContext::new(&p, 1, TOL).unwrap();
        let [i1, i2, i3] = ctx.vertices();
        let t0 = ctx.triangle.t_invariant();
        let same = vertex_from_formula(i1.matrix(), i2.matrix(), &t0, 1.0).unwrap();
        let other = vertex_from_formula(i1.matrix(), i2.matrix(), &t0, -1.0).unwrap();
        let hit = (&same - i3.matrix()).norm().min((&other - i3.matrix()).norm());
        assert!(hit < 1e-12);
        let i3p = second_degenerate_vertex(i1, i2, i3, TOL).unwrap();
        let tri = Triangle::new(i1.matrix().clone(), i2.matrix().clone(), i3p.matrix().clone(), TOL).unwrap();
        assert!(close(&tri.t_invariant(), &t0, 1e-12));
        assert!(ctx.sphere.off_span_residual(i3p.matrix()) < 1e-12);
        assert!((i3p.matrix() - i3.matrix()).norm() > 0.1);
    }

    #[test]
    fn so3_component() {
        for p in [params(0.0, 0.0, 0.0), params(0.3, -0.45, 0.2), params(-0.6, 0.1, 0.5)] {
            let ctx = FiberContext::new(&p, 2, TOL).unwrap();
            let triple = ctx.so3_triple(TOL).unwrap();
            assert!(triple.product_in_gh(TOL).unwrap());
            assert!((triple.product() - DMatrix::<f64>::identity(8, 8)).norm() < 1e-12);
            assert_eq!(triple.factors_in_gh(TOL).unwrap(), [false; 3]);
            let [i1, i2, i3] = ctx.vertices();
            let i3p = second_degenerate_vertex(i1, i2, i3, TOL).unwrap();
            let tri = tau(&triple, TOL).unwrap();
            assert!((tri.matrices()[2] - i3p.matrix()).norm() < 1e-12);
            let class = certify_component(&triple, TOL).unwrap();
            assert!(!class.faithful);
        }
    }

    #[test]
    fn trivial_component_gives_original_triangle() {
        let ctx = FiberContext::new(&params(0.3, -0.45, 0.2), 2, TOL).unwrap();
        let base = ctx.trivial_triple(9, TOL).unwrap();
        let [g1, g2, _] = base.factors().clone();
        // fix the third slot so the product lies in G_ℍ
        let g3 = (&g1 * &g2).try_inverse().unwrap();
        let triple = GroupTriple::new([g1, g2, g3], ctx.vertices().clone(), 1e-8).unwrap();
        let tri = tau(&triple, 1e-8).unwrap();
        assert!((tri.matrices()[2] - ctx.vertices()[2].matrix()).norm() < 1e-8);
    }

    #[test]
    fn so3_rejects_dependent_vertices() {
        let s = standard_sphere(1);
        let err = so3_triple(&s, s.i(), s.j(), s.i(), TOL).unwrap_err();
        assert!(matches!(err, Error::Degenerate(_) | Error::WrongClass(_) | Error::RelationViolated { .. }));
    }

    #[test]
    fn witness_is_nondegenerate() {
        let p = params(0.0, 0.0, 0.0);
        let w = nondegenerate_witness(&p, 2, 1, 11, None, TOL).unwrap();
        assert!((w.triple.product() - DMatrix::<f64>::identity(8, 8)).norm() < 1e-9);
        let tri = tau(&w.triple, TOL).unwrap();
        assert!(!degeneracy_test(&tri, TOL).unwrap().degenerate);
        assert!(close(&tri.t_invariant(), &p, 1e-8));
        assert!((tri.matrices()[2] - &w.j3).norm() < 1e-8);
        let class = certify_component(&w.triple, TOL).unwrap();
        assert_eq!((class.k, class.faithful), (1, true));
    }

    #[test]
    fn witness_with_h() {
        let p = params(0.2, 0.1, -0.3);
        let ctx = FiberContext::new(&p, 2, TOL).unwrap();
        let [i1, i2, _] = ctx.vertices();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = random_commutant_element(&[i1.matrix().clone(), i2.matrix().clone()], &mut rng, TOL).unwrap();
        let w = nondegenerate_witness(&p, 2, 1, 3, Some(&h), TOL).unwrap();
        assert!((w.triple.product() - &h).norm() < 1e-8 * h.norm());
        assert!(tau(&w.triple, TOL).is_ok());
    }

    #[test]
    fn witness_argument_errors() {
        let p = params(0.0, 0.0, 0.0);
        assert!(matches!(nondegenerate_witness(&p, 1, 0, 0, None, TOL), Err(Error::Invalid(_))));
        assert!(matches!(nondegenerate_witness(&p, 2, 2, 0, None, TOL), Err(Error::Invalid(_))));
        assert!(matches!(nondegenerate_witness(&params(2.0, 2.0, 2.0), 2, 1, 0, None, TOL), Err(Error::WrongClass(_))));
    }

    #[test]
    fn balanced_witness_angles_match_degenerate_triangle() {
        let p = params(0.3, -0.45, 0.2);
        let ctx = FiberContext::new(&p, 2, TOL).unwrap();
        let w = nondegenerate_witness(&p, 2, 1, 2, None, TOL).unwrap();
        let tri = tau(&w.triple, TOL).unwrap();
        for v in Vertex::ALL {
            let a = vertex_angle(&tri, v, TOL).unwrap();
            let b = vertex_angle(&ctx.triangle, v, TOL).unwrap();
            assert!(a.certified);
            assert!(a.m.unwrap().abs() < 1e-8);
            assert!((a.angle.unwrap() - b.angle.unwrap()).abs() < 1e-8);
            assert!((a.extremal - b.geodesic_cos.abs()).abs() < 1e-8);
        }
    }

    #[test]
    fn component_dimensions() {
        let p = params(0.1, 0.2, -0.3);
        for n in 1..=3 {
            for k in 0..=n {
                let r = component_report(&p, n, k, TOL).unwrap();
                assert_eq!(r.stabilizer_dim, 4 * k * k + 4 * (n - k) * (n - k));
            }
        }
        assert_eq!(component_report(&p, 2, 0, TOL).unwrap().component_dim, 48);
        assert_eq!(component_report(&p, 2, 1, TOL).unwrap().component_dim, 56);
        assert_eq!(component_report(&p, 3, 1, TOL).unwrap().component_dim, 124);
    }

    #[test]
    fn commutant_of_all_generators_matches() {
        let p = params(0.1, 0.2, -0.3);
        let table = StructureTable::new(p);
        let rep = reps::build(&table, 3, Some(1), TOL).unwrap();
        assert_eq!(centralizer_dim(rep.gens(), TOL).unwrap(), 4 + 16);
    }
}
