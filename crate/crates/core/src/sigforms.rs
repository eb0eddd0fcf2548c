//! The forms `Q` and `Q̃`, inertia, and the classification of the algebra.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hcore::{AlgebraParams, Basis, HElement, StructureTable};
use crate::linalg::{Mat, Signature};
use crate::scalar::Scalar;

/// Gram matrix of the trace form on `⟨e1, e2, e3⟩`.
pub fn form_q<S: Scalar>(p: &AlgebraParams<S>) -> Mat<S> {
    let m1 = -S::one();
    let (a, b, c) = (p.alpha.clone(), p.beta.clone(), p.gamma.clone());
    Mat::from_rows(vec![
        vec![m1.clone(), a.clone(), c.clone()],
        vec![a, m1.clone(), b.clone()],
        vec![c, b, m1],
    ])
}

/// Gram matrix of the trace form on `⟨β − e2e3, γ − e3e1, α − e1e2⟩`.
pub fn form_qtilde<S: Scalar>(p: &AlgebraParams<S>) -> Mat<S> {
    let (a, b, c) = (&p.alpha, &p.beta, &p.gamma);
    let one = S::one();
    let m = |x: S| -x;
    Mat::from_rows(vec![
        vec![
            m(one.clone() - b.clone() * b.clone()),
            m(b.clone() * c.clone() + a.clone()),
            m(a.clone() * b.clone() + c.clone()),
        ],
        vec![
            m(b.clone() * c.clone() + a.clone()),
            m(one.clone() - c.clone() * c.clone()),
            m(a.clone() * c.clone() + b.clone()),
        ],
        vec![
            m(a.clone() * b.clone() + c.clone()),
            m(a.clone() * c.clone() + b.clone()),
            m(one - a.clone() * a.clone()),
        ],
    ])
}

/// Inertia of a symmetric matrix; asymmetric input is rejected.
pub fn signature<S: Scalar>(m: &Mat<S>, tol: f64) -> Result<Signature> {
    if m.rows() != m.cols() {
        return Err(Error::Invalid(format!(
            "signature of a non-square {}x{} matrix",
            m.rows(),
            m.cols()
        )));
    }
    if !m.sub(&m.transpose()).is_zero(tol) {
        return Err(Error::Invalid("signature of an asymmetric matrix".into()));
    }
    Ok(m.inertia(tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraClass {
    Spherical,
    Hyperbolic,
    Cylindrical,
    NonQuaternionic(Signature),
}

impl AlgebraClass {
    pub fn from_signature(sig: Signature) -> Self {
        match (sig.positive, sig.negative, sig.zero) {
            (0, 3, 0) => AlgebraClass::Spherical,
            (1, 2, 0) => AlgebraClass::Hyperbolic,
            (0, 2, 1) => AlgebraClass::Cylindrical,
            _ => AlgebraClass::NonQuaternionic(sig),
        }
    }

    pub fn is_quaternionic(&self) -> bool {
        !matches!(self, AlgebraClass::NonQuaternionic(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            AlgebraClass::Spherical => "Spherical",
            AlgebraClass::Hyperbolic => "Hyperbolic",
            AlgebraClass::Cylindrical => "Cylindrical",
            AlgebraClass::NonQuaternionic(_) => "NonQuaternionic",
        }
    }

    /// Number of equivalence classes of representations on `ℝ^{4n}`.
    pub fn representation_classes(&self, n: usize) -> usize {
        match self {
            AlgebraClass::Spherical => n + 1,
            AlgebraClass::Hyperbolic => 1,
            AlgebraClass::Cylindrical => n / 2 + 1,
            AlgebraClass::NonQuaternionic(_) => 0,
        }
    }
}

impl fmt::Display for AlgebraClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgebraClass::NonQuaternionic(sig) => write!(f, "NonQuaternionic{sig}"),
            other => f.write_str(other.name()),
        }
    }
}

impl Serialize for AlgebraClass {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        serializer.serialize_str(self.name())
    }
}

/// Signature of the full trace form `q` determined by the signature of `Q`.
pub fn predicted_q_signature(sig_q: Signature) -> Option<Signature> {
    let s = |p, n, z| Some(Signature::new(p, n, z));
    match (sig_q.positive, sig_q.negative, sig_q.zero) {
        (0, 3, 0) => s(2, 6, 0),
        (2, 1, 0) => s(6, 2, 0),
        (1, 2, 0) => s(4, 4, 0),
        (0, 2, 1) => s(1, 3, 4),
        (1, 1, 1) => s(3, 1, 4),
        (0, 1, 2) => s(1, 1, 6),
        _ => None,
    }
}

/// The six admissible signatures of `Q`.
pub const ADMISSIBLE_Q_SIGNATURES: [Signature; 6] = [
    Signature::new(0, 3, 0),
    Signature::new(2, 1, 0),
    Signature::new(1, 2, 0),
    Signature::new(0, 2, 1),
    Signature::new(1, 1, 1),
    Signature::new(0, 1, 2),
];

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub class: AlgebraClass,
    pub sig_q: Signature,
    pub sig_full_predicted: Option<Signature>,
    /// `|det Q| < tol` while `det Q ≠ 0` (only possible for floating point input).
    pub near_degenerate: bool,
    /// Class obtained by reading eigenvalue signs without a zero band.
    pub nearest_nondegenerate: Option<AlgebraClass>,
}

pub fn classify<S: Scalar>(p: &AlgebraParams<S>, tol: f64) -> Classification {
    let q = form_q(p);
    let sig_q = q.inertia(tol);
    let class = AlgebraClass::from_signature(sig_q);
    let det = p.det_q();
    let near_degenerate = !det.is_zero() && det.as_f64().abs() < tol;
    let strict = q.inertia(0.0);
    let nearest_nondegenerate = strict
        .is_nondegenerate()
        .then(|| AlgebraClass::from_signature(strict));
    Classification {
        class,
        sig_q,
        sig_full_predicted: predicted_q_signature(sig_q),
        near_degenerate,
        nearest_nondegenerate,
    }
}

/// JSON-ready classification report.
#[derive(Clone, Debug, Serialize)]
pub struct ClassificationReport {
    pub params: serde_json::Value,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<serde_json::Value>>,
    #[serde(rename = "Qtilde")]
    pub qtilde: Vec<Vec<serde_json::Value>>,
    #[serde(rename = "detQ")]
    pub det_q: serde_json::Value,
    #[serde(rename = "sigQ")]
    pub sig_q: Signature,
    pub sigq_predicted: Option<Signature>,
    pub sigq_measured: Signature,
    pub class: AlgebraClass,
    pub quaternionic: bool,
    pub near_degenerate: bool,
    pub nearest_nondegenerate: Option<AlgebraClass>,
}

fn json_rows<S: Scalar>(m: &Mat<S>) -> Vec<Vec<serde_json::Value>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(Scalar::to_json).collect())
        .collect()
}

pub fn classification_report<S: Scalar>(table: &StructureTable<S>, tol: f64) -> ClassificationReport {
    let p = table.params();
    let c = classify(p, tol);
    let measured = table.trace_form_q().inertia(tol);
    ClassificationReport {
        params: serde_json::to_value(p).expect("params serialise"),
        q: json_rows(&form_q(p)),
        qtilde: json_rows(&form_qtilde(p)),
        det_q: p.det_q().to_json(),
        sig_q: c.sig_q,
        sigq_predicted: c.sig_full_predicted,
        sigq_measured: measured,
        class: c.class,
        quaternionic: c.class.is_quaternionic(),
        near_degenerate: c.near_degenerate,
        nearest_nondegenerate: c.nearest_nondegenerate,
    }
}

/// Whether the trace form leaves room for a quaternion subalgebra: its imaginary units
/// span a 3-dimensional `q`-negative subspace.
pub fn q_admits_quaternions(sig_full: Signature) -> bool {
    sig_full.negative >= 3
}

/// A pair of anticommuting elements squaring to `−1`, generating a quaternion subalgebra.
///
/// Uses `e1` together with `(αe1 + e2)/√(1−α²)` when `|α| < 1`, and otherwise a
/// `q`-negative unit of the plane `⟨α − e1e2, γ − e3e1⟩`.
pub fn quaternion_pair(
    table: &StructureTable<f64>,
    tol: f64,
) -> Result<(HElement<f64>, HElement<f64>)> {
    let p = table.params();
    let e1 = table.basis(Basis::E1);
    if p.alpha.abs() < 1.0 - tol {
        let s = (1.0 - p.alpha * p.alpha).sqrt();
        let u = &e1.scale(&p.alpha) + &table.basis(Basis::E2);
        return Ok((e1, u.scale(&(1.0 / s))));
    }
    let [_, f2, f3] = table.vtilde_basis();
    let off = -(p.alpha * p.gamma + p.beta);
    let gram = nalgebra::Matrix2::new(p.alpha * p.alpha - 1.0, off, off, p.gamma * p.gamma - 1.0);
    let eig = gram.symmetric_eigen();
    let (idx, lambda) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("two eigenvalues");
    if lambda >= -tol {
        return Err(Error::WrongClass(format!(
            "no q-negative direction in ⟨α − e1e2, γ − e3e1⟩ at ({}, {}, {})",
            p.alpha, p.beta, p.gamma
        )));
    }
    let v = eig.eigenvectors.column(idx);
    let u = &f3.scale(&v[0]) + &f2.scale(&v[1]);
    Ok((e1, u.scale(&(1.0 / (-lambda).sqrt()))))
}

/// Cofactor adjugate of a 3×3 matrix, used as an independent oracle for `Q̃`.
pub fn adjugate3<S: Scalar>(m: &Mat<S>) -> Mat<S> {
    assert_eq!((m.rows(), m.cols()), (3, 3));
    let minor = |r: usize, c: usize| {
        let rs: Vec<usize> = (0..3).filter(|&i| i != r).collect();
        let cs: Vec<usize> = (0..3).filter(|&j| j != c).collect();
        m[(rs[0], cs[0])].clone() * m[(rs[1], cs[1])].clone()
            - m[(rs[0], cs[1])].clone() * m[(rs[1], cs[0])].clone()
    };
    Mat::from_fn(3, 3, |i, j| {
        let v = minor(j, i);
        if (i + j) % 2 == 0 {
            v
        } else {
            -v
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use proptest::prelude::*;

    fn qp(a: i64, b: i64, c: i64) -> AlgebraParams<Rational> {
        AlgebraParams::new(
            Rational::from_ratio(a, 1),
            Rational::from_ratio(b, 1),
            Rational::from_ratio(c, 1),
        )
    }

    fn fp(a: f64, b: f64, c: f64) -> AlgebraParams<f64> {
        AlgebraParams::new(a, b, c)
    }

    #[test]
    fn form_q_examples() {
        assert_eq!(form_q(&qp(0, 0, 0)), Mat::identity(3).neg());
        assert_eq!(form_q(&qp(1, 1, -1)).rank(0.0), 1);
        let p = qp(2, -1, 3);
        assert_eq!(form_q(&p).det(), p.det_q());
    }

    #[test]
    fn form_qtilde_examples() {
        assert_eq!(form_qtilde(&qp(0, 0, 0)), Mat::identity(3).neg());
        let p = qp(2, -1, 3);
        let prod = form_qtilde(&p).mul(&form_q(&p));
        assert_eq!(prod, Mat::identity(3).scale(&-p.det_q()));
        for (a, c) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let p = qp(a, -a * c, c);
            assert!(form_qtilde(&p).is_zero(0.0));
        }
    }

    #[test]
    fn signature_examples() {
        let id: Mat<f64> = Mat::identity(3).neg();
        assert_eq!(signature(&id, 1e-9).unwrap(), Signature::new(0, 3, 0));
        assert_eq!(
            signature(&form_q(&fp(0.0, 0.0, 1.0)), 1e-9).unwrap(),
            Signature::new(0, 2, 1)
        );
        assert_eq!(
            signature(&form_q(&fp(-2.0, -2.0, -2.0)), 1e-9).unwrap(),
            Signature::new(2, 1, 0)
        );
        let asym = Mat::from_rows(vec![vec![0.0, 1.0], vec![0.0, 0.0]]);
        assert!(signature(&asym, 1e-9).is_err());
    }

    #[test]
    fn classify_examples() {
        let c = classify(&qp(0, 0, 0), 0.0);
        assert_eq!(c.class, AlgebraClass::Spherical);
        assert_eq!(c.sig_full_predicted, Some(Signature::new(2, 6, 0)));
        assert_eq!(classify(&qp(2, 2, 2), 0.0).class, AlgebraClass::Hyperbolic);
        assert_eq!(classify(&qp(0, 0, 1), 0.0).class, AlgebraClass::Cylindrical);
        assert_eq!(
            classify(&qp(1, 1, -1), 0.0).class,
            AlgebraClass::NonQuaternionic(Signature::new(0, 1, 2))
        );
    }

    #[test]
    fn near_degenerate_flag() {
        let c = classify(&fp(0.0, 0.0, 1.0 - 1e-12), 1e-9);
        assert_eq!(c.class, AlgebraClass::Cylindrical);
        assert!(c.near_degenerate);
        assert_eq!(c.nearest_nondegenerate, Some(AlgebraClass::Spherical));
        // eigenvalues {−1, ε, −2−ε}
        let c = classify(&fp(0.0, 0.0, 1.0 + 1e-12), 1e-9);
        assert_eq!(c.nearest_nondegenerate, Some(AlgebraClass::Hyperbolic));
    }

    #[test]
    fn quaternion_pairs_generate_quaternions() {
        for p in [fp(0.3, -0.2, 0.5), fp(2.0, 2.0, 2.0), fp(1.0, 0.0, 0.0), fp(-1.5, 0.4, 3.0), fp(0.0, 0.0, 1.0)] {
            let class = classify(&p, 1e-9).class;
            assert!(class.is_quaternionic(), "{class}");
            let t = StructureTable::new(p);
            let (u, v) = quaternion_pair(&t, 1e-9).unwrap();
            let minus_one = t.scalar(-1.0);
            assert!((&t.square(&u) - &minus_one).is_zero(1e-12));
            assert!((&t.square(&v) - &minus_one).is_zero(1e-12));
            assert!(t.anticommutator(&u, &v).is_zero(1e-12));
        }
    }

    proptest! {
        #[test]
        fn qtilde_is_minus_adjugate(a in -30i64..=30, b in -30i64..=30, c in -30i64..=30, d in 1i64..=10) {
            let p = AlgebraParams::new(
                Rational::from_ratio(a, d),
                Rational::from_ratio(b, d),
                Rational::from_ratio(c, d),
            );
            prop_assert_eq!(form_qtilde(&p), adjugate3(&form_q(&p)).neg());
        }

        #[test]
        fn signature_in_admissible_list(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
            let p = fp(a, b, c);
            let c = classify(&p, 1e-9);
            prop_assert!(ADMISSIBLE_Q_SIGNATURES.contains(&c.sig_q));
            let measured = StructureTable::new(p).trace_form_q().inertia(1e-9);
            prop_assert_eq!(Some(measured), c.sig_full_predicted);
        }

        #[test]
        fn quaternionic_class_matches_q_room(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0) {
            let p = fp(a, b, c);
            let class = classify(&p, 1e-9).class;
            let full = StructureTable::new(p).trace_form_q().inertia(1e-9);
            prop_assert_eq!(class.is_quaternionic(), q_admits_quaternions(full));
        }
    }
}
