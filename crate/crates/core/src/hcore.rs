//! The eight-dimensional algebra on three imaginary units `e1, e2, e3` with
//! `e1e2 + e2e1 = 2α`, `e2e3 + e3e2 = 2β`, `e1e3 + e3e1 = 2γ`.
//!
//! Elements are coordinate vectors in the fixed monomial basis
//! `1, e1, e2, e3, e1e2, e2e3, e3e1, e1e2e3`.

use std::collections::hash_map::DefaultHasher;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scalar::{Rational, Scalar};

/// Index into the monomial basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Basis(u8);

impl Basis {
    pub const ONE: Basis = Basis(0);
    pub const E1: Basis = Basis(1);
    pub const E2: Basis = Basis(2);
    pub const E3: Basis = Basis(3);
    pub const E12: Basis = Basis(4);
    pub const E23: Basis = Basis(5);
    pub const E31: Basis = Basis(6);
    pub const E123: Basis = Basis(7);

    pub const ALL: [Basis; 8] = [
        Basis::ONE,
        Basis::E1,
        Basis::E2,
        Basis::E3,
        Basis::E12,
        Basis::E23,
        Basis::E31,
        Basis::E123,
    ];

    pub fn new(index: usize) -> Option<Self> {
        (index < 8).then_some(Basis(index as u8))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The monomial as a word in the generators `1, 2, 3`.
    pub fn word(self) -> &'static [u8] {
        const WORDS: [&[u8]; 8] = [&[], &[1], &[2], &[3], &[1, 2], &[2, 3], &[3, 1], &[1, 2, 3]];
        WORDS[self.index()]
    }

    pub fn label(self) -> &'static str {
        const LABELS: [&str; 8] = ["1", "e1", "e2", "e3", "e1e2", "e2e3", "e3e1", "e1e2e3"];
        LABELS[self.index()]
    }
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// The structure constants `(α, β, γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraParams<S> {
    pub alpha: S,
    pub beta: S,
    pub gamma: S,
}

impl<S: Scalar> AlgebraParams<S> {
    pub fn new(alpha: S, beta: S, gamma: S) -> Self {
        Self { alpha, beta, gamma }
    }

    pub fn to_f64(&self) -> AlgebraParams<f64> {
        AlgebraParams::new(self.alpha.as_f64(), self.beta.as_f64(), self.gamma.as_f64())
    }

    pub fn as_array(&self) -> [S; 3] {
        [self.alpha.clone(), self.beta.clone(), self.gamma.clone()]
    }

    /// Anticommutator scalar of generators `i < j` (1-based).
    fn anticommutator(&self, i: u8, j: u8) -> &S {
        match (i.min(j), i.max(j)) {
            (1, 2) => &self.alpha,
            (2, 3) => &self.beta,
            (1, 3) => &self.gamma,
            _ => unreachable!("anticommutator of distinct generators only"),
        }
    }

    /// `α² + β² + γ² + 2αβγ − 1`.
    pub fn det_q(&self) -> S {
        let (a, b, c) = (&self.alpha, &self.beta, &self.gamma);
        let two = S::one() + S::one();
        a.clone() * a.clone() + b.clone() * b.clone() + c.clone() * c.clone()
            + two * a.clone() * b.clone() * c.clone()
            - S::one()
    }

    fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        S::MODE.hash(&mut h);
        for v in [&self.alpha, &self.beta, &self.gamma] {
            v.canonical_string().hash(&mut h);
        }
        h.finish()
    }
}

impl AlgebraParams<f64> {
    pub fn is_finite(&self) -> bool {
        self.alpha.is_finite() && self.beta.is_finite() && self.gamma.is_finite()
    }
}

impl<S: Scalar> Serialize for AlgebraParams<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        use serde::ser::SerializeStruct;
        let mut st = serializer.serialize_struct("AlgebraParams", 3)?;
        st.serialize_field("alpha", &self.alpha.to_json())?;
        st.serialize_field("beta", &self.beta.to_json())?;
        st.serialize_field("gamma", &self.gamma.to_json())?;
        st.end()
    }
}

/// Element of the algebra in monomial coordinates.
///
/// Elements produced by a [`StructureTable`] remember which parameters they belong to;
/// multiplying elements of different algebras is rejected.
#[derive(Clone, Debug)]
pub struct HElement<S> {
    coords: [S; 8],
    tag: Option<u64>,
}

impl<S: Scalar> PartialEq for HElement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.coords == other.coords
    }
}

impl<S: Scalar> HElement<S> {
    pub fn from_coords(coords: [S; 8]) -> Self {
        Self { coords, tag: None }
    }

    pub fn from_slice(coords: &[S]) -> Result<Self> {
        if coords.len() != 8 {
            return Err(Error::Invalid(format!(
                "an element needs 8 coordinates, got {}",
                coords.len()
            )));
        }
        Ok(Self::from_coords(std::array::from_fn(|i| coords[i].clone())))
    }

    pub fn zero() -> Self {
        Self::from_coords(std::array::from_fn(|_| S::zero()))
    }

    pub fn one() -> Self {
        Self::basis(Basis::ONE)
    }

    pub fn basis(b: Basis) -> Self {
        let mut e = Self::zero();
        e.coords[b.index()] = S::one();
        e
    }

    pub fn scalar(s: S) -> Self {
        let mut e = Self::zero();
        e.coords[0] = s;
        e
    }

    /// Linear combination `Σ cᵢ·bᵢ`.
    pub fn combination(terms: &[(S, Basis)]) -> Self {
        let mut e = Self::zero();
        for (c, b) in terms {
            e.coords[b.index()] = e.coords[b.index()].clone() + c.clone();
        }
        e
    }

    pub fn coords(&self) -> &[S; 8] {
        &self.coords
    }

    pub fn coord(&self, b: Basis) -> &S {
        &self.coords[b.index()]
    }

    pub fn scale(&self, s: &S) -> Self {
        Self {
            coords: std::array::from_fn(|i| self.coords[i].clone() * s.clone()),
            tag: self.tag,
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coords.iter().all(|c| c.is_negligible(tol))
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().map(|c| c.as_f64().abs()).fold(0.0, f64::max)
    }

    pub fn to_f64(&self) -> HElement<f64> {
        HElement::from_coords(std::array::from_fn(|i| self.coords[i].as_f64()))
    }

    pub fn to_vec(&self) -> Vec<S> {
        self.coords.to_vec()
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Parse("an element must be a JSON array".into()))?;
        let coords = arr.iter().map(S::from_json).collect::<Result<Vec<_>>>()?;
        Self::from_slice(&coords)
    }
}

impl<S: Scalar> Serialize for HElement<S> {
    fn serialize<Z: Serializer>(&self, serializer: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut seq = serializer.serialize_seq(Some(8))?;
        for c in &self.coords {
            seq.serialize_element(&c.to_json())?;
        }
        seq.end()
    }
}

impl<S: Scalar> fmt::Display for HElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for b in Basis::ALL {
            let c = &self.coords[b.index()];
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if b == Basis::ONE {
                write!(f, "{}", c.canonical_string())?;
            } else {
                write!(f, "{}·{}", c.canonical_string(), b)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl<S: Scalar> Add for &HElement<S> {
    type Output = HElement<S>;

    fn add(self, rhs: Self) -> HElement<S> {
        HElement {
            coords: std::array::from_fn(|i| self.coords[i].clone() + rhs.coords[i].clone()),
            tag: self.tag.or(rhs.tag),
        }
    }
}

impl<S: Scalar> Sub for &HElement<S> {
    type Output = HElement<S>;

    fn sub(self, rhs: Self) -> HElement<S> {
        HElement {
            coords: std::array::from_fn(|i| self.coords[i].clone() - rhs.coords[i].clone()),
            tag: self.tag.or(rhs.tag),
        }
    }
}

impl<S: Scalar> Neg for &HElement<S> {
    type Output = HElement<S>;

    fn neg(self) -> HElement<S> {
        HElement {
            coords: std::array::from_fn(|i| -self.coords[i].clone()),
            tag: self.tag,
        }
    }
}

/// Multiplication table of the algebra for fixed parameters.
#[derive(Clone, Debug)]
pub struct StructureTable<S> {
    params: AlgebraParams<S>,
    /// `products[8*i + j]` holds the nonzero coordinates of `bᵢ·bⱼ`.
    products: Vec<Vec<(usize, S)>>,
    /// `Tr L(bᵢ)`.
    traces: [S; 8],
    tag: u64,
}

/// Rewrites `coeff · word` into normal order (strictly increasing generator indices) and
/// accumulates the result, with `e1e3` still unconverted, into `out` keyed by word.
fn reduce_word<S: Scalar>(
    params: &AlgebraParams<S>,
    word: Vec<u8>,
    coeff: S,
    out: &mut Vec<(Vec<u8>, S)>,
) {
    if coeff.is_zero() {
        return;
    }
    let Some(p) = word.windows(2).position(|w| w[0] >= w[1]) else {
        match out.iter_mut().find(|(w, _)| *w == word) {
            Some((_, c)) => *c = c.clone() + coeff,
            None => out.push((word, coeff)),
        }
        return;
    };
    let (x, y) = (word[p], word[p + 1]);
    let mut shorter = word.clone();
    shorter.drain(p..p + 2);
    if x == y {
        reduce_word(params, shorter, -coeff, out);
    } else {
        let mut swapped = word;
        swapped.swap(p, p + 1);
        let two = S::one() + S::one();
        let scalar = two * params.anticommutator(x, y).clone() * coeff.clone();
        reduce_word(params, swapped, -coeff, out);
        reduce_word(params, shorter, scalar, out);
    }
}

fn normal_word_to_coords<S: Scalar>(params: &AlgebraParams<S>, terms: Vec<(Vec<u8>, S)>) -> [S; 8] {
    let mut coords: [S; 8] = std::array::from_fn(|_| S::zero());
    let mut bump = |b: Basis, v: S| coords[b.index()] = coords[b.index()].clone() + v;
    for (word, c) in terms {
        match word.as_slice() {
            [] => bump(Basis::ONE, c),
            [1] => bump(Basis::E1, c),
            [2] => bump(Basis::E2, c),
            [3] => bump(Basis::E3, c),
            [1, 2] => bump(Basis::E12, c),
            [2, 3] => bump(Basis::E23, c),
            [1, 3] => {
                // e1e3 = 2γ − e3e1
                let two = S::one() + S::one();
                bump(Basis::ONE, two * params.gamma.clone() * c.clone());
                bump(Basis::E31, -c);
            }
            [1, 2, 3] => bump(Basis::E123, c),
            other => unreachable!("normal-ordered word {other:?} outside the basis"),
        }
    }
    coords
}

impl<S: Scalar> StructureTable<S> {
    /// Builds the table by normal-order reduction of every product of basis words.
    pub fn new(params: AlgebraParams<S>) -> Self {
        let mut products: Vec<Vec<(usize, S)>> = Vec::with_capacity(64);
        for bi in Basis::ALL {
            for bj in Basis::ALL {
                let mut word = bi.word().to_vec();
                word.extend_from_slice(bj.word());
                let mut terms = Vec::new();
                reduce_word(&params, word, S::one(), &mut terms);
                let coords = normal_word_to_coords(&params, terms);
                products.push(
                    coords
                        .into_iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .collect(),
                );
            }
        }
        let traces: [S; 8] = std::array::from_fn(|i| {
            let mut t = S::zero();
            for j in 0..8 {
                if let Some((_, c)) = products[8 * i + j].iter().find(|(k, _)| *k == j) {
                    t += c;
                }
            }
            t
        });
        let tag = params.fingerprint();
        Self {
            params,
            products,
            traces,
            tag,
        }
    }

    pub fn params(&self) -> &AlgebraParams<S> {
        &self.params
    }

    fn own(&self, mut e: HElement<S>) -> HElement<S> {
        e.tag = Some(self.tag);
        e
    }

    /// Basis element owned by this table.
    pub fn basis(&self, b: Basis) -> HElement<S> {
        self.own(HElement::basis(b))
    }

    pub fn element(&self, coords: [S; 8]) -> HElement<S> {
        self.own(HElement::from_coords(coords))
    }

    pub fn one(&self) -> HElement<S> {
        self.basis(Basis::ONE)
    }

    pub fn scalar(&self, s: S) -> HElement<S> {
        self.own(HElement::scalar(s))
    }

    /// `bᵢ·bⱼ` as an element.
    pub fn basis_product(&self, i: Basis, j: Basis) -> HElement<S> {
        let mut e = HElement::zero();
        for (k, c) in &self.products[8 * i.index() + j.index()] {
            e.coords[*k] = c.clone();
        }
        self.own(e)
    }

    fn check_tag(&self, e: &HElement<S>) -> Result<()> {
        match e.tag {
            Some(t) if t != self.tag => Err(Error::MixedParams),
            _ => Ok(()),
        }
    }

    /// Product `a·b`; rejects elements created by a table with other parameters.
    pub fn multiply(&self, a: &HElement<S>, b: &HElement<S>) -> Result<HElement<S>> {
        self.check_tag(a)?;
        self.check_tag(b)?;
        Ok(self.mul(a, b))
    }

    /// Product without the parameter check.
    pub fn mul(&self, a: &HElement<S>, b: &HElement<S>) -> HElement<S> {
        let mut out: [S; 8] = std::array::from_fn(|_| S::zero());
        for (i, ai) in a.coords.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coords.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let mut w = ai.clone();
                w *= bj;
                for (k, c) in &self.products[8 * i + j] {
                    let mut term = w.clone();
                    term *= c;
                    out[*k] += &term;
                }
            }
        }
        self.own(HElement::from_coords(out))
    }

    /// First basis triple with `(ab)c ≠ a(bc)`.
    pub fn associativity_failure(&self, tol: f64) -> Option<(Basis, Basis, Basis)> {
        for &a in &Basis::ALL {
            for &b in &Basis::ALL {
                let ab = self.basis_product(a, b);
                for &c in &Basis::ALL {
                    let left = self.mul(&ab, &self.basis(c));
                    let right = self.mul(&self.basis(a), &self.basis_product(b, c));
                    if !(&left - &right).is_zero(tol) {
                        return Some((a, b, c));
                    }
                }
            }
        }
        None
    }

    pub fn square(&self, a: &HElement<S>) -> HElement<S> {
        self.mul(a, a)
    }

    /// `ab − ba`.
    pub fn commutator(&self, a: &HElement<S>, b: &HElement<S>) -> HElement<S> {
        &self.mul(a, b) - &self.mul(b, a)
    }

    /// `ab + ba`.
    pub fn anticommutator(&self, a: &HElement<S>, b: &HElement<S>) -> HElement<S> {
        &self.mul(a, b) + &self.mul(b, a)
    }

    /// `Tr L(a)`.
    pub fn trace(&self, a: &HElement<S>) -> S {
        a.coords
            .iter()
            .zip(&self.traces)
            .fold(S::zero(), |acc, (x, t)| acc + x.clone() * t.clone())
    }

    /// Matrix of left multiplication by `a` in the monomial basis.
    pub fn regular_rep(&self, a: &HElement<S>) -> Mat<S> {
        let cols: Vec<Vec<S>> = Basis::ALL
            .iter()
            .map(|&b| self.mul(a, &HElement::basis(b)).to_vec())
            .collect();
        Mat::from_columns(&cols)
    }

    /// Matrix of right multiplication by `a`.
    pub fn right_rep(&self, a: &HElement<S>) -> Mat<S> {
        let cols: Vec<Vec<S>> = Basis::ALL
            .iter()
            .map(|&b| self.mul(&HElement::basis(b), a).to_vec())
            .collect();
        Mat::from_columns(&cols)
    }

    /// Gram matrix of `q(u, v) = Tr(L_{uv}) / 8` in the monomial basis.
    pub fn trace_form_q(&self) -> Mat<S> {
        let traces = &self.traces;
        let eight = S::from_ratio(8, 1);
        Mat::from_fn(8, 8, |i, j| {
            let s = self.products[8 * i + j]
                .iter()
                .fold(S::zero(), |acc, (k, c)| acc + c.clone() * traces[*k].clone());
            s / eight.clone()
        })
    }

    /// `q(u, v)` for two elements.
    pub fn q(&self, u: &HElement<S>, v: &HElement<S>) -> S {
        let uv = self.mul(u, v);
        self.trace(&uv) / S::from_ratio(8, 1)
    }

    /// Raw and normalised central element `c = βe1 − γe2 + αe3 − e1e2e3`.
    pub fn central_element(&self) -> CentralElement<S> {
        let p = &self.params;
        let raw = self.element([
            S::zero(),
            p.beta.clone(),
            -p.gamma.clone(),
            p.alpha.clone(),
            S::zero(),
            S::zero(),
            S::zero(),
            -S::one(),
        ]);
        let det = p.det_q();
        let epsilon = if det.is_zero() {
            0
        } else if det.is_negative() {
            1
        } else {
            -1
        };
        let normalized = if det.is_zero() {
            Some(raw.clone())
        } else {
            det.abs()
                .try_sqrt()
                .map(|r| raw.scale(&(S::one() / r)))
        };
        CentralElement {
            raw,
            normalized,
            epsilon,
            det_q: det,
        }
    }

    /// Basis of the centre, computed as the joint kernel of `ad(e1), ad(e2), ad(e3)`.
    pub fn center_basis(&self, tol: f64) -> Vec<HElement<S>> {
        let mut stacked = Mat::zeros(24, 8);
        for (g, b) in [Basis::E1, Basis::E2, Basis::E3].into_iter().enumerate() {
            let e = HElement::basis(b);
            let ad = self.regular_rep(&e).sub(&self.right_rep(&e));
            for i in 0..8 {
                for j in 0..8 {
                    stacked[(8 * g + i, j)] = ad[(i, j)].clone();
                }
            }
        }
        stacked
            .nullspace(tol)
            .into_iter()
            .map(|v| self.own(HElement::from_slice(&v).expect("nullspace vectors have 8 entries")))
            .collect()
    }

    /// The generators `β − e2e3, γ − e3e1, α − e1e2` of `Ṽ`.
    pub fn vtilde_basis(&self) -> [HElement<S>; 3] {
        let p = &self.params;
        let mk = |s: &S, b: Basis| {
            self.element(std::array::from_fn(|i| {
                if i == 0 {
                    s.clone()
                } else if i == b.index() {
                    -S::one()
                } else {
                    S::zero()
                }
            }))
        };
        [mk(&p.beta, Basis::E23), mk(&p.gamma, Basis::E31), mk(&p.alpha, Basis::E12)]
    }

    pub fn v_basis(&self) -> [HElement<S>; 3] {
        [self.basis(Basis::E1), self.basis(Basis::E2), self.basis(Basis::E3)]
    }

    /// Projectors onto `ℝ1 ⊕ V ⊕ Ṽ ⊕ ℝc` and the structural checks on that splitting.
    pub fn canonical_decomposition(&self, tol: f64) -> CanonicalDecomposition<S> {
        let c = self.central_element().raw;
        let mut columns = vec![self.one().to_vec()];
        columns.extend(self.v_basis().iter().map(HElement::to_vec));
        columns.extend(self.vtilde_basis().iter().map(HElement::to_vec));
        columns.push(c.to_vec());
        let basis = Mat::from_columns(&columns);
        let span_dim = basis.rank(tol);
        let blocks: [std::ops::Range<usize>; 4] = [0..1, 1..4, 4..7, 7..8];
        let inverse = basis.inverse(tol);
        CanonicalDecomposition {
            basis,
            span_dim,
            inverse,
            blocks,
        }
    }
}

impl StructureTable<Rational> {
    pub fn to_f64(&self) -> StructureTable<f64> {
        StructureTable::new(self.params.to_f64())
    }

    /// Exact associativity on all basis triples. The structure constants are brought to a
    /// common denominator and compared in `i128`; on overflow the rational check runs.
    pub fn exact_associativity_failure(&self) -> Option<(Basis, Basis, Basis)> {
        match self.scaled_constants() {
            Some(n) => scaled_associativity_failure(&n).unwrap_or_else(|| self.associativity_failure(0.0)),
            None => self.associativity_failure(0.0),
        }
    }

    fn scaled_constants(&self) -> Option<Vec<[i128; 8]>> {
        let mut lcm = BigInt::one();
        for prod in &self.products {
            for (_, c) in prod {
                lcm = lcm.lcm(&c.denom());
            }
        }
        self.products
            .iter()
            .map(|prod| {
                let mut row = [0i128; 8];
                for (k, c) in prod {
                    let scaled = c.to_big() * BigInt::clone(&lcm);
                    row[*k] = scaled.to_integer().to_i128()?;
                }
                Some(row)
            })
            .collect()
    }
}

/// `None` when some sum overflows.
fn scaled_associativity_failure(n: &[[i128; 8]]) -> Option<Option<(Basis, Basis, Basis)>> {
    let side = |left: &[i128; 8], right_of: &dyn Fn(usize) -> usize| -> Option<[i128; 8]> {
        let mut out = [0i128; 8];
        for (k, &lk) in left.iter().enumerate() {
            if lk == 0 {
                continue;
            }
            let row = &n[right_of(k)];
            for j in 0..8 {
                out[j] = out[j].checked_add(lk.checked_mul(row[j])?)?;
            }
        }
        Some(out)
    };
    for a in 0..8 {
        for b in 0..8 {
            for c in 0..8 {
                let left = side(&n[8 * a + b], &|k| 8 * k + c)?;
                let right = side(&n[8 * b + c], &|k| 8 * a + k)?;
                if left != right {
                    return Some(Some((Basis::ALL[a], Basis::ALL[b], Basis::ALL[c])));
                }
            }
        }
    }
    Some(None)
}

/// Output of [`StructureTable::central_element`].
#[derive(Clone, Debug)]
pub struct CentralElement<S> {
    pub raw: HElement<S>,
    /// `raw / √|det Q|`; `raw` itself when `det Q = 0`; `None` when the square root is not
    /// representable in the backend.
    pub normalized: Option<HElement<S>>,
    /// Sign of `−det Q`, i.e. `normalized² = ε`.
    pub epsilon: i8,
    pub det_q: S,
}

impl<S: Scalar> CentralElement<S> {
    /// Normalised element in floating point, always available.
    pub fn normalized_f64(&self) -> HElement<f64> {
        match &self.normalized {
            Some(n) => n.to_f64(),
            None => {
                let r = self.det_q.as_f64().abs().sqrt();
                self.raw.to_f64().scale(&(1.0 / r))
            }
        }
    }
}

/// Splitting of the algebra into `ℝ1`, `V`, `Ṽ` and `ℝc`.
#[derive(Clone, Debug)]
pub struct CanonicalDecomposition<S> {
    /// Columns `1, e1, e2, e3, β−e2e3, γ−e3e1, α−e1e2, c`.
    pub basis: Mat<S>,
    /// Dimension of the span of the four subspaces.
    pub span_dim: usize,
    inverse: Option<Mat<S>>,
    blocks: [std::ops::Range<usize>; 4],
}

/// Which summand of the canonical decomposition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Summand {
    Scalars,
    V,
    VTilde,
    Center,
}

impl Summand {
    pub const ALL: [Summand; 4] = [Summand::Scalars, Summand::V, Summand::VTilde, Summand::Center];

    fn index(self) -> usize {
        match self {
            Summand::Scalars => 0,
            Summand::V => 1,
            Summand::VTilde => 2,
            Summand::Center => 3,
        }
    }
}

impl<S: Scalar> CanonicalDecomposition<S> {
    pub fn spans(&self) -> bool {
        self.span_dim == 8
    }

    pub fn summand_basis(&self, s: Summand) -> Vec<HElement<S>> {
        self.blocks[s.index()]
            .clone()
            .map(|j| HElement::from_slice(&self.basis.column(j)).expect("8 rows"))
            .collect()
    }

    /// Coordinates of `x` in the basis `1, e1, e2, e3, β−e2e3, γ−e3e1, α−e1e2, c`.
    pub fn coordinates(&self, x: &HElement<S>) -> Option<Vec<S>> {
        Some(self.inverse.as_ref()?.mul_vec(x.coords()))
    }

    /// Projector onto one summand; `None` when the subspaces do not span.
    pub fn projector(&self, s: Summand) -> Option<Mat<S>> {
        let inv = self.inverse.as_ref()?;
        let r = &self.blocks[s.index()];
        let sel = Mat::from_fn(8, 8, |i, j| if i == j && r.contains(&i) { S::one() } else { S::zero() });
        Some(self.basis.mul(&sel).mul(inv))
    }

    pub fn project(&self, s: Summand, x: &HElement<S>) -> Option<HElement<S>> {
        let r = &self.blocks[s.index()];
        let coords: Vec<S> = self
            .coordinates(x)?
            .into_iter()
            .enumerate()
            .map(|(i, v)| if r.contains(&i) { v } else { S::zero() })
            .collect();
        Some(HElement::from_slice(&self.basis.mul_vec(&coords)).expect("8 rows"))
    }

    pub fn lies_in(&self, s: Summand, x: &HElement<S>, tol: f64) -> bool {
        let r = &self.blocks[s.index()];
        match self.coordinates(x) {
            Some(coords) => coords
                .iter()
                .enumerate()
                .all(|(i, v)| r.contains(&i) || v.is_negligible(tol)),
            None => false,
        }
    }

    /// The projectors sum to the identity and are mutually annihilating idempotents.
    pub fn projectors_consistent(&self, tol: f64) -> bool {
        let Some(p) = Summand::ALL.iter().map(|&s| self.projector(s)).collect::<Option<Vec<_>>>() else {
            return false;
        };
        let id = Mat::<S>::identity(8);
        let sum = p.iter().skip(1).fold(p[0].clone(), |acc, m| acc.add(m));
        if !sum.sub(&id).is_zero(tol) {
            return false;
        }
        for (i, pi) in p.iter().enumerate() {
            for (j, pj) in p.iter().enumerate() {
                let prod = pi.mul(pj);
                let expected = if i == j { pi.clone() } else { Mat::zeros(8, 8) };
                if !prod.sub(&expected).is_zero(tol) {
                    return false;
                }
            }
        }
        true
    }

    /// `q(x, y) = 0` for basis vectors of different summands.
    pub fn q_orthogonal(&self, table: &StructureTable<S>, tol: f64) -> bool {
        let g = table.trace_form_q();
        let gram = self.basis.transpose().mul(&g).mul(&self.basis);
        let block_of = |i: usize| self.blocks.iter().position(|r| r.contains(&i)).unwrap();
        (0..8).all(|i| (0..8).all(|j| block_of(i) == block_of(j) || gram[(i, j)].is_negligible(tol)))
    }

    /// `c·V ⊆ Ṽ` and `c·Ṽ ⊆ V`, together with the ranks of `c·V` and `c·Ṽ`.
    pub fn center_inclusions(&self, table: &StructureTable<S>, tol: f64) -> InclusionReport {
        let c = table.central_element().raw;
        let image = |from: Summand, to: Summand| {
            let imgs: Vec<HElement<S>> = self
                .summand_basis(from)
                .iter()
                .map(|v| table.mul(&c, v))
                .collect();
            let contained = imgs.iter().all(|x| self.lies_in(to, x, tol));
            let cols: Vec<Vec<S>> = imgs.iter().map(HElement::to_vec).collect();
            (contained, Mat::from_columns(&cols).rank(tol))
        };
        let (cv_in_vt, cv_rank) = image(Summand::V, Summand::VTilde);
        let (cvt_in_v, cvt_rank) = image(Summand::VTilde, Summand::V);
        InclusionReport {
            cv_in_vtilde: cv_in_vt,
            cvtilde_in_v: cvt_in_v,
            cv_rank,
            cvtilde_rank: cvt_rank,
        }
    }

    /// The symmetrised product `(xy + yx)/2` of any two vectors of `V ⊕ Ṽ` lies in
    /// `⟨1, c⟩`; checked on all basis pairs, which covers the whole square map by
    /// bilinearity.
    pub fn square_map_range_ok(&self, table: &StructureTable<S>, tol: f64) -> bool {
        let mut vs = self.summand_basis(Summand::V);
        vs.extend(self.summand_basis(Summand::VTilde));
        for x in &vs {
            for y in &vs {
                let s = table.anticommutator(x, y);
                let Some(p0) = self.project(Summand::Scalars, &s) else {
                    return false;
                };
                let Some(p3) = self.project(Summand::Center, &s) else {
                    return false;
                };
                if !(&(&s - &p0) - &p3).is_zero(tol) {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct InclusionReport {
    pub cv_in_vtilde: bool,
    pub cvtilde_in_v: bool,
    pub cv_rank: usize,
    pub cvtilde_rank: usize,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::from_ratio(p, d)
    }

    fn table(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> StructureTable<Rational> {
        StructureTable::new(AlgebraParams::new(q(a.0, a.1), q(b.0, b.1), q(c.0, c.1)))
    }

    fn rational_triple() -> impl Strategy<Value = (i64, i64, i64, i64, i64, i64)> {
        (-30i64..=30, 1i64..=10, -30i64..=30, 1i64..=10, -30i64..=30, 1i64..=10)
            .prop_map(|(a, da, b, db, c, dc)| (a, da, b, db, c, dc))
    }

    #[test]
    fn e1_e2_products() {
        let t = table((1, 3), (2, 5), (-1, 2));
        assert_eq!(t.basis_product(Basis::E1, Basis::E2), t.basis(Basis::E12));
        let e21 = t.basis_product(Basis::E2, Basis::E1);
        let expected = HElement::combination(&[(q(2, 3), Basis::ONE), (q(-1, 1), Basis::E12)]);
        assert_eq!(e21, expected);
    }

    #[test]
    fn triple_product_square() {
        let (a, b, c) = (q(1, 3), q(-2, 5), q(3, 2));
        let t = StructureTable::new(AlgebraParams::new(a.clone(), b.clone(), c.clone()));
        let w = t.basis(Basis::E123);
        let sq = t.square(&w);
        // 1 − 2α e1e2 − 2β e2e3 − (2γ + 4αβ) e1e3 with e1e3 = 2γ − e3e1
        let k = q(2, 1) * c.clone() + q(4, 1) * a.clone() * b.clone();
        let expected = HElement::combination(&[
            (q(1, 1) - k.clone() * q(2, 1) * c, Basis::ONE),
            (q(-2, 1) * a, Basis::E12),
            (q(-2, 1) * b, Basis::E23),
            (k, Basis::E31),
        ]);
        assert_eq!(sq, expected);
    }

    #[test]
    fn quaternionic_point_triple_square_is_one() {
        let t = table((0, 1), (0, 1), (0, 1));
        let w = t.basis(Basis::E123);
        assert_eq!(t.square(&w), t.one());
    }

    #[test]
    fn mixed_params_rejected() {
        let t1 = table((0, 1), (0, 1), (0, 1));
        let t2 = table((1, 2), (0, 1), (0, 1));
        let a = t1.basis(Basis::E1);
        let b = t2.basis(Basis::E2);
        assert!(matches!(t1.multiply(&a, &b), Err(Error::MixedParams)));
        assert!(t1.multiply(&a, &t1.basis(Basis::E2)).is_ok());
        assert!(t2.multiply(&HElement::one(), &b).is_ok());
    }

    #[test]
    fn square_map_gives_twice_c() {
        let t = table((1, 4), (-2, 3), (5, 7));
        let e1 = t.basis(Basis::E1);
        let [f1, _, _] = t.vtilde_basis();
        let two_c = t.central_element().raw.scale(&q(2, 1));
        assert_eq!(t.anticommutator(&e1, &f1), two_c);
    }

    #[test]
    fn regular_rep_of_one_is_identity() {
        let t = table((1, 2), (1, 3), (1, 5));
        assert_eq!(t.regular_rep(&t.one()), Mat::identity(8));
    }

    #[test]
    fn triple_product_has_zero_diagonal() {
        let t = table((7, 3), (-2, 1), (1, 9));
        let m = t.regular_rep(&t.basis(Basis::E123));
        assert!((0..8).all(|i| m[(i, i)] == q(0, 1)));
    }

    #[test]
    fn q_on_generators_is_form_q() {
        let (a, b, c) = (q(1, 3), q(-2, 5), q(3, 2));
        let t = StructureTable::new(AlgebraParams::new(a.clone(), b.clone(), c.clone()));
        let g = t.trace_form_q();
        assert_eq!(g[(0, 0)], q(1, 1));
        for i in 1..4 {
            assert_eq!(g[(i, i)], q(-1, 1));
        }
        assert_eq!(g[(1, 2)], a);
        assert_eq!(g[(2, 3)], b);
        assert_eq!(g[(1, 3)], c);
    }

    #[test]
    fn central_element_examples() {
        let t = table((0, 1), (0, 1), (0, 1));
        let c = t.central_element();
        assert_eq!(c.raw, HElement::basis(Basis::E123).scale(&q(-1, 1)));
        assert_eq!(t.square(&c.raw), t.one());
        assert_eq!(c.epsilon, 1);

        let t = table((1, 1), (1, 1), (-1, 1));
        let c = t.central_element();
        assert!(t.square(&c.raw).is_zero(0.0));
        assert_eq!(c.epsilon, 0);
        assert_eq!(c.normalized.as_ref(), Some(&c.raw));

        let t = table((2, 1), (2, 1), (2, 1));
        let c = t.central_element();
        assert_eq!(t.square(&c.raw), t.scalar(q(-27, 1)));
        assert_eq!(c.epsilon, -1);
    }

    #[test]
    fn center_dimensions() {
        let t = table((0, 1), (0, 1), (0, 1));
        let z = t.center_basis(0.0);
        assert_eq!(z.len(), 2);
        let span = Mat::from_columns(&[
            z[0].to_vec(),
            z[1].to_vec(),
            HElement::<Rational>::one().to_vec(),
            HElement::<Rational>::basis(Basis::E123).to_vec(),
        ]);
        assert_eq!(span.rank(0.0), 2);
        assert_eq!(table((1, 1), (1, 1), (-1, 1)).center_basis(0.0).len(), 3);
        assert_eq!(table((1, 2), (0, 1), (0, 1)).center_basis(0.0).len(), 2);
    }

    #[test]
    fn rank_one_extra_central_element() {
        for (a, b) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let (a, b) = (q(a, 1), q(b, 1));
            let g = -(a.clone() * b.clone());
            let t = StructureTable::new(AlgebraParams::new(a.clone(), b.clone(), g.clone()));
            let [f1, f2, f3] = t.vtilde_basis();
            let z = &(&f3.scale(&-g) + &f1) - &f2.scale(&a);
            for e in t.v_basis() {
                assert!(t.commutator(&z, &e).is_zero(0.0));
            }
        }
    }

    #[test]
    fn decomposition_at_origin() {
        let t = table((0, 1), (0, 1), (0, 1));
        let d = t.canonical_decomposition(0.0);
        assert!(d.spans());
        assert!(d.projectors_consistent(0.0));
        assert!(d.q_orthogonal(&t, 0.0));
        assert!(d.square_map_range_ok(&t, 0.0));
        let inc = d.center_inclusions(&t, 0.0);
        assert!(inc.cv_in_vtilde && inc.cvtilde_in_v);
        assert_eq!((inc.cv_rank, inc.cvtilde_rank), (3, 3));
    }

    #[test]
    fn float_backend_matches_exact() {
        let t = table((1, 3), (-2, 5), (3, 2));
        let tf = t.to_f64();
        let g = t.trace_form_q().to_dmatrix();
        let gf = tf.trace_form_q().to_dmatrix();
        assert!((g - gf).abs().max() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn associative_on_basis((a, da, b, db, c, dc) in rational_triple()) {
            let t = table((a, da), (b, db), (c, dc));
            for i in Basis::ALL {
                for j in Basis::ALL {
                    let ij = t.basis_product(i, j);
                    for k in Basis::ALL {
                        let bk = HElement::basis(k);
                        let lhs = t.mul(&ij, &bk);
                        let rhs = t.mul(&HElement::basis(i), &t.basis_product(j, k));
                        prop_assert_eq!(lhs, rhs);
                    }
                }
            }
        }

        #[test]
        fn c_is_central_and_squares_to_minus_det((a, da, b, db, c, dc) in rational_triple()) {
            let t = table((a, da), (b, db), (c, dc));
            let ce = t.central_element();
            for e in t.v_basis() {
                prop_assert!(t.commutator(&ce.raw, &e).is_zero(0.0));
            }
            prop_assert_eq!(t.square(&ce.raw), t.scalar(-ce.det_q.clone()));
            prop_assert_eq!(t.q(&ce.raw, &ce.raw), -ce.det_q);
        }

        #[test]
        fn vtilde_pairs_anticommute_with_generators((a, da, b, db, c, dc) in rational_triple()) {
            let t = table((a, da), (b, db), (c, dc));
            let [e1, e2, e3] = t.v_basis();
            let [f1, f2, f3] = t.vtilde_basis();
            for (e, pair) in [(&e1, [&f3, &f2]), (&e2, [&f1, &f3]), (&e3, [&f2, &f1])] {
                for f in pair {
                    prop_assert!(t.anticommutator(e, f).is_zero(0.0));
                }
            }
        }

        #[test]
        fn regular_rep_is_homomorphism(x in proptest::collection::vec(-5i64..=5, 8), y in proptest::collection::vec(-5i64..=5, 8), (a, da, b, db, c, dc) in rational_triple()) {
            let t = table((a, da), (b, db), (c, dc));
            let xe = HElement::from_coords(std::array::from_fn(|i| q(x[i], 1)));
            let ye = HElement::from_coords(std::array::from_fn(|i| q(y[i], 1)));
            let lhs = t.regular_rep(&t.mul(&xe, &ye));
            let rhs = t.regular_rep(&xe).mul(&t.regular_rep(&ye));
            prop_assert_eq!(lhs, rhs);
        }
    }
}
