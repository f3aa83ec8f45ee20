//! The weighted polynomial ring `S = K[x_0, ..., x_n]` with `deg x_i = w_i`, its graded pieces,
//! multiplication maps between them, and line-bundle cohomology on the weighted projective stack.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{parse_rational, rat, rational_to_string, Rational};
use crate::linalg::SparseMatrix;

/// Weights `(w_0, ..., w_n)` of the ring; `total` is `w = Σ w_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct WeightVector {
    weights: Vec<u32>,
    total: i64,
}

impl WeightVector {
    pub fn new(weights: Vec<u32>) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::InvalidWeights(format!(
                "need at least two weights (n >= 1), got {}",
                weights.len()
            )));
        }
        if weights.iter().any(|&w| w == 0) {
            return Err(Error::InvalidWeights("weights must be positive".into()));
        }
        if weights.len() > 16 {
            return Err(Error::InvalidWeights("at most 16 variables are supported".into()));
        }
        let total = weights.iter().map(|&w| w as i64).sum();
        Ok(WeightVector { weights, total })
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> i64 {
        self.weights[i] as i64
    }

    /// Number of variables, `n + 1`.
    pub fn nvars(&self) -> usize {
        self.weights.len()
    }

    /// Dimension index `n` of the weighted projective stack.
    pub fn n(&self) -> usize {
        self.weights.len() - 1
    }

    /// Total weight `w`.
    pub fn total(&self) -> i64 {
        self.total
    }

    /// `w_I`.
    pub fn subset_weight(&self, subset: &IndexSubset) -> i64 {
        subset.iter().map(|i| self.weight(i)).sum()
    }

    /// Dimensions of `S_0, ..., S_max`.
    pub fn hilbert_function(&self, max: i64) -> Vec<u64> {
        if max < 0 {
            return Vec::new();
        }
        let len = max as usize + 1;
        let mut dims = vec![0u64; len];
        dims[0] = 1;
        for &w in &self.weights {
            let w = w as usize;
            for a in w..len {
                dims[a] += dims[a - w];
            }
        }
        dims
    }
}

impl TryFrom<Vec<u32>> for WeightVector {
    type Error = Error;

    fn try_from(v: Vec<u32>) -> Result<Self> {
        WeightVector::new(v)
    }
}

impl From<WeightVector> for Vec<u32> {
    fn from(w: WeightVector) -> Vec<u32> {
        w.weights
    }
}

impl std::str::FromStr for WeightVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let weights = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad weight `{}` in `{s}`", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        WeightVector::new(weights)
    }
}

impl fmt::Display for WeightVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.weights.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A sorted subset `I ⊆ {0, ..., n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSubset(Vec<usize>);

impl IndexSubset {
    pub fn new(mut elems: Vec<usize>) -> Result<Self> {
        elems.sort_unstable();
        if elems.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::Range(format!("repeated index in subset {elems:?}")));
        }
        Ok(IndexSubset(elems))
    }

    pub fn empty() -> Self {
        IndexSubset(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// `N_I^i = #{j ∈ I : j < i}`.
    pub fn count_below(&self, i: usize) -> usize {
        self.0.partition_point(|&j| j < i)
    }

    /// `(-1)^{N_I^i}` as `±1`.
    pub fn koszul_sign(&self, i: usize) -> i64 {
        if self.count_below(i) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn without(&self, i: usize) -> Option<IndexSubset> {
        let pos = self.0.binary_search(&i).ok()?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(IndexSubset(v))
    }

    /// All subsets of `{0, ..., nvars-1}` of the given size, in lexicographic order.
    pub fn all_of_size(nvars: usize, size: usize) -> Vec<IndexSubset> {
        fn rec(start: usize, nvars: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<IndexSubset>) {
            if left == 0 {
                out.push(IndexSubset(cur.clone()));
                return;
            }
            for i in start..nvars {
                if nvars - i < left {
                    break;
                }
                cur.push(i);
                rec(i + 1, nvars, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if size <= nvars {
            rec(0, nvars, size, &mut Vec::new(), &mut out);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for IndexSubset {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        IndexSubset::new(v)
    }
}

impl From<IndexSubset> for Vec<usize> {
    fn from(s: IndexSubset) -> Vec<usize> {
        s.0
    }
}

impl fmt::Display for IndexSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A monomial `x^e`; `degree` is the weighted degree `Σ e_i w_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: i64,
}

impl Monomial {
    pub fn new(w: &WeightVector, exps: Vec<u32>) -> Result<Self> {
        if exps.len() != w.nvars() {
            return Err(Error::Shape(format!(
                "monomial has {} exponents, ring has {} variables",
                exps.len(),
                w.nvars()
            )));
        }
        let degree = exps.iter().zip(w.weights()).map(|(&e, &wi)| e as i64 * wi as i64).sum();
        Ok(Monomial { exps, degree })
    }

    pub fn one(w: &WeightVector) -> Self {
        Monomial { exps: vec![0; w.nvars()], degree: 0 }
    }

    pub fn var(w: &WeightVector, i: usize) -> Self {
        let mut exps = vec![0; w.nvars()];
        exps[i] = 1;
        Monomial { exps, degree: w.weight(i) }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn degree(&self) -> i64 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.exps.len(), other.exps.len());
        Monomial {
            exps: self.exps.iter().zip(&other.exps).map(|(a, b)| a + b).collect(),
            degree: self.degree + other.degree,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return write!(f, "1");
        }
        let mut first = true;
        for (i, &e) in self.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "x{i}")?;
            } else {
                write!(f, "x{i}^{e}")?;
            }
        }
        Ok(())
    }
}

impl Serialize for Monomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.exps.serialize(s)
    }
}

/// Number of monomials of weighted degree `a`: `#{e : Σ e_i w_i = a}`.
pub fn dim_graded_piece(w: &WeightVector, a: i64) -> u64 {
    if a < 0 {
        return 0;
    }
    w.hilbert_function(a)[a as usize]
}

/// Monomial basis of `S_a`, ordered lexicographically on exponent vectors with the largest power of
/// `x_0` first (so `x0^2, x0*x1, x1^2` for two variables of weight one).
pub fn monomial_basis(w: &WeightVector, a: i64) -> Vec<Monomial> {
    fn rec(w: &WeightVector, i: usize, left: i64, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        let wi = w.weight(i);
        if i + 1 == w.nvars() {
            if left % wi == 0 {
                cur.push((left / wi) as u32);
                out.push(Monomial { exps: cur.clone(), degree: 0 });
                cur.pop();
            }
            return;
        }
        for e in (0..=left / wi).rev() {
            cur.push(e as u32);
            rec(w, i + 1, left - e * wi, cur, out);
            cur.pop();
        }
    }
    if a < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    rec(w, 0, a, &mut Vec::with_capacity(w.nvars()), &mut out);
    for m in &mut out {
        m.degree = a;
    }
    out
}

/// Basis of `S_a` together with its inverse index.
#[derive(Clone, Debug)]
pub struct IndexedBasis {
    pub degree: i64,
    pub monomials: Vec<Monomial>,
    pub index: HashMap<Monomial, usize>,
}

impl IndexedBasis {
    pub fn new(w: &WeightVector, a: i64) -> Self {
        let monomials = monomial_basis(w, a);
        let index = monomials.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        IndexedBasis { degree: a, monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }
}

/// Memoized monomial bases keyed by degree.
#[derive(Debug)]
pub struct BasisCache {
    w: WeightVector,
    bases: HashMap<i64, IndexedBasis>,
}

impl BasisCache {
    pub fn new(w: &WeightVector) -> Self {
        BasisCache { w: w.clone(), bases: HashMap::new() }
    }

    pub fn get(&mut self, a: i64) -> &IndexedBasis {
        let w = &self.w;
        self.bases.entry(a).or_insert_with(|| IndexedBasis::new(w, a))
    }

    pub fn dim(&mut self, a: i64) -> usize {
        if a < 0 {
            0
        } else {
            self.get(a).len()
        }
    }
}

/// A polynomial with exact rational coefficients; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(w: &WeightVector, c: Rational) -> Self {
        Polynomial::term(Monomial::one(w), c)
    }

    pub fn int(w: &WeightVector, c: i64) -> Self {
        Polynomial::constant(w, rat(c))
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    pub fn monomial(m: Monomial) -> Self {
        Polynomial::term(m, Rational::one())
    }

    pub fn var(w: &WeightVector, i: usize) -> Self {
        Polynomial::monomial(Monomial::var(w, i))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The common degree of all monomials; `None` for zero or inhomogeneous polynomials.
    pub fn homogeneous_degree(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(Monomial::degree);
        let d = it.next()?;
        it.all(|e| e == d).then_some(d)
    }

    /// Whether the polynomial is homogeneous of degree `d` (zero counts as homogeneous).
    pub fn is_homogeneous_of(&self, d: i64) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    /// The value of a nonzero constant polynomial.
    pub fn as_nonzero_constant(&self) -> Option<&Rational> {
        if self.terms.len() == 1 {
            let (m, c) = self.terms.iter().next()?;
            m.is_one().then_some(c)
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Polynomial) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }

    pub fn scale(&self, s: &Rational) -> Polynomial {
        if s.is_zero() {
            return Polynomial::zero();
        }
        Polynomial { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn mul_monomial(&self, m: &Monomial) -> Polynomial {
        Polynomial { terms: self.terms.iter().map(|(k, c)| (k.mul(m), c.clone())).collect() }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{}", rational_to_string(c))?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", rational_to_string(c))?;
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct PolyTermRepr {
    exponents: Vec<u32>,
    coefficient: String,
}

impl Serialize for Polynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<PolyTermRepr> = self
            .terms
            .iter()
            .map(|(m, c)| PolyTermRepr { exponents: m.exps.clone(), coefficient: rational_to_string(c) })
            .collect();
        v.serialize(s)
    }
}

impl Polynomial {
    /// Inverse of the JSON serialization: a list of `{exponents, coefficient}` objects.
    pub fn from_json(w: &WeightVector, value: &serde_json::Value) -> Result<Polynomial> {
        let reprs: Vec<PolyTermRepr> = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("polynomial: {e}")))?;
        let mut p = Polynomial::zero();
        for r in reprs {
            p.add_term(Monomial::new(w, r.exponents)?, parse_rational(&r.coefficient)?);
        }
        Ok(p)
    }
}

/// An element of `S ⊗ S`, stored as `(left, right) -> coefficient`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BiPolynomial {
    terms: BTreeMap<(Monomial, Monomial), Rational>,
}

impl BiPolynomial {
    pub fn zero() -> Self {
        BiPolynomial::default()
    }

    pub fn pure(left: Monomial, right: Monomial, c: Rational) -> Self {
        let mut out = BiPolynomial::zero();
        out.add_term(left, right, c);
        out
    }

    /// `c · x_i ⊗ 1`.
    pub fn left_var(w: &WeightVector, i: usize, c: i64) -> Self {
        BiPolynomial::pure(Monomial::var(w, i), Monomial::one(w), rat(c))
    }

    /// `c · 1 ⊗ x_i`.
    pub fn right_var(w: &WeightVector, i: usize, c: i64) -> Self {
        BiPolynomial::pure(Monomial::one(w), Monomial::var(w, i), rat(c))
    }

    /// `1 ⊗ p`.
    pub fn from_right(w: &WeightVector, p: &Polynomial) -> Self {
        let mut out = BiPolynomial::zero();
        for (m, c) in p.terms() {
            out.add_term(Monomial::one(w), m.clone(), c.clone());
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Monomial, &Rational)> {
        self.terms.iter().map(|((l, r), c)| (l, r, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, left: Monomial, right: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry((left, right)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &BiPolynomial) {
        for ((l, r), c) in &other.terms {
            self.add_term(l.clone(), r.clone(), c.clone());
        }
    }

    pub fn neg(&self) -> BiPolynomial {
        BiPolynomial { terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect() }
    }

    pub fn mul(&self, other: &BiPolynomial) -> BiPolynomial {
        let mut out = BiPolynomial::zero();
        for ((l1, r1), c1) in &self.terms {
            for ((l2, r2), c2) in &other.terms {
                out.add_term(l1.mul(l2), r1.mul(r2), c1 * c2);
            }
        }
        out
    }

    /// Whether every summand has bidegree `(dl, dr)`.
    pub fn is_bihomogeneous_of(&self, dl: i64, dr: i64) -> bool {
        self.terms.keys().all(|(l, r)| l.degree() == dl && r.degree() == dr)
    }

    /// Image under the multiplication map `S ⊗ S -> S`.
    pub fn collapse(&self) -> Polynomial {
        let mut out = Polynomial::zero();
        for ((l, r), c) in &self.terms {
            out.add_term(l.mul(r), c.clone());
        }
        out
    }
}

impl fmt::Display for BiPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, ((l, r), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*({l}⊗{r})", rational_to_string(c))?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct BiTermRepr {
    left_exps: Vec<u32>,
    right_exps: Vec<u32>,
    coeff: String,
}

impl Serialize for BiPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<BiTermRepr> = self
            .terms
            .iter()
            .map(|((l, r), c)| BiTermRepr {
                left_exps: l.exps.clone(),
                right_exps: r.exps.clone(),
                coeff: rational_to_string(c),
            })
            .collect();
        v.serialize(s)
    }
}

impl BiPolynomial {
    pub fn from_json(w: &WeightVector, value: &serde_json::Value) -> Result<BiPolynomial> {
        let reprs: Vec<BiTermRepr> = serde_json::from_value(value.clone())
            .map_err(|e| Error::Parse(format!("bi-polynomial: {e}")))?;
        let mut p = BiPolynomial::zero();
        for r in reprs {
            p.add_term(Monomial::new(w, r.left_exps)?, Monomial::new(w, r.right_exps)?, parse_rational(&r.coeff)?);
        }
        Ok(p)
    }
}

/// Matrix of multiplication by `f` from `S_a` to `S_{a+d}` in the canonical bases, where `d` is
/// the degree of `f`. Fails when `f` is zero or not homogeneous.
pub fn mult_matrix(w: &WeightVector, f: &Polynomial, a: i64) -> Result<SparseMatrix<Rational>> {
    let d = f
        .homogeneous_degree()
        .ok_or_else(|| Error::Degree(format!("`{f}` is not a nonzero homogeneous polynomial")))?;
    let source = IndexedBasis::new(w, a);
    let target = IndexedBasis::new(w, a + d);
    Ok(mult_matrix_in(f, &source, &target))
}

/// Multiplication by `f` between two prepared bases; `f` must map `source` into `target`.
pub fn mult_matrix_in(f: &Polynomial, source: &IndexedBasis, target: &IndexedBasis) -> SparseMatrix<Rational> {
    debug_assert!(f.is_homogeneous_of(target.degree - source.degree));
    let mut trip = Vec::with_capacity(source.len() * f.len());
    for (col, m) in source.monomials.iter().enumerate() {
        for (fm, c) in f.terms() {
            let prod = m.mul(fm);
            let row = target.index[&prod];
            trip.push((row, col, c.clone()));
        }
    }
    SparseMatrix::from_triplets(target.len(), source.len(), trip)
}

/// Cohomology dimensions `(h^0, ..., h^n)` of `O(m)` on the weighted projective stack:
/// `h^0 = dim S_m`, `h^n = dim S_{-m-w}`, everything in between vanishes.
pub fn coh_p_line_bundle(w: &WeightVector, m: i64) -> Vec<u64> {
    let mut table = vec![0u64; w.n() + 1];
    table[0] += dim_graded_piece(w, m);
    table[w.n()] += dim_graded_piece(w, -m - w.total());
    table
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn weights() -> impl Strategy<Value = WeightVector> {
        prop::collection::vec(1u32..=4, 2..=4).prop_map(|v| WeightVector::new(v).unwrap())
    }

    fn random_homogeneous(w: &WeightVector, d: i64, coeffs: &[i64]) -> Polynomial {
        let mut p = Polynomial::zero();
        for (m, c) in monomial_basis(w, d).into_iter().zip(coeffs.iter().cycle()) {
            p.add_term(m, rat(*c));
        }
        p
    }

    fn dense(m: &SparseMatrix<Rational>) -> Vec<Vec<Rational>> {
        let mut out = vec![vec![Rational::zero(); m.ncols]; m.nrows];
        for (r, row) in m.rows.iter().enumerate() {
            for (c, v) in row {
                out[r][*c] = v.clone();
            }
        }
        out
    }

    fn matmul(a: &[Vec<Rational>], b: &[Vec<Rational>], inner: usize, ncols: usize) -> Vec<Vec<Rational>> {
        a.iter()
            .map(|row| {
                (0..ncols)
                    .map(|c| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][c]))
                    .collect()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn hilbert_series_is_product_of_geometric_series(w in weights()) {
            // Π_i (1 - t^{w_i}) · Σ_a dim S_a t^a = 1 up to degree 4w
            let bound = 4 * w.total();
            let dims = w.hilbert_function(bound);
            let mut series: Vec<i64> = dims.iter().map(|&d| d as i64).collect();
            for &wi in w.weights() {
                let wi = wi as usize;
                for a in (wi..series.len()).rev() {
                    series[a] -= series[a - wi];
                }
            }
            prop_assert_eq!(series[0], 1);
            prop_assert!(series[1..].iter().all(|&c| c == 0));
        }

        #[test]
        fn basis_length_matches_dimension(w in weights()) {
            for a in 0..=3 * w.total() {
                prop_assert_eq!(monomial_basis(&w, a).len() as u64, dim_graded_piece(&w, a));
            }
        }

        #[test]
        fn multiplication_matrices_compose(
            w in weights(),
            df in 0i64..=4, dg in 0i64..=4, a in 0i64..=4,
            cf in prop::collection::vec(-3i64..=3, 1..6),
            cg in prop::collection::vec(-3i64..=3, 1..6),
        ) {
            let f = random_homogeneous(&w, df, &cf);
            let g = random_homogeneous(&w, dg, &cg);
            prop_assume!(!f.is_zero() && !g.is_zero());
            let fg = mult_matrix(&w, &f.mul(&g), a).unwrap();
            let mg = mult_matrix(&w, &g, a).unwrap();
            let mf = mult_matrix(&w, &f, a + dg).unwrap();
            let composed = matmul(&dense(&mf), &dense(&mg), mg.nrows, mg.ncols);
            prop_assert_eq!(dense(&fg), composed);
        }

        #[test]
        fn serre_duality_symmetry(w in weights()) {
            let n = w.n();
            for m in -3 * w.total()..=3 * w.total() {
                prop_assert_eq!(coh_p_line_bundle(&w, m)[0], coh_p_line_bundle(&w, -m - w.total())[n]);
            }
        }
    }
}
