//! Bounded complexes whose terms are twists `O(a)` on the weighted projective stack or `O(a,b)` on
//! its square, with differentials given by sparse matrices of (bi)homogeneous ring elements.
//!
//! Conventions:
//! - `d^j : C^j -> C^{j+1}`; matrices are indexed `(row, col)` with rows in the target term list.
//! - `C[k]^i = C^{i+k}` with differential `(-1)^k d^{i+k}`.
//! - `Mc(f)^i = A^{i+1} ⊕ B^i` with block differential `[[-d_A, 0], [f, d_B]]`, source block first.
//! - On the square, `O(a,b)` has its first index on the factor that survives the pushforward
//!   `O(a,b) ↦ O(a) ⊗ S_b`, and `x ⊗ 1` acts on that first factor.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::marker::PhantomData;

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::graded::{BiPolynomial, IndexSubset, Monomial, Polynomial, WeightVector};
use crate::report::VerificationReport;

/// Which space the twists live on, and the ring their morphisms are drawn from.
pub trait Ambient: Copy + Default + fmt::Debug + Send + Sync + 'static {
    type Twist: Copy + Eq + Ord + fmt::Debug + fmt::Display + Send + Sync;
    type Entry: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync;

    const NAME: &'static str;
    const ARITY: usize;

    fn zero() -> Self::Entry;
    fn one(w: &WeightVector) -> Self::Entry;
    fn is_zero(e: &Self::Entry) -> bool;
    fn add_assign(acc: &mut Self::Entry, e: &Self::Entry);
    fn neg(e: &Self::Entry) -> Self::Entry;
    fn mul(a: &Self::Entry, b: &Self::Entry) -> Self::Entry;
    /// Whether `e` has exactly the (bi)degree of a morphism `O(from) -> O(to)`.
    fn degree_matches(e: &Self::Entry, from: Self::Twist, to: Self::Twist) -> bool;
    fn twist_by(t: Self::Twist, amount: &[i64]) -> Result<Self::Twist>;

    fn twist_to_json(t: Self::Twist) -> (&'static str, Value);
    fn twist_from_json(term: &Value) -> Result<Self::Twist>;
    fn entry_to_json(e: &Self::Entry) -> Value;
    fn entry_from_json(w: &WeightVector, v: &Value) -> Result<Self::Entry>;
}

/// The weighted projective stack itself.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct P;

/// Its square, with box-product twists `O(a,b) = O(a) ⊠ O(b)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PxP;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BiTwist(pub i64, pub i64);

impl fmt::Display for BiTwist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.0, self.1)
    }
}

impl Ambient for P {
    type Twist = i64;
    type Entry = Polynomial;

    const NAME: &'static str = "P";
    const ARITY: usize = 1;

    fn zero() -> Polynomial {
        Polynomial::zero()
    }
    fn one(w: &WeightVector) -> Polynomial {
        Polynomial::int(w, 1)
    }
    fn is_zero(e: &Polynomial) -> bool {
        e.is_zero()
    }
    fn add_assign(acc: &mut Polynomial, e: &Polynomial) {
        acc.add_assign(e);
    }
    fn neg(e: &Polynomial) -> Polynomial {
        e.neg()
    }
    fn mul(a: &Polynomial, b: &Polynomial) -> Polynomial {
        a.mul(b)
    }
    fn degree_matches(e: &Polynomial, from: i64, to: i64) -> bool {
        e.is_homogeneous_of(to - from)
    }
    fn twist_by(t: i64, amount: &[i64]) -> Result<i64> {
        match amount {
            [a] => Ok(t + a),
            _ => Err(Error::Ambient(format!("P twists take one amount, got {}", amount.len()))),
        }
    }
    fn twist_to_json(t: i64) -> (&'static str, Value) {
        ("twist", json!(t))
    }
    fn twist_from_json(term: &Value) -> Result<i64> {
        term.get("twist")
            .and_then(Value::as_i64)
            .ok_or_else(|| Error::Parse("term without integer `twist`".into()))
    }
    fn entry_to_json(e: &Polynomial) -> Value {
        serde_json::to_value(e).expect("polynomial serializes")
    }
    fn entry_from_json(w: &WeightVector, v: &Value) -> Result<Polynomial> {
        Polynomial::from_json(w, v)
    }
}

impl Ambient for PxP {
    type Twist = BiTwist;
    type Entry = BiPolynomial;

    const NAME: &'static str = "PxP";
    const ARITY: usize = 2;

    fn zero() -> BiPolynomial {
        BiPolynomial::zero()
    }
    fn one(w: &WeightVector) -> BiPolynomial {
        BiPolynomial::pure(Monomial::one(w), Monomial::one(w), crate::field::rat(1))
    }
    fn is_zero(e: &BiPolynomial) -> bool {
        e.is_zero()
    }
    fn add_assign(acc: &mut BiPolynomial, e: &BiPolynomial) {
        acc.add_assign(e);
    }
    fn neg(e: &BiPolynomial) -> BiPolynomial {
        e.neg()
    }
    fn mul(a: &BiPolynomial, b: &BiPolynomial) -> BiPolynomial {
        a.mul(b)
    }
    fn degree_matches(e: &BiPolynomial, from: BiTwist, to: BiTwist) -> bool {
        e.is_bihomogeneous_of(to.0 - from.0, to.1 - from.1)
    }
    fn twist_by(t: BiTwist, amount: &[i64]) -> Result<BiTwist> {
        match amount {
            [a, b] => Ok(BiTwist(t.0 + a, t.1 + b)),
            _ => Err(Error::Ambient(format!("PxP twists take two amounts, got {}", amount.len()))),
        }
    }
    fn twist_to_json(t: BiTwist) -> (&'static str, Value) {
        ("twists", json!([t.0, t.1]))
    }
    fn twist_from_json(term: &Value) -> Result<BiTwist> {
        let pair = term
            .get("twists")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 2)
            .ok_or_else(|| Error::Parse("term without `twists` pair".into()))?;
        let get = |i: usize| pair[i].as_i64().ok_or_else(|| Error::Parse("non-integer twist".into()));
        Ok(BiTwist(get(0)?, get(1)?))
    }
    fn entry_to_json(e: &BiPolynomial) -> Value {
        serde_json::to_value(e).expect("bi-polynomial serializes")
    }
    fn entry_from_json(w: &WeightVector, v: &Value) -> Result<BiPolynomial> {
        BiPolynomial::from_json(w, v)
    }
}

/// Provenance of a summand: the `l` of the block it came from and the index subset `I`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermLabel {
    pub l: i64,
    pub subset: IndexSubset,
}

impl fmt::Display for TermLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "l={} I={}", self.l, self.subset)
    }
}

/// One summand `O(twist)`, optionally tensored with a basis monomial of a coefficient space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term<T> {
    pub twist: T,
    pub label: Option<TermLabel>,
    pub coeff: Option<Monomial>,
}

impl<T> Term<T> {
    pub fn new(twist: T) -> Self {
        Term { twist, label: None, coeff: None }
    }

    pub fn labeled(twist: T, l: i64, subset: IndexSubset) -> Self {
        Term { twist, label: Some(TermLabel { l, subset }), coeff: None }
    }
}

impl<T: fmt::Display> fmt::Display for Term<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "O({})", self.twist)?;
        if let Some(c) = &self.coeff {
            write!(f, "⊗{c}")?;
        }
        if let Some(l) = &self.label {
            write!(f, "[{l}]")?;
        }
        Ok(())
    }
}

/// Sparse matrix of ring elements keyed by `(row, col)`; zero entries are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Entries<E>(BTreeMap<(usize, usize), E>);

impl<E> Default for Entries<E> {
    fn default() -> Self {
        Entries(BTreeMap::new())
    }
}

impl<E: Clone> Entries<E> {
    pub fn get(&self, row: usize, col: usize) -> Option<&E> {
        self.0.get(&(row, col))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &E)> {
        self.0.iter().map(|(&(r, c), e)| (r, c, e))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_row(&self) -> Option<usize> {
        self.0.keys().map(|&(r, _)| r).max()
    }

    pub fn max_col(&self) -> Option<usize> {
        self.0.keys().map(|&(_, c)| c).max()
    }
}

impl<E: Clone> Entries<E> {
    fn add<A: Ambient<Entry = E>>(&mut self, row: usize, col: usize, e: &E) {
        if A::is_zero(e) {
            return;
        }
        match self.0.entry((row, col)) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(e.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                A::add_assign(o.get_mut(), e);
                if A::is_zero(o.get()) {
                    o.remove();
                }
            }
        }
    }

    fn map<A: Ambient<Entry = E>>(&self, f: impl Fn(&E) -> E) -> Entries<E> {
        let mut out = Entries::default();
        for (&(r, c), e) in &self.0 {
            out.add::<A>(r, c, &f(e));
        }
        out
    }
}

/// `second ∘ first`.
fn compose<A: Ambient>(second: &Entries<A::Entry>, first: &Entries<A::Entry>) -> Entries<A::Entry> {
    let mut by_col: BTreeMap<usize, Vec<(usize, &A::Entry)>> = BTreeMap::new();
    for (&(r, k), e) in &second.0 {
        by_col.entry(k).or_default().push((r, e));
    }
    let mut out = Entries::default();
    for (&(k, c), e1) in &first.0 {
        if let Some(col) = by_col.get(&k) {
            for (r, e2) in col {
                out.add::<A>(*r, c, &A::mul(e2, e1));
            }
        }
    }
    out
}

fn difference<A: Ambient>(a: &Entries<A::Entry>, b: &Entries<A::Entry>) -> Entries<A::Entry> {
    let mut out = a.clone();
    for (&(r, c), e) in &b.0 {
        out.add::<A>(r, c, &A::neg(e));
    }
    out
}

/// A bounded complex of twists with symbolic differentials.
#[derive(Clone, Debug)]
pub struct TwistComplex<A: Ambient> {
    w: WeightVector,
    terms: BTreeMap<i64, Vec<Term<A::Twist>>>,
    diffs: BTreeMap<i64, Entries<A::Entry>>,
    _ambient: PhantomData<A>,
}

impl<A: Ambient> PartialEq for TwistComplex<A> {
    fn eq(&self, other: &Self) -> bool {
        self.w == other.w && self.terms == other.terms && self.diffs == other.diffs
    }
}

impl<A: Ambient> TwistComplex<A> {
    pub fn new(w: &WeightVector) -> Self {
        TwistComplex { w: w.clone(), terms: BTreeMap::new(), diffs: BTreeMap::new(), _ambient: PhantomData }
    }

    /// The complex with the single term `O(twist)` in degree 0.
    pub fn single(w: &WeightVector, term: Term<A::Twist>) -> Self {
        let mut c = TwistComplex::new(w);
        c.push_term(0, term);
        c
    }

    pub fn weights(&self) -> &WeightVector {
        &self.w
    }

    pub fn push_term(&mut self, j: i64, term: Term<A::Twist>) -> usize {
        let list = self.terms.entry(j).or_default();
        list.push(term);
        list.len() - 1
    }

    pub fn terms(&self, j: i64) -> &[Term<A::Twist>] {
        self.terms.get(&j).map_or(&[], Vec::as_slice)
    }

    pub fn rank(&self, j: i64) -> usize {
        self.terms(j).len()
    }

    /// Degrees carrying at least one term, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        self.terms.iter().filter(|(_, v)| !v.is_empty()).map(|(j, _)| *j).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.values().all(Vec::is_empty)
    }

    pub fn total_rank(&self) -> usize {
        self.terms.values().map(Vec::len).sum()
    }

    /// `d^j`, possibly empty.
    pub fn differential(&self, j: i64) -> Entries<A::Entry> {
        self.diffs.get(&j).cloned().unwrap_or_default()
    }

    pub fn entry(&self, j: i64, row: usize, col: usize) -> Option<&A::Entry> {
        self.diffs.get(&j)?.get(row, col)
    }

    /// Adds `e` to the component of `d^j` from term `col` of `C^j` to term `row` of `C^{j+1}`.
    pub fn add_entry(&mut self, j: i64, row: usize, col: usize, e: &A::Entry) -> Result<()> {
        let from = self
            .terms(j)
            .get(col)
            .ok_or_else(|| Error::Shape(format!("d^{j}: no source term {col}")))?
            .twist;
        let to = self
            .terms(j + 1)
            .get(row)
            .ok_or_else(|| Error::Shape(format!("d^{j}: no target term {row}")))?
            .twist;
        if !A::degree_matches(e, from, to) {
            return Err(Error::Degree(format!("d^{j} entry {e} does not map O({from}) to O({to})")));
        }
        self.diffs.entry(j).or_default().add::<A>(row, col, e);
        Ok(())
    }

    /// Negates one entry of `d^j`; used to build mutants for negative tests.
    pub fn flip_entry_sign(&mut self, j: i64, row: usize, col: usize) -> Result<()> {
        let slot = self
            .diffs
            .get_mut(&j)
            .and_then(|m| m.0.get_mut(&(row, col)))
            .ok_or_else(|| Error::Shape(format!("d^{j} has no entry at ({row},{col})")))?;
        *slot = A::neg(slot);
        Ok(())
    }

    /// All `(j, row, col)` positions carrying a nonzero entry.
    pub fn entry_positions(&self) -> Vec<(i64, usize, usize)> {
        self.diffs.iter().flat_map(|(&j, m)| m.iter().map(move |(r, c, _)| (j, r, c))).collect()
    }

    /// Checks that every entry has the degree forced by its endpoints.
    pub fn validate_degrees(&self) -> Result<()> {
        for (&j, m) in &self.diffs {
            for (r, c, e) in m.iter() {
                let from = self.terms(j).get(c).ok_or_else(|| Error::Shape(format!("d^{j}: column {c} out of range")))?;
                let to = self.terms(j + 1).get(r).ok_or_else(|| Error::Shape(format!("d^{j}: row {r} out of range")))?;
                if !A::degree_matches(e, from.twist, to.twist) {
                    return Err(Error::Degree(format!("d^{j} entry ({r},{c}) = {e} from {from} to {to}")));
                }
            }
        }
        Ok(())
    }

    /// Symbolic check of `d^{j+1} ∘ d^j = 0` for every `j`.
    pub fn check_d_squared(&self) -> Result<VerificationReport> {
        self.validate_degrees()?;
        let mut report = VerificationReport::new("d_squared", &self.w).param("ambient", A::NAME);
        for (&j, first) in &self.diffs {
            let Some(second) = self.diffs.get(&(j + 1)) else { continue };
            let comp = compose::<A>(second, first);
            for (r, c, e) in comp.iter() {
                report.fail(format!(
                    "d^{}∘d^{j} from {} to {} is {e}",
                    j + 1,
                    self.terms(j)[c],
                    self.terms(j + 2)[r]
                ));
            }
        }
        Ok(report)
    }

    /// `C[k]`.
    pub fn shift(&self, k: i64) -> Self {
        let sign_flip = k.rem_euclid(2) == 1;
        TwistComplex {
            w: self.w.clone(),
            terms: self.terms.iter().map(|(j, t)| (j - k, t.clone())).collect(),
            diffs: self
                .diffs
                .iter()
                .map(|(j, m)| (j - k, if sign_flip { m.map::<A>(A::neg) } else { m.clone() }))
                .collect(),
            _ambient: PhantomData,
        }
    }

    /// Twists every term by `amount` (one integer on `P`, two on `PxP`); differentials unchanged.
    pub fn twist_by(&self, amount: &[i64]) -> Result<Self> {
        let mut terms = BTreeMap::new();
        for (j, list) in &self.terms {
            let shifted = list
                .iter()
                .map(|t| Ok(Term { twist: A::twist_by(t.twist, amount)?, ..t.clone() }))
                .collect::<Result<Vec<_>>>()?;
            terms.insert(*j, shifted);
        }
        if amount.len() != A::ARITY {
            return Err(Error::Ambient(format!("{} twists take {} amounts, got {}", A::NAME, A::ARITY, amount.len())));
        }
        Ok(TwistComplex { w: self.w.clone(), terms, diffs: self.diffs.clone(), _ambient: PhantomData })
    }

    /// Term-label sets per degree, for comparing provenance.
    pub fn labels(&self, j: i64) -> Vec<Option<TermLabel>> {
        self.terms(j).iter().map(|t| t.label.clone()).collect()
    }

    pub fn to_json(&self) -> Value {
        let mut terms = Map::new();
        for (j, list) in &self.terms {
            if list.is_empty() {
                continue;
            }
            let items: Vec<Value> = list.iter().map(term_to_json::<A>).collect();
            terms.insert(j.to_string(), Value::Array(items));
        }
        let mut diffs = Map::new();
        for (j, m) in &self.diffs {
            if m.is_empty() {
                continue;
            }
            let items: Vec<Value> = m
                .iter()
                .map(|(r, c, e)| json!({"row": r, "col": c, "entries": A::entry_to_json(e)}))
                .collect();
            diffs.insert(j.to_string(), Value::Array(items));
        }
        json!({
            "ambient": A::NAME,
            "weights": self.w.weights(),
            "terms": terms,
            "differentials": diffs,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let ambient = v.get("ambient").and_then(Value::as_str).unwrap_or_default();
        if ambient != A::NAME {
            return Err(Error::Ambient(format!("expected ambient {}, found `{ambient}`", A::NAME)));
        }
        let weights: Vec<u32> = serde_json::from_value(v.get("weights").cloned().unwrap_or(Value::Null))
            .map_err(|e| Error::Parse(format!("weights: {e}")))?;
        let w = WeightVector::new(weights)?;
        let mut c = TwistComplex::new(&w);
        let parse_deg = |k: &str| k.parse::<i64>().map_err(|_| Error::Parse(format!("bad degree key `{k}`")));
        if let Some(terms) = v.get("terms").and_then(Value::as_object) {
            for (k, list) in terms {
                let j = parse_deg(k)?;
                for t in list.as_array().into_iter().flatten() {
                    c.push_term(j, term_from_json::<A>(&w, t)?);
                }
            }
        }
        if let Some(diffs) = v.get("differentials").and_then(Value::as_object) {
            for (k, list) in diffs {
                let j = parse_deg(k)?;
                for item in list.as_array().into_iter().flatten() {
                    let idx = |name: &str| {
                        item.get(name)
                            .and_then(Value::as_u64)
                            .map(|x| x as usize)
                            .ok_or_else(|| Error::Parse(format!("entry without `{name}`")))
                    };
                    let e = A::entry_from_json(&w, item.get("entries").unwrap_or(&Value::Null))?;
                    c.add_entry(j, idx("row")?, idx("col")?, &e)?;
                }
            }
        }
        Ok(c)
    }
}

fn term_to_json<A: Ambient>(t: &Term<A::Twist>) -> Value {
    let (key, tw) = A::twist_to_json(t.twist);
    let mut obj = Map::new();
    obj.insert(key.to_string(), tw);
    if let Some(label) = &t.label {
        obj.insert("label".into(), json!({"l": label.l, "subset": label.subset.as_slice()}));
    }
    if let Some(m) = &t.coeff {
        obj.insert("coeff".into(), json!(m.exponents()));
    }
    Value::Object(obj)
}

fn term_from_json<A: Ambient>(w: &WeightVector, v: &Value) -> Result<Term<A::Twist>> {
    let twist = A::twist_from_json(v)?;
    let label = match v.get("label") {
        Some(l) => {
            let lv = l.get("l").and_then(Value::as_i64).ok_or_else(|| Error::Parse("label without `l`".into()))?;
            let subset: Vec<usize> = serde_json::from_value(l.get("subset").cloned().unwrap_or(json!([])))
                .map_err(|e| Error::Parse(format!("label subset: {e}")))?;
            Some(TermLabel { l: lv, subset: IndexSubset::new(subset)? })
        }
        None => None,
    };
    let coeff = match v.get("coeff") {
        Some(c) => {
            let exps: Vec<u32> = serde_json::from_value(c.clone()).map_err(|e| Error::Parse(format!("coeff: {e}")))?;
            Some(Monomial::new(w, exps)?)
        }
        None => None,
    };
    Ok(Term { twist, label, coeff })
}

impl<A: Ambient> fmt::Display for TwistComplex<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in self.degrees() {
            let parts: Vec<String> = self.terms(j).iter().map(Term::to_string).collect();
            writeln!(f, "C^{j}: {}", parts.join(" ⊕ "))?;
        }
        Ok(())
    }
}

/// A degreewise family of maps between two complexes on the same ambient.
#[derive(Clone, Debug)]
pub struct ChainMap<A: Ambient> {
    pub source: TwistComplex<A>,
    pub target: TwistComplex<A>,
    components: BTreeMap<i64, Entries<A::Entry>>,
}

impl<A: Ambient> PartialEq for ChainMap<A> {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.components == other.components
    }
}

impl<A: Ambient> ChainMap<A> {
    pub fn new(source: TwistComplex<A>, target: TwistComplex<A>) -> Result<Self> {
        if source.w != target.w {
            return Err(Error::Shape("chain map between complexes over different rings".into()));
        }
        Ok(ChainMap { source, target, components: BTreeMap::new() })
    }

    pub fn component(&self, j: i64) -> Entries<A::Entry> {
        self.components.get(&j).cloned().unwrap_or_default()
    }

    pub fn entry(&self, j: i64, row: usize, col: usize) -> Option<&A::Entry> {
        self.components.get(&j)?.get(row, col)
    }

    pub fn degrees(&self) -> Vec<i64> {
        self.components.iter().filter(|(_, m)| !m.is_empty()).map(|(j, _)| *j).collect()
    }

    /// Adds `e` to the component `f^j` from source term `col` to target term `row`.
    pub fn add_entry(&mut self, j: i64, row: usize, col: usize, e: &A::Entry) -> Result<()> {
        let from = self
            .source
            .terms(j)
            .get(col)
            .ok_or_else(|| Error::Shape(format!("f^{j}: no source term {col}")))?
            .twist;
        let to = self
            .target
            .terms(j)
            .get(row)
            .ok_or_else(|| Error::Shape(format!("f^{j}: no target term {row}")))?
            .twist;
        if !A::degree_matches(e, from, to) {
            return Err(Error::Degree(format!("f^{j} entry {e} does not map O({from}) to O({to})")));
        }
        self.components.entry(j).or_default().add::<A>(row, col, e);
        Ok(())
    }

    pub fn flip_entry_sign(&mut self, j: i64, row: usize, col: usize) -> Result<()> {
        let slot = self
            .components
            .get_mut(&j)
            .and_then(|m| m.0.get_mut(&(row, col)))
            .ok_or_else(|| Error::Shape(format!("f^{j} has no entry at ({row},{col})")))?;
        *slot = A::neg(slot);
        Ok(())
    }

    /// All `(j, row, col)` positions carrying a nonzero entry.
    pub fn entry_positions(&self) -> Vec<(i64, usize, usize)> {
        self.components.iter().flat_map(|(&j, m)| m.iter().map(move |(r, c, _)| (j, r, c))).collect()
    }

    fn check_shapes(&self) -> Result<()> {
        for (&j, m) in &self.components {
            if m.max_col().is_some_and(|c| c >= self.source.rank(j)) || m.max_row().is_some_and(|r| r >= self.target.rank(j)) {
                return Err(Error::Shape(format!(
                    "f^{j} does not fit {} -> {} terms",
                    self.source.rank(j),
                    self.target.rank(j)
                )));
            }
        }
        Ok(())
    }

    /// Symbolic check of `d_T ∘ f = f ∘ d_S` in every degree.
    pub fn is_chain_map(&self) -> Result<VerificationReport> {
        self.check_shapes()?;
        let mut report = VerificationReport::new("chain_map", &self.source.w).param("ambient", A::NAME);
        let degrees: BTreeSet<i64> = self
            .components
            .keys()
            .copied()
            .chain(self.source.diffs.keys().copied())
            .collect();
        for j in degrees {
            let lhs = compose::<A>(&self.target.differential(j), &self.component(j));
            let rhs = compose::<A>(&self.component(j + 1), &self.source.differential(j));
            let diff = difference::<A>(&lhs, &rhs);
            for (r, c, e) in diff.iter() {
                report.fail(format!(
                    "degree {j}: (d∘f - f∘d) from {} to {} is {e}",
                    self.source.terms(j)[c],
                    self.target.terms(j + 1)[r]
                ));
            }
        }
        Ok(report)
    }

    /// `f ∘ self`.
    pub fn then(&self, f: &ChainMap<A>) -> Result<ChainMap<A>> {
        if self.target != f.source {
            return Err(Error::Shape("composed chain maps do not share a middle complex".into()));
        }
        let mut out = ChainMap::new(self.source.clone(), f.target.clone())?;
        let degrees: BTreeSet<i64> = self.components.keys().chain(f.components.keys()).copied().collect();
        for j in degrees {
            let comp = compose::<A>(&f.component(j), &self.component(j));
            if !comp.is_empty() {
                out.components.insert(j, comp);
            }
        }
        Ok(out)
    }
}

/// `Mc(f)` with the block layout `Mc^i = A^{i+1} ⊕ B^i`, `d = [[-d_A, 0], [f, d_B]]`.
pub fn mapping_cone<A: Ambient>(f: &ChainMap<A>) -> Result<TwistComplex<A>> {
    let check = f.is_chain_map()?;
    if !check.pass {
        return Err(Error::ChainMap(check.failures.first().cloned().unwrap_or_default()));
    }
    Ok(mapping_cone_unchecked(f))
}

/// Cone layout without the chain-map precondition; used for mutants in negative tests.
pub fn mapping_cone_unchecked<A: Ambient>(f: &ChainMap<A>) -> TwistComplex<A> {
    let (a, b) = (&f.source, &f.target);
    let mut cone = TwistComplex::new(&a.w);
    let degrees: BTreeSet<i64> = a.degrees().into_iter().map(|j| j - 1).chain(b.degrees()).collect();
    for &i in &degrees {
        for t in a.terms(i + 1).iter().chain(b.terms(i)) {
            cone.push_term(i, t.clone());
        }
    }
    for &i in &degrees {
        let a_src = a.rank(i + 1);
        let a_tgt = a.rank(i + 2);
        let mut m = Entries::default();
        for (r, c, e) in a.differential(i + 1).iter() {
            m.add::<A>(r, c, &A::neg(e));
        }
        for (r, c, e) in f.component(i + 1).iter() {
            m.add::<A>(a_tgt + r, c, e);
        }
        for (r, c, e) in b.differential(i).iter() {
            m.add::<A>(a_tgt + r, a_src + c, e);
        }
        if !m.is_empty() {
            cone.diffs.insert(i, m);
        }
    }
    cone
}

/// `O(a) ⊠ C` on the square, or `O(a) ⊠ C[-1]` when `shifted`; the differential is `1 ⊗ d`
/// with the sign of the shift.
pub fn box_sheaf_complex(a: i64, c: &TwistComplex<P>, shifted: bool) -> TwistComplex<PxP> {
    let c = if shifted { c.shift(-1) } else { c.clone() };
    let mut out = TwistComplex::<PxP>::new(&c.w);
    for (&j, list) in &c.terms {
        for t in list {
            out.push_term(j, Term { twist: BiTwist(a, t.twist), label: t.label.clone(), coeff: t.coeff.clone() });
        }
    }
    for (&j, m) in &c.diffs {
        let mut bm = Entries::default();
        for (r, col, e) in m.iter() {
            bm.add::<PxP>(r, col, &BiPolynomial::from_right(&c.w, e));
        }
        out.diffs.insert(j, bm);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded::Polynomial;

    fn wv(v: &[u32]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    /// `O(-1) --x0--> O(0)` on weights (1,1).
    fn two_term() -> TwistComplex<P> {
        let w = wv(&[1, 1]);
        let mut c = TwistComplex::<P>::new(&w);
        c.push_term(-1, Term::new(-1));
        c.push_term(0, Term::new(0));
        c.add_entry(-1, 0, 0, &Polynomial::var(&w, 0)).unwrap();
        c
    }

    #[test]
    fn degree_checks_on_entries() {
        let w = wv(&[1, 2]);
        let mut c = TwistComplex::<P>::new(&w);
        c.push_term(-1, Term::new(-1));
        c.push_term(0, Term::new(0));
        assert!(matches!(c.add_entry(-1, 0, 0, &Polynomial::var(&w, 1)), Err(Error::Degree(_))));
        assert!(c.add_entry(-1, 0, 0, &Polynomial::var(&w, 0)).is_ok());
        assert!(matches!(c.add_entry(-1, 1, 0, &Polynomial::var(&w, 0)), Err(Error::Shape(_))));
    }

    #[test]
    fn shift_identities() {
        let c = two_term();
        assert_eq!(c.shift(0), c);
        assert_eq!(c.shift(1).shift(-1), c);
        assert_eq!(c.shift(3), c.shift(1).shift(2));
        let s = c.shift(-1);
        assert_eq!(s.rank(0), 1);
        assert_eq!(s.entry(0, 0, 0), Some(&Polynomial::var(c.weights(), 0).neg()));
    }

    #[test]
    fn cone_of_identity() {
        let w = wv(&[1, 1]);
        let o = TwistComplex::<P>::single(&w, Term::new(0));
        let mut id = ChainMap::new(o.clone(), o).unwrap();
        id.add_entry(0, 0, 0, &Polynomial::int(&w, 1)).unwrap();
        let cone = mapping_cone(&id).unwrap();
        assert_eq!(cone.degrees(), vec![-1, 0]);
        assert_eq!(cone.entry(-1, 0, 0), Some(&Polynomial::int(&w, 1)));
        assert!(cone.check_d_squared().unwrap().pass);
    }

    #[test]
    fn cone_rejects_non_chain_maps() {
        let c = two_term();
        let w = c.weights().clone();
        let target = TwistComplex::<P>::single(&w, Term::new(0));
        // sends O(0) to O(0) by 1 but O(-1) nowhere: 1 ∘ x0 ≠ 0
        let mut f = ChainMap::new(c, target).unwrap();
        f.add_entry(0, 0, 0, &Polynomial::int(&w, 1)).unwrap();
        assert!(!f.is_chain_map().unwrap().pass);
        assert!(matches!(mapping_cone(&f), Err(Error::ChainMap(_))));
    }

    #[test]
    fn twist_arity() {
        let c = two_term();
        assert!(matches!(c.twist_by(&[1, 2]), Err(Error::Ambient(_))));
        assert_eq!(c.twist_by(&[0]).unwrap(), c);
        let b = box_sheaf_complex(0, &c, false);
        assert!(matches!(b.twist_by(&[1]), Err(Error::Ambient(_))));
        assert_eq!(b.twist_by(&[2, 3]).unwrap().terms(0)[0].twist, BiTwist(2, 3));
    }

    #[test]
    fn box_of_shifted_complex_negates_differential() {
        let c = two_term();
        let w = c.weights().clone();
        let b = box_sheaf_complex(4, &c, true);
        assert_eq!(b.terms(1)[0].twist, BiTwist(4, 0));
        assert_eq!(b.entry(0, 0, 0), Some(&BiPolynomial::right_var(&w, 0, -1)));
        assert!(b.check_d_squared().unwrap().pass);
    }

    #[test]
    fn json_roundtrip() {
        let c = two_term();
        let back = TwistComplex::<P>::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        let b = box_sheaf_complex(1, &c, true);
        assert_eq!(TwistComplex::<PxP>::from_json(&b.to_json()).unwrap(), b);
        assert!(matches!(TwistComplex::<PxP>::from_json(&c.to_json()), Err(Error::Ambient(_))));
    }
}
