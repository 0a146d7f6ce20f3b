//! Normal-form algebra generated by position operators `x_j` and unit
//! translation operators `T_j`.
//!
//! The defining relation is `[T_j, x_j] = T_j`, equivalently the rewrite
//! `T_j^m x_j = (x_j + m) T_j^m`. Distinct modes commute, all translations
//! commute with each other, and `T_j` is unitary (`T_j^† = T_j^{-1}`), so
//! every element of the algebra has a unique normal form: a sum of terms
//! `coeff · x-monomial · shift-word` with the `x` factors on the left.
//!
//! Translations are primitive here: no momentum generator exists in the
//! algebra, and only integer translation powers are representable.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

mod text;
pub use text::ParseError;

/// Coefficients with modulus at or below this are pruned during
/// canonicalization.
pub const COEFF_EPS: f64 = 1e-14;

/// Label for one agent/mode of the system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex(pub u32);

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A finite product `∏_j T_j^{m_j}` with integer exponents.
///
/// Negative exponents are adjoint powers (`T^† = T^{-1}`). Zero exponents
/// are never stored, so the empty word is the identity.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ShiftWord {
    exps: BTreeMap<ModeIndex, i32>,
}

impl ShiftWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(mode: ModeIndex, m: i32) -> Self {
        let mut exps = BTreeMap::new();
        if m != 0 {
            exps.insert(mode, m);
        }
        Self { exps }
    }

    pub fn from_exponents<I: IntoIterator<Item = (ModeIndex, i32)>>(iter: I) -> Self {
        let mut w = Self::identity();
        for (mode, m) in iter {
            w.merge(mode, m);
        }
        w
    }

    fn merge(&mut self, mode: ModeIndex, m: i32) {
        let e = self.exps.entry(mode).or_insert(0);
        *e += m;
        if *e == 0 {
            self.exps.remove(&mode);
        }
    }

    pub fn exponent(&self, mode: ModeIndex) -> i32 {
        self.exps.get(&mode).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (ModeIndex, i32)> + '_ {
        self.exps.iter().map(|(&j, &m)| (j, m))
    }

    pub fn is_identity(&self) -> bool {
        self.exps.is_empty()
    }

    /// Word product; all shift words commute, so this is just exponent
    /// addition.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (&mode, &m) in &other.exps {
            out.merge(mode, m);
        }
        out
    }

    /// `(∏ T_j^{m_j})^† = ∏ T_j^{-m_j}`.
    pub fn adjoint(&self) -> Self {
        Self {
            exps: self.exps.iter().map(|(&j, &m)| (j, -m)).collect(),
        }
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        self.exps.keys().copied()
    }
}

/// A monomial `∏_j x_j^{n_j}` with strictly positive powers; empty = 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct XMonomial {
    pows: BTreeMap<ModeIndex, u32>,
}

impl XMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn single(mode: ModeIndex, n: u32) -> Self {
        let mut pows = BTreeMap::new();
        if n != 0 {
            pows.insert(mode, n);
        }
        Self { pows }
    }

    pub fn power(&self, mode: ModeIndex) -> u32 {
        self.pows.get(&mode).copied().unwrap_or(0)
    }

    pub fn powers(&self) -> impl Iterator<Item = (ModeIndex, u32)> + '_ {
        self.pows.iter().map(|(&j, &n)| (j, n))
    }

    pub fn is_one(&self) -> bool {
        self.pows.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.pows.values().sum()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut pows = self.pows.clone();
        for (&mode, &n) in &other.pows {
            *pows.entry(mode).or_insert(0) += n;
        }
        Self { pows }
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        self.pows.keys().copied()
    }
}

/// One normal-form term: `coeff · x-monomial · shift-word`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalTerm {
    pub coeff: Complex64,
    pub xpart: XMonomial,
    pub shift: ShiftWord,
}

impl NormalTerm {
    pub fn new(coeff: Complex64, xpart: XMonomial, shift: ShiftWord) -> Self {
        Self { coeff, xpart, shift }
    }

    fn key(&self) -> (&XMonomial, &ShiftWord) {
        (&self.xpart, &self.shift)
    }

    pub fn modes(&self) -> impl Iterator<Item = ModeIndex> + '_ {
        // Mode sets of the two factors may overlap; callers dedupe as needed.
        self.xpart.modes().chain(self.shift.modes())
    }
}

/// A canonicalized finite sum of [`NormalTerm`]s.
///
/// Canonical means: like terms merged, coefficients below [`COEFF_EPS`]
/// pruned, and terms sorted lexicographically on (x-monomial, shift-word).
/// Structural equality of canonical forms is operator equality.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OperatorExpr {
    terms: Vec<NormalTerm>,
}

/// Single-term expression for `x_j`.
pub fn x_op(mode: ModeIndex) -> OperatorExpr {
    OperatorExpr::from_terms([NormalTerm::new(
        Complex64::new(1.0, 0.0),
        XMonomial::single(mode, 1),
        ShiftWord::identity(),
    )])
}

/// Single-term expression for `T_j^m`; `m = 0` gives the identity and
/// negative `m` the adjoint powers.
pub fn shift_op(mode: ModeIndex, m: i32) -> OperatorExpr {
    OperatorExpr::from_terms([NormalTerm::new(
        Complex64::new(1.0, 0.0),
        XMonomial::one(),
        ShiftWord::single(mode, m),
    )])
}

/// `a·b − b·a`.
pub fn commutator(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    &a.mul(b) - &b.mul(a)
}

/// `a·b + b·a`.
pub fn anticommutator(a: &OperatorExpr, b: &OperatorExpr) -> OperatorExpr {
    &a.mul(b) + &b.mul(a)
}

impl OperatorExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::scalar(Complex64::new(1.0, 0.0))
    }

    pub fn scalar(c: Complex64) -> Self {
        Self::from_terms([NormalTerm::new(c, XMonomial::one(), ShiftWord::identity())])
    }

    pub fn from_terms<I: IntoIterator<Item = NormalTerm>>(terms: I) -> Self {
        let mut expr = Self {
            terms: terms.into_iter().collect(),
        };
        expr.canonicalize();
        expr
    }

    pub fn terms(&self) -> &[NormalTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest coefficient modulus, 0 for the zero expression.
    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).fold(0.0, f64::max)
    }

    /// All modes referenced by any term, deduplicated.
    pub fn modes(&self) -> Vec<ModeIndex> {
        let mut set: Vec<ModeIndex> = self.terms.iter().flat_map(|t| t.modes()).collect();
        set.sort_unstable();
        set.dedup();
        set
    }

    /// Merge like terms, prune near-zero coefficients, sort. Idempotent.
    fn canonicalize(&mut self) {
        self.terms.sort_by(|a, b| a.key().cmp(&b.key()));
        let mut merged: Vec<NormalTerm> = Vec::with_capacity(self.terms.len());
        for term in self.terms.drain(..) {
            match merged.last_mut() {
                Some(last) if last.key() == term.key() => last.coeff += term.coeff,
                _ => merged.push(term),
            }
        }
        merged.retain(|t| t.coeff.norm() > COEFF_EPS);
        self.terms = merged;
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::from_terms(self.terms.iter().map(|t| {
            NormalTerm::new(t.coeff * c, t.xpart.clone(), t.shift.clone())
        }))
    }

    /// Canonical product. The only work is commuting each shift word past
    /// the x-monomial to its right, one binomial expansion per mode.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out: Vec<NormalTerm> = Vec::new();
        for a in &self.terms {
            for b in &other.terms {
                let coeff = a.coeff * b.coeff;
                let shift = a.shift.mul(&b.shift);
                for (c, mono) in shift_past_monomial(&a.shift, &b.xpart) {
                    out.push(NormalTerm::new(
                        coeff * c,
                        a.xpart.mul(&mono),
                        shift.clone(),
                    ));
                }
            }
        }
        Self::from_terms(out)
    }

    /// Conjugate-linear involution with `(AB)^† = B^† A^†`.
    pub fn adjoint(&self) -> Self {
        let mut out: Vec<NormalTerm> = Vec::new();
        for t in &self.terms {
            // (c x^n W)^† = c̄ W^{-1} x^n, then renormalize by commuting
            // W^{-1} back past x^n.
            let inv = t.shift.adjoint();
            for (c, mono) in shift_past_monomial(&inv, &t.xpart) {
                out.push(NormalTerm::new(t.coeff.conj() * c, mono, inv.clone()));
            }
        }
        Self::from_terms(out)
    }

    /// True iff `a^† = a` up to a tolerance scaled to the expression's
    /// coefficients.
    pub fn is_hermitian(&self) -> bool {
        let diff = self - &self.adjoint();
        diff.max_abs_coeff() <= 1e-12 * (1.0 + self.max_abs_coeff())
    }

    /// Max coefficient modulus of `self − other`; metric used by tests on
    /// float-valued expressions.
    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).max_abs_coeff()
    }
}

/// Expansion of `W · x^b` into normal order: per mode,
/// `T^m x^b = (x + m)^b T^m`, so the result is a real combination of
/// monomials sharing the word `W` (which the caller re-attaches).
fn shift_past_monomial(shift: &ShiftWord, mono: &XMonomial) -> Vec<(f64, XMonomial)> {
    let mut acc: Vec<(f64, XMonomial)> = vec![(1.0, XMonomial::one())];
    for (mode, b) in mono.powers() {
        let m = shift.exponent(mode);
        if m == 0 {
            for (_, xm) in acc.iter_mut() {
                *xm = xm.mul(&XMonomial::single(mode, b));
            }
            continue;
        }
        // (x + m)^b = Σ_r C(b,r) m^{b-r} x^r
        let mut next = Vec::with_capacity(acc.len() * (b as usize + 1));
        for r in 0..=b {
            let w = binomial(b, r) * (m as f64).powi((b - r) as i32);
            for (c, xm) in &acc {
                next.push((c * w, xm.mul(&XMonomial::single(mode, r))));
            }
        }
        acc = next;
    }
    acc
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k.min(n));
    let mut out = 1.0f64;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

impl std::ops::Add for &OperatorExpr {
    type Output = OperatorExpr;
    fn add(self, rhs: &OperatorExpr) -> OperatorExpr {
        OperatorExpr::from_terms(self.terms.iter().chain(rhs.terms.iter()).cloned())
    }
}

impl std::ops::Sub for &OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: &OperatorExpr) -> OperatorExpr {
        let negated = rhs.terms.iter().map(|t| {
            NormalTerm::new(-t.coeff, t.xpart.clone(), t.shift.clone())
        });
        OperatorExpr::from_terms(self.terms.iter().cloned().chain(negated))
    }
}

impl std::ops::Mul for &OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: &OperatorExpr) -> OperatorExpr {
        OperatorExpr::mul(self, rhs)
    }
}

impl OperatorExpr {
    fn neg(&self) -> Self {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl std::ops::Neg for &OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        OperatorExpr::neg(self)
    }
}
