//! Weight functions: constraint assembly, exact kernel solving, the TPC
//! verdict, even-to-full extension, word weights, and central element
//! coefficients.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fusion::{FusionSystem, ObjectIdx};
use crate::linalg;
use crate::DEFAULT_TOLERANCE;

/// Which objects participate in a constraint system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SectorScope {
    Full,
    /// Only objects whose two labels both equal the named algebra.
    EvenOnly(String),
}

/// Cap on assembled rows.
pub const MAX_ROWS: usize = 200_000;
/// Cap on the composable-pair scan used for gap detection.
const MAX_PAIRS: usize = 4_000_000;
/// Cap on the elimination workload.
const MAX_CELLS: usize = 50_000_000;

/// Integer rows of the log-linearized containment equations x_a + x_b = x_c.
#[derive(Debug, Clone)]
pub struct LogConstraintSystem {
    pub scope: SectorScope,
    /// Non-unit in-scope objects carrying a variable, ascending.
    pub variables: Vec<ObjectIdx>,
    /// Deduplicated nonzero rows over `variables`.
    pub rows: Vec<Vec<i64>>,
    /// Composable in-scope pairs whose entry is missing or truncated.
    pub skipped: Vec<(ObjectIdx, ObjectIdx)>,
    /// Containment relations inspected.
    pub containments: usize,
}

/// Collect one row per known in-scope containment; units are pinned to 0 by
/// omission, so rows mention only non-unit variables.
pub fn assemble_constraints(sys: &FusionSystem, scope: &SectorScope) -> Result<LogConstraintSystem> {
    let scope_alg = match scope {
        SectorScope::Full => None,
        SectorScope::EvenOnly(l) => Some(
            sys.algebra_index(l)
                .ok_or_else(|| Error::InvalidSystem(format!("unknown algebra label `{l}`")))?,
        ),
    };
    let in_scope = |i: ObjectIdx| match scope_alg {
        None => true,
        Some(a) => sys.object(i).left == a && sys.object(i).right == a,
    };
    let variables: Vec<ObjectIdx> = (0..sys.objects().len())
        .filter(|&i| in_scope(i) && !sys.object(i).unit)
        .collect();
    let var_pos: BTreeMap<ObjectIdx, usize> =
        variables.iter().enumerate().map(|(k, &i)| (i, k)).collect();

    // Composable in-scope pairs, bucketed by the joining label.
    let mut by_left: BTreeMap<usize, Vec<ObjectIdx>> = BTreeMap::new();
    for i in 0..sys.objects().len() {
        if in_scope(i) {
            by_left.entry(sys.object(i).left).or_default().push(i);
        }
    }
    let mut pair_count = 0usize;
    for i in 0..sys.objects().len() {
        if in_scope(i) {
            pair_count += by_left.get(&sys.object(i).right).map_or(0, Vec::len);
        }
    }
    if pair_count > MAX_PAIRS {
        return Err(Error::LimitExceeded(format!(
            "{pair_count} composable pairs, limit {MAX_PAIRS}"
        )));
    }

    let mut rows: BTreeSet<Vec<i64>> = BTreeSet::new();
    let mut skipped = Vec::new();
    let mut containments = 0usize;
    for a in 0..sys.objects().len() {
        if !in_scope(a) {
            continue;
        }
        let Some(bucket) = by_left.get(&sys.object(a).right) else { continue };
        for &b in bucket {
            let Some(e) = sys.entry(a, b) else {
                skipped.push((a, b));
                continue;
            };
            if e.truncated {
                skipped.push((a, b));
            }
            for &(c, _) in &e.constituents {
                if !in_scope(c) {
                    continue;
                }
                containments += 1;
                let mut row = vec![0i64; variables.len()];
                for (obj, sign) in [(a, 1), (b, 1), (c, -1)] {
                    if let Some(&k) = var_pos.get(&obj) {
                        row[k] += sign;
                    }
                }
                if row.iter().any(|&x| x != 0) {
                    rows.insert(row);
                    if rows.len() > MAX_ROWS {
                        return Err(Error::LimitExceeded(format!("more than {MAX_ROWS} rows")));
                    }
                }
            }
        }
    }
    if rows.len() * variables.len() > MAX_CELLS {
        return Err(Error::LimitExceeded("elimination workload too large".into()));
    }
    Ok(LogConstraintSystem {
        scope: scope.clone(),
        variables,
        rows: rows.into_iter().collect(),
        skipped,
        containments,
    })
}

/// Canonical integer basis of the multiplicative solution set in log space.
#[derive(Debug, Clone)]
pub struct WeightSpaceBasis {
    pub scope: SectorScope,
    pub variables: Vec<ObjectIdx>,
    /// Exponent vectors over `variables`: content 1, positive leading entry,
    /// sorted lexicographically.
    pub basis: Vec<Vec<BigInt>>,
    pub dimension: usize,
    pub skipped: Vec<(ObjectIdx, ObjectIdx)>,
}

impl WeightSpaceBasis {
    /// Basis vector as an id-to-exponent map, zero entries omitted.
    pub fn vector_map(&self, sys: &FusionSystem, k: usize) -> BTreeMap<String, BigInt> {
        self.variables
            .iter()
            .zip(&self.basis[k])
            .filter(|(_, x)| !x.is_zero())
            .map(|(&i, x)| (sys.object(i).id.clone(), x.clone()))
            .collect()
    }
}

/// Exact kernel of the assembled constraints.
pub fn solve_weight_space(sys: &FusionSystem, scope: &SectorScope) -> Result<WeightSpaceBasis> {
    let lcs = assemble_constraints(sys, scope)?;
    let int_rows: Vec<Vec<BigInt>> = lcs
        .rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let (_rank, basis) = linalg::kernel(int_rows, lcs.variables.len());
    let dimension = basis.len();
    #[cfg(debug_assertions)]
    for v in &basis {
        for r in &lcs.rows {
            let big: Vec<BigInt> = r.iter().map(|&x| BigInt::from(x)).collect();
            debug_assert!(linalg::dot(&big, v).is_zero(), "basis vector misses a row");
        }
    }
    Ok(WeightSpaceBasis {
        scope: lcs.scope,
        variables: lcs.variables,
        basis,
        dimension,
        skipped: lcs.skipped,
    })
}

/// Outcome of the TPC decision.
#[derive(Debug, Clone)]
pub struct TpcVerdict {
    pub tpc: bool,
    /// True when skipped constraints at this truncation depth could still
    /// force a smaller kernel.
    pub provisional: bool,
    /// Even weight-space dimension per algebra label.
    pub even_dimensions: Vec<(String, usize)>,
    /// Nontrivial even exponent vector when not TPC, zero entries omitted.
    pub witness: Option<BTreeMap<String, BigInt>>,
}

impl TpcVerdict {
    /// The verdict as a plain boolean, refusing depth-conditional answers.
    pub fn require_definitive(&self) -> Result<bool> {
        if self.provisional {
            Err(Error::AmbiguousTruncation(
                "skipped constraints could change the verdict".into(),
            ))
        } else {
            Ok(self.tpc)
        }
    }
}

/// Decide the trivial perturbation class: every even weight space must be
/// zero-dimensional, and the per-algebra dimensions must agree.
pub fn is_tpc(sys: &FusionSystem) -> Result<TpcVerdict> {
    let mut even_dimensions = Vec::new();
    let mut witness = None;
    let mut any_skipped = false;
    let mut dims: BTreeSet<usize> = BTreeSet::new();
    for label in sys.algebras() {
        let b = solve_weight_space(sys, &SectorScope::EvenOnly(label.clone()))?;
        any_skipped |= !b.skipped.is_empty();
        dims.insert(b.dimension);
        if witness.is_none() && b.dimension > 0 {
            witness = Some(b.vector_map(sys, 0));
        }
        even_dimensions.push((label.clone(), b.dimension));
    }
    if dims.len() > 1 {
        return Err(Error::TheoremViolation(format!(
            "even weight-space dimensions disagree across algebras: {even_dimensions:?}"
        )));
    }
    let dim = dims.first().copied().unwrap_or(0);
    let tpc = dim == 0;
    Ok(TpcVerdict {
        tpc,
        // A zero kernel only shrinks under extra rows, so TPC=true is final.
        provisional: !tpc && any_skipped,
        even_dimensions,
        witness,
    })
}

/// Exact multiplicative form w(v) = base^{exponents[v]}.
#[derive(Debug, Clone)]
pub struct ExactLog {
    pub base: f64,
    pub exponents: BTreeMap<String, BigRational>,
}

/// A positive weight on (a subset of) the objects, optionally with exact logs.
#[derive(Debug, Clone)]
pub struct WeightFunction {
    pub values: BTreeMap<String, f64>,
    pub exact: Option<ExactLog>,
}

fn rat_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

impl WeightFunction {
    /// The weight that is 1 everywhere.
    pub fn trivial(sys: &FusionSystem) -> Self {
        let values = sys.objects().iter().map(|o| (o.id.clone(), 1.0)).collect();
        let exponents = sys
            .objects()
            .iter()
            .map(|o| (o.id.clone(), BigRational::zero()))
            .collect();
        WeightFunction { values, exact: Some(ExactLog { base: 1.0, exponents }) }
    }

    /// Raw float values; no exact form.
    pub fn from_values(values: BTreeMap<String, f64>) -> Self {
        WeightFunction { values, exact: None }
    }

    /// Exponentiate a basis vector of `basis` at the chosen base.
    pub fn from_basis_vector(
        sys: &FusionSystem,
        basis: &WeightSpaceBasis,
        k: usize,
        base: f64,
    ) -> Result<Self> {
        if !(base > 0.0 && base.is_finite()) {
            return Err(Error::NonPositiveScalar(base));
        }
        if k >= basis.basis.len() {
            return Err(Error::InvalidSystem(format!(
                "basis vector {k} of {} requested",
                basis.basis.len()
            )));
        }
        let in_scope = |i: ObjectIdx| match &basis.scope {
            SectorScope::Full => true,
            SectorScope::EvenOnly(l) => {
                let a = sys.algebra_index(l);
                Some(sys.object(i).left) == a && Some(sys.object(i).right) == a
            }
        };
        let mut exponents: BTreeMap<String, BigRational> = BTreeMap::new();
        for i in 0..sys.objects().len() {
            if in_scope(i) {
                exponents.insert(sys.object(i).id.clone(), BigRational::zero());
            }
        }
        for (&i, x) in basis.variables.iter().zip(&basis.basis[k]) {
            exponents.insert(
                sys.object(i).id.clone(),
                BigRational::from_integer(x.clone()),
            );
        }
        let values = exponents
            .iter()
            .map(|(id, e)| (id.clone(), base.powf(rat_f64(e))))
            .collect();
        Ok(WeightFunction { values, exact: Some(ExactLog { base, exponents }) })
    }

    pub fn value(&self, id: &str) -> Result<f64> {
        self.values
            .get(id)
            .copied()
            .ok_or_else(|| Error::MissingWeight(id.to_string()))
    }

    pub fn exponent(&self, id: &str) -> Option<&BigRational> {
        self.exact.as_ref().and_then(|e| e.exponents.get(id))
    }

    /// Check the weight laws on everything the value set covers: units map to
    /// 1, duals invert, and every recorded containment multiplies. Exact when
    /// the exact form is present, within `tol` otherwise.
    pub fn verify(&self, sys: &FusionSystem, tol: f64) -> Result<()> {
        for (id, &v) in &self.values {
            sys.require(id)?;
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::NotAWeight(format!("w({id}) = {v} is not positive")));
            }
        }
        let exact = self.exact.as_ref();
        let exp_of = |id: &str| exact.and_then(|e| e.exponents.get(id));
        for (id, &v) in &self.values {
            let i = sys.require(id)?;
            if sys.object(i).unit {
                match exp_of(id) {
                    Some(e) => {
                        if !e.is_zero() {
                            return Err(Error::NotAWeight(format!("unit `{id}` has exponent {e}")));
                        }
                    }
                    None => {
                        if (v - 1.0).abs() > tol {
                            return Err(Error::NotAWeight(format!("w({id}) = {v} on a unit")));
                        }
                    }
                }
            }
            let dual = &sys.object(sys.object(i).dual).id;
            let dv = self.value(dual)?;
            match (exp_of(id), exp_of(dual)) {
                (Some(a), Some(b)) => {
                    if !(a + b).is_zero() {
                        return Err(Error::NotAWeight(format!(
                            "exponents of `{id}` and `{dual}` do not cancel"
                        )));
                    }
                }
                _ => {
                    if (v * dv - 1.0).abs() > tol {
                        return Err(Error::NotAWeight(format!(
                            "w({id})·w({dual}) = {} ≠ 1",
                            v * dv
                        )));
                    }
                }
            }
        }
        for (&(a, b), e) in sys.entries() {
            let (ia, ib) = (&sys.object(a).id, &sys.object(b).id);
            let (Some(&wa), Some(&wb)) = (self.values.get(ia), self.values.get(ib)) else {
                continue;
            };
            for &(c, _) in &e.constituents {
                let ic = &sys.object(c).id;
                let wc = self.value(ic)?;
                match (exp_of(ia), exp_of(ib), exp_of(ic)) {
                    (Some(xa), Some(xb), Some(xc)) => {
                        if &(xa + xb) != xc {
                            return Err(Error::NotAWeight(format!(
                                "exponent law fails on `{ic}` ≤ `{ia}` ⊗ `{ib}`"
                            )));
                        }
                    }
                    _ => {
                        if (wa * wb / wc - 1.0).abs() > tol {
                            return Err(Error::NotAWeight(format!(
                                "w({ia})·w({ib}) = {} but w({ic}) = {wc}",
                                wa * wb
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Extend an even-scope weight to the whole bicategory, pinning the
/// distinguished odd sector scale; log-space propagation to a fixpoint.
pub fn extend_even_weight(
    sys: &FusionSystem,
    even: &WeightFunction,
    odd_scale: f64,
) -> Result<WeightFunction> {
    if !(odd_scale > 0.0 && odd_scale.is_finite()) {
        return Err(Error::NonPositiveScalar(odd_scale));
    }
    let n = sys.objects().len();
    let mut x: Vec<Option<f64>> = vec![None; n];
    for i in 0..n {
        if sys.object(i).unit {
            x[i] = Some(0.0);
        }
    }
    for (id, &v) in &even.values {
        let i = sys.require(id)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::NotAWeight(format!("w({id}) = {v} is not positive")));
        }
        let lv = v.ln();
        if let Some(prev) = x[i] {
            if (prev - lv).abs() > DEFAULT_TOLERANCE {
                return Err(Error::NoExtension(format!("even weight conflicts on `{id}`")));
            }
        }
        x[i] = Some(lv);
    }
    // Distinguished odd object: the generator when odd, else the first odd one.
    let odd0 = sys
        .generator()
        .filter(|&g| !sys.is_even(g))
        .or_else(|| (0..n).find(|&i| !sys.is_even(i) && x[i].is_none()));
    match odd0 {
        Some(o) => {
            if x[o].is_none() {
                x[o] = Some(odd_scale.ln());
            }
        }
        None => {
            // No odd sector: the even weight already covers its world.
            if (0..n).all(|i| x[i].is_some() || !sys.is_even(i)) {
                let mut out = even.clone();
                for i in 0..n {
                    if let Some(v) = x[i] {
                        out.values.entry(sys.object(i).id.clone()).or_insert(v.exp());
                    }
                }
                return Ok(out);
            }
        }
    }
    loop {
        let mut changed = false;
        for (&(a, b), e) in sys.entries() {
            for &(c, _) in &e.constituents {
                match (x[a], x[b], x[c]) {
                    (Some(xa), Some(xb), Some(xc)) => {
                        if (xa + xb - xc).abs() > DEFAULT_TOLERANCE {
                            return Err(Error::NoExtension(format!(
                                "containment `{}` ≤ `{}` ⊗ `{}` is inconsistent",
                                sys.object(c).id,
                                sys.object(a).id,
                                sys.object(b).id
                            )));
                        }
                    }
                    (Some(xa), Some(xb), None) => {
                        x[c] = Some(xa + xb);
                        changed = true;
                    }
                    (Some(xa), None, Some(xc)) => {
                        x[b] = Some(xc - xa);
                        changed = true;
                    }
                    (None, Some(xb), Some(xc)) => {
                        x[a] = Some(xc - xb);
                        changed = true;
                    }
                    _ => {}
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut values = BTreeMap::new();
    for i in 0..n {
        match x[i] {
            Some(v) => {
                values.insert(sys.object(i).id.clone(), v.exp());
            }
            None => {
                return Err(Error::NoExtension(format!(
                    "`{}` is not determined by the even weight and the odd scale",
                    sys.object(i).id
                )));
            }
        }
    }
    Ok(WeightFunction { values, exact: None })
}

/// Starting sign of an alternating word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Alternating-exponent word weight: ∏ᵢ w(sᵢ)^{±1}, +1 first for `Plus`.
pub fn weight_of_word(w: &WeightFunction, sign: Sign, word: &[String]) -> Result<f64> {
    if word.is_empty() {
        return Err(Error::IncomposableWord("empty word".into()));
    }
    let mut acc = 1.0;
    for (i, id) in word.iter().enumerate() {
        let v = w.value(id)?;
        let odd_position = i % 2 == 0;
        let positive = match sign {
            Sign::Plus => odd_position,
            Sign::Minus => !odd_position,
        };
        acc *= if positive { v } else { 1.0 / v };
    }
    Ok(acc)
}

/// Exact exponent of the word weight, when the weight has an exact form
/// covering every letter.
pub fn word_exponent(w: &WeightFunction, sign: Sign, word: &[String]) -> Option<BigRational> {
    let exact = w.exact.as_ref()?;
    let mut acc = BigRational::zero();
    for (i, id) in word.iter().enumerate() {
        let e = exact.exponents.get(id)?;
        let odd_position = i % 2 == 0;
        let positive = match sign {
            Sign::Plus => odd_position,
            Sign::Minus => !odd_position,
        };
        if positive {
            acc += e;
        } else {
            acc -= e;
        }
    }
    Some(acc)
}

/// Coefficients of the central element at one sign and depth.
#[derive(Debug, Clone)]
pub struct CentralElementCoeffs {
    pub sign: Sign,
    pub depth: u32,
    /// Object id to coefficient, over the objects at that depth.
    pub coeffs: BTreeMap<String, f64>,
}

/// Walk the alternating generator word to `depth`, checking the product law
/// coeff(v₃) = coeff(v₁)·w(letter) at every step.
pub fn central_element_coeffs(
    sys: &FusionSystem,
    w: &WeightFunction,
    sign: Sign,
    depth: u32,
) -> Result<CentralElementCoeffs> {
    let g = sys.generator().ok_or(Error::MissingGenerator)?;
    let first = match sign {
        Sign::Plus => g,
        Sign::Minus => sys.object(g).dual,
    };
    let second = sys.object(first).dual;
    let unit = sys
        .unit_of(sys.object(first).left)
        .ok_or_else(|| Error::InvalidSystem("no unit at the generator's left label".into()))?;
    let mut level: BTreeSet<ObjectIdx> = BTreeSet::from([unit]);
    for step in 1..=depth {
        let letter = if step % 2 == 1 { first } else { second };
        let letter_id = &sys.object(letter).id;
        let w_letter = w.value(letter_id)?;
        let mut next = BTreeSet::new();
        for &v in &level {
            let vid = &sys.object(v).id;
            let e = sys.entry(v, letter).ok_or_else(|| {
                Error::TruncationExhausted(format!("no entry (`{vid}`, `{letter_id}`)"))
            })?;
            if e.truncated {
                return Err(Error::TruncationExhausted(format!(
                    "entry (`{vid}`, `{letter_id}`) is truncated"
                )));
            }
            let wv = w.value(vid)?;
            for &(c, _) in &e.constituents {
                let cid = &sys.object(c).id;
                let wc = w.value(cid)?;
                let exact_ok = match (w.exponent(vid), w.exponent(letter_id), w.exponent(cid)) {
                    (Some(a), Some(b), Some(cc)) => Some(&(a + b) == cc),
                    _ => None,
                };
                let ok = exact_ok.unwrap_or_else(|| (wv * w_letter / wc - 1.0).abs() <= DEFAULT_TOLERANCE);
                if !ok {
                    return Err(Error::InconsistentWeight(format!(
                        "coeff(`{cid}`) ≠ coeff(`{vid}`)·w(`{letter_id}`)"
                    )));
                }
                next.insert(c);
            }
        }
        level = next;
    }
    let mut coeffs = BTreeMap::new();
    for &v in &level {
        let id = sys.object(v).id.clone();
        let val = w.value(&id)?;
        if !(val > 0.0 && val.is_finite()) {
            return Err(Error::InconsistentWeight(format!("coefficient of `{id}` is {val}")));
        }
        coeffs.insert(id, val);
    }
    Ok(CentralElementCoeffs { sign, depth, coeffs })
}
