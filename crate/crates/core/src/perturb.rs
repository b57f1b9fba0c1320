//! Trace and dimension shadow of perturbation: moduli, index, sphericality,
//! the sphericalizing weight, and the minimal index of a perturbation class.

use num_traits::Float;

use crate::error::{Error, Result};
use crate::fusion::FusionSystem;
use crate::weights::{solve_weight_space, SectorScope, WeightFunction};
use crate::DEFAULT_TOLERANCE;

/// One depth-1 constituent with its left and right dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Constituent<F> {
    pub id: String,
    pub dim_left: F,
    pub dim_right: F,
    pub mult: u32,
}

/// Dimension data over the depth-1 constituents of a generating bimodule.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionData<F> {
    constituents: Vec<Constituent<F>>,
}

impl<F: Float> DimensionData<F> {
    /// Validates positivity, multiplicities, and id uniqueness.
    pub fn new(constituents: Vec<Constituent<F>>) -> Result<Self> {
        if constituents.is_empty() {
            return Err(Error::InvalidSystem("empty constituent set".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &constituents {
            if !(c.dim_left > F::zero() && c.dim_left.is_finite()) {
                return Err(Error::InvalidSystem(format!(
                    "dim_left of `{}` is not positive",
                    c.id
                )));
            }
            if !(c.dim_right > F::zero() && c.dim_right.is_finite()) {
                return Err(Error::InvalidSystem(format!(
                    "dim_right of `{}` is not positive",
                    c.id
                )));
            }
            if c.mult == 0 {
                return Err(Error::InvalidSystem(format!("multiplicity of `{}` is 0", c.id)));
            }
            if !seen.insert(c.id.clone()) {
                return Err(Error::InvalidSystem(format!("duplicate constituent `{}`", c.id)));
            }
        }
        Ok(DimensionData { constituents })
    }

    pub fn constituents(&self) -> &[Constituent<F>] {
        &self.constituents
    }
}

/// The loop parameters (δ₋, δ₊).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Modulus<F> {
    pub minus: F,
    pub plus: F,
}

impl<F: Float> Modulus<F> {
    pub fn index(&self) -> F {
        self.minus * self.plus
    }

    pub fn is_spherical(&self, tolerance: F) -> bool {
        (self.minus - self.plus).abs() <= tolerance * self.minus.max(self.plus)
    }
}

/// δ₋ = Σ mult·dim_left, δ₊ = Σ mult·dim_right.
pub fn modulus_of<F: Float>(dims: &DimensionData<F>) -> Modulus<F> {
    let mut minus = F::zero();
    let mut plus = F::zero();
    for c in dims.constituents() {
        let m = F::from(c.mult).expect("small multiplicity fits any float");
        minus = minus + m * c.dim_left;
        plus = plus + m * c.dim_right;
    }
    Modulus { minus, plus }
}

/// Divide left dims and multiply right dims by the weight value.
pub fn perturb_dims<F: Float>(
    dims: &DimensionData<F>,
    w: &WeightFunction,
) -> Result<DimensionData<F>> {
    let mut out = Vec::with_capacity(dims.constituents().len());
    for c in dims.constituents() {
        let wv = w.value(&c.id)?;
        if !(wv > 0.0 && wv.is_finite()) {
            return Err(Error::NotAWeight(format!("w({}) = {wv} is not positive", c.id)));
        }
        let wf = F::from(wv).expect("weight value fits the scalar type");
        out.push(Constituent {
            id: c.id.clone(),
            dim_left: c.dim_left / wf,
            dim_right: c.dim_right * wf,
            mult: c.mult,
        });
    }
    DimensionData::new(out)
}

/// (δ₋, δ₊) ↦ (λ⁻¹δ₋, λδ₊); the index is untouched.
pub fn scalar_perturb<F: Float>(m: Modulus<F>, lambda: F) -> Result<Modulus<F>> {
    if !(lambda > F::zero() && lambda.is_finite()) {
        return Err(Error::NonPositiveScalar(lambda.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(Modulus { minus: m.minus / lambda, plus: m.plus * lambda })
}

/// Scalar perturbation by √(δ₋/δ₊), landing on (√(δ₋δ₊), √(δ₋δ₊)).
pub fn normalize<F: Float>(m: Modulus<F>) -> (F, Modulus<F>) {
    let lambda = (m.minus / m.plus).sqrt();
    let balanced = (m.minus * m.plus).sqrt();
    (lambda, Modulus { minus: balanced, plus: balanced })
}

/// Left dims equal right dims, constituent by constituent.
pub fn is_spherical<F: Float>(dims: &DimensionData<F>, tolerance: F) -> bool {
    dims.constituents().iter().all(|c| {
        (c.dim_left - c.dim_right).abs() <= tolerance * c.dim_left.max(c.dim_right)
    })
}

/// (Σ mult·√(dim_left·dim_right))², the infimum of the index over the class.
pub fn min_index<F: Float>(dims: &DimensionData<F>) -> F {
    let mut s = F::zero();
    for c in dims.constituents() {
        let m = F::from(c.mult).expect("small multiplicity fits any float");
        s = s + m * (c.dim_left * c.dim_right).sqrt();
    }
    s * s
}

/// The unique weight w(s) = √(dim_left/dim_right) that makes the perturbed
/// dims spherical; with a system attached the candidate is realized inside
/// the weight space and rejected when it does not fit.
pub fn sphericalizing_weight<F: Float>(
    dims: &DimensionData<F>,
    system: Option<&FusionSystem>,
) -> Result<WeightFunction> {
    let logs: Vec<(String, f64)> = dims
        .constituents()
        .iter()
        .map(|c| {
            let dl = c.dim_left.to_f64().unwrap_or(f64::NAN);
            let dr = c.dim_right.to_f64().unwrap_or(f64::NAN);
            (c.id.clone(), 0.5 * (dl.ln() - dr.ln()))
        })
        .collect();
    let Some(sys) = system else {
        let values = logs.iter().map(|(id, x)| (id.clone(), x.exp())).collect();
        return Ok(WeightFunction::from_values(values));
    };

    let basis = solve_weight_space(sys, &SectorScope::Full)?;
    let var_pos: std::collections::BTreeMap<usize, usize> = basis
        .variables
        .iter()
        .enumerate()
        .map(|(k, &i)| (i, k))
        .collect();
    // Target coordinates: one per non-unit constituent; unit constituents are
    // pinned to log 0 and only need a consistency check.
    let mut coords = Vec::new();
    let mut y = Vec::new();
    for (id, x) in &logs {
        let i = sys.require(id)?;
        if sys.object(i).unit {
            if x.abs() > DEFAULT_TOLERANCE {
                return Err(Error::NotAWeight(format!(
                    "unit constituent `{id}` needs weight {}",
                    x.exp()
                )));
            }
        } else {
            coords.push(var_pos[&i]);
            y.push(*x);
        }
    }
    // Orthonormalize the basis restricted to the target coordinates, carrying
    // the full vectors along, then project the candidate.
    let nvars = basis.variables.len();
    let mut restricted: Vec<Vec<f64>> = Vec::new();
    let mut full: Vec<Vec<f64>> = Vec::new();
    for v in &basis.basis {
        let fv: Vec<f64> = v
            .iter()
            .map(|x| num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::NAN))
            .collect();
        let mut rv: Vec<f64> = coords.iter().map(|&k| fv[k]).collect();
        let mut fv = fv;
        for (rq, fq) in restricted.iter().zip(&full) {
            let proj: f64 = rv.iter().zip(rq).map(|(a, b)| a * b).sum();
            for (a, b) in rv.iter_mut().zip(rq) {
                *a -= proj * b;
            }
            for (a, b) in fv.iter_mut().zip(fq) {
                *a -= proj * b;
            }
        }
        let norm = rv.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for a in &mut rv {
                *a /= norm;
            }
            for a in &mut fv {
                *a /= norm;
            }
            restricted.push(rv);
            full.push(fv);
        }
    }
    let mut y_hat = vec![0.0; y.len()];
    let mut x_full = vec![0.0; nvars];
    for (rq, fq) in restricted.iter().zip(&full) {
        let proj: f64 = y.iter().zip(rq).map(|(a, b)| a * b).sum();
        for (a, b) in y_hat.iter_mut().zip(rq) {
            *a += proj * b;
        }
        for (a, b) in x_full.iter_mut().zip(fq) {
            *a += proj * b;
        }
    }
    for (want, got) in y.iter().zip(&y_hat) {
        if (want - got).abs() > DEFAULT_TOLERANCE {
            return Err(Error::NotAWeight(format!(
                "candidate log {want} is outside the weight space (nearest {got})"
            )));
        }
    }
    let mut values = std::collections::BTreeMap::new();
    for i in 0..sys.objects().len() {
        let id = sys.object(i).id.clone();
        match var_pos.get(&i) {
            Some(&k) => values.insert(id, x_full[k].exp()),
            None => values.insert(id, 1.0),
        };
    }
    Ok(WeightFunction::from_values(values))
}

/// Everything the CLI reports about one perturbation.
#[derive(Debug, Clone)]
pub struct PerturbationReport<F> {
    pub perturbed: DimensionData<F>,
    pub modulus: Modulus<F>,
    pub index: F,
    pub spherical: bool,
    pub sphericalizing: Option<WeightFunction>,
    pub min_index: F,
}

/// Report for a perturbation by an explicit weight.
pub fn perturb_report<F: Float>(
    dims: &DimensionData<F>,
    w: &WeightFunction,
    tolerance: F,
) -> Result<PerturbationReport<F>> {
    let perturbed = perturb_dims(dims, w)?;
    let modulus = modulus_of(&perturbed);
    Ok(PerturbationReport {
        index: modulus.index(),
        spherical: is_spherical(&perturbed, tolerance),
        sphericalizing: None,
        min_index: min_index(dims),
        perturbed,
        modulus,
    })
}

/// Report for the spherical lowest-index member of the class.
pub fn spherical_report<F: Float>(
    dims: &DimensionData<F>,
    system: Option<&FusionSystem>,
    tolerance: F,
) -> Result<PerturbationReport<F>> {
    let w = sphericalizing_weight(dims, system)?;
    let perturbed = perturb_dims(dims, &w)?;
    let modulus = modulus_of(&perturbed);
    Ok(PerturbationReport {
        index: modulus.index(),
        spherical: is_spherical(&perturbed, tolerance),
        sphericalizing: Some(w),
        min_index: min_index(dims),
        perturbed,
        modulus,
    })
}
