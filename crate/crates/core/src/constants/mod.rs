//! Leading constants: residues of the zeta factors at `s = a`, the
//! regularized Euler product, the archimedean integral and the correction
//! at the finite primes of `S`.
//!
//! Reference closed forms for the same counts are computed alongside by [`p1_constant_paper`], [`p1_campana_constant`]
//! and [`blowup_constant_paper`] so that they can be compared with the
//! assembled constant and with fitted counts.

mod euler;
mod zeta;

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::localfactors::{
    archimedean_blowup, archimedean_p1, decay_exponent, denef_factor, normalized_factor, LocalFactorError,
    LocalFactorInput,
};
use crate::orbifold::{ModelKind, OrbifoldModel, PlaceSet, Weight};

pub use euler::{truncated_euler_product, EulerProduct, EulerProductSpec};
pub use zeta::riemann_zeta;

/// Default prime cutoff for truncated products.
pub const DEFAULT_CUTOFF: u64 = 1_000_000;

/// Slack subtracted from the decay exponent when bounding the tail.
const DECAY_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConstantError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    LocalFactor(#[from] LocalFactorError),
}

fn big_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Model name and integer parameters as they appear on the command line.
pub fn model_params(model: &OrbifoldModel) -> (String, BTreeMap<String, u32>) {
    let m = |i: usize| model.components[i].weight.finite().unwrap_or(0);
    let mut params = BTreeMap::new();
    let name = match model.kind {
        ModelKind::ProjectiveSpace { n: 1 } => {
            params.insert("m".into(), m(0));
            "p1".to_string()
        }
        ModelKind::ProjectiveSpace { n } => {
            params.insert("n".into(), n);
            params.insert("m".into(), m(0));
            "pn".to_string()
        }
        ModelKind::BlowupP2 => {
            params.insert("m1".into(), m(0));
            params.insert("m2".into(), m(1));
            "blowup".to_string()
        }
        ModelKind::Custom(ref name) => name.clone(),
    };
    (name, params)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidueFactor {
    pub label: String,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SFactor {
    pub p: u64,
    pub value: f64,
}

/// How the regularized product entering the total was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductMethod {
    /// Closed form in zeta values, confirmed by the truncated product.
    ZetaIdentity,
    Truncated,
}

/// Every ingredient of `c`, with `total` their product; `finite_product`
/// is known to within `tail_bound`, and the total to within `total_bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantBreakdown {
    pub model: String,
    pub params: BTreeMap<String, u32>,
    pub s: Vec<u64>,
    pub a: String,
    pub a_value: f64,
    pub b: usize,
    pub residue_factors: Vec<ResidueFactor>,
    pub finite_product: f64,
    pub tail_bound: f64,
    pub product_method: ProductMethod,
    pub truncated_product: EulerProduct,
    pub archimedean: f64,
    pub archimedean_quadrature: f64,
    pub s_factors: Vec<SFactor>,
    pub total: f64,
    pub total_bound: f64,
    /// `total / (a·(b-1)!)`, the coefficient of `Bᵃ(log B)^{b-1}`.
    pub coefficient: f64,
    pub coefficient_bound: f64,
}

/// `∏_p` of the normalized factors at `s`, truncated at `cutoff`, with
/// `|f - 1| ≤ 2·#components·p^{-1-δ'}` bounding the tail.
pub fn normalized_product(model: &OrbifoldModel, s: f64, cutoff: u64) -> Result<EulerProduct, ConstantError> {
    let delta = decay_exponent(model, s)? - DECAY_MARGIN;
    let factor = |p: u64| normalized_factor(model, p, s).map_err(ConstantError::from);
    truncated_euler_product(&EulerProductSpec {
        factor: &factor,
        cutoff,
        sigma: 1.0 + delta,
        c: 2.0 * model.components.len() as f64,
    })
}

/// The regularized product in closed form, where the normalized factors
/// are known polynomials in `1/p` (at `s = a` on the built-in models).
fn product_identity(model: &OrbifoldModel) -> Result<Option<f64>, ConstantError> {
    Ok(match model.kind {
        ModelKind::ProjectiveSpace { n } => Some(1.0 / riemann_zeta(n as f64 + 1.0)?),
        ModelKind::BlowupP2 => Some((6.0 / (PI * PI)).powi(2)),
        ModelKind::Custom(_) => None,
    })
}

/// `lim_{s→a} (s - a) ζ(m(sλ - ρ + 1)) = 1/(mλ)`, after checking that the
/// zeta argument is exactly 1 at `s = a`.
fn residue_factor(model: &OrbifoldModel, label: &str, a: &BigRational) -> Result<ResidueFactor, ConstantError> {
    let c = model.component(label).expect("critical label belongs to the model");
    let Weight::Finite(m) = c.weight else {
        return Err(ConstantError::InvalidArgument(format!("component {label} has infinite weight")));
    };
    let m_big = BigRational::from_integer(BigInt::from(m));
    let arg = &m_big * (a * &c.lambda - BigRational::from_integer(BigInt::from(c.rho)) + BigRational::one());
    if !arg.is_one() {
        return Err(ConstantError::Domain(format!(
            "zeta argument of {label} at s = a is {arg}, not 1"
        )));
    }
    Ok(ResidueFactor {
        label: label.to_string(),
        value: big_to_f64(&(BigRational::one() / (m_big * &c.lambda))),
    })
}

/// Ratio of the local factor at `p ∈ S` to the factor outside `S` that the
/// regularized product already contains.
pub fn s_factor(model: &OrbifoldModel, p: u64, s: f64) -> Result<f64, ConstantError> {
    let at = |in_s| denef_factor(&LocalFactorInput { model, p, s, in_s });
    Ok(at(true)? / at(false)?)
}

pub fn leading_constant(model: &OrbifoldModel, s_set: &PlaceSet, cutoff: u64) -> Result<ConstantBreakdown, ConstantError> {
    let a = model.a_invariant();
    let a_value = big_to_f64(&a);
    let b = model.b_invariant();
    let residue_factors = model
        .critical_set()
        .iter()
        .map(|label| residue_factor(model, label, &a))
        .collect::<Result<Vec<_>, _>>()?;

    let truncated = normalized_product(model, a_value, cutoff)?;
    let (finite_product, tail_bound, product_method) = match product_identity(model)? {
        Some(exact) if truncated.contains(exact) => {
            (exact, 4.0 * f64::EPSILON * exact, ProductMethod::ZetaIdentity)
        }
        _ => (truncated.value, truncated.tail_bound, ProductMethod::Truncated),
    };

    let arch = match model.kind {
        ModelKind::ProjectiveSpace { n } => archimedean_p1(n, a_value)?,
        ModelKind::BlowupP2 => {
            let m = |i: usize| model.components[i].weight.finite().unwrap_or(0);
            archimedean_blowup(m(0), m(1), a_value)?
        }
        ModelKind::Custom(ref name) => {
            return Err(ConstantError::InvalidArgument(format!("no archimedean integral for {name}")))
        }
    };

    let s_factors = s_set
        .finite_primes()
        .map(|p| Ok(SFactor { p, value: s_factor(model, p, a_value)? }))
        .collect::<Result<Vec<_>, ConstantError>>()?;

    let residues: f64 = residue_factors.iter().map(|r| r.value).product();
    let s_product: f64 = s_factors.iter().map(|f| f.value).product();
    let total = residues * finite_product * arch.closed_form * s_product;
    let terms = (residue_factors.len() + s_factors.len() + 2) as f64;
    let total_bound = total * (tail_bound / finite_product) + 4.0 * terms * f64::EPSILON * total;
    let scale = a_value * (1..b).product::<usize>() as f64;
    let (name, params) = model_params(model);
    Ok(ConstantBreakdown {
        model: name,
        params,
        s: s_set.finite_primes().collect(),
        a: a.to_string(),
        a_value,
        b,
        residue_factors,
        finite_product,
        tail_bound,
        product_method,
        truncated_product: truncated,
        archimedean: arch.closed_form,
        archimedean_quadrature: arch.quadrature,
        s_factors,
        total,
        total_bound,
        coefficient: total / scale,
        coefficient_bound: total_bound / scale,
    })
}

/// `(1 - p^{-1-1/m}) / (1 - p^{-1/m} + p^{-1} - p^{-1-1/m})`, the Darmon
/// correction at a prime of `S` on ℙ¹.
pub fn p1_s_factor(p: u64, m: u32) -> f64 {
    let p = p as f64;
    let t = p.powf(-1.0 / m as f64);
    (1.0 - t / p) / (1.0 - t + 1.0 / p - t / p)
}

/// `(1 - p^{-1-1/m}) / (1 - p^{-1/m} + p^{-1} - p^{-2})`, the Campana
/// correction at a prime of `S` on ℙ¹.
pub fn campana_s_factor(p: u64, m: u32) -> f64 {
    let p = p as f64;
    let t = p.powf(-1.0 / m as f64);
    (1.0 - t / p) / (1.0 - t + 1.0 / p - 1.0 / (p * p))
}

/// Reference closed forms for the ℙ¹ Darmon constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct P1PaperValues {
    /// `12(m+1)/π² · ∏_S`, printed as the residue `c`.
    pub displayed_residue: f64,
    /// `2/ζ(2) · ∏_S`, printed as the coefficient of `B^{1+1/m}`.
    pub final_coefficient: f64,
    pub exponent: f64,
    pub s_product: f64,
    /// Whether `displayed_residue = a · final_coefficient`; false for every `m ≥ 2`.
    pub residue_consistent: bool,
}

pub fn p1_constant_paper(m: u32, s_set: &PlaceSet) -> Result<P1PaperValues, ConstantError> {
    if m == 0 {
        return Err(ConstantError::InvalidArgument("m must be >= 1".into()));
    }
    let s_product: f64 = s_set.finite_primes().map(|p| p1_s_factor(p, m)).product();
    let displayed_residue = 12.0 * (m + 1) as f64 / (PI * PI) * s_product;
    let final_coefficient = 2.0 / riemann_zeta(2.0)? * s_product;
    let exponent = 1.0 + 1.0 / m as f64;
    Ok(P1PaperValues {
        displayed_residue,
        final_coefficient,
        exponent,
        s_product,
        residue_consistent: (displayed_residue - exponent * final_coefficient).abs() <= 1e-12 * displayed_residue,
    })
}

/// A product-based closed form: `prefactor · product · s_product`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProductConstant {
    pub value: f64,
    pub tail_bound: f64,
    pub prefactor: f64,
    pub product: EulerProduct,
    pub s_product: f64,
}

impl ProductConstant {
    fn new(prefactor: f64, product: EulerProduct, s_product: f64) -> Self {
        let scale = prefactor * s_product;
        ProductConstant {
            value: scale * product.value,
            tail_bound: scale * product.tail_bound,
            prefactor,
            product,
            s_product,
        }
    }
}

/// `2·∏_p(1 - p^{-2} + (1-1/p)p^{-1}Σ_{k=1}^{m-1} p^{-k/m}) · ∏_S`, the
/// coefficient of `B^{1+1/m}` for Campana points on ℙ¹.
pub fn p1_campana_constant(m: u32, s_set: &PlaceSet, cutoff: u64) -> Result<ProductConstant, ConstantError> {
    if m < 2 {
        return Err(ConstantError::InvalidArgument("the Campana constant needs m >= 2".into()));
    }
    let mf = m as f64;
    let factor = |p: u64| {
        let p = p as f64;
        let sum: f64 = (1..m).map(|k| p.powf(-(k as f64) / mf)).sum();
        Ok(1.0 - 1.0 / (p * p) + (1.0 - 1.0 / p) / p * sum)
    };
    // |f - 1| ≤ p^{-2} + (m-1)p^{-1-1/m} ≤ m·p^{-1-1/m}
    let product = truncated_euler_product(&EulerProductSpec {
        factor: &factor,
        cutoff,
        sigma: 1.0 + 1.0 / mf,
        c: mf,
    })?;
    let s_product = s_set.finite_primes().map(|p| campana_s_factor(p, m)).product();
    Ok(ProductConstant::new(2.0, product, s_product))
}

/// `(1+m1)(1+m2)/(2m1m2) · ∏_p(1 - 2/p² + 1/p³)`, the reference
/// closed form for the blow-up constant.
pub fn blowup_constant_paper(m1: u32, m2: u32, cutoff: u64) -> Result<ProductConstant, ConstantError> {
    if m1 == 0 || m2 == 0 {
        return Err(ConstantError::InvalidArgument("m1 and m2 must be >= 1".into()));
    }
    let factor = |p: u64| {
        let p = p as f64;
        Ok(1.0 - 2.0 / (p * p) + 1.0 / (p * p * p))
    };
    let product = truncated_euler_product(&EulerProductSpec {
        factor: &factor,
        cutoff,
        sigma: 2.0,
        c: 2.0,
    })?;
    let prefactor = ((1 + m1) * (1 + m2)) as f64 / (2 * m1 * m2) as f64;
    Ok(ProductConstant::new(prefactor, product, 1.0))
}
