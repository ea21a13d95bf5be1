use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::freecat::{substitute, GradedElement, Path};
use crate::scalar::Coeff;

use super::model::{BoxError, FreeBox};

/// A triangular change of free generators. `forward[x]` is the new
/// generator `x` written in the old ones, `inverse[x]` the old `x` written
/// in the new ones. Generators keep their names.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorChange {
    pub forward: BTreeMap<String, GradedElement>,
    pub inverse: BTreeMap<String, GradedElement>,
}

impl GeneratorChange {
    pub fn is_identity(&self) -> bool {
        self.forward.iter().all(|(k, e)| {
            e.num_terms() == 1 && e.linear_coefficient(k) == Coeff::from_integer(1.into())
        })
    }
}

/// Splits `phi(x) = lambda x + sigma`, rejecting `lambda = 0` or `x` inside `sigma`.
fn split_leading(x: &str, image: &GradedElement) -> Result<(Coeff, GradedElement), BoxError> {
    let lambda = image.linear_coefficient(x);
    if lambda.is_zero() {
        return Err(BoxError::NotInvertible(x.to_string()));
    }
    let sigma = image.filter_terms(|p| !(p.len() == 1 && p.arrows()[0].id == x));
    if sigma.contains_arrow(x) {
        return Err(BoxError::NotInvertible(x.to_string()));
    }
    Ok((lambda, sigma))
}

/// Replaces generators by `phi` and rewrites every differential in the new generators.
pub fn change_generators(
    b: &FreeBox,
    phi: &BTreeMap<String, GradedElement>,
) -> Result<(FreeBox, GeneratorChange), BoxError> {
    let mut parts = BTreeMap::new();
    for (x, image) in phi {
        let a = b.arrow(x)?;
        if image.source() != a.source || image.target() != a.target {
            return Err(BoxError::DifferentialEndpoints {
                arrow: x.clone(),
                expected: format!("{}->{}", a.source, a.target),
                found: format!("{}->{}", image.source(), image.target()),
            });
        }
        if image.terms().any(|(p, _)| p.degree() != a.kind.degree()) {
            return Err(BoxError::NotInvertible(x.clone()));
        }
        parts.insert(x.clone(), split_leading(x, image)?);
    }

    // inverse[x] = (x - inverse(sigma_x)) / lambda_x, resolved in dependency order
    let mut inverse: BTreeMap<String, GradedElement> = BTreeMap::new();
    let mut visiting = BTreeSet::new();
    fn resolve(
        x: &str,
        b: &FreeBox,
        parts: &BTreeMap<String, (Coeff, GradedElement)>,
        inverse: &mut BTreeMap<String, GradedElement>,
        visiting: &mut BTreeSet<String>,
    ) -> Result<(), BoxError> {
        if inverse.contains_key(x) {
            return Ok(());
        }
        if !visiting.insert(x.to_string()) {
            return Err(BoxError::NotInvertible(x.to_string()));
        }
        let (lambda, sigma) = &parts[x];
        for y in sigma.arrow_ids() {
            if parts.contains_key(&y) {
                resolve(&y, b, parts, inverse, visiting)?;
            }
        }
        let sigma_new = substitute(sigma, inverse)?;
        let x_new = GradedElement::arrow(b.arrow(x)?);
        let inv_lambda = Coeff::from_integer(1.into()) / lambda;
        inverse.insert(x.to_string(), x_new.sub(&sigma_new)?.scale(&inv_lambda));
        visiting.remove(x);
        Ok(())
    }
    for x in parts.keys() {
        resolve(x, b, &parts, &mut inverse, &mut visiting)?;
    }

    let mut out = b.clone();
    for a in b.arrows() {
        let old_d = match phi.get(&a.id) {
            Some(image) => b.d(image),
            None => b.differential(&a.id),
        };
        out.set_differential_unchecked(&a.id, substitute(&old_d, &inverse)?);
    }
    Ok((
        out,
        GeneratorChange {
            forward: phi.clone(),
            inverse,
        },
    ))
}

/// Convenience: `coeff * arrow` as an element of `b`.
pub fn scaled_arrow(b: &FreeBox, id: &str, coeff: Coeff) -> Result<GradedElement, BoxError> {
    let a = b.arrow(id)?.clone();
    Ok(GradedElement::term(coeff, Path::arrow(a))?)
}
