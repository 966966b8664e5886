use serde::{Deserialize, Serialize};

use crate::exterior::Form;
use crate::scalar::{format_rational, parse_rational, Rational};
use crate::{Error, Result};

/// Wire format of a rational [`Form`]: terms sorted by `idx`, coefficients
/// as `"p/q"` strings in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub n: usize,
    pub k: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub idx: Vec<usize>,
    pub coef: String,
}

impl From<&Form<Rational>> for FormJson {
    fn from(form: &Form<Rational>) -> Self {
        Self {
            n: form.ambient_dim(),
            k: form.degree(),
            terms: form
                .terms()
                .map(|(idx, c)| TermJson {
                    idx: idx.to_vec(),
                    coef: format_rational(c),
                })
                .collect(),
        }
    }
}

impl TryFrom<FormJson> for Form<Rational> {
    type Error = Error;

    /// Indices must already be strictly increasing; coefficients may be in
    /// any `p/q` or integer spelling.
    fn try_from(json: FormJson) -> Result<Self> {
        let mut terms = Vec::with_capacity(json.terms.len());
        for term in json.terms {
            if term.idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Parse(format!(
                    "multi-index {:?} is not strictly increasing",
                    term.idx
                )));
            }
            let coef = parse_rational(&term.coef)
                .ok_or_else(|| Error::Parse(format!("bad coefficient {:?}", term.coef)))?;
            terms.push((term.idx, coef));
        }
        Form::from_terms(json.n, json.k, terms)
    }
}

impl Form<Rational> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&FormJson::from(self)).expect("form serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let json: FormJson = serde_json::from_str(text)?;
        Self::try_from(json)
    }
}
