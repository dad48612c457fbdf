use serde::{Deserialize, Serialize};

use super::{Construction, Gru, GruWeights, OutputFunctional};
use crate::automata::Alphabet;
use crate::error::{Error, Result};
use crate::numerics::{BigFloat, ExtendedWeight, Matrix};
use crate::rnn::AcceptanceSet;

#[derive(Serialize, Deserialize)]
struct GruJson {
    model: String,
    precision_bits: u32,
    alphabet: Vec<String>,
    #[serde(rename = "Wz")]
    wz: Vec<Vec<String>>,
    #[serde(rename = "Uz")]
    uz: Vec<Vec<String>>,
    #[serde(rename = "Wr")]
    wr: Vec<Vec<String>>,
    #[serde(rename = "Ur")]
    ur: Vec<Vec<String>>,
    #[serde(rename = "Wh")]
    wh: Vec<Vec<String>>,
    #[serde(rename = "Uh")]
    uh: Vec<Vec<String>>,
    bz: Vec<String>,
    br: Vec<String>,
    bh: Vec<String>,
    h0: Vec<String>,
    output: OutputJson,
    acceptance: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    construction: Option<ConstructionJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum OutputJson {
    Linear {
        #[serde(rename = "Wo")]
        wo: Vec<String>,
        bo: String,
    },
    DyckReadout {
        offset: usize,
    },
    Sum {
        terms: Vec<OutputJson>,
    },
}

#[derive(Serialize, Deserialize)]
struct ConstructionJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_len: Option<usize>,
}

fn strs(v: &[BigFloat]) -> Vec<String> {
    v.iter().map(BigFloat::to_shortest_string).collect()
}

fn mat(m: &Matrix<BigFloat>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| strs(m.row(i))).collect()
}

fn output_json(f: &OutputFunctional) -> OutputJson {
    match f {
        OutputFunctional::Linear { wo, bo } => OutputJson::Linear {
            wo: strs(wo),
            bo: bo.to_shortest_string(),
        },
        OutputFunctional::DyckReadout { offset } => OutputJson::DyckReadout { offset: *offset },
        OutputFunctional::Sum(terms) => OutputJson::Sum {
            terms: terms.iter().map(output_json).collect(),
        },
    }
}

fn parse_vec(v: &[String], prec: u32) -> Result<Vec<BigFloat>> {
    v.iter().map(|s| BigFloat::parse(s, prec)).collect()
}

fn parse_mat(rows: &[Vec<String>], cols: usize, prec: u32) -> Result<Matrix<BigFloat>> {
    Matrix::from_rows_with_cols(rows.iter().map(|r| parse_vec(r, prec)).collect::<Result<_>>()?, cols)
}

fn parse_output(o: OutputJson, prec: u32) -> Result<OutputFunctional> {
    Ok(match o {
        OutputJson::Linear { wo, bo } => OutputFunctional::Linear {
            wo: parse_vec(&wo, prec)?,
            bo: BigFloat::parse(&bo, prec)?,
        },
        OutputJson::DyckReadout { offset } => OutputFunctional::DyckReadout { offset },
        OutputJson::Sum { terms } => {
            OutputFunctional::Sum(terms.into_iter().map(|t| parse_output(t, prec)).collect::<Result<_>>()?)
        }
    })
}

impl Gru {
    pub fn to_json_value(&self, acceptance: &AcceptanceSet) -> serde_json::Value {
        let w = &self.w;
        let j = GruJson {
            model: "gru".into(),
            precision_bits: self.prec,
            alphabet: self.alphabet.symbols().to_vec(),
            wz: mat(&w.wz),
            uz: (0..w.uz.rows())
                .map(|i| {
                    w.uz.row(i)
                        .iter()
                        .map(|e| match e {
                            ExtendedWeight::Finite(v) => v.to_shortest_string(),
                            inf => inf.to_string(),
                        })
                        .collect()
                })
                .collect(),
            wr: mat(&w.wr),
            ur: mat(&w.ur),
            wh: mat(&w.wh),
            uh: mat(&w.uh),
            bz: strs(&w.bz),
            br: strs(&w.br),
            bh: strs(&w.bh),
            h0: strs(&self.h0),
            output: output_json(&self.output),
            acceptance: acceptance.to_json_value(),
            construction: self.construction.as_ref().map(|c| ConstructionJson {
                kind: c.kind.clone(),
                n: c.n,
                k: c.k,
                max_len: c.max_len,
            }),
        };
        serde_json::to_value(j).expect("network serializes")
    }

    pub fn from_json_value(v: serde_json::Value) -> Result<(Self, AcceptanceSet)> {
        let j: GruJson = serde_json::from_value(v)?;
        if j.model != "gru" {
            return Err(Error::Parse(format!("expected model gru, found {}", j.model)));
        }
        let p = j.precision_bits;
        if p < crate::numerics::MIN_PRECISION {
            return Err(Error::Parse(format!("precision_bits {p} is too small")));
        }
        let alphabet = Alphabet::new(j.alphabet)?;
        let (m, sx) = (j.h0.len(), alphabet.len());
        let uz_rows = j
            .uz
            .iter()
            .map(|r| r.iter().map(|s| ExtendedWeight::parse(s, p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let weights = GruWeights {
            wz: parse_mat(&j.wz, sx, p)?,
            uz: Matrix::from_rows_with_cols(uz_rows, m)?,
            wr: parse_mat(&j.wr, sx, p)?,
            ur: parse_mat(&j.ur, m, p)?,
            wh: parse_mat(&j.wh, sx, p)?,
            uh: parse_mat(&j.uh, m, p)?,
            bz: parse_vec(&j.bz, p)?,
            br: parse_vec(&j.br, p)?,
            bh: parse_vec(&j.bh, p)?,
        };
        let mut gru = Gru::new(alphabet, p, weights, parse_vec(&j.h0, p)?, parse_output(j.output, p)?)?;
        if let Some(c) = j.construction {
            gru = gru.with_construction(Construction {
                kind: c.kind,
                n: c.n,
                k: c.k,
                max_len: c.max_len,
            });
        }
        Ok((gru, AcceptanceSet::from_json_value(j.acceptance)?))
    }
}
