//! JSON shapes for curves, series, functionals and expansion data.
//!
//! Rationals are strings (`"3"`, `"-1/2"`); half-integers inside Maya
//! diagrams are given by their doubles (`-1` means `-1/2`).

use std::collections::BTreeMap;

use bcghost::coordchange::NormalizedExpansionData;
use bcghost::curve::{Component, CurveSpec, MarkedPoint, PointRef};
use bcghost::poly::Point;
use bcghost::fock::{DualFunctional, Functional};
use bcghost::laurent::{LaurentSeries, EXACT};
use bcghost::maya::{HalfInt, MayaDiagram};
use bcghost::rational::{self, Q};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub fn rat(x: &Q) -> String {
    rational::to_string(x)
}

pub fn parse_rat(s: &str) -> Result<Q, CliError> {
    rational::parse(s).ok_or_else(|| CliError::Input(format!("not a rational number: {s:?}")))
}

fn parse_half(s: &str) -> Result<HalfInt, CliError> {
    let x = parse_rat(s)?;
    let twice = x * rational::q(2);
    let t = if twice.is_integer() { twice.numer().try_into().ok() } else { None };
    t.and_then(HalfInt::from_twice).ok_or_else(|| CliError::Input(format!("not a half-odd integer: {s:?}")))
}

/// A Maya diagram: `{"mus": [...], "nus": [...]}` in doubled units, or the
/// move form `{"charge": p, "moves": [["-5/2", "1/2"], ...]}` (input only).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MayaJson {
    Slots { mus: Vec<i64>, nus: Vec<i64> },
    Moves { charge: i64, moves: Vec<(String, String)> },
}

impl MayaJson {
    pub fn from_maya(m: &MayaDiagram) -> Self {
        MayaJson::Slots { mus: m.mus().iter().map(|h| h.twice()).collect(), nus: m.nus().iter().map(|h| h.twice()).collect() }
    }

    pub fn to_maya(&self) -> Result<MayaDiagram, CliError> {
        match self {
            MayaJson::Slots { mus, nus } => Ok(MayaDiagram::from_twice(mus, nus)?),
            MayaJson::Moves { charge, moves } => {
                let mv = moves.iter().map(|(a, b)| Ok((parse_half(a)?, parse_half(b)?))).collect::<Result<Vec<_>, CliError>>()?;
                Ok(MayaDiagram::from_moves(*charge, &mv)?)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub tuple: Vec<MayaJson>,
    pub value: String,
}

/// A functional known on the window of total weight `<= cutoff`; absent tuples are zero.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalJson {
    pub arity: usize,
    pub cutoff: i64,
    pub values: Vec<EntryJson>,
}

impl FunctionalJson {
    pub fn from_functional(f: &DualFunctional) -> Self {
        let values = f
            .values()
            .map(|(t, c)| EntryJson { tuple: t.iter().map(MayaJson::from_maya).collect(), value: rat(c) })
            .collect();
        FunctionalJson { arity: f.arity(), cutoff: f.cutoff(), values }
    }

    pub fn to_functional(&self) -> Result<DualFunctional, CliError> {
        let mut vals = Vec::new();
        for e in &self.values {
            let t = e.tuple.iter().map(MayaJson::to_maya).collect::<Result<Vec<_>, _>>()?;
            if t.len() != self.arity {
                return Err(CliError::Input(format!("tuple of length {} in a functional of arity {}", t.len(), self.arity)));
            }
            vals.push((t, parse_rat(&e.value)?));
        }
        Ok(DualFunctional::new(self.arity, self.cutoff, vals))
    }
}

/// `sum_i coeffs[i] xi^(low + i)`, exact unless `trunc` is given.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub low: i64,
    pub coeffs: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<i64>,
}

impl SeriesJson {
    pub fn from_series(s: &LaurentSeries) -> Self {
        let low = if s.is_zero() { 0 } else { s.ord() };
        let top = s.top().unwrap_or(low - 1);
        let coeffs = (low..=top).map(|k| rat(&s.coeff_or_zero(k))).collect();
        let trunc = if s.is_exact() { None } else { Some(s.trunc()) };
        SeriesJson { low, coeffs, trunc }
    }

    pub fn to_series(&self) -> Result<LaurentSeries, CliError> {
        let terms = self.coeffs.iter().enumerate().map(|(i, c)| Ok((self.low + i as i64, parse_rat(c)?))).collect::<Result<Vec<_>, CliError>>()?;
        Ok(LaurentSeries::new(terms, self.trunc.unwrap_or(EXACT)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentJson {
    /// `"0"`, `"1/2"`, `"inf"`.
    pub points: Vec<String>,
    /// Local coordinates `x = g(xi)` in the standard chart, one per point; `null` is `g = xi`.
    #[serde(default)]
    pub coords: Vec<Option<SeriesJson>>,
}

/// `{"components": [...], "glue": [[[c, p], [c, p]]], "outer": [[c, p]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveJson {
    pub components: Vec<ComponentJson>,
    #[serde(default)]
    pub glue: Vec<[[usize; 2]; 2]>,
    pub outer: Vec<[usize; 2]>,
}

fn point_ref(p: [usize; 2]) -> PointRef {
    PointRef::new(p[0], p[1])
}

impl CurveJson {
    pub fn to_curve(&self) -> Result<CurveSpec, CliError> {
        let mut components = Vec::new();
        for c in &self.components {
            if c.coords.len() > c.points.len() {
                return Err(CliError::Input("more coordinates than points on a component".into()));
            }
            let mut points = Vec::new();
            for (i, s) in c.points.iter().enumerate() {
                let at = if s.trim() == "inf" { Point::Infinity } else { Point::Finite(parse_rat(s)?) };
                let mut mp = MarkedPoint::new(at);
                if let Some(Some(g)) = c.coords.get(i) {
                    mp = mp.with_coord(g.to_series()?);
                }
                points.push(mp);
            }
            components.push(Component { points });
        }
        let curve = CurveSpec {
            components,
            glue: self.glue.iter().map(|[a, b]| (point_ref(*a), point_ref(*b))).collect(),
            outer: self.outer.iter().copied().map(point_ref).collect(),
        };
        curve.validate()?;
        Ok(curve)
    }
}

/// `{"g": g, "I": {"n,i": "a/b"}, "Q": {"n,m": "a/b"}, "trunc": T}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionDataJson {
    pub g: usize,
    #[serde(rename = "I", default)]
    pub i: BTreeMap<String, String>,
    #[serde(rename = "Q", default)]
    pub q: BTreeMap<String, String>,
    pub trunc: i64,
}

fn parse_key(k: &str) -> Result<(i64, i64), CliError> {
    let bad = || CliError::Input(format!("bad index key {k:?}, expected \"n,m\""));
    let (a, b) = k.split_once(',').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

impl ExpansionDataJson {
    pub fn to_data(&self) -> Result<NormalizedExpansionData, CliError> {
        let mut data = NormalizedExpansionData { genus: self.g, trunc: self.trunc, ..Default::default() };
        for (k, v) in &self.i {
            let (n, i) = parse_key(k)?;
            let i = usize::try_from(i).map_err(|_| CliError::Input(format!("negative form index in {k:?}")))?;
            data.i.insert((n, i), parse_rat(v)?);
        }
        for (k, v) in &self.q {
            data.q.insert(parse_key(k)?, parse_rat(v)?);
        }
        data.validate()?;
        Ok(data)
    }

    pub fn from_data(d: &NormalizedExpansionData) -> Self {
        ExpansionDataJson {
            g: d.genus,
            i: d.i.iter().map(|((n, i), v)| (format!("{n},{i}"), rat(v))).collect(),
            q: d.q.iter().map(|((n, m), v)| (format!("{n},{m}"), rat(v))).collect(),
            trunc: d.trunc,
        }
    }
}

/// Reads JSON, reporting the line and column of a syntax error.
pub fn from_str<T: for<'de> Deserialize<'de>>(what: &str, text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse { what: what.to_string(), line: e.line(), column: e.column(), msg: e.to_string() })
}

/// Pretty JSON with a trailing newline.
pub fn to_string<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}
