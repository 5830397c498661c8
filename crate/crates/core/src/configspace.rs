//! Declarative tunable-parameter spaces shared by every optimizer.
//!
//! A space is a list of dimensions (continuous, integer, or categorical)
//! plus cross-tree rules of the form "if dim A takes one of these values,
//! dim B must take one of those". Candidates carry concrete values and a
//! reversible [0, 1] encoding for arithmetic optimizers; invalid decodes
//! are repaired by snapping the rule's target dimension to its first
//! allowed value.

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::seeding::{rand_below, rand_f64};

const SAMPLE_REJECTION_CAP: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub enum ParamKind {
    Real { lo: f64, hi: f64 },
    Int { lo: i64, hi: i64 },
    Choice(Vec<String>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
}

/// If `if_dim` takes a value in `if_vals`, then `then_dim` must take a
/// value in `allowed`. Both sides index categorical dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub if_dim: usize,
    pub if_vals: Vec<usize>,
    pub then_dim: usize,
    pub allowed: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Real(f64),
    Int(i64),
    Choice(usize),
}

/// One concrete assignment of every dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub values: Vec<ParamValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub name: String,
    pub specs: Vec<ParamSpec>,
    pub rules: Vec<Rule>,
}

impl Space {
    /// Parse the plain-text manifest format:
    ///
    /// ```text
    /// space <name>
    /// dim <name> real <lo> <hi>
    /// dim <name> int <lo> <hi>
    /// dim <name> choice <a> <b> ...
    /// rule if <dim> in <v,v> then <dim> in <v,v>
    /// ```
    pub fn parse(text: &str) -> Result<Space> {
        let mut name = String::new();
        let mut specs: Vec<ParamSpec> = Vec::new();
        let mut rules = Vec::new();
        let bad = |line: &str, why: &str| {
            Error::InvalidConfig(format!("space manifest line `{line}`: {why}"))
        };
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match tokens[0] {
                "space" => {
                    name = tokens
                        .get(1)
                        .ok_or_else(|| bad(line, "missing name"))?
                        .to_string();
                }
                "dim" => {
                    if tokens.len() < 4 {
                        return Err(bad(line, "dim needs a name, a kind, and arguments"));
                    }
                    let dim_name = tokens[1].to_string();
                    if specs.iter().any(|s| s.name == dim_name) {
                        return Err(bad(line, "duplicate dimension"));
                    }
                    let kind = match tokens[2] {
                        "real" => {
                            let lo: f64 =
                                tokens[3].parse().map_err(|_| bad(line, "bad lo"))?;
                            let hi: f64 = tokens
                                .get(4)
                                .ok_or_else(|| bad(line, "missing hi"))?
                                .parse()
                                .map_err(|_| bad(line, "bad hi"))?;
                            if !(lo < hi) {
                                return Err(bad(line, "lo must be < hi"));
                            }
                            ParamKind::Real { lo, hi }
                        }
                        "int" => {
                            let lo: i64 =
                                tokens[3].parse().map_err(|_| bad(line, "bad lo"))?;
                            let hi: i64 = tokens
                                .get(4)
                                .ok_or_else(|| bad(line, "missing hi"))?
                                .parse()
                                .map_err(|_| bad(line, "bad hi"))?;
                            if lo >= hi {
                                return Err(bad(line, "lo must be < hi"));
                            }
                            ParamKind::Int { lo, hi }
                        }
                        "choice" => {
                            let choices: Vec<String> =
                                tokens[3..].iter().map(|s| s.to_string()).collect();
                            let mut choice_set = tokens[3..].to_vec();
                            choice_set.sort_unstable();
                            choice_set.dedup();
                            if choice_set.len() != choices.len() {
                                return Err(bad(line, "duplicate choice"));
                            }
                            ParamKind::Choice(choices)
                        }
                        other => return Err(bad(line, &format!("unknown kind `{other}`"))),
                    };
                    specs.push(ParamSpec {
                        name: dim_name,
                        kind,
                    });
                }
                "rule" => {
                    // rule if <dim> in a,b then <dim> in c,d
                    if tokens.len() != 9
                        || tokens[1] != "if"
                        || tokens[3] != "in"
                        || tokens[5] != "then"
                        || tokens[7] != "in"
                    {
                        return Err(bad(line, "expected `rule if <dim> in <v,..> then <dim> in <v,..>`"));
                    }
                    let dim_index = |n: &str| {
                        specs
                            .iter()
                            .position(|s| s.name == n)
                            .ok_or_else(|| bad(line, &format!("unknown dimension `{n}`")))
                    };
                    let if_dim = dim_index(tokens[2])?;
                    let then_dim = dim_index(tokens[6])?;
                    let choice_indices = |dim: usize, list: &str| -> Result<Vec<usize>> {
                        let ParamKind::Choice(choices) = &specs[dim].kind else {
                            return Err(bad(line, "rules apply to categorical dimensions"));
                        };
                        list.split(',')
                            .map(|v| {
                                choices
                                    .iter()
                                    .position(|c| c == v)
                                    .ok_or_else(|| bad(line, &format!("unknown value `{v}`")))
                            })
                            .collect()
                    };
                    let if_vals = choice_indices(if_dim, tokens[4])?;
                    let allowed = choice_indices(then_dim, tokens[8])?;
                    if allowed.is_empty() {
                        return Err(bad(line, "empty allowed set"));
                    }
                    rules.push(Rule {
                        if_dim,
                        if_vals,
                        then_dim,
                        allowed,
                    });
                }
                other => return Err(bad(line, &format!("unknown directive `{other}`"))),
            }
        }
        if specs.is_empty() {
            return Err(Error::InvalidConfig("space has no dimensions".into()));
        }
        Ok(Space { name, specs, rules })
    }

    pub fn n_dims(&self) -> usize {
        self.specs.len()
    }

    pub fn dim_index(&self, name: &str) -> Option<usize> {
        self.specs.iter().position(|s| s.name == name)
    }

    fn check_arity(&self, candidate: &Candidate) -> Result<()> {
        if candidate.values.len() != self.specs.len() {
            return Err(Error::ArityMismatch {
                expected: self.specs.len(),
                got: candidate.values.len(),
            });
        }
        for (spec, value) in self.specs.iter().zip(&candidate.values) {
            match (&spec.kind, value) {
                (ParamKind::Real { lo, hi }, ParamValue::Real(v)) => {
                    if !(v >= lo && v <= hi) {
                        return Err(Error::InvalidConfig(format!(
                            "{} = {v} outside [{lo}, {hi}]",
                            spec.name
                        )));
                    }
                }
                (ParamKind::Int { lo, hi }, ParamValue::Int(v)) => {
                    if v < lo || v > hi {
                        return Err(Error::InvalidConfig(format!(
                            "{} = {v} outside [{lo}, {hi}]",
                            spec.name
                        )));
                    }
                }
                (ParamKind::Choice(choices), ParamValue::Choice(i)) => {
                    if *i >= choices.len() {
                        return Err(Error::InvalidConfig(format!(
                            "{} choice index {i} out of range",
                            spec.name
                        )));
                    }
                }
                _ => {
                    return Err(Error::InvalidConfig(format!(
                        "{}: value kind does not match the spec",
                        spec.name
                    )))
                }
            }
        }
        Ok(())
    }

    fn rule_violated(&self, rule: &Rule, candidate: &Candidate) -> bool {
        let ParamValue::Choice(if_val) = candidate.values[rule.if_dim] else {
            return false;
        };
        if !rule.if_vals.contains(&if_val) {
            return false;
        }
        let ParamValue::Choice(then_val) = candidate.values[rule.then_dim] else {
            return false;
        };
        !rule.allowed.contains(&then_val)
    }

    /// Arity, ranges, and every cross-tree rule.
    pub fn is_valid(&self, candidate: &Candidate) -> bool {
        self.check_arity(candidate).is_ok()
            && self.rules.iter().all(|r| !self.rule_violated(r, candidate))
    }

    /// Snap violated rules' target dimensions to their first allowed value.
    /// Valid candidates pass through untouched.
    pub fn repair(&self, candidate: &Candidate) -> Candidate {
        let mut out = candidate.clone();
        for rule in &self.rules {
            if self.rule_violated(rule, &out) {
                out.values[rule.then_dim] = ParamValue::Choice(rule.allowed[0]);
            }
        }
        out
    }

    /// Uniform draw over the raw cross-product with rejection of invalid
    /// points. Errors after 10,000 rejected draws.
    pub fn sample_valid<R: RngCore>(&self, rng: &mut R) -> Result<Candidate> {
        for _ in 0..SAMPLE_REJECTION_CAP {
            let values = self
                .specs
                .iter()
                .map(|spec| match &spec.kind {
                    ParamKind::Real { lo, hi } => {
                        ParamValue::Real(lo + rand_f64(rng) * (hi - lo))
                    }
                    ParamKind::Int { lo, hi } => {
                        let span = (hi - lo + 1) as u64;
                        ParamValue::Int(lo + rand_below(rng, span) as i64)
                    }
                    ParamKind::Choice(choices) => {
                        ParamValue::Choice(rand_below(rng, choices.len() as u64) as usize)
                    }
                })
                .collect();
            let candidate = Candidate { values };
            if self.is_valid(&candidate) {
                return Ok(candidate);
            }
        }
        Err(Error::RejectionExceeded(SAMPLE_REJECTION_CAP))
    }

    /// Numeric [0, 1] encoding: continuous dimensions scale linearly,
    /// integers scale over their range, categoricals map to cell centers.
    pub fn encode(&self, candidate: &Candidate) -> Result<Vec<f64>> {
        self.check_arity(candidate)?;
        Ok(self
            .specs
            .iter()
            .zip(&candidate.values)
            .map(|(spec, value)| match (&spec.kind, value) {
                (ParamKind::Real { lo, hi }, ParamValue::Real(v)) => (v - lo) / (hi - lo),
                (ParamKind::Int { lo, hi }, ParamValue::Int(v)) => {
                    (v - lo) as f64 / (hi - lo) as f64
                }
                (ParamKind::Choice(choices), ParamValue::Choice(i)) => {
                    (*i as f64 + 0.5) / choices.len() as f64
                }
                _ => unreachable!("check_arity verified the kinds"),
            })
            .collect())
    }

    /// Inverse of [`Space::encode`]: entries are clamped to [0, 1] first,
    /// integers round half-up, categorical cells cap at the last choice,
    /// and cross-tree violations are repaired.
    pub fn decode(&self, v: &[f64]) -> Result<Candidate> {
        if v.len() != self.specs.len() {
            return Err(Error::ArityMismatch {
                expected: self.specs.len(),
                got: v.len(),
            });
        }
        let values = self
            .specs
            .iter()
            .zip(v)
            .map(|(spec, raw)| {
                let u = raw.clamp(0.0, 1.0);
                match &spec.kind {
                    ParamKind::Real { lo, hi } => ParamValue::Real(lo + u * (hi - lo)),
                    ParamKind::Int { lo, hi } => {
                        let span = (hi - lo) as f64;
                        ParamValue::Int(lo + (u * span + 0.5).floor() as i64)
                    }
                    ParamKind::Choice(choices) => {
                        let n = choices.len();
                        ParamValue::Choice(((u * n as f64) as usize).min(n - 1))
                    }
                }
            })
            .collect();
        Ok(self.repair(&Candidate { values }))
    }

    /// Canonical token: categorical labels joined by `|`, numeric values
    /// as `name=value` segments.
    pub fn token(&self, candidate: &Candidate) -> String {
        self.specs
            .iter()
            .zip(&candidate.values)
            .map(|(spec, value)| match (&spec.kind, value) {
                (ParamKind::Choice(choices), ParamValue::Choice(i)) => choices[*i].clone(),
                (_, ParamValue::Real(v)) => format!("{}={:.6}", spec.name, v),
                (_, ParamValue::Int(v)) => format!("{}={}", spec.name, v),
                _ => unreachable!(),
            })
            .collect::<Vec<_>>()
            .join("|")
    }

    /// All-categorical spaces enumerate their raw cross-product in nested
    /// dimension order; mixed spaces cannot enumerate.
    pub fn enumerate_raw(&self) -> Result<Vec<Candidate>> {
        let sizes: Vec<usize> = self
            .specs
            .iter()
            .map(|s| match &s.kind {
                ParamKind::Choice(choices) => Ok(choices.len()),
                _ => Err(Error::InvalidArgument(format!(
                    "dimension {} is not categorical; cannot enumerate",
                    s.name
                ))),
            })
            .collect::<Result<_>>()?;
        let total: usize = sizes.iter().product();
        let mut out = Vec::with_capacity(total);
        let mut counters = vec![0usize; sizes.len()];
        loop {
            out.push(Candidate {
                values: counters.iter().map(|&i| ParamValue::Choice(i)).collect(),
            });
            let mut dim = sizes.len();
            loop {
                if dim == 0 {
                    return Ok(out);
                }
                dim -= 1;
                counters[dim] += 1;
                if counters[dim] < sizes[dim] {
                    break;
                }
                counters[dim] = 0;
            }
        }
    }

    /// Valid subset of the raw enumeration, preserving order.
    pub fn enumerate_valid(&self) -> Result<Vec<Candidate>> {
        Ok(self
            .enumerate_raw()?
            .into_iter()
            .filter(|c| self.is_valid(c))
            .collect())
    }

    pub fn is_enumerable(&self) -> bool {
        self.specs
            .iter()
            .all(|s| matches!(s.kind, ParamKind::Choice(_)))
    }
}

impl Candidate {
    pub fn real(&self, dim: usize) -> f64 {
        match self.values[dim] {
            ParamValue::Real(v) => v,
            _ => panic!("dimension {dim} is not real"),
        }
    }

    pub fn int(&self, dim: usize) -> i64 {
        match self.values[dim] {
            ParamValue::Int(v) => v,
            _ => panic!("dimension {dim} is not an integer"),
        }
    }

    pub fn choice(&self, dim: usize) -> usize {
        match self.values[dim] {
            ParamValue::Choice(v) => v,
            _ => panic!("dimension {dim} is not categorical"),
        }
    }
}

/// The analogy design space bundled with the crate.
pub fn aben_space() -> Space {
    Space::parse(include_str!("spaces/aben.space")).expect("bundled manifest parses")
}

/// The tunable tree-parameter space bundled with the crate.
pub fn cart_space() -> Space {
    Space::parse(include_str!("spaces/cart.space")).expect("bundled manifest parses")
}
