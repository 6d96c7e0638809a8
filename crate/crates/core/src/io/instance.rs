//! Instance file: a versioned, line-oriented text format.
//!
//! ```text
//! drccp-instance 1
//! hash <sha256 of every line after this one>
//! kind generic | portfolio <w> | resource <D> <P>
//! seed <u64> | none
//! dims <N> <P> <K_b> <L>
//! epsilon <v>
//! theta <v>
//! norm l1|l2|linf
//! closedness open|closed
//! A            then L lines of K_b values
//! b            then 1 line of K_b values
//! a            then P lines of L values
//! d            then 1 line of P values
//! lower        then 1 line of L values
//! upper        then 1 line of L values
//! cost         then 1 line of L values
//! scenarios    then N·P lines of K_b values, scenario-major
//! ```
//!
//! Numbers are written with 17 significant digits, which round-trips every
//! finite `f64`; infinite bounds are written `inf` / `-inf`.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{Closedness, Domain, Instance, InstanceKind, Norm, SafetySpec};

pub const INSTANCE_MAGIC: &str = "drccp-instance";
pub const INSTANCE_VERSION: u32 = 1;

pub(crate) fn fmt_num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

fn line_of(values: &[f64]) -> String {
    values.iter().map(|&v| fmt_num(v)).collect::<Vec<_>>().join(" ")
}

fn body(inst: &Instance) -> String {
    let spec = &inst.safety;
    let (n, p, kb, l) = (
        inst.num_scenarios(),
        inst.num_rows(),
        spec.block_len(),
        spec.num_vars(),
    );
    let mut out = String::new();
    let mut push = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    push(match inst.kind {
        InstanceKind::Generic => "kind generic".into(),
        InstanceKind::Portfolio { target } => format!("kind portfolio {}", fmt_num(target)),
        InstanceKind::Resource { resources, groups } => format!("kind resource {resources} {groups}"),
    });
    push(match inst.seed {
        Some(s) => format!("seed {s}"),
        None => "seed none".into(),
    });
    push(format!("dims {n} {p} {kb} {l}"));
    push(format!("epsilon {}", fmt_num(inst.epsilon)));
    push(format!("theta {}", fmt_num(inst.theta)));
    push(format!("norm {}", inst.norm));
    push(format!("closedness {}", spec.closedness));
    push("A".into());
    for row in spec.weights().chunks(kb) {
        push(line_of(row));
    }
    push("b".into());
    push(line_of(spec.b()));
    push("a".into());
    for q in 0..p {
        push(line_of(spec.a(q)));
    }
    push("d".into());
    push(line_of(&(0..p).map(|q| spec.d(q)).collect::<Vec<_>>()));
    push("lower".into());
    push(line_of(&inst.domain.lower));
    push("upper".into());
    push(line_of(&inst.domain.upper));
    push("cost".into());
    push(line_of(&inst.cost));
    push("scenarios".into());
    for block in inst.scenario_data().chunks(kb) {
        push(line_of(block));
    }
    out
}

fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// SHA-256 over the serialized body; identifies an instance in caches.
pub fn instance_hash(inst: &Instance) -> String {
    digest(&body(inst))
}

pub fn write_instance(inst: &Instance) -> String {
    let body = body(inst);
    format!(
        "{INSTANCE_MAGIC} {INSTANCE_VERSION}\nhash {}\n{body}",
        digest(&body)
    )
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<&'a str> {
        match self.iter.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(self.err("unexpected end of file")),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    /// Line `key v…`, returning the values.
    fn keyed(&mut self, key: &str) -> Result<Vec<&'a str>> {
        let l = self.next()?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected '{key}'")));
        }
        Ok(parts.collect())
    }

    fn single(&mut self, key: &str) -> Result<&'a str> {
        let v = self.keyed(key)?;
        match v.as_slice() {
            [x] => Ok(x),
            _ => Err(self.err(format!("'{key}' takes one value"))),
        }
    }

    fn number<T: std::str::FromStr>(&self, s: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.err(format!("bad number '{s}'")))
    }

    fn values(&mut self, len: usize) -> Result<Vec<f64>> {
        let l = self.next()?;
        let v = l
            .split_whitespace()
            .map(|t| self.number::<f64>(t))
            .collect::<Result<Vec<_>>>()?;
        if v.len() != len {
            return Err(self.err(format!("expected {len} values, found {}", v.len())));
        }
        Ok(v)
    }

    fn section(&mut self, name: &str, rows: usize, len: usize) -> Result<Vec<f64>> {
        self.keyed(name)?;
        let mut out = Vec::with_capacity(rows * len);
        for _ in 0..rows {
            out.extend(self.values(len)?);
        }
        Ok(out)
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = Lines {
        iter: text.lines().enumerate(),
        line: 0,
    };
    let head = lines.keyed(INSTANCE_MAGIC)?;
    let version: u32 = match head.as_slice() {
        [v] => lines.number(v)?,
        _ => return Err(lines.err("missing format version")),
    };
    if version != INSTANCE_VERSION {
        return Err(lines.err(format!("unsupported format version {version}")));
    }
    let hash = lines.single("hash")?.to_string();
    let body_start = text
        .match_indices('\n')
        .nth(1)
        .map(|(i, _)| i + 1)
        .ok_or_else(|| lines.err("truncated header"))?;
    if digest(&text[body_start..]) != hash {
        return Err(lines.err("hash does not match the file body"));
    }

    let kind_parts = lines.keyed("kind")?;
    let kind = match kind_parts.as_slice() {
        ["generic"] => InstanceKind::Generic,
        ["portfolio", w] => InstanceKind::Portfolio {
            target: lines.number(w)?,
        },
        ["resource", d, p] => InstanceKind::Resource {
            resources: lines.number(d)?,
            groups: lines.number(p)?,
        },
        _ => return Err(lines.err("unknown instance kind")),
    };
    let seed = match lines.single("seed")? {
        "none" => None,
        s => Some(lines.number(s)?),
    };
    let dims = lines.keyed("dims")?;
    let [n, p, kb, l]: [usize; 4] = match dims.as_slice() {
        [a, b, c, d] => [
            lines.number(a)?,
            lines.number(b)?,
            lines.number(c)?,
            lines.number(d)?,
        ],
        _ => return Err(lines.err("dims needs N P K_b L")),
    };
    let eps_s = lines.single("epsilon")?;
    let epsilon = lines.number(eps_s)?;
    let theta_s = lines.single("theta")?;
    let theta = lines.number(theta_s)?;
    let norm: Norm = lines
        .single("norm")?
        .parse()
        .map_err(|e: Error| lines.err(e.to_string()))?;
    let closedness: Closedness = lines
        .single("closedness")?
        .parse()
        .map_err(|e: Error| lines.err(e.to_string()))?;
    let weights = lines.section("A", l, kb)?;
    let b = lines.section("b", 1, kb)?;
    let a_flat = lines.section("a", p, l)?;
    let d = lines.section("d", 1, p)?;
    let lower = lines.section("lower", 1, l)?;
    let upper = lines.section("upper", 1, l)?;
    let cost = lines.section("cost", 1, l)?;
    let scenarios = lines.section("scenarios", n * p, kb)?;
    let a = if l == 0 {
        vec![Vec::new(); p]
    } else {
        a_flat.chunks(l).map(<[f64]>::to_vec).collect()
    };
    let spec = SafetySpec::new(l, kb, weights, b, a, d, closedness)?;
    let inst = Instance::new(
        spec,
        scenarios,
        epsilon,
        theta,
        norm,
        Domain { lower, upper },
        cost,
        kind,
    )?
    .with_seed(seed);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apps::{gen_resource, ResourceConfig};

    #[test]
    fn round_trip_is_exact() {
        let inst = gen_resource(&ResourceConfig {
            resources: 2,
            groups: 3,
            n: 5,
            theta: 0.1 + 0.2,
            ..ResourceConfig::default()
        })
        .unwrap();
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(write_instance(&back), text);
        assert!(back.domain.upper.iter().all(|u| u.is_infinite()));
    }

    #[test]
    fn tampering_is_detected() {
        let inst = gen_resource(&ResourceConfig {
            resources: 1,
            groups: 1,
            n: 3,
            ..ResourceConfig::default()
        })
        .unwrap();
        let text = write_instance(&inst).replace("theta", "theta ");
        assert!(matches!(parse_instance(&text), Err(Error::Parse { .. })));
        let text = write_instance(&inst).replacen("drccp-instance 1", "drccp-instance 9", 1);
        assert!(parse_instance(&text).is_err());
    }
}
