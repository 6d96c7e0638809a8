//! Quantile cache: a computed [`QuantileTable`] tied to its instance by hash.
//!
//! ```text
//! drccp-quantiles 1
//! instance <hash>
//! shape <N> <P> <k>
//! modes <mode per row>
//! <i> <p> <q> [h̄^1 … h̄^N]      one line per probe, h̄ omitted when absent
//! ```

use super::instance::{fmt_num, instance_hash};
use crate::error::{Error, Result};
use crate::model::Instance;
use crate::quantile::{QuantileMode, QuantileTable};

pub const QUANTILES_MAGIC: &str = "drccp-quantiles";

pub fn write_quantiles(inst: &Instance, qt: &QuantileTable) -> String {
    let mut out = format!(
        "{QUANTILES_MAGIC} 1\ninstance {}\nshape {} {} {}\nmodes",
        instance_hash(inst),
        qt.num_scenarios(),
        qt.num_rows(),
        qt.k()
    );
    for m in qt.row_modes() {
        out.push(' ');
        out.push_str(&m.to_string());
    }
    out.push('\n');
    for i in 0..qt.num_scenarios() {
        for p in 0..qt.num_rows() {
            out.push_str(&format!("{i} {p} {}", fmt_num(qt.q(i, p))));
            if let Some(h) = qt.h_values(i, p) {
                for &v in h {
                    out.push(' ');
                    out.push_str(&fmt_num(v));
                }
            }
            out.push('\n');
        }
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f(line: usize, s: &str) -> Result<f64> {
    s.parse().map_err(|_| perr(line, format!("bad number '{s}'")))
}

/// Read a cache written for `inst`; fails if the instance hash differs.
pub fn parse_quantiles(text: &str, inst: &Instance) -> Result<QuantileTable> {
    let lines: Vec<&str> = text.lines().collect();
    let get = |n: usize, key: &str| -> Result<Vec<&str>> {
        let l = lines.get(n).ok_or_else(|| perr(n + 1, "unexpected end of file"))?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(perr(n + 1, format!("expected '{key}'")));
        }
        Ok(parts.collect())
    };
    if get(0, QUANTILES_MAGIC)? != ["1"] {
        return Err(perr(1, "unsupported quantile cache version"));
    }
    if get(1, "instance")? != [instance_hash(inst).as_str()] {
        return Err(perr(2, "cache was written for a different instance"));
    }
    let shape = get(2, "shape")?;
    let dims: Vec<usize> = shape
        .iter()
        .map(|s| s.parse().map_err(|_| perr(3, "bad shape")))
        .collect::<Result<_>>()?;
    if dims != [inst.num_scenarios(), inst.num_rows(), inst.k()] {
        return Err(perr(3, "shape does not match the instance"));
    }
    let modes = get(3, "modes")?
        .iter()
        .map(|s| s.parse::<QuantileMode>())
        .collect::<Result<Vec<_>>>()?;
    let (n, pp) = (dims[0], dims[1]);
    let mut q = vec![0.0; n * pp];
    let mut h = vec![Vec::new(); n * pp];
    for (off, l) in lines[4..].iter().enumerate() {
        let ln = off + 5;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() < 3 {
            return Err(perr(ln, "expected '<i> <p> <q> …'"));
        }
        let i: usize = parts[0].parse().map_err(|_| perr(ln, "bad index"))?;
        let p: usize = parts[1].parse().map_err(|_| perr(ln, "bad index"))?;
        if i >= n || p >= pp {
            return Err(perr(ln, "probe index out of range"));
        }
        q[i * pp + p] = parse_f(ln, parts[2])?;
        h[i * pp + p] = parts[3..]
            .iter()
            .map(|s| parse_f(ln, s))
            .collect::<Result<_>>()?;
    }
    QuantileTable::from_parts(inst, modes, q, h)
}
