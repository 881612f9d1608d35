//! Text and JSON renderings of sweep results.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sramdriver::{format_subset, PrimeBlock};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub schema: u32,
    pub field: String,
    pub n0: u32,
    pub delta: u32,
    pub blocks: Vec<PrimeBlock>,
    pub warnings: Vec<String>,
}

impl ReportDocument {
    pub fn new(field: String, n0: u32, delta: u32, mut blocks: Vec<PrimeBlock>) -> Self {
        blocks.sort_by_key(|b| b.p);
        for b in &mut blocks {
            b.reports.sort_by_key(|r| r.mask);
        }
        let warnings = collect_warnings(&blocks);
        ReportDocument {
            tool: "abram".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema: SCHEMA_VERSION,
            field,
            n0,
            delta,
            blocks,
            warnings,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("report document: {e}")))
    }
}

pub fn collect_warnings(blocks: &[PrimeBlock]) -> Vec<String> {
    let mut out = Vec::new();
    for b in blocks {
        if let Some(e) = &b.error {
            out.push(format!("p={}: {e}", b.p));
        }
        for r in &b.reports {
            let s = format_subset(&r.s);
            if let Some(e) = &r.error {
                out.push(format!("p={} S={s}: {e}", r.p));
            } else if !r.stable {
                out.push(format!(
                    "p={} S={s}: not stabilized at n={} (delta {})",
                    r.p, r.n, r.delta
                ));
            } else if r.ambiguous {
                out.push(format!(
                    "p={} S={s}: a stable entry exceeds a growing one",
                    r.p
                ));
            }
        }
    }
    out
}

pub fn format_list(v: &[BigInt]) -> String {
    let items: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", items.join(", "))
}

/// `p=..`, the prime list, then one `S=[..] rk(A_S)=R A_S=[..]` line per subset.
pub fn format_block(b: &PrimeBlock) -> String {
    let mut out = format!("p={}\n", b.p);
    for q in &b.primes {
        out.push_str(&q.display);
        out.push('\n');
    }
    if let Some(e) = &b.error {
        out.push_str(&format!("error: {e}\n"));
    }
    for r in &b.reports {
        let s = format_subset(&r.s);
        match &r.error {
            Some(e) => out.push_str(&format!("S={s} error: {e}\n")),
            None => out.push_str(&format!(
                "S={s} rk(A_S)={} A_S={}\n",
                r.rank,
                format_list(&r.invariants)
            )),
        }
    }
    out
}

pub fn format_text(doc: &ReportDocument) -> String {
    let mut out = format!("{}\n", doc.field);
    for b in &doc.blocks {
        out.push('\n');
        out.push_str(&format_block(b));
    }
    out
}

/// Text rendering with the classification attached to each subset line.
pub fn format_detailed(doc: &ReportDocument) -> String {
    let mut out = format_text(doc);
    out.push('\n');
    for b in &doc.blocks {
        for r in b.reports.iter().filter(|r| r.error.is_none()) {
            out.push_str(&format!(
                "p={} S={} n={} r~={} T={} {}\n",
                r.p,
                format_subset(&r.s),
                r.n,
                r.r_tilde,
                format_list(&r.torsion),
                if r.s_rational {
                    "rational"
                } else if r.stable {
                    "stable"
                } else {
                    "unstable"
                }
            ));
        }
    }
    for w in &doc.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}
