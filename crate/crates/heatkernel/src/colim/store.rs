//! Persistence of coincidence-limit tables.
//!
//! The cache file is a line-oriented textual format:
//!
//! ```text
//! colim-table v1
//! hash <sha256 hex of everything below this line>
//! fn l
//! max-order 3
//! order 0 | | : 0
//! order 1 | a | : 1 k(a)
//! order 2 | a b | : 0
//! order 3 | a b c | : -1/3 R(i,b,a,c) k(i) + -1/3 R(i,c,a,b) k(i)
//! ```
//!
//! Each record carries the entry's canonical index list — derivative
//! indices, then slots — and its polynomial as `coefficient monomial` terms
//! joined by ` + `. Serialization is deterministic (canonical monomials in
//! their canonical order, exact rationals), so a given table is
//! byte-identical across runs; the hash is verified on load. Writes go
//! through a temporary file and an atomic rename, so readers never observe
//! a half-written table.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use num_rational::BigRational;
use sha2::{Digest, Sha256};

use crate::tensor::{Index, TensorMonomial, TensorPoly};

use super::{CoinLimitTable, ColimError, LimitFn};

const MAGIC: &str = "colim-table";
const FORMAT_VERSION: u32 = 1;

pub(super) fn save(table: &CoinLimitTable, path: &Path) -> Result<(), ColimError> {
    let body = serialize_body(table);
    let mut text = String::new();
    writeln!(text, "{MAGIC} v{FORMAT_VERSION}").expect("string write");
    writeln!(text, "hash {}", hex_sha256(&body)).expect("string write");
    text.push_str(&body);

    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let tmp = dir.join(format!(
        ".{}.tmp-{}",
        path.file_name().map_or_else(|| "table".into(), |n| n.to_string_lossy()),
        std::process::id()
    ));
    std::fs::write(&tmp, text)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

pub(super) fn serialize_body(table: &CoinLimitTable) -> String {
    let mut body = String::new();
    writeln!(body, "fn {}", table.fn_kind().name()).expect("string write");
    writeln!(body, "max-order {}", table.max_order()).expect("string write");
    for order in 0..=table.max_order() {
        let (derivs, slots) = CoinLimitTable::entry_indices(table.fn_kind(), order);
        writeln!(
            body,
            "order {order} | {} | {} : {}",
            index_names(&derivs),
            index_names(&slots),
            serialize_poly(table.entry(order).expect("built entry")),
        )
        .expect("string write");
    }
    body
}

fn index_names(indices: &[Index]) -> String {
    indices.iter().map(Index::display_name).collect::<Vec<_>>().join(" ")
}

fn serialize_poly(poly: &TensorPoly<BigRational>) -> String {
    if poly.is_zero() {
        return "0".into();
    }
    poly.terms()
        .map(|(mono, coeff)| format!("{coeff} {mono}"))
        .collect::<Vec<_>>()
        .join(" + ")
}

fn hex_sha256(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

pub(super) fn load(path: &Path) -> Result<CoinLimitTable, ColimError> {
    let display_path = path.display().to_string();
    let text = std::fs::read_to_string(path)?;
    let malformed = |line: usize, msg: String| ColimError::Malformed {
        path: display_path.clone(),
        line,
        msg,
    };

    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let expected = format!("{MAGIC} v{FORMAT_VERSION}");
    if header != expected {
        return Err(ColimError::Incompatible {
            path: display_path,
            expected,
            found: header.to_string(),
        });
    }

    let hash_line = lines.next().unwrap_or("");
    let declared = hash_line
        .strip_prefix("hash ")
        .ok_or_else(|| malformed(2, format!("expected `hash <hex>`, found `{hash_line}`")))?;
    let body_start = text
        .match_indices('\n')
        .nth(1)
        .map(|(i, _)| i + 1)
        .ok_or_else(|| malformed(2, "missing table body".into()))?;
    let body = &text[body_start..];
    if hex_sha256(body) != declared {
        return Err(ColimError::HashMismatch { path: display_path });
    }

    let mut body_lines = body.lines().enumerate().map(|(i, l)| (i + 3, l));

    let (ln, fn_line) = body_lines.next().ok_or_else(|| malformed(3, "missing fn line".into()))?;
    let fn_kind = fn_line
        .strip_prefix("fn ")
        .and_then(LimitFn::from_name)
        .ok_or_else(|| malformed(ln, format!("expected `fn l` or `fn I`, found `{fn_line}`")))?;

    let (ln, mo_line) =
        body_lines.next().ok_or_else(|| malformed(4, "missing max-order line".into()))?;
    let max_order: usize = mo_line
        .strip_prefix("max-order ")
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| malformed(ln, format!("expected `max-order <int>`, found `{mo_line}`")))?;

    let mut entries: Vec<TensorPoly<BigRational>> = Vec::with_capacity(max_order + 1);
    for order in 0..=max_order {
        let (ln, line) = body_lines
            .next()
            .ok_or_else(|| malformed(4 + order, format!("missing record for order {order}")))?;
        entries.push(parse_record(line, fn_kind, order).map_err(|msg| malformed(ln, msg))?);
    }
    if let Some((ln, extra)) = body_lines.next() {
        return Err(malformed(ln, format!("unexpected trailing content `{extra}`")));
    }

    Ok(CoinLimitTable::from_parts(fn_kind, max_order, entries))
}

fn parse_record(
    line: &str,
    fn_kind: LimitFn,
    order: usize,
) -> Result<TensorPoly<BigRational>, String> {
    let rest = line
        .strip_prefix(&format!("order {order} | "))
        .ok_or_else(|| format!("expected record for order {order}, found `{line}`"))?;
    let (index_part, poly_part) =
        rest.split_once(" : ").ok_or_else(|| format!("missing ` : ` separator in `{line}`"))?;
    let (deriv_part, slot_part) = index_part
        .split_once(" | ")
        .map(|(d, s)| (d.trim(), s.trim()))
        .ok_or_else(|| format!("missing slot separator in `{line}`"))?;

    let (derivs, slots) = CoinLimitTable::entry_indices(fn_kind, order);
    if deriv_part != index_names(&derivs) || slot_part != index_names(&slots) {
        return Err(format!(
            "index list `{deriv_part} | {slot_part}` does not match the canonical naming \
             `{} | {}`",
            index_names(&derivs),
            index_names(&slots)
        ));
    }

    parse_poly(poly_part)
}

fn parse_poly(text: &str) -> Result<TensorPoly<BigRational>, String> {
    let text = text.trim();
    if text == "0" {
        return Ok(TensorPoly::zero());
    }
    let mut poly = TensorPoly::zero();
    for term in text.split(" + ") {
        let (coeff_str, mono_str) = term
            .split_once(' ')
            .ok_or_else(|| format!("term `{term}` is not `coefficient monomial`"))?;
        let coeff = BigRational::from_str(coeff_str)
            .map_err(|e| format!("bad coefficient `{coeff_str}`: {e}"))?;
        let mono = TensorMonomial::parse(mono_str)?;
        poly.add_term(coeff, mono);
    }
    Ok(poly)
}
