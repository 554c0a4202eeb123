//! Parsers for model, measure and domain specifications.

use std::path::Path;

use potlab_core::gridlab::{DomainSpec, GridDomain, Point};
use potlab_core::groups::{FiniteTable, GroupModel};
use potlab_core::measures::Measure;

use crate::error::{CliError, Result};

fn read_input(path: &str) -> Result<String> {
    std::fs::read_to_string(Path::new(path))
        .map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))
}

fn int<T: std::str::FromStr>(text: &str, what: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| CliError::usage(format!("{what}: expected an integer, got {text:?}")))
}

/// `free:K`, `abelian:D`, `heisenberg`, `lamplighter`, `bs:1:M`, `cyclic:N`,
/// `finite:PATH`, or factors joined by `*`.
pub fn parse_model(spec: &str) -> Result<GroupModel> {
    let spec = spec.trim();
    if spec.contains('*') {
        let factors = spec.split('*').map(parse_model).collect::<Result<Vec<_>>>()?;
        return Ok(GroupModel::direct_product(factors)?);
    }
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let model = match head {
        "free" => GroupModel::free(int(rest, "free rank")?)?,
        "abelian" => GroupModel::free_abelian(int(rest, "abelian rank")?)?,
        "heisenberg" if rest.is_empty() => GroupModel::heisenberg()?,
        "lamplighter" if rest.is_empty() => GroupModel::lamplighter()?,
        "bs" => {
            let m = rest
                .strip_prefix("1:")
                .ok_or_else(|| CliError::usage("Baumslag-Solitar models are written bs:1:M"))?;
            GroupModel::baumslag_solitar(int(m, "BS parameter")?)?
        }
        "cyclic" => GroupModel::finite(FiniteTable::cyclic(int(rest, "cyclic order")?)?, None)?,
        "finite" => GroupModel::finite(parse_table(&read_input(rest)?)?, None)?,
        _ => return Err(CliError::usage(format!("unknown model {spec:?}"))),
    };
    Ok(model)
}

/// Multiplication table CSV: the first row lists element names after an
/// empty corner cell, each further row starts with its element name.
pub fn parse_table(text: &str) -> Result<FiniteTable> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| CliError::usage("empty multiplication table"))?
        .map_err(|e| CliError::usage(format!("table: {e}")))?;
    let names: Vec<String> = header.iter().skip(1).map(String::from).collect();
    let index = |name: &str| {
        names
            .iter()
            .position(|n| n == name)
            .map(|i| i as u32)
            .ok_or_else(|| CliError::usage(format!("table: unknown element {name:?}")))
    };
    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(|e| CliError::usage(format!("table: {e}")))?;
        let label = rec.get(0).unwrap_or("");
        if names.get(i).map(String::as_str) != Some(label) {
            return Err(CliError::usage(format!(
                "table: row {} is labelled {label:?}, expected the header order",
                i + 1
            )));
        }
        rows.push(rec.iter().skip(1).map(index).collect::<Result<Vec<_>>>()?);
    }
    Ok(FiniteTable::new(names, rows)?)
}

/// `srw`, `lazy:P`, or a CSV file of `word,weight` rows.
pub fn parse_measure(model: &GroupModel, spec: &str) -> Result<Measure> {
    let spec = spec.trim();
    if spec == "srw" {
        return Ok(Measure::simple_random_walk(model));
    }
    if let Some(p) = spec.strip_prefix("lazy:") {
        let p: f64 = p
            .parse()
            .map_err(|_| CliError::usage(format!("lazy:P needs a number, got {p:?}")))?;
        return Ok(Measure::lazy(model, p)?);
    }
    let text = read_input(spec)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut pairs = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| CliError::usage(format!("{spec}: {e}")))?;
        let (word, weight) = match (rec.get(0), rec.get(1)) {
            (Some(w), Some(x)) if rec.len() == 2 => (w, x),
            _ => return Err(CliError::usage(format!("{spec}: line {} needs word,weight", i + 1))),
        };
        if i == 0 && word == "word" && weight == "weight" {
            continue;
        }
        let weight: f64 = weight
            .parse()
            .map_err(|_| CliError::usage(format!("{spec}: bad weight {weight:?}")))?;
        pairs.push((model.parse_element(word)?, weight));
    }
    Ok(Measure::new(model, pairs)?)
}

/// `interval:N`, `rectangle:W,H`, `tiles:W,H,COUNT` (`H = 0` for a 1-D
/// strip), or `mask:PATH`.
pub fn parse_domain(spec: &str) -> Result<GridDomain> {
    let spec = spec.trim();
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| CliError::usage(format!("unknown domain {spec:?}")))?;
    let nums = || -> Result<Vec<i64>> { rest.split(',').map(|t| int(t, "domain size")).collect() };
    let d = match head {
        "interval" => DomainSpec::Interval(int(rest, "interval length")?),
        "rectangle" => match nums()?[..] {
            [w, h] => DomainSpec::Rectangle { w, h },
            _ => return Err(CliError::usage("rectangle:W,H")),
        },
        "tiles" => match nums()?[..] {
            [w, h, count] => DomainSpec::Tiles { w, h, count },
            _ => return Err(CliError::usage("tiles:W,H,COUNT")),
        },
        "mask" => DomainSpec::Mask(read_input(rest)?),
        _ => return Err(CliError::usage(format!("unknown domain {spec:?}"))),
    };
    Ok(GridDomain::build(&d)?)
}

pub fn parse_point(text: &str) -> Result<Point> {
    let parts: Vec<i64> = text
        .split(',')
        .map(|t| int(t, "point"))
        .collect::<Result<_>>()?;
    match parts[..] {
        [x] => Ok((x, 0)),
        [x, y] => Ok((x, y)),
        _ => Err(CliError::usage(format!("point {text:?} must be x or x,y"))),
    }
}
