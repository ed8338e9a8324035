//! Text renderings of leaderboards, λ sweeps and robustness grids.

use std::fmt;
use std::str::FromStr;

use ddrank_core::metrics::round1;
use ddrank_core::orchestrator::{RankedEntry, RobustnessGrid};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Markdown,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "table" => Ok(Format::Table),
            "csv" => Ok(Format::Csv),
            "markdown" | "md" => Ok(Format::Markdown),
            other => Err(CliError::Validation(format!(
                "unknown format {other:?} (expected table, csv or markdown)"
            ))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Table => "table",
            Format::Csv => "csv",
            Format::Markdown => "markdown",
        })
    }
}

/// One decimal, half away from zero.
pub fn fmt1(x: f64) -> String {
    format!("{:.1}", round1(x))
}

/// A rectangular block of cells. Columns flagged numeric are right-aligned in tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub headers: Vec<String>,
    pub numeric: Vec<bool>,
    pub rows: Vec<Vec<String>>,
}

fn csv_text(g: &Grid) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(&g.headers).expect("write to memory");
    for r in &g.rows {
        w.write_record(r).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 cells")
}

fn table_text(g: &Grid) -> String {
    let width = |i: usize| {
        g.rows
            .iter()
            .map(|r| r[i].chars().count())
            .chain([g.headers[i].chars().count()])
            .max()
            .unwrap_or(0)
    };
    let widths: Vec<usize> = (0..g.headers.len()).map(width).collect();
    let line = |cells: &[String]| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let pad = " ".repeat(widths[i] - c.chars().count());
                if g.numeric[i] {
                    format!("{pad}{c}")
                } else {
                    format!("{c}{pad}")
                }
            })
            .collect();
        parts.join("  ").trim_end().to_string()
    };
    let mut out = line(&g.headers);
    out.push('\n');
    let total = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
    out.push_str(&"-".repeat(total));
    out.push('\n');
    for r in &g.rows {
        out.push_str(&line(r));
        out.push('\n');
    }
    out
}

fn markdown_text(g: &Grid) -> String {
    let row = |cells: &[String]| format!("| {} |\n", cells.join(" | "));
    let mut out = row(&g.headers);
    let rule: Vec<String> = g
        .numeric
        .iter()
        .map(|&n| {
            if n {
                "---:".to_string()
            } else {
                "---".to_string()
            }
        })
        .collect();
    out.push_str(&row(&rule));
    for r in &g.rows {
        out.push_str(&row(r));
    }
    out
}

pub fn render_grid(g: &Grid, format: Format) -> String {
    match format {
        Format::Table => table_text(g),
        Format::Csv => csv_text(g),
        Format::Markdown => markdown_text(g),
    }
}

/// A leaderboard row in reporting units.
#[derive(Debug, Clone, PartialEq)]
pub struct BoardRow {
    pub rank: usize,
    pub dataset: String,
    pub model: String,
    pub ipc: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub method: String,
    pub hlr: Option<f64>,
    pub ior: Option<f64>,
    pub lrs: Option<f64>,
    pub ars: Option<f64>,
}

impl BoardRow {
    pub fn from_ranked(r: &RankedEntry, model: &str) -> Self {
        let e = &r.entry;
        BoardRow {
            rank: r.rank,
            dataset: e.dataset_id.clone(),
            model: model.to_string(),
            ipc: e.ipc,
            lambda: e.weights.lambda,
            gamma: e.weights.gamma,
            method: e.method_id.clone(),
            hlr: e.hlr,
            ior: e.ior,
            lrs: e.lrs,
            ars: e.ars,
        }
    }
}

pub const BOARD_KEYS: [&str; 7] = [
    "rank", "dataset", "model", "ipc", "lambda", "gamma", "method",
];
pub const LRS_HEADERS: [&str; 3] = ["HLR↓", "IOR↑", "LRS↑"];
pub const ARS_HEADER: &str = "ARS↑";

/// Leaderboard grid. The LRS triad appears when any row carries an LRS and
/// the ARS column when any row carries an ARS; a row missing a value in a
/// shown column makes the report incomplete. An empty board renders both.
pub fn leaderboard_grid(rows: &[BoardRow]) -> Result<Grid, CliError> {
    let with_lrs = rows.is_empty() || rows.iter().any(|r| r.lrs.is_some());
    let with_ars = rows.is_empty() || rows.iter().any(|r| r.ars.is_some());
    if !rows.is_empty() && !with_lrs && !with_ars {
        return Err(CliError::Validation(
            "leaderboard rows carry no scores".into(),
        ));
    }
    let mut headers: Vec<String> = BOARD_KEYS.iter().map(|s| s.to_string()).collect();
    let mut numeric = vec![true, false, false, true, true, true, false];
    if with_lrs {
        headers.extend(LRS_HEADERS.iter().map(|s| s.to_string()));
        numeric.extend([true; 3]);
    }
    if with_ars {
        headers.push(ARS_HEADER.into());
        numeric.push(true);
    }
    let mut out = Vec::with_capacity(rows.len());
    for r in rows {
        let need = |v: Option<f64>, what: &str| {
            v.map(fmt1).ok_or_else(|| {
                CliError::Validation(format!(
                    "incomplete report: {} ({}, {}, ipc {}) has no {what}",
                    r.method, r.dataset, r.model, r.ipc
                ))
            })
        };
        let mut cells = vec![
            r.rank.to_string(),
            r.dataset.clone(),
            r.model.clone(),
            r.ipc.to_string(),
            r.lambda.to_string(),
            r.gamma.to_string(),
            r.method.clone(),
        ];
        if with_lrs {
            cells.push(need(r.hlr, "HLR")?);
            cells.push(need(r.ior, "IOR")?);
            cells.push(need(r.lrs, "LRS")?);
        }
        if with_ars {
            cells.push(need(r.ars, "ARS")?);
        }
        out.push(cells);
    }
    Ok(Grid {
        headers,
        numeric,
        rows: out,
    })
}

pub fn render_leaderboard(rows: &[BoardRow], format: Format) -> Result<String, CliError> {
    Ok(render_grid(&leaderboard_grid(rows)?, format))
}

/// Reads a leaderboard csv written by [`render_leaderboard`].
pub fn parse_leaderboard_csv(text: &str) -> Result<Vec<BoardRow>, CliError> {
    let bad = |m: String| CliError::Validation(format!("leaderboard csv: {m}"));
    let mut rd = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers: Vec<String> = rd
        .headers()
        .map_err(|e| bad(e.to_string()))?
        .iter()
        .map(String::from)
        .collect();
    if headers.len() < BOARD_KEYS.len() || headers[..BOARD_KEYS.len()] != BOARD_KEYS {
        return Err(bad(format!(
            "expected leading columns {}",
            BOARD_KEYS.join(",")
        )));
    }
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (hlr, ior, lrs, ars) = (
        col(LRS_HEADERS[0]),
        col(LRS_HEADERS[1]),
        col(LRS_HEADERS[2]),
        col(ARS_HEADER),
    );
    let known = BOARD_KEYS.len() + [hlr, ior, lrs, ars].iter().filter(|c| c.is_some()).count();
    if known != headers.len() {
        return Err(bad(format!("unexpected columns in {}", headers.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let line = i + 2;
        let num = |c: usize| -> Result<f64, CliError> {
            rec[c]
                .parse()
                .map_err(|_| bad(format!("line {line}: {:?} is not a number", &rec[c])))
        };
        let int = |c: usize| -> Result<usize, CliError> {
            rec[c]
                .parse()
                .map_err(|_| bad(format!("line {line}: {:?} is not an integer", &rec[c])))
        };
        let opt = |c: Option<usize>| c.map(num).transpose();
        rows.push(BoardRow {
            rank: int(0)?,
            dataset: rec[1].to_string(),
            model: rec[2].to_string(),
            ipc: int(3)?,
            lambda: num(4)?,
            gamma: num(5)?,
            method: rec[6].to_string(),
            hlr: opt(hlr)?,
            ior: opt(ior)?,
            lrs: opt(lrs)?,
            ars: opt(ars)?,
        });
    }
    Ok(rows)
}

/// One method's LRS at each λ.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub method: String,
    pub lrs: Vec<f64>,
}

pub fn sweep_grid(lambdas: &[f64], rows: &[SweepRow]) -> Result<Grid, CliError> {
    let mut headers = vec!["method".to_string()];
    headers.extend(lambdas.iter().map(|l| format!("λ={l}")));
    let mut cells = Vec::with_capacity(rows.len());
    for r in rows {
        if r.lrs.len() != lambdas.len() {
            return Err(CliError::Validation(format!(
                "incomplete sweep: {} has {} values for {} λ",
                r.method,
                r.lrs.len(),
                lambdas.len()
            )));
        }
        let mut row = vec![r.method.clone()];
        row.extend(r.lrs.iter().map(|&v| fmt1(v)));
        cells.push(row);
    }
    let mut numeric = vec![false];
    numeric.extend(vec![true; lambdas.len()]);
    Ok(Grid {
        headers,
        numeric,
        rows: cells,
    })
}

/// Methods × models LRS matrix; failed cells show `n/a`.
pub fn robustness_grid(grids: &[RobustnessGrid]) -> Grid {
    let mut models: Vec<String> = Vec::new();
    for g in grids {
        for c in &g.cells {
            if !models.contains(&c.model_id) {
                models.push(c.model_id.clone());
            }
        }
    }
    let mut headers = vec!["method".to_string()];
    headers.extend(models.iter().map(|m| format!("{m} LRS↑")));
    headers.push("spread".into());
    let rows = grids
        .iter()
        .map(|g| {
            let mut row = vec![g.method_id.clone()];
            for m in &models {
                let cell = g.cells.iter().find(|c| &c.model_id == m);
                row.push(match cell.and_then(|c| c.metrics) {
                    Some(mr) => fmt1(mr.lrs),
                    None => "n/a".into(),
                });
            }
            row.push(g.lrs_spread.map(fmt1).unwrap_or_else(|| "n/a".into()));
            row
        })
        .collect();
    let mut numeric = vec![false];
    numeric.extend(vec![true; models.len() + 1]);
    Grid {
        headers,
        numeric,
        rows,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dc() -> BoardRow {
        BoardRow {
            rank: 1,
            dataset: "cifar10".into(),
            model: "convnet".into(),
            ipc: 1,
            lambda: 0.5,
            gamma: 0.5,
            method: "DC".into(),
            hlr: Some(52.7),
            ior: Some(12.4),
            lrs: Some(19.13),
            ars: None,
        }
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(fmt1(0.25), "0.3");
        assert_eq!(fmt1(-0.25), "-0.3");
        assert_eq!(fmt1(-0.04), "0.0");
    }

    #[test]
    fn table_columns_align() {
        let t = render_leaderboard(&[dc()], Format::Table).unwrap();
        let lines: Vec<&str> = t.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(
            lines[0].contains("HLR↓") && lines[0].contains("IOR↑") && lines[0].contains("LRS↑")
        );
        assert!(!lines[0].contains(ARS_HEADER));
        assert_eq!(lines[0].chars().count(), lines[2].chars().count());
    }

    #[test]
    fn markdown_has_alignment_row() {
        let t = render_leaderboard(&[dc()], Format::Markdown).unwrap();
        assert!(t.lines().nth(1).unwrap().starts_with("| ---: | --- |"));
        assert!(t.contains("| DC | 52.7 | 12.4 | 19.1 |"));
    }

    #[test]
    fn unknown_format_is_rejected() {
        assert!("xml".parse::<Format>().is_err());
        assert_eq!("md".parse::<Format>().unwrap(), Format::Markdown);
    }
}
