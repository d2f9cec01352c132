use std::path::Path;

use serde::{Deserialize, Serialize};

use super::write_atomic;
use crate::error::{Error, Result};
use crate::ranking::{Orientation, Ranking};
use crate::scoring::{ScoreAux, ScoreRecord};

const RANKING_HEADER: [&str; 3] = ["sample_id", "score", "rank"];
const SCORES_HEADER: [&str; 7] = [
    "sample_id",
    "method",
    "score",
    "vote_iou",
    "best_member",
    "max_iou",
    "mean_variance",
];

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

fn finish(path: &Path, writer: csv::Writer<Vec<u8>>) -> Result<()> {
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::io(path, e.into_error()))?;
    write_atomic(path, &bytes)
}

/// Writes `sample_id,score,rank` rows, best first. Scores use the shortest
/// decimal form that parses back to the same `f64`.
pub fn write_ranking_csv(ranking: &Ranking, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(RANKING_HEADER)
        .map_err(|e| csv_err(path, e))?;
    for (i, e) in ranking.entries().iter().enumerate() {
        w.write_record([
            e.sample_id.clone(),
            e.score.to_string(),
            (i + 1).to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

/// Reads a ranking CSV. Orientation is inferred from how scores move with
/// rank; the result is re-sorted canonically (equal scores by sample id).
pub fn read_ranking_csv(path: impl AsRef<Path>) -> Result<Ranking> {
    let path = path.as_ref();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let header = reader.headers().map_err(|e| csv_err(path, e))?.clone();
    if header.iter().collect::<Vec<_>>() != RANKING_HEADER {
        return Err(parse_err(
            1,
            format!("expected header {}", RANKING_HEADER.join(",")),
        ));
    }
    let mut rows: Vec<(usize, String, f64)> = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let line = i + 2;
        let score: f64 = rec[1]
            .parse()
            .map_err(|_| parse_err(line, format!("bad score {:?}", &rec[1])))?;
        let rank: usize = rec[2]
            .parse()
            .map_err(|_| parse_err(line, format!("bad rank {:?}", &rec[2])))?;
        rows.push((rank, rec[0].to_owned(), score));
    }
    rows.sort_by_key(|r| r.0);
    for (i, r) in rows.iter().enumerate() {
        if r.0 != i + 1 {
            return Err(parse_err(0, "ranks must be exactly 1..n".into()));
        }
    }
    let non_increasing = rows.windows(2).all(|w| w[0].2 >= w[1].2);
    let non_decreasing = rows.windows(2).all(|w| w[0].2 <= w[1].2);
    let orientation = if non_increasing {
        Orientation::HigherIsCleaner
    } else if non_decreasing {
        Orientation::LowerIsCleaner
    } else {
        return Err(parse_err(0, "scores are not monotone in rank".into()));
    };
    Ranking::from_scores(rows.into_iter().map(|(_, id, s)| (id, s)), orientation)
}

/// Writes per-sample score records; columns a method does not produce stay empty.
pub fn write_scores_csv(records: &[ScoreRecord], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SCORES_HEADER)
        .map_err(|e| csv_err(path, e))?;
    for r in records {
        let (vote_iou, best, max_iou, var) = match r.aux {
            ScoreAux::Aer { vote_iou } => (
                vote_iou.to_string(),
                String::new(),
                String::new(),
                String::new(),
            ),
            ScoreAux::Rvr {
                best_member,
                max_iou,
                mean_variance,
            } => (
                String::new(),
                best_member.to_string(),
                max_iou.to_string(),
                mean_variance.to_string(),
            ),
            ScoreAux::Random => Default::default(),
        };
        w.write_record([
            r.sample_id.clone(),
            r.method.to_string(),
            r.score.to_string(),
            vote_iou,
            best,
            max_iou,
            var,
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    finish(path, w)
}

/// One selected sample, as written by the `select` subcommand.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub sample_id: String,
    pub rank: usize,
}

pub fn write_selection_jsonl(ids: &[String], path: impl AsRef<Path>) -> Result<()> {
    let mut out = String::new();
    for (i, id) in ids.iter().enumerate() {
        let row = SelectionRow {
            sample_id: id.clone(),
            rank: i + 1,
        };
        out.push_str(&serde_json::to_string(&row).map_err(|e| Error::invalid(e.to_string()))?);
        out.push('\n');
    }
    write_atomic(path.as_ref(), out.as_bytes())
}

pub fn read_selection_jsonl(path: impl AsRef<Path>) -> Result<Vec<SelectionRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}
