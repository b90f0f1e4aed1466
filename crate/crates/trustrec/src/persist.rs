//! Text file formats for matrices, id maps, recommendation dumps, and
//! metrics tables.
//!
//! Every numeric value is printed with enough digits for an exact `f64`
//! round-trip, and every matrix file travels with a `<path>.provenance`
//! sidecar of `key=value` lines describing the configuration that built it,
//! so outputs stay diffable and auditable.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::evaluate::{MetricsReport, METRIC_KS};
use crate::graph::{Convention, DegreeMode};
use crate::ingest::IdMap;
use crate::katz::{BoostDiag, KatzConfig, Provenance, RowNorm, SimilarityMatrix};
use crate::recommend::RankedRecommendations;
use crate::sparse::SparseMatrix;

/// Path of the `key=value` sidecar belonging to `path`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".provenance");
    path.with_file_name(name)
}

fn fmt_value(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str, line: usize) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|_| Error::parse(line, format!("expected a number, got '{s}'")))
}

fn parse_usize(s: &str, line: usize) -> Result<usize> {
    s.parse::<usize>()
        .map_err(|_| Error::parse(line, format!("expected a count, got '{s}'")))
}

/// Writes `key=value` lines to `path`.
pub fn write_sidecar(path: &Path, pairs: &[(&str, String)]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for (key, value) in pairs {
        writeln!(out, "{key}={value}")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads `key=value` lines from `path`, preserving order.
pub fn read_sidecar(path: &Path) -> Result<Vec<(String, String)>> {
    let reader = BufReader::new(File::open(path)?);
    let mut pairs = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(idx + 1, format!("expected key=value, got '{line}'")))?;
        pairs.push((key.to_string(), value.to_string()));
    }
    Ok(pairs)
}

fn provenance_pairs(p: &Provenance) -> Vec<(&'static str, String)> {
    let mut pairs = vec![("label", p.label())];
    match p {
        Provenance::Katz(c) => {
            pairs.push(("kind", "propagated".into()));
            pairs.push(("alpha", fmt_value(c.alpha)));
            pairs.push(("k_max", c.k_max.to_string()));
            pairs.push((
                "degree_norm",
                c.degree_norm
                    .map_or("none".into(), |m| m.as_str().to_string()),
            ));
            pairs.push((
                "row_norm",
                c.row_norm.map_or("none".into(), |n| n.as_str().to_string()),
            ));
            pairs.push(("boost", c.boost.to_string()));
            pairs.push(("boost_diag", c.boost_diag.as_str().to_string()));
            pairs.push(("convention", c.convention.as_str().to_string()));
        }
        Provenance::TrustExplicit { convention } => {
            pairs.push(("kind", "explicit-trust".into()));
            pairs.push(("convention", convention.as_str().to_string()));
        }
        Provenance::TrustJaccard { trusted_sets } => {
            pairs.push(("kind", "jaccard-trust".into()));
            pairs.push(("trusted_sets", trusted_sets.to_string()));
        }
    }
    pairs
}

fn provenance_from_pairs(pairs: &[(String, String)]) -> Result<Provenance> {
    let get = |key: &str| -> Result<&str> {
        pairs
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or_else(|| Error::Config(format!("provenance sidecar is missing '{key}'")))
    };
    let parse_bool = |key: &str| -> Result<bool> {
        match get(key)? {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(Error::Config(format!(
                "'{key}' must be true or false, got '{other}'"
            ))),
        }
    };
    match get("kind")? {
        "propagated" => {
            let degree_norm = match get("degree_norm")? {
                "none" => None,
                s => Some(DegreeMode::parse(s)?),
            };
            let row_norm = match get("row_norm")? {
                "none" => None,
                s => Some(RowNorm::parse(s)?),
            };
            let config = KatzConfig {
                alpha: parse_f64(get("alpha")?, 0)
                    .map_err(|_| Error::Config("'alpha' is not a number".into()))?,
                k_max: get("k_max")?
                    .parse()
                    .map_err(|_| Error::Config("'k_max' is not a count".into()))?,
                degree_norm,
                row_norm,
                boost: parse_bool("boost")?,
                boost_diag: BoostDiag::parse(get("boost_diag")?)?,
                convention: Convention::parse(get("convention")?)?,
            };
            Ok(Provenance::Katz(config))
        }
        "explicit-trust" => Ok(Provenance::TrustExplicit {
            convention: Convention::parse(get("convention")?)?,
        }),
        "jaccard-trust" => Ok(Provenance::TrustJaccard {
            trusted_sets: parse_bool("trusted_sets")?,
        }),
        other => Err(Error::Config(format!("unknown similarity kind '{other}'"))),
    }
}

/// Writes the matrix as a sorted triplet file plus its provenance sidecar.
///
/// Format: header `n_rows n_cols nnz`, then one `row col value` line per
/// stored entry in row-major order, values at full precision.
pub fn write_similarity(path: &Path, sim: &SimilarityMatrix) -> Result<()> {
    let m = sim.matrix();
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "{} {} {}", m.n_rows(), m.n_cols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        writeln!(out, "{} {} {}", i, j, fmt_value(v))?;
    }
    out.flush()?;
    write_sidecar(&sidecar_path(path), &provenance_pairs(sim.provenance()))
}

/// Reads a triplet file and its provenance sidecar back into memory.
pub fn read_similarity(path: &Path) -> Result<SimilarityMatrix> {
    let reader = BufReader::new(File::open(path)?);
    let mut lines = reader.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "empty matrix file".to_string()))?;
    let header = header?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(Error::parse(
            1,
            format!("expected 'n_rows n_cols nnz', got '{header}'"),
        ));
    }
    let n_rows = parse_usize(dims[0], 1)?;
    let n_cols = parse_usize(dims[1], 1)?;
    let nnz = parse_usize(dims[2], 1)?;
    let mut triplets = Vec::with_capacity(nnz);
    for (idx, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                idx + 1,
                format!("expected 'row col value', got '{line}'"),
            ));
        }
        let i = parse_usize(fields[0], idx + 1)? as u32;
        let j = parse_usize(fields[1], idx + 1)? as u32;
        let v = parse_f64(fields[2], idx + 1)?;
        triplets.push((i, j, v));
    }
    if triplets.len() != nnz {
        return Err(Error::Dimension(format!(
            "header promises {} entries, file holds {}",
            nnz,
            triplets.len()
        )));
    }
    let matrix = SparseMatrix::from_triplets(n_rows, n_cols, triplets)?;
    let provenance = provenance_from_pairs(&read_sidecar(&sidecar_path(path))?)?;
    Ok(SimilarityMatrix::new(matrix, provenance))
}

/// Writes `dense raw` id pairs, dense ids ascending.
pub fn write_id_map(path: &Path, map: &IdMap) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for dense in 0..map.len() as u32 {
        writeln!(out, "{} {}", dense, map.raw(dense))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a `dense raw` id file back into a map.
pub fn read_id_map(path: &Path) -> Result<IdMap> {
    let reader = BufReader::new(File::open(path)?);
    let mut raw_ids = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                idx + 1,
                format!("expected 'dense raw', got '{line}'"),
            ));
        }
        let dense = parse_usize(fields[0], idx + 1)?;
        if dense != raw_ids.len() {
            return Err(Error::parse(
                idx + 1,
                format!("dense ids must ascend from 0, got {dense}"),
            ));
        }
        raw_ids.push(
            fields[1].parse::<u64>().map_err(|_| {
                Error::parse(idx + 1, format!("expected an id, got '{}'", fields[1]))
            })?,
        );
    }
    let map = IdMap::from_raw_ids(raw_ids.clone());
    if map.len() != raw_ids.len() {
        return Err(Error::Config(
            "id map file contains duplicate raw ids".into(),
        ));
    }
    Ok(map)
}

/// Writes ranked lists as `user item rank score` lines in raw-id terms,
/// preceded by a `#`-comment describing the producing configuration.
///
/// Users appear in input order, ranks count from 1.
pub fn write_recommendations(
    path: &Path,
    recommendations: &[RankedRecommendations],
    user_map: &IdMap,
    item_map: &IdMap,
    config_line: &str,
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "# {config_line}")?;
    for recs in recommendations {
        let user = user_map.raw(recs.target());
        for (rank, &(item, score)) in recs.items().iter().enumerate() {
            writeln!(
                out,
                "{} {} {} {}",
                user,
                item_map.raw(item),
                rank + 1,
                fmt_value(score)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes the per-cutoff metrics table:
/// `config,k,ndcg,precision,recall,users,empty_lists`.
pub fn write_metrics_csv(path: &Path, reports: &[MetricsReport]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "config,k,ndcg,precision,recall,users,empty_lists")?;
    for report in reports {
        for k in 1..=METRIC_KS {
            writeln!(
                out,
                "{},{},{:.6},{:.6},{:.6},{},{}",
                report.label(),
                k,
                report.ndcg_at(k),
                report.precision_at(k),
                report.recall_at(k),
                report.evaluated_users(),
                report.empty_lists()
            )?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes the recall/precision curves: `config,k,recall,precision`.
pub fn write_curves_csv(path: &Path, reports: &[MetricsReport]) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "config,k,recall,precision")?;
    for report in reports {
        for k in 1..=METRIC_KS {
            writeln!(
                out,
                "{},{},{:.6},{:.6}",
                report.label(),
                k,
                report.recall_at(k),
                report.precision_at(k)
            )?;
        }
    }
    out.flush()?;
    Ok(())
}
