use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Attested,
    Impossible,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Attested => "attested",
            Label::Impossible => "impossible",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        match s {
            "attested" => Ok(Label::Attested),
            "impossible" => Ok(Label::Impossible),
            other => Err(Error::Data(format!(
                "unknown label `{other}` (expected attested or impossible)"
            ))),
        }
    }
}

/// How the seeds of one checkpoint become features.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum FeatureLayout {
    /// One feature per (checkpoint, seed).
    #[default]
    Concatenate,
    /// One feature per checkpoint: the mean over seeds.
    SeedMean,
}

impl FromStr for FeatureLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<FeatureLayout> {
        match s {
            "concat" | "concatenate" => Ok(FeatureLayout::Concatenate),
            "mean" | "seed-mean" => Ok(FeatureLayout::SeedMean),
            other => Err(Error::Argument(format!("unknown feature layout `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRow {
    pub language: String,
    pub variant: String,
    pub label: Label,
    /// Values in the table's column order.
    pub values: Vec<f64>,
}

/// Perplexity trajectories, one row per (language, variant), with columns
/// named `ppl@<checkpoint>_s<seed>`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub columns: Vec<(u64, u64)>,
    pub rows: Vec<TrajectoryRow>,
}

/// Labeled feature rows ready for classification.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryMatrix {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

impl TrajectoryMatrix {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<Label>) -> Result<TrajectoryMatrix> {
        if features.len() != labels.len() {
            return Err(Error::Data(format!(
                "{} feature rows but {} labels",
                features.len(),
                labels.len()
            )));
        }
        if let Some(first) = features.first() {
            let dim = first.len();
            if let Some(i) = features.iter().position(|r| r.len() != dim) {
                return Err(Error::Data(format!(
                    "row {i} has {} features, expected {dim}",
                    features[i].len()
                )));
            }
        }
        if features.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Data("trajectory features must be finite".into()));
        }
        Ok(TrajectoryMatrix { features, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.first().map_or(0, Vec::len)
    }
}

fn parse_column(name: &str) -> Option<(u64, u64)> {
    let rest = name.strip_prefix("ppl@")?;
    let (ckpt, seed) = rest.split_once("_s")?;
    Some((ckpt.parse().ok()?, seed.parse().ok()?))
}

impl TrajectoryTable {
    pub fn parse(text: &str, origin: &str) -> Result<TrajectoryTable> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::format(origin, 0, "empty trajectory file"))?;
        let header = header.trim_start_matches('#');
        let names: Vec<&str> = header.split('\t').collect();
        if names.len() < 4 || names[..3] != ["language", "variant", "label"] {
            return Err(Error::format(
                origin,
                1,
                "header must start with language, variant, label and name at least one ppl column",
            ));
        }
        let mut columns = Vec::new();
        let mut seen = BTreeSet::new();
        for name in &names[3..] {
            let col = parse_column(name).ok_or_else(|| {
                Error::format(origin, 1, format!("column `{name}` is not of the form ppl@<checkpoint>_s<seed>"))
            })?;
            if !seen.insert(col) {
                return Err(Error::format(origin, 1, format!("duplicate column `{name}`")));
            }
            columns.push(col);
        }
        let mut rows = Vec::new();
        for (i, line) in lines {
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != names.len() {
                return Err(Error::format(
                    origin,
                    i + 1,
                    format!("expected {} fields, found {}", names.len(), fields.len()),
                ));
            }
            let label = fields[2].parse().map_err(|e: Error| Error::format(origin, i + 1, e.to_string()))?;
            let values = fields[3..]
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .ok_or_else(|| Error::format(origin, i + 1, format!("bad perplexity `{f}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(TrajectoryRow {
                language: fields[0].to_string(),
                variant: fields[1].to_string(),
                label,
                values,
            });
        }
        Ok(TrajectoryTable { columns, rows })
    }

    pub fn load(path: &Path) -> Result<TrajectoryTable> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TrajectoryTable::parse(&text, &path.display().to_string())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::from("language\tvariant\tlabel");
        for (c, s) in &self.columns {
            out.push_str(&format!("\tppl@{c}_s{s}"));
        }
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{}\t{}\t{}", r.language, r.variant, r.label));
            for v in &r.values {
                out.push_str(&format!("\t{v}"));
            }
            out.push('\n');
        }
        out
    }

    /// Checkpoints in ascending order.
    pub fn checkpoints(&self) -> Vec<u64> {
        self.columns.iter().map(|c| c.0).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Seeds in ascending order.
    pub fn seeds(&self) -> Vec<u64> {
        self.columns.iter().map(|c| c.1).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Values of one row at one checkpoint, ordered by seed.
    pub fn at_checkpoint(&self, row: &TrajectoryRow, checkpoint: u64) -> Vec<f64> {
        let mut cells: Vec<(u64, f64)> = self
            .columns
            .iter()
            .zip(&row.values)
            .filter(|((c, _), _)| *c == checkpoint)
            .map(|((_, s), v)| (*s, *v))
            .collect();
        cells.sort_by_key(|c| c.0);
        cells.into_iter().map(|c| c.1).collect()
    }

    /// Feature rows ordered by checkpoint, then seed.
    pub fn matrix(&self, layout: FeatureLayout) -> Result<TrajectoryMatrix> {
        let checkpoints = self.checkpoints();
        let seeds = self.seeds();
        let grid: BTreeSet<(u64, u64)> = self.columns.iter().copied().collect();
        if grid.len() != checkpoints.len() * seeds.len() {
            return Err(Error::Data("trajectory columns do not form a full checkpoint x seed grid".into()));
        }
        let features = self
            .rows
            .iter()
            .map(|row| {
                checkpoints
                    .iter()
                    .flat_map(|&c| {
                        let vals = self.at_checkpoint(row, c);
                        match layout {
                            FeatureLayout::Concatenate => vals,
                            FeatureLayout::SeedMean => vec![vals.iter().sum::<f64>() / vals.len() as f64],
                        }
                    })
                    .collect()
            })
            .collect();
        TrajectoryMatrix::new(features, self.rows.iter().map(|r| r.label).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: &str = "language\tvariant\tlabel\tppl@200_s2\tppl@100_s1\tppl@100_s2\tppl@200_s1\n\
                         en\tidentity\tattested\t4\t1\t2\t3\n\
                         en\treverse_full\timpossible\t40\t10\t20\t30\n";

    #[test]
    fn features_follow_checkpoint_then_seed() {
        let t = TrajectoryTable::parse(TABLE, "mem").unwrap();
        assert_eq!(t.checkpoints(), [100, 200]);
        let m = t.matrix(FeatureLayout::Concatenate).unwrap();
        assert_eq!(m.features[0], [1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m.labels, [Label::Attested, Label::Impossible]);
        let m = t.matrix(FeatureLayout::SeedMean).unwrap();
        assert_eq!(m.features[1], [15.0, 35.0]);
    }

    #[test]
    fn round_trip_and_errors() {
        let t = TrajectoryTable::parse(TABLE, "mem").unwrap();
        assert_eq!(TrajectoryTable::parse(&t.to_tsv(), "mem").unwrap(), t);
        assert!(TrajectoryTable::parse("language\tvariant\tlabel\tppl@1\n", "mem").is_err());
        assert!(TrajectoryTable::parse("language\tvariant\tlabel\tppl@1_s1\nen\tx\tmaybe\t1\n", "mem").is_err());
        assert!(TrajectoryTable::parse("language\tvariant\tlabel\tppl@1_s1\nen\tx\tattested\tnan\n", "mem").is_err());
        let ragged = "language\tvariant\tlabel\tppl@1_s1\tppl@2_s2\nen\tx\tattested\t1\t2\n";
        assert!(TrajectoryTable::parse(ragged, "mem").unwrap().matrix(FeatureLayout::Concatenate).is_err());
    }
}
