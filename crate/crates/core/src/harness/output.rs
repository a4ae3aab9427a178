use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CellFailure, CellKey, CellMean, SweepConfig, SweepError, SweepResult};
use crate::ansatz::AnsatzFamily;
use crate::metrics::MetricRecord;

pub const CSV_HEADER: [&str; 14] = [
    "family",
    "n",
    "L",
    "opt_level",
    "run",
    "e_kl_logical",
    "e_kl_transpiled",
    "delta_e_kl",
    "gradvar_logical",
    "gradvar_transpiled",
    "delta_gradvar",
    "depth_logical",
    "depth_transpiled",
    "qubits_transpiled",
];

const MEAN_RUN: &str = "mean";

fn key_fields(key: &CellKey) -> [String; 4] {
    [
        key.family.name().to_string(),
        key.n.to_string(),
        key.reps.to_string(),
        key.opt_level.to_string(),
    ]
}

/// Writes every run row of a cell followed by its mean row (run = `mean`).
/// Floats use shortest round-trip formatting, so output is reproducible and
/// reads back exactly.
pub fn write_records_csv<W: Write>(result: &SweepResult, writer: W) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_HEADER)?;
    let mut runs = result.records.iter().peekable();
    for mean in &result.means {
        while let Some(r) = runs.next_if(|r| record_key(r) == mean.key) {
            let mut row = key_fields(&mean.key).to_vec();
            row.push(r.run_index.to_string());
            row.extend(
                [
                    r.e_kl_logical,
                    r.e_kl_transpiled,
                    r.delta_e_kl,
                    r.gradvar_logical,
                    r.gradvar_transpiled,
                    r.delta_gradvar,
                ]
                .map(|x| x.to_string()),
            );
            row.extend(
                [r.depth_logical, r.depth_transpiled, r.qubits_transpiled].map(|x| x.to_string()),
            );
            w.write_record(&row)?;
        }
        let mut row = key_fields(&mean.key).to_vec();
        row.push(MEAN_RUN.to_string());
        row.extend(
            [
                mean.e_kl_logical,
                mean.e_kl_transpiled,
                mean.delta_e_kl,
                mean.gradvar_logical,
                mean.gradvar_transpiled,
                mean.delta_gradvar,
                mean.depth_logical,
                mean.depth_transpiled,
                mean.qubits_transpiled,
            ]
            .map(|x| x.to_string()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn record_key(r: &MetricRecord) -> CellKey {
    CellKey {
        family: r.family,
        n: r.n_logical,
        reps: r.reps,
        opt_level: r.opt_level,
    }
}

fn parse<T: FromStr>(field: &str, column: &str, line: u64) -> Result<T, SweepError> {
    field
        .parse()
        .map_err(|_| SweepError::Records(format!("line {line}: bad {column} value {field:?}")))
}

/// Reads a records CSV back into run records and cell means.
pub fn read_records_csv<R: Read>(reader: R) -> Result<(Vec<MetricRecord>, Vec<CellMean>), SweepError> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(SweepError::Records(format!("unexpected header {header:?}")));
    }
    let mut records = Vec::new();
    let mut means = Vec::new();
    for row in r.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let f = |i: usize| &row[i];
        let family = AnsatzFamily::from_str(f(0))
            .map_err(|e| SweepError::Records(format!("line {line}: {e}")))?;
        let key = CellKey {
            family,
            n: parse(f(1), "n", line)?,
            reps: parse(f(2), "L", line)?,
            opt_level: parse(f(3), "opt_level", line)?,
        };
        let real = |i: usize| parse::<f64>(f(i), CSV_HEADER[i], line);
        if f(4) == MEAN_RUN {
            means.push(CellMean {
                key,
                e_kl_logical: real(5)?,
                e_kl_transpiled: real(6)?,
                delta_e_kl: real(7)?,
                gradvar_logical: real(8)?,
                gradvar_transpiled: real(9)?,
                delta_gradvar: real(10)?,
                depth_logical: real(11)?,
                depth_transpiled: real(12)?,
                qubits_transpiled: real(13)?,
            });
        } else {
            let int = |i: usize| parse::<usize>(f(i), CSV_HEADER[i], line);
            records.push(MetricRecord {
                family,
                n_logical: key.n,
                reps: key.reps,
                opt_level: key.opt_level,
                run_index: int(4)?,
                e_kl_logical: real(5)?,
                e_kl_transpiled: real(6)?,
                delta_e_kl: real(7)?,
                gradvar_logical: real(8)?,
                gradvar_transpiled: real(9)?,
                delta_gradvar: real(10)?,
                depth_logical: int(11)?,
                depth_transpiled: int(12)?,
                qubits_transpiled: int(13)?,
            });
        }
    }
    Ok((records, means))
}

/// Sidecar describing how a records file was produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub version: String,
    pub config: SweepConfig,
    pub target_name: String,
    pub target_qubits: usize,
    pub kl_log_base: String,
    pub record_count: usize,
    pub cell_count: usize,
    pub failures: Vec<CellFailure>,
    pub wall_clock_seconds: f64,
}

impl Metadata {
    pub fn new(result: &SweepResult) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config: result.config.clone(),
            target_name: result.target_name.clone(),
            target_qubits: result.target_qubits,
            kl_log_base: "e".to_string(),
            record_count: result.records.len(),
            cell_count: result.means.len(),
            failures: result.failures.clone(),
            wall_clock_seconds: result.wall_clock_seconds,
        }
    }
}

/// Writes `records.csv` and `metadata.json` into `dir`, creating it if needed.
pub fn write_outputs(result: &SweepResult, dir: impl AsRef<Path>) -> Result<(), SweepError> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    let file = std::fs::File::create(dir.join("records.csv"))?;
    write_records_csv(result, std::io::BufWriter::new(file))?;
    let meta = serde_json::to_string_pretty(&Metadata::new(result))?;
    std::fs::write(dir.join("metadata.json"), meta + "\n")?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatmapMetric {
    DeltaEKl,
    DeltaGradvar,
    /// Transpiled minus logical depth.
    DepthOverhead,
    /// Transpiled active qubits minus n.
    QubitOverhead,
}

impl HeatmapMetric {
    pub const ALL: [HeatmapMetric; 4] = [
        HeatmapMetric::DeltaEKl,
        HeatmapMetric::DeltaGradvar,
        HeatmapMetric::DepthOverhead,
        HeatmapMetric::QubitOverhead,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HeatmapMetric::DeltaEKl => "delta_e_kl",
            HeatmapMetric::DeltaGradvar => "delta_gradvar",
            HeatmapMetric::DepthOverhead => "depth_overhead",
            HeatmapMetric::QubitOverhead => "qubit_overhead",
        }
    }

    fn value(self, m: &CellMean) -> f64 {
        match self {
            HeatmapMetric::DeltaEKl => m.delta_e_kl,
            HeatmapMetric::DeltaGradvar => m.delta_gradvar,
            HeatmapMetric::DepthOverhead => m.depth_transpiled - m.depth_logical,
            HeatmapMetric::QubitOverhead => m.qubits_transpiled - m.key.n as f64,
        }
    }
}

impl FromStr for HeatmapMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown metric {s:?}"))
    }
}

/// Per-cell means for one (family, opt_level): rows by ascending n, columns
/// by ascending L.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Heatmap {
    pub family: AnsatzFamily,
    pub opt_level: u8,
    pub metric: HeatmapMetric,
    pub n_values: Vec<usize>,
    pub l_values: Vec<usize>,
    pub values: Vec<Vec<f64>>,
}

impl Heatmap {
    /// CSV with a `n\L` corner cell, L values across and n values down.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n\\L");
        for l in &self.l_values {
            out.push_str(&format!(",{l}"));
        }
        out.push('\n');
        for (n, row) in self.n_values.iter().zip(&self.values) {
            out.push_str(&n.to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Heatmap over the (n, L) values present in `means` for the slice.
pub fn heatmap_from_means(
    means: &[CellMean],
    family: AnsatzFamily,
    opt_level: u8,
    metric: HeatmapMetric,
) -> Result<Heatmap, SweepError> {
    let slice = means
        .iter()
        .filter(|m| m.key.family == family && m.key.opt_level == opt_level);
    let n_values: Vec<usize> = slice.clone().map(|m| m.key.n).collect();
    let l_values: Vec<usize> = slice.map(|m| m.key.reps).collect();
    heatmap_on_grid(means, family, opt_level, metric, &n_values, &l_values)
}

/// Heatmap over an explicit grid; every (n, L) cell of it must be present.
pub fn heatmap_on_grid(
    means: &[CellMean],
    family: AnsatzFamily,
    opt_level: u8,
    metric: HeatmapMetric,
    n_values: &[usize],
    l_values: &[usize],
) -> Result<Heatmap, SweepError> {
    let sorted = |v: &[usize]| {
        let mut v = v.to_vec();
        v.sort_unstable();
        v.dedup();
        v
    };
    let (n_values, l_values) = (sorted(n_values), sorted(l_values));
    let missing = |detail: String| SweepError::MissingSlice {
        family,
        opt_level,
        detail,
    };
    if n_values.is_empty() || l_values.is_empty() {
        return Err(missing(String::new()));
    }
    let values = n_values
        .iter()
        .map(|&n| {
            l_values
                .iter()
                .map(|&l| {
                    means
                        .iter()
                        .find(|m| m.key == CellKey { family, n, reps: l, opt_level })
                        .map(|m| metric.value(m))
                        .ok_or_else(|| missing(format!(" (cell n={n}, L={l} missing)")))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Heatmap {
        family,
        opt_level,
        metric,
        n_values,
        l_values,
        values,
    })
}

/// Heatmap over the sweep's configured (n, L) grid.
pub fn export_heatmap(
    result: &SweepResult,
    family: AnsatzFamily,
    opt_level: u8,
    metric: HeatmapMetric,
) -> Result<Heatmap, SweepError> {
    let cfg = &result.config;
    if !cfg.families.contains(&family) || !cfg.opt_levels.contains(&opt_level) {
        return Err(SweepError::MissingSlice {
            family,
            opt_level,
            detail: " (not in the sweep configuration)".to_string(),
        });
    }
    heatmap_on_grid(&result.means, family, opt_level, metric, &cfg.n_values, &cfg.l_values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean(n: usize, reps: usize, d: f64) -> CellMean {
        CellMean {
            key: CellKey {
                family: AnsatzFamily::TtnTree,
                n,
                reps,
                opt_level: 1,
            },
            e_kl_logical: 0.0,
            e_kl_transpiled: d,
            delta_e_kl: d,
            gradvar_logical: 0.0,
            gradvar_transpiled: 0.0,
            delta_gradvar: 0.0,
            depth_logical: 3.0,
            depth_transpiled: 5.0,
            qubits_transpiled: n as f64,
        }
    }

    #[test]
    fn heatmap_layout() {
        let means = vec![mean(4, 2, 0.3), mean(2, 4, 0.2), mean(2, 2, 0.1), mean(4, 4, 0.4)];
        let h = heatmap_from_means(&means, AnsatzFamily::TtnTree, 1, HeatmapMetric::DeltaEKl).unwrap();
        assert_eq!(h.n_values, vec![2, 4]);
        assert_eq!(h.values, vec![vec![0.1, 0.2], vec![0.3, 0.4]]);
        assert_eq!(h.to_csv(), "n\\L,2,4\n2,0.1,0.2\n4,0.3,0.4\n");
        let q = heatmap_from_means(&means, AnsatzFamily::TtnTree, 1, HeatmapMetric::QubitOverhead).unwrap();
        assert!(q.values.iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn heatmap_missing_slice() {
        let means = vec![mean(2, 2, 0.1), mean(4, 4, 0.4)];
        assert!(matches!(
            heatmap_from_means(&means, AnsatzFamily::TtnTree, 1, HeatmapMetric::DeltaEKl),
            Err(SweepError::MissingSlice { .. })
        ));
        assert!(heatmap_from_means(&means, AnsatzFamily::HeaRing, 1, HeatmapMetric::DeltaEKl).is_err());
    }

    #[test]
    fn metric_names_round_trip() {
        for m in HeatmapMetric::ALL {
            assert_eq!(m.name().parse::<HeatmapMetric>(), Ok(m));
        }
    }
}
