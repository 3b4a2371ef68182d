//! Trajectory CSV, raw snapshot files and atomic JSON output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralVectorField;
use crate::grid::Grid;
use crate::solver::Trajectory;

/// Writes `bytes` to a temporary sibling and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::config(format!("not a file path: {}", path.display())))?;
    let tmp: PathBuf = dir.join(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// CSV header for an `n`-dimensional trajectory.
pub fn trajectory_header(n_dims: usize) -> Vec<String> {
    let mut h: Vec<String> = ["t", "l1", "l2", "linf", "grad_l2", "div_l2", "energy", "dissipation"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    h.extend((1..=n_dims).map(|i| format!("mean_{i}")));
    h
}

/// One row per record; `dissipation` is the cumulative
/// `int_0^t (|grad u|^2 + |div u|^2 / eps)`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let n = traj.grid.n_dims();
    let mut out = trajectory_header(n).join(",");
    out.push('\n');
    for (i, r) in traj.records.iter().enumerate() {
        let mut row = vec![
            r.t,
            r.l1,
            r.l2,
            r.linf,
            r.grad_l2,
            r.div_l2,
            r.energy,
            traj.dissipation(i, traj.epsilon),
        ];
        row.extend(&r.mean);
        let cells: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    write_atomic(path, trajectory_csv(traj).as_bytes())
}

/// Two-column `(t, value)` CSV.
pub fn series_csv(header: (&str, &str), t: &[f64], v: &[f64]) -> String {
    let mut out = format!("{},{}\n", header.0, header.1);
    for (a, b) in t.iter().zip(v) {
        out.push_str(&format!("{a:e},{b:e}\n"));
    }
    out
}

/// Metadata stored next to a raw snapshot.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SnapshotMeta {
    pub n_dims: usize,
    pub resolution: usize,
    pub box_length: f64,
    pub t: f64,
    pub components: usize,
    /// Always `"f64-le"`.
    pub dtype: String,
    /// Always `"component-major, row-major, last axis fastest"`.
    pub layout: String,
}

/// Writes physical samples as little-endian `f64` (component after
/// component) to `path` and the metadata to `path` with `.json` appended.
pub fn write_snapshot(path: &Path, field: &SpectralVectorField, t: f64) -> Result<()> {
    let grid = field.grid();
    let samples = field.to_physical();
    let mut bytes = Vec::with_capacity(samples.len() * grid.len() * 8);
    for comp in &samples {
        for v in comp {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
    }
    write_atomic(path, &bytes)?;
    let meta = SnapshotMeta {
        n_dims: grid.n_dims(),
        resolution: grid.resolution(),
        box_length: grid.box_length(),
        t,
        components: samples.len(),
        dtype: "f64-le".into(),
        layout: "component-major, row-major, last axis fastest".into(),
    };
    write_json(&sidecar_path(path), &meta)
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Reads a snapshot written by [`write_snapshot`].
pub fn read_snapshot(path: &Path) -> Result<(SpectralVectorField, SnapshotMeta)> {
    let meta: SnapshotMeta = serde_json::from_slice(&fs::read(sidecar_path(path))?)?;
    let grid = Grid::new(meta.n_dims, meta.box_length, meta.resolution)?;
    let bytes = fs::read(path)?;
    let expected = meta.components * grid.len() * 8;
    if bytes.len() != expected {
        return Err(Error::Shape {
            expected,
            got: bytes.len(),
        });
    }
    let values: Vec<f64> = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let comps: Vec<Vec<f64>> = values.chunks(grid.len()).map(|c| c.to_vec()).collect();
    Ok((SpectralVectorField::from_physical(&grid, &comps)?, meta))
}

/// Serde adapter writing non-finite `f64` values as the strings `"inf"`,
/// `"-inf"` and `"nan"` (plain JSON has no representation for them).
pub mod extended_f64 {
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, \"inf\", \"-inf\" or \"nan\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    "nan" => Ok(f64::NAN),
                    _ => Err(E::custom(format!("unexpected {v:?}"))),
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{run, SimConfig};

    #[derive(serde::Serialize, serde::Deserialize)]
    struct Wrapped(#[serde(with = "extended_f64")] f64);

    #[test]
    fn non_finite_values_survive_json() {
        for v in [f64::INFINITY, f64::NEG_INFINITY, 2.5] {
            let text = serde_json::to_string(&Wrapped(v)).unwrap();
            assert_eq!(serde_json::from_str::<Wrapped>(&text).unwrap().0, v);
        }
        assert_eq!(serde_json::to_string(&Wrapped(f64::INFINITY)).unwrap(), "\"inf\"");
        assert!(serde_json::from_str::<Wrapped>("\"nan\"").unwrap().0.is_nan());
    }

    #[test]
    fn snapshot_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(2, 10.0, 16).unwrap();
        let comps: Vec<Vec<f64>> = (0..2)
            .map(|d| (0..g.len()).map(|p| (p as f64 * 0.37 + d as f64).sin()).collect())
            .collect();
        let u = SpectralVectorField::from_physical(&g, &comps).unwrap();
        let path = dir.path().join("snap.bin");
        write_snapshot(&path, &u, 1.5).unwrap();
        let (v, meta) = read_snapshot(&path).unwrap();
        assert_eq!(meta.t, 1.5);
        assert!(u.max_abs_difference(&v) < 1e-15);
        assert_eq!(fs::metadata(&path).unwrap().len(), 2 * 256 * 8);
    }

    #[test]
    fn csv_has_header_and_one_row_per_record() {
        let g = Grid::new(2, 10.0, 16).unwrap();
        let tr = run(&SimConfig::new(&g, 1.0, 0.1, 0.5), &SpectralVectorField::zeros(&g)).unwrap();
        let text = trajectory_csv(&tr);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,l1,l2,linf,grad_l2,div_l2,energy,dissipation,mean_1,mean_2");
        assert_eq!(lines.len(), 1 + tr.len());
    }
}
