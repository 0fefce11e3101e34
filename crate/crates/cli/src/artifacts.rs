//! Artifact formats. Column names and image conventions are part of the
//! public schema; see the README.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Density grid in image order: `rows[0]` is the top element row.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityGrid {
    pub nx: usize,
    pub ny: usize,
    /// Row-major, top to bottom.
    pub values: Vec<f64>,
}

impl DensityGrid {
    /// From a field indexed like the mesh (row `iy = 0` at the bottom).
    pub fn from_mesh_order(nx: usize, ny: usize, x: &[f64], index: impl Fn(usize, usize) -> usize) -> Self {
        let mut values = Vec::with_capacity(nx * ny);
        for iy in (0..ny).rev() {
            for ix in 0..nx {
                values.push(x[index(ix, iy)]);
            }
        }
        Self { nx, ny, values }
    }

    /// 0 = void, 255 = solid, linear in x and rounded half away from zero.
    pub fn gray_levels(&self) -> Vec<u8> {
        self.values
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect()
    }
}

/// Binary 8-bit PGM.
pub fn write_pgm(path: &Path, grid: &DensityGrid) -> anyhow::Result<()> {
    let mut bytes = format!("P5\n{} {}\n255\n", grid.nx, grid.ny).into_bytes();
    bytes.extend(grid.gray_levels());
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

/// Reads what [`write_pgm`] writes: header, width, height and gray levels.
pub fn read_pgm(path: &Path) -> anyhow::Result<(usize, usize, Vec<u8>)> {
    let mut reader = BufReader::new(fs::File::open(path).with_context(|| format!("opening {}", path.display()))?);
    let mut header = Vec::new();
    // Magic, dimensions and maxval each sit on their own line.
    for _ in 0..3 {
        let mut line = String::new();
        reader.read_line(&mut line)?;
        header.push(line.trim().to_string());
    }
    ensure!(header[0] == "P5", "not a binary PGM");
    ensure!(header[2] == "255", "only 8-bit PGM is supported");
    let dims: Vec<usize> = header[1]
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .context("bad PGM dimensions")?;
    ensure!(dims.len() == 2, "bad PGM dimensions");
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    ensure!(data.len() == dims[0] * dims[1], "PGM data size mismatch");
    Ok((dims[0], dims[1], data))
}

/// One image row per CSV line, values in shortest round-trip form.
pub fn write_density_csv(path: &Path, grid: &DensityGrid) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    for row in grid.values.chunks(grid.nx) {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_density_csv(path: &Path) -> anyhow::Result<DensityGrid> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut values = Vec::new();
    let mut nx = None;
    let mut ny = 0;
    for record in r.records() {
        let record = record?;
        match nx {
            None => nx = Some(record.len()),
            Some(n) if n != record.len() => bail!("ragged density grid at row {}", ny + 1),
            _ => {}
        }
        for field in record.iter() {
            values.push(field.parse::<f64>().with_context(|| format!("bad density {field:?}"))?);
        }
        ny += 1;
    }
    Ok(DensityGrid {
        nx: nx.unwrap_or(0),
        ny,
        values,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TopoptHistoryRow {
    pub iteration: usize,
    pub objective: f64,
    pub scaled_objective: f64,
    pub volume_fraction: f64,
    pub constraint: f64,
    pub change: f64,
    pub f1: Option<f64>,
    pub repeated_eigenvalues: bool,
    pub infeasible_subproblem: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SizingHistoryRow {
    pub run: usize,
    pub generation: usize,
    pub evaluations: usize,
    pub failures: usize,
    pub front_size: usize,
    pub best_area_density: f64,
    pub best_max_vm: Option<f64>,
    pub best_f1: Option<f64>,
}

/// One archive member. Lengths in mm, area density in kg/m², stress in Pa,
/// frequency in Hz. Columns that do not apply to the core are empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParetoRow {
    pub run: usize,
    pub core_type: String,
    pub t_f: f64,
    pub t_w: f64,
    pub h_c: f64,
    pub h_h: Option<f64>,
    pub h_l: Option<f64>,
    pub s: f64,
    pub t_j: Option<f64>,
    pub area_density: f64,
    pub max_vm: Option<f64>,
    pub f1: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureRow {
    pub run: usize,
    pub generation: usize,
    pub genes: String,
    pub message: String,
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize()
        .collect::<Result<Vec<T>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}

pub fn sha256_file(path: &Path) -> anyhow::Result<String> {
    let bytes = fs::read(path)?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

pub fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    let mut f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(v: f64) -> DensityGrid {
        DensityGrid {
            nx: 4,
            ny: 3,
            values: vec![v; 12],
        }
    }

    #[test]
    fn gray_level_mapping() {
        assert!(grid(1.0).gray_levels().iter().all(|&g| g == 255));
        assert!(grid(0.5).gray_levels().iter().all(|&g| g == 128));
        assert!(grid(0.0).gray_levels().iter().all(|&g| g == 0));
    }

    #[test]
    fn image_rows_run_top_to_bottom() {
        // Mesh order: element (ix, iy) at iy * nx + ix, iy = 0 at the bottom.
        let x = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5];
        let g = DensityGrid::from_mesh_order(3, 2, &x, |ix, iy| iy * 3 + ix);
        assert_eq!(g.values, vec![0.3, 0.4, 0.5, 0.0, 0.1, 0.2]);
    }

    #[test]
    fn files_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = DensityGrid {
            nx: 3,
            ny: 2,
            values: vec![1e-3, 0.1 + 0.2, 1.0 / 3.0, 0.999_999_999_9, 1.0, 0.5],
        };
        let csv = dir.path().join("d.csv");
        write_density_csv(&csv, &g).unwrap();
        assert_eq!(read_density_csv(&csv).unwrap(), g);
        let pgm = dir.path().join("d.pgm");
        write_pgm(&pgm, &g).unwrap();
        let (nx, ny, data) = read_pgm(&pgm).unwrap();
        assert_eq!((nx, ny), (3, 2));
        assert_eq!(data, g.gray_levels());
    }
}
