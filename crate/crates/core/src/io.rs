//! Plain-text and binary dumps.
//!
//! Floats in CSV files are written as `{:.16e}`, i.e. 17 significant digits,
//! which round-trips every `f64`. Each state dump may carry a JSON sidecar
//! holding the grid.
//!
//! The dense two-mode binary layout is row-major over `(i₁, i₂)` with two
//! little-endian `f64` per amplitude (real part, then imaginary part) and no
//! header; the grids go in the sidecar.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{GridSpec, MomentumWaveFunction, QuadratureDensity, WaveFunction1D};
use crate::modular::ModularWaveFunction;
use crate::num::Real;
use crate::two_mode::{JointDensity, WaveFunction2D};

/// Fixed 17-significant-digit rendering.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Grid fields written next to a dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridMetadata {
    pub ell: f64,
    #[serde(rename = "M")]
    pub points_per_period: usize,
    #[serde(rename = "P")]
    pub periods: usize,
    pub dx: f64,
    pub dp: f64,
}

impl GridMetadata {
    pub fn of<T: Real>(grid: &GridSpec<T>) -> Self {
        Self {
            ell: grid.ell.to_f64_lossy(),
            points_per_period: grid.points_per_period,
            periods: grid.periods,
            dx: grid.dx().to_f64_lossy(),
            dp: grid.dp().to_f64_lossy(),
        }
    }

    pub fn grid(&self) -> Result<GridSpec<f64>> {
        GridSpec::new(self.ell, self.points_per_period, self.periods)
    }
}

/// Sidecar contents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpMetadata {
    /// `position`, `momentum`, `quadrature`, `modular`, `two_mode` or `two_mode_binary`.
    pub kind: String,
    pub grids: Vec<GridMetadata>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// `out.csv` → `out.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn write_metadata(path: &Path, meta: &DumpMetadata) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, meta)?;
    f.write_all(b"\n")?;
    f.flush()?;
    Ok(())
}

pub fn read_metadata(path: &Path) -> Result<DumpMetadata> {
    Ok(serde_json::from_reader(File::open(path)?)?)
}

fn csv_writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    Ok(out)
}

fn complex_rows<W: Write, T: Real>(
    out: &mut csv::Writer<W>,
    coords: impl Iterator<Item = T>,
    amps: &[Complex<T>],
) -> Result<()> {
    for (x, a) in coords.zip(amps) {
        out.write_record([fmt17(x.to_f64_lossy()), fmt17(a.re.to_f64_lossy()), fmt17(a.im.to_f64_lossy())])?;
    }
    Ok(())
}

/// `x,re,im`, one row per grid point.
pub fn write_state_csv<W: Write, T: Real>(w: W, psi: &WaveFunction1D<T>) -> Result<()> {
    let mut out = csv_writer(w, &["x", "re", "im"])?;
    complex_rows(&mut out, psi.grid().positions().into_iter(), psi.amplitudes())?;
    out.flush()?;
    Ok(())
}

/// `p,re,im`, one row per grid point.
pub fn write_momentum_csv<W: Write, T: Real>(w: W, phi: &MomentumWaveFunction<T>) -> Result<()> {
    let mut out = csv_writer(w, &["p", "re", "im"])?;
    complex_rows(&mut out, phi.grid().momenta().into_iter(), phi.amplitudes())?;
    out.flush()?;
    Ok(())
}

/// Reads an `x,re,im` dump back onto `grid`.
pub fn read_state_csv<R: Read>(r: R, grid: GridSpec<f64>) -> Result<WaveFunction1D<f64>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_owned).collect();
    if header != ["x", "re", "im"] {
        return Err(Error::Format(format!("expected header x,re,im, got {}", header.join(","))));
    }
    let mut amps = Vec::with_capacity(grid.len());
    for (row, rec) in rd.records().enumerate() {
        let rec = rec?;
        let field = |i: usize| -> Result<f64> {
            rec.get(i)
                .ok_or_else(|| Error::Format(format!("row {}: missing column {i}", row + 2)))?
                .parse()
                .map_err(|e| Error::Format(format!("row {}: {e}", row + 2)))
        };
        let x = field(0)?;
        if row < grid.len() && (x - grid.x(row)).abs() > 1e-9 * grid.dx() {
            return Err(Error::Format(format!("row {}: x = {x} does not match the grid", row + 2)));
        }
        amps.push(Complex::new(field(1)?, field(2)?));
    }
    if amps.len() != grid.len() {
        return Err(Error::Format(format!("expected {} rows, got {}", grid.len(), amps.len())));
    }
    WaveFunction1D::new(grid, amps)
}

/// Writes `path` as `x,re,im` plus its JSON sidecar.
pub fn dump_state<T: Real>(path: &Path, psi: &WaveFunction1D<T>) -> Result<()> {
    write_state_csv(BufWriter::new(File::create(path)?), psi)?;
    write_metadata(
        &sidecar_path(path),
        &DumpMetadata { kind: "position".into(), grids: vec![GridMetadata::of(psi.grid())], angle: None, threshold: None },
    )
}

/// `x_phi,density` for a quadrature density.
pub fn write_density_csv<W: Write, T: Real>(w: W, density: &QuadratureDensity<T>) -> Result<()> {
    let mut out = csv_writer(w, &["x_phi", "density"])?;
    for (j, v) in density.values.iter().enumerate() {
        out.write_record([fmt17(density.coordinate(j).to_f64_lossy()), fmt17(v.to_f64_lossy())])?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a quadrature density plus sidecar.
pub fn dump_density<T: Real>(path: &Path, grid: &GridSpec<T>, density: &QuadratureDensity<T>) -> Result<()> {
    write_density_csv(BufWriter::new(File::create(path)?), density)?;
    write_metadata(
        &sidecar_path(path),
        &DumpMetadata {
            kind: "quadrature".into(),
            grids: vec![GridMetadata::of(grid)],
            angle: Some(density.angle.to_f64_lossy()),
            threshold: None,
        },
    )
}

/// `xbar,pbar,re,im`, row-major over the torus.
pub fn write_modular_csv<W: Write, T: Real>(w: W, mwf: &ModularWaveFunction<T>) -> Result<()> {
    let mut out = csv_writer(w, &["xbar", "pbar", "re", "im"])?;
    for j in 0..mwf.rows() {
        for k in 0..mwf.cols() {
            let a = mwf.get(j, k);
            out.write_record([
                fmt17(mwf.xbar(j).to_f64_lossy()),
                fmt17(mwf.pbar(k).to_f64_lossy()),
                fmt17(a.re.to_f64_lossy()),
                fmt17(a.im.to_f64_lossy()),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// `xbar,pbar,density` with `|Ψ(x̄, p̄)|²`, for density plots of the torus.
pub fn write_modular_density_csv<W: Write, T: Real>(w: W, mwf: &ModularWaveFunction<T>) -> Result<()> {
    let mut out = csv_writer(w, &["xbar", "pbar", "density"])?;
    for j in 0..mwf.rows() {
        for k in 0..mwf.cols() {
            out.write_record([
                fmt17(mwf.xbar(j).to_f64_lossy()),
                fmt17(mwf.pbar(k).to_f64_lossy()),
                fmt17(mwf.get(j, k).norm_sqr().to_f64_lossy()),
            ])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Writes the modular amplitudes plus sidecar.
pub fn dump_modular<T: Real>(path: &Path, mwf: &ModularWaveFunction<T>) -> Result<()> {
    write_modular_csv(BufWriter::new(File::create(path)?), mwf)?;
    write_metadata(
        &sidecar_path(path),
        &DumpMetadata { kind: "modular".into(), grids: vec![GridMetadata::of(mwf.grid())], angle: None, threshold: None },
    )
}

/// `x1,x2,re,im` for amplitudes with `|ψ| > threshold`.
pub fn write_two_mode_csv<W: Write, T: Real>(w: W, psi: &WaveFunction2D<T>, threshold: f64) -> Result<usize> {
    let mut out = csv_writer(w, &["x1", "x2", "re", "im"])?;
    let [ga, gb] = *psi.grids();
    let n2 = gb.len();
    let mut rows = 0;
    for (idx, a) in psi.amplitudes().iter().enumerate() {
        if a.norm().to_f64_lossy() > threshold {
            let (i, j) = (idx / n2, idx % n2);
            out.write_record([
                fmt17(ga.x(i).to_f64_lossy()),
                fmt17(gb.x(j).to_f64_lossy()),
                fmt17(a.re.to_f64_lossy()),
                fmt17(a.im.to_f64_lossy()),
            ])?;
            rows += 1;
        }
    }
    out.flush()?;
    Ok(rows)
}

/// `x1,x2,density` for a joint quadrature density, skipping values `≤ threshold`.
pub fn write_joint_density_csv<W: Write, T: Real>(w: W, density: &JointDensity<T>, threshold: f64) -> Result<usize> {
    use crate::two_mode::Mode;
    let mut out = csv_writer(w, &["x1", "x2", "density"])?;
    let n2 = density.shape.1;
    let mut rows = 0;
    for (idx, v) in density.values.iter().enumerate() {
        if v.to_f64_lossy() > threshold {
            out.write_record([
                fmt17(density.coordinate(Mode::A, idx / n2).to_f64_lossy()),
                fmt17(density.coordinate(Mode::B, idx % n2).to_f64_lossy()),
                fmt17(v.to_f64_lossy()),
            ])?;
            rows += 1;
        }
    }
    out.flush()?;
    Ok(rows)
}

/// Dense little-endian dump; see the module docs for the layout.
pub fn write_two_mode_binary<W: Write, T: Real>(mut w: W, psi: &WaveFunction2D<T>) -> Result<()> {
    for a in psi.amplitudes() {
        w.write_all(&a.re.to_f64_lossy().to_le_bytes())?;
        w.write_all(&a.im.to_f64_lossy().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Reads [`write_two_mode_binary`] output.
pub fn read_two_mode_binary<R: Read>(mut r: R, grids: [GridSpec<f64>; 2]) -> Result<WaveFunction2D<f64>> {
    let n = grids[0].len() * grids[1].len();
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 16 * n {
        return Err(Error::Format(format!("expected {} bytes, got {}", 16 * n, bytes.len())));
    }
    let amps = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex::new(re, im)
        })
        .collect();
    WaveFunction2D::new(grids, amps)
}

/// Writes a two-mode state as sparse CSV or dense binary, plus sidecar.
pub fn dump_two_mode<T: Real>(path: &Path, psi: &WaveFunction2D<T>, binary: bool, threshold: f64) -> Result<()> {
    let grids = psi.grids().iter().map(GridMetadata::of).collect();
    let f = BufWriter::new(File::create(path)?);
    let (kind, threshold) = if binary {
        write_two_mode_binary(f, psi)?;
        ("two_mode_binary", None)
    } else {
        write_two_mode_csv(f, psi, threshold)?;
        ("two_mode", Some(threshold))
    };
    write_metadata(&sidecar_path(path), &DumpMetadata { kind: kind.into(), grids, angle: None, threshold })
}
