//! Binary field snapshots (`LLSF`) with a JSON sidecar mirroring the header.
//!
//! Layout, little-endian: magic `LLSF`, version `u32`, dim `u32`, N `u32`, L `f64`,
//! component count `u32`, representation `u8` (0 physical, 1 spectral), then for each
//! component `N^dim` pairs `(re, im)` of `f64` in row-major order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{LabError, Result};
use crate::field::{ComplexField, CurrentField, CurrentSlice, MagnetizationField, Representation};
use crate::grid::TorusGrid;

pub const MAGIC: &[u8; 4] = b"LLSF";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 4 + 8 + 4 + 1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    pub magic: [u8; 4],
    pub version: u32,
    pub dim: u32,
    pub n: u32,
    pub period: f64,
    pub components: u32,
    pub representation: Representation,
}

impl SnapshotHeader {
    pub fn grid(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.dim as usize, self.n as usize, self.period)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub header: SnapshotHeader,
    pub components: Vec<Vec<Complex64>>,
}

impl Snapshot {
    pub fn new(grid: &TorusGrid, representation: Representation, components: Vec<Vec<Complex64>>) -> Result<Self> {
        if components.is_empty() || components.iter().any(|c| c.len() != grid.len()) {
            return Err(LabError::Format("every component needs one value per grid point".into()));
        }
        Ok(Snapshot {
            header: SnapshotHeader {
                magic: *MAGIC,
                version: FORMAT_VERSION,
                dim: grid.dim() as u32,
                n: grid.n() as u32,
                period: grid.period(),
                components: components.len() as u32,
                representation,
            },
            components,
        })
    }

    pub fn from_complex(u: &ComplexField) -> Self {
        Snapshot::new(u.grid(), u.repr(), vec![u.values().to_vec()]).expect("field matches its grid")
    }

    pub fn from_magnetization(m: &MagnetizationField) -> Self {
        let comps = (0..3).map(|c| m.values().iter().map(|x| Complex64::new(x[c], 0.0)).collect()).collect();
        Snapshot::new(m.grid(), Representation::Physical, comps).expect("field matches its grid")
    }

    pub fn grid(&self) -> Result<TorusGrid> {
        self.header.grid()
    }

    pub fn to_complex(&self) -> Result<ComplexField> {
        if self.components.len() != 1 {
            return Err(LabError::Format(format!("expected 1 component, found {}", self.components.len())));
        }
        ComplexField::new(self.grid()?, self.components[0].clone(), self.header.representation)
    }

    /// Three real physical components, checked against `sphere_tol`.
    pub fn to_magnetization(&self, sphere_tol: f64) -> Result<MagnetizationField> {
        let comps = self.real_components(3)?;
        let values = (0..comps[0].len()).map(|i| [comps[0][i], comps[1][i], comps[2][i]]).collect();
        MagnetizationField::new(self.grid()?, values, sphere_tol)
    }

    /// `dim` real physical components read as a time-independent current.
    pub fn to_current(&self) -> Result<CurrentField> {
        let g = self.grid()?;
        let components = self.real_components(g.dim())?;
        CurrentField::from_slices(g, vec![CurrentSlice { time: 0.0, components }])
    }

    fn real_components(&self, count: usize) -> Result<Vec<Vec<f64>>> {
        if self.components.len() != count {
            return Err(LabError::Format(format!("expected {count} components, found {}", self.components.len())));
        }
        if self.header.representation != Representation::Physical {
            return Err(LabError::Format("expected point values, found spectral coefficients".into()));
        }
        Ok(self.components.iter().map(|c| c.iter().map(|z| z.re).collect()).collect())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let total: usize = self.components.iter().map(|c| c.len()).sum();
        let mut out = Vec::with_capacity(HEADER_LEN + 16 * total);
        out.extend_from_slice(&h.magic);
        out.extend_from_slice(&h.version.to_le_bytes());
        out.extend_from_slice(&h.dim.to_le_bytes());
        out.extend_from_slice(&h.n.to_le_bytes());
        out.extend_from_slice(&h.period.to_le_bytes());
        out.extend_from_slice(&h.components.to_le_bytes());
        out.push(match h.representation {
            Representation::Physical => 0,
            Representation::Spectral => 1,
        });
        for c in &self.components {
            for z in c {
                out.extend_from_slice(&z.re.to_le_bytes());
                out.extend_from_slice(&z.im.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(LabError::Format(format!("snapshot truncated: {} bytes", bytes.len())));
        }
        if &bytes[0..4] != MAGIC {
            return Err(LabError::Format("bad magic, not an LLSF snapshot".into()));
        }
        let u32_at = |o: usize| u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes"));
        let version = u32_at(4);
        if version != FORMAT_VERSION {
            return Err(LabError::Format(format!("unsupported snapshot version {version}")));
        }
        let (dim, n) = (u32_at(8), u32_at(12));
        let period = f64::from_le_bytes(bytes[16..24].try_into().expect("8 bytes"));
        let components = u32_at(24);
        let representation = match bytes[28] {
            0 => Representation::Physical,
            1 => Representation::Spectral,
            r => return Err(LabError::Format(format!("unknown representation flag {r}"))),
        };
        let grid = TorusGrid::new(dim as usize, n as usize, period)?;
        let expected = HEADER_LEN + 16 * grid.len() * components as usize;
        if bytes.len() != expected {
            return Err(LabError::Format(format!("snapshot has {} bytes, header implies {expected}", bytes.len())));
        }
        let mut it = bytes[HEADER_LEN..].chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")));
        let comps = (0..components)
            .map(|_| (0..grid.len()).map(|_| Complex64::new(it.next().unwrap(), it.next().unwrap())).collect())
            .collect();
        Snapshot::new(&grid, representation, comps)
    }

    pub fn sidecar_json(&self) -> Result<String> {
        let mut v = serde_json::to_value(self.header)?;
        let magic = String::from_utf8_lossy(&self.header.magic).into_owned();
        if let Some(obj) = v.as_object_mut() {
            obj.insert("magic".into(), magic.into());
        }
        Ok(serde_json::to_string_pretty(&v)?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)
            .map_err(|e| LabError::Format(format!("cannot read snapshot {}: {e}", path.display())))?;
        Snapshot::from_bytes(&bytes)
    }
}
