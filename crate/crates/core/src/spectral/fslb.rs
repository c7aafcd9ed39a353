//! `FSLB` binary arrays.
//!
//! Layout: magic `FSLB`, `u32` version (1), `u8` dtype (1 = complex128),
//! `u8` rank, `rank × u64` dims, then the row-major payload as little-endian
//! `(re, im)` pairs. All integers are little-endian.
//!
//! The array carries no physical metadata. [`write_field`] and
//! [`write_trajectory`] store box length and time axis in a JSON sidecar at
//! `<path>.json`, which the matching readers require.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{Field, Trajectory};
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::report::write_atomic;

pub const MAGIC: [u8; 4] = *b"FSLB";
pub const VERSION: u32 = 1;
pub const DTYPE_COMPLEX128: u8 = 1;

/// Raw array: dims plus row-major payload.
#[derive(Clone, Debug, PartialEq)]
pub struct Array {
    pub dims: Vec<u64>,
    pub data: Vec<Complex64>,
}

/// Physical metadata kept next to an array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub dim: usize,
    pub points: usize,
    pub box_length: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
}

pub fn encode(array: &Array) -> Result<Vec<u8>> {
    let expected: u64 = array.dims.iter().product();
    if expected != array.data.len() as u64 {
        return Err(Error::ShapeMismatch(format!(
            "dims {:?} hold {expected} values, payload has {}",
            array.dims,
            array.data.len()
        )));
    }
    let rank = u8::try_from(array.dims.len())
        .map_err(|_| Error::Format("rank exceeds 255".into()))?;
    let mut out = Vec::with_capacity(10 + 8 * array.dims.len() + 16 * array.data.len());
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(DTYPE_COMPLEX128);
    out.push(rank);
    for d in &array.dims {
        out.extend_from_slice(&d.to_le_bytes());
    }
    for v in &array.data {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<Array> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4)? != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(cur.take(4)?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let dtype = cur.take(1)?[0];
    if dtype != DTYPE_COMPLEX128 {
        return Err(Error::Format(format!("unsupported dtype {dtype}")));
    }
    let rank = cur.take(1)?[0] as usize;
    let mut dims = Vec::with_capacity(rank);
    for _ in 0..rank {
        dims.push(u64::from_le_bytes(cur.take(8)?.try_into().unwrap()));
    }
    let count = dims
        .iter()
        .try_fold(1u64, |a, &d| a.checked_mul(d))
        .ok_or_else(|| Error::Format("dims overflow".into()))?;
    let need = count
        .checked_mul(16)
        .ok_or_else(|| Error::Format("dims overflow".into()))?;
    if (bytes.len() - cur.pos) as u64 != need {
        return Err(Error::Format(format!(
            "payload is {} bytes, dims need {need}",
            bytes.len() - cur.pos
        )));
    }
    let data = cur.bytes[cur.pos..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..].try_into().unwrap()),
            )
        })
        .collect();
    Ok(Array { dims, data })
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Format("truncated header".into()));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }
}

pub fn write_array(path: &Path, array: &Array) -> Result<()> {
    write_atomic(path, &encode(array)?)
}

pub fn read_array(path: &Path) -> Result<Array> {
    decode(&fs::read(path).map_err(|e| Error::io(path, e))?)
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn write_sidecar(path: &Path, meta: &Sidecar) -> Result<()> {
    let json = serde_json::to_vec_pretty(meta).expect("sidecar serializes");
    write_atomic(&sidecar_path(path), &json)
}

fn read_sidecar(path: &Path) -> Result<Sidecar> {
    let p = sidecar_path(path);
    let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", p.display())))
}

pub fn write_field(path: &Path, f: &Field) -> Result<()> {
    let g = f.grid();
    let array = Array {
        dims: vec![g.points() as u64; g.dim()],
        data: f.values().to_vec(),
    };
    write_array(path, &array)?;
    write_sidecar(
        path,
        &Sidecar {
            dim: g.dim(),
            points: g.points(),
            box_length: g.box_length(),
            t0: None,
            dt: None,
        },
    )
}

pub fn read_field(path: &Path) -> Result<Field> {
    let meta = read_sidecar(path)?;
    let array = read_array(path)?;
    let grid = Grid::new(meta.dim, meta.points, meta.box_length)?;
    if array.dims != vec![meta.points as u64; meta.dim] {
        return Err(Error::ShapeMismatch(format!(
            "array dims {:?} do not match a {}-dimensional grid of {} points",
            array.dims, meta.dim, meta.points
        )));
    }
    Field::new(grid, array.data)
}

pub fn write_trajectory(path: &Path, u: &Trajectory) -> Result<()> {
    let g = u.grid();
    let mut dims = vec![u.frame_count() as u64];
    dims.extend(std::iter::repeat_n(g.points() as u64, g.dim()));
    write_array(
        path,
        &Array {
            dims,
            data: u.values().to_vec(),
        },
    )?;
    write_sidecar(
        path,
        &Sidecar {
            dim: g.dim(),
            points: g.points(),
            box_length: g.box_length(),
            t0: Some(u.t0()),
            dt: Some(u.dt()),
        },
    )
}

pub fn read_trajectory(path: &Path) -> Result<Trajectory> {
    let meta = read_sidecar(path)?;
    let array = read_array(path)?;
    let grid = Grid::new(meta.dim, meta.points, meta.box_length)?;
    let (Some(t0), Some(dt)) = (meta.t0, meta.dt) else {
        return Err(Error::Format("sidecar lacks t0/dt; not a trajectory".into()));
    };
    if array.dims.len() != meta.dim + 1
        || array.dims[1..].iter().any(|&d| d != meta.points as u64)
    {
        return Err(Error::ShapeMismatch(format!(
            "array dims {:?} do not match a trajectory on a {}-dimensional grid of {} points",
            array.dims, meta.dim, meta.points
        )));
    }
    Trajectory::from_values(grid, t0, dt, array.dims[0] as usize, array.data)
}
