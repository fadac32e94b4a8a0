//! Versioned binary parameter container.
//!
//! Layout (all integers little-endian):
//!   magic            8 bytes  b"BDCNCKP1"
//!   version          u32      currently 1
//!   meta_count       u32      followed by meta_count key/value pairs,
//!                             each: len u32 + UTF-8 bytes, twice
//!   param_count      u64
//!   per parameter:   name len u32 + UTF-8 bytes,
//!                    rank u64, dims u64 * rank,
//!                    raw f32 data (little-endian), prod(dims) values
//!
//! Round-trips are bit-exact: floats are moved as their raw u32 bits.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Result, TensorError};

pub const MAGIC: &[u8; 8] = b"BDCNCKP1";
pub const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct ParamRecord {
    pub name: String,
    pub dims: Vec<u64>,
    pub data: Vec<f32>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Checkpoint {
    pub meta: Vec<(String, String)>,
    pub params: Vec<ParamRecord>,
}

impl Checkpoint {
    pub fn meta_value(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.meta.len() as u32).to_le_bytes())?;
        for (k, v) in &self.meta {
            write_str(&mut w, k)?;
            write_str(&mut w, v)?;
        }
        w.write_all(&(self.params.len() as u64).to_le_bytes())?;
        for p in &self.params {
            let numel: u64 = p.dims.iter().product();
            if numel as usize != p.data.len() {
                return Err(TensorError::DataLength {
                    shape: format!("{:?}", p.dims),
                    expected: numel as usize,
                    got: p.data.len(),
                });
            }
            write_str(&mut w, &p.name)?;
            w.write_all(&(p.dims.len() as u64).to_le_bytes())?;
            for &d in &p.dims {
                w.write_all(&d.to_le_bytes())?;
            }
            for &v in &p.data {
                w.write_all(&v.to_bits().to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        read_exact(&mut r, &mut magic, "magic")?;
        if &magic != MAGIC {
            return Err(TensorError::CheckpointIntegrity(format!(
                "bad magic {:02x?}",
                magic
            )));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(TensorError::CheckpointIntegrity(format!(
                "unsupported format version {version}"
            )));
        }
        let meta_count = read_u32(&mut r)? as usize;
        let mut meta = Vec::with_capacity(meta_count);
        for _ in 0..meta_count {
            let k = read_str(&mut r)?;
            let v = read_str(&mut r)?;
            meta.push((k, v));
        }
        let param_count = read_u64(&mut r)? as usize;
        let mut params = Vec::with_capacity(param_count);
        for _ in 0..param_count {
            let name = read_str(&mut r)?;
            let rank = read_u64(&mut r)? as usize;
            if rank > 8 {
                return Err(TensorError::CheckpointIntegrity(format!(
                    "implausible rank {rank} for '{name}'"
                )));
            }
            let mut dims = Vec::with_capacity(rank);
            for _ in 0..rank {
                dims.push(read_u64(&mut r)?);
            }
            let numel: u64 = dims.iter().product();
            let mut data = Vec::with_capacity(numel as usize);
            let mut buf = [0u8; 4];
            for _ in 0..numel {
                read_exact(&mut r, &mut buf, "parameter data")?;
                data.push(f32::from_bits(u32::from_le_bytes(buf)));
            }
            params.push(ParamRecord { name, dims, data });
        }
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(TensorError::CheckpointIntegrity(
                "trailing bytes after last parameter".into(),
            ));
        }
        Ok(Self { meta, params })
    }
}

fn write_str<W: Write>(w: &mut W, s: &str) -> Result<()> {
    w.write_all(&(s.len() as u32).to_le_bytes())?;
    w.write_all(s.as_bytes())?;
    Ok(())
}

fn read_exact<R: Read>(r: &mut R, buf: &mut [u8], what: &str) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| TensorError::CheckpointIntegrity(format!("truncated while reading {what}")))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    read_exact(r, &mut b, "u32")?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    read_exact(r, &mut b, "u64")?;
    Ok(u64::from_le_bytes(b))
}

fn read_str<R: Read>(r: &mut R) -> Result<String> {
    let len = read_u32(r)? as usize;
    if len > 1 << 20 {
        return Err(TensorError::CheckpointIntegrity(format!(
            "implausible string length {len}"
        )));
    }
    let mut buf = vec![0u8; len];
    read_exact(r, &mut buf, "string")?;
    String::from_utf8(buf)
        .map_err(|_| TensorError::CheckpointIntegrity("invalid UTF-8 in name".into()))
}
