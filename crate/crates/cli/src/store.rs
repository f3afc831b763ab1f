//! Oracle files: a magic tag, a format version and the header, followed by
//! the full table dump, all bincode-encoded.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use repath_core::oracle::Header;
use repath_core::Oracle;
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAGIC: [u8; 8] = *b"REPATHO\0";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("not an oracle file")]
    BadMagic,
    #[error("oracle file version {0}, expected {VERSION}")]
    Version(u32),
    #[error("corrupt oracle file: {0}")]
    Decode(#[from] bincode::Error),
}

#[derive(Serialize, Deserialize)]
struct Preamble {
    magic: [u8; 8],
    version: u32,
    header: Header,
}

pub fn write_oracle<W: Write>(o: &Oracle, w: W) -> Result<(), StoreError> {
    let mut w = BufWriter::new(w);
    let pre = Preamble {
        magic: MAGIC,
        version: VERSION,
        header: o.header().clone(),
    };
    bincode::serialize_into(&mut w, &pre)?;
    bincode::serialize_into(&mut w, o)?;
    w.flush()?;
    Ok(())
}

pub fn read_oracle<R: Read>(r: R) -> Result<Oracle, StoreError> {
    let mut r = BufReader::new(r);
    let pre: Preamble = bincode::deserialize_from(&mut r)?;
    if pre.magic != MAGIC {
        return Err(StoreError::BadMagic);
    }
    if pre.version != VERSION {
        return Err(StoreError::Version(pre.version));
    }
    Ok(bincode::deserialize_from(&mut r)?)
}

pub fn save(o: &Oracle, path: &Path) -> Result<(), StoreError> {
    write_oracle(o, File::create(path)?)
}

pub fn load(path: &Path) -> Result<Oracle, StoreError> {
    read_oracle(File::open(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use repath_core::{build_oracle, gen, OracleParams};

    #[test]
    fn round_trip_is_exact() {
        let g = gen::grid(4, 5);
        let o = build_oracle(&g, &[0, 7, 19], &OracleParams::default()).unwrap();
        let mut buf = Vec::new();
        write_oracle(&o, &mut buf).unwrap();
        let back = read_oracle(&buf[..]).unwrap();
        assert_eq!(back, o);
        let mut again = Vec::new();
        write_oracle(&back, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn rejects_other_files() {
        assert!(read_oracle(&b"hello world, this is not an oracle"[..]).is_err());
    }
}
