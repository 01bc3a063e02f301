//! `KCS1` binary snapshots. All fields little-endian:
//!
//! ```text
//! "KCS1"  tag:u8 (0 grid, 1 particles)  d:u8  reserved:[u8; 2]
//! grid:      nx:u64  nv:u64  lx:f64  lv:f64
//! particles: n:u64   mass:f64
//! t:f64  sigma:f64  payload_len:u64  payload:[f64; payload_len]
//! ```
//!
//! Grid payloads are `nx·nv` values, x-major. Particle payloads are `N·2d`
//! values: all positions, then all velocities, each particle-major.

use std::fmt;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::PhaseGrid;
use crate::particle::ParticleEnsemble;

pub const MAGIC: &[u8; 4] = b"KCS1";

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Geometry {
    Grid { nx: usize, nv: usize, lx: f64, lv: f64 },
    Particles { n: usize, mass: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SnapshotHeader {
    pub d: usize,
    pub geometry: Geometry,
    pub t: f64,
    pub sigma: f64,
    pub payload_len: u64,
}

impl SnapshotHeader {
    pub fn solver_tag(&self) -> &'static str {
        match self.geometry {
            Geometry::Grid { .. } => "grid",
            Geometry::Particles { .. } => "particles",
        }
    }

    fn expected_payload(&self) -> Option<u64> {
        match self.geometry {
            Geometry::Grid { nx, nv, .. } => (nx as u64).checked_mul(nv as u64),
            Geometry::Particles { n, .. } => (n as u64).checked_mul(2 * self.d as u64),
        }
    }
}

impl fmt::Display for SnapshotHeader {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "solver: {}", self.solver_tag())?;
        writeln!(f, "d: {}", self.d)?;
        match self.geometry {
            Geometry::Grid { nx, nv, lx, lv } => {
                writeln!(f, "geometry: {nx} x {nv} cells on [-{lx}, {lx}] x [-{lv}, {lv}]")?
            }
            Geometry::Particles { n, mass } => writeln!(f, "particles: {n}, total mass {mass}")?,
        }
        writeln!(f, "t: {}", self.t)?;
        writeln!(f, "sigma: {}", self.sigma)?;
        write!(f, "payload: {} values", self.payload_len)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SnapshotState {
    Grid(PhaseGrid<f64>),
    Particles(ParticleEnsemble<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub state: SnapshotState,
    pub sigma: f64,
}

impl Snapshot {
    pub fn grid(f: PhaseGrid<f64>, sigma: f64) -> Self {
        Self {
            state: SnapshotState::Grid(f),
            sigma,
        }
    }

    pub fn particles(e: ParticleEnsemble<f64>, sigma: f64) -> Self {
        Self {
            state: SnapshotState::Particles(e),
            sigma,
        }
    }

    pub fn header(&self) -> SnapshotHeader {
        match &self.state {
            SnapshotState::Grid(f) => SnapshotHeader {
                d: 1,
                geometry: Geometry::Grid {
                    nx: f.nx(),
                    nv: f.nv(),
                    lx: f.lx(),
                    lv: f.lv(),
                },
                t: f.t(),
                sigma: self.sigma,
                payload_len: f.values().len() as u64,
            },
            SnapshotState::Particles(e) => SnapshotHeader {
                d: e.d(),
                geometry: Geometry::Particles {
                    n: e.len(),
                    mass: e.mass(),
                },
                t: e.t(),
                sigma: self.sigma,
                payload_len: 2 * e.positions().len() as u64,
            },
        }
    }
}

pub fn encode_snapshot(s: &Snapshot) -> Vec<u8> {
    let h = s.header();
    let mut out = Vec::with_capacity(64 + 8 * h.payload_len as usize);
    out.extend_from_slice(MAGIC);
    let tag = match h.geometry {
        Geometry::Grid { .. } => 0u8,
        Geometry::Particles { .. } => 1u8,
    };
    out.extend_from_slice(&[tag, h.d as u8, 0, 0]);
    match h.geometry {
        Geometry::Grid { nx, nv, lx, lv } => {
            out.extend_from_slice(&(nx as u64).to_le_bytes());
            out.extend_from_slice(&(nv as u64).to_le_bytes());
            out.extend_from_slice(&lx.to_le_bytes());
            out.extend_from_slice(&lv.to_le_bytes());
        }
        Geometry::Particles { n, mass } => {
            out.extend_from_slice(&(n as u64).to_le_bytes());
            out.extend_from_slice(&mass.to_le_bytes());
        }
    }
    out.extend_from_slice(&h.t.to_le_bytes());
    out.extend_from_slice(&h.sigma.to_le_bytes());
    out.extend_from_slice(&h.payload_len.to_le_bytes());
    let mut put = |xs: &[f64]| xs.iter().for_each(|x| out.extend_from_slice(&x.to_le_bytes()));
    match &s.state {
        SnapshotState::Grid(f) => put(f.values()),
        SnapshotState::Particles(e) => {
            put(e.positions());
            put(e.velocities());
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.at < n {
            return Err(Error::CorruptSnapshot(format!(
                "truncated while reading {what} at byte {}",
                self.at
            )));
        }
        let s = &self.bytes[self.at..self.at + n];
        self.at += n;
        Ok(s)
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn count(&mut self, what: &str) -> Result<usize> {
        let v = self.u64(what)?;
        usize::try_from(v).map_err(|_| Error::CorruptSnapshot(format!("{what} = {v} is too large")))
    }
}

fn decode_header(c: &mut Cursor<'_>) -> Result<SnapshotHeader> {
    if c.take(4, "magic")? != MAGIC {
        return Err(Error::CorruptSnapshot("missing KCS1 magic".into()));
    }
    let tag = c.take(4, "solver tag")?;
    let (kind, d) = (tag[0], tag[1] as usize);
    if !(1..=3).contains(&d) {
        return Err(Error::CorruptSnapshot(format!("dimension {d} out of range")));
    }
    let geometry = match kind {
        0 => {
            if d != 1 {
                return Err(Error::CorruptSnapshot(format!("grid snapshot with d = {d}")));
            }
            Geometry::Grid {
                nx: c.count("nx")?,
                nv: c.count("nv")?,
                lx: c.f64("lx")?,
                lv: c.f64("lv")?,
            }
        }
        1 => Geometry::Particles {
            n: c.count("particle count")?,
            mass: c.f64("mass")?,
        },
        other => return Err(Error::CorruptSnapshot(format!("unknown solver tag {other}"))),
    };
    let h = SnapshotHeader {
        d,
        geometry,
        t: c.f64("t")?,
        sigma: c.f64("sigma")?,
        payload_len: c.u64("payload length")?,
    };
    if h.expected_payload() != Some(h.payload_len) {
        return Err(Error::CorruptSnapshot(format!(
            "payload length {} does not match the geometry",
            h.payload_len
        )));
    }
    Ok(h)
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<Snapshot> {
    let mut c = Cursor { bytes, at: 0 };
    let h = decode_header(&mut c)?;
    let len = usize::try_from(h.payload_len)
        .ok()
        .and_then(|n| n.checked_mul(8))
        .ok_or_else(|| Error::CorruptSnapshot("payload too large".into()))?;
    let raw = c.take(len, "payload")?;
    if c.at != bytes.len() {
        return Err(Error::CorruptSnapshot(format!(
            "{} trailing bytes after the payload",
            bytes.len() - c.at
        )));
    }
    let values: Vec<f64> = raw
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    let state = match h.geometry {
        Geometry::Grid { nx, nv, lx, lv } => SnapshotState::Grid(
            PhaseGrid::from_values(nx, nv, lx, lv, values, h.t)
                .map_err(|e| Error::CorruptSnapshot(e.to_string()))?,
        ),
        Geometry::Particles { mass, .. } => {
            let half = values.len() / 2;
            let (pos, vel) = values.split_at(half);
            SnapshotState::Particles(
                ParticleEnsemble::new(h.d, pos.to_vec(), vel.to_vec(), mass, h.t)
                    .map_err(|e| Error::CorruptSnapshot(e.to_string()))?,
            )
        }
    };
    Ok(Snapshot {
        state,
        sigma: h.sigma,
    })
}

pub fn write_snapshot(s: &Snapshot, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&encode_snapshot(s))
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_snapshot(&bytes)
}

/// Reads only the header, without loading the payload.
pub fn read_snapshot_header(path: &Path) -> Result<SnapshotHeader> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut buf = Vec::with_capacity(72);
    BufReader::new(file)
        .take(72)
        .read_to_end(&mut buf)
        .map_err(|e| Error::io(path, e))?;
    decode_header(&mut Cursor { bytes: &buf, at: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_round_trip_is_bitwise() {
        let mut f = PhaseGrid::zeros(5, 3, 1.5, 2.5);
        for (i, v) in f.values_mut().iter_mut().enumerate() {
            *v = (i as f64).sqrt() / 7.0;
        }
        f.set_t(0.1 + 0.2);
        let s = Snapshot::grid(f, 0.3);
        let back = decode_snapshot(&encode_snapshot(&s)).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn empty_particle_snapshot() {
        let e = ParticleEnsemble::new(2, vec![], vec![], 1.0, 0.5).unwrap();
        let s = Snapshot::particles(e, 0.0);
        let bytes = encode_snapshot(&s);
        assert_eq!(decode_snapshot(&bytes).unwrap(), s);
    }

    #[test]
    fn truncation_and_garbage_are_reported() {
        let s = Snapshot::grid(PhaseGrid::zeros(4, 4, 1.0, 1.0), 0.0);
        let bytes = encode_snapshot(&s);
        for cut in [0, 3, 20, bytes.len() - 1] {
            assert!(matches!(decode_snapshot(&bytes[..cut]), Err(Error::CorruptSnapshot(_))));
        }
        let mut long = bytes.clone();
        long.push(0);
        assert!(matches!(decode_snapshot(&long), Err(Error::CorruptSnapshot(_))));
        let mut bad = bytes;
        bad[0] = b'X';
        assert!(matches!(decode_snapshot(&bad), Err(Error::CorruptSnapshot(_))));
    }
}
