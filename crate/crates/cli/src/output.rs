//! Records tables and binary field snapshots.

use expanse_core::diagnostics::DiagnosticsRecord;
use expanse_core::GridSpec;
use num_complex::Complex64;
use std::io::{self, Read, Write};

pub const RECORDS_HEADER: &str =
    "s,charge,grad_sq,potential,energy,charge_residual,energy_residual,virial2,heisenberg_slack,K_value,max_amp";

/// One records row, 17 significant digits per value.
pub fn record_row(r: &DiagnosticsRecord) -> String {
    let vals = [
        r.s,
        r.charge,
        r.grad_sq,
        r.potential,
        r.energy,
        r.charge_residual,
        r.energy_residual,
        r.virial2,
        r.heisenberg_slack,
        r.k_value,
        r.max_amp,
    ];
    vals.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>().join(",")
}

pub const SNAPSHOT_MAGIC: [u8; 8] = *b"EXPSNAP\0";
pub const SNAPSHOT_VERSION: u32 = 1;
pub const SNAPSHOT_HEADER_LEN: usize = 64;

/// Header layout (little-endian): magic `[0, 8)`, version u32 `[8, 12)`,
/// d u32 `[12, 16)`, N u64 `[16, 24)`, L f64 `[24, 32)`, s f64 `[32, 40)`,
/// zero padding to 64 bytes. The body is `(re, im)` f64 pairs in row-major order.
pub fn write_snapshot<W: Write>(mut w: W, grid: &GridSpec, s: f64, u: &[Complex64]) -> io::Result<()> {
    let mut header = [0u8; SNAPSHOT_HEADER_LEN];
    header[0..8].copy_from_slice(&SNAPSHOT_MAGIC);
    header[8..12].copy_from_slice(&SNAPSHOT_VERSION.to_le_bytes());
    header[12..16].copy_from_slice(&(grid.dim as u32).to_le_bytes());
    header[16..24].copy_from_slice(&(grid.points_per_axis as u64).to_le_bytes());
    header[24..32].copy_from_slice(&grid.box_length.to_le_bytes());
    header[32..40].copy_from_slice(&s.to_le_bytes());
    w.write_all(&header)?;
    let mut body = Vec::with_capacity(16 * u.len());
    for v in u {
        body.extend_from_slice(&v.re.to_le_bytes());
        body.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&body)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub dim: u32,
    pub points_per_axis: u64,
    pub box_length: f64,
    pub s: f64,
    pub u: Vec<Complex64>,
}

pub fn read_snapshot<R: Read>(mut r: R) -> io::Result<Snapshot> {
    let bad = |m: &str| io::Error::new(io::ErrorKind::InvalidData, m.to_string());
    let mut header = [0u8; SNAPSHOT_HEADER_LEN];
    r.read_exact(&mut header)?;
    if header[0..8] != SNAPSHOT_MAGIC {
        return Err(bad("not a snapshot file"));
    }
    let word = |a: usize| u32::from_le_bytes(header[a..a + 4].try_into().unwrap());
    let dword = |a: usize| header[a..a + 8].try_into().unwrap();
    if word(8) != SNAPSHOT_VERSION {
        return Err(bad("unsupported snapshot version"));
    }
    let dim = word(12);
    let points_per_axis = u64::from_le_bytes(dword(16));
    let box_length = f64::from_le_bytes(dword(24));
    let s = f64::from_le_bytes(dword(32));
    let len = points_per_axis
        .checked_pow(dim)
        .ok_or_else(|| bad("grid size overflows"))? as usize;
    let mut body = vec![0u8; 16 * len];
    r.read_exact(&mut body)?;
    let u = body
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[0..8].try_into().unwrap()),
                f64::from_le_bytes(c[8..16].try_into().unwrap()),
            )
        })
        .collect();
    Ok(Snapshot {
        dim,
        points_per_axis,
        box_length,
        s,
        u,
    })
}
