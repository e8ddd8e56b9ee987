//! File formats: the lossless KDN1 grid container, 8-bit binary PGM, and
//! the key=value scene metadata sidecar.
//!
//! KDN1 layout (all integers little-endian):
//!
//! | bytes | content                      |
//! |-------|------------------------------|
//! | 4     | magic `KDN1`                 |
//! | 4     | `d` as u32                   |
//! | 4     | `n` as u32                   |
//! | 8·nᵈ  | samples as f64, row-major    |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use kdn_core::{ImageGrid, Scene};

use crate::{KdnError, Result};

pub const KDN_MAGIC: &[u8; 4] = b"KDN1";

pub fn write_kdn(mut w: impl Write, g: &ImageGrid) -> Result<()> {
    w.write_all(KDN_MAGIC)?;
    w.write_all(&(g.d() as u32).to_le_bytes())?;
    w.write_all(&(g.n() as u32).to_le_bytes())?;
    for v in g.values() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_kdn(mut r: impl Read) -> Result<ImageGrid> {
    let mut head = [0u8; 12];
    r.read_exact(&mut head)
        .map_err(|_| KdnError::format("KDN1", "truncated header"))?;
    if &head[..4] != KDN_MAGIC {
        return Err(KdnError::format("KDN1", "bad magic"));
    }
    let d = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    let len = match ImageGrid::filled(d, n, 0.0) {
        Ok(g) => g.len(),
        Err(e) => return Err(KdnError::format("KDN1", e.to_string())),
    };
    let mut payload = Vec::new();
    r.read_to_end(&mut payload)?;
    if payload.len() != len * 8 {
        return Err(KdnError::format(
            "KDN1",
            format!("payload has {} bytes, header implies {}", payload.len(), len * 8),
        ));
    }
    let values = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ImageGrid::new(d, n, values)?)
}

pub fn save_kdn(path: impl AsRef<Path>, g: &ImageGrid) -> Result<()> {
    write_kdn(BufWriter::new(File::create(path)?), g)
}

pub fn load_kdn(path: impl AsRef<Path>) -> Result<ImageGrid> {
    read_kdn(BufReader::new(File::open(path)?))
}

/// Masks are stored as KDN1 grids holding 0.0 and 1.0.
pub fn save_mask(path: impl AsRef<Path>, mask: &[bool], d: usize, n: usize) -> Result<()> {
    let g = ImageGrid::new(d, n, mask.iter().map(|&m| m as u8 as f64).collect())?;
    save_kdn(path, &g)
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<(Vec<bool>, usize, usize)> {
    let g = load_kdn(path)?;
    let mut mask = Vec::with_capacity(g.len());
    for &v in g.values() {
        if v == 0.0 {
            mask.push(false);
        } else if v == 1.0 {
            mask.push(true);
        } else {
            return Err(KdnError::format("mask", format!("value {v} is not 0 or 1")));
        }
    }
    Ok((mask, g.d(), g.n()))
}

/// 8-bit level of `v`: `255 v` rounded half to even, after clamping to [0, 1].
pub fn quantize(v: f64) -> u8 {
    (255.0 * v.clamp(0.0, 1.0)).round_ties_even() as u8
}

/// Writes a 2-D grid as binary PGM. Rows follow the first axis.
pub fn write_pgm(mut w: impl Write, g: &ImageGrid) -> Result<()> {
    if g.d() != 2 {
        return Err(KdnError::invalid(format!(
            "PGM export needs a 2-D grid, got d = {}",
            g.d()
        )));
    }
    write!(w, "P5\n{} {}\n255\n", g.n(), g.n())?;
    let bytes: Vec<u8> = g.values().iter().map(|&v| quantize(v)).collect();
    w.write_all(&bytes)?;
    w.flush()?;
    Ok(())
}

/// Reads a square binary PGM. Levels map to `p / maxval`.
pub fn read_pgm(mut r: impl Read) -> Result<ImageGrid> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let bad = |m: &str| KdnError::format("PGM", m.to_string());
    if data.len() < 2 || data[0] != b'P' {
        return Err(bad("missing P5 magic"));
    }
    match data[1] {
        b'5' => {}
        b'2' => return Err(bad("ASCII PGM (P2) is not supported; convert to binary P5")),
        _ => return Err(bad("missing P5 magic")),
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for f in fields.iter_mut() {
        loop {
            match data.get(pos) {
                Some(c) if c.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while data.get(pos).is_some_and(|&c| c != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(bad("truncated header")),
            }
        }
        let start = pos;
        while data.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(bad("expected a number in the header"));
        }
        *f = std::str::from_utf8(&data[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| bad("header number out of range"))?;
    }
    if !data.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(bad("header must end with one whitespace byte"));
    }
    pos += 1;
    let [width, height, maxval] = fields;
    if width == 0 || width != height {
        return Err(bad(&format!("image must be square, got {width}x{height}")));
    }
    if maxval == 0 || maxval > 255 {
        return Err(bad(&format!("maxval {maxval} unsupported (need 1..=255)")));
    }
    let pixels = &data[pos..];
    if pixels.len() != width * height {
        return Err(bad(&format!(
            "expected {} pixel bytes, found {}",
            width * height,
            pixels.len()
        )));
    }
    let scale = maxval as f64;
    let values = pixels.iter().map(|&p| (p as f64 / scale).min(1.0)).collect();
    Ok(ImageGrid::new(2, width, values)?)
}

/// Writes the scene metadata sidecar: one `key=value` per line.
pub fn write_meta(mut w: impl Write, scene: &Scene, extra: &[(&str, String)]) -> Result<()> {
    let g = &scene.truth;
    writeln!(w, "class={}", scene.class_tag.as_str())?;
    writeln!(w, "alpha={}", scene.alpha)?;
    writeln!(w, "mu={}", scene.mu)?;
    writeln!(w, "d={}", g.d())?;
    writeln!(w, "n={}", g.n())?;
    for (k, v) in extra {
        writeln!(w, "{k}={v}")?;
    }
    w.flush()?;
    Ok(())
}

/// Parses a `key=value` sidecar, skipping blank lines and `#` comments.
pub fn read_meta(r: impl Read) -> Result<Vec<(String, String)>> {
    let mut text = String::new();
    BufReader::new(r).read_to_string(&mut text)?;
    let mut out = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| KdnError::format("metadata", format!("line without '=': {line}")))?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
