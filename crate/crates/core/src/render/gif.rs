use std::collections::HashMap;

use super::raster::PixelGrid;
use super::RenderError;

const MAX_CODES: u16 = 4095;

/// Encodes opaque frames as a looping GIF89a with one global palette holding
/// every exact color, in order of first appearance.
pub fn encode_gif(frames: &[PixelGrid], fps: u32) -> Result<Vec<u8>, RenderError> {
    let first = frames.first().ok_or(RenderError::NoFrames)?;
    let (w, h) = (first.width, first.height);
    for (index, f) in frames.iter().enumerate() {
        if (f.width, f.height) != (w, h) {
            return Err(RenderError::FrameSizeMismatch {
                index,
                expected: (w, h),
                found: (f.width, f.height),
            });
        }
    }

    let mut palette: Vec<[u8; 3]> = Vec::new();
    let mut lookup: HashMap<[u8; 3], usize> = HashMap::new();
    let mut indexed: Vec<Vec<u8>> = Vec::with_capacity(frames.len());
    for f in frames {
        let mut idx = Vec::with_capacity(f.pixels.len());
        for p in &f.pixels {
            let rgb = [p[0], p[1], p[2]];
            let i = *lookup.entry(rgb).or_insert_with(|| {
                palette.push(rgb);
                palette.len() - 1
            });
            idx.push(i.min(255) as u8);
        }
        indexed.push(idx);
    }
    if palette.len() > 256 {
        return Err(RenderError::PaletteOverflow { count: palette.len() });
    }

    let bits = (usize::BITS - (palette.len().max(2) - 1).leading_zeros()).max(1);
    let min_code_size = bits.max(2) as u8;
    let delay = (100.0 / f64::from(fps)).round().max(1.0) as u16;

    let mut out = Vec::new();
    out.extend_from_slice(b"GIF89a");
    out.extend_from_slice(&(w as u16).to_le_bytes());
    out.extend_from_slice(&(h as u16).to_le_bytes());
    out.push(0x80 | 0x70 | (bits as u8 - 1));
    out.extend_from_slice(&[0, 0]);
    for i in 0..1usize << bits {
        out.extend_from_slice(palette.get(i).unwrap_or(&[0, 0, 0]));
    }
    out.extend_from_slice(&[0x21, 0xFF, 0x0B]);
    out.extend_from_slice(b"NETSCAPE2.0");
    out.extend_from_slice(&[0x03, 0x01, 0x00, 0x00, 0x00]);

    for idx in &indexed {
        out.extend_from_slice(&[0x21, 0xF9, 0x04, 0x04]);
        out.extend_from_slice(&delay.to_le_bytes());
        out.extend_from_slice(&[0x00, 0x00]);
        out.push(0x2C);
        out.extend_from_slice(&[0, 0, 0, 0]);
        out.extend_from_slice(&(w as u16).to_le_bytes());
        out.extend_from_slice(&(h as u16).to_le_bytes());
        out.push(0);
        out.push(min_code_size);
        for chunk in lzw_encode(idx, min_code_size).chunks(255) {
            out.push(chunk.len() as u8);
            out.extend_from_slice(chunk);
        }
        out.push(0);
    }
    out.push(0x3B);
    Ok(out)
}

struct BitWriter {
    bytes: Vec<u8>,
    acc: u64,
    n: u32,
}

impl BitWriter {
    fn put(&mut self, code: u16, width: u32) {
        self.acc |= u64::from(code) << self.n;
        self.n += width;
        while self.n >= 8 {
            self.bytes.push(self.acc as u8);
            self.acc >>= 8;
            self.n -= 8;
        }
    }

    fn finish(mut self) -> Vec<u8> {
        if self.n > 0 {
            self.bytes.push(self.acc as u8);
        }
        self.bytes
    }
}

/// Variable-width GIF LZW over `indices`, packed LSB first, without the
/// sub-block framing.
pub fn lzw_encode(indices: &[u8], min_code_size: u8) -> Vec<u8> {
    let m = u32::from(min_code_size.clamp(2, 8));
    let alphabet = 1usize << m;
    let clear = 1u16 << m;
    let end = clear + 1;
    let mut w = BitWriter { bytes: Vec::with_capacity(indices.len() / 2), acc: 0, n: 0 };

    // Child slots keyed by prefix * alphabet + symbol. A slot is live only
    // when its stamp matches the current generation, so a reset is O(1).
    let mut table = vec![0u32; 4096 * alphabet];
    let mut generation = 1u32;
    let live = |slot: u32, gen: u32| (slot >> 12 == gen).then_some((slot & 0xFFF) as u16);

    let mut width = m + 1;
    let mut next = end + 1;
    w.put(clear, width);

    let mut iter = indices.iter();
    let Some(&first) = iter.next() else {
        w.put(end, width);
        return w.finish();
    };
    let mut prefix = u16::from(first) & (clear - 1);
    for &sym in iter {
        let sym = usize::from(sym) & (alphabet - 1);
        let slot = usize::from(prefix) * alphabet + sym;
        if let Some(code) = live(table[slot], generation) {
            prefix = code;
            continue;
        }
        w.put(prefix, width);
        if next >= MAX_CODES {
            w.put(clear, width);
            width = m + 1;
            next = end + 1;
            generation += 1;
            if generation >= 1 << 20 {
                table.fill(0);
                generation = 1;
            }
        } else {
            table[slot] = generation << 12 | u32::from(next);
            next += 1;
            if u32::from(next) > 1 << width && width < 12 {
                width += 1;
            }
        }
        prefix = sym as u16;
    }
    w.put(prefix, width);
    w.put(end, width);
    w.finish()
}
