// Copyright 2026 The psitomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Binary greymap (`P5`) images, 8 or 16 bits per sample.

/// Decoded image; samples are row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl Pgm {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        if self.maxval > 255 {
            for s in &self.samples {
                out.extend_from_slice(&s.to_be_bytes());
            }
        } else {
            out.extend(self.samples.iter().map(|&s| s as u8));
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Pgm, String> {
        let mut pos = 0;
        let magic = token(bytes, &mut pos).ok_or("missing magic")?;
        if magic != b"P5" {
            return Err("not a binary PGM (P5)".into());
        }
        let mut number = |what: &str| -> Result<usize, String> {
            let t = token(bytes, &mut pos).ok_or(format!("missing {what}"))?;
            std::str::from_utf8(t)
                .ok()
                .and_then(|s| s.parse().ok())
                .ok_or(format!("bad {what}"))
        };
        let width = number("width")?;
        let height = number("height")?;
        let maxval = number("maxval")?;
        if maxval == 0 || maxval > 65535 {
            return Err(format!("maxval {maxval} out of range"));
        }
        // Exactly one whitespace byte separates the header from the raster.
        pos += 1;
        let n = width.checked_mul(height).ok_or("image too large")?;
        let bytes_per = if maxval > 255 { 2 } else { 1 };
        let raster = bytes.get(pos..).unwrap_or_default();
        if raster.len() < n * bytes_per {
            return Err(format!(
                "raster has {} bytes, expected {}",
                raster.len(),
                n * bytes_per
            ));
        }
        let samples: Vec<u16> = if bytes_per == 2 {
            raster[..2 * n]
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect()
        } else {
            raster[..n].iter().map(|&b| b as u16).collect()
        };
        if samples.iter().any(|&s| s as usize > maxval) {
            return Err("sample exceeds maxval".into());
        }
        Ok(Pgm {
            width,
            height,
            maxval: maxval as u16,
            samples,
        })
    }
}

/// Next whitespace-delimited header token, skipping `#` comments.
fn token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| &bytes[start..*pos])
}
