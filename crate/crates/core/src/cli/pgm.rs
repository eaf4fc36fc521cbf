//! Binary PGM (P5) with 8-bit samples.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::histogram::DEFAULT_LEVELS;
use crate::image::QuantizedImage;

struct Header {
    width: usize,
    height: usize,
    maxval: usize,
    payload_offset: usize,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> std::result::Result<usize, (usize, String)> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.bytes.get(start) {
                None => (start, "unexpected end of header".to_string()),
                Some(b) => (
                    start,
                    format!("expected a decimal number, found byte 0x{b:02x}"),
                ),
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| (start, "number out of range".to_string()))
    }
}

fn parse_header(bytes: &[u8]) -> std::result::Result<Header, (usize, String)> {
    match bytes.get(..2) {
        Some(b"P5") => {}
        Some(m) => {
            return Err((
                0,
                format!("unsupported magic {:?}", String::from_utf8_lossy(m)),
            ));
        }
        None => return Err((0, "file too short for a PGM magic".into())),
    }
    let mut c = Cursor { bytes, pos: 2 };
    let width = c.number()?;
    let height = c.number()?;
    c.skip_space_and_comments();
    let maxval_offset = c.pos;
    let maxval = c.number()?;
    if width == 0 || height == 0 {
        return Err((maxval_offset, format!("empty image {width}x{height}")));
    }
    if maxval == 0 || maxval > 255 {
        return Err((maxval_offset, format!("maxval {maxval} outside 1..=255")));
    }
    match bytes.get(c.pos) {
        Some(b) if b.is_ascii_whitespace() => {}
        _ => {
            return Err((
                c.pos,
                "expected a single whitespace byte after maxval".into(),
            ))
        }
    }
    Ok(Header {
        width,
        height,
        maxval,
        payload_offset: c.pos + 1,
    })
}

/// Decodes a P5 byte stream. `path` is only used in error messages.
pub fn decode_pgm(bytes: &[u8], path: &Path) -> Result<QuantizedImage> {
    let format_err = |(offset, message): (usize, String)| Error::Format {
        path: path.to_path_buf(),
        offset,
        message,
    };
    let header = parse_header(bytes).map_err(format_err)?;
    let expected = header.width * header.height;
    let payload = &bytes[header.payload_offset..];
    if payload.len() < expected {
        return Err(format_err((
            header.payload_offset + payload.len(),
            format!(
                "truncated payload: expected {expected} bytes, found {}",
                payload.len()
            ),
        )));
    }
    if let Some(i) = payload[..expected]
        .iter()
        .position(|&v| v as usize > header.maxval)
    {
        return Err(format_err((
            header.payload_offset + i,
            format!("sample {} exceeds maxval {}", payload[i], header.maxval),
        )));
    }
    let data = payload[..expected].iter().map(|&v| v as f64).collect();
    QuantizedImage::new(header.width, header.height, data, DEFAULT_LEVELS)
}

pub fn encode_pgm(image: &QuantizedImage) -> Result<Vec<u8>> {
    if let Some((index, &value)) = image.data().iter().enumerate().find(|(_, &v)| v > 255.0) {
        return Err(Error::InvalidIntensity {
            index,
            value,
            max: 255,
        });
    }
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.data().iter().map(|&v| v as u8));
    Ok(out)
}

pub fn read_image(path: &Path) -> Result<QuantizedImage> {
    let bytes = fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_pgm(&bytes, path)
}

pub fn write_image(image: &QuantizedImage, path: &Path) -> Result<()> {
    let bytes = encode_pgm(image)?;
    fs::write(path, bytes).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
