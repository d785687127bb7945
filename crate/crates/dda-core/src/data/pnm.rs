//! Binary portable-anymap I/O: P6 (RGB) and P5 (grayscale), maxval 255.
//!
//! Headers are parsed with byte-offset tracking so malformed files report
//! where they broke. Payloads round-trip bit-exactly.

use std::path::Path;

use crate::error::{DdaError, Result};

/// Interleaved RGB, row-major, 8 bits per channel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rgb8Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Rgb8Image {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), width * height * 3, "rgb payload size");
        Self {
            width,
            height,
            data,
        }
    }
}

/// Single-plane grayscale, row-major, 8 bits per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gray8Image {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl Gray8Image {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Self {
        assert_eq!(data.len(), width * height, "gray payload size");
        Self {
            width,
            height,
            data,
        }
    }
}

fn parse_err(offset: usize, message: impl Into<String>) -> DdaError {
    DdaError::Parse {
        offset,
        message: message.into(),
    }
}

struct Tokenizer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokenizer<'a> {
    fn new(bytes: &'a [u8], pos: usize) -> Self {
        Self { bytes, pos }
    }

    /// Skip whitespace and `#` comments (to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn next_uint(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(parse_err(start, format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(start, format!("invalid {what}")))
    }

    /// Consume the single whitespace byte separating header from payload.
    fn expect_single_whitespace(&mut self) -> Result<()> {
        if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
            Ok(())
        } else {
            Err(parse_err(self.pos, "expected whitespace before payload"))
        }
    }
}

fn decode(bytes: &[u8], magic: &[u8; 2], channels: usize) -> Result<(usize, usize, Vec<u8>)> {
    if bytes.len() < 2 {
        return Err(parse_err(0, "file shorter than magic"));
    }
    if &bytes[..2] != magic {
        return Err(parse_err(
            0,
            format!(
                "bad magic {:?}, expected {}",
                String::from_utf8_lossy(&bytes[..2.min(bytes.len())]),
                String::from_utf8_lossy(magic)
            ),
        ));
    }
    let mut tok = Tokenizer::new(bytes, 2);
    let width = tok.next_uint("width")?;
    let height = tok.next_uint("height")?;
    let maxval_pos = tok.pos;
    let maxval = tok.next_uint("maxval")?;
    if maxval != 255 {
        return Err(parse_err(
            maxval_pos,
            format!("unsupported maxval {maxval}, only 255"),
        ));
    }
    tok.expect_single_whitespace()?;
    let need = width * height * channels;
    let have = bytes.len() - tok.pos;
    if have < need {
        return Err(parse_err(
            bytes.len(),
            format!("payload truncated: expected {need} bytes from offset {}, got {have}", tok.pos),
        ));
    }
    if have > need {
        return Err(parse_err(
            tok.pos + need,
            format!("{} trailing bytes after payload", have - need),
        ));
    }
    Ok((width, height, bytes[tok.pos..].to_vec()))
}

pub fn decode_ppm(bytes: &[u8]) -> Result<Rgb8Image> {
    let (width, height, data) = decode(bytes, b"P6", 3)?;
    Ok(Rgb8Image {
        width,
        height,
        data,
    })
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Gray8Image> {
    let (width, height, data) = decode(bytes, b"P5", 1)?;
    Ok(Gray8Image {
        width,
        height,
        data,
    })
}

pub fn encode_ppm(img: &Rgb8Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn encode_pgm(img: &Gray8Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

pub fn write_ppm(path: &Path, img: &Rgb8Image) -> Result<()> {
    Ok(std::fs::write(path, encode_ppm(img))?)
}

pub fn read_ppm(path: &Path) -> Result<Rgb8Image> {
    decode_ppm(&std::fs::read(path)?)
}

pub fn write_pgm(path: &Path, img: &Gray8Image) -> Result<()> {
    Ok(std::fs::write(path, encode_pgm(img))?)
}

pub fn read_pgm(path: &Path) -> Result<Gray8Image> {
    decode_pgm(&std::fs::read(path)?)
}
