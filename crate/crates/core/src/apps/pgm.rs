//! PGM (netpbm grayscale) reader and writer, maxval 255 only. The reader
//! accepts binary P5 and ASCII P2 with `#` comments in the header; the
//! writer emits binary P5 with LF-terminated header fields.

use std::io::{BufRead, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::ImageU8;

/// Read a P5 or P2 image with maxval 255.
pub fn pgm_read(mut r: impl BufRead) -> Result<ImageU8> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let mut cursor = Cursor { data: &data, pos: 0 };

    let magic = cursor.token()?;
    let binary = match magic.as_str() {
        "P5" => true,
        "P2" => false,
        other => {
            return Err(Error::ImageFormat(format!(
                "unsupported magic `{other}` (expected P5 or P2)"
            )))
        }
    };
    let width: u32 = cursor.number("width")?;
    let height: u32 = cursor.number("height")?;
    let maxval: u32 = cursor.number("maxval")?;
    if maxval != 255 {
        return Err(Error::ImageFormat(format!("unsupported maxval {maxval} (only 255)")));
    }
    if width == 0 || height == 0 {
        return Err(Error::ImageFormat("zero image dimension".into()));
    }
    let count = width as usize * height as usize;

    let pixels = if binary {
        // Exactly one whitespace byte separates the header from the payload.
        cursor.skip_single_whitespace()?;
        let rest = &cursor.data[cursor.pos..];
        if rest.len() < count {
            return Err(Error::ImageFormat(format!(
                "truncated payload: need {count} bytes, have {}",
                rest.len()
            )));
        }
        rest[..count].to_vec()
    } else {
        let mut pixels = Vec::with_capacity(count);
        for _ in 0..count {
            let v: u32 = cursor.number("pixel")?;
            if v > 255 {
                return Err(Error::ImageFormat(format!("pixel value {v} exceeds 255")));
            }
            pixels.push(v as u8);
        }
        pixels
    };
    ImageU8::new(width, height, pixels)
}

/// Write a binary P5 image.
pub fn pgm_write(img: &ImageU8, w: &mut impl Write) -> Result<()> {
    write!(w, "P5\n{} {}\n255\n", img.width(), img.height())?;
    w.write_all(img.pixels())?;
    Ok(())
}

pub fn pgm_read_path(path: impl AsRef<Path>) -> Result<ImageU8> {
    let file = std::fs::File::open(path)?;
    pgm_read(std::io::BufReader::new(file))
}

pub fn pgm_write_path(img: &ImageU8, path: impl AsRef<Path>) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    pgm_write(img, &mut file)?;
    use std::io::Write as _;
    file.flush()?;
    Ok(())
}

/// Header tokenizer: whitespace-separated tokens with `#` comments running
/// to end of line.
struct Cursor<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn token(&mut self) -> Result<String> {
        loop {
            while self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.data.len() && self.data[self.pos] == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(Error::ImageFormat("unexpected end of header".into()));
        }
        Ok(String::from_utf8_lossy(&self.data[start..self.pos]).into_owned())
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| Error::ImageFormat(format!("bad {what} token `{tok}`")))
    }

    fn skip_single_whitespace(&mut self) -> Result<()> {
        if self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::ImageFormat("missing whitespace before binary payload".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor as IoCursor;

    fn sample() -> ImageU8 {
        ImageU8::new(3, 2, vec![0, 10, 255, 64, 128, 192]).unwrap()
    }

    #[test]
    fn p5_roundtrip_is_lossless() {
        let img = sample();
        let mut buf = Vec::new();
        pgm_write(&img, &mut buf).unwrap();
        assert!(buf.starts_with(b"P5\n3 2\n255\n"));
        let back = pgm_read(IoCursor::new(buf)).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn p2_and_p5_decode_identically() {
        let img = sample();
        let mut p5 = Vec::new();
        pgm_write(&img, &mut p5).unwrap();
        let p2 = format!(
            "P2\n# comment\n3 2\n255\n{}\n",
            img.pixels().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
        );
        assert_eq!(
            pgm_read(IoCursor::new(p2.into_bytes())).unwrap(),
            pgm_read(IoCursor::new(p5)).unwrap()
        );
    }

    #[test]
    fn wrong_maxval_is_rejected() {
        let text = b"P2\n2 2\n65535\n0 0 0 0\n".to_vec();
        assert!(matches!(
            pgm_read(IoCursor::new(text)),
            Err(Error::ImageFormat(_))
        ));
    }

    #[test]
    fn truncated_payload_is_rejected() {
        let mut buf = Vec::new();
        pgm_write(&sample(), &mut buf).unwrap();
        buf.truncate(buf.len() - 2);
        assert!(matches!(pgm_read(IoCursor::new(buf)), Err(Error::ImageFormat(_))));
    }

    #[test]
    fn binary_payload_with_comment_like_bytes_survives() {
        // Pixel values 0x23 ('#') and 0x0A ('\n') must pass through raw.
        let img = ImageU8::new(2, 2, vec![0x23, 0x0A, 0x23, 0x0A]).unwrap();
        let mut buf = Vec::new();
        pgm_write(&img, &mut buf).unwrap();
        assert_eq!(pgm_read(IoCursor::new(buf)).unwrap(), img);
    }
}
