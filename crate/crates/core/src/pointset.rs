//! Dense bit-indexed point sets over F_p^n with exact cached cardinality,
//! plus the two on-disk formats (binary and text).
//!
//! The index layout puts the last coordinate fastest (index = x*p^2 + y*p + z
//! in dimension 3), so lines in the (0,0,1) direction occupy contiguous bits.

use std::io::{self, BufRead, Read, Write};

use thiserror::Error;

use crate::field::{ModulusError, PrimeModulus};
use crate::geometry::{Dim, Point};

/// File magic for the binary format.
pub const MAGIC: [u8; 4] = *b"LFPS";
/// Current version of both on-disk formats.
pub const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum SetOpError {
    #[error("operands have different dimensions")]
    DimMismatch,
    #[error("operands have different moduli")]
    ModulusMismatch,
}

#[derive(Debug, Error)]
pub enum PointSetIoError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("bad magic bytes (not a point-set file)")]
    BadMagic,
    #[error("unsupported format version {0}")]
    UnsupportedVersion(u8),
    #[error("unsupported dimension {0}")]
    BadDim(u8),
    #[error("invalid modulus in header: {0}")]
    BadModulus(#[from] ModulusError),
    #[error("padding bits past the end of the space must be zero")]
    TrailingBits,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// A subset of F_p^n stored as a bitset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointSet {
    dim: Dim,
    m: PrimeModulus,
    words: Vec<u64>,
    card: u64,
}

impl PointSet {
    pub fn empty(dim: Dim, m: PrimeModulus) -> PointSet {
        let bits = dim.space_size(m.p());
        PointSet {
            dim,
            m,
            words: vec![0u64; bits.div_ceil(64) as usize],
            card: 0,
        }
    }

    /// The full space F_p^n.
    pub fn full(dim: Dim, m: PrimeModulus) -> PointSet {
        PointSet::empty(dim, m).complement()
    }

    #[inline]
    pub fn dim(&self) -> Dim {
        self.dim
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.m
    }

    /// Number of points of the ambient space, p^n.
    #[inline]
    pub fn space_size(&self) -> u64 {
        self.dim.space_size(self.m.p())
    }

    #[inline]
    pub fn cardinality(&self) -> u64 {
        self.card
    }

    pub fn is_empty(&self) -> bool {
        self.card == 0
    }

    #[inline(always)]
    pub fn contains_index(&self, idx: u64) -> bool {
        debug_assert!(idx < self.space_size());
        self.words[(idx >> 6) as usize] & (1u64 << (idx & 63)) != 0
    }

    /// Inserts by index; returns true if the point was not already present.
    pub fn insert_index(&mut self, idx: u64) -> bool {
        assert!(idx < self.space_size(), "index out of range");
        let w = &mut self.words[(idx >> 6) as usize];
        let bit = 1u64 << (idx & 63);
        if *w & bit == 0 {
            *w |= bit;
            self.card += 1;
            true
        } else {
            false
        }
    }

    /// Removes by index; returns true if the point was present.
    pub fn remove_index(&mut self, idx: u64) -> bool {
        assert!(idx < self.space_size(), "index out of range");
        let w = &mut self.words[(idx >> 6) as usize];
        let bit = 1u64 << (idx & 63);
        if *w & bit != 0 {
            *w &= !bit;
            self.card -= 1;
            true
        } else {
            false
        }
    }

    fn check_point(&self, q: &Point) {
        assert_eq!(q.dim(), self.dim, "point dimension mismatch");
    }

    pub fn contains(&self, q: &Point) -> bool {
        self.check_point(q);
        self.contains_index(q.index(self.m))
    }

    pub fn insert(&mut self, q: &Point) -> bool {
        self.check_point(q);
        self.insert_index(q.index(self.m))
    }

    pub fn remove(&mut self, q: &Point) -> bool {
        self.check_point(q);
        self.remove_index(q.index(self.m))
    }

    /// Mask covering the valid bits of the last word.
    fn tail_mask(&self) -> u64 {
        let rem = self.space_size() % 64;
        if rem == 0 {
            !0u64
        } else {
            (1u64 << rem) - 1
        }
    }

    /// Complement with respect to the full space.
    pub fn complement(&self) -> PointSet {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        if let Some(last) = words.last_mut() {
            *last &= self.tail_mask();
        }
        PointSet {
            dim: self.dim,
            m: self.m,
            words,
            card: self.space_size() - self.card,
        }
    }

    fn check_compat(&self, other: &PointSet) -> Result<(), SetOpError> {
        if self.dim != other.dim {
            return Err(SetOpError::DimMismatch);
        }
        if self.m != other.m {
            return Err(SetOpError::ModulusMismatch);
        }
        Ok(())
    }

    pub fn union(&self, other: &PointSet) -> Result<PointSet, SetOpError> {
        self.check_compat(other)?;
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        Ok(PointSet::from_words(self.dim, self.m, words))
    }

    pub fn intersection(&self, other: &PointSet) -> Result<PointSet, SetOpError> {
        self.check_compat(other)?;
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        Ok(PointSet::from_words(self.dim, self.m, words))
    }

    pub fn difference(&self, other: &PointSet) -> Result<PointSet, SetOpError> {
        self.check_compat(other)?;
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & !b)
            .collect();
        Ok(PointSet::from_words(self.dim, self.m, words))
    }

    pub fn is_subset(&self, other: &PointSet) -> Result<bool, SetOpError> {
        self.check_compat(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    fn from_words(dim: Dim, m: PrimeModulus, words: Vec<u64>) -> PointSet {
        let card = words.iter().map(|w| w.count_ones() as u64).sum();
        PointSet { dim, m, words, card }
    }

    /// Member indices in increasing order.
    pub fn indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rem = w;
            std::iter::from_fn(move || {
                if rem == 0 {
                    return None;
                }
                let b = rem.trailing_zeros();
                rem &= rem - 1;
                Some((wi as u64) << 6 | b as u64)
            })
        })
    }

    /// Member points in index order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.indices()
            .map(move |idx| Point::from_index(idx, self.dim, self.m))
    }

    /// Planar slice of a 3-dimensional set: {(y, z) : (x, y, z) in self}.
    pub fn layer(&self, x: u32) -> PointSet {
        assert_eq!(self.dim, Dim::Three, "layers exist only in dimension 3");
        assert!(x < self.m.p());
        let p = self.m.p() as u64;
        let offset = x as u64 * p * p;
        let mut out = PointSet::empty(Dim::Two, self.m);
        for plane_idx in 0..p * p {
            if self.contains_index(offset + plane_idx) {
                out.insert_index(plane_idx);
            }
        }
        out
    }

    // ---- on-disk formats ----

    /// Binary format: magic, version, n, p (little endian), then
    /// ceil(p^n / 8) bytes of membership bits in index order, LSB first.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(&MAGIC)?;
        w.write_all(&[FORMAT_VERSION, self.dim.n() as u8])?;
        w.write_all(&self.m.p().to_le_bytes())?;
        let nbytes = self.space_size().div_ceil(8) as usize;
        let mut buf = Vec::with_capacity(nbytes);
        for j in 0..nbytes {
            buf.push((self.words[j / 8] >> (8 * (j % 8))) as u8);
        }
        w.write_all(&buf)
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<PointSet, PointSetIoError> {
        let mut header = [0u8; 10];
        r.read_exact(&mut header)?;
        if header[..4] != MAGIC {
            return Err(PointSetIoError::BadMagic);
        }
        if header[4] != FORMAT_VERSION {
            return Err(PointSetIoError::UnsupportedVersion(header[4]));
        }
        let dim = Dim::from_u8(header[5]).ok_or(PointSetIoError::BadDim(header[5]))?;
        let p = u32::from_le_bytes(header[6..10].try_into().unwrap());
        let m = PrimeModulus::new(p as u64)?;
        let bits = dim.space_size(p);
        let mut payload = vec![0u8; bits.div_ceil(8) as usize];
        r.read_exact(&mut payload)?;
        let mut words = vec![0u64; bits.div_ceil(64) as usize];
        for (j, &byte) in payload.iter().enumerate() {
            words[j / 8] |= (byte as u64) << (8 * (j % 8));
        }
        let set = PointSet::from_words(dim, m, words);
        if let Some(&last) = set.words.last() {
            if last & !set.tail_mask() != 0 {
                return Err(PointSetIoError::TrailingBits);
            }
        }
        Ok(set)
    }

    /// Text format: a header line `# linefree pointset v1 n=<n> p=<p>`,
    /// then one member point per line as comma-separated coordinates,
    /// in index order.
    pub fn write_text<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(
            w,
            "# linefree pointset v{} n={} p={}",
            FORMAT_VERSION,
            self.dim.n(),
            self.m.p()
        )?;
        for q in self.points() {
            let coords: Vec<String> = q.coords().iter().map(|c| c.to_string()).collect();
            writeln!(w, "{}", coords.join(","))?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(r: &mut R) -> Result<PointSet, PointSetIoError> {
        let parse = |line: usize, msg: &str| PointSetIoError::Parse {
            line,
            msg: msg.to_string(),
        };
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| parse(1, "missing header line"))??;
        let tokens: Vec<&str> = header.split_whitespace().collect();
        let expected_tag = format!("v{FORMAT_VERSION}");
        if tokens.len() != 6
            || tokens[0] != "#"
            || tokens[1] != "linefree"
            || tokens[2] != "pointset"
            || tokens[3] != expected_tag
        {
            return Err(parse(1, "expected `# linefree pointset v1 n=<n> p=<p>`"));
        }
        let field = |tok: &str, key: &str| -> Result<u64, PointSetIoError> {
            tok.strip_prefix(key)
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse(1, &format!("bad header field `{tok}`")))
        };
        let n = field(tokens[4], "n=")?;
        let p = field(tokens[5], "p=")?;
        let dim = Dim::from_u8(n as u8).ok_or(PointSetIoError::BadDim(n as u8))?;
        let m = PrimeModulus::new(p)?;
        let mut set = PointSet::empty(dim, m);
        for (i, line) in lines.enumerate() {
            let lineno = i + 2;
            let line = line?;
            let text = line.trim();
            if text.is_empty() {
                continue;
            }
            let mut coords = [0u32; 3];
            let mut count = 0usize;
            for part in text.split(',') {
                if count >= dim.n() {
                    return Err(parse(lineno, "too many coordinates"));
                }
                coords[count] = part
                    .trim()
                    .parse()
                    .map_err(|_| parse(lineno, "coordinate is not an integer"))?;
                if coords[count] >= m.p() {
                    return Err(parse(lineno, "coordinate out of range"));
                }
                count += 1;
            }
            if count != dim.n() {
                return Err(parse(lineno, "wrong number of coordinates"));
            }
            let idx = coords[..dim.n()]
                .iter()
                .fold(0u64, |acc, &c| acc * m.p() as u64 + c as u64);
            if !set.insert_index(idx) {
                return Err(parse(lineno, "duplicate point"));
            }
        }
        Ok(set)
    }
}
