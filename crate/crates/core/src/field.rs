//! Arithmetic over the binary extension fields GF(2), GF(4), GF(16) and GF(256).
//!
//! Elements are plain `u8` values whose bits are polynomial coefficients
//! over GF(2). Addition is XOR. Multiplication is table driven: GF(256)
//! uses log/antilog tables generated from a shift-and-add reference
//! multiply, the smaller fields use a direct product table.
//!
//! Default reduction polynomials:
//!
//! | q   | polynomial            | mask    |
//! |-----|-----------------------|---------|
//! | 4   | x^2 + x + 1           | `0x7`   |
//! | 16  | x^4 + x + 1           | `0x13`  |
//! | 256 | x^8 + x^4 + x^3 + x + 1 | `0x11B` |

use std::fmt;
use std::sync::{Arc, OnceLock};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("unsupported field order {0} (expected 2, 4, 16 or 256)")]
    UnsupportedOrder(u32),
    #[error("polynomial {poly:#x} is not an irreducible polynomial of degree {degree}")]
    ReduciblePolynomial { poly: u16, degree: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("row length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("value {value} is not an element of GF({order})")]
    InvalidElement { value: u8, order: u16 },
}

/// Returns the default reduction polynomial for a supported order.
pub fn default_polynomial(order: u16) -> Result<u16, FieldError> {
    match order {
        2 => Ok(0b11),
        4 => Ok(0x7),
        16 => Ok(0x13),
        256 => Ok(0x11B),
        other => Err(FieldError::UnsupportedOrder(other as u32)),
    }
}

fn degree_of(order: u16) -> Result<u32, FieldError> {
    match order {
        2 => Ok(1),
        4 => Ok(2),
        16 => Ok(4),
        256 => Ok(8),
        other => Err(FieldError::UnsupportedOrder(other as u32)),
    }
}

/// Shift-and-add product of `a` and `b` reduced modulo `poly` (degree `degree`).
pub fn reference_mul(a: u8, mut b: u8, poly: u16, degree: u32) -> u8 {
    let top = 1u16 << degree;
    let mut acc: u16 = 0;
    let mut a16 = a as u16;
    while b != 0 {
        if b & 1 != 0 {
            acc ^= a16;
        }
        b >>= 1;
        a16 <<= 1;
        if a16 & top != 0 {
            a16 ^= poly;
        }
    }
    acc as u8
}

/// Remainder of GF(2)[x] polynomial division.
fn poly_rem(mut num: u32, den: u32) -> u32 {
    let dd = 31 - den.leading_zeros();
    while num != 0 && 31 - num.leading_zeros() >= dd {
        num ^= den << (31 - num.leading_zeros() - dd);
    }
    num
}

/// Irreducibility by trial division with every polynomial of degree 1..=d/2.
fn is_irreducible(poly: u16, degree: u32) -> bool {
    if poly >> degree != 1 {
        return false;
    }
    for d in 1..=degree / 2 {
        for cand in (1u32 << d)..(1u32 << (d + 1)) {
            if poly_rem(poly as u32, cand) == 0 {
                return false;
            }
        }
    }
    true
}

struct Tables {
    mul: Vec<u8>,
    inv: Vec<u8>,
    // Only populated for GF(256): log[a] for a != 0, exp doubled to 510 entries.
    log: Vec<u8>,
    exp: Vec<u8>,
}

impl Tables {
    fn build(order: u16, poly: u16, degree: u32) -> Tables {
        let q = order as usize;
        if q == 256 {
            return Self::build_log_exp(poly, degree);
        }
        let mut mul = vec![0u8; q * q];
        for a in 0..q {
            for b in 0..q {
                mul[a * q + b] = reference_mul(a as u8, b as u8, poly, degree);
            }
        }
        let mut inv = vec![0u8; q];
        for a in 1..q {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
        }
        Tables { mul, inv, log: Vec::new(), exp: Vec::new() }
    }

    fn build_log_exp(poly: u16, degree: u32) -> Tables {
        // Any irreducible degree-8 polynomial works: pick the smallest
        // element that generates the whole multiplicative group.
        let generator = (2u16..256)
            .map(|g| g as u8)
            .find(|&g| {
                let mut x = 1u8;
                for i in 1..=255u32 {
                    x = reference_mul(x, g, poly, degree);
                    if x == 1 {
                        return i == 255;
                    }
                }
                false
            })
            .expect("GF(256) has a primitive element");

        let mut exp = vec![0u8; 510];
        let mut log = vec![0u8; 256];
        let mut x = 1u8;
        for i in 0..255 {
            exp[i] = x;
            exp[i + 255] = x;
            log[x as usize] = i as u8;
            x = reference_mul(x, generator, poly, degree);
        }
        let mut mul = vec![0u8; 256 * 256];
        for a in 1..256 {
            for b in 1..256 {
                mul[a * 256 + b] = exp[log[a] as usize + log[b] as usize];
            }
        }
        let mut inv = vec![0u8; 256];
        for a in 1..256 {
            inv[a] = exp[(255 - log[a] as usize) % 255];
        }
        Tables { mul, inv, log, exp }
    }
}

/// A finite field GF(q), q ∈ {2, 4, 16, 256}.
///
/// Cloning is cheap; the arithmetic tables are shared.
#[derive(Clone)]
pub struct Field {
    order: u16,
    bits: u8,
    poly: u16,
    tables: Arc<Tables>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.poly == other.poly
    }
}

impl Eq for Field {}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}; poly={:#x})", self.order, self.poly)
    }
}

static DEFAULT_TABLES: [OnceLock<Arc<Tables>>; 4] =
    [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];

impl Field {
    /// Field of the given order with its default reduction polynomial.
    pub fn new(order: u16) -> Result<Field, FieldError> {
        let poly = default_polynomial(order)?;
        let degree = degree_of(order)?;
        let slot = match order {
            2 => 0,
            4 => 1,
            16 => 2,
            _ => 3,
        };
        let tables = DEFAULT_TABLES[slot]
            .get_or_init(|| Arc::new(Tables::build(order, poly, degree)))
            .clone();
        Ok(Field { order, bits: degree as u8, poly, tables })
    }

    /// Field with an explicit reduction polynomial (full mask including the leading term).
    pub fn with_polynomial(order: u16, poly: u16) -> Result<Field, FieldError> {
        let degree = degree_of(order)?;
        if order == 2 {
            return Field::new(2);
        }
        if !is_irreducible(poly, degree) {
            return Err(FieldError::ReduciblePolynomial { poly, degree });
        }
        if poly == default_polynomial(order)? {
            return Field::new(order);
        }
        Ok(Field {
            order,
            bits: degree as u8,
            poly,
            tables: Arc::new(Tables::build(order, poly, degree)),
        })
    }

    /// Builds the field from log2(q), as carried in the wire header.
    pub fn from_bits(bits: u8) -> Result<Field, FieldError> {
        match bits {
            1 | 2 | 4 | 8 => Field::new(1u16 << bits),
            other => Err(FieldError::UnsupportedOrder(1u32.checked_shl(other as u32).unwrap_or(0))),
        }
    }

    pub fn gf2() -> Field {
        Field::new(2).unwrap()
    }

    pub fn gf256() -> Field {
        Field::new(256).unwrap()
    }

    pub fn order(&self) -> u16 {
        self.order
    }

    /// log2(q): the number of bits in one symbol.
    pub fn bits(&self) -> u8 {
        self.bits
    }

    pub fn polynomial(&self) -> u16 {
        self.poly
    }

    #[inline]
    pub fn contains(&self, value: u8) -> bool {
        (value as u16) < self.order
    }

    pub fn element(&self, value: u8) -> Result<u8, FieldError> {
        if self.contains(value) {
            Ok(value)
        } else {
            Err(FieldError::InvalidElement { value, order: self.order })
        }
    }

    #[inline]
    pub fn add(&self, a: u8, b: u8) -> u8 {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: u8, b: u8) -> u8 {
        debug_assert!(self.contains(a) && self.contains(b));
        if self.order == 256 {
            if a == 0 || b == 0 {
                return 0;
            }
            let t = &self.tables;
            t.exp[t.log[a as usize] as usize + t.log[b as usize] as usize]
        } else {
            self.tables.mul[a as usize * self.order as usize + b as usize]
        }
    }

    pub fn inv(&self, a: u8) -> Result<u8, FieldError> {
        if a == 0 {
            return Err(FieldError::ZeroInverse);
        }
        self.element(a)?;
        Ok(self.tables.inv[a as usize])
    }

    pub fn div(&self, a: u8, b: u8) -> Result<u8, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Row of the product table: `mul_row(c)[x] == c * x`.
    #[inline]
    fn mul_row(&self, coeff: u8) -> &[u8] {
        let q = self.order as usize;
        &self.tables.mul[coeff as usize * q..(coeff as usize + 1) * q]
    }

    /// `dst[i] += coeff * src[i]` for every position.
    pub fn axpy(&self, coeff: u8, src: &[u8], dst: &mut [u8]) -> Result<(), FieldError> {
        if src.len() != dst.len() {
            return Err(FieldError::LengthMismatch { left: src.len(), right: dst.len() });
        }
        self.element(coeff)?;
        self.axpy_unchecked(coeff, src, dst);
        Ok(())
    }

    #[inline]
    pub(crate) fn axpy_unchecked(&self, coeff: u8, src: &[u8], dst: &mut [u8]) {
        debug_assert_eq!(src.len(), dst.len());
        match coeff {
            0 => {}
            1 => dst.iter_mut().zip(src).for_each(|(d, s)| *d ^= *s),
            c => {
                let row = self.mul_row(c);
                dst.iter_mut()
                    .zip(src)
                    .for_each(|(d, s)| *d ^= row[*s as usize]);
            }
        }
    }

    /// `row[i] *= coeff`.
    pub fn scale(&self, coeff: u8, row: &mut [u8]) {
        match coeff {
            1 => {}
            0 => row.fill(0),
            c => {
                let mul = self.mul_row(c);
                row.iter_mut().for_each(|x| *x = mul[*x as usize]);
            }
        }
    }
}

/// Number of bytes needed to hold `count` symbols of `bits` bits each.
pub fn packed_len(count: usize, bits: u8) -> usize {
    (count * bits as usize).div_ceil(8)
}

/// Packs symbols LSB-first into bytes. For 8-bit symbols this is a copy.
pub fn pack_symbols(symbols: &[u8], bits: u8) -> Vec<u8> {
    if bits == 8 {
        return symbols.to_vec();
    }
    let per_byte = 8 / bits as usize;
    let mask = (1u8 << bits) - 1;
    let mut out = vec![0u8; packed_len(symbols.len(), bits)];
    for (i, &s) in symbols.iter().enumerate() {
        out[i / per_byte] |= (s & mask) << ((i % per_byte) * bits as usize);
    }
    out
}

/// Inverse of [`pack_symbols`]; reads `count` symbols.
pub fn unpack_symbols(bytes: &[u8], bits: u8, count: usize) -> Vec<u8> {
    if bits == 8 {
        return bytes[..count].to_vec();
    }
    let per_byte = 8 / bits as usize;
    let mask = (1u8 << bits) - 1;
    (0..count)
        .map(|i| (bytes[i / per_byte] >> ((i % per_byte) * bits as usize)) & mask)
        .collect()
}
