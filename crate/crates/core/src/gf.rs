//! `GF(2^ℓ)` arithmetic and the group algebra `GF(2^ℓ)[Z_2^m]`.

use std::sync::OnceLock;

use thiserror::Error;

/// Largest supported field exponent.
pub const MAX_FIELD_EXP: u32 = 16;
/// Largest supported group dimension (dense tables of `2^m` coefficients).
pub const MAX_GROUP_DIMS: u32 = 20;

/// Irreducible modulus of `GF(2^ℓ)`, indexed by `ℓ`, bit `i` standing for
/// `x^i`.
pub const IRREDUCIBLE: [u32; 17] = [
    0, 0x3, 0x7, 0xB, 0x13, 0x25, 0x43, 0x83, 0x11B, 0x211, 0x409, 0x805, 0x1053, 0x201B, 0x4443,
    0x8003, 0x1100B,
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("field exponent {0} outside 1..={MAX_FIELD_EXP}")]
    FieldExponent(u32),
    #[error("group dimension {0} exceeds {MAX_GROUP_DIMS}")]
    GroupDimension(u32),
    #[error("operands live in different algebras: (m={0}, l={1}) vs (m={2}, l={3})")]
    Mismatch(u32, u32, u32, u32),
}

/// Carry-less product of two polynomials over GF(2).
pub fn clmul(mut a: u64, b: u64) -> u64 {
    let mut out = 0;
    let mut shift = 0;
    while a != 0 {
        if a & 1 == 1 {
            out ^= b << shift;
        }
        a >>= 1;
        shift += 1;
    }
    out
}

/// Remainder of `a` modulo `m` over GF(2).
pub fn poly_mod(mut a: u64, m: u64) -> u64 {
    let dm = 63 - m.leading_zeros();
    while a != 0 && 63 - a.leading_zeros() >= dm {
        a ^= m << (63 - a.leading_zeros() - dm);
    }
    a
}

/// Whether `m` is irreducible over GF(2), by trial division.
pub fn is_irreducible(m: u64) -> bool {
    let deg = 63 - m.leading_zeros();
    if deg == 0 {
        return false;
    }
    (2u64..1 << (deg / 2 + 1))
        .filter(|d| 63 - d.leading_zeros() <= deg / 2)
        .all(|d| poly_mod(m, d) != 0)
}

/// `GF(2^ℓ)` with log/antilog tables.
pub struct Field {
    exp: u32,
    log: Vec<u32>,
    antilog: Vec<u32>,
}

impl Field {
    fn build(exp: u32) -> Field {
        let size = 1usize << exp;
        let modulus = IRREDUCIBLE[exp as usize] as u64;
        let order = size - 1;
        // A primitive element: the first whose powers reach every unit.
        let generator = (2..=size as u64)
            .map(|g| if size == 2 { 1 } else { g })
            .find(|&g| {
                let mut x = 1u64;
                for i in 1..=order {
                    x = poly_mod(clmul(x, g), modulus);
                    if x == 1 {
                        return i == order;
                    }
                }
                false
            })
            .expect("a finite field has a primitive element");
        let mut log = vec![0u32; size];
        let mut antilog = vec![0u32; 2 * order];
        let mut x = 1u64;
        for i in 0..order {
            antilog[i] = x as u32;
            antilog[i + order] = x as u32;
            log[x as usize] = i as u32;
            x = poly_mod(clmul(x, generator), modulus);
        }
        Field { exp, log, antilog }
    }

    /// The shared table for exponent `exp`.
    pub fn get(exp: u32) -> Result<&'static Field, AlgebraError> {
        static FIELDS: [OnceLock<Field>; 17] = [const { OnceLock::new() }; 17];
        if exp == 0 || exp > MAX_FIELD_EXP {
            return Err(AlgebraError::FieldExponent(exp));
        }
        Ok(FIELDS[exp as usize].get_or_init(|| Field::build(exp)))
    }

    pub fn exponent(&self) -> u32 {
        self.exp
    }

    pub fn size(&self) -> u32 {
        1 << self.exp
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            0
        } else {
            self.antilog[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// Reference multiplication straight from the modulus.
    pub fn mul_slow(&self, a: u32, b: u32) -> u32 {
        poly_mod(
            clmul(a as u64, b as u64),
            IRREDUCIBLE[self.exp as usize] as u64,
        ) as u32
    }
}

/// `Σ_u c_u · u` over `u ∈ Z_2^m` with `c_u ∈ GF(2^ℓ)`, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAlgebraElement {
    dims: u32,
    field: &'static Field,
    coeffs: Vec<u32>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GF(2^{})", self.exp)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.exp == other.exp
    }
}

impl Eq for Field {}

impl GroupAlgebraElement {
    pub fn zero(dims: u32, field_exp: u32) -> Result<Self, AlgebraError> {
        if dims > MAX_GROUP_DIMS {
            return Err(AlgebraError::GroupDimension(dims));
        }
        Ok(GroupAlgebraElement {
            dims,
            field: Field::get(field_exp)?,
            coeffs: vec![0; 1 << dims],
        })
    }

    /// `1 · 0`, the multiplicative identity.
    pub fn one(dims: u32, field_exp: u32) -> Result<Self, AlgebraError> {
        Self::basis(dims, field_exp, 0, 1)
    }

    /// `scalar · u`.
    pub fn basis(dims: u32, field_exp: u32, u: u32, scalar: u32) -> Result<Self, AlgebraError> {
        let mut e = Self::zero(dims, field_exp)?;
        let mask = e.field.size() - 1;
        e.coeffs[(u & ((1 << dims) - 1)) as usize] = scalar & mask;
        Ok(e)
    }

    pub fn dims(&self) -> u32 {
        self.dims
    }

    pub fn field_exp(&self) -> u32 {
        self.field.exp
    }

    pub fn coefficient(&self, u: u32) -> u32 {
        self.coeffs[u as usize]
    }

    pub fn set_coefficient(&mut self, u: u32, c: u32) {
        self.coeffs[u as usize] = c & (self.field.size() - 1);
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn support_size(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    fn check(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.dims != other.dims || self.field.exp != other.field.exp {
            return Err(AlgebraError::Mismatch(
                self.dims,
                self.field.exp,
                other.dims,
                other.field.exp,
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    /// In-place addition; panics on mismatched algebras.
    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!((self.dims, self.field.exp), (other.dims, other.field.exp));
        self.coeffs
            .iter_mut()
            .zip(&other.coeffs)
            .for_each(|(a, b)| *a ^= b);
    }

    pub fn scale(&self, scalar: u32) -> Self {
        let mut out = self.clone();
        out.coeffs
            .iter_mut()
            .for_each(|c| *c = self.field.mul(*c, scalar));
        out
    }

    /// Convolution over the XOR group, skipping zero coefficients.
    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.check(other)?;
        let f = self.field;
        let right: Vec<(usize, u32)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(u, &c)| (u, c))
            .collect();
        let mut coeffs = vec![0u32; self.coeffs.len()];
        for (u, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let la = f.log[a as usize];
            for &(w, b) in &right {
                coeffs[u ^ w] ^= f.antilog[(la + f.log[b as usize]) as usize];
            }
        }
        Ok(GroupAlgebraElement {
            dims: self.dims,
            field: f,
            coeffs,
        })
    }
}

/// `a · b`, failing on mismatched parameters.
pub fn ga_multiply(
    a: &GroupAlgebraElement,
    b: &GroupAlgebraElement,
) -> Result<GroupAlgebraElement, AlgebraError> {
    a.mul(b)
}
