//! Truth-table Boolean functions and their combinatorial complexity measures.
//!
//! A function on `n` variables is stored as a bit vector of length `2^n`:
//! the bit at index `k` is the value at the input whose binary expansion is
//! `k`, with variable `0` as the least significant bit. This little-endian
//! convention is shared by the truth-table file format and everything built
//! on top.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on truth-table arity (the table has `2^n` bits).
pub const MAX_ARITY: usize = 26;

/// Cap for `block_sensitivity` (the search is exponential in a worse way
/// than the table size: `6^n` submask steps overall).
pub const BLOCK_SENSITIVITY_CAP: usize = 10;

/// A Boolean function as an explicit truth table.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    arity: usize,
    limbs: Vec<u64>,
}

impl std::fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BooleanFunction(n={}, ", self.arity)?;
        if self.arity <= 4 {
            for k in 0..self.size() {
                write!(f, "{}", self.value(k) as u8)?;
            }
        } else {
            write!(f, "2^{} bits", self.arity)?;
        }
        write!(f, ")")
    }
}

fn check_arity(arity: usize) -> Result<()> {
    if arity > MAX_ARITY {
        return Err(Error::ArityCap {
            what: "truth table",
            arity,
            cap: MAX_ARITY,
        });
    }
    Ok(())
}

/// Pack a slice of bits into a little-endian input index.
pub fn bits_to_index(bits: &[bool]) -> u64 {
    assert!(bits.len() <= 64);
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | ((b as u64) << i))
}

/// Unpack an input index into `n` bits, variable 0 first.
pub fn index_to_bits(index: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| (index >> i) & 1 == 1).collect()
}

impl BooleanFunction {
    /// Build from a predicate on input indices.
    pub fn from_fn(arity: usize, f: impl Fn(u64) -> bool) -> Result<Self> {
        check_arity(arity)?;
        let size = 1u64 << arity;
        let mut limbs = vec![0u64; ((size + 63) / 64) as usize];
        for k in 0..size {
            if f(k) {
                limbs[(k >> 6) as usize] |= 1 << (k & 63);
            }
        }
        Ok(Self { arity, limbs })
    }

    pub fn constant(arity: usize, value: bool) -> Result<Self> {
        Self::from_fn(arity, |_| value)
    }

    pub fn from_bits(arity: usize, bits: &[bool]) -> Result<Self> {
        check_arity(arity)?;
        if bits.len() != 1 << arity {
            return Err(Error::ArityMismatch {
                expected: 1 << arity,
                got: bits.len(),
            });
        }
        Self::from_fn(arity, |k| bits[k as usize])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Number of table entries, `2^n`.
    pub fn size(&self) -> u64 {
        1u64 << self.arity
    }

    /// Table bit at input index `k`.
    #[inline]
    pub fn value(&self, k: u64) -> bool {
        debug_assert!(k < self.size());
        (self.limbs[(k >> 6) as usize] >> (k & 63)) & 1 == 1
    }

    /// Evaluate at an explicit bit vector (variable 0 first).
    pub fn evaluate(&self, input: &[bool]) -> Result<bool> {
        if input.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: input.len(),
            });
        }
        Ok(self.value(bits_to_index(input)))
    }

    pub fn is_constant(&self) -> bool {
        let v = self.value(0);
        (0..self.size()).all(|k| self.value(k) == v)
    }

    // ---- named families -------------------------------------------------

    pub fn or(n: usize) -> Result<Self> {
        Self::from_fn(n, |k| k != 0)
    }

    pub fn and(n: usize) -> Result<Self> {
        let full = if n == 0 { 0 } else { (1u64 << n) - 1 };
        Self::from_fn(n, move |k| k == full)
    }

    pub fn xor(n: usize) -> Result<Self> {
        Self::from_fn(n, |k| k.count_ones() % 2 == 1)
    }

    /// Majority: strictly more ones than zeros.
    pub fn majority(n: usize) -> Result<Self> {
        Self::from_fn(n, move |k| 2 * k.count_ones() as usize > n)
    }

    /// The addressing function on `n = r + 2^r` variables. Variables
    /// `0..r` are the addressing bits (variable 0 least significant in the
    /// address), and variable `r + a` is the addressed bit selected by
    /// address value `a`.
    pub fn addressing(r: usize) -> Result<Self> {
        if r >= 64 || r + (1usize << r) > MAX_ARITY {
            return Err(Error::ArityCap {
                what: "addressing function",
                arity: r,
                cap: 4,
            });
        }
        let n = r + (1 << r);
        Self::from_fn(n, move |k| {
            let addr = k & ((1 << r) - 1);
            (k >> (r as u64 + addr)) & 1 == 1
        })
    }

    /// Parse a named family: `OR:<n>`, `AND:<n>`, `MAJ:<n>`, `XOR:<n>`,
    /// `ADDR:<r>`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let (name, num) = spec
            .split_once(':')
            .ok_or_else(|| parse_err(spec, "expected NAME:<k>"))?;
        let k: usize = num
            .trim()
            .parse()
            .map_err(|_| parse_err(spec, "bad numeric parameter"))?;
        match name.trim().to_ascii_uppercase().as_str() {
            "OR" => Self::or(k),
            "AND" => Self::and(k),
            "MAJ" => Self::majority(k),
            "XOR" => Self::xor(k),
            "ADDR" => Self::addressing(k),
            other => Err(parse_err(other, "unknown family")),
        }
    }

    // ---- transformations ------------------------------------------------

    /// Restrict by `rho`: fixed variables are substituted, starred variables
    /// survive in ascending order of their original index.
    pub fn restrict(&self, rho: &Restriction) -> Result<Self> {
        if rho.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: rho.len(),
            });
        }
        let stars = rho.star_positions();
        let ones = rho.one_mask();
        let mut g = Self::constant(stars.len(), false)?;
        for y in 0..g.size() {
            let mut x = ones;
            for (b, &pos) in stars.iter().enumerate() {
                if (y >> b) & 1 == 1 {
                    x |= 1 << pos;
                }
            }
            if self.value(x) {
                g.set(y);
            }
        }
        Ok(g)
    }

    /// Project by `nu`: the result `g` on `m` variables satisfies
    /// `g(y) = f(y ∘ nu)`, i.e. input variable `i` of `f` reads `y[nu(i)]`.
    pub fn project(&self, nu: &Projection) -> Result<Self> {
        if nu.map.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: nu.map.len(),
            });
        }
        nu.validate()?;
        let mut g = Self::constant(nu.target_arity, false)?;
        for y in 0..g.size() {
            let mut x = 0u64;
            for (i, &img) in nu.map.iter().enumerate() {
                if (y >> img) & 1 == 1 {
                    x |= 1 << i;
                }
            }
            if self.value(x) {
                g.set(y);
            }
        }
        Ok(g)
    }

    /// XOR shift: `g(x) = f(x ⊕ shift)`.
    pub fn xor_shift(&self, shift: &[bool]) -> Result<Self> {
        if shift.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: shift.len(),
            });
        }
        let mask = bits_to_index(shift);
        Self::from_fn(self.arity, |k| self.value(k ^ mask))
    }

    pub fn complement(&self) -> Self {
        Self::from_fn(self.arity, |k| !self.value(k)).expect("same arity")
    }

    fn set(&mut self, k: u64) {
        self.limbs[(k >> 6) as usize] |= 1 << (k & 63);
    }

    // ---- complexity measures ---------------------------------------------

    /// Indices of variables the function depends on.
    pub fn influential_variables(&self) -> Vec<usize> {
        (0..self.arity)
            .filter(|&i| {
                let bit = 1u64 << i;
                (0..self.size()).any(|k| self.value(k) != self.value(k ^ bit))
            })
            .collect()
    }

    pub fn is_truly_n_variate(&self) -> bool {
        self.influential_variables().len() == self.arity
    }

    /// Sensitivity at a single input.
    pub fn sensitivity_at(&self, k: u64) -> usize {
        (0..self.arity)
            .filter(|&i| self.value(k) != self.value(k ^ (1 << i)))
            .count()
    }

    /// Maximum sensitivity together with the lowest input index attaining it.
    pub fn sensitivity(&self) -> (usize, u64) {
        let mut best = 0;
        let mut witness = 0;
        for k in 0..self.size() {
            let s = self.sensitivity_at(k);
            if s > best {
                best = s;
                witness = k;
            }
        }
        (best, witness)
    }

    /// Block sensitivity at one input: the largest family of pairwise
    /// disjoint blocks whose joint flips each change the value.
    fn block_sensitivity_at(&self, a: u64) -> usize {
        let n = self.arity;
        let full = (1u64 << n) - 1;
        let base = self.value(a);
        let flips: Vec<bool> = (0..=full)
            .map(|b| self.value(a ^ b) != base)
            .collect();
        // dp over variable masks: best packing of flipping blocks inside the mask
        let mut dp = vec![0u8; (full + 1) as usize];
        for mask in 1..=full {
            let mut best = 0u8;
            let mut b = mask;
            while b > 0 {
                if flips[b as usize] {
                    best = best.max(1 + dp[(mask ^ b) as usize]);
                }
                b = (b - 1) & mask;
            }
            dp[mask as usize] = best;
        }
        dp[full as usize] as usize
    }

    pub fn block_sensitivity(&self) -> Result<usize> {
        if self.arity > BLOCK_SENSITIVITY_CAP {
            return Err(Error::ArityCap {
                what: "block sensitivity",
                arity: self.arity,
                cap: BLOCK_SENSITIVITY_CAP,
            });
        }
        if self.arity == 0 {
            return Ok(0);
        }
        Ok((0..self.size())
            .map(|a| self.block_sensitivity_at(a))
            .max()
            .unwrap_or(0))
    }

    // ---- truth-table file format ------------------------------------------

    /// Serialize as the two-line text format: `n=<arity>` then a hex string
    /// of `ceil(2^n / 4)` digits, most significant digit first, where bit `k`
    /// of the encoded integer is the table bit at input index `k`.
    pub fn to_table_string(&self) -> String {
        let digits = ((self.size() + 3) / 4) as usize;
        let mut hex = String::with_capacity(digits);
        for d in (0..digits).rev() {
            let mut nibble = 0u8;
            for b in 0..4 {
                let k = (d * 4 + b) as u64;
                if k < self.size() && self.value(k) {
                    nibble |= 1 << b;
                }
            }
            hex.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        format!("n={}\n{}\n", self.arity, hex)
    }

    pub fn from_table_string(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| parse_err(text, "empty input"))?;
        let arity: usize = header
            .trim()
            .strip_prefix("n=")
            .ok_or_else(|| parse_err(header, "expected n=<arity>"))?
            .parse()
            .map_err(|_| parse_err(header, "bad arity"))?;
        check_arity(arity)?;
        let hex = lines
            .next()
            .ok_or_else(|| parse_err(text, "missing table line"))?
            .trim();
        let size = 1u64 << arity;
        let digits = ((size + 3) / 4) as usize;
        if hex.len() != digits {
            return Err(parse_err(
                hex,
                &format!("expected {digits} hex digits for arity {arity}"),
            ));
        }
        let mut nibbles = Vec::with_capacity(digits);
        for c in hex.chars().rev() {
            nibbles.push(
                c.to_digit(16)
                    .ok_or_else(|| parse_err(hex, "non-hex digit"))? as u8,
            );
        }
        Self::from_fn(arity, |k| (nibbles[(k / 4) as usize] >> (k % 4)) & 1 == 1)
    }
}

fn parse_err(what: &str, why: &str) -> Error {
    Error::Parse(format!("{why}: {what:?}"))
}

/// One coordinate of a restriction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RestrictionValue {
    Zero,
    One,
    Star,
}

/// A partial assignment `rho: [n] -> {0, 1, *}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Restriction {
    pub map: Vec<RestrictionValue>,
}

impl Restriction {
    pub fn new(map: Vec<RestrictionValue>) -> Self {
        Self { map }
    }

    /// All-star restriction on `n` variables.
    pub fn all_star(n: usize) -> Self {
        Self {
            map: vec![RestrictionValue::Star; n],
        }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn star_positions(&self) -> Vec<usize> {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == RestrictionValue::Star)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn one_mask(&self) -> u64 {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == RestrictionValue::One)
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }

    pub fn zero_mask(&self) -> u64 {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, v)| **v == RestrictionValue::Zero)
            .fold(0u64, |m, (i, _)| m | (1 << i))
    }

    /// Keep the variables in `star_mask` alive and set everything else to 0.
    pub fn zero_outside(n: usize, star_mask: u64) -> Self {
        Self {
            map: (0..n)
                .map(|i| {
                    if (star_mask >> i) & 1 == 1 {
                        RestrictionValue::Star
                    } else {
                        RestrictionValue::Zero
                    }
                })
                .collect(),
        }
    }
}

/// A projection `nu: [n] -> [m]` identifying variables of an `n`-variate
/// function with variables of an `m`-variate one.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    pub map: Vec<usize>,
    pub target_arity: usize,
}

impl Projection {
    pub fn new(map: Vec<usize>, target_arity: usize) -> Result<Self> {
        let nu = Self { map, target_arity };
        nu.validate()?;
        Ok(nu)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
            target_arity: n,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(&bad) = self.map.iter().find(|&&img| img >= self.target_arity) {
            return Err(Error::InvalidParameter(format!(
                "projection image {bad} out of range (target arity {})",
                self.target_arity
            )));
        }
        Ok(())
    }

    pub fn source_arity(&self) -> usize {
        self.map.len()
    }

    /// Pull an `m`-variate input back to an `n`-variate one.
    pub fn pull_back(&self, y: &[bool]) -> Vec<bool> {
        self.map.iter().map(|&img| y[img]).collect()
    }
}
