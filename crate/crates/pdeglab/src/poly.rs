//! Sparse multilinear polynomials over arbitrary-precision rationals.
//!
//! Every polynomial here is kept in its multilinear canonical form: monomials
//! are subsets of variables (bitmask keys), and products reduce `x_i^2 -> x_i`
//! on the fly. Since evaluation only ever happens at Boolean points of the
//! base variables (composition substitutes symbolically first), the reduction
//! is semantics-preserving, and the canonical form makes equality exact.

use std::collections::BTreeMap;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};

/// Monomials are variable bitmasks, so polynomial arity is capped at 64.
pub const POLY_MAX_ARITY: usize = 64;

/// Cap for the exact majority polynomial (`2^(l-1)` monomials).
pub const MAJORITY_CAP: usize = 15;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A multilinear polynomial with exact rational coefficients. Zero
/// coefficients are never stored; term order is the monomial mask order.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    arity: usize,
    terms: BTreeMap<u64, BigRational>,
}

impl std::fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Polynomial(n={};", self.arity)?;
        for (mask, c) in self.terms.iter().take(8) {
            write!(f, " {c}*m{mask:b}")?;
        }
        if self.terms.len() > 8 {
            write!(f, " ... {} terms", self.terms.len())?;
        }
        write!(f, ")")
    }
}

fn check_poly_arity(arity: usize) -> Result<()> {
    if arity > POLY_MAX_ARITY {
        return Err(Error::ArityCap {
            what: "polynomial",
            arity,
            cap: POLY_MAX_ARITY,
        });
    }
    Ok(())
}

impl Polynomial {
    pub fn zero(arity: usize) -> Self {
        Self {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: BigRational) -> Self {
        let mut p = Self::zero(arity);
        if !c.is_zero() {
            p.terms.insert(0, c);
        }
        p
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigRational::one())
    }

    pub fn variable(arity: usize, index: usize) -> Self {
        assert!(index < arity, "variable index out of range");
        let mut p = Self::zero(arity);
        p.terms.insert(1u64 << index, BigRational::one());
        p
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = (u64, BigRational)>) -> Result<Self> {
        check_poly_arity(arity)?;
        let mut p = Self::zero(arity);
        for (mask, c) in terms {
            if arity < 64 && mask >> arity != 0 {
                return Err(Error::InvalidParameter(format!(
                    "monomial {mask:#x} uses variables beyond arity {arity}"
                )));
            }
            p.add_term(mask, c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(&m, c)| (m, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mask: u64) -> BigRational {
        self.terms.get(&mask).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree: the largest monomial size (0 for constants and the zero
    /// polynomial).
    pub fn degree(&self) -> usize {
        self.terms
            .keys()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, mask: u64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(mask) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    fn check_same_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_arity(other)?;
        let mut out = self.clone();
        for (&m, c) in &other.terms {
            out.add_term(m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        Self {
            arity: self.arity,
            terms: self.terms.iter().map(|(&m, c)| (m, -c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        Self {
            arity: self.arity,
            terms: self.terms.iter().map(|(&m, v)| (m, v * c)).collect(),
        }
    }

    /// Product with multilinear reduction: `x_S * x_T = x_{S ∪ T}`.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (&m1, c1) in &self.terms {
            for (&m2, c2) in &other.terms {
                out.add_term(m1 | m2, c1 * c2);
            }
        }
        Ok(out)
    }

    /// `1 - p`.
    pub fn one_minus(&self) -> Self {
        Self::one(self.arity).sub(self).expect("same arity")
    }

    /// Exact value at a rational point. Boolean points take a fast path.
    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        if let Some(mask) = boolean_mask(point) {
            return Ok(self.evaluate_mask(mask));
        }
        let mut total = BigRational::zero();
        for (&m, c) in &self.terms {
            let mut prod = c.clone();
            let mut bits = m;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                prod *= &point[i];
                if prod.is_zero() {
                    break;
                }
            }
            total += prod;
        }
        Ok(total)
    }

    /// Value at the Boolean point encoded by `mask` (bit `i` = variable `i`).
    pub fn evaluate_mask(&self, mask: u64) -> BigRational {
        // integer accumulation while denominators stay 1
        let mut int_sum = BigInt::zero();
        let mut rat_sum: Option<BigRational> = None;
        for (&m, c) in &self.terms {
            if m & mask != m {
                continue;
            }
            if c.denom().is_one() {
                int_sum += c.numer();
            } else {
                match &mut rat_sum {
                    Some(acc) => *acc += c,
                    None => rat_sum = Some(c.clone()),
                }
            }
        }
        let int_part = BigRational::from_integer(int_sum);
        match rat_sum {
            Some(r) => r + int_part,
            None => int_part,
        }
    }

    /// All coefficients are integers.
    pub fn has_integer_coefficients(&self) -> bool {
        self.terms.values().all(|c| c.denom().is_one())
    }

    // ---- variable substitutions ------------------------------------------

    /// Substitute constants for the fixed variables of `rho` and renumber the
    /// surviving (starred) variables in ascending order.
    pub fn restrict(&self, rho: &crate::boolfn::Restriction) -> Result<Self> {
        if rho.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: rho.len(),
            });
        }
        let stars = rho.star_positions();
        let zero_mask = rho.zero_mask();
        let one_mask = rho.one_mask();
        let mut pos_of = vec![usize::MAX; self.arity];
        for (new, &old) in stars.iter().enumerate() {
            pos_of[old] = new;
        }
        let mut out = Self::zero(stars.len());
        for (&m, c) in &self.terms {
            if m & zero_mask != 0 {
                continue;
            }
            let mut new_mask = 0u64;
            let mut bits = m & !one_mask;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                new_mask |= 1 << pos_of[i];
            }
            out.add_term(new_mask, c.clone());
        }
        Ok(out)
    }

    /// Identify variables along a projection: variable `i` becomes
    /// `nu.map[i]` in the target space, with multilinear collapse.
    pub fn project(&self, nu: &crate::boolfn::Projection) -> Result<Self> {
        if nu.map.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: nu.map.len(),
            });
        }
        nu.validate()?;
        check_poly_arity(nu.target_arity)?;
        let mut out = Self::zero(nu.target_arity);
        for (&m, c) in &self.terms {
            let mut new_mask = 0u64;
            let mut bits = m;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                new_mask |= 1 << nu.map[i];
            }
            out.add_term(new_mask, c.clone());
        }
        Ok(out)
    }

    /// Affine substitution `x_i -> 1 - x_i` for each shifted coordinate, so
    /// the result computes `p(x ⊕ shift)`.
    pub fn xor_shift(&self, shift: &[bool]) -> Result<Self> {
        if shift.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: shift.len(),
            });
        }
        let shift_mask = crate::boolfn::bits_to_index(shift);
        let mut out = Self::zero(self.arity);
        for (&m, c) in &self.terms {
            let kept = m & !shift_mask;
            let flipped = m & shift_mask;
            // expand prod_{i in flipped} (1 - x_i)
            let mut sub = flipped;
            loop {
                let sign = if (flipped ^ sub).count_ones() % 2 == 1 {
                    -c.clone()
                } else {
                    c.clone()
                };
                out.add_term(kept | (flipped ^ sub), sign);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & flipped;
            }
        }
        Ok(out)
    }
}

fn boolean_mask(point: &[BigRational]) -> Option<u64> {
    if point.len() > 64 {
        return None;
    }
    let mut mask = 0u64;
    for (i, v) in point.iter().enumerate() {
        if v.is_one() {
            mask |= 1 << i;
        } else if !v.is_zero() {
            return None;
        }
    }
    Some(mask)
}

/// Convert a Boolean input index into a rational evaluation point.
pub fn mask_to_point(mask: u64, arity: usize) -> Vec<BigRational> {
    (0..arity)
        .map(|i| {
            if (mask >> i) & 1 == 1 {
                BigRational::one()
            } else {
                BigRational::zero()
            }
        })
        .collect()
}

/// The unique multilinear polynomial agreeing with `f` on the cube, by the
/// in-place subset Möbius transform.
pub fn mobius_interpolate(f: &BooleanFunction) -> Polynomial {
    let n = f.arity();
    let size = 1usize << n;
    let mut coeffs: Vec<i64> = (0..size).map(|k| f.value(k as u64) as i64).collect();
    for i in 0..n {
        let bit = 1usize << i;
        for k in 0..size {
            if k & bit != 0 {
                coeffs[k] -= coeffs[k ^ bit];
            }
        }
    }
    let terms = coeffs
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c != 0)
        .map(|(m, c)| (m as u64, rat(c)));
    Polynomial::from_terms(n, terms).expect("arity within cap")
}

/// Multilinear interpolation of arbitrary rational values over the cube
/// (index `k` holds the value at the Boolean point `k`).
pub fn interpolate_values(arity: usize, values: &[BigRational]) -> Result<Polynomial> {
    check_poly_arity(arity)?;
    let size = 1usize << arity;
    if values.len() != size {
        return Err(Error::ArityMismatch {
            expected: size,
            got: values.len(),
        });
    }
    let mut coeffs = values.to_vec();
    for i in 0..arity {
        let bit = 1usize << i;
        for k in 0..size {
            if k & bit != 0 {
                let prev = coeffs[k ^ bit].clone();
                coeffs[k] -= prev;
            }
        }
    }
    Polynomial::from_terms(
        arity,
        coeffs
            .into_iter()
            .enumerate()
            .map(|(m, c)| (m as u64, c)),
    )
}

/// Exact multilinear majority polynomial on an odd number of variables.
pub fn majority_poly(ell: usize) -> Result<Polynomial> {
    if ell % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "majority polynomial needs an odd arity, got {ell}"
        )));
    }
    if ell > MAJORITY_CAP {
        return Err(Error::ArityCap {
            what: "majority polynomial",
            arity: ell,
            cap: MAJORITY_CAP,
        });
    }
    Ok(mobius_interpolate(&BooleanFunction::majority(ell)?))
}

/// Value of the multilinear extension of majority at an arbitrary rational
/// point, via the generating polynomial `prod_i ((1 - w_i) + w_i z)`:
/// summing the coefficients of `z^k` for `k > l/2` gives the extension value.
pub fn majority_extension_value(values: &[BigRational]) -> BigRational {
    let ell = values.len();
    let mut coeffs: Vec<BigRational> = vec![BigRational::one()];
    for w in values {
        let one_minus = BigRational::one() - w;
        let mut next = vec![BigRational::zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            next[k] += c * &one_minus;
            next[k + 1] += c * w;
        }
        coeffs = next;
    }
    let mut total = BigRational::zero();
    for coeff in coeffs.into_iter().skip(ell / 2 + 1) {
        total += coeff;
    }
    total
}

/// Substitute `inners[i]` for variable `i` of `outer`, then reduce
/// multilinearly in the base variables. For every Boolean base point the
/// result value equals `outer` evaluated at the inner values.
pub fn compose(outer: &Polynomial, inners: &[Polynomial]) -> Result<Polynomial> {
    if inners.len() != outer.arity() {
        return Err(Error::ArityMismatch {
            expected: outer.arity(),
            got: inners.len(),
        });
    }
    let base = match inners.first() {
        Some(p) => p.arity(),
        None => return Ok(outer.clone()), // nullary outer is a constant
    };
    for p in inners {
        if p.arity() != base {
            return Err(Error::ArityMismatch {
                expected: base,
                got: p.arity(),
            });
        }
    }
    let mut out = Polynomial::zero(base);
    for (&m, c) in &outer.terms {
        let mut prod = Polynomial::constant(base, c.clone());
        let mut bits = m;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            prod = prod.multiply(&inners[i])?;
            if prod.is_zero() {
                break;
            }
        }
        out = out.add(&prod)?;
    }
    Ok(out)
}

// ---- exact linear algebra ---------------------------------------------------

/// A solution of the degree-`d` agreement system, with its encoding size.
#[derive(Clone, Debug)]
pub struct LinearSystemSolution {
    pub polynomial: Polynomial,
    /// Total bits over all monomial coefficients of degree <= d, counting
    /// numerator magnitude bits plus denominator bits (a zero numerator
    /// counts as one bit).
    pub bit_size: u64,
    pub monomial_count: usize,
}

/// Monomial masks of degree at most `d` over `m` variables, ascending.
pub fn monomials_up_to(m: usize, d: usize) -> Vec<u64> {
    let top: u64 = if m == 64 { u64::MAX } else { (1 << m) - 1 };
    (0..=top)
        .filter(|mask| mask.count_ones() as usize <= d)
        .collect()
}

/// Find a multilinear polynomial of degree at most `d` over `m` variables
/// that exactly fits all `(point, value)` pairs, if one exists. Exact
/// rational Gaussian elimination; free variables are set to zero.
pub fn solve_agreement_system(
    m: usize,
    points: &[u64],
    values: &[bool],
    d: usize,
) -> Result<Option<LinearSystemSolution>> {
    if points.len() != values.len() {
        return Err(Error::ArityMismatch {
            expected: points.len(),
            got: values.len(),
        });
    }
    for (i, a) in points.iter().enumerate() {
        if points[..i].contains(a) {
            return Err(Error::InvalidParameter(format!(
                "duplicate evaluation point {a:#x}"
            )));
        }
    }
    let monomials = monomials_up_to(m, d);
    let cols = monomials.len();
    let rows = points.len();
    let mut matrix: Vec<Vec<BigRational>> = points
        .iter()
        .map(|&a| {
            monomials
                .iter()
                .map(|&mono| {
                    if mono & a == mono {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut rhs: Vec<BigRational> = values.iter().map(|&v| rat(v as i64)).collect();

    // forward elimination with column pivots
    let mut pivot_col_of_row = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(row, p);
        rhs.swap(row, p);
        let inv = matrix[row][col].clone();
        for r in 0..rows {
            if r == row || matrix[r][col].is_zero() {
                continue;
            }
            let factor = &matrix[r][col] / &inv;
            for c in col..cols {
                let delta = &factor * &matrix[row][c];
                matrix[r][c] -= delta;
            }
            let delta = &factor * &rhs[row];
            rhs[r] -= delta;
        }
        pivot_col_of_row.push((row, col));
        row += 1;
        if row == rows {
            break;
        }
    }
    // consistency: a zeroed row with nonzero rhs means no solution
    for r in row..rows {
        if !rhs[r].is_zero() {
            return Ok(None);
        }
    }
    let mut solution = vec![BigRational::zero(); cols];
    for &(r, c) in &pivot_col_of_row {
        solution[c] = &rhs[r] / &matrix[r][c];
    }
    let bit_size: u64 = solution.iter().map(coefficient_bits).sum();
    let polynomial = Polynomial::from_terms(
        m,
        monomials.iter().copied().zip(solution.into_iter()),
    )?;
    Ok(Some(LinearSystemSolution {
        polynomial,
        bit_size,
        monomial_count: cols,
    }))
}

fn coefficient_bits(c: &BigRational) -> u64 {
    let num_bits = match c.numer().sign() {
        Sign::NoSign => 1,
        _ => c.numer().magnitude().bits(),
    };
    num_bits + c.denom().magnitude().bits()
}

/// The Cramer-style bound `10 q^3` on solution bit size for a Boolean system
/// in `q` unknowns, reported alongside observed sizes.
pub fn bit_size_bound(q: usize) -> u64 {
    10 * (q as u64).pow(3)
}

// ---- serialization ----------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermRepr {
    monomial: Vec<usize>,
    coeff: String,
}

#[derive(Serialize, Deserialize)]
struct PolyRepr {
    arity: usize,
    terms: Vec<TermRepr>,
}

/// Render a rational as `num/den` decimal strings.
pub fn rational_string(c: &BigRational) -> String {
    format!("{}/{}", c.numer(), c.denom())
}

/// Parse `num/den` (or a bare integer) into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: BigInt = num
        .parse()
        .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
    let den: BigInt = den
        .parse()
        .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
    if den.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(num, den))
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = PolyRepr {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(&m, c)| TermRepr {
                    monomial: (0..64).filter(|i| (m >> i) & 1 == 1).collect(),
                    coeff: rational_string(c),
                })
                .collect(),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PolyRepr::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(repr.terms.len());
        for t in &repr.terms {
            let mut mask = 0u64;
            for &i in &t.monomial {
                if i >= repr.arity {
                    return Err(D::Error::custom(format!(
                        "monomial index {i} out of range for arity {}",
                        repr.arity
                    )));
                }
                mask |= 1 << i;
            }
            let c = parse_rational(&t.coeff).map_err(D::Error::custom)?;
            terms.push((mask, c));
        }
        Polynomial::from_terms(repr.arity, terms).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bf(spec: &str) -> BooleanFunction {
        BooleanFunction::parse_spec(spec).unwrap()
    }

    #[test]
    fn multiply_is_idempotent_on_variables() {
        let x1 = Polynomial::variable(2, 0);
        assert_eq!(x1.multiply(&x1).unwrap(), x1);
    }

    #[test]
    fn one_minus_product_at_origin() {
        let p = Polynomial::variable(2, 0)
            .one_minus()
            .multiply(&Polynomial::variable(2, 1).one_minus())
            .unwrap();
        assert_eq!(p.evaluate_mask(0), rat(1));
    }

    #[test]
    fn or2_square_agrees_on_cube() {
        let or2 = mobius_interpolate(&bf("OR:2"));
        // x1 + x2 - x1 x2
        assert_eq!(or2.coefficient(0b01), rat(1));
        assert_eq!(or2.coefficient(0b10), rat(1));
        assert_eq!(or2.coefficient(0b11), rat(-1));
        let sq = or2.multiply(&or2).unwrap();
        for k in 0..4 {
            assert_eq!(sq.evaluate_mask(k), or2.evaluate_mask(k));
        }
    }

    #[test]
    fn evaluate_at_rational_point() {
        let maj = mobius_interpolate(&bf("MAJ:3"));
        assert_eq!(maj.evaluate_mask(0b011), rat(1));
        let half = ratio(1, 2);
        let v = maj
            .evaluate(&[half.clone(), half.clone(), half])
            .unwrap();
        assert_eq!(v, ratio(1, 2));
        assert_eq!(Polynomial::one(3).evaluate_mask(0b101), rat(1));
    }

    #[test]
    fn mobius_examples() {
        assert!(mobius_interpolate(&BooleanFunction::constant(3, false).unwrap()).is_zero());
        let addr = mobius_interpolate(&BooleanFunction::addressing(2).unwrap());
        assert_eq!(addr.degree(), 3);
        let xor2 = mobius_interpolate(&bf("XOR:2"));
        let expected = Polynomial::from_terms(
            2,
            [(0b01u64, rat(1)), (0b10, rat(1)), (0b11, rat(-2))],
        )
        .unwrap();
        assert_eq!(xor2, expected);
    }

    #[test]
    fn mobius_round_trip_reproduces_table() {
        for spec in ["OR:6", "XOR:7", "MAJ:5", "ADDR:2"] {
            let f = bf(spec);
            let p = mobius_interpolate(&f);
            for k in 0..f.size() {
                assert_eq!(p.evaluate_mask(k), rat(f.value(k) as i64), "{spec} at {k}");
            }
        }
    }

    #[test]
    fn majority_poly_examples() {
        assert_eq!(majority_poly(1).unwrap(), Polynomial::variable(1, 0));
        let m3 = majority_poly(3).unwrap();
        let expected = Polynomial::from_terms(
            3,
            [
                (0b011u64, rat(1)),
                (0b101, rat(1)),
                (0b110, rat(1)),
                (0b111, rat(-2)),
            ],
        )
        .unwrap();
        assert_eq!(m3, expected);
        assert_eq!(m3.evaluate_mask(0b111), rat(1));
        assert!(majority_poly(4).is_err());
        assert!(majority_poly(MAJORITY_CAP + 2).is_err());
    }

    #[test]
    fn majority_extension_matches_polynomial() {
        let m5 = majority_poly(5).unwrap();
        let pts = [
            vec![rat(1), rat(0), rat(1), rat(1), rat(0)],
            vec![ratio(1, 2), ratio(1, 3), rat(2), rat(-1), ratio(3, 7)],
        ];
        for p in pts {
            assert_eq!(
                majority_extension_value(&p),
                m5.evaluate(&p).unwrap()
            );
        }
    }

    #[test]
    fn compose_examples() {
        let q = mobius_interpolate(&bf("XOR:2"));
        // identity composition
        let id = compose(&Polynomial::variable(1, 0), std::slice::from_ref(&q)).unwrap();
        assert_eq!(id, q);

        // OR_2 with both slots the same variable collapses to that variable
        let or2 = mobius_interpolate(&bf("OR:2"));
        let x = Polynomial::variable(1, 0);
        let collapsed = compose(&or2, &[x.clone(), x.clone()]).unwrap();
        assert_eq!(collapsed, x);

        // Maj_3 of three copies of XOR_2 agrees with XOR_2 on the cube
        let m3 = majority_poly(3).unwrap();
        let composed = compose(&m3, &[q.clone(), q.clone(), q.clone()]).unwrap();
        for k in 0..4 {
            assert_eq!(composed.evaluate_mask(k), q.evaluate_mask(k));
        }
    }

    #[test]
    fn compose_matches_interpolated_pointwise_route() {
        let outer = majority_poly(3).unwrap();
        let inners = [
            mobius_interpolate(&bf("OR:3")),
            mobius_interpolate(&bf("XOR:3")),
            mobius_interpolate(&bf("MAJ:3")),
        ];
        let symbolic = compose(&outer, &inners).unwrap();
        let values: Vec<BigRational> = (0..8u64)
            .map(|k| {
                let vals: Vec<BigRational> =
                    inners.iter().map(|p| p.evaluate_mask(k)).collect();
                outer.evaluate(&vals).unwrap()
            })
            .collect();
        let interpolated = interpolate_values(3, &values).unwrap();
        assert_eq!(symbolic, interpolated);
    }

    #[test]
    fn solve_agreement_examples() {
        // constant 1 on arbitrary points at degree 0
        let sol = solve_agreement_system(3, &[0b000, 0b101, 0b011], &[true, true, true], 0)
            .unwrap()
            .unwrap();
        assert_eq!(sol.polynomial, Polynomial::one(3));

        // XOR on all four points has no affine fit
        let pts = [0b00u64, 0b01, 0b10, 0b11];
        let vals = [false, true, true, false];
        assert!(solve_agreement_system(2, &pts, &vals, 1).unwrap().is_none());

        // dropping any single point makes it solvable
        for skip in 0..4 {
            let p: Vec<u64> = pts
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &x)| x)
                .collect();
            let v: Vec<bool> = vals
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &x)| x)
                .collect();
            let sol = solve_agreement_system(2, &p, &v, 1).unwrap().unwrap();
            for (a, val) in p.iter().zip(&v) {
                assert_eq!(sol.polynomial.evaluate_mask(*a), rat(*val as i64));
            }
            assert!(sol.bit_size <= bit_size_bound(sol.monomial_count));
        }
    }

    #[test]
    fn solve_rejects_duplicate_points() {
        assert!(solve_agreement_system(2, &[1, 1], &[true, false], 1).is_err());
    }

    #[test]
    fn restrict_project_shift_substitutions() {
        let f = bf("MAJ:3");
        let p = mobius_interpolate(&f);

        let rho = crate::boolfn::Restriction::new(vec![
            crate::boolfn::RestrictionValue::One,
            crate::boolfn::RestrictionValue::Star,
            crate::boolfn::RestrictionValue::Star,
        ]);
        assert_eq!(
            p.restrict(&rho).unwrap(),
            mobius_interpolate(&f.restrict(&rho).unwrap())
        );

        let nu = crate::boolfn::Projection::new(vec![0, 0, 1], 2).unwrap();
        assert_eq!(
            p.project(&nu).unwrap(),
            mobius_interpolate(&f.project(&nu).unwrap())
        );

        let shift = [true, false, true];
        assert_eq!(
            p.xor_shift(&shift).unwrap(),
            mobius_interpolate(&f.xor_shift(&shift).unwrap())
        );
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let p = Polynomial::from_terms(
            3,
            [
                (0u64, ratio(-7, 3)),
                (0b101, ratio(22, 7)),
                (0b111, rat(4)),
            ],
        )
        .unwrap();
        let text = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }

    proptest::proptest! {
        #[test]
        fn multiply_commutative_associative_distributive(
            seed in 0u64..500,
        ) {
            let mk = |s: u64| {
                let mut rng = crate::seed::rng(s);
                use rand_core::RngCore;
                let terms: Vec<(u64, BigRational)> = (0..(rng.next_u64() % 6 + 1))
                    .map(|_| {
                        let mask = rng.next_u64() % 16;
                        let num = (rng.next_u64() % 11) as i64 - 5;
                        let den = (rng.next_u64() % 4) as i64 + 1;
                        (mask, ratio(num, den))
                    })
                    .collect();
                Polynomial::from_terms(4, terms).unwrap()
            };
            let a = mk(seed);
            let b = mk(seed.wrapping_add(1_000_000));
            let c = mk(seed.wrapping_add(2_000_000));
            proptest::prop_assert_eq!(a.multiply(&b).unwrap(), b.multiply(&a).unwrap());
            proptest::prop_assert_eq!(
                a.multiply(&b).unwrap().multiply(&c).unwrap(),
                a.multiply(&b.multiply(&c).unwrap()).unwrap()
            );
            proptest::prop_assert_eq!(
                a.multiply(&b.add(&c).unwrap()).unwrap(),
                a.multiply(&b).unwrap().add(&a.multiply(&c).unwrap()).unwrap()
            );
        }

        #[test]
        fn compose_degree_bound(seed in 0u64..200) {
            let mut rng = crate::seed::rng(seed);
            use rand_core::RngCore;
            let mut random_fn = |rng: &mut rand_chacha::ChaCha8Rng| {
                let bits: Vec<bool> = (0..8).map(|_| rng.next_u64() % 2 == 1).collect();
                BooleanFunction::from_bits(3, &bits).unwrap()
            };
            let outer = mobius_interpolate(&random_fn(&mut rng));
            let inners: Vec<Polynomial> = (0..3)
                .map(|_| mobius_interpolate(&random_fn(&mut rng)))
                .collect();
            let composed = compose(&outer, &inners).unwrap();
            let bound = outer.degree() * inners.iter().map(|p| p.degree()).max().unwrap_or(0);
            proptest::prop_assert!(composed.degree() <= bound.max(0));
            // pointwise agreement on the cube
            for k in 0..8u64 {
                let vals: Vec<BigRational> = inners.iter().map(|p| p.evaluate_mask(k)).collect();
                proptest::prop_assert_eq!(
                    composed.evaluate_mask(k),
                    outer.evaluate(&vals).unwrap()
                );
            }
        }
    }
}
