//! Boolean functions on two bits and their phase-oracle encodings.

use std::cell::Cell;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qmat::{Mat4, ALGEBRA_TOL};

/// A function `{0,1}² → {0,1}` stored as a truth table.
///
/// Bit `i` of the packed value is `f(x_i)` with inputs in basis order
/// `00, 01, 10, 11`. The text form is the binary literal of that value, so
/// `"0b0001"` is the function that is one only on input `00`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct BoolFn2(u8);

impl BoolFn2 {
    pub fn from_bits(bits: u8) -> Result<Self> {
        if bits < 16 {
            Ok(BoolFn2(bits))
        } else {
            Err(Error::BadTruthTable(format!("{bits}")))
        }
    }

    /// Builds the function from its outputs on `00, 01, 10, 11`.
    pub fn from_outputs(outputs: [bool; 4]) -> Self {
        let bits = outputs
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &b)| acc | ((b as u8) << i));
        BoolFn2(bits)
    }

    pub fn bits(self) -> u8 {
        self.0
    }

    /// `f(x)` for basis index `x ∈ 0..4`.
    pub fn eval(self, input: usize) -> bool {
        assert!(input < 4, "two-bit input out of range: {input}");
        (self.0 >> input) & 1 == 1
    }

    pub fn outputs(self) -> [bool; 4] {
        std::array::from_fn(|i| self.eval(i))
    }

    /// All sixteen functions in packed-value order.
    pub fn all() -> impl Iterator<Item = BoolFn2> {
        (0..16u8).map(BoolFn2)
    }

    /// `(-1)^{f(x)}` for each input.
    pub fn phase_signs(self) -> [f64; 4] {
        self.outputs().map(|b| if b { -1.0 } else { 1.0 })
    }

    pub fn ones(self) -> u8 {
        self.0.count_ones() as u8
    }
}

impl From<BoolFn2> for u8 {
    fn from(f: BoolFn2) -> u8 {
        f.0
    }
}

impl TryFrom<u8> for BoolFn2 {
    type Error = Error;
    fn try_from(bits: u8) -> Result<Self> {
        BoolFn2::from_bits(bits)
    }
}

impl fmt::Display for BoolFn2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0b{:04b}", self.0)
    }
}

impl FromStr for BoolFn2 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s
            .trim()
            .strip_prefix("0b")
            .ok_or_else(|| Error::BadTruthTable(s.to_string()))?;
        if digits.len() != 4 || !digits.chars().all(|c| c == '0' || c == '1') {
            return Err(Error::BadTruthTable(s.to_string()));
        }
        let bits =
            u8::from_str_radix(digits, 2).map_err(|_| Error::BadTruthTable(s.to_string()))?;
        Ok(BoolFn2(bits))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        })
    }
}

/// Sub-class `[ones, zeros]` of a function's output column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubClass {
    pub ones: u8,
    pub zeros: u8,
}

impl fmt::Display for SubClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&format!("[{},{}]", self.ones, self.zeros))
    }
}

pub fn parity(f: BoolFn2) -> Parity {
    if f.ones().is_multiple_of(2) {
        Parity::Even
    } else {
        Parity::Odd
    }
}

pub fn subclass(f: BoolFn2) -> SubClass {
    let ones = f.ones();
    SubClass {
        ones,
        zeros: 4 - ones,
    }
}

/// Phase oracle `U_f = diag((-1)^{f(00)}, (-1)^{f(01)}, (-1)^{f(10)}, (-1)^{f(11)})`.
pub fn encode_uf(f: BoolFn2) -> Mat4 {
    Mat4::from_real_diag(f.phase_signs())
}

/// Reads the ±1 diagonal of `u`, or fails if `u` is not of that form.
pub fn pm_one_diagonal(u: &Mat4) -> Result<[i8; 4]> {
    if !u.is_diagonal(ALGEBRA_TOL) {
        return Err(Error::NotDiagonalPmOne);
    }
    let mut out = [0i8; 4];
    for (i, d) in u.diagonal().iter().enumerate() {
        if d.im.abs() > ALGEBRA_TOL {
            return Err(Error::NotDiagonalPmOne);
        }
        out[i] = if (d.re - 1.0).abs() <= ALGEBRA_TOL {
            1
        } else if (d.re + 1.0).abs() <= ALGEBRA_TOL {
            -1
        } else {
            return Err(Error::NotDiagonalPmOne);
        };
    }
    Ok(out)
}

/// Whether a diagonal ±1 unitary factors as `A ⊗ B` up to a global phase.
///
/// A diagonal product `A ⊗ B` has entries `a_i b_j`, so the reshaped 2×2
/// table `[[d00, d01], [d10, d11]]` must have rank one.
pub fn is_separable(u: &Mat4) -> Result<bool> {
    let d = pm_one_diagonal(u)?;
    Ok(d[0] * d[3] == d[1] * d[2])
}

/// One of the sixteen standard oracles `U1 … U16`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UfCatalogEntry {
    pub index: u8,
    pub diagonal: [i8; 4],
    pub parity: Parity,
}

impl UfCatalogEntry {
    pub fn matrix(&self) -> Mat4 {
        Mat4::from_real_diag(self.diagonal.map(f64::from))
    }

    /// The function whose `encode_uf` is exactly this diagonal.
    pub fn function(&self) -> BoolFn2 {
        BoolFn2::from_outputs(self.diagonal.map(|d| d < 0))
    }
}

const EVEN_BASE: [[i8; 4]; 4] = [[1, 1, 1, 1], [1, 1, -1, -1], [1, -1, 1, -1], [1, -1, -1, 1]];
const ODD_BASE: [[i8; 4]; 4] = [
    [1, -1, -1, -1],
    [-1, 1, -1, -1],
    [-1, -1, 1, -1],
    [-1, -1, -1, 1],
];

/// `U1–U4` even, `U5–U8 = -U1…-U4`, `U9–U12` odd, `U13–U16 = -U9…-U12`.
pub fn catalog() -> Vec<UfCatalogEntry> {
    let neg = |d: [i8; 4]| d.map(|x| -x);
    let mut out = Vec::with_capacity(16);
    for (base, parity, offset) in [(EVEN_BASE, Parity::Even, 0u8), (ODD_BASE, Parity::Odd, 8)] {
        for (i, d) in base.iter().enumerate() {
            out.push(UfCatalogEntry {
                index: offset + i as u8 + 1,
                diagonal: *d,
                parity,
            });
        }
        for (i, d) in base.iter().enumerate() {
            out.push(UfCatalogEntry {
                index: offset + i as u8 + 5,
                diagonal: neg(*d),
                parity,
            });
        }
    }
    out
}

pub fn catalog_entry(index: u8) -> Option<UfCatalogEntry> {
    catalog().into_iter().find(|e| e.index == index)
}

/// Catalog entry whose diagonal equals `encode_uf(f)`.
pub fn catalog_entry_for(f: BoolFn2) -> UfCatalogEntry {
    let signs = f.phase_signs().map(|s| s as i8);
    catalog()
        .into_iter()
        .find(|e| e.diagonal == signs)
        .expect("catalog covers all sixteen sign patterns")
}

/// Classical oracle that counts how often it is queried.
#[derive(Debug)]
pub struct CountingFunction {
    f: BoolFn2,
    calls: Cell<usize>,
}

impl CountingFunction {
    pub fn new(f: BoolFn2) -> Self {
        CountingFunction {
            f,
            calls: Cell::new(0),
        }
    }

    pub fn call(&self, input: usize) -> bool {
        self.calls.set(self.calls.get() + 1);
        self.f.eval(input)
    }

    pub fn calls(&self) -> usize {
        self.calls.get()
    }
}

/// Exhaustive classical baseline: query every input, return parity and calls.
pub fn classical_classify(f: BoolFn2) -> (Parity, usize) {
    let oracle = CountingFunction::new(f);
    let ones = (0..4).filter(|&x| oracle.call(x)).count();
    let p = if ones % 2 == 0 {
        Parity::Even
    } else {
        Parity::Odd
    };
    (p, oracle.calls())
}
