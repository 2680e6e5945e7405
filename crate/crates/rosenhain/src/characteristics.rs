//! Half-integer theta characteristics `[ε′; ε]` and the branch-point
//! characteristics of the standard homology basis (cuts `[e_{2k-1}, e_{2k}]`,
//! `b_k` cycles closing on the lower sheet).

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest genus whose characteristics fit the bit representation.
pub const MAX_GENUS: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

/// Binary characteristic with entries reduced mod 2. Bit `i` of `top`/`bottom`
/// holds the entry with 1-based index `i + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    genus: usize,
    top: u32,
    bottom: u32,
}

fn check_genus(g: usize) -> Result<()> {
    if g == 0 || g > MAX_GENUS {
        return Err(Error::InvalidArgument(format!("genus {g} outside 1..={MAX_GENUS}")));
    }
    Ok(())
}

fn pack(bits: &[u8]) -> Result<u32> {
    bits.iter().enumerate().try_fold(0u32, |acc, (i, &b)| match b {
        0 => Ok(acc),
        1 => Ok(acc | (1 << i)),
        _ => Err(Error::InvalidCharacteristic(format!("entry {b} is not 0 or 1"))),
    })
}

impl Characteristic {
    pub fn new(top: &[u8], bottom: &[u8]) -> Result<Self> {
        if top.len() != bottom.len() {
            return Err(Error::InvalidCharacteristic(format!(
                "rows of length {} and {}",
                top.len(),
                bottom.len()
            )));
        }
        check_genus(top.len())?;
        Ok(Self {
            genus: top.len(),
            top: pack(top)?,
            bottom: pack(bottom)?,
        })
    }

    pub fn zero(genus: usize) -> Self {
        Self {
            genus,
            top: 0,
            bottom: 0,
        }
    }

    /// Builds from bit masks; bits at positions `>= genus` are discarded.
    pub fn from_bits(genus: usize, top: u32, bottom: u32) -> Self {
        let mask = if genus >= 32 { u32::MAX } else { (1u32 << genus) - 1 };
        Self {
            genus,
            top: top & mask,
            bottom: bottom & mask,
        }
    }

    /// All `4^g` characteristics, ordered by `(top, bottom)` bit masks.
    pub fn all(genus: usize) -> Vec<Self> {
        assert!(genus <= 8, "enumeration only for small genus");
        let n = 1u32 << genus;
        (0..n)
            .flat_map(|t| (0..n).map(move |b| Self::from_bits(genus, t, b)))
            .collect()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn top_bits(&self) -> u32 {
        self.top
    }

    pub fn bottom_bits(&self) -> u32 {
        self.bottom
    }

    pub fn top(&self) -> Vec<u8> {
        (0..self.genus).map(|i| ((self.top >> i) & 1) as u8).collect()
    }

    pub fn bottom(&self) -> Vec<u8> {
        (0..self.genus).map(|i| ((self.bottom >> i) & 1) as u8).collect()
    }

    pub fn parity(&self) -> Parity {
        if (self.top & self.bottom).count_ones() % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_odd(&self) -> bool {
        self.parity() == Parity::Odd
    }

    pub fn is_even(&self) -> bool {
        self.parity() == Parity::Even
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::GenusMismatch {
                expected: self.genus,
                found: other.genus,
            });
        }
        Ok(self + other)
    }
}

impl Add for Characteristic {
    type Output = Characteristic;

    /// Entrywise addition mod 2. Panics on mixed genera.
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.genus, rhs.genus, "characteristics of different genus");
        Self {
            genus: self.genus,
            top: self.top ^ rhs.top,
            bottom: self.bottom ^ rhs.bottom,
        }
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let row = |v: Vec<u8>| v.iter().map(|b| char::from(b'0' + b)).collect::<String>();
        write!(f, "[{};{}]", row(self.top()), row(self.bottom()))
    }
}

impl FromStr for Characteristic {
    type Err = Error;

    /// Parses `"[ε′₁…ε′_g;ε₁…ε_g]"`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidCharacteristic(format!("cannot parse {s:?}"));
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(bad)?;
        let (a, b) = inner.split_once(';').ok_or_else(bad)?;
        let digits = |r: &str| -> Result<Vec<u8>> {
            r.chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(bad()),
                })
                .collect()
        };
        Characteristic::new(&digits(a)?, &digits(b)?)
    }
}

/// Characteristic with unreduced integer entries. Theta with such a
/// characteristic differs from the reduced one only by a sign:
/// `θ[ε′+2m′; ε+2m] = (-1)^{(ε′+2m′)·m} θ[ε′; ε]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntCharacteristic {
    pub top: Vec<i64>,
    pub bottom: Vec<i64>,
}

impl IntCharacteristic {
    pub fn zero(genus: usize) -> Self {
        Self {
            top: vec![0; genus],
            bottom: vec![0; genus],
        }
    }

    pub fn from_reduced(c: &Characteristic) -> Self {
        Self {
            top: c.top().into_iter().map(i64::from).collect(),
            bottom: c.bottom().into_iter().map(i64::from).collect(),
        }
    }

    pub fn genus(&self) -> usize {
        self.top.len()
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self {
            top: self.top.iter().zip(&other.top).map(|(a, b)| a + b).collect(),
            bottom: self.bottom.iter().zip(&other.bottom).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self {
            top: self.top.iter().zip(&other.top).map(|(a, b)| a - b).collect(),
            bottom: self.bottom.iter().zip(&other.bottom).map(|(a, b)| a - b).collect(),
        }
    }

    /// Reduced characteristic and the sign relating the two theta functions.
    pub fn reduce(&self) -> (Characteristic, i8) {
        let g = self.genus();
        let top: Vec<u8> = self.top.iter().map(|x| x.rem_euclid(2) as u8).collect();
        let bottom: Vec<u8> = self.bottom.iter().map(|x| x.rem_euclid(2) as u8).collect();
        let exponent: i64 = self
            .top
            .iter()
            .zip(&self.bottom)
            .map(|(&t, &b)| t * b.div_euclid(2))
            .sum();
        let c = Characteristic::new(&top, &bottom)
            .unwrap_or_else(|_| Characteristic::zero(g));
        (c, if exponent.rem_euclid(2) == 0 { 1 } else { -1 })
    }
}

fn check_index(g: usize, j: usize) -> Result<()> {
    if j == 0 || j > 2 * g + 2 {
        return Err(Error::IndexOutOfRange {
            index: j,
            max: 2 * g + 2,
        });
    }
    Ok(())
}

/// `[𝔄_j]`, the characteristic of the Abel image of branch point `e_j`
/// (`j = 2g+2` is the base point at infinity).
pub fn branch_characteristic(g: usize, j: usize) -> Result<Characteristic> {
    check_genus(g)?;
    check_index(g, j)?;
    let ones = |k: usize| if k == 0 { 0 } else { (1u32 << k) - 1 };
    Ok(if j == 2 * g + 2 {
        Characteristic::zero(g)
    } else if j == 2 * g + 1 {
        Characteristic::from_bits(g, 0, ones(g))
    } else {
        let k = j.div_ceil(2);
        let bottom = if j % 2 == 1 { ones(k - 1) } else { ones(k) };
        Characteristic::from_bits(g, 1 << (k - 1), bottom)
    })
}

/// All `2g+2` branch characteristics in index order.
pub fn branch_characteristics(g: usize) -> Result<Vec<Characteristic>> {
    (1..=2 * g + 2).map(|j| branch_characteristic(g, j)).collect()
}

/// `[K∞]`, the sum of the `g` odd branch characteristics.
pub fn riemann_constant(g: usize) -> Result<Characteristic> {
    Ok(branch_characteristics(g)?
        .into_iter()
        .filter(Characteristic::is_odd)
        .fold(Characteristic::zero(g), |a, b| a + b))
}

/// `[ε(S)] = Σ_{k∈S}[𝔄_k] + [K∞]` mod 2.
pub fn partition_characteristic(g: usize, set: &[usize]) -> Result<Characteristic> {
    let mut c = riemann_constant(g)?;
    for &k in set {
        c = c + branch_characteristic(g, k)?;
    }
    Ok(c)
}

/// `Σ_{k∈S}[𝔄_k] − [K∞]` kept as an integer characteristic (no reduction).
pub fn lifted_partition_characteristic(g: usize, set: &[usize]) -> Result<IntCharacteristic> {
    let mut c = IntCharacteristic::zero(g).minus(&IntCharacteristic::from_reduced(&riemann_constant(g)?));
    for &k in set {
        c = c.plus(&IntCharacteristic::from_reduced(&branch_characteristic(g, k)?));
    }
    Ok(c)
}

/// Azygetic test: the sign `(-1)^{Σ ε_i′·ε_i + (Σε_i′)·(Σε_i)}` equals −1.
pub fn is_azygetic(c1: &Characteristic, c2: &Characteristic, c3: &Characteristic) -> Result<bool> {
    c1.checked_add(*c2)?;
    c1.checked_add(*c3)?;
    let dot = |a: u32, b: u32| (a & b).count_ones();
    let e = dot(c1.top, c1.bottom)
        + dot(c2.top, c2.bottom)
        + dot(c3.top, c3.bottom)
        + dot(c1.top ^ c2.top ^ c3.top, c1.bottom ^ c2.bottom ^ c3.bottom);
    Ok(e % 2 == 1)
}

/// `g` odd characteristics followed by `g+2` even ones, every triple azygetic.
pub fn is_special_fundamental_system(seq: &[Characteristic]) -> Result<bool> {
    let g = seq.first().map_or(0, |c| c.genus);
    if g == 0 || seq.len() != 2 * g + 2 {
        return Err(Error::InvalidArgument(format!(
            "a fundamental system of genus {g} has {} members, got {}",
            2 * g + 2,
            seq.len()
        )));
    }
    if seq.iter().any(|c| c.genus != g) {
        return Err(Error::GenusMismatch {
            expected: g,
            found: seq.iter().find(|c| c.genus != g).unwrap().genus,
        });
    }
    if !seq[..g].iter().all(Characteristic::is_odd) || !seq[g..].iter().all(Characteristic::is_even) {
        return Ok(false);
    }
    for a in 0..seq.len() {
        for b in a + 1..seq.len() {
            for c in b + 1..seq.len() {
                if !is_azygetic(&seq[a], &seq[b], &seq[c])? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Branch characteristics reordered with the odd ones first (stable).
pub fn odd_first(seq: &[Characteristic]) -> Vec<Characteristic> {
    let mut out: Vec<_> = seq.iter().copied().filter(Characteristic::is_odd).collect();
    out.extend(seq.iter().copied().filter(Characteristic::is_even));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(s: &str) -> Characteristic {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display_round_trip() {
        for c in Characteristic::all(3) {
            assert_eq!(c.to_string().parse::<Characteristic>().unwrap(), c);
        }
        assert_eq!(ch("[10;01]").top(), vec![1, 0]);
        assert_eq!(ch("[10;01]").bottom(), vec![0, 1]);
        assert!("[10;0]".parse::<Characteristic>().is_err());
        assert!("[12;00]".parse::<Characteristic>().is_err());
    }

    #[test]
    fn branch_examples() {
        assert_eq!(branch_characteristic(2, 1).unwrap(), ch("[10;00]"));
        assert_eq!(branch_characteristic(2, 4).unwrap(), ch("[01;11]"));
        assert_eq!(branch_characteristic(2, 6).unwrap(), ch("[00;00]"));
        assert_eq!(branch_characteristic(3, 5).unwrap(), ch("[001;110]"));
        assert_eq!(branch_characteristic(3, 7).unwrap(), ch("[000;111]"));
        assert!(branch_characteristic(2, 7).is_err());
        assert!(branch_characteristic(2, 0).is_err());
    }

    #[test]
    fn riemann_constant_examples() {
        assert_eq!(riemann_constant(2).unwrap(), ch("[11;01]"));
        assert_eq!(riemann_constant(3).unwrap(), ch("[111;101]"));
        let a2 = branch_characteristic(2, 2).unwrap();
        let a4 = branch_characteristic(2, 4).unwrap();
        assert_eq!(riemann_constant(2).unwrap(), a2 + a4);
        assert!(riemann_constant(2).unwrap().is_odd());
    }

    #[test]
    fn partition_examples() {
        assert_eq!(partition_characteristic(2, &[2, 4]).unwrap(), ch("[00;00]"));
        assert_eq!(partition_characteristic(2, &[2]).unwrap(), ch("[01;11]"));
        assert_eq!(partition_characteristic(2, &[]).unwrap(), riemann_constant(2).unwrap());
    }

    #[test]
    fn parity_counts() {
        for g in 1..=6 {
            let n = 1usize << (2 * g);
            let two_g = 1usize << g;
            let even = Characteristic::all(g).iter().filter(|c| c.is_even()).count();
            assert_eq!(even, (n + two_g) / 2);
            assert_eq!(n - even, (n - two_g) / 2);
        }
    }

    #[test]
    fn azygetic_examples() {
        let z = Characteristic::zero(2);
        assert!(!is_azygetic(&z, &z, &z).unwrap());
        let b = branch_characteristics(2).unwrap();
        assert!(is_azygetic(&b[0], &b[2], &b[5]).unwrap());
        assert!(is_azygetic(&z, &Characteristic::zero(3), &z).is_err());
    }

    #[test]
    fn lifted_reduction_sign() {
        // θ[-1;-1] = -θ[1;1] in genus one
        let c = IntCharacteristic {
            top: vec![-1],
            bottom: vec![-1],
        };
        assert_eq!(c.reduce(), (ch("[1;1]"), -1));
        let c = IntCharacteristic {
            top: vec![2],
            bottom: vec![3],
        };
        assert_eq!(c.reduce(), (ch("[0;1]"), 1));
        let lifted = lifted_partition_characteristic(2, &[2, 3]).unwrap();
        assert_eq!(lifted.reduce().0, partition_characteristic(2, &[2, 3]).unwrap());
    }

    #[test]
    fn special_system_rejects_wrong_order() {
        let seq = odd_first(&branch_characteristics(2).unwrap());
        assert!(is_special_fundamental_system(&seq).unwrap());
        let mut moved = seq.clone();
        let last = moved.pop().unwrap();
        moved.insert(0, last);
        assert!(!is_special_fundamental_system(&moved).unwrap());
        assert!(is_special_fundamental_system(&seq[..5]).is_err());
    }
}
