//! Cyclic words over the arrow alphabet and their exact combinatorics.
//!
//! A word encodes the dynamics around a planar fixed point as a cyclic
//! sequence of arrows, alternating horizontal and vertical. Everything here
//! is integer arithmetic: partial indices are counted in quarter turns, so
//! the identity `index = IP_c + 1` holds without any floating point.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One arrow letter. Declaration order fixes the canonical letter order
/// `↑ < → < ↓ < ←` used for rotation canonicalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    Up,
    Right,
    Down,
    Left,
}

impl Letter {
    pub fn is_vertical(self) -> bool {
        matches!(self, Letter::Up | Letter::Down)
    }

    pub fn is_horizontal(self) -> bool {
        !self.is_vertical()
    }

    /// Reverse the arrow (models running time backwards).
    pub fn flipped(self) -> Self {
        match self {
            Letter::Up => Letter::Down,
            Letter::Down => Letter::Up,
            Letter::Left => Letter::Right,
            Letter::Right => Letter::Left,
        }
    }

    /// Direction of the arrow in counterclockwise quarter turns from →.
    fn dir(self) -> i64 {
        match self {
            Letter::Right => 0,
            Letter::Up => 1,
            Letter::Left => 2,
            Letter::Down => 3,
        }
    }

    pub fn ascii(self) -> char {
        match self {
            Letter::Up => 'U',
            Letter::Right => 'R',
            Letter::Down => 'D',
            Letter::Left => 'L',
        }
    }

    pub fn arrow(self) -> char {
        match self {
            Letter::Up => '↑',
            Letter::Right => '→',
            Letter::Down => '↓',
            Letter::Left => '←',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'U' | 'u' | '↑' => Some(Letter::Up),
            'R' | 'r' | '→' => Some(Letter::Right),
            'D' | 'd' | '↓' => Some(Letter::Down),
            'L' | 'l' | '←' => Some(Letter::Left),
            _ => None,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.arrow())
    }
}

/// Where an orbit limit sits: the fixed point or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Endpoint {
    Zero,
    Infinity,
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Zero => write!(f, "0"),
            Endpoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Alpha limit of a vertical arrow: ↑ comes from infinity, ↓ from the fixed point.
pub fn alpha_of(letter: Letter) -> Option<Endpoint> {
    match letter {
        Letter::Up => Some(Endpoint::Infinity),
        Letter::Down => Some(Endpoint::Zero),
        _ => None,
    }
}

/// Omega limit of a vertical arrow: ↑ lands on the fixed point, ↓ on infinity.
pub fn omega_of(letter: Letter) -> Option<Endpoint> {
    match letter {
        Letter::Up => Some(Endpoint::Zero),
        Letter::Down => Some(Endpoint::Infinity),
        _ => None,
    }
}

/// Exact rational with denominator dividing 4, stored as a count of quarter
/// turns. Sums of partial indices stay in this type; no floats anywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Quarter(i64);

impl Quarter {
    pub const ZERO: Quarter = Quarter(0);

    pub fn from_quarters(q: i64) -> Self {
        Quarter(q)
    }

    pub fn quarters(self) -> i64 {
        self.0
    }

    /// Value in turns, as a float (display / reports only).
    pub fn turns(self) -> f64 {
        self.0 as f64 / 4.0
    }

    /// Whole number of turns, if the value is an integer.
    pub fn whole_turns(self) -> Option<i64> {
        (self.0 % 4 == 0).then_some(self.0 / 4)
    }

    /// Reduced fraction (numerator, denominator) in turns.
    pub fn fraction(self) -> (i64, i64) {
        let mut num = self.0;
        let mut den = 4i64;
        while num % 2 == 0 && den > 1 {
            num /= 2;
            den /= 2;
        }
        (num, den)
    }
}

impl std::ops::Add for Quarter {
    type Output = Quarter;
    fn add(self, rhs: Quarter) -> Quarter {
        Quarter(self.0 + rhs.0)
    }
}

impl std::ops::AddAssign for Quarter {
    fn add_assign(&mut self, rhs: Quarter) {
        self.0 += rhs.0;
    }
}

impl std::ops::Neg for Quarter {
    type Output = Quarter;
    fn neg(self) -> Quarter {
        Quarter(-self.0)
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (num, den) = self.fraction();
        if den == 1 {
            write!(f, "{num}")
        } else {
            write!(f, "{num}/{den}")
        }
    }
}

/// Sector classification by the partial index of its three-letter window:
/// -1/2 hyperbolic, +1/2 elliptic, 0 indifferent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SectorType {
    Hyperbolic,
    Elliptic,
    Indifferent,
}

impl SectorType {
    pub fn from_window_ip(ip: Quarter) -> Result<Self, WordError> {
        match ip.quarters() {
            -2 => Ok(SectorType::Hyperbolic),
            2 => Ok(SectorType::Elliptic),
            0 => Ok(SectorType::Indifferent),
            _ => Err(WordError::NotAlternating),
        }
    }

    pub fn short(self) -> char {
        match self {
            SectorType::Hyperbolic => 'H',
            SectorType::Elliptic => 'E',
            SectorType::Indifferent => 'I',
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("word is empty")]
    Empty,
    #[error("cyclic word length {0} is odd; words have length 2d")]
    OddLength(usize),
    #[error("unexpected character {found:?} at column {column}")]
    Parse { column: usize, found: char },
    #[error("letters do not alternate horizontal/vertical")]
    NotAlternating,
    #[error("word is not allowed (letters must alternate horizontal/vertical)")]
    NotAllowed,
    #[error("expected a vertical-horizontal-vertical window, got {0}")]
    BadWindow(String),
    #[error("path too short: need at least 2 letters")]
    PathTooShort,
}

/// A cyclic word, stored as its canonical indexation: the lexicographically
/// minimal rotation (letter order ↑<→<↓<←) among rotations starting on a
/// vertical letter, when one exists. Equality is therefore rotation-invariant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CyclicWord {
    letters: Vec<Letter>,
}

impl CyclicWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        if letters.is_empty() {
            return Err(WordError::Empty);
        }
        if !letters.len().is_multiple_of(2) {
            return Err(WordError::OddLength(letters.len()));
        }
        Ok(CyclicWord {
            letters: canonical_rotation(&letters),
        })
    }

    /// Parse the word grammar: a string over {U,D,L,R,↑,↓,←,→}, ASCII
    /// case-insensitive, read left-to-right as the counterclockwise cycle.
    pub fn parse(input: &str) -> Result<Self, WordError> {
        let mut letters = Vec::new();
        for (i, c) in input.chars().enumerate() {
            match Letter::from_char(c) {
                Some(l) => letters.push(l),
                None => {
                    return Err(WordError::Parse {
                        column: i + 1,
                        found: c,
                    })
                }
            }
        }
        CyclicWord::new(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Half length; for allowed words this is the sector count d.
    pub fn half_len(&self) -> usize {
        self.letters.len() / 2
    }

    pub fn is_allowed(&self) -> bool {
        self.letters
            .iter()
            .zip(self.letters.iter().cycle().skip(1))
            .all(|(a, b)| a.is_vertical() != b.is_vertical())
    }

    pub fn ascii(&self) -> String {
        self.letters.iter().map(|l| l.ascii()).collect()
    }

    pub fn arrows(&self) -> String {
        self.letters.iter().map(|l| l.arrow()).collect()
    }

    /// Letter at a cyclic position of the canonical indexation.
    pub fn letter(&self, i: usize) -> Letter {
        self.letters[i % self.letters.len()]
    }

    /// The word of the inverse dynamics: reading order and every arrow reversed.
    pub fn inverse_word(&self) -> CyclicWord {
        let letters: Vec<Letter> = self.letters.iter().rev().map(|l| l.flipped()).collect();
        CyclicWord::new(letters).expect("inverse of a valid word is valid")
    }

    /// The d vertical-anchored windows (m_{2k-1}, m_{2k}, m_{2k+1}) of an
    /// allowed word, in cyclic order. The canonical indexation starts on a
    /// vertical letter, so windows sit at even positions.
    pub fn sector_windows(&self) -> Result<Vec<[Letter; 3]>, WordError> {
        if !self.is_allowed() {
            return Err(WordError::NotAllowed);
        }
        let n = self.len();
        debug_assert!(self.letters[0].is_vertical());
        Ok((0..self.half_len())
            .map(|k| {
                [
                    self.letter(2 * k),
                    self.letter(2 * k + 1),
                    self.letter((2 * k + 2) % n),
                ]
            })
            .collect())
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.arrows())
    }
}

impl Serialize for CyclicWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.ascii())
    }
}

impl<'de> Deserialize<'de> for CyclicWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CyclicWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

fn canonical_rotation(letters: &[Letter]) -> Vec<Letter> {
    let n = letters.len();
    let rotation = |start: usize| -> Vec<Letter> {
        (0..n).map(|i| letters[(start + i) % n]).collect()
    };
    let starts: Vec<usize> = if letters.iter().any(|l| l.is_vertical()) {
        (0..n).filter(|&i| letters[i].is_vertical()).collect()
    } else {
        (0..n).collect()
    };
    starts
        .into_iter()
        .map(rotation)
        .min()
        .expect("nonempty word has a rotation")
}

/// Partial index of an adjacent pair: the shortest signed rotation from `a`
/// to `b`, in turns. Perpendicular arrows give ±1/4; same-class pairs are
/// rejected.
pub fn ip_pair(a: Letter, b: Letter) -> Result<Quarter, WordError> {
    match (b.dir() - a.dir()).rem_euclid(4) {
        1 => Ok(Quarter::from_quarters(1)),
        3 => Ok(Quarter::from_quarters(-1)),
        _ => Err(WordError::NotAlternating),
    }
}

/// Partial index of an alternating (non-cyclic) path: sum of pairwise IPs.
pub fn ip_path(letters: &[Letter]) -> Result<Quarter, WordError> {
    if letters.len() < 2 {
        return Err(WordError::PathTooShort);
    }
    let mut total = Quarter::ZERO;
    for pair in letters.windows(2) {
        total += ip_pair(pair[0], pair[1])?;
    }
    Ok(total)
}

/// Cyclic partial index: one indexation closed up with its first letter.
/// Rotation invariance is automatic (the sum runs over all cyclic pairs).
pub fn ip_cyclic(word: &CyclicWord) -> Result<Quarter, WordError> {
    if !word.is_allowed() {
        return Err(WordError::NotAllowed);
    }
    let mut total = Quarter::ZERO;
    let n = word.len();
    for i in 0..n {
        total += ip_pair(word.letter(i), word.letter(i + 1))?;
    }
    debug_assert!(
        total.quarters() % 4 == 0,
        "cyclic partial index of an allowed word is a whole number of turns"
    );
    Ok(total)
}

/// Symbolic index of an allowed cyclic word: IP_c + 1, always an integer.
pub fn symbolic_index(word: &CyclicWord) -> Result<i64, WordError> {
    let ip = ip_cyclic(word)?;
    let turns = ip
        .whole_turns()
        .expect("allowed word has integer cyclic partial index");
    Ok(turns + 1)
}

/// Alpha and omega limits read off a vertical-horizontal-vertical window.
pub fn alpha_omega(window: &[Letter; 3]) -> Result<(Endpoint, Endpoint), WordError> {
    let [before, middle, after] = *window;
    if !before.is_vertical() || !middle.is_horizontal() || !after.is_vertical() {
        return Err(WordError::BadWindow(
            window.iter().map(|l| l.arrow()).collect(),
        ));
    }
    let (alpha_src, omega_src) = match middle {
        Letter::Right => (before, after),
        Letter::Left => (after, before),
        _ => unreachable!(),
    };
    Ok((
        alpha_of(alpha_src).expect("vertical letter"),
        omega_of(omega_src).expect("vertical letter"),
    ))
}

/// Sector types of an allowed word, one per vertical-anchored window.
pub fn sector_types(word: &CyclicWord) -> Result<Vec<SectorType>, WordError> {
    word.sector_windows()?
        .iter()
        .map(|w| SectorType::from_window_ip(ip_path(w)?))
        .collect()
}

/// The four petal patterns readable on horizontal-anchored windows.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PetalKind {
    AttractiveAtZero,
    RepulsiveAtZero,
    RepulsiveAtInfinity,
    AttractiveAtInfinity,
}

impl PetalKind {
    fn from_window(window: [Letter; 3]) -> Option<Self> {
        use Letter::*;
        match window {
            [Right, Up, Left] => Some(PetalKind::AttractiveAtZero),
            [Left, Down, Right] => Some(PetalKind::RepulsiveAtZero),
            [Right, Down, Left] => Some(PetalKind::RepulsiveAtInfinity),
            [Left, Up, Right] => Some(PetalKind::AttractiveAtInfinity),
            _ => None,
        }
    }

    pub fn pattern(self) -> &'static str {
        match self {
            PetalKind::AttractiveAtZero => "→↑←",
            PetalKind::RepulsiveAtZero => "←↓→",
            PetalKind::RepulsiveAtInfinity => "→↓←",
            PetalKind::AttractiveAtInfinity => "←↑→",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Petal {
    /// Index of the horizontal letter opening the pattern, in the canonical
    /// indexation.
    pub position: usize,
    pub kind: PetalKind,
}

/// Scan the horizontal-anchored windows for petal patterns.
pub fn detect_petals(word: &CyclicWord) -> Result<Vec<Petal>, WordError> {
    if !word.is_allowed() {
        return Err(WordError::NotAllowed);
    }
    let n = word.len();
    let mut petals = Vec::new();
    for k in 0..word.half_len() {
        let pos = 2 * k + 1;
        let window = [word.letter(pos), word.letter(pos + 1), word.letter(pos + 2)];
        if let Some(kind) = PetalKind::from_window(window) {
            petals.push(Petal {
                position: pos % n,
                kind,
            });
        }
    }
    Ok(petals)
}

/// The four pair patterns a conservative word must avoid (the +1/4 pairs).
const CONSERVATIVE_FORBIDDEN: [[Letter; 2]; 4] = [
    [Letter::Up, Letter::Left],
    [Letter::Right, Letter::Up],
    [Letter::Down, Letter::Right],
    [Letter::Left, Letter::Down],
];

/// True iff the word is (↑→↓←) repeated, equivalently iff it avoids the four
/// positive pairs, equivalently iff every sector is hyperbolic.
pub fn is_conservative_word(word: &CyclicWord) -> Result<bool, WordError> {
    if !word.is_allowed() {
        return Err(WordError::NotAllowed);
    }
    let n = word.len();
    Ok((0..n).all(|i| {
        let pair = [word.letter(i), word.letter(i + 1)];
        !CONSERVATIVE_FORBIDDEN.contains(&pair)
    }))
}

/// Lower bound on the module from the index: 2·|index − 1|.
pub fn module_lower_bound(index: i64) -> u32 {
    (2 * (index - 1).abs()) as u32
}

/// All allowed cyclic words of length 2d, one canonical representative per
/// rotation class, sorted. The raw count before dedup is 4^d.
pub fn enumerate_allowed(d: usize) -> Vec<CyclicWord> {
    assert!(d >= 1, "need d >= 1");
    let verticals = [Letter::Up, Letter::Down];
    let horizontals = [Letter::Right, Letter::Left];
    let mut out = Vec::new();
    for mask in 0..(1u64 << (2 * d)) {
        let mut letters = Vec::with_capacity(2 * d);
        for k in 0..d {
            letters.push(verticals[((mask >> (2 * k)) & 1) as usize]);
            letters.push(horizontals[((mask >> (2 * k + 1)) & 1) as usize]);
        }
        out.push(CyclicWord::new(letters).expect("even length"));
    }
    out.sort();
    out.dedup();
    out
}
