use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::{Error, Result};

/// One of the twelve scale degrees. Lowercase letters in the textual form
/// are komal (flat) degrees, `M` is tivra (sharp) Ma.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Degree {
    Sa,
    KomalRe,
    Re,
    KomalGa,
    Ga,
    Ma,
    TivraMa,
    Pa,
    KomalDha,
    Dha,
    KomalNi,
    Ni,
}

impl Degree {
    pub const ALL: [Degree; 12] = [
        Degree::Sa,
        Degree::KomalRe,
        Degree::Re,
        Degree::KomalGa,
        Degree::Ga,
        Degree::Ma,
        Degree::TivraMa,
        Degree::Pa,
        Degree::KomalDha,
        Degree::Dha,
        Degree::KomalNi,
        Degree::Ni,
    ];

    /// Semitones above Sa in the equal-tempered grid.
    pub fn semitone(self) -> u8 {
        self as u8
    }

    pub fn symbol(self) -> char {
        match self {
            Degree::Sa => 'S',
            Degree::KomalRe => 'r',
            Degree::Re => 'R',
            Degree::KomalGa => 'g',
            Degree::Ga => 'G',
            Degree::Ma => 'm',
            Degree::TivraMa => 'M',
            Degree::Pa => 'P',
            Degree::KomalDha => 'd',
            Degree::Dha => 'D',
            Degree::KomalNi => 'n',
            Degree::Ni => 'N',
        }
    }

    pub fn from_symbol(c: char) -> Option<Degree> {
        Degree::ALL.into_iter().find(|d| d.symbol() == c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Octave {
    Mandra = -1,
    Madhya = 0,
    Taar = 1,
}

impl Octave {
    pub fn offset(self) -> i32 {
        self as i32
    }

    pub fn from_offset(k: i32) -> Option<Octave> {
        match k {
            -1 => Some(Octave::Mandra),
            0 => Some(Octave::Madhya),
            1 => Some(Octave::Taar),
            _ => None,
        }
    }
}

/// A swar at a specific octave.
///
/// Ordering follows pitch: octave first, then degree. The textual form is
/// the degree letter with a `.` prefix for mandra and a `'` suffix for taar,
/// e.g. `.n`, `S`, `S'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SwarSymbol {
    pub octave: Octave,
    pub degree: Degree,
}

impl SwarSymbol {
    pub const fn new(degree: Degree, octave: Octave) -> Self {
        SwarSymbol { octave, degree }
    }

    pub const fn madhya(degree: Degree) -> Self {
        SwarSymbol::new(degree, Octave::Madhya)
    }

    /// Equal-tempered position relative to madhya Sa.
    pub fn semitones(self) -> i32 {
        self.octave.offset() * 12 + i32::from(self.degree.semitone())
    }
}

impl fmt::Display for SwarSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.octave {
            Octave::Mandra => write!(f, ".{}", self.degree.symbol()),
            Octave::Madhya => write!(f, "{}", self.degree.symbol()),
            Octave::Taar => write!(f, "{}'", self.degree.symbol()),
        }
    }
}

impl FromStr for SwarSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let symbols = parse_swar_string(s)?;
        match symbols.as_slice() {
            [one] => Ok(*one),
            _ => Err(Error::Domain(alloc::format!("expected a single swar token, got {s:?}"))),
        }
    }
}

/// Parses a run of concatenated swar tokens such as `.nSR'` into symbols.
///
/// The empty string yields an empty list.
pub fn parse_swar_string(s: &str) -> Result<Vec<SwarSymbol>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(c) = chars.next() {
        let (octave, letter) = if c == '.' {
            match chars.next() {
                Some(l) => (Octave::Mandra, l),
                None => return Err(Error::Domain(alloc::format!("dangling '.' in {s:?}"))),
            }
        } else {
            (Octave::Madhya, c)
        };
        let degree = Degree::from_symbol(letter)
            .ok_or_else(|| Error::Domain(alloc::format!("unknown swar {letter:?} in {s:?}")))?;
        let octave = if chars.peek() == Some(&'\'') {
            chars.next();
            if octave == Octave::Mandra {
                return Err(Error::Domain(alloc::format!("swar marked both mandra and taar in {s:?}")));
            }
            Octave::Taar
        } else {
            octave
        };
        out.push(SwarSymbol::new(degree, octave));
    }
    Ok(out)
}

/// Concatenates symbols into their textual form (inverse of [`parse_swar_string`]).
pub fn format_swars(symbols: &[SwarSymbol]) -> String {
    symbols.iter().map(ToString::to_string).collect()
}

impl Serialize for SwarSymbol {
    fn serialize<S: Serializer>(&self, serializer: S) -> core::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SwarSymbol {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> core::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
