//! Raga swar grids in cents relative to the tonic.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Degree, Error, Octave, Result, SwarSymbol};

/// The singer's Sa, in Hz.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Tonic(f64);

impl Tonic {
    pub fn new(hz: f64) -> Result<Self> {
        if hz.is_finite() && hz > 0.0 {
            Ok(Tonic(hz))
        } else {
            Err(Error::Domain(format!("tonic must be finite and positive, got {hz}")))
        }
    }

    pub fn hz(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Tonic {
    type Error = Error;
    fn try_from(hz: f64) -> Result<Self> {
        Tonic::new(hz)
    }
}

impl From<Tonic> for f64 {
    fn from(t: Tonic) -> f64 {
        t.0
    }
}

pub fn hz_to_cents(f0: f64, tonic: Tonic) -> Result<f64> {
    if !(f0.is_finite() && f0 > 0.0) {
        return Err(Error::Domain(format!("frequency must be finite and positive, got {f0}")));
    }
    Ok(1200.0 * libm::log2(f0 / tonic.hz()))
}

pub fn cents_to_hz(cents: f64, tonic: Tonic) -> f64 {
    tonic.hz() * libm::exp2(cents / 1200.0)
}

/// Swars of a raga with their intonation, spread over mandra, madhya and
/// taar octaves.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RagaDefinition", into = "RagaDefinition")]
pub struct RagaScale {
    name: String,
    swars: Vec<(Degree, f64)>,
    grid: Vec<(SwarSymbol, f64)>,
}

/// Serializable form of a scale: the one-octave degree list plus optional
/// cent overrides.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RagaDefinition {
    pub name: String,
    pub swars: Vec<SwarSymbol>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cents: Vec<(SwarSymbol, f64)>,
}

impl TryFrom<RagaDefinition> for RagaScale {
    type Error = Error;

    fn try_from(def: RagaDefinition) -> Result<Self> {
        let mut degrees = Vec::with_capacity(def.swars.len());
        for s in &def.swars {
            if s.octave != Octave::Madhya {
                return Err(Error::Config(format!("raga swars are listed in madhya octave, got {s}")));
            }
            let cents = def
                .cents
                .iter()
                .find(|(o, _)| o.degree == s.degree)
                .map(|&(_, c)| c)
                .unwrap_or(100.0 * f64::from(s.degree.semitone()));
            degrees.push((s.degree, cents));
        }
        for (o, _) in &def.cents {
            if !def.swars.iter().any(|s| s.degree == o.degree) {
                return Err(Error::Config(format!("cent override for {o}, which is not in the raga")));
            }
        }
        RagaScale::with_cents(&def.name, degrees)
    }
}

impl From<RagaScale> for RagaDefinition {
    fn from(scale: RagaScale) -> Self {
        let cents = scale
            .swars
            .iter()
            .filter(|(d, c)| *c != 100.0 * f64::from(d.semitone()))
            .map(|&(d, c)| (SwarSymbol::madhya(d), c))
            .collect();
        RagaDefinition {
            name: scale.name,
            swars: scale.swars.iter().map(|&(d, _)| SwarSymbol::madhya(d)).collect(),
            cents,
        }
    }
}

impl RagaScale {
    /// Equal-tempered scale over the given degrees.
    pub fn equal_tempered(name: &str, degrees: &[Degree]) -> Result<Self> {
        let swars = degrees.iter().map(|&d| (d, 100.0 * f64::from(d.semitone()))).collect();
        RagaScale::with_cents(name, swars)
    }

    /// Scale with explicit cents for each degree within one octave.
    pub fn with_cents(name: &str, swars: Vec<(Degree, f64)>) -> Result<Self> {
        if swars.is_empty() {
            return Err(Error::Config(format!("raga {name} has no swars")));
        }
        for w in swars.windows(2) {
            if !(w[0].1 < w[1].1) {
                return Err(Error::Config(format!(
                    "raga {name}: swars must ascend strictly in cents ({} at {} then {} at {})",
                    w[0].0.symbol(),
                    w[0].1,
                    w[1].0.symbol(),
                    w[1].1
                )));
            }
        }
        if swars.iter().any(|(_, c)| !(0.0..1200.0).contains(c)) {
            return Err(Error::Config(format!("raga {name}: swar cents must lie in [0, 1200)")));
        }
        let mut grid = Vec::with_capacity(swars.len() * 3);
        for octave in [Octave::Mandra, Octave::Madhya, Octave::Taar] {
            for &(degree, cents) in &swars {
                grid.push((SwarSymbol::new(degree, octave), cents + 1200.0 * f64::from(octave.offset())));
            }
        }
        Ok(RagaScale { name: name.to_string(), swars, grid })
    }

    pub fn bhimpalasi() -> Self {
        use Degree::*;
        RagaScale::equal_tempered("Bhimpalasi", &[Sa, Re, KomalGa, Ma, Pa, Dha, KomalNi]).unwrap()
    }

    pub fn yaman() -> Self {
        use Degree::*;
        RagaScale::equal_tempered("Yaman", &[Sa, Re, Ga, TivraMa, Pa, Dha, Ni]).unwrap()
    }

    /// All twelve degrees.
    pub fn chromatic() -> Self {
        RagaScale::equal_tempered("chromatic", &Degree::ALL).unwrap()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degrees(&self) -> impl Iterator<Item = Degree> + '_ {
        self.swars.iter().map(|&(d, _)| d)
    }

    /// (symbol, cents) across the three octaves, ascending.
    pub fn grid(&self) -> &[(SwarSymbol, f64)] {
        &self.grid
    }

    pub fn contains(&self, symbol: SwarSymbol) -> bool {
        self.grid.iter().any(|&(s, _)| s == symbol)
    }

    pub fn cents_of(&self, symbol: SwarSymbol) -> Option<f64> {
        self.grid.iter().find(|&&(s, _)| s == symbol).map(|&(_, c)| c)
    }

    /// Range of cents that quantizes onto the grid. The grid is extended on
    /// each side by half the gap between the outermost swars and their next
    /// octave equivalents; beyond that the nearest pitch class lies outside
    /// the three covered octaves.
    pub fn covered_range(&self) -> (f64, f64) {
        let first = self.swars[0].1;
        let last = self.swars[self.swars.len() - 1].1;
        let margin = (first + 1200.0 - last) / 2.0;
        (self.grid[0].1 - margin, self.grid[self.grid.len() - 1].1 + margin)
    }
}

/// Nearest grid swar to `cents`. Exact midpoints resolve to the lower swar.
pub fn quantize_cents(cents: f64, scale: &RagaScale) -> Result<SwarSymbol> {
    let grid = scale.grid();
    let (lo, hi) = scale.covered_range();
    if !cents.is_finite() || cents < lo {
        return Err(Error::OutOfRange { value: cents, nearest: grid[0].0 });
    }
    if cents > hi {
        return Err(Error::OutOfRange { value: cents, nearest: grid[grid.len() - 1].0 });
    }
    // First grid point strictly above `cents`.
    let upper = grid.partition_point(|&(_, c)| c <= cents);
    if upper == 0 {
        return Ok(grid[0].0);
    }
    if upper == grid.len() {
        return Ok(grid[grid.len() - 1].0);
    }
    let (below, cb) = grid[upper - 1];
    let (above, ca) = grid[upper];
    Ok(if cents - cb <= ca - cents { below } else { above })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tonic() -> Tonic {
        Tonic::new(220.0).unwrap()
    }

    #[test]
    fn cents_identity_octave_and_fifth() {
        assert_eq!(hz_to_cents(220.0, tonic()).unwrap(), 0.0);
        assert_eq!(hz_to_cents(440.0, tonic()).unwrap(), 1200.0);
        // closed form 1200 * log2(3/2)
        let fifth = hz_to_cents(330.0, tonic()).unwrap();
        assert!((fifth - 701.955_000_865_387_4).abs() < 1e-6, "{fifth}");
    }

    #[test]
    fn non_positive_inputs_are_domain_errors() {
        assert!(matches!(hz_to_cents(0.0, tonic()), Err(Error::Domain(_))));
        assert!(matches!(hz_to_cents(-3.0, tonic()), Err(Error::Domain(_))));
        assert!(Tonic::new(0.0).is_err());
        assert!(Tonic::new(f64::NAN).is_err());
    }

    #[test]
    fn quantize_examples() {
        let yaman = RagaScale::yaman();
        assert_eq!(quantize_cents(0.0, &yaman).unwrap(), SwarSymbol::madhya(Degree::Sa));
        assert_eq!(quantize_cents(702.0, &RagaScale::bhimpalasi()).unwrap(), SwarSymbol::madhya(Degree::Pa));
        assert_eq!(quantize_cents(1250.0, &yaman).unwrap(), SwarSymbol::new(Degree::Sa, Octave::Taar));
    }

    #[test]
    fn midpoint_ties_go_down() {
        let yaman = RagaScale::yaman();
        // S at 0, R at 200
        assert_eq!(quantize_cents(100.0, &yaman).unwrap(), SwarSymbol::madhya(Degree::Sa));
        assert_eq!(quantize_cents(100.000001, &yaman).unwrap(), SwarSymbol::madhya(Degree::Re));
    }

    #[test]
    fn out_of_range_names_edge() {
        let yaman = RagaScale::yaman();
        match quantize_cents(5000.0, &yaman) {
            Err(Error::OutOfRange { nearest, .. }) => assert_eq!(nearest, SwarSymbol::new(Degree::Ni, Octave::Taar)),
            other => panic!("{other:?}"),
        }
        match quantize_cents(-1300.0, &yaman) {
            Err(Error::OutOfRange { nearest, .. }) => assert_eq!(nearest, SwarSymbol::new(Degree::Sa, Octave::Mandra)),
            other => panic!("{other:?}"),
        }
        assert_eq!(yaman.covered_range(), (-1250.0, 2350.0));
    }

    #[test]
    fn grid_is_octave_shifted() {
        let scale = RagaScale::bhimpalasi();
        for &(s, c) in scale.grid() {
            let base = scale.cents_of(SwarSymbol::madhya(s.degree)).unwrap();
            assert_eq!(c, base + 1200.0 * f64::from(s.octave.offset()));
        }
        assert_eq!(scale.grid().len(), 21);
    }

    #[test]
    fn rejects_unsorted_scale() {
        assert!(RagaScale::with_cents("bad", alloc::vec![(Degree::Pa, 700.0), (Degree::Sa, 0.0)]).is_err());
        assert!(RagaScale::with_cents("empty", Vec::new()).is_err());
    }

    #[test]
    fn definition_round_trip_keeps_overrides() {
        let def = RagaDefinition {
            name: "Just".into(),
            swars: alloc::vec![SwarSymbol::madhya(Degree::Sa), SwarSymbol::madhya(Degree::Pa)],
            cents: alloc::vec![(SwarSymbol::madhya(Degree::Pa), 701.955)],
        };
        let scale = RagaScale::try_from(def.clone()).unwrap();
        assert_eq!(scale.cents_of(SwarSymbol::madhya(Degree::Pa)), Some(701.955));
        assert_eq!(RagaDefinition::from(scale), def);
    }

    proptest! {
        #[test]
        fn quantize_is_idempotent(c in -1200.0f64..2300.0) {
            let scale = RagaScale::bhimpalasi();
            let q = quantize_cents(c, &scale).unwrap();
            let again = quantize_cents(scale.cents_of(q).unwrap(), &scale).unwrap();
            prop_assert_eq!(q, again);
        }

        #[test]
        fn quantize_is_monotone(a in -1200.0f64..2300.0, b in -1200.0f64..2300.0) {
            let scale = RagaScale::yaman();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(quantize_cents(lo, &scale).unwrap() <= quantize_cents(hi, &scale).unwrap());
        }

        #[test]
        fn quantize_picks_nearest(c in -1200.0f64..2300.0) {
            let scale = RagaScale::chromatic();
            let q = quantize_cents(c, &scale).unwrap();
            let dq = (scale.cents_of(q).unwrap() - c).abs();
            for &(_, g) in scale.grid() {
                prop_assert!(dq <= (g - c).abs());
            }
        }

        #[test]
        fn octave_powers_are_exact(k in -8i32..8) {
            let f = 220.0 * libm::exp2(f64::from(k));
            let c = hz_to_cents(f, tonic()).unwrap();
            prop_assert!((c - 1200.0 * f64::from(k)).abs() < 1e-9);
        }
    }
}
