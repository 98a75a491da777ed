use alloc::format;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::PaaString;
use crate::{Error, Result};

/// Unit-cost edit distance with the operation counts of one optimal
/// alignment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditCounts {
    pub distance: usize,
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
}

/// Levenshtein distance from `a` to `b`.
///
/// The counts come from a traceback from the end of both strings that
/// prefers a diagonal step (match or substitution), then an insertion of a
/// symbol of `b`, then a deletion of a symbol of `a`.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> EditCounts {
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    let mut dp = alloc::vec![0usize; (n + 1) * width];
    for (j, cell) in dp[..width].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        dp[i * width] = i;
        for j in 1..=m {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            let diag = dp[(i - 1) * width + j - 1] + cost;
            let ins = dp[i * width + j - 1] + 1;
            let del = dp[(i - 1) * width + j] + 1;
            dp[i * width + j] = diag.min(ins).min(del);
        }
    }

    let mut counts = EditCounts { distance: dp[n * width + m], ..EditCounts::default() };
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = dp[i * width + j];
        if i > 0 && j > 0 {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            if here == dp[(i - 1) * width + j - 1] + cost {
                counts.substitutions += cost;
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if j > 0 && here == dp[i * width + j - 1] + 1 {
            counts.insertions += 1;
            j -= 1;
        } else {
            counts.deletions += 1;
            i -= 1;
        }
    }
    counts
}

/// Substitutions per symbol between two PAA strings of the same syllable.
/// Same-syllable strings are equal length, so this is the Hamming distance
/// over the length.
pub fn nlss(a: &PaaString, b: &PaaString) -> Result<f64> {
    if a.symbols.len() != b.symbols.len() {
        return Err(Error::Contract(format!(
            "NLSS needs equal-length strings ({} has {} symbols, {} has {})",
            a.syllable,
            a.symbols.len(),
            b.syllable,
            b.symbols.len()
        )));
    }
    if a.symbols.is_empty() {
        return Ok(0.0);
    }
    let diff = a.symbols.iter().zip(&b.symbols).filter(|(x, y)| x != y).count();
    Ok(diff as f64 / a.symbols.len() as f64)
}

/// Levenshtein substitution count over the longer length, for strings that
/// may differ in length.
pub fn nlss_general<T: PartialEq>(a: &[T], b: &[T]) -> f64 {
    let len = a.len().max(b.len());
    if len == 0 {
        return 0.0;
    }
    levenshtein(a, b).substitutions as f64 / len as f64
}

/// Symmetric matrix of NLSS between repetitions, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NlssMatrix {
    /// Repetition index of each row.
    pub labels: Vec<usize>,
    pub values: Vec<f64>,
}

impl NlssMatrix {
    pub fn from_values(labels: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        let n = labels.len();
        if values.len() != n * n {
            return Err(Error::Contract(format!("{n} labels need {} values, got {}", n * n, values.len())));
        }
        for i in 0..n {
            if values[i * n + i] != 0.0 {
                return Err(Error::Contract("NLSS matrix diagonal must be zero".into()));
            }
            for j in 0..n {
                let v = values[i * n + j];
                if !(0.0..=1.0).contains(&v) || v != values[j * n + i] {
                    return Err(Error::Contract(format!("NLSS matrix entry ({i}, {j}) = {v} is invalid")));
                }
            }
        }
        Ok(NlssMatrix { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.len() + j]
    }

    /// Strict upper-triangle entries.
    pub fn pairs(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.len();
        (0..n).flat_map(move |i| (i + 1..n).map(move |j| self.get(i, j)))
    }

    pub fn max_value(&self) -> f64 {
        self.pairs().fold(0.0, f64::max)
    }
}

pub fn pairwise_nlss(reps: &[PaaString]) -> Result<NlssMatrix> {
    if reps.len() < 2 {
        return Err(Error::InsufficientData(format!("need at least 2 repetitions, got {}", reps.len())));
    }
    let n = reps.len();
    let mut values = alloc::vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let v = nlss(&reps[i], &reps[j])?;
            values[i * n + j] = v;
            values[j * n + i] = v;
        }
    }
    Ok(NlssMatrix { labels: reps.iter().map(|r| r.repetition).collect(), values })
}

/// Mean over all distinct pairs.
pub fn mean_nlss(m: &NlssMatrix) -> Result<f64> {
    if m.len() < 2 {
        return Err(Error::InsufficientData("mean NLSS needs at least a 2×2 matrix".into()));
    }
    let n = m.len();
    let pairs = n * (n - 1) / 2;
    Ok(m.pairs().sum::<f64>() / pairs as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{parse_swar_string, SwarSymbol};
    use alloc::string::String;
    use alloc::vec;
    use proptest::prelude::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    fn paa(s: &str, rep: usize) -> PaaString {
        PaaString { syllable: "Jaa1".into(), repetition: rep, symbols: parse_swar_string(s).unwrap() }
    }

    /// Plain recursion straight from the definition, no memoization.
    fn naive(a: &[char], b: &[char]) -> usize {
        match (a, b) {
            ([], _) => b.len(),
            (_, []) => a.len(),
            ([x, ra @ ..], [y, rb @ ..]) => {
                let sub = naive(ra, rb) + usize::from(x != y);
                sub.min(naive(ra, b) + 1).min(naive(a, rb) + 1)
            }
        }
    }

    #[test]
    fn examples() {
        assert_eq!(levenshtein(&chars("SSS"), &chars("SSS")).distance, 0);
        let c = levenshtein(&chars("SSSS"), &chars("SSRR"));
        assert_eq!((c.distance, c.substitutions), (2, 2));
        let c = levenshtein(&chars("SR"), &chars("S"));
        assert_eq!((c.distance, c.deletions), (1, 1));
        assert_eq!(naive(&chars("SR"), &chars("S")), 1);
        let c = levenshtein(&chars(""), &chars("abc"));
        assert_eq!((c.distance, c.insertions), (3, 3));
    }

    #[test]
    fn shift_is_not_counted_as_substitutions() {
        // Hamming 4, but two indels suffice
        let c = levenshtein(&chars("SRSR"), &chars("RSRS"));
        assert_eq!(c.distance, 2);
        assert_eq!(c.substitutions, 0);
        assert_eq!(nlss(&paa("SRSR", 1), &paa("RSRS", 2)).unwrap(), 1.0);
    }

    #[test]
    fn nlss_examples() {
        let a = paa(&"S".repeat(20), 1);
        assert_eq!(nlss(&a, &a).unwrap(), 0.0);
        let b = paa(&(String::from("RRRRR") + &"S".repeat(15)), 2);
        assert_eq!(nlss(&a, &b).unwrap(), 0.25);
        assert!(matches!(nlss(&a, &paa("S", 3)), Err(Error::Contract(_))));
        assert_eq!(nlss_general(&a.symbols, &paa("S", 3).symbols), 0.0);
    }

    #[test]
    fn matrices() {
        let reps = [paa("SS", 1), paa("SS", 2)];
        let m = pairwise_nlss(&reps).unwrap();
        assert_eq!(m.values, [0.0; 4]);
        assert_eq!(mean_nlss(&m).unwrap(), 0.0);
        assert!(matches!(pairwise_nlss(&reps[..1]), Err(Error::InsufficientData(_))));

        let m = NlssMatrix::from_values(vec![1, 2, 3], vec![0.0, 0.2, 0.4, 0.2, 0.0, 0.6, 0.4, 0.6, 0.0]).unwrap();
        assert!((mean_nlss(&m).unwrap() - 0.4).abs() < 1e-15);
        assert_eq!(m.max_value(), 0.6);
        let tiny = NlssMatrix::from_values(vec![1], vec![0.0]).unwrap();
        assert!(matches!(mean_nlss(&tiny), Err(Error::InsufficientData(_))));
        assert!(NlssMatrix::from_values(vec![1, 2], vec![0.0, 0.1, 0.2, 0.0]).is_err());
    }

    #[test]
    fn fourteen_repetitions_give_square_matrix() {
        let reps: Vec<PaaString> = (1..=14).map(|r| paa(if r % 2 == 0 { "SRG" } else { "SRR" }, r)).collect();
        let m = pairwise_nlss(&reps).unwrap();
        assert_eq!((m.len(), m.values.len()), (14, 196));
    }

    fn swar_string(len: usize) -> impl Strategy<Value = Vec<SwarSymbol>> {
        proptest::collection::vec(prop_oneof![Just("S"), Just("R"), Just("g")], len)
            .prop_map(|v| parse_swar_string(&v.concat()).unwrap())
    }

    proptest! {
        #[test]
        fn dp_matches_naive_recursion(a in "[abc]{0,5}", b in "[abc]{0,5}") {
            let (a, b) = (chars(&a), chars(&b));
            let c = levenshtein(&a, &b);
            prop_assert_eq!(c.distance, naive(&a, &b));
            prop_assert_eq!(c.distance, c.substitutions + c.insertions + c.deletions);
            prop_assert_eq!(c.insertions as isize - c.deletions as isize, b.len() as isize - a.len() as isize);
        }

        #[test]
        fn random_matrix_mean_matches_enumeration(n in 2usize..8, seed in proptest::collection::vec(0.0f64..1.0, 64)) {
            let mut values = vec![0.0; n * n];
            let mut k = 0;
            let mut direct = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    values[i * n + j] = seed[k];
                    values[j * n + i] = seed[k];
                    direct.push(seed[k]);
                    k += 1;
                }
            }
            let m = NlssMatrix::from_values((1..=n).collect(), values).unwrap();
            let want = direct.iter().sum::<f64>() / direct.len() as f64;
            prop_assert!((mean_nlss(&m).unwrap() - want).abs() < 1e-12);
        }

        #[test]
        fn nlss_axioms(len in 1usize..40, seed_a in swar_string(40), seed_b in swar_string(40)) {
            let a = PaaString { syllable: "x".into(), repetition: 1, symbols: seed_a[..len].to_vec() };
            let b = PaaString { syllable: "x".into(), repetition: 2, symbols: seed_b[..len].to_vec() };
            let ab = nlss(&a, &b).unwrap();
            prop_assert_eq!(ab, nlss(&b, &a).unwrap());
            prop_assert_eq!(nlss(&a, &a).unwrap(), 0.0);
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert_eq!(ab == 0.0, a.symbols == b.symbols);
        }
    }
}
