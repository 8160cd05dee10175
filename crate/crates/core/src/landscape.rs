//! Combinatorial fitness landscapes over `n` mutated positions.
//!
//! A [`Landscape`] is the screening oracle: a table of measured fitness values
//! where every unmeasured variant has fitness exactly zero. Budgeted access to
//! it goes through a [`ScreeningSession`].

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::trace::{RunTrace, TraceHeader, TraceRecord};

/// One-letter amino-acid codes in the fixed order used for variant indexing.
pub const ALPHABET: &[u8; 20] = b"ACDEFGHIKLMNPQRSTVWY";

/// Largest supported number of mutated positions for full enumeration.
pub const MAX_ENUMERABLE_POSITIONS: usize = 6;

fn residue_code(letter: u8) -> Option<u8> {
    ALPHABET.iter().position(|&a| a == letter).map(|p| p as u8)
}

/// A protein variant identified by its residues at the mutated positions.
///
/// Residues are stored as codes into [`ALPHABET`]; the lexicographic rank of
/// the word over that alphabet is the variant's index.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variant {
    residues: Vec<u8>,
}

impl Variant {
    pub fn parse(word: &str) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidVariant {
                word: word.to_string(),
                reason: "empty word".into(),
            });
        }
        let residues = word
            .bytes()
            .map(|b| {
                residue_code(b).ok_or_else(|| Error::InvalidVariant {
                    word: word.to_string(),
                    reason: format!("illegal residue letter {:?}", b as char),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Variant { residues })
    }

    /// Builds the variant with the given residue codes (each `< 20`).
    pub fn from_codes(codes: &[u8]) -> Result<Self> {
        if codes.is_empty() || codes.iter().any(|&c| c as usize >= ALPHABET.len()) {
            return Err(Error::InvalidVariant {
                word: format!("{codes:?}"),
                reason: "residue codes must be in 0..20".into(),
            });
        }
        Ok(Variant {
            residues: codes.to_vec(),
        })
    }

    /// Decodes the `index`-th word of length `n` in lexicographic order.
    pub fn from_index(index: u64, n: usize) -> Result<Self> {
        let size = space_size(n)?;
        if index >= size {
            return Err(Error::InvalidInput(format!(
                "variant index {index} out of range for n={n}"
            )));
        }
        let mut residues = vec![0u8; n];
        let mut rest = index;
        for slot in residues.iter_mut().rev() {
            *slot = (rest % 20) as u8;
            rest /= 20;
        }
        Ok(Variant { residues })
    }

    pub fn index(&self) -> u64 {
        self.residues
            .iter()
            .fold(0u64, |acc, &r| acc * 20 + u64::from(r))
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn codes(&self) -> &[u8] {
        &self.residues
    }

    pub fn residue(&self, position: usize) -> char {
        ALPHABET[self.residues[position] as usize] as char
    }

    pub fn with_code(&self, position: usize, code: u8) -> Variant {
        let mut residues = self.residues.clone();
        residues[position] = code;
        Variant { residues }
    }

    pub fn hamming(&self, other: &Variant) -> usize {
        self.residues
            .iter()
            .zip(&other.residues)
            .filter(|(a, b)| a != b)
            .count()
    }

    pub fn word(&self) -> String {
        self.residues
            .iter()
            .map(|&r| ALPHABET[r as usize] as char)
            .collect()
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.word())
    }
}

impl fmt::Debug for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Variant({})", self.word())
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::parse(s)
    }
}

/// Number of words of length `n`, i.e. `20^n`.
pub fn space_size(n: usize) -> Result<u64> {
    if n == 0 || n > 14 {
        return Err(Error::InvalidInput(format!(
            "number of positions must be in 1..=14, got {n}"
        )));
    }
    Ok(20u64.pow(n as u32))
}

/// All `20^n` variants in lexicographic order; `result[i].index() == i`.
pub fn enumerate_variants(n: usize) -> Result<Vec<Variant>> {
    if n == 0 || n > MAX_ENUMERABLE_POSITIONS {
        return Err(Error::InvalidInput(format!(
            "enumeration supports 1..={MAX_ENUMERABLE_POSITIONS} positions, got {n}"
        )));
    }
    let size = space_size(n)?;
    (0..size).map(|i| Variant::from_index(i, n)).collect()
}

/// The 19 variants that differ from `v` only at `position`, in alphabet order.
pub fn single_mutants(v: &Variant, position: usize) -> Result<Vec<Variant>> {
    if position >= v.len() {
        return Err(Error::InvalidInput(format!(
            "position {position} out of range for a variant of length {}",
            v.len()
        )));
    }
    let current = v.codes()[position];
    Ok((0..ALPHABET.len() as u8)
        .filter(|&c| c != current)
        .map(|c| v.with_code(position, c))
        .collect())
}

/// Sidecar metadata of a landscape CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct LandscapeMeta {
    pub name: String,
    pub n: usize,
    pub position_labels: Vec<String>,
    pub wild_type: Variant,
}

impl LandscapeMeta {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut fields: HashMap<&str, (usize, &str)> = HashMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(path, i + 1, "expected key=value"))?;
            fields.insert(key.trim(), (i + 1, value.trim()));
        }
        let get = |key: &str| {
            fields
                .get(key)
                .copied()
                .ok_or_else(|| Error::parse(path, 0, format!("missing key `{key}`")))
        };

        let (_, name) = get("name")?;
        let (n_line, n_text) = get("n")?;
        let n: usize = n_text
            .parse()
            .map_err(|_| Error::parse(path, n_line, format!("invalid n {n_text:?}")))?;
        let (pos_line, positions) = get("positions")?;
        let position_labels: Vec<String> = positions
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
        if position_labels.len() != n {
            return Err(Error::parse(
                path,
                pos_line,
                format!("expected {n} position labels, got {}", position_labels.len()),
            ));
        }
        let (wt_line, wt) = get("wild_type")?;
        let wild_type =
            Variant::parse(wt).map_err(|e| Error::parse(path, wt_line, e.to_string()))?;
        if wild_type.len() != n {
            return Err(Error::parse(
                path,
                wt_line,
                format!("wild type {wt} does not have {n} residues"),
            ));
        }
        Ok(LandscapeMeta {
            name: name.to_string(),
            n,
            position_labels,
            wild_type,
        })
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = format!(
            "name={}\nn={}\npositions={}\nwild_type={}\n",
            self.name,
            self.n,
            self.position_labels.join(","),
            self.wild_type
        );
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

/// Measured fitness table over the `20^n` variant space.
#[derive(Clone, Debug)]
pub struct Landscape {
    name: String,
    n: usize,
    position_labels: Vec<String>,
    wild_type: Variant,
    measured: HashMap<Variant, f64>,
    fitness_max: f64,
}

impl Landscape {
    pub fn new(meta: LandscapeMeta, measured: HashMap<Variant, f64>) -> Result<Self> {
        if meta.wild_type.len() != meta.n || meta.position_labels.len() != meta.n {
            return Err(Error::InvalidInput(
                "metadata is inconsistent with the number of positions".into(),
            ));
        }
        if measured.is_empty() {
            return Err(Error::InvalidInput("landscape has no measured variants".into()));
        }
        let mut fitness_max = f64::NEG_INFINITY;
        for (v, &y) in &measured {
            if v.len() != meta.n {
                return Err(Error::InvalidVariant {
                    word: v.word(),
                    reason: format!("expected {} residues", meta.n),
                });
            }
            if !(y.is_finite() && y >= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "fitness of {v} must be a finite non-negative number, got {y}"
                )));
            }
            fitness_max = fitness_max.max(y);
        }
        Ok(Landscape {
            name: meta.name,
            n: meta.n,
            position_labels: meta.position_labels,
            wild_type: meta.wild_type,
            measured,
            fitness_max,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn position_labels(&self) -> &[String] {
        &self.position_labels
    }

    pub fn wild_type(&self) -> &Variant {
        &self.wild_type
    }

    pub fn measured(&self) -> &HashMap<Variant, f64> {
        &self.measured
    }

    pub fn fitness_max(&self) -> f64 {
        self.fitness_max
    }

    pub fn fitness_min(&self) -> f64 {
        self.measured.values().copied().fold(f64::INFINITY, f64::min)
    }

    /// Measured fitness, or 0.0 for variants absent from the table.
    pub fn fitness(&self, v: &Variant) -> f64 {
        self.measured.get(v).copied().unwrap_or(0.0)
    }

    pub fn metadata(&self) -> LandscapeMeta {
        LandscapeMeta {
            name: self.name.clone(),
            n: self.n,
            position_labels: self.position_labels.clone(),
            wild_type: self.wild_type.clone(),
        }
    }

    pub fn with_metadata(mut self, meta: LandscapeMeta) -> Result<Self> {
        if meta.n != self.n {
            return Err(Error::InvalidInput(format!(
                "metadata declares n={} but the table has n={}",
                meta.n, self.n
            )));
        }
        self.name = meta.name;
        self.position_labels = meta.position_labels;
        self.wild_type = meta.wild_type;
        Ok(self)
    }

    /// Measured rows sorted by variant index.
    pub fn sorted_rows(&self) -> Vec<(&Variant, f64)> {
        let mut rows: Vec<_> = self.measured.iter().map(|(v, &y)| (v, y)).collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        rows
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut out = String::with_capacity(self.measured.len() * 16 + 16);
        out.push_str("variant,fitness\n");
        for (v, y) in self.sorted_rows() {
            out.push_str(&format!("{v},{y}\n"));
        }
        let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        file.write_all(out.as_bytes())
            .map_err(|e| Error::io(path, e))
    }
}

/// Loads a `variant,fitness` CSV whose variants have `n` residues.
///
/// Without sidecar metadata the landscape is named after the file stem, the
/// positions are labelled `1..=n` and the first data row is the wild type.
pub fn load_landscape(path: impl AsRef<Path>, n: usize) -> Result<Landscape> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut measured = HashMap::new();
    let mut first = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line_no == 1 && line.eq_ignore_ascii_case("variant,fitness") {
            continue;
        }
        let (word, value) = line
            .split_once(',')
            .ok_or_else(|| Error::parse(path, line_no, "expected `variant,fitness`"))?;
        let word = word.trim();
        if word.len() != n {
            return Err(Error::parse(
                path,
                line_no,
                format!("variant {word:?} does not have {n} residues"),
            ));
        }
        let variant =
            Variant::parse(word).map_err(|e| Error::parse(path, line_no, e.to_string()))?;
        let fitness: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::parse(path, line_no, format!("non-numeric fitness {value:?}")))?;
        if !(fitness.is_finite() && fitness >= 0.0) {
            return Err(Error::parse(
                path,
                line_no,
                format!("fitness must be finite and non-negative, got {fitness}"),
            ));
        }
        if first.is_none() {
            first = Some(variant.clone());
        }
        if measured.insert(variant, fitness).is_some() {
            return Err(Error::DuplicateVariant(word.to_string()));
        }
    }
    let wild_type = first.ok_or_else(|| Error::parse(path, 1, "no data rows"))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "landscape".into());
    let meta = LandscapeMeta {
        name,
        n,
        position_labels: (1..=n).map(|p| p.to_string()).collect(),
        wild_type,
    };
    Landscape::new(meta, measured)
}

/// Loads a landscape CSV together with its key=value metadata sidecar.
pub fn load_landscape_with_meta(
    csv_path: impl AsRef<Path>,
    meta_path: impl AsRef<Path>,
) -> Result<Landscape> {
    let meta = LandscapeMeta::load(meta_path)?;
    load_landscape(csv_path, meta.n)?.with_metadata(meta)
}

/// Infers `n` from the first data row of a landscape CSV.
pub fn infer_positions(path: impl AsRef<Path>) -> Result<usize> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.eq_ignore_ascii_case("variant,fitness"))
        .find_map(|l| l.split_once(',').map(|(w, _)| w.trim().len()))
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::parse(path, 1, "no data rows"))
}

/// Budgeted, duplicate-free access to a landscape for one optimization run.
#[derive(Debug)]
pub struct ScreeningSession<'a> {
    landscape: &'a Landscape,
    budget: usize,
    screened: HashSet<Variant>,
    trace: RunTrace,
}

impl<'a> ScreeningSession<'a> {
    pub fn new(landscape: &'a Landscape, budget: usize, header: TraceHeader) -> Result<Self> {
        if budget == 0 {
            return Err(Error::InvalidInput("budget must be positive".into()));
        }
        Ok(ScreeningSession {
            landscape,
            budget,
            screened: HashSet::with_capacity(budget),
            trace: RunTrace::new(header),
        })
    }

    pub fn landscape(&self) -> &'a Landscape {
        self.landscape
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    pub fn count(&self) -> usize {
        self.screened.len()
    }

    pub fn remaining(&self) -> usize {
        self.budget - self.screened.len()
    }

    pub fn is_exhausted(&self) -> bool {
        self.screened.len() >= self.budget
    }

    pub fn is_screened(&self, v: &Variant) -> bool {
        self.screened.contains(v)
    }

    /// Best fitness observed so far, if anything has been screened.
    pub fn best(&self) -> Option<f64> {
        self.trace.records.last().map(|r| r.best)
    }

    pub fn trace(&self) -> &RunTrace {
        &self.trace
    }

    pub fn screen(&mut self, v: &Variant) -> Result<f64> {
        self.screen_with_theta(v, None)
    }

    /// Screens `v`, recording the surrogate hyperparameter that selected it.
    pub fn screen_with_theta(&mut self, v: &Variant, theta: Option<f64>) -> Result<f64> {
        if v.len() != self.landscape.n() {
            return Err(Error::InvalidVariant {
                word: v.word(),
                reason: format!("expected {} residues", self.landscape.n()),
            });
        }
        if self.is_exhausted() {
            return Err(Error::BudgetExhausted(self.budget));
        }
        if self.screened.contains(v) {
            return Err(Error::DuplicateScreen(v.word()));
        }
        let fitness = self.landscape.fitness(v);
        let best = self.best().map_or(fitness, |b| b.max(fitness));
        self.screened.insert(v.clone());
        self.trace.records.push(TraceRecord {
            step: self.trace.records.len() + 1,
            variant: v.word(),
            fitness,
            best,
            theta,
        });
        Ok(fitness)
    }

    pub fn into_trace(self) -> RunTrace {
        self.trace
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy(rows: &[(&str, f64)]) -> Landscape {
        let measured = rows
            .iter()
            .map(|(w, y)| (Variant::parse(w).unwrap(), *y))
            .collect();
        let n = rows[0].0.len();
        let meta = LandscapeMeta {
            name: "toy".into(),
            n,
            position_labels: (1..=n).map(|p| p.to_string()).collect(),
            wild_type: Variant::parse(rows[0].0).unwrap(),
        };
        Landscape::new(meta, measured).unwrap()
    }

    fn header() -> TraceHeader {
        TraceHeader::new("test", 0, serde_json::Value::Null)
    }

    #[test]
    fn index_of_first_and_last_words() {
        assert_eq!(Variant::parse("AA").unwrap().index(), 0);
        assert_eq!(Variant::parse("AC").unwrap().index(), 1);
        assert_eq!(Variant::parse("YY").unwrap().index(), 399);
        assert_eq!(Variant::from_index(399, 2).unwrap().word(), "YY");
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(enumerate_variants(1).unwrap().len(), 20);
        assert_eq!(enumerate_variants(2).unwrap().len(), 400);
        let four = enumerate_variants(4).unwrap();
        assert_eq!(four.len(), 160_000);
        assert!(four.iter().enumerate().all(|(i, v)| v.index() == i as u64));
        assert!(four.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn enumeration_rejects_out_of_range() {
        assert!(enumerate_variants(0).is_err());
        assert!(enumerate_variants(7).is_err());
    }

    #[test]
    fn illegal_letters_are_rejected() {
        assert!(Variant::parse("ABCD").is_err());
        assert!(Variant::parse("acde").is_err());
        assert!(Variant::parse("").is_err());
    }

    #[test]
    fn single_mutants_of_aaaa() {
        let v = Variant::parse("AAAA").unwrap();
        let first = single_mutants(&v, 0).unwrap();
        assert_eq!(first.len(), 19);
        assert_eq!(first[0].word(), "CAAA");
        assert_eq!(first[1].word(), "DAAA");
        assert!(!first.contains(&v));
        let mut all = HashSet::new();
        for p in 0..4 {
            all.extend(single_mutants(&v, p).unwrap());
        }
        // brute force: every word at Hamming distance exactly one
        let brute: HashSet<_> = enumerate_variants(4)
            .unwrap()
            .into_iter()
            .filter(|w| w.hamming(&v) == 1)
            .collect();
        assert_eq!(all.len(), 76);
        assert_eq!(all, brute);
        assert!(single_mutants(&v, 4).is_err());
    }

    #[test]
    fn unmeasured_fitness_is_zero() {
        let l = toy(&[("AAAA", 1.0), ("CCCC", 2.5)]);
        assert_eq!(l.fitness(&Variant::parse("CCCC").unwrap()), 2.5);
        assert_eq!(l.fitness(&Variant::parse("DDDD").unwrap()), 0.0);
        assert_eq!(l.fitness_max(), 2.5);
    }

    #[test]
    fn negative_fitness_rejected() {
        let measured = [(Variant::parse("AA").unwrap(), -1.0)].into_iter().collect();
        let meta = LandscapeMeta {
            name: "bad".into(),
            n: 2,
            position_labels: vec!["1".into(), "2".into()],
            wild_type: Variant::parse("AA").unwrap(),
        };
        assert!(Landscape::new(meta, measured).is_err());
    }

    #[test]
    fn session_counts_start_and_rejects_duplicates() {
        let l = toy(&[("VDGV", 1.0), ("ADGV", 0.5)]);
        let mut s = ScreeningSession::new(&l, 2, header()).unwrap();
        let wt = l.wild_type().clone();
        assert_eq!(s.screen(&wt).unwrap(), 1.0);
        assert_eq!(s.count(), 1);
        assert!(matches!(s.screen(&wt), Err(Error::DuplicateScreen(_))));
        s.screen(&Variant::parse("ADGV").unwrap()).unwrap();
        assert!(matches!(
            s.screen(&Variant::parse("CDGV").unwrap()),
            Err(Error::BudgetExhausted(2))
        ));
    }

    #[test]
    fn budget_one_rejects_second_screen() {
        let l = toy(&[("AA", 1.0)]);
        let mut s = ScreeningSession::new(&l, 1, header()).unwrap();
        s.screen(&Variant::parse("AA").unwrap()).unwrap();
        assert!(matches!(
            s.screen(&Variant::parse("AC").unwrap()),
            Err(Error::BudgetExhausted(1))
        ));
    }

    #[test]
    fn load_single_row_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("one.csv");
        fs::write(&p, "AAAA,1.0\n").unwrap();
        let l = load_landscape(&p, 4).unwrap();
        assert_eq!(l.measured().len(), 1);
        assert_eq!(l.fitness_max(), 1.0);

        for (body, what) in [
            ("variant,fitness\nAAA,1.0\n", "wrong length"),
            ("variant,fitness\nAAAB,1.0\n", "illegal letter"),
            ("variant,fitness\nAAAA,abc\n", "non-numeric"),
            ("variant,fitness\n", "empty"),
            ("", "empty"),
        ] {
            fs::write(&p, body).unwrap();
            assert!(load_landscape(&p, 4).is_err(), "{what}");
        }
        fs::write(&p, "variant,fitness\nAAAA,1.0\nAAAA,2.0\n").unwrap();
        assert!(matches!(
            load_landscape(&p, 4),
            Err(Error::DuplicateVariant(_))
        ));
    }

    #[test]
    fn metadata_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let csv = dir.path().join("gb1.csv");
        let meta = dir.path().join("gb1.meta");
        fs::write(&csv, "variant,fitness\nAAAA,0.5\nVDGV,1.0\n").unwrap();
        fs::write(
            &meta,
            "# GB1\nname=GB1\nn=4\npositions=V39,D40,G41,V54\nwild_type=VDGV\n",
        )
        .unwrap();
        let l = load_landscape_with_meta(&csv, &meta).unwrap();
        assert_eq!(l.name(), "GB1");
        assert_eq!(l.wild_type().word(), "VDGV");
        assert_eq!(l.fitness(l.wild_type()), 1.0);
        assert_eq!(l.position_labels()[3], "V54");
        assert_eq!(infer_positions(&csv).unwrap(), 4);
    }

    proptest! {
        #[test]
        fn index_round_trip(n in 1usize..=6, seed in any::<u64>()) {
            let size = space_size(n).unwrap();
            let idx = seed % size;
            let v = Variant::from_index(idx, n).unwrap();
            prop_assert_eq!(v.index(), idx);
            prop_assert_eq!(Variant::parse(&v.word()).unwrap(), v);
        }

        #[test]
        fn csv_round_trip(values in proptest::collection::btree_map(0u64..400, 0.0f64..1e6, 1..50)) {
            let dir = tempfile::tempdir().unwrap();
            let p = dir.path().join("l.csv");
            let measured: HashMap<_, _> = values
                .iter()
                .map(|(&i, &y)| (Variant::from_index(i, 2).unwrap(), y))
                .collect();
            let meta = LandscapeMeta {
                name: "l".into(),
                n: 2,
                position_labels: vec!["1".into(), "2".into()],
                wild_type: Variant::from_index(0, 2).unwrap(),
            };
            let l = Landscape::new(meta, measured.clone()).unwrap();
            l.write_csv(&p).unwrap();
            let back = load_landscape(&p, 2).unwrap();
            prop_assert_eq!(back.measured(), &measured);
        }

        #[test]
        fn session_never_duplicates_or_overspends(
            budget in 1usize..20,
            calls in proptest::collection::vec(0u64..30, 0..60),
        ) {
            let l = toy(&[("AA", 1.0), ("AC", 3.0)]);
            let mut s = ScreeningSession::new(&l, budget, header()).unwrap();
            let mut seen = HashSet::new();
            for c in calls {
                let v = Variant::from_index(c, 2).unwrap();
                let was_seen = seen.contains(&v);
                let full = s.count() == budget;
                match s.screen(&v) {
                    Ok(y) => {
                        prop_assert!(!was_seen && !full);
                        prop_assert!(y >= 0.0);
                        seen.insert(v);
                    }
                    Err(Error::BudgetExhausted(_)) => prop_assert!(full),
                    Err(Error::DuplicateScreen(_)) => prop_assert!(was_seen && !full),
                    Err(e) => prop_assert!(false, "unexpected {e}"),
                }
                prop_assert!(s.count() <= budget);
            }
            let words: HashSet<_> = s.trace().records.iter().map(|r| r.variant.clone()).collect();
            prop_assert_eq!(words.len(), s.trace().records.len());
        }
    }
}
