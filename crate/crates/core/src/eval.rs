//! Scoring against gold senses, the random and most-frequent-sense
//! baselines, and the window-size sweep.
//!
//! coverage = answered / total, precision = correct / answered,
//! recall = correct / total. Only resolved outcomes count as answers.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::{extract_nouns, Document, NounToken};
use crate::density::DensityParams;
use crate::taxonomy::{Concept, Taxonomy};
use crate::wsd::{disambiguate_document, DisambiguationOutcome, Status, WindowConfig, WsdError};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("{outcomes} outcomes for {nouns} gold nouns")]
    LengthMismatch { outcomes: usize, nouns: usize },
    #[error("outcome {index} is for `{outcome}` but gold noun is `{gold}`")]
    LemmaMismatch {
        index: usize,
        outcome: String,
        gold: String,
    },
    #[error("gold token {position} (`{lemma}`) has no usable sense key")]
    UnknownGoldKey { position: usize, lemma: String },
    #[error("empty list of window sizes")]
    NoSizes,
    #[error("need at least one run")]
    NoRuns,
    #[error(transparent)]
    Wsd(#[from] WsdError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Population {
    PolysemousOnly,
    Overall,
}

impl Population {
    pub const ALL: [Population; 2] = [Population::PolysemousOnly, Population::Overall];

    pub fn as_str(self) -> &'static str {
        match self {
            Population::PolysemousOnly => "polysemous",
            Population::Overall => "overall",
        }
    }

    fn admits(self, sense_count: usize) -> bool {
        match self {
            Population::PolysemousOnly => sense_count >= 2,
            Population::Overall => true,
        }
    }
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreReport {
    pub population: Population,
    pub total: usize,
    pub answered: usize,
    pub correct: usize,
    /// Gold nouns left out because their key names no known sense.
    pub excluded: usize,
    pub coverage: f64,
    pub precision: f64,
    pub recall: f64,
}

impl ScoreReport {
    pub fn from_counts(population: Population, total: usize, answered: usize, correct: usize, excluded: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        ScoreReport {
            population,
            total,
            answered,
            correct,
            excluded,
            coverage: ratio(answered, total),
            precision: ratio(correct, answered),
            recall: ratio(correct, total),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScoreOptions {
    /// Fail on gold keys that resolve to no sense instead of excluding them.
    pub strict_gold: bool,
}

/// A gold noun with its resolved answer key.
#[derive(Debug, Clone)]
struct GoldNoun {
    index: usize,
    lemma: String,
    sense_count: usize,
    gold: Option<Concept>,
}

fn gold_nouns(gold: &Document, t: &Taxonomy) -> (Vec<NounToken>, Vec<GoldNoun>) {
    let (nouns, _) = extract_nouns(gold, t);
    let resolved = nouns
        .iter()
        .enumerate()
        .map(|(index, n)| {
            let tok = &gold.tokens[n.position];
            GoldNoun {
                index,
                lemma: n.lemma.clone(),
                sense_count: t.sense_count(&n.lemma),
                gold: tok
                    .gold_key
                    .as_ref()
                    .and_then(|k| t.sense_by_key(&n.lemma, &k.to_string())),
            }
        })
        .collect();
    (nouns, resolved)
}

fn check_gold(nouns: &[GoldNoun], positions: &[NounToken], opts: ScoreOptions) -> Result<usize, EvalError> {
    let missing: Vec<&GoldNoun> = nouns.iter().filter(|g| g.gold.is_none()).collect();
    if opts.strict_gold {
        if let Some(g) = missing.first() {
            return Err(EvalError::UnknownGoldKey {
                position: positions[g.index].position,
                lemma: g.lemma.clone(),
            });
        }
    }
    Ok(missing.len())
}

/// Score outcomes that align one-to-one with the taxonomy-known nouns of `gold`.
pub fn score(
    outcomes: &[DisambiguationOutcome],
    gold: &Document,
    t: &Taxonomy,
    population: Population,
    opts: ScoreOptions,
) -> Result<ScoreReport, EvalError> {
    let (positions, nouns) = gold_nouns(gold, t);
    if outcomes.len() != nouns.len() {
        return Err(EvalError::LengthMismatch {
            outcomes: outcomes.len(),
            nouns: nouns.len(),
        });
    }
    for (i, (o, g)) in outcomes.iter().zip(&nouns).enumerate() {
        if o.lemma != g.lemma {
            return Err(EvalError::LemmaMismatch {
                index: i,
                outcome: o.lemma.clone(),
                gold: g.lemma.clone(),
            });
        }
    }
    check_gold(&nouns, &positions, opts)?;
    let (mut total, mut answered, mut correct, mut excluded) = (0, 0, 0, 0);
    for (o, g) in outcomes.iter().zip(&nouns) {
        if !population.admits(g.sense_count) {
            continue;
        }
        let Some(gold) = g.gold else {
            excluded += 1;
            continue;
        };
        total += 1;
        if o.status == Status::Resolved {
            answered += 1;
            if o.chosen == Some(gold) {
                correct += 1;
            }
        }
    }
    Ok(ScoreReport::from_counts(population, total, answered, correct, excluded))
}

/// Lemmas of the gold nouns whose gold key resolves to a taxonomy sense,
/// i.e. the population every score is computed over.
pub fn scorable_lemmas(gold: &Document, t: &Taxonomy) -> Vec<String> {
    let (_, nouns) = gold_nouns(gold, t);
    nouns
        .into_iter()
        .filter(|g| g.gold.is_some())
        .map(|g| g.lemma)
        .collect()
}

/// Expected precision of a uniform random sense choice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticBaseline {
    pub total: usize,
    pub polysemous: usize,
    /// Mean of `1 / senses` over polysemous occurrences (0 when there are none).
    pub polysemous_precision: f64,
    /// Same, with monosemous occurrences counted as certain hits.
    pub overall_precision: f64,
}

impl AnalyticBaseline {
    pub fn precision(&self, population: Population) -> f64 {
        match population {
            Population::PolysemousOnly => self.polysemous_precision,
            Population::Overall => self.overall_precision,
        }
    }

    pub fn total(&self, population: Population) -> usize {
        match population {
            Population::PolysemousOnly => self.polysemous,
            Population::Overall => self.total,
        }
    }
}

pub fn random_baseline_analytic<S: AsRef<str>>(nouns: &[S], t: &Taxonomy) -> AnalyticBaseline {
    let (mut poly, mut poly_sum, mut total, mut all_sum) = (0usize, 0.0f64, 0usize, 0.0f64);
    for lemma in nouns {
        let k = t.sense_count(lemma.as_ref());
        if k == 0 {
            continue;
        }
        total += 1;
        all_sum += 1.0 / k as f64;
        if k >= 2 {
            poly += 1;
            poly_sum += 1.0 / k as f64;
        }
    }
    let mean = |s: f64, n: usize| if n == 0 { 0.0 } else { s / n as f64 };
    AnalyticBaseline {
        total,
        polysemous: poly,
        polysemous_precision: mean(poly_sum, poly),
        overall_precision: mean(all_sum, total),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanStd {
    pub mean: f64,
    pub stddev: f64,
}

fn mean_std(xs: &[f64]) -> MeanStd {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    MeanStd {
        mean,
        stddev: var.sqrt(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloBaseline {
    pub runs: usize,
    pub seed: u64,
    pub polysemous_total: usize,
    pub overall_total: usize,
    pub polysemous: MeanStd,
    pub overall: MeanStd,
}

impl MonteCarloBaseline {
    pub fn precision(&self, population: Population) -> MeanStd {
        match population {
            Population::PolysemousOnly => self.polysemous,
            Population::Overall => self.overall,
        }
    }

    pub fn total(&self, population: Population) -> usize {
        match population {
            Population::PolysemousOnly => self.polysemous_total,
            Population::Overall => self.overall_total,
        }
    }
}

/// Pick a uniformly random sense for every scorable gold noun, `runs`
/// times, and report the precision across runs. Coverage is always full.
pub fn random_baseline_monte_carlo(
    gold: &Document,
    t: &Taxonomy,
    runs: usize,
    seed: u64,
) -> Result<MonteCarloBaseline, EvalError> {
    if runs == 0 {
        return Err(EvalError::NoRuns);
    }
    let (_, nouns) = gold_nouns(gold, t);
    let scorable: Vec<(Vec<Concept>, Concept)> = nouns
        .iter()
        .filter_map(|g| {
            let senses = t.senses(&g.lemma)?.iter().map(|s| s.concept).collect();
            Some((senses, g.gold?))
        })
        .collect();
    let poly_total = scorable.iter().filter(|(s, _)| s.len() >= 2).count();
    let mono_hits = scorable
        .iter()
        .filter(|(s, gold)| s.len() == 1 && s[0] == *gold)
        .count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut poly = Vec::with_capacity(runs);
    let mut overall = Vec::with_capacity(runs);
    for _ in 0..runs {
        let mut hits = 0usize;
        for (senses, gold) in scorable.iter().filter(|(s, _)| s.len() >= 2) {
            if senses[rng.gen_range(0..senses.len())] == *gold {
                hits += 1;
            }
        }
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        poly.push(ratio(hits, poly_total));
        overall.push(ratio(hits + mono_hits, scorable.len()));
    }
    Ok(MonteCarloBaseline {
        runs,
        seed,
        polysemous_total: poly_total,
        overall_total: scorable.len(),
        polysemous: mean_std(&poly),
        overall: mean_std(&overall),
    })
}

/// Training counts per (lemma, synset).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SenseFrequencyTable {
    counts: HashMap<(String, Concept), u64>,
}

impl SenseFrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `n` occurrences; zero is ignored so stored counts stay positive.
    pub fn add(&mut self, lemma: &str, sense: Concept, n: u64) {
        if n > 0 {
            *self.counts.entry((lemma.to_string(), sense)).or_insert(0) += n;
        }
    }

    pub fn count(&self, lemma: &str, sense: Concept) -> u64 {
        self.counts.get(&(lemma.to_string(), sense)).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    /// Count the resolvable gold tags of training documents.
    pub fn from_documents<'a, I>(docs: I, t: &Taxonomy) -> Self
    where
        I: IntoIterator<Item = &'a Document>,
    {
        let mut table = Self::new();
        for doc in docs {
            for tok in doc.tokens.iter().filter(|t| t.is_noun()) {
                let Some(key) = &tok.gold_key else { continue };
                if let Some(c) = t.sense_by_key(&tok.lemma, &key.to_string()) {
                    table.add(&canonical_lemma(t, &tok.lemma), c, 1);
                }
            }
        }
        table
    }
}

fn canonical_lemma(t: &Taxonomy, lemma: &str) -> String {
    t.canonical_lemma(lemma).unwrap_or(lemma).to_string()
}

/// Most-frequent-sense answers for the known nouns of `gold`. Lemmas with
/// no counted sense stay unresolved; equal counts go to the lower sense number.
pub fn most_frequent_baseline(
    gold: &Document,
    t: &Taxonomy,
    freqs: &SenseFrequencyTable,
) -> Vec<DisambiguationOutcome> {
    let (nouns, _) = extract_nouns(gold, t);
    nouns
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let senses: Vec<Concept> = t
                .senses(&n.lemma)
                .map(|s| s.iter().map(|e| e.concept).collect())
                .unwrap_or_default();
            let canonical = canonical_lemma(t, &n.lemma);
            let mut best: Option<(u64, Concept)> = None;
            for &s in &senses {
                let c = freqs.count(&canonical, s);
                if c > 0 && best.is_none_or(|(b, _)| c > b) {
                    best = Some((c, s));
                }
            }
            let remaining = best.map_or_else(|| senses.clone(), |(_, s)| vec![s]);
            let mut outcome = DisambiguationOutcome::from_senses(i, &n.lemma, remaining, senses.len());
            if best.is_none() {
                // No evidence: unanswered even when the lemma has one sense.
                outcome.status = Status::Unresolved;
                outcome.chosen = None;
            }
            outcome
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub window_size: usize,
    pub polysemous: ScoreReport,
    pub overall: ScoreReport,
}

impl SweepRow {
    pub fn report(&self, population: Population) -> &ScoreReport {
        match population {
            Population::PolysemousOnly => &self.polysemous,
            Population::Overall => &self.overall,
        }
    }
}

/// Sorted, de-duplicated window sizes. Zero is rejected.
pub fn normalize_sizes(sizes: &[usize]) -> Result<Vec<usize>, EvalError> {
    if sizes.is_empty() {
        return Err(EvalError::NoSizes);
    }
    if sizes.contains(&0) {
        return Err(EvalError::Wsd(WsdError::EmptyWindow));
    }
    Ok(sizes.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
}

/// Run the engine over the gold nouns at every window size.
pub fn window_sweep(
    gold: &Document,
    t: &Taxonomy,
    sizes: &[usize],
    params: &DensityParams,
    opts: ScoreOptions,
) -> Result<Vec<SweepRow>, EvalError> {
    let sizes = normalize_sizes(sizes)?;
    let (nouns, _) = extract_nouns(gold, t);
    let lemmas: Vec<&str> = nouns.iter().map(|n| n.lemma.as_str()).collect();
    sizes
        .into_iter()
        .map(|window_size| {
            let cfg = WindowConfig::new(window_size, *params)?;
            let outcomes = disambiguate_document(t, &lemmas, &cfg)?;
            Ok(SweepRow {
                window_size,
                polysemous: score(&outcomes, gold, t, Population::PolysemousOnly, opts)?,
                overall: score(&outcomes, gold, t, Population::Overall, opts)?,
            })
        })
        .collect()
}

pub const CSV_HEADER: &str = "population,window_size,total,answered,correct,coverage,precision,recall";

/// One line of the score CSV. Counts are written as integers when they
/// are whole and with four decimals otherwise (expected counts of the
/// random baselines).
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub label: String,
    pub window_size: usize,
    pub total: f64,
    pub answered: f64,
    pub correct: f64,
    pub coverage: f64,
    pub precision: f64,
    pub recall: f64,
}

impl CsvRow {
    pub fn from_report(label: impl Into<String>, window_size: usize, r: &ScoreReport) -> Self {
        CsvRow {
            label: label.into(),
            window_size,
            total: r.total as f64,
            answered: r.answered as f64,
            correct: r.correct as f64,
            coverage: r.coverage,
            precision: r.precision,
            recall: r.recall,
        }
    }

    /// Full-coverage row with the given expected precision.
    pub fn full_coverage(label: impl Into<String>, window_size: usize, total: usize, precision: f64) -> Self {
        let (total, coverage) = (total as f64, if total == 0 { 0.0 } else { 1.0 });
        CsvRow {
            label: label.into(),
            window_size,
            total,
            answered: total,
            correct: precision * total,
            coverage,
            precision,
            recall: precision * coverage,
        }
    }
}

fn count(x: f64) -> String {
    if x.fract() == 0.0 {
        format!("{x:.0}")
    } else {
        format!("{x:.4}")
    }
}

impl fmt::Display for CsvRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{},{},{},{},{},{:.4},{:.4},{:.4}",
            self.label,
            self.window_size,
            count(self.total),
            count(self.answered),
            count(self.correct),
            self.coverage,
            self.precision,
            self.recall
        )
    }
}

pub fn to_csv<'a, I: IntoIterator<Item = &'a CsvRow>>(rows: I) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(out, "{r}");
    }
    out
}

/// Sweep rows for the chosen populations, population-major, sizes ascending.
pub fn sweep_csv_rows(rows: &[SweepRow], populations: &[Population]) -> Vec<CsvRow> {
    populations
        .iter()
        .flat_map(|&p| {
            rows.iter()
                .map(move |r| CsvRow::from_report(p.as_str(), r.window_size, r.report(p)))
        })
        .collect()
}
