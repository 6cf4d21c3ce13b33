//! Sliding-window disambiguation.
//!
//! For each window the nouns, their senses and every hypernym of those
//! senses form a [`Lattice`]. Each candidate concept carries the marks (live
//! word senses) found in its subhierarchy. The loop picks the densest
//! concept with at least two marks, keeps only the senses below it for the
//! words it covers, blocks its subhierarchy and repeats. Senses that sit
//! inside a blocked subhierarchy have been decided and stop counting as
//! marks for the remaining candidates.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::density::{conceptual_density, DensityError, DensityParams};
use crate::taxonomy::{Concept, Taxonomy};

#[derive(Debug, Error, PartialEq)]
pub enum WsdError {
    #[error("lemma `{0}` has no senses in the taxonomy")]
    UnknownLemma(String),
    #[error("window size must be at least 1")]
    EmptyWindow,
    #[error("target index {index} outside window of {len}")]
    TargetOutOfRange { index: usize, len: usize },
    #[error("`{0}` is not a selectable candidate")]
    NotACandidate(String),
    #[error(transparent)]
    Density(#[from] DensityError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowConfig {
    /// Nouns per window, the target included.
    pub window_size: usize,
    pub params: DensityParams,
}

impl WindowConfig {
    pub const DEFAULT_WINDOW: usize = 15;

    pub fn new(window_size: usize, params: DensityParams) -> Result<Self, WsdError> {
        if window_size == 0 {
            return Err(WsdError::EmptyWindow);
        }
        Ok(WindowConfig { window_size, params })
    }

    /// Index of the target inside a full window. Even sizes lean left.
    pub fn target_offset(&self) -> usize {
        (self.window_size - 1) / 2
    }

    /// Half-open range of document positions forming the window around
    /// `target`, clipped at the document edges.
    pub fn window_bounds(&self, target: usize, len: usize) -> (usize, usize) {
        let before = self.target_offset();
        let after = self.window_size - 1 - before;
        (target.saturating_sub(before), (target + after + 1).min(len))
    }
}

impl Default for WindowConfig {
    fn default() -> Self {
        WindowConfig {
            window_size: Self::DEFAULT_WINDOW,
            params: DensityParams::default(),
        }
    }
}

/// One (occurrence, synset) candidate meaning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SenseRef {
    pub occurrence: usize,
    pub concept: Concept,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub position: usize,
    pub lemma: String,
    /// Live senses in sense-number order; only ever shrinks.
    pub senses: Vec<Concept>,
    pub original_senses: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub concept: Concept,
    pub density: f64,
    pub marks: usize,
}

#[derive(Debug, Clone)]
pub struct Lattice {
    occurrences: Vec<Occurrence>,
    candidates: BTreeMap<Concept, Vec<SenseRef>>,
    /// Concepts selected so far; their subhierarchies are blocked.
    selected: Vec<Concept>,
}

impl Lattice {
    pub fn build<S: AsRef<str>>(t: &Taxonomy, window: &[S]) -> Result<Self, WsdError> {
        let occurrences = window
            .iter()
            .enumerate()
            .map(|(position, lemma)| {
                let lemma = lemma.as_ref();
                let senses: Vec<Concept> = t
                    .senses(lemma)
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| WsdError::UnknownLemma(lemma.to_string()))?
                    .iter()
                    .map(|s| s.concept)
                    .collect();
                Ok(Occurrence {
                    position,
                    lemma: lemma.to_string(),
                    original_senses: senses.len(),
                    senses,
                })
            })
            .collect::<Result<Vec<_>, WsdError>>()?;
        let mut lattice = Lattice {
            occurrences,
            candidates: BTreeMap::new(),
            selected: Vec::new(),
        };
        lattice.recompute_candidates(t);
        Ok(lattice)
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn candidates(&self) -> &BTreeMap<Concept, Vec<SenseRef>> {
        &self.candidates
    }

    pub fn marks(&self, c: Concept) -> &[SenseRef] {
        self.candidates.get(&c).map_or(&[], Vec::as_slice)
    }

    /// Whether `c` lies in the subhierarchy of an already selected concept.
    /// The blocked set is never materialised: a selection near the top of a
    /// large taxonomy would otherwise cost a walk over most of it.
    pub fn is_blocked(&self, t: &Taxonomy, c: Concept) -> bool {
        self.selected.iter().any(|&s| t.is_under(c, s))
    }

    /// Selected concepts in selection order, i.e. the roots of the blocked
    /// subhierarchies.
    pub fn selected(&self) -> &[Concept] {
        &self.selected
    }

    fn recompute_candidates(&mut self, t: &Taxonomy) {
        self.candidates.clear();
        for (occurrence, occ) in self.occurrences.iter().enumerate() {
            for &concept in &occ.senses {
                if self.is_blocked(t, concept) {
                    continue;
                }
                let mark = SenseRef { occurrence, concept };
                for &a in t.ancestor_concepts(concept) {
                    if !self.is_blocked(t, a) {
                        self.candidates.entry(a).or_default().push(mark);
                    }
                }
            }
        }
    }

    /// Densest non-blocked candidate with at least two marks. Ties go to more
    /// marks, then the smaller (more specific) subhierarchy, then the
    /// lexicographically smaller synset id.
    pub fn select_densest(&self, t: &Taxonomy, params: &DensityParams) -> Result<Option<Selection>, WsdError> {
        let mut best: Option<Selection> = None;
        for (&concept, marks) in &self.candidates {
            if marks.len() < 2 {
                continue;
            }
            let density = conceptual_density(t.stats(concept), marks.len(), params)?;
            let candidate = Selection {
                concept,
                density,
                marks: marks.len(),
            };
            if best.is_none_or(|b| prefer(t, &candidate, &b) == Ordering::Greater) {
                best = Some(candidate);
            }
        }
        Ok(best)
    }

    /// Commit to concept `c`: words with senses under it keep only those,
    /// and its whole subhierarchy leaves the candidate pool.
    pub fn apply_selection(&mut self, t: &Taxonomy, c: Concept) -> Result<(), WsdError> {
        if !self.candidates.contains_key(&c) {
            return Err(WsdError::NotACandidate(t.id(c).to_string()));
        }
        for occ in &mut self.occurrences {
            if occ.senses.iter().any(|&s| t.is_under(s, c)) {
                occ.senses.retain(|&s| t.is_under(s, c));
            }
        }
        self.selected.push(c);
        self.recompute_candidates(t);
        Ok(())
    }

    /// Run select/apply until no candidate has two marks. Returns the
    /// concepts chosen, in order.
    pub fn run(&mut self, t: &Taxonomy, params: &DensityParams) -> Result<Vec<Selection>, WsdError> {
        let mut trace = Vec::new();
        while let Some(sel) = self.select_densest(t, params)? {
            self.apply_selection(t, sel.concept)?;
            trace.push(sel);
        }
        Ok(trace)
    }

    pub fn outcome(&self, index: usize) -> DisambiguationOutcome {
        let occ = &self.occurrences[index];
        DisambiguationOutcome::from_senses(occ.position, &occ.lemma, occ.senses.clone(), occ.original_senses)
    }
}

fn prefer(t: &Taxonomy, a: &Selection, b: &Selection) -> Ordering {
    a.density
        .total_cmp(&b.density)
        .then(a.marks.cmp(&b.marks))
        .then_with(|| t.stats(b.concept).descendants.cmp(&t.stats(a.concept).descendants))
        .then_with(|| t.id(b.concept).cmp(t.id(a.concept)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// One sense left.
    Resolved,
    /// Several senses left, fewer than at the start.
    Reduced,
    /// Nothing eliminated.
    Unresolved,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Resolved => "RESOLVED",
            Status::Reduced => "REDUCED",
            Status::Unresolved => "UNRESOLVED",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisambiguationOutcome {
    pub position: usize,
    pub lemma: String,
    pub status: Status,
    pub chosen: Option<Concept>,
    pub remaining: Vec<Concept>,
    pub original_senses: usize,
}

impl DisambiguationOutcome {
    pub fn from_senses(position: usize, lemma: &str, remaining: Vec<Concept>, original_senses: usize) -> Self {
        let status = if remaining.len() == 1 {
            Status::Resolved
        } else if remaining.len() < original_senses {
            Status::Reduced
        } else {
            Status::Unresolved
        };
        DisambiguationOutcome {
            position,
            lemma: lemma.to_string(),
            status,
            chosen: (status == Status::Resolved).then(|| remaining[0]),
            remaining,
            original_senses,
        }
    }

    /// `position<TAB>lemma<TAB>status<TAB>keys`, with the chosen sense key
    /// for resolved words and the comma-joined remaining keys otherwise.
    pub fn to_tsv_line(&self, t: &Taxonomy) -> String {
        let keys: Vec<&str> = self
            .remaining
            .iter()
            .map(|&c| t.sense_key(&self.lemma, c).unwrap_or_else(|| t.id(c).as_str()))
            .collect();
        format!("{}\t{}\t{}\t{}", self.position, self.lemma, self.status, keys.join(","))
    }
}

/// Disambiguate `window[target_index]` using the rest of the window as context.
pub fn disambiguate_window<S: AsRef<str>>(
    t: &Taxonomy,
    window: &[S],
    target_index: usize,
    cfg: &WindowConfig,
) -> Result<DisambiguationOutcome, WsdError> {
    if target_index >= window.len() {
        return Err(WsdError::TargetOutOfRange {
            index: target_index,
            len: window.len(),
        });
    }
    let mut lattice = Lattice::build(t, window)?;
    lattice.run(t, &cfg.params)?;
    Ok(lattice.outcome(target_index))
}

/// One outcome per noun, each from a fresh window centred on it. Windows
/// are clipped at the document edges and ignore sentence boundaries.
pub fn disambiguate_document<S: AsRef<str>>(
    t: &Taxonomy,
    nouns: &[S],
    cfg: &WindowConfig,
) -> Result<Vec<DisambiguationOutcome>, WsdError> {
    if cfg.window_size == 0 {
        return Err(WsdError::EmptyWindow);
    }
    (0..nouns.len())
        .map(|i| {
            let (start, end) = cfg.window_bounds(i, nouns.len());
            let mut outcome = disambiguate_window(t, &nouns[start..end], i - start, cfg)?;
            outcome.position = i;
            Ok(outcome)
        })
        .collect()
}
