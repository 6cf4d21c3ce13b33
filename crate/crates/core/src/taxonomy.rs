//! The noun taxonomy: synsets, hypernym links, the lemma → senses index and
//! the per-concept subhierarchy statistics consumed by the density formula.
//!
//! Interchange format (UTF-8, tab separated, `#` starts a comment line):
//!
//! ```text
//! SYNSET <id> <hypernym ids, comma separated, empty for roots> <lemma,lemma,...> [gloss]
//! SENSE  <lemma> <sense number, 1-based> <synset id> <sense key, e.g. noun.group.0>
//! ```

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::io::BufRead;

use thiserror::Error;

use crate::density::{solve_nhyp, DensityError};

/// Height above which a concept is reported as unusual. Real WordNet noun
/// hierarchies never exceed 16 levels.
pub const MAX_EXPECTED_HEIGHT: u32 = 16;

#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: input is not valid UTF-8")]
    Encoding { line: usize },
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate synset id `{id}`")]
    DuplicateSynset { id: String },
    #[error("synset `{synset}` names unknown hypernym `{hypernym}`")]
    DanglingHypernym { synset: String, hypernym: String },
    #[error("sense {number} of `{lemma}` refers to unknown synset `{synset}`")]
    DanglingSense { lemma: String, number: u32, synset: String },
    #[error("sense {number} of `{lemma}` points at synset `{synset}`, which does not list that lemma")]
    SenseLemmaMismatch { lemma: String, number: u32, synset: String },
    #[error("duplicate sense for `{lemma}`: {detail}")]
    DuplicateSense { lemma: String, detail: String },
    #[error("hypernym cycle: {}", .cycle.join(" -> "))]
    Cycle { cycle: Vec<String> },
    #[error("unknown synset `{0}`")]
    UnknownSynset(String),
    #[error("corrupt statistics: {0}")]
    Stats(#[from] DensityError),
}

/// Opaque synset identifier, unique within a taxonomy.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SynsetId(String);

impl SynsetId {
    pub fn new(id: impl Into<String>) -> Option<Self> {
        let id = id.into();
        if id.is_empty() {
            None
        } else {
            Some(SynsetId(id))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::borrow::Borrow<str> for SynsetId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

/// Dense handle for a synset inside one [`Taxonomy`]. Handles are assigned in
/// file order and are meaningless across taxonomies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Concept(u32);

impl Concept {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    fn from_index(index: usize) -> Self {
        Concept(u32::try_from(index).expect("taxonomy exceeds u32 synsets"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synset {
    pub id: SynsetId,
    pub hypernyms: Vec<SynsetId>,
    pub words: Vec<String>,
    pub gloss: Option<String>,
    /// (lemma, sense key) pairs from the SENSE records pointing here.
    pub sense_keys: Vec<(String, String)>,
}

/// Shape of the subhierarchy rooted at one concept.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConceptStats {
    /// Unique synsets reachable through hyponym links, the concept included.
    pub descendants: u64,
    /// Longest hyponym chain down to a leaf, counting the concept as level 1.
    pub height: u32,
    /// Branching factor of a regular tree with the same size and height.
    pub nhyp: f64,
}

impl ConceptStats {
    pub fn new(descendants: u64, height: u32) -> Result<Self, DensityError> {
        Ok(ConceptStats {
            descendants,
            height,
            nhyp: solve_nhyp(descendants, height)?,
        })
    }
}

/// One entry of a lemma's ordered sense list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SenseEntry {
    pub number: u32,
    pub concept: Concept,
    pub key: String,
}

/// Immutable, fully indexed noun taxonomy.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    synsets: Vec<Synset>,
    by_id: HashMap<SynsetId, Concept>,
    hypernyms: Vec<Vec<Concept>>,
    hyponyms: Vec<Vec<Concept>>,
    senses: HashMap<String, Vec<SenseEntry>>,
    folded: HashMap<String, String>,
    /// Inclusive ancestor sets, sorted by handle.
    ancestors: Vec<Box<[Concept]>>,
    stats: Vec<ConceptStats>,
    warnings: Vec<String>,
}

/// Parse a taxonomy in the interchange format.
pub fn load_taxonomy<R: BufRead>(source: R) -> Result<Taxonomy, TaxonomyError> {
    Taxonomy::from_reader(source)
}

impl Taxonomy {
    pub fn from_reader<R: BufRead>(mut source: R) -> Result<Self, TaxonomyError> {
        let mut builder = TaxonomyBuilder::default();
        let mut buf = Vec::new();
        let mut line_no = 0;
        loop {
            buf.clear();
            if source.read_until(b'\n', &mut buf)? == 0 {
                break;
            }
            line_no += 1;
            let line = std::str::from_utf8(&buf).map_err(|_| TaxonomyError::Encoding { line: line_no })?;
            builder.parse_line(line_no, line.trim_end_matches(['\n', '\r']))?;
        }
        builder.build()
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn concepts(&self) -> impl ExactSizeIterator<Item = Concept> {
        (0..self.synsets.len()).map(Concept::from_index)
    }

    pub fn concept(&self, id: &str) -> Option<Concept> {
        self.by_id.get(id).copied()
    }

    fn require(&self, id: &str) -> Result<Concept, TaxonomyError> {
        self.concept(id)
            .ok_or_else(|| TaxonomyError::UnknownSynset(id.to_string()))
    }

    pub fn id(&self, c: Concept) -> &SynsetId {
        &self.synsets[c.index()].id
    }

    pub fn synset(&self, c: Concept) -> &Synset {
        &self.synsets[c.index()]
    }

    pub fn hypernyms(&self, c: Concept) -> &[Concept] {
        &self.hypernyms[c.index()]
    }

    pub fn hyponyms(&self, c: Concept) -> &[Concept] {
        &self.hyponyms[c.index()]
    }

    pub fn stats(&self, c: Concept) -> &ConceptStats {
        &self.stats[c.index()]
    }

    /// Inclusive ancestors of `c`, sorted by handle.
    pub fn ancestor_concepts(&self, c: Concept) -> &[Concept] {
        &self.ancestors[c.index()]
    }

    /// True when `sense` lies in the subhierarchy rooted at `c` (or is `c`).
    pub fn is_under(&self, sense: Concept, c: Concept) -> bool {
        self.ancestors[sense.index()].binary_search(&c).is_ok()
    }

    /// Every synset in the subhierarchy of `c`, `c` included, by traversal.
    pub fn descendant_concepts(&self, c: Concept) -> BTreeSet<Concept> {
        let mut seen = BTreeSet::from([c]);
        let mut queue = VecDeque::from([c]);
        while let Some(n) = queue.pop_front() {
            for &h in self.hyponyms(n) {
                if seen.insert(h) {
                    queue.push_back(h);
                }
            }
        }
        seen
    }

    pub fn descendants(&self, id: &str) -> Result<u64, TaxonomyError> {
        Ok(self.stats(self.require(id)?).descendants)
    }

    pub fn height(&self, id: &str) -> Result<u32, TaxonomyError> {
        Ok(self.stats(self.require(id)?).height)
    }

    pub fn nhyp(&self, id: &str) -> Result<f64, TaxonomyError> {
        Ok(self.stats(self.require(id)?).nhyp)
    }

    /// All synsets reachable through zero or more hypernym links.
    pub fn ancestors(&self, id: &str) -> Result<BTreeSet<SynsetId>, TaxonomyError> {
        let c = self.require(id)?;
        Ok(self.ancestor_concepts(c).iter().map(|&a| self.id(a).clone()).collect())
    }

    /// Ordered senses of a lemma. Falls back to a case-insensitive match
    /// when the exact spelling is absent (`Police_Department`).
    pub fn senses(&self, lemma: &str) -> Option<&[SenseEntry]> {
        self.senses
            .get(lemma)
            .or_else(|| self.folded.get(&lemma.to_lowercase()).and_then(|l| self.senses.get(l)))
            .map(Vec::as_slice)
    }

    /// Spelling under which `lemma` is stored in the sense index.
    pub fn canonical_lemma(&self, lemma: &str) -> Option<&str> {
        match self.senses.get_key_value(lemma) {
            Some((k, _)) => Some(k.as_str()),
            None => self.folded.get(&lemma.to_lowercase()).map(String::as_str),
        }
    }

    pub fn sense_count(&self, lemma: &str) -> usize {
        self.senses(lemma).map_or(0, <[SenseEntry]>::len)
    }

    pub fn contains_lemma(&self, lemma: &str) -> bool {
        self.senses(lemma).is_some()
    }

    /// Resolve a (lemma, sense key) pair to the synset it names.
    pub fn sense_by_key(&self, lemma: &str, key: &str) -> Option<Concept> {
        self.senses(lemma)?.iter().find(|s| s.key == key).map(|s| s.concept)
    }

    pub fn sense_key(&self, lemma: &str, c: Concept) -> Option<&str> {
        self.senses(lemma)?
            .iter()
            .find(|s| s.concept == c)
            .map(|s| s.key.as_str())
    }

    pub fn lemma_count(&self) -> usize {
        self.senses.len()
    }

    /// Distinct lemmas across all synset word lists.
    pub fn word_count(&self) -> usize {
        self.synsets
            .iter()
            .flat_map(|s| s.words.iter())
            .collect::<BTreeSet<_>>()
            .len()
    }

    pub fn roots(&self) -> impl Iterator<Item = Concept> + '_ {
        self.concepts().filter(|&c| self.hypernyms(c).is_empty())
    }

    pub fn max_height(&self) -> u32 {
        self.stats.iter().map(|s| s.height).max().unwrap_or(0)
    }

    /// Number of concepts per subhierarchy height.
    pub fn height_histogram(&self) -> BTreeMap<u32, usize> {
        let mut hist = BTreeMap::new();
        for s in &self.stats {
            *hist.entry(s.height).or_insert(0) += 1;
        }
        hist
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

impl std::str::FromStr for Taxonomy {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Taxonomy::from_reader(s.as_bytes())
    }
}

#[derive(Debug)]
struct PendingSense {
    lemma: String,
    number: u32,
    synset: String,
    key: String,
}

/// Incremental construction of a [`Taxonomy`]; validation and statistics
/// happen in [`TaxonomyBuilder::build`].
#[derive(Debug, Default)]
pub struct TaxonomyBuilder {
    synsets: Vec<Synset>,
    by_id: HashMap<SynsetId, Concept>,
    senses: Vec<PendingSense>,
}

impl TaxonomyBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_synset<I, W>(
        &mut self,
        id: &str,
        hypernyms: I,
        words: W,
        gloss: Option<&str>,
    ) -> Result<&mut Self, TaxonomyError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
        W: IntoIterator,
        W::Item: AsRef<str>,
    {
        let sid = SynsetId::new(id).ok_or_else(|| TaxonomyError::Syntax {
            line: 0,
            column: 0,
            message: "empty synset id".into(),
        })?;
        if self.by_id.contains_key(id) {
            return Err(TaxonomyError::DuplicateSynset { id: id.to_string() });
        }
        let hypernyms = hypernyms
            .into_iter()
            .filter_map(|h| SynsetId::new(h.as_ref()))
            .collect();
        let words = words.into_iter().map(|w| w.as_ref().to_string()).collect();
        self.by_id.insert(sid.clone(), Concept::from_index(self.synsets.len()));
        self.synsets.push(Synset {
            id: sid,
            hypernyms,
            words,
            gloss: gloss.map(str::to_string),
            sense_keys: Vec::new(),
        });
        Ok(self)
    }

    pub fn add_sense(&mut self, lemma: &str, number: u32, synset: &str, key: &str) -> &mut Self {
        self.senses.push(PendingSense {
            lemma: lemma.to_string(),
            number,
            synset: synset.to_string(),
            key: key.to_string(),
        });
        self
    }

    fn parse_line(&mut self, line_no: usize, line: &str) -> Result<(), TaxonomyError> {
        if line.trim().is_empty() || line.starts_with('#') {
            return Ok(());
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let column_of = |i: usize| -> usize { fields[..i].iter().map(|f| f.chars().count() + 1).sum::<usize>() + 1 };
        let err = |i: usize, message: String| TaxonomyError::Syntax {
            line: line_no,
            column: column_of(i),
            message,
        };
        match fields[0] {
            "SYNSET" => {
                if !(4..=5).contains(&fields.len()) {
                    return Err(err(
                        0,
                        format!("SYNSET record needs 4 or 5 fields, found {}", fields.len()),
                    ));
                }
                if fields[1].is_empty() {
                    return Err(err(1, "empty synset id".into()));
                }
                let hypernyms = split_list(fields[2]);
                if hypernyms.iter().any(|h| h.is_empty()) {
                    return Err(err(2, "empty entry in hypernym list".into()));
                }
                let words = split_list(fields[3]);
                if words.is_empty() || words.iter().any(|w| w.is_empty()) {
                    return Err(err(3, "synset needs at least one non-empty lemma".into()));
                }
                let gloss = fields.get(4).copied().filter(|g| !g.is_empty());
                self.add_synset(fields[1], hypernyms, words, gloss)?;
            }
            "SENSE" => {
                if fields.len() != 5 {
                    return Err(err(0, format!("SENSE record needs 5 fields, found {}", fields.len())));
                }
                if fields[1].is_empty() {
                    return Err(err(1, "empty lemma".into()));
                }
                let number: u32 = fields[2]
                    .parse()
                    .ok()
                    .filter(|&n| n >= 1)
                    .ok_or_else(|| err(2, format!("bad sense number `{}`", fields[2])))?;
                if fields[3].is_empty() {
                    return Err(err(3, "empty synset id".into()));
                }
                if fields[4].is_empty() {
                    return Err(err(4, "empty sense key".into()));
                }
                self.add_sense(fields[1], number, fields[3], fields[4]);
            }
            other => return Err(err(0, format!("unknown record type `{other}`"))),
        }
        Ok(())
    }

    pub fn build(self) -> Result<Taxonomy, TaxonomyError> {
        let TaxonomyBuilder {
            mut synsets,
            by_id,
            senses: pending,
        } = self;
        let n = synsets.len();

        let mut hypernyms = vec![Vec::new(); n];
        let mut hyponyms = vec![Vec::new(); n];
        for (i, s) in synsets.iter().enumerate() {
            for h in &s.hypernyms {
                let p = *by_id.get(h).ok_or_else(|| TaxonomyError::DanglingHypernym {
                    synset: s.id.to_string(),
                    hypernym: h.to_string(),
                })?;
                let c = Concept::from_index(i);
                if !hypernyms[i].contains(&p) {
                    hypernyms[i].push(p);
                    hyponyms[p.index()].push(c);
                }
            }
        }

        let order = topological_order(&synsets, &hypernyms)?;

        let mut ancestors: Vec<Box<[Concept]>> = vec![Box::default(); n];
        for &c in &order {
            let mut set = vec![c];
            for &p in &hypernyms[c.index()] {
                set.extend_from_slice(&ancestors[p.index()]);
            }
            set.sort_unstable();
            set.dedup();
            ancestors[c.index()] = set.into_boxed_slice();
        }

        let mut descendants = vec![0u64; n];
        for set in &ancestors {
            for a in set.iter() {
                descendants[a.index()] += 1;
            }
        }

        let mut height = vec![1u32; n];
        for &c in order.iter().rev() {
            if let Some(h) = hyponyms[c.index()].iter().map(|k| height[k.index()]).max() {
                height[c.index()] = h + 1;
            }
        }

        let mut stats = Vec::with_capacity(n);
        for i in 0..n {
            stats.push(ConceptStats::new(descendants[i], height[i])?);
        }

        let mut warnings = Vec::new();
        if n == 0 {
            warnings.push("taxonomy has 0 synsets".to_string());
        }
        let tall = height.iter().filter(|&&h| h > MAX_EXPECTED_HEIGHT).count();
        if tall > 0 {
            warnings.push(format!(
                "{tall} concept(s) exceed height {MAX_EXPECTED_HEIGHT}, deeper than any WordNet noun hierarchy"
            ));
        }

        let mut senses: HashMap<String, Vec<SenseEntry>> = HashMap::new();
        for p in pending {
            let concept = *by_id
                .get(p.synset.as_str())
                .ok_or_else(|| TaxonomyError::DanglingSense {
                    lemma: p.lemma.clone(),
                    number: p.number,
                    synset: p.synset.clone(),
                })?;
            let synset = &mut synsets[concept.index()];
            if !synset.words.iter().any(|w| w.eq_ignore_ascii_case(&p.lemma)) {
                return Err(TaxonomyError::SenseLemmaMismatch {
                    lemma: p.lemma,
                    number: p.number,
                    synset: p.synset,
                });
            }
            let list = senses.entry(p.lemma.clone()).or_default();
            let duplicate = if list.iter().any(|e| e.number == p.number) {
                Some(format!("sense number {} repeated", p.number))
            } else if list.iter().any(|e| e.concept == concept) {
                Some(format!("synset `{}` listed twice", p.synset))
            } else if list.iter().any(|e| e.key == p.key) {
                Some(format!("sense key `{}` repeated", p.key))
            } else {
                None
            };
            if let Some(detail) = duplicate {
                return Err(TaxonomyError::DuplicateSense { lemma: p.lemma, detail });
            }
            synset.sense_keys.push((p.lemma.clone(), p.key.clone()));
            list.push(SenseEntry {
                number: p.number,
                concept,
                key: p.key,
            });
        }
        for list in senses.values_mut() {
            list.sort_by_key(|e| e.number);
        }

        let mut folded = HashMap::new();
        let mut lemmas: Vec<&String> = senses.keys().collect();
        lemmas.sort();
        for lemma in lemmas {
            folded.entry(lemma.to_lowercase()).or_insert_with(|| lemma.clone());
        }

        Ok(Taxonomy {
            synsets,
            by_id,
            hypernyms,
            hyponyms,
            senses,
            folded,
            ancestors,
            stats,
            warnings,
        })
    }
}

fn split_list(field: &str) -> Vec<&str> {
    if field.is_empty() {
        Vec::new()
    } else {
        field.split(',').map(str::trim).collect()
    }
}

/// Parents-first ordering; fails with one concrete cycle when none exists.
fn topological_order(synsets: &[Synset], hypernyms: &[Vec<Concept>]) -> Result<Vec<Concept>, TaxonomyError> {
    let n = synsets.len();
    let mut pending: Vec<usize> = hypernyms.iter().map(Vec::len).collect();
    let mut children = vec![Vec::new(); n];
    for (i, parents) in hypernyms.iter().enumerate() {
        for p in parents {
            children[p.index()].push(i);
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&i| pending[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(i) = queue.pop_front() {
        order.push(Concept::from_index(i));
        for &k in &children[i] {
            pending[k] -= 1;
            if pending[k] == 0 {
                queue.push_back(k);
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }

    // Every unplaced node still has an unplaced parent, so walking upward
    // from any of them must revisit a node.
    let start = (0..n).find(|&i| pending[i] > 0).expect("unplaced node");
    let mut position = HashMap::new();
    let mut path = Vec::new();
    let mut cur = start;
    while !position.contains_key(&cur) {
        position.insert(cur, path.len());
        path.push(cur);
        cur = hypernyms[cur]
            .iter()
            .map(|p| p.index())
            .find(|&p| pending[p] > 0)
            .expect("unplaced parent");
    }
    let cycle = path[position[&cur]..]
        .iter()
        .chain(std::iter::once(&cur))
        .map(|&i| synsets[i].id.to_string())
        .collect();
    Err(TaxonomyError::Cycle { cycle })
}
