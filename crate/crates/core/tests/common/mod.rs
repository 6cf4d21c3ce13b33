//! Test-only generators and brute-force oracles. Nothing here calls the
//! engine's lattice or precomputed statistics.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use cdwsd::density::{conceptual_density, DensityParams};
use cdwsd::{ConceptStats, Status, Taxonomy};
use rand::seq::SliceRandom;
use rand::Rng;

pub const SAMPLE: &str = include_str!("../data/sample.tax");
pub const SAMPLE_GOLD: &str = include_str!("../data/sample_gold.sem");
pub const SAMPLE_LEMMAS: &str = include_str!("../data/sample_lemmas.txt");
pub const HIERARCHY_A: &str = include_str!("../data/hierarchy_a.tax");
pub const HIERARCHY_B: &str = include_str!("../data/hierarchy_b.tax");

pub fn sample() -> Taxonomy {
    SAMPLE.parse().expect("sample fixture")
}

/// Shape knobs for [`random_taxonomy`].
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub synsets: usize,
    pub max_parents: usize,
    /// Chance that a node after the first becomes an extra root.
    pub root_chance: f64,
    pub lemmas: usize,
    pub max_senses: usize,
}

impl Shape {
    pub fn small(synsets: usize) -> Self {
        Shape {
            synsets,
            max_parents: 3,
            root_chance: 0.05,
            lemmas: (synsets / 3).max(1),
            max_senses: 4,
        }
    }
}

/// Random DAG in the interchange format. Parents always precede children,
/// so the result is acyclic; multiple inheritance and several roots occur.
pub fn random_taxonomy<R: Rng>(rng: &mut R, shape: Shape) -> String {
    let n = shape.synsets.max(1);
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, ps) in parents.iter_mut().enumerate().skip(1) {
        if rng.gen_bool(shape.root_chance) {
            continue;
        }
        let k = rng.gen_range(1..=shape.max_parents.min(i));
        let mut chosen = BTreeSet::new();
        for _ in 0..k {
            // bias towards recent nodes for deeper chains
            let lo = i.saturating_sub(rng.gen_range(1..=i.min(12)).max(1) * 3).min(i - 1);
            chosen.insert(rng.gen_range(lo..i));
        }
        ps.extend(chosen);
    }
    let mut words: Vec<Vec<String>> = (0..n).map(|i| vec![format!("w{i}")]).collect();
    let mut senses = String::new();
    for l in 0..shape.lemmas {
        let lemma = format!("lem{l}");
        let k = rng.gen_range(1..=shape.max_senses.min(n));
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(rng);
        for (num, &s) in ids[..k].iter().enumerate() {
            words[s].push(lemma.clone());
            let _ = writeln!(senses, "SENSE\t{lemma}\t{}\ts{s}\tnoun.test.{num}", num + 1);
        }
    }
    let mut out = String::new();
    for i in 0..n {
        let ps: Vec<String> = parents[i].iter().map(|p| format!("s{p}")).collect();
        let _ = writeln!(out, "SYNSET\ts{i}\t{}\t{}", ps.join(","), words[i].join(","));
    }
    out.push_str(&senses);
    out
}

/// Lemmas of a taxonomy that have senses, sorted.
pub fn lemmas(t: &Taxonomy) -> Vec<String> {
    let mut all: BTreeSet<String> = BTreeSet::new();
    for c in t.concepts() {
        for (l, _) in &t.synset(c).sense_keys {
            all.insert(l.clone());
        }
    }
    all.into_iter().collect()
}

/// Adjacency rebuilt from the raw synset records.
pub struct Graph {
    pub parents: HashMap<String, Vec<String>>,
    pub children: HashMap<String, Vec<String>>,
}

impl Graph {
    pub fn of(t: &Taxonomy) -> Self {
        let mut parents = HashMap::new();
        let mut children: HashMap<String, Vec<String>> = HashMap::new();
        for c in t.concepts() {
            let s = t.synset(c);
            let id = s.id.to_string();
            children.entry(id.clone()).or_default();
            let ps: Vec<String> = s.hypernyms.iter().map(|h| h.to_string()).collect();
            for p in &ps {
                children.entry(p.clone()).or_default().push(id.clone());
            }
            parents.insert(id, ps);
        }
        Graph { parents, children }
    }

    fn reach(&self, start: &str, edges: &HashMap<String, Vec<String>>) -> BTreeSet<String> {
        let mut seen = BTreeSet::from([start.to_string()]);
        let mut queue = VecDeque::from([start.to_string()]);
        while let Some(n) = queue.pop_front() {
            for m in &edges[&n] {
                if seen.insert(m.clone()) {
                    queue.push_back(m.clone());
                }
            }
        }
        seen
    }

    pub fn descendants(&self, id: &str) -> BTreeSet<String> {
        self.reach(id, &self.children)
    }

    pub fn ancestors(&self, id: &str) -> BTreeSet<String> {
        self.reach(id, &self.parents)
    }

    /// Longest downward chain, counting `id` as level 1.
    pub fn height(&self, id: &str) -> u32 {
        fn go(g: &Graph, id: &str, memo: &mut HashMap<String, u32>) -> u32 {
            if let Some(&h) = memo.get(id) {
                return h;
            }
            let h = 1 + g.children[id].iter().map(|c| go(g, c, memo)).max().unwrap_or(0);
            memo.insert(id.to_string(), h);
            h
        }
        go(self, id, &mut HashMap::new())
    }

    pub fn stats(&self, id: &str) -> ConceptStats {
        ConceptStats::new(self.descendants(id).len() as u64, self.height(id)).unwrap()
    }
}

/// Brute-force evaluation of one window: everything is recomputed from the
/// raw graph on every iteration. Returns the target's status and the
/// synset ids of its remaining senses in sense order.
pub fn naive_window(t: &Taxonomy, window: &[&str], target: usize, params: &DensityParams) -> (Status, Vec<String>) {
    let g = Graph::of(t);
    let mut live: Vec<Vec<String>> = window
        .iter()
        .map(|l| {
            t.senses(l)
                .unwrap()
                .iter()
                .map(|s| t.id(s.concept).to_string())
                .collect()
        })
        .collect();
    let original: Vec<usize> = live.iter().map(Vec::len).collect();
    let mut blocked: HashSet<String> = HashSet::new();
    loop {
        let mut marks: BTreeMap<String, usize> = BTreeMap::new();
        for senses in &live {
            for s in senses.iter().filter(|s| !blocked.contains(*s)) {
                for a in g.ancestors(s) {
                    if !blocked.contains(&a) {
                        *marks.entry(a).or_default() += 1;
                    }
                }
            }
        }
        let mut best: Option<(f64, usize, u64, String)> = None;
        for (c, &m) in &marks {
            if m < 2 {
                continue;
            }
            let stats = g.stats(c);
            let cd = conceptual_density(&stats, m, params).unwrap();
            let better = match &best {
                None => true,
                Some((bcd, bm, bd, bid)) => {
                    cd > *bcd
                        || (cd == *bcd && m > *bm)
                        || (cd == *bcd && m == *bm && stats.descendants < *bd)
                        || (cd == *bcd && m == *bm && stats.descendants == *bd && c < bid)
                }
            };
            if better {
                best = Some((cd, m, stats.descendants, c.clone()));
            }
        }
        let Some((_, _, _, chosen)) = best else { break };
        let below = g.descendants(&chosen);
        for senses in &mut live {
            if senses.iter().any(|s| below.contains(s)) {
                senses.retain(|s| below.contains(s));
            }
        }
        blocked.extend(below);
    }
    let remaining = live[target].clone();
    let status = if remaining.len() == 1 {
        Status::Resolved
    } else if remaining.len() < original[target] {
        Status::Reduced
    } else {
        Status::Unresolved
    };
    (status, remaining)
}

/// WordNet-like tree with `n` synsets: a few roots, fan-out 2..=max_fanout
/// until the budget runs out, occasional second parents, and `lemmas`
/// lemmas with 1..=max_senses senses each.
pub fn wide_taxonomy<R: Rng>(rng: &mut R, n: usize, lemmas: usize, max_senses: usize) -> String {
    let roots = 9.min(n);
    let mut parents: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut queue: VecDeque<usize> = (0..roots).collect();
    let mut next = roots;
    while next < n {
        let p = queue.pop_front().unwrap_or_else(|| rng.gen_range(0..next));
        let fan = rng.gen_range(2..=7);
        for _ in 0..fan {
            if next >= n {
                break;
            }
            parents[next].push(p);
            if next > 100 && rng.gen_bool(0.02) {
                let extra = rng.gen_range(0..next);
                if extra != p && !parents[extra].is_empty() {
                    parents[next].push(extra);
                }
            }
            queue.push_back(next);
            next += 1;
        }
    }
    let mut words: Vec<Vec<String>> = (0..n).map(|i| vec![format!("w{i}")]).collect();
    let mut senses = String::new();
    for l in 0..lemmas {
        let lemma = format!("noun{l}");
        let k = rng.gen_range(1..=max_senses);
        let mut picked = BTreeSet::new();
        while picked.len() < k {
            picked.insert(rng.gen_range(roots..n));
        }
        for (num, s) in picked.into_iter().enumerate() {
            words[s].push(lemma.clone());
            let _ = writeln!(senses, "SENSE\t{lemma}\t{}\ts{s}\tnoun.gen.{num}", num + 1);
        }
    }
    let mut out = String::with_capacity(n * 32);
    for i in 0..n {
        let ps: Vec<String> = parents[i].iter().map(|p| format!("s{p}")).collect();
        let _ = writeln!(out, "SYNSET\ts{i}\t{}\t{}", ps.join(","), words[i].join(","));
    }
    out.push_str(&senses);
    out
}
