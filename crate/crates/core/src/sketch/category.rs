//! Bounded generation of the category presented by a sketch.
//!
//! Arrows are classes of composable words of length at most the depth budget,
//! quotiented by the sketch's potential composites and identities with a
//! union-find. Every union is recorded so that identifications can be replayed
//! as a chain of single rewrites.

use std::collections::{BTreeMap, HashMap, VecDeque};

use super::LimitSketch;

/// A composable path of sketch arrows, first-applied arrow first.
pub type Word = Vec<String>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RewriteStep {
    /// `first` then `second` contracted to `composite` at `position`.
    Composite {
        from: Word,
        to: Word,
        position: usize,
        composite: String,
    },
    /// Potential identity `arrow` removed at `position`.
    Identity {
        from: Word,
        to: Word,
        position: usize,
        arrow: String,
    },
}

impl RewriteStep {
    pub fn words(&self) -> (&Word, &Word) {
        match self {
            RewriteStep::Composite { from, to, .. } | RewriteStep::Identity { from, to, .. } => {
                (from, to)
            }
        }
    }

    /// Re-checks the step against the sketch's declared equations.
    pub fn verify(&self, sketch: &LimitSketch) -> bool {
        match self {
            RewriteStep::Composite {
                from,
                to,
                position,
                composite,
            } => {
                let i = *position;
                i + 1 < from.len()
                    && sketch.composites.iter().any(|c| {
                        &c.composite == composite && from[i] == c.first && from[i + 1] == c.second
                    })
                    && to[..i] == from[..i]
                    && to.get(i) == Some(composite)
                    && to[i + 1..] == from[i + 2..]
            }
            RewriteStep::Identity {
                from,
                to,
                position,
                arrow,
            } => {
                let i = *position;
                i < from.len()
                    && &from[i] == arrow
                    && sketch.identities.iter().any(|(a, _)| a == arrow)
                    && to[..i] == from[..i]
                    && to[i..] == from[i + 1..]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryArrow {
    pub name: String,
    pub source: String,
    pub target: String,
    /// Shortlex-least word of the class.
    pub representative: Word,
    pub members: Vec<Word>,
    /// Some frontier extension of this class could not be resolved within the budget.
    pub truncated: bool,
}

#[derive(Debug, Clone)]
pub struct PresentedCategory {
    pub objects: Vec<String>,
    pub arrows: Vec<CategoryArrow>,
    pub depth_budget: usize,
    /// `(f, g) -> g∘f` for composable pairs whose composite is resolvable.
    pub composition: BTreeMap<(usize, usize), usize>,
    pub identities: BTreeMap<String, usize>,
    words: HashMap<(String, Word), usize>,
    class_of_word: Vec<usize>,
    word_list: Vec<(String, Word)>,
    edges: Vec<Vec<(usize, usize)>>,
    steps: Vec<RewriteStep>,
}

/// Canonical name of a word: `h∘g∘f` for `[f, g, h]`, `id_X` for the empty word at `X`.
pub fn word_name(source: &str, word: &[String]) -> String {
    if word.is_empty() {
        return format!("id_{source}");
    }
    word.iter().rev().cloned().collect::<Vec<_>>().join("∘")
}

fn shortlex(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// One-step contractions of `word`: composite contractions and identity removals.
fn contractions(sketch: &LimitSketch, word: &[String]) -> Vec<(Word, RewriteStep)> {
    let mut out = Vec::new();
    for i in 0..word.len() {
        if i + 1 < word.len() {
            for c in &sketch.composites {
                if word[i] == c.first && word[i + 1] == c.second {
                    let mut to: Word = word[..i].to_vec();
                    to.push(c.composite.clone());
                    to.extend_from_slice(&word[i + 2..]);
                    out.push((
                        to.clone(),
                        RewriteStep::Composite {
                            from: word.to_vec(),
                            to,
                            position: i,
                            composite: c.composite.clone(),
                        },
                    ));
                }
            }
        }
        if sketch.identities.iter().any(|(a, _)| a == &word[i]) {
            let mut to: Word = word[..i].to_vec();
            to.extend_from_slice(&word[i + 1..]);
            out.push((
                to.clone(),
                RewriteStep::Identity {
                    from: word.to_vec(),
                    to,
                    position: i,
                    arrow: word[i].clone(),
                },
            ));
        }
    }
    out
}

/// Generates the presented category up to words of length `depth_budget`.
///
/// Truncation is never an error here: classes whose frontier extensions cannot
/// be resolved inside the budget carry `truncated = true`.
pub fn generate_category(sketch: &LimitSketch, depth_budget: usize) -> PresentedCategory {
    let depth_budget = depth_budget.max(1);
    let mut word_list: Vec<(String, Word)> = Vec::new();
    let mut words: HashMap<(String, Word), usize> = HashMap::new();
    let mut targets: Vec<String> = Vec::new();

    let mut frontier: Vec<usize> = Vec::new();
    for p in sketch.sorted_points() {
        let key = (p.to_string(), Vec::new());
        words.insert(key.clone(), word_list.len());
        frontier.push(word_list.len());
        word_list.push(key);
        targets.push(p.to_string());
    }
    for _ in 0..depth_budget {
        let mut next = Vec::new();
        for &w in &frontier {
            let (src, word) = word_list[w].clone();
            let end = targets[w].clone();
            let mut outgoing: Vec<_> = sketch.arrows_from(&end).collect();
            outgoing.sort_by(|a, b| a.name.cmp(&b.name));
            for a in outgoing {
                let mut ext = word.clone();
                ext.push(a.name.clone());
                let key = (src.clone(), ext);
                words.insert(key.clone(), word_list.len());
                next.push(word_list.len());
                word_list.push(key);
                targets.push(a.target.clone());
            }
        }
        frontier = next;
    }

    let n = word_list.len();
    let mut uf = UnionFind::new(n);
    let mut edges = vec![Vec::new(); n];
    let mut steps = Vec::new();
    for w in 0..n {
        let (src, word) = &word_list[w];
        for (to, step) in contractions(sketch, word) {
            if let Some(&t) = words.get(&(src.clone(), to)) {
                uf.union(w, t);
                let id = steps.len();
                steps.push(step);
                edges[w].push((t, id));
                edges[t].push((w, id));
            }
        }
    }

    // Classes ordered by representative so that ids are deterministic.
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for w in 0..n {
        members.entry(uf.find(w)).or_default().push(w);
    }
    let mut classes: Vec<Vec<usize>> = members.into_values().collect();
    for c in &mut classes {
        c.sort_by(|&a, &b| {
            word_list[a]
                .0
                .cmp(&word_list[b].0)
                .then(shortlex(&word_list[a].1, &word_list[b].1))
        });
    }
    classes.sort_by(|a, b| {
        let (sa, wa) = &word_list[a[0]];
        let (sb, wb) = &word_list[b[0]];
        sa.cmp(sb).then(shortlex(wa, wb))
    });

    let mut class_of_word = vec![0; n];
    let mut arrows = Vec::new();
    for (id, class) in classes.iter().enumerate() {
        for &w in class {
            class_of_word[w] = id;
        }
        let (src, rep) = &word_list[class[0]];
        arrows.push(CategoryArrow {
            name: word_name(src, rep),
            source: src.clone(),
            target: targets[class[0]].clone(),
            representative: rep.clone(),
            members: class.iter().map(|&w| word_list[w].1.clone()).collect(),
            truncated: false,
        });
    }

    for w in 0..n {
        let (src, word) = &word_list[w];
        if word.len() != depth_budget {
            continue;
        }
        for a in sketch.arrows_from(&targets[w]) {
            let mut ext = word.clone();
            ext.push(a.name.clone());
            let resolved = contractions(sketch, &ext)
                .into_iter()
                .any(|(to, _)| words.contains_key(&(src.clone(), to)));
            if !resolved {
                arrows[class_of_word[w]].truncated = true;
            }
        }
    }

    let mut identities = BTreeMap::new();
    for p in sketch.sorted_points() {
        identities.insert(
            p.to_string(),
            class_of_word[words[&(p.to_string(), Vec::new())]],
        );
    }

    let mut cat = PresentedCategory {
        objects: sketch
            .sorted_points()
            .into_iter()
            .map(str::to_string)
            .collect(),
        arrows,
        depth_budget,
        composition: BTreeMap::new(),
        identities,
        words,
        class_of_word,
        word_list,
        edges,
        steps,
    };
    let mut composition = BTreeMap::new();
    for f in 0..cat.arrows.len() {
        for g in 0..cat.arrows.len() {
            if cat.arrows[f].target != cat.arrows[g].source {
                continue;
            }
            let mut word = cat.arrows[f].representative.clone();
            word.extend(cat.arrows[g].representative.iter().cloned());
            if let Some(h) = cat.class_of(&cat.arrows[f].source, &word) {
                composition.insert((f, g), h);
            }
        }
    }
    cat.composition = composition;
    cat
}

impl PresentedCategory {
    /// Class of a word from `source`, contracting greedily if it exceeds the budget.
    pub fn class_of(&self, source: &str, word: &[String]) -> Option<usize> {
        if let Some(&w) = self.words.get(&(source.to_string(), word.to_vec())) {
            return Some(self.class_of_word[w]);
        }
        None
    }

    /// Class of `word`, trying contractions when the word is longer than the budget.
    pub fn resolve(&self, sketch: &LimitSketch, source: &str, word: &[String]) -> Option<usize> {
        let mut queue = VecDeque::from([word.to_vec()]);
        let mut seen = 0usize;
        while let Some(w) = queue.pop_front() {
            if let Some(c) = self.class_of(source, &w) {
                return Some(c);
            }
            seen += 1;
            if seen > 256 {
                return None;
            }
            for (to, _) in contractions(sketch, &w) {
                queue.push_back(to);
            }
        }
        None
    }

    pub fn compose(&self, first: usize, second: usize) -> Option<usize> {
        self.composition.get(&(first, second)).copied()
    }

    pub fn arrow_by_name(&self, source: &str, name: &str) -> Option<usize> {
        self.arrows
            .iter()
            .position(|a| a.source == source && a.name == name)
    }

    /// Arrow classes `source -> target`, ordered by name.
    pub fn hom(&self, source: &str, target: &str) -> Vec<usize> {
        let mut out: Vec<usize> = (0..self.arrows.len())
            .filter(|&i| self.arrows[i].source == source && self.arrows[i].target == target)
            .collect();
        out.sort_by(|&a, &b| self.arrows[a].name.cmp(&self.arrows[b].name));
        out
    }

    pub fn is_truncated_from(&self, source: &str) -> bool {
        self.arrows
            .iter()
            .any(|a| a.source == source && a.truncated)
    }

    /// A replayable chain of single rewrites between two words of one class.
    pub fn certificate(
        &self,
        source: &str,
        a: &[String],
        b: &[String],
    ) -> Option<Vec<RewriteStep>> {
        let start = *self.words.get(&(source.to_string(), a.to_vec()))?;
        let goal = *self.words.get(&(source.to_string(), b.to_vec()))?;
        let mut prev: HashMap<usize, (usize, usize)> = HashMap::new();
        let mut queue = VecDeque::from([start]);
        let mut visited = vec![false; self.word_list.len()];
        visited[start] = true;
        while let Some(w) = queue.pop_front() {
            if w == goal {
                let mut path = Vec::new();
                let mut cur = goal;
                while cur != start {
                    let (p, step) = prev[&cur];
                    path.push(self.steps[step].clone());
                    cur = p;
                }
                path.reverse();
                return Some(path);
            }
            for &(t, step) in &self.edges[w] {
                if !visited[t] {
                    visited[t] = true;
                    prev.insert(t, (w, step));
                    queue.push_back(t);
                }
            }
        }
        None
    }
}
