//! Labeled unrooted trees: construction, vertex removal, canonical forms and
//! exhaustive enumeration of small unlabeled shapes.
//!
//! Vertex labels are 1-based everywhere.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest `n` accepted by [`all_trees`].
pub const MAX_ENUMERATED: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a tree needs at least one vertex")]
    Empty,
    #[error("expected {expected} edges for {n} vertices, got {got}")]
    EdgeCount { n: usize, expected: usize, got: usize },
    #[error("vertex {0} is not a valid label")]
    InvalidVertex(usize),
    #[error("self loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("edges do not connect all vertices")]
    Disconnected,
    #[error("a spider needs at least one leg")]
    NoLegs,
    #[error("spider legs must have positive length")]
    ZeroLeg,
    #[error("n = {n} is outside the supported range 1..={max}")]
    OutOfRange { n: usize, max: usize },
    #[error("malformed tree spec token `{token}`: {reason}")]
    Parse { token: String, reason: String },
}

/// A labeled unrooted tree on vertices `1..=n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Tree {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl fmt::Debug for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Tree(n={}, edges={:?})", self.n, self.edges)
    }
}

impl Tree {
    /// Validates and builds a tree. Edges are stored as `(min, max)` pairs in the
    /// given order.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Tree, TreeError> {
        if n == 0 {
            return Err(TreeError::Empty);
        }
        if edges.len() != n - 1 {
            return Err(TreeError::EdgeCount {
                n,
                expected: n - 1,
                got: edges.len(),
            });
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut adj = vec![Vec::new(); n];
        let mut normalized = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x == 0 || x > n {
                    return Err(TreeError::InvalidVertex(x));
                }
            }
            if u == v {
                return Err(TreeError::SelfLoop(u));
            }
            let e = (u.min(v), u.max(v));
            if !seen.insert(e) {
                return Err(TreeError::DuplicateEdge(e.0, e.1));
            }
            adj[u - 1].push(v);
            adj[v - 1].push(u);
            normalized.push(e);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let tree = Tree {
            n,
            edges: normalized,
            adj,
        };
        // n - 1 edges plus connectivity implies acyclic.
        if tree.reachable_from(1, None).len() != n {
            return Err(TreeError::Disconnected);
        }
        Ok(tree)
    }

    pub fn single() -> Tree {
        Tree {
            n: 1,
            edges: Vec::new(),
            adj: vec![Vec::new()],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v - 1]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v - 1].len()
    }

    pub fn contains(&self, v: usize) -> bool {
        (1..=self.n).contains(&v)
    }

    fn reachable_from(&self, start: usize, blocked: Option<usize>) -> Vec<usize> {
        let mut seen = vec![false; self.n + 1];
        seen[start] = true;
        if let Some(b) = blocked {
            seen[b] = true;
        }
        let mut out = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &w in self.neighbors(u) {
                if !seen[w] {
                    seen[w] = true;
                    out.push(w);
                    queue.push_back(w);
                }
            }
        }
        out
    }

    /// Subtree induced by `vertices` (assumed connected), relabeled `1..=k` in
    /// increasing order of the original labels. Returns the label map.
    pub fn induced(&self, vertices: &[usize]) -> Result<(Tree, Vec<usize>), TreeError> {
        let mut labels = vertices.to_vec();
        labels.sort_unstable();
        labels.dedup();
        let mut local = vec![0usize; self.n + 1];
        for (i, &v) in labels.iter().enumerate() {
            if !self.contains(v) {
                return Err(TreeError::InvalidVertex(v));
            }
            local[v] = i + 1;
        }
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .filter(|(u, v)| local[*u] != 0 && local[*v] != 0)
            .map(|&(u, v)| (local[u], local[v]))
            .collect();
        let tree = Tree::new(labels.len(), &edges)?;
        Ok((tree, labels))
    }

    /// Removes `v` and returns the remaining connected components.
    pub fn split_at(&self, v: usize) -> Result<ComponentSplit, TreeError> {
        if !self.contains(v) {
            return Err(TreeError::InvalidVertex(v));
        }
        let mut parts: Vec<Vec<usize>> = self
            .neighbors(v)
            .iter()
            .map(|&w| self.reachable_from(w, Some(v)))
            .collect();
        for p in &mut parts {
            p.sort_unstable();
        }
        parts.sort_by_key(|p| p[0]);
        let parts = parts
            .iter()
            .map(|p| {
                let (tree, label_map) = self.induced(p)?;
                Ok(Part { tree, label_map })
            })
            .collect::<Result<Vec<_>, TreeError>>()?;
        Ok(ComponentSplit { removed: v, parts })
    }

    /// Same tree with every label `v` replaced by `perm[v - 1]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Tree, TreeError> {
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u - 1], perm[v - 1]))
            .collect();
        Tree::new(self.n, &edges)
    }

    /// Vertices in path order starting from the end with the smaller label,
    /// or `None` when the tree is not a path.
    pub fn path_order(&self) -> Option<Vec<usize>> {
        if self.n == 1 {
            return Some(vec![1]);
        }
        if self.adj.iter().any(|a| a.len() > 2) {
            return None;
        }
        let start = (1..=self.n).find(|&v| self.degree(v) == 1)?;
        let mut order = Vec::with_capacity(self.n);
        let (mut prev, mut cur) = (0, start);
        loop {
            order.push(cur);
            match self.neighbors(cur).iter().find(|&&w| w != prev) {
                Some(&next) => {
                    prev = cur;
                    cur = next;
                }
                None => break,
            }
        }
        Some(order)
    }

    pub fn is_path(&self) -> bool {
        self.adj.iter().all(|a| a.len() <= 2)
    }

    /// Root of a star `S_n` with `n >= 4`; paths of three or fewer vertices are
    /// treated as paths, not stars.
    pub fn star_root(&self) -> Option<usize> {
        if self.n < 4 {
            return None;
        }
        (1..=self.n).find(|&v| self.degree(v) == self.n - 1)
    }

    /// `(root, legs)` when exactly one vertex has degree three or more. Legs
    /// are sorted in non-increasing order.
    pub fn spider_legs(&self) -> Option<(usize, Vec<usize>)> {
        let mut hubs = (1..=self.n).filter(|&v| self.degree(v) >= 3);
        let root = hubs.next()?;
        if hubs.next().is_some() {
            return None;
        }
        let mut legs: Vec<usize> = self
            .neighbors(root)
            .iter()
            .map(|&w| self.reachable_from(w, Some(root)).len())
            .collect();
        legs.sort_unstable_by(|a, b| b.cmp(a));
        Some((root, legs))
    }

    /// Tree centers via repeated leaf stripping (one or two vertices).
    pub fn centers(&self) -> Vec<usize> {
        if self.n <= 2 {
            return (1..=self.n).collect();
        }
        let mut degree: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        let mut layer: Vec<usize> = (1..=self.n).filter(|&v| degree[v - 1] == 1).collect();
        let mut remaining = self.n;
        while remaining > 2 {
            remaining -= layer.len();
            let mut next = Vec::new();
            for &leaf in &layer {
                for &w in self.neighbors(leaf) {
                    degree[w - 1] -= 1;
                    if degree[w - 1] == 1 {
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        layer.sort_unstable();
        layer
    }

    fn ahu_code(&self, root: usize) -> String {
        let mut parent = vec![0usize; self.n + 1];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([root]);
        parent[root] = usize::MAX;
        while let Some(u) = queue.pop_front() {
            order.push(u);
            for &w in self.neighbors(u) {
                if parent[w] == 0 {
                    parent[w] = u;
                    queue.push_back(w);
                }
            }
        }
        let mut children: Vec<Vec<String>> = vec![Vec::new(); self.n + 1];
        let mut codes: Vec<String> = vec![String::new(); self.n + 1];
        for &u in order.iter().rev() {
            let mut kids = std::mem::take(&mut children[u]);
            kids.sort_unstable();
            let mut code = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
            code.push('(');
            for k in kids {
                code.push_str(&k);
            }
            code.push(')');
            if parent[u] == usize::MAX {
                codes[u] = code;
            } else {
                children[parent[u]].push(code);
            }
        }
        std::mem::take(&mut codes[root])
    }

    /// Canonical encoding of the unlabeled shape.
    pub fn canonical_key(&self) -> TreeKey {
        let code = self
            .centers()
            .into_iter()
            .map(|c| self.ahu_code(c))
            .min()
            .expect("a tree has a center");
        TreeKey(code)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 1 {
            return write!(f, "path:1");
        }
        write!(f, "edges:")?;
        for (i, (u, v)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{u}-{v}")?;
        }
        Ok(())
    }
}

/// One component left after a removal; `label_map[i]` is the original label of
/// local vertex `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub tree: Tree,
    pub label_map: Vec<usize>,
}

impl Part {
    pub fn size(&self) -> usize {
        self.tree.n()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSplit {
    pub removed: usize,
    /// Ordered by smallest original label.
    pub parts: Vec<Part>,
}

/// Canonical key of an unlabeled tree shape. Equal keys iff isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TreeKey(pub String);

pub fn make_path(n: usize) -> Result<Tree, TreeError> {
    if n == 0 {
        return Err(TreeError::Empty);
    }
    let edges: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
    Tree::new(n, &edges)
}

/// Star with root 1 and leaves `2..=n`.
pub fn make_star(n: usize) -> Result<Tree, TreeError> {
    if n == 0 {
        return Err(TreeError::Empty);
    }
    let edges: Vec<_> = (2..=n).map(|i| (1, i)).collect();
    Tree::new(n, &edges)
}

/// Root 1 with each leg a path hanging from it; legs are numbered
/// consecutively in the order given.
pub fn make_spider(legs: &[usize]) -> Result<Tree, TreeError> {
    if legs.is_empty() {
        return Err(TreeError::NoLegs);
    }
    if legs.contains(&0) {
        return Err(TreeError::ZeroLeg);
    }
    let n = 1 + legs.iter().sum::<usize>();
    let mut edges = Vec::with_capacity(n - 1);
    let mut next = 2;
    for &len in legs {
        let mut prev = 1;
        for _ in 0..len {
            edges.push((prev, next));
            prev = next;
            next += 1;
        }
    }
    Tree::new(n, &edges)
}

/// Decodes a Prüfer sequence over labels `1..=seq.len() + 2`.
pub fn from_pruefer(seq: &[usize]) -> Result<Tree, TreeError> {
    let n = seq.len() + 2;
    let mut degree = vec![1usize; n + 1];
    for &x in seq {
        if x == 0 || x > n {
            return Err(TreeError::InvalidVertex(x));
        }
        degree[x] += 1;
    }
    let mut leaves: std::collections::BTreeSet<usize> =
        (1..=n).filter(|&v| degree[v] == 1).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = leaves.pop_first().expect("Prüfer decoding always has a leaf");
        edges.push((leaf, x));
        degree[x] -= 1;
        if degree[x] == 1 {
            leaves.insert(x);
        }
    }
    let a = leaves.pop_first().expect("two leaves remain");
    let b = leaves.pop_first().expect("two leaves remain");
    edges.push((a, b));
    Tree::new(n, &edges)
}

fn check_enumeration_range(n: usize) -> Result<(), TreeError> {
    if n == 0 || n > MAX_ENUMERATED {
        return Err(TreeError::OutOfRange {
            n,
            max: MAX_ENUMERATED,
        });
    }
    Ok(())
}

/// One representative per isomorphism class of trees on `n` vertices, sorted
/// by canonical key.
///
/// Built by attaching a leaf to every vertex of every class on `n - 1`
/// vertices: each tree with two or more vertices has a leaf whose removal
/// leaves a smaller tree, so the extension is exhaustive.
pub fn all_trees(n: usize) -> Result<Vec<Tree>, TreeError> {
    check_enumeration_range(n)?;
    let mut layer = vec![Tree::single()];
    for size in 2..=n {
        let mut next: BTreeMap<TreeKey, Tree> = BTreeMap::new();
        for t in &layer {
            for v in t.vertices() {
                let mut edges = t.edges().to_vec();
                edges.push((v, size));
                let grown = Tree::new(size, &edges)?;
                next.entry(grown.canonical_key()).or_insert(grown);
            }
        }
        layer = next.into_values().collect();
    }
    Ok(layer)
}

/// Brute-force variant of [`all_trees`]: decodes all `n^(n-2)` Prüfer
/// sequences and deduplicates by canonical key. Exponential; meant as an
/// independent check for small `n`.
pub fn all_trees_pruefer(n: usize) -> Result<Vec<Tree>, TreeError> {
    check_enumeration_range(n)?;
    if n <= 2 {
        return Ok(vec![make_path(n)?]);
    }
    let len = n - 2;
    let mut seq = vec![1usize; len];
    let mut classes: BTreeMap<TreeKey, Tree> = BTreeMap::new();
    loop {
        let t = from_pruefer(&seq)?;
        classes.entry(t.canonical_key()).or_insert(t);
        // odometer increment
        let mut i = 0;
        loop {
            if i == len {
                return Ok(classes.into_values().collect());
            }
            if seq[i] < n {
                seq[i] += 1;
                break;
            }
            seq[i] = 1;
            i += 1;
        }
    }
}

/// Textual tree description: `path:N`, `star:N`, `spider:a,b,c` or
/// `edges:1-2,2-3,...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TreeSpec {
    Path(usize),
    Star(usize),
    Spider(Vec<usize>),
    Edges(Vec<(usize, usize)>),
}

fn parse_count(token: &str) -> Result<usize, TreeError> {
    let value: usize = token.trim().parse().map_err(|_| TreeError::Parse {
        token: token.to_string(),
        reason: "expected a positive integer".into(),
    })?;
    if value == 0 {
        return Err(TreeError::Parse {
            token: token.to_string(),
            reason: "must be positive".into(),
        });
    }
    Ok(value)
}

impl FromStr for TreeSpec {
    type Err = TreeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (kind, body) = s.split_once(':').ok_or_else(|| TreeError::Parse {
            token: s.to_string(),
            reason: "expected `kind:arguments`".into(),
        })?;
        match kind.trim() {
            "path" => Ok(TreeSpec::Path(parse_count(body)?)),
            "star" => Ok(TreeSpec::Star(parse_count(body)?)),
            "spider" => body
                .split(',')
                .map(parse_count)
                .collect::<Result<Vec<_>, _>>()
                .map(TreeSpec::Spider),
            "edges" => body
                .split(',')
                .map(|tok| {
                    let (u, v) = tok.split_once('-').ok_or_else(|| TreeError::Parse {
                        token: tok.to_string(),
                        reason: "expected `u-v`".into(),
                    })?;
                    let bad = |_| TreeError::Parse {
                        token: tok.to_string(),
                        reason: "expected positive integer labels".into(),
                    };
                    Ok((parse_count(u).map_err(bad)?, parse_count(v).map_err(bad)?))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(TreeSpec::Edges),
            other => Err(TreeError::Parse {
                token: other.to_string(),
                reason: "unknown tree kind (use path, star, spider or edges)".into(),
            }),
        }
    }
}

impl fmt::Display for TreeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeSpec::Path(n) => write!(f, "path:{n}"),
            TreeSpec::Star(n) => write!(f, "star:{n}"),
            TreeSpec::Spider(legs) => {
                let legs: Vec<String> = legs.iter().map(usize::to_string).collect();
                write!(f, "spider:{}", legs.join(","))
            }
            TreeSpec::Edges(edges) => {
                let edges: Vec<String> = edges.iter().map(|(u, v)| format!("{u}-{v}")).collect();
                write!(f, "edges:{}", edges.join(","))
            }
        }
    }
}

impl TreeSpec {
    pub fn build(&self) -> Result<Tree, TreeError> {
        match self {
            TreeSpec::Path(n) => make_path(*n),
            TreeSpec::Star(n) => make_star(*n),
            TreeSpec::Spider(legs) => make_spider(legs),
            TreeSpec::Edges(edges) => {
                let n = edges.iter().map(|&(u, v)| u.max(v)).max().unwrap_or(0);
                Tree::new(n, edges)
            }
        }
    }
}

/// Parses and builds in one step.
pub fn parse_tree(spec: &str) -> Result<Tree, TreeError> {
    spec.parse::<TreeSpec>()?.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_shapes() {
        assert_eq!(make_path(1).unwrap().edges(), &[] as &[(usize, usize)]);
        assert_eq!(make_path(2).unwrap().edges(), &[(1, 2)]);
        assert_eq!(make_path(4).unwrap().edges(), &[(1, 2), (2, 3), (3, 4)]);
        assert_eq!(make_path(0), Err(TreeError::Empty));
    }

    #[test]
    fn star_shapes() {
        let s3 = make_star(3).unwrap();
        assert_eq!(s3.canonical_key(), make_path(3).unwrap().canonical_key());
        assert_eq!(make_star(5).unwrap().degree(1), 4);
        assert_eq!(make_star(1).unwrap().n(), 1);
        assert_eq!(make_star(0), Err(TreeError::Empty));
    }

    #[test]
    fn spider_shapes() {
        let key = |t: Tree| t.canonical_key();
        assert_eq!(key(make_spider(&[3]).unwrap()), key(make_path(4).unwrap()));
        assert_eq!(key(make_spider(&[1, 1, 1, 1]).unwrap()), key(make_star(5).unwrap()));
        let s = make_spider(&[2, 2, 1]).unwrap();
        assert_eq!(s.n(), 6);
        assert_eq!(s.degree(1), 3);
        assert_eq!(s.spider_legs(), Some((1, vec![2, 2, 1])));
        assert_eq!(make_spider(&[]), Err(TreeError::NoLegs));
        assert_eq!(make_spider(&[2, 0]), Err(TreeError::ZeroLeg));
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(Tree::new(3, &[(1, 2)]), Err(TreeError::EdgeCount { .. })));
        assert_eq!(Tree::new(3, &[(1, 2), (2, 4)]), Err(TreeError::InvalidVertex(4)));
        assert_eq!(Tree::new(3, &[(1, 1), (2, 3)]), Err(TreeError::SelfLoop(1)));
        assert_eq!(Tree::new(3, &[(1, 2), (2, 1)]), Err(TreeError::DuplicateEdge(1, 2)));
        assert_eq!(
            Tree::new(4, &[(1, 2), (2, 3), (3, 1)]),
            Err(TreeError::Disconnected)
        );
    }

    #[test]
    fn split_examples() {
        let sizes = |t: &Tree, v| -> Vec<usize> {
            t.split_at(v).unwrap().parts.iter().map(Part::size).collect()
        };
        let p5 = make_path(5).unwrap();
        assert_eq!(sizes(&p5, 3), vec![2, 2]);
        assert_eq!(sizes(&p5, 1), vec![4]);
        assert_eq!(sizes(&make_star(6).unwrap(), 1), vec![1; 5]);
        let split = p5.split_at(3).unwrap();
        assert_eq!(split.parts[0].label_map, vec![1, 2]);
        assert_eq!(split.parts[1].label_map, vec![4, 5]);
        assert_eq!(p5.split_at(6), Err(TreeError::InvalidVertex(6)));
        assert!(Tree::single().split_at(1).unwrap().parts.is_empty());
    }

    #[test]
    fn canonical_examples() {
        let p4 = make_path(4).unwrap();
        let rev = p4.relabeled(&[4, 3, 2, 1]).unwrap();
        assert_eq!(p4.canonical_key(), rev.canonical_key());
        assert_ne!(make_star(4).unwrap().canonical_key(), p4.canonical_key());
        let a = make_spider(&[2, 1, 1]).unwrap();
        let b = Tree::new(5, &[(3, 5), (3, 1), (1, 2), (4, 3)]).unwrap();
        assert_eq!(a.canonical_key(), b.canonical_key());
    }

    #[test]
    fn centers_of_paths() {
        assert_eq!(make_path(5).unwrap().centers(), vec![3]);
        assert_eq!(make_path(4).unwrap().centers(), vec![2, 3]);
        assert_eq!(make_star(7).unwrap().centers(), vec![1]);
    }

    #[test]
    fn enumeration_counts() {
        let counts: Vec<usize> = (1..=10).map(|n| all_trees(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
        assert!(all_trees(0).is_err());
        assert!(all_trees(11).is_err());
    }

    #[test]
    fn pruefer_roundtrip_small() {
        let t = from_pruefer(&[4, 4, 4]).unwrap();
        assert_eq!(t.star_root(), Some(4));
        assert_eq!(all_trees_pruefer(4).unwrap().len(), 2);
    }

    #[test]
    fn spec_parsing() {
        assert_eq!(parse_tree("path:3").unwrap(), make_path(3).unwrap());
        assert_eq!(parse_tree("star:5").unwrap(), make_star(5).unwrap());
        assert_eq!(parse_tree("spider:2,1").unwrap(), make_spider(&[2, 1]).unwrap());
        assert_eq!(
            parse_tree("edges:1-2,2-3").unwrap(),
            make_path(3).unwrap()
        );
        let err = parse_tree("path:x").unwrap_err();
        assert!(err.to_string().contains("`x`"), "{err}");
        let err = parse_tree("edges:1-2,2x3").unwrap_err();
        assert!(err.to_string().contains("`2x3`"), "{err}");
        let err = parse_tree("blob:3").unwrap_err();
        assert!(err.to_string().contains("`blob`"), "{err}");
        assert!(parse_tree("path").is_err());
        assert!(parse_tree("spider:1,0").is_err());
        for s in ["path:4", "star:6", "spider:3,2,1", "edges:1-2,1-3"] {
            assert_eq!(s.parse::<TreeSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn shape_detection() {
        assert_eq!(make_path(5).unwrap().path_order(), Some(vec![1, 2, 3, 4, 5]));
        assert_eq!(make_star(5).unwrap().path_order(), None);
        let bent = Tree::new(3, &[(2, 1), (1, 3)]).unwrap();
        assert_eq!(bent.path_order(), Some(vec![2, 1, 3]));
        assert_eq!(make_star(3).unwrap().star_root(), None);
        assert_eq!(make_star(6).unwrap().star_root(), Some(1));
        assert_eq!(make_path(6).unwrap().spider_legs(), None);
    }
}
