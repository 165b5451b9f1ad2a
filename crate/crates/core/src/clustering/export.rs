//! Text forms of a dendrogram: a merge list and a Newick string.

use std::collections::HashMap;

use super::linkage::{LinkageTree, Merge};
use super::ClusteringError;

const MERGE_HEADER: &str = "node_id,left,right,height,size";

/// One `node_id,left,right,height,size` line per merge, after a header line.
/// Heights use the shortest representation that parses back to the same `f64`.
pub fn write_merge_list(tree: &LinkageTree) -> String {
    let mut out = String::from(MERGE_HEADER);
    out.push('\n');
    for (k, m) in tree.merges().iter().enumerate() {
        out.push_str(&format!("{},{},{},{},{}\n", tree.n_leaves() + k, m.left, m.right, m.height, m.size));
    }
    out
}

pub fn parse_merge_list(text: &str) -> Result<LinkageTree, ClusteringError> {
    let bad = |line: &str| ClusteringError::Parse(format!("bad merge line {line:?}"));
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some(MERGE_HEADER) {
        return Err(ClusteringError::Parse("missing merge-list header".into()));
    }
    let mut merges = Vec::new();
    let mut first_node = None;
    for (k, line) in lines.enumerate() {
        let f: Vec<&str> = line.trim().split(',').collect();
        let [node, left, right, height, size] = f[..] else { return Err(bad(line)) };
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad(line));
        let node = int(node)?;
        let first = *first_node.get_or_insert(node);
        if node != first + k {
            return Err(bad(line));
        }
        merges.push(Merge {
            left: int(left)?,
            right: int(right)?,
            height: height.parse().map_err(|_| bad(line))?,
            size: int(size)?,
        });
    }
    // node id of the first merge equals the leaf count
    let n_leaves = first_node.unwrap_or(1);
    LinkageTree::new(n_leaves, merges)
}

fn needs_quotes(label: &str) -> bool {
    label.is_empty() || label.chars().any(|c| "()[]':;, \t\n".contains(c))
}

fn quote(label: &str) -> String {
    if needs_quotes(label) {
        format!("'{}'", label.replace('\'', "''"))
    } else {
        label.to_string()
    }
}

/// Newick string with leaf names from `labels` and branch lengths equal to
/// parent height minus child height.
pub fn to_newick(tree: &LinkageTree, labels: &[String]) -> Result<String, ClusteringError> {
    if labels.len() != tree.n_leaves() {
        return Err(ClusteringError::LabelMismatch { expected: tree.n_leaves(), found: labels.len() });
    }
    let mut out = String::new();
    let min_leaf = tree.min_leaf();
    write_subtree(tree, labels, &min_leaf, tree.root(), &mut out);
    out.push(';');
    Ok(out)
}

/// Children are written in dendrogram order (smaller leaf first).
fn write_subtree(tree: &LinkageTree, labels: &[String], min_leaf: &[usize], node: usize, out: &mut String) {
    match tree.children(node) {
        None => out.push_str(&quote(&labels[node])),
        Some((a, b)) => {
            let (l, r) = if min_leaf[a] <= min_leaf[b] { (a, b) } else { (b, a) };
            let h = tree.height(node);
            out.push('(');
            write_subtree(tree, labels, min_leaf, l, out);
            out.push_str(&format!(":{},", h - tree.height(l)));
            write_subtree(tree, labels, min_leaf, r, out);
            out.push_str(&format!(":{})", h - tree.height(r)));
        }
    }
}

enum Node {
    Leaf(usize),
    Internal(Box<Parsed>, Box<Parsed>),
}

struct Parsed {
    node: Node,
    branch: f64,
}

struct NewickParser<'a> {
    chars: Vec<char>,
    pos: usize,
    labels: &'a HashMap<&'a str, usize>,
}

impl NewickParser<'_> {
    fn err(&self, what: &str) -> ClusteringError {
        ClusteringError::Parse(format!("newick: {what} at position {}", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), ClusteringError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn label(&mut self) -> Result<String, ClusteringError> {
        let mut s = String::new();
        if self.peek() == Some('\'') {
            self.pos += 1;
            loop {
                match self.peek() {
                    None => return Err(self.err("unterminated quote")),
                    Some('\'') if self.chars.get(self.pos + 1) == Some(&'\'') => {
                        s.push('\'');
                        self.pos += 2;
                    }
                    Some('\'') => {
                        self.pos += 1;
                        break;
                    }
                    Some(c) => {
                        s.push(c);
                        self.pos += 1;
                    }
                }
            }
        } else {
            while let Some(c) = self.peek().filter(|c| !"(),:;".contains(*c)) {
                s.push(c);
                self.pos += 1;
            }
        }
        Ok(s)
    }

    fn branch(&mut self) -> Result<f64, ClusteringError> {
        self.expect(':')?;
        let start = self.pos;
        while self.peek().is_some_and(|c| !"(),:;".contains(c)) {
            self.pos += 1;
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse().map_err(|_| self.err("bad branch length"))
    }

    fn subtree(&mut self, root: bool) -> Result<Parsed, ClusteringError> {
        let node = if self.peek() == Some('(') {
            self.pos += 1;
            let left = self.subtree(false)?;
            self.expect(',')?;
            let right = self.subtree(false)?;
            self.expect(')')?;
            Node::Internal(Box::new(left), Box::new(right))
        } else {
            let name = self.label()?;
            let &id = self.labels.get(name.as_str()).ok_or_else(|| self.err(&format!("unknown leaf {name:?}")))?;
            Node::Leaf(id)
        };
        let branch = if root { 0.0 } else { self.branch()? };
        Ok(Parsed { node, branch })
    }
}

/// Rebuilds a tree from [`to_newick`] output.
///
/// Merge order is recovered by repeatedly taking, among internal nodes whose
/// children already exist, the lowest one (ties by the smaller child-id
/// pair), which reproduces the order of [`super::linkage`].
pub fn parse_newick(text: &str, labels: &[String]) -> Result<LinkageTree, ClusteringError> {
    let index: HashMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    if index.len() != labels.len() {
        return Err(ClusteringError::Parse("duplicate leaf labels".into()));
    }
    let mut parser = NewickParser { chars: text.trim().chars().collect(), pos: 0, labels: &index };
    let root = parser.subtree(true)?;
    parser.expect(';')?;
    if parser.pos != parser.chars.len() {
        return Err(parser.err("trailing text"));
    }

    // Flatten to (height, left, right) with provisional child refs.
    enum Ref {
        Leaf(usize),
        Pending(usize),
    }
    struct Pending {
        height: f64,
        left: Ref,
        right: Ref,
    }
    fn flatten(p: &Parsed, out: &mut Vec<Pending>, seen: &mut Vec<bool>) -> Result<(Ref, f64), ClusteringError> {
        match &p.node {
            Node::Leaf(id) => {
                if std::mem::replace(&mut seen[*id], true) {
                    return Err(ClusteringError::Parse(format!("leaf {id} appears twice")));
                }
                Ok((Ref::Leaf(*id), 0.0))
            }
            Node::Internal(l, r) => {
                let (lr, lh) = flatten(l, out, seen)?;
                let (rr, _) = flatten(r, out, seen)?;
                let height = lh + l.branch;
                out.push(Pending { height, left: lr, right: rr });
                Ok((Ref::Pending(out.len() - 1), height))
            }
        }
    }
    let n = labels.len();
    let mut pending = Vec::new();
    let mut seen = vec![false; n];
    flatten(&root, &mut pending, &mut seen)?;
    if seen.iter().any(|s| !s) {
        return Err(ClusteringError::Parse("not every label appears in the tree".into()));
    }

    let mut assigned: Vec<Option<usize>> = vec![None; pending.len()];
    let mut merges = Vec::with_capacity(pending.len());
    let resolve = |r: &Ref, assigned: &[Option<usize>]| match r {
        Ref::Leaf(id) => Some(*id),
        Ref::Pending(p) => assigned[*p],
    };
    for step in 0..pending.len() {
        let mut best: Option<(usize, f64, (usize, usize))> = None;
        for (i, p) in pending.iter().enumerate() {
            if assigned[i].is_some() {
                continue;
            }
            let (Some(a), Some(b)) = (resolve(&p.left, &assigned), resolve(&p.right, &assigned)) else { continue };
            let key = (a.min(b), a.max(b));
            let better = match best {
                None => true,
                Some((_, h, k)) => p.height < h || (p.height == h && key < k),
            };
            if better {
                best = Some((i, p.height, key));
            }
        }
        let (i, height, _) = best.expect("a ready node always exists");
        let a = resolve(&pending[i].left, &assigned).expect("ready");
        let b = resolve(&pending[i].right, &assigned).expect("ready");
        let (left, right) = (a.min(b), a.max(b));
        assigned[i] = Some(n + step);
        merges.push(Merge { left, right, height: height.max(0.0), size: 0 });
    }
    let mut sizes = vec![1usize; n];
    for m in &mut merges {
        m.size = sizes[m.left] + sizes[m.right];
        sizes.push(m.size);
    }
    LinkageTree::new(n, merges)
}
