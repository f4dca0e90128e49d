//! Parameterization of connected self-similar sets by tours of nested
//! trees: separated nets `V_1 ⊂ ... ⊂ V_N`, hierarchical spanning trees
//! `T_1, ..., T_N`, staged 2-to-1 tours with branch insertion, and the final
//! equal-time tour `F_N`.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::arc::{detect_branching_with, Branching};
use crate::holder::SampledCurve;
use crate::ifs::IfsSystem;
use crate::oracle::{Adjacency, AdjacencyOracle};
use crate::spatial::Grid;
use crate::word::{word_cut, Word};
use crate::{Error, Result};

/// Witness `(v, tau)` of the strong open set condition and the scale `r`.
#[derive(Clone, Debug, Serialize)]
pub struct SoscData {
    pub v: Vec<f64>,
    pub tau: f64,
    pub r: f64,
    pub levels_checked: usize,
    /// Smallest `d(phi_w(v), phi_u(v)) / (8 r r^m)` seen.
    pub worst_ratio: f64,
}

/// Checks that the system consists of similarities and that the images of
/// `v` are `(8r) r^m`-separated over `A*(r^m)` for `m <= levels`.
/// `r` defaults to `L_1 tau / 4` with `L_1` the smallest ratio.
pub fn validate_sosc(system: &IfsSystem, v: &[f64], tau: f64, levels: usize, r_override: Option<f64>) -> Result<SoscData> {
    system.check_self_similar()?;
    if v.len() != system.dim() {
        return Err(Error::InvalidInput(format!("v has dimension {}, system has {}", v.len(), system.dim())));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidInput(format!("tau must be positive, got {tau}")));
    }
    let r = r_override.unwrap_or(system.min_lip() * tau / 4.0);
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::InvalidInput(format!("r must lie in (0, 1), got {r}")));
    }
    let metric = system.metric();
    let mut worst = f64::INFINITY;
    for m in 1..=levels.max(1) {
        let words = word_cut(system, r.powi(m as i32), &Word::empty())?.words;
        let points: Vec<Vec<f64>> = words.iter().map(|w| w.apply(system, v)).collect();
        let bound = 8.0 * r * r.powi(m as i32);
        let grid = Grid::for_radius(&points, metric, bound);
        let mut bad: Option<(usize, usize, f64)> = None;
        grid.close_pairs(bound, |i, j, d| {
            worst = worst.min(d / bound);
            if d < bound && bad.map_or(true, |b| (i, j) < (b.0, b.1)) {
                bad = Some((i, j, d));
            }
        });
        if let Some((i, j, dist)) = bad {
            return Err(Error::SeparationViolated {
                w: words[i].to_string(),
                u: words[j].to_string(),
                level: m,
                dist,
                bound,
            });
        }
    }
    // the interval refinement needs r < 1/4
    if r >= 0.25 {
        return Err(Error::InvalidInput(format!("r = {r} must be below 1/4")));
    }
    Ok(SoscData { v: v.to_vec(), tau, r, levels_checked: levels.max(1), worst_ratio: worst })
}

/// One level of the net hierarchy and, once trees are built, its tree.
#[derive(Clone, Debug)]
pub struct NetTree {
    pub level: usize,
    /// `A*(r^m)` in lexicographic order; vertex `i` is the net point in `K_{words[i]}`.
    pub words: Vec<Word>,
    pub points: Vec<Vec<f64>>,
    /// Index of each vertex in `V_N`.
    pub net_index: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    /// Vertex of level `m - 1` whose word is a prefix (empty at level 1).
    pub parent_links: Vec<usize>,
}

/// Audited net and tree quantities of one level, with their bounds.
#[derive(Clone, Debug, Serialize)]
pub struct LevelAudit {
    pub level: usize,
    pub vertices: usize,
    /// Every cut word holds exactly one net point, and `V_m ⊂ V_{m+1}`.
    pub unique_and_nested: bool,
    /// `max_{x in V_{m+1}} min_{x' in V_m} d(x, x')`, bound `r^m` (strict).
    pub max_nesting_gap: f64,
    pub nesting_bound: f64,
    /// `max d(x, phi_w(v))`, bound `(2r) r^m` (strict).
    pub max_proximity: f64,
    pub proximity_bound: f64,
    /// `min d(a, b)` over distinct net points, bound `(4r) r^m` (strict).
    pub min_separation: f64,
    pub separation_bound: f64,
    /// Tree edge lengths, window `[8r r^m, 2 r^m)`.
    pub min_edge: Option<f64>,
    pub max_edge: Option<f64>,
    pub edge_lo: f64,
    pub edge_hi: f64,
    pub is_tree: Option<bool>,
    pub branch_vertices: Option<usize>,
}

impl LevelAudit {
    pub fn nets_ok(&self) -> bool {
        self.unique_and_nested
            && self.max_nesting_gap < self.nesting_bound
            && self.max_proximity < self.proximity_bound
            && self.min_separation > self.separation_bound
    }

    pub fn tree_ok(&self) -> bool {
        self.is_tree == Some(true)
            && self.min_edge.map_or(true, |e| e >= self.edge_lo)
            && self.max_edge.map_or(true, |e| e < self.edge_hi)
    }
}

/// Builds `V_N = Y_N` and, backwards, `V_{m-1}` by replacing each
/// `phi_u(v)` with the nearest `V_m` point descending from `u`.
pub fn build_nets(system: &IfsSystem, sosc: &SoscData, n: usize) -> Result<Vec<NetTree>> {
    if n == 0 {
        return Err(Error::InvalidInput("N must be at least 1".into()));
    }
    let metric = system.metric();
    let r = sosc.r;
    let cuts: Vec<Vec<Word>> =
        (1..=n).map(|m| word_cut(system, r.powi(m as i32), &Word::empty()).map(|c| c.words)).collect::<Result<_>>()?;
    let finest = &cuts[n - 1];
    let y_n: Vec<Vec<f64>> = finest.iter().map(|w| w.apply(system, &sosc.v)).collect();
    let mut levels: Vec<NetTree> = Vec::with_capacity(n);
    levels.push(NetTree {
        level: n,
        words: finest.clone(),
        points: y_n.clone(),
        net_index: (0..finest.len()).collect(),
        edges: Vec::new(),
        parent_links: Vec::new(),
    });
    for m in (1..n).rev() {
        let below = levels.last().unwrap();
        let words = &cuts[m - 1];
        let mut net_index = Vec::with_capacity(words.len());
        // `below.words` is sorted, so the descendants of `u` form a range
        let mut start = 0;
        for u in words {
            while start < below.words.len() && below.words[start] < *u && !u.is_prefix_of(&below.words[start]) {
                start += 1;
            }
            let mut end = start;
            while end < below.words.len() && u.is_prefix_of(&below.words[end]) {
                end += 1;
            }
            if end == start {
                return Err(Error::InvalidInput(format!("cut word {u} has no finer descendant")));
            }
            let target = u.apply(system, &sosc.v);
            let best = (start..end)
                .min_by(|&a, &b| metric.dist(&below.points[a], &target).total_cmp(&metric.dist(&below.points[b], &target)))
                .unwrap();
            net_index.push(below.net_index[best]);
            start = end;
        }
        let points = net_index.iter().map(|&i| y_n[i].clone()).collect();
        levels.push(NetTree {
            level: m,
            words: words.clone(),
            points,
            net_index,
            edges: Vec::new(),
            parent_links: Vec::new(),
        });
    }
    levels.reverse();
    for m in 1..n {
        let (coarse, fine) = levels.split_at_mut(m);
        fine[0].parent_links = prefix_links(&coarse[m - 1].words, &fine[0].words);
    }
    Ok(levels)
}

/// For each fine word the index of its prefix among the (sorted) coarse words.
fn prefix_links(coarse: &[Word], fine: &[Word]) -> Vec<usize> {
    let mut out = Vec::with_capacity(fine.len());
    let mut j = 0;
    for w in fine {
        while !coarse[j].is_prefix_of(w) {
            j += 1;
        }
        out.push(j);
    }
    out
}

/// Audits the net inequalities (and tree inequalities once edges exist).
pub fn audit_levels(system: &IfsSystem, sosc: &SoscData, nets: &[NetTree]) -> Vec<LevelAudit> {
    let metric = system.metric();
    let r = sosc.r;
    let mut out = Vec::new();
    for (idx, net) in nets.iter().enumerate() {
        let m = net.level;
        let rm = r.powi(m as i32);
        let mut unique = net.words.len() == net.points.len();
        if let Some(finer) = nets.get(idx + 1) {
            // nesting and one point per cylinder, decided by prefixes
            let mut count = vec![0usize; net.words.len()];
            let fine_pos: HashMap<usize, usize> = finer.net_index.iter().enumerate().map(|(i, &v)| (v, i)).collect();
            for (i, &v) in net.net_index.iter().enumerate() {
                match fine_pos.get(&v) {
                    Some(&j) => unique &= finer.parent_links[j] == i,
                    None => unique = false,
                }
            }
            for &p in &finer.parent_links {
                count[p] += 1;
            }
            unique &= count.iter().all(|&c| c >= 1);
        }
        let max_nesting_gap = match nets.get(idx + 1) {
            Some(finer) => finer
                .points
                .iter()
                .zip(&finer.parent_links)
                .map(|(x, &p)| metric.dist(x, &net.points[p]))
                .fold(0.0, f64::max),
            None => 0.0,
        };
        let max_proximity = net
            .words
            .iter()
            .zip(&net.points)
            .map(|(w, x)| metric.dist(x, &w.apply(system, &sosc.v)))
            .fold(0.0, f64::max);
        let sep_bound = 4.0 * r * rm;
        let mut min_sep = f64::INFINITY;
        let grid = Grid::for_radius(&net.points, metric, 2.0 * sep_bound);
        grid.close_pairs(2.0 * sep_bound, |_, _, d| min_sep = min_sep.min(d));
        let lens: Vec<f64> = net.edges.iter().map(|&(a, b)| metric.dist(&net.points[a], &net.points[b])).collect();
        let built = !net.edges.is_empty() || net.points.len() == 1;
        let (is_tree, branch) = if built {
            let adj = adjacency(net.points.len(), &net.edges);
            let connected = bfs_order(&adj, 0, |_| true).len() == net.points.len();
            (Some(connected && net.edges.len() + 1 == net.points.len()), Some(adj.iter().filter(|a| a.len() >= 3).count()))
        } else {
            (None, None)
        };
        out.push(LevelAudit {
            level: m,
            vertices: net.points.len(),
            unique_and_nested: unique,
            max_nesting_gap,
            nesting_bound: if idx + 1 < nets.len() { rm } else { f64::INFINITY },
            max_proximity,
            proximity_bound: 2.0 * r * rm,
            min_separation: min_sep,
            separation_bound: sep_bound,
            min_edge: lens.iter().copied().reduce(f64::min),
            max_edge: lens.iter().copied().reduce(f64::max),
            edge_lo: 8.0 * r * rm,
            edge_hi: 2.0 * rm,
            is_tree,
            branch_vertices: branch,
        });
    }
    out
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    for a in adj.iter_mut() {
        a.sort_unstable();
    }
    adj
}

fn bfs_order(adj: &[Vec<usize>], root: usize, keep: impl Fn(usize) -> bool) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut order = vec![root];
    seen[root] = true;
    let mut q = VecDeque::from([root]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if !seen[y] && keep(y) {
                seen[y] = true;
                order.push(y);
                q.push_back(y);
            }
        }
    }
    order
}

/// BFS spanning tree of the graph induced on `members` (sorted), rooted at
/// the first member; re-rooted at the first vertex of largest degree when
/// that yields a branch vertex and the first root does not.
fn spanning_tree(graph: &[Vec<usize>], members: &[usize], inside: &dyn Fn(usize) -> bool) -> Option<Vec<(usize, usize)>> {
    let grow = |root: usize| -> Vec<(usize, usize)> {
        let mut parent: HashMap<usize, usize> = HashMap::new();
        parent.insert(root, root);
        let mut q = VecDeque::from([root]);
        let mut edges = Vec::new();
        while let Some(x) = q.pop_front() {
            for &y in &graph[x] {
                if inside(y) && !parent.contains_key(&y) {
                    parent.insert(y, x);
                    edges.push((x.min(y), x.max(y)));
                    q.push_back(y);
                }
            }
        }
        edges
    };
    let has_branch = |edges: &[(usize, usize)]| {
        let mut deg: HashMap<usize, usize> = HashMap::new();
        for &(a, b) in edges {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        deg.values().any(|&d| d >= 3)
    };
    let edges = grow(members[0]);
    if edges.len() + 1 != members.len() {
        return None;
    }
    if !has_branch(&edges) {
        let degree = |x: usize| graph[x].iter().filter(|&&y| inside(y)).count();
        let best = members.iter().copied().max_by_key(|&x| (degree(x), std::cmp::Reverse(x))).unwrap();
        if degree(best) >= 3 {
            return Some(grow(best));
        }
    }
    Some(edges)
}

/// Builds `T_1` (BFS tree of the level-1 adjacency graph) and each
/// `T_{m+1}` as per-cylinder spanning trees plus one lifted edge per edge
/// of `T_m` (the lexicographically least adjacent descendant pair).
pub fn build_trees(system: &IfsSystem, nets: &mut [NetTree], oracle: &AdjacencyOracle) -> Result<()> {
    let adj = Adjacency::new(system, oracle)?;
    let report = detect_branching_with(&adj, 3)?;
    if report.verdict == Branching::NoBranching {
        return Err(Error::NoBranching { level: report.depth_checked });
    }
    let all: Vec<usize> = (0..nets[0].words.len()).collect();
    let g1 = adj.graph(&nets[0].words);
    nets[0].edges = spanning_tree(&g1, &all, &|_| true).ok_or_else(|| Error::NoChain { root: "ε".into() })?;
    for m in 1..nets.len() {
        let graph = adj.graph(&nets[m].words);
        let links = nets[m].parent_links.clone();
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); nets[m - 1].words.len()];
        for (i, &p) in links.iter().enumerate() {
            groups[p].push(i);
        }
        let mut edges = Vec::new();
        for (p, members) in groups.iter().enumerate() {
            let inside = |y: usize| links[y] == p;
            let tree = spanning_tree(&graph, members, &inside)
                .ok_or_else(|| Error::NoChain { root: nets[m - 1].words[p].to_string() })?;
            edges.extend(tree);
        }
        let mut lift: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for (y, nb) in graph.iter().enumerate() {
            for &z in nb.iter().filter(|&&z| z > y) {
                let (a, b) = (links[y], links[z]);
                if a == b {
                    continue;
                }
                // oriented so the first vertex descends from the smaller parent
                let (key, pair) = if a < b { ((a, b), (y, z)) } else { ((b, a), (z, y)) };
                let e = lift.entry(key).or_insert(pair);
                if pair < *e {
                    *e = pair;
                }
            }
        }
        for &(a, b) in &nets[m - 1].edges {
            let (y, z) = *lift.get(&(a.min(b), a.max(b))).ok_or_else(|| Error::LiftFailed {
                a: nets[m - 1].words[a].to_string(),
                b: nets[m - 1].words[b].to_string(),
            })?;
            edges.push((y.min(z), y.max(z)));
        }
        edges.sort_unstable();
        nets[m].edges = edges;
    }
    Ok(())
}

/// Fenwick tree over edge ids (edge = child vertex in the rooted `T_N`).
struct Fenwick(Vec<i64>);

impl Fenwick {
    fn add(&mut self, i: usize, v: i64) {
        let mut i = i + 1;
        while i < self.0.len() {
            self.0[i] += v;
            i += i & i.wrapping_neg();
        }
    }
    fn prefix(&self, i: usize) -> i64 {
        let mut i = i;
        let mut s = 0;
        while i > 0 {
            s += self.0[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
    fn range(&self, lo: usize, hi: usize) -> i64 {
        self.prefix(hi + 1) - self.prefix(lo)
    }
}

/// `T_N` rooted at vertex 0 with Euler ranges.
struct Rooted {
    adj: Vec<Vec<usize>>,
    parent: Vec<usize>,
    depth: Vec<usize>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl Rooted {
    fn new(adj: Vec<Vec<usize>>) -> Self {
        let n = adj.len();
        let mut parent = vec![usize::MAX; n];
        let mut depth = vec![0; n];
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        parent[0] = 0;
        let mut clock = 1;
        let mut stack = vec![(0usize, 0usize)];
        while let Some(top) = stack.last_mut() {
            let x = top.0;
            if let Some(&y) = adj[x].get(top.1) {
                top.1 += 1;
                if parent[y] == usize::MAX {
                    parent[y] = x;
                    depth[y] = depth[x] + 1;
                    tin[y] = clock;
                    clock += 1;
                    stack.push((y, 0));
                }
            } else {
                tout[x] = clock - 1;
                stack.pop();
            }
        }
        Rooted { adj, parent, depth, tin, tout }
    }

    fn in_subtree(&self, root: usize, x: usize) -> bool {
        self.tin[root] <= self.tin[x] && self.tin[x] <= self.tout[root]
    }

    /// Edge id of the tree edge `{x, y}`.
    fn edge(&self, x: usize, y: usize) -> usize {
        if self.parent[y] == x && y != 0 { y } else { x }
    }

    fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let (mut x, mut y) = (a, b);
        let mut left = Vec::new();
        let mut right = Vec::new();
        while self.depth[x] > self.depth[y] {
            left.push(x);
            x = self.parent[x];
        }
        while self.depth[y] > self.depth[x] {
            right.push(y);
            y = self.parent[y];
        }
        while x != y {
            left.push(x);
            right.push(y);
            x = self.parent[x];
            y = self.parent[y];
        }
        left.push(x);
        left.extend(right.into_iter().rev());
        left
    }
}

/// Closed depth-first walk from `start` over the tree edges accepted by
/// `allowed`.
fn double_tour(adj: &[Vec<usize>], start: usize, allowed: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    // discover the allowed subtree and its subtree sizes
    let mut order = vec![start];
    let mut parent = HashMap::from([(start, usize::MAX)]);
    let mut i = 0;
    while i < order.len() {
        let x = order[i];
        let from = parent[&x];
        for &y in &adj[x] {
            if y != from && allowed(x, y) && !parent.contains_key(&y) {
                parent.insert(y, x);
                order.push(y);
            }
        }
        i += 1;
    }
    let mut size: HashMap<usize, usize> = order.iter().map(|&x| (x, 1)).collect();
    let mut children: HashMap<usize, Vec<usize>> = HashMap::new();
    for &x in order[1..].iter().rev() {
        let p = parent[&x];
        let sx = size[&x];
        *size.get_mut(&p).unwrap() += sx;
        children.entry(p).or_default().push(x);
    }
    // The heaviest child continues the road; lighter ones go before or
    // after it, whichever leg of that road is lighter so far. Each road
    // keeps its own balance.
    let arrange = |x: usize, balance: i64| -> Vec<(usize, i64)> {
        let mut kids = children.get(&x).cloned().unwrap_or_default();
        kids.sort_by_key(|c| (std::cmp::Reverse(size[c]), *c));
        let Some((&heavy, light)) = kids.split_first() else { return Vec::new() };
        let mut balance = balance;
        let (mut before, mut after) = (Vec::new(), Vec::new());
        for &c in light {
            let w = size[&c] as i64;
            if balance <= 0 {
                before.push((c, 0));
                balance += w;
            } else {
                after.push((c, 0));
                balance -= w;
            }
        }
        before.push((heavy, balance));
        before.extend(after);
        before
    };
    let mut walk = vec![start];
    let mut stack: Vec<(usize, Vec<(usize, i64)>, usize)> = vec![(start, arrange(start, 0), 0)];
    while let Some(top) = stack.last_mut() {
        if top.2 < top.1.len() {
            let (y, b) = top.1[top.2];
            top.2 += 1;
            walk.push(y);
            let kids = arrange(y, b);
            stack.push((y, kids, 0));
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                walk.push(p);
            }
        }
    }
    walk
}

/// Minimal subtree of `T_N` containing the flagged vertices.
fn steiner(rooted: &Rooted, keep: &[bool]) -> Vec<bool> {
    let n = keep.len();
    let mut alive = vec![true; n];
    let mut deg: Vec<usize> = rooted.adj.iter().map(|a| a.len()).collect();
    let mut q: VecDeque<usize> = (0..n).filter(|&x| deg[x] <= 1 && !keep[x]).collect();
    let mut remaining = n;
    while let Some(x) = q.pop_front() {
        if !alive[x] || keep[x] || remaining == 1 {
            continue;
        }
        alive[x] = false;
        remaining -= 1;
        for &y in &rooted.adj[x] {
            if alive[y] {
                deg[y] -= 1;
                if deg[y] <= 1 && !keep[y] {
                    q.push_back(y);
                }
            }
        }
    }
    alive
}

/// Per-stage audit of the intermediate tours.
#[derive(Clone, Debug, Serialize)]
pub struct StageAudit {
    pub stage: usize,
    pub intervals: usize,
    pub walk_edges: usize,
    /// `min d(f(a), f(b)) / ((2r) r^m)` over intervals.
    pub min_endpoint_ratio: f64,
    /// `max sup_x d(f(a), f(x)) / ((5/r) r^m)` over intervals.
    pub max_spread_ratio: f64,
    pub inserted_branches: usize,
    /// Intervals where no untraced qualifying branch existed.
    pub exhausted: Vec<usize>,
    /// Coarsest ladder step `j` (cylinder scale `r^m L^j`) that had to be
    /// reached by the branch search.
    pub max_t: usize,
    /// Old interval endpoints keep their images.
    pub refines_previous: bool,
}

impl StageAudit {
    pub fn p4_ok(&self) -> bool {
        self.min_endpoint_ratio >= 1.0 && self.max_spread_ratio <= 1.0
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RemesReport {
    pub r: f64,
    pub n: usize,
    pub levels: Vec<LevelAudit>,
    pub stages: Vec<StageAudit>,
    pub tree_vertices: usize,
    pub tree_edges: usize,
    /// Every edge of `T_N` is traversed exactly twice by `F_N`.
    pub every_edge_twice: bool,
    pub closed: bool,
    pub warnings: Vec<String>,
}

impl RemesReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

#[derive(Clone, Debug)]
pub struct RemesResult {
    pub curve: SampledCurve,
    pub nets: Vec<NetTree>,
    pub report: RemesReport,
}

struct Tour<'a> {
    rooted: &'a Rooted,
    points: &'a [Vec<f64>],
    metric: &'a crate::metric::Metric,
    traced: Fenwick,
    traced_total: i64,
    r: f64,
    n: usize,
    /// `V_N` words, lexicographically sorted, indexed by vertex.
    words: &'a [Word],
    lips: Vec<f64>,
    max_lip: f64,
}

impl Tour<'_> {
    fn mark(&mut self, x: usize, y: usize) {
        let e = self.rooted.edge(x, y);
        if self.traced.range(self.rooted.tin[e], self.rooted.tin[e]) == 0 {
            self.traced.add(self.rooted.tin[e], 1);
            self.traced_total += 1;
        }
    }

    fn is_traced(&self, x: usize, y: usize) -> bool {
        let e = self.rooted.edge(x, y);
        self.traced.range(self.rooted.tin[e], self.rooted.tin[e]) > 0
    }

    fn mark_walk(&mut self, walk: &[usize]) {
        for p in walk.windows(2) {
            self.mark(p[0], p[1]);
        }
    }

    /// Vertices of the branch hanging off road vertex `z` through `y`.
    fn branch_vertices(&self, z: usize, y: usize) -> Vec<usize> {
        let rt = self.rooted;
        let in_branch = |u: usize| {
            if rt.parent[y] == z && y != 0 { rt.in_subtree(y, u) } else { !rt.in_subtree(z, u) }
        };
        let mut out = vec![z];
        let mut stack = vec![y];
        let mut seen: HashMap<usize, ()> = HashMap::new();
        seen.insert(z, ());
        seen.insert(y, ());
        while let Some(u) = stack.pop() {
            out.push(u);
            for &w in &rt.adj[u] {
                if in_branch(w) && seen.insert(w, ()).is_none() {
                    stack.push(w);
                }
            }
        }
        out
    }

    fn branch_size(&self, z: usize, y: usize) -> usize {
        let rt = self.rooted;
        if rt.parent[y] == z && y != 0 {
            rt.tout[y] - rt.tin[y] + 2
        } else {
            rt.adj.len() - (rt.tout[z] - rt.tin[z] + 1) + 1
        }
    }

    fn branch_untraced(&self, z: usize, y: usize) -> bool {
        let rt = self.rooted;
        if rt.parent[y] == z && y != 0 {
            self.traced.range(rt.tin[y], rt.tout[y]) == 0
        } else {
            let inside = self.traced.range(rt.tin[z], rt.tout[z]) - self.traced.range(rt.tin[z], rt.tin[z]);
            self.traced_total - inside == 0
        }
    }

    /// Whether the branch holds every `V_N` point of some cylinder of
    /// `A*(delta)`. Cylinders finer than `V_N` hold a single point, so any
    /// nonempty branch qualifies once `delta` drops below every `V_N` weight.
    fn holds_cylinder(&self, verts: &[usize], delta: f64) -> bool {
        let mut tally: HashMap<&[u16], usize> = HashMap::new();
        for &v in verts {
            let letters = self.words[v].letters();
            let mut weight = 1.0;
            let mut k = 0;
            while k < letters.len() && weight >= delta {
                weight *= self.lips[letters[k] as usize];
                k += 1;
            }
            let prefix = &letters[..k];
            let c = tally.entry(prefix).or_default();
            *c += 1;
            if *c == self.prefix_count(prefix) {
                return true;
            }
        }
        false
    }

    /// Number of `V_N` words extending `prefix` (they form a range of the sorted list).
    fn prefix_count(&self, prefix: &[u16]) -> usize {
        let lo = self.words.partition_point(|w| w.letters() < prefix);
        let hi = self.words.partition_point(|w| w.letters() < prefix || w.letters().starts_with(prefix));
        hi - lo
    }

    /// Inserts one untraced branch per interval (stage `m`); returns the
    /// new walk and marks.
    fn insert_branches(&mut self, walk: &[usize], marks: &[usize], m: usize, audit: &mut StageAudit) -> (Vec<usize>, Vec<usize>) {
        let rt = self.rooted;
        let limit = 5.0 / self.r * self.r.powi(m as i32);
        let mut out = Vec::with_capacity(walk.len() * 2);
        let mut new_marks = vec![0];
        out.push(walk[0]);
        for (k, pair) in marks.windows(2).enumerate() {
            let (lo, hi) = (pair[0], pair[1]);
            let (a, b) = (walk[lo], walk[hi]);
            let road = rt.path(a, b);
            let on_road: HashMap<usize, ()> = road.iter().map(|&x| (x, ())).collect();
            let mut cands: Vec<(usize, usize, usize)> = Vec::new();
            for &z in &road {
                for &y in &rt.adj[z] {
                    if !on_road.contains_key(&y) && self.branch_untraced(z, y) {
                        cands.push((self.branch_size(z, y), z, y));
                    }
                }
            }
            // largest first: long intervals get more of the tree
            cands.sort_unstable_by(|p, q| q.cmp(p));
            let mut chosen: Option<(usize, usize, Vec<usize>)> = None;
            let mut verts_of: Vec<Option<Vec<usize>>> = vec![None; cands.len()];
            // cylinder scales r^m L^j, finest first allowed once below every V_N weight
            let step = self.max_lip;
            let floor = self.r.powi(self.n as i32) * step;
            let mut delta = self.r.powi(m as i32);
            'search: for j in 1.. {
                delta *= step;
                for (c, &(_, z, y)) in cands.iter().enumerate() {
                    let verts = verts_of[c].get_or_insert_with(|| self.branch_vertices(z, y));
                    let fits = verts.iter().all(|&u| self.metric.dist(&self.points[a], &self.points[u]) <= limit);
                    if fits && (delta < floor || self.holds_cylinder(verts, delta)) {
                        audit.max_t = audit.max_t.max(j);
                        chosen = Some((z, y, verts.clone()));
                        break 'search;
                    }
                }
                if delta < floor {
                    break;
                }
            }
            let excursion = match chosen {
                Some((z, y, verts)) => {
                    let member: HashMap<usize, ()> = verts.iter().map(|&u| (u, ())).collect();
                    let tour = double_tour(&rt.adj, z, |u, w| {
                        member.contains_key(&u) && member.contains_key(&w) && (u != z || w == y) && (w != z || u == y)
                    });
                    self.mark_walk(&tour);
                    audit.inserted_branches += 1;
                    Some((z, tour))
                }
                None => {
                    audit.exhausted.push(k);
                    None
                }
            };
            let mut pending = excursion;
            for &x in &walk[lo + 1..=hi] {
                out.push(x);
                if let Some((z, tour)) = &pending {
                    if x == *z {
                        out.extend_from_slice(&tour[1..]);
                        pending = None;
                    }
                }
            }
            if let Some((z, tour)) = pending {
                // the road starts at `a`: insert right after the interval start
                debug_assert_eq!(z, a);
                let at = out.len() - (hi - lo);
                out.splice(at..at, tour[1..].iter().copied());
            }
            new_marks.push(out.len() - 1);
        }
        (out, new_marks)
    }

    /// Adds the untraced parts of `keep`'s Steiner tree as excursions at
    /// the first visit of their attachment vertex; marks are carried over.
    fn extend_to(&mut self, walk: &[usize], marks: &[usize], in_tree: &[bool]) -> (Vec<usize>, Vec<usize>) {
        let rt = self.rooted;
        let mut first = vec![usize::MAX; rt.adj.len()];
        let mut last = vec![usize::MAX; rt.adj.len()];
        for (p, &x) in walk.iter().enumerate() {
            if first[x] == usize::MAX {
                first[x] = p;
            }
            last[x] = p;
        }
        // Excursions at a vertex passed more than once go to its first or
        // last visit, whichever side is lighter so far, so the return leg
        // of a road is not left bare.
        let mut attach: Vec<Vec<usize>> = vec![Vec::new(); walk.len()];
        let mut balance: i64 = 0;
        for (p, &x) in walk.iter().enumerate() {
            if first[x] != p {
                continue;
            }
            for &y in &rt.adj[x] {
                if in_tree[y] && !self.is_traced(x, y) {
                    let w = self.branch_size(x, y) as i64;
                    let at = if last[x] == p || balance <= 0 { p } else { last[x] };
                    if last[x] != p {
                        balance += if at == p { w } else { -w };
                    }
                    attach[at].push(y);
                }
            }
        }
        let mut out = Vec::with_capacity(walk.len() * 2);
        let mut new_pos = Vec::with_capacity(walk.len());
        for (p, &x) in walk.iter().enumerate() {
            out.push(x);
            new_pos.push(out.len() - 1);
            for &y in &attach[p] {
                let tour = {
                    let this = &*self;
                    double_tour(&rt.adj, x, |u, w| in_tree[u] && in_tree[w] && (u != x || w == y) && !this.is_traced(u, w))
                };
                self.mark_walk(&tour);
                out.extend_from_slice(&tour[1..]);
            }
        }
        // marks stay on the first copy of each old position
        let marks = marks.iter().map(|&p| new_pos[p]).collect();
        (out, marks)
    }

    /// Greedy refinement: split an interval at the last admissible position
    /// before the image leaves the `(4/r) r^m` ball around its left end.
    fn refine(&self, walk: &[usize], marks: &[usize], m: usize) -> Vec<usize> {
        let rm = self.r.powi(m as i32);
        let upper = 4.0 / self.r * rm;
        let lower = 2.0 * self.r * rm;
        let d = |i: usize, j: usize| self.metric.dist(&self.points[walk[i]], &self.points[walk[j]]);
        let mut out = vec![marks[0]];
        for pair in marks.windows(2) {
            let (mut x, y) = (pair[0], pair[1]);
            loop {
                let exit = (x + 1..y).find(|&z| d(x, z) > upper);
                let Some(e) = exit else { break };
                let z = (x + 1..e)
                    .rev()
                    .find(|&z| d(x, z) >= lower && d(z, y) >= lower)
                    .unwrap_or(e - 1)
                    .max(x + 1);
                out.push(z);
                x = z;
            }
            out.push(y);
        }
        out
    }

    fn audit(&self, walk: &[usize], marks: &[usize], m: usize, audit: &mut StageAudit) {
        let rm = self.r.powi(m as i32);
        let d = |i: usize, j: usize| self.metric.dist(&self.points[walk[i]], &self.points[walk[j]]);
        let mut lo_ratio = f64::INFINITY;
        let mut hi_ratio: f64 = 0.0;
        for pair in marks.windows(2) {
            lo_ratio = lo_ratio.min(d(pair[0], pair[1]) / (2.0 * self.r * rm));
            let spread = (pair[0]..=pair[1]).map(|z| d(pair[0], z)).fold(0.0, f64::max);
            hi_ratio = hi_ratio.max(spread / (5.0 / self.r * rm));
        }
        audit.intervals = marks.len() - 1;
        audit.walk_edges = walk.len() - 1;
        audit.min_endpoint_ratio = lo_ratio;
        audit.max_spread_ratio = hi_ratio;
    }
}

/// Builds nets, trees and the staged tours, and returns `F_N`: the final
/// 2-to-1 tour of `T_N` with equal time `1 / (2 (|V_N| - 1))` per edge.
pub fn remes_parameterize(system: &IfsSystem, sosc: &SoscData, n: usize, oracle: &AdjacencyOracle) -> Result<RemesResult> {
    let mut nets = build_nets(system, sosc, n)?;
    build_trees(system, &mut nets, oracle)?;
    let levels = audit_levels(system, sosc, &nets);
    let metric = system.metric();
    let finest = nets.last().unwrap();
    let size = finest.points.len();
    let points = finest.points.clone();
    let mut warnings = Vec::new();
    if size == 1 {
        let curve = SampledCurve::constant(points[0].clone(), metric.clone());
        let report = RemesReport {
            r: sosc.r,
            n,
            levels,
            stages: Vec::new(),
            tree_vertices: 1,
            tree_edges: 0,
            every_edge_twice: true,
            closed: true,
            warnings,
        };
        return Ok(RemesResult { curve, nets, report });
    }
    let rooted = Rooted::new(adjacency(size, &finest.edges));
    let mut tour = Tour {
        rooted: &rooted,
        points: &points,
        metric,
        traced: Fenwick(vec![0; size + 1]),
        traced_total: 0,
        r: sosc.r,
        n,
        words: &finest.words,
        lips: system.lips(),
        max_lip: system.max_lip(),
    };

    let flags = |m: usize| {
        let mut f = vec![false; size];
        for &i in &nets[m - 1].net_index {
            f[i] = true;
        }
        f
    };
    let v1 = flags(1);
    let t1 = steiner(&rooted, &v1);
    let start = nets[0].net_index[0];
    let mut walk = double_tour(&rooted.adj, start, |u, w| t1[u] && t1[w]);
    tour.mark_walk(&walk);
    let mut marks: Vec<usize> = (0..walk.len()).filter(|&p| v1[walk[p]]).collect();
    let mut stages = Vec::new();
    for m in 1..=n {
        let mut audit = StageAudit {
            stage: m,
            intervals: 0,
            walk_edges: 0,
            min_endpoint_ratio: 0.0,
            max_spread_ratio: 0.0,
            inserted_branches: 0,
            exhausted: Vec::new(),
            max_t: 0,
            refines_previous: true,
        };
        if m > 1 {
            let vm = flags(m);
            let tm = steiner(&rooted, &vm);
            let old: Vec<usize> = marks.iter().map(|&p| walk[p]).collect();
            let (w, mk) = tour.extend_to(&walk, &marks, &tm);
            audit.refines_previous = mk.iter().zip(&old).all(|(&p, &x)| w[p] == x);
            marks = tour.refine(&w, &mk, m);
            walk = w;
        }
        if m < n {
            let old: Vec<usize> = marks.iter().map(|&p| walk[p]).collect();
            let (w, mk) = tour.insert_branches(&walk, &marks, m, &mut audit);
            audit.refines_previous &= mk.iter().zip(&old).all(|(&p, &x)| w[p] == x);
            walk = w;
            marks = mk;
        }
        tour.audit(&walk, &marks, m, &mut audit);
        for &k in &audit.exhausted {
            warnings.push(Error::BranchExhausted { stage: m, interval: k }.to_string());
        }
        stages.push(audit);
    }

    let mut count: HashMap<(usize, usize), usize> = HashMap::new();
    for p in walk.windows(2) {
        *count.entry((p[0].min(p[1]), p[0].max(p[1]))).or_default() += 1;
    }
    let every_edge_twice = count.len() == finest.edges.len() && count.values().all(|&c| c == 2);
    let steps = walk.len() - 1;
    let t: Vec<f64> = (0..walk.len()).map(|i| i as f64 / steps as f64).collect();
    let x: Vec<Vec<f64>> = walk.iter().map(|&v| points[v].clone()).collect();
    let curve = SampledCurve::new(t, x, metric.clone())?;
    let report = RemesReport {
        r: sosc.r,
        n,
        levels,
        stages,
        tree_vertices: size,
        tree_edges: finest.edges.len(),
        every_edge_twice,
        closed: walk.first() == walk.last(),
        warnings,
    };
    Ok(RemesResult { curve, nets, report })
}
