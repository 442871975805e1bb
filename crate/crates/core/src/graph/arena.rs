use std::collections::VecDeque;

use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::{dist_from_origin, letter_key, neighbors_unchecked, root_key, vertex_key, GraphSpec, Letter, VertexId};
use crate::error::{Error, Result};
use crate::rng::mix;

/// Dense handle of a vertex inside one [`LocalGraph`]. Handles are only
/// meaningful for the graph that issued them.
pub type Vid = u32;

const UNSET: u32 = u32::MAX;

#[derive(Clone, Copy)]
struct Node {
    parent: u32,
    letter: u32,
}

#[derive(Clone)]
struct LetterInfo {
    factor: u8,
    vertex: VertexId,
    key: u64,
    dist: u32,
    /// Factor neighbours as letter ids, `UNSET` standing for the factor origin.
    nbrs: Option<Vec<u32>>,
}

#[derive(Clone)]
enum Repr {
    Hashed {
        verts: Vec<VertexId>,
        index: FxHashMap<VertexId, u32>,
    },
    Tree {
        d: u32,
        nodes: Vec<Node>,
        children: FxHashMap<(u32, u32), u32>,
    },
    Free {
        factors: [GraphSpec; 2],
        letters: Vec<LetterInfo>,
        letter_index: FxHashMap<(u8, VertexId), u32>,
        origin_nbrs: [Vec<u32>; 2],
        nodes: Vec<Node>,
        children: FxHashMap<(u32, u32), u32>,
    },
}

/// Interning arena over a lazily generated graph.
///
/// Vertices get consecutive handles on first sight, adjacency is cached, and
/// words of trees and free products are stored as a trie so a step costs
/// O(1) regardless of word length. Neighbour order agrees with
/// [`neighbors`](super::neighbors).
#[derive(Clone)]
pub struct LocalGraph {
    spec: GraphSpec,
    degree: usize,
    adj: Vec<u32>,
    keys: Vec<u64>,
    depth: Vec<u32>,
    repr: Repr,
}

impl LocalGraph {
    pub fn new(spec: &GraphSpec) -> Result<Self> {
        spec.validate()?;
        let repr = match spec {
            GraphSpec::RegularTree(d) => Repr::Tree {
                d: *d,
                nodes: Vec::new(),
                children: FxHashMap::default(),
            },
            GraphSpec::FreeProduct(a, b) => Repr::Free {
                factors: [(**a).clone(), (**b).clone()],
                letters: Vec::new(),
                letter_index: FxHashMap::default(),
                origin_nbrs: [Vec::new(), Vec::new()],
                nodes: Vec::new(),
                children: FxHashMap::default(),
            },
            _ => Repr::Hashed {
                verts: Vec::new(),
                index: FxHashMap::default(),
            },
        };
        let mut g = LocalGraph {
            spec: spec.clone(),
            degree: spec.degree(),
            adj: Vec::new(),
            keys: Vec::new(),
            depth: Vec::new(),
            repr,
        };
        match &mut g.repr {
            Repr::Hashed { .. } => {
                g.intern_hashed(spec.origin());
            }
            Repr::Tree { nodes, .. } => {
                nodes.push(Node { parent: UNSET, letter: UNSET });
                g.push_slot(root_key(spec), 0);
            }
            Repr::Free { nodes, .. } => {
                nodes.push(Node { parent: UNSET, letter: UNSET });
                g.push_slot(root_key(spec), 0);
                for i in 0..2u8 {
                    let ids = g.factor_origin_letters(i);
                    if let Repr::Free { origin_nbrs, .. } = &mut g.repr {
                        origin_nbrs[i as usize] = ids;
                    }
                }
            }
        }
        Ok(g)
    }

    pub fn spec(&self) -> &GraphSpec {
        &self.spec
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn origin(&self) -> Vid {
        0
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Stable key of the vertex, equal to [`vertex_key`] of its encoding.
    #[inline]
    pub fn key(&self, h: Vid) -> u64 {
        self.keys[h as usize]
    }

    /// Graph distance from the origin.
    #[inline]
    pub fn depth(&self, h: Vid) -> u32 {
        self.depth[h as usize]
    }

    fn push_slot(&mut self, key: u64, depth: u32) -> u32 {
        let h = self.keys.len() as u32;
        self.keys.push(key);
        self.depth.push(depth);
        self.adj.resize(self.adj.len() + self.degree, UNSET);
        h
    }

    fn intern_hashed(&mut self, v: VertexId) -> u32 {
        let Repr::Hashed { index, .. } = &self.repr else { unreachable!() };
        if let Some(&h) = index.get(&v) {
            return h;
        }
        let key = vertex_key(&v);
        let depth = dist_from_origin(&self.spec, &v) as u32;
        let h = self.push_slot(key, depth);
        let Repr::Hashed { verts, index } = &mut self.repr else { unreachable!() };
        verts.push(v.clone());
        index.insert(v, h);
        h
    }

    fn letter_id(&mut self, factor: u8, v: &VertexId) -> u32 {
        let Repr::Free { factors, letters, letter_index, .. } = &mut self.repr else { unreachable!() };
        if let Some(&l) = letter_index.get(&(factor, v.clone())) {
            return l;
        }
        let id = letters.len() as u32;
        letters.push(LetterInfo {
            factor,
            vertex: v.clone(),
            key: letter_key(factor, v),
            dist: dist_from_origin(&factors[factor as usize], v) as u32,
            nbrs: None,
        });
        letter_index.insert((factor, v.clone()), id);
        id
    }

    fn factor_origin_letters(&mut self, i: u8) -> Vec<u32> {
        let Repr::Free { factors, .. } = &self.repr else { unreachable!() };
        let f = factors[i as usize].clone();
        neighbors_unchecked(&f, &f.origin()).iter().map(|y| self.letter_id(i, y)).collect()
    }

    fn letter_nbrs(&mut self, l: u32) -> Vec<u32> {
        let Repr::Free { factors, letters, .. } = &self.repr else { unreachable!() };
        let info = &letters[l as usize];
        if let Some(n) = &info.nbrs {
            return n.clone();
        }
        let f = factors[info.factor as usize].clone();
        let factor = info.factor;
        let x = info.vertex.clone();
        let fo = f.origin();
        let ids: Vec<u32> = neighbors_unchecked(&f, &x)
            .iter()
            .map(|y| if *y == fo { UNSET } else { self.letter_id(factor, y) })
            .collect();
        let Repr::Free { letters, .. } = &mut self.repr else { unreachable!() };
        letters[l as usize].nbrs = Some(ids.clone());
        ids
    }

    fn trie_child(&mut self, h: u32, letter: u32) -> u32 {
        let (key, depth) = match &self.repr {
            Repr::Tree { children, .. } => {
                if let Some(&c) = children.get(&(h, letter)) {
                    return c;
                }
                (mix(self.keys[h as usize], letter as u64), self.depth[h as usize] + 1)
            }
            Repr::Free { children, letters, .. } => {
                if let Some(&c) = children.get(&(h, letter)) {
                    return c;
                }
                let info = &letters[letter as usize];
                (mix(self.keys[h as usize], info.key), self.depth[h as usize] + info.dist)
            }
            Repr::Hashed { .. } => unreachable!(),
        };
        let c = self.push_slot(key, depth);
        match &mut self.repr {
            Repr::Tree { nodes, children, .. } | Repr::Free { nodes, children, .. } => {
                nodes.push(Node { parent: h, letter });
                children.insert((h, letter), c);
            }
            Repr::Hashed { .. } => unreachable!(),
        }
        c
    }

    fn fill(&mut self, h: u32) {
        let deg = self.degree;
        let mut out: SmallVec<[u32; 16]> = SmallVec::new();
        match &self.repr {
            Repr::Hashed { verts, .. } => {
                let v = verts[h as usize].clone();
                for u in neighbors_unchecked(&self.spec, &v) {
                    out.push(self.intern_hashed(u));
                }
            }
            Repr::Tree { d, nodes, .. } => {
                let d = *d;
                let node = nodes[h as usize];
                for a in 0..d {
                    if h != 0 && node.letter == a {
                        out.push(node.parent);
                    } else {
                        out.push(self.trie_child(h, a));
                    }
                }
            }
            Repr::Free { nodes, letters, .. } => {
                let node = nodes[h as usize];
                let last_factor = if h == 0 { None } else { Some(letters[node.letter as usize].factor) };
                for i in 0..2u8 {
                    if last_factor == Some(i) {
                        for y in self.letter_nbrs(node.letter) {
                            if y == UNSET {
                                out.push(node.parent);
                            } else {
                                out.push(self.trie_child(node.parent, y));
                            }
                        }
                    } else {
                        let Repr::Free { origin_nbrs, .. } = &self.repr else { unreachable!() };
                        let ys = origin_nbrs[i as usize].clone();
                        for y in ys {
                            out.push(self.trie_child(h, y));
                        }
                    }
                }
            }
        }
        debug_assert_eq!(out.len(), deg);
        let base = h as usize * deg;
        self.adj[base..base + deg].copy_from_slice(&out);
    }

    /// The `k`-th neighbour of `h`.
    #[inline]
    pub fn neighbor(&mut self, h: Vid, k: usize) -> Vid {
        let i = h as usize * self.degree + k;
        let n = self.adj[i];
        if n != UNSET {
            return n;
        }
        self.fill(h);
        self.adj[i]
    }

    pub fn neighbors(&mut self, h: Vid) -> SmallVec<[Vid; 16]> {
        let base = h as usize * self.degree;
        if self.adj[base..base + self.degree].contains(&UNSET) {
            self.fill(h);
        }
        SmallVec::from_slice(&self.adj[base..base + self.degree])
    }

    /// Handle of a canonical vertex, creating it if needed.
    pub fn intern(&mut self, v: &VertexId) -> Result<Vid> {
        self.spec.check_vertex(v)?;
        match (&self.repr, v) {
            (Repr::Hashed { .. }, _) => Ok(self.intern_hashed(v.clone())),
            (Repr::Tree { .. }, VertexId::Word(w)) => {
                let mut h = 0;
                for &a in w {
                    h = self.trie_child(h, a as u32);
                }
                Ok(h)
            }
            (Repr::Free { .. }, VertexId::Alt(w)) => {
                let mut h = 0;
                for l in w {
                    let id = self.letter_id(l.factor, &l.vertex);
                    h = self.trie_child(h, id);
                }
                Ok(h)
            }
            _ => Err(Error::Encoding(format!("{v} does not match {}", self.spec))),
        }
    }

    /// Canonical encoding of a handle.
    pub fn vertex(&self, h: Vid) -> VertexId {
        match &self.repr {
            Repr::Hashed { verts, .. } => verts[h as usize].clone(),
            Repr::Tree { nodes, .. } => {
                let mut w = Vec::new();
                let mut x = h;
                while x != 0 {
                    w.push(nodes[x as usize].letter as u8);
                    x = nodes[x as usize].parent;
                }
                w.reverse();
                VertexId::Word(w)
            }
            Repr::Free { nodes, letters, .. } => {
                let mut w = Vec::new();
                let mut x = h;
                while x != 0 {
                    let info = &letters[nodes[x as usize].letter as usize];
                    w.push(Letter { factor: info.factor, vertex: info.vertex.clone() });
                    x = nodes[x as usize].parent;
                }
                w.reverse();
                VertexId::Alt(w)
            }
        }
    }

    /// Free products only: factor (0 or 1) of the `k`-th neighbour slot.
    pub fn factor_of_slot(&self, k: usize) -> Option<u8> {
        match &self.spec {
            GraphSpec::FreeProduct(a, _) => Some(if k < a.degree() { 0 } else { 1 }),
            _ => None,
        }
    }

    /// Breadth-first ball around `center`; entries are `(vertex, distance)` in
    /// visiting order. Fails once more than `limit` vertices are reached.
    pub fn ball(&mut self, center: Vid, r: u32, limit: usize) -> Result<Vec<(Vid, u32)>> {
        self.ball_from(&[center], r, 0..self.degree, limit)
    }

    /// Multi-source breadth-first search moving only through neighbour slots in
    /// `slots`, up to distance `r` from the sources.
    pub fn ball_from(
        &mut self,
        sources: &[Vid],
        r: u32,
        slots: std::ops::Range<usize>,
        limit: usize,
    ) -> Result<Vec<(Vid, u32)>> {
        let mut seen: FxHashMap<Vid, u32> = FxHashMap::default();
        let mut order = Vec::new();
        let mut queue = VecDeque::new();
        for &s in sources {
            if seen.insert(s, 0).is_none() {
                order.push((s, 0));
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let dv = seen[&v];
            if dv == r {
                continue;
            }
            for k in slots.clone() {
                let u = self.neighbor(v, k);
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(u) {
                    e.insert(dv + 1);
                    order.push((u, dv + 1));
                    if order.len() > limit {
                        return Err(Error::Resource(format!("ball exceeds {limit} vertices")));
                    }
                    queue.push_back(u);
                }
            }
        }
        Ok(order)
    }
}

/// Membership marks indexed by handle; clearing is O(1).
#[derive(Clone)]
pub struct Marks {
    stamp: Vec<u32>,
    epoch: u32,
}

impl Default for Marks {
    fn default() -> Self {
        Self::new()
    }
}

impl Marks {
    pub fn new() -> Self {
        Marks { stamp: Vec::new(), epoch: 1 }
    }

    pub fn clear(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
    }

    /// Marks `h`; returns `true` if it was not marked before.
    #[inline]
    pub fn insert(&mut self, h: Vid) -> bool {
        let i = h as usize;
        if i >= self.stamp.len() {
            self.stamp.resize((i + 1).max(self.stamp.len() * 2), 0);
        }
        if self.stamp[i] == self.epoch {
            false
        } else {
            self.stamp[i] = self.epoch;
            true
        }
    }

    #[inline]
    pub fn contains(&self, h: Vid) -> bool {
        self.stamp.get(h as usize) == Some(&self.epoch)
    }
}
