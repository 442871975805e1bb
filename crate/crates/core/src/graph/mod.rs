//! Lazily generated vertex-transitive graphs.
//!
//! A [`GraphSpec`] describes an infinite (or, for cycles, finite) transitive
//! graph; vertices are [`VertexId`] values in canonical form, so equality of
//! encodings is equality of vertices. Nothing is ever materialized beyond the
//! vertices a caller asks about. For hot loops see [`LocalGraph`], which
//! interns vertices into dense `u32` handles.

mod arena;
mod constants;

pub use arena::{LocalGraph, Marks, Vid};
pub use constants::{free_cycles_cheeger, known_constants, KnownConstants};

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::parse::Cursor;
use crate::rng::mix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GraphSpec {
    Lattice(u32),
    Line,
    Cycle(u32),
    RegularTree(u32),
    FreeProduct(Box<GraphSpec>, Box<GraphSpec>),
    DirectProduct(Box<GraphSpec>, Box<GraphSpec>),
    GrandparentTree(u32),
}

/// One letter of a free-product word: a non-origin vertex of factor 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub factor: u8,
    pub vertex: VertexId,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VertexId {
    /// Lattice and line coordinates.
    Coords(Vec<i64>),
    /// Cycle position in `0..n`.
    Residue(u32),
    /// Reduced word over the generators `0..d` of the free product of `d`
    /// copies of Z/2; no letter repeats consecutively.
    Word(Vec<u8>),
    /// Alternating free-product word.
    Alt(Vec<Letter>),
    Pair(Box<VertexId>, Box<VertexId>),
    /// Go `up` parents from the origin, then follow the child digits in
    /// `down`. The origin is child 0 of its parent, so when `up > 0` the first
    /// digit is never 0.
    Grand { up: u32, down: Vec<u8> },
}

impl GraphSpec {
    pub fn tree(d: u32) -> Self {
        GraphSpec::RegularTree(d)
    }

    pub fn free(a: GraphSpec, b: GraphSpec) -> Self {
        GraphSpec::FreeProduct(Box::new(a), Box::new(b))
    }

    pub fn product(a: GraphSpec, b: GraphSpec) -> Self {
        GraphSpec::DirectProduct(Box::new(a), Box::new(b))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GraphSpec::Lattice(0) => Err(Error::Spec("lattice dimension must be positive".into())),
            GraphSpec::Cycle(n) if *n < 3 => Err(Error::Spec(format!("cycle({n}) needs n >= 3"))),
            GraphSpec::RegularTree(d) | GraphSpec::GrandparentTree(d) if !(3..=255).contains(d) => {
                Err(Error::Spec(format!("tree degree {d} outside 3..=255")))
            }
            GraphSpec::FreeProduct(a, b) | GraphSpec::DirectProduct(a, b) => {
                a.validate()?;
                b.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn degree(&self) -> usize {
        match self {
            GraphSpec::Lattice(k) => 2 * *k as usize,
            GraphSpec::Line | GraphSpec::Cycle(_) => 2,
            GraphSpec::RegularTree(d) => *d as usize,
            GraphSpec::FreeProduct(a, b) | GraphSpec::DirectProduct(a, b) => a.degree() + b.degree(),
            GraphSpec::GrandparentTree(d) => {
                let d = *d as usize;
                d + 1 + (d - 1) * (d - 1)
            }
        }
    }

    /// Number of vertices, `None` when infinite.
    pub fn order(&self) -> Option<u64> {
        match self {
            GraphSpec::Cycle(n) => Some(*n as u64),
            GraphSpec::DirectProduct(a, b) => Some(a.order()?.checked_mul(b.order()?)?),
            _ => None,
        }
    }

    pub fn origin(&self) -> VertexId {
        match self {
            GraphSpec::Lattice(k) => VertexId::Coords(vec![0; *k as usize]),
            GraphSpec::Line => VertexId::Coords(vec![0]),
            GraphSpec::Cycle(_) => VertexId::Residue(0),
            GraphSpec::RegularTree(_) => VertexId::Word(Vec::new()),
            GraphSpec::FreeProduct(..) => VertexId::Alt(Vec::new()),
            GraphSpec::DirectProduct(a, b) => VertexId::Pair(Box::new(a.origin()), Box::new(b.origin())),
            GraphSpec::GrandparentTree(_) => VertexId::Grand { up: 0, down: Vec::new() },
        }
    }

    pub fn is_free_product(&self) -> bool {
        matches!(self, GraphSpec::FreeProduct(..))
    }

    /// Checks that `v` is a canonical encoding of a vertex of this graph.
    pub fn check_vertex(&self, v: &VertexId) -> Result<()> {
        let bad = |why: &str| Err(Error::Encoding(format!("{v} is not a vertex of {self}: {why}")));
        match (self, v) {
            (GraphSpec::Lattice(k), VertexId::Coords(c)) if c.len() == *k as usize => Ok(()),
            (GraphSpec::Line, VertexId::Coords(c)) if c.len() == 1 => Ok(()),
            (GraphSpec::Cycle(n), VertexId::Residue(r)) => {
                if r < n {
                    Ok(())
                } else {
                    bad("residue out of range")
                }
            }
            (GraphSpec::RegularTree(d), VertexId::Word(w)) => {
                if w.iter().any(|&a| a as u32 >= *d) {
                    return bad("letter out of range");
                }
                if w.windows(2).any(|p| p[0] == p[1]) {
                    return bad("word not reduced");
                }
                Ok(())
            }
            (GraphSpec::FreeProduct(a, b), VertexId::Alt(word)) => {
                let factors = [a.as_ref(), b.as_ref()];
                for (i, l) in word.iter().enumerate() {
                    if l.factor > 1 {
                        return bad("factor index must be 0 or 1");
                    }
                    if i > 0 && word[i - 1].factor == l.factor {
                        return bad("factors must alternate");
                    }
                    let f = factors[l.factor as usize];
                    f.check_vertex(&l.vertex)?;
                    if l.vertex == f.origin() {
                        return bad("letters must avoid the factor origin");
                    }
                }
                Ok(())
            }
            (GraphSpec::DirectProduct(a, b), VertexId::Pair(x, y)) => {
                a.check_vertex(x)?;
                b.check_vertex(y)
            }
            (GraphSpec::GrandparentTree(d), VertexId::Grand { up, down }) => {
                if down.iter().any(|&c| c as u32 >= d - 1) {
                    return bad("child digit out of range");
                }
                if *up > 0 && down.first() == Some(&0) {
                    return bad("first digit 0 after climbing is not reduced");
                }
                Ok(())
            }
            _ => bad("wrong encoding kind"),
        }
    }
}

impl fmt::Display for GraphSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphSpec::Lattice(k) => write!(f, "lattice({k})"),
            GraphSpec::Line => write!(f, "line"),
            GraphSpec::Cycle(n) => write!(f, "cycle({n})"),
            GraphSpec::RegularTree(d) => write!(f, "tree({d})"),
            GraphSpec::FreeProduct(a, b) => write!(f, "free({a},{b})"),
            GraphSpec::DirectProduct(a, b) => write!(f, "prod({a},{b})"),
            GraphSpec::GrandparentTree(d) => write!(f, "grandparent({d})"),
        }
    }
}

fn parse_graph(c: &mut Cursor) -> Result<GraphSpec> {
    let name = c.ident()?;
    let spec = match name {
        "line" => GraphSpec::Line,
        "lattice" | "cycle" | "tree" | "grandparent" => {
            c.expect('(')?;
            let n = c.integer()? as u32;
            c.expect(')')?;
            match name {
                "lattice" => GraphSpec::Lattice(n),
                "cycle" => GraphSpec::Cycle(n),
                "tree" => GraphSpec::RegularTree(n),
                _ => GraphSpec::GrandparentTree(n),
            }
        }
        "free" | "prod" => {
            c.expect('(')?;
            let a = parse_graph(c)?;
            c.expect(',')?;
            let b = parse_graph(c)?;
            c.expect(')')?;
            if name == "free" {
                GraphSpec::free(a, b)
            } else {
                GraphSpec::product(a, b)
            }
        }
        other => return c.err(format!("unknown graph '{other}'")),
    };
    Ok(spec)
}

impl FromStr for GraphSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut c = Cursor::new(s);
        let g = parse_graph(&mut c)?;
        c.finish()?;
        g.validate()?;
        Ok(g)
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T], sep: &str) -> fmt::Result {
            for (i, x) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                write!(f, "{x}")?;
            }
            Ok(())
        }
        match self {
            VertexId::Coords(c) => {
                f.write_str("(")?;
                join(f, c, ",")?;
                f.write_str(")")
            }
            VertexId::Residue(r) => write!(f, "{r}"),
            VertexId::Word(w) => {
                f.write_str("[")?;
                join(f, w, ".")?;
                f.write_str("]")
            }
            VertexId::Alt(w) => {
                f.write_str("<")?;
                for (i, l) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str("|")?;
                    }
                    write!(f, "{}:{}", l.factor + 1, l.vertex)?;
                }
                f.write_str(">")
            }
            VertexId::Pair(a, b) => write!(f, "({a};{b})"),
            VertexId::Grand { up, down } => {
                write!(f, "^{up}[")?;
                join(f, down, ".")?;
                f.write_str("]")
            }
        }
    }
}

const KEY_COORDS: u64 = 0x636f_6f72_6473;
const KEY_RESIDUE: u64 = 0x7265_7369_6475;
const KEY_WORD: u64 = 0x776f_7264;
const KEY_ALT: u64 = 0x616c_74;
const KEY_PAIR: u64 = 0x7061_6972;
const KEY_GRAND: u64 = 0x6772_616e_64;

/// Stable 64-bit key of a vertex; the seed of every per-vertex random stream.
pub fn vertex_key(v: &VertexId) -> u64 {
    match v {
        VertexId::Coords(c) => c.iter().fold(KEY_COORDS, |a, &x| mix(a, x as u64)),
        VertexId::Residue(r) => mix(KEY_RESIDUE, *r as u64),
        VertexId::Word(w) => w.iter().fold(KEY_WORD, |a, &x| mix(a, x as u64)),
        VertexId::Alt(w) => w.iter().fold(KEY_ALT, |a, l| mix(a, letter_key(l.factor, &l.vertex))),
        VertexId::Pair(a, b) => mix(mix(KEY_PAIR, vertex_key(a)), vertex_key(b)),
        VertexId::Grand { up, down } => down.iter().fold(mix(KEY_GRAND, *up as u64), |a, &x| mix(a, x as u64)),
    }
}

pub(crate) fn letter_key(factor: u8, v: &VertexId) -> u64 {
    mix(factor as u64 + 1, vertex_key(v))
}

pub(crate) fn root_key(spec: &GraphSpec) -> u64 {
    vertex_key(&spec.origin())
}

/// Graph distance from the origin, computed from the encoding alone.
pub fn dist_from_origin(g: &GraphSpec, v: &VertexId) -> u64 {
    match (g, v) {
        (GraphSpec::Lattice(_) | GraphSpec::Line, VertexId::Coords(c)) => c.iter().map(|x| x.unsigned_abs()).sum(),
        (GraphSpec::Cycle(n), VertexId::Residue(r)) => (*r).min(n - r) as u64,
        (GraphSpec::RegularTree(_), VertexId::Word(w)) => w.len() as u64,
        (GraphSpec::FreeProduct(a, b), VertexId::Alt(w)) => w
            .iter()
            .map(|l| dist_from_origin(if l.factor == 0 { a } else { b }, &l.vertex))
            .sum(),
        (GraphSpec::DirectProduct(a, b), VertexId::Pair(x, y)) => dist_from_origin(a, x) + dist_from_origin(b, y),
        (GraphSpec::GrandparentTree(_), VertexId::Grand { up, down }) => {
            (*up as u64).div_ceil(2) + (down.len() as u64).div_ceil(2)
        }
        _ => 0,
    }
}

fn grand_parent_of(up: u32, down: &[u8]) -> VertexId {
    if down.is_empty() {
        VertexId::Grand { up: up + 1, down: Vec::new() }
    } else {
        VertexId::Grand { up, down: down[..down.len() - 1].to_vec() }
    }
}

fn grand_child_of(up: u32, down: &[u8], c: u8) -> VertexId {
    if down.is_empty() && up > 0 && c == 0 {
        VertexId::Grand { up: up - 1, down: Vec::new() }
    } else {
        let mut w = down.to_vec();
        w.push(c);
        VertexId::Grand { up, down: w }
    }
}

fn factor_nbrs(g: &GraphSpec, word: &[Letter], i: u8, out: &mut Vec<VertexId>) {
    let factor = match g {
        GraphSpec::FreeProduct(a, b) => {
            if i == 0 {
                a.as_ref()
            } else {
                b.as_ref()
            }
        }
        _ => unreachable!(),
    };
    match word.last() {
        Some(last) if last.factor == i => {
            let fo = factor.origin();
            for y in neighbors_unchecked(factor, &last.vertex) {
                let mut w = word[..word.len() - 1].to_vec();
                if y != fo {
                    w.push(Letter { factor: i, vertex: y });
                }
                out.push(VertexId::Alt(w));
            }
        }
        _ => {
            for y in neighbors_unchecked(factor, &factor.origin()) {
                let mut w = word.to_vec();
                w.push(Letter { factor: i, vertex: y });
                out.push(VertexId::Alt(w));
            }
        }
    }
}

/// Neighbors of a vertex assumed canonical. The order is fixed:
/// lattices list `+e_i, -e_i` per axis, trees list generators in order,
/// free products list factor 1 then factor 2, products list left moves then
/// right moves, and grandparent trees list parent, children, grandparent,
/// grandchildren.
pub(crate) fn neighbors_unchecked(g: &GraphSpec, v: &VertexId) -> Vec<VertexId> {
    let mut out = Vec::with_capacity(g.degree());
    match (g, v) {
        (GraphSpec::Lattice(_) | GraphSpec::Line, VertexId::Coords(c)) => {
            for i in 0..c.len() {
                for s in [1i64, -1] {
                    let mut x = c.clone();
                    x[i] += s;
                    out.push(VertexId::Coords(x));
                }
            }
        }
        (GraphSpec::Cycle(n), VertexId::Residue(r)) => {
            out.push(VertexId::Residue((r + 1) % n));
            out.push(VertexId::Residue((r + n - 1) % n));
        }
        (GraphSpec::RegularTree(d), VertexId::Word(w)) => {
            for a in 0..*d as u8 {
                let mut x = w.clone();
                if x.last() == Some(&a) {
                    x.pop();
                } else {
                    x.push(a);
                }
                out.push(VertexId::Word(x));
            }
        }
        (GraphSpec::FreeProduct(..), VertexId::Alt(w)) => {
            factor_nbrs(g, w, 0, &mut out);
            factor_nbrs(g, w, 1, &mut out);
        }
        (GraphSpec::DirectProduct(a, b), VertexId::Pair(x, y)) => {
            for x2 in neighbors_unchecked(a, x) {
                out.push(VertexId::Pair(Box::new(x2), y.clone()));
            }
            for y2 in neighbors_unchecked(b, y) {
                out.push(VertexId::Pair(x.clone(), Box::new(y2)));
            }
        }
        (GraphSpec::GrandparentTree(d), VertexId::Grand { up, down }) => {
            let kids = (*d - 1) as u8;
            let parent = grand_parent_of(*up, down);
            let children: Vec<VertexId> = (0..kids).map(|c| grand_child_of(*up, down, c)).collect();
            out.push(parent.clone());
            out.extend(children.iter().cloned());
            if let VertexId::Grand { up: pu, down: pd } = &parent {
                out.push(grand_parent_of(*pu, pd));
            }
            for ch in &children {
                if let VertexId::Grand { up: cu, down: cd } = ch {
                    for c in 0..kids {
                        out.push(grand_child_of(*cu, cd, c));
                    }
                }
            }
        }
        _ => unreachable!("vertex kind does not match graph"),
    }
    out
}

pub fn neighbors(g: &GraphSpec, v: &VertexId) -> Result<Vec<VertexId>> {
    g.check_vertex(v)?;
    Ok(neighbors_unchecked(g, v))
}

/// The `G_i`-neighbourhood `N_i(v)` of a free-product vertex, `i` in `{1, 2}`.
pub fn factor_neighborhood(g: &GraphSpec, v: &VertexId, i: usize) -> Result<Vec<VertexId>> {
    if !g.is_free_product() {
        return Err(Error::Spec(format!("{g} is not a free product")));
    }
    if !(1..=2).contains(&i) {
        return Err(Error::Argument(format!("factor index {i} must be 1 or 2")));
    }
    g.check_vertex(v)?;
    let VertexId::Alt(w) = v else { unreachable!() };
    let mut out = Vec::new();
    factor_nbrs(g, w, (i - 1) as u8, &mut out);
    Ok(out)
}

/// Hash set of canonical vertices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexSet(FxHashSet<VertexId>);

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, v: VertexId) -> bool {
        self.0.insert(v)
    }

    pub fn remove(&mut self, v: &VertexId) -> bool {
        self.0.remove(v)
    }

    pub fn contains(&self, v: &VertexId) -> bool {
        self.0.contains(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VertexId> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Members in canonical order, for reproducible output.
    pub fn sorted(&self) -> Vec<&VertexId> {
        let mut v: Vec<&VertexId> = self.0.iter().collect();
        v.sort();
        v
    }
}

impl FromIterator<VertexId> for VertexSet {
    fn from_iter<I: IntoIterator<Item = VertexId>>(iter: I) -> Self {
        VertexSet(iter.into_iter().collect())
    }
}

impl Extend<VertexId> for VertexSet {
    fn extend<I: IntoIterator<Item = VertexId>>(&mut self, iter: I) {
        self.0.extend(iter)
    }
}

impl IntoIterator for VertexSet {
    type Item = VertexId;
    type IntoIter = std::collections::hash_set::IntoIter<VertexId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a VertexId;
    type IntoIter = std::collections::hash_set::Iter<'a, VertexId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

fn check_all(g: &GraphSpec, a: &VertexSet) -> Result<()> {
    a.iter().try_for_each(|v| g.check_vertex(v))
}

/// `{x not in A : x ~ y for some y in A}`.
pub fn ext_boundary(g: &GraphSpec, a: &VertexSet) -> Result<VertexSet> {
    check_all(g, a)?;
    let mut out = VertexSet::new();
    for v in a {
        for u in neighbors_unchecked(g, v) {
            if !a.contains(&u) {
                out.insert(u);
            }
        }
    }
    Ok(out)
}

/// `{x in A : x ~ y for some y not in A}`.
pub fn int_boundary(g: &GraphSpec, a: &VertexSet) -> Result<VertexSet> {
    check_all(g, a)?;
    Ok(a
        .iter()
        .filter(|v| neighbors_unchecked(g, v).iter().any(|u| !a.contains(u)))
        .cloned()
        .collect())
}

pub fn closure(g: &GraphSpec, a: &VertexSet) -> Result<VertexSet> {
    let mut out = ext_boundary(g, a)?;
    out.extend(a.iter().cloned());
    Ok(out)
}

/// Vertices within distance `r` of `center`, by breadth-first expansion.
pub fn ball(g: &GraphSpec, center: &VertexId, r: usize) -> Result<VertexSet> {
    Ok(ball_layers(g, center, r)?.into_keys().collect())
}

pub(crate) fn ball_layers(g: &GraphSpec, center: &VertexId, r: usize) -> Result<FxHashMap<VertexId, usize>> {
    g.check_vertex(center)?;
    let mut seen = FxHashMap::default();
    seen.insert(center.clone(), 0);
    let mut queue = VecDeque::from([center.clone()]);
    while let Some(v) = queue.pop_front() {
        let dv = seen[&v];
        if dv == r {
            continue;
        }
        for u in neighbors_unchecked(g, &v) {
            if !seen.contains_key(&u) {
                seen.insert(u.clone(), dv + 1);
                queue.push_back(u);
            }
        }
    }
    Ok(seen)
}

/// Graph distance, or `None` when it exceeds `cap`.
pub fn dist(g: &GraphSpec, u: &VertexId, v: &VertexId, cap: usize) -> Result<Option<usize>> {
    g.check_vertex(u)?;
    g.check_vertex(v)?;
    if u == v {
        return Ok(Some(0));
    }
    let mut seen = FxHashSet::default();
    seen.insert(u.clone());
    let mut frontier = vec![u.clone()];
    for d in 1..=cap {
        let mut next = Vec::new();
        for x in &frontier {
            for y in neighbors_unchecked(g, x) {
                if &y == v {
                    return Ok(Some(d));
                }
                if seen.insert(y.clone()) {
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(None)
}

/// Whether `a` induces a connected subgraph (the empty set counts as connected).
pub fn is_connected(g: &GraphSpec, a: &VertexSet) -> Result<bool> {
    check_all(g, a)?;
    let Some(start) = a.iter().next() else { return Ok(true) };
    let mut seen = FxHashSet::default();
    seen.insert(start.clone());
    let mut stack = vec![start.clone()];
    while let Some(v) = stack.pop() {
        for u in neighbors_unchecked(g, &v) {
            if a.contains(&u) && seen.insert(u.clone()) {
                stack.push(u);
            }
        }
    }
    Ok(seen.len() == a.len())
}
