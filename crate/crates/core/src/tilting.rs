//! Reachable hearts, simple tilts and exchange graphs.
//!
//! A reachable heart is written `(phi, k)`: the image under `phi` of the
//! chain heart `<S1[k], S2>`, whose simples are `phi(S1)[k]` and `phi(S2)`.
//! At finite level a chain heart with `1 <= k <= n-3` has a second
//! description, `(phi Upsilon [k+2-n], n-2-k)`, with the two simples listed
//! in the opposite order; [`Heart`] always stores the representative with
//! the smaller [`rep_key`].

use std::cell::RefCell;
use std::cmp::Reverse;
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::braid::{AutEq, AutEqInfty, ProjectiveClass, Transporter};
use crate::error::{Error, Result};
use crate::lattice::{shift_kclass, KClass};
use crate::level::Level;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseObject {
    S1,
    S2,
    /// The extension `S2 -> E -> S1`.
    E,
    /// The extension `S1 -> F -> S2` (level 2 only).
    F,
}

impl BaseObject {
    fn index(self) -> usize {
        self as usize
    }

    pub fn class(self) -> KClass {
        match self {
            BaseObject::S1 => KClass::S1,
            BaseObject::S2 => KClass::S2,
            BaseObject::E | BaseObject::F => KClass::E,
        }
    }
}

/// The object `transporter(base)[shift]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ObjectDesc {
    pub transporter: Transporter,
    pub base: BaseObject,
    pub shift: i64,
}

impl ObjectDesc {
    pub fn new(transporter: Transporter, base: BaseObject, shift: i64) -> Self {
        ObjectDesc {
            transporter,
            base,
            shift,
        }
        .normalized()
    }

    pub fn level(&self) -> Level {
        self.transporter.level()
    }

    pub fn class(&self) -> KClass {
        class_of(self)
    }

    /// Rewrites the object as a shift of `S1`, `S2`, `E` or `F` when the
    /// transporter maps the base object to one of them.
    pub fn normalized(self) -> ObjectDesc {
        let n = self.level();
        let (bare, m) = split_shift(&self.transporter);
        let image = if bare.as_shift() == Some(0) {
            Some((self.base, 0))
        } else {
            with_base_table(n, |t| t.get(&bare).and_then(|row| row[self.base.index()]))
        };
        match image {
            Some((b, s)) => ObjectDesc {
                transporter: Transporter::identity(n),
                base: b,
                shift: self.shift + s + m,
            },
            None => self,
        }
    }
}

/// `t = bare [m]` with `bare` carrying no shift.
pub fn split_shift(t: &Transporter) -> (Transporter, i64) {
    match t {
        Transporter::Finite(a) => (Transporter::Finite(AutEq { shift: 0, ..*a }), a.shift),
        Transporter::Infinite(a) => {
            let (r, q) = a.split_shift();
            (Transporter::Infinite(AutEqInfty { sigma_power: r }), q)
        }
    }
}

type BaseRow = [Option<(BaseObject, i64)>; 4];

/// Images of the base objects under the generators, where they are again
/// base objects up to shift.
fn generator_rows(n: Level) -> Vec<(Transporter, BaseRow)> {
    use BaseObject::*;
    let sigma = Transporter::sigma(n);
    let mut out = vec![
        (sigma, [Some((S2, 1)), Some((E, 0)), Some((S1, 0)), None]),
        (sigma.inverse(), [Some((E, 0)), Some((S1, -1)), Some((S2, 0)), None]),
    ];
    if let Ok(k) = n.get() {
        let two = k == 2;
        let u = Transporter::upsilon(n).expect("finite");
        out.push((
            u,
            [Some((S2, 0)), Some((S1, k - 2)), two.then_some((F, 0)), two.then_some((E, 0))],
        ));
        out.push((
            u.inverse(),
            [Some((S2, 2 - k)), Some((S1, 0)), two.then_some((F, 0)), two.then_some((E, 0))],
        ));
        if two {
            let ss = Transporter::sigma_star(n).expect("finite");
            out.push((ss, [Some((F, 0)), Some((S1, 1)), None, Some((S2, 0))]));
            out.push((ss.inverse(), [Some((S2, -1)), Some((F, 0)), None, Some((S1, 0))]));
        }
    }
    out
}

/// Every shift-free transporter reachable from the generators through
/// elements that keep at least two base objects among the base objects.
fn build_base_table(n: Level) -> HashMap<Transporter, BaseRow> {
    let gens = generator_rows(n);
    let id = Transporter::identity(n);
    let mut table: HashMap<Transporter, BaseRow> = HashMap::new();
    let all = [BaseObject::S1, BaseObject::S2, BaseObject::E, BaseObject::F];
    let mut start: BaseRow = [None; 4];
    for b in all {
        start[b.index()] = Some((b, 0));
    }
    table.insert(id, start);
    let mut queue = VecDeque::from([(id, start)]);
    while let Some((t, row)) = queue.pop_front() {
        if table.len() > 4096 {
            break;
        }
        for (g, grow) in &gens {
            let (bare, m) = split_shift(&g.compose(&t).expect("same level"));
            let mut next: BaseRow = [None; 4];
            for b in all {
                if let Some((c, s)) = row[b.index()] {
                    next[b.index()] = grow[c.index()].map(|(d, s2)| (d, s + s2 - m));
                }
            }
            if next.iter().flatten().count() < 2 {
                continue;
            }
            let entry = table.entry(bare).or_insert([None; 4]);
            let before = *entry;
            for i in 0..4 {
                if entry[i].is_none() {
                    entry[i] = next[i];
                }
            }
            if *entry != before {
                queue.push_back((bare, *entry));
            }
        }
    }
    table
}

fn with_base_table<R>(n: Level, f: impl FnOnce(&HashMap<Transporter, BaseRow>) -> R) -> R {
    thread_local! {
        static TABLES: RefCell<HashMap<Level, Rc<HashMap<Transporter, BaseRow>>>> =
            RefCell::new(HashMap::new());
    }
    let table = TABLES.with(|c| {
        c.borrow_mut()
            .entry(n)
            .or_insert_with(|| Rc::new(build_base_table(n)))
            .clone()
    });
    f(&table)
}

impl fmt::Display for ObjectDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = format!("{:?}", self.base);
        let body = if self.transporter.as_shift() == Some(0) {
            base
        } else {
            format!("{}({})", self.transporter, base)
        };
        if self.shift == 0 {
            write!(f, "{body}")
        } else {
            write!(f, "{body}[{}]", self.shift)
        }
    }
}

/// Class in `K_0` of a described object.
pub fn class_of(obj: &ObjectDesc) -> KClass {
    obj.transporter
        .kaction()
        .apply(shift_kclass(obj.shift, obj.base.class()))
}

/// A reachable heart in canonical coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Heart {
    pub phi: Transporter,
    pub k: i64,
}

/// Ordering used to choose between the two descriptions of a chain heart.
pub fn rep_key(phi: &Transporter) -> (i64, Reverse<[[i64; 2]; 2]>, i64, i64) {
    match phi {
        Transporter::Finite(a) => {
            let m = a.sl2.0;
            let size = m.iter().flatten().map(|v| v.abs()).sum();
            (size, Reverse(m), a.expsum, a.shift)
        }
        Transporter::Infinite(a) => (0, Reverse([[0; 2]; 2]), 0, a.sigma_power),
    }
}

/// The other description of a chain heart, if there is one.
fn alternate(phi: &Transporter, k: i64) -> Option<(Transporter, i64)> {
    let n = phi.level().get().ok()?;
    if k < 1 || k > n - 3 {
        return None;
    }
    let lv = phi.level();
    let alt = phi
        .compose(&Transporter::upsilon(lv).ok()?)
        .ok()?
        .compose(&Transporter::shift_by(lv, k + 2 - n))
        .ok()?;
    Some((alt, n - 2 - k))
}

/// Canonicalizes `(phi, k)`; the flag reports whether the simples were
/// listed in the opposite order.
fn canon(phi: Transporter, k: i64) -> Result<(Heart, bool)> {
    let lv = phi.level();
    if k < 0 {
        return Err(Error::NonCanonicalHeart(format!("negative chain index {k}")));
    }
    if let Level::Finite(_) = lv {
        let n = lv.get()?;
        if k > n - 2 || (n == 2 && k != 0) {
            return Err(Error::NonCanonicalHeart(format!("chain index {k} at level {n}")));
        }
        if n >= 3 && k == n - 2 {
            let phi = phi.compose(&Transporter::upsilon(lv)?)?;
            return Ok((Heart { phi, k: 0 }, true));
        }
        if let Some((alt, k2)) = alternate(&phi, k) {
            if rep_key(&alt) < rep_key(&phi) {
                return Ok((Heart { phi: alt, k: k2 }, true));
            }
        }
    }
    Ok((Heart { phi, k }, false))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiltDirection {
    Forward,
    Backward,
}

fn check_index(i: usize) -> Result<()> {
    if i == 1 || i == 2 {
        Ok(())
    } else {
        Err(Error::InvalidSimple(i))
    }
}

impl Heart {
    pub fn canonical(n: Level) -> Heart {
        Heart {
            phi: Transporter::identity(n),
            k: 0,
        }
    }

    /// Canonical form of `(phi, k)` for any valid chain index.
    pub fn from_raw(phi: Transporter, k: i64) -> Result<Heart> {
        canon(phi, k).map(|(h, _)| h)
    }

    /// [`Heart::from_raw`], also reporting whether the simples of the
    /// canonical form are listed in the opposite order.
    pub fn from_raw_traced(phi: Transporter, k: i64) -> Result<(Heart, bool)> {
        canon(phi, k)
    }

    pub fn level(&self) -> Level {
        self.phi.level()
    }

    pub fn is_full(&self) -> bool {
        self.k == 0
    }

    pub fn simples(&self) -> [ObjectDesc; 2] {
        [
            ObjectDesc::new(self.phi, BaseObject::S1, self.k),
            ObjectDesc::new(self.phi, BaseObject::S2, 0),
        ]
    }

    pub fn simple_classes(&self) -> [KClass; 2] {
        let s = self.simples();
        [class_of(&s[0]), class_of(&s[1])]
    }

    /// Right tilt at simple `i`. Also returns the position in the new heart
    /// of the shifted simple `S_i[1]`.
    pub fn forward_tilt_traced(&self, i: usize) -> Result<(Heart, usize)> {
        check_index(i)?;
        let lv = self.level();
        let phi = self.phi;
        let (raw, k, pos) = match (self.k, i) {
            (0, 2) => (phi.compose(&Transporter::sigma(lv))?, 0, 1),
            (0, 1) if lv == Level::Finite(2) => (phi.compose(&Transporter::sigma_star(lv)?)?, 0, 2),
            (k, 1) => (phi, k + 1, 1),
            (k, _) => (phi.compose(&Transporter::shift_by(lv, 1))?, k - 1, 2),
        };
        let (h, swapped) = canon(raw, k)?;
        Ok((h, if swapped { 3 - pos } else { pos }))
    }

    /// Left tilt at simple `j`. Also returns the position in the new heart
    /// of the shifted simple `S_j[-1]`.
    pub fn backward_tilt_traced(&self, j: usize) -> Result<(Heart, usize)> {
        check_index(j)?;
        let lv = self.level();
        let phi = self.phi;
        let (raw, k, pos) = match (self.k, j) {
            (0, 1) => (phi.compose(&Transporter::sigma(lv).inverse())?, 0, 2),
            (0, 2) if lv == Level::Finite(2) => {
                (phi.compose(&Transporter::sigma_star(lv)?.inverse())?, 0, 1)
            }
            (k, 1) => (phi, k - 1, 1),
            (k, _) => (phi.compose(&Transporter::shift_by(lv, -1))?, k + 1, 2),
        };
        let (h, swapped) = canon(raw, k)?;
        Ok((h, if swapped { 3 - pos } else { pos }))
    }

    pub fn forward_tilt(&self, i: usize) -> Result<Heart> {
        self.forward_tilt_traced(i).map(|(h, _)| h)
    }

    pub fn backward_tilt(&self, j: usize) -> Result<Heart> {
        self.backward_tilt_traced(j).map(|(h, _)| h)
    }

    pub fn tilt(&self, i: usize, dir: TiltDirection) -> Result<Heart> {
        match dir {
            TiltDirection::Forward => self.forward_tilt(i),
            TiltDirection::Backward => self.backward_tilt(i),
        }
    }

    /// The heart `psi(self)`.
    pub fn apply(&self, psi: &Transporter) -> Result<Heart> {
        Heart::from_raw(psi.compose(&self.phi)?, self.k)
    }

    /// [`Heart::apply`], also reporting whether the images of the simples
    /// are listed in the opposite order in the new heart.
    pub fn apply_traced(&self, psi: &Transporter) -> Result<(Heart, bool)> {
        canon(psi.compose(&self.phi)?, self.k)
    }

    /// Both descriptions `(phi, k)` of this heart (one for full hearts).
    pub fn representations(&self) -> Vec<(Transporter, i64)> {
        let mut reps = vec![(self.phi, self.k)];
        if let Some(alt) = alternate(&self.phi, self.k) {
            reps.push(alt);
        }
        reps
    }

    /// Class of this heart modulo shifts.
    pub fn projective_key(&self) -> (ProjectiveClass, i64) {
        self.representations()
            .into_iter()
            .map(|(p, k)| (p.projective_class(), k))
            .min()
            .expect("nonempty")
    }

    pub fn id_hash(&self) -> String {
        let text = serde_json::to_string(self).expect("serializable");
        // FNV-1a keeps ids stable across builds and platforms.
        let mut h: u64 = 0xcbf29ce484222325;
        for b in text.bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("h{h:016x}")
    }

    pub fn label(&self) -> String {
        match self.phi {
            Transporter::Finite(a) => {
                let m = a.sl2.0;
                format!(
                    "[[{},{}],[{},{}]] e={} s={} k={}",
                    m[0][0], m[0][1], m[1][0], m[1][1], a.expsum, a.shift, self.k
                )
            }
            Transporter::Infinite(a) => format!("Sigma^{} k={}", a.sigma_power, self.k),
        }
    }
}

pub fn canonical_heart(n: Level) -> Heart {
    Heart::canonical(n)
}

pub fn simples(h: &Heart) -> [ObjectDesc; 2] {
    h.simples()
}

pub fn forward_tilt(h: &Heart, i: usize) -> Result<Heart> {
    h.forward_tilt(i)
}

pub fn backward_tilt(h: &Heart, j: usize) -> Result<Heart> {
    h.backward_tilt(j)
}

pub fn apply_auteq(psi: &Transporter, h: &Heart) -> Result<Heart> {
    h.apply(psi)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: usize,
    pub hash: String,
    pub heart: Heart,
    pub depth: usize,
    pub full: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub src: usize,
    pub dst: usize,
    pub simple: usize,
    pub direction: TiltDirection,
}

/// A ball in the (projective) exchange graph around the canonical heart.
/// Edges are the forward tilts between nodes of the ball; every backward
/// tilt is the reverse of one of them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExchangeGraph {
    pub n: Level,
    pub projective: bool,
    pub radius: usize,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<GraphEdge>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum NodeKey {
    Plain(HeartKey),
    Projective(ProjectiveClass, i64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct HeartKey(Transporter, i64);

fn key(h: &Heart, projective: bool) -> NodeKey {
    if projective {
        let (c, k) = h.projective_key();
        NodeKey::Projective(c, k)
    } else {
        NodeKey::Plain(HeartKey(h.phi, h.k))
    }
}

fn build_graph(n: Level, radius: usize, projective: bool) -> Result<ExchangeGraph> {
    let start = Heart::canonical(n);
    let mut index: HashMap<NodeKey, usize> = HashMap::new();
    let mut nodes = vec![GraphNode {
        id: 0,
        hash: start.id_hash(),
        heart: start,
        depth: 0,
        full: true,
    }];
    index.insert(key(&start, projective), 0);
    let mut queue = VecDeque::from([0usize]);
    while let Some(id) = queue.pop_front() {
        let (h, d) = (nodes[id].heart, nodes[id].depth);
        if d == radius {
            continue;
        }
        for (dir, i) in [
            (TiltDirection::Forward, 1),
            (TiltDirection::Forward, 2),
            (TiltDirection::Backward, 1),
            (TiltDirection::Backward, 2),
        ] {
            let next = h.tilt(i, dir)?;
            let kk = key(&next, projective);
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(kk) {
                let nid = nodes.len();
                e.insert(nid);
                nodes.push(GraphNode {
                    id: nid,
                    hash: next.id_hash(),
                    heart: next,
                    depth: d + 1,
                    full: next.is_full(),
                });
                queue.push_back(nid);
            }
        }
    }
    let mut edges = Vec::new();
    for node in &nodes {
        for i in [1, 2] {
            let next = node.heart.forward_tilt(i)?;
            if let Some(&dst) = index.get(&key(&next, projective)) {
                edges.push(GraphEdge {
                    src: node.id,
                    dst,
                    simple: i,
                    direction: TiltDirection::Forward,
                });
            }
        }
    }
    Ok(ExchangeGraph {
        n,
        projective,
        radius,
        nodes,
        edges,
    })
}

pub fn exchange_graph(n: Level, radius: usize) -> Result<ExchangeGraph> {
    build_graph(n, radius, false)
}

pub fn projective_exchange_graph(n: Level, radius: usize) -> Result<ExchangeGraph> {
    build_graph(n, radius, true)
}

impl ExchangeGraph {
    pub fn full_count(&self) -> usize {
        self.nodes.iter().filter(|v| v.full).count()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph exchange {\n");
        for v in &self.nodes {
            let shape = if v.full { "ellipse" } else { "point" };
            out.push_str(&format!(
                "  {} [label=\"{}\", shape={}];\n",
                v.hash,
                v.heart.label(),
                shape
            ));
        }
        for e in &self.edges {
            out.push_str(&format!(
                "  {} -> {} [label=\"{}\"];\n",
                self.nodes[e.src].hash, self.nodes[e.dst].hash, e.simple
            ));
        }
        out.push_str("}\n");
        out
    }
}
