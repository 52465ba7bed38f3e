#![allow(dead_code)]

use std::collections::{HashMap, HashSet, VecDeque};

use a2stab::braid::{AutEq, AutEqInfty, Psl2, Transporter};
use a2stab::schwarz::{region_classify, RegionVerdict};
use a2stab::stability::StabilityPoint;
use a2stab::Level;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ONode {
    Full(Psl2),
    Chain(Psl2, i64),
}

/// Independent model of the projective exchange graph: full hearts are
/// elements of PSL(2, Z); consecutive full hearts `g, g Sigma` are joined by
/// an edge, and `g, g Upsilon` by a path with `n - 3` interior vertices.
pub struct Oracle {
    n: i64,
    sigma: Psl2,
    upsilon: Psl2,
    sigma_star: Psl2,
}

impl Oracle {
    pub fn new(n: i64) -> Self {
        let lv = Level::Finite(n as u32);
        Oracle {
            n,
            sigma: AutEq::sigma(lv).unwrap().psl2(),
            upsilon: AutEq::upsilon(lv).unwrap().psl2(),
            sigma_star: AutEq::sigma_star(lv).unwrap().psl2(),
        }
    }

    fn chain(&self, g: Psl2, k: i64) -> ONode {
        if k == 0 {
            return ONode::Full(g);
        }
        if k == self.n - 2 {
            return ONode::Full(g.compose(&self.upsilon));
        }
        ONode::Chain(g, k).min(ONode::Chain(g.compose(&self.upsilon), self.n - 2 - k))
    }

    fn forward(&self, v: ONode) -> Vec<ONode> {
        match v {
            ONode::Full(g) => {
                let other = if self.n == 2 {
                    ONode::Full(g.compose(&self.sigma_star))
                } else {
                    self.chain(g, 1)
                };
                vec![ONode::Full(g.compose(&self.sigma)), other]
            }
            ONode::Chain(g, k) => vec![self.chain(g, k + 1), self.chain(g, k - 1)],
        }
    }

    fn backward(&self, v: ONode) -> Vec<ONode> {
        match v {
            ONode::Full(g) => {
                let other = if self.n == 2 {
                    ONode::Full(g.compose(&self.sigma_star.inverse()))
                } else {
                    self.chain(g, 1)
                };
                vec![ONode::Full(g.compose(&self.sigma.inverse())), other]
            }
            ONode::Chain(..) => self.forward(v),
        }
    }

    pub fn ball(&self, radius: usize) -> (usize, usize) {
        let start = ONode::Full(Psl2::IDENTITY);
        let mut depth = HashMap::from([(start, 0usize)]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            let d = depth[&v];
            if d == radius {
                continue;
            }
            for w in self.forward(v).into_iter().chain(self.backward(v)) {
                if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(w) {
                    e.insert(d + 1);
                    queue.push_back(w);
                }
            }
        }
        let mut edges = HashSet::new();
        for &v in depth.keys() {
            for w in self.forward(v) {
                if depth.contains_key(&w) {
                    edges.insert((v, w));
                }
            }
        }
        (depth.len(), edges.len())
    }
}

/// A random `g` well inside `R_n`.
pub fn random_interior_g(n: Level, rng: &mut ChaCha8Rng) -> C64 {
    let left = n.get().map(|k| (2 - k) as f64 / 2.0).unwrap_or(-3.0).max(-3.0);
    loop {
        let g = C64::new(rng.gen_range(left..0.67), rng.gen_range(-1.2..1.2));
        let q = region_classify(n, g);
        if q.verdict == RegionVerdict::Interior && q.distance_estimate > 1e-3 && g.re.abs() > 1e-3 {
            return g;
        }
    }
}

pub fn random_transporter(n: Level, rng: &mut ChaCha8Rng, max_len: usize) -> Transporter {
    if !n.is_finite() {
        return Transporter::Infinite(AutEqInfty { sigma_power: rng.gen_range(-8..=8) });
    }
    let len = rng.gen_range(1..=max_len);
    let word: String = (0..len).map(|_| ['A', 'B', 'a', 'b'][rng.gen_range(0..4)]).collect();
    Transporter::Finite(AutEq::from_word(n, &word, rng.gen_range(-3..=3)).unwrap())
}

pub fn same_point(p: &StabilityPoint, q: &StabilityPoint) -> bool {
    p.heart == q.heart
        && (p.z1 - q.z1).norm() < 1e-9
        && (p.z2 - q.z2).norm() < 1e-9
        && (p.lift1 - q.lift1).abs() < 1e-9
        && (p.lift2 - q.lift2).abs() < 1e-9
}
