//! In-domain integration paths: straight segments when possible, else through a spanning tree of grid nodes.

use std::collections::VecDeque;

use num_complex::Complex64 as C;

use crate::error::{Error, Result};

/// Grid nodes per side.
pub const PLANNER_NODES: usize = 64;

/// Paths from a base point to arbitrary domain points, staying where `inside` holds.
#[derive(Clone)]
pub struct PathPlanner {
    base: C,
    nodes: Vec<C>,
    valid: Vec<bool>,
    /// Parent of each reached node; the root's parent is itself.
    parent: Vec<Option<usize>>,
    /// Reached nodes in breadth-first order.
    order: Vec<usize>,
    step: f64,
    side: usize,
}

impl std::fmt::Debug for PathPlanner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PathPlanner").field("base", &self.base).field("reached", &self.order.len()).finish()
    }
}

/// Whether every sample of `[a, b]` at spacing at most `h` satisfies `inside`.
pub fn segment_inside(inside: &dyn Fn(C) -> bool, a: C, b: C, h: f64) -> bool {
    let n = ((b - a).norm() / h).ceil().max(1.0) as usize;
    (0..=n).all(|k| inside(a + (b - a) * (k as f64 / n as f64)))
}

impl PathPlanner {
    /// Nodes on a `side × side` grid over `[lo, hi]`, tree rooted at the node nearest `base` seen from it.
    pub fn new(inside: &dyn Fn(C) -> bool, base: C, lo: C, hi: C, side: usize) -> Result<Self> {
        if !inside(base) {
            return Err(Error::InvalidInput(format!("base point {base} outside the domain")));
        }
        let side = side.max(2);
        let dx = (hi.re - lo.re) / (side - 1) as f64;
        let dy = (hi.im - lo.im) / (side - 1) as f64;
        let step = dx.min(dy);
        let h = step / 8.0;
        let mut nodes = Vec::with_capacity(side * side);
        for j in 0..side {
            for i in 0..side {
                nodes.push(C::new(lo.re + dx * i as f64, lo.im + dy * j as f64));
            }
        }
        let valid: Vec<bool> = nodes.iter().map(|&z| inside(z)).collect();
        let mut parent = vec![None; nodes.len()];
        let mut order = Vec::new();
        let mut by_distance: Vec<usize> = (0..nodes.len()).filter(|&k| valid[k]).collect();
        by_distance.sort_by(|&a, &b| (nodes[a] - base).norm().total_cmp(&(nodes[b] - base).norm()));
        let root = by_distance.into_iter().take(16).find(|&k| segment_inside(inside, base, nodes[k], h));
        if let Some(root) = root {
            parent[root] = Some(root);
            let mut queue = VecDeque::from([root]);
            while let Some(k) = queue.pop_front() {
                order.push(k);
                let (i, j) = ((k % side) as isize, (k / side) as isize);
                for (di, dj) in [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (1, -1), (-1, 1), (-1, -1)] {
                    let (ni, nj) = (i + di, j + dj);
                    if ni < 0 || nj < 0 || ni >= side as isize || nj >= side as isize {
                        continue;
                    }
                    let m = nj as usize * side + ni as usize;
                    if valid[m] && parent[m].is_none() && segment_inside(inside, nodes[k], nodes[m], h) {
                        parent[m] = Some(k);
                        queue.push_back(m);
                    }
                }
            }
        }
        Ok(PathPlanner { base, nodes, valid, parent, order, step, side })
    }

    pub fn base(&self) -> C {
        self.base
    }

    /// Reached nodes in breadth-first order, each with its parent (`None` for the root, which hangs off the base).
    pub fn tree(&self) -> impl Iterator<Item = (usize, C, Option<usize>)> + '_ {
        self.order.iter().map(move |&k| {
            let p = self.parent[k].filter(|&p| p != k);
            (k, self.nodes[k], p)
        })
    }

    pub fn node(&self, k: usize) -> C {
        self.nodes[k]
    }

    pub fn reached(&self) -> usize {
        self.order.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_valid(&self, k: usize) -> bool {
        self.valid[k]
    }

    /// Reached nodes visible from `w` (straight segment inside), nearest first, at most `limit`.
    pub fn visible_nodes(&self, inside: &dyn Fn(C) -> bool, w: C, limit: usize) -> Vec<usize> {
        let mut near: Vec<usize> = self.order.clone();
        near.sort_by(|&a, &b| (self.nodes[a] - w).norm().total_cmp(&(self.nodes[b] - w).norm()));
        near.into_iter()
            .take(64)
            .filter(|&k| segment_inside(inside, self.nodes[k], w, self.step / 8.0))
            .take(limit)
            .collect()
    }

    /// Vertices from the base point to `w`.
    pub fn path(&self, inside: &dyn Fn(C) -> bool, w: C) -> Result<Vec<C>> {
        if !inside(w) {
            return Err(Error::InvalidInput(format!("point {w} outside the domain")));
        }
        if segment_inside(inside, self.base, w, self.step / 8.0) {
            return Ok(vec![self.base, w]);
        }
        let k = *self
            .visible_nodes(inside, w, 1)
            .first()
            .ok_or_else(|| Error::InvalidInput(format!("no in-domain path to {w}")))?;
        let mut chain = vec![w];
        let mut cur = k;
        loop {
            chain.push(self.nodes[cur]);
            match self.parent[cur] {
                Some(p) if p != cur => cur = p,
                _ => break,
            }
        }
        chain.push(self.base);
        chain.reverse();
        Ok(chain)
    }

    pub fn side(&self) -> usize {
        self.side
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn routes_around_a_hole() {
        let inside = |z: C| (z - C::new(0.0, 0.0)).norm() > 0.5;
        let p = PathPlanner::new(&inside, C::new(-1.5, 0.0), C::new(-2.0, -2.0), C::new(2.0, 2.0), 32).unwrap();
        assert!(p.reached() > 500);
        let path = p.path(&inside, C::new(1.5, 0.0)).unwrap();
        assert!(path.len() > 2);
        assert!(path.windows(2).all(|s| segment_inside(&inside, s[0], s[1], 0.01)));
        assert_eq!(path[0], C::new(-1.5, 0.0));
        assert_eq!(*path.last().unwrap(), C::new(1.5, 0.0));
        assert_eq!(p.path(&inside, C::new(-1.5, 1.0)).unwrap().len(), 2);
        assert!(p.path(&inside, C::new(0.0, 0.1)).is_err());
    }
}
