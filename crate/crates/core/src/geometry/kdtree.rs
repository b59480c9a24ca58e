//! Static 3-d tree for k-nearest and fixed-radius neighbor queries.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Point3;

const LEAF: usize = 8;

#[derive(Clone, Debug)]
struct Node {
    start: usize,
    end: usize,
    axis: usize,
    split: f64,
    children: Option<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub struct KdTree {
    points: Vec<Point3>,
    index: Vec<usize>,
    nodes: Vec<Node>,
}

#[derive(PartialEq)]
struct Candidate(f64, usize);

impl Eq for Candidate {}

impl PartialOrd for Candidate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Candidate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

impl KdTree {
    pub fn new(points: &[Point3]) -> Self {
        let mut tree = Self {
            points: points.to_vec(),
            index: (0..points.len()).collect(),
            nodes: Vec::new(),
        };
        if !points.is_empty() {
            tree.build(0, points.len());
        }
        tree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node {
            start,
            end,
            axis: 0,
            split: 0.0,
            children: None,
        });
        if end - start <= LEAF {
            return id;
        }
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for &i in &self.index[start..end] {
            for k in 0..3 {
                lo[k] = lo[k].min(self.points[i][k]);
                hi[k] = hi[k].max(self.points[i][k]);
            }
        }
        let axis = (0..3)
            .max_by(|&a, &b| (hi[a] - lo[a]).total_cmp(&(hi[b] - lo[b])))
            .unwrap_or(0);
        let mid = (start + end) / 2;
        let pts = &self.points;
        self.index[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            pts[a][axis].total_cmp(&pts[b][axis]).then(a.cmp(&b))
        });
        let split = self.points[self.index[mid]][axis];
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        let node = &mut self.nodes[id];
        node.axis = axis;
        node.split = split;
        node.children = Some((left, right));
        id
    }

    /// Indices of the `k` nearest points ordered by distance, ties by index.
    pub fn nearest(&self, q: &Point3, k: usize) -> Vec<usize> {
        if k == 0 || self.points.is_empty() {
            return Vec::new();
        }
        let mut heap: BinaryHeap<Candidate> = BinaryHeap::with_capacity(k + 1);
        self.knn(0, q, k, &mut heap);
        let mut out = heap.into_sorted_vec();
        out.truncate(k);
        out.into_iter().map(|c| c.1).collect()
    }

    fn knn(&self, id: usize, q: &Point3, k: usize, heap: &mut BinaryHeap<Candidate>) {
        let node = &self.nodes[id];
        match node.children {
            None => {
                for &i in &self.index[node.start..node.end] {
                    let d = (self.points[i] - q).norm_squared();
                    heap.push(Candidate(d, i));
                    if heap.len() > k {
                        heap.pop();
                    }
                }
            }
            Some((l, r)) => {
                let diff = q[node.axis] - node.split;
                let (near, far) = if diff < 0.0 { (l, r) } else { (r, l) };
                self.knn(near, q, k, heap);
                let worst = if heap.len() < k {
                    f64::INFINITY
                } else {
                    heap.peek().map_or(f64::INFINITY, |c| c.0)
                };
                if diff * diff <= worst {
                    self.knn(far, q, k, heap);
                }
            }
        }
    }

    /// Indices of all points within `radius` (inclusive), ascending.
    pub fn within(&self, q: &Point3, radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        if !self.points.is_empty() {
            self.radius(0, q, radius * radius, radius, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn radius(&self, id: usize, q: &Point3, r2: f64, r: f64, out: &mut Vec<usize>) {
        let node = &self.nodes[id];
        match node.children {
            None => out.extend(
                self.index[node.start..node.end]
                    .iter()
                    .copied()
                    .filter(|&i| (self.points[i] - q).norm_squared() <= r2),
            ),
            Some((l, rt)) => {
                let diff = q[node.axis] - node.split;
                if diff <= r {
                    self.radius(l, q, r2, r, out);
                }
                if diff >= -r {
                    self.radius(rt, q, r2, r, out);
                }
            }
        }
    }

    /// Sum and count of points within `radius`, without materializing indices.
    pub fn sum_within(&self, q: &Point3, radius: f64) -> (nalgebra::Vector3<f64>, usize) {
        let mut acc = (nalgebra::Vector3::zeros(), 0usize);
        if !self.points.is_empty() {
            self.sum(0, q, radius * radius, radius, &mut acc);
        }
        acc
    }

    fn sum(&self, id: usize, q: &Point3, r2: f64, r: f64, acc: &mut (nalgebra::Vector3<f64>, usize)) {
        let node = &self.nodes[id];
        match node.children {
            None => {
                for &i in &self.index[node.start..node.end] {
                    if (self.points[i] - q).norm_squared() <= r2 {
                        acc.0 += self.points[i].coords;
                        acc.1 += 1;
                    }
                }
            }
            Some((l, rt)) => {
                let diff = q[node.axis] - node.split;
                if diff <= r {
                    self.sum(l, q, r2, r, acc);
                }
                if diff >= -r {
                    self.sum(rt, q, r2, r, acc);
                }
            }
        }
    }
}
