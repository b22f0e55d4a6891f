use ndarray::{ArrayView1, ArrayView2};
use rand::seq::index;
use rand::Rng;

use super::Fnv;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Node {
    Leaf(f64),
    Split {
        feature: usize,
        threshold: f64,
        left: u32,
        right: u32,
    },
}

/// CART regression tree grown by squared-error reduction.
///
/// Splits sit halfway between consecutive distinct feature values. Among equal
/// gains the lowest feature index wins, then the lowest threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
}

struct Best {
    gain: f64,
    feature: usize,
    threshold: f64,
}

impl Tree {
    /// Grows a tree on the rows listed in `rows` (repeats allowed), trying
    /// `max_features` randomly chosen features at every node.
    pub fn fit<R: Rng>(
        x: ArrayView2<'_, f64>,
        y: ArrayView1<'_, f64>,
        rows: &[usize],
        min_leaf: usize,
        max_features: usize,
        rng: &mut R,
    ) -> Self {
        debug_assert!(!rows.is_empty() && min_leaf >= 1);
        let d = x.ncols();
        let m = rows.len();
        // Column-major copies indexed by sample position.
        let cols: Vec<Vec<f64>> = (0..d).map(|f| rows.iter().map(|&r| x[[r, f]]).collect()).collect();
        let yv: Vec<f64> = rows.iter().map(|&r| y[r]).collect();
        // For every feature, sample positions sorted by that feature. A node
        // owns the same range `[lo, hi)` in every list.
        let mut order: Vec<Vec<u32>> = cols
            .iter()
            .map(|c| {
                let mut o: Vec<u32> = (0..m as u32).collect();
                o.sort_by(|&a, &b| c[a as usize].total_cmp(&c[b as usize]).then(a.cmp(&b)));
                o
            })
            .collect();
        let mut goes_left = vec![false; m];
        let mut scratch: Vec<u32> = Vec::with_capacity(m);

        let mut tree = Tree { nodes: vec![Node::Leaf(0.0)] };
        let mut stack: Vec<(usize, usize, usize)> = vec![(0, 0, m)];
        while let Some((slot, lo, hi)) = stack.pop() {
            let n = hi - lo;
            let members = &order[0][lo..hi];
            let sum: f64 = members.iter().map(|&p| yv[p as usize]).sum();
            let mean = sum / n as f64;
            let first = yv[members[0] as usize];
            let constant = members.iter().all(|&p| yv[p as usize] == first);
            if n < 2 * min_leaf || constant {
                tree.nodes[slot] = Node::Leaf(mean);
                continue;
            }

            let features: Vec<usize> = if max_features >= d {
                (0..d).collect()
            } else {
                let mut f = index::sample(rng, d, max_features).into_vec();
                f.sort_unstable();
                f
            };

            let base = sum * sum / n as f64;
            let mut best: Option<Best> = None;
            for &f in &features {
                let o = &order[f][lo..hi];
                let c = &cols[f];
                let mut left_sum = 0.0;
                for k in 1..n {
                    left_sum += yv[o[k - 1] as usize];
                    if k < min_leaf || n - k < min_leaf {
                        continue;
                    }
                    let (a, b) = (c[o[k - 1] as usize], c[o[k] as usize]);
                    if a >= b {
                        continue;
                    }
                    let right_sum = sum - left_sum;
                    let gain = left_sum * left_sum / k as f64 + right_sum * right_sum / (n - k) as f64 - base;
                    if best.as_ref().is_none_or(|bst| gain > bst.gain) {
                        let mid = 0.5 * (a + b);
                        best = Some(Best {
                            gain,
                            feature: f,
                            threshold: if mid < b { mid } else { a },
                        });
                    }
                }
            }

            let Some(b) = best else {
                tree.nodes[slot] = Node::Leaf(mean);
                continue;
            };
            let split_col = &cols[b.feature];
            let mut n_left = 0;
            for &p in &order[0][lo..hi] {
                let l = split_col[p as usize] <= b.threshold;
                goes_left[p as usize] = l;
                n_left += usize::from(l);
            }
            for o in order.iter_mut() {
                scratch.clear();
                let seg = &mut o[lo..hi];
                let mut w = 0;
                for i in 0..n {
                    let p = seg[i];
                    if goes_left[p as usize] {
                        seg[w] = p;
                        w += 1;
                    } else {
                        scratch.push(p);
                    }
                }
                seg[w..].copy_from_slice(&scratch);
            }
            let left = tree.nodes.len() as u32;
            tree.nodes.push(Node::Leaf(0.0));
            tree.nodes.push(Node::Leaf(0.0));
            tree.nodes[slot] = Node::Split {
                feature: b.feature,
                threshold: b.threshold,
                left,
                right: left + 1,
            };
            stack.push((left as usize + 1, lo + n_left, hi));
            stack.push((left as usize, lo, lo + n_left));
        }
        tree
    }

    pub fn predict(&self, x: ArrayView1<'_, f64>) -> f64 {
        let mut i = 0;
        loop {
            match self.nodes[i] {
                Node::Leaf(v) => return v,
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    i = if x[feature] <= threshold { left } else { right } as usize;
                }
            }
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, Node::Leaf(_))).count()
    }

    pub(crate) fn hash_into(&self, h: &mut Fnv) {
        for n in &self.nodes {
            match *n {
                Node::Leaf(v) => h.write(v.to_bits()),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                } => {
                    h.write(feature as u64);
                    h.write(threshold.to_bits());
                    h.write(((left as u64) << 32) | right as u64);
                }
            }
        }
    }
}
