use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::Metric;
use crate::error::{Error, Result};

/// A family of metrics `D_x` defined on the ball of radius `radius()` around
/// each base point `x`.
pub trait LocalMetric<P> {
    fn radius(&self) -> f64;

    /// `D_base(y, z)`; callers keep `y` and `z` within the radius of `base`.
    fn eval(&self, base: &P, y: &P, z: &P) -> Result<f64>;
}

/// Dense symmetric table of pairwise distances over a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTable {
    n: usize,
    data: Vec<f64>,
}

impl MetricTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }
}

// Above this size the floating-point closure pass is skipped (it is cubic).
const CLOSURE_LIMIT: usize = 2048;

#[derive(Copy, Clone, PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Glue a local metric into a global one on a finite sample:
/// `ρ(x, y) = inf Σ D_{a_i}(a_i, a_{i+1})` over δ-chains from `x` to `y`
/// (consecutive points within `delta` in the ambient metric).
///
/// Distances come from Dijkstra runs over the chain graph, one per source.
/// The table is then symmetrised and closed under the triangle inequality in
/// floating point, which only absorbs rounding differences between paths
/// summed in different orders.
pub fn glue_local_metric<P, M, D>(
    sample: &[P],
    delta: f64,
    ambient: &M,
    local: &D,
) -> Result<MetricTable>
where
    M: Metric<P> + ?Sized,
    D: LocalMetric<P> + ?Sized,
{
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::Domain(format!("δ must be positive, got {delta}")));
    }
    let n = sample.len();
    if n == 0 {
        return Err(Error::Domain("gluing over an empty sample".into()));
    }
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i != j && ambient.distance(&sample[i], &sample[j]) <= delta {
                let w = local.eval(&sample[i], &sample[i], &sample[j])?;
                if !(w >= 0.0) {
                    return Err(Error::Spec(format!(
                        "local metric returned {w} on edge ({i}, {j})"
                    )));
                }
                adj[i].push((j, w));
            }
        }
    }

    let components = components(&adj);
    if components.len() > 1 {
        return Err(Error::Partition { components });
    }

    let mut table = MetricTable {
        n,
        data: vec![f64::INFINITY; n * n],
    };
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for s in 0..n {
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        dist[s] = 0.0;
        heap.push(Entry { cost: 0.0, node: s });
        while let Some(Entry { cost, node }) = heap.pop() {
            if cost > dist[node] {
                continue;
            }
            for &(next, w) in &adj[node] {
                let c = cost + w;
                if c < dist[next] {
                    dist[next] = c;
                    heap.push(Entry {
                        cost: c,
                        node: next,
                    });
                }
            }
        }
        for (t, d) in dist.iter().enumerate() {
            table.set(s, t, *d);
        }
    }

    for i in 0..n {
        for j in i + 1..n {
            let v = table.get(i, j).min(table.get(j, i));
            table.set(i, j, v);
            table.set(j, i, v);
        }
    }
    if n <= CLOSURE_LIMIT {
        close_triangles(&mut table);
    }
    Ok(table)
}

fn close_triangles(table: &mut MetricTable) {
    let n = table.n;
    loop {
        let mut changed = false;
        for k in 0..n {
            for i in 0..n {
                let ik = table.get(i, k);
                for j in i + 1..n {
                    let via = ik + table.get(k, j);
                    if via < table.get(i, j) {
                        table.set(i, j, via);
                        table.set(j, i, via);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
}

fn components(adj: &[Vec<(usize, f64)>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    // union of both edge directions, so asymmetric radius tests still connect
    let mut undirected: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, edges) in adj.iter().enumerate() {
        for &(j, _) in edges {
            undirected[i].push(j);
            undirected[j].push(i);
        }
    }
    let mut label = vec![usize::MAX; n];
    let mut out = Vec::new();
    for start in 0..n {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut members = vec![start];
        label[start] = id;
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &undirected[v] {
                if label[w] == usize::MAX {
                    label[w] = id;
                    members.push(w);
                    stack.push(w);
                }
            }
        }
        members.sort_unstable();
        out.push(members);
    }
    out
}

/// Checks `D_x(x, y) ≤ D_z(x, y)` for every sample pair with
/// `dist(x, y) < delta` and every sample `z` within `delta` of both.
/// Returns the first violating triple `(x, y, z)` if any.
pub fn is_locally_minimizing<P, M, D>(
    sample: &[P],
    delta: f64,
    ambient: &M,
    local: &D,
) -> Result<Option<(usize, usize, usize)>>
where
    M: Metric<P> + ?Sized,
    D: LocalMetric<P> + ?Sized,
{
    for i in 0..sample.len() {
        for j in 0..sample.len() {
            if i == j || ambient.distance(&sample[i], &sample[j]) >= delta {
                continue;
            }
            let own = local.eval(&sample[i], &sample[i], &sample[j])?;
            for k in 0..sample.len() {
                if ambient.distance(&sample[k], &sample[i]) < delta
                    && ambient.distance(&sample[k], &sample[j]) < delta
                    && own > local.eval(&sample[k], &sample[i], &sample[j])?
                {
                    return Ok(Some((i, j, k)));
                }
            }
        }
    }
    Ok(None)
}
