//! Exact transportation problems by successive shortest paths.
//!
//! The bipartite network is source → supply nodes → demand nodes → sink with
//! unbounded middle arcs. Each round runs a dense Dijkstra on reduced costs
//! and pushes the bottleneck amount along the cheapest augmenting path, so
//! the flow stays optimal for the amount shipped so far.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{domain, Result};

/// Amounts below this are treated as zero.
const FLOW_EPS: f64 = 1e-15;

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `flow[i][j]`: mass moved from supply `i` to demand `j`.
    pub flow: Vec<Vec<f64>>,
    pub cost: f64,
    pub augmentations: usize,
}

/// Minimum-cost plan moving `supply` onto `demand` with unit costs
/// `cost[i][j] ≥ 0`. Totals must agree to 1e-9.
pub fn min_cost_transport(supply: &[f64], demand: &[f64], cost: &[Vec<f64>]) -> Result<TransportPlan> {
    let (m, n) = (supply.len(), demand.len());
    if cost.len() != m || cost.iter().any(|r| r.len() != n) {
        return Err(domain!("cost matrix must be {m}×{n}"));
    }
    if supply.iter().chain(demand).any(|&w| !(w >= 0.0) || !w.is_finite()) {
        return Err(domain!("supplies and demands must be finite and non-negative"));
    }
    if cost.iter().flatten().any(|&c| !(c >= 0.0) || !c.is_finite()) {
        return Err(domain!("costs must be finite and non-negative"));
    }
    let total_s: f64 = supply.iter().sum();
    let total_d: f64 = demand.iter().sum();
    if (total_s - total_d).abs() > 1e-9 {
        return Err(domain!("supply {total_s} and demand {total_d} differ"));
    }

    let mut flow = vec![vec![0.0f64; n]; m];
    let mut left_s: Vec<f64> = supply.to_vec();
    let mut left_d: Vec<f64> = demand.to_vec();
    // Potentials on supply nodes 0..m and demand nodes m..m+n.
    let mut pot = vec![0.0f64; m + n];
    let mut dist = vec![0.0f64; m + n];
    let mut prev = vec![usize::MAX; m + n];
    let mut done = vec![false; m + n];
    let max_rounds = 4 * (m + n) * (m + n) + 16;
    let mut rounds = 0usize;

    while left_s.iter().any(|&r| r > FLOW_EPS) && left_d.iter().any(|&r| r > FLOW_EPS) {
        if rounds >= max_rounds {
            break;
        }
        rounds += 1;
        dist.iter_mut().for_each(|d| *d = f64::INFINITY);
        prev.iter_mut().for_each(|p| *p = usize::MAX);
        done.iter_mut().for_each(|d| *d = false);
        // Reduced cost of the zero-cost arc from the super source.
        for i in 0..m {
            if left_s[i] > FLOW_EPS {
                dist[i] = (-pot[i]).max(0.0);
            }
        }
        loop {
            let mut u = usize::MAX;
            let mut best = f64::INFINITY;
            for v in 0..m + n {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            if u < m {
                for j in 0..n {
                    let v = m + j;
                    if done[v] {
                        continue;
                    }
                    let rc = (cost[u][j] + pot[u] - pot[v]).max(0.0);
                    if dist[u] + rc < dist[v] {
                        dist[v] = dist[u] + rc;
                        prev[v] = u;
                    }
                }
            } else {
                let j = u - m;
                for i in 0..m {
                    if done[i] || flow[i][j] <= FLOW_EPS {
                        continue;
                    }
                    let rc = (pot[u] - cost[i][j] - pot[i]).max(0.0);
                    if dist[u] + rc < dist[i] {
                        dist[i] = dist[u] + rc;
                        prev[i] = u;
                    }
                }
            }
        }
        // Cheapest reachable demand node with demand left.
        let mut sink = usize::MAX;
        let mut best = f64::INFINITY;
        for j in 0..n {
            if left_d[j] > FLOW_EPS && dist[m + j] + pot[m + j] < best {
                best = dist[m + j] + pot[m + j];
                sink = m + j;
            }
        }
        if sink == usize::MAX {
            break;
        }
        let reach = dist.iter().cloned().filter(|d| d.is_finite()).fold(0.0, f64::max);
        for v in 0..m + n {
            pot[v] += if dist[v].is_finite() { dist[v] } else { reach };
        }

        let mut amount = left_d[sink - m];
        let mut v = sink;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u >= m {
                amount = amount.min(flow[v][u - m]);
            }
            v = u;
        }
        amount = amount.min(left_s[v]);
        let start = v;
        let mut v = sink;
        while prev[v] != usize::MAX {
            let u = prev[v];
            if u < m {
                flow[u][v - m] += amount;
            } else {
                flow[v][u - m] -= amount;
                if flow[v][u - m] < FLOW_EPS {
                    flow[v][u - m] = 0.0;
                }
            }
            v = u;
        }
        left_s[start] -= amount;
        left_d[sink - m] -= amount;
        if left_s[start] < FLOW_EPS {
            left_s[start] = 0.0;
        }
        if left_d[sink - m] < FLOW_EPS {
            left_d[sink - m] = 0.0;
        }
    }

    let cost_total = flow.iter().zip(cost).map(|(fr, cr)| fr.iter().zip(cr).map(|(f, c)| f * c).sum::<f64>()).sum();
    Ok(TransportPlan { flow, cost: cost_total, augmentations: rounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_cell() {
        let p = min_cost_transport(&[1.0], &[1.0], &[vec![3.0]]).unwrap();
        assert_eq!(p.cost, 3.0);
    }

    #[test]
    fn prefers_cheap_diagonal() {
        let c = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        let p = min_cost_transport(&[0.5, 0.5], &[0.5, 0.5], &c).unwrap();
        assert_eq!(p.cost, 0.0);
        assert_eq!(p.flow, vec![vec![0.5, 0.0], vec![0.0, 0.5]]);
    }

    #[test]
    fn needs_reverse_arc() {
        // Greedy cheapest-first would ship 0→0 and then pay 10 for 1→1.
        let c = vec![vec![1.0, 2.0], vec![1.0, 10.0]];
        let p = min_cost_transport(&[1.0, 1.0], &[1.0, 1.0], &c).unwrap();
        assert!((p.cost - 3.0).abs() < 1e-12);
    }

    #[test]
    fn line_example() {
        // Uniform on {0,1} to uniform on {2,3}: every plan costs 2.
        let pts_a = [0.0, 1.0];
        let pts_b = [2.0, 3.0];
        let c: Vec<Vec<f64>> = pts_a.iter().map(|a| pts_b.iter().map(|b| f64::abs(a - b)).collect()).collect();
        let p = min_cost_transport(&[0.5, 0.5], &[0.5, 0.5], &c).unwrap();
        assert!((p.cost - 2.0).abs() < 1e-12);
    }

    #[test]
    fn unbalanced_rejected() {
        assert!(min_cost_transport(&[1.0], &[0.5], &[vec![1.0]]).is_err());
    }
}
