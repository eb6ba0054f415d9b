//! Emergent-structure diagnostics: sparsity, degree histogram and mean
//! local clustering coefficient.

use super::AgentGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct TopologyDiagnostics {
    /// `|E| / (n(n-1)/2)`.
    pub sparsity: f64,
    /// `histogram[d]` = number of agents with degree `d`.
    pub degree_histogram: Vec<usize>,
    /// Average local clustering coefficient over all agents.
    pub mean_clustering: f64,
}

/// Compute the three diagnostics. Graphs with fewer than two agents get
/// `(0, empty, 0)`.
pub fn topology_diagnostics(g: &AgentGraph) -> TopologyDiagnostics {
    let n = g.agents().len();
    if n < 2 {
        return TopologyDiagnostics {
            sparsity: 0.0,
            degree_histogram: Vec::new(),
            mean_clustering: 0.0,
        };
    }
    let ids: Vec<usize> = g.agents().iter().map(|a| a.id).collect();
    let index_of = |id: usize| ids.iter().position(|&x| x == id).unwrap();
    let mut adj = vec![vec![false; n]; n];
    for p in g.potentials() {
        let (i, j) = p.endpoints();
        let (i, j) = (index_of(i), index_of(j));
        adj[i][j] = true;
        adj[j][i] = true;
    }
    let degrees: Vec<usize> = (0..n).map(|i| adj[i].iter().filter(|&&e| e).count()).collect();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    let mut degree_histogram = vec![0usize; max_degree + 1];
    for &d in &degrees {
        degree_histogram[d] += 1;
    }
    let sparsity = g.edge_count() as f64 / (n * (n - 1) / 2) as f64;
    let mut clustering_sum = 0.0;
    for v in 0..n {
        let neighbors: Vec<usize> = (0..n).filter(|&u| adj[v][u]).collect();
        let k = neighbors.len();
        if k < 2 {
            continue;
        }
        let mut links = 0usize;
        for (ai, &a) in neighbors.iter().enumerate() {
            for &b in &neighbors[ai + 1..] {
                if adj[a][b] {
                    links += 1;
                }
            }
        }
        clustering_sum += 2.0 * links as f64 / (k * (k - 1)) as f64;
    }
    TopologyDiagnostics {
        sparsity,
        degree_histogram,
        mean_clustering: clustering_sum / n as f64,
    }
}
