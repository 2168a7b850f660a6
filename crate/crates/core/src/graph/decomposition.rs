use serde::{Deserialize, Serialize};

use super::{DiameterMode, Distance, Graph, GraphError};

/// A vertex partition into clusters plus a set of deleted vertices.
///
/// `labels[v]` is `Some(cluster)` or `None` for a deleted vertex. Cluster ids
/// are dense: every id in `0..cluster_count` is used.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decomposition {
    labels: Vec<Option<usize>>,
    cluster_count: usize,
}

impl Decomposition {
    /// Relabels arbitrary cluster keys densely in order of first appearance.
    pub fn from_labels<K: Eq + std::hash::Hash + Copy>(raw: &[Option<K>]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let labels = raw
            .iter()
            .map(|l| {
                l.map(|k| {
                    let next = ids.len();
                    *ids.entry(k).or_insert(next)
                })
            })
            .collect();
        Decomposition { labels, cluster_count: ids.len() }
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> Option<usize> {
        self.labels[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }

    pub fn deleted_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    pub fn deleted(&self) -> Vec<usize> {
        (0..self.labels.len()).filter(|&v| self.labels[v].is_none()).collect()
    }

    /// Member lists, indexed by cluster id.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (v, l) in self.labels.iter().enumerate() {
            if let Some(c) = l {
                out[*c].push(v);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub non_adjacent_ok: bool,
    pub max_weak_diameter: Distance,
    pub max_strong_diameter: Distance,
    pub deleted_count: usize,
    pub deleted_fraction: f64,
    /// Every cluster has weak diameter at most the requested bound.
    pub diameter_ok: bool,
    /// At most `eps * n` vertices are deleted.
    pub deletion_ok: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.non_adjacent_ok && self.diameter_ok && self.deletion_ok
    }
}

/// Checks a decomposition against the `(eps, d)` definition. Violations are
/// reported, not raised.
pub fn validate_decomposition(
    g: &Graph,
    d: &Decomposition,
    eps: f64,
    max_diameter: usize,
) -> Result<ValidationReport, GraphError> {
    let n = g.vertex_count();
    if d.vertex_count() != n {
        return Err(GraphError::DimensionMismatch { expected: n, got: d.vertex_count() });
    }
    let non_adjacent_ok = g.edges().all(|(u, v)| match (d.label(u), d.label(v)) {
        (Some(a), Some(b)) => a == b,
        _ => true,
    });
    let mut max_weak = Distance::Finite(0);
    let mut max_strong = Distance::Finite(0);
    for members in d.clusters() {
        max_weak = max_weak.max(g.set_diameter(&members, DiameterMode::Weak)?);
        max_strong = max_strong.max(g.set_diameter(&members, DiameterMode::Strong)?);
    }
    let deleted_count = d.deleted_count();
    let deleted_fraction = if n == 0 { 0.0 } else { deleted_count as f64 / n as f64 };
    Ok(ValidationReport {
        non_adjacent_ok,
        max_weak_diameter: max_weak,
        max_strong_diameter: max_strong,
        deleted_count,
        deleted_fraction,
        diameter_ok: max_weak <= Distance::Finite(max_diameter),
        deletion_ok: deleted_count as f64 <= eps * n as f64 + 1e-9,
    })
}
