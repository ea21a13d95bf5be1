//! Dynkin / Euclidean classification of the underlying undirected graph.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiagramType {
    A(usize),
    D(usize),
    E(usize),
}

impl fmt::Display for DiagramType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiagramType::A(n) => write!(f, "A{n}"),
            DiagramType::D(n) => write!(f, "D{n}"),
            DiagramType::E(n) => write!(f, "E{n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuiverClass {
    Empty,
    Dynkin(DiagramType),
    /// Extended diagram; `A(n)` has n+1 vertices.
    Euclidean(DiagramType),
    Neither,
    Disconnected(Vec<QuiverClass>),
}

impl fmt::Display for QuiverClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuiverClass::Empty => write!(f, "empty"),
            QuiverClass::Dynkin(t) => write!(f, "Dynkin {t}"),
            QuiverClass::Euclidean(t) => write!(f, "Euclidean ~{t}"),
            QuiverClass::Neither => write!(f, "neither Dynkin nor Euclidean"),
            QuiverClass::Disconnected(parts) => {
                let s: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "disconnected: {}", s.join(", "))
            }
        }
    }
}

/// Classifies the undirected multigraph with the given vertices and edges.
pub fn classify_quiver(vertices: &[String], edges: &[(String, String)]) -> QuiverClass {
    if vertices.is_empty() {
        return QuiverClass::Empty;
    }
    let index: BTreeMap<&str, usize> =
        vertices.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let n = vertices.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (s, t) in edges {
        let (i, j) = (index[s.as_str()], index[t.as_str()]);
        adj[i].push(j);
        if i != j {
            adj[j].push(i);
        } else {
            adj[i].push(i);
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut parts = Vec::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let id = parts.len();
        let mut members = vec![start];
        comp[start] = id;
        let mut k = 0;
        while k < members.len() {
            for &w in &adj[members[k]] {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                }
            }
            k += 1;
        }
        parts.push(members);
    }
    let classes: Vec<QuiverClass> = parts
        .iter()
        .map(|members| {
            let edge_count: usize = members.iter().map(|&v| adj[v].len()).sum::<usize>() / 2;
            classify_connected(members, &adj, edge_count)
        })
        .collect();
    if classes.len() == 1 {
        classes.into_iter().next().expect("one class")
    } else {
        QuiverClass::Disconnected(classes)
    }
}

fn classify_connected(members: &[usize], adj: &[Vec<usize>], edges: usize) -> QuiverClass {
    let v = members.len();
    let degree = |x: usize| adj[x].len();
    if edges >= v {
        // contains a cycle: only the plain cycle is Euclidean
        if edges == v && members.iter().all(|&x| degree(x) == 2) {
            return QuiverClass::Euclidean(DiagramType::A(v - 1));
        }
        return QuiverClass::Neither;
    }
    // a tree
    let branch: Vec<usize> = members.iter().copied().filter(|&x| degree(x) >= 3).collect();
    match branch.len() {
        0 => QuiverClass::Dynkin(DiagramType::A(v)),
        1 => {
            let c = branch[0];
            let mut arms: Vec<usize> = adj[c].iter().map(|&w| arm_length(adj, c, w)).collect();
            arms.sort_unstable();
            classify_star(&arms)
        }
        2 => {
            // ~D_n: both branch points of degree 3, each with two leaves
            let ok = branch.iter().all(|&b| {
                degree(b) == 3 && adj[b].iter().filter(|&&w| degree(w) == 1).count() >= 2
            });
            if ok && v >= 6 {
                QuiverClass::Euclidean(DiagramType::D(v - 1))
            } else {
                QuiverClass::Neither
            }
        }
        _ => QuiverClass::Neither,
    }
}

/// Length of the path starting at `first` away from `center`, or a huge
/// value if it branches again.
fn arm_length(adj: &[Vec<usize>], center: usize, first: usize) -> usize {
    let (mut prev, mut cur, mut len) = (center, first, 1);
    loop {
        let next: Vec<usize> = adj[cur].iter().copied().filter(|&w| w != prev).collect();
        match next.len() {
            0 => return len,
            1 => {
                prev = cur;
                cur = next[0];
                len += 1;
            }
            _ => return usize::MAX / 4,
        }
    }
}

fn classify_star(arms: &[usize]) -> QuiverClass {
    match arms {
        [1, 1, 1, 1] => QuiverClass::Euclidean(DiagramType::D(4)),
        [1, 1, r] => QuiverClass::Dynkin(DiagramType::D(r + 3)),
        [1, 2, 2] => QuiverClass::Dynkin(DiagramType::E(6)),
        [1, 2, 3] => QuiverClass::Dynkin(DiagramType::E(7)),
        [1, 2, 4] => QuiverClass::Dynkin(DiagramType::E(8)),
        [2, 2, 2] => QuiverClass::Euclidean(DiagramType::E(6)),
        [1, 3, 3] => QuiverClass::Euclidean(DiagramType::E(7)),
        [1, 2, 5] => QuiverClass::Euclidean(DiagramType::E(8)),
        _ => QuiverClass::Neither,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> QuiverClass {
        let vs: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let es: Vec<(String, String)> =
            edges.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        classify_quiver(&vs, &es)
    }

    #[test]
    fn paths_and_cycles() {
        assert_eq!(graph(2, &[(0, 1)]), QuiverClass::Dynkin(DiagramType::A(2)));
        assert_eq!(graph(1, &[]), QuiverClass::Dynkin(DiagramType::A(1)));
        assert_eq!(
            graph(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]),
            QuiverClass::Euclidean(DiagramType::A(3))
        );
        assert_eq!(graph(1, &[(0, 0)]), QuiverClass::Euclidean(DiagramType::A(0)));
        assert_eq!(graph(2, &[(0, 1), (1, 0)]), QuiverClass::Euclidean(DiagramType::A(1)));
        assert_eq!(graph(1, &[(0, 0), (0, 0)]), QuiverClass::Neither);
    }

    #[test]
    fn stars() {
        assert_eq!(graph(4, &[(0, 1), (0, 2), (0, 3)]), QuiverClass::Dynkin(DiagramType::D(4)));
        assert_eq!(
            graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]),
            QuiverClass::Euclidean(DiagramType::D(4))
        );
        let e6 = [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5)];
        assert_eq!(graph(6, &e6), QuiverClass::Dynkin(DiagramType::E(6)));
        let e6t = [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6)];
        assert_eq!(graph(7, &e6t), QuiverClass::Euclidean(DiagramType::E(6)));
        let e8t = [(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (5, 6), (6, 7), (7, 8)];
        assert_eq!(graph(9, &e8t), QuiverClass::Euclidean(DiagramType::E(8)));
        let wild = [(0, 1), (1, 2), (0, 3), (3, 4), (0, 5), (5, 6), (6, 7)];
        assert_eq!(graph(8, &wild), QuiverClass::Neither);
    }

    #[test]
    fn extended_d() {
        let d5t = [(0, 1), (0, 2), (0, 3), (3, 4), (3, 5)];
        assert_eq!(graph(6, &d5t), QuiverClass::Euclidean(DiagramType::D(5)));
    }

    #[test]
    fn cycle_with_pendant_is_neither() {
        let vs: Vec<String> = ["0", "1", "2", "3", "4"].iter().map(|s| s.to_string()).collect();
        let es: Vec<(String, String)> = [("3", "1"), ("0", "3"), ("4", "3"), ("2", "4"), ("2", "0")]
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        assert_eq!(classify_quiver(&vs, &es), QuiverClass::Neither);
    }

    #[test]
    fn disconnected_parts() {
        assert_eq!(
            graph(3, &[(0, 1)]),
            QuiverClass::Disconnected(vec![
                QuiverClass::Dynkin(DiagramType::A(2)),
                QuiverClass::Dynkin(DiagramType::A(1))
            ])
        );
    }
}
