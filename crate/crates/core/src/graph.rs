//! Undirected graphs read from SNAP-style edge lists.

use std::collections::HashMap;
use std::collections::VecDeque;
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};

/// Simple undirected graph over contiguous node ids 0..n.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edges: Vec<(u32, u32)>,
}

impl Graph {
    /// Builds from an edge list over ids 0..num_nodes; self-loops and
    /// duplicate edges (in either orientation) are dropped.
    pub fn from_edges(num_nodes: usize, raw: &[(u32, u32)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); num_nodes];
        let mut edges = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for &(u, v) in raw {
            if u as usize >= num_nodes || v as usize >= num_nodes {
                return Err(Error::InvalidParams(format!(
                    "edge ({u},{v}) references a node outside 0..{num_nodes}"
                )));
            }
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if !seen.insert(key) {
                continue;
            }
            adjacency[u as usize].push(v);
            adjacency[v as usize].push(u);
            edges.push(key);
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        edges.sort_unstable();
        Ok(Graph { adjacency, edges })
    }

    pub fn num_nodes(&self) -> usize {
        self.adjacency.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn neighbors(&self, u: u32) -> &[u32] {
        &self.adjacency[u as usize]
    }

    /// Hop distances from `start`; `None` for unreachable nodes.
    pub fn bfs_distances(&self, start: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.num_nodes()];
        dist[start as usize] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize].unwrap();
            for &v in self.neighbors(u) {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.num_nodes() <= 1
            || self
                .bfs_distances(0)
                .iter()
                .all(|d| d.is_some())
    }

    /// The largest connected component as a new graph, together with the
    /// original node id of each new node.
    pub fn largest_component(&self) -> (Graph, Vec<u32>) {
        let n = self.num_nodes();
        let mut comp = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0usize;
            let mut queue = VecDeque::from([s as u32]);
            comp[s] = id;
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in self.neighbors(u) {
                    if comp[v as usize] == usize::MAX {
                        comp[v as usize] = id;
                        queue.push_back(v);
                    }
                }
            }
            sizes.push(size);
        }
        let best = sizes
            .iter()
            .enumerate()
            .max_by_key(|(id, size)| (**size, std::cmp::Reverse(*id)))
            .map(|(id, _)| id)
            .unwrap_or(0);
        let keep: Vec<u32> = (0..n as u32).filter(|u| comp[*u as usize] == best).collect();
        let index: HashMap<u32, u32> = keep
            .iter()
            .enumerate()
            .map(|(new, old)| (*old, new as u32))
            .collect();
        let edges: Vec<(u32, u32)> = self
            .edges
            .iter()
            .filter(|(u, _)| comp[*u as usize] == best)
            .map(|(u, v)| (index[u], index[v]))
            .collect();
        (
            Graph::from_edges(keep.len(), &edges).expect("component edges are in range"),
            keep,
        )
    }
}

/// Parses a whitespace-separated "u v" edge list. Lines starting with '#'
/// are comments; node ids are remapped to 0..n-1 in first-appearance order;
/// self-loops and duplicate edges are dropped.
pub fn parse_edge_list<R: BufRead>(reader: R) -> Result<Graph> {
    let mut ids: HashMap<u64, u32> = HashMap::new();
    let mut order: Vec<u64> = Vec::new();
    let mut raw: Vec<(u32, u32)> = Vec::new();
    let mut intern = |id: u64, ids: &mut HashMap<u64, u32>, order: &mut Vec<u64>| -> u32 {
        *ids.entry(id).or_insert_with(|| {
            order.push(id);
            (order.len() - 1) as u32
        })
    };
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let parse = |tok: Option<&str>, lineno: usize| -> Result<u64> {
            tok.ok_or(Error::MalformedEdgeList {
                line: lineno + 1,
                msg: "expected two node ids".into(),
            })?
            .parse::<u64>()
            .map_err(|e| Error::MalformedEdgeList {
                line: lineno + 1,
                msg: e.to_string(),
            })
        };
        let u = parse(it.next(), lineno)?;
        let v = parse(it.next(), lineno)?;
        if it.next().is_some() {
            return Err(Error::MalformedEdgeList {
                line: lineno + 1,
                msg: "trailing tokens after the two node ids".into(),
            });
        }
        let u = intern(u, &mut ids, &mut order);
        let v = intern(v, &mut ids, &mut order);
        raw.push((u, v));
    }
    if raw.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Graph::from_edges(order.len(), &raw)
}

pub fn load_edge_list<P: AsRef<Path>>(path: P) -> Result<Graph> {
    let file = std::fs::File::open(path)?;
    parse_edge_list(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_remaps_ids() {
        let g = parse_edge_list("# c\n1 2\n2 3\n".as_bytes()).unwrap();
        assert_eq!(g.num_nodes(), 3);
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
    }

    #[test]
    fn duplicate_edges_collapse() {
        let g = parse_edge_list("1 2\n2 1\n".as_bytes()).unwrap();
        assert_eq!(g.num_edges(), 1);
    }

    #[test]
    fn self_loops_dropped() {
        let g = parse_edge_list("1 1\n1 2\n".as_bytes()).unwrap();
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.neighbors(0), &[1]);
    }

    #[test]
    fn malformed_lines_report_position() {
        let err = parse_edge_list("1 2\nnope\n".as_bytes()).unwrap_err();
        match err {
            Error::MalformedEdgeList { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        assert!(matches!(
            parse_edge_list("# only comments\n".as_bytes()),
            Err(Error::EmptyGraph)
        ));
        assert!(matches!(
            parse_edge_list("1 2 3\n".as_bytes()),
            Err(Error::MalformedEdgeList { line: 1, .. })
        ));
    }

    #[test]
    fn bfs_and_components() {
        // Two components: a path 0-1-2 and an isolated edge 3-4.
        let g = parse_edge_list("0 1\n1 2\n3 4\n".as_bytes()).unwrap();
        assert!(!g.is_connected());
        let d = g.bfs_distances(0);
        assert_eq!(d[2], Some(2));
        assert_eq!(d[3], None);
        let (lc, orig) = g.largest_component();
        assert_eq!(lc.num_nodes(), 3);
        assert_eq!(orig, vec![0, 1, 2]);
        assert!(lc.is_connected());
    }
}
