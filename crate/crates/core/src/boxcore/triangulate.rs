use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::model::FreeBox;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriangulationMode {
    /// Heights on solid arrows, looking only at solid arrows inside differentials.
    SolidOnly,
    /// Heights on all arrows (the Roiter condition).
    Full,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Triangulation {
    pub heights: BTreeMap<String, usize>,
}

impl Triangulation {
    pub fn height(&self, id: &str) -> Option<usize> {
        self.heights.get(id).copied()
    }
}

/// A closed chain of arrows, each occurring in the differential of the previous one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleWitness {
    pub cycle: Vec<String>,
}

/// Height function with `h(b) < h(a)` whenever a relevant `b` occurs in `d(a)`.
pub fn find_triangulation(
    b: &FreeBox,
    mode: TriangulationMode,
) -> Result<Triangulation, CycleWitness> {
    let relevant = |id: &str| match mode {
        TriangulationMode::Full => true,
        TriangulationMode::SolidOnly => b.arrow(id).map(|a| a.is_solid()).unwrap_or(false),
    };
    let domain: Vec<String> = b.arrow_ids().filter(|id| relevant(id)).cloned().collect();
    let deps: BTreeMap<&str, Vec<String>> = domain
        .iter()
        .map(|id| {
            let ds = b
                .differential(id)
                .arrow_ids()
                .into_iter()
                .filter(|x| relevant(x))
                .collect();
            (id.as_str(), ds)
        })
        .collect();

    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done(usize),
    }
    let mut marks: BTreeMap<String, Mark> = BTreeMap::new();
    // iterative DFS so long chains cannot overflow the stack
    for root in &domain {
        if marks.contains_key(root) {
            continue;
        }
        let mut stack: Vec<(String, usize)> = vec![(root.clone(), 0)];
        marks.insert(root.clone(), Mark::Open);
        while let Some((node, next)) = stack.pop() {
            let children = &deps[node.as_str()];
            if next < children.len() {
                let child = children[next].clone();
                stack.push((node.clone(), next + 1));
                match marks.get(&child) {
                    Some(Mark::Open) => {
                        let start = stack.iter().position(|(n, _)| *n == child).unwrap_or(0);
                        let cycle = stack[start..].iter().map(|(n, _)| n.clone()).collect();
                        return Err(CycleWitness { cycle });
                    }
                    Some(Mark::Done(_)) => {}
                    None => {
                        marks.insert(child.clone(), Mark::Open);
                        stack.push((child, 0));
                    }
                }
            } else {
                let h = children
                    .iter()
                    .map(|c| match marks[c] {
                        Mark::Done(h) => h + 1,
                        Mark::Open => unreachable!("children finish first"),
                    })
                    .max()
                    .unwrap_or(0);
                marks.insert(node, Mark::Done(h));
            }
        }
    }
    let heights = marks
        .into_iter()
        .map(|(k, m)| match m {
            Mark::Done(h) => (k, h),
            Mark::Open => unreachable!("search finished"),
        })
        .collect();
    Ok(Triangulation { heights })
}
