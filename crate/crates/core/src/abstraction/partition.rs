use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::Labels;

/// Role of a node in an abstraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NodeClass {
    /// Kept, with its own equation.
    STilde,
    /// Kept, its equation inverted to stand in for a removed node.
    L,
    /// Removed, indirectly observed through `L`.
    V,
    /// Removed by plain elimination.
    ZTilde,
}

impl NodeClass {
    pub fn symbol(self) -> &'static str {
        match self {
            NodeClass::STilde => "S~",
            NodeClass::L => "L",
            NodeClass::V => "V",
            NodeClass::ZTilde => "Z~",
        }
    }
}

/// Disjoint zero-based node sets `(S̃, L, V, Z̃)` covering every node, each
/// kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    n: usize,
    s_tilde: Vec<usize>,
    l_set: Vec<usize>,
    v_set: Vec<usize>,
    z_tilde: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, s_tilde: &[usize], l_set: &[usize], v_set: &[usize], z_tilde: &[usize]) -> Result<Self> {
        let mut seen = vec![None::<NodeClass>; n];
        let groups = [
            (s_tilde, NodeClass::STilde),
            (l_set, NodeClass::L),
            (v_set, NodeClass::V),
            (z_tilde, NodeClass::ZTilde),
        ];
        for (set, class) in groups {
            for &i in set {
                if i >= n {
                    return Err(Error::InvalidPartition(format!("node {} out of range", i + 1)));
                }
                if let Some(prev) = seen[i].replace(class) {
                    return Err(Error::InvalidPartition(format!(
                        "node {} is in both {} and {}",
                        i + 1,
                        prev.symbol(),
                        class.symbol()
                    )));
                }
            }
        }
        if let Some(i) = seen.iter().position(Option::is_none) {
            return Err(Error::InvalidPartition(format!("node {} is unassigned", i + 1)));
        }
        if l_set.len() < v_set.len() {
            return Err(Error::InvalidPartition(format!(
                "{} indirect observations cannot cover {} removed nodes",
                l_set.len(),
                v_set.len()
            )));
        }
        if s_tilde.is_empty() && l_set.is_empty() {
            return Err(Error::InvalidPartition("no node is kept".into()));
        }
        let sorted = |s: &[usize]| {
            let mut v = s.to_vec();
            v.sort_unstable();
            v
        };
        Ok(Self {
            n,
            s_tilde: sorted(s_tilde),
            l_set: sorted(l_set),
            v_set: sorted(v_set),
            z_tilde: sorted(z_tilde),
        })
    }

    /// Keeps `keep` and eliminates everything else.
    pub fn immersion(n: usize, keep: &[usize]) -> Result<Self> {
        let rest: Vec<usize> = (0..n).filter(|i| !keep.contains(i)).collect();
        Self::new(n, keep, &[], &[], &rest)
    }

    /// Builds from a class per node.
    pub fn from_classes(classes: &[NodeClass]) -> Result<Self> {
        let pick = |c| classes.iter().enumerate().filter(|(_, &k)| k == c).map(|(i, _)| i).collect::<Vec<_>>();
        Self::new(
            classes.len(),
            &pick(NodeClass::STilde),
            &pick(NodeClass::L),
            &pick(NodeClass::V),
            &pick(NodeClass::ZTilde),
        )
    }

    /// Resolves node labels (or one-based indices) for each set.
    pub fn from_labels(labels: &Labels, s: &[String], l: &[String], v: &[String], z: &[String]) -> Result<Self> {
        let n = labels.nodes.len();
        let resolve = |names: &[String]| -> Result<Vec<usize>> {
            names
                .iter()
                .map(|name| {
                    if let Some(i) = labels.nodes.iter().position(|x| x == name) {
                        return Ok(i);
                    }
                    match name.parse::<usize>() {
                        Ok(k) if (1..=n).contains(&k) => Ok(k - 1),
                        _ => Err(Error::InvalidPartition(format!("unknown node {name:?}"))),
                    }
                })
                .collect()
        };
        let (s, l, v) = (resolve(s)?, resolve(l)?, resolve(v)?);
        let z = if z.is_empty() {
            (0..n).filter(|i| !s.contains(i) && !l.contains(i) && !v.contains(i)).collect()
        } else {
            resolve(z)?
        };
        Self::new(n, &s, &l, &v, &z)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn s_tilde(&self) -> &[usize] {
        &self.s_tilde
    }

    pub fn l_set(&self) -> &[usize] {
        &self.l_set
    }

    pub fn v_set(&self) -> &[usize] {
        &self.v_set
    }

    pub fn z_tilde(&self) -> &[usize] {
        &self.z_tilde
    }

    /// Kept nodes in abstracted order: sorted `S̃` then sorted `L`.
    pub fn kept(&self) -> Vec<usize> {
        self.s_tilde.iter().chain(&self.l_set).copied().collect()
    }

    pub fn removed(&self) -> Vec<usize> {
        self.v_set.iter().chain(&self.z_tilde).copied().collect()
    }

    pub fn is_immersion(&self) -> bool {
        self.l_set.is_empty() && self.v_set.is_empty()
    }

    pub fn class_of(&self, node: usize) -> NodeClass {
        if self.s_tilde.binary_search(&node).is_ok() {
            NodeClass::STilde
        } else if self.l_set.binary_search(&node).is_ok() {
            NodeClass::L
        } else if self.v_set.binary_search(&node).is_ok() {
            NodeClass::V
        } else {
            NodeClass::ZTilde
        }
    }

    /// The four sets in block order.
    pub fn blocks(&self) -> [&[usize]; 4] {
        [&self.s_tilde, &self.l_set, &self.v_set, &self.z_tilde]
    }

    pub fn with_labels(&self, labels: &Labels) -> PartitionLabels {
        let names = |s: &[usize]| s.iter().map(|&i| labels.nodes[i].clone()).collect();
        PartitionLabels {
            s_tilde: names(&self.s_tilde),
            l: names(&self.l_set),
            v: names(&self.v_set),
            z_tilde: names(&self.z_tilde),
        }
    }
}

/// Partition rendered with node labels for reports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartitionLabels {
    pub s_tilde: Vec<String>,
    #[serde(rename = "L")]
    pub l: Vec<String>,
    #[serde(rename = "V")]
    pub v: Vec<String>,
    pub z_tilde: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_overlap_gaps_and_rank_shortfall() {
        assert!(Partition::new(3, &[0, 1], &[], &[], &[1, 2]).is_err());
        assert!(Partition::new(3, &[0], &[], &[], &[1]).is_err());
        assert!(Partition::new(3, &[0], &[], &[1], &[2]).is_err());
        assert!(Partition::new(2, &[], &[], &[], &[0, 1]).is_err());
        let p = Partition::new(4, &[2, 0], &[3], &[1], &[]).unwrap();
        assert_eq!(p.kept(), vec![0, 2, 3]);
        assert_eq!(p.class_of(1), NodeClass::V);
    }

    #[test]
    fn labels_or_indices() {
        let labels = Labels::default_for(4, 0);
        let p = Partition::from_labels(&labels, &["w1".into(), "3".into()], &["w2".into()], &["4".into()], &[]).unwrap();
        assert_eq!(p.s_tilde(), &[0, 2]);
        assert_eq!(p.v_set(), &[3]);
        assert!(p.z_tilde().is_empty());
    }
}
