//! Set partitions of `[m] = {1, ..., m}`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::maps::TreeMap;
use crate::tree::OrderedTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("ground sets differ: [{0}] vs [{1}]")]
    GroundMismatch(usize, usize),
    #[error("invalid partition: {0}")]
    Invalid(String),
    #[error("need 1 <= k <= m, got k = {k}, m = {m}")]
    BadParameters { k: usize, m: usize },
}

/// A partition of `[m]` into non-empty blocks, each sorted, ordered by least
/// element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    ground: usize,
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    pub fn new(ground: usize, mut blocks: Vec<Vec<usize>>) -> Result<Self, PartitionError> {
        let mut seen = vec![false; ground + 1];
        for block in &mut blocks {
            if block.is_empty() {
                return Err(PartitionError::Invalid("empty block".into()));
            }
            block.sort_unstable();
            for &x in block.iter() {
                if x == 0 || x > ground {
                    return Err(PartitionError::Invalid(format!("{x} is not in [{ground}]")));
                }
                if std::mem::replace(&mut seen[x], true) {
                    return Err(PartitionError::Invalid(format!("{x} appears twice")));
                }
            }
        }
        if let Some(x) = (1..=ground).find(|&x| !seen[x]) {
            return Err(PartitionError::Invalid(format!("{x} is not covered")));
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { ground, blocks })
    }

    /// From a restricted growth string: `labels[x - 1]` is the 0-based block of `x`.
    pub fn from_labels(labels: &[usize]) -> Self {
        let k = labels.iter().max().map_or(0, |&l| l + 1);
        let mut blocks = vec![Vec::new(); k];
        for (i, &l) in labels.iter().enumerate() {
            blocks[l].push(i + 1);
        }
        SetPartition {
            ground: labels.len(),
            blocks,
        }
    }

    pub fn ground(&self) -> usize {
        self.ground
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// 0-based index of the block holding each of `1..=m`.
    pub fn labels(&self) -> Vec<usize> {
        let mut labels = vec![0; self.ground];
        for (i, block) in self.blocks.iter().enumerate() {
            for &x in block {
                labels[x - 1] = i;
            }
        }
        labels
    }

    pub fn is_homogeneous(&self) -> bool {
        self.blocks.windows(2).all(|w| w[0].len() == w[1].len())
    }

    /// `f_P: [m] → [k]` as a map between path trees.
    pub fn to_rigid_surjection(&self) -> TreeMap {
        TreeMap::new(
            OrderedTree::path(self.ground),
            OrderedTree::path(self.num_blocks()),
            self.labels(),
        )
        .expect("labels are block indices")
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, block) in self.blocks.iter().enumerate() {
            if i > 0 {
                f.write_str("|")?;
            }
            for (j, x) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{x}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = PartitionError;

    /// `"1,3|2,4"`. The ground set is `[max element]`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let blocks = s
            .split('|')
            .map(|b| {
                b.split(',')
                    .map(|x| {
                        x.parse::<usize>()
                            .map_err(|_| PartitionError::Invalid(format!("bad element {x:?}")))
                    })
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let ground = blocks.iter().flatten().copied().max().unwrap_or(0);
        let p = SetPartition::new(ground, blocks)?;
        if p.to_string() != s {
            return Err(PartitionError::Invalid(format!(
                "{s:?} is not in canonical form (expected {p})"
            )));
        }
        Ok(p)
    }
}

/// Result of [`enumerate_partitions`]; `warning` is set when the requested
/// homogeneous family is empty because `k` does not divide `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionList {
    pub partitions: Vec<SetPartition>,
    pub warning: Option<String>,
}

/// All `k`-partitions of `[m]`, ordered lexicographically by their label
/// sequences (equivalently by the image tuples of `f_P`).
pub fn enumerate_partitions(m: usize, k: usize, homogeneous: bool) -> Result<PartitionList, PartitionError> {
    if k == 0 || k > m {
        return Err(PartitionError::BadParameters { k, m });
    }
    if homogeneous && !m.is_multiple_of(k) {
        return Ok(PartitionList {
            partitions: Vec::new(),
            warning: Some(format!("{k} does not divide {m}; no homogeneous {k}-partitions exist")),
        });
    }
    let mut out = Vec::new();
    let mut labels = Vec::with_capacity(m);
    let block_size = m / k;
    let mut sizes = Vec::with_capacity(k);
    rgs(m, k, homogeneous.then_some(block_size), &mut labels, &mut sizes, &mut out);
    Ok(PartitionList {
        partitions: out,
        warning: None,
    })
}

fn rgs(
    m: usize,
    k: usize,
    block_size: Option<usize>,
    labels: &mut Vec<usize>,
    sizes: &mut Vec<usize>,
    out: &mut Vec<SetPartition>,
) {
    if labels.len() == m {
        if sizes.len() == k {
            out.push(SetPartition::from_labels(labels));
        }
        return;
    }
    if k - sizes.len() > m - labels.len() {
        return;
    }
    for l in 0..=sizes.len().min(k - 1) {
        if l == sizes.len() {
            sizes.push(0);
        }
        if block_size.is_some_and(|b| sizes[l] == b) {
            continue;
        }
        sizes[l] += 1;
        labels.push(l);
        rgs(m, k, block_size, labels, sizes, out);
        labels.pop();
        sizes[l] -= 1;
        if sizes[l] == 0 {
            sizes.pop();
        }
    }
}

/// Whether every block of `p` is a union of blocks of `q`.
pub fn is_subpartition(p: &SetPartition, q: &SetPartition) -> Result<bool, PartitionError> {
    if p.ground != q.ground {
        return Err(PartitionError::GroundMismatch(p.ground, q.ground));
    }
    let labels = p.labels();
    Ok(q
        .blocks
        .iter()
        .all(|b| b.iter().all(|&x| labels[x - 1] == labels[b[0] - 1])))
}

pub fn to_rigid_surjection(p: &SetPartition) -> TreeMap {
    p.to_rigid_surjection()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maps::{enumerate_rigid_surjections, is_rigid_surjection};

    fn part(s: &str) -> SetPartition {
        s.parse().unwrap()
    }

    /// Stirling numbers of the second kind by the standard recurrence.
    fn stirling2(n: usize, k: usize) -> usize {
        let mut table = vec![vec![0usize; k + 1]; n + 1];
        table[0][0] = 1;
        for i in 1..=n {
            for j in 1..=k.min(i) {
                table[i][j] = j * table[i - 1][j] + table[i - 1][j - 1];
            }
        }
        table[n][k]
    }

    #[test]
    fn counts() {
        assert_eq!(enumerate_partitions(4, 2, false).unwrap().partitions.len(), 7);
        for m in 1..=6 {
            for k in 1..=m {
                assert_eq!(
                    enumerate_partitions(m, k, false).unwrap().partitions.len(),
                    stirling2(m, k)
                );
            }
        }
        let discrete = enumerate_partitions(3, 3, false).unwrap().partitions;
        assert_eq!(discrete, vec![part("1|2|3")]);
    }

    #[test]
    fn homogeneous() {
        let h = enumerate_partitions(4, 2, true).unwrap();
        let names: Vec<String> = h.partitions.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, vec!["1,2|3,4", "1,3|2,4", "1,4|2,3"]);
        assert!(h.warning.is_none());
        let none = enumerate_partitions(5, 2, true).unwrap();
        assert!(none.partitions.is_empty());
        assert!(none.warning.is_some());
        assert!(enumerate_partitions(2, 3, false).is_err());
    }

    #[test]
    fn homogeneity_is_recomputed_per_object() {
        assert!(part("1,2|3,4").is_homogeneous());
        assert!(part("1,2,3,4").is_homogeneous());
        assert!(!part("1,2|3|4").is_homogeneous());
    }

    #[test]
    fn subpartition_examples() {
        let q = part("1|2|3,4");
        assert!(is_subpartition(&part("1,2,3,4"), &q).unwrap());
        assert!(is_subpartition(&q, &q).unwrap());
        assert!(!is_subpartition(&part("1,3|2,4"), &q).unwrap());
        assert_eq!(
            is_subpartition(&part("1,2"), &q),
            Err(PartitionError::GroundMismatch(2, 4))
        );
    }

    #[test]
    fn rigid_surjection_examples() {
        assert_eq!(part("1,3|2,4").to_rigid_surjection().images(), &[0, 1, 0, 1]);
        assert_eq!(
            part("1|2|3").to_rigid_surjection(),
            TreeMap::identity(&OrderedTree::path(3))
        );
        assert_eq!(
            part("1,2,3").to_rigid_surjection(),
            TreeMap::constant_root(&OrderedTree::path(3), &OrderedTree::single())
        );
        assert!(is_rigid_surjection(&part("1,3|2,4").to_rigid_surjection()));
    }

    #[test]
    fn bijection_with_path_rigid_surjections() {
        for m in 1..=5 {
            for k in 1..=m {
                let via_partitions: Vec<TreeMap> = enumerate_partitions(m, k, false)
                    .unwrap()
                    .partitions
                    .iter()
                    .map(SetPartition::to_rigid_surjection)
                    .collect();
                let direct =
                    enumerate_rigid_surjections(&OrderedTree::path(m), &OrderedTree::path(k), false);
                assert_eq!(via_partitions, direct, "m = {m}, k = {k}");
            }
        }
    }

    #[test]
    fn text_format() {
        assert_eq!(part("1,3|2,4").to_string(), "1,3|2,4");
        assert!("2,4|1,3".parse::<SetPartition>().is_err());
        assert!("1,3|2".parse::<SetPartition>().is_ok());
        assert!("1,1|2".parse::<SetPartition>().is_err());
        assert!("1,3".parse::<SetPartition>().is_err());
    }
}
