//! Block designs, resolutions into parallel classes, and cross intersection
//! numbers.
//!
//! Points and blocks are 0-based inside the library. The JSON interchange
//! format ([`DesignFile`]) and every constructor taking raw input use 1-based
//! numbering; conversion happens only at those boundaries.

use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;
use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{Error, Result};

/// A design `(X, A)`: `v` points and an ordered list of equal-size blocks.
///
/// Block order is significant: block `j` is the placement of cache `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Design {
    v: usize,
    k: usize,
    blocks: Vec<Vec<usize>>,
    masks: Vec<FixedBitSet>,
}

impl Design {
    /// Validates a design given with 1-based points.
    pub fn new(v: usize, raw_blocks: &[Vec<usize>]) -> Result<Self> {
        if v == 0 {
            return Err(Error::NoPoints);
        }
        let shifted = raw_blocks
            .iter()
            .enumerate()
            .map(|(j, block)| {
                block
                    .iter()
                    .map(|&p| {
                        if p == 0 || p > v {
                            Err(Error::PointOutOfRange {
                                block: j + 1,
                                point: p,
                                v,
                            })
                        } else {
                            Ok(p - 1)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_zero_based(v, shifted)
    }

    /// Validates a design whose points are already 0-based.
    pub fn from_zero_based(v: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        if v == 0 {
            return Err(Error::NoPoints);
        }
        if blocks.is_empty() {
            return Err(Error::NoBlocks);
        }
        let mut sorted_blocks = Vec::with_capacity(blocks.len());
        let mut masks = Vec::with_capacity(blocks.len());
        let mut k = None;
        for (j, mut block) in blocks.into_iter().enumerate() {
            if block.is_empty() {
                return Err(Error::EmptyBlock { block: j + 1 });
            }
            block.sort_unstable();
            let mut mask = FixedBitSet::with_capacity(v);
            for &p in &block {
                if p >= v {
                    return Err(Error::PointOutOfRange {
                        block: j + 1,
                        point: p + 1,
                        v,
                    });
                }
                if mask.put(p) {
                    return Err(Error::DuplicatePoint {
                        block: j + 1,
                        point: p + 1,
                    });
                }
            }
            match k {
                None => k = Some(block.len()),
                Some(expected) if expected != block.len() => {
                    return Err(Error::NonUniformBlockSize {
                        block: j + 1,
                        expected,
                        found: block.len(),
                    })
                }
                Some(_) => {}
            }
            sorted_blocks.push(block);
            masks.push(mask);
        }
        Ok(Design {
            v,
            k: k.expect("at least one block"),
            blocks: sorted_blocks,
            masks,
        })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn b(&self) -> usize {
        self.blocks.len()
    }

    /// Blocks as ascending 0-based point lists.
    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block(&self, j: usize) -> &[usize] {
        &self.blocks[j]
    }

    /// Block `j` as a point bitset of width `v`.
    pub fn mask(&self, j: usize) -> &FixedBitSet {
        &self.masks[j]
    }
}

/// A design together with a partition of its blocks into parallel classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Resolution {
    design: Design,
    classes: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Resolution {
    /// Validates a resolution given as 1-based block indices per class.
    pub fn new(design: Design, classes: &[Vec<usize>]) -> Result<Self> {
        let b = design.b();
        let shifted = classes
            .iter()
            .map(|class| {
                class
                    .iter()
                    .map(|&j| {
                        if j == 0 || j > b {
                            Err(Error::NotAPartitionOfBlocks(format!(
                                "block index {j} outside 1..={b}"
                            )))
                        } else {
                            Ok(j - 1)
                        }
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_zero_based(design, shifted)
    }

    pub fn from_zero_based(design: Design, classes: Vec<Vec<usize>>) -> Result<Self> {
        let b = design.b();
        if classes.is_empty() {
            return Err(Error::NotAPartitionOfBlocks("no classes given".into()));
        }
        for (c, class) in classes.iter().enumerate() {
            let mut covered = FixedBitSet::with_capacity(design.v());
            for &j in class {
                if j >= b {
                    return Err(Error::NotAPartitionOfBlocks(format!(
                        "block index {} outside 1..={b}",
                        j + 1
                    )));
                }
                if !covered.is_disjoint(design.mask(j)) {
                    return Err(Error::ClassNotPartitionOfPoints {
                        class: c + 1,
                        detail: format!("block {} overlaps an earlier block of the class", j + 1),
                    });
                }
                covered.union_with(design.mask(j));
            }
            if covered.count_ones(..) != design.v() {
                return Err(Error::ClassNotPartitionOfPoints {
                    class: c + 1,
                    detail: format!(
                        "blocks cover {} of {} points",
                        covered.count_ones(..),
                        design.v()
                    ),
                });
            }
        }
        let mut class_of = vec![usize::MAX; b];
        for (c, class) in classes.iter().enumerate() {
            for &j in class {
                if class_of[j] != usize::MAX {
                    return Err(Error::NotAPartitionOfBlocks(format!(
                        "block {} appears in more than one class",
                        j + 1
                    )));
                }
                class_of[j] = c;
            }
        }
        if let Some(missing) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::NotAPartitionOfBlocks(format!(
                "block {} belongs to no class",
                missing + 1
            )));
        }
        Ok(Resolution {
            design,
            classes,
            class_of,
        })
    }

    pub fn design(&self) -> &Design {
        &self.design
    }

    pub fn v(&self) -> usize {
        self.design.v
    }

    pub fn k(&self) -> usize {
        self.design.k
    }

    pub fn b(&self) -> usize {
        self.design.b()
    }

    /// Number of parallel classes.
    pub fn r(&self) -> usize {
        self.classes.len()
    }

    /// Blocks per parallel class, `b / r = v / k`.
    pub fn b_r(&self) -> usize {
        self.design.v / self.design.k
    }

    /// Classes in their given order, each listing 0-based block indices.
    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    pub fn class_of(&self, block: usize) -> usize {
        self.class_of[block]
    }

    pub fn to_file(&self) -> DesignFile {
        DesignFile {
            v: self.v(),
            blocks: self
                .design
                .blocks
                .iter()
                .map(|b| b.iter().map(|p| p + 1).collect())
                .collect(),
            classes: self
                .classes
                .iter()
                .map(|c| c.iter().map(|j| j + 1).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &DesignFile) -> Result<Self> {
        let design = Design::new(file.v, &file.blocks)?;
        Resolution::new(design, &file.classes)
    }
}

/// JSON interchange form of a resolution, 1-based throughout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignFile {
    pub v: usize,
    pub blocks: Vec<Vec<usize>>,
    pub classes: Vec<Vec<usize>>,
}

/// Cross intersection numbers of a resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrdProfile {
    /// `i -> mu_i` for every `i` in `2..=r` where the number exists.
    pub mu: BTreeMap<usize, usize>,
    /// Cross resolution number: the largest `i` with `mu_i` defined.
    pub crn: Option<usize>,
    pub is_crd: bool,
}

impl CrdProfile {
    pub fn mu(&self, i: usize) -> Option<usize> {
        self.mu.get(&i).copied()
    }

    /// `z = 1` is always admissible; `z >= 2` needs `mu_z`.
    pub fn admits(&self, z: usize) -> bool {
        z == 1 || self.mu.contains_key(&z)
    }

    pub fn admissible_z(&self) -> Vec<usize> {
        std::iter::once(1).chain(self.mu.keys().copied()).collect()
    }
}

/// `mu_i` if every choice of `i` blocks from `i` distinct classes meets in
/// the same nonzero number of points.
pub fn cross_intersection_number(res: &Resolution, i: usize) -> Result<Option<usize>> {
    cross_intersection_number_with_caps(res, i, &Caps::default())
}

pub fn cross_intersection_number_with_caps(
    res: &Resolution,
    i: usize,
    caps: &Caps,
) -> Result<Option<usize>> {
    let r = res.r();
    if i < 2 || i > r {
        return Err(Error::IndexOutOfRange { i, r });
    }
    let mut search = IntersectionSearch {
        res,
        caps,
        evaluated: 0,
        value: None,
        levels: vec![FixedBitSet::with_capacity(res.v()); i],
    };
    let mut subset: Vec<usize> = (0..i).collect();
    loop {
        if !search.descend(&subset, 0)? {
            return Ok(None);
        }
        if !next_combination(&mut subset, r) {
            break;
        }
    }
    Ok(search.value)
}

struct IntersectionSearch<'a> {
    res: &'a Resolution,
    caps: &'a Caps,
    evaluated: u64,
    value: Option<usize>,
    levels: Vec<FixedBitSet>,
}

impl IntersectionSearch<'_> {
    /// Walks block choices for the classes in `subset`; returns `false` as
    /// soon as an empty or differing intersection shows `mu` is undefined.
    fn descend(&mut self, subset: &[usize], depth: usize) -> Result<bool> {
        let class = &self.res.classes()[subset[depth]];
        for &j in class {
            let mask = self.res.design().mask(j);
            if depth == 0 {
                self.levels[0].clone_from(mask);
            } else {
                let (head, tail) = self.levels.split_at_mut(depth);
                tail[0].clone_from(&head[depth - 1]);
                tail[0].intersect_with(mask);
            }
            let size = self.levels[depth].count_ones(..);
            if size == 0 {
                return Ok(false);
            }
            if depth + 1 == subset.len() {
                self.evaluated += 1;
                if self.evaluated > self.caps.max_intersections {
                    return Err(Error::SizeCapExceeded {
                        what: "block intersection count",
                        requested: self.evaluated,
                        limit: self.caps.max_intersections,
                    });
                }
                match self.value {
                    None => self.value = Some(size),
                    Some(v) if v != size => return Ok(false),
                    Some(_) => {}
                }
            } else if !self.descend(subset, depth + 1)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Advances `subset` to the next `len`-combination of `0..n` in
/// lexicographic order; returns `false` after the last one.
pub(crate) fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let len = subset.len();
    let mut i = len;
    while i > 0 {
        i -= 1;
        if subset[i] < n - len + i {
            subset[i] += 1;
            for t in i + 1..len {
                subset[t] = subset[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// All `len`-subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, len: usize) -> Vec<Vec<usize>> {
    if len > n {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut subset: Vec<usize> = (0..len).collect();
    loop {
        out.push(subset.clone());
        if len == 0 || !next_combination(&mut subset, n) {
            break;
        }
    }
    out
}

pub fn crd_profile(res: &Resolution) -> Result<CrdProfile> {
    crd_profile_with_caps(res, &Caps::default())
}

pub fn crd_profile_with_caps(res: &Resolution, caps: &Caps) -> Result<CrdProfile> {
    caps.check_points(res.v() as u64)?;
    let mut mu = BTreeMap::new();
    for i in 2..=res.r() {
        if let Some(value) = cross_intersection_number_with_caps(res, i, caps)? {
            mu.insert(i, value);
        }
    }
    let crn = mu.keys().next_back().copied();
    Ok(CrdProfile {
        is_crd: crn.is_some(),
        crn,
        mu,
    })
}

/// Users whose accessible caches contain a fixed subfile index:
/// `C(r,z) * (b_r^z - (b_r - 1)^z)`.
pub fn users_per_subfile(r: usize, z: usize, b_r: usize) -> u64 {
    let z32 = z as u32;
    binomial(r as u64, z as u64) * ((b_r as u64).pow(z32) - (b_r as u64 - 1).pow(z32))
}

/// Users attached to a fixed cache: `C(r-1, z-1) * b_r^(z-1)`.
pub fn users_per_cache_subfile(r: usize, z: usize, b_r: usize) -> u64 {
    binomial(r as u64 - 1, z as u64 - 1) * (b_r as u64).pow(z as u32 - 1)
}
