//! The coded caching scheme attached to a resolution.
//!
//! Cache `j` stores, for every file, the subfiles indexed by the points of
//! block `j`. A user reads `z` caches drawn from `z` distinct parallel
//! classes. Delivery walks every choice of `z` classes and, inside it, every
//! choice of one block pair per class. The `2^z` users formed from those
//! pairs are served together: user `m` is sent the subfiles in `f_m`, the
//! intersection of the blocks it does *not* read, and the `s`-th smallest
//! element of every user's `f_m` is XORed into one transmission.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use num_integer::binomial;
use serde::{Deserialize, Serialize};

use crate::design::{combinations, crd_profile, CrdProfile, Resolution};
use crate::error::{Error, Result};
use crate::rational::{int, ratio, Rational};

/// A user: one cache from each of `z` distinct classes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct User {
    /// Ascending 0-based class indices.
    pub classes: Vec<usize>,
    /// 0-based cache (block) indices, `caches[i]` belonging to `classes[i]`.
    pub caches: Vec<usize>,
}

/// `mu_z` with the `z = 1` convention `mu_1 = k`.
pub fn mu_for(profile: &CrdProfile, z: usize, k: usize) -> Option<usize> {
    match z {
        1 => Some(k),
        z => profile.mu(z),
    }
}

/// Users in lexicographic order of (class subset, cache indices).
pub fn enumerate_users(res: &Resolution, profile: &CrdProfile, z: usize) -> Result<Vec<User>> {
    if z == 0 || z > res.r() || !profile.admits(z) {
        return Err(Error::MuUndefinedForZ { z });
    }
    let mut users = Vec::new();
    for classes in combinations(res.r(), z) {
        let members: Vec<Vec<usize>> = classes
            .iter()
            .map(|&c| {
                let mut blocks = res.classes()[c].clone();
                blocks.sort_unstable();
                blocks
            })
            .collect();
        let mut digits = vec![0usize; z];
        loop {
            users.push(User {
                classes: classes.clone(),
                caches: digits.iter().zip(&members).map(|(&d, m)| m[d]).collect(),
            });
            if !advance(
                &mut digits,
                &members.iter().map(Vec::len).collect::<Vec<_>>(),
            ) {
                break;
            }
        }
    }
    Ok(users)
}

/// Odometer step over mixed radices, last digit fastest.
fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radices[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// Symmetric batch placement: cache `j` holds subfiles `A_j` of every file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub files: usize,
    caches: Vec<Vec<usize>>,
}

impl Placement {
    /// 0-based subfile indices held by `cache` for each file.
    pub fn subfiles(&self, cache: usize) -> &[usize] {
        &self.caches[cache]
    }

    pub fn holds(&self, cache: usize, subfile: usize) -> bool {
        self.caches[cache].binary_search(&subfile).is_ok()
    }

    pub fn caches(&self) -> usize {
        self.caches.len()
    }

    /// Subfiles of one file stored across all caches, `b * k`.
    pub fn stored_per_file(&self) -> usize {
        self.caches.iter().map(Vec::len).sum()
    }
}

pub fn place(res: &Resolution, files: usize) -> Placement {
    Placement {
        files,
        caches: res.design().blocks().to_vec(),
    }
}

/// `M'/N = z·k/v + Σ_{t=2..z} (-1)^{t+1} C(z,t) mu_t / v`.
pub fn user_memory_fraction(
    profile: &CrdProfile,
    z: usize,
    k: usize,
    v: usize,
) -> Result<Rational> {
    if z == 0 {
        return Err(Error::MuUndefinedForZ { z });
    }
    let mut total = int(z as i128 * k as i128);
    for t in 2..=z {
        let mu = profile.mu(t).ok_or(Error::MuUndefinedForZ { z })? as i128;
        let term = binomial(z as i128, t as i128) * mu;
        if t % 2 == 0 {
            total -= term;
        } else {
            total += term;
        }
    }
    Ok(total / v as i128)
}

/// A scheme instance: design, `z`, file count and the enumerated users.
#[derive(Debug, Clone)]
pub struct SchemeInstance {
    res: Resolution,
    profile: CrdProfile,
    z: usize,
    files: usize,
    users: Vec<User>,
    accessible: Vec<FixedBitSet>,
    index: HashMap<Vec<usize>, usize>,
}

impl SchemeInstance {
    pub fn new(res: Resolution, z: usize, files: usize) -> Result<Self> {
        let profile = crd_profile(&res)?;
        Self::with_profile(res, profile, z, files)
    }

    pub fn with_profile(
        res: Resolution,
        profile: CrdProfile,
        z: usize,
        files: usize,
    ) -> Result<Self> {
        let users = enumerate_users(&res, &profile, z)?;
        let accessible = users
            .iter()
            .map(|u| {
                let mut set = FixedBitSet::with_capacity(res.v());
                for &c in &u.caches {
                    set.union_with(res.design().mask(c));
                }
                set
            })
            .collect();
        let index = users
            .iter()
            .enumerate()
            .map(|(i, u)| (u.caches.clone(), i))
            .collect();
        Ok(SchemeInstance {
            res,
            profile,
            z,
            files,
            users,
            accessible,
            index,
        })
    }

    pub fn resolution(&self) -> &Resolution {
        &self.res
    }

    pub fn profile(&self) -> &CrdProfile {
        &self.profile
    }

    pub fn z(&self) -> usize {
        self.z
    }

    pub fn files(&self) -> usize {
        self.files
    }

    pub fn users(&self) -> &[User] {
        &self.users
    }

    pub fn user_count(&self) -> usize {
        self.users.len()
    }

    pub fn placement(&self) -> Placement {
        place(&self.res, self.files)
    }

    /// `Y_m`: subfile indices user `m` reads from its caches.
    pub fn accessible(&self, user: usize) -> &FixedBitSet {
        &self.accessible[user]
    }

    /// User reading exactly `caches`, listed in class order.
    pub fn user_with_caches(&self, caches: &[usize]) -> Option<usize> {
        self.index.get(caches).copied()
    }

    pub fn mu_z(&self) -> usize {
        mu_for(&self.profile, self.z, self.res.k()).expect("z admissible by construction")
    }

    pub fn params(&self) -> DesignParams {
        DesignParams::of(&self.res)
    }

    pub fn metrics(&self) -> Result<SchemeMetrics> {
        SchemeMetrics::new(&self.params(), &self.profile, self.z)
    }
}

/// One XOR-coded broadcast.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodedTransmission {
    /// Delivery group this transmission belongs to; groups are numbered in
    /// emission order and each holds `mu_z` transmissions.
    pub group: usize,
    pub classes: Vec<usize>,
    /// One block pair per class, smaller index first.
    pub pairs: Vec<(usize, usize)>,
    /// 0-based position within `f_m`.
    pub s: usize,
    /// `(user, subfile)` terms, ascending by user.
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub user: usize,
    pub subfile: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeliverySchedule {
    pub z: usize,
    /// 0-based file index demanded by each user.
    pub demands: Vec<usize>,
    pub transmissions: Vec<CodedTransmission>,
}

impl DeliverySchedule {
    pub fn is_distinct(&self) -> bool {
        let mut seen = self.demands.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }

    /// Transmissions grouped by their shared (classes, pairs) provenance.
    pub fn groups(&self) -> impl Iterator<Item = &[CodedTransmission]> {
        self.transmissions.chunk_by(|a, b| a.group == b.group)
    }

    pub fn to_file(&self) -> ScheduleFile {
        ScheduleFile {
            z: self.z,
            demands: self.demands.iter().map(|d| d + 1).collect(),
            transmissions: self
                .transmissions
                .iter()
                .map(|t| TransmissionFile {
                    classes: t.classes.iter().map(|c| c + 1).collect(),
                    pairs: t.pairs.iter().map(|&(a, b)| [a + 1, b + 1]).collect(),
                    s: t.s + 1,
                    terms: t
                        .terms
                        .iter()
                        .map(|term| TermFile {
                            user: term.user + 1,
                            subfile: term.subfile + 1,
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

/// JSON form of a delivery schedule, 1-based throughout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub z: usize,
    pub demands: Vec<usize>,
    pub transmissions: Vec<TransmissionFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransmissionFile {
    pub classes: Vec<usize>,
    pub pairs: Vec<[usize; 2]>,
    pub s: usize,
    pub terms: Vec<TermFile>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermFile {
    pub user: usize,
    pub subfile: usize,
}

/// Checks a 1-based demand vector and converts it to 0-based file indices.
pub fn check_demands(demands: &[usize], users: usize, files: usize) -> Result<Vec<usize>> {
    if demands.len() != users {
        return Err(Error::BadDemandLength {
            expected: users,
            found: demands.len(),
        });
    }
    demands
        .iter()
        .enumerate()
        .map(|(u, &d)| {
            if d == 0 || d > files {
                Err(Error::DemandOutOfRange {
                    user: u + 1,
                    demand: d,
                    files,
                })
            } else {
                Ok(d - 1)
            }
        })
        .collect()
}

/// Generates the delivery schedule for 1-based `demands`.
pub fn build_delivery_schedule(
    scheme: &SchemeInstance,
    demands: &[usize],
) -> Result<DeliverySchedule> {
    let demands = check_demands(demands, scheme.user_count(), scheme.files())?;
    let res = scheme.resolution();
    let z = scheme.z();
    let mu = scheme.mu_z();
    let mut transmissions = Vec::new();
    let mut group = 0;
    for classes in combinations(res.r(), z) {
        let class_pairs: Vec<Vec<(usize, usize)>> = classes
            .iter()
            .map(|&c| {
                let mut blocks = res.classes()[c].clone();
                blocks.sort_unstable();
                let mut pairs = Vec::new();
                for (i, &a) in blocks.iter().enumerate() {
                    for &b in &blocks[i + 1..] {
                        pairs.push((a, b));
                    }
                }
                pairs
            })
            .collect();
        if class_pairs.iter().any(Vec::is_empty) {
            continue;
        }
        let radices: Vec<usize> = class_pairs.iter().map(Vec::len).collect();
        let mut digits = vec![0usize; z];
        loop {
            let pairs: Vec<(usize, usize)> = digits
                .iter()
                .zip(&class_pairs)
                .map(|(&d, p)| p[d])
                .collect();
            let mut served = Vec::with_capacity(1 << z);
            for choice in 0..1usize << z {
                let mut caches = Vec::with_capacity(z);
                let mut missing = FixedBitSet::with_capacity(res.v());
                missing.insert_range(..);
                for (s, &(a, b)) in pairs.iter().enumerate() {
                    let take_second = choice >> (z - 1 - s) & 1 == 1;
                    let (held, other) = if take_second { (b, a) } else { (a, b) };
                    caches.push(held);
                    missing.intersect_with(res.design().mask(other));
                }
                let user = scheme
                    .user_with_caches(&caches)
                    .expect("every cache choice from distinct classes is a user");
                let f_m: Vec<usize> = missing.ones().collect();
                if f_m.len() != mu {
                    return Err(Error::InternalMuMismatch {
                        classes: classes.iter().map(|c| c + 1).collect(),
                        user: user + 1,
                        expected: mu,
                        found: f_m.len(),
                    });
                }
                served.push((user, f_m));
            }
            served.sort_by_key(|(user, _)| *user);
            for s in 0..mu {
                transmissions.push(CodedTransmission {
                    group,
                    classes: classes.clone(),
                    pairs: pairs.clone(),
                    s,
                    terms: served
                        .iter()
                        .map(|(user, f_m)| Term {
                            user: *user,
                            subfile: f_m[s],
                        })
                        .collect(),
                });
            }
            group += 1;
            if !advance(&mut digits, &radices) {
                break;
            }
        }
    }
    Ok(DeliverySchedule {
        z,
        demands,
        transmissions,
    })
}

/// `(v, b, r, k)` of a resolvable design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DesignParams {
    pub v: usize,
    pub b: usize,
    pub r: usize,
    pub k: usize,
}

impl DesignParams {
    pub fn of(res: &Resolution) -> Self {
        DesignParams {
            v: res.v(),
            b: res.b(),
            r: res.r(),
            k: res.k(),
        }
    }

    pub fn b_r(&self) -> usize {
        self.b / self.r
    }
}

/// `K = C(r,z) · b_r^z`.
pub fn user_count(params: &DesignParams, z: usize) -> u64 {
    binomial(params.r as u64, z as u64) * (params.b_r() as u64).pow(z as u32)
}

/// Transmissions sent for distinct demands: `mu_z · C(b_r,2)^z · C(r,z)`,
/// with `mu_1 = k` when `z = 1`.
pub fn transmission_count(params: &DesignParams, z: usize, mu_z: Option<usize>) -> Result<u64> {
    let mu = match z {
        0 => return Err(Error::MuUndefinedForZ { z }),
        1 => params.k,
        _ => mu_z.ok_or(Error::MuUndefinedForZ { z })?,
    };
    let pairs = binomial(params.b_r() as u64, 2);
    Ok(mu as u64 * pairs.pow(z as u32) * binomial(params.r as u64, z as u64))
}

/// Worst-case rate in file units; each transmission carries `1/v` of a file.
pub fn rate(params: &DesignParams, z: usize, mu_z: Option<usize>) -> Result<Rational> {
    Ok(ratio(
        transmission_count(params, z, mu_z)? as i128,
        params.v as i128,
    ))
}

/// Users served per transmission.
pub fn coding_gain(z: usize) -> u64 {
    if z <= 1 {
        2
    } else {
        1 << z
    }
}

/// Recovers `v = k · (K / C(r,z))^{1/z}`; fails unless every step is exact.
pub fn subpacketization_identity(k: u64, users: u64, r: u64, z: u32) -> Result<u64> {
    let fail = || {
        Error::NonIntegerResult(format!(
            "k={k}, K={users}, r={r}, z={z} do not give an integer subpacketization"
        ))
    };
    if z == 0 || u64::from(z) > r {
        return Err(fail());
    }
    let classes = binomial(r, u64::from(z));
    if !users.is_multiple_of(classes) {
        return Err(fail());
    }
    let per = users / classes;
    let mut root = (per as f64).powf(1.0 / f64::from(z)).round() as u64;
    while root > 0 && root.checked_pow(z).is_none_or(|x| x > per) {
        root -= 1;
    }
    while (root + 1).checked_pow(z).is_some_and(|x| x <= per) {
        root += 1;
    }
    if root.checked_pow(z) != Some(per) {
        return Err(fail());
    }
    Ok(k * root)
}

/// `(R/K)_z / (R/K)_{z-1}` from the closed forms.
pub fn per_user_rate_ratio(
    params: &DesignParams,
    profile: &CrdProfile,
    z: usize,
) -> Result<Rational> {
    let (v, k) = (params.v as i128, params.k as i128);
    match z {
        2 => {
            let mu2 = profile.mu(2).ok_or(Error::MuUndefinedForZ { z })? as i128;
            Ok(ratio(mu2, 2 * k) * (ratio(v, k) - 1))
        }
        z if z >= 3 && profile.mu(z).is_some() && profile.mu(z - 1).is_some() => {
            Ok((int(1) - ratio(k, v)) / 2)
        }
        _ => Err(Error::MuUndefinedForZ { z }),
    }
}

/// Closed-form figures of merit of the scheme for one `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SchemeMetrics {
    pub z: usize,
    pub caches: u64,
    pub users: u64,
    pub subpacketization: u64,
    #[serde(with = "crate::rational::serde_exact")]
    pub cache_fraction: Rational,
    #[serde(with = "crate::rational::serde_exact")]
    pub user_fraction: Rational,
    #[serde(with = "crate::rational::serde_exact")]
    pub rate: Rational,
    #[serde(with = "crate::rational::serde_exact")]
    pub per_user_rate: Rational,
    pub gain: u64,
    pub transmissions: u64,
}

impl SchemeMetrics {
    pub fn new(params: &DesignParams, profile: &CrdProfile, z: usize) -> Result<Self> {
        if z == 0 || z > params.r || !profile.admits(z) {
            return Err(Error::MuUndefinedForZ { z });
        }
        let mu = mu_for(profile, z, params.k);
        let users = user_count(params, z);
        let rate = rate(params, z, mu)?;
        Ok(SchemeMetrics {
            z,
            caches: params.b as u64,
            users,
            subpacketization: params.v as u64,
            cache_fraction: ratio(params.k as i128, params.v as i128),
            user_fraction: user_memory_fraction(profile, z, params.k, params.v)?,
            per_user_rate: rate / users as i128,
            rate,
            gain: coding_gain(z),
            transmissions: transmission_count(params, z, mu)?,
        })
    }
}
