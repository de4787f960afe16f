//! Byte-exact execution of placement and delivery.
//!
//! Files are split into `v` equal subfiles (zero-padded to a multiple of
//! `v`), caches are filled from the placement, the server XORs the scheduled
//! subfiles into payloads, and every user decodes from its own caches plus
//! the broadcast. The run doubles as a check of the delivery argument: each
//! user must be able to cancel every foreign term from its caches, and the
//! subfiles it receives in a delivery group must be exactly those held by
//! all the other users of the group.

use fixedbitset::FixedBitSet;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::design::Resolution;
use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};
use crate::scheme::{build_delivery_schedule, DeliverySchedule, Placement, SchemeInstance};

/// `N` pseudo-random files of `L` bytes, each padded to `v` equal subfiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileStore {
    files: Vec<Vec<u8>>,
    len: usize,
    subfile_len: usize,
    seed: u64,
}

pub fn make_file_store(files: usize, len: usize, seed: u64, v: usize) -> FileStore {
    let subfile_len = len.div_ceil(v);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let files = (0..files)
        .map(|_| {
            let mut data = vec![0u8; subfile_len * v];
            rng.fill_bytes(&mut data[..len]);
            data
        })
        .collect();
    FileStore {
        files,
        len,
        subfile_len,
        seed,
    }
}

impl FileStore {
    pub fn file_count(&self) -> usize {
        self.files.len()
    }

    /// True length before padding.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn padded_len(&self) -> usize {
        self.files.first().map_or(0, Vec::len)
    }

    pub fn subfile_len(&self) -> usize {
        self.subfile_len
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Unpadded contents of `file`.
    pub fn file(&self, file: usize) -> &[u8] {
        &self.files[file][..self.len]
    }

    pub fn subfile(&self, file: usize, subfile: usize) -> &[u8] {
        let start = subfile * self.subfile_len;
        &self.files[file][start..start + self.subfile_len]
    }
}

/// Contents of one helper cache: the placed subfiles of every file.
#[derive(Debug, Clone)]
pub struct Cache {
    subfiles: Vec<usize>,
    subfile_len: usize,
    data: Vec<u8>,
}

impl Cache {
    pub fn get(&self, file: usize, subfile: usize) -> Option<&[u8]> {
        let slot = self.subfiles.binary_search(&subfile).ok()?;
        let start = (file * self.subfiles.len() + slot) * self.subfile_len;
        self.data.get(start..start + self.subfile_len)
    }
}

pub fn fill_caches(placement: &Placement, store: &FileStore) -> Vec<Cache> {
    (0..placement.caches())
        .map(|j| {
            let subfiles = placement.subfiles(j).to_vec();
            let mut data =
                Vec::with_capacity(store.file_count() * subfiles.len() * store.subfile_len());
            for file in 0..store.file_count() {
                for &s in &subfiles {
                    data.extend_from_slice(store.subfile(file, s));
                }
            }
            Cache {
                subfiles,
                subfile_len: store.subfile_len(),
                data,
            }
        })
        .collect()
}

/// Server side: payload `t` is the XOR of the subfiles named by transmission `t`.
pub fn encode(schedule: &DeliverySchedule, store: &FileStore) -> Vec<Vec<u8>> {
    schedule
        .transmissions
        .iter()
        .map(|t| {
            let mut payload = vec![0u8; store.subfile_len()];
            for term in &t.terms {
                xor_into(
                    &mut payload,
                    store.subfile(schedule.demands[term.user], term.subfile),
                );
            }
            payload
        })
        .collect()
}

fn xor_into(acc: &mut [u8], other: &[u8]) {
    acc.iter_mut().zip(other).for_each(|(a, b)| *a ^= b);
}

/// What one user reconstructed and where each subfile came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    pub bytes: Vec<u8>,
    pub from_cache: usize,
    pub from_air: usize,
}

/// Decodes user `user` (0-based), scanning the schedule for its transmissions.
pub fn decode_user(
    user: usize,
    payloads: &[Vec<u8>],
    schedule: &DeliverySchedule,
    scheme: &SchemeInstance,
    caches: &[Cache],
    file_len: usize,
) -> Result<Decoded> {
    let involved: Vec<usize> = schedule
        .transmissions
        .iter()
        .enumerate()
        .filter(|(_, t)| t.terms.iter().any(|term| term.user == user))
        .map(|(i, _)| i)
        .collect();
    decode_with(
        user, &involved, payloads, schedule, scheme, caches, file_len,
    )
}

fn decode_with(
    user: usize,
    involved: &[usize],
    payloads: &[Vec<u8>],
    schedule: &DeliverySchedule,
    scheme: &SchemeInstance,
    caches: &[Cache],
    file_len: usize,
) -> Result<Decoded> {
    let v = scheme.resolution().v();
    let own_caches = &scheme.users()[user].caches;
    let read = |file: usize, subfile: usize| {
        own_caches
            .iter()
            .find_map(|&c| caches[c].get(file, subfile))
    };
    let demand = schedule.demands[user];
    let mut pieces: Vec<Option<Vec<u8>>> = vec![None; v];
    let mut from_air = 0;
    for &t in involved {
        let transmission = &schedule.transmissions[t];
        let mut buf = payloads[t].clone();
        let mut wanted = None;
        for term in &transmission.terms {
            if term.user == user {
                wanted = Some(term.subfile);
                continue;
            }
            let file = schedule.demands[term.user];
            let side = read(file, term.subfile).ok_or(Error::MissingSideInformation {
                transmission: t + 1,
                user: user + 1,
                file: file + 1,
                subfile: term.subfile + 1,
            })?;
            xor_into(&mut buf, side);
        }
        let subfile = wanted.ok_or(Error::UserNotScheduled { user: user + 1 })?;
        pieces[subfile] = Some(buf);
        from_air += 1;
    }
    let mut from_cache = 0;
    for subfile in scheme.accessible(user).ones() {
        let cached = read(demand, subfile).expect("accessible subfile is cached");
        pieces[subfile] = Some(cached.to_vec());
        from_cache += 1;
    }
    let missing: Vec<usize> = pieces
        .iter()
        .enumerate()
        .filter(|(_, p)| p.is_none())
        .map(|(s, _)| s + 1)
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteRecovery {
            user: user + 1,
            file: demand + 1,
            missing,
        });
    }
    let mut bytes: Vec<u8> = pieces.into_iter().flatten().flatten().collect();
    bytes.truncate(file_len);
    Ok(Decoded {
        bytes,
        from_cache,
        from_air,
    })
}

/// Checks, for every delivery group `X` and every user `m` in it, that the
/// subfiles sent to `m` are exactly `∩_{t ∈ X \ m} Y_t`. Returns the number
/// of groups checked.
pub fn check_side_information(
    scheme: &SchemeInstance,
    schedule: &DeliverySchedule,
) -> Result<usize> {
    let v = scheme.resolution().v();
    let mut offset = 0;
    let mut groups = 0;
    for group in schedule.groups() {
        let users: Vec<usize> = group[0].terms.iter().map(|t| t.user).collect();
        for (pos, &m) in users.iter().enumerate() {
            let mut received = FixedBitSet::with_capacity(v);
            for t in group {
                received.insert(t.terms[pos].subfile);
            }
            let mut common = FixedBitSet::with_capacity(v);
            common.insert_range(..);
            for &other in users.iter().filter(|&&u| u != m) {
                common.intersect_with(scheme.accessible(other));
            }
            if received != common || received.count_ones(..) != group.len() {
                return Err(Error::SideInformationMismatch {
                    transmission: offset + 1,
                    user: m + 1,
                    received: received.ones().map(|s| s + 1).collect(),
                    common: common.ones().map(|s| s + 1).collect(),
                });
            }
        }
        offset += group.len();
        groups += 1;
    }
    Ok(groups)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserOutcome {
    pub user: usize,
    pub caches: Vec<usize>,
    pub demand: usize,
    pub recovered: bool,
    pub bytes_match: bool,
    pub from_cache: usize,
    pub from_air: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimulationReport {
    pub z: usize,
    pub files: usize,
    pub file_len: usize,
    pub subfile_len: usize,
    pub seed: u64,
    pub users: Vec<UserOutcome>,
    pub transmissions: usize,
    pub groups_checked: usize,
    pub distinct_demands: bool,
    #[serde(with = "crate::rational::serde_exact")]
    pub measured_rate: Rational,
    #[serde(with = "crate::rational::serde_exact")]
    pub theoretical_rate: Rational,
}

impl SimulationReport {
    pub fn all_recovered(&self) -> bool {
        self.users.iter().all(|u| u.recovered && u.bytes_match)
    }
}

/// Worst-case demands `d_i = i`, which need at least as many files as users.
pub fn distinct_demands(users: usize, files: usize) -> Result<Vec<usize>> {
    if files < users {
        return Err(Error::NotEnoughFiles { files, users });
    }
    Ok((1..=users).collect())
}

/// Builds the scheme for `res` and runs it end to end.
pub fn verify_all(
    res: &Resolution,
    z: usize,
    files: usize,
    len: usize,
    seed: u64,
    demands: Option<&[usize]>,
) -> Result<SimulationReport> {
    let scheme = SchemeInstance::new(res.clone(), z, files)?;
    simulate(&scheme, len, seed, demands).map(|run| run.report)
}

/// Everything a run produced, for callers that want the payloads too.
#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub schedule: DeliverySchedule,
    pub payloads: Vec<Vec<u8>>,
    pub report: SimulationReport,
}

pub fn simulate(
    scheme: &SchemeInstance,
    len: usize,
    seed: u64,
    demands: Option<&[usize]>,
) -> Result<SimulationRun> {
    let users = scheme.user_count();
    let demands = match demands {
        Some(d) => d.to_vec(),
        None => distinct_demands(users, scheme.files())?,
    };
    let schedule = build_delivery_schedule(scheme, &demands)?;
    let groups_checked = check_side_information(scheme, &schedule)?;
    let v = scheme.resolution().v();
    let store = make_file_store(scheme.files(), len, seed, v);
    let caches = fill_caches(&scheme.placement(), &store);
    let payloads = encode(&schedule, &store);

    let mut involved = vec![Vec::new(); users];
    for (i, t) in schedule.transmissions.iter().enumerate() {
        for term in &t.terms {
            involved[term.user].push(i);
        }
    }
    let mut outcomes = Vec::with_capacity(users);
    for (user, tx) in involved.iter().enumerate() {
        let decoded = decode_with(user, tx, &payloads, &schedule, scheme, &caches, len)?;
        let demand = schedule.demands[user];
        outcomes.push(UserOutcome {
            user: user + 1,
            caches: scheme.users()[user].caches.iter().map(|c| c + 1).collect(),
            demand: demand + 1,
            recovered: true,
            bytes_match: decoded.bytes == store.file(demand),
            from_cache: decoded.from_cache,
            from_air: decoded.from_air,
        });
    }
    let sent_bytes: usize = payloads.iter().map(Vec::len).sum();
    let measured_rate = if store.padded_len() > 0 {
        ratio(sent_bytes as i128, store.padded_len() as i128)
    } else {
        ratio(payloads.len() as i128, v as i128)
    };
    let report = SimulationReport {
        z: scheme.z(),
        files: scheme.files(),
        file_len: len,
        subfile_len: store.subfile_len(),
        seed,
        users: outcomes,
        transmissions: payloads.len(),
        groups_checked,
        distinct_demands: schedule.is_distinct(),
        measured_rate,
        theoretical_rate: scheme.metrics()?.rate,
    };
    Ok(SimulationRun {
        schedule,
        payloads,
        report,
    })
}

/// One line per payload: its provenance, then the bytes in hex.
pub fn payload_dump(schedule: &DeliverySchedule, payloads: &[Vec<u8>]) -> String {
    let mut out = String::new();
    for (t, payload) in schedule.transmissions.iter().zip(payloads) {
        let classes: Vec<String> = t.classes.iter().map(|c| (c + 1).to_string()).collect();
        let pairs: Vec<String> = t
            .pairs
            .iter()
            .map(|(a, b)| format!("({},{})", a + 1, b + 1))
            .collect();
        out.push_str(&format!(
            "classes=[{}] pairs=[{}] s={} {}\n",
            classes.join(","),
            pairs.join(","),
            t.s + 1,
            hex::encode(payload)
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::catalog_example;
    use crate::rational::int;

    #[test]
    fn store_is_deterministic() {
        assert_eq!(make_file_store(2, 1, 0, 4), make_file_store(2, 1, 0, 4));
        assert_ne!(make_file_store(2, 64, 0, 4), make_file_store(2, 64, 1, 4));
    }

    #[test]
    fn padding() {
        let store = make_file_store(1, 10, 3, 4);
        assert_eq!(store.padded_len(), 12);
        assert_eq!(store.subfile_len(), 3);
        assert_eq!(store.file(0).len(), 10);
        assert_eq!(store.subfile(0, 3)[1..], [0, 0]);
    }

    #[test]
    fn example_three_fixture() {
        let store = make_file_store(9, 900, 7, 9);
        assert_eq!(store.file_count(), 9);
        assert_eq!(store.subfile_len(), 100);
    }

    #[test]
    fn xor_cancels() {
        let store = make_file_store(3, 30, 11, 3);
        let mut payload = vec![0u8; store.subfile_len()];
        for f in 0..3 {
            xor_into(&mut payload, store.subfile(f, 1));
        }
        xor_into(&mut payload, store.subfile(0, 1));
        xor_into(&mut payload, store.subfile(2, 1));
        assert_eq!(payload, store.subfile(1, 1));
    }

    #[test]
    fn example_three_end_to_end() {
        let res = catalog_example(3).unwrap();
        let report = verify_all(&res, 2, 9, 900, 7, None).unwrap();
        assert_eq!(report.transmissions, 9);
        assert_eq!(report.users.len(), 9);
        assert!(report.all_recovered());
        assert_eq!(report.measured_rate, int(1));
        assert_eq!(report.theoretical_rate, int(1));
    }

    #[test]
    fn example_four_air_and_cache_counts() {
        let res = catalog_example(4).unwrap();
        let report = verify_all(&res, 3, 8, 64, 1, None).unwrap();
        for u in &report.users {
            assert_eq!((u.from_cache, u.from_air), (7, 1));
        }
    }

    #[test]
    fn example_nine_air_and_cache_counts() {
        let res = catalog_example(9).unwrap();
        let report = verify_all(&res, 2, 24, 160, 2, None).unwrap();
        assert!(report.all_recovered());
        for u in &report.users {
            assert_eq!((u.from_cache, u.from_air), (12, 4));
        }
    }

    #[test]
    fn repeated_demands_still_decode() {
        let res = catalog_example(4).unwrap();
        let report = verify_all(&res, 2, 1, 50, 5, Some(&[1; 12])).unwrap();
        assert!(report.all_recovered());
        assert!(!report.distinct_demands);
    }

    #[test]
    fn too_few_files_for_distinct_demands() {
        let res = catalog_example(3).unwrap();
        assert_eq!(
            verify_all(&res, 2, 5, 9, 0, None).unwrap_err(),
            Error::NotEnoughFiles { files: 5, users: 9 }
        );
    }

    #[test]
    fn tampered_schedule_is_caught() {
        let res = catalog_example(3).unwrap();
        let scheme = SchemeInstance::new(res, 2, 9).unwrap();
        let mut schedule = build_delivery_schedule(&scheme, &(1..=9).collect::<Vec<_>>()).unwrap();
        // user (1,4) already holds subfile 1; sending it breaks the group invariant
        schedule.transmissions[0].terms[1].subfile = 0;
        assert!(matches!(
            check_side_information(&scheme, &schedule),
            Err(Error::SideInformationMismatch { .. })
        ));
        // a term no other user can cancel: subfile 9 is outside user (1,4)'s caches
        let mut schedule = build_delivery_schedule(&scheme, &(1..=9).collect::<Vec<_>>()).unwrap();
        schedule.transmissions[0].terms[1].subfile = 8;
        let store = make_file_store(9, 9, 0, 9);
        let caches = fill_caches(&scheme.placement(), &store);
        let payloads = encode(&schedule, &store);
        assert!(matches!(
            decode_user(0, &payloads, &schedule, &scheme, &caches, 9),
            Err(Error::MissingSideInformation { user: 1, .. })
        ));
    }

    #[test]
    fn dropped_transmission_is_incomplete() {
        let res = catalog_example(3).unwrap();
        let scheme = SchemeInstance::new(res, 2, 9).unwrap();
        let mut schedule = build_delivery_schedule(&scheme, &(1..=9).collect::<Vec<_>>()).unwrap();
        schedule.transmissions.remove(0);
        let store = make_file_store(9, 18, 0, 9);
        let caches = fill_caches(&scheme.placement(), &store);
        let payloads = encode(&schedule, &store);
        assert!(matches!(
            decode_user(0, &payloads, &schedule, &scheme, &caches, 18),
            Err(Error::IncompleteRecovery { user: 1, .. })
        ));
    }

    #[test]
    fn dump_has_one_line_per_payload() {
        let res = catalog_example(3).unwrap();
        let scheme = SchemeInstance::new(res, 2, 9).unwrap();
        let run = simulate(&scheme, 18, 0, None).unwrap();
        let dump = payload_dump(&run.schedule, &run.payloads);
        assert_eq!(dump.lines().count(), 9);
        assert!(dump.starts_with("classes=[1,2] pairs=[(1,2),(4,5)] s=1 "));
        assert_eq!(
            dump.lines()
                .next()
                .unwrap()
                .rsplit(' ')
                .next()
                .unwrap()
                .len(),
            4
        );
    }
}
