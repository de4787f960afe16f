use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report.
///
/// Point, block, class and user numbers carried by variants are 1-based so
/// that messages line up with the external file formats.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("a design needs at least one point")]
    NoPoints,
    #[error("a design needs at least one block")]
    NoBlocks,
    #[error("block {block} is empty")]
    EmptyBlock { block: usize },
    #[error("block {block} contains point {point}, outside 1..={v}")]
    PointOutOfRange {
        block: usize,
        point: usize,
        v: usize,
    },
    #[error("block {block} lists point {point} more than once")]
    DuplicatePoint { block: usize, point: usize },
    #[error("block {block} has {found} points, expected {expected}")]
    NonUniformBlockSize {
        block: usize,
        expected: usize,
        found: usize,
    },
    #[error("classes do not partition the blocks: {0}")]
    NotAPartitionOfBlocks(String),
    #[error("class {class} is not a partition of the point set: {detail}")]
    ClassNotPartitionOfPoints { class: usize, detail: String },
    #[error("cross intersection index {i} outside 2..={r}")]
    IndexOutOfRange { i: usize, r: usize },
    #[error("{what} of {requested} exceeds the configured cap of {limit}")]
    SizeCapExceeded {
        what: &'static str,
        requested: u64,
        limit: u64,
    },
    #[error("{0} is not a prime power")]
    NotAPrimePower(u64),
    #[error("no built-in irreducible polynomial for GF({p}^{e})")]
    UnsupportedDegree { p: u64, e: u32 },
    #[error("no Sylvester or Paley Hadamard matrix of order {order} (m = {m})")]
    NoConstructionAvailable { m: usize, order: usize },
    #[error("unknown catalog example {0}, expected 1..=9")]
    UnknownExample(usize),
    #[error("invalid construction spec {spec:?}: {reason}")]
    InvalidSpec { spec: String, reason: String },
    #[error("cross intersection number for z = {z} is undefined for this design")]
    MuUndefinedForZ { z: usize },
    #[error("demand vector has length {found}, expected one entry per user ({expected})")]
    BadDemandLength { expected: usize, found: usize },
    #[error("user {user} demands file {demand}, outside 1..={files}")]
    DemandOutOfRange {
        user: usize,
        demand: usize,
        files: usize,
    },
    #[error("{files} files cannot give distinct demands to {users} users")]
    NotEnoughFiles { files: usize, users: usize },
    #[error(
        "delivery group over classes {classes:?}: user {user} has |f_m| = {found}, expected mu = {expected}"
    )]
    InternalMuMismatch {
        classes: Vec<usize>,
        user: usize,
        expected: usize,
        found: usize,
    },
    #[error("{0}")]
    NonIntegerResult(String),
    #[error("K*M/N = {0} is not a positive integer no larger than K")]
    NonIntegerCacheRedundancy(String),
    #[error("SPE subpacketization K(K-2z+2)/4 is not a positive integer for K = {users}, z = {z}")]
    NonIntegerSubpacketization { users: u64, z: usize },
    #[error("transmission {transmission}: user {user} lacks subfile {subfile} of file {file}")]
    MissingSideInformation {
        transmission: usize,
        user: usize,
        file: usize,
        subfile: usize,
    },
    #[error("user {user} never obtained subfiles {missing:?} of file {file}")]
    IncompleteRecovery {
        user: usize,
        file: usize,
        missing: Vec<usize>,
    },
    #[error("transmission {transmission}: user {user} receives {received:?} but the others jointly hold {common:?}")]
    SideInformationMismatch {
        transmission: usize,
        user: usize,
        received: Vec<usize>,
        common: Vec<usize>,
    },
    #[error("user {user} did not participate in the delivery")]
    UserNotScheduled { user: usize },
    #[error("invalid size caps {0:?}")]
    InvalidCaps(String),
}
