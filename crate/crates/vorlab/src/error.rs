use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("p = {0} is not supported (odd primes only)")]
    UnsupportedPrime(u64),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("value is not in 1 + pZ_p")]
    NotPrincipalUnit,
    #[error("unit is not a square mod {0}")]
    NotASquare(u64),
    #[error("zero has no unit part")]
    Zero,
    #[error("precision {needed} exceeds working precision {have}")]
    Precision { needed: u32, have: u32 },
    #[error("modulus {p}^{n} does not fit the 128-bit residue type")]
    ModulusTooLarge { p: u64, n: u32 },
    #[error("character mod {l}^{a} is imprimitive (conductor exponent {conductor})")]
    Imprimitive { l: u64, a: u32, conductor: u32 },
    #[error("trivial character has no alpha")]
    TrivialCharacter,
    #[error("characters live on different primes ({0} vs {1})")]
    PrimeMismatch(u64, u64),
    #[error("kappa = {kappa} outside 1..={max}")]
    KappaOutOfRange { kappa: u32, max: u32 },
    #[error("missing epsilon entry for twist {0}")]
    MissingEpsilon(String),
    #[error("c-table entry not addressable: {0}")]
    NotAddressable(String),
    #[error("index {n} out of range (table holds up to {max})")]
    OutOfRange { n: u64, max: u64 },
    #[error("invalid eta quotient: {0}")]
    InvalidEta(String),
    #[error("coefficient overflow at n = {0}")]
    Overflow(usize),
    #[error("level {level} is not coprime to {p}")]
    LevelNotCoprime { level: u64, p: u64 },
    #[error("Laurent ratio not expandable: {0}")]
    NotExpandable(String),
    #[error("Bessel evaluation not accurate enough at nu = {nu}, x = {x}")]
    BesselAccuracy { nu: f64, x: f64 },
    #[error("Farey dissection failed: {0}")]
    Dissection(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}
