//! The three p-set families and the modular arithmetic they need.

use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// The three p-set constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum PSetFamily {
    /// p points ({n/p}, {n²/p}, …, {n^d/p}).
    P,
    /// p² points with denominator p².
    Q,
    /// Multiset union of the p Korobov lattices mod p; p² points.
    R,
}

impl PSetFamily {
    pub const ALL: [PSetFamily; 3] = [PSetFamily::P, PSetFamily::Q, PSetFamily::R];

    pub fn n_points(self, p: u64) -> u64 {
        match self {
            PSetFamily::P => p,
            PSetFamily::Q | PSetFamily::R => p * p,
        }
    }
}

impl std::fmt::Display for PSetFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PSetFamily::P => write!(f, "P"),
            PSetFamily::Q => write!(f, "Q"),
            PSetFamily::R => write!(f, "R"),
        }
    }
}

impl std::str::FromStr for PSetFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "P" | "p" => Ok(PSetFamily::P),
            "Q" | "q" => Ok(PSetFamily::Q),
            "R" | "r" => Ok(PSetFamily::R),
            other => Err(format!("unknown family `{other}` (expected P, Q or R)")),
        }
    }
}

/// base^exp mod modulus by square-and-multiply with wide intermediates.
pub fn mod_pow(base: u64, exp: u64, modulus: u64) -> u64 {
    debug_assert!(modulus >= 1);
    if modulus == 1 {
        return 0;
    }
    let m = modulus as u128;
    let mut result: u128 = 1;
    let mut b = base as u128 % m;
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = result * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    result as u64
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    (a as u128 * b as u128 % m as u128) as u64
}

/// Deterministic Miller-Rabin, correct for every n < 2^64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    // This witness set is known to have no strong pseudoprimes below 2^64.
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Smallest prime >= n. Bertrand's postulate bounds the search: for n > 1
/// there is a prime in [n, 2n).
pub fn next_prime(n: u64) -> Result<u64> {
    if n <= 2 {
        return Ok(2);
    }
    let mut candidate = if n % 2 == 0 { n + 1 } else { n };
    loop {
        if is_prime(candidate) {
            return Ok(candidate);
        }
        candidate = candidate.checked_add(2).ok_or(Error::TooLarge {
            what: "next_prime",
            detail: format!("no prime >= {n} fits in u64"),
        })?;
    }
}

fn require_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// P_p: point n has coordinates ({n/p}, {n²/p}, …, {n^d/p}), n = 0..p-1.
pub fn gen_korobov_p(p: u64, dim: usize) -> Result<PointSet> {
    require_prime(p)?;
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let mut numerators = Vec::with_capacity(p as usize * dim);
    for n in 0..p {
        let mut power = 1u64;
        for _ in 0..dim {
            power = mul_mod(power, n, p);
            numerators.push(power);
        }
    }
    Ok(PointSet::from_reduced(dim, p, numerators))
}

/// Q_{p²}: same monomial construction with denominator p², n = 0..p²-1.
pub fn gen_korobov_q(p: u64, dim: usize) -> Result<PointSet> {
    require_prime(p)?;
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let p2 = p.checked_mul(p).filter(|&m| m <= 1 << 53).ok_or_else(|| {
        Error::TooLarge {
            what: "p^2",
            detail: format!("p = {p}"),
        }
    })?;
    let mut numerators = Vec::with_capacity(p2 as usize * dim);
    for n in 0..p2 {
        let mut power = 1u64;
        for _ in 0..dim {
            power = mul_mod(power, n, p2);
            numerators.push(power);
        }
    }
    Ok(PointSet::from_reduced(dim, p2, numerators))
}

/// R_{p²}: point (a,k) has coordinates ({k/p}, {ak/p}, …, {a^{d-1}k/p}),
/// row-major with a outer. Duplicates are retained; restricted to a fixed
/// a this is the rank-1 lattice with generator (1, a, …, a^{d-1}).
pub fn gen_korobov_r(p: u64, dim: usize) -> Result<PointSet> {
    require_prime(p)?;
    if dim == 0 {
        return Err(Error::ZeroDimension);
    }
    let n_total = (p as usize) * (p as usize) * dim;
    let mut numerators = Vec::with_capacity(n_total);
    for a in 0..p {
        for k in 0..p {
            let mut gen = 1u64; // a^{j-1}
            for _ in 0..dim {
                numerators.push(mul_mod(gen, k, p));
                gen = mul_mod(gen, a, p);
            }
        }
    }
    Ok(PointSet::from_reduced(dim, p, numerators))
}

/// Dispatch by family tag.
pub fn generate(family: PSetFamily, p: u64, dim: usize) -> Result<PointSet> {
    match family {
        PSetFamily::P => gen_korobov_p(p, dim),
        PSetFamily::Q => gen_korobov_q(p, dim),
        PSetFamily::R => gen_korobov_r(p, dim),
    }
}

/// Primes up to and including `max`, in order.
pub fn primes_up_to(max: u64) -> Vec<u64> {
    (2..=max).filter(|&n| is_prime(n)).collect()
}
