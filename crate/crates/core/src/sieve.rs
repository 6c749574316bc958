//! Segmented interval sieve.
//!
//! The kernel walks the base primes over one segment of `(x, x+y]` at a time
//! and records, for each integer, its distinct and total prime-factor counts,
//! least prime factor and powerful part. After every prime `p <= sqrt(hi)` has
//! been divided out, the remaining cofactor is `1` or a single prime, which is
//! counted once in both `omega` and `big_omega`.
//!
//! Segments are independent jobs; results are concatenated in segment order,
//! so output never depends on how rayon schedules them.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const MAX_TABLE_LIMIT: u64 = 1 << 40;
pub const DEFAULT_SEGMENT_WIDTH: usize = 1 << 20;
/// Width used when per-integer factor lists are requested.
pub const DEFAULT_FACTOR_SEGMENT_WIDTH: usize = 1 << 17;

const CACHE_MAGIC: &[u8; 8] = b"NUFPRIME";
pub const CACHE_DIR_ENV: &str = "NUFACTOR_CACHE_DIR";

/// All primes up to `limit`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn build(limit: u64) -> Result<Self> {
        if !(2..=MAX_TABLE_LIMIT).contains(&limit) {
            return Err(Error::Bounds(format!(
                "prime table limit {limit} outside [2, 2^40]"
            )));
        }
        Ok(PrimeTable {
            limit,
            primes: primes_up_to(limit),
        })
    }

    /// Smallest table that fully factors every integer in `(x, x+y]`.
    pub fn for_interval(x: u64, y: u64) -> Result<Self> {
        let hi = x
            .checked_add(y)
            .ok_or_else(|| Error::Bounds(format!("x + y overflows: {x} + {y}")))?;
        let r = hi.isqrt();
        let r = if r * r < hi { r + 1 } else { r };
        Self::build(r.max(2))
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Number of tabulated primes `<= x`.
    pub fn count_up_to(&self, x: u64) -> usize {
        self.primes.partition_point(|&p| p <= x)
    }

    /// Primes in the closed range `[lo, hi]`.
    pub fn range(&self, lo: u64, hi: u64) -> &[u64] {
        let a = self.primes.partition_point(|&p| p < lo);
        let b = self.primes.partition_point(|&p| p <= hi);
        &self.primes[a..b.max(a)]
    }

    pub fn is_prime(&self, n: u64) -> Option<bool> {
        (n <= self.limit).then(|| self.primes.binary_search(&n).is_ok())
    }

    /// Whether every `n <= bound` can be fully factored with this table.
    pub fn covers(&self, bound: u64) -> bool {
        (self.limit as u128) * (self.limit as u128) >= bound as u128
    }

    pub fn write_cache(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&self.limit.to_le_bytes())?;
        let mut prev = 0u64;
        for &p in &self.primes {
            w.write_all(&(p - prev).to_le_bytes())?;
            prev = p;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_cache(path: &Path) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Io(format!("{}: bad prime-table magic", path.display())));
        }
        let mut word = [0u8; 8];
        r.read_exact(&mut word)?;
        let limit = u64::from_le_bytes(word);
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() % 8 != 0 {
            return Err(Error::Io(format!("{}: truncated gap stream", path.display())));
        }
        let mut primes = Vec::with_capacity(bytes.len() / 8);
        let mut acc = 0u64;
        for chunk in bytes.chunks_exact(8) {
            let gap = u64::from_le_bytes(chunk.try_into().expect("8-byte chunk"));
            if gap == 0 {
                return Err(Error::Io(format!("{}: zero gap", path.display())));
            }
            acc = acc
                .checked_add(gap)
                .ok_or_else(|| Error::Io(format!("{}: gap overflow", path.display())))?;
            primes.push(acc);
        }
        if primes.first() != Some(&2) || primes.last().is_some_and(|&p| p > limit) {
            return Err(Error::Io(format!("{}: inconsistent prime table", path.display())));
        }
        Ok(PrimeTable { limit, primes })
    }

    /// Load `primes-<limit>.bin` from `dir`, building and storing it on a miss.
    pub fn load_or_build(limit: u64, dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = dir else {
            return Self::build(limit);
        };
        let path = cache_path(dir, limit);
        if path.exists() {
            match Self::read_cache(&path) {
                Ok(t) if t.limit == limit => return Ok(t),
                Ok(_) => log::warn!("{}: limit mismatch, rebuilding", path.display()),
                Err(e) => log::warn!("ignoring unreadable prime cache: {e}"),
            }
        }
        let table = Self::build(limit)?;
        if let Err(e) = std::fs::create_dir_all(dir).map_err(Error::from).and_then(|_| table.write_cache(&path)) {
            log::warn!("could not write prime cache {}: {e}", path.display());
        }
        Ok(table)
    }
}

pub fn cache_path(dir: &Path, limit: u64) -> PathBuf {
    dir.join(format!("primes-{limit}.bin"))
}

static SHARED_TABLES: Lazy<Mutex<HashMap<u64, Arc<PrimeTable>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Process-wide memoised table, backed by the file cache in
/// `$NUFACTOR_CACHE_DIR` when that variable is set.
pub fn shared_table(limit: u64) -> Result<Arc<PrimeTable>> {
    if let Some(t) = SHARED_TABLES.lock().expect("table cache poisoned").get(&limit) {
        return Ok(Arc::clone(t));
    }
    let dir = std::env::var_os(CACHE_DIR_ENV).map(PathBuf::from);
    let table = Arc::new(PrimeTable::load_or_build(limit, dir.as_deref())?);
    SHARED_TABLES
        .lock()
        .expect("table cache poisoned")
        .entry(limit)
        .or_insert_with(|| Arc::clone(&table));
    Ok(table)
}

/// Segmented odd-only sieve of Eratosthenes.
fn primes_up_to(limit: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(estimate_pi(limit));
    if limit < 2 {
        return out;
    }
    out.push(2);
    let root = limit.isqrt();
    let base = small_odd_primes(root);
    // index i in a segment stands for the odd number lo + 2i
    const SEG: u64 = 1 << 19;
    let mut lo = 3u64;
    let mut flags = vec![true; SEG as usize];
    while lo <= limit {
        let hi = (lo + 2 * SEG - 1).min(limit);
        let count = ((hi - lo) / 2 + 1) as usize;
        flags[..count].fill(true);
        for &p in &base {
            let sq = p * p;
            if sq > hi {
                break;
            }
            let mut m = if sq >= lo { sq } else { lo.div_ceil(p) * p };
            if m % 2 == 0 {
                m += p;
            }
            let mut i = ((m - lo) / 2) as usize;
            while i < count {
                flags[i] = false;
                i += p as usize;
            }
        }
        for (i, &f) in flags[..count].iter().enumerate() {
            if f {
                out.push(lo + 2 * i as u64);
            }
        }
        lo += 2 * SEG;
    }
    out
}

fn small_odd_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    if n < 3 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

fn estimate_pi(limit: u64) -> usize {
    if limit < 17 {
        return 8;
    }
    let x = limit as f64;
    (1.26 * x / x.ln()) as usize
}

/// Per-integer factor statistics for one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorRecord {
    pub n: u64,
    pub omega: u8,
    pub big_omega: u8,
    pub squarefree: bool,
    /// `P^-(n)`; by convention `1` for `n = 1`.
    pub least_prime_factor: u64,
    pub powerful_part: u64,
}

/// Records for every integer of the half-open interval `(lo, hi]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredInterval {
    lo: u64,
    hi: u64,
    omega: Vec<u8>,
    big_omega: Vec<u8>,
    lpf: Vec<u64>,
    powerful: Vec<u64>,
}

impl FactoredInterval {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    /// Record for `n`, which must lie in `(lo, hi]`.
    pub fn get(&self, n: u64) -> Option<FactorRecord> {
        if n <= self.lo || n > self.hi {
            return None;
        }
        Some(self.record_at((n - self.lo - 1) as usize))
    }

    pub fn record_at(&self, i: usize) -> FactorRecord {
        FactorRecord {
            n: self.lo + 1 + i as u64,
            omega: self.omega[i],
            big_omega: self.big_omega[i],
            squarefree: self.omega[i] == self.big_omega[i],
            least_prime_factor: self.lpf[i],
            powerful_part: self.powerful[i],
        }
    }

    pub fn records(&self) -> impl Iterator<Item = FactorRecord> + '_ {
        (0..self.len()).map(|i| self.record_at(i))
    }

    pub fn omegas(&self) -> &[u8] {
        &self.omega
    }

    pub fn big_omegas(&self) -> &[u8] {
        &self.big_omega
    }

    pub fn least_prime_factors(&self) -> &[u64] {
        &self.lpf
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SieveOptions {
    pub segment_width: usize,
    /// Also record the full prime factorisation of every integer.
    pub with_factors: bool,
}

impl Default for SieveOptions {
    fn default() -> Self {
        SieveOptions {
            segment_width: DEFAULT_SEGMENT_WIDTH,
            with_factors: false,
        }
    }
}

impl SieveOptions {
    pub fn with_factors() -> Self {
        SieveOptions {
            segment_width: DEFAULT_FACTOR_SEGMENT_WIDTH,
            with_factors: true,
        }
    }
}

/// Sieve output for one contiguous block `start ..= start + len - 1`.
#[derive(Debug, Clone)]
pub struct FactoredSegment {
    start: u64,
    len: usize,
    pub omega: Vec<u8>,
    pub big_omega: Vec<u8>,
    pub lpf: Vec<u64>,
    pub powerful: Vec<u64>,
    slots: usize,
    fac_primes: Vec<u32>,
    fac_exps: Vec<u8>,
    /// Number of sieving primes recorded per integer (excludes the cofactor).
    fac_count: Vec<u8>,
    cofactor: Vec<u64>,
}

impl FactoredSegment {
    /// First integer of the segment.
    pub fn start(&self) -> u64 {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn n(&self, i: usize) -> u64 {
        self.start + i as u64
    }

    pub fn has_factors(&self) -> bool {
        self.slots > 0
    }

    /// `(p, e)` pairs of `n(i)` in ascending `p`.
    ///
    /// # Panics
    /// If the segment was sieved without `with_factors`.
    pub fn factors(&self, i: usize) -> impl Iterator<Item = (u64, u32)> + '_ {
        assert!(self.has_factors(), "segment sieved without factor lists");
        let base = i * self.slots;
        let k = self.fac_count[i] as usize;
        let cof = self.cofactor[i];
        (0..k)
            .map(move |j| (self.fac_primes[base + j] as u64, self.fac_exps[base + j] as u32))
            .chain((cof > 1).then_some((cof, 1)))
    }

    pub fn record(&self, i: usize) -> FactorRecord {
        FactorRecord {
            n: self.n(i),
            omega: self.omega[i],
            big_omega: self.big_omega[i],
            squarefree: self.omega[i] == self.big_omega[i],
            least_prime_factor: self.lpf[i],
            powerful_part: self.powerful[i],
        }
    }
}

/// Largest `k` such that the product of the first `k` primes is `<= bound`.
fn max_distinct_factors(bound: u64) -> usize {
    const SMALL: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    let mut prod: u128 = 1;
    let mut k = 0;
    for p in SMALL {
        prod *= p as u128;
        if prod > bound as u128 {
            break;
        }
        k += 1;
    }
    k.max(1)
}

fn sieve_block(start: u64, len: usize, primes: &[u64], with_factors: bool) -> FactoredSegment {
    let end = start + len as u64 - 1;
    let slots = if with_factors { max_distinct_factors(end) } else { 0 };
    let mut seg = FactoredSegment {
        start,
        len,
        omega: vec![0; len],
        big_omega: vec![0; len],
        lpf: vec![0; len],
        powerful: vec![1; len],
        slots,
        fac_primes: vec![0; len * slots],
        fac_exps: vec![0; len * slots],
        fac_count: if with_factors { vec![0; len] } else { Vec::new() },
        cofactor: if with_factors { vec![1; len] } else { Vec::new() },
    };
    let mut prod = vec![1u64; len];

    for &p in primes {
        if (p as u128) * (p as u128) > end as u128 {
            break;
        }
        let first = start.div_ceil(p) * p;
        let mut i = (first - start) as usize;
        while i < len {
            seg.omega[i] += 1;
            seg.big_omega[i] += 1;
            prod[i] *= p;
            if seg.lpf[i] == 0 {
                seg.lpf[i] = p;
            }
            if with_factors {
                let slot = i * slots + seg.fac_count[i] as usize;
                seg.fac_primes[slot] = p as u32;
                seg.fac_exps[slot] = 1;
                seg.fac_count[i] += 1;
            }
            i += p as usize;
        }
        let mut pk = p as u128 * p as u128;
        let mut k = 2;
        while pk <= end as u128 {
            let q = pk as u64;
            let first = start.div_ceil(q) * q;
            let mut i = (first - start) as usize;
            while i < len {
                seg.big_omega[i] += 1;
                prod[i] *= p;
                seg.powerful[i] *= if k == 2 { p * p } else { p };
                if with_factors {
                    seg.fac_exps[i * slots + seg.fac_count[i] as usize - 1] += 1;
                }
                i = match i.checked_add(q as usize) {
                    Some(v) => v,
                    None => break,
                };
            }
            pk *= p as u128;
            k += 1;
        }
    }

    for i in 0..len {
        let n = start + i as u64;
        if n == 1 {
            seg.lpf[i] = 1;
            continue;
        }
        let cof = n / prod[i];
        if cof > 1 {
            seg.omega[i] += 1;
            seg.big_omega[i] += 1;
            if seg.lpf[i] == 0 {
                seg.lpf[i] = cof;
            }
            if with_factors {
                seg.cofactor[i] = cof;
            }
        }
    }
    seg
}

fn check_interval(x: u64, y: u64, table: &PrimeTable) -> Result<u64> {
    if y == 0 {
        return Err(Error::Precondition("interval length y must be >= 1".into()));
    }
    let hi = x
        .checked_add(y)
        .ok_or_else(|| Error::Bounds(format!("x + y overflows 64 bits: {x} + {y}")))?;
    if !table.covers(hi) {
        return Err(Error::Precondition(format!(
            "prime table limit {} too small to factor up to {hi}",
            table.limit()
        )));
    }
    Ok(hi)
}

/// Sieve `(x, x+y]` segment by segment and map every segment through `f`.
///
/// Results come back in ascending segment order.
pub fn map_segments<T, F>(
    x: u64,
    y: u64,
    table: &PrimeTable,
    opts: SieveOptions,
    f: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&FactoredSegment) -> T + Sync + Send,
{
    check_interval(x, y, table)?;
    let width = opts.segment_width.max(1) as u64;
    let nseg = y.div_ceil(width);
    let primes = table.primes();
    Ok((0..nseg)
        .into_par_iter()
        .map(|s| {
            let off = s * width;
            let len = width.min(y - off) as usize;
            let seg = sieve_block(x + 1 + off, len, primes, opts.with_factors);
            f(&seg)
        })
        .collect())
}

/// Materialised sieve of `(x, x+y]`.
pub fn sieve_interval(x: u64, y: u64, table: &PrimeTable) -> Result<FactoredInterval> {
    sieve_interval_with(x, y, table, SieveOptions::default())
}

pub fn sieve_interval_with(
    x: u64,
    y: u64,
    table: &PrimeTable,
    opts: SieveOptions,
) -> Result<FactoredInterval> {
    let opts = SieveOptions {
        with_factors: false,
        ..opts
    };
    let parts = map_segments(x, y, table, opts, |seg| {
        (
            seg.omega.clone(),
            seg.big_omega.clone(),
            seg.lpf.clone(),
            seg.powerful.clone(),
        )
    })?;
    let cap = y as usize;
    let mut out = FactoredInterval {
        lo: x,
        hi: x + y,
        omega: Vec::with_capacity(cap),
        big_omega: Vec::with_capacity(cap),
        lpf: Vec::with_capacity(cap),
        powerful: Vec::with_capacity(cap),
    };
    for (o, b, l, p) in parts {
        out.omega.extend_from_slice(&o);
        out.big_omega.extend_from_slice(&b);
        out.lpf.extend_from_slice(&l);
        out.powerful.extend_from_slice(&p);
    }
    Ok(out)
}

/// Trial-division factorisation of a single integer using a base table.
pub fn factorize(mut n: u64, table: &PrimeTable) -> Result<Vec<(u64, u32)>> {
    if n == 0 {
        return Err(Error::Bounds("cannot factor 0".into()));
    }
    if !table.covers(n) {
        return Err(Error::Precondition(format!(
            "prime table limit {} too small to factor {n}",
            table.limit()
        )));
    }
    let mut out = Vec::new();
    for &p in table.primes() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    if n > 1 {
        out.push((n, 1));
    }
    Ok(out)
}
