//! Word-size integer helpers: primality, factorization, Möbius function.

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
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

/// Prime factorization by trial division, as ascending `(prime, exponent)` pairs.
///
/// Only used on small arguments (extension degrees, `q - 1` for table-backed
/// fields, prime-power field strings).
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            let mut k = 0;
            while n.is_multiple_of(d) {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=n).take_while(|d| d * d <= n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut upper: Vec<u64> = out.iter().rev().map(|d| n / d).filter(|&c| c * c != n).collect();
    out.append(&mut upper);
    out
}

pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Splits a prime power `n = p^e`; `None` if `n` is not a prime power.
pub fn prime_power(n: u64) -> Option<(u64, u32)> {
    match factorize(n).as_slice() {
        [(p, e)] => Some((*p, *e)),
        _ => None,
    }
}
