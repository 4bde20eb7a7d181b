//! Binary extension fields GF(2^8) and GF(2^16) with log/exp tables.
//!
//! Elements are carried as `u16` in both fields so that one codec type can
//! work over either.

use std::sync::OnceLock;

/// x^8 + x^4 + x^3 + x^2 + 1
pub const POLY_GF256: u32 = 0x11D;
/// x^16 + x^12 + x^3 + x + 1
pub const POLY_GF65536: u32 = 0x1100B;

pub type Symbol = u16;

#[derive(Debug)]
pub struct GfField {
    m: u32,
    poly: u32,
    generator: Symbol,
    /// exp[i] = g^i, doubled so log sums need no reduction.
    exp: Vec<Symbol>,
    log: Vec<u32>,
}

fn clmul_mod(a: u32, b: u32, m: u32, poly: u32) -> u32 {
    let (mut a, mut b, mut acc) = (a, b, 0u32);
    while b != 0 {
        if b & 1 == 1 {
            acc ^= a;
        }
        b >>= 1;
        a <<= 1;
        if a >> m & 1 == 1 {
            a ^= poly;
        }
    }
    acc
}

fn prime_factors(mut n: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn slow_pow(mut base: u32, mut e: u32, m: u32, poly: u32) -> u32 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = clmul_mod(acc, base, m, poly);
        }
        base = clmul_mod(base, base, m, poly);
        e >>= 1;
    }
    acc
}

impl GfField {
    /// Build the field GF(2^m) for the given irreducible polynomial, using the
    /// smallest primitive element as generator.
    ///
    /// Panics if no primitive element exists (the polynomial is reducible).
    pub fn new(m: u32, poly: u32) -> Self {
        assert!((2..=16).contains(&m), "only 2 <= m <= 16 supported");
        let q1 = (1u32 << m) - 1;
        let factors = prime_factors(q1);
        let generator = (2..=q1)
            .find(|&g| factors.iter().all(|&p| slow_pow(g, q1 / p, m, poly) != 1))
            .expect("polynomial is not irreducible");

        let mut exp = vec![0 as Symbol; 2 * q1 as usize];
        let mut log = vec![0u32; q1 as usize + 1];
        let mut x = 1u32;
        for i in 0..q1 {
            exp[i as usize] = x as Symbol;
            exp[(i + q1) as usize] = x as Symbol;
            log[x as usize] = i;
            x = clmul_mod(x, generator, m, poly);
        }
        assert_eq!(x, 1, "generator order mismatch");
        GfField {
            m,
            poly,
            generator: generator as Symbol,
            exp,
            log,
        }
    }

    pub fn gf256() -> &'static GfField {
        static F: OnceLock<GfField> = OnceLock::new();
        F.get_or_init(|| GfField::new(8, POLY_GF256))
    }

    pub fn gf65536() -> &'static GfField {
        static F: OnceLock<GfField> = OnceLock::new();
        F.get_or_init(|| GfField::new(16, POLY_GF65536))
    }

    /// GF(2^8) when `n` elements fit, else GF(2^16).
    pub fn for_length(n: usize) -> Option<&'static GfField> {
        if n <= 256 {
            Some(Self::gf256())
        } else if n <= 65536 {
            Some(Self::gf65536())
        } else {
            None
        }
    }

    pub fn degree(&self) -> u32 {
        self.m
    }
    pub fn polynomial(&self) -> u32 {
        self.poly
    }
    pub fn generator(&self) -> Symbol {
        self.generator
    }
    /// Number of field elements.
    pub fn size(&self) -> usize {
        1 << self.m
    }
    /// Bytes per serialized symbol.
    pub fn symbol_bytes(&self) -> usize {
        self.m as usize / 8
    }

    #[inline]
    pub fn add(&self, a: Symbol, b: Symbol) -> Symbol {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Symbol, b: Symbol) -> Symbol {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[(self.log[a as usize] + self.log[b as usize]) as usize]
        }
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: Symbol) -> Option<Symbol> {
        if a == 0 {
            return None;
        }
        let q1 = (1u32 << self.m) - 1;
        Some(self.exp[((q1 - self.log[a as usize]) % q1) as usize])
    }

    pub fn pow(&self, a: Symbol, e: u32) -> Symbol {
        if e == 0 {
            return 1;
        }
        if a == 0 {
            return 0;
        }
        let q1 = (1u64 << self.m) - 1;
        let l = self.log[a as usize] as u64 * e as u64 % q1;
        self.exp[l as usize]
    }

    /// Canonical element enumeration: 0, 1, g, g^2, ...
    pub fn element(&self, index: usize) -> Symbol {
        match index {
            0 => 0,
            i => self.exp[i - 1],
        }
    }

    /// `dst[i] ^= c * src[i]` over whole blocks.
    pub fn mul_add_into(&self, dst: &mut [Symbol], src: &[Symbol], c: Symbol) {
        if c == 0 {
            return;
        }
        if c == 1 {
            dst.iter_mut().zip(src).for_each(|(d, &s)| *d ^= s);
            return;
        }
        let lc = self.log[c as usize];
        for (d, &s) in dst.iter_mut().zip(src) {
            if s != 0 {
                *d ^= self.exp[(self.log[s as usize] + lc) as usize];
            }
        }
    }
}
