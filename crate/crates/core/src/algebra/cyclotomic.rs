//! Cyclotomic polynomials and the fields they define.

use num_integer::Integer;

use super::poly::Polynomial;

/// Euler's totient.
pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// Φ_L, obtained by dividing x^L - 1 by Φ_d for every proper divisor d of L.
pub fn cyclotomic_polynomial(l: u64) -> Polynomial {
    assert!(l >= 1);
    let mut p = Polynomial::monomial(l as usize).sub(&Polynomial::one());
    for d in 1..l {
        if l % d == 0 {
            let (q, r) = p.div_rem(&cyclotomic_polynomial(d));
            debug_assert!(r.is_zero());
            p = q;
        }
    }
    p
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a.lcm(&b)
}

/// Q(ζ_L) presented as Q[x]/(Φ_L).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclotomicField {
    conductor: u64,
    modulus: Polynomial,
}

impl CyclotomicField {
    pub fn new(conductor: u64) -> Self {
        CyclotomicField { conductor, modulus: cyclotomic_polynomial(conductor) }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn modulus(&self) -> &Polynomial {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.degree()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_polynomial(1), Polynomial::from_ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(8), Polynomial::from_ints(&[1, 0, 0, 0, 1]));
        assert_eq!(cyclotomic_polynomial(12), Polynomial::from_ints(&[1, 0, -1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(5), Polynomial::from_ints(&[1, 1, 1, 1, 1]));
    }

    #[test]
    fn oracle_product_of_factors() {
        // (x - 1)(x + 1)(x^2 + 1) Φ_8 = x^8 - 1
        let prod = Polynomial::from_ints(&[-1, 1])
            .mul(&Polynomial::from_ints(&[1, 1]))
            .mul(&Polynomial::from_ints(&[1, 0, 1]))
            .mul(&cyclotomic_polynomial(8));
        assert_eq!(prod, Polynomial::from_ints(&[-1, 0, 0, 0, 0, 0, 0, 0, 1]));
    }

    #[test]
    fn degrees_match_totient() {
        for l in 1..=60 {
            let f = CyclotomicField::new(l);
            assert_eq!(f.degree() as u64, euler_phi(l), "L = {l}");
            assert!(f.modulus().is_monic_integral());
        }
    }
}
