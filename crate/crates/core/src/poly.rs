//! Polynomials in `n` variables, the harmonic homogeneous catalogue, and
//! monomial moments over balls.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::jet::{Jet, JetSpace};

/// Sparse polynomial: `Σ c_β x^β`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub n: usize,
    /// `(β, c_β)` pairs.
    pub terms: Vec<(Vec<u8>, f64)>,
}

impl Polynomial {
    pub fn new(n: usize, terms: Vec<(Vec<u8>, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("polynomial dimension must be positive".into()));
        }
        let mut map: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for (beta, c) in terms {
            if beta.len() != n {
                return Err(Error::InvalidInput(format!("monomial {beta:?} does not have {n} exponents")));
            }
            *map.entry(beta).or_insert(0.0) += c;
        }
        Ok(Polynomial { n, terms: map.into_iter().filter(|(_, c)| *c != 0.0).collect() })
    }

    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: Vec::new() }
    }

    /// `x_i`.
    pub fn coordinate(n: usize, i: usize) -> Self {
        let mut b = vec![0u8; n];
        b[i] = 1;
        Polynomial { n, terms: vec![(b, 1.0)] }
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(|(b, _)| b.iter().map(|&e| e as usize).sum()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.iter().all(|(b, _)| b.iter().map(|&e| e as usize).sum::<usize>() == d)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(b, c)| c * b.iter().zip(x).map(|(&e, &xi)| xi.powi(e as i32)).product::<f64>()).sum()
    }

    /// The jet of the polynomial at `x`, from the coordinate jets.
    pub fn jet(&self, space: &JetSpace, x: &[f64]) -> Jet {
        let vars: Vec<Jet> = (0..self.n).map(|i| space.variable(i, x[i])).collect();
        self.jet_of(space, &vars)
    }

    /// The polynomial evaluated on arbitrary jets.
    pub fn jet_of(&self, space: &JetSpace, vars: &[Jet]) -> Jet {
        let mut out = space.constant(0.0);
        for (b, c) in &self.terms {
            let mut m = space.constant(*c);
            for (i, &e) in b.iter().enumerate() {
                for _ in 0..e {
                    m = space.mul(&m, &vars[i]);
                }
            }
            out = space.add(&out, &m);
        }
        out
    }

    pub fn derivative(&self, i: usize) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(b, _)| b[i] > 0)
            .map(|(b, c)| {
                let mut nb = b.clone();
                nb[i] -= 1;
                (nb, c * b[i] as f64)
            })
            .collect();
        Polynomial::new(self.n, terms).expect("same dimension")
    }

    pub fn laplacian(&self) -> Polynomial {
        let mut terms = Vec::new();
        for i in 0..self.n {
            terms.extend(self.derivative(i).derivative(i).terms);
        }
        Polynomial::new(self.n, terms).expect("same dimension")
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian().terms.iter().all(|(_, c)| c.abs() < 1e-12)
    }

    /// Built-in harmonic homogeneous polynomial of the given degree: `x₁`,
    /// `x₁x₂`, `x₁³ − 3x₁x₂²`. Degrees above one need `n ≥ 2`.
    pub fn harmonic(n: usize, degree: usize) -> Result<Polynomial> {
        let mono = |pairs: &[(usize, u8)]| {
            let mut b = vec![0u8; n];
            for &(i, e) in pairs {
                b[i] = e;
            }
            b
        };
        match degree {
            1 => Ok(Polynomial::coordinate(n, 0)),
            2 | 3 if n < 2 => {
                Err(Error::Domain(format!("no harmonic homogeneous polynomial of degree {degree} in dimension 1")))
            }
            2 => Polynomial::new(n, vec![(mono(&[(0, 1), (1, 1)]), 1.0)]),
            3 => Polynomial::new(n, vec![(mono(&[(0, 3)]), 1.0), (mono(&[(0, 1), (1, 2)]), -3.0)]),
            _ => Err(Error::Domain(format!("harmonic catalogue covers degrees 1 to 3, got {degree}"))),
        }
    }

    /// The whole catalogue of the given degree.
    pub fn harmonic_catalogue(n: usize, degree: usize) -> Vec<Polynomial> {
        let mut out: Vec<Polynomial> = Polynomial::harmonic(n, degree).into_iter().collect();
        if degree == 2 && n >= 2 {
            let mut a = vec![0u8; n];
            a[0] = 2;
            let mut b = vec![0u8; n];
            b[1] = 2;
            out.push(Polynomial::new(n, vec![(a, 1.0), (b, -1.0)]).expect("valid"));
        }
        out
    }
}

/// `Γ(k/2)` for a positive integer `k`.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k > 0, "Γ(0) is undefined");
    if k.is_multiple_of(2) {
        (1..k / 2).map(|i| i as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while (2.0 * x) as u32 != k {
            g *= x;
            x += 1.0;
        }
        g
    }
}

/// Volume of the unit ball `ω_n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma_half(n as u32 + 2)
}

/// `⨍_{B(0,r)} x^γ dx`.
pub fn ball_monomial_mean(gamma: &[u8], r: f64) -> f64 {
    if gamma.iter().any(|&g| g % 2 == 1) {
        return 0.0;
    }
    let n = gamma.len() as u32;
    let deg: u32 = gamma.iter().map(|&g| g as u32).sum();
    let num: f64 = gamma.iter().map(|&g| gamma_half(g as u32 + 1)).product();
    let integral = num / gamma_half(deg + n + 2);
    integral / unit_ball_volume(n as usize) * r.powi(deg as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalogue_is_harmonic_and_homogeneous() {
        for n in [2usize, 3] {
            for d in 1..=3 {
                for h in Polynomial::harmonic_catalogue(n, d) {
                    assert!(h.is_harmonic() && h.is_homogeneous() && h.degree() == d, "{h:?}");
                }
            }
        }
        assert!(Polynomial::harmonic(1, 2).is_err());
        let sq = Polynomial::new(2, vec![(vec![2, 0], 1.0)]).unwrap();
        assert!(!sq.is_harmonic());
    }

    #[test]
    fn ball_volumes_and_moments() {
        assert!((unit_ball_volume(1) - 2.0).abs() < 1e-15);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        // n=1: ⨍_{-r}^{r} x² = r²/3.
        assert!((ball_monomial_mean(&[2], 2.0) - 4.0 / 3.0).abs() < 1e-14);
        // n=2: ⨍ x² = r²/4.
        assert!((ball_monomial_mean(&[2, 0], 1.0) - 0.25).abs() < 1e-14);
        // n=3: ⨍ x² = r²/5.
        assert!((ball_monomial_mean(&[0, 2, 0], 1.0) - 0.2).abs() < 1e-14);
        assert_eq!(ball_monomial_mean(&[1, 2], 1.0), 0.0);
    }

    #[test]
    fn jet_matches_eval_and_derivative() {
        let h = Polynomial::harmonic(2, 3).unwrap();
        let sp = JetSpace::new(2, 2);
        let x = [0.4, -1.3];
        let j = h.jet(&sp, &x);
        assert!((j[0] - h.eval(&x)).abs() < 1e-14);
        let dx = h.derivative(0).eval(&x);
        assert!((sp.derivative(&j, &[1, 0]) - dx).abs() < 1e-13);
    }
}
