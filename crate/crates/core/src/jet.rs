//! Truncated multivariate Taylor polynomials ("jets") for exact derivatives of
//! compositions. A jet stores `c_β = ∂^β u(x)/β!` for all `|β| ≤ d`.

use std::collections::HashMap;

/// Monomial layout and multiplication table for `n` variables up to degree `d`.
#[derive(Clone, Debug)]
pub struct JetSpace {
    pub n: usize,
    pub d: usize,
    monos: Vec<Vec<u8>>,
    index: HashMap<Vec<u8>, usize>,
    products: Vec<(usize, usize, usize)>,
    /// Indices of the degree-`h` monomials, per `h`.
    by_degree: Vec<Vec<usize>>,
}

pub type Jet = Vec<f64>;

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `β!` of a multi-index.
pub fn multi_factorial(beta: &[u8]) -> f64 {
    beta.iter().map(|&b| factorial(b as usize)).product()
}

impl JetSpace {
    pub fn new(n: usize, d: usize) -> Self {
        assert!(n >= 1, "jets need at least one variable");
        let mut monos: Vec<Vec<u8>> = Vec::new();
        let mut by_degree = Vec::new();
        for deg in 0..=d {
            let mut level = Vec::new();
            let mut cur = vec![0u8; n];
            compositions(deg, 0, &mut cur, &mut level);
            let start = monos.len();
            by_degree.push((start..start + level.len()).collect());
            monos.extend(level);
        }
        let index: HashMap<Vec<u8>, usize> = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        let mut products = Vec::new();
        for (i, a) in monos.iter().enumerate() {
            for (j, b) in monos.iter().enumerate() {
                let da: usize = a.iter().map(|&x| x as usize).sum();
                let db: usize = b.iter().map(|&x| x as usize).sum();
                if da + db <= d {
                    let sum: Vec<u8> = a.iter().zip(b).map(|(x, y)| x + y).collect();
                    products.push((i, j, index[&sum]));
                }
            }
        }
        JetSpace { n, d, monos, index, products, by_degree }
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomial(&self, i: usize) -> &[u8] {
        &self.monos[i]
    }

    pub fn index_of(&self, beta: &[u8]) -> Option<usize> {
        self.index.get(beta).copied()
    }

    pub fn of_degree(&self, h: usize) -> &[usize] {
        &self.by_degree[h]
    }

    pub fn constant(&self, v: f64) -> Jet {
        let mut j = vec![0.0; self.len()];
        j[0] = v;
        j
    }

    /// The coordinate `x_i` expanded at `v`.
    pub fn variable(&self, i: usize, v: f64) -> Jet {
        let mut j = self.constant(v);
        if self.d >= 1 {
            let mut e = vec![0u8; self.n];
            e[i] = 1;
            j[self.index[&e]] = 1.0;
        }
        j
    }

    pub fn add(&self, a: &Jet, b: &Jet) -> Jet {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    pub fn scale(&self, a: &Jet, c: f64) -> Jet {
        a.iter().map(|x| x * c).collect()
    }

    pub fn mul(&self, a: &Jet, b: &Jet) -> Jet {
        let mut out = vec![0.0; self.len()];
        for &(i, j, k) in &self.products {
            out[k] += a[i] * b[j];
        }
        out
    }

    /// `g ∘ a` from `derivs[i] = g^{(i)}(a_0)`, `i = 0..=d`.
    pub fn compose(&self, a: &Jet, derivs: &[f64]) -> Jet {
        let mut delta = a.clone();
        delta[0] = 0.0;
        let mut out = self.constant(derivs[0]);
        let mut pow = self.constant(1.0);
        for (i, &g) in derivs.iter().enumerate().take(self.d + 1).skip(1) {
            pow = self.mul(&pow, &delta);
            if g != 0.0 {
                let c = g / factorial(i);
                for (o, p) in out.iter_mut().zip(&pow) {
                    *o += c * p;
                }
            }
        }
        out
    }

    pub fn exp(&self, a: &Jet) -> Jet {
        let e = a[0].exp();
        self.compose(a, &vec![e; self.d + 1])
    }

    pub fn recip(&self, a: &Jet) -> Jet {
        let v = a[0];
        let derivs: Vec<f64> =
            (0..=self.d).map(|i| factorial(i) * (-1f64).powi(i as i32) / v.powi(i as i32 + 1)).collect();
        self.compose(a, &derivs)
    }

    /// `a^e` for `a_0 > 0`.
    pub fn powf(&self, a: &Jet, e: f64) -> Jet {
        let v = a[0];
        let mut derivs = Vec::with_capacity(self.d + 1);
        let mut coef = 1.0;
        for i in 0..=self.d {
            derivs.push(coef * v.powf(e - i as f64));
            coef *= e - i as f64;
        }
        self.compose(a, &derivs)
    }

    /// `∂^β u = β! c_β`.
    pub fn derivative(&self, a: &Jet, beta: &[u8]) -> f64 {
        let i = self.index[beta];
        a[i] * multi_factorial(beta)
    }

    /// Frobenius norm of the symmetric tensor `∇^h u`, counting every ordered
    /// index tuple: `(Σ_{|β|=h} (h!/β!) (∂^β u)²)^{1/2}`.
    pub fn gradient_norm(&self, a: &Jet, h: usize) -> f64 {
        self.by_degree[h]
            .iter()
            .map(|&i| {
                let beta = &self.monos[i];
                let bf = multi_factorial(beta);
                let dv = a[i] * bf;
                factorial(h) / bf * dv * dv
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Components of `∇^h u`, one per ordered index tuple, in a fixed order.
    pub fn gradient_components(&self, a: &Jet, h: usize) -> Vec<f64> {
        let mut out = Vec::new();
        let mut tuple = vec![0usize; h];
        loop {
            let mut beta = vec![0u8; self.n];
            for &t in &tuple {
                beta[t] += 1;
            }
            out.push(self.derivative(a, &beta));
            // Advance the odometer.
            let mut pos = h;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                tuple[pos] += 1;
                if tuple[pos] < self.n {
                    break;
                }
                tuple[pos] = 0;
            }
        }
    }
}

fn compositions(rest: usize, pos: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    let n = cur.len();
    if pos == n - 1 {
        cur[pos] = rest as u8;
        out.push(cur.clone());
        return;
    }
    for k in (0..=rest).rev() {
        cur[pos] = k as u8;
        compositions(rest - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn layout_counts() {
        assert_eq!(JetSpace::new(1, 3).len(), 4);
        assert_eq!(JetSpace::new(2, 2).len(), 6);
        assert_eq!(JetSpace::new(3, 3).len(), 20);
    }

    #[test]
    fn product_rule_and_chain_rule() {
        let sp = JetSpace::new(2, 3);
        let (x, y) = (0.7, -0.4);
        let jx = sp.variable(0, x);
        let jy = sp.variable(1, y);
        // u = x² y, ∂_x∂_y u = 2x, ∂_x² ∂_y u = 2.
        let u = sp.mul(&sp.mul(&jx, &jx), &jy);
        assert!((sp.derivative(&u, &[1, 1]) - 2.0 * x).abs() < 1e-14);
        assert!((sp.derivative(&u, &[2, 1]) - 2.0).abs() < 1e-14);
        // exp(x y): ∂_x ∂_y = (1 + xy) e^{xy}.
        let e = sp.exp(&sp.mul(&jx, &jy));
        let want = (1.0 + x * y) * (x * y).exp();
        assert!((sp.derivative(&e, &[1, 1]) - want).abs() < 1e-13);
        // (x² + y²)^{1/2}: ∂_x = x/r.
        let r2 = sp.add(&sp.mul(&jx, &jx), &sp.mul(&jy, &jy));
        let r = sp.powf(&r2, 0.5);
        let rv = (x * x + y * y).sqrt();
        assert!((sp.derivative(&r, &[1, 0]) - x / rv).abs() < 1e-14);
        let q = sp.recip(&r);
        assert!((sp.derivative(&q, &[0, 1]) + y / rv.powi(3)).abs() < 1e-13);
    }

    #[test]
    fn gradient_norm_matches_components() {
        let sp = JetSpace::new(2, 2);
        let jx = sp.variable(0, 0.3);
        let jy = sp.variable(1, 1.1);
        let u = sp.mul(&sp.mul(&jx, &jx), &sp.exp(&jy));
        for h in 0..=2 {
            let comps = sp.gradient_components(&u, h);
            assert_eq!(comps.len(), 2usize.pow(h as u32));
            let direct = comps.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!((direct - sp.gradient_norm(&u, h)).abs() < 1e-13);
        }
    }
}
