//! Legendre-family quadrature rules on the reference interval `[-1, 1]`.

/// `(P_n(x), P_{n-1}(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64, f64) {
    if n == 0 {
        return (1.0, 0.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let next = ((2.0 * jf - 1.0) * x * p - (jf - 1.0) * p_prev) / jf;
        p_prev = p;
        p = next;
    }
    let nf = n as f64;
    let dp = if (x * x - 1.0).abs() < 1e-300 {
        // P_n'(+-1) = (+-1)^(n-1) n (n + 1) / 2
        let sign = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        sign * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p - p_prev) / (x * x - 1.0)
    };
    (p, p_prev, dp)
}

/// A rule with ascending nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (mid + half * x, half * w))
    }
}

/// `n`-point Gauss-Legendre rule, exact for polynomials of degree `2n - 1`.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "rule needs at least one node");
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, _, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, _, dp) = legendre(n, x);
        nodes.push(x);
        weights.push(2.0 / ((1.0 - x * x) * dp * dp));
    }
    sort_rule(nodes, weights)
}

/// `n`-point Gauss-Radau rule with the fixed node at `+1`, exact for degree `2n - 2`.
///
/// Built from the left-anchored rule (roots of `P_{n-1} + P_n`) by reflection.
pub fn gauss_radau_right(n: usize) -> Rule {
    assert!(n >= 2, "Radau rule needs at least two nodes");
    let nf = n as f64;
    let mut nodes = vec![-1.0];
    let mut weights = vec![2.0 / (nf * nf)];
    for j in 1..n {
        let mut x = -(2.0 * std::f64::consts::PI * j as f64 / (2.0 * nf - 1.0)).cos();
        for _ in 0..100 {
            let (pn, pn1, dpn) = legendre(n, x);
            let (_, _, dpn1) = legendre(n - 1, x);
            let dx = (pn + pn1) / (dpn + dpn1);
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, pn1, _) = legendre(n, x);
        nodes.push(x);
        weights.push((1.0 - x) / (nf * nf * pn1 * pn1));
    }
    let nodes = nodes.into_iter().map(|x| -x).collect();
    sort_rule(nodes, weights)
}

fn sort_rule(nodes: Vec<f64>, weights: Vec<f64>) -> Rule {
    let mut pairs: Vec<(f64, f64)> = nodes.into_iter().zip(weights).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (nodes, weights) = pairs.into_iter().unzip();
    Rule { nodes, weights }
}

/// Lagrange interpolation on a fixed node set (barycentric form).
#[derive(Debug, Clone, PartialEq)]
pub struct Interpolant {
    nodes: Vec<f64>,
    bary: Vec<f64>,
}

impl Interpolant {
    pub fn new(nodes: &[f64]) -> Self {
        let bary = nodes
            .iter()
            .enumerate()
            .map(|(j, &xj)| {
                let prod: f64 = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(m, _)| m != j)
                    .map(|(_, &xm)| xj - xm)
                    .product();
                1.0 / prod
            })
            .collect();
        Self { nodes: nodes.to_vec(), bary }
    }

    /// Values of every basis polynomial at `x`.
    pub fn basis(&self, x: f64) -> Vec<f64> {
        if let Some(j) = self.nodes.iter().position(|&xj| xj == x) {
            let mut out = vec![0.0; self.nodes.len()];
            out[j] = 1.0;
            return out;
        }
        let terms: Vec<f64> = self.nodes.iter().zip(&self.bary).map(|(&xj, &bj)| bj / (x - xj)).collect();
        let total: f64 = terms.iter().sum();
        terms.into_iter().map(|t| t / total).collect()
    }

    pub fn eval(&self, values: &[f64], x: f64) -> f64 {
        self.basis(x).iter().zip(values).map(|(b, v)| b * v).sum()
    }

    /// `S[i][j] = integral from -1 to nodes[i] of basis_j`.
    pub fn integration_matrix(&self) -> Vec<Vec<f64>> {
        let inner = gauss_legendre(self.nodes.len().max(2));
        self.nodes
            .iter()
            .map(|&xi| {
                let mut row = vec![0.0; self.nodes.len()];
                for (t, w) in inner.mapped(-1.0, xi) {
                    for (acc, b) in row.iter_mut().zip(self.basis(t)) {
                        *acc += w * b;
                    }
                }
                row
            })
            .collect()
    }
}
