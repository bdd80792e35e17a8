//! Quadrature rules on the reference triangle and on edges.
//!
//! Triangle rules are conical products of Gauss–Legendre rules through the
//! Duffy map, so every weight is positive and any polynomial degree up to 10
//! is integrated exactly.

use crate::error::{Error, Result};
use crate::geometry::Vec2;

const MAX_DEGREE: usize = 10;

/// Quadrature on the reference triangle {x, y >= 0, x + y <= 1}, stored in
/// barycentric coordinates with weights summing to the reference area 1/2.
#[derive(Clone, Debug)]
pub struct QuadRule {
    degree: usize,
    points: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl QuadRule {
    pub fn new(degree: usize) -> Result<QuadRule> {
        if degree == 0 || degree > MAX_DEGREE {
            return Err(Error::UnsupportedQuadratureDegree(degree));
        }
        // The Duffy factor (1-u) raises the u-degree by one.
        let m = (degree + 3) / 2;
        let (nodes, wts) = gauss_legendre(m);
        let mut points = Vec::with_capacity(m * m);
        let mut weights = Vec::with_capacity(m * m);
        for i in 0..m {
            let u = 0.5 * (nodes[i] + 1.0);
            let wu = 0.5 * wts[i];
            for j in 0..m {
                let v = 0.5 * (nodes[j] + 1.0);
                let wv = 0.5 * wts[j];
                let x = u;
                let y = v * (1.0 - u);
                points.push([1.0 - x - y, x, y]);
                weights.push(wu * wv * (1.0 - u));
            }
        }
        Ok(QuadRule {
            degree,
            points,
            weights,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[[f64; 3]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Physical quadrature points and weights on the triangle with the given
    /// vertices; weights sum to the triangle area.
    pub fn physical(&self, verts: [Vec2; 3]) -> Vec<(Vec2, f64)> {
        let double_area = (verts[1] - verts[0]).cross(verts[2] - verts[0]);
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&[l0, l1, l2], &w)| {
                let x = verts[0].scale(l0) + verts[1].scale(l1) + verts[2].scale(l2);
                (x, w * double_area)
            })
            .collect()
    }
}

/// Gauss–Legendre quadrature on [-1, 1].
#[derive(Clone, Debug)]
pub struct EdgeQuadRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl EdgeQuadRule {
    pub fn new(degree: usize) -> Result<EdgeQuadRule> {
        if degree == 0 || degree > 2 * MAX_DEGREE {
            return Err(Error::UnsupportedQuadratureDegree(degree));
        }
        let m = degree / 2 + 1;
        let (nodes, weights) = gauss_legendre(m);
        Ok(EdgeQuadRule { nodes, weights })
    }

    /// Nodes in [-1, 1] paired with weights summing to 2.
    pub fn nodes_weights(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().cloned().zip(self.weights.iter().cloned())
    }

    /// Physical points on the segment [p, q] with weights summing to |q - p|.
    /// The parameter runs from -1 at p to +1 at q.
    pub fn on_segment(&self, p: Vec2, q: Vec2) -> Vec<(Vec2, f64, f64)> {
        let half = (q - p).scale(0.5);
        let mid = (p + q).scale(0.5);
        let jac = half.norm();
        self.nodes_weights()
            .map(|(s, w)| (mid + half.scale(s), s, w * jac))
            .collect()
    }
}

/// Nodes and weights of the m-point Gauss–Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre recurrence.
fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        for _ in 0..60 {
            let (p, dp) = legendre_with_derivative(m, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(m, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x.abs();
        nodes[m - 1 - i] = x.abs();
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(m: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
    fn monomial_integral(a: usize, b: usize) -> f64 {
        let fact = |k: usize| (1..=k).map(|v| v as f64).product::<f64>().max(1.0);
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn weights_positive_and_sum_to_half() {
        for degree in 1..=10 {
            let rule = QuadRule::new(degree).unwrap();
            assert!(rule.weights().iter().all(|&w| w > 0.0));
            let total: f64 = rule.weights().iter().sum();
            assert!((total - 0.5).abs() < 1e-14);
        }
    }

    #[test]
    fn exactness_up_to_declared_degree() {
        for degree in 1..=10 {
            let rule = QuadRule::new(degree).unwrap();
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let approx: f64 = rule
                        .points()
                        .iter()
                        .zip(rule.weights())
                        .map(|(&[_, x, y], &w)| w * x.powi(a as i32) * y.powi(b as i32))
                        .sum();
                    let exact = monomial_integral(a, b);
                    assert!(
                        (approx - exact).abs() <= 1e-13 * exact.max(1.0),
                        "degree {degree}, x^{a} y^{b}: {approx} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn reference_moments() {
        let rule = QuadRule::new(2).unwrap();
        let one: f64 = rule.weights().iter().sum();
        assert!((one - 0.5).abs() < 1e-15);
        let x: f64 = rule
            .points()
            .iter()
            .zip(rule.weights())
            .map(|(&[_, x, _], &w)| w * x)
            .sum();
        assert!((x - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn high_order_monomial_matches_closed_form() {
        // x^4 y^3 integrates to 4! 3! / 9! = 1/2520; cross-checked against a
        // fine nested 1D Gauss grid as an independent route.
        let rule = QuadRule::new(10).unwrap();
        let approx: f64 = rule
            .points()
            .iter()
            .zip(rule.weights())
            .map(|(&[_, x, y], &w)| w * x.powi(4) * y.powi(3))
            .sum();
        assert!((approx - 1.0 / 2520.0).abs() < 1e-16);

        let (nodes, wts) = gauss_legendre(20);
        let mut nested = 0.0;
        for i in 0..20 {
            let x = 0.5 * (nodes[i] + 1.0);
            for j in 0..20 {
                let y = 0.5 * (nodes[j] + 1.0) * (1.0 - x);
                nested += 0.25 * wts[i] * wts[j] * (1.0 - x) * x.powi(4) * y.powi(3);
            }
        }
        assert!((approx - nested).abs() < 1e-15);
    }

    #[test]
    fn degree_out_of_range_rejected() {
        assert!(QuadRule::new(0).is_err());
        assert!(QuadRule::new(11).is_err());
    }

    #[test]
    fn physical_weights_sum_to_area() {
        let rule = QuadRule::new(4).unwrap();
        let verts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(0.0, 1.0),
        ];
        let total: f64 = rule.physical(verts).iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-13);
    }

    #[test]
    fn edge_rule_integrates_polynomials() {
        let rule = EdgeQuadRule::new(10).unwrap();
        // int_{-1}^{1} s^10 ds = 2/11
        let approx: f64 = rule.nodes_weights().map(|(s, w)| w * s.powi(10)).sum();
        assert!((approx - 2.0 / 11.0).abs() < 1e-14);
        let odd: f64 = rule.nodes_weights().map(|(s, w)| w * s.powi(7)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn segment_rule_measures_length() {
        let rule = EdgeQuadRule::new(6).unwrap();
        let pts = rule.on_segment(Vec2::new(0.0, 0.0), Vec2::new(3.0, 4.0));
        let len: f64 = pts.iter().map(|&(_, _, w)| w).sum();
        assert!((len - 5.0).abs() < 1e-13);
    }
}
