use super::Metric;

/// Slack allowed when comparing distances.
pub const DEFAULT_AXIOM_TOL: f64 = 1e-9;

// Witnesses kept per report; counts are always complete.
const MAX_WITNESSES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AxiomKind {
    Nonnegativity,
    Identity,
    Symmetry,
    /// Distinct points at distance zero. Pseudometrics fail only this one.
    Indiscernibles,
    Triangle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomViolation {
    pub kind: AxiomKind,
    pub indices: Vec<usize>,
    /// Amount by which the inequality fails (or the offending value).
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AxiomReport {
    pub pairs_checked: usize,
    pub triples_checked: usize,
    pub nonnegativity: usize,
    pub identity: usize,
    pub symmetry: usize,
    pub indiscernibles: usize,
    pub triangle: usize,
    pub witnesses: Vec<AxiomViolation>,
}

impl AxiomReport {
    /// All axioms of a pseudometric hold.
    pub fn is_pseudometric(&self) -> bool {
        self.nonnegativity + self.identity + self.symmetry + self.triangle == 0
    }

    pub fn is_metric(&self) -> bool {
        self.is_pseudometric() && self.indiscernibles == 0
    }

    pub fn count(&self, kind: AxiomKind) -> usize {
        match kind {
            AxiomKind::Nonnegativity => self.nonnegativity,
            AxiomKind::Identity => self.identity,
            AxiomKind::Symmetry => self.symmetry,
            AxiomKind::Indiscernibles => self.indiscernibles,
            AxiomKind::Triangle => self.triangle,
        }
    }

    fn record(&mut self, kind: AxiomKind, indices: Vec<usize>, excess: f64) {
        match kind {
            AxiomKind::Nonnegativity => self.nonnegativity += 1,
            AxiomKind::Identity => self.identity += 1,
            AxiomKind::Symmetry => self.symmetry += 1,
            AxiomKind::Indiscernibles => self.indiscernibles += 1,
            AxiomKind::Triangle => self.triangle += 1,
        }
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(AxiomViolation {
                kind,
                indices,
                excess,
            });
        }
    }
}

// Pairwise part shared by both entry points. NaN fails every comparison, so
// it shows up as a violation.
fn check_pairs<P, M>(sample: &[P], metric: &M, tol: f64, report: &mut AxiomReport) -> Vec<f64>
where
    P: PartialEq,
    M: Metric<P> + ?Sized,
{
    let n = sample.len();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            d[i * n + j] = metric.distance(&sample[i], &sample[j]);
        }
    }
    for i in 0..n {
        let dii = d[i * n + i];
        if !(dii.abs() <= tol) {
            report.record(AxiomKind::Identity, vec![i], dii);
        }
        for j in 0..n {
            let dij = d[i * n + j];
            report.pairs_checked += 1;
            if !(dij >= -tol) {
                report.record(AxiomKind::Nonnegativity, vec![i, j], dij);
            }
            if j > i {
                let dji = d[j * n + i];
                if !((dij - dji).abs() <= tol) {
                    report.record(AxiomKind::Symmetry, vec![i, j], (dij - dji).abs());
                }
                if dij.abs() <= tol && sample[i] != sample[j] {
                    report.record(AxiomKind::Indiscernibles, vec![i, j], dij);
                }
            }
        }
    }
    d
}

fn check_triangle(
    d: &[f64],
    n: usize,
    (i, j, k): (usize, usize, usize),
    tol: f64,
    report: &mut AxiomReport,
) {
    report.triples_checked += 1;
    let lhs = d[i * n + k];
    let rhs = d[i * n + j] + d[j * n + k];
    if !(lhs <= rhs + tol) {
        report.record(AxiomKind::Triangle, vec![i, j, k], lhs - rhs);
    }
}

/// Checks the metric axioms on every pair and every ordered triple of the
/// sample. Cost is `O(n^3)` distance comparisons.
pub fn check_metric_axioms<P, M>(sample: &[P], metric: &M, tol: f64) -> AxiomReport
where
    P: PartialEq,
    M: Metric<P> + ?Sized,
{
    let mut report = AxiomReport::default();
    let d = check_pairs(sample, metric, tol, &mut report);
    let n = sample.len();
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                check_triangle(&d, n, (i, j, k), tol, &mut report);
            }
        }
    }
    report
}

/// Like [`check_metric_axioms`] but tests the triangle inequality
/// `d(i,k) ≤ d(i,j) + d(j,k)` only on the listed triples. Out-of-range
/// triples are ignored.
pub fn check_metric_axioms_on_triples<P, M>(
    sample: &[P],
    triples: &[(usize, usize, usize)],
    metric: &M,
    tol: f64,
) -> AxiomReport
where
    P: PartialEq,
    M: Metric<P> + ?Sized,
{
    let mut report = AxiomReport::default();
    let d = check_pairs(sample, metric, tol, &mut report);
    let n = sample.len();
    for &t in triples {
        if t.0 < n && t.1 < n && t.2 < n {
            check_triangle(&d, n, t, tol, &mut report);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::Euclidean;

    #[test]
    fn euclidean_line_is_metric() {
        let s = [0.0, 0.5, -1.0, 3.0];
        let r = check_metric_axioms(&s, &Euclidean, DEFAULT_AXIOM_TOL);
        assert!(r.is_metric(), "{r:?}");
        assert_eq!(r.triples_checked, 64);
    }

    #[test]
    fn squared_distance_breaks_triangle() {
        let sq = |a: &f64, b: &f64| (a - b) * (a - b);
        let r = check_metric_axioms(&[0.0, 1.0, 2.0], &sq, DEFAULT_AXIOM_TOL);
        assert!(r.triangle > 0);
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.kind == AxiomKind::Triangle && w.indices == vec![0, 1, 2]));
    }

    #[test]
    fn pseudometric_is_not_metric() {
        let first = |a: &(f64, f64), b: &(f64, f64)| (a.0 - b.0).abs();
        let s = [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)];
        let r = check_metric_axioms(&s, &first, DEFAULT_AXIOM_TOL);
        assert!(r.is_pseudometric());
        assert!(!r.is_metric());
        assert_eq!(r.indiscernibles, 1);
    }

    #[test]
    fn asymmetry_and_nan_are_caught() {
        let skew = |a: &f64, b: &f64| if a < b { b - a } else { 2.0 * (a - b) };
        let r = check_metric_axioms(&[0.0, 1.0], &skew, DEFAULT_AXIOM_TOL);
        assert_eq!(r.symmetry, 1);
        let nan = |_: &f64, _: &f64| f64::NAN;
        let r = check_metric_axioms(&[0.0], &nan, DEFAULT_AXIOM_TOL);
        assert_eq!(r.identity, 1);
        assert_eq!(r.nonnegativity, 1);
    }

    #[test]
    fn explicit_triples_only() {
        let sq = |a: &f64, b: &f64| (a - b) * (a - b);
        let r = check_metric_axioms_on_triples(&[0.0, 1.0, 2.0], &[(0, 0, 1)], &sq, 1e-9);
        assert_eq!(r.triples_checked, 1);
        assert_eq!(r.triangle, 0);
    }
}
