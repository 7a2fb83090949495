use std::collections::BTreeSet;
use std::fmt::Debug;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A homeomorphism given by forward and backward step oracles.
pub trait DiscreteSystem {
    type Point: Clone + PartialEq + Debug;

    fn forward(&self, x: &Self::Point) -> Result<Self::Point>;
    fn backward(&self, x: &Self::Point) -> Result<Self::Point>;

    /// `f^n(x)` for any integer `n`.
    fn iterate(&self, x: &Self::Point, n: i64) -> Result<Self::Point> {
        let mut y = x.clone();
        for _ in 0..n.unsigned_abs() {
            y = if n > 0 {
                self.forward(&y)?
            } else {
                self.backward(&y)?
            };
        }
        Ok(y)
    }
}

impl<D: DiscreteSystem + ?Sized> DiscreteSystem for &D {
    type Point = D::Point;

    fn forward(&self, x: &Self::Point) -> Result<Self::Point> {
        (**self).forward(x)
    }

    fn backward(&self, x: &Self::Point) -> Result<Self::Point> {
        (**self).backward(x)
    }

    fn iterate(&self, x: &Self::Point, n: i64) -> Result<Self::Point> {
        (**self).iterate(x, n)
    }
}

/// A point of `{0,1}^ℤ` with finitely many ones: `x_n = 1` iff
/// `n + offset ∈ support`. Shifting only moves the offset; equality compares
/// the actual coordinate sets.
#[derive(Debug, Clone, Default)]
pub struct SymbolicPoint {
    offset: i64,
    support: BTreeSet<i64>,
}

impl SymbolicPoint {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The point whose ones sit at the given coordinates.
    pub fn from_ones<I: IntoIterator<Item = i64>>(ones: I) -> Self {
        Self {
            offset: 0,
            support: ones.into_iter().collect(),
        }
    }

    pub fn get(&self, n: i64) -> u8 {
        u8::from(self.support.contains(&(n + self.offset)))
    }

    /// Coordinates holding a one, in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = i64> + '_ {
        self.support.iter().map(move |p| p - self.offset)
    }

    pub fn weight(&self) -> usize {
        self.support.len()
    }

    pub fn shifted(&self, k: i64) -> Self {
        Self {
            offset: self.offset + k,
            support: self.support.clone(),
        }
    }

    /// Same point with offset zero.
    pub fn canonical(&self) -> Self {
        Self::from_ones(self.ones())
    }

    /// Coordinates where `self` and `other` differ.
    pub fn difference(&self, other: &Self) -> Vec<i64> {
        let a: BTreeSet<i64> = self.ones().collect();
        let b: BTreeSet<i64> = other.ones().collect();
        a.symmetric_difference(&b).copied().collect()
    }

    /// Coordinatewise XOR.
    pub fn xor(&self, other: &Self) -> Self {
        Self::from_ones(self.difference(other))
    }
}

impl PartialEq for SymbolicPoint {
    fn eq(&self, other: &Self) -> bool {
        self.support.len() == other.support.len() && self.ones().eq(other.ones())
    }
}

impl Eq for SymbolicPoint {}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolicRepr {
    #[serde(default)]
    offset: i64,
    support: Vec<(i64, u8)>,
}

impl Serialize for SymbolicPoint {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymbolicRepr {
            offset: self.offset,
            support: self.support.iter().map(|&n| (n, 1)).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymbolicPoint {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SymbolicRepr::deserialize(d)?;
        let mut support = BTreeSet::new();
        for (n, symbol) in repr.support {
            match symbol {
                0 => {
                    support.remove(&n);
                }
                1 => {
                    support.insert(n);
                }
                other => {
                    return Err(serde::de::Error::custom(format!(
                        "symbol {other} at {n} is not 0 or 1"
                    )))
                }
            }
        }
        Ok(Self {
            offset: repr.offset,
            support,
        })
    }
}

/// Full shift on two symbols, `(f x)_n = x_{n+1}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FullShift;

impl DiscreteSystem for FullShift {
    type Point = SymbolicPoint;

    fn forward(&self, x: &SymbolicPoint) -> Result<SymbolicPoint> {
        Ok(x.shifted(1))
    }

    fn backward(&self, x: &SymbolicPoint) -> Result<SymbolicPoint> {
        Ok(x.shifted(-1))
    }

    fn iterate(&self, x: &SymbolicPoint, n: i64) -> Result<SymbolicPoint> {
        Ok(x.shifted(n))
    }
}

/// Cat map `[[2,1],[1,1]]` on `[0,1)²`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ToralAutomorphism;

fn wrap(v: f64) -> f64 {
    let r = v.rem_euclid(1.0);
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

impl ToralAutomorphism {
    /// Flat torus distance.
    pub fn distance(a: &[f64; 2], b: &[f64; 2]) -> f64 {
        let d = |u: f64, v: f64| {
            let t = (u - v).rem_euclid(1.0);
            t.min(1.0 - t)
        };
        d(a[0], b[0]).hypot(d(a[1], b[1]))
    }

    /// Unit eigenvector for the contracting eigenvalue `(3-√5)/2`.
    pub fn stable_direction() -> [f64; 2] {
        let v = [1.0, -(1.0 + 5f64.sqrt()) / 2.0];
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    }

    /// Unit eigenvector for the expanding eigenvalue `(3+√5)/2`.
    pub fn unstable_direction() -> [f64; 2] {
        let v = [1.0, (5f64.sqrt() - 1.0) / 2.0];
        let n = v[0].hypot(v[1]);
        [v[0] / n, v[1] / n]
    }

    fn check(x: &[f64; 2]) -> Result<()> {
        if x.iter().all(|c| (0.0..1.0).contains(c)) {
            Ok(())
        } else {
            Err(Error::Domain(format!("torus point {x:?} outside [0,1)²")))
        }
    }
}

impl DiscreteSystem for ToralAutomorphism {
    type Point = [f64; 2];

    fn forward(&self, x: &[f64; 2]) -> Result<[f64; 2]> {
        Self::check(x)?;
        Ok([wrap(2.0 * x[0] + x[1]), wrap(x[0] + x[1])])
    }

    fn backward(&self, x: &[f64; 2]) -> Result<[f64; 2]> {
        Self::check(x)?;
        Ok([wrap(x[0] - x[1]), wrap(2.0 * x[1] - x[0])])
    }
}

/// A permutation of `{0, …, n-1}`.
#[derive(Debug, Clone)]
pub struct FinitePermutation {
    forward: Vec<usize>,
    inverse: Vec<usize>,
}

impl FinitePermutation {
    pub fn new(forward: Vec<usize>) -> Result<Self> {
        let n = forward.len();
        let mut inverse = vec![usize::MAX; n];
        for (i, &j) in forward.iter().enumerate() {
            if j >= n || inverse[j] != usize::MAX {
                return Err(Error::Spec(format!("{forward:?} is not a permutation")));
            }
            inverse[j] = i;
        }
        Ok(Self { forward, inverse })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }
}

impl DiscreteSystem for FinitePermutation {
    type Point = usize;

    fn forward(&self, x: &usize) -> Result<usize> {
        self.forward
            .get(*x)
            .copied()
            .ok_or_else(|| Error::Domain(format!("{x} is not in the permuted set")))
    }

    fn backward(&self, x: &usize) -> Result<usize> {
        self.inverse
            .get(*x)
            .copied()
            .ok_or_else(|| Error::Domain(format!("{x} is not in the permuted set")))
    }
}

/// `f × f` acting on pairs.
#[derive(Debug, Clone, Copy, Default)]
pub struct PairSystem<D>(pub D);

impl<D: DiscreteSystem> DiscreteSystem for PairSystem<D> {
    type Point = (D::Point, D::Point);

    fn forward(&self, p: &Self::Point) -> Result<Self::Point> {
        Ok((self.0.forward(&p.0)?, self.0.forward(&p.1)?))
    }

    fn backward(&self, p: &Self::Point) -> Result<Self::Point> {
        Ok((self.0.backward(&p.0)?, self.0.backward(&p.1)?))
    }

    fn iterate(&self, p: &Self::Point, n: i64) -> Result<Self::Point> {
        Ok((self.0.iterate(&p.0, n)?, self.0.iterate(&p.1, n)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_moves_coordinates_left() {
        let x = SymbolicPoint::from_ones([3]);
        let fx = FullShift.forward(&x).unwrap();
        assert_eq!(fx.get(2), 1);
        assert_eq!(fx.get(3), 0);
        assert_eq!(FullShift.backward(&fx).unwrap(), x);
    }

    #[test]
    fn equality_ignores_representation() {
        let a = SymbolicPoint::from_ones([1, 4]);
        let b = SymbolicPoint::from_ones([3, 6]).shifted(2);
        assert_eq!(a, b);
        assert_eq!(b.canonical().offset, 0);
        assert_ne!(a, SymbolicPoint::from_ones([1]));
    }

    #[test]
    fn serde_round_trip_drops_zeros() {
        let p: SymbolicPoint =
            serde_json::from_str(r#"{"offset": 1, "support": [[2, 1], [5, 0], [7, 1]]}"#).unwrap();
        assert_eq!(p.ones().collect::<Vec<_>>(), vec![1, 6]);
        let back: SymbolicPoint =
            serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<SymbolicPoint>(r#"{"support": [[0, 2]]}"#).is_err());
    }

    #[test]
    fn cat_map_inverse() {
        let x = [0.3, 0.7];
        let y = ToralAutomorphism.forward(&x).unwrap();
        let back = ToralAutomorphism.backward(&y).unwrap();
        assert!(ToralAutomorphism::distance(&x, &back) < 1e-14);
    }

    #[test]
    fn permutation_inverse() {
        let p = FinitePermutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.iterate(&0, 3).unwrap(), 0);
        assert_eq!(p.iterate(&0, -1).unwrap(), 1);
        assert!(FinitePermutation::new(vec![0, 0]).is_err());
    }
}
