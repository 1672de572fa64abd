use std::fmt::Debug;

/// A group with exact multiplication and an exact identity test.
///
/// `a.mul(&b)` is the product `a·b`; for groups acting on the left (both
/// Thompson's group and the Grigorchuk group here) it means "apply `b` first".
pub trait Group: Clone + Debug {
    fn identity() -> Self;

    fn mul(&self, rhs: &Self) -> Self;

    fn inverse(&self) -> Self;

    fn is_identity(&self) -> bool;

    fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// `g⁻¹·self·g`.
    fn conjugate(&self, g: &Self) -> Self {
        g.inverse().mul(self).mul(g)
    }

    /// `self⁻¹·g⁻¹·self·g`.
    fn commutator(&self, g: &Self) -> Self {
        self.inverse().mul(&g.inverse()).mul(self).mul(g)
    }

    /// Exact equality in the group, through the identity test.
    fn group_eq(&self, other: &Self) -> bool {
        self.inverse().mul(other).is_identity()
    }
}
