use rayon::prelude::*;
use serde::Serialize;

use super::PuzzleError;
use crate::arith::{inv_mod, is_prime, mul_mod, pow_mod};

/// Largest prime accepted for enumeration-based operations.
pub const MAX_ENUM_PRIME: u64 = 10_000;

/// `y² = x³ + ax + b` over `F_p`, `p > 3` prime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EcCurve {
    pub p: u64,
    pub a: u64,
    pub b: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EcPoint {
    Infinity,
    Affine { x: u64, y: u64 },
}

impl EcPoint {
    pub fn affine(x: u64, y: u64) -> Self {
        EcPoint::Affine { x, y }
    }
}

impl EcCurve {
    pub fn new(p: u64, a: u64, b: u64) -> Result<Self, PuzzleError> {
        if p <= 3 || p >= 1 << 32 || !is_prime(p) {
            return Err(PuzzleError::BadCurve(format!("p = {p} must be a prime in (3, 2^32)")));
        }
        let (a, b) = (a % p, b % p);
        let disc = (4 * pow_mod(a, 3, p) + 27 * mul_mod(b, b, p)) % p;
        if disc == 0 {
            return Err(PuzzleError::BadCurve(format!(
                "singular curve: 4a³ + 27b² ≡ 0 (mod {p})"
            )));
        }
        Ok(EcCurve { p, a, b })
    }

    fn rhs(&self, x: u64) -> u64 {
        let p = self.p;
        (pow_mod(x, 3, p) + mul_mod(self.a, x, p) + self.b) % p
    }

    pub fn contains(&self, pt: EcPoint) -> bool {
        match pt {
            EcPoint::Infinity => true,
            EcPoint::Affine { x, y } => x < self.p && y < self.p && mul_mod(y, y, self.p) == self.rhs(x),
        }
    }

    fn check(&self, pt: EcPoint) -> Result<(), PuzzleError> {
        if self.contains(pt) {
            Ok(())
        } else {
            Err(PuzzleError::NotOnCurve(pt))
        }
    }

    pub fn neg(&self, pt: EcPoint) -> EcPoint {
        match pt {
            EcPoint::Infinity => pt,
            EcPoint::Affine { x, y } => EcPoint::affine(x, (self.p - y) % self.p),
        }
    }

    fn add_unchecked(&self, p1: EcPoint, p2: EcPoint) -> EcPoint {
        let p = self.p;
        let (x1, y1, x2, y2) = match (p1, p2) {
            (EcPoint::Infinity, q) | (q, EcPoint::Infinity) => return q,
            (EcPoint::Affine { x: x1, y: y1 }, EcPoint::Affine { x: x2, y: y2 }) => (x1, y1, x2, y2),
        };
        let lambda = if x1 == x2 {
            if (y1 + y2) % p == 0 {
                return EcPoint::Infinity;
            }
            let num = (3 * mul_mod(x1, x1, p) + self.a) % p;
            mul_mod(num, inv_mod(2 * y1 % p, p).expect("y ≠ 0"), p)
        } else {
            let num = (y2 + p - y1) % p;
            mul_mod(num, inv_mod((x2 + p - x1) % p, p).expect("x1 ≠ x2"), p)
        };
        let x3 = (mul_mod(lambda, lambda, p) + 2 * p - x1 - x2) % p;
        let y3 = (mul_mod(lambda, (x1 + p - x3) % p, p) + p - y1) % p;
        EcPoint::affine(x3, y3)
    }

    pub fn add(&self, p1: EcPoint, p2: EcPoint) -> Result<EcPoint, PuzzleError> {
        self.check(p1)?;
        self.check(p2)?;
        Ok(self.add_unchecked(p1, p2))
    }

    pub fn double(&self, pt: EcPoint) -> Result<EcPoint, PuzzleError> {
        self.add(pt, pt)
    }

    fn mul_unchecked(&self, pt: EcPoint, mut k: u64) -> EcPoint {
        let mut acc = EcPoint::Infinity;
        let mut base = pt;
        while k != 0 {
            if k & 1 == 1 {
                acc = self.add_unchecked(acc, base);
            }
            base = self.add_unchecked(base, base);
            k >>= 1;
        }
        acc
    }

    /// `k·P` by double-and-add.
    pub fn scalar_mul(&self, pt: EcPoint, k: u64) -> Result<EcPoint, PuzzleError> {
        self.check(pt)?;
        Ok(self.mul_unchecked(pt, k))
    }

    fn require_small(&self) -> Result<(), PuzzleError> {
        if self.p > MAX_ENUM_PRIME {
            return Err(PuzzleError::BadCurve(format!(
                "p = {} exceeds enumeration limit {MAX_ENUM_PRIME}",
                self.p
            )));
        }
        Ok(())
    }

    /// Order of `P` by repeated addition.
    pub fn point_order(&self, pt: EcPoint) -> Result<u64, PuzzleError> {
        self.check(pt)?;
        self.require_small()?;
        let mut k = 1;
        let mut acc = pt;
        while acc != EcPoint::Infinity {
            acc = self.add_unchecked(acc, pt);
            k += 1;
        }
        Ok(k)
    }

    /// All points, infinity first, then affine points in `(x, y)` order.
    pub fn points(&self) -> Result<Vec<EcPoint>, PuzzleError> {
        self.require_small()?;
        let p = self.p;
        let mut roots: Vec<Vec<u64>> = vec![Vec::new(); p as usize];
        for y in 0..p {
            roots[mul_mod(y, y, p) as usize].push(y);
        }
        let mut out = vec![EcPoint::Infinity];
        for x in 0..p {
            for &y in &roots[self.rhs(x) as usize] {
                out.push(EcPoint::affine(x, y));
            }
        }
        Ok(out)
    }
}

/// `ec_add` as a free function.
pub fn ec_add(p1: EcPoint, p2: EcPoint, curve: &EcCurve) -> Result<EcPoint, PuzzleError> {
    curve.add(p1, p2)
}

pub fn ec_scalar_mul(pt: EcPoint, k: u64, curve: &EcCurve) -> Result<EcPoint, PuzzleError> {
    curve.scalar_mul(pt, k)
}

pub fn ec_point_order(pt: EcPoint, curve: &EcCurve) -> Result<u64, PuzzleError> {
    curve.point_order(pt)
}

fn is_qr_or_zero(u: u64, p: u64) -> bool {
    u == 0 || pow_mod(u, (p - 1) / 2, p) == 1
}

/// `x(2P)` from `((x² − a) / 2y)²`, valid on `b = 0` curves with `y ≠ 0`.
pub fn halving_x(curve: &EcCurve, x: u64, y: u64) -> u64 {
    let p = curve.p;
    let num = (mul_mod(x, x, p) + p - curve.a) % p;
    let t = mul_mod(num, inv_mod(2 * y % p, p).expect("y ≠ 0"), p);
    mul_mod(t, t, p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QrReport {
    pub curve: EcCurve,
    pub generator: EcPoint,
    pub order: u64,
    pub points_checked: usize,
    /// Affine points of `⟨R⟩` whose x-coordinate is a non-residue.
    pub residue_failures: Vec<EcPoint>,
    /// Points where the halving identity disagrees with doubling.
    pub halving_failures: Vec<EcPoint>,
}

impl QrReport {
    pub fn all_pass(&self) -> bool {
        self.residue_failures.is_empty() && self.halving_failures.is_empty()
    }
}

fn check_point(curve: &EcCurve, pt: EcPoint, residue: &mut Vec<EcPoint>, halving: &mut Vec<EcPoint>) {
    if let EcPoint::Affine { x, y } = pt {
        if !is_qr_or_zero(x, curve.p) {
            residue.push(pt);
        }
        if y != 0 {
            let doubled = curve.add_unchecked(pt, pt);
            let ok = matches!(doubled, EcPoint::Affine { x: x2, .. } if x2 == halving_x(curve, x, y));
            if !ok {
                halving.push(pt);
            }
        }
    }
}

/// On `y² = x³ + ax`, every point of the cyclic group generated by an
/// odd-order `R` has a square x-coordinate. Enumerates `⟨R⟩` and checks.
pub fn odd_subgroup_qr_property(curve: &EcCurve, r: EcPoint) -> Result<QrReport, PuzzleError> {
    if curve.b != 0 {
        return Err(PuzzleError::BadCurve("the property concerns curves with b = 0".into()));
    }
    if r == EcPoint::Infinity {
        return Err(PuzzleError::TrivialPoint);
    }
    let order = curve.point_order(r)?;
    if order % 2 == 0 {
        return Err(PuzzleError::EvenOrder(order));
    }
    let (mut residue, mut halving) = (Vec::new(), Vec::new());
    let mut acc = r;
    for _ in 1..order {
        check_point(curve, acc, &mut residue, &mut halving);
        acc = curve.add_unchecked(acc, r);
    }
    Ok(QrReport {
        curve: *curve,
        generator: r,
        order,
        points_checked: order as usize - 1,
        residue_failures: residue,
        halving_failures: halving,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QrSweepReport {
    pub p_max: u64,
    pub curves: usize,
    pub odd_order_points: usize,
    /// `(curve, point)` pairs failing either check, in `(p, a)` order.
    pub violations: Vec<(EcCurve, EcPoint)>,
}

/// Every curve `y² = x³ + ax` with `5 ≤ p ≤ p_max` prime and `1 ≤ a < p`;
/// every point of odd order greater than 1 is checked.
///
/// The odd-order points form the subgroup killed by the odd part `M` of
/// the group order, so membership is tested with one scalar multiplication.
pub fn ec_qr_sweep(p_max: u64) -> Result<QrSweepReport, PuzzleError> {
    if p_max > MAX_ENUM_PRIME {
        return Err(PuzzleError::BadCurve(format!("p_max {p_max} exceeds {MAX_ENUM_PRIME}")));
    }
    let pairs: Vec<(u64, u64)> = (5..=p_max)
        .filter(|&p| is_prime(p))
        .flat_map(|p| (1..p).map(move |a| (p, a)))
        .collect();
    let per_curve: Vec<(usize, Vec<(EcCurve, EcPoint)>)> = pairs
        .par_iter()
        .map(|&(p, a)| {
            let curve = EcCurve::new(p, a, 0).expect("a ≠ 0 keeps the curve smooth");
            let pts = curve.points().expect("p within limit");
            let n = pts.len() as u64;
            let odd = n >> n.trailing_zeros();
            let (mut residue, mut halving) = (Vec::new(), Vec::new());
            let mut count = 0;
            for &pt in &pts[1..] {
                if curve.mul_unchecked(pt, odd) == EcPoint::Infinity {
                    count += 1;
                    check_point(&curve, pt, &mut residue, &mut halving);
                }
            }
            residue.extend(halving);
            residue.sort();
            residue.dedup();
            (count, residue.into_iter().map(|pt| (curve, pt)).collect())
        })
        .collect();
    let mut report = QrSweepReport {
        p_max,
        curves: pairs.len(),
        odd_order_points: 0,
        violations: Vec::new(),
    };
    for (count, v) in per_curve {
        report.odd_order_points += count;
        report.violations.extend(v);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_curves() -> Vec<EcCurve> {
        let mut out = Vec::new();
        for p in [5u64, 7, 11, 13] {
            for a in 0..p {
                for b in 0..p {
                    if let Ok(c) = EcCurve::new(p, a, b) {
                        out.push(c);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn identity_and_inverse() {
        let c = EcCurve::new(7, 1, 0).unwrap();
        for pt in c.points().unwrap() {
            assert_eq!(c.add(pt, EcPoint::Infinity).unwrap(), pt);
            assert_eq!(c.add(pt, c.neg(pt)).unwrap(), EcPoint::Infinity);
        }
    }

    #[test]
    fn group_axioms_exhaustive() {
        for c in small_curves() {
            let pts = c.points().unwrap();
            for &p in &pts {
                for &q in &pts {
                    let pq = c.add(p, q).unwrap();
                    assert!(c.contains(pq));
                    assert_eq!(pq, c.add(q, p).unwrap());
                    if c.p <= 7 {
                        for &s in &pts {
                            assert_eq!(
                                c.add(pq, s).unwrap(),
                                c.add(p, c.add(q, s).unwrap()).unwrap(),
                                "{c:?}"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lagrange_and_scalar_mul() {
        for c in small_curves() {
            let pts = c.points().unwrap();
            let n = pts.len() as u64;
            for &pt in &pts {
                let ord = c.point_order(pt).unwrap();
                assert_eq!(n % ord, 0);
                assert_eq!(c.scalar_mul(pt, ord).unwrap(), EcPoint::Infinity);
                let mut acc = EcPoint::Infinity;
                for k in 0..ord + 3 {
                    assert_eq!(c.scalar_mul(pt, k).unwrap(), acc);
                    acc = c.add(acc, pt).unwrap();
                }
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(EcCurve::new(9, 1, 0).is_err());
        assert!(EcCurve::new(3, 1, 0).is_err());
        assert!(EcCurve::new(7, 0, 0).is_err());
        let c = EcCurve::new(7, 1, 0).unwrap();
        assert!(matches!(
            c.add(EcPoint::affine(1, 1), EcPoint::Infinity),
            Err(PuzzleError::NotOnCurve(_))
        ));
        assert_eq!(
            odd_subgroup_qr_property(&c, EcPoint::Infinity),
            Err(PuzzleError::TrivialPoint)
        );
        // (0, 0) has order 2.
        assert_eq!(
            odd_subgroup_qr_property(&c, EcPoint::affine(0, 0)),
            Err(PuzzleError::EvenOrder(2))
        );
    }

    #[test]
    fn halving_matches_double() {
        let c = EcCurve::new(13, 2, 0).unwrap();
        for pt in c.points().unwrap() {
            if let EcPoint::Affine { x, y } = pt {
                if y != 0 {
                    let EcPoint::Affine { x: x2, .. } = c.double(pt).unwrap() else {
                        panic!("2P = O with y ≠ 0");
                    };
                    assert_eq!(halving_x(&c, x, y), x2);
                }
            }
        }
    }

    #[test]
    fn single_generator_report() {
        let c = EcCurve::new(11, 3, 0).unwrap();
        let r = c
            .points()
            .unwrap()
            .into_iter()
            .find(|&pt| pt != EcPoint::Infinity && c.point_order(pt).unwrap() % 2 == 1);
        if let Some(r) = r {
            let rep = odd_subgroup_qr_property(&c, r).unwrap();
            assert!(rep.all_pass());
            assert_eq!(rep.points_checked as u64, rep.order - 1);
        }
    }

    #[test]
    fn sweep_small_matches_per_generator() {
        let rep = ec_qr_sweep(31).unwrap();
        assert!(rep.violations.is_empty());
        let mut odd = 0;
        for p in [5u64, 7, 11, 13, 17, 19, 23, 29, 31] {
            for a in 1..p {
                let c = EcCurve::new(p, a, 0).unwrap();
                for pt in c.points().unwrap().into_iter().skip(1) {
                    if c.point_order(pt).unwrap() % 2 == 1 {
                        odd += 1;
                        assert!(odd_subgroup_qr_property(&c, pt).unwrap().all_pass());
                    }
                }
            }
        }
        assert_eq!(odd, rep.odd_order_points);
    }
}
