//! Möbius transformations of ℙ¹(ℚ) and the two geometric constructions the
//! quadratic toolkit relies on: the unique involution swapping two given
//! pairs of points, and the image of a fifth point under that involution.

use num_traits::{One, Zero};

use crate::error::Error;
use crate::point::ProjPoint;
use crate::ratfunc::RatFunc;
use crate::Q;

/// A fractional-linear map t ↦ (at + b)/(ct + d) with ad − bc ≠ 0, stored
/// with the first nonzero matrix entry scaled to 1 so equality is equality
/// of maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusMap {
    a: Q,
    b: Q,
    c: Q,
    d: Q,
}

impl MobiusMap {
    pub fn new(a: Q, b: Q, c: Q, d: Q) -> Result<Self, Error> {
        let det = &a * &d - &b * &c;
        if det.is_zero() {
            return Err(Error::DegeneratePoint {
                context: "fractional-linear map with zero determinant".into(),
            });
        }
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|x| !x.is_zero())
            .expect("nonzero matrix")
            .clone();
        Ok(MobiusMap {
            a: &a / &lead,
            b: &b / &lead,
            c: &c / &lead,
            d: &d / &lead,
        })
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: Q::one(),
            b: Q::zero(),
            c: Q::zero(),
            d: Q::one(),
        }
    }

    pub fn entries(&self) -> (&Q, &Q, &Q, &Q) {
        (&self.a, &self.b, &self.c, &self.d)
    }

    pub fn apply(&self, p: &ProjPoint) -> ProjPoint {
        match p {
            ProjPoint::Finite(x) => {
                let den = &self.c * x + &self.d;
                if den.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite((&self.a * x + &self.b) / den)
                }
            }
            ProjPoint::Infinity => {
                if self.c.is_zero() {
                    ProjPoint::Infinity
                } else {
                    ProjPoint::Finite(&self.a / &self.c)
                }
            }
        }
    }

    /// Matrix product self ∘ other (apply `other` first).
    pub fn compose(&self, other: &MobiusMap) -> MobiusMap {
        MobiusMap::new(
            &self.a * &other.a + &self.b * &other.c,
            &self.a * &other.b + &self.b * &other.d,
            &self.c * &other.a + &self.d * &other.c,
            &self.c * &other.b + &self.d * &other.d,
        )
        .expect("product of invertible maps is invertible")
    }

    pub fn inverse(&self) -> MobiusMap {
        MobiusMap::new(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
        .expect("inverse of invertible map")
    }

    /// True iff the map squares to the identity (its matrix squares to a
    /// scalar multiple of the identity).
    pub fn is_involution(&self) -> bool {
        let sq = self.compose(self);
        sq == MobiusMap::identity()
    }

    /// The same map as a rational function of t.
    pub fn to_ratfunc(&self) -> RatFunc {
        RatFunc::t()
            .compose_linear_fractional(&self.a, &self.b, &self.c, &self.d)
            .expect("fractional-linear substitution into t")
    }
}

/// One homogeneous linear condition on the matrix entries (α, β, γ, δ)
/// expressing τ(x) = w.
fn condition_row(x: &ProjPoint, w: &ProjPoint) -> [Q; 4] {
    match (x, w) {
        (ProjPoint::Finite(x), ProjPoint::Finite(w)) => {
            [x.clone(), Q::one(), -(w * x), -w.clone()]
        }
        (ProjPoint::Infinity, ProjPoint::Finite(w)) => {
            [Q::one(), Q::zero(), -w.clone(), Q::zero()]
        }
        (ProjPoint::Finite(x), ProjPoint::Infinity) => {
            [Q::zero(), Q::zero(), x.clone(), Q::one()]
        }
        (ProjPoint::Infinity, ProjPoint::Infinity) => {
            [Q::zero(), Q::zero(), Q::one(), Q::zero()]
        }
    }
}

/// Exact nullspace basis of a small system with four unknowns.
fn nullspace4(rows: &[[Q; 4]]) -> Vec<[Q; 4]> {
    let mut m: Vec<[Q; 4]> = rows.to_vec();
    let mut pivot_cols = Vec::new();
    let mut r = 0usize;
    for col in 0..4 {
        let Some(pr) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, pr);
        let inv = Q::one() / m[r][col].clone();
        for entry in m[r].iter_mut() {
            *entry = &*entry * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                for cc in 0..4 {
                    m[i][cc] = &m[i][cc] - &(&factor * &m[r][cc]);
                }
            }
        }
        pivot_cols.push(col);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    let free_cols: Vec<usize> = (0..4).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis = Vec::new();
    for &fc in &free_cols {
        let mut v = [Q::zero(), Q::zero(), Q::zero(), Q::zero()];
        v[fc] = Q::one();
        for (ri, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -m[ri][fc].clone();
        }
        basis.push(v);
    }
    basis
}

/// The involution of ℙ¹ swapping a ↔ b and c ↔ d, found by solving the
/// homogeneous linear conditions on its matrix.  When the first three
/// conditions leave more than one degree of freedom, the fourth (τ(d) = c)
/// is added.  The candidate is then verified outright: invertibility, all
/// four images, and the involution property.
pub fn involution_swapping(
    a: &ProjPoint,
    b: &ProjPoint,
    c: &ProjPoint,
    d: &ProjPoint,
) -> Result<MobiusMap, Error> {
    let mut rows = vec![
        condition_row(a, b),
        condition_row(b, a),
        condition_row(c, d),
    ];
    let mut basis = nullspace4(&rows);
    if basis.len() > 1 {
        rows.push(condition_row(d, c));
        basis = nullspace4(&rows);
    }
    if basis.len() != 1 {
        return Err(Error::NoInvolution);
    }
    let [va, vb, vc, vd] = basis.into_iter().next().expect("one basis vector");
    let m = MobiusMap::new(va, vb, vc, vd).map_err(|_| Error::NoInvolution)?;
    let swaps = m.apply(a) == *b && m.apply(b) == *a && m.apply(c) == *d && m.apply(d) == *c;
    if !swaps || !m.is_involution() {
        return Err(Error::NoInvolution);
    }
    Ok(m)
}

/// Image of `e` under the involution swapping a ↔ b and c ↔ d.  The five
/// points must be pairwise distinct.
pub fn five_point(
    a: &ProjPoint,
    b: &ProjPoint,
    c: &ProjPoint,
    d: &ProjPoint,
    e: &ProjPoint,
) -> Result<ProjPoint, Error> {
    let pts = [a, b, c, d, e];
    for i in 0..5 {
        for j in (i + 1)..5 {
            if pts[i] == pts[j] {
                return Err(Error::DuplicatePoints {
                    context: "five-point construction needs pairwise distinct points".into(),
                });
            }
        }
    }
    Ok(involution_swapping(a, b, c, d)?.apply(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qi;

    fn fin(n: i64) -> ProjPoint {
        ProjPoint::finite(qi(n))
    }

    fn frac(n: i64, d: i64) -> ProjPoint {
        ProjPoint::finite(crate::q(n, d))
    }

    const INF: ProjPoint = ProjPoint::Infinity;

    #[test]
    fn involution_zero_infinity_one_minus_one() {
        // Swapping 0 ↔ ∞ and 1 ↔ −1 forces τ(t) = −1/t.
        let m = involution_swapping(&fin(0), &INF, &fin(1), &fin(-1)).unwrap();
        assert_eq!(m.to_ratfunc(), "-1/t".parse().unwrap());
        assert_eq!(m.apply(&fin(2)), frac(-1, 2));
        assert!(m.is_involution());
    }

    #[test]
    fn involution_with_pair_through_infinity() {
        // Swapping 1 ↔ ∞ and 0 ↔ 2 gives τ(t) = (t − 2)/(t − 1).
        let m = involution_swapping(&fin(1), &INF, &fin(0), &fin(2)).unwrap();
        assert_eq!(m.to_ratfunc(), "(t - 2)/(t - 1)".parse().unwrap());
        // Swapping 2 ↔ ∞ and 0 ↔ 1 gives τ(t) = (2t − 2)/(t − 2).
        let m2 = involution_swapping(&fin(2), &INF, &fin(0), &fin(1)).unwrap();
        assert_eq!(m2.to_ratfunc(), "(2*t - 2)/(t - 2)".parse().unwrap());
        // Swapping 0 ↔ ∞ and 1 ↔ 2 gives τ(t) = 2/t.
        let m3 = involution_swapping(&fin(0), &INF, &fin(1), &fin(2)).unwrap();
        assert_eq!(m3.to_ratfunc(), "2/t".parse().unwrap());
    }

    #[test]
    fn involution_needs_fourth_condition_when_underdetermined() {
        // a ↔ b with c ↔ d chosen so the first three rows are rank-deficient:
        // swapping 0 ↔ 0 is not allowed, so use a fixed-point-style pair where
        // c = d.  τ must fix c, e.g. swap 1 ↔ −1 and fix 0: τ(t) = −t.
        let m = involution_swapping(&fin(1), &fin(-1), &fin(0), &fin(0)).unwrap();
        assert_eq!(m.apply(&fin(5)), fin(-5));
        assert_eq!(m.apply(&INF), INF);
    }

    #[test]
    fn affine_involution_through_infinity() {
        // Swapping 0 ↔ 2 and fixing ∞ forces t ↦ 2 − t, which fixes 1.
        let m = involution_swapping(&fin(0), &fin(2), &INF, &INF).unwrap();
        assert_eq!(m.to_ratfunc(), "2 - t".parse().unwrap());
        assert_eq!(m.apply(&fin(1)), fin(1));
    }

    #[test]
    fn no_involution_for_contradictory_pairs() {
        // τ(0) = 1, τ(1) = 0, τ(0) = 2 is contradictory.
        assert_eq!(
            involution_swapping(&fin(0), &fin(1), &fin(0), &fin(2)),
            Err(Error::NoInvolution)
        );
    }

    #[test]
    fn five_point_images() {
        assert_eq!(
            five_point(&fin(0), &INF, &fin(1), &fin(-1), &fin(2)).unwrap(),
            frac(-1, 2)
        );
        // Under τ(t) = (t − 2)/(t − 1): 3 ↦ 1/2.
        assert_eq!(
            five_point(&fin(1), &INF, &fin(0), &fin(2), &fin(3)).unwrap(),
            frac(1, 2)
        );
        // Under τ(t) = (2t − 2)/(t − 2): 3 ↦ 4.
        assert_eq!(
            five_point(&fin(2), &INF, &fin(0), &fin(1), &fin(3)).unwrap(),
            fin(4)
        );
        // The image can be ∞: under t ↦ 2 − t with ambient pair through ∞ the
        // involution swapping 0 ↔ 2 and 1 ↔ 1 fails distinctness, so use
        // τ = (t − 2)/(t − 1) sending 1 ↦ ∞ — but 1 is an argument point.
        // Instead: swapping 0 ↔ 3 and 1 ↔ 2 gives t ↦ 3 − t, sending ∞ ↦ ∞
        // only; to land at ∞ apply τ(t) = 6/t (swap 1 ↔ 6, 2 ↔ 3) to 0: ∞.
        assert_eq!(
            five_point(&fin(1), &fin(6), &fin(2), &fin(3), &fin(0)).unwrap(),
            INF
        );
    }

    #[test]
    fn five_point_rejects_repeats() {
        assert!(matches!(
            five_point(&fin(0), &fin(1), &fin(2), &fin(3), &fin(0)),
            Err(Error::DuplicatePoints { .. })
        ));
    }

    #[test]
    fn involutions_randomized_swap_and_square() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(402);
        let mut built = 0;
        while built < 40 {
            let mut pts: Vec<i64> = Vec::new();
            while pts.len() < 4 {
                let c = rng.gen_range(-12..12);
                if !pts.contains(&c) {
                    pts.push(c);
                }
            }
            let (a, b, c, d) = (fin(pts[0]), fin(pts[1]), fin(pts[2]), fin(pts[3]));
            let Ok(m) = involution_swapping(&a, &b, &c, &d) else {
                continue;
            };
            assert!(m.is_involution());
            assert_eq!(m.apply(&a), b);
            assert_eq!(m.apply(&b), a);
            assert_eq!(m.apply(&c), d);
            assert_eq!(m.apply(&d), c);
            // Composing with itself fixes random points.
            let x = fin(rng.gen_range(-50..50));
            assert_eq!(m.apply(&m.apply(&x)), x);
            built += 1;
        }
    }

    #[test]
    fn compose_and_inverse() {
        let m = MobiusMap::new(qi(1), qi(-2), qi(1), qi(-1)).unwrap();
        let id = m.compose(&m.inverse());
        assert_eq!(id, MobiusMap::identity());
        assert_eq!(id.apply(&fin(7)), fin(7));
    }
}
