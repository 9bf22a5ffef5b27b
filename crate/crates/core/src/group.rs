//! The dihedral group `W_n = ⟨ξ, η⟩` acting on the uniformization sphere.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::{cis, cpowi, cx, real, Cx, Real};
use crate::sphere::SpherePoint;
use crate::uniformization::{Cone, Uniformization};

/// Projective tolerance for deciding that two Möbius maps coincide.
pub const MAP_EQ_TOL: f64 = 1e-10;
/// Distance to a pole of `x` or `y` below which an orbit sum is refused.
pub const ORBIT_POLE_TOL: f64 = 1e-12;

/// `z ↦ (az + b)/(cz + d)`, normalized so the largest coefficient has modulus 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap<T> {
    pub a: Cx<T>,
    pub b: Cx<T>,
    pub c: Cx<T>,
    pub d: Cx<T>,
}

impl<T: Real> MobiusMap<T> {
    pub fn new(a: Cx<T>, b: Cx<T>, c: Cx<T>, d: Cx<T>) -> Self {
        let m = [a, b, c, d]
            .iter()
            .map(|v| v.norm())
            .fold(T::zero(), T::max);
        MobiusMap {
            a: a / m,
            b: b / m,
            c: c / m,
            d: d / m,
        }
    }

    pub fn identity() -> Self {
        let (o, z) = (real(T::one()), real(T::zero()));
        MobiusMap::new(o, z, z, o)
    }

    pub fn determinant(&self) -> Cx<T> {
        self.a * self.d - self.b * self.c
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        MobiusMap::new(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    pub fn apply(&self, z: SpherePoint<T>) -> SpherePoint<T> {
        let tiny = T::lit(crate::sphere::POLE_EPS);
        match z {
            SpherePoint::Infinity => {
                if self.c.norm() < tiny {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite(self.a / self.c)
                }
            }
            SpherePoint::Finite(z) => {
                let den = self.c * z + self.d;
                if den.norm() < tiny {
                    SpherePoint::Infinity
                } else {
                    SpherePoint::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// Finite-point application without pole handling.
    #[inline]
    pub fn apply_finite(&self, z: Cx<T>) -> Cx<T> {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    /// Projective equality: images of `0`, `1`, `∞` agree in the chordal metric.
    pub fn approx_eq(&self, other: &Self, tol: T) -> bool {
        let probes = [
            SpherePoint::Finite(real(T::zero())),
            SpherePoint::Finite(real(T::one())),
            SpherePoint::Infinity,
        ];
        probes
            .iter()
            .all(|&p| self.apply(p).chordal(&other.apply(p)) < tol)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Xi,
    Eta,
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Generator::Xi => "xi",
            Generator::Eta => "eta",
        })
    }
}

/// A group element with a minimal word; `word[0] ∘ word[1] ∘ …`.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupElement<T> {
    pub map: MobiusMap<T>,
    pub word: Vec<Generator>,
}

impl<T: Real> GroupElement<T> {
    pub fn length(&self) -> usize {
        self.word.len()
    }

    /// `(−1)^{l(w)}`.
    pub fn sign(&self) -> i32 {
        if self.word.len() % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn word_string(&self) -> String {
        if self.word.is_empty() {
            return "1".into();
        }
        self.word
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join("*")
    }

    /// Every element is `z ↦ c·z` or `z ↦ c/z` with `|c| = 1`; returns the
    /// image of a cone under this action.
    pub fn apply_cone(&self, cone: &Cone<T>) -> Cone<T> {
        let m = &self.map;
        if m.b.norm() < T::lit(MAP_EQ_TOL) {
            let phi = (m.a / m.d).arg();
            Cone::new(cone.theta1 + phi, cone.theta2 + phi)
        } else {
            let phi = (m.b / m.c).arg();
            Cone::new(phi - cone.theta2, phi - cone.theta1)
        }
    }
}

fn check_order(n: i64) -> Result<u32> {
    if n < 3 {
        Err(Error::InvalidOrder(n))
    } else {
        Ok(n as u32)
    }
}

/// `ξ(z) = 1/z` and `η(z) = e^{−2iπ/n}/z`.
pub fn generators<T: Real>(n: i64) -> Result<(GroupElement<T>, GroupElement<T>)> {
    let n = check_order(n)?;
    let (o, z) = (real(T::one()), real(T::zero()));
    let omega = cis(-T::TAU() / T::count(n as usize));
    Ok((
        GroupElement {
            map: MobiusMap::new(z, o, o, z),
            word: vec![Generator::Xi],
        },
        GroupElement {
            map: MobiusMap::new(z, omega, o, z),
            word: vec![Generator::Eta],
        },
    ))
}

/// Breadth-first closure of `⟨ξ, η⟩`. Words are minimal by construction.
pub fn enumerate_group<T: Real>(n: i64) -> Result<Vec<GroupElement<T>>> {
    let (xi, eta) = generators::<T>(n)?;
    let expected = 2 * n as usize;
    let tol = T::lit(MAP_EQ_TOL);
    let mut elems = vec![GroupElement {
        map: MobiusMap::identity(),
        word: vec![],
    }];
    let mut frontier = 0;
    while frontier < elems.len() {
        let base = elems[frontier].clone();
        frontier += 1;
        for g in [&xi, &eta] {
            let map = g.map.compose(&base.map);
            if elems.iter().any(|e| e.map.approx_eq(&map, tol)) {
                continue;
            }
            let mut word = g.word.clone();
            word.extend_from_slice(&base.word);
            elems.push(GroupElement { map, word });
            if elems.len() > 2 * expected {
                return Err(Error::GroupClosure {
                    expected,
                    found: elems.len(),
                });
            }
        }
    }
    if elems.len() != expected {
        return Err(Error::GroupClosure {
            expected,
            found: elems.len(),
        });
    }
    Ok(elems)
}

/// `x(w)^{i0} · y(w)^{j0}` with a pole check.
fn monomial<T: Real>(u: &Uniformization<T>, w: Cx<T>, i0: u32, j0: u32) -> Result<Cx<T>> {
    let tol = T::lit(ORBIT_POLE_TOL);
    for p in [u.z0, u.z0.conj()] {
        let d = (w - p).norm();
        if d < tol {
            return Err(Error::PoleCollision {
                distance: d.as_f64(),
                re: w.re.as_f64(),
                im: w.im.as_f64(),
            });
        }
    }
    Ok(cpowi(u.x(w), i0) * cpowi(u.y(w), j0))
}

/// `Σ_{w ∈ W_n} (−1)^{l(w)} x^{i0} y^{j0}(w(z))` in rotation form
/// `Σ_k [F(ω^k z) − F(ω^k / z)]`, `ω = e^{−2iπ/n}`.
pub fn signed_orbit_sum<T: Real>(
    u: &Uniformization<T>,
    i0: u32,
    j0: u32,
    z: Cx<T>,
) -> Result<Cx<T>> {
    if z.norm() == T::zero() {
        return Ok(real(T::zero()));
    }
    let n = u.n();
    let omega = cis(-T::TAU() / T::count(n as usize));
    let zi = z.inv();
    let mut acc = real(T::zero());
    let mut rot = real(T::one());
    for _ in 0..n {
        acc = acc + monomial(u, rot * z, i0, j0)? - monomial(u, rot * zi, i0, j0)?;
        rot = rot * omega;
    }
    Ok(acc)
}

/// The same sum evaluated term by term over an explicit element list.
pub fn signed_orbit_sum_direct<T: Real>(
    u: &Uniformization<T>,
    group: &[GroupElement<T>],
    i0: u32,
    j0: u32,
    z: Cx<T>,
) -> Result<Cx<T>> {
    let mut acc = real(T::zero());
    for g in group {
        let w = g.map.apply_finite(z);
        let term = monomial(u, w, i0, j0)?;
        acc = if g.sign() > 0 { acc + term } else { acc - term };
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConeSign {
    Plus,
    Minus,
}

/// `D_k^+ = Λ((k−1)π/n, kπ/n)` and `D_k^− = Λ(−(k+1)π/n, −kπ/n)`.
///
/// At `k = 0` both families give `Λ(−π/n, 0)`, which is `D0`.
pub fn cones_dk<T: Real>(n: i64, k: i64, sign: ConeSign) -> Result<Cone<T>> {
    let n = check_order(n)?;
    if k < 0 || k > n as i64 {
        return Err(Error::ConeIndex { k, n });
    }
    let a = T::PI() / T::count(n as usize);
    let kf = T::count(k as usize);
    Ok(match sign {
        ConeSign::Plus => Cone::new((kf - T::one()) * a, kf * a),
        ConeSign::Minus => Cone::new(-(kf + T::one()) * a, -kf * a),
    })
}

/// Fundamental domain `D0 = Λ(−π/n, 0)`.
pub fn fundamental_domain<T: Real>(n: i64) -> Result<Cone<T>> {
    cones_dk(n, 0, ConeSign::Plus)
}

/// Cone images under `ξ`: `Λ(−θ2, −θ1)`.
pub fn xi_cone<T: Real>(c: &Cone<T>) -> Cone<T> {
    Cone::new(-c.theta2, -c.theta1)
}

/// Cone images under `η`: `Λ(−θ2 − 2π/n, −θ1 − 2π/n)`.
pub fn eta_cone<T: Real>(n: u32, c: &Cone<T>) -> Cone<T> {
    let s = T::TAU() / T::count(n as usize);
    Cone::new(-c.theta2 - s, -c.theta1 - s)
}

/// Result of the rational-angle test on `p10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Finiteness {
    /// `p10 = sin(qπ/n)²/2`, group of order `2n`. Only `q = 1` admits the
    /// fundamental-domain continuation.
    Finite { n: u32, q: u32, order: u32 },
    Infinite,
}

impl Finiteness {
    pub fn has_fundamental_domain_identity(&self) -> bool {
        matches!(self, Finiteness::Finite { q: 1, .. })
    }
}

pub const MAX_DENOMINATOR: u32 = 64;
pub const RATIONAL_TOL: f64 = 1e-10;

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Detects `arcsin(√(2·p10))/π = q/n` with `n ≤ 64`, `gcd(q, n) = 1`, `q < n/2`.
pub fn finiteness_criterion<T: Real>(p10: T) -> Result<Finiteness> {
    if !(p10 > T::zero() && p10 < T::lit(0.5)) {
        return Err(Error::InvalidArgument(format!(
            "p10 must lie in (0, 1/2), got {p10}"
        )));
    }
    let ratio = ((T::lit(2.0) * p10).sqrt().asin() / T::PI()).as_f64();
    for n in 3..=MAX_DENOMINATOR {
        for q in 1..n {
            if 2 * q >= n {
                break;
            }
            if gcd(q, n) != 1 {
                continue;
            }
            if (ratio - q as f64 / n as f64).abs() < RATIONAL_TOL {
                return Ok(Finiteness::Finite { n, q, order: 2 * n });
            }
        }
    }
    Ok(Finiteness::Infinite)
}

/// Lengths of `(ξη)^k` and `(ηξ)^k` are `2k`; `ξ(ηξ)^k`, `η(ξη)^k` have `2k+1`
/// (reduced modulo the dihedral relation). Returns the multiset of lengths
/// the enumeration must reproduce.
pub fn dihedral_length_profile(n: u32) -> Vec<usize> {
    let n = n as usize;
    let mut v = vec![0];
    for len in 1..n {
        v.push(len);
        v.push(len);
    }
    v.push(n);
    v.sort_unstable();
    v
}

/// Convenience for checks that need a fixed generic test point.
pub fn generic_points<T: Real>() -> [Cx<T>; 3] {
    [
        cx(T::lit(0.3137), T::lit(0.2718)),
        cx(T::lit(-1.4142), T::lit(0.5772)),
        cx(T::lit(2.2360), T::lit(-1.7320)),
    ]
}
