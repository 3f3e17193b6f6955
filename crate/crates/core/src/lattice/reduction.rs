//! Exact Gram–Schmidt orthogonalization, LLL reduction and Fincke–Pohst
//! enumeration of lattice points near a target.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::normal_form::dot;
use crate::realnum::floor;

pub fn to_rational(v: &[BigInt]) -> Vec<BigRational> {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

fn rdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Nearest integer, ties rounded up.
pub fn round(q: &BigRational) -> BigInt {
    floor(&(q + BigRational::new(BigInt::one(), BigInt::from(2))))
}

/// Gram–Schmidt data of linearly independent integer vectors `b₀ … b_{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSchmidt {
    /// Orthogonalized vectors `b*ᵢ`.
    pub vectors: Vec<Vec<BigRational>>,
    /// `μ_{i,j} = ⟨bᵢ, b*ⱼ⟩ / ‖b*ⱼ‖²` for `j < i`.
    pub mu: Vec<Vec<BigRational>>,
    /// Squared norms `‖b*ᵢ‖²`.
    pub norms_sq: Vec<BigRational>,
}

impl GramSchmidt {
    /// Panics on linearly dependent input.
    pub fn new(basis: &[Vec<BigInt>]) -> Self {
        let k = basis.len();
        let mut vectors: Vec<Vec<BigRational>> = Vec::with_capacity(k);
        let mut mu = vec![vec![BigRational::zero(); k]; k];
        let mut norms_sq: Vec<BigRational> = Vec::with_capacity(k);
        for i in 0..k {
            let bi = to_rational(&basis[i]);
            let mut star = bi.clone();
            for j in 0..i {
                let m = rdot(&bi, &vectors[j]) / &norms_sq[j];
                for (s, v) in star.iter_mut().zip(&vectors[j]) {
                    *s -= &m * v;
                }
                mu[i][j] = m;
            }
            let n = rdot(&star, &star);
            assert!(!n.is_zero(), "Gram–Schmidt input is linearly dependent");
            vectors.push(star);
            norms_sq.push(n);
        }
        GramSchmidt { vectors, mu, norms_sq }
    }

    pub fn len(&self) -> usize {
        self.norms_sq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms_sq.is_empty()
    }

    /// Product of the squared norms, i.e. the squared volume of the span.
    pub fn volume_sq(&self) -> BigRational {
        self.norms_sq.iter().fold(BigRational::one(), |acc, x| acc * x)
    }
}

fn sub_scaled(target: &mut [BigInt], source: &[BigInt], q: &BigInt) {
    for (t, s) in target.iter_mut().zip(source) {
        *t -= q * s;
    }
}

/// Size-reduces `basis[k]` against `basis[0..k]`, keeping `gs.mu` current.
fn size_reduce(basis: &mut [Vec<BigInt>], gs: &mut GramSchmidt, k: usize) {
    for j in (0..k).rev() {
        let q = round(&gs.mu[k][j]);
        if q.is_zero() {
            continue;
        }
        let (lo, hi) = basis.split_at_mut(k);
        sub_scaled(&mut hi[0], &lo[j], &q);
        let qr = BigRational::from_integer(q);
        for i in 0..j {
            let delta = &qr * &gs.mu[j][i];
            gs.mu[k][i] -= delta;
        }
        gs.mu[k][j] -= &qr;
    }
}

/// Exact LLL reduction with `δ = 3/4`. Input rows must be independent.
pub fn lll(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut b = basis.to_vec();
    if b.len() < 2 {
        return b;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut gs = GramSchmidt::new(&b);
    let mut k = 1;
    while k < b.len() {
        size_reduce(&mut b, &mut gs, k);
        let m = &gs.mu[k][k - 1];
        let rhs = (&delta - m * m) * &gs.norms_sq[k - 1];
        if gs.norms_sq[k] >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            gs = GramSchmidt::new(&b);
            k = (k - 1).max(1);
        }
    }
    b
}

/// Lattice points `Σ xᵢ bᵢ` within a squared radius of a target, enumerated
/// exactly over the Gram–Schmidt tree.
pub(crate) struct Enumerator<'a> {
    basis: &'a [Vec<BigInt>],
    gs: &'a GramSchmidt,
}

/// One enumerated lattice point: coefficient vector and squared distance.
pub(crate) type Hit = (Vec<BigInt>, BigRational);

impl<'a> Enumerator<'a> {
    pub fn new(basis: &'a [Vec<BigInt>], gs: &'a GramSchmidt) -> Self {
        Enumerator { basis, gs }
    }

    /// Coordinates of `t` along the Gram–Schmidt vectors. `t` must lie in the
    /// span of the basis.
    fn gs_coordinates(&self, t: &[BigInt]) -> Vec<BigRational> {
        let tr = to_rational(t);
        self.gs
            .vectors
            .iter()
            .zip(&self.gs.norms_sq)
            .map(|(v, n)| rdot(&tr, v) / n)
            .collect()
    }

    /// Greedy nearest-plane coefficients and their squared distance to `t`.
    pub fn babai(&self, t: &[BigInt]) -> Hit {
        let tau = self.gs_coordinates(t);
        let k = self.basis.len();
        let mut x = vec![BigInt::zero(); k];
        let mut dist = BigRational::zero();
        for i in (0..k).rev() {
            let c = self.center(&tau, &x, i);
            x[i] = round(&c);
            let diff = BigRational::from_integer(x[i].clone()) - c;
            dist += &diff * &diff * &self.gs.norms_sq[i];
        }
        (x, dist)
    }

    fn center(&self, tau: &[BigRational], x: &[BigInt], i: usize) -> BigRational {
        let mut c = tau[i].clone();
        for j in i + 1..x.len() {
            if !x[j].is_zero() {
                c -= BigRational::from_integer(x[j].clone()) * &self.gs.mu[j][i];
            }
        }
        c
    }

    /// All points with squared distance to `t` at most `radius_sq`. With
    /// `shrink`, the radius tightens to the best distance found so far and
    /// only points at the final minimum are guaranteed to be present.
    pub fn within(&self, t: &[BigInt], radius_sq: BigRational, exclude_zero: bool, shrink: bool) -> Vec<Hit> {
        let tau = self.gs_coordinates(t);
        let k = self.basis.len();
        let mut state = Search {
            tau,
            radius: radius_sq,
            x: vec![BigInt::zero(); k],
            hits: Vec::new(),
            exclude_zero,
            shrink,
        };
        if k > 0 {
            self.descend(&mut state, k - 1, BigRational::zero());
        } else if !exclude_zero {
            state.hits.push((Vec::new(), BigRational::zero()));
        }
        let radius = state.radius;
        state.hits.retain(|(_, d)| d <= &radius);
        state.hits
    }

    fn descend(&self, st: &mut Search, level: usize, partial: BigRational) {
        let c = self.center(&st.tau, &st.x, level);
        let bn = &self.gs.norms_sq[level];
        let start = floor(&c);
        // Walk down from floor(c), then up from floor(c)+1; each direction
        // stops at the first integer outside the radius.
        for dir in [-1i32, 1] {
            let mut xi = if dir < 0 { start.clone() } else { &start + 1 };
            loop {
                let diff = BigRational::from_integer(xi.clone()) - &c;
                let here = &partial + &diff * &diff * bn;
                if here > st.radius {
                    break;
                }
                st.x[level] = xi.clone();
                if level == 0 {
                    let zero = st.x.iter().all(Zero::is_zero);
                    if !(zero && st.exclude_zero) {
                        if st.shrink && here < st.radius {
                            st.radius = here.clone();
                        }
                        st.hits.push((st.x.clone(), here));
                    }
                } else {
                    self.descend(st, level - 1, here);
                }
                if dir < 0 {
                    xi -= 1;
                } else {
                    xi += 1;
                }
            }
        }
        st.x[level] = BigInt::zero();
    }

    pub fn point(&self, coeffs: &[BigInt]) -> Vec<BigInt> {
        let dim = self.basis.first().map_or(0, Vec::len);
        let mut p = vec![BigInt::zero(); dim];
        for (c, b) in coeffs.iter().zip(self.basis) {
            if c.is_zero() {
                continue;
            }
            for (pi, bi) in p.iter_mut().zip(b) {
                *pi += c * bi;
            }
        }
        p
    }
}

struct Search {
    tau: Vec<BigRational>,
    radius: BigRational,
    x: Vec<BigInt>,
    hits: Vec<Hit>,
    exclude_zero: bool,
    shrink: bool,
}

/// Normalizes the sign so that the first nonzero coordinate is positive.
pub fn canonical_sign(v: &mut [BigInt]) {
    if v.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
        for x in v.iter_mut() {
            *x = -&*x;
        }
    }
}

/// Shortest nonzero vector of the lattice spanned by the (independent) rows,
/// with the lexicographically smallest sign-normalized representative among
/// ties.
pub fn shortest_vector(basis: &[Vec<BigInt>]) -> Vec<BigInt> {
    assert!(!basis.is_empty(), "shortest vector of the zero lattice");
    let reduced = lll(basis);
    let gs = GramSchmidt::new(&reduced);
    let en = Enumerator::new(&reduced, &gs);
    let radius = reduced
        .iter()
        .map(|b| BigRational::from_integer(dot(b, b)))
        .min()
        .expect("nonempty basis");
    let dim = reduced[0].len();
    let hits = en.within(&vec![BigInt::zero(); dim], radius, true, true);
    let best = hits.iter().map(|(_, d)| d.clone()).min().expect("basis vectors lie inside the radius");
    hits.into_iter()
        .filter(|(_, d)| *d == best)
        .map(|(x, _)| {
            let mut v = en.point(&x);
            canonical_sign(&mut v);
            v
        })
        .min()
        .expect("at least one minimal vector")
}

/// Minimum of `‖t - g‖²` over lattice points `g`.
pub fn closest_distance_sq(basis: &[Vec<BigInt>], t: &[BigInt]) -> BigInt {
    if basis.is_empty() {
        return dot(t, t);
    }
    let reduced = lll(basis);
    let gs = GramSchmidt::new(&reduced);
    let en = Enumerator::new(&reduced, &gs);
    let (_, babai) = en.babai(t);
    let hits = en.within(t, babai, false, true);
    let best = hits.into_iter().map(|(_, d)| d).min().expect("Babai point lies within its own radius");
    assert!(best.is_integer(), "squared distance between integer points must be an integer");
    best.to_integer()
}
