//! Symmetric functions over `Q(v)` with Hall-Littlewood parameter `t = v^k`,
//! and the bridge to the classical Hall algebra of torsion sheaves at a point.
//!
//! For a closed point `x` with `u = v^{|x|}` and `t = u^2`, the bridge sends
//! `K_x^{(λ)} = I_λ` to `u^{2 n(λ)} P_λ`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::{HeckeError, Result};
use crate::scalars::RationalFunctionV;

type Rfv = RationalFunctionV;

pub const DEFAULT_WEIGHT_BOUND: usize = 8;

/// A partition with parts in weakly decreasing order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|&p| p as usize).sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `n(λ) = Σ (i-1) λ_i`.
    pub fn n_lambda(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &p)| i as u64 * p as u64)
            .sum()
    }

    /// Multiplicity of each part size.
    pub fn multiplicities(&self) -> BTreeMap<u32, u32> {
        let mut m = BTreeMap::new();
        for &p in &self.0 {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// `z_λ = Π i^{m_i} m_i!`.
    pub fn z(&self) -> BigInt {
        let mut z = BigInt::one();
        for (i, m) in self.multiplicities() {
            for k in 1..=m {
                z *= BigInt::from(i) * BigInt::from(k);
            }
        }
        z
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self::new(v)
    }

    pub fn ones(m: u32) -> Self {
        Partition(vec![1; m as usize])
    }

    /// Dominance: every partial sum of `self` is at least that of `other`.
    pub fn dominates(&self, other: &Self) -> bool {
        let (mut a, mut b) = (0u64, 0u64);
        for i in 0..self.len().max(other.len()) {
            a += *self.0.get(i).unwrap_or(&0) as u64;
            b += *other.0.get(i).unwrap_or(&0) as u64;
            if a < b {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// All partitions of `n`, largest part first in reverse lexicographic order
/// (a linear extension of dominance, `(n)` first).
pub fn partitions(n: usize) -> Vec<Partition> {
    fn rec(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(cur.clone()));
            return;
        }
        for p in (1..=max.min(n)).rev() {
            cur.push(p);
            rec(n - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, n as u32, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Basis {
    Monomial,
    Elementary,
    Power,
    HallLittlewood,
}

/// A homogeneous symmetric function in one named basis; `t = v^t_exp`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymFunc {
    pub basis: Basis,
    pub t_exp: i64,
    pub terms: BTreeMap<Partition, Rfv>,
}

impl SymFunc {
    pub fn coeff(&self, l: &Partition) -> Rfv {
        self.terms.get(l).cloned().unwrap_or_default()
    }
}

impl fmt::Display for SymFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = match self.basis {
            Basis::Monomial => "m",
            Basis::Elementary => "e",
            Basis::Power => "p",
            Basis::HallLittlewood => "P",
        };
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|(l, c)| format!("({c}) {sym}{l}"))
            .collect();
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// Transition data at one weight and one specialization of `t`.
#[derive(Debug)]
struct Transition {
    parts: Vec<Partition>,
    index: HashMap<Partition, usize>,
    /// `p_μ = Σ_λ p_to_m[μ][λ] m_λ`
    p_to_m: Vec<Vec<Rfv>>,
    m_to_p: Vec<Vec<Rfv>>,
    /// `P_λ = Σ_μ hl_in_m[λ][μ] m_μ`
    hl_in_m: Vec<Vec<Rfv>>,
    /// `P_λ = Σ_ν hl_to_p[λ][ν] p_ν`
    hl_to_p: Vec<Vec<Rfv>>,
    /// `p_ν = Σ_λ p_to_hl[ν][λ] P_λ`
    p_to_hl: Vec<Vec<Rfv>>,
}

fn matmul(a: &[Vec<Rfv>], b: &[Vec<Rfv>]) -> Vec<Vec<Rfv>> {
    let n = a.len();
    let m = b[0].len();
    let mut out = vec![vec![Rfv::zero(); m]; n];
    for i in 0..n {
        for (k, bk) in b.iter().enumerate() {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..m {
                if !bk[j].is_zero() {
                    out[i][j] += &(&a[i][k] * &bk[j]);
                }
            }
        }
    }
    out
}

/// Gauss-Jordan inverse over `Q(v)`.
fn invert(a: &[Vec<Rfv>]) -> Vec<Vec<Rfv>> {
    let n = a.len();
    let mut m: Vec<Vec<Rfv>> = a.to_vec();
    let mut inv: Vec<Vec<Rfv>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rfv::one() } else { Rfv::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !m[r][col].is_zero()).expect("singular transition matrix");
        m.swap(col, piv);
        inv.swap(col, piv);
        let pinv = m[col][col].inv();
        for j in 0..n {
            m[col][j] = &m[col][j] * &pinv;
            inv[col][j] = &inv[col][j] * &pinv;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for j in 0..n {
                let a = &m[col][j] * &f;
                m[r][j] -= &a;
                let b = &inv[col][j] * &f;
                inv[r][j] -= &b;
            }
        }
    }
    inv
}

/// Number of ways to distribute the parts of `mu` into `lambda.len()` bins
/// so that bin `i` sums to `lambda[i]`: the coefficient of `m_λ` in `p_μ`.
fn p_in_m_coeff(mu: &[u32], lambda: &[u32]) -> i64 {
    fn rec(mu: &[u32], bins: &mut Vec<u32>) -> i64 {
        match mu.split_first() {
            None => bins.iter().all(|&b| b == 0) as i64,
            Some((&first, rest)) => {
                let mut total = 0;
                for i in 0..bins.len() {
                    if bins[i] >= first {
                        bins[i] -= first;
                        total += rec(rest, bins);
                        bins[i] += first;
                    }
                }
                total
            }
        }
    }
    rec(mu, &mut lambda.to_vec())
}

impl Transition {
    fn build(weight: usize, t_exp: i64) -> Self {
        let parts = partitions(weight);
        let n = parts.len();
        let index: HashMap<Partition, usize> =
            parts.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let p_to_m: Vec<Vec<Rfv>> = parts
            .iter()
            .map(|mu| {
                parts
                    .iter()
                    .map(|l| Rfv::from_int(p_in_m_coeff(mu.parts(), l.parts())))
                    .collect()
            })
            .collect();
        let m_to_p = invert(&p_to_m);
        // <p_ν, p_ν> = z_ν Π (1 - t^{ν_i})^{-1}
        let t = Rfv::v_pow(t_exp);
        let pnorm: Vec<Rfv> = parts
            .iter()
            .map(|nu| {
                let mut c = Rfv::from_rational(BigRational::from_integer(nu.z()));
                for &p in nu.parts() {
                    c = &c / &(&Rfv::one() - &t.pow(p as i64));
                }
                c
            })
            .collect();
        let ip = |a: &[Rfv], b: &[Rfv]| -> Rfv {
            // a, b in the m basis; go through p
            let mut acc = Rfv::zero();
            for nu in 0..n {
                let mut ca = Rfv::zero();
                let mut cb = Rfv::zero();
                for i in 0..n {
                    if !a[i].is_zero() {
                        ca += &(&a[i] * &m_to_p[i][nu]);
                    }
                    if !b[i].is_zero() {
                        cb += &(&b[i] * &m_to_p[i][nu]);
                    }
                }
                if !ca.is_zero() && !cb.is_zero() {
                    acc += &(&(&ca * &cb) * &pnorm[nu]);
                }
            }
            acc
        };
        // Gram-Schmidt from the bottom of the order upward.
        let mut hl_in_m: Vec<Vec<Rfv>> = vec![Vec::new(); n];
        let mut norms: Vec<Rfv> = vec![Rfv::zero(); n];
        for li in (0..n).rev() {
            let mut vec: Vec<Rfv> = (0..n)
                .map(|j| if j == li { Rfv::one() } else { Rfv::zero() })
                .collect();
            let unit = vec.clone();
            for mi in (li + 1)..n {
                let c = &ip(&unit, &hl_in_m[mi]) / &norms[mi];
                if c.is_zero() {
                    continue;
                }
                for j in 0..n {
                    if !hl_in_m[mi][j].is_zero() {
                        vec[j] -= &(&c * &hl_in_m[mi][j]);
                    }
                }
            }
            norms[li] = ip(&vec, &vec);
            hl_in_m[li] = vec;
        }
        let hl_to_p = matmul(&hl_in_m, &m_to_p);
        let p_to_hl = invert(&hl_to_p);
        Transition {
            parts,
            index,
            p_to_m,
            m_to_p,
            hl_in_m,
            hl_to_p,
            p_to_hl,
        }
    }

    fn row(&self, m: &[Vec<Rfv>], l: &Partition) -> BTreeMap<Partition, Rfv> {
        let i = self.index[l];
        self.parts
            .iter()
            .zip(&m[i])
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| (p.clone(), c.clone()))
            .collect()
    }
}

type Cache = Mutex<HashMap<(usize, i64), Arc<Transition>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn transition(weight: usize, t_exp: i64) -> Result<Arc<Transition>> {
    if weight > DEFAULT_WEIGHT_BOUND {
        return Err(HeckeError::WeightBoundExceeded {
            weight,
            bound: DEFAULT_WEIGHT_BOUND,
        });
    }
    if let Some(t) = cache().lock().expect("cache lock").get(&(weight, t_exp)) {
        return Ok(t.clone());
    }
    // built outside the lock; a racing duplicate build is harmless
    let t = Arc::new(Transition::build(weight, t_exp));
    cache()
        .lock()
        .expect("cache lock")
        .entry((weight, t_exp))
        .or_insert(t.clone());
    Ok(t)
}

/// `e_m` in the power-sum basis, from `m e_m = Σ (-1)^{i-1} p_i e_{m-i}`.
pub fn newton_e_to_p(m: usize) -> SymFunc {
    let mut es: Vec<BTreeMap<Partition, Rfv>> = vec![BTreeMap::from([(Partition::default(), Rfv::one())])];
    for k in 1..=m {
        let mut acc: BTreeMap<Partition, Rfv> = BTreeMap::new();
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            for (l, c) in &es[k - i] {
                let key = l.union(&Partition(vec![i as u32]));
                let e = acc.entry(key).or_default();
                *e += &c.scale_rational(&BigRational::new(BigInt::from(sign), BigInt::from(k)));
            }
        }
        acc.retain(|_, c| !c.is_zero());
        es.push(acc);
    }
    SymFunc {
        basis: Basis::Power,
        t_exp: 0,
        terms: es.pop().expect("nonempty"),
    }
}

/// `P_λ(t)` in the monomial basis.
pub fn hl_expand(l: &Partition, t_exp: i64) -> Result<SymFunc> {
    let tr = transition(l.weight(), t_exp)?;
    Ok(SymFunc {
        basis: Basis::Monomial,
        t_exp,
        terms: tr.row(&tr.hl_in_m, l),
    })
}

/// `P_λ(t)` in the power-sum basis.
pub fn hl_to_p(l: &Partition, t_exp: i64) -> Result<SymFunc> {
    let tr = transition(l.weight(), t_exp)?;
    Ok(SymFunc {
        basis: Basis::Power,
        t_exp,
        terms: tr.row(&tr.hl_to_p, l),
    })
}

/// The product of power sums `p_μ` in the Hall-Littlewood basis.
pub fn p_to_hl(mu: &Partition, t_exp: i64) -> Result<SymFunc> {
    let tr = transition(mu.weight(), t_exp)?;
    Ok(SymFunc {
        basis: Basis::HallLittlewood,
        t_exp,
        terms: tr.row(&tr.p_to_hl, mu),
    })
}

/// `p_μ` in the monomial basis.
pub fn p_to_m(mu: &Partition) -> Result<SymFunc> {
    let tr = transition(mu.weight(), 0)?;
    Ok(SymFunc {
        basis: Basis::Monomial,
        t_exp: 0,
        terms: tr.row(&tr.p_to_m, mu),
    })
}

/// `m_λ` in the power-sum basis.
pub fn m_to_p(l: &Partition) -> Result<SymFunc> {
    let tr = transition(l.weight(), 0)?;
    Ok(SymFunc {
        basis: Basis::Power,
        t_exp: 0,
        terms: tr.row(&tr.m_to_p, l),
    })
}

/// Hall-Littlewood inner product of two power-sum expansions.
pub fn hl_inner_p(a: &SymFunc, b: &SymFunc, t_exp: i64) -> Rfv {
    let t = Rfv::v_pow(t_exp);
    let mut acc = Rfv::zero();
    for (nu, ca) in &a.terms {
        if let Some(cb) = b.terms.get(nu) {
            let mut c = &(ca * cb) * &Rfv::from_rational(BigRational::from_integer(nu.z()));
            for &p in nu.parts() {
                c = &c / &(&Rfv::one() - &t.pow(p as i64));
            }
            acc += &c;
        }
    }
    acc
}

/// `n_u(l) = Π_{i=1}^{l} (1 - u^{-2i})` with `u = v^{u_exp}`.
pub fn n_u(l: usize, u_exp: i64) -> Rfv {
    let mut acc = Rfv::one();
    for i in 1..=l as i64 {
        acc = &acc * &(&Rfv::one() - &Rfv::v_pow(-2 * i * u_exp));
    }
    acc
}

/// `Ψ^{-1}(p_m) = Σ_{|λ|=m} n_u(l(λ)-1) I_λ`.
pub fn psi_inverse_p(m: usize, u_exp: i64) -> BTreeMap<Partition, Rfv> {
    partitions(m)
        .into_iter()
        .map(|l| {
            let c = n_u(l.len() - 1, u_exp);
            (l, c)
        })
        .collect()
}

/// `K^{(λ)} K^{(μ)}` at a point of degree `point_deg`, as a combination of `K^{(ρ)}`.
pub fn mult_torsion_same_point(
    l: &Partition,
    mu: &Partition,
    point_deg: u32,
) -> Result<BTreeMap<Partition, Rfv>> {
    let u = point_deg as i64;
    let t_exp = 2 * u;
    let weight = l.weight() + mu.weight();
    if weight > DEFAULT_WEIGHT_BOUND {
        return Err(HeckeError::WeightBoundExceeded {
            weight,
            bound: DEFAULT_WEIGHT_BOUND,
        });
    }
    if l.is_empty() {
        return Ok(BTreeMap::from([(mu.clone(), Rfv::one())]));
    }
    if mu.is_empty() {
        return Ok(BTreeMap::from([(l.clone(), Rfv::one())]));
    }
    let a = hl_to_p(l, t_exp)?;
    let b = hl_to_p(mu, t_exp)?;
    let pre = Rfv::v_pow(2 * u * (l.n_lambda() + mu.n_lambda()) as i64);
    let mut out: BTreeMap<Partition, Rfv> = BTreeMap::new();
    for (nu, ca) in &a.terms {
        for (ka, cb) in &b.terms {
            let c = &(ca * cb) * &pre;
            for (rho, x) in p_to_hl(&nu.union(ka), t_exp)?.terms {
                let term = &(&c * &x) * &Rfv::v_pow(-2 * u * rho.n_lambda() as i64);
                *out.entry(rho).or_default() += &term;
            }
        }
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}
