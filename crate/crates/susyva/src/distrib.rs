//! Formal distributions in two supervariables Z = (z, zeta^1..zeta^N) and
//! W = (w, omega^1..omega^N), with exact rational coefficients and explicit
//! rectangular truncation windows in the (z-power, w-power) lattice.
//!
//! A distribution value is guaranteed complete inside its window: every
//! lattice point within the window carries its exact coefficient. Operations
//! compute the largest window on which the result is certified complete and
//! error (never silently truncate) when that window becomes empty or a
//! requested extraction falls outside it.

use crate::combinat::{binom_general, neg1_pow, sort_odd_word, IndexSet};
use crate::scalars::{big_to_rat, rat_int, rat_to_string, Rat};
use crate::{Error, Result};
use num_traits::Zero;
use std::collections::BTreeMap;
use std::fmt;

/// Which geometric expansion of (z-w)^j to use for negative j.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Domain {
    /// Expand in the region |z| > |w|: nonnegative powers of w.
    ZW,
    /// Expand in the region |w| > |z|: nonnegative powers of z.
    WZ,
}

pub use crate::Flavor;

/// Monomial z^zpow w^wpow zeta^zeta omega^omega, with the odd blocks in
/// canonical order: zetas ascending, then omegas ascending.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct SuperMonomial {
    pub zpow: i64,
    pub wpow: i64,
    pub zeta: IndexSet,
    pub omega: IndexSet,
}

/// Completeness window: inclusive bounds on z- and w-powers.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Window {
    pub zmin: i64,
    pub zmax: i64,
    pub wmin: i64,
    pub wmax: i64,
}

/// Saturation bound standing in for an unbounded window side.
const INF: i64 = i64::MAX / 4;

impl Window {
    pub fn symmetric(order: i64) -> Window {
        Window { zmin: -order, zmax: order, wmin: -order, wmax: order }
    }

    pub fn unbounded() -> Window {
        Window { zmin: -INF, zmax: INF, wmin: -INF, wmax: INF }
    }

    pub fn contains(&self, zpow: i64, wpow: i64) -> bool {
        self.zmin <= zpow && zpow <= self.zmax && self.wmin <= wpow && wpow <= self.wmax
    }

    pub fn is_empty(&self) -> bool {
        self.zmin > self.zmax || self.wmin > self.wmax
    }

    pub fn intersect(&self, other: &Window) -> Window {
        Window {
            zmin: self.zmin.max(other.zmin),
            zmax: self.zmax.min(other.zmax),
            wmin: self.wmin.max(other.wmin),
            wmax: self.wmax.min(other.wmax),
        }
    }

    pub fn covers(&self, other: &Window) -> bool {
        self.zmin <= other.zmin
            && self.zmax >= other.zmax
            && self.wmin <= other.wmin
            && self.wmax >= other.wmax
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "z[{}..{}] w[{}..{}]", self.zmin, self.zmax, self.wmin, self.wmax)
    }
}

/// Formal distribution, complete within its window.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BiDistribution {
    /// Number of odd variable pairs.
    pub n: usize,
    terms: BTreeMap<SuperMonomial, Rat>,
    window: Window,
}

impl BiDistribution {
    pub fn zero(n: usize, window: Window) -> Self {
        BiDistribution { n, terms: BTreeMap::new(), window }
    }

    pub fn window(&self) -> Window {
        self.window
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SuperMonomial, &Rat)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &SuperMonomial) -> Result<Rat> {
        if !self.window.contains(m.zpow, m.wpow) {
            return Err(Error::WindowOverflow(format!(
                "coefficient at z^{} w^{} outside window {}",
                m.zpow, m.wpow, self.window
            )));
        }
        Ok(self.terms.get(m).cloned().unwrap_or_else(Rat::zero))
    }

    fn add_term(&mut self, m: SuperMonomial, c: Rat) {
        if c.is_zero() || !self.window.contains(m.zpow, m.wpow) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let s = e.get().clone() + c;
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
        }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        let mut out = BiDistribution::zero(self.n, self.window);
        for (m, c) in &self.terms {
            out.add_term(*m, c.clone() * r.clone());
        }
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        assert_eq!(self.n, other.n, "mixed variable counts");
        let w = self.window.intersect(&other.window);
        if w.is_empty() {
            return Err(Error::WindowOverflow("empty window in sum".into()));
        }
        let mut out = BiDistribution::zero(self.n, w);
        for (m, c) in self.terms.iter().chain(other.terms.iter()) {
            out.add_term(*m, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&rat_int(-1)))
    }

    pub fn is_zero_on_window(&self) -> bool {
        self.terms.is_empty()
    }

    /// Compare within the given window; errors when either side is not
    /// complete there.
    pub fn equal_within(&self, other: &Self, w: &Window) -> Result<bool> {
        for (d, name) in [(self, "left"), (other, "right")] {
            if !d.window.covers(w) {
                return Err(Error::WindowOverflow(format!(
                    "{name} window {} does not cover comparison window {w}",
                    d.window
                )));
            }
        }
        let keys: std::collections::BTreeSet<&SuperMonomial> = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .filter(|m| w.contains(m.zpow, m.wpow))
            .collect();
        for m in keys {
            if self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
                != other.terms.get(m).cloned().unwrap_or_else(Rat::zero)
            {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// One sorted line per term: "coef z^a w^b {zetas} {omegas}".
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (m, c) in &self.terms {
            out.push_str(&format!(
                "{} z^{} w^{} {} {}\n",
                rat_to_string(c),
                m.zpow,
                m.wpow,
                m.zeta,
                m.omega
            ));
        }
        out
    }
}

/// Normalize a mixed word of odd symbols into canonical (zeta-block,
/// omega-block) order. Symbols: (false, i) = zeta^i, (true, i) = omega^i.
fn normalize_odd(word: &[(bool, u8)]) -> Option<(i64, IndexSet, IndexSet)> {
    let keys: Vec<u16> = word
        .iter()
        .map(|&(is_omega, i)| if is_omega { 1000 + i as u16 } else { i as u16 })
        .collect();
    let (sign, sorted) = sort_odd_word(&keys)?;
    let mut zeta = IndexSet::empty();
    let mut omega = IndexSet::empty();
    for k in sorted {
        if k >= 1000 {
            omega = omega.union(IndexSet::singleton((k - 1000) as u8));
        } else {
            zeta = zeta.union(IndexSet::singleton(k as u8));
        }
    }
    Some((sign, zeta, omega))
}

/// Expansion of the binomial (Z-W)^{j|J} in the chosen domain, complete on
/// `window`. For the NK flavor the even part is (z - w - sum_i zeta^i omega^i)^j.
pub fn expand_binomial(
    flavor: Flavor,
    domain: Domain,
    j: i64,
    jset: IndexSet,
    n: usize,
    window: Window,
) -> BiDistribution {
    assert!(jset.is_subset(IndexSet::full(n)), "J not within {{1..N}}");
    let mut out = BiDistribution::zero(n, window);

    // Odd factor prod_{k in J asc} (zeta^k - omega^k): all 2^|J| picks.
    let jvec = jset.to_vec();
    let picks = 1u32 << jvec.len();
    let mut odd_parts: Vec<(i64, IndexSet, IndexSet)> = Vec::new();
    for pick in 0..picks {
        let mut word: Vec<(bool, u8)> = Vec::with_capacity(jvec.len());
        let mut sign = 1i64;
        for (t, &k) in jvec.iter().enumerate() {
            let take_omega = pick & (1 << t) != 0;
            if take_omega {
                sign = -sign;
            }
            word.push((take_omega, k));
        }
        if let Some((s2, zeta, omega)) = normalize_odd(&word) {
            odd_parts.push((sign * s2, zeta, omega));
        }
    }

    // Even factor, including the nilpotent correction for NK.
    // (z - w - y)^j = sum_{m=0}^{N} binom(j,m) (-y)^m (z-w)^{j-m}, y = sum zeta^i omega^i.
    // y^m = m! sum_{|S|=m} prod_{i in S} zeta^i omega^i (each pair even).
    let nilcap = if flavor == Flavor::NK { n } else { 0 };
    for m in 0..=nilcap {
        let bc = big_to_rat(&binom_general(j, m as u32)) * rat_int(neg1_pow(m as i64));
        if bc.is_zero() {
            continue;
        }
        // (-1)^m binom(j,m) * m! * sum over S of the normalized pair product
        let mfact = big_to_rat(&crate::combinat::factorial(m as u32));
        for s in IndexSet::full(n).subsets().filter(|s| s.len() as usize == m) {
            let word: Vec<(bool, u8)> = s.iter().flat_map(|i| [(false, i), (true, i)]).collect();
            let Some((psign, pz, pw)) = normalize_odd(&word) else { continue };
            let pair_coeff = bc.clone() * mfact.clone() * rat_int(psign);
            // (z-w)^{j-m} expanded in the domain, then append the odd parts.
            for (zpow, wpow, ecoeff) in expand_zw_power(domain, j - m as i64, &window) {
                for (osign, ozeta, oomega) in &odd_parts {
                    // full odd word: pair block then J block
                    let word2: Vec<(bool, u8)> = pz
                        .iter()
                        .map(|i| (false, i))
                        .chain(pw.iter().map(|i| (true, i)))
                        .chain(ozeta.iter().map(|i| (false, i)))
                        .chain(oomega.iter().map(|i| (true, i)))
                        .collect();
                    let Some((jsign, zeta, omega)) = normalize_odd(&word2) else {
                        continue;
                    };
                    out.add_term(
                        SuperMonomial { zpow, wpow, zeta, omega },
                        pair_coeff.clone() * ecoeff.clone() * rat_int(*osign * jsign),
                    );
                }
            }
        }
    }
    out
}

/// Terms of (z-w)^k within the window for the chosen expansion domain.
fn expand_zw_power(domain: Domain, k: i64, window: &Window) -> Vec<(i64, i64, Rat)> {
    let mut out = Vec::new();
    if k >= 0 {
        for m in 0..=k {
            // binom(k,m) z^{k-m} (-w)^m
            let (zp, wp) = (k - m, m);
            if window.contains(zp, wp) {
                out.push((zp, wp, big_to_rat(&binom_general(k, m as u32)) * rat_int(neg1_pow(m))));
            }
        }
        return out;
    }
    match domain {
        Domain::ZW => {
            // sum_{m>=0} binom(k,m) (-1)^m z^{k-m} w^m
            let lo = window.wmin.max(0).max(k - window.zmax);
            let hi = window.wmax.min(k - window.zmin);
            for m in lo..=hi {
                out.push((
                    k - m,
                    m,
                    big_to_rat(&binom_general(k, m as u32)) * rat_int(neg1_pow(m)),
                ));
            }
        }
        Domain::WZ => {
            // (-1)^k sum_{m>=0} binom(k,m) (-1)^m w^{k-m} z^m
            let lo = window.zmin.max(0).max(k - window.wmax);
            let hi = window.zmax.min(k - window.wmin);
            for m in lo..=hi {
                out.push((
                    m,
                    k - m,
                    big_to_rat(&binom_general(k, m as u32)) * rat_int(neg1_pow(k + m)),
                ));
            }
        }
    }
    out
}

/// The formal delta distribution (i_zw - i_wz)(Z-W)^{-1|[N]}.
pub fn delta(flavor: Flavor, n: usize, window: Window) -> BiDistribution {
    let a = expand_binomial(flavor, Domain::ZW, -1, IndexSet::full(n), n, window);
    let b = expand_binomial(flavor, Domain::WZ, -1, IndexSet::full(n), n, window);
    a.sub(&b).expect("same window")
}

/// Both-domain expansion difference (i_zw - i_wz)(Z-W)^{j|J}; zero for j >= 0.
pub fn expansion_difference(
    flavor: Flavor,
    j: i64,
    jset: IndexSet,
    n: usize,
    window: Window,
) -> BiDistribution {
    let a = expand_binomial(flavor, Domain::ZW, j, jset, n, window);
    let b = expand_binomial(flavor, Domain::WZ, j, jset, n, window);
    a.sub(&b).expect("same window")
}

/// Plain w-derivative.
fn d_w(f: &BiDistribution) -> BiDistribution {
    let w = Window {
        zmin: f.window.zmin,
        zmax: f.window.zmax,
        wmin: f.window.wmin.saturating_sub(1),
        wmax: f.window.wmax.saturating_sub(1),
    };
    let mut out = BiDistribution::zero(f.n, w);
    for (m, c) in &f.terms {
        out.add_term(
            SuperMonomial { wpow: m.wpow - 1, ..*m },
            c.clone() * rat_int(m.wpow),
        );
    }
    out
}

/// Left partial derivative with respect to omega^i (odd).
fn d_omega(i: u8, f: &BiDistribution) -> BiDistribution {
    let mut out = BiDistribution::zero(f.n, f.window);
    for (m, c) in &f.terms {
        if !m.omega.contains(i) {
            continue;
        }
        // pass zeta block, then bring omega^i to the front of the omega block
        let pass = neg1_pow(m.zeta.len() as i64);
        let front = crate::combinat::sigma(IndexSet::singleton(i), m.omega.difference(IndexSet::singleton(i)));
        out.add_term(
            SuperMonomial { omega: m.omega.difference(IndexSet::singleton(i)), ..*m },
            c.clone() * rat_int(pass * front),
        );
    }
    out
}

/// Left multiplication by omega^i.
fn mul_omega(i: u8, f: &BiDistribution) -> BiDistribution {
    let mut out = BiDistribution::zero(f.n, f.window);
    for (m, c) in &f.terms {
        if m.omega.contains(i) {
            continue;
        }
        let pass = neg1_pow(m.zeta.len() as i64);
        let merge = crate::combinat::sigma(IndexSet::singleton(i), m.omega);
        out.add_term(
            SuperMonomial { omega: m.omega.union(IndexSet::singleton(i)), ..*m },
            c.clone() * rat_int(pass * merge),
        );
    }
    out
}

/// Odd superconformal derivative D_W^i = d/d omega^i + omega^i d/dw.
fn d_super(i: u8, f: &BiDistribution) -> BiDistribution {
    let a = d_omega(i, f);
    let b = mul_omega(i, &d_w(f));
    a.add(&b).expect("windows nest")
}

/// Divided derivative in W of order (n|J):
/// NW: (-1)^{sum J} (1/n!) d_w^n d_{omega^{j_1}} ... d_{omega^{j_r}}
/// NK: (-1)^{sum J} (1/n!) d_w^n D_W^{j_1} ... D_W^{j_r}
/// with J = {j_1 < ... < j_r}; operator composition applies the rightmost
/// first. The normalizing sign is pinned by the requirement that the divided
/// W-derivatives of delta reproduce the expansion differences of
/// (Z-W)^{-1-n|[N] minus J}; it depends on the positions of J inside [N],
/// not just on |J|.
pub fn divided_derivative(
    flavor: Flavor,
    order: u32,
    jset: IndexSet,
    f: &BiDistribution,
) -> BiDistribution {
    let mut acc = f.clone();
    for i in jset.to_vec().into_iter().rev() {
        acc = match flavor {
            Flavor::NW => d_omega(i, &acc),
            Flavor::NK => d_super(i, &acc),
        };
    }
    for _ in 0..order {
        acc = d_w(&acc);
    }
    let sign = neg1_pow(jset.iter().map(|i| i as i64).sum());
    let coeff = Rat::new(sign.into(), crate::combinat::factorial(order));
    acc.scale(&coeff)
}

/// Multiply by the finite superpolynomial (Z-W)^{k|K}, k >= 0.
pub fn mul_binomial_poly(
    f: &BiDistribution,
    flavor: Flavor,
    k: i64,
    kset: IndexSet,
) -> Result<BiDistribution> {
    assert!(k >= 0, "polynomial factor needs k >= 0");
    let poly = expand_binomial(flavor, Domain::ZW, k, kset, f.n, Window::unbounded());
    // Window shrinks by the polynomial support extremes.
    let (mut plo, mut phi, mut qlo, mut qhi) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for (m, _) in poly.terms() {
        plo = plo.min(m.zpow);
        phi = phi.max(m.zpow);
        qlo = qlo.min(m.wpow);
        qhi = qhi.max(m.wpow);
    }
    let w = Window {
        zmin: f.window.zmin.saturating_add(phi),
        zmax: f.window.zmax.saturating_add(plo),
        wmin: f.window.wmin.saturating_add(qhi),
        wmax: f.window.wmax.saturating_add(qlo),
    };
    if w.is_empty() {
        return Err(Error::WindowOverflow("window emptied by polynomial factor".into()));
    }
    let mut out = BiDistribution::zero(f.n, w);
    for (pm, pc) in poly.terms() {
        for (fm, fc) in &f.terms {
            // (poly odd block) * (term odd block), poly block on the left
            let word: Vec<(bool, u8)> = pm
                .zeta
                .iter()
                .map(|i| (false, i))
                .chain(pm.omega.iter().map(|i| (true, i)))
                .chain(fm.zeta.iter().map(|i| (false, i)))
                .chain(fm.omega.iter().map(|i| (true, i)))
                .collect();
            let Some((sign, zeta, omega)) = normalize_odd(&word) else { continue };
            out.add_term(
                SuperMonomial {
                    zpow: pm.zpow + fm.zpow,
                    wpow: pm.wpow + fm.wpow,
                    zeta,
                    omega,
                },
                pc.clone() * fc.clone() * rat_int(sign),
            );
        }
    }
    Ok(out)
}

/// Residue in Z: the coefficient of z^{-1} zeta^{[N]}, as a distribution in
/// (w, omega) (returned with zpow = 0, zeta = empty).
pub fn residue_z(f: &BiDistribution) -> Result<BiDistribution> {
    if !(f.window.zmin <= -1 && -1 <= f.window.zmax) {
        return Err(Error::WindowOverflow(format!(
            "residue needs z^-1 inside window {}",
            f.window
        )));
    }
    let w = Window { zmin: 0, zmax: 0, ..f.window };
    let full = IndexSet::full(f.n);
    let mut out = BiDistribution::zero(f.n, w);
    for (m, c) in &f.terms {
        if m.zpow == -1 && m.zeta == full {
            out.add_term(
                SuperMonomial { zpow: 0, zeta: IndexSet::empty(), ..*m },
                c.clone(),
            );
        }
    }
    Ok(out)
}
