//! Mode Lie superalgebras generated from bracket-table presentations.
//!
//! Two layers live here. The classical layer implements the Neveu-Schwarz
//! algebra directly (modes `L_n`, `G_r`, central charge `c`), together with
//! its vacuum module: PBW monomials, straightening, basis enumeration and
//! singular-vector kernels. The table layer builds a mode algebra for any
//! presentation given as a finite Lambda-bracket table (generators plus
//! bracket entries), with the commutator expanded by the flavor-specific
//! mode formula. Presets cover Neveu-Schwarz and the superconformal
//! w-algebra family.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::combinat::{
    binom_general, choose2, factorial, falling, neg1_pow, sigma, IndexSet, MAX_N,
};
use crate::linalg::kernel_basis;
use crate::scalars::{big_to_rat, rat, rat_int, CPoly, Half, Rat, RatFn};
use crate::{Error, Flavor, Result};

/// Z/2 parity of a generator or mode.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_i64(p: i64) -> Parity {
        if p.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

// ---------------------------------------------------------------------------
// Classical Neveu-Schwarz modes.
// ---------------------------------------------------------------------------

/// A classical mode of the Neveu-Schwarz algebra: `L(n)` with integer index,
/// `G(r)` with half-odd index.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum NsMode {
    L(Half),
    G(Half),
}

impl NsMode {
    pub fn l(n: i64) -> NsMode {
        NsMode::L(Half::from_int(n))
    }

    /// `G` mode from twice the index: `g_halves(3)` is `G_{3/2}`.
    pub fn g_halves(t: i64) -> NsMode {
        assert!(t.rem_euclid(2) == 1, "G index must be half-odd");
        NsMode::G(Half::halves(t))
    }

    pub fn index(self) -> Half {
        match self {
            NsMode::L(h) | NsMode::G(h) => h,
        }
    }

    pub fn parity(self) -> Parity {
        match self {
            NsMode::L(_) => Parity::Even,
            NsMode::G(_) => Parity::Odd,
        }
    }
}

impl fmt::Display for NsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NsMode::L(h) => write!(f, "L({h})"),
            NsMode::G(h) => write!(f, "G({h})"),
        }
    }
}

/// Finite combination of classical modes plus a central part, polynomial
/// in the central charge.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct NsCombo {
    pub modes: std::collections::BTreeMap<NsMode, Rat>,
    pub central: CPoly,
}

impl NsCombo {
    pub fn zero() -> NsCombo {
        NsCombo {
            modes: Default::default(),
            central: CPoly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.modes.is_empty() && self.central.is_zero()
    }

    fn add_mode(&mut self, x: NsMode, coeff: Rat) {
        use num_traits::Zero;
        if coeff.is_zero() {
            return;
        }
        let slot = self.modes.entry(x).or_insert_with(|| rat_int(0));
        *slot += coeff;
        if slot.is_zero() {
            self.modes.remove(&x);
        }
    }

    pub fn add_scaled(&mut self, other: &NsCombo, scale: &Rat) {
        for (x, r) in &other.modes {
            self.add_mode(*x, r * scale);
        }
        self.central = &self.central + &other.central.scale(scale);
    }
}

/// Commutator of two classical modes, with the bracket graded symmetric on
/// odd pairs: `[x,y] = xy - (-1)^{p(x)p(y)} yx`.
pub fn ns_bracket(x: NsMode, y: NsMode) -> NsCombo {
    let mut out = NsCombo::zero();
    match (x, y) {
        (NsMode::L(m), NsMode::L(n)) => {
            let (m, n) = (m.as_int(), n.as_int());
            out.add_mode(NsMode::l(m + n), rat_int(m - n));
            if m + n == 0 {
                // (m^3 - m)/12 multiple of c
                out.central = CPoly::c().scale(&rat(m * m * m - m, 12));
            }
        }
        (NsMode::L(n), NsMode::G(r)) => {
            let n = n.as_int();
            // (n/2 - r) G_{n+r}
            let coeff = rat(n - r.twice(), 2);
            out.add_mode(NsMode::G(Half::from_int(n) + r), coeff);
        }
        (NsMode::G(_), NsMode::L(_)) => {
            // [G_r, L_n] = -[L_n, G_r]
            let inner = ns_bracket(y, x);
            out.add_scaled(&inner, &rat_int(-1));
        }
        (NsMode::G(r), NsMode::G(s)) => {
            out.add_mode(NsMode::L(r + s), rat_int(2));
            if (r + s).twice() == 0 {
                let t = r.twice();
                // (r^2 - 1/4)/3 = (t^2 - 1)/12 multiple of c
                out.central = CPoly::c().scale(&rat(t * t - 1, 12));
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// PBW vacuum module for the classical algebra.
// ---------------------------------------------------------------------------

/// Canonical PBW word applied to the vacuum: an `L` block `L_{-n_1}..L_{-n_a}`
/// with `n_1 >= .. >= n_a >= 2`, then a `G` block `G_{-r_1}..G_{-r_b}` with
/// `r_1 > .. > r_b >= 3/2`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct PBWMonomial {
    /// `n` values of the `L_{-n}` factors, weakly descending.
    pub l_parts: Vec<i64>,
    /// `r` values of the `G_{-r}` factors, strictly descending.
    pub g_parts: Vec<Half>,
}

impl PBWMonomial {
    pub fn vacuum() -> PBWMonomial {
        PBWMonomial::default()
    }

    pub fn is_vacuum(&self) -> bool {
        self.l_parts.is_empty() && self.g_parts.is_empty()
    }

    pub fn weight(&self) -> Half {
        let mut w = Half::ZERO;
        for n in &self.l_parts {
            w += Half::from_int(*n);
        }
        for r in &self.g_parts {
            w += *r;
        }
        w
    }

    pub fn parity(&self) -> Parity {
        Parity::from_i64(self.g_parts.len() as i64)
    }

    /// Leftmost factor, if any.
    fn head(&self) -> Option<NsMode> {
        if let Some(n) = self.l_parts.first() {
            Some(NsMode::l(-n))
        } else {
            self.g_parts.first().map(|r| NsMode::G(-*r))
        }
    }

    fn tail(&self) -> PBWMonomial {
        let mut t = self.clone();
        if !t.l_parts.is_empty() {
            t.l_parts.remove(0);
        } else if !t.g_parts.is_empty() {
            t.g_parts.remove(0);
        }
        t
    }

    /// The monomial `x . self` when that word is already canonical.
    fn accepts_prefix(&self, x: NsMode) -> Option<PBWMonomial> {
        match x {
            NsMode::L(h) => {
                if !h.is_integer() || h > Half::from_int(-2) {
                    return None;
                }
                let n = -h.as_int();
                if self.l_parts.first().is_some_and(|first| n < *first) {
                    return None;
                }
                let mut m = self.clone();
                m.l_parts.insert(0, n);
                Some(m)
            }
            NsMode::G(h) => {
                if h > Half::halves(-3) || !self.l_parts.is_empty() {
                    return None;
                }
                let r = -h;
                if self.g_parts.first().is_some_and(|first| r <= *first) {
                    return None;
                }
                let mut m = self.clone();
                m.g_parts.insert(0, r);
                Some(m)
            }
        }
    }
}

impl PartialOrd for PBWMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PBWMonomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.weight(), &self.l_parts, &self.g_parts).cmp(&(
            other.weight(),
            &other.l_parts,
            &other.g_parts,
        ))
    }
}

impl fmt::Display for PBWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.l_parts {
            write!(f, "L(-{n}) ")?;
        }
        for r in &self.g_parts {
            write!(f, "G(-{r}) ")?;
        }
        write!(f, "|0>")
    }
}

/// Element of the vacuum module: finite map from PBW monomials to
/// polynomials in the central charge.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct ModuleState {
    pub terms: std::collections::BTreeMap<PBWMonomial, CPoly>,
}

impl ModuleState {
    pub fn zero() -> ModuleState {
        ModuleState::default()
    }

    pub fn vacuum() -> ModuleState {
        ModuleState::from_monomial(PBWMonomial::vacuum())
    }

    pub fn from_monomial(m: PBWMonomial) -> ModuleState {
        let mut s = ModuleState::zero();
        s.add_term(m, CPoly::one());
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: PBWMonomial, coeff: CPoly) {
        if coeff.is_zero() {
            return;
        }
        let cur = self.terms.remove(&m).unwrap_or_else(CPoly::zero);
        let sum = &cur + &coeff;
        if !sum.is_zero() {
            self.terms.insert(m, sum);
        }
    }

    pub fn add_scaled(&mut self, other: &ModuleState, scale: &CPoly) {
        for (m, co) in &other.terms {
            self.add_term(m.clone(), co * scale);
        }
    }

    pub fn scale(&self, scale: &CPoly) -> ModuleState {
        let mut s = ModuleState::zero();
        s.add_scaled(self, scale);
        s
    }

    /// Common weight of all terms, when homogeneous.
    pub fn weight(&self) -> Option<Half> {
        let mut it = self.terms.keys().map(|m| m.weight());
        let w = it.next()?;
        if it.all(|u| u == w) {
            Some(w)
        } else {
            None
        }
    }

    /// Common parity of all terms, when pure.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| m.parity());
        let p = it.next()?;
        if it.all(|q| q == p) {
            Some(p)
        } else {
            None
        }
    }

    /// Substitute a numeric central charge into every coefficient.
    pub fn eval_c(&self, c0: &Rat) -> ModuleState {
        let mut s = ModuleState::zero();
        for (m, co) in &self.terms {
            s.add_term(m.clone(), CPoly::constant(co.eval_c(c0)));
        }
        s
    }
}

impl fmt::Display for ModuleState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, co) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({co}) {m}")?;
        }
        Ok(())
    }
}

type ApplyCache = Mutex<HashMap<(NsMode, PBWMonomial), ModuleState>>;

fn apply_cache() -> &'static ApplyCache {
    static CACHE: OnceLock<ApplyCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn annihilates_vacuum(x: NsMode) -> bool {
    match x {
        NsMode::L(h) => h >= Half::from_int(-1),
        NsMode::G(h) => h >= Half::halves(-1),
    }
}

/// Action of one classical mode on one PBW monomial, straightened back to
/// the canonical basis. Results are memoized; the cache is shared and
/// observably pure.
pub fn apply_to_monomial(x: NsMode, m: &PBWMonomial) -> ModuleState {
    let key = (x, m.clone());
    if let Some(hit) = apply_cache().lock().unwrap().get(&key) {
        return hit.clone();
    }
    let out = compute_apply(x, m);
    apply_cache()
        .lock()
        .unwrap()
        .insert(key, out.clone());
    out
}

fn compute_apply(x: NsMode, m: &PBWMonomial) -> ModuleState {
    if let Some(ext) = m.accepts_prefix(x) {
        return ModuleState::from_monomial(ext);
    }
    if m.is_vacuum() {
        debug_assert!(annihilates_vacuum(x), "mode {x} stuck on vacuum");
        return ModuleState::zero();
    }
    let y = m.head().expect("non-vacuum monomial has a head");
    let rest = m.tail();
    let mut out = ModuleState::zero();
    if x == y && x.parity() == Parity::Odd {
        // x.x = (1/2)[x,x] for an odd mode
        let br = ns_bracket(x, x);
        let half = rat(1, 2);
        for (z, cz) in &br.modes {
            let st = apply_to_monomial(*z, &rest);
            out.add_scaled(&st, &CPoly::constant(cz * &half));
        }
        out.add_term(rest, br.central.scale(&half));
        return out;
    }
    // x.(y.rest) = [x,y].rest + (-1)^{p(x)p(y)} y.(x.rest)
    let br = ns_bracket(x, y);
    for (z, cz) in &br.modes {
        let st = apply_to_monomial(*z, &rest);
        out.add_scaled(&st, &CPoly::constant(cz.clone()));
    }
    out.add_term(rest.clone(), br.central.clone());
    let sign = neg1_pow(x.parity().as_i64() * y.parity().as_i64());
    let inner = apply_to_monomial(x, &rest);
    let pushed = apply_mode(y, &inner);
    out.add_scaled(&pushed, &CPoly::from_int(sign));
    out
}

/// Linear extension of the mode action to module states.
pub fn apply_mode(x: NsMode, s: &ModuleState) -> ModuleState {
    let mut out = ModuleState::zero();
    for (m, co) in &s.terms {
        let st = apply_to_monomial(x, m);
        out.add_scaled(&st, co);
    }
    out
}

/// Apply a word of modes, rightmost factor first.
pub fn apply_word(word: &[NsMode], s: &ModuleState) -> ModuleState {
    let mut cur = s.clone();
    for x in word.iter().rev() {
        cur = apply_mode(*x, &cur);
    }
    cur
}

/// Straighten a vacuum-terminated word into the canonical basis.
pub fn normal_order(word: &[NsMode]) -> ModuleState {
    apply_word(word, &ModuleState::vacuum())
}

// ---------------------------------------------------------------------------
// Basis enumeration and singular vectors.
// ---------------------------------------------------------------------------

fn l_partitions(budget: i64, max_part: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    let top = max_part.min(budget);
    for first in (2..=top).rev() {
        for rest in l_partitions(budget - first, first) {
            let mut p = vec![first];
            p.extend(rest);
            out.push(p);
        }
    }
    out
}

fn g_tuples(budget_twice: i64, max_twice: i64) -> Vec<Vec<Half>> {
    let mut out = vec![vec![]];
    let mut first = max_twice.min(budget_twice);
    if first.rem_euclid(2) == 0 {
        first -= 1;
    }
    while first >= 3 {
        for rest in g_tuples(budget_twice - first, first - 2) {
            let mut p = vec![Half::halves(first)];
            p.extend(rest);
            out.push(p);
        }
        first -= 2;
    }
    out
}

/// Complete PBW basis of the vacuum module, grouped by weight, for all
/// weights up to the cutoff.
pub fn ns_basis(cutoff: Half) -> Vec<(Half, Vec<PBWMonomial>)> {
    assert!(!cutoff.is_negative(), "cutoff must be nonnegative");
    let wmax2 = cutoff.twice();
    let mut by_weight: std::collections::BTreeMap<Half, Vec<PBWMonomial>> = Default::default();
    let mut w2 = 0;
    while w2 <= wmax2 {
        by_weight.insert(Half::halves(w2), vec![]);
        w2 += 1;
    }
    for lp in l_partitions(wmax2 / 2, wmax2 / 2) {
        let lw: i64 = lp.iter().sum();
        for gp in g_tuples(wmax2 - 2 * lw, wmax2 - 2 * lw) {
            let m = PBWMonomial {
                l_parts: lp.clone(),
                g_parts: gp,
            };
            by_weight.get_mut(&m.weight()).unwrap().push(m);
        }
    }
    by_weight
        .into_iter()
        .map(|(w, mut v)| {
            v.sort();
            (w, v)
        })
        .collect()
}

/// Basis of one weight space.
pub fn ns_basis_at(weight: Half) -> Vec<PBWMonomial> {
    ns_basis(weight)
        .into_iter()
        .find(|(w, _)| *w == weight)
        .map(|(_, v)| v)
        .unwrap_or_default()
}

/// Central-charge mode for kernel computations.
#[derive(Clone, PartialEq, Debug)]
pub enum CentralCharge {
    Symbolic,
    Value(Rat),
}

/// Positive modes whose kernels cut out the singular vectors; these generate
/// all positive modes of the algebra.
pub fn singular_probes() -> [NsMode; 4] {
    [
        NsMode::l(1),
        NsMode::l(2),
        NsMode::g_halves(1),
        NsMode::g_halves(3),
    ]
}

/// Basis of the space of weight-`weight` states killed by every positive
/// mode. Exact kernel over the rational-function field in `c` when the
/// charge is symbolic, over the rationals when specialized.
pub fn singular_vectors(weight: Half, c: &CentralCharge) -> Vec<ModuleState> {
    if weight.is_negative() {
        return vec![];
    }
    let source = ns_basis_at(weight);
    if source.is_empty() {
        return vec![];
    }
    let cols = source.len();
    // Rows of the stacked action matrix, coefficients polynomial in c.
    let mut rows: Vec<Vec<CPoly>> = vec![];
    for probe in singular_probes() {
        let target_w = weight - probe.index();
        if target_w.is_negative() {
            continue;
        }
        let targets = ns_basis_at(target_w);
        if targets.is_empty() {
            continue;
        }
        let index_of: HashMap<&PBWMonomial, usize> =
            targets.iter().enumerate().map(|(i, t)| (t, i)).collect();
        let mut block = vec![vec![CPoly::zero(); cols]; targets.len()];
        for (j, src) in source.iter().enumerate() {
            let image = apply_to_monomial(probe, src);
            for (t, co) in &image.terms {
                let ti = *index_of.get(t).expect("image stays in weight window");
                block[ti][j] = &block[ti][j] + co;
            }
        }
        rows.extend(block);
    }
    match c {
        CentralCharge::Symbolic => {
            let frows: Vec<Vec<RatFn>> = rows
                .iter()
                .map(|r| r.iter().map(|p| RatFn::from_poly(p.clone())).collect())
                .collect();
            kernel_basis(&frows, cols)
                .into_iter()
                .map(|v| {
                    let coords = clear_denominators(&v);
                    let mut st = ModuleState::zero();
                    for (j, m) in source.iter().enumerate() {
                        st.add_term(m.clone(), coords[j].clone());
                    }
                    st
                })
                .collect()
        }
        CentralCharge::Value(c0) => {
            let frows: Vec<Vec<Rat>> = rows
                .iter()
                .map(|r| r.iter().map(|p| p.eval_c(c0)).collect())
                .collect();
            kernel_basis(&frows, cols)
                .into_iter()
                .map(|v| {
                    let mut st = ModuleState::zero();
                    for (j, m) in source.iter().enumerate() {
                        st.add_term(m.clone(), CPoly::constant(v[j].clone()));
                    }
                    st
                })
                .collect()
        }
    }
}

fn poly_lcm(a: &CPoly, b: &CPoly) -> CPoly {
    if a.is_zero() || b.is_zero() {
        return CPoly::zero();
    }
    let g = a.gcd(b);
    let (q, r) = (&(a * b)).div_rem(&g);
    debug_assert!(r.is_zero());
    q.monic()
}

/// Scale a rational-function vector to polynomial entries with trivial
/// common factor.
fn clear_denominators(v: &[RatFn]) -> Vec<CPoly> {
    let mut den = CPoly::one();
    for x in v {
        if !x.is_zero() {
            den = poly_lcm(&den, x.den());
        }
    }
    let mut coords: Vec<CPoly> = v
        .iter()
        .map(|x| {
            if x.is_zero() {
                CPoly::zero()
            } else {
                let (q, r) = den.div_rem(x.den());
                debug_assert!(r.is_zero());
                x.num() * &q
            }
        })
        .collect();
    let mut content = CPoly::zero();
    for x in &coords {
        if !x.is_zero() {
            content = if content.is_zero() {
                x.monic()
            } else {
                content.gcd(x)
            };
        }
    }
    if !content.is_zero() && content.degree() > Some(0) {
        coords = coords
            .iter()
            .map(|x| {
                if x.is_zero() {
                    CPoly::zero()
                } else {
                    let (q, r) = x.div_rem(&content);
                    debug_assert!(r.is_zero());
                    q
                }
            })
            .collect();
    }
    coords
}

// ---------------------------------------------------------------------------
// Presentations: generators plus a finite Lambda-bracket table.
// ---------------------------------------------------------------------------

pub const PRESENTATION_SCHEMA: &str = "susyva-presentation/v1";

/// One generator of a presented algebra.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub name: String,
    pub parity: Parity,
    /// Conformal-type weight; bookkeeping metadata for grading checks.
    pub weight: Half,
}

/// Derivative word applied to a generator inside a bracket entry. Letters
/// are written outermost first: `["T","S1"]` is `T(S^1(gen))`.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct TargetRef {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub word: Vec<String>,
    pub gen: String,
}

fn indexset_is_empty(s: &IndexSet) -> bool {
    s.is_empty()
}

/// One term of a bracket entry: `coeff * lambda^{lambda} chi^{chi} target`.
/// A missing target is the central slot (a multiple of the vacuum); the
/// coefficient may involve the central charge symbol `c`. Chi sets are kept
/// in ascending index order, so odd monomials are already normal ordered.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BracketTerm {
    pub coeff: CPoly,
    pub lambda: u32,
    #[serde(default, skip_serializing_if = "indexset_is_empty")]
    pub chi: IndexSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetRef>,
}

/// Bracket table entry for one ordered generator pair.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct BracketEntry {
    pub left: String,
    pub right: String,
    pub terms: Vec<BracketTerm>,
}

/// A presented algebra: flavor, ambient odd dimension, generators, and the
/// defining bracket entries. Commutators of ordered pairs not listed are
/// recovered from the opposite pair by graded antisymmetry.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct Presentation {
    pub schema: String,
    pub name: String,
    pub flavor: Flavor,
    pub n: usize,
    pub generators: Vec<GeneratorSpec>,
    pub brackets: Vec<BracketEntry>,
}

impl Presentation {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("presentation serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Presentation> {
        let p: Presentation =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("bad JSON: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    fn gen_index(&self, name: &str) -> Option<usize> {
        self.generators.iter().position(|g| g.name == name)
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema != PRESENTATION_SCHEMA {
            return Err(Error::Invalid(format!(
                "unknown presentation schema {:?}, expected {PRESENTATION_SCHEMA:?}",
                self.schema
            )));
        }
        if self.n > MAX_N {
            return Err(Error::Invalid(format!("n = {} exceeds {MAX_N}", self.n)));
        }
        if self.generators.is_empty() {
            return Err(Error::Invalid("no generators".into()));
        }
        for (i, g) in self.generators.iter().enumerate() {
            if g.weight.is_negative() {
                return Err(Error::Invalid(format!("generator {} has negative weight", g.name)));
            }
            if self.generators[..i].iter().any(|h| h.name == g.name) {
                return Err(Error::Invalid(format!("duplicate generator {}", g.name)));
            }
        }
        let full = IndexSet::full(self.n);
        let mut seen: Vec<(usize, usize)> = vec![];
        for e in &self.brackets {
            let li = self
                .gen_index(&e.left)
                .ok_or_else(|| Error::Invalid(format!("unknown generator {}", e.left)))?;
            let ri = self
                .gen_index(&e.right)
                .ok_or_else(|| Error::Invalid(format!("unknown generator {}", e.right)))?;
            if seen.contains(&(li, ri)) {
                return Err(Error::Invalid(format!(
                    "duplicate bracket entry for ({}, {})",
                    e.left, e.right
                )));
            }
            seen.push((li, ri));
            let want_parity = (self.generators[li].parity.as_i64()
                + self.generators[ri].parity.as_i64()
                + self.n as i64)
                .rem_euclid(2);
            for t in &e.terms {
                if t.coeff.is_zero() {
                    return Err(Error::Invalid("zero coefficient in bracket term".into()));
                }
                if !t.chi.is_subset(full) {
                    return Err(Error::Invalid(format!(
                        "chi set {:?} outside 1..={}",
                        t.chi, self.n
                    )));
                }
                let mut term_parity = t.chi.len() as i64;
                if let Some(target) = &t.target {
                    let gi = self.gen_index(&target.gen).ok_or_else(|| {
                        Error::Invalid(format!("unknown target generator {}", target.gen))
                    })?;
                    term_parity += self.generators[gi].parity.as_i64();
                    for w in &target.word {
                        match parse_letter(w, self.n)? {
                            Letter::T => {}
                            Letter::S(_) => term_parity += 1,
                        }
                    }
                }
                if term_parity.rem_euclid(2) != want_parity {
                    return Err(Error::Invalid(format!(
                        "parity mismatch in bracket ({}, {}) term",
                        e.left, e.right
                    )));
                }
            }
        }
        Ok(())
    }
}

enum Letter {
    T,
    S(u8),
}

fn parse_letter(s: &str, n: usize) -> Result<Letter> {
    if s == "T" {
        return Ok(Letter::T);
    }
    if let Some(ix) = s.strip_prefix('S') {
        if let Ok(i) = ix.parse::<u8>() {
            if i >= 1 && (i as usize) <= n {
                return Ok(Letter::S(i));
            }
        }
    }
    Err(Error::Invalid(format!("bad derivative letter {s:?}")))
}

// ---------------------------------------------------------------------------
// Canonical derivative words and the compiled mode algebra.
// ---------------------------------------------------------------------------

/// Canonical derivative word `T^tpow S^{s_1} .. S^{s_r}` with ascending odd
/// letters. `T` commutes with every `S^i` in both flavors, so this form is
/// complete once odd letters are sorted.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Word {
    pub tpow: u32,
    pub sset: IndexSet,
}

impl Word {
    pub fn identity() -> Word {
        Word::default()
    }

    pub fn is_identity(&self) -> bool {
        self.tpow == 0 && self.sset.is_empty()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for _ in 0..self.tpow {
            write!(f, "T ")?;
        }
        for i in self.sset.iter() {
            write!(f, "S{i} ")?;
        }
        Ok(())
    }
}

/// Sort a sequence of odd letters into ascending order. NW letters
/// anticommute and square to zero; NK letters anticommute for distinct
/// indices while a square contributes one `T`.
fn reduce_letters(flavor: Flavor, mut letters: Vec<u8>) -> Option<(i64, u32, IndexSet)> {
    let mut sign = 1i64;
    let mut tpow = 0u32;
    'outer: loop {
        for k in 0..letters.len().saturating_sub(1) {
            if letters[k] == letters[k + 1] {
                match flavor {
                    Flavor::NW => return None,
                    Flavor::NK => {
                        letters.drain(k..k + 2);
                        tpow += 1;
                        continue 'outer;
                    }
                }
            }
            if letters[k] > letters[k + 1] {
                letters.swap(k, k + 1);
                sign = -sign;
                continue 'outer;
            }
        }
        break;
    }
    Some((sign, tpow, IndexSet::from_indices(&letters)))
}

/// Label of one superfield mode of a presented generator.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct ModeKey {
    pub gen: usize,
    pub j: i64,
    pub jset: IndexSet,
}

/// Finite combination of generator modes plus a central scalar (polynomial
/// in the central charge symbol).
#[derive(Clone, PartialEq, Debug, Default)]
pub struct ModeElement {
    pub terms: std::collections::BTreeMap<ModeKey, CPoly>,
    pub central: CPoly,
}

impl ModeElement {
    pub fn zero() -> ModeElement {
        ModeElement::default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.central.is_zero()
    }

    pub fn add_mode(&mut self, k: ModeKey, coeff: &CPoly) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(k).or_insert_with(CPoly::zero);
        *slot = &*slot + coeff;
        if slot.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn add_scaled(&mut self, other: &ModeElement, scale: &CPoly) {
        for (k, co) in &other.terms {
            self.add_mode(*k, &(co * scale));
        }
        self.central = &self.central + &(&other.central * scale);
    }
}

/// Internal compiled table term for one ordered generator pair: the state
/// `coeff * (word gen)` or, with no target, `coeff * vacuum` sitting at
/// `lambda^{lambda} chi^{chi}`.
#[derive(Clone, PartialEq, Debug)]
struct TableTerm {
    lambda: u32,
    chi: IndexSet,
    coeff: CPoly,
    target: Option<(Word, usize)>,
}

fn canon_terms(terms: Vec<TableTerm>) -> Vec<TableTerm> {
    let mut map: std::collections::BTreeMap<(u32, IndexSet, Option<(Word, usize)>), CPoly> =
        Default::default();
    for t in terms {
        let key = (t.lambda, t.chi, t.target.clone());
        let slot = map.entry(key).or_insert_with(CPoly::zero);
        *slot = &*slot + &t.coeff;
    }
    map.into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|((lambda, chi, target), coeff)| TableTerm {
            lambda,
            chi,
            coeff,
            target,
        })
        .collect()
}

/// State-valued product decomposition: derivative words of generators plus
/// a central part.
#[derive(Clone, Debug, Default)]
pub struct ProductState {
    pub terms: Vec<(Word, usize, CPoly)>,
    pub central: CPoly,
}

/// Which preset family to construct.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PresetKind {
    NeveuSchwarz,
    WAlgebra,
}

/// A compiled mode algebra: validated presentation plus the bracket table
/// for the listed ordered pairs. A commutator whose ordered pair has no
/// entry is resolved through the graded antisymmetry of the bracket.
#[derive(Clone, Debug)]
pub struct Algebra {
    pres: Presentation,
    table: HashMap<(usize, usize), Vec<TableTerm>>,
    max_lambda: u32,
}

impl Algebra {
    pub fn from_presentation(pres: Presentation) -> Result<Algebra> {
        pres.validate()?;
        let n = pres.n;
        let flavor = pres.flavor;
        let mut table: HashMap<(usize, usize), Vec<TableTerm>> = HashMap::new();
        for e in &pres.brackets {
            let li = pres.gen_index(&e.left).unwrap();
            let ri = pres.gen_index(&e.right).unwrap();
            let mut terms = vec![];
            for t in &e.terms {
                let target = match &t.target {
                    None => None,
                    Some(tr) => {
                        let gi = pres.gen_index(&tr.gen).unwrap();
                        let mut tpow = 0u32;
                        let mut s_letters = vec![];
                        for w in &tr.word {
                            match parse_letter(w, n)? {
                                Letter::T => tpow += 1,
                                Letter::S(i) => s_letters.push(i),
                            }
                        }
                        match reduce_letters(flavor, s_letters) {
                            None => continue, // word vanishes identically
                            Some((sign, extra_t, sset)) => {
                                let word = Word {
                                    tpow: tpow + extra_t,
                                    sset,
                                };
                                if sign < 0 {
                                    // fold the reorder sign into the coefficient
                                    terms.push(TableTerm {
                                        lambda: t.lambda,
                                        chi: t.chi,
                                        coeff: -&t.coeff,
                                        target: Some((word, gi)),
                                    });
                                    continue;
                                }
                                Some((word, gi))
                            }
                        }
                    }
                };
                terms.push(TableTerm {
                    lambda: t.lambda,
                    chi: t.chi,
                    coeff: t.coeff.clone(),
                    target,
                });
            }
            table.insert((li, ri), canon_terms(terms));
        }
        let max_lambda = table
            .values()
            .flat_map(|ts| ts.iter().map(|t| t.lambda))
            .max()
            .unwrap_or(0);
        Ok(Algebra {
            pres,
            table,
            max_lambda,
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.pres
    }

    pub fn flavor(&self) -> Flavor {
        self.pres.flavor
    }

    pub fn n(&self) -> usize {
        self.pres.n
    }

    pub fn generator(&self, name: &str) -> Option<usize> {
        self.pres.gen_index(name)
    }

    pub fn gen_name(&self, idx: usize) -> &str {
        &self.pres.generators[idx].name
    }

    pub fn gen_parity(&self, idx: usize) -> Parity {
        self.pres.generators[idx].parity
    }

    pub fn gen_weight(&self, idx: usize) -> Half {
        self.pres.generators[idx].weight
    }

    pub fn max_lambda(&self) -> u32 {
        self.max_lambda
    }

    /// Parity of one mode: generator parity shifted by the co-size of the
    /// odd index set.
    pub fn mode_parity(&self, k: &ModeKey) -> Parity {
        Parity::from_i64(
            self.gen_parity(k.gen).as_i64() + self.pres.n as i64 - k.jset.len() as i64,
        )
    }

    /// Grading weight of one mode under the half-integer mode grading.
    pub fn mode_weight(&self, k: &ModeKey) -> Half {
        let base = self.gen_weight(k.gen) + Half::from_int(-k.j - 1);
        base + Half::halves(self.pres.n as i64 - k.jset.len() as i64)
    }

    fn entry(&self, a: usize, b: usize) -> &[TableTerm] {
        self.table.get(&(a, b)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// The state `a_{(m|M)} b` read off the bracket table. Only nonnegative
    /// `m` label table slots; anything past the table depth is zero.
    pub fn product_mode(&self, a: usize, b: usize, m: i64, mset: IndexSet) -> ProductState {
        extract_mode(self.pres.flavor, self.entry(a, b), self.pres.n, m, mset)
    }

    /// Mode of a derivative word applied to a generator, reduced to a plain
    /// generator mode by the translation rules of the flavor.
    fn word_mode(&self, word: &Word, gen: usize, j: i64, jset: IndexSet) -> Option<(Rat, ModeKey)> {
        let n = self.pres.n;
        let mut coeff = rat_int(1);
        let mut j = j;
        let mut jset = jset;
        for _ in 0..word.tpow {
            coeff *= rat_int(-j);
            j -= 1;
        }
        for i in word.sset.iter() {
            let e = IndexSet::singleton(i);
            match self.pres.flavor {
                Flavor::NW => {
                    let s = sigma(e, jset.complement(n));
                    if s == 0 {
                        return None;
                    }
                    coeff *= rat_int(s);
                    jset = jset.difference(e);
                }
                Flavor::NK => {
                    if jset.contains(i) {
                        coeff *= rat_int(sigma(jset.complement(n), e));
                        jset = jset.difference(e);
                    } else {
                        let grown = jset.union(e);
                        coeff *= rat_int(-j) * rat_int(sigma(grown.complement(n), e));
                        j -= 1;
                        jset = grown;
                    }
                }
            }
        }
        use num_traits::Zero;
        if coeff.is_zero() {
            return None;
        }
        Some((coeff, ModeKey { gen, j, jset }))
    }

    /// Add `scale * (state)_{(j|jset)}` to the output, where `state` is a
    /// product decomposition.
    fn add_outer_mode(
        &self,
        out: &mut ModeElement,
        state: &ProductState,
        j: i64,
        jset: IndexSet,
        scale: &CPoly,
    ) {
        for (word, gen, co) in &state.terms {
            if let Some((sign, key)) = self.word_mode(word, *gen, j, jset) {
                out.add_mode(key, &(&co.scale(&sign) * scale));
            }
        }
        if !state.central.is_zero() && j == -1 && jset == IndexSet::full(self.pres.n) {
            out.central = &out.central + &(&state.central * scale);
        }
    }

    /// Commutator of two generator modes, graded symmetric on odd pairs.
    ///
    /// Both flavors expand `[a_{(l|L)}, Y(b,W)]` as a sum of divided
    /// derivatives of the monomial `W^{l|L}` times fields of the products
    /// `a_{(j|J)} b`, then extract the `(m|M)` mode of the right-hand side;
    /// pulling the left mode past the variable block of the field costs the
    /// `(p(a)+N-|L|)(N-|M|)` crossing sign shared by both flavors.
    /// In the NW flavor the odd derivative annihilates the monomial unless
    /// `J` sits inside `L`, and the leftover factor `W^{l-j|L\J}` shifts the
    /// outer label to `(l+m-j | M + (L\J))`, vanishing on overlap.
    pub fn bracket(&self, x: &ModeKey, y: &ModeKey) -> ModeElement {
        if !self.table.contains_key(&(x.gen, y.gen)) {
            // no entry in this order: resolve through graded antisymmetry
            if !self.table.contains_key(&(y.gen, x.gen)) {
                return ModeElement::zero();
            }
            let sign =
                -neg1_pow(self.mode_parity(x).as_i64() * self.mode_parity(y).as_i64());
            let mut out = ModeElement::zero();
            out.add_scaled(&self.bracket(y, x), &CPoly::from_int(sign));
            return out;
        }
        let n = self.pres.n;
        let nn = n as i64;
        let (l, lset, m, mset) = (x.j, x.jset, y.j, y.jset);
        let p_a = self.gen_parity(x.gen).as_i64();
        let mut out = ModeElement::zero();
        match self.pres.flavor {
            Flavor::NW => {
                for j in 0..=self.max_lambda as i64 {
                    for jset in lset.subsets() {
                        let total = nw_term_sign(n, p_a, lset, mset, jset);
                        if total == 0 {
                            continue;
                        }
                        let outer_set = mset.union(lset.difference(jset));
                        let coeff = big_to_rat(&binom_general(l, j as u32));
                        use num_traits::Zero;
                        if coeff.is_zero() {
                            continue;
                        }
                        let state = self.product_mode(x.gen, y.gen, j, jset);
                        let scale = CPoly::constant(&coeff * &rat_int(total));
                        self.add_outer_mode(&mut out, &state, l + m - j, outer_set, &scale);
                    }
                }
            }
            Flavor::NK => {
                for j in 0..=self.max_lambda as i64 {
                    for jset in IndexSet::full(n).subsets() {
                        let jdl = jset.symmetric_difference(lset);
                        if !mset.intersection(jdl).is_empty() {
                            continue;
                        }
                        let jml = jset.difference(lset);
                        let jcl = jset.intersection(lset);
                        let alpha = (p_a + nn - lset.len() as i64) * (nn - mset.len() as i64);
                        let beta = jset.len() as i64 * (nn - lset.len() as i64)
                            + lset.len() as i64 * nn
                            + choose2(jcl.len() as i64)
                            + choose2(jset.len() as i64 + 1);
                        let outer_set = mset.union(jdl);
                        let sg = sigma(jdl, outer_set.complement(n))
                            * sigma(jset, jset.complement(n))
                            * sigma(lset, lset.complement(n))
                            * sigma(jml, jcl)
                            * sigma(jcl, lset.difference(jset))
                            * sigma(jml, lset.difference(jset));
                        let total = neg1_pow(alpha + beta) * sg;
                        if total == 0 {
                            continue;
                        }
                        let coeff = big_to_rat(&falling(l, (j + jml.len() as i64) as u32))
                            / big_to_rat(&factorial(j as u32));
                        use num_traits::Zero;
                        if coeff.is_zero() {
                            continue;
                        }
                        let state = self.product_mode(x.gen, y.gen, j, jset);
                        let scale = CPoly::constant(&coeff * &rat_int(total));
                        self.add_outer_mode(
                            &mut out,
                            &state,
                            l + m - j - jml.len() as i64,
                            outer_set,
                            &scale,
                        );
                    }
                }
            }
        }
        out
    }

    /// Bracket of a mode with a finite combination (central parts drop).
    pub fn bracket_elem(&self, x: &ModeKey, e: &ModeElement) -> ModeElement {
        let mut out = ModeElement::zero();
        for (y, co) in &e.terms {
            let br = self.bracket(x, y);
            out.add_scaled(&br, co);
        }
        out
    }

    /// Render one mode as `name_(j|{set})`.
    pub fn mode_to_string(&self, k: &ModeKey) -> String {
        format!("{}_({}|{:?})", self.gen_name(k.gen), k.j, k.jset)
    }
}

/// Scalar `s` with `d_{j_1} .. d_{j_r} omega^L = s omega^{L\J}` for left odd
/// derivatives, `J = {j_1 < .. < j_r}`, rightmost applied first; zero unless
/// `J` sits inside `L`.
fn odd_deriv_sign(jset: IndexSet, lset: IndexSet) -> i64 {
    if !jset.is_subset(lset) {
        return 0;
    }
    let mut cur = lset;
    let mut s = 1i64;
    for i in jset.to_vec().into_iter().rev() {
        let e = IndexSet::singleton(i);
        s *= sigma(e, cur.difference(e));
        cur = cur.difference(e);
    }
    s
}

/// Sign of the `(j|J)` term of a commutator of generator modes
/// `[a_{(l|L)}, b_{(m|M)}]`; the full coefficient is this sign times
/// `binom(l, j)`, and the term lands at label `(l+m-j | M + (L\J))`.
///
/// Obtained by extracting the `(l|L)` and `(m|M)` modes from both sides
/// of the operator product expansion inside the two-variable superalgebra,
/// keeping every monomial in the canonical order `z^* w^* zeta^* omega^*`
/// with operators rightmost. The extraction prefactors cancel against the
/// merge signs, leaving three local factors: the divided odd derivative
/// folded through the product `(zeta^1-omega^1)..(zeta^N-omega^N)`, the
/// leftover `omega^{L\J}` block crossing the outer complement, and the
/// left mode crossing the variable block of the field it brackets with.
fn nw_term_sign(n: usize, p_a: i64, lset: IndexSet, mset: IndexSet, jset: IndexSet) -> i64 {
    let nn = n as i64;
    if !jset.is_subset(lset) {
        // odd derivative kills the monomial
        return 0;
    }
    let lmj = lset.difference(jset);
    if !lmj.intersection(mset).is_empty() {
        // repeated odd index against the extraction label
        return 0;
    }
    let outer = mset.union(lmj);
    // leftover monomial block past the field's variable block
    let sg = sigma(lmj, outer.complement(n));
    if sg == 0 {
        return 0;
    }
    // coefficient of zeta^{N\L} omega^L in the product of the binomials,
    // folded left to right into the canonical block order
    let mut c = 1i64;
    let mut omega_len = 0i64;
    for i in IndexSet::full(n).iter() {
        if lset.contains(i) {
            c = -c;
            omega_len += 1;
        } else {
            c *= neg1_pow(omega_len);
        }
    }
    // left odd derivatives for J, each passing the zeta block first
    c *= neg1_pow(jset.len() as i64 * (nn - lset.len() as i64));
    c *= odd_deriv_sign(jset, lset);
    // divided-power normalization of the derivative
    c *= neg1_pow(choose2(jset.len() as i64 + 1));
    c *= sg;
    // left mode past the field's variable block
    c *= neg1_pow((p_a + nn - lset.len() as i64) * (nn - mset.len() as i64));
    c
}

fn extract_mode(
    flavor: Flavor,
    terms: &[TableTerm],
    n: usize,
    m: i64,
    mset: IndexSet,
) -> ProductState {
    let mut out = ProductState::default();
    if m < 0 {
        return out;
    }
    // inverse of the divided-power normalization in front of the bracket
    // monomials; the two flavors normalize the odd block differently
    let r = mset.len() as i64;
    let sg = match flavor {
        Flavor::NW => neg1_pow(r * (n as i64 + 1)),
        Flavor::NK => sigma(mset, mset.complement(n)),
    };
    let scale = rat_int(sg * neg1_pow(choose2(r))) * big_to_rat(&factorial(m as u32));
    for t in terms {
        if t.lambda as i64 != m || t.chi != mset {
            continue;
        }
        let co = t.coeff.scale(&scale);
        match &t.target {
            Some((w, g)) => out.terms.push((*w, *g, co)),
            None => out.central = &out.central + &co,
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Presets.
// ---------------------------------------------------------------------------

fn term(
    coeff: CPoly,
    lambda: u32,
    chi: &[u8],
    target: Option<(&[&str], &str)>,
) -> BracketTerm {
    BracketTerm {
        coeff,
        lambda,
        chi: IndexSet::from_indices(chi),
        target: target.map(|(word, gen)| TargetRef {
            word: word.iter().map(|s| s.to_string()).collect(),
            gen: gen.to_string(),
        }),
    }
}

/// The defining presentation for a preset, before table compilation.
pub fn preset_presentation(kind: PresetKind, n: usize, central: bool) -> Result<Presentation> {
    match kind {
        PresetKind::NeveuSchwarz => {
            if n != 1 {
                return Err(Error::Invalid(format!(
                    "the Neveu-Schwarz preset has exactly one odd direction, got n = {n}"
                )));
            }
            let mut terms = vec![
                term(CPoly::from_int(2), 0, &[], Some((&["T"], "tau"))),
                term(CPoly::from_int(3), 1, &[], Some((&[], "tau"))),
                term(CPoly::one(), 0, &[1], Some((&["S1"], "tau"))),
            ];
            if central {
                terms.push(term(CPoly::c().scale(&rat(1, 3)), 2, &[1], None));
            }
            Ok(Presentation {
                schema: PRESENTATION_SCHEMA.into(),
                name: if central { "ns".into() } else { "ns-nocentral".into() },
                flavor: Flavor::NK,
                n: 1,
                generators: vec![GeneratorSpec {
                    name: "tau".into(),
                    parity: Parity::Odd,
                    weight: Half::halves(3),
                }],
                brackets: vec![BracketEntry {
                    left: "tau".into(),
                    right: "tau".into(),
                    terms,
                }],
            })
        }
        PresetKind::WAlgebra => {
            if n > MAX_N {
                return Err(Error::Invalid(format!("n = {n} exceeds {MAX_N}")));
            }
            if central && !(n == 1 || n == 2) {
                return Err(Error::UnsupportedExtension(format!(
                    "the w-algebra family admits a central extension only for n = 1 or 2, got n = {n}"
                )));
            }
            let l_parity = Parity::from_i64(n as i64);
            let q_parity = l_parity.flip();
            let mut generators = vec![GeneratorSpec {
                name: "L".into(),
                parity: l_parity,
                weight: Half::from_int(2),
            }];
            let qname = |i: usize| format!("Q{i}");
            for i in 1..=n {
                generators.push(GeneratorSpec {
                    name: qname(i),
                    parity: q_parity,
                    weight: Half::halves(3),
                });
            }
            let mut brackets = vec![BracketEntry {
                left: "L".into(),
                right: "L".into(),
                terms: vec![
                    term(CPoly::one(), 0, &[], Some((&["T"], "L"))),
                    term(CPoly::from_int(2), 1, &[], Some((&[], "L"))),
                ],
            }];
            for i in 1..=n {
                let qi = qname(i);
                let mut terms = vec![
                    term(CPoly::one(), 0, &[], Some((&["T"], &qi))),
                    term(CPoly::one(), 1, &[], Some((&[], &qi))),
                    term(
                        CPoly::from_int(neg1_pow(n as i64)),
                        0,
                        &[i as u8],
                        Some((&[], "L")),
                    ),
                ];
                if central && n == 1 {
                    terms.push(term(CPoly::c().scale(&rat(1, 6)), 2, &[], None));
                }
                brackets.push(BracketEntry {
                    left: "L".into(),
                    right: qi.clone(),
                    terms,
                });
            }
            for i in 1..=n {
                let si = format!("S{i}");
                for j in i..=n {
                    let (qi, qj) = (qname(i), qname(j));
                    let mut terms = vec![term(
                        CPoly::one(),
                        0,
                        &[],
                        Some((&[si.as_str()], &qj)),
                    )];
                    if i != j {
                        terms.push(term(CPoly::one(), 0, &[i as u8], Some((&[], &qj))));
                        terms.push(term(CPoly::from_int(-1), 0, &[j as u8], Some((&[], &qi))));
                    }
                    if central {
                        if n == 1 {
                            terms.push(term(CPoly::c().scale(&rat(1, 3)), 1, &[1], None));
                        } else if n == 2 && i == 1 && j == 2 {
                            terms.push(term(CPoly::c().scale(&rat(1, 6)), 1, &[], None));
                        }
                    }
                    brackets.push(BracketEntry {
                        left: qi,
                        right: qj,
                        terms,
                    });
                }
            }
            Ok(Presentation {
                schema: PRESENTATION_SCHEMA.into(),
                name: format!("w{n}{}", if central { "c" } else { "" }),
                flavor: Flavor::NW,
                n,
                generators,
                brackets,
            })
        }
    }
}

/// Build the compiled mode algebra for a preset.
pub fn preset(kind: PresetKind, n: usize, central: bool) -> Result<Algebra> {
    Algebra::from_presentation(preset_presentation(kind, n, central)?)
}

/// Bundled presentation files; each parses to the corresponding programmatic
/// preset.
pub const BUNDLED_PRESETS: [(&str, &str); 4] = [
    ("ns", include_str!("../presets/ns.json")),
    ("w1c", include_str!("../presets/w1c.json")),
    ("w2c", include_str!("../presets/w2c.json")),
    ("w3", include_str!("../presets/w3.json")),
];

#[cfg(test)]
mod tests {
    use super::*;

    fn l(n: i64) -> NsMode {
        NsMode::l(n)
    }

    fn g(t: i64) -> NsMode {
        NsMode::g_halves(t)
    }

    fn rt(n: i64, d: i64) -> Rat {
        rat(n, d)
    }

    // -- classical bracket ---------------------------------------------------

    #[test]
    fn classical_bracket_pins() {
        // [L_1, L_-1] = 2 L_0
        let b = ns_bracket(l(1), l(-1));
        assert_eq!(b.modes.len(), 1);
        assert_eq!(b.modes[&l(0)], rat_int(2));
        assert!(b.central.is_zero());
        // [G_{3/2}, G_{-3/2}] = 2 L_0 + (2/3) c
        let b = ns_bracket(g(3), g(-3));
        assert_eq!(b.modes[&l(0)], rat_int(2));
        assert_eq!(b.central, CPoly::c().scale(&rt(2, 3)));
        // [G_{1/2}, L_{-1}] = G_{-1/2}
        let b = ns_bracket(g(1), l(-1));
        assert_eq!(b.modes[&g(-1)], rat_int(1));
        assert!(b.central.is_zero());
        // [L_2, G_{-1/2}] = (3/2) G_{3/2}
        let b = ns_bracket(l(2), g(-1));
        assert_eq!(b.modes[&g(3)], rt(3, 2));
    }

    #[test]
    fn classical_super_jacobi_small_indices() {
        let mut modes = vec![];
        for n in -3..=3 {
            modes.push(l(n));
        }
        for t in [-5i64, -3, -1, 1, 3, 5] {
            modes.push(g(t));
        }
        let bracket_combo = |x: NsMode, e: &NsCombo| -> NsCombo {
            let mut out = NsCombo::zero();
            for (y, r) in &e.modes {
                out.add_scaled(&ns_bracket(x, *y), r);
            }
            out
        };
        for &r in &modes {
            for &s in &modes {
                for &t in &modes {
                    let pr = r.parity().as_i64();
                    let ps = s.parity().as_i64();
                    let pt = t.parity().as_i64();
                    let mut acc = NsCombo::zero();
                    acc.add_scaled(
                        &bracket_combo(r, &ns_bracket(s, t)),
                        &rat_int(neg1_pow(pr * pt)),
                    );
                    acc.add_scaled(
                        &bracket_combo(s, &ns_bracket(t, r)),
                        &rat_int(neg1_pow(ps * pr)),
                    );
                    acc.add_scaled(
                        &bracket_combo(t, &ns_bracket(r, s)),
                        &rat_int(neg1_pow(pt * ps)),
                    );
                    assert!(acc.is_zero(), "jacobi fails on {r}, {s}, {t}: {acc:?}");
                }
            }
        }
    }

    // -- straightening -------------------------------------------------------

    #[test]
    fn normal_order_pins() {
        // G_{-3/2}|0> is the odd generator state
        let tau = normal_order(&[g(-3)]);
        let m_tau = PBWMonomial {
            l_parts: vec![],
            g_parts: vec![Half::halves(3)],
        };
        assert_eq!(tau, ModuleState::from_monomial(m_tau));
        // L_{-1}|0> = 0
        assert!(normal_order(&[l(-1)]).is_zero());
        // G_{-1/2} G_{-3/2}|0> = 2 L_{-2}|0>
        let st = normal_order(&[g(-1), g(-3)]);
        let m_nu = PBWMonomial {
            l_parts: vec![2],
            g_parts: vec![],
        };
        assert_eq!(st, ModuleState::from_monomial(m_nu).scale(&CPoly::from_int(2)));
        // G_{-3/2} G_{-3/2}|0> = L_{-3}|0>
        let st = normal_order(&[g(-3), g(-3)]);
        let m = PBWMonomial {
            l_parts: vec![3],
            g_parts: vec![],
        };
        assert_eq!(st, ModuleState::from_monomial(m));
        // G_{1/2} G_{-3/2}|0> = 2 L_{-1}|0> = 0
        assert!(normal_order(&[g(1), g(-3)]).is_zero());
        // G_{3/2} G_{-3/2}|0> = (2/3) c |0>
        let st = normal_order(&[g(3), g(-3)]);
        assert_eq!(st, ModuleState::vacuum().scale(&CPoly::c().scale(&rt(2, 3))));
    }

    #[test]
    fn weight_and_parity_additivity() {
        let probe_modes: Vec<NsMode> = vec![
            l(-3), l(-1), l(0), l(1), l(2), g(-5), g(-3), g(-1), g(1), g(3),
        ];
        for (_, monos) in ns_basis(Half::halves(9)) {
            for m in monos {
                let st = ModuleState::from_monomial(m.clone());
                for &x in &probe_modes {
                    let out = apply_mode(x, &st);
                    if out.is_zero() {
                        continue;
                    }
                    assert_eq!(out.weight(), Some(m.weight() - x.index()), "weight: {x} on {m}");
                    let want = Parity::from_i64(
                        m.parity().as_i64() + x.parity().as_i64(),
                    );
                    assert_eq!(out.parity(), Some(want), "parity: {x} on {m}");
                }
            }
        }
    }

    // -- basis ---------------------------------------------------------------

    #[test]
    fn basis_dimensions() {
        let dims: Vec<(i64, usize)> = vec![
            (0, 1),
            (1, 0),
            (2, 0),
            (3, 1),
            (4, 1),
            (5, 1),
            (6, 1),
            (7, 2),
            (8, 3),
            (9, 3),
            (10, 3),
        ];
        let table = ns_basis(Half::halves(10));
        for (t, want) in dims {
            let got = table
                .iter()
                .find(|(w, _)| *w == Half::halves(t))
                .map(|(_, v)| v.len())
                .unwrap();
            assert_eq!(got, want, "dim at weight {}", Half::halves(t));
        }
        // weight 7/2 is spanned by L_{-2} G_{-3/2} and G_{-7/2}
        let w72 = ns_basis_at(Half::halves(7));
        assert_eq!(
            w72,
            vec![
                PBWMonomial {
                    l_parts: vec![],
                    g_parts: vec![Half::halves(7)],
                },
                PBWMonomial {
                    l_parts: vec![2],
                    g_parts: vec![Half::halves(3)],
                },
            ]
        );
    }

    // -- singular vectors ----------------------------------------------------

    #[test]
    fn singular_vectors_symbolic() {
        assert_eq!(singular_vectors(Half::ZERO, &CentralCharge::Symbolic).len(), 1);
        for t in 1..=8 {
            let dim = singular_vectors(Half::halves(t), &CentralCharge::Symbolic).len();
            assert_eq!(dim, 0, "symbolic kernel at weight {}", Half::halves(t));
        }
    }

    #[test]
    fn singular_vectors_specialized_charges() {
        // at c = 0 the odd generator state becomes singular
        let v = singular_vectors(Half::halves(3), &CentralCharge::Value(rat_int(0)));
        assert_eq!(v.len(), 1);
        let m_tau = PBWMonomial {
            l_parts: vec![],
            g_parts: vec![Half::halves(3)],
        };
        assert_eq!(v[0].terms.len(), 1);
        assert!(v[0].terms.contains_key(&m_tau));
        // at c = 7/10 a weight-4 singular vector appears
        let v = singular_vectors(Half::from_int(4), &CentralCharge::Value(rt(7, 10)));
        assert_eq!(v.len(), 1);
        // and generic nearby weights stay regular at that charge
        for t in [3i64, 5, 6, 7] {
            let v = singular_vectors(Half::halves(t), &CentralCharge::Value(rt(7, 10)));
            assert_eq!(v.len(), 0, "weight {}", Half::halves(t));
        }
    }

    // -- presets and tables --------------------------------------------------

    #[test]
    fn ns_preset_table_contents() {
        let alg = preset(PresetKind::NeveuSchwarz, 1, true).unwrap();
        // the linear term 3 lambda tau is present
        let pres = alg.presentation();
        let entry = &pres.brackets[0];
        assert!(entry.terms.iter().any(|t| {
            t.lambda == 1
                && t.chi.is_empty()
                && t.coeff == CPoly::from_int(3)
                && t.target.as_ref().is_some_and(|tr| tr.gen == "tau" && tr.word.is_empty())
        }));
    }

    #[test]
    fn ns_preset_worked_modes() {
        let alg = preset(PresetKind::NeveuSchwarz, 1, true).unwrap();
        let tau = alg.generator("tau").unwrap();
        let one = IndexSet::singleton(1);
        // tau_(0|{1}) tau = S1 tau (twice the even generator state)
        let p = alg.product_mode(tau, tau, 0, one);
        assert_eq!(p.terms, vec![(Word { tpow: 0, sset: one }, tau, CPoly::one())]);
        assert!(p.central.is_zero());
        // tau_(1|{1}) tau = 0
        let p = alg.product_mode(tau, tau, 1, one);
        assert!(p.terms.is_empty() && p.central.is_zero());
        // tau_(2|{1}) tau = (2c/3) |0>
        let p = alg.product_mode(tau, tau, 2, one);
        assert!(p.terms.is_empty());
        assert_eq!(p.central, CPoly::c().scale(&rt(2, 3)));
        // tau_(0|()) tau = 2 T tau
        let p = alg.product_mode(tau, tau, 0, IndexSet::EMPTY);
        assert_eq!(
            p.terms,
            vec![(Word { tpow: 1, sset: IndexSet::EMPTY }, tau, CPoly::from_int(2))]
        );
        // tau_(1|()) tau = 3 tau
        let p = alg.product_mode(tau, tau, 1, IndexSet::EMPTY);
        assert_eq!(
            p.terms,
            vec![(Word::identity(), tau, CPoly::from_int(3))]
        );
        // tau_(2|()) tau = 0
        let p = alg.product_mode(tau, tau, 2, IndexSet::EMPTY);
        assert!(p.terms.is_empty() && p.central.is_zero());
    }

    /// classical image of one table mode: (multiplier, classical mode)
    fn ns_classical_of(k: &ModeKey) -> (Rat, NsMode) {
        if k.jset.is_empty() {
            (rat_int(2), NsMode::L(Half::from_int(k.j - 1)))
        } else {
            (rat_int(1), NsMode::G(Half::from_int(k.j) - Half::halves(1)))
        }
    }

    fn ns_superfield_of(x: NsMode) -> (Rat, ModeKey) {
        match x {
            NsMode::L(h) => (
                rt(1, 2),
                ModeKey {
                    gen: 0,
                    j: h.as_int() + 1,
                    jset: IndexSet::EMPTY,
                },
            ),
            NsMode::G(h) => (
                rat_int(1),
                ModeKey {
                    gen: 0,
                    j: (h + Half::halves(1)).as_int(),
                    jset: IndexSet::singleton(1),
                },
            ),
        }
    }

    #[test]
    fn table_commutator_matches_classical_bracket() {
        let alg = preset(PresetKind::NeveuSchwarz, 1, true).unwrap();
        let mut keys = vec![];
        // classical indices up to 5/2 in absolute value
        for j in -1..=3 {
            keys.push(ModeKey { gen: 0, j, jset: IndexSet::EMPTY });
        }
        for j in -2..=3 {
            keys.push(ModeKey { gen: 0, j, jset: IndexSet::singleton(1) });
        }
        for x in &keys {
            for y in &keys {
                let got = alg.bracket(x, y);
                // expected: translate to classical modes, bracket, translate back
                let (mx, cx) = ns_classical_of(x);
                let (my, cy) = ns_classical_of(y);
                let br = ns_bracket(cx, cy);
                let mut want = ModeElement::zero();
                let scale = &mx * &my;
                for (z, r) in &br.modes {
                    let (mz, kz) = ns_superfield_of(*z);
                    want.add_mode(kz, &CPoly::constant(&(&mz * r) * &scale));
                }
                want.central = br.central.scale(&scale);
                assert_eq!(
                    got,
                    want,
                    "commutator mismatch at {} {}",
                    alg.mode_to_string(x),
                    alg.mode_to_string(y)
                );
            }
        }
    }

    #[test]
    fn table_mode_weight_additivity_nk() {
        let alg = preset(PresetKind::NeveuSchwarz, 1, true).unwrap();
        let mut keys = vec![];
        for j in -2..=3 {
            keys.push(ModeKey { gen: 0, j, jset: IndexSet::EMPTY });
            keys.push(ModeKey { gen: 0, j, jset: IndexSet::singleton(1) });
        }
        for x in &keys {
            for y in &keys {
                let want = alg.mode_weight(x) + alg.mode_weight(y);
                let br = alg.bracket(x, y);
                for k in br.terms.keys() {
                    assert_eq!(alg.mode_weight(k), want);
                }
                if !br.central.is_zero() {
                    // the central element carries mode weight zero
                    assert_eq!(want, Half::ZERO);
                }
            }
        }
    }

    fn w_mode_keys(alg: &Algebra, j_lo: i64, j_hi: i64) -> Vec<ModeKey> {
        let n = alg.n();
        let gens = alg.presentation().generators.len();
        let mut keys = vec![];
        for gen in 0..gens {
            for j in j_lo..=j_hi {
                for jset in IndexSet::full(n).subsets() {
                    keys.push(ModeKey { gen, j, jset });
                }
            }
        }
        keys
    }

    fn antisymmetry_violations(alg: &Algebra, keys: &[ModeKey]) -> usize {
        let mut bad = 0;
        for x in keys {
            for y in keys {
                let fwd = alg.bracket(x, y);
                let rev = alg.bracket(y, x);
                let sign =
                    neg1_pow(alg.mode_parity(x).as_i64() * alg.mode_parity(y).as_i64());
                let mut acc = fwd.clone();
                acc.add_scaled(&rev, &CPoly::from_int(sign));
                if !acc.is_zero() {
                    bad += 1;
                }
            }
        }
        bad
    }

    fn jacobi_violations(alg: &Algebra, keys: &[ModeKey], stride: usize) -> usize {
        let mut bad = 0;
        let mut counter = 0usize;
        for x in keys {
            for y in keys {
                for z in keys {
                    counter += 1;
                    if counter % stride != 0 {
                        continue;
                    }
                    let px = alg.mode_parity(x).as_i64();
                    let py = alg.mode_parity(y).as_i64();
                    let pz = alg.mode_parity(z).as_i64();
                    let mut acc = ModeElement::zero();
                    acc.add_scaled(
                        &alg.bracket_elem(x, &alg.bracket(y, z)),
                        &CPoly::from_int(neg1_pow(px * pz)),
                    );
                    acc.add_scaled(
                        &alg.bracket_elem(y, &alg.bracket(z, x)),
                        &CPoly::from_int(neg1_pow(py * px)),
                    );
                    acc.add_scaled(
                        &alg.bracket_elem(z, &alg.bracket(x, y)),
                        &CPoly::from_int(neg1_pow(pz * py)),
                    );
                    if !acc.is_zero() {
                        bad += 1;
                    }
                }
            }
        }
        bad
    }

    #[test]
    fn w_algebra_antisymmetry_and_jacobi() {
        for (n, central) in [(1, false), (1, true), (2, true), (2, false), (3, false)] {
            let alg = preset(PresetKind::WAlgebra, n, central).unwrap();
            let keys = w_mode_keys(&alg, -2, 2);
            assert_eq!(
                antisymmetry_violations(&alg, &keys),
                0,
                "antisymmetry fails for w{n} central={central}"
            );
            let keys = w_mode_keys(&alg, -1, 1);
            // full sweep for one odd direction, strided samples beyond
            let stride = match n {
                1 => 1,
                2 => 11,
                _ => 997,
            };
            assert_eq!(
                jacobi_violations(&alg, &keys, stride),
                0,
                "jacobi fails for w{n} central={central}"
            );
        }
    }

    #[test]
    fn nw_commutator_term_signs() {
        // hand-folded values of the odd block bookkeeping on two odd
        // directions; position dependence shows up from size two onward
        let e = IndexSet::EMPTY;
        let s1 = IndexSet::from_indices(&[1]);
        let s2 = IndexSet::from_indices(&[2]);
        let s12 = IndexSet::from_indices(&[1, 2]);
        for (jset, lset, want) in [
            (e, e, 1),
            (e, s1, 1),
            (e, s2, 1),
            (e, s12, 1),
            (s1, s1, 1),
            (s1, s12, 1),
            (s2, s2, -1),
            (s2, s12, 1),
            (s12, s12, 1),
        ] {
            assert_eq!(
                nw_term_sign(2, 0, lset, e, jset),
                want,
                "J={jset:?} L={lset:?}"
            );
        }
        // the odd derivative kills directions outside the monomial block
        assert_eq!(nw_term_sign(2, 0, s1, e, s2), 0);
        // a leftover block index repeated against the outer label dies
        assert_eq!(nw_term_sign(2, 0, s1, s1, e), 0);
        // the crossing factor flips with the left parity
        assert_eq!(nw_term_sign(2, 0, s1, s2, e), -1);
        assert_eq!(nw_term_sign(2, 1, s1, s2, e), 1);
    }

    #[test]
    fn w_algebra_parity_additivity() {
        let alg = preset(PresetKind::WAlgebra, 2, true).unwrap();
        let keys = w_mode_keys(&alg, -1, 1);
        for x in &keys {
            for y in &keys {
                let br = alg.bracket(x, y);
                let want = (alg.mode_parity(x).as_i64() + alg.mode_parity(y).as_i64())
                    .rem_euclid(2);
                for k in br.terms.keys() {
                    assert_eq!(alg.mode_parity(k).as_i64(), want);
                }
                if !br.central.is_zero() {
                    assert_eq!(want, 0);
                }
            }
        }
    }

    #[test]
    fn preset_errors() {
        match preset(PresetKind::WAlgebra, 3, true) {
            Err(Error::UnsupportedExtension(_)) => {}
            other => panic!("expected unsupported-extension error, got {other:?}"),
        }
        assert!(preset(PresetKind::NeveuSchwarz, 2, true).is_err());
    }

    #[test]
    fn w1_central_bracket_values() {
        // [Q_L Q] = S Q + (lambda chi / 3) C and [L_L Q] = (T+lambda) Q - chi L + (lambda^2/6) C
        let alg = preset(PresetKind::WAlgebra, 1, true).unwrap();
        let l_ = alg.generator("L").unwrap();
        let q = alg.generator("Q1").unwrap();
        let one = IndexSet::singleton(1);
        let p = alg.product_mode(q, q, 0, IndexSet::EMPTY);
        assert_eq!(p.terms, vec![(Word { tpow: 0, sset: one }, q, CPoly::one())]);
        let p = alg.product_mode(q, q, 1, one);
        assert!(p.terms.is_empty());
        assert_eq!(p.central, CPoly::c().scale(&rt(1, 3)));
        let p = alg.product_mode(l_, q, 2, IndexSet::EMPTY);
        assert_eq!(p.central, CPoly::c().scale(&rt(1, 3)));
        let p = alg.product_mode(l_, q, 0, one);
        assert_eq!(p.terms, vec![(Word::identity(), l_, CPoly::from_int(-1))]);
    }

    #[test]
    fn bundled_presets_match_programmatic() {
        for (name, text) in BUNDLED_PRESETS {
            let parsed = Presentation::from_json(text)
                .unwrap_or_else(|e| panic!("preset file {name}: {e}"));
            let want = match name {
                "ns" => preset_presentation(PresetKind::NeveuSchwarz, 1, true),
                "w1c" => preset_presentation(PresetKind::WAlgebra, 1, true),
                "w2c" => preset_presentation(PresetKind::WAlgebra, 2, true),
                "w3" => preset_presentation(PresetKind::WAlgebra, 3, false),
                _ => unreachable!(),
            }
            .unwrap();
            assert_eq!(parsed, want, "bundled preset {name} drifted");
            Algebra::from_presentation(parsed).unwrap();
        }
    }

    #[test]
    fn presentation_validation_errors() {
        let mut p = preset_presentation(PresetKind::NeveuSchwarz, 1, true).unwrap();
        p.schema = "susyva-presentation/v0".into();
        assert!(p.validate().is_err());
        let mut p = preset_presentation(PresetKind::NeveuSchwarz, 1, true).unwrap();
        p.brackets[0].terms[0].chi = IndexSet::from_indices(&[2]);
        assert!(p.validate().is_err());
        let mut p = preset_presentation(PresetKind::NeveuSchwarz, 1, true).unwrap();
        // flip one term's parity by dropping its derivative letter
        p.brackets[0].terms[2].target = Some(TargetRef {
            word: vec![],
            gen: "tau".into(),
        });
        assert!(p.validate().is_err());
    }

    #[test]
    fn word_reduction_rules() {
        // NW: squares vanish, distinct letters anticommute
        assert_eq!(reduce_letters(Flavor::NW, vec![2, 1]), Some((-1, 0, IndexSet::from_indices(&[1, 2]))));
        assert_eq!(reduce_letters(Flavor::NW, vec![1, 1]), None);
        // NK: a square contributes one T
        assert_eq!(reduce_letters(Flavor::NK, vec![1, 1]), Some((1, 1, IndexSet::EMPTY)));
        assert_eq!(
            reduce_letters(Flavor::NK, vec![2, 1, 2]),
            // S2 S1 S2 = -S1 S2 S2 = -S1 T
            Some((-1, 1, IndexSet::singleton(1)))
        );
    }
}
