//! Springer fibers over finite fields: pairs of isotropic flags
//! `E₁ ⊂ … ⊂ E_n ⊆ V₀`, `F₁ ⊂ … ⊂ F_n ⊆ V₁` with `u(E_i) ⊆ F_{i−1}` and
//! `u*(F_i) ⊆ E_i`, their classification into strata and point-graph
//! connectivity.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::diagram::{MarkedDiagram, Parity};
use crate::error::{Error, Result};
use crate::exactalg::{isotropic_lines, projective_points, quotient_restriction, Field, Subspace};
use crate::realize::{sector_stratum, Realization};
use crate::slicing::{enumerate_slicings, rank_of, stratum_profile, Slicing};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Node budget, overridable through `SUPERFIBER_BUDGET`.
pub fn budget_from_env() -> u64 {
    std::env::var("SUPERFIBER_BUDGET").ok().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_BUDGET)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagPair<F: Field> {
    pub e: Vec<Subspace<F>>,
    pub f: Vec<Subspace<F>>,
}

impl<F: Field> Ord for FlagPair<F> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (&self.e, &self.f).cmp(&(&other.e, &other.f))
    }
}

impl<F: Field> PartialOrd for FlagPair<F> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl<F: Field> std::hash::Hash for FlagPair<F> {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.e.hash(state);
        self.f.hash(state);
    }
}

impl<F: Field> FlagPair<F> {
    fn e_at(&self, i: usize, ambient: &Subspace<F>) -> Subspace<F> {
        if i == 0 {
            Subspace::zero(ambient.field().clone(), ambient.ambient())
        } else {
            self.e[i - 1].clone()
        }
    }

    fn f_at(&self, i: usize, ambient: &Subspace<F>) -> Subspace<F> {
        if i == 0 {
            Subspace::zero(ambient.field().clone(), ambient.ambient())
        } else {
            self.f[i - 1].clone()
        }
    }
}

struct Budget {
    used: AtomicU64,
    limit: u64,
}

impl Budget {
    fn new(limit: u64) -> Self {
        Budget { used: AtomicU64::new(0), limit }
    }

    fn spend(&self, n: u64) -> Result<()> {
        if self.used.fetch_add(n, Ordering::Relaxed) + n > self.limit {
            Err(Error::BudgetExceeded { budget: self.limit })
        } else {
            Ok(())
        }
    }
}

fn fiber_rank<F: Field>(r: &Realization<F>) -> Result<usize> {
    if r.field().order().is_none() {
        return Err(Error::Precondition("fiber enumeration needs a finite field".into()));
    }
    rank_of(&r.diagram)
}

/// Lines `⟨v⟩ ⊆ w`, `v ∉ base`, with `base + ⟨v⟩` totally isotropic, returned
/// as the extended subspaces, without repetition.
fn extensions<F: Field>(
    base: &Subspace<F>,
    w: &Subspace<F>,
    r: &Realization<F>,
    eps: Parity,
    budget: &Budget,
) -> Result<Vec<Subspace<F>>> {
    let f = base.field().clone();
    let form = r.form(eps);
    let points = projective_points(&f, w.dim());
    budget.spend(points.len() as u64)?;
    let mut seen = BTreeSet::new();
    for c in points {
        let v = crate::exactalg::subspace::combine(&f, w.basis(), &c);
        if base.contains(&v) || !form.is_isotropic_vector(&v) {
            continue;
        }
        let mut rows = base.vectors();
        rows.push(v);
        let t = Subspace::span(f.clone(), base.ambient(), &rows);
        if !seen.contains(&t) && form.is_totally_isotropic(&t) {
            seen.insert(t);
        }
    }
    Ok(seen.into_iter().collect())
}

/// Nested enumeration straight from the defining conditions, in the order
/// `E₁, F₁, E₂, F₂, …`.
pub fn enumerate_fiber_direct<F: Field>(r: &Realization<F>, budget: u64) -> Result<BTreeSet<FlagPair<F>>> {
    let n = fiber_rank(r)?;
    let budget = Budget::new(budget);
    let empty = FlagPair { e: Vec::new(), f: Vec::new() };
    if n == 0 {
        return Ok([empty].into_iter().collect());
    }
    let firsts = next_e(r, &empty, &budget)?;
    let parts: Vec<Result<Vec<FlagPair<F>>>> = firsts
        .into_par_iter()
        .map(|p| {
            let mut out = Vec::new();
            direct_from(r, n, p, &budget, &mut out)?;
            Ok(out)
        })
        .collect();
    let mut all = BTreeSet::new();
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

fn next_e<F: Field>(r: &Realization<F>, flag: &FlagPair<F>, budget: &Budget) -> Result<Vec<FlagPair<F>>> {
    let full0 = Subspace::full(r.field().clone(), r.dim(Parity::Even));
    let full1 = Subspace::full(r.field().clone(), r.dim(Parity::Odd));
    let i = flag.e.len() + 1;
    let prev = flag.e_at(i - 1, &full0);
    let fprev = flag.f_at(i - 1, &full1);
    let w = r.phi.perp(&prev)?.intersect(&fprev.preimage(&r.u)?)?;
    Ok(extensions(&prev, &w, r, Parity::Even, budget)?
        .into_iter()
        .map(|t| {
            let mut nf = flag.clone();
            nf.e.push(t);
            nf
        })
        .collect())
}

fn next_f<F: Field>(r: &Realization<F>, flag: &FlagPair<F>, budget: &Budget) -> Result<Vec<FlagPair<F>>> {
    let full1 = Subspace::full(r.field().clone(), r.dim(Parity::Odd));
    let i = flag.f.len() + 1;
    let prev = flag.f_at(i - 1, &full1);
    let w = r.psi.perp(&prev)?.intersect(&flag.e[i - 1].preimage(&r.ustar)?)?;
    Ok(extensions(&prev, &w, r, Parity::Odd, budget)?
        .into_iter()
        .map(|t| {
            let mut nf = flag.clone();
            nf.f.push(t);
            nf
        })
        .collect())
}

fn direct_from<F: Field>(
    r: &Realization<F>,
    n: usize,
    flag: FlagPair<F>,
    budget: &Budget,
    out: &mut Vec<FlagPair<F>>,
) -> Result<()> {
    if flag.e.len() == n && flag.f.len() == n {
        out.push(flag);
        return Ok(());
    }
    let children = if flag.e.len() > flag.f.len() { next_f(r, &flag, budget)? } else { next_e(r, &flag, budget)? };
    for c in children {
        direct_from(r, n, c, budget, out)?;
    }
    Ok(())
}

/// Tower enumeration: pick an isotropic line of `Ker X` in the current
/// sector, pass to `x^⊥/x`, recurse, and lift back.
pub fn enumerate_fiber_recursive<F: Field>(r: &Realization<F>, budget: u64) -> Result<BTreeSet<FlagPair<F>>> {
    fiber_rank(r)?;
    let budget = Budget::new(budget);
    Ok(tower(r, Parity::Even, &budget, true)?.into_iter().collect())
}

fn tower<F: Field>(r: &Realization<F>, side: Parity, budget: &Budget, parallel: bool) -> Result<Vec<FlagPair<F>>> {
    if r.dim(Parity::Odd) == 0 && side == Parity::Even {
        return Ok(vec![FlagPair { e: Vec::new(), f: Vec::new() }]);
    }
    let ker = r.kernel(side);
    let lines: Vec<Subspace<F>> = isotropic_lines(&ker, r.form(side)).collect();
    budget.spend(lines.len() as u64 + 1)?;
    let step = |x: Subspace<F>| -> Result<Vec<FlagPair<F>>> {
        let (s0, s1) = match side {
            Parity::Even => (x.clone(), Subspace::zero(r.field().clone(), r.dim(Parity::Odd))),
            Parity::Odd => (Subspace::zero(r.field().clone(), r.dim(Parity::Even)), x.clone()),
        };
        let q = quotient_restriction(&s0, &s1, &r.phi, &r.psi, &r.u)?;
        let sub = Realization::new(q.phi.clone(), q.psi.clone(), q.u.clone())?;
        let lift = |s: &Subspace<F>, sector: Parity| {
            let (quot, base, amb) = match sector {
                Parity::Even => (&q.sector0, &s0, r.dim(Parity::Even)),
                Parity::Odd => (&q.sector1, &s1, r.dim(Parity::Odd)),
            };
            let mut rows: Vec<_> = s.vectors().iter().map(|w| quot.lift(w)).collect();
            rows.extend(base.vectors());
            Subspace::span(r.field().clone(), amb, &rows)
        };
        let mut out = Vec::new();
        for fl in tower(&sub, side.flip(), budget, false)? {
            let mut e: Vec<_> = fl.e.iter().map(|s| lift(s, Parity::Even)).collect();
            let mut f: Vec<_> = fl.f.iter().map(|s| lift(s, Parity::Odd)).collect();
            match side {
                Parity::Even => e.insert(0, x.clone()),
                Parity::Odd => f.insert(0, x.clone()),
            }
            out.push(FlagPair { e, f });
        }
        Ok(out)
    };
    let parts: Vec<Result<Vec<FlagPair<F>>>> =
        if parallel { lines.into_par_iter().map(step).collect() } else { lines.into_iter().map(step).collect() };
    let mut all = Vec::new();
    for p in parts {
        all.extend(p?);
    }
    Ok(all)
}

/// Whether `flag` satisfies the defining conditions for `r`.
pub fn is_in_fiber<F: Field>(r: &Realization<F>, flag: &FlagPair<F>) -> Result<bool> {
    let n = fiber_rank(r)?;
    if flag.e.len() != n || flag.f.len() != n {
        return Ok(false);
    }
    let full0 = Subspace::full(r.field().clone(), r.dim(Parity::Even));
    let full1 = Subspace::full(r.field().clone(), r.dim(Parity::Odd));
    for i in 1..=n {
        let (e, f) = (&flag.e[i - 1], &flag.f[i - 1]);
        if e.dim() != i || f.dim() != i || !flag.e_at(i - 1, &full0).is_subspace_of(e) {
            return Ok(false);
        }
        if !flag.f_at(i - 1, &full1).is_subspace_of(f) {
            return Ok(false);
        }
        if !r.phi.is_totally_isotropic(e) || !r.psi.is_totally_isotropic(f) {
            return Ok(false);
        }
        if !e.map(&r.u)?.is_subspace_of(&flag.f_at(i - 1, &full1)) || !f.map(&r.ustar)?.is_subspace_of(e) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Diagrams of the successive restrictions `X₁, X₂, …` along the flag.
pub fn restricted_chain<F: Field>(r: &Realization<F>, flag: &FlagPair<F>) -> Result<Vec<MarkedDiagram>> {
    if !is_in_fiber(r, flag)? {
        return Err(Error::NotInFiber("flag violates the fiber conditions".into()));
    }
    let full1 = Subspace::full(r.field().clone(), r.dim(Parity::Odd));
    let mut chain = vec![r.diagram.clone()];
    for i in 1..=flag.e.len() {
        for fi in [i - 1, i] {
            let q = quotient_restriction(&flag.e[i - 1], &flag.f_at(fi, &full1), &r.phi, &r.psi, &r.u)?;
            chain.push(Realization::new(q.phi, q.psi, q.u)?.diagram);
        }
    }
    Ok(chain)
}

/// Index into `slicings` of the stratum containing `flag`.
pub fn classify_flag<F: Field>(r: &Realization<F>, flag: &FlagPair<F>, slicings: &[Slicing]) -> Result<usize> {
    let chain = restricted_chain(r, flag)?;
    slicings
        .iter()
        .position(|s| s.chain == chain)
        .ok_or_else(|| Error::NotInFiber(format!("chain {chain:?} is not an admissible slicing")))
}

/// `round(log(N₂/N₁) / log(q₂/q₁))` from two `(q, N)` samples; `None` when
/// either count is zero.
pub fn dimension_estimate(a: (u64, u64), b: (u64, u64)) -> Option<i64> {
    let ((q1, n1), (q2, n2)) = (a, b);
    if n1 == 0 || n2 == 0 || q1 == q2 {
        return None;
    }
    Some(((n2 as f64 / n1 as f64).ln() / (q2 as f64 / q1 as f64).ln()).round() as i64)
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut y = x;
        while self.parent[y] != root {
            let next = self.parent[y];
            self.parent[y] = root;
            y = next;
        }
        root
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }

    fn count(&mut self, members: impl Iterator<Item = usize>) -> usize {
        members.map(|m| self.find(m)).collect::<BTreeSet<_>>().len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Pos {
    E(usize),
    F(usize),
}

/// Every subspace that could occupy `pos` with the other positions fixed,
/// ignoring the conditions involving `X`.
fn structural_choices<F: Field>(r: &Realization<F>, flag: &FlagPair<F>, pos: Pos) -> Result<BTreeSet<Subspace<F>>> {
    let n = flag.e.len();
    let (eps, chain) = match pos {
        Pos::E(a) => (Parity::Even, (a, &flag.e)),
        Pos::F(a) => (Parity::Odd, (a, &flag.f)),
    };
    let (a, spaces) = chain;
    let form = r.form(eps);
    let lower = if a == 1 { Subspace::zero(r.field().clone(), r.dim(eps)) } else { spaces[a - 2].clone() };
    let upper = if a < n { spaces[a].clone() } else { form.perp(&lower)? };
    let unlimited = Budget::new(u64::MAX);
    Ok(extensions(&lower, &upper, r, eps, &unlimited)?.into_iter().collect())
}

/// Isotropic extensions of the predecessor of `pos` inside the span of
/// `values`.
fn spanned_choices<F: Field>(
    r: &Realization<F>,
    flag: &FlagPair<F>,
    pos: Pos,
    values: &BTreeSet<Subspace<F>>,
) -> Result<BTreeSet<Subspace<F>>> {
    let (eps, a, spaces) = match pos {
        Pos::E(a) => (Parity::Even, a, &flag.e),
        Pos::F(a) => (Parity::Odd, a, &flag.f),
    };
    let lower = if a == 1 { Subspace::zero(r.field().clone(), r.dim(eps)) } else { spaces[a - 2].clone() };
    let mut span = lower.clone();
    for v in values {
        span = span.sum(v)?;
    }
    let unlimited = Budget::new(u64::MAX);
    Ok(extensions(&lower, &span, r, eps, &unlimited)?.into_iter().collect())
}

fn blank<F: Field>(flag: &FlagPair<F>, positions: &[Pos]) -> Vec<Option<Subspace<F>>> {
    let mut key = Vec::new();
    for (i, s) in flag.e.iter().enumerate() {
        key.push((!positions.contains(&Pos::E(i + 1))).then(|| s.clone()));
    }
    for (i, s) in flag.f.iter().enumerate() {
        key.push((!positions.contains(&Pos::F(i + 1))).then(|| s.clone()));
    }
    key
}

fn value_at<F: Field>(flag: &FlagPair<F>, pos: Pos) -> &Subspace<F> {
    match pos {
        Pos::E(a) => &flag.e[a - 1],
        Pos::F(a) => &flag.f[a - 1],
    }
}

/// Groups of flags forming a complete rational projective line of moves
/// inside the fiber. A move frees up to three positions; the group is kept
/// when it has `q + 1` members and some freed position, over a fixed
/// predecessor, takes as values exactly the isotropic extensions inside
/// their own span (a full line or conic), the other freed positions
/// following along. Two freed positions may also be matched bijectively
/// when a larger group covers both of their structural choice lines.
fn line_groups<F: Field>(r: &Realization<F>, flags: &[FlagPair<F>]) -> Result<Vec<Vec<usize>>> {
    let q = r.field().order().expect("finite field") as usize;
    let n = flags.first().map_or(0, |f| f.e.len());
    let positions: Vec<Pos> = (1..=n).flat_map(|a| [Pos::E(a), Pos::F(a)]).collect();
    let mut moves: Vec<Vec<Pos>> = Vec::new();
    for i in 0..positions.len() {
        moves.push(vec![positions[i]]);
        for j in i + 1..positions.len() {
            moves.push(vec![positions[i], positions[j]]);
            for k in j + 1..positions.len() {
                moves.push(vec![positions[i], positions[j], positions[k]]);
            }
        }
    }
    let neighbours_fixed = |mv: &[Pos], p: Pos| match p {
        Pos::E(a) => !mv.contains(&Pos::E(a.wrapping_sub(1))) && !mv.contains(&Pos::E(a + 1)),
        Pos::F(a) => !mv.contains(&Pos::F(a.wrapping_sub(1))) && !mv.contains(&Pos::F(a + 1)),
    };
    let lower_fixed = |mv: &[Pos], p: Pos| match p {
        Pos::E(a) => !mv.contains(&Pos::E(a.wrapping_sub(1))),
        Pos::F(a) => !mv.contains(&Pos::F(a.wrapping_sub(1))),
    };
    let mut out = Vec::new();
    for mv in moves {
        let mut groups: HashMap<Vec<Option<Subspace<F>>>, Vec<usize>> = HashMap::new();
        for (i, fl) in flags.iter().enumerate() {
            groups.entry(blank(fl, &mv)).or_default().push(i);
        }
        for members in groups.into_values() {
            if members.len() != q + 1 {
                if let [p, p2] = mv[..] {
                    if members.len() > q + 1 && neighbours_fixed(&mv, p) && neighbours_fixed(&mv, p2) {
                        if let Some(m) = matched_pair(r, flags, &members, p, p2, q)? {
                            out.push(m);
                        }
                    }
                }
                continue;
            }
            let rep = &flags[members[0]];
            let mut ok = false;
            for &p in mv.iter().filter(|&&p| lower_fixed(&mv, p)) {
                let got: BTreeSet<Subspace<F>> = members.iter().map(|&m| value_at(&flags[m], p).clone()).collect();
                if got.len() == q + 1 && spanned_choices(r, rep, p, &got)? == got {
                    ok = true;
                    break;
                }
            }
            if ok {
                out.push(members);
            }
        }
    }
    Ok(out)
}

/// Two freed positions that both range over a full projective line of
/// structural choices: the members realising some bijection between the two
/// lines trace out the graph of that bijection.
fn matched_pair<F: Field>(
    r: &Realization<F>,
    flags: &[FlagPair<F>],
    members: &[usize],
    p: Pos,
    p2: Pos,
    q: usize,
) -> Result<Option<Vec<usize>>> {
    let rep = &flags[members[0]];
    let (c1, c2) = (structural_choices(r, rep, p)?, structural_choices(r, rep, p2)?);
    if c1.len() != q + 1 || c2.len() != q + 1 {
        return Ok(None);
    }
    let c1: Vec<_> = c1.into_iter().collect();
    let c2: Vec<_> = c2.into_iter().collect();
    let mut edge: HashMap<(usize, usize), usize> = HashMap::new();
    for &m in members {
        let i = c1.iter().position(|s| s == value_at(&flags[m], p));
        let j = c2.iter().position(|s| s == value_at(&flags[m], p2));
        if let (Some(i), Some(j)) = (i, j) {
            edge.entry((i, j)).or_insert(m);
        }
    }
    // perfect matching by augmenting paths
    let mut owner: Vec<Option<usize>> = vec![None; q + 1];
    fn augment(i: usize, edge: &HashMap<(usize, usize), usize>, owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for j in 0..owner.len() {
            if edge.contains_key(&(i, j)) && !seen[j] {
                seen[j] = true;
                if owner[j].is_none_or(|k| augment(k, edge, owner, seen)) {
                    owner[j] = Some(i);
                    return true;
                }
            }
        }
        false
    }
    for i in 0..=q {
        if !augment(i, &edge, &mut owner, &mut vec![false; q + 1]) {
            return Ok(None);
        }
    }
    Ok(Some(owner.iter().enumerate().map(|(j, i)| edge[&(i.expect("perfect matching"), j)]).collect()))
}

/// Connected components of the point graph on the whole fiber and on each
/// class of `classes` (flag index → class). A heuristic for Zariski
/// connectivity, not a proof.
pub fn heuristic_components<F: Field>(
    r: &Realization<F>,
    flags: &[FlagPair<F>],
    classes: Option<&[usize]>,
) -> Result<(usize, BTreeMap<usize, usize>)> {
    let groups = line_groups(r, flags)?;
    let mut whole = UnionFind::new(flags.len());
    for g in &groups {
        for w in g.windows(2) {
            whole.union(w[0], w[1]);
        }
    }
    let total = whole.count(0..flags.len());
    let mut per = BTreeMap::new();
    if let Some(cls) = classes {
        let mut uf = UnionFind::new(flags.len());
        // A stratum meets a projective line either in an open piece (most
        // points, connected) or in a few closed points (not joined through
        // the line), so only a majority class is joined along a group.
        for g in &groups {
            let mut by_class: HashMap<usize, Vec<usize>> = HashMap::new();
            for &m in g {
                by_class.entry(cls[m]).or_default().push(m);
            }
            for members in by_class.values() {
                if 2 * members.len() > g.len() {
                    for w in members.windows(2) {
                        uf.union(w[0], w[1]);
                    }
                }
            }
        }
        let ids: BTreeSet<usize> = cls.iter().copied().collect();
        for c in ids {
            per.insert(c, uf.count((0..flags.len()).filter(|&i| cls[i] == c)));
        }
    }
    Ok((total, per))
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumReport {
    pub slicing: usize,
    pub count: usize,
    pub dim_est: Option<i64>,
    pub components_est: usize,
    /// Combinatorial dimension (`None` for an empty stratum).
    pub dim: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiberReport {
    pub diagram: String,
    pub q: u64,
    pub total: usize,
    pub strata: Vec<StratumReport>,
    pub graph_components: usize,
    /// Whether both enumerators returned the same flag set.
    pub enumerators_agree: bool,
    /// Whether every flag was classified into an admissible slicing.
    pub partition_ok: bool,
    pub warnings: Vec<String>,
}

/// Enumerated and classified fiber of one realization.
pub struct ClassifiedFiber<F: Field> {
    pub slicings: Vec<Slicing>,
    pub flags: Vec<FlagPair<F>>,
    pub classes: Vec<usize>,
    pub enumerators_agree: bool,
}

impl<F: Field> ClassifiedFiber<F> {
    pub fn counts(&self) -> Vec<usize> {
        let mut c = vec![0; self.slicings.len()];
        for &k in &self.classes {
            c[k] += 1;
        }
        c
    }
}

pub fn classify_fiber<F: Field>(r: &Realization<F>, budget: u64) -> Result<ClassifiedFiber<F>> {
    let slicings = enumerate_slicings(&r.diagram)?;
    let direct = enumerate_fiber_direct(r, budget)?;
    let recursive = enumerate_fiber_recursive(r, budget)?;
    let enumerators_agree = direct == recursive;
    let flags: Vec<FlagPair<F>> = direct.into_iter().collect();
    let classes = flags
        .par_iter()
        .map(|fl| classify_flag(r, fl, &slicings))
        .collect::<Result<Vec<usize>>>()?;
    Ok(ClassifiedFiber { slicings, flags, classes, enumerators_agree })
}

/// Full report for `r` over its field; `companion` is a second realization of
/// the same diagram over another field, used for dimension estimates.
pub fn fiber_report<F: Field>(r: &Realization<F>, companion: Option<&Realization<F>>, budget: u64) -> Result<FiberReport> {
    let q = r.field().order().ok_or_else(|| Error::Precondition("finite field required".into()))?;
    let cf = classify_fiber(r, budget)?;
    let counts = cf.counts();
    let other = match companion {
        Some(c) => {
            let q2 = c.field().order().unwrap_or(0);
            Some((q2, classify_fiber(c, budget)?.counts()))
        }
        None => None,
    };
    let (graph_components, per) = heuristic_components(r, &cf.flags, Some(&cf.classes))?;
    let mut warnings = Vec::new();
    let mut strata = Vec::new();
    for (i, s) in cf.slicings.iter().enumerate() {
        let prof = stratum_profile(s);
        let dim_est = other.as_ref().and_then(|(q2, c2)| dimension_estimate((q, counts[i] as u64), (*q2, c2[i] as u64)));
        match (prof.dimension, dim_est) {
            (Some(d), Some(e)) if d as i64 != e => {
                warnings.push(format!("slicing {i}: point counts suggest dimension {e}, strata give {d}"))
            }
            (None, _) if counts[i] > 0 => warnings.push(format!("slicing {i}: empty stratum has points")),
            (Some(_), _) if counts[i] == 0 => warnings.push(format!("slicing {i}: no F_{q} points")),
            _ => {}
        }
        strata.push(StratumReport {
            slicing: i,
            count: counts[i],
            dim_est,
            components_est: per.get(&i).copied().unwrap_or(0),
            dim: prof.dimension,
        });
    }
    Ok(FiberReport {
        diagram: r.diagram.to_string(),
        q,
        total: cf.flags.len(),
        strata,
        graph_components,
        enumerators_agree: cf.enumerators_agree,
        partition_ok: true,
        warnings,
    })
}

/// Exhaustive check that `sector_stratum` is defined on every isotropic
/// kernel line; used by the tower.
pub fn kernel_strata<F: Field>(r: &Realization<F>, eps: Parity) -> Vec<(Subspace<F>, usize)> {
    let ker = r.kernel(eps);
    isotropic_lines(&ker, r.form(eps))
        .filter_map(|x| {
            let v = x.vectors().remove(0);
            sector_stratum(r, eps, &v).map(|k| (x, k))
        })
        .collect()
}
