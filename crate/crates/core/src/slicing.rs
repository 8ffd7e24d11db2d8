//! Admissible subdiagrams, slicings and the dimension data of the strata
//! they index.

use serde::{Serialize, Serializer};

use crate::diagram::{diagram_parity, is_admissible, Line, MarkedDiagram, Parity};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalMode {
    /// First and last box of one line.
    SameLine,
    /// First box of one line and last box of another of the same length.
    TwoLines,
}

/// How two boxes were removed in one step of a slicing.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Removal {
    pub k: usize,
    pub mode: RemovalMode,
    /// Parities before removal: one entry for `SameLine`; for `TwoLines`
    /// the line losing its first box, then the line losing its last box.
    pub affected_parities: Vec<Parity>,
}

impl Removal {
    /// Labels of the two removed boxes.
    pub fn removed_labels(&self) -> [Parity; 2] {
        let k = self.k;
        match self.mode {
            RemovalMode::SameLine => {
                let l = Line::new(k, self.affected_parities[0]);
                [l.parity, l.last_label()]
            }
            RemovalMode::TwoLines => {
                let second = Line::new(k, self.affected_parities[1]);
                [self.affected_parities[0], second.last_label()]
            }
        }
    }
}

impl Serialize for Removal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct J {
            k: usize,
            mode: RemovalMode,
        }
        J { k: self.k, mode: self.mode }.serialize(s)
    }
}

/// Every two-box removal of `d`, unfiltered. Results are deduplicated by the
/// resulting diagram.
fn raw_removals(d: &MarkedDiagram) -> Vec<(MarkedDiagram, Removal)> {
    let mut out: Vec<(MarkedDiagram, Removal)> = Vec::new();
    let mut push = |nd: MarkedDiagram, r: Removal| {
        if !out.iter().any(|(x, _)| *x == nd) {
            out.push((nd, r));
        }
    };
    let types: Vec<Line> = d.multiplicities().keys().copied().collect();
    for l in &types {
        if l.len >= 2 {
            let nd = d.replace(&[*l], &[(l.len - 2, l.parity.flip())]);
            push(nd, Removal { k: l.len, mode: RemovalMode::SameLine, affected_parities: vec![l.parity] });
        }
    }
    for t1 in &types {
        for t2 in &types {
            if t1.len != t2.len || (t1 == t2 && d.count(t1.len, t1.parity) < 2) {
                continue;
            }
            let k = t1.len;
            let nd = d.replace(&[*t1, *t2], &[(k - 1, t1.parity.flip()), (k - 1, t2.parity)]);
            push(nd, Removal { k, mode: RemovalMode::TwoLines, affected_parities: vec![t1.parity, t2.parity] });
        }
    }
    out
}

/// Admissible subdiagrams with two boxes fewer and opposite parity, sorted
/// by decreasing `k`, then mode, then result.
pub fn admissible_subdiagrams(d: &MarkedDiagram) -> Result<Vec<(MarkedDiagram, Removal)>> {
    let eps = diagram_parity(d).ok_or_else(|| Error::NoParity(d.to_string()))?;
    let mut out: Vec<_> = raw_removals(d)
        .into_iter()
        .filter(|(nd, _)| is_admissible(nd) && diagram_parity(nd) == Some(eps.flip()))
        .collect();
    out.sort_by(|(a, ra), (b, rb)| rb.k.cmp(&ra.k).then(ra.mode.cmp(&rb.mode)).then(a.cmp(b)));
    Ok(out)
}

/// Number of admissible subdiagrams obtained by removing boxes from lines of
/// length `k`.
pub fn subdiagram_count_for_length(d: &MarkedDiagram, k: usize) -> Result<usize> {
    Ok(admissible_subdiagrams(d)?.iter().filter(|(_, r)| r.k == k).count())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Side {
    E,
    F,
}

/// A maximal chain `D₀ ⊃ D₁ ⊃ … ⊃ D_{2n}` of admissible subdiagrams.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Slicing {
    pub chain: Vec<MarkedDiagram>,
    pub removals: Vec<Removal>,
}

impl Slicing {
    pub fn top(&self) -> &MarkedDiagram {
        &self.chain[0]
    }

    pub fn steps(&self) -> usize {
        self.removals.len()
    }

    pub fn step_sides(&self) -> Vec<Side> {
        (0..self.steps()).map(|i| if i % 2 == 0 { Side::E } else { Side::F }).collect()
    }

    /// Checks the chain conditions and that `E` steps remove 0-boxes and `F`
    /// steps 1-boxes.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Inconsistent(m));
        if self.chain.len() != self.removals.len() + 1 {
            return bad("chain and removal lengths disagree".into());
        }
        for (i, w) in self.chain.windows(2).enumerate() {
            let (a, b) = (&w[0], &w[1]);
            if !is_admissible(a) || !is_admissible(b) {
                return bad(format!("step {i}: inadmissible diagram"));
            }
            if a.num_boxes() != b.num_boxes() + 2 {
                return bad(format!("step {i}: not a two-box removal"));
            }
            match (diagram_parity(a), diagram_parity(b)) {
                (Some(x), Some(y)) if x != y => {}
                _ => return bad(format!("step {i}: parity does not flip")),
            }
            let want = if i % 2 == 0 { Parity::Even } else { Parity::Odd };
            if self.removals[i].removed_labels() != [want, want] {
                return bad(format!("step {i}: removed labels do not match the side"));
            }
        }
        Ok(())
    }
}

impl Serialize for Slicing {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct J<'a> {
            chain: Vec<String>,
            removals: &'a [Removal],
        }
        J { chain: self.chain.iter().map(|d| d.to_string()).collect(), removals: &self.removals }.serialize(s)
    }
}

/// `n` when `d` has size `(2n+1, 2n)`.
pub fn rank_of(d: &MarkedDiagram) -> Result<usize> {
    let (d0, d1) = d.size();
    if d0 != d1 + 1 {
        return Err(Error::WrongSize { diagram: d.to_string(), d0, d1 });
    }
    Ok(d1 / 2)
}

fn require_top(d: &MarkedDiagram) -> Result<usize> {
    let n = rank_of(d)?;
    if !is_admissible(d) {
        return Err(Error::NotAdmissible(d.to_string()));
    }
    Ok(n)
}

/// All admissible slicings of `d`, in depth-first order of
/// [`admissible_subdiagrams`].
pub fn enumerate_slicings(d: &MarkedDiagram) -> Result<Vec<Slicing>> {
    require_top(d)?;
    let mut out = Vec::new();
    let mut chain = vec![d.clone()];
    let mut removals = Vec::new();
    descend(&mut chain, &mut removals, &mut out)?;
    Ok(out)
}

fn descend(chain: &mut Vec<MarkedDiagram>, removals: &mut Vec<Removal>, out: &mut Vec<Slicing>) -> Result<()> {
    let cur = chain.last().unwrap().clone();
    if cur.num_boxes() == 1 {
        out.push(Slicing { chain: chain.clone(), removals: removals.clone() });
        return Ok(());
    }
    for (nd, r) in admissible_subdiagrams(&cur)? {
        chain.push(nd);
        removals.push(r);
        descend(chain, removals, out)?;
        chain.pop();
        removals.pop();
    }
    Ok(())
}

fn ell_at_least(d: &MarkedDiagram, eps: Parity, k: usize) -> usize {
    d.count_at_least(k, eps)
}

/// Dimension of `𝒦_ε(X, k)` for `X` with diagram `d`; `None` when empty.
pub fn kappa_dimension(d: &MarkedDiagram, eps: Parity, k: usize) -> Option<usize> {
    let total = ell_at_least(d, eps, k);
    if total == 0 {
        return None;
    }
    if eps == Parity::Even && k == 1 {
        return match d.count(1, Parity::Even) {
            1 => None,
            0 => Some(total - 1),
            _ => Some(total - 2),
        };
    }
    Some(total - 1)
}

pub fn kappa_components(d: &MarkedDiagram, eps: Parity, k: usize) -> usize {
    if kappa_dimension(d, eps, k).is_none() {
        0
    } else if eps == Parity::Even && k == 1 && d.count(1, Parity::Even) == 2 {
        2
    } else {
        1
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StratumProfile {
    pub slicing: Slicing,
    /// `None` marks an empty step.
    pub step_dims: Vec<Option<usize>>,
    /// `None` when some step is empty.
    pub dimension: Option<usize>,
    /// Product of the per-step component counts (0 for an empty stratum).
    pub component_factor: usize,
}

impl Serialize for StratumProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        #[serde(untagged)]
        enum Dim {
            Value(usize),
            Empty(&'static str),
        }
        #[derive(Serialize)]
        struct J {
            dims: Vec<i64>,
            dimension: Dim,
            components_est: usize,
        }
        J {
            dims: self.step_dims.iter().map(|d| d.map_or(-1, |x| x as i64)).collect(),
            dimension: self.dimension.map_or(Dim::Empty("empty"), Dim::Value),
            components_est: self.component_factor,
        }
        .serialize(s)
    }
}

pub fn stratum_profile(s: &Slicing) -> StratumProfile {
    let mut step_dims = Vec::new();
    let mut factor = 1;
    for (d, r) in s.chain.iter().zip(&s.removals) {
        let eps = diagram_parity(d).expect("slicing diagrams have a parity");
        step_dims.push(kappa_dimension(d, eps, r.k));
        factor *= kappa_components(d, eps, r.k);
    }
    let dimension = step_dims.iter().copied().sum::<Option<usize>>();
    StratumProfile { slicing: s.clone(), step_dims, dimension, component_factor: factor }
}

/// Maximal stratum dimension.
pub fn fiber_dimension(d: &MarkedDiagram) -> Result<usize> {
    enumerate_slicings(d)?
        .iter()
        .filter_map(|s| stratum_profile(s).dimension)
        .max()
        .ok_or_else(|| Error::Inconsistent(format!("{d} has no nonempty stratum")))
}

/// At each step take the largest removal length, preferring `TwoLines` on ties.
pub fn special_slicing(d: &MarkedDiagram) -> Result<Slicing> {
    require_top(d)?;
    let mut chain = vec![d.clone()];
    let mut removals = Vec::new();
    while chain.last().unwrap().num_boxes() > 1 {
        let subs = admissible_subdiagrams(chain.last().unwrap())?;
        let (nd, r) = subs
            .into_iter()
            .min_by(|(_, a), (_, b)| {
                b.k.cmp(&a.k).then_with(|| (b.mode == RemovalMode::TwoLines).cmp(&(a.mode == RemovalMode::TwoLines)))
            })
            .ok_or_else(|| Error::Inconsistent(format!("{} has no admissible subdiagram", chain.last().unwrap())))?;
        chain.push(nd);
        removals.push(r);
    }
    Ok(Slicing { chain, removals })
}

/// `{4n−1 o, 1e, 1e}`, `{4n−3 e, 3o, 1e}` or `{4n−3 e, 2o, 2e}`.
pub fn orbit_diagram(codim: u8, n: usize) -> Result<MarkedDiagram> {
    use Parity::*;
    let min_n = if codim == 1 { 1 } else { 2 };
    if n < min_n {
        return Err(Error::OutOfRange(format!("orbit of codimension {codim} needs n ≥ {min_n}, got {n}")));
    }
    let pairs = match codim {
        1 => vec![(4 * n - 1, Odd), (1, Even), (1, Even)],
        2 => vec![(4 * n - 3, Even), (3, Odd), (1, Even)],
        3 => vec![(4 * n - 3, Even), (2, Odd), (2, Even)],
        _ => return Err(Error::OutOfRange(format!("codimension must be 1, 2 or 3, got {codim}"))),
    };
    Ok(MarkedDiagram::from_pairs(pairs))
}

pub fn is_connected_fiber(d: &MarkedDiagram) -> Result<bool> {
    let n = require_top(d)?;
    Ok(n == 0 || *d != orbit_diagram(1, n)?)
}

/// Closed-form fiber dimension for hooks (one arm plus length-1 lines).
///
/// Each case requires an even `p ≥ 0`; an arm of parity `e` and length
/// `4n+1−2p` with `p` lines `1e` and `p` lines `1o` gives `p²/2`, and so on.
/// Every line is tried as the arm; all matching cases must agree.
pub fn hook_fiber_dimension(d: &MarkedDiagram) -> Result<usize> {
    let n = require_top(d)?;
    let lines = d.lines();
    if lines.iter().skip(1).any(|l| l.len != 1) {
        return Err(Error::NotHook(d.to_string()));
    }
    let mut values = Vec::new();
    let mut arms: Vec<Line> = lines.to_vec();
    arms.dedup();
    for arm in arms {
        let rest = d.replace(&[arm], &[]);
        if rest.lines().iter().any(|l| l.len != 1) {
            continue;
        }
        let (e1, o1) = (rest.count(1, Parity::Even), rest.count(1, Parity::Odd));
        // (arm parity, arm length + 2p, #1e − p, #1o − p, value)
        let cases: [(Parity, usize, i64, i64, fn(usize) -> usize); 4] = [
            (Parity::Even, 4 * n + 1, 0, 0, |p| p * p / 2),
            (Parity::Even, 4 * n + 1, -2, 0, |p| p * (p - 2) / 2 + 1),
            (Parity::Odd, 4 * n + 3, 0, -2, |p| p * (p - 2) / 2),
            (Parity::Odd, 4 * n + 1, 0, 0, |p| p * p / 2),
        ];
        for (par, shifted, de, do_, val) in cases {
            if arm.parity != par || shifted < arm.len || (shifted - arm.len) % 2 != 0 {
                continue;
            }
            let p = (shifted - arm.len) / 2;
            if p % 2 != 0 || e1 as i64 != p as i64 + de || o1 as i64 != p as i64 + do_ {
                continue;
            }
            if p < 2 && (de != 0 || do_ != 0) {
                continue;
            }
            values.push(val(p));
        }
    }
    values.sort();
    values.dedup();
    match values.as_slice() {
        [v] => Ok(*v),
        [] => Err(Error::HookFormula { diagram: d.to_string(), reason: "no case applies".into() }),
        _ => Err(Error::HookFormula { diagram: d.to_string(), reason: format!("cases disagree: {values:?}") }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::enumerate_admissible;

    fn d(s: &str) -> MarkedDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn subdiagrams_examples() {
        let subs = admissible_subdiagrams(&d("2e,2o,1e")).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].0, d("1o,1o,1e"));
        assert_eq!(subs[0].1.mode, RemovalMode::TwoLines);
        for n in 1..=3 {
            let subs = admissible_subdiagrams(&orbit_diagram(1, n).unwrap()).unwrap();
            assert_eq!(subs.len(), 1);
            assert_eq!(subs[0].0, MarkedDiagram::from_pairs([(4 * n - 1, Parity::Odd)]));
            assert_eq!(subs[0].1.k, 1);
        }
        let o2 = orbit_diagram(2, 3).unwrap();
        let subs = admissible_subdiagrams(&o2).unwrap();
        assert_eq!(subs.len(), 1);
        assert_eq!(subs[0].0, d("7o,3o,1e"));
        assert!(admissible_subdiagrams(&d("2e,2o")).is_err());
    }

    #[test]
    fn slicing_counts() {
        let two = enumerate_slicings(&d("5e,3o,1e")).unwrap();
        assert_eq!(two.len(), 2);
        assert_eq!(two[0].chain[1], d("3o,3o,1e"));
        assert_eq!(enumerate_slicings(&d("5e,2e,2o")).unwrap().len(), 3);
        for n in 2..=5 {
            assert_eq!(enumerate_slicings(&orbit_diagram(2, n).unwrap()).unwrap().len(), n);
        }
        assert_eq!(enumerate_slicings(&orbit_diagram(3, 3).unwrap()).unwrap().len(), 5);
        assert_eq!(enumerate_slicings(&d("1e")).unwrap().len(), 1);
        assert!(enumerate_slicings(&d("3o")).is_err());
    }

    #[test]
    fn slicings_validate_and_end_at_one_box() {
        for size in 0..=3 {
            for x in enumerate_admissible(2 * size + 1, 2 * size) {
                for s in enumerate_slicings(&x).unwrap() {
                    s.validate().unwrap();
                    assert_eq!(*s.chain.last().unwrap(), d("1e"));
                    assert_eq!(s.steps(), 2 * size);
                }
            }
        }
    }

    #[test]
    fn kappa_values() {
        let x = d("5e,2e,2o");
        assert_eq!(kappa_dimension(&x, Parity::Even, 2), Some(1));
        assert_eq!(kappa_dimension(&x, Parity::Even, 5), Some(0));
        let o1 = orbit_diagram(1, 2).unwrap();
        assert_eq!(kappa_dimension(&o1, Parity::Even, 1), Some(0));
        assert_eq!(kappa_components(&o1, Parity::Even, 1), 2);
        assert_eq!(kappa_dimension(&d("5e"), Parity::Odd, 1), None);
        assert_eq!(kappa_dimension(&d("5e,1e"), Parity::Even, 1), None);
        assert_eq!(kappa_components(&d("1o,1o,1e,1e,1e"), Parity::Even, 1), 1);
        assert_eq!(kappa_components(&d("3o,1o"), Parity::Odd, 1), 1);
    }

    #[test]
    fn stratum_dimensions() {
        let mut dims: Vec<usize> = enumerate_slicings(&d("5e,2e,2o"))
            .unwrap()
            .iter()
            .map(|s| stratum_profile(s).dimension.unwrap())
            .collect();
        dims.sort();
        assert_eq!(dims, vec![1, 1, 2]);
        let o1 = enumerate_slicings(&orbit_diagram(1, 2).unwrap()).unwrap();
        assert_eq!(o1.len(), 1);
        let p = stratum_profile(&o1[0]);
        assert_eq!((p.dimension, p.component_factor), (Some(0), 2));
        let p = stratum_profile(&enumerate_slicings(&d("5e")).unwrap()[0]);
        assert_eq!((p.dimension, p.component_factor), (Some(0), 1));
    }

    #[test]
    fn fiber_dimensions() {
        assert_eq!(fiber_dimension(&d("5e,2e,2o")).unwrap(), 2);
        assert_eq!(fiber_dimension(&orbit_diagram(1, 2).unwrap()).unwrap(), 0);
        assert_eq!(fiber_dimension(&d("1o,1o,1e,1e,1e")).unwrap(), 2);
    }

    #[test]
    fn special_slicing_examples() {
        let s = special_slicing(&d("5e,3o,1e")).unwrap();
        assert_eq!(s.removals[0].k, 5);
        assert_eq!(s.chain[1], d("3o,3o,1e"));
        let o1 = orbit_diagram(1, 2).unwrap();
        assert_eq!(special_slicing(&o1).unwrap(), enumerate_slicings(&o1).unwrap()[0]);
    }

    #[test]
    fn connectedness_predicate() {
        assert!(!is_connected_fiber(&d("7o,1e,1e")).unwrap());
        assert!(!is_connected_fiber(&d("3o,1e,1e")).unwrap());
        assert!(is_connected_fiber(&d("5e")).unwrap());
        assert!(is_connected_fiber(&d("2e,2o,1e")).unwrap());
    }

    #[test]
    fn orbit_diagrams() {
        assert_eq!(orbit_diagram(1, 1).unwrap(), d("3o,1e,1e"));
        assert_eq!(orbit_diagram(2, 3).unwrap(), d("9e,3o,1e"));
        assert_eq!(orbit_diagram(3, 3).unwrap(), d("9e,2o,2e"));
        assert!(orbit_diagram(2, 1).is_err());
        assert!(orbit_diagram(4, 3).is_err());
    }

    #[test]
    fn hook_values() {
        assert_eq!(hook_fiber_dimension(&d("5e")).unwrap(), 0);
        for n in 1..=3 {
            assert_eq!(hook_fiber_dimension(&orbit_diagram(1, n).unwrap()).unwrap(), 0);
        }
        assert_eq!(hook_fiber_dimension(&d("1o,1o,1e,1e,1e")).unwrap(), 2);
        assert!(matches!(hook_fiber_dimension(&d("5e,2e,2o")), Err(Error::NotHook(_))));
    }

    #[test]
    fn json_shapes() {
        let s = &enumerate_slicings(&d("5e,3o,1e")).unwrap()[0];
        let j = serde_json::to_value(s).unwrap();
        assert_eq!(j["chain"][0], "5e,3o,1e");
        assert_eq!(j["removals"][0]["mode"], "same_line");
        let p = serde_json::to_value(stratum_profile(s)).unwrap();
        assert!(p["dims"].is_array());
        assert!(p["components_est"].is_u64());
    }

    #[test]
    fn hook_formula_against_strata() {
        for n in 0..=3 {
            for x in enumerate_admissible(2 * n + 1, 2 * n) {
                match hook_fiber_dimension(&x) {
                    Ok(v) => assert_eq!(v, fiber_dimension(&x).unwrap(), "{x}"),
                    Err(Error::NotHook(_)) => {}
                    Err(e) => panic!("{x}: {e}"),
                }
            }
        }
    }
}
