//! Marked Young diagrams: rows of alternating 0/1 labels, stored as a
//! multiset of `(length, parity)` lines. The parity of a line is the label of
//! its first box, which is also the sector of the kernel vector of the
//! corresponding Jordan string.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            0 => Some(Parity::Even),
            1 => Some(Parity::Odd),
            _ => None,
        }
    }

    pub fn as_u8(self) -> u8 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    pub fn suffix(self) -> char {
        match self {
            Parity::Even => 'e',
            Parity::Odd => 'o',
        }
    }

    pub const BOTH: [Parity; 2] = [Parity::Even, Parity::Odd];
}

/// One row of a marked diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub len: usize,
    pub parity: Parity,
}

impl Line {
    pub fn new(len: usize, parity: Parity) -> Self {
        assert!(len >= 1, "lines have at least one box");
        Line { len, parity }
    }

    pub fn zero_boxes(&self) -> usize {
        match self.parity {
            Parity::Even => self.len.div_ceil(2),
            Parity::Odd => self.len / 2,
        }
    }

    pub fn one_boxes(&self) -> usize {
        self.len - self.zero_boxes()
    }

    /// Label of the `i`-th box, counted from the first.
    pub fn label(&self, i: usize) -> u8 {
        (self.parity.as_u8() + (i % 2) as u8) % 2
    }

    pub fn last_label(&self) -> Parity {
        Parity::from_u8(self.label(self.len - 1)).unwrap()
    }
}

/// Canonical order: longer lines first, even before odd at equal length.
impl Ord for Line {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.len.cmp(&self.len).then(self.parity.cmp(&other.parity))
    }
}

impl PartialOrd for Line {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.len, self.parity.suffix())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MarkedDiagram {
    lines: Vec<Line>,
}

impl MarkedDiagram {
    pub fn new(mut lines: Vec<Line>) -> Self {
        lines.sort();
        MarkedDiagram { lines }
    }

    pub fn empty() -> Self {
        MarkedDiagram::default()
    }

    /// Builds from `(len, parity)` pairs, dropping zero-length entries.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, Parity)>) -> Self {
        Self::new(
            pairs
                .into_iter()
                .filter(|&(l, _)| l > 0)
                .map(|(l, p)| Line::new(l, p))
                .collect(),
        )
    }

    pub fn lines(&self) -> &[Line] {
        &self.lines
    }

    pub fn is_empty(&self) -> bool {
        self.lines.is_empty()
    }

    pub fn num_boxes(&self) -> usize {
        self.lines.iter().map(|l| l.len).sum()
    }

    /// `(#zero-boxes, #one-boxes)`
    pub fn size(&self) -> (usize, usize) {
        self.lines
            .iter()
            .fold((0, 0), |(a, b), l| (a + l.zero_boxes(), b + l.one_boxes()))
    }

    /// Number of lines of the given length and parity.
    pub fn count(&self, len: usize, parity: Parity) -> usize {
        self.lines.iter().filter(|l| l.len == len && l.parity == parity).count()
    }

    /// Number of lines of parity `parity` with length at least `k`.
    pub fn count_at_least(&self, k: usize, parity: Parity) -> usize {
        self.lines.iter().filter(|l| l.len >= k && l.parity == parity).count()
    }

    pub fn max_len(&self) -> usize {
        self.lines.first().map_or(0, |l| l.len)
    }

    /// Multiplicities of each line type, in canonical order.
    pub fn multiplicities(&self) -> BTreeMap<Line, usize> {
        let mut m = BTreeMap::new();
        for l in &self.lines {
            *m.entry(*l).or_insert(0) += 1;
        }
        m
    }

    /// Removes one copy of each given line (panics if absent) and adds the
    /// replacements, dropping zero-length ones.
    pub fn replace(&self, remove: &[Line], add: &[(usize, Parity)]) -> Self {
        let mut lines = self.lines.clone();
        for r in remove {
            let pos = lines.iter().position(|l| l == r).expect("line present");
            lines.remove(pos);
        }
        lines.extend(add.iter().filter(|&&(l, _)| l > 0).map(|&(l, p)| Line::new(l, p)));
        Self::new(lines)
    }

    /// French-style rendering: longest row at the bottom.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for l in self.lines.iter().rev() {
            for i in 0..l.len {
                out.push(if l.label(i) == 0 { '0' } else { '1' });
            }
            out.push('\n');
        }
        out
    }
}

impl fmt::Display for MarkedDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lines.is_empty() {
            return write!(f, "-");
        }
        for (i, l) in self.lines.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for MarkedDiagram {
    type Err = Error;

    /// Accepts the token grammar `9e,3o,1e` and row strings `01010/101/0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let err = |reason: &str| Error::Parse { input: s.to_string(), reason: reason.to_string() };
        if s == "-" {
            return Ok(Self::empty());
        }
        if s.is_empty() {
            return Err(err("empty input"));
        }
        let mut lines = Vec::new();
        if s.contains(['e', 'o']) {
            for tok in s.split(',') {
                let tok = tok.trim();
                let (num, suffix) = tok.split_at(tok.len().saturating_sub(1));
                let parity = match suffix {
                    "e" => Parity::Even,
                    "o" => Parity::Odd,
                    _ => return Err(err(&format!("token `{tok}` must end in e or o"))),
                };
                let len: usize = num.parse().map_err(|_| err(&format!("bad length in `{tok}`")))?;
                if len == 0 {
                    return Err(err("line length must be positive"));
                }
                lines.push(Line::new(len, parity));
            }
        } else {
            for row in s.split('/') {
                let row = row.trim();
                let labels: Vec<u8> = row
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(err(&format!("unexpected character `{c}`"))),
                    })
                    .collect::<Result<_>>()?;
                if labels.is_empty() {
                    return Err(err("empty row"));
                }
                if labels.windows(2).any(|w| w[0] == w[1]) {
                    return Err(err(&format!("labels in row `{row}` do not alternate")));
                }
                lines.push(Line::new(labels.len(), Parity::from_u8(labels[0]).unwrap()));
            }
        }
        Ok(Self::new(lines))
    }
}

#[derive(Serialize, Deserialize)]
struct LineJson {
    len: usize,
    par: u8,
}

#[derive(Serialize, Deserialize)]
struct DiagramJson {
    lines: Vec<LineJson>,
}

impl Serialize for MarkedDiagram {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        DiagramJson {
            lines: self.lines.iter().map(|l| LineJson { len: l.len, par: l.parity.as_u8() }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for MarkedDiagram {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = DiagramJson::deserialize(d)?;
        let mut lines = Vec::new();
        for l in j.lines {
            let parity = Parity::from_u8(l.par).ok_or_else(|| serde::de::Error::custom("par must be 0 or 1"))?;
            if l.len == 0 {
                return Err(serde::de::Error::custom("len must be positive"));
            }
            lines.push(Line::new(l.len, parity));
        }
        Ok(MarkedDiagram::new(lines))
    }
}

/// One of the five indecomposable shapes.
pub fn is_indecomposable(d: &MarkedDiagram) -> bool {
    match d.lines() {
        [l] => match l.parity {
            Parity::Even => l.len % 4 == 1,
            Parity::Odd => l.len % 4 == 3,
        },
        [a, b] if a.len == b.len => match (a.parity, b.parity) {
            (Parity::Even, Parity::Even) => a.len % 4 == 3,
            (Parity::Odd, Parity::Odd) => a.len % 4 == 1,
            _ => a.len % 2 == 0,
        },
        _ => false,
    }
}

/// Whether the lines split into indecomposable pieces, decided class by
/// class: even lengths pair an even with an odd line; odd lengths need an
/// even number of the lines that cannot stand alone.
pub fn is_admissible(d: &MarkedDiagram) -> bool {
    let m = d.multiplicities();
    let get = |len: usize, p: Parity| m.get(&Line { len, parity: p }).copied().unwrap_or(0);
    m.keys().all(|l| {
        let (e, o) = (get(l.len, Parity::Even), get(l.len, Parity::Odd));
        match l.len % 4 {
            0 | 2 => e == o,
            1 => o % 2 == 0,
            _ => e % 2 == 0,
        }
    })
}

/// Greedy split into indecomposable pieces; `None` if the diagram is not
/// admissible.
pub fn indecomposable_pieces(d: &MarkedDiagram) -> Option<Vec<MarkedDiagram>> {
    let mut remaining: Vec<Line> = d.lines().to_vec();
    let mut pieces = Vec::new();
    while let Some(first) = remaining.first().copied() {
        remaining.remove(0);
        let single = MarkedDiagram::new(vec![first]);
        if is_indecomposable(&single) {
            pieces.push(single);
            continue;
        }
        let partner = remaining.iter().position(|other| {
            other.len == first.len && is_indecomposable(&MarkedDiagram::new(vec![first, *other]))
        })?;
        let other = remaining.remove(partner);
        pieces.push(MarkedDiagram::new(vec![first, other]));
    }
    Some(pieces)
}

/// Every label-alternating diagram with exactly `d0` zero-boxes and `d1`
/// one-boxes, admissible or not, in canonical order.
pub fn enumerate_all(d0: usize, d1: usize) -> Vec<MarkedDiagram> {
    let total = d0 + d1;
    let mut types = Vec::new();
    for len in (1..=total).rev() {
        for p in Parity::BOTH {
            types.push(Line::new(len, p));
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(&types, 0, d0, d1, &mut current, &mut out);
    out.sort();
    out
}

fn fill(types: &[Line], idx: usize, r0: usize, r1: usize, cur: &mut Vec<Line>, out: &mut Vec<MarkedDiagram>) {
    if r0 == 0 && r1 == 0 {
        out.push(MarkedDiagram::new(cur.clone()));
        return;
    }
    if idx == types.len() {
        return;
    }
    let t = types[idx];
    let (z, o) = (t.zero_boxes(), t.one_boxes());
    let mut k = 0;
    loop {
        if k * z > r0 || k * o > r1 {
            break;
        }
        fill(types, idx + 1, r0 - k * z, r1 - k * o, cur, out);
        cur.push(t);
        k += 1;
    }
    cur.truncate(cur.len() - k);
}

/// All admissible diagrams of size `(d0, d1)`, in canonical order.
pub fn enumerate_admissible(d0: usize, d1: usize) -> Vec<MarkedDiagram> {
    enumerate_all(d0, d1).into_iter().filter(is_admissible).collect()
}

/// `ε` when the size is `(2n + (−1)^ε, 2n)`.
pub fn diagram_parity(d: &MarkedDiagram) -> Option<Parity> {
    let (d0, d1) = d.size();
    if d1 % 2 != 0 {
        return None;
    }
    if d0 == d1 + 1 {
        Some(Parity::Even)
    } else if d1 >= 2 && d0 + 1 == d1 {
        Some(Parity::Odd)
    } else {
        None
    }
}

/// `dims(ε, k) = dim(Ker X ∩ Im X^{k−1} ∩ V_ε)`; only nonzero entries are stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KernelProfile {
    dims: BTreeMap<(Parity, usize), usize>,
}

impl KernelProfile {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, eps: Parity, k: usize, dim: usize) {
        assert!(k >= 1);
        if dim == 0 {
            self.dims.remove(&(eps, k));
        } else {
            self.dims.insert((eps, k), dim);
        }
    }

    pub fn get(&self, eps: Parity, k: usize) -> usize {
        self.dims.get(&(eps, k)).copied().unwrap_or(0)
    }

    pub fn max_k(&self) -> usize {
        self.dims.keys().map(|&(_, k)| k).max().unwrap_or(0)
    }
}

pub fn kernel_profile_of(d: &MarkedDiagram) -> KernelProfile {
    let mut p = KernelProfile::new();
    for eps in Parity::BOTH {
        for k in 1..=d.max_len() {
            p.set(eps, k, d.count_at_least(k, eps));
        }
    }
    p
}

pub fn diagram_from_kernel_profile(p: &KernelProfile) -> Result<MarkedDiagram> {
    let mut lines = Vec::new();
    for eps in Parity::BOTH {
        for k in 1..=p.max_k() {
            let (here, next) = (p.get(eps, k), p.get(eps, k + 1));
            if next > here {
                return Err(Error::Precondition(format!(
                    "kernel profile increases at parity {}, k = {k}",
                    eps.as_u8()
                )));
            }
            lines.extend(std::iter::repeat_n(Line::new(k, eps), here - next));
        }
    }
    Ok(MarkedDiagram::new(lines))
}

/// Rank of the form on `Ker X ∩ V_ε`: the number of length-1 lines of parity `ε`.
pub fn rank_of_form_on_kernel(d: &MarkedDiagram, eps: Parity) -> usize {
    d.count(1, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> MarkedDiagram {
        s.parse().unwrap()
    }

    #[test]
    fn indecomposable_shapes() {
        assert!(is_indecomposable(&d("1e")));
        assert!(is_indecomposable(&d("3o")));
        assert!(is_indecomposable(&d("2e,2o")));
        assert!(!is_indecomposable(&d("2e,2e")));
        assert!(is_indecomposable(&d("3e,3e")));
        assert!(is_indecomposable(&d("5o,5o")));
        assert!(!is_indecomposable(&d("5e,5e")));
    }

    #[test]
    fn admissibility_examples() {
        assert!(is_admissible(&d("5e")));
        for n in 1..5 {
            assert!(is_admissible(&d(&format!("{}o,1e,1e", 4 * n - 1))));
        }
        assert!(!is_admissible(&d("3e")));
        assert!(!is_admissible(&d("2e,2e")));
    }

    #[test]
    fn enumerate_small_sizes() {
        assert_eq!(enumerate_admissible(1, 0), vec![d("1e")]);
        let got: Vec<String> = enumerate_admissible(3, 2).iter().map(|x| x.to_string()).collect();
        assert_eq!(got, vec!["5e", "3o,1e,1e", "2e,2o,1e", "1e,1e,1e,1o,1o"]);
        let big = enumerate_admissible(7, 6);
        assert!(big.contains(&d("9e,3o,1e")));
        assert!(big.contains(&d("9e,2e,2o")));
    }

    #[test]
    fn parity_of_sizes() {
        assert_eq!(diagram_parity(&d("5e")), Some(Parity::Even));
        assert_eq!(diagram_parity(&d("3o")), Some(Parity::Odd));
        assert_eq!(diagram_parity(&d("2e,2o")), None);
        assert_eq!(diagram_parity(&d("1e")), Some(Parity::Even));
        assert_eq!(diagram_parity(&MarkedDiagram::empty()), None);
    }

    #[test]
    fn kernel_profiles() {
        let p = kernel_profile_of(&d("9e,3o,1e"));
        assert_eq!(p.get(Parity::Even, 1), 2);
        assert_eq!(p.get(Parity::Even, 9), 1);
        assert_eq!(p.get(Parity::Odd, 1), 1);
        assert_eq!(p.get(Parity::Odd, 4), 0);
        let p = kernel_profile_of(&d("2e,2o,1e"));
        assert_eq!(
            [p.get(Parity::Even, 1), p.get(Parity::Even, 2), p.get(Parity::Odd, 1), p.get(Parity::Odd, 2)],
            [2, 1, 1, 1]
        );
        let p = kernel_profile_of(&d("1e"));
        assert_eq!(p.get(Parity::Even, 1), 1);
        assert_eq!(p.get(Parity::Odd, 1), 0);
        assert_eq!(p.get(Parity::Even, 2), 0);
    }

    #[test]
    fn profile_inverse() {
        let mut p = KernelProfile::new();
        for k in 1..=9 {
            p.set(Parity::Even, k, if k == 1 { 2 } else { 1 });
        }
        for k in 1..=3 {
            p.set(Parity::Odd, k, 1);
        }
        assert_eq!(diagram_from_kernel_profile(&p).unwrap(), d("9e,3o,1e"));
        assert_eq!(diagram_from_kernel_profile(&KernelProfile::new()).unwrap(), MarkedDiagram::empty());
        let mut bad = KernelProfile::new();
        bad.set(Parity::Even, 2, 1);
        assert!(diagram_from_kernel_profile(&bad).is_err());
    }

    #[test]
    fn form_rank_on_kernel() {
        assert_eq!(rank_of_form_on_kernel(&d("7o,1e,1e"), Parity::Even), 2);
        assert_eq!(rank_of_form_on_kernel(&d("5e"), Parity::Even), 0);
        assert_eq!(rank_of_form_on_kernel(&d("1o,1o,1e,1e,1e"), Parity::Even), 3);
    }

    #[test]
    fn parse_both_grammars() {
        assert_eq!(d("01010/101/0"), d("5e,3o,1e"));
        assert_eq!(d("0/101/01010").to_string(), "5e,3o,1e");
        assert_eq!(d("01/10/01010"), d("5e,2e,2o"));
        assert!("3x".parse::<MarkedDiagram>().is_err());
        assert!("0110".parse::<MarkedDiagram>().is_err());
        assert!("0e".parse::<MarkedDiagram>().is_err());
    }

    #[test]
    fn render_french() {
        assert_eq!(d("5e,3o,1e").render(), "0\n101\n01010\n");
    }

    #[test]
    fn json_shape() {
        let j = serde_json::to_string(&d("9e,3o,1e")).unwrap();
        assert_eq!(j, r#"{"lines":[{"len":9,"par":0},{"len":3,"par":1},{"len":1,"par":0}]}"#);
        let back: MarkedDiagram = serde_json::from_str(&j).unwrap();
        assert_eq!(back, d("9e,3o,1e"));
    }

    #[test]
    fn greedy_pieces() {
        let pieces = indecomposable_pieces(&d("9e,2e,2o,1e")).unwrap();
        assert_eq!(pieces.len(), 3);
        assert!(indecomposable_pieces(&d("3e")).is_none());
    }

    // independent oracle: exhaustive search for a partition into the
    // indecomposable shapes, written directly from the shape list
    fn splits(lines: &[Line]) -> bool {
        let Some((first, rest)) = lines.split_first() else { return true };
        let alone = match first.parity {
            Parity::Even => first.len % 4 == 1,
            Parity::Odd => first.len % 4 == 3,
        };
        if alone && splits(rest) {
            return true;
        }
        for j in 0..rest.len() {
            let other = rest[j];
            if other.len != first.len {
                continue;
            }
            let pair_ok = match (first.parity, other.parity) {
                (Parity::Even, Parity::Even) => first.len % 4 == 3,
                (Parity::Odd, Parity::Odd) => first.len % 4 == 1,
                _ => first.len % 2 == 0,
            };
            if pair_ok {
                let mut r = rest.to_vec();
                r.remove(j);
                if splits(&r) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn admissibility_matches_partition_search() {
        for total in 1..=13 {
            for d0 in 0..=total {
                for x in enumerate_all(d0, total - d0) {
                    let want = splits(x.lines());
                    assert_eq!(is_admissible(&x), want, "{x}");
                    assert_eq!(indecomposable_pieces(&x).is_some(), want, "{x}");
                }
            }
        }
    }

    #[test]
    fn admissible_sizes_have_even_d1() {
        for total in 1..=11 {
            for d0 in 0..=total {
                for x in enumerate_admissible(d0, total - d0) {
                    assert_eq!(x.size().1 % 2, 0, "{x}");
                }
            }
        }
    }
}
