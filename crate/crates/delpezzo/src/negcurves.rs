//! The Picard lattice I_{1,n}, enumeration of root and exceptional classes,
//! determination of the effective irreducible (−1)- and (−2)-curves on a
//! configuration, ADE typing, and dual-graph export.

use std::collections::HashMap;

use crate::cluster::{
    agp_check, display_form, system_dim, system_kernel_forms, BlowupConfig, MultProfile,
};
use crate::exactalg::{AlgError, Field};
use crate::plane::HomForm;

/// A class (d; m₁,…,m_n) in I_{1,n}, meaning the divisor d·H − Σ mᵢeᵢ; the mᵢ
/// are the multiplicities a realizing plane curve has at the cluster points.
/// Pairing: ⟨(d;m),(d';m')⟩ = dd' − Σ mᵢm'ᵢ; K = (−3; −1,…,−1).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct PicClass {
    pub d: i64,
    pub m: Vec<i64>,
}

impl PicClass {
    pub fn pairing(&self, other: &PicClass) -> i64 {
        self.d * other.d - self.m.iter().zip(&other.m).map(|(a, b)| a * b).sum::<i64>()
    }

    pub fn self_intersection(&self) -> i64 {
        self.pairing(self)
    }

    pub fn canonical(n: usize) -> PicClass {
        PicClass { d: -3, m: vec![-1; n] }
    }

    pub fn k_pairing(&self) -> i64 {
        self.pairing(&PicClass::canonical(self.m.len()))
    }

    fn sub(&self, other: &PicClass) -> PicClass {
        PicClass {
            d: self.d - other.d,
            m: self.m.iter().zip(&other.m).map(|(a, b)| a - b).collect(),
        }
    }
}

fn enumerate_classes(
    n: usize,
    d_range: std::ops::RangeInclusive<i64>,
    m_range: std::ops::RangeInclusive<i64>,
    sq: i64,
    k_deg: i64,
) -> Vec<PicClass> {
    let mut out = Vec::new();
    let (mlo, mhi) = (*m_range.start(), *m_range.end());
    for d in d_range {
        // depth-first over multiplicity vectors with running sums pruned
        let mut m = vec![mlo; n];
        loop {
            let c = PicClass { d, m: m.clone() };
            if c.self_intersection() == sq && c.k_pairing() == k_deg {
                out.push(c);
            }
            // odometer increment
            let mut i = 0;
            loop {
                if i == n {
                    break;
                }
                if m[i] < mhi {
                    m[i] += 1;
                    break;
                }
                m[i] = mlo;
                i += 1;
            }
            if i == n {
                break;
            }
        }
        if n == 0 {
            // single empty vector already visited
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All classes with C² = −2 and C·K = 0 in I_{1,n} (the roots of the
/// orthogonal complement of K). Bounds |d| ≤ 3, mᵢ ∈ {−2,…,2} suffice for
/// n ≤ 8; completeness is pinned by the known root-system orders.
pub fn enum_roots(n: usize) -> Result<Vec<PicClass>, AlgError> {
    if n == 0 || n > 8 {
        return Err(AlgError::Invalid(format!("n = {} out of range 1..=8", n)));
    }
    Ok(enumerate_classes(n, -3..=3, -2..=2, -2, 0))
}

/// All classes with C² = −1 and C·K = −1 in I_{1,n}.
pub fn enum_exceptional(n: usize) -> Result<Vec<PicClass>, AlgError> {
    if n == 0 || n > 8 {
        return Err(AlgError::Invalid(format!("n = {} out of range 1..=8", n)));
    }
    Ok(enumerate_classes(n, -1..=6, -1..=3, -1, -1))
}

/// Frozen counts from the brute-force oracle, n = 0..8.
pub const ROOT_COUNTS: [usize; 9] = [0, 0, 2, 8, 20, 40, 72, 126, 240];
pub const EXCEPTIONAL_COUNTS: [usize; 9] = [0, 1, 3, 6, 10, 16, 27, 56, 240];

/// Decide effectivity of an arbitrary class on a configuration.
///
/// The class is first reduced by its forced components: whenever the
/// multiplicity profile fails proximity within a tower (μ_k < μ_{k+1}), any
/// effective divisor in the class must contain the strict transform of the
/// k-th exceptional divisor (their pairing is negative), so that root is
/// subtracted; trailing negative multiplicities likewise force last-level
/// exceptional divisors. After reduction the profile is monotone and
/// nonnegative and effectivity of a positive-degree class is a linear-system
/// computation; degree-0 classes are effective exactly when the reduction
/// consumed everything.
pub struct EffectivityCache<'a> {
    cfg: &'a BlowupConfig,
    memo: HashMap<PicClass, bool>,
}

impl<'a> EffectivityCache<'a> {
    pub fn new(cfg: &'a BlowupConfig) -> Self {
        EffectivityCache { cfg, memo: HashMap::new() }
    }

    pub fn is_effective(&mut self, class: &PicClass) -> Result<bool, AlgError> {
        if let Some(&b) = self.memo.get(class) {
            return Ok(b);
        }
        let b = self.compute(class)?;
        self.memo.insert(class.clone(), b);
        Ok(b)
    }

    fn compute(&mut self, class: &PicClass) -> Result<bool, AlgError> {
        let off = self.cfg.level_offsets();
        let mut d = class.d;
        let mut m = class.m.clone();
        let mut subtracted = false;
        let mut fuse = 0;
        loop {
            fuse += 1;
            if fuse > 10_000 {
                return Err(AlgError::Invalid("effectivity reduction did not terminate".into()));
            }
            let mut changed = false;
            for (t, tower) in self.cfg.towers.iter().enumerate() {
                let s = off[t];
                for k in 0..tower.height - 1 {
                    if m[s + k] < m[s + k + 1] {
                        // contains the strict transform of E_k: subtract it
                        m[s + k] += 1;
                        m[s + k + 1] -= 1;
                        subtracted = true;
                        changed = true;
                    }
                }
                let last = s + tower.height - 1;
                if m[last] < 0 {
                    m[last] += 1;
                    subtracted = true;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        if d < 0 {
            return Ok(false);
        }
        if d == 0 {
            return Ok(m.iter().all(|&x| x == 0) && subtracted);
        }
        if d > 6 {
            // beyond the degree bound no negative-curve bookkeeping is needed
            return Err(AlgError::Invalid("effectivity query of degree > 6".into()));
        }
        let prof = MultProfile::from_class_entries(self.cfg, &m);
        let dim = system_dim(self.cfg, d as u16, &prof)?;
        let _ = &mut d;
        Ok(dim >= 1)
    }
}

/// An irreducible negative curve: its class and a printable description of
/// the realizing geometry.
#[derive(Clone, Debug)]
pub struct NegCurve {
    pub class: PicClass,
    pub label: String,
}

/// The (−2)- and (−1)-curves on a configuration with their pairwise
/// intersection matrix (indices: all (−2)-curves first, then the (−1)s).
#[derive(Clone, Debug)]
pub struct NegCurveSet {
    pub two_curves: Vec<NegCurve>,
    pub one_curves: Vec<NegCurve>,
    pub intersections: Vec<Vec<i64>>,
}

impl NegCurveSet {
    pub fn all_classes(&self) -> Vec<&PicClass> {
        self.two_curves.iter().chain(&self.one_curves).map(|c| &c.class).collect()
    }
}

fn describe_class(cfg: &BlowupConfig, class: &PicClass) -> Result<String, AlgError> {
    let off = cfg.level_offsets();
    if class.d == 0 {
        // exceptional bookkeeping: locate the −1 entries
        for (t, tower) in cfg.towers.iter().enumerate() {
            for k in 0..tower.height {
                if class.m[off[t] + k] == -1 {
                    return Ok(format!("E({},{})", t + 1, k));
                }
            }
        }
        Ok("E(?)".to_string())
    } else {
        let prof = MultProfile::from_class_entries(cfg, &class.m);
        let forms = system_kernel_forms(cfg, class.d as u16, &prof)?;
        match forms.first() {
            Some(f) => Ok(display_form(&cfg.field, f)),
            None => Ok(format!("deg {} class", class.d)),
        }
    }
}

/// Compute the irreducible (−2)- and (−1)-curves of a configuration.
///
/// Effectivity is decided through linear systems (uniform in every
/// characteristic); a class is an irreducible negative curve iff it is
/// effective and subtracting any other effective root or exceptional class
/// leaves nothing effective.
pub fn effective_negative(cfg: &BlowupConfig) -> Result<NegCurveSet, AlgError> {
    let violations = agp_check(cfg)?;
    if !violations.is_empty() {
        return Err(AlgError::Invalid(format!(
            "configuration is not in almost general position: {:?}",
            violations
        )));
    }
    let n = cfg.n_points();
    if n == 0 {
        return Ok(NegCurveSet {
            two_curves: Vec::new(),
            one_curves: Vec::new(),
            intersections: Vec::new(),
        });
    }
    let roots = enum_roots(n)?;
    let excs = enum_exceptional(n)?;
    let mut cache = EffectivityCache::new(cfg);
    let mut eff_roots = Vec::new();
    for c in &roots {
        if cache.is_effective(c)? {
            eff_roots.push(c.clone());
        }
    }
    let mut eff_excs = Vec::new();
    for c in &excs {
        if cache.is_effective(c)? {
            eff_excs.push(c.clone());
        }
    }
    let irreducible = |c: &PicClass, cache: &mut EffectivityCache| -> Result<bool, AlgError> {
        for r in &eff_roots {
            if r != c && cache.is_effective(&c.sub(r))? {
                return Ok(false);
            }
        }
        for e in &eff_excs {
            if e != c && cache.is_effective(&c.sub(e))? {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut two_curves = Vec::new();
    for c in eff_roots.clone() {
        if irreducible(&c, &mut cache)? {
            two_curves.push(NegCurve { class: c.clone(), label: describe_class(cfg, &c)? });
        }
    }
    let mut one_curves = Vec::new();
    for c in eff_excs.clone() {
        if irreducible(&c, &mut cache)? {
            one_curves.push(NegCurve { class: c.clone(), label: describe_class(cfg, &c)? });
        }
    }
    let all: Vec<&PicClass> =
        two_curves.iter().chain(&one_curves).map(|c| &c.class).collect();
    let intersections: Vec<Vec<i64>> =
        all.iter().map(|a| all.iter().map(|b| a.pairing(b)).collect()).collect();
    Ok(NegCurveSet { two_curves, one_curves, intersections })
}

/// One simply-laced component: type letter and index, e.g. ('A', 3).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct AdeComponent {
    pub letter: char,
    pub rank: usize,
}

/// Classify the (−2)-intersection graph into a sum of ADE components.
pub fn ade_components(s: &NegCurveSet) -> Result<Vec<AdeComponent>, AlgError> {
    let n = s.two_curves.len();
    // adjacency restricted to the (−2)-block of the intersection matrix
    let mut adj = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let x = s.intersections[i][j];
            if x < 0 || x > 1 {
                return Err(AlgError::Invalid(format!(
                    "(−2)-graph is not simply laced: pairing {} between {} and {}",
                    x, i, j
                )));
            }
            adj[i][j] = x == 1;
        }
    }
    // connected components
    let mut comp = vec![usize::MAX; n];
    let mut ncomp = 0;
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            if comp[v] != usize::MAX {
                continue;
            }
            comp[v] = ncomp;
            for (w, &e) in adj[v].iter().enumerate() {
                if e && comp[w] == usize::MAX {
                    stack.push(w);
                }
            }
        }
        ncomp += 1;
    }
    let mut out = Vec::new();
    for c in 0..ncomp {
        let nodes: Vec<usize> = (0..n).filter(|&v| comp[v] == c).collect();
        let deg = |v: usize| nodes.iter().filter(|&&w| adj[v][w]).count();
        let sz = nodes.len();
        let edges: usize = nodes.iter().map(|&v| deg(v)).sum::<usize>() / 2;
        if edges + 1 != sz {
            return Err(AlgError::Invalid("(−2)-component contains a cycle".into()));
        }
        let deg3: Vec<usize> = nodes.iter().copied().filter(|&v| deg(v) == 3).collect();
        if nodes.iter().any(|&v| deg(v) > 3) || deg3.len() > 1 {
            return Err(AlgError::Invalid("(−2)-component is not of ADE shape".into()));
        }
        if deg3.is_empty() {
            out.push(AdeComponent { letter: 'A', rank: sz });
            continue;
        }
        // one branch node: measure the three arm lengths
        let center = deg3[0];
        let mut arms = Vec::new();
        for &nb in nodes.iter().filter(|&&w| adj[center][w]).collect::<Vec<_>>() {
            let mut len = 1;
            let mut prev = center;
            let mut cur = nb;
            loop {
                let next: Vec<usize> =
                    nodes.iter().copied().filter(|&w| adj[cur][w] && w != prev).collect();
                match next.len() {
                    0 => break,
                    1 => {
                        prev = cur;
                        cur = next[0];
                        len += 1;
                    }
                    _ => {
                        return Err(AlgError::Invalid(
                            "(−2)-component has nested branch nodes".into(),
                        ))
                    }
                }
            }
            arms.push(len);
        }
        arms.sort();
        let comp = match arms.as_slice() {
            [1, 1, _] => AdeComponent { letter: 'D', rank: sz },
            [1, 2, 2] => AdeComponent { letter: 'E', rank: 6 },
            [1, 2, 3] => AdeComponent { letter: 'E', rank: 7 },
            [1, 2, 4] => AdeComponent { letter: 'E', rank: 8 },
            _ => {
                return Err(AlgError::Invalid(format!(
                    "(−2)-component with arms {:?} is not of ADE shape",
                    arms
                )))
            }
        };
        if comp.letter == 'E' && comp.rank != sz {
            return Err(AlgError::Invalid("inconsistent E-component size".into()));
        }
        out.push(comp);
    }
    Ok(out)
}

/// Canonical formal-sum string for the ADE type: E before D before A, larger
/// subscripts first, multiplicities coalesced; "∅" for no (−2)-curves.
pub fn ade_type(s: &NegCurveSet) -> Result<String, AlgError> {
    let comps = ade_components(s)?;
    Ok(format_ade(&comps))
}

pub fn format_ade(comps: &[AdeComponent]) -> String {
    if comps.is_empty() {
        return "∅".to_string();
    }
    let mut sorted = comps.to_vec();
    let key = |c: &AdeComponent| {
        let letter_rank = match c.letter {
            'E' => 0,
            'D' => 1,
            _ => 2,
        };
        (letter_rank, usize::MAX - c.rank)
    };
    sorted.sort_by_key(key);
    let mut parts: Vec<String> = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let mult = j - i;
        let body = format!("{}_{}", sorted[i].letter, sorted[i].rank);
        parts.push(if mult == 1 { body } else { format!("{}{}", mult, body) });
        i = j;
    }
    parts.join("+")
}

/// Parse a formal sum like "2A_3+A_1" back into components (used by the
/// corpus expectations).
pub fn parse_ade(s: &str) -> Result<Vec<AdeComponent>, AlgError> {
    let s = s.trim();
    if s == "∅" || s.is_empty() || s == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for part in s.split('+') {
        let part = part.trim();
        let letter_pos = part
            .find(|c: char| c == 'A' || c == 'D' || c == 'E')
            .ok_or_else(|| AlgError::Parse(format!("bad ADE component `{}`", part)))?;
        let mult: usize = if letter_pos == 0 {
            1
        } else {
            part[..letter_pos]
                .parse()
                .map_err(|_| AlgError::Parse(format!("bad multiplicity in `{}`", part)))?
        };
        let letter = part.as_bytes()[letter_pos] as char;
        let rank: usize = part[letter_pos + 2..]
            .parse()
            .map_err(|_| AlgError::Parse(format!("bad rank in `{}`", part)))?;
        for _ in 0..mult {
            out.push(AdeComponent { letter, rank });
        }
    }
    out.sort();
    Ok(out)
}

/// DOT rendering of the dual graph: filled nodes are (−2)-curves, open nodes
/// are (−1)-curves, edges carry the intersection number when it exceeds 1.
pub fn dual_graph_dot(s: &NegCurveSet) -> String {
    let mut out = String::from("graph dual {\n");
    let n2 = s.two_curves.len();
    for (i, c) in s.two_curves.iter().enumerate() {
        out.push_str(&format!(
            "  n{} [label=\"{}\", style=filled, fillcolor=gray];\n",
            i, c.label
        ));
    }
    for (i, c) in s.one_curves.iter().enumerate() {
        out.push_str(&format!("  n{} [label=\"{}\"];\n", n2 + i, c.label));
    }
    let total = n2 + s.one_curves.len();
    for i in 0..total {
        for j in (i + 1)..total {
            let x = s.intersections[i][j];
            if x == 1 {
                out.push_str(&format!("  n{} -- n{};\n", i, j));
            } else if x > 1 {
                out.push_str(&format!("  n{} -- n{} [label=\"{}\"];\n", i, j, x));
            }
        }
    }
    out.push_str("}\n");
    out
}

/// Direct geometric count of (−1)-curves of degree ≤ 2: lines meeting the
/// cluster in exactly two points and irreducible conics in exactly five, per
/// the blow-up criterion. Serves as the independent cross-check of the
/// lattice route.
pub fn geometric_low_degree_counts(cfg: &BlowupConfig) -> Result<(usize, usize), AlgError> {
    let field = &cfg.field;
    let mut lines: Vec<HomForm<Field>> = Vec::new();
    let push_line = |f: HomForm<Field>, lines: &mut Vec<HomForm<Field>>| {
        if !lines.iter().any(|s| forms_proportional(field, s, &f)) {
            lines.push(f);
        }
    };
    // candidate lines: through pairs of base points, and tower tangents
    for i in 0..cfg.towers.len() {
        for j in (i + 1)..cfg.towers.len() {
            let f = crate::cluster::line_through_pair(
                field,
                &cfg.towers[i].base,
                &cfg.towers[j].base,
            );
            push_line(f, &mut lines);
        }
    }
    for t in &cfg.towers {
        if t.height >= 2 {
            push_line(crate::cluster::tangent_line(field, t), &mut lines);
        }
    }
    let mut line_count = 0;
    for l in &lines {
        let total: usize = cfg
            .towers
            .iter()
            .map(|t| crate::cluster::incidences(field, l, t))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .sum();
        if total == 2 {
            line_count += 1;
        }
    }
    // conics: solve all 5-contact distributions, verify exact contact 5
    let mut conics: Vec<HomForm<Field>> = Vec::new();
    for dist in crate::cluster::contact_distributions(cfg, 5) {
        let prof = MultProfile(
            cfg.towers
                .iter()
                .zip(&dist)
                .map(|(t, &c)| (0..t.height).map(|k| i64::from(k < c)).collect())
                .collect(),
        );
        let forms = system_kernel_forms(cfg, 2, &prof)?;
        if forms.len() != 1 {
            continue;
        }
        let q = forms.into_iter().next().unwrap();
        if q.degree != 2 || !crate::cluster::conic_is_irreducible(field, &q) {
            continue;
        }
        let total: usize = cfg
            .towers
            .iter()
            .map(|t| crate::cluster::incidences(field, &q, t))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .sum();
        if total != 5 {
            continue;
        }
        if !conics.iter().any(|s| forms_proportional(field, s, &q)) {
            conics.push(q);
        }
    }
    Ok((line_count, conics.len()))
}

fn forms_proportional(field: &Field, a: &HomForm<Field>, b: &HomForm<Field>) -> bool {
    if a.degree != b.degree {
        return false;
    }
    let (m0, c0) = a.poly.terms.iter().next().unwrap();
    let d0 = b.poly.coeff(field, m0);
    if field.is_zero(&d0) {
        return false;
    }
    use crate::exactalg::Ring;
    let s = field.mul(&field.inv(&d0).unwrap(), c0);
    b.poly.scale(field, &s) == a.poly
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_and_exceptional_counts_match_oracle() {
        for n in 1..=8usize {
            let roots = enum_roots(n).unwrap();
            assert_eq!(roots.len(), ROOT_COUNTS[n], "roots at n={}", n);
            for c in &roots {
                assert_eq!(c.self_intersection(), -2);
                assert_eq!(c.k_pairing(), 0);
            }
            let excs = enum_exceptional(n).unwrap();
            assert_eq!(excs.len(), EXCEPTIONAL_COUNTS[n], "exceptionals at n={}", n);
            for c in &excs {
                assert_eq!(c.self_intersection(), -1);
                assert_eq!(c.k_pairing(), -1);
            }
        }
        assert!(enum_roots(0).is_err());
        assert!(enum_exceptional(9).is_err());
    }

    #[test]
    fn wider_bounds_find_nothing_new() {
        // oracle: enumerate with strictly larger boxes and compare
        for n in [2usize, 5, 8] {
            let wide_roots = enumerate_classes(n, -4..=4, -3..=3, -2, 0);
            assert_eq!(wide_roots, enum_roots(n).unwrap());
            let wide_excs = enumerate_classes(n, -2..=7, -2..=4, -1, -1);
            assert_eq!(wide_excs, enum_exceptional(n).unwrap());
        }
    }

    #[test]
    fn single_blowup_has_one_exceptional() {
        let e = enum_exceptional(1).unwrap();
        assert_eq!(e.len(), 1);
        assert_eq!(e[0], PicClass { d: 0, m: vec![-1] });
        assert!(enum_roots(1).unwrap().is_empty());
    }

    #[test]
    fn ade_formatting() {
        assert_eq!(format_ade(&[]), "∅");
        let comps = vec![
            AdeComponent { letter: 'A', rank: 1 },
            AdeComponent { letter: 'A', rank: 3 },
            AdeComponent { letter: 'A', rank: 1 },
        ];
        assert_eq!(format_ade(&comps), "A_3+2A_1");
        let comps = vec![
            AdeComponent { letter: 'A', rank: 2 },
            AdeComponent { letter: 'E', rank: 6 },
        ];
        assert_eq!(format_ade(&comps), "E_6+A_2");
        assert_eq!(parse_ade("E_6+A_2").unwrap(), {
            let mut v = comps;
            v.sort();
            v
        });
        assert_eq!(parse_ade("∅").unwrap(), Vec::new());
    }
}
