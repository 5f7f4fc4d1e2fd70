//! Towers of infinitely near points along smooth carrier branches, blow-up
//! configurations, local vanishing conditions for linear systems, and the
//! almost-general-position check.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::exactalg::{
    fq_make, linalg, parse_poly, AlgError, Field, KElem, LocalPoly, Ring,
};
use crate::plane::{branch_at, eval_form, mult_at, BranchJet, HomForm, ProjPoint, FORM_VARS};

/// A base point of P² together with a chain of infinitely near points carried
/// along the branch of a smooth curve germ. The base is level 0; levels
/// 1..height−1 lie on successive exceptional divisors, each following the
/// carrier branch.
#[derive(Clone, Debug)]
pub struct Tower {
    pub base: ProjPoint<Field>,
    pub carrier: HomForm<Field>,
    pub height: usize,
    pub jet: BranchJet<Field>,
}

/// Construct a tower; the carrier must be smooth at the base. For height-1
/// towers the carrier may be synthesized as any line through the base.
pub fn tower_make(
    field: &Field,
    base: ProjPoint<Field>,
    carrier: HomForm<Field>,
    height: usize,
) -> Result<Tower, AlgError> {
    if height == 0 {
        return Err(AlgError::Invalid("tower height must be at least 1".into()));
    }
    match mult_at(field, &carrier, &base) {
        0 => return Err(AlgError::NotOnCurve),
        1 => {}
        _ => return Err(AlgError::SingularGerm),
    }
    let jet = branch_at(field, &carrier, &base, height.max(1))?;
    Ok(Tower { base, carrier, height, jet })
}

/// A deterministic line through the given point, for ordinary (height-1)
/// towers where the carrier is irrelevant.
pub fn line_through(field: &Field, p: &ProjPoint<Field>) -> HomForm<Field> {
    let [a0, a1, a2] = &p.coords;
    // coefficients λ with λ·p = 0
    let lam = if !field.is_zero(a0) || !field.is_zero(a1) {
        [a1.clone(), field.neg(a0), field.zero()]
    } else {
        [field.zero(), a2.clone(), field.neg(a1)]
    };
    let mut poly = crate::exactalg::MultiPoly::zero(3);
    for (i, c) in lam.iter().enumerate() {
        let mut e = vec![0u16; 3];
        e[i] = 1;
        poly.insert(field, crate::exactalg::Mono(e), c.clone());
    }
    HomForm::new(poly).expect("a line through a point always exists")
}

/// A blow-up configuration of P²: a base field and a list of towers with
/// pairwise distinct base points, total number of points n = Σ heights ≤ 8.
#[derive(Clone, Debug)]
pub struct BlowupConfig {
    pub field: Field,
    pub towers: Vec<Tower>,
}

impl BlowupConfig {
    pub fn new(field: Field, towers: Vec<Tower>) -> Result<Self, AlgError> {
        for i in 0..towers.len() {
            for j in (i + 1)..towers.len() {
                if towers[i].base == towers[j].base {
                    return Err(AlgError::Invalid("tower base points must be distinct".into()));
                }
            }
        }
        let n: usize = towers.iter().map(|t| t.height).sum();
        if n > 8 {
            return Err(AlgError::Invalid(format!("{} points exceed the maximum of 8", n)));
        }
        Ok(BlowupConfig { field, towers })
    }

    /// Total number of blown-up points.
    pub fn n_points(&self) -> usize {
        self.towers.iter().map(|t| t.height).sum()
    }

    /// Degree of the resulting surface, 9 − n.
    pub fn degree(&self) -> i64 {
        9 - self.n_points() as i64
    }

    /// Maximal tower height (the height of the surface over P²).
    pub fn height(&self) -> usize {
        self.towers.iter().map(|t| t.height).max().unwrap_or(0)
    }

    /// Slice boundaries of the flattened level index: tower i owns levels
    /// offsets[i] .. offsets[i+1].
    pub fn level_offsets(&self) -> Vec<usize> {
        let mut off = vec![0];
        for t in &self.towers {
            off.push(off.last().unwrap() + t.height);
        }
        off
    }
}

/// Per-tower multiplicities assigned to the tower levels.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultProfile(pub Vec<Vec<i64>>);

impl MultProfile {
    pub fn from_class_entries(cfg: &BlowupConfig, m: &[i64]) -> Self {
        let off = cfg.level_offsets();
        let mut per = Vec::with_capacity(cfg.towers.len());
        for (i, t) in cfg.towers.iter().enumerate() {
            per.push(m[off[i]..off[i] + t.height].to_vec());
        }
        MultProfile(per)
    }
}

/// The symbolic localized polynomial: each (u,v)-monomial carries a linear
/// functional on the coefficient space of the degree-d form.
struct SymLocal {
    terms: BTreeMap<(u16, u16), Vec<KElem>>,
    ncols: usize,
}

impl SymLocal {
    fn insert(&mut self, field: &Field, m: (u16, u16), idx_scale: (usize, KElem)) {
        let (idx, scale) = idx_scale;
        if field.is_zero(&scale) {
            return;
        }
        let row = self
            .terms
            .entry(m)
            .or_insert_with(|| vec![field.zero(); self.ncols]);
        row[idx] = field.add(&row[idx], &scale);
    }

    fn prune(&mut self, field: &Field) {
        self.terms.retain(|_, v| v.iter().any(|c| !field.is_zero(c)));
    }
}

/// Monomials of x,y,z of total degree d, in graded-lex order; this fixes the
/// coordinate order of the coefficient space used by vanishing systems.
pub fn monomials_of_degree(d: u16) -> Vec<[u16; 3]> {
    let mut out = Vec::new();
    for a in 0..=d {
        for b in 0..=(d - a) {
            out.push([a, b, d - a - b]);
        }
    }
    out.sort();
    out
}

fn sym_localize(field: &Field, d: u16, tower: &Tower) -> SymLocal {
    let monos = monomials_of_degree(d);
    let ncols = monos.len();
    let mut out = SymLocal { terms: BTreeMap::new(), ncols };
    for (idx, mono) in monos.iter().enumerate() {
        let mut poly = crate::exactalg::MultiPoly::zero(3);
        poly.insert(field, crate::exactalg::Mono(mono.to_vec()), field.one());
        let f = HomForm::new(poly).unwrap();
        let loc = crate::plane::oriented_local(field, &f, &tower.base, tower.jet.v_is_second);
        for (m, c) in loc.terms {
            out.insert(field, m, (idx, c));
        }
    }
    out
}

fn shift_sym(field: &Field, sym: &SymLocal, psi: &[KElem], u_max: u16) -> SymLocal {
    // expand (v+ψ)^b directly with functional coefficients
    let max_b = sym.terms.keys().map(|&(_, b)| b).max().unwrap_or(0);
    // powers of ψ as u-series
    let mut psi_pow: Vec<Vec<KElem>> = Vec::new();
    let mut one = vec![field.zero(); u_max as usize + 1];
    one[0] = field.one();
    psi_pow.push(one);
    for _ in 1..=max_b {
        let prev = psi_pow.last().unwrap();
        let mut next = vec![field.zero(); u_max as usize + 1];
        for (i, c) in prev.iter().enumerate() {
            if field.is_zero(c) {
                continue;
            }
            for (j, dcoef) in psi.iter().enumerate() {
                let e = i + j + 1;
                if e > u_max as usize {
                    break;
                }
                next[e] = field.add(&next[e], &field.mul(c, dcoef));
            }
        }
        psi_pow.push(next);
    }
    let mut out = SymLocal { terms: BTreeMap::new(), ncols: sym.ncols };
    for (&(a, b), row) in &sym.terms {
        if a > u_max {
            continue;
        }
        for j in 0..=b {
            let binom = binom_int(b as u64, j as u64);
            let bc = field.from_int(binom as i64);
            if field.is_zero(&bc) {
                continue;
            }
            for (off, pc) in psi_pow[(b - j) as usize].iter().enumerate() {
                let ue = a as usize + off;
                if ue > u_max as usize {
                    break;
                }
                if field.is_zero(pc) {
                    continue;
                }
                let s = field.mul(&bc, pc);
                let dst = out
                    .terms
                    .entry((ue as u16, j))
                    .or_insert_with(|| vec![field.zero(); sym.ncols]);
                for (d, src) in dst.iter_mut().zip(row) {
                    *d = field.add(d, &field.mul(src, &s));
                }
            }
        }
    }
    out.prune(field);
    out
}

fn binom_int(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k.min(n - k) {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// The linear system expressing "the iterated strict transform has
/// multiplicity ≥ μ_k at tower level k" for every tower and level. Rows act
/// on the coefficient space of degree-d forms in the `monomials_of_degree`
/// order; the kernel dimension is the vector-space dimension of the system.
pub fn vanishing_system(
    cfg: &BlowupConfig,
    d: u16,
    prof: &MultProfile,
) -> Result<Vec<Vec<KElem>>, AlgError> {
    if prof.0.len() != cfg.towers.len() {
        return Err(AlgError::Invalid("profile shape does not match towers".into()));
    }
    let field = &cfg.field;
    let mut rows = Vec::new();
    for (tower, mu) in cfg.towers.iter().zip(&prof.0) {
        if mu.len() != tower.height {
            return Err(AlgError::Invalid("profile length does not match tower height".into()));
        }
        if mu.iter().any(|&m| m < 0) {
            return Err(AlgError::Invalid("negative multiplicity in vanishing system".into()));
        }
        if mu.iter().all(|&m| m == 0) {
            continue;
        }
        let total: i64 = mu.iter().sum();
        let u_max = (total + d as i64 + 2) as u16;
        let jet = branch_at(field, &tower.carrier, &tower.base, u_max as usize)?;
        let mut sym = sym_localize(field, d, tower);
        sym = shift_sym(field, &sym, &jet.psi, u_max);
        for (k, &mu_k) in mu.iter().enumerate() {
            // impose vanishing of all coefficients of total degree < μ_k
            for (&(a, b), row) in &sym.terms {
                if (a as i64 + b as i64) < mu_k {
                    rows.push(row.clone());
                }
            }
            if k + 1 == mu.len() {
                break;
            }
            // blow down: v → u·v, divide by u^max(μ_k, 0); the divided-out
            // coefficients are exactly the imposed conditions
            let drop = mu_k.max(0) as u16;
            let mut next = SymLocal { terms: BTreeMap::new(), ncols: sym.ncols };
            for (&(a, b), row) in &sym.terms {
                let tot = a + b;
                if (tot as i64) < drop as i64 {
                    continue;
                }
                next.terms.insert((tot - drop, b), row.clone());
            }
            sym = next;
        }
    }
    Ok(rows)
}

/// Kernel dimension of the vanishing system: dim of the space of degree-d
/// forms satisfying the profile.
pub fn system_dim(cfg: &BlowupConfig, d: u16, prof: &MultProfile) -> Result<usize, AlgError> {
    let rows = vanishing_system(cfg, d, prof)?;
    let ncols = monomials_of_degree(d).len();
    Ok(linalg::kernel_dim(&cfg.field, &rows, ncols))
}

/// Forms spanning the kernel of the vanishing system.
pub fn system_kernel_forms(
    cfg: &BlowupConfig,
    d: u16,
    prof: &MultProfile,
) -> Result<Vec<HomForm<Field>>, AlgError> {
    let rows = vanishing_system(cfg, d, prof)?;
    let monos = monomials_of_degree(d);
    let basis = linalg::kernel_basis(&cfg.field, &rows, monos.len());
    let field = &cfg.field;
    let mut out = Vec::new();
    for v in basis {
        let mut poly = crate::exactalg::MultiPoly::zero(3);
        for (mono, c) in monos.iter().zip(v) {
            poly.insert(field, crate::exactalg::Mono(mono.to_vec()), c);
        }
        if !poly.is_zero() {
            out.push(HomForm::new(poly)?);
        }
    }
    Ok(out)
}

/// Multiplicity sequence of a concrete form along a tower: ν_k is the
/// multiplicity of the k-th iterated strict transform at the k-th level, for
/// k < height. `u32::MAX` marks "the transform vanished within the working
/// precision", i.e. contact beyond every level of the tower.
pub fn mult_sequence(
    field: &Field,
    g: &HomForm<Field>,
    tower: &Tower,
) -> Result<Vec<u32>, AlgError> {
    let u_max = (3 * tower.height + g.degree as usize + 2) as u16;
    let jet = branch_at(field, &tower.carrier, &tower.base, u_max as usize)?;
    let loc = crate::plane::oriented_local(field, g, &tower.base, tower.jet.v_is_second);
    let mut cur = loc.shift_v_by_series(field, &jet.psi, u_max);
    let mut out = Vec::with_capacity(tower.height);
    for _ in 0..tower.height {
        match cur.order() {
            None => {
                out.push(u32::MAX);
                continue;
            }
            Some(nu) => {
                out.push(nu);
                // v → u·v, divide by u^ν
                let mut next = LocalPoly::zero();
                for (&(a, b), c) in &cur.terms {
                    let tot = a + b;
                    next.insert(field, (tot - nu as u16, b), c.clone());
                }
                cur = next;
            }
        }
    }
    Ok(out)
}

/// Number of tower levels lying on the iterated strict transforms of g.
pub fn incidences(field: &Field, g: &HomForm<Field>, tower: &Tower) -> Result<usize, AlgError> {
    Ok(mult_sequence(field, g, tower)?.iter().filter(|&&nu| nu >= 1).count())
}

/// A violation of the almost-general-position conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AgpViolation {
    pub curve: String,
    pub degree: u16,
    pub incidence: usize,
    pub bound: usize,
}

/// Direct route: check every line and irreducible conic against the incidence
/// bounds 3 and 6.
pub fn agp_check_direct(cfg: &BlowupConfig) -> Result<Vec<AgpViolation>, AlgError> {
    let field = &cfg.field;
    let mut violations = Vec::new();
    let mut seen = Vec::<HomForm<Field>>::new();
    let mut candidate_lines: Vec<HomForm<Field>> = Vec::new();
    // lines through two distinct base points
    for i in 0..cfg.towers.len() {
        for j in (i + 1)..cfg.towers.len() {
            candidate_lines.push(line_through_pair(
                field,
                &cfg.towers[i].base,
                &cfg.towers[j].base,
            ));
        }
    }
    // tangent lines of towers of height ≥ 2
    for t in &cfg.towers {
        if t.height >= 2 {
            candidate_lines.push(tangent_line(field, t));
        }
    }
    for line in candidate_lines {
        if seen.iter().any(|s| proportional(field, s, &line)) {
            continue;
        }
        let total: usize = cfg
            .towers
            .iter()
            .map(|t| incidences(field, &line, t))
            .collect::<Result<Vec<_>, _>>()?
            .iter()
            .sum();
        if total > 3 {
            violations.push(AgpViolation {
                curve: display_form(field, &line),
                degree: 1,
                incidence: total,
                bound: 3,
            });
        }
        seen.push(line);
    }
    // conics: solve every contact distribution totalling 6 and test the
    // solutions for excess incidence
    let mut seen_conics = Vec::<HomForm<Field>>::new();
    for dist in contact_distributions(cfg, 6) {
        let prof = profile_from_contacts(cfg, &dist);
        let forms = system_kernel_forms(cfg, 2, &prof)?;
        for q in forms {
            if q.degree != 2 {
                continue;
            }
            if seen_conics.iter().any(|s| proportional(field, s, &q)) {
                continue;
            }
            if !conic_is_irreducible(field, &q) {
                seen_conics.push(q);
                continue;
            }
            let total: usize = cfg
                .towers
                .iter()
                .map(|t| incidences(field, &q, t))
                .collect::<Result<Vec<_>, _>>()?
                .iter()
                .sum();
            if total > 6 {
                violations.push(AgpViolation {
                    curve: display_form(field, &q),
                    degree: 2,
                    incidence: total,
                    bound: 6,
                });
            }
            seen_conics.push(q);
        }
    }
    violations.dedup();
    Ok(violations)
}

/// Lattice route: every effective root class of degree 1 or 2 must realize
/// its exact incidence total (3 resp. 6); any excess means a point was blown
/// up on a (−2)-curve.
pub fn agp_check_lattice(cfg: &BlowupConfig) -> Result<Vec<AgpViolation>, AlgError> {
    let field = &cfg.field;
    let n = cfg.n_points();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut violations = Vec::new();
    let mut seen = Vec::<HomForm<Field>>::new();
    for class in crate::negcurves::enum_roots(n)? {
        if class.d != 1 && class.d != 2 {
            continue;
        }
        let prof = MultProfile::from_class_entries(cfg, &class.m);
        if prof.0.iter().any(|mu| mu.iter().any(|&x| x < 0)) {
            continue;
        }
        if !prof.0.iter().all(|mu| mu.windows(2).all(|w| w[0] >= w[1])) {
            continue;
        }
        let forms = system_kernel_forms(cfg, class.d as u16, &prof)?;
        for g in forms {
            if g.degree != class.d as u16 {
                continue;
            }
            if seen.iter().any(|s| proportional(field, s, &g)) {
                continue;
            }
            if class.d == 2 && !conic_is_irreducible(field, &g) {
                seen.push(g);
                continue;
            }
            let total: usize = cfg
                .towers
                .iter()
                .map(|t| incidences(field, &g, t))
                .collect::<Result<Vec<_>, _>>()?
                .iter()
                .sum();
            let bound = 3 * class.d as usize;
            if total > bound {
                violations.push(AgpViolation {
                    curve: display_form(field, &g),
                    degree: class.d as u16,
                    incidence: total,
                    bound,
                });
            }
            seen.push(g);
        }
    }
    violations.dedup();
    Ok(violations)
}

/// Both routes, which must agree on the verdict.
pub fn agp_check(cfg: &BlowupConfig) -> Result<Vec<AgpViolation>, AlgError> {
    let direct = agp_check_direct(cfg)?;
    let lattice = agp_check_lattice(cfg)?;
    if direct.is_empty() != lattice.is_empty() {
        return Err(AlgError::Invalid(format!(
            "almost-general-position routes disagree: direct={:?} lattice={:?}",
            direct, lattice
        )));
    }
    Ok(direct)
}

pub fn line_through_pair(
    field: &Field,
    p: &ProjPoint<Field>,
    q: &ProjPoint<Field>,
) -> HomForm<Field> {
    // cross product of the coordinate vectors
    let a = &p.coords;
    let b = &q.coords;
    let lam = [
        field.sub(&field.mul(&a[1], &b[2]), &field.mul(&a[2], &b[1])),
        field.sub(&field.mul(&a[2], &b[0]), &field.mul(&a[0], &b[2])),
        field.sub(&field.mul(&a[0], &b[1]), &field.mul(&a[1], &b[0])),
    ];
    let mut poly = crate::exactalg::MultiPoly::zero(3);
    for (i, c) in lam.iter().enumerate() {
        let mut e = vec![0u16; 3];
        e[i] = 1;
        poly.insert(field, crate::exactalg::Mono(e), c.clone());
    }
    HomForm::new(poly).expect("distinct points span a line")
}

pub fn tangent_line(field: &Field, t: &Tower) -> HomForm<Field> {
    // linear part of the carrier in the chart, homogenized back
    let loc = crate::plane::localize(field, &t.carrier, &t.base);
    let la = loc.coeff(field, (1, 0));
    let lb = loc.coeff(field, (0, 1));
    let chart = t.base.chart(field);
    let (ia, ib) = match chart {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    // λa·(x_ia − pa·x_chart) + λb·(x_ib − pb·x_chart)
    let pa = &t.base.coords[ia];
    let pb = &t.base.coords[ib];
    let mut lam = [field.zero(), field.zero(), field.zero()];
    lam[ia] = la.clone();
    lam[ib] = lb.clone();
    let mix = field.add(&field.mul(&la, pa), &field.mul(&lb, pb));
    lam[chart] = field.neg(&mix);
    let mut poly = crate::exactalg::MultiPoly::zero(3);
    for (i, c) in lam.iter().enumerate() {
        let mut e = vec![0u16; 3];
        e[i] = 1;
        poly.insert(field, crate::exactalg::Mono(e), c.clone());
    }
    HomForm::new(poly).expect("tangent line of a smooth germ")
}

/// All ways of distributing `total` contacts over the towers, each capped by
/// the tower height.
pub fn contact_distributions(cfg: &BlowupConfig, total: usize) -> Vec<Vec<usize>> {
    let caps: Vec<usize> = cfg.towers.iter().map(|t| t.height).collect();
    let mut out = Vec::new();
    let mut cur = vec![0usize; caps.len()];
    fn rec(
        caps: &[usize],
        i: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == caps.len() {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for c in 0..=caps[i].min(left) {
            cur[i] = c;
            rec(caps, i + 1, left - c, cur, out);
        }
        cur[i] = 0;
    }
    rec(&caps, 0, total, &mut cur, &mut out);
    out
}

fn profile_from_contacts(cfg: &BlowupConfig, dist: &[usize]) -> MultProfile {
    MultProfile(
        cfg.towers
            .iter()
            .zip(dist)
            .map(|(t, &c)| (0..t.height).map(|k| if k < c { 1 } else { 0 }).collect())
            .collect(),
    )
}

/// Characteristic-safe irreducibility for conics: a conic is reducible over
/// the algebraic closure iff it is singular there. The partial derivatives of
/// a quadratic form are linear forms in every characteristic, so the locus
/// where they all vanish is a linear subspace S. If dim S = 0 the conic is
/// smooth; if dim S = 1 it is singular iff the spanning vector lies on the
/// conic (the check Euler's formula would give for free outside char 2);
/// if dim S ≥ 2, the restriction of the conic to a line inside S is a binary
/// quadratic, which always has a zero over the closure, so the conic is
/// singular.
pub fn conic_is_irreducible(field: &Field, q: &HomForm<Field>) -> bool {
    assert_eq!(q.degree, 2);
    // rows of the linear system ∂q/∂x_i = 0
    let mut rows = vec![vec![field.zero(); 3]; 3];
    for (mono, c) in &q.poly.terms {
        for i in 0..3 {
            let e = mono.0[i];
            if e == 0 {
                continue;
            }
            let factor = field.from_int(e as i64);
            if field.is_zero(&factor) {
                continue;
            }
            let mut rest = [0u16; 3];
            rest.copy_from_slice(&mono.0);
            rest[i] -= 1;
            let j = (0..3).find(|&j| rest[j] == 1).expect("degree-1 monomial");
            rows[i][j] = field.add(&rows[i][j], &field.mul(c, &factor));
        }
    }
    let basis = linalg::kernel_basis(field, &rows, 3);
    match basis.len() {
        0 => true,
        1 => {
            let v = &basis[0];
            let p = ProjPoint::new(field, [v[0].clone(), v[1].clone(), v[2].clone()])
                .expect("kernel vector is nonzero");
            !field.is_zero(&eval_form(field, q, &p))
        }
        _ => false,
    }
}

fn proportional(field: &Field, a: &HomForm<Field>, b: &HomForm<Field>) -> bool {
    if a.degree != b.degree {
        return false;
    }
    let (m0, c0) = a.poly.terms.iter().next().unwrap();
    let d0 = b.poly.coeff(field, m0);
    if field.is_zero(&d0) {
        return false;
    }
    let s = field.mul(&field.inv(&d0).unwrap(), c0);
    b.poly.scale(field, &s) == a.poly
}

pub fn display_form(field: &Field, f: &HomForm<Field>) -> String {
    let names = FORM_VARS;
    let mut parts = Vec::new();
    for (m, c) in &f.poly.terms {
        let mut s = String::new();
        let cs = field.display(c);
        if cs != "1" {
            s.push_str(&cs);
        }
        for (i, &e) in m.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !s.is_empty() {
                s.push('*');
            }
            s.push_str(names[i]);
            if e > 1 {
                s.push_str(&format!("^{}", e));
            }
        }
        if s.is_empty() {
            s.push('1');
        }
        parts.push(s);
    }
    parts.join("+")
}

// ---------------------------------------------------------------------------
// JSON configuration schema
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TowerSpec {
    pub base: [String; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub carrier: Option<String>,
    pub height: usize,
}

/// The JSON configuration consumed by the CLI and the corpus.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ConfigSpec {
    pub characteristic: u64,
    #[serde(default = "default_extension")]
    pub extension: usize,
    pub towers: Vec<TowerSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<serde_json::Value>,
}

fn default_extension() -> usize {
    1
}

impl ConfigSpec {
    pub fn field(&self) -> Result<Field, AlgError> {
        if self.characteristic == 0 {
            if self.extension != 1 {
                return Err(AlgError::Invalid("extensions of Q are not supported".into()));
            }
            Ok(Field::rationals())
        } else {
            fq_make(self.characteristic, self.extension)
        }
    }

    pub fn build(&self) -> Result<BlowupConfig, AlgError> {
        let field = self.field()?;
        // `t` names the generator of the extension field in element strings
        let mut consts = BTreeMap::new();
        if field.extension_degree() > 1 {
            consts.insert("t".to_string(), field.gen());
        }
        let mut params = consts.clone();
        for (k, v) in &self.params {
            let p = parse_poly(&field, v, &[], &consts)?;
            let c = p.coeff(&field, &crate::exactalg::Mono(vec![]));
            params.insert(k.clone(), c);
        }
        let mut towers = Vec::new();
        for ts in &self.towers {
            let mut coords = Vec::new();
            for s in &ts.base {
                let p = parse_poly(&field, s, &[], &params)?;
                coords.push(p.coeff(&field, &crate::exactalg::Mono(vec![])));
            }
            let base = ProjPoint::new(&field, [
                coords[0].clone(),
                coords[1].clone(),
                coords[2].clone(),
            ])?;
            let carrier = match &ts.carrier {
                Some(src) => HomForm::parse(&field, src, &params)?,
                None => line_through(&field, &base),
            };
            towers.push(tower_make(&field, base, carrier, ts.height)?);
        }
        BlowupConfig::new(field, towers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qfield() -> Field {
        Field::rationals()
    }

    fn pt(f: &Field, a: i64, b: i64, c: i64) -> ProjPoint<Field> {
        ProjPoint::new(f, [f.from_int(a), f.from_int(b), f.from_int(c)]).unwrap()
    }

    fn form(f: &Field, s: &str) -> HomForm<Field> {
        HomForm::parse(f, s, &BTreeMap::new()).unwrap()
    }

    fn ordinary(f: &Field, a: i64, b: i64, c: i64) -> Tower {
        let p = pt(f, a, b, c);
        let l = line_through(f, &p);
        tower_make(f, p, l, 1).unwrap()
    }

    #[test]
    fn tower_construction() {
        let f = qfield();
        // base [1:0:0] along ℓ_y, height 2
        let t = tower_make(&f, pt(&f, 1, 0, 0), form(&f, "y"), 2).unwrap();
        assert_eq!(t.height, 2);
        // base [1:0:0] along the conic, height 3
        let t = tower_make(&f, pt(&f, 1, 0, 0), form(&f, "x*y+z^2"), 3).unwrap();
        assert_eq!(t.jet.psi.len(), 3);
        // singular carrier is rejected
        assert!(matches!(
            tower_make(&f, pt(&f, 0, 0, 1), form(&f, "x^2*z+y^3"), 2),
            Err(AlgError::SingularGerm)
        ));
    }

    #[test]
    fn pencil_of_lines_through_point() {
        let f = qfield();
        let cfg = BlowupConfig::new(f.clone(), vec![ordinary(&f, 1, 0, 0)]).unwrap();
        let prof = MultProfile(vec![vec![1]]);
        assert_eq!(system_dim(&cfg, 1, &prof).unwrap(), 2);
    }

    #[test]
    fn three_collinear_points_span_one_line() {
        let f = qfield();
        let cfg = BlowupConfig::new(
            f.clone(),
            vec![ordinary(&f, 1, 0, 0), ordinary(&f, 0, 1, 0), ordinary(&f, 1, 1, 0)],
        )
        .unwrap();
        let prof = MultProfile(vec![vec![1], vec![1], vec![1]]);
        assert_eq!(system_dim(&cfg, 1, &prof).unwrap(), 1);
    }

    #[test]
    fn conic_through_five_point_cluster() {
        // towers of case 3C: the only conic through the 5-point cluster is
        // x*y + z^2 itself
        let f = qfield();
        let towers = vec![
            tower_make(&f, pt(&f, 1, 0, 0), form(&f, "y"), 2).unwrap(),
            ordinary(&f, 0, 1, 0),
            tower_make(&f, pt(&f, 0, 0, 1), form(&f, "x"), 2).unwrap(),
            ordinary(&f, 1, 1, 0),
        ];
        let cfg = BlowupConfig::new(f.clone(), towers).unwrap();
        // five unit multiplicities: both levels of the first and third towers
        // plus the second base point
        let prof = MultProfile(vec![vec![1, 1], vec![1], vec![1, 1], vec![0]]);
        assert_eq!(system_dim(&cfg, 2, &prof).unwrap(), 1);
        let forms = system_kernel_forms(&cfg, 2, &prof).unwrap();
        assert_eq!(forms.len(), 1);
        let g = &forms[0];
        assert_eq!(incidences(&f, g, &cfg.towers[0]).unwrap(), 2);
        assert_eq!(incidences(&f, g, &cfg.towers[2]).unwrap(), 2);
    }

    #[test]
    fn agp_violation_blowing_up_a_point_on_a_minus_two_curve() {
        // extend the first point of the degenerate four-point configuration
        // along the line that already meets three points: its strict
        // transform is a (−2)-curve and picks up a fourth incidence
        let f = qfield();
        let cfg = BlowupConfig::new(
            f.clone(),
            vec![
                tower_make(&f, pt(&f, 1, 0, 0), form(&f, "z"), 2).unwrap(),
                ordinary(&f, 0, 1, 0),
                ordinary(&f, 0, 0, 1),
                ordinary(&f, 1, 1, 0),
            ],
        )
        .unwrap();
        let v = agp_check(&cfg).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].incidence, 4);
    }

    #[test]
    fn agp_violation_four_collinear() {
        let f = qfield();
        let cfg = BlowupConfig::new(
            f.clone(),
            vec![
                ordinary(&f, 1, 0, 0),
                ordinary(&f, 0, 1, 0),
                ordinary(&f, 1, 1, 0),
                ordinary(&f, 1, 2, 0),
            ],
        )
        .unwrap();
        let v = agp_check(&cfg).unwrap();
        assert!(!v.is_empty());
        assert_eq!(v[0].degree, 1);
        assert_eq!(v[0].incidence, 4);
    }

    #[test]
    fn single_point_conditions_triangular() {
        // for a single ordinary point with multiplicity μ the number of
        // independent conditions is μ(μ+1)/2 for d large enough
        let f = qfield();
        let p = pt(&f, 1, 2, 3);
        let l = line_through(&f, &p);
        let t = tower_make(&f, p, l, 1).unwrap();
        let cfg = BlowupConfig::new(f.clone(), vec![t]).unwrap();
        for mu in 1..=3i64 {
            let prof = MultProfile(vec![vec![mu]]);
            let rows = vanishing_system(&cfg, 4, &prof).unwrap();
            let rank = linalg::rank(&f, &rows, monomials_of_degree(4).len());
            assert_eq!(rank as i64, mu * (mu + 1) / 2);
        }
    }

    #[test]
    fn config_spec_roundtrip() {
        let src = r#"{
            "characteristic": 0,
            "extension": 1,
            "towers": [
                {"base": ["1","0","0"], "carrier": "x*y+z^2", "height": 3},
                {"base": ["0","1","0"], "height": 1}
            ],
            "params": {"alpha": "2"}
        }"#;
        let spec: ConfigSpec = serde_json::from_str(src).unwrap();
        let cfg = spec.build().unwrap();
        assert_eq!(cfg.n_points(), 4);
        assert_eq!(cfg.degree(), 5);
        let re = serde_json::to_string(&spec).unwrap();
        let spec2: ConfigSpec = serde_json::from_str(&re).unwrap();
        assert_eq!(spec, spec2);
    }
}
