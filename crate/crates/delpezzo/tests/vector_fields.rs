//! h⁰(X,T_X), family verification, and point counting on known cases.

use std::collections::BTreeMap;

use delpezzo::cluster::{line_through, tower_make, BlowupConfig};
use delpezzo::exactalg::{fq_make, Field, Ring};
use delpezzo::plane::{HomForm, ProjPoint};
use delpezzo::vectorfields::{
    family_tangent_dim, h0_vector_fields, reduced_dim_estimate, stabilizer_point_count,
    verify_family, DimEstimate, StabFamily,
};

fn pt(f: &Field, a: i64, b: i64, c: i64) -> ProjPoint<Field> {
    ProjPoint::new(f, [f.from_int(a), f.from_int(b), f.from_int(c)]).unwrap()
}

fn form(f: &Field, s: &str) -> HomForm<Field> {
    HomForm::parse(f, s, &BTreeMap::new()).unwrap()
}

fn ordinary(f: &Field, a: i64, b: i64, c: i64) -> delpezzo::cluster::Tower {
    let p = pt(f, a, b, c);
    let l = line_through(f, &p);
    tower_make(f, p, l, 1).unwrap()
}

fn fam(matrix: [[&str; 3]; 3], relations: &[&str], units: &[&str]) -> StabFamily {
    StabFamily {
        matrix: matrix.map(|r| r.map(|s| s.to_string())),
        relations: relations.iter().map(|s| s.to_string()).collect(),
        units: units.iter().map(|s| s.to_string()).collect(),
    }
}

fn config_four_points(f: &Field) -> BlowupConfig {
    BlowupConfig::new(
        f.clone(),
        vec![
            ordinary(f, 1, 0, 0),
            ordinary(f, 0, 1, 0),
            ordinary(f, 0, 0, 1),
            ordinary(f, 1, 1, 0),
        ],
    )
    .unwrap()
}

#[test]
fn h0_of_height_eight_tower_char_two() {
    let f2 = fq_make(2, 1).unwrap();
    let towers = vec![tower_make(&f2, pt(&f2, 1, 0, 0), form(&f2, "x^2*z+y^3"), 8).unwrap()];
    let cfg = BlowupConfig::new(f2, vec![towers.into_iter().next().unwrap()]).unwrap();
    assert_eq!(h0_vector_fields(&cfg).unwrap(), 3);
}

#[test]
fn h0_of_height_eight_tower_char_zero() {
    let q = Field::rationals();
    let towers = vec![tower_make(&q, pt(&q, 1, 0, 0), form(&q, "x^2*z+y^3"), 8).unwrap()];
    let cfg = BlowupConfig::new(q, towers).unwrap();
    assert_eq!(h0_vector_fields(&cfg).unwrap(), 1);
}

#[test]
fn degenerate_point_family_verifies() {
    // four points, three collinear: the one-torus diag(1,1,i)
    for p in [0u64, 5] {
        let f = if p == 0 { Field::rationals() } else { fq_make(p, 1).unwrap() };
        let cfg = config_four_points(&f);
        assert_eq!(h0_vector_fields(&cfg).unwrap(), 1);
        let family = fam([["1", "0", "0"], ["0", "1", "0"], ["0", "0", "i"]], &[], &["i"]);
        assert!(verify_family(&cfg, &family).unwrap());
        // a family demanding an extra unipotent direction fails
        let wrong = fam([["1", "b", "0"], ["0", "1", "0"], ["0", "0", "i"]], &[], &["i"]);
        assert!(!verify_family(&cfg, &wrong).unwrap());
    }
}

#[test]
fn height_eight_family_char_two_verifies() {
    let f2 = fq_make(2, 1).unwrap();
    let towers = vec![tower_make(&f2, pt(&f2, 1, 0, 0), form(&f2, "x^2*z+y^3"), 8).unwrap()];
    let cfg = BlowupConfig::new(f2, towers).unwrap();
    let family = fam(
        [["1", "b", "c"], ["0", "e", "b^2*e"], ["0", "0", "e^3"]],
        &["b^4"],
        &["e"],
    );
    assert!(verify_family(&cfg, &family).unwrap());
    assert_eq!(family_tangent_dim(&family, 2).unwrap(), 3);
    // without the nilpotency bound the family is too big to fix the tower
    let nobound = fam([["1", "b", "c"], ["0", "e", "b^2*e"], ["0", "0", "e^3"]], &[], &["e"]);
    assert!(!verify_family(&cfg, &nobound).unwrap());
}

#[test]
fn height_eight_family_char_zero_verifies() {
    let q = Field::rationals();
    let towers = vec![tower_make(&q, pt(&q, 1, 0, 0), form(&q, "x^2*z+y^3"), 8).unwrap()];
    let cfg = BlowupConfig::new(q, towers).unwrap();
    let family = fam([["1", "0", "0"], ["0", "e", "0"], ["0", "0", "e^3"]], &[], &["e"]);
    assert!(verify_family(&cfg, &family).unwrap());
    assert_eq!(family_tangent_dim(&family, 0).unwrap(), 1);
}

#[test]
fn flag_tower_family_membership() {
    // one tower of height 2 along ℓ_z
    let q = Field::rationals();
    let cfg = BlowupConfig::new(
        q.clone(),
        vec![tower_make(&q, pt(&q, 1, 0, 0), form(&q, "z"), 2).unwrap()],
    )
    .unwrap();
    // the table family, including the unipotent directions, verifies
    let full = fam([["1", "b", "c"], ["0", "e", "f"], ["0", "0", "i"]], &[], &["e", "i"]);
    assert!(verify_family(&cfg, &full).unwrap());
    // the diagonal torus is a subgroup of the stabilizer and verifies too
    let diag = fam([["1", "0", "0"], ["0", "e", "0"], ["0", "0", "i"]], &[], &["e", "i"]);
    assert!(verify_family(&cfg, &diag).unwrap());
    let lower = fam([["1", "0", "0"], ["d", "e", "0"], ["0", "0", "i"]], &[], &["e", "i"]);
    assert!(!verify_family(&cfg, &lower).unwrap());
}

#[test]
fn brute_force_matches_constrained_enumeration_q2() {
    use delpezzo::plane::PglElem;
    use delpezzo::vectorfields::fixes_config;
    let f2 = fq_make(2, 1).unwrap();
    let configs = vec![
        config_four_points(&f2),
        BlowupConfig::new(
            f2.clone(),
            vec![
                tower_make(&f2, pt(&f2, 1, 0, 0), form(&f2, "z"), 2).unwrap(),
                ordinary(&f2, 0, 1, 0),
            ],
        )
        .unwrap(),
        BlowupConfig::new(
            f2.clone(),
            vec![tower_make(&f2, pt(&f2, 1, 0, 0), form(&f2, "x*y+z^2"), 3).unwrap()],
        )
        .unwrap(),
    ];
    for cfg in &configs {
        // brute force over all 168 elements of PGL₃(F₂)
        let els = f2.elements();
        let mut brute = 0u64;
        let mut stack = vec![Vec::<delpezzo::exactalg::KElem>::new()];
        while let Some(cur) = stack.pop() {
            if cur.len() == 9 {
                let m = [
                    [cur[0].clone(), cur[1].clone(), cur[2].clone()],
                    [cur[3].clone(), cur[4].clone(), cur[5].clone()],
                    [cur[6].clone(), cur[7].clone(), cur[8].clone()],
                ];
                if let Ok(g) = PglElem::new(&f2, m) {
                    if fixes_config(&f2, &g, cfg).unwrap() {
                        brute += 1;
                    }
                }
                continue;
            }
            for e in &els {
                let mut next = cur.clone();
                next.push(e.clone());
                stack.push(next);
            }
        }
        // every PGL element has exactly one GL lift over F₂
        assert_eq!(brute, stabilizer_point_count(cfg, 2).unwrap());
    }
}

#[test]
fn point_count_slope_detects_torus_dimension() {
    // three general points: stabilizer is the 2-torus
    let f5 = fq_make(5, 1).unwrap();
    let cfg = BlowupConfig::new(
        f5.clone(),
        vec![ordinary(&f5, 1, 0, 0), ordinary(&f5, 0, 1, 0), ordinary(&f5, 0, 0, 1)],
    )
    .unwrap();
    let c1 = stabilizer_point_count(&cfg, 5).unwrap();
    let c2 = stabilizer_point_count(&cfg, 25).unwrap();
    assert_eq!(c1, 16); // (q−1)² at q = 5
    assert_eq!(c2, 576);
    assert_eq!(
        reduced_dim_estimate(&[(5, c1), (25, c2)]).unwrap(),
        DimEstimate::Dim(2)
    );
}
