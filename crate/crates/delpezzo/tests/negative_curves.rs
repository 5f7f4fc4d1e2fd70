//! Negative-curve extraction on hand-built configurations with known
//! invariants.

use std::collections::BTreeMap;

use delpezzo::cluster::{line_through, tower_make, BlowupConfig};
use delpezzo::exactalg::{Field, Ring};
use delpezzo::negcurves::{ade_type, dual_graph_dot, effective_negative, geometric_low_degree_counts};
use delpezzo::plane::{HomForm, ProjPoint};

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

fn config_5a(f: &Field) -> BlowupConfig {
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
fn empty_configuration_has_no_negative_curves() {
    let f = Field::rationals();
    let cfg = BlowupConfig::new(f, vec![]).unwrap();
    let set = effective_negative(&cfg).unwrap();
    assert!(set.two_curves.is_empty());
    assert!(set.one_curves.is_empty());
    assert_eq!(ade_type(&set).unwrap(), "∅");
    assert!(dual_graph_dot(&set).contains("graph dual"));
}

#[test]
fn four_points_one_line_degenerate() {
    // three of the four points collinear: one (−2)-curve, seven lines
    let f = Field::rationals();
    let cfg = config_5a(&f);
    let set = effective_negative(&cfg).unwrap();
    assert_eq!(set.two_curves.len(), 1);
    assert_eq!(set.one_curves.len(), 7);
    assert_eq!(ade_type(&set).unwrap(), "A_1");
    // dual graph: 8 nodes
    let dot = dual_graph_dot(&set);
    assert_eq!(dot.matches("label=").count(), 8);
    // intersection matrix is symmetric, off-diagonal nonnegative
    for (i, row) in set.intersections.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            assert_eq!(x, set.intersections[j][i]);
            if i != j {
                assert!(x >= 0);
            }
        }
    }
    // geometric route agrees in degrees ≤ 2
    let (lines_geo, conics_geo) = geometric_low_degree_counts(&cfg).unwrap();
    let lines_lattice = set.one_curves.iter().filter(|c| c.class.d == 1).count();
    let conics_lattice = set.one_curves.iter().filter(|c| c.class.d == 2).count();
    assert_eq!(lines_geo, lines_lattice);
    assert_eq!(conics_geo, conics_lattice);
}

#[test]
fn three_towers_of_height_two_give_three_a2() {
    // towers along the coordinate triangle: 3A_2 with three lines
    let f = Field::rationals();
    let towers = vec![
        tower_make(&f, pt(&f, 1, 0, 0), form(&f, "z"), 2).unwrap(),
        tower_make(&f, pt(&f, 0, 1, 0), form(&f, "x"), 2).unwrap(),
        tower_make(&f, pt(&f, 0, 0, 1), form(&f, "y"), 2).unwrap(),
    ];
    let cfg = BlowupConfig::new(f.clone(), towers).unwrap();
    let set = effective_negative(&cfg).unwrap();
    assert_eq!(ade_type(&set).unwrap(), "3A_2");
    assert_eq!(set.one_curves.len(), 3);
}

#[test]
fn single_tower_height_eight_is_e8() {
    let f = Field::rationals();
    let towers = vec![tower_make(&f, pt(&f, 1, 0, 0), form(&f, "x^2*z+y^3"), 8).unwrap()];
    let cfg = BlowupConfig::new(f.clone(), towers).unwrap();
    let set = effective_negative(&cfg).unwrap();
    assert_eq!(ade_type(&set).unwrap(), "E_8");
    assert_eq!(set.one_curves.len(), 1);
}

#[test]
fn deg4_tower_case_with_two_conic_towers() {
    // towers (xz+y², height 3) and (xy+z², height 3): A_5 with three lines
    let f = Field::rationals();
    let towers = vec![
        tower_make(&f, pt(&f, 1, 0, 0), form(&f, "x*z+y^2"), 3).unwrap(),
        tower_make(&f, pt(&f, 0, 1, 0), form(&f, "x*y+z^2"), 3).unwrap(),
    ];
    let cfg = BlowupConfig::new(f.clone(), towers).unwrap();
    let set = effective_negative(&cfg).unwrap();
    assert_eq!(ade_type(&set).unwrap(), "A_5");
    assert_eq!(set.one_curves.len(), 3);
}
