//! Structural invariants of the corpus machinery that sit outside the
//! acceptance criteria: coordinate invariance of the vanishing systems and
//! intersection-matrix sanity.

use rand::{Rng, SeedableRng};

use delpezzo::cluster::{system_dim, BlowupConfig, MultProfile, Tower};
use delpezzo::corpus::load_corpus;
use delpezzo::exactalg::{fq_make, Field, Ring};
use delpezzo::negcurves::{effective_negative, enum_exceptional};
use delpezzo::plane::{act_form, act_point, PglElem};

fn random_pgl(f5: &Field, rng: &mut rand_chacha::ChaCha8Rng) -> PglElem<Field> {
    loop {
        let mut m = [
            [f5.zero(), f5.zero(), f5.zero()],
            [f5.zero(), f5.zero(), f5.zero()],
            [f5.zero(), f5.zero(), f5.zero()],
        ];
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = f5.from_int(rng.gen_range(0..5));
            }
        }
        if let Ok(g) = PglElem::new(f5, m) {
            return g;
        }
    }
}

fn transform_config(f5: &Field, g: &PglElem<Field>, cfg: &BlowupConfig) -> BlowupConfig {
    let towers: Vec<Tower> = cfg
        .towers
        .iter()
        .map(|t| {
            let base = act_point(f5, g, &t.base).unwrap();
            let carrier = act_form(f5, g, &t.carrier).unwrap();
            delpezzo::cluster::tower_make(f5, base, carrier, t.height).unwrap()
        })
        .collect();
    BlowupConfig::new(f5.clone(), towers).unwrap()
}

#[test]
fn vanishing_system_dim_is_coordinate_free() {
    let f5 = fq_make(5, 1).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    for inst in load_corpus(5).unwrap() {
        let cfg = inst.spec.build().unwrap();
        if cfg.field != f5 || cfg.n_points() == 0 {
            continue;
        }
        let g = random_pgl(&f5, &mut rng);
        let moved = transform_config(&f5, &g, &cfg);
        let n = cfg.n_points();
        // one exceptional class with a plane model, same profile both sides
        let class = enum_exceptional(n)
            .unwrap()
            .into_iter()
            .find(|c| c.d >= 1 && c.m.iter().all(|&x| x >= 0));
        let Some(class) = class else { continue };
        let prof = MultProfile::from_class_entries(&cfg, &class.m);
        let d1 = system_dim(&cfg, class.d as u16, &prof).unwrap();
        let d2 = system_dim(&moved, class.d as u16, &prof).unwrap();
        assert_eq!(d1, d2, "case {}", inst.record.id);
    }
}

#[test]
fn intersection_matrices_are_sane() {
    for p in [0u64, 2] {
        for inst in load_corpus(p).unwrap() {
            let cfg = inst.spec.build().unwrap();
            let set = effective_negative(&cfg).unwrap();
            let n2 = set.two_curves.len();
            let all = set.all_classes();
            for (i, a) in all.iter().enumerate() {
                for (j, b) in all.iter().enumerate() {
                    let x = set.intersections[i][j];
                    assert_eq!(x, a.pairing(b));
                    assert_eq!(x, set.intersections[j][i]);
                    if i == j {
                        assert_eq!(x, if i < n2 { -2 } else { -1 });
                    } else {
                        assert!(x >= 0, "case {} at p={}", inst.record.id, p);
                    }
                }
            }
        }
    }
}
