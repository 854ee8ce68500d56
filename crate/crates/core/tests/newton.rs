use diffkap_core::newton::{epsilon, lift_univariate, lift_univariate_branches, refine};
use diffkap_core::polyhedral::hypersurface;
use diffkap_core::random::{self, PolyShape};
use diffkap_core::residue::{IdentityField, ResidueField};
use diffkap_core::{Error, Extended, HahnSeries, KDiffPoly, MultiIndex, RhoRational};

fn shape() -> PolyShape {
    PolyShape {
        min_terms: 2,
        laurent: false,
        ..PolyShape::new(1, 4, 2)
    }
}

fn nonconstant(f: &KDiffPoly) -> bool {
    f.terms().any(|(u, _)| !u[0].is_zero())
}

/// A start point with `f(b) != 0`.
fn start(rng: &mut random::Rng64, f: &KDiffPoly) -> HahnSeries {
    loop {
        let b = random::coefficient(rng, false);
        if !f.evaluate(std::slice::from_ref(&b), None).unwrap().is_zero() {
            return b;
        }
    }
}

#[test]
fn taylor_valuations_match_symbolic_derivatives() {
    let mut rng = random::rng(11);
    for _ in 0..30 {
        let f = random::poly(&mut rng, &shape());
        if !nonconstant(&f) {
            continue;
        }
        let b = start(&mut rng, &f);
        let r = epsilon(&f, &b).unwrap();
        for j in MultiIndex::all_below(&f.index_bound()) {
            let direct = f.taylor_poly(&j).unwrap().evaluate(std::slice::from_ref(&b), None).unwrap();
            match r.taylor.get(&j) {
                Some(v) => assert_eq!(*v, direct),
                None => assert!(direct.is_zero()),
            }
        }
    }
}

#[test]
fn refine_steps_keep_the_newton_invariants() {
    let mut rng = random::rng(12);
    let mut steps = 0;
    for _ in 0..40 {
        let f = random::poly(&mut rng, &shape());
        if !nonconstant(&f) {
            continue;
        }
        let mut b = start(&mut rng, &f);
        let mut last: Option<RhoRational> = None;
        for _ in 0..4 {
            let st = match refine(&f, &b, &IdentityField) {
                Ok(st) => st,
                Err(Error::NoNonzeroRoot(_)) => break,
                Err(e) => panic!("{f} at {b}: {e}"),
            };
            steps += 1;
            let fb = f.evaluate(&[b.clone()], None).unwrap().valuation().unwrap();
            let fa = f.evaluate(std::slice::from_ref(&st.a), None).unwrap().valuation().unwrap();
            assert_eq!((&st.a - &b).valuation().unwrap(), Extended::Finite(st.report.epsilon.clone()));
            assert!(fa > fb);
            if let Some(e) = &last {
                assert!(st.report.epsilon > *e);
            }
            last = Some(st.report.epsilon.clone());
            if fa.is_infinite() {
                break;
            }
            b = st.a;
        }
    }
    assert!(steps > 40);
}

#[test]
fn lifts_at_every_tropical_root() {
    let mut rng = random::rng(13);
    let mut lifted = 0;
    for _ in 0..20 {
        let f = random::poly(&mut rng, &shape());
        let hs = hypersurface(&f).unwrap();
        for cell in &hs.cells {
            let w = &cell.sample[0];
            let init = f.initial_form(std::slice::from_ref(w)).unwrap();
            let roots = match IdentityField.difference_roots(&init) {
                Ok(r) => r,
                Err(Error::NoNonzeroRoot(_)) => continue,
                Err(e) => panic!("{e}"),
            };
            let target = w + &RhoRational::from_int(5);
            for a in roots {
                let c = match lift_univariate(&f, w, &a, &target, &IdentityField) {
                    Ok(c) => c,
                    Err(Error::Stalled { limit, .. }) => {
                        assert!(limit <= target);
                        continue;
                    }
                    Err(Error::IterationCap { .. }) => continue,
                    Err(e) => panic!("{f} at {w}: {e}"),
                };
                assert_eq!(c.root.valuation().unwrap(), Extended::Finite(w.clone()));
                assert_eq!(c.root.shift(&-w).residue().unwrap(), a);
                assert!(c.residual_valuation > Extended::Finite(target.clone()));
                let direct = f.evaluate(std::slice::from_ref(&c.root), None).unwrap().valuation().unwrap();
                assert_eq!(direct, c.residual_valuation);
                lifted += 1;
            }
        }
    }
    assert!(lifted > 10);
}

#[test]
fn branch_roots_differ_below_their_split() {
    let mut rng = random::rng(14);
    for _ in 0..10 {
        let f = random::poly(&mut rng, &shape());
        let hs = hypersurface(&f).unwrap();
        for cell in &hs.cells {
            let w = &cell.sample[0];
            let init = f.initial_form(std::slice::from_ref(w)).unwrap();
            let Ok(roots) = IdentityField.difference_roots(&init) else { continue };
            let target = w + &RhoRational::from_int(2);
            let cs = match lift_univariate_branches(&f, w, &roots[0], &target, &IdentityField, 64) {
                Ok(b) => b.lifts,
                Err(Error::IterationCap { .. }) => continue,
                Err(e) => panic!("{f} at {w}: {e}"),
            };
            for (i, a) in cs.iter().enumerate() {
                for b in &cs[i + 1..] {
                    assert_ne!(a.root, b.root);
                    let k = a.branch_choices.iter().zip(&b.branch_choices).take_while(|(x, y)| x == y).count();
                    // identical prefix, different choice at the split
                    assert!(k < a.branch_choices.len().min(b.branch_choices.len()) || a.branch_choices.len() != b.branch_choices.len());
                }
            }
        }
    }
}
