use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zeropres::battery::battery;
use zeropres::certify::{certify_closed, certify_open, gcd_image, Budget, Verdict, Witness};
use zeropres::roots::roots_balanced;
use zeropres::{MoebiusDomain, Poly};

fn upper() -> MoebiusDomain {
    MoebiusDomain::preset("upper-half-plane").unwrap()
}

fn budget() -> Budget {
    Budget {
        w_samples: 256,
        trials: 500,
        seed: 11,
    }
}

#[test]
fn open_pass_implies_closed_pass_and_routes_agree() {
    let dom = upper();
    for e in battery(8, 5) {
        let open = certify_open(&e.op, &dom, 8, &budget()).unwrap();
        let closed = certify_closed(&e.op, &dom, 8, &budget()).unwrap();
        eprintln!(
            "{:<30} open {:?} closed {:?} agree {:?}",
            e.name, open.verdict, closed.verdict, open.diagnostics.routes_agree
        );
        assert!(
            !(open.verdict.is_pass() && !closed.verdict.is_pass()),
            "{}: open pass with closed failure",
            e.name
        );
        assert_eq!(open.diagnostics.routes_agree, Some(true), "{}", e.name);
        for r in [&open, &closed] {
            if r.verdict == Verdict::Falsified {
                match r.witness.as_ref().expect("falsified report without witness") {
                    Witness::Poly(w) => assert!(w.verify(&e.op, &dom), "{}", e.name),
                    Witness::Symbol { n, mode, zero } => {
                        let f = zeropres::operator_symbol(&e.op, &dom, *n).unwrap();
                        assert!(zero.verify(&f, &dom, *mode), "{}", e.name);
                    }
                }
            }
        }
    }
}

/// Every root of `g` occurs in `h` with at least the same multiplicity.
fn roots_contained(g: &Poly, h: &Poly, tol: f64) -> bool {
    if g.degree().unwrap_or(0) == 0 {
        return true;
    }
    if h.degree().unwrap_or(0) == 0 {
        return false;
    }
    let gr = roots_balanced(g).unwrap();
    let hr = roots_balanced(h).unwrap();
    gr.roots.iter().all(|r| {
        hr.roots.iter().any(|s| {
            (r.location - s.location).norm() <= tol * r.location.norm().max(1.0)
                && s.multiplicity >= r.multiplicity
        })
    })
}

#[test]
fn gcd_chain_on_closed_passes() {
    let dom = upper();
    for e in battery(8, 5) {
        let closed = certify_closed(&e.op, &dom, 8, &budget()).unwrap();
        if !closed.verdict.is_pass() {
            continue;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let gcds: Vec<Poly> = (2..=5)
            .map(|n| gcd_image(&e.op, &dom, n, 50, &mut rng).unwrap().gcd)
            .collect();
        for m in 2..=5 {
            for k in m + 1..=5 {
                assert!(
                    roots_contained(&gcds[k - 2], &gcds[m - 2], 1e-5),
                    "{}: gcd at {k} = {:?} not contained in gcd at {m} = {:?}",
                    e.name,
                    gcds[k - 2],
                    gcds[m - 2]
                );
            }
        }
    }
}
