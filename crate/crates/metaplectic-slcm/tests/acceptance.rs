//! Acceptance criteria, each checked at exact equality. One PASS/FAIL line per criterion.

use std::time::Instant;

use metaplectic_slcm::characters::{GenuineCharData, MultChar};
use metaplectic_slcm::cli::verify::{self, Outcome, GRID};
use metaplectic_slcm::lagrangian::LagrangianDecomposition;
use metaplectic_slcm::slcm::{assemble_slcm, conductor_identity, plancherel_plan_and_sum};
use metaplectic_slcm::tame_field::TameContext;

fn ctx(p: u64, f: u32, n: u64) -> TameContext {
    TameContext::new(p, f, n, None).expect("context")
}

fn grid() -> Vec<TameContext> {
    GRID.iter().map(|&(p, f, n)| ctx(p, f, n)).collect()
}

fn over<F>(contexts: &[TameContext], f: F) -> Outcome
where
    F: Fn(&TameContext) -> Outcome,
{
    let mut o = Outcome::default();
    for c in contexts {
        let part = f(c);
        let (p, fd, n) = (c.p(), c.field.f, c.n());
        if !part.passed() {
            let mut tagged = Outcome { cases: part.cases, failed: part.failed, failures: vec![] };
            tagged.failures = part.failures.iter().map(|s| format!("({}, {}, {}) {}", p, fd, n, s)).collect();
            o.merge(tagged);
        } else {
            o.merge(part);
        }
    }
    o
}

fn tate_functional_equation() -> Outcome {
    let contexts: Vec<TameContext> = grid().into_iter().filter(|c| c.field.f == 1).collect();
    over(&contexts, |c| verify::tate_functional_equation(c, &verify::all_chars(c), 0..20))
}

fn partial_functional_equation() -> Outcome {
    over(&[ctx(7, 1, 3), ctx(11, 1, 5)], |c| verify::partial_functional_equation(c, &verify::representative_chars(c), 0..10))
}

/// Every metaplectic case (chi unramified, chi^2 unramified only, chi^2 ramified) must be exercised.
fn metaplectic_cases_covered(c: &TameContext, chars: &[MultChar]) -> Outcome {
    let mut o = Outcome::default();
    if c.cover.even {
        let unram = chars.iter().any(|x| !x.is_ramified(c));
        let sq_unram = chars.iter().any(|x| x.is_ramified(c) && !x.pow(2).is_ramified(c));
        let sq_ram = chars.iter().any(|x| x.pow(2).is_ramified(c));
        o.check(unram && sq_unram && sq_ram, || format!("cases covered: {} {} {}", unram, sq_unram, sq_ram));
    }
    o
}

fn partial_closed_forms() -> Outcome {
    over(&grid(), |c| {
        let all = verify::all_chars(c);
        let mut o = verify::partial_closed_forms(c, &all);
        o.merge(metaplectic_cases_covered(c, &all));
        o
    })
}

fn slcm_closed_forms() -> Outcome {
    over(&grid(), |c| {
        let all = verify::all_chars(c);
        let mut o = verify::slcm_closed_forms(c, &all);
        o.merge(verify::ramified_sparsity(c, &all));
        o.merge(metaplectic_cases_covered(c, &all));
        o
    })
}

fn with_n_one() -> Vec<TameContext> {
    let mut v = vec![ctx(7, 1, 1)];
    v.extend(grid());
    v
}

fn plancherel_paths() -> Outcome {
    over(&with_n_one(), |c| {
        let mut o = verify::plancherel_paths(c, &verify::representative_chars(c));
        o.merge(metaplectic_cases_covered(c, &verify::representative_chars(c)));
        o
    })
}

fn unramified_explicit_formula() -> Outcome {
    over(&with_n_one(), verify::unramified_explicit_formula)
}

/// Charpoly (hence T and D) and mu^{-1} under every eta twist and under the swapped decomposition.
fn invariance() -> Outcome {
    over(&[ctx(7, 1, 3), ctx(7, 1, 6)], |c| {
        let std = LagrangianDecomposition::standard(c);
        let swp = LagrangianDecomposition::swapped(c);
        let psi = metaplectic_slcm::characters::AddCharTwist::new(c.one_class());
        let group = c.class_group(c.d()).expect("classes");
        let mut o = Outcome::default();
        o.check(group.len() as u64 == c.d() * c.d(), || format!("{} classes", group.len()));
        for chi in verify::representative_chars(c) {
            let data = GenuineCharData::new(chi, psi, c.cover);
            let base = assemble_slcm(c, &std, &data).expect("assembly");
            let (cp, tr, det) = (base.charpoly(), base.trace(), base.det());
            let mu = plancherel_plan_and_sum(c, &std, &data).expect("plancherel");
            for &x in &group {
                let tw = GenuineCharData { chi: chi.mul(&c.eta(x)), ..data };
                for l in [&std, &swp] {
                    let m = assemble_slcm(c, l, &tw).expect("assembly");
                    o.check(m.charpoly() == cp, || format!("{:?} x = {:?} {:?} charpoly", chi, x, l.kind));
                    o.check(m.trace() == tr, || format!("{:?} x = {:?} {:?} trace", chi, x, l.kind));
                    o.check(m.det() == det, || format!("{:?} x = {:?} {:?} det", chi, x, l.kind));
                    o.check(plancherel_plan_and_sum(c, l, &tw).expect("plancherel") == mu, || format!("{:?} x = {:?} {:?} mu", chi, x, l.kind));
                }
            }
        }
        o
    })
}

fn determinant_relation() -> Outcome {
    over(&grid(), |c| verify::determinant_relation(c, &verify::all_chars(c)))
}

fn reducibility() -> Outcome {
    over(&[ctx(7, 1, 3), ctx(11, 1, 5), ctx(7, 1, 6)], |c| {
        let mut o = Outcome::default();
        let checks = verify::reducibility_checks(c, &verify::torsion_chars(c));
        o.check(checks.len() == if c.n() % 4 == 2 { 2 } else { 1 }, || "missing check".into());
        for (_, part) in checks {
            o.merge(part);
        }
        o
    })
}

fn weil_and_epsilon() -> Outcome {
    let mut o = over(&grid(), |c| {
        let all = verify::all_chars(c);
        let mut o = verify::gamma_from_epsilon(c, &all);
        o.merge(verify::gamma_change_of_psi(c, &all));
        o.merge(verify::epsilon_conductor_shift(c, &all));
        o.merge(verify::epsilon_unramified_twist(c, &all));
        o.merge(verify::epsilon_twist_and_inverse(c, &all));
        for (_, part) in verify::weil_index_identities(c) {
            o.merge(part);
        }
        if c.cover.even {
            o.merge(verify::meta_gamma_change_of_psi(c, &all));
        }
        o
    });
    o.merge(over(&[ctx(7, 1, 3), ctx(3, 2, 2), ctx(11, 1, 5), ctx(13, 1, 3)], verify::gauss_sum_modulus));
    o
}

fn conductor() -> Outcome {
    let mut contexts: Vec<TameContext> = [5, 7, 11, 13].iter().map(|&p| ctx(p, 1, 1)).collect();
    contexts.push(ctx(3, 2, 1));
    contexts.extend(grid().into_iter().filter(|c| c.n() == 3 || c.n() == 5));
    over(&contexts, |c| {
        let mut o = Outcome::default();
        let (lhs, rhs) = conductor_identity(c);
        o.check(lhs == rhs, || format!("{} != {}", lhs.to_text(), rhs.to_text()));
        o
    })
}

fn harmonic_mean() -> Outcome {
    let c = ctx(7, 1, 6);
    let mut o = Outcome::default();
    o.check(verify::related_covers(&c) == vec![2], || format!("related covers {:?}", verify::related_covers(&c)));
    o.merge(verify::harmonic_mean(&c, &verify::all_chars(&c)));
    o
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("tate functional equation", tate_functional_equation),
        ("partial functional equation", partial_functional_equation),
        ("partial factor closed forms", partial_closed_forms),
        ("slcm closed forms and sparsity", slcm_closed_forms),
        ("plancherel path agreement", plancherel_paths),
        ("unramified explicit formula", unramified_explicit_formula),
        ("eta twist and decomposition invariance", invariance),
        ("determinant relation", determinant_relation),
        ("reducibility classifier", reducibility),
        ("weil index and epsilon identities", weil_and_epsilon),
        ("conductor identity", conductor),
        ("harmonic mean over related covers", harmonic_mean),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.passed() && o.cases > 0 { "PASS" } else { "FAIL" };
        println!("{}  {:>2}  {:<40} {:>7} cases  {:>6.1} s", status, i + 1, name, o.cases, start.elapsed().as_secs_f64());
        if status == "FAIL" {
            failed += 1;
            for d in &o.failures {
                println!("          {}", d);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
