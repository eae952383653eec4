//! Acceptance criteria, one PASS/FAIL line each.
//!
//! A FAIL line means the printed statement does not hold as written. Every criterion also asserts
//! what the computation actually gives, so the binary only exits nonzero when that changes.

use bcvw::bcvw::{check_quotient_presentation, check_relations, printed_m0, printed_m1, standard_assignment, Convention, Presentation, Status};
use bcvw::cli::{constants_table, run_case, select_suites, CaseText, RunConfig, Suite, UnitarySuite};
use bcvw::exactlin::{rank, rat, ExactMatrix, ExactVector, GaussRat, SubspaceCoords};
use bcvw::heckealg::{star_maps, HeckeElement, HeckeParams, StarKind};
use bcvw::hermforms::{check_star_invariance, classify_forms, induced_form, langlands_quotient, sl2_default_grid, sl2_grid, solve_invariant_form, FormKind, HermForm};
use bcvw::liealg::{build_algebra, GroupSpec, Sign1};
use bcvw::psmodel::{enumerate_m_invariants, hecke_isomorphism_check, ModelSpace, Ordering, PsSpec, Side};
use bcvw::tensorops::{build_omega, build_xi_leg, omega_on_vv, swap_on_vv, trivial_projector_on_vv, OmegaPart, TensorSpace};
use bcvw::wbgroup::{enumerate_group, longest_element};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn groups() -> Vec<GroupSpec> {
    vec![GroupSpec::sp(1), GroupSpec::sp(2), GroupSpec::sp(3), GroupSpec::opq(3, 2), GroupSpec::opq(4, 3)]
}

fn real_rank(g: &GroupSpec) -> usize {
    g.real_form().unwrap().real_rank()
}

fn n_of(g: &GroupSpec) -> i64 {
    if g.family == "sp" {
        (g.params[0] / 2) as i64
    } else {
        g.params[1] as i64
    }
}

fn random_gauss(rng: &mut ChaCha8Rng) -> GaussRat {
    let d = rng.gen_range(1..=6);
    GaussRat::complex(rat(rng.gen_range(-9..=9), d), rat(rng.gen_range(-4..=4), rng.gen_range(1..=5)))
}

fn random_nu(rng: &mut ChaCha8Rng, r: usize) -> Vec<GaussRat> {
    (0..r).map(|_| random_gauss(rng)).collect()
}

/// Default generic point used where nu does not matter.
fn generic_nu(r: usize) -> Vec<GaussRat> {
    (1..=r as i64).map(|j| GaussRat::complex(rat(2 * j + 1, 3), rat(j, 5))).collect()
}

fn deltas(g: &GroupSpec) -> Vec<Sign1> {
    if g.family == "opq" {
        vec![Sign1::Triv, Sign1::Det]
    } else {
        vec![Sign1::Triv]
    }
}

fn spec(g: &GroupSpec, k: usize, nu: Vec<GaussRat>, side: Side, d: Sign1) -> PsSpec {
    let mut s = PsSpec::new(g.clone(), k, nu, side);
    s.delta_compact = d;
    s
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

struct Line {
    pass: bool,
    detail: String,
}

fn c1_relations() -> Line {
    let mut m0_ok = true;
    let mut details = Vec::new();
    for g in groups() {
        let data = build_algebra(&g).unwrap();
        let r = real_rank(&g);
        for k in 1..=3 {
            let a = standard_assignment(&data, k, Convention::Consistent).unwrap();
            let rep = check_relations(&Presentation::type_bc(k), &a);
            assert!(rep.normative_ok(), "{g} k={k} tensor: {:?}", rep.failures());
            if k >= 2 {
                // e^2 = m0 e; m1 from e theta e = m1 e
                let m0 = rep.derived_constants.m0.clone().unwrap();
                let m1 = rep.derived_constants.m1.clone().unwrap();
                let (pm0, pm1) = (printed_m0(&g), printed_m1(&g));
                let expected_abs = if g.family == "sp" { 2 * n_of(&g) } else { (g.params[0] + g.params[1]) as i64 };
                let abs_eq = |x: &GaussRat, y: &GaussRat| x == y || *x == -y;
                assert!(abs_eq(&m0, &GaussRat::int(expected_abs)), "{g}: m0 {m0}");
                assert!(abs_eq(&m1, &pm1), "{g}: m1 {m1} vs printed {pm1}");
                if k == 2 {
                    if !abs_eq(&m0, &pm0) {
                        m0_ok = false;
                    }
                    details.push(format!("{g}: m0 {m0} (printed {pm0}), m1 {m1} (printed {pm1})"));
                }
            }
            if k <= r {
                for side in [Side::Mu, Side::Mubar] {
                    for d in deltas(&g) {
                        let m = ModelSpace::build(&spec(&g, k, generic_nu(r), side, d), Ordering::KLeft).unwrap();
                        let rep = m.check_relations();
                        assert!(rep.normative_ok(), "{g} k={k} {side:?}: {:?}", rep.failures());
                        assert!(check_quotient_presentation(&m.assignment()).normative_ok());
                    }
                }
            }
        }
    }
    Line { pass: m0_ok, detail: format!("all relations hold; |m0| is 2n for Sp (printed n) and p+q for O(p,q) (printed floor((p+q)/2)). {}", details.join("; ")) }
}

fn c2_k_commutation() -> Line {
    let mut spaces = 0;
    for g in groups() {
        let data = build_algebra(&g).unwrap();
        for k in 1..=3 {
            let a = standard_assignment(&data, k, Convention::Consistent).unwrap();
            let rep = check_relations(&Presentation::type_bc(k), &a);
            assert_eq!(rep.k_commutation, Some(true), "{g} k={k}");
            spaces += 1;
        }
        // models: K does not act, M does; building succeeds only if every generator preserves the M-invariants
        for k in 0..=real_rank(&g) {
            ModelSpace::build(&spec(&g, k, generic_nu(real_rank(&g)), Side::Mu, Sign1::Triv), Ordering::KLeft).unwrap();
            spaces += 1;
        }
    }
    Line { pass: true, detail: format!("{spaces} spaces; diagonal k-action on V^(x)k, M-invariance on models") }
}

fn random_basis(rng: &mut ChaCha8Rng, basis: &[ExactMatrix]) -> Vec<ExactMatrix> {
    let n = basis.len();
    loop {
        let mut c = ExactMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                c.set(i, j, GaussRat::int(rng.gen_range(-2..=2)));
            }
        }
        if rank(&c) < n {
            continue;
        }
        return (0..n)
            .map(|i| {
                let mut acc = ExactMatrix::zeros(basis[0].rows(), basis[0].cols());
                for (j, b) in basis.iter().enumerate() {
                    acc.add_scaled(b, &c.get(i, j));
                }
                acc
            })
            .collect();
    }
}

fn c3_omega() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for g in groups() {
        let data = build_algebra(&g).unwrap();
        let om = omega_on_vv(&data, OmegaPart::Full);
        let expect = swap_on_vv(data.dim_v).add(&trivial_projector_on_vv(&data).scale(&data.m0));
        assert_eq!(om, expect, "{g}");
        for _ in 0..2 {
            let moved = data.with_bases(random_basis(&mut rng, &data.basis_k), random_basis(&mut rng, &data.basis_p)).unwrap();
            for part in [OmegaPart::Full, OmegaPart::K, OmegaPart::P] {
                assert_eq!(omega_on_vv(&moved, part), omega_on_vv(&data, part), "{g} {part:?}");
            }
        }
    }
    Line { pass: true, detail: "Omega_12 = s + m0 pr on V(x)V; Omega, Omega^k, Omega^p unchanged under 2 random basis changes per family".into() }
}

fn c4_dimensions() -> Line {
    let mut checked = 0;
    for g in groups() {
        let r = real_rank(&g);
        for k in 0..=r {
            for d in deltas(&g) {
                for side in [Side::Mu, Side::Mubar] {
                    let s = spec(&g, k, generic_nu(r), side, d);
                    let l = s.legs();
                    let expected = factorial(l) << l;
                    let (inv, _) = enumerate_m_invariants(&s).unwrap();
                    assert_eq!(inv.len(), expected, "{g} k={k} {side:?} kernel");
                    let m = ModelSpace::build(&s, Ordering::KLeft).unwrap();
                    let labeled = ExactMatrix::from_columns(m.ambient.total_dim(), &m.labeled_basis);
                    assert_eq!(rank(&labeled), expected, "{g} k={k} {side:?} orbit");
                    checked += 1;
                }
            }
        }
    }
    Line { pass: true, detail: format!("{checked} (G, delta, k, side) cases: kernel dimension = orbit rank = L! 2^L") }
}

fn c5_idempotents() -> Line {
    let mut checked = 0;
    for g in groups() {
        let r = real_rank(&g);
        for k in 0..=r {
            for side in [Side::Mu, Side::Mubar] {
                let m = ModelSpace::build(&spec(&g, k, generic_nu(r), side, Sign1::Triv), Ordering::KLeft).unwrap();
                for i in 1..m.legs() {
                    assert!(m.gens[&format!("e{i}")].is_zero(), "{g} k={k} {side:?} e{i}");
                    checked += 1;
                }
            }
        }
    }
    Line { pass: true, detail: format!("{checked} idempotents vanish exactly") }
}

fn c6_principal_series() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut runs = 0;
    for g in groups() {
        let r = real_rank(&g);
        for k in 0..=r {
            for d in deltas(&g) {
                for _ in 0..3 {
                    let nu = random_nu(&mut rng, r);
                    for side in [Side::Mu, Side::Mubar] {
                        let s = spec(&g, k, nu.clone(), side, d);
                        if s.legs() == 0 {
                            continue;
                        }
                        let m = ModelSpace::build(&s, Ordering::KLeft).unwrap();
                        let (h, _) = hecke_isomorphism_check(&m).unwrap_or_else(|e| panic!("{g} k={k} {side:?} {nu:?}: {e}"));
                        let expected = match (g.family.as_str(), side) {
                            ("sp", Side::Mu) => GaussRat::int(0),
                            ("sp", Side::Mubar) => GaussRat::int(1),
                            _ => GaussRat::frac(g.params[0] as i64 - g.params[1] as i64, 2),
                        };
                        assert_eq!(h.c_hecke, expected, "{g} k={k} {side:?}");
                        runs += 1;
                    }
                }
            }
        }
    }
    Line { pass: true, detail: format!("{runs} isomorphisms closed; c = 0 / 1 for Sp, (p-q)/2 for O(p,q)") }
}

fn c7_cyclic_formula() -> Line {
    let mut printed_fail = Vec::new();
    let mut total = 0;
    for g in groups() {
        let r = real_rank(&g);
        for k in 0..=r {
            for side in [Side::Mu, Side::Mubar] {
                let m = ModelSpace::build(&spec(&g, k, generic_nu(r), side, Sign1::Triv), Ordering::KLeft).unwrap();
                if m.legs() == 0 {
                    continue;
                }
                total += 1;
                assert!(m.cyclic_formula_holds().unwrap(), "{g} k={k} {side:?}");
                let printed = m.printed_cyclic_formula_holds().unwrap();
                // the printed form agrees only when every leg sits on f_{L}, i.e. L = 1 on the mu side
                let legs_agree = m.leg_indices.iter().all(|&a| a == m.legs());
                assert_eq!(printed, legs_agree, "{g} k={k} {side:?}");
                if !printed {
                    printed_fail.push(format!("{g} k={k} {side:?}"));
                }
            }
        }
    }
    Line {
        pass: printed_fail.is_empty(),
        detail: format!(
            "computed form nu_l - (a_l - 1) - Σ_(t<l) s_tl holds on all {total} models; printed form fails on {} of them (e.g. {})",
            printed_fail.len(),
            printed_fail.first().cloned().unwrap_or_default()
        ),
    }
}

fn random_hecke(rng: &mut ChaCha8Rng, k: usize) -> HeckeElement {
    let group = enumerate_group(k).unwrap();
    let mut e = HeckeElement::zero(k);
    for _ in 0..rng.gen_range(1..=3) {
        let w = group[rng.gen_range(0..group.len())].clone();
        let mut mono = vec![0u32; k];
        mono[rng.gen_range(0..k)] = rng.gen_range(0..=1);
        let c = GaussRat::complex(rat(rng.gen_range(-3..=3), 1), rat(rng.gen_range(-2..=2), 1));
        e = e.add(&HeckeElement::term(w, mono, c));
    }
    e
}

fn c8_star() -> Line {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 0..100 {
        let k = 1 + n % 3;
        let p = HeckeParams::new(k, GaussRat::frac(rng.gen_range(-2..=2), 2));
        let h = random_hecke(&mut rng, k);
        let w0 = HeckeElement::group(longest_element(k));
        let via = w0.mul(&star_maps(&h, &p, StarKind::Bullet).unwrap(), &p).unwrap().mul(&w0, &p).unwrap();
        assert_eq!(star_maps(&h, &p, StarKind::Star).unwrap(), via, "{h}");
    }
    let mut models = 0;
    for g in groups() {
        let r = real_rank(&g);
        for k in 1..=r {
            let m = ModelSpace::build(&spec(&g, k, generic_nu(r), Side::Mu, Sign1::Triv), Ordering::KLeft).unwrap();
            assert!(m.drinfeld_parts_match().unwrap(), "{g} k={k}");
            models += 1;
        }
        let data = build_algebra(&g).unwrap();
        for k in 2..=3 {
            let a = standard_assignment(&data, k, Convention::Consistent).unwrap();
            let w0 = (1..=k).fold(a.id(), |acc, j| acc.mul(a.theta(j)));
            for (name, x) in &a.gens {
                assert!(w0.commutator(x).is_zero(), "{g} k={k}: w0 vs {name}");
            }
            // Ad(xi) is +1 on k and -1 on p, so conjugating by a leg's xi flips Omega^p on pairs through that leg
            let space = TensorSpace::new(data.dim_v, k);
            for l in 1..=k {
                let x = build_xi_leg(space, &data, l).unwrap().matrix;
                let xi_inv = bcvw::exactlin::inverse(&x).unwrap();
                for i in 1..=k {
                    for j in i + 1..=k {
                        let through = l == i || l == j;
                        for (part, flips) in [(OmegaPart::K, false), (OmegaPart::P, through)] {
                            let om = build_omega(space, &data, i, j, part).unwrap().matrix;
                            let conj = x.mul(&om).mul(&xi_inv);
                            assert_eq!(conj, if flips { om.neg() } else { om }, "{g} {part:?} xi_{l} on ({i},{j})");
                        }
                    }
                }
            }
        }
    }
    Line { pass: true, detail: format!("100 random h: h* = w0 h^bullet w0; z~ = alpha Omega^p_0i on {models} models; w0 central; sign table holds") }
}

fn in_span(forms: &[HermForm], g: &ExactMatrix) -> bool {
    let n = g.rows();
    let mut cols: Vec<ExactVector> = forms.iter().map(|f| f.gram.vectorize()).collect();
    let before = rank(&ExactMatrix::from_columns(n * n, &cols));
    cols.push(g.vectorize());
    rank(&ExactMatrix::from_columns(n * n, &cols)) == before
}

fn c9_hermitian() -> Line {
    let mut checked = 0;
    let i = |x: i64| GaussRat::complex(rat(0, 1), rat(x, 1));
    let cases = [
        (GroupSpec::sp(1), 1, vec![i(1)]),
        (GroupSpec::sp(1), 1, vec![GaussRat::int(2)]),
        (GroupSpec::sp(1), 1, vec![GaussRat::int(0)]),
        // c = 1 on the mubar side: reducible at nu = ±1
        (GroupSpec::sp(1), 0, vec![GaussRat::int(1)]),
        (GroupSpec::sp(1), 0, vec![GaussRat::int(-1)]),
        (GroupSpec::sp(2), 1, vec![i(1), i(2)]),
        (GroupSpec::sp(2), 1, vec![GaussRat::int(1), GaussRat::int(0)]),
        (GroupSpec::opq(3, 2), 1, vec![GaussRat::complex(rat(0, 1), rat(1, 2)), GaussRat::int(1)]),
        (GroupSpec::opq(3, 2), 1, vec![GaussRat::frac(1, 2), GaussRat::frac(1, 2)]),
    ];
    let mut radicals = 0;
    for (g, k, nu) in cases {
        for side in [Side::Mu, Side::Mubar] {
            let s = spec(&g, k, nu.clone(), side, Sign1::Triv);
            if s.legs() == 0 {
                continue;
            }
            let m = ModelSpace::build(&s, Ordering::KLeft).unwrap();
            let forms = solve_invariant_form(&m);
            let induced = induced_form(&m);
            let inv = check_star_invariance(&m, &induced).iter().all(|(_, ok)| *ok);
            assert_eq!(inv, in_span(&forms, &induced.gram), "{g} {nu:?} {side:?}");
            for f in &forms {
                assert!(check_star_invariance(&m, f).iter().all(|(_, ok)| *ok));
                let q = langlands_quotient(&m, f).unwrap();
                let (s0, sq) = (f.signature(), q.form.signature());
                assert_eq!((s0.n_plus, s0.n_minus, s0.n_zero), (sq.n_plus, sq.n_minus, sq.n_zero + q.radical_dim));
                // radical is a submodule; transport it with the intertwiner and check the oracle preserves it too
                let rad = f.radical();
                let sc = SubspaceCoords::new(m.dim(), &rad).unwrap();
                for (name, x) in &m.gens {
                    assert!(rad.is_empty() || sc.restrict(x).is_some(), "radical not invariant under {name}");
                }
                let (h, ps) = hecke_isomorphism_check(&m).unwrap();
                let image: Vec<ExactVector> = rad.iter().map(|v| h.intertwiner.mul_vec(v)).collect();
                if !image.is_empty() {
                    radicals += 1;
                    let sc = SubspaceCoords::new(ps.dim(), &image).unwrap();
                    for x in ps.s.iter().chain(&ps.theta).chain(&ps.eps) {
                        assert!(sc.restrict(x).is_some(), "oracle does not preserve the transported radical");
                    }
                }
                // the quotient dimension is the same on both sides of the intertwiner
                let t_inv = bcvw::exactlin::inverse(&h.intertwiner).unwrap();
                let oracle_gram = t_inv.adjoint().mul(&f.gram).mul(&t_inv);
                assert_eq!(rank(&oracle_gram), q.dim);
                checked += 1;
            }
        }
    }
    Line { pass: true, detail: format!("{checked} forms: invariance iff in solver span, radical submodule, signature additivity, quotients match through the intertwiner ({radicals} nonzero radicals)") }
}

fn c10_sl2() -> Line {
    let grid = sl2_default_grid();
    let kinds = sl2_grid(&grid).unwrap();
    for (nu, kind) in &kinds {
        assert_eq!(*kind == FormKind::PositiveDefinite, nu.re == rat(0, 1), "nu = {nu}");
    }
    let text = grid.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
    let cfg = RunConfig::from_text(&CaseText { group: "sp:2".into(), k: Some(1), grid: Some(text), ..Default::default() }).unwrap();
    let out = UnitarySuite.run(&cfg).unwrap();
    let points = out.body["points"].as_array().unwrap();
    assert_eq!(points.len(), kinds.len());
    let mut not_unitary = 0;
    for (p, (nu, kind)) in points.iter().zip(&kinds) {
        let v = p["verdict"].as_str().unwrap();
        if v == "NOT_UNITARY" {
            not_unitary += 1;
            assert_ne!(*kind, FormKind::PositiveDefinite, "{nu}");
        }
        // real nonzero nu: the invariant form exists and is indefinite
        if nu.im == rat(0, 1) && nu.re != rat(0, 1) {
            assert_eq!(v, "NOT_UNITARY", "{nu}");
        }
    }
    let _ = classify_forms;
    Line { pass: true, detail: format!("{} grid points: positive definite exactly at re(nu) = 0; {not_unitary} NOT_UNITARY verdicts, none on the unitary axis", kinds.len()) }
}

fn c11_ledger() -> Line {
    let mut flagged = 0;
    for (g, delta) in [("sp:2", "1"), ("sp:4", "1"), ("sp:6", "2"), ("opq:3,2", "triv:1"), ("opq:4,3", "det:2")] {
        let cfg = RunConfig::from_text(&CaseText { group: g.into(), delta: Some(delta.into()), ..Default::default() }).unwrap();
        let (ok, report) = run_case(&cfg, &select_suites("relations").unwrap()).unwrap();
        assert!(ok, "{g}");
        let table = report["constants_table"].as_array().unwrap();
        assert_eq!(table.len(), 2);
        for row in table {
            assert!(row["table_c"].is_string() && row["table_r"].is_string());
            if row["c_matches_table"] == serde_json::json!(false) {
                flagged += 1;
            }
        }
        let disc = report["suites"]["relations"]["paper_discrepancies"].as_array().unwrap();
        assert!(disc.iter().any(|d| d["id"] == "Brauer parameter m0"));
        let rows = constants_table(&cfg).unwrap();
        if g.starts_with("sp") {
            assert!(rows.iter().all(|r| r.c_matches_intro != Some(false)));
        }
    }
    Line { pass: true, detail: format!("constants table embedded in every report; {flagged} table/derived mismatches flagged, none failing the run") }
}

fn main() {
    let criteria: Vec<(&str, fn() -> Line)> = vec![
        ("relation suite", c1_relations),
        ("K-commutation", c2_k_commutation),
        ("Omega decomposition", c3_omega),
        ("dimension law", c4_dimensions),
        ("idempotent vanishing", c5_idempotents),
        ("principal-series correspondence", c6_principal_series),
        ("cyclic-vector formula", c7_cyclic_formula),
        ("star / w0 suite", c8_star),
        ("Hermitian suite", c9_hermitian),
        ("SL2 reproduction", c10_sl2),
        ("discrepancy ledger", c11_ledger),
    ];
    let _ = Status::Pass;
    let mut fails = 0;
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let line = f();
        if !line.pass {
            fails += 1;
        }
        println!("criterion {:>2} {:<32} {} ({:.1}s) {}", i + 1, name, if line.pass { "PASS" } else { "FAIL" }, t.elapsed().as_secs_f64(), line.detail);
    }
    println!("{fails} criteria FAIL against the printed statements; derived values asserted for all 11");
}
