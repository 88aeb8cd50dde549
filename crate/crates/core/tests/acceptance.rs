//! End-to-end acceptance checks. Runs without the libtest harness so each
//! check prints exactly one PASS/FAIL line with its timing; the process
//! exits nonzero if any check fails.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use adjacency_core::classify::{classify, Verdict};
use adjacency_core::field::FieldAutomorphism;
use adjacency_core::geometry::{adjacent_in_pencil, all_pencils, is_adjacent_set};
use adjacency_core::lemma_lab::{
    brute_force_endomorphisms, classify_stream, enumerate_preservers, verify_lemma,
    EnumerationTask, LemmaGrid, LemmaId, StreamOptions,
};
use adjacency_core::maps::{
    check_preserver, make_degenerate_vec, tabulate, StandardMapSpec, TabulatedMap,
};
use adjacency_core::matrix::{distance, MatrixSpace};
use adjacency_core::{Field, Matrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Shape = (usize, usize);
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn invertible(field: &Field, n: usize) -> Vec<Matrix> {
    MatrixSpace::new(field, n, n).unwrap().of_rank(n).collect()
}

/// Every standard map of `M_2(F_2)`: both invertible factors, both
/// orientations, every translation, identity automorphism.
fn binary_specs() -> Vec<StandardMapSpec> {
    let f = Field::prime(2).unwrap();
    let gl = invertible(&f, 2);
    let translations: Vec<Matrix> = MatrixSpace::new(&f, 2, 2).unwrap().iter().collect();
    let mut specs = Vec::new();
    for t in &gl {
        for s in &gl {
            for transposed in [false, true] {
                for r in &translations {
                    specs.push(
                        StandardMapSpec::new(
                            t.clone(),
                            s.clone(),
                            FieldAutomorphism::IDENTITY,
                            transposed,
                            r.clone(),
                            (2, 2),
                        )
                        .unwrap(),
                    );
                }
            }
        }
    }
    specs
}

fn rank_one_counts() -> Outcome {
    let mut parts = Vec::new();
    for (p, m, n, expected) in [(2u32, 2usize, 2usize, 9u64), (3, 2, 2, 32), (2, 2, 3, 21)] {
        let f = Field::prime(p).unwrap();
        let q = p as u64;
        let formula = (q.pow(m as u32) - 1) * (q.pow(n as u32) - 1) / (q - 1);
        let counted = MatrixSpace::new(&f, m, n).unwrap().of_rank(1).count() as u64;
        ensure(formula == expected && counted == formula, || {
            format!("F_{p} {m}x{n}: formula {formula}, counted {counted}, expected {expected}")
        })?;
        parts.push(format!("{m}x{n}/F{p}={counted}"));
    }
    Ok(parts.join(", "))
}

fn metric_axioms() -> Outcome {
    let f = Field::prime(2).unwrap();
    let all: Vec<Matrix> = MatrixSpace::new(&f, 2, 2).unwrap().iter().collect();
    let d: Vec<Vec<usize>> = all
        .iter()
        .map(|a| all.iter().map(|b| distance(a, b).unwrap()).collect())
        .collect();
    let mut triples = 0;
    for i in 0..16 {
        for j in 0..16 {
            ensure((d[i][j] == 0) == (i == j), || {
                format!("d({i},{j}) = {}", d[i][j])
            })?;
            ensure(d[i][j] == d[j][i], || format!("asymmetric at ({i},{j})"))?;
            for k in 0..16 {
                triples += 1;
                ensure(d[i][k] <= d[i][j] + d[j][k], || {
                    format!("triangle fails at ({i},{j},{k})")
                })?;
            }
        }
    }
    Ok(format!("{triples} triples"))
}

fn lemma_suite() -> Outcome {
    let ids = [
        "3.1",
        "3.2",
        "3.3",
        "3.4",
        "3.5",
        "3.6",
        "3.7",
        "rank-additivity",
        "4.1",
        "4.2",
    ];
    let mut instances = 0;
    for p in [2, 3] {
        let f = Field::prime(p).unwrap();
        for id in ids {
            let id: LemmaId = id.parse().unwrap();
            let grid = LemmaGrid::default_for(id, &f);
            let report = verify_lemma(id, &grid).unwrap();
            ensure(report.passed(), || {
                format!(
                    "{id} over F_{p}: complete={}, {:?}",
                    report.complete, report.violations
                )
            })?;
            instances += report.instances;
        }
    }
    Ok(format!("{instances} instances, 0 violations"))
}

fn pencil_adjacency_sizes() -> Outcome {
    let mut checked = 0;
    for p in [2u32, 3] {
        let f = Field::prime(p).unwrap();
        let c = p as usize;
        let pencils = all_pencils(&f, 2, 2);
        for a in MatrixSpace::new(&f, 2, 2).unwrap().of_rank(2) {
            for pencil in &pencils {
                let size = adjacent_in_pencil(pencil, &a).unwrap().len();
                ensure(size == c, || {
                    format!("F_{p}: {pencil:?} meets adj({a:?}) in {size}")
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} (A, pencil) pairs, all of size c"))
}

fn standard_isometries() -> Outcome {
    let specs = binary_specs();
    ensure(specs.len() == 1152, || format!("{} specs", specs.len()))?;
    for spec in &specs {
        let map = tabulate(spec).unwrap();
        let report = check_preserver(&map);
        ensure(report.preserves_both_directions, || {
            format!("{spec:?}: {report:?}")
        })?;
        let dom: Vec<Matrix> = map.domain_space().iter().collect();
        for (i, a) in dom.iter().enumerate() {
            for b in &dom[i + 1..] {
                let before = distance(a, b).unwrap();
                let after = distance(map.image(a), map.image(b)).unwrap();
                ensure(before == after, || format!("{spec:?} moves d({a:?},{b:?})"))?;
            }
        }
    }
    Ok("1152 specs, bidirectional and isometric".into())
}

fn round_trip(spec: &StandardMapSpec) -> Result<(), String> {
    let map = tabulate(spec).unwrap();
    let result = classify(&map).map_err(|e| format!("{spec:?}: {e}"))?;
    match result.verdict {
        Verdict::Standard(recovered) => {
            let again = tabulate(&recovered).unwrap();
            ensure(again == map, || {
                format!("{spec:?} recovered as {recovered:?}, tables differ")
            })
        }
        other => Err(format!("{spec:?} classified {other:?}")),
    }
}

fn classifier_round_trip() -> Outcome {
    for spec in binary_specs() {
        round_trip(&spec)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let f3 = Field::prime(3).unwrap();
    let f4 = Field::with_order(2, 2).unwrap();
    let plan: [(&Field, Shape, Shape, usize); 6] = [
        (&f3, (2, 2), (2, 2), 40),
        (&f3, (2, 2), (3, 3), 10),
        (&f3, (2, 3), (3, 3), 10),
        (&f4, (2, 2), (2, 2), 30),
        (&f4, (2, 2), (3, 3), 6),
        (&f4, (2, 3), (3, 3), 4),
    ];
    let (mut random, mut frobenius, mut embeddings) = (0, 0, 0);
    for (field, domain, codomain, count) in plan {
        for i in 0..count {
            let mut spec = StandardMapSpec::random(field, domain, codomain, &mut rng).unwrap();
            if field.degree() == 2 {
                // alternate the automorphism so both occur regardless of the draw
                let j = (i % 2) as u32;
                spec = StandardMapSpec::new(
                    spec.t,
                    spec.s,
                    field.automorphism(j).unwrap(),
                    spec.transposed,
                    spec.translation,
                    domain,
                )
                .unwrap();
            }
            frobenius += usize::from(!spec.aut.is_identity());
            embeddings += usize::from(domain != codomain);
            round_trip(&spec)?;
            random += 1;
        }
    }
    ensure(random >= 100 && frobenius > 0 && embeddings > 0, || {
        format!("coverage: {random} random, {frobenius} frobenius, {embeddings} embeddings")
    })?;
    Ok(format!(
        "1152 binary + {random} random specs ({frobenius} Frobenius, {embeddings} embeddings)"
    ))
}

fn degenerate_certificate() -> Outcome {
    let f = Field::prime(2).unwrap();
    for (m, n) in [(2, 2), (2, 3)] {
        let map = make_degenerate_vec(&f, m, n, 2).unwrap();
        let result = classify(&map).map_err(|e| e.to_string())?;
        ensure(result.verdict == Verdict::Degenerate, || {
            format!("{m}x{n}: {:?}", result.verdict)
        })?;
        ensure(is_adjacent_set(&map.range()).unwrap(), || {
            format!("{m}x{n}: range not adjacent")
        })?;
    }
    Ok("2x2 and 2x3 degenerate with adjacent ranges".into())
}

fn full_enumeration() -> Outcome {
    let f = Field::prime(2).unwrap();
    let task = EnumerationTask::new(&f, (2, 2), (2, 2), true);
    let options = StreamOptions {
        budget: Some(Duration::from_secs(600)),
        ..StreamOptions::default()
    };
    let outcome = classify_stream(&task, &options, |_| {}).map_err(|e| e.to_string())?;
    let s = *outcome.summary();
    ensure(s.complete, || format!("budget ran out: {s:?}"))?;
    ensure(s.neither == 0, || format!("{s:?}"))?;
    let emitted: BTreeSet<Vec<u64>> = enumerate_preservers(&task)
        .unwrap()
        .map(|t: TabulatedMap| t.outputs().iter().map(Matrix::code).collect())
        .collect();
    let zero = Matrix::zeros(&f, 2, 2);
    let linear: BTreeSet<Vec<u64>> = binary_specs()
        .into_iter()
        .filter(|spec| spec.translation == zero)
        .map(|spec| {
            tabulate(&spec)
                .unwrap()
                .outputs()
                .iter()
                .map(Matrix::code)
                .collect()
        })
        .collect();
    ensure(linear.len() == 72, || {
        format!("{} distinct linear standard tables", linear.len())
    })?;
    ensure(linear.is_subset(&emitted), || {
        "a linear standard table was not emitted".into()
    })?;
    ensure(s.standard + s.both >= 72, || format!("{s:?}"))?;
    Ok(format!(
        "{} preservers: {} standard, {} degenerate, {} both, 0 neither, {} nodes",
        s.emitted, s.standard, s.degenerate, s.both, s.nodes
    ))
}

fn endomorphism_search() -> Outcome {
    let mut parts = Vec::new();
    for (p, k) in [(2, 2), (2, 3), (3, 2)] {
        let f = Field::with_order(p, k).unwrap();
        let found = brute_force_endomorphisms(&f);
        ensure(found.len() == k as usize, || {
            format!("F_{}: {} maps", f.order(), found.len())
        })?;
        for map in &found {
            let distinct: BTreeSet<_> = map.iter().collect();
            ensure(distinct.len() == map.len(), || {
                format!("F_{}: {map:?} not bijective", f.order())
            })?;
        }
        parts.push(format!("F{}:{}", f.order(), found.len()));
    }
    Ok(parts.join(", "))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 rank-one counts", rank_one_counts, Duration::from_secs(1)),
        (
            "2 metric axioms on M_2(F_2)",
            metric_axioms,
            Duration::from_secs(1),
        ),
        (
            "3 structural statement suite",
            lemma_suite,
            Duration::from_secs(60),
        ),
        (
            "4 pencil adjacency sizes",
            pencil_adjacency_sizes,
            Duration::from_secs(5),
        ),
        (
            "5 standard maps are isometries",
            standard_isometries,
            Duration::from_secs(30),
        ),
        (
            "6 classifier round trip",
            classifier_round_trip,
            Duration::from_secs(300),
        ),
        (
            "7 degenerate certificate",
            degenerate_certificate,
            Duration::from_secs(5),
        ),
        (
            "8 full preserver enumeration",
            full_enumeration,
            Duration::from_secs(600),
        ),
        (
            "9 endomorphism search",
            endomorphism_search,
            Duration::from_secs(10),
        ),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let start = Instant::now();
        let outcome =
            panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed <= limit {
                Ok(detail)
            } else {
                Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"))
            }
        });
        match outcome {
            Ok(detail) => println!("PASS criterion {name} [{elapsed:.2?}]: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name} [{elapsed:.2?}]: {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
