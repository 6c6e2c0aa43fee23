//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod hand;
mod oracle;

use std::collections::{HashMap, HashSet};
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{rngs::StdRng, SeedableRng};
use startree_core::construction::{Addr, Engine, Region, RegionRule};
use startree_core::iso::{ahu_code, tree_isomorphic, verify_witness};
use startree_core::tree::{FiniteTree, Kind, RootedFiniteTree};
use startree_core::verifier::{SuiteConfig, Verdict, Verifier};

use oracle::Small;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn to_finite(t: &Small, prefix: &str) -> FiniteTree {
    let labels = (0..t.len()).map(|i| format!("{prefix}{i}")).collect();
    FiniteTree::new(labels, t.kinds.clone(), &t.edges()).expect("oracle tree is valid")
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn iso_oracle() -> Outcome {
    let reps = oracle::unlabeled_trees(9);
    let counts: Vec<usize> = reps[1..].iter().map(Vec::len).collect();
    check(counts == [1, 1, 1, 2, 3, 6, 11, 23, 47], || format!("class counts {counts:?}"))?;

    let mut pool: Vec<Small> = reps[1..=8].iter().flatten().cloned().collect();
    for t in reps[1..=6].iter().flatten() {
        pool.extend(oracle::marked_variants(t).into_iter().skip(1));
    }

    let mut rng = StdRng::seed_from_u64(7);
    let shuffled: Vec<(Small, Vec<usize>)> = pool
        .iter()
        .map(|t| {
            let mut perm: Vec<usize> = (0..t.len()).collect();
            perm.shuffle(&mut rng);
            (oracle::permute(t, &perm), perm)
        })
        .collect();
    let left: Vec<FiniteTree> = pool.iter().map(|t| to_finite(t, "a")).collect();
    let right: Vec<FiniteTree> = shuffled.iter().map(|(t, _)| to_finite(t, "b")).collect();
    let codes = |ts: &[FiniteTree]| -> Vec<Vec<String>> {
        ts.iter()
            .map(|t| {
                t.vertices()
                    .map(|r| ahu_code(&RootedFiniteTree::new(t.clone(), r).unwrap()).as_str().to_string())
                    .collect()
            })
            .collect()
    };
    let (lc, rc) = (codes(&left), codes(&right));

    let mut pairs = 0usize;
    let mut rooted = 0usize;
    for (i, a) in pool.iter().enumerate() {
        for (j, (b, _)) in shuffled.iter().enumerate() {
            pairs += 1;
            let isos = oracle::all_isos(a, b);
            let got = tree_isomorphic(&left[i], &right[j]);
            check(got.is_some() == !isos.is_empty(), || format!("pair {i}/{j}: tree_isomorphic disagrees"))?;
            if let Some(w) = &got {
                check(verify_witness(w), || format!("pair {i}/{j}: bad witness"))?;
            }
            if a.len() != b.len() {
                continue;
            }
            let realized: HashSet<(usize, usize)> =
                isos.iter().flat_map(|f| f.iter().enumerate().map(|(u, &v)| (u, v))).collect();
            for (u, cu) in lc[i].iter().enumerate() {
                for (v, cv) in rc[j].iter().enumerate() {
                    rooted += 1;
                    let same = cu == cv;
                    check(same == realized.contains(&(u, v)), || {
                        format!("pair {i}/{j} rooted at {u}/{v}: ahu_code disagrees")
                    })?;
                }
            }
        }
    }
    Ok(format!("{} trees, {pairs} pairs, {rooted} rooted pairs", pool.len()))
}

fn leaf_lemma() -> Outcome {
    let reps = oracle::unlabeled_trees(9);
    let mut cases = 0;
    for t in reps.iter().flatten() {
        let ft = to_finite(t, "v");
        for x in ft.leaves() {
            let nb = ft.neighbors(x)[0];
            let before = ft.leaves().len() as i64;
            let after = ft.remove_leaf(x).map_err(|e| e.to_string())?.leaves().len() as i64;
            let delta = after - before;
            check(delta == 0 || delta == -1, || format!("delta {delta}"))?;
            check((delta == 0) == (ft.neighbors(nb).len() == 2), || {
                format!("characterization fails on {:?} at {x}", t.adj)
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (tree, leaf) cases"))
}

fn suite(max_level: usize, radius: usize, limit: Duration) -> Outcome {
    let cfg = SuiteConfig {
        max_level,
        radius,
        ..SuiteConfig::default()
    };
    let start = Instant::now();
    let verifier = Verifier::new(Engine::build(max_level + 1).map_err(|e| e.to_string())?);
    let reports = verifier.run_suite(&cfg);
    let took = start.elapsed();
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| !r.passed())
        .map(|r| format!("{}@{}: {:?}", r.check, r.level, r.verdict))
        .collect();
    check(bad.is_empty(), || bad.join(", "))?;
    check(took < limit, || format!("took {took:?}, limit {limit:?}"))?;
    Ok(format!("{} checks in {took:.2?}", reports.len()))
}

fn hand_assembly() -> Outcome {
    let built = hand::level_one(11);
    let center = built.vertex("B.r0").unwrap();
    let ours = built.ball(center, 10).map_err(|e| e.to_string())?;
    let engine = Engine::build(1).map_err(|e| e.to_string())?;
    let theirs = engine.ball_at(1, &"base(ray(0))".parse().unwrap(), 10).map_err(|e| e.to_string())?;
    let kinds = |t: &FiniteTree| {
        let mut h: HashMap<Kind, usize> = HashMap::new();
        for v in t.vertices() {
            *h.entry(t.kind(v)).or_default() += 1;
        }
        let mut v: Vec<_> = h.into_iter().collect();
        v.sort();
        v
    };
    check(tree_isomorphic(&ours, &theirs.tree).is_some(), || {
        format!(
            "not isomorphic: hand {} vertices {:?}, engine {} vertices {:?}",
            ours.len(),
            kinds(&ours),
            theirs.tree.len(),
            kinds(&theirs.tree)
        )
    })?;
    Ok(format!("{} vertices, kinds {:?}", ours.len(), kinds(&ours)))
}

fn ladder_separation() -> Outcome {
    let engine = Engine::build(2).map_err(|e| e.to_string())?;
    let region = Region::around_origin(1, 8);
    let y = Addr::base(engine.witness(0).unwrap().clone());
    let orbit = engine.orbit(1, &[0, 1], &[y], &region).map_err(|e| e.to_string())?;
    let double = engine.with_rule(Arc::new(RegionRule {
        level: 1,
        region: region.clone(),
        hosts: orbit.members.into_iter().collect(),
    }));
    let bad = Verifier::new(double.clone()).check_max_degree(1, &region);
    check(bad.verdict == Verdict::Fail, || format!("full orbit gave {:?}", bad.verdict))?;
    let witness = bad
        .counterexamples
        .iter()
        .find(|c| double.degree(1, &c.parse().unwrap()).ok() == Some(4))
        .cloned();
    check(witness.is_some(), || format!("no degree-4 vertex among {:?}", bad.counterexamples))?;
    let good = Verifier::new(engine).check_max_degree(1, &region);
    check(good.verdict == Verdict::Pass, || format!("ladder gave {:?}", good.verdict))?;
    Ok(format!("full orbit fails at {}; ladder passes", witness.unwrap()))
}

fn stability() -> Outcome {
    let engine = Engine::build(3).map_err(|e| e.to_string())?;
    let mut compared = 0;
    for (level, radius) in [(0usize, 20usize), (1, 12), (2, 8)] {
        let region = Region::around_origin(level, radius);
        let gens: Vec<usize> = (0..=level).collect();
        let seed = engine.witness(level).unwrap().clone();
        let run = |r: &Region| engine.orbit(level, &gens, std::slice::from_ref(&seed), r).map(|o| o.members);
        let a = run(&region).map_err(|e| e.to_string())?;
        let b = run(&region.doubled()).map_err(|e| e.to_string())?;
        check(a == b, || format!("orbit at level {level} changes under margin doubling"))?;
        compared += 1;
        if level == 0 {
            continue;
        }
        let hosts = |r: &Region, k| engine.hosts(level, r, k).map(|h| h.hosts);
        let base = hosts(&region, 3).map_err(|e| e.to_string())?;
        for (what, other) in [
            ("K = 6", hosts(&region, 6)),
            ("doubled margin", hosts(&region.doubled(), 3)),
        ] {
            let other = other.map_err(|e| e.to_string())?;
            check(base == other, || format!("hosts at level {level} change under {what}"))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} comparisons identical"))
}

fn cli(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_startree"))
        .args(args)
        .env("RAYON_NUM_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!("{args:?} exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let verify = ["verify", "--max-level", "1", "--radius", "10"];
    let first = cli(&verify, "4")?;
    for threads in ["4", "1"] {
        check(cli(&verify, threads)? == first, || format!("verify output differs ({threads} threads)"))?;
    }
    let golden = [
        (
            &["truncate", "--level", "0", "--center", "ray(0)", "--radius", "2"][..],
            &include_bytes!("../golden/truncate_l0_ray0_r2.edgelist")[..],
        ),
        (
            &["truncate", "--level", "1", "--center", "base(ray(0))", "--radius", "4", "--format", "json"][..],
            &include_bytes!("../golden/truncate_l1_base_r4.json")[..],
        ),
    ];
    for (args, want) in golden {
        for threads in ["1", "4"] {
            check(cli(args, threads)? == want, || format!("{args:?} differs from golden ({threads} threads)"))?;
        }
    }
    Ok(format!("{} report lines stable; golden files match", first.split(|&b| b == b'\n').filter(|l| !l.is_empty()).count()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("small-tree isomorphism oracle", || {
            let start = Instant::now();
            let out = iso_oracle()?;
            let took = start.elapsed();
            check(took < Duration::from_secs(60), || format!("took {took:?}"))?;
            Ok(format!("{out} in {took:.2?}"))
        }),
        ("leaf-count lemma", leaf_lemma),
        ("level-0 suite at radius 20", || suite(0, 20, Duration::from_secs(5))),
        ("level-1 suite at radius 12", || suite(1, 12, Duration::from_secs(60))),
        ("level-2 suite at radius 8", || suite(2, 8, Duration::from_secs(600))),
        ("hand-assembled level-1 ball", hand_assembly),
        ("ladder vs full orbit", ladder_separation),
        ("margin and K stability", stability),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS {}. {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}. {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

