use crate::report::{Outcome, Params, Report, RunResult};
use crate::RunArgs;
use bbgroup::bbfield::ppd_prime;
use bbgroup::bbox::{GeneratorFile, MatrixHarness, Sampler, SharedBox};
use bbgroup::frobenius::verify_frobenius;
use bbgroup::harness::{gl2_harness, matrix_order, reveal_involution, Sl2Instance};
use bbgroup::report::StageLog;
use bbgroup::sl2_char2::{recover_sl2_char2, verify_char2, MAX_ENUMERATED_DEGREE};
use bbgroup::sl2_odd::{odd_field_order, recover_frobenius, recover_psl2, verify_recovery};
use bbgroup::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// Random triples for the char-2 field axiom check.
const AXIOM_TRIPLES: usize = 200;

/// Where the black box comes from.
enum Source {
    Generated,
    File(GeneratorFile),
}

struct Setup {
    p: u64,
    k: usize,
    source: Source,
    input_name: Option<String>,
}

fn read_input(args: &RunArgs) -> Result<Option<(GeneratorFile, String)>> {
    let Some(path) = &args.input else {
        return Ok(None);
    };
    let text = std::fs::read_to_string(path).map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    let file: GeneratorFile = serde_json::from_str(&text).map_err(|e| Error::invalid(format!("malformed generator file {}: {e}", path.display())))?;
    if file.n != 2 {
        return Err(Error::invalid("recognition needs 2x2 generators"));
    }
    Ok(Some((file, path.display().to_string())))
}

fn setup(mode: &str, args: &RunArgs) -> Result<Setup> {
    let input = read_input(args)?;
    let char2 = mode == "recognize-char2";
    let (p, k, source, input_name) = match input {
        Some((file, name)) => (file.p, file.k, Source::File(file), Some(name)),
        None if char2 => {
            let k = args.n.map(|n| n as usize).or(args.k).ok_or_else(|| Error::invalid("missing --n or --input"))?;
            (2, k, Source::Generated, None)
        }
        None => {
            let p = args.p.ok_or_else(|| Error::invalid("missing --p or --input"))?;
            (p, args.k.unwrap_or(1), Source::Generated, None)
        }
    };
    if char2 {
        if p != 2 {
            return Err(Error::invalid("recognize-char2 needs characteristic 2"));
        }
        if !(2..=20).contains(&k) {
            return Err(Error::invalid("degree must be between 2 and 20"));
        }
    } else {
        odd_field_order(p, k)?;
    }
    Ok(Setup { p, k, source, input_name })
}

fn build_box(s: &Setup, args: &RunArgs, seed: u64, rng: &mut ChaCha8Rng) -> Result<(SharedBox, Option<Sl2Instance>, Option<MatrixHarness>)> {
    match &s.source {
        Source::Generated => {
            let inst = Sl2Instance::new(s.p, s.k, args.psl, args.is_opaque(), seed, rng)?;
            Ok((inst.harness.group(), Some(inst), None))
        }
        Source::File(f) => {
            let h = f.build(args.is_opaque(), seed)?;
            Ok((h.group(), None, Some(h)))
        }
    }
}

fn failure(log: StageLog, e: &Error) -> RunResult {
    RunResult {
        stages: log.stages,
        verification: json!({"ok": false, "error": e.to_string(), "exit_code": e.exit_code()}),
        structure_constants: None,
        success: false,
        line: format!("failed: {e}"),
    }
}

fn with_ok(v: impl serde::Serialize, ok: bool) -> Value {
    let mut v = serde_json::to_value(v).expect("verification serializes");
    v["ok"] = json!(ok);
    v
}

fn recognize_odd(s: &Setup, args: &RunArgs, seed: u64) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x, _, _) = build_box(s, args, seed, &mut rng)?;
    let mut log = StageLog::default();
    let rec = match recover_psl2(x.clone(), s.p, s.k, &mut rng, &mut log) {
        Ok(r) => r,
        Err(e @ Error::InvalidInput(_)) => return Err(e),
        Err(e) => return Ok(failure(log, &e)),
    };
    let v = verify_recovery(x.as_ref(), &rec, args.pairs, &mut rng)?;
    let ok = v.success();
    Ok(RunResult {
        line: format!("Phi checks {}, isomorphism {}, det(A) = {}", v.phi_homomorphism_checks, if v.isomorphism_ok { "verified" } else { "FAILED" }, v.trace_form_det),
        stages: log.stages,
        verification: with_ok(&v, ok),
        structure_constants: Some(rec.recovered.structure_constants()),
        success: ok,
    })
}

fn field_report(s: &Setup, args: &RunArgs, seed: u64) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x, _, _) = build_box(s, args, seed, &mut rng)?;
    let mut log = StageLog::default();
    let rec = match recover_psl2(x.clone(), s.p, s.k, &mut rng, &mut log) {
        Ok(r) => r,
        Err(e @ Error::InvalidInput(_)) => return Err(e),
        Err(e) => return Ok(failure(log, &e)),
    };
    let v = verify_recovery(x.as_ref(), &rec, args.pairs, &mut rng)?;
    let images: Vec<Vec<u64>> = (0..s.k).map(|i| rec.iso.apply(&rec.standard.basis_vector(i))).collect();
    let ok = v.isomorphism_ok && v.trace_form_det != 0;
    let verification = json!({
        "ok": ok,
        "standard_field": rec.standard.structure_constants(),
        "isomorphism_images": images,
        "isomorphism_ok": v.isomorphism_ok,
        "isomorphism_pairs_checked": v.isomorphism_pairs_checked,
        "trace_form_det": v.trace_form_det,
        "phi_homomorphism_checks": v.phi_homomorphism_checks,
    });
    Ok(RunResult {
        line: format!("structure constants recovered, isomorphism {} on {} pairs", if v.isomorphism_ok { "verified" } else { "FAILED" }, v.isomorphism_pairs_checked),
        stages: log.stages,
        verification,
        structure_constants: Some(rec.recovered.structure_constants()),
        success: ok,
    })
}

fn frobenius(s: &Setup, args: &RunArgs, seed: u64) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x, _, _) = build_box(s, args, seed, &mut rng)?;
    let mut log = StageLog::default();
    let fd = match recover_frobenius(x, s.p, s.k, &mut rng, &mut log) {
        Ok((_, _, fd)) => fd,
        Err(e @ Error::InvalidInput(_)) => return Err(e),
        Err(e) => return Ok(failure(log, &e)),
    };
    let v = log.run("verify_frobenius", |_| Ok(verify_frobenius(&fd, args.pairs, &mut rng)))?;
    let ok = v.success();
    Ok(RunResult {
        line: format!("phi^k = 1 on {}, multiplicative on {}", v.phi_order_checks, v.phi_homomorphism_checks),
        stages: log.stages,
        verification: with_ok(&v, ok),
        structure_constants: None,
        success: ok,
    })
}

fn recognize_char2(s: &Setup, args: &RunArgs, seed: u64) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x, inst, harness) = build_box(s, args, seed, &mut rng)?;
    let q = 1u64 << s.k;
    let r = match (&inst, &harness) {
        (Some(i), _) => i.revealed_involution(&mut rng),
        (None, Some(h)) => reveal_involution(h, &mut rng, 64 * q as usize),
        (None, None) => unreachable!("a box always has a harness"),
    };
    let r = match r {
        Ok(r) => r,
        Err(e) => return Ok(failure(StageLog::default(), &e)),
    };
    let hint = (s.k as u32 > MAX_ENUMERATED_DEGREE).then_some(s.k as u32);
    let mut log = StageLog::default();
    let rec = match recover_sl2_char2(x, &r, hint, &mut rng, &mut log) {
        Ok(r) => r,
        Err(e @ Error::InvalidInput(_)) => return Err(e),
        Err(e) => return Ok(failure(log, &e)),
    };
    let v = verify_char2(&rec, args.pairs, AXIOM_TRIPLES, &mut rng)?;
    let ok = v.success() && v.degree as usize == s.k;
    Ok(RunResult {
        line: format!("degree {}, Psi checks {}, field axioms {}", v.degree, v.psi_homomorphism_checks, v.field_axiom_checks),
        stages: log.stages,
        verification: with_ok(&v, ok),
        structure_constants: None,
        success: ok,
    })
}

/// Small fixed suites compared against brute-force answers.
fn selftest(args: &RunArgs, seed: u64) -> Result<RunResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = serde_json::Map::new();
    let mut all = true;
    let mut record = |name: &str, ok: bool, detail: Value| {
        all &= ok;
        checks.insert(name.to_string(), json!({"ok": ok, "detail": detail}));
    };

    for (p, k) in [(13u64, 1usize), (3, 2)] {
        let h = gl2_harness(p, k, args.is_opaque(), seed)?;
        let x = h.group();
        let t = h.backend().tables();
        let mut sampler = Sampler::new(x.as_ref(), &mut rng);
        let mut agree = 0;
        for _ in 0..200 {
            let s = sampler.sample();
            if x.order(&s)? == matrix_order(t, &h.decode(&s), false) {
                agree += 1;
            }
        }
        record(&format!("element_order_gl2_{}", t.q()), agree == 200, json!(format!("{agree}/200")));
    }

    let exceptions = [(2u64, 6u32), (3, 2), (7, 2), (31, 2), (127, 2)];
    let none = exceptions.iter().all(|&(p, n)| matches!(ppd_prime(p, n), Ok(None)));
    let some = [(3u64, 4u32), (5, 3), (2, 5), (13, 1)].iter().all(|&(p, n)| matches!(ppd_prime(p, n), Ok(Some(_))));
    record("ppd_exceptions", none && some, json!({"exceptions_empty": none, "others_found": some}));

    let sub = RunArgs { pairs: 50, ..args.clone() };
    for (p, k) in [(13u64, 1usize), (3, 2)] {
        let s = Setup { p, k, source: Source::Generated, input_name: None };
        let r = recognize_odd(&s, &sub, seed)?;
        record(&format!("recognize_odd_q{}", p.pow(k as u32)), r.success, r.verification);
    }
    let s = Setup { p: 3, k: 2, source: Source::Generated, input_name: None };
    let r = frobenius(&s, &sub, seed)?;
    record("frobenius_q9", r.success, r.verification);
    let s = Setup { p: 2, k: 3, source: Source::Generated, input_name: None };
    let r = recognize_char2(&s, &RunArgs { pairs: 50, ..args.clone() }, seed)?;
    record("recognize_char2_q8", r.success, r.verification);

    let passed = checks.values().filter(|c| c["ok"] == json!(true)).count();
    let total = checks.len();
    Ok(RunResult {
        stages: Vec::new(),
        verification: json!({"ok": all, "passed": format!("{passed}/{total}"), "checks": checks}),
        structure_constants: None,
        success: all,
        line: format!("{passed}/{total} self-tests passed"),
    })
}

pub fn run(mode: &str, args: &RunArgs) -> Result<Outcome> {
    if args.trials == 0 {
        return Err(Error::invalid("--trials must be positive"));
    }
    let s = if mode == "selftest" {
        Setup { p: 0, k: 0, source: Source::Generated, input_name: None }
    } else {
        setup(mode, args)?
    };
    let mut runs = Vec::new();
    for i in 0..args.trials {
        let seed = args.seed.wrapping_add(i);
        let r = match mode {
            "recognize-odd" => recognize_odd(&s, args, seed),
            "field-report" => field_report(&s, args, seed),
            "frobenius" => frobenius(&s, args, seed),
            "recognize-char2" => recognize_char2(&s, args, seed),
            "selftest" => selftest(args, seed),
            other => Err(Error::invalid(format!("unknown mode {other}"))),
        }?;
        runs.push((seed, r));
    }
    let succeeded = runs.iter().filter(|(_, r)| r.success).count();
    let exit_code = runs
        .iter()
        .find(|(_, r)| !r.success)
        .map(|(_, r)| r.verification["exit_code"].as_i64().unwrap_or(3) as u8)
        .unwrap_or(0);
    let mut summary: Vec<String> = runs.iter().map(|(seed, r)| format!("{mode} seed {seed}: {}", r.line)).collect();
    if args.trials > 1 {
        summary.push(format!("{mode}: {succeeded}/{} runs succeeded", args.trials));
    }
    let q = if s.p == 0 { 0 } else { s.p.pow(s.k as u32) };
    let params = Params {
        p: s.p,
        k: s.k,
        q,
        psl: args.psl,
        opaque: args.is_opaque(),
        trials: args.trials,
        pairs: args.pairs,
        input: s.input_name.clone(),
    };
    let (stages, verification, structure_constants) = if runs.len() == 1 {
        let (_, r) = runs.pop().unwrap();
        (r.stages, r.verification, r.structure_constants)
    } else {
        let first_sc = runs.iter().find_map(|(_, r)| r.structure_constants.clone());
        let stages = runs[0].1.stages.clone();
        let list: Vec<Value> = runs
            .into_iter()
            .map(|(seed, r)| json!({"seed": seed, "ok": r.success, "stages": r.stages, "verification": r.verification}))
            .collect();
        let v = json!({"ok": succeeded as u64 == args.trials, "trials": args.trials, "succeeded": succeeded, "runs": list});
        (stages, v, first_sc)
    };
    Ok(Outcome {
        report: Report {
            mode: mode.to_string(),
            seed: args.seed,
            params,
            stages,
            verification,
            structure_constants,
        },
        summary: summary.join("\n"),
        exit_code,
    })
}
