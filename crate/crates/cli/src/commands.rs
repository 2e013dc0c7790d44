use std::path::{Path, PathBuf};

use bratteli::conjugacy::{check_conjugacy, ConjugacyError, ConjugacyOutcome, CriterionReport, Generation, Verdict};
use bratteli::format::{emit_cert, emit_obd};
use bratteli::path::{extreme_path, path_from_ordinal, path_ordinal, vershik_successor, Extreme, PathError};
use bratteli::premorphism::factor_image;
use bratteli::rank_reduction::{reduce_rank, RankError};
use bratteli::transforms::{diagram_rank, pack, telescope, verify_equivalence_certificate, CertVerdict};
use bratteli::words::Independence;
use bratteli::{Alphabet, IndexSeq, Letter, Morphism, OrderedBratteliDiagram, PathPrefix};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::files::{self, Input, InputError, Kind};
use crate::report::{self, Report};
use crate::{Command, Status};

pub fn run(command: Command, json: bool) -> Input<Status> {
    let mut r = Report::new();
    let status = match command {
        Command::Validate { file } => validate(&file, &mut r)?,
        Command::Telescope { file, spec, out } => {
            let d = files::load_diagram(&file)?;
            let spec = IndexSeq::parse(&spec)?;
            return emit_diagram(&telescope(&d, &spec)?, out.as_deref(), json);
        }
        Command::Pack {
            file,
            level,
            words,
            out,
        } => {
            let d = files::load_diagram(&file)?;
            if level == 0 {
                return Err(InputError("--level must be at least 1".into()));
            }
            let below = d.alphabet(level - 1)?;
            let code = words
                .iter()
                .map(|w| {
                    below
                        .parse_word(w)
                        .map_err(|t| InputError(format!("unknown letter {t:?}")))
                })
                .collect::<Input<Vec<_>>>()?;
            return emit_diagram(&pack(&d, level, &code)?, out.as_deref(), json);
        }
        Command::Vershik {
            file,
            depth,
            steps,
            letter,
            seed,
        } => vershik(&file, depth, steps, letter.as_deref(), seed, &mut r)?,
        Command::Word {
            file,
            level,
            depth,
            letter,
            length,
        } => {
            let d = files::load_diagram(&file)?;
            if level > depth {
                return Err(InputError("--level must not exceed --depth".into()));
            }
            let v = letter_of(d.alphabet(depth)?, &letter)?;
            let w = d.image_prefix(level, depth, v, length)?;
            r.set("from", depth).set("to", level).set("letter", letter);
            r.set("length", w.len()).set("word", d.alphabet(level)?.render(&w));
            Status::Success
        }
        Command::Matrix { file, level, depth } => matrix(&file, level, depth, &mut r)?,
        Command::Rank { file } => {
            let d = files::load_diagram(&file)?;
            let sizes: Vec<Value> = (1..=d.depth())
                .map(|n| json!({"level": n, "size": d.represented_levels()[n].len()}))
                .collect();
            r.set("rank", diagram_rank(&d)).set("levels", sizes);
            Status::Success
        }
        Command::PremorphismCheck { file, level } => premorphism_check(&file, level, &mut r)?,
        Command::FactorMap {
            file,
            level,
            letter,
            steps,
            seed,
        } => factor_map(&file, level, letter.as_deref(), steps, seed, &mut r)?,
        Command::RankReduce { file, max_depth, out } => rank_reduce(&file, max_depth as usize, out, &mut r)?,
        Command::Conjugacy { file, max_depth, out } => conjugacy(&file, max_depth as usize, out, &mut r)?,
        Command::VerifyCert { file } => verify_cert(&file, &mut r)?,
    };
    r.print(json);
    Ok(status)
}

fn letter_of(a: &Alphabet, name: &str) -> Input<Letter> {
    a.letter(name)
        .ok_or_else(|| InputError(format!("no letter {name:?} (letters: {})", a.names().join(" "))))
}

fn tail_text(d: &OrderedBratteliDiagram) -> Value {
    match d.tail() {
        Some(t) => format!("from {} period {}", t.start, t.period).into(),
        None => Value::Null,
    }
}

/// Diagrams are data, so without `--out` they go to stdout.
fn emit_diagram(d: &OrderedBratteliDiagram, out: Option<&Path>, json: bool) -> Input<Status> {
    let text = emit_obd(d);
    let mut r = Report::new();
    match out {
        Some(path) => {
            files::write(path, &text)?;
            r.set("diagram", path.display().to_string());
        }
        None if json => {
            r.set("diagram", text);
        }
        None => {
            report::emit(&text);
            return Ok(Status::Success);
        }
    }
    r.set("depth", d.depth())
        .set("tail", tail_text(d))
        .set("rank", diagram_rank(d));
    r.print(json);
    Ok(Status::Success)
}

fn validate(file: &Path, r: &mut Report) -> Input<Status> {
    let text = files::read(file)?;
    let mut violations: Vec<String> = Vec::new();
    match files::sniff(&text) {
        Some(Kind::Diagram) => {
            let d = files::load_diagram(file)?;
            violations.extend(d.validate().iter().map(ToString::to_string));
            r.set("kind", "diagram")
                .set("depth", d.depth())
                .set("tail", tail_text(&d))
                .set("rank", diagram_rank(&d));
        }
        Some(Kind::Premorphism) => {
            let pf = files::load_premorphism(file)?;
            let f = &pf.premorphism;
            violations.extend(f.b1().validate().iter().map(|v| format!("B1 {v}")));
            violations.extend(f.b2().validate().iter().map(|v| format!("B2 {v}")));
            let report = f.validate();
            violations.extend(report.violations.iter().map(ToString::to_string));
            r.set("kind", "premorphism")
                .set("checked_levels", report.checked)
                .set("complete", report.complete);
        }
        Some(Kind::Certificate) => {
            return Err(InputError("certificates are checked with verify-cert".into()));
        }
        None => return Err(InputError(format!("{}: unknown file header", file.display()))),
    }
    let valid = violations.is_empty();
    r.set("valid", valid).set("violations", violations);
    Ok(if valid { Status::Success } else { Status::Refuted })
}

fn random_ordinal(rng: &mut ChaCha8Rng, count: &BigUint) -> BigUint {
    match u64::try_from(count) {
        Ok(c) => BigUint::from(rng.gen_range(0..c)),
        Err(_) => BigUint::from(rng.gen::<u64>()),
    }
}

fn path_entry(d: &OrderedBratteliDiagram, p: &PathPrefix) -> Input<Value> {
    let ordinal: BigUint = path_ordinal(d, p)?;
    let range = match p.range() {
        Some(v) => d.alphabet(p.depth())?.name(v).to_string(),
        None => "@".into(),
    };
    Ok(json!({"path": p.render(d), "range": range, "ordinal": ordinal.to_string()}))
}

fn vershik(
    file: &Path,
    depth: usize,
    steps: usize,
    letter: Option<&str>,
    seed: Option<u64>,
    r: &mut Report,
) -> Input<Status> {
    let d = files::load_diagram(file)?;
    let size = d.level_size(depth)?;
    let mut p = match (seed, letter) {
        (Some(seed), _) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let v = match letter {
                Some(name) => letter_of(d.alphabet(depth)?, name)?,
                None => rng.gen_range(0..size),
            };
            let count: BigUint = d.path_count(depth, v)?;
            path_from_ordinal(&d, depth, v, &random_ordinal(&mut rng, &count))?
        }
        (None, Some(name)) => {
            let v = letter_of(d.alphabet(depth)?, name)?;
            extreme_path(&d, depth, Extreme::Min, Some(v))?
        }
        (None, None) => extreme_path(&d, depth, Extreme::Min, None)?,
    };
    let mut orbit = vec![path_entry(&d, &p)?];
    let mut end = "steps exhausted";
    for _ in 0..steps {
        match vershik_successor(&d, &p) {
            Ok(next) => p = next,
            Err(PathError::AllMax(_)) => {
                end = "all edges maximal";
                break;
            }
            Err(e) => return Err(e.into()),
        }
        orbit.push(path_entry(&d, &p)?);
    }
    r.set("depth", depth).set("orbit", orbit).set("end", end);
    Ok(Status::Success)
}

fn matrix(file: &Path, level: usize, depth: Option<usize>, r: &mut Report) -> Input<Status> {
    let d = files::load_diagram(file)?;
    let (top, bottom, m) = match depth {
        Some(depth) if depth >= level => (depth, level, d.product_matrix::<BigUint>(level, depth)?),
        Some(_) => return Err(InputError("--depth must not be below --level".into())),
        None if level == 0 => return Err(InputError("there is no incidence matrix at level 0".into())),
        None => (level, level - 1, d.incidence_matrix::<BigUint>(level)?),
    };
    let rows_alpha = d.alphabet(top)?;
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let entries: Vec<String> = m.row(i).iter().map(ToString::to_string).collect();
            format!("{}: {}", rows_alpha.name(i), entries.join(" "))
        })
        .collect();
    r.set("rows_level", top)
        .set("columns_level", bottom)
        .set("columns", d.alphabet(bottom)?.names().join(" "))
        .set("rows", rows);
    Ok(Status::Success)
}

fn premorphism_check(file: &Path, level: Option<usize>, r: &mut Report) -> Input<Status> {
    let pf = files::load_premorphism(file)?;
    let f = &pf.premorphism;
    let report = f.validate();
    let levels: Vec<usize> = match level {
        Some(n) => vec![n],
        None => (0..report.checked).collect(),
    };
    let mut squares = Vec::new();
    for n in levels {
        let (lhs, rhs) = (f.tau_side(n)?, f.sigma_side(n)?);
        let domain = f.b2().alphabet(f.f(n + 1)?)?;
        let codomain = f.b1().alphabet(n)?;
        for w in 0..lhs.domain_len() {
            squares.push(json!({
                "n": n,
                "letter": domain.name(w),
                "tau_side": codomain.render(lhs.image(w)),
                "sigma_side": codomain.render(rhs.image(w)),
                "equal": lhs.image(w) == rhs.image(w),
            }));
        }
    }
    let violations: Vec<String> = report.violations.iter().map(ToString::to_string).collect();
    let valid = violations.is_empty();
    r.set("squares", squares)
        .set("checked_levels", report.checked)
        .set("complete", report.complete)
        .set("valid", valid)
        .set("violations", violations);
    Ok(if valid { Status::Success } else { Status::Refuted })
}

fn factor_map(
    file: &Path,
    level: usize,
    letter: Option<&str>,
    steps: usize,
    seed: Option<u64>,
    r: &mut Report,
) -> Input<Status> {
    let pf = files::load_premorphism(file)?;
    let f = &pf.premorphism;
    let depth = f.f(level)?;
    let b2 = f.b2();
    let letters: Vec<Letter> = match letter {
        Some(name) => vec![letter_of(b2.alphabet(depth)?, name)?],
        None => (0..b2.level_size(depth)?).collect(),
    };
    let counts: Vec<BigUint> = letters
        .iter()
        .map(|&w| b2.path_count(depth, w))
        .collect::<Result<_, _>>()?;
    let mut paths = Vec::new();
    match seed {
        Some(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..steps {
                let i = rng.gen_range(0..letters.len());
                let j = random_ordinal(&mut rng, &counts[i]);
                paths.push(path_from_ordinal(b2, depth, letters[i], &j)?);
            }
        }
        None => {
            'outer: for (i, &w) in letters.iter().enumerate() {
                let mut j = BigUint::from(0u32);
                while j < counts[i] {
                    if paths.len() == steps {
                        break 'outer;
                    }
                    paths.push(path_from_ordinal(b2, depth, w, &j)?);
                    j += 1u32;
                }
            }
        }
    }
    let mut images = Vec::new();
    for p in &paths {
        let image = factor_image::<BigUint>(f, p, level)?;
        let source = path_entry(b2, p)?;
        let target = path_entry(f.b1(), &image)?;
        images.push(json!({"b2_path": source["path"], "b2_ordinal": source["ordinal"],
                           "b1_path": target["path"], "b1_ordinal": target["ordinal"]}));
    }
    r.set("level", level).set("b2_depth", depth).set("images", images);
    Ok(Status::Success)
}

fn render_map(m: &Morphism, domain: &Alphabet, codomain: &Alphabet) -> String {
    (0..m.domain_len())
        .map(|a| format!("{} = {}", domain.name(a), codomain.render(m.image(a))))
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn rank_reduce(file: &Path, max_depth: usize, out: Option<PathBuf>, r: &mut Report) -> Input<Status> {
    let pf = files::load_premorphism(file)?;
    let f = &pf.premorphism;
    let result = match reduce_rank(f, max_depth) {
        Ok(result) => result,
        Err(e) => {
            let status = match e {
                RankError::Invalid(_) | RankError::AssumptionDrift(_) | RankError::Unsound(_) => Status::Refuted,
                RankError::Inconclusive { .. } | RankError::TooLarge { .. } => Status::Inconclusive,
                _ => return Err(e.into()),
            };
            r.set("result", "failed").set("reason", e.to_string());
            return Ok(status);
        }
    };
    let cert_path = out.unwrap_or_else(|| files::sibling(file, "reduced.cert"));
    let obd_path = cert_path.with_extension("obd");
    files::write(&obd_path, &emit_obd(&result.reduced))?;
    let b1_path = files::relative_to(file, &pf.b1);
    let cert = result.certificate(
        &files::reference(&cert_path, &b1_path)?,
        &files::reference(&cert_path, &obd_path)?,
    );
    files::write(&cert_path, &emit_cert(&cert))?;
    let rank_b2 = diagram_rank(f.b2());
    r.set("result", if result.is_rank_one() { "rank one" } else { "reduced" })
        .set("rank_b1", diagram_rank(f.b1()))
        .set("rank_b2", rank_b2)
        .set("rank_reduced", diagram_rank(&result.reduced))
        .set("bound", 3 * rank_b2)
        .set("chain", result.chain.to_string())
        .set("diagram", obd_path.display().to_string())
        .set("certificate", cert_path.display().to_string());
    Ok(Status::Success)
}

fn criterion_levels(report: &CriterionReport) -> Vec<Value> {
    report
        .levels
        .iter()
        .map(|c| {
            let attempts: Vec<String> = c
                .attempts
                .iter()
                .map(|(l, g)| match g {
                    Generation::Generated => format!("{l}: generated"),
                    Generation::Ungenerated { letter } => format!("{l}: {letter} not generated"),
                    Generation::NotMinimal { word } => format!("{l}: {word} not needed"),
                })
                .collect();
            let independence = match &c.independence {
                Independence::Independent => "independent".to_string(),
                Independence::Dependent { left, right, .. } => format!("dependent ({left:?} vs {right:?})"),
            };
            json!({
                "n": c.n,
                "ell": c.ell(),
                "independence": independence,
                "duplicate": c.duplicate.as_ref().map(|(a, b)| format!("{a} {b}")),
                "attempts": attempts.join(", "),
            })
        })
        .collect()
}

fn conjugacy(file: &Path, max_depth: usize, out: Option<PathBuf>, r: &mut Report) -> Input<Status> {
    let pf = files::load_premorphism(file)?;
    let f = &pf.premorphism;
    let outcome = match check_conjugacy(f, max_depth) {
        Ok(o) => o,
        Err(
            e @ (ConjugacyError::Invalid(_) | ConjugacyError::PostconditionFailure { .. } | ConjugacyError::Unsound(_)),
        ) => {
            r.set("verdict", "failed").set("reason", e.to_string());
            return Ok(Status::Refuted);
        }
        Err(e) => return Err(e.into()),
    };
    let c = match outcome {
        ConjugacyOutcome::Certified(c) => c,
        ConjugacyOutcome::NotCertified(report) => {
            r.set("verdict", report.verdict.to_string())
                .set("levels", criterion_levels(&report));
            return Ok(match report.verdict {
                Verdict::Refuted => Status::Refuted,
                _ => Status::Inconclusive,
            });
        }
    };
    let h = &c.telescoped;
    let mut bridges = Vec::new();
    for g in &c.bridges {
        let domain = h.b1().alphabet(g.level + 1)?;
        let codomain = h.b2().alphabet(g.level)?;
        bridges.push(format!("G_{}: {}", g.level, render_map(&g.morphism, domain, codomain)));
    }
    let cert_path = out.unwrap_or_else(|| files::sibling(file, "conj.cert"));
    let mut cert = c.certificate.clone();
    cert.odd_ref = files::reference(&cert_path, &files::relative_to(file, &pf.b1))?;
    cert.even_ref = files::reference(&cert_path, &files::relative_to(file, &pf.b2))?;
    files::write(&cert_path, &emit_cert(&cert))?;
    r.set("verdict", c.report.verdict.to_string())
        .set("levels", criterion_levels(&c.report))
        .set("chain", c.chain.to_string())
        .set("bridges", bridges)
        .set("certificate", cert_path.display().to_string());
    Ok(Status::Success)
}

fn verify_cert(file: &Path, r: &mut Report) -> Input<Status> {
    let cert = files::load_certificate(file)?;
    let odd = files::load_diagram(&files::relative_to(file, &cert.odd_ref))?;
    let even = files::load_diagram(&files::relative_to(file, &cert.even_ref))?;
    match verify_equivalence_certificate(&cert, &odd, &even)? {
        CertVerdict::Verified { through, complete } => {
            r.set("verdict", "verified");
            if complete {
                r.set("levels", "all");
            } else {
                r.set("levels", format!("through {through}"));
            }
            Ok(Status::Success)
        }
        CertVerdict::Counterexample { side, mismatch } => {
            r.set("verdict", "counterexample")
                .set("side", side.to_string())
                .set("mismatch", mismatch.to_string());
            Ok(Status::Refuted)
        }
    }
}
