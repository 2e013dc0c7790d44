//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Oracles here are written independently of the library code
//! they check.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use bratteli::conjugacy::{check_conjugacy, criterion_check, ConjugacyOutcome, Generation};
use bratteli::format::{self, emit_cert, emit_obd, emit_opm, PremorphismFile};
use bratteli::path::{extreme_path, path_ordinal, vershik_successor, Extreme, PathError};
use bratteli::premorphism::factor_image;
use bratteli::rank_reduction::reduce_rank;
use bratteli::transforms::{diagram_rank, pack, verify_equivalence_certificate};
use bratteli::words::{fine_wilf_reduce, minimal_generating_subset, three_word_basis};
use bratteli::{Letter, OrderedBratteliDiagram, PathPrefix, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

fn load_opm(name: &str) -> PremorphismFile {
    let path = data().join(name);
    let src = format::parse_opm_source(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let b1 = format::parse_obd(&std::fs::read_to_string(data().join(&src.b1)).unwrap()).unwrap();
    let b2 = format::parse_obd(&std::fs::read_to_string(data().join(&src.b2)).unwrap()).unwrap();
    src.resolve(b1, b2).unwrap()
}

fn cli(dir: &Path, args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bratteli"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

/// Copies the shipped data into a scratch directory so CLI runs never write
/// into the repository.
fn scratch() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    for e in std::fs::read_dir(data()).unwrap() {
        let e = e.unwrap();
        std::fs::copy(e.path(), dir.path().join(e.file_name())).unwrap();
    }
    dir
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle_period(w: &[u8], p: usize) -> bool {
    (0..w.len().saturating_sub(p)).all(|i| w[i] == w[i + p])
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn fine_wilf() -> Outcome {
    let mut checks = 0u64;
    let mut bad = Vec::new();
    let mut sets: Vec<Vec<usize>> = Vec::new();
    for a in 1..=12 {
        sets.push(vec![a]);
        for b in a + 1..=12 {
            sets.push(vec![a, b]);
            for c in b + 1..=12 {
                sets.push(vec![a, b, c]);
            }
        }
    }
    for len in 0..=12usize {
        for bits in 0u32..(1 << len) {
            let w: Vec<u8> = (0..len).map(|i| ((bits >> i) & 1) as u8).collect();
            for ps in &sets {
                let g = ps.iter().copied().fold(0, gcd);
                let hypothesis = len + g >= ps.iter().sum::<usize>();
                let all_periods = ps.iter().all(|&p| oracle_period(&w, p));
                if !hypothesis || !all_periods {
                    continue;
                }
                checks += 1;
                match fine_wilf_reduce(&w, ps) {
                    Ok(Some(h)) if h == g && oracle_period(&w, g) => {}
                    other => bad.push(format!("{w:?} {ps:?}: {other:?}")),
                }
            }
        }
    }
    ensure(bad.is_empty(), || {
        format!("{} discrepancies, first {}", bad.len(), bad[0])
    })?;
    Ok(format!("{checks} word/period-set cases, 0 discrepancies"))
}

/// Whether `w` is a concatenation of words from `code`, by dynamic
/// programming over prefixes.
fn generated(w: &[char], code: &[Vec<char>]) -> bool {
    let mut reach = vec![false; w.len() + 1];
    reach[0] = true;
    for i in 0..w.len() {
        if reach[i] {
            for c in code {
                if !c.is_empty() && w[i..].starts_with(c) {
                    reach[i + c.len()] = true;
                }
            }
        }
    }
    reach[w.len()]
}

fn chars(s: &str) -> Vec<char> {
    s.chars().collect()
}

fn basis_sharpness() -> Outcome {
    let pairs: Vec<(Vec<char>, Vec<char>)> = [("xyzwxyzwxy", "zwx"), ("xyzwxy", "zwxyzwx"), ("xy", "zwxyzwxyzwx")]
        .iter()
        .map(|(a, b)| (chars(a), chars(b)))
        .collect();
    let b = three_word_basis(
        &chars("xyzwxyzwxyzwx"),
        &pairs,
        &chars("xyzwxyzwxy"),
        &chars("zwxyzwxyzwx"),
    )
    .map_err(|e| e.to_string())?;
    let got: HashSet<String> = b.words.iter().map(|w| w.iter().collect()).collect();
    let want: HashSet<String> = ["xy", "zw", "x"].iter().map(|s| s.to_string()).collect();
    ensure(got == want, || format!("basis {got:?}"))?;

    let targets: Vec<Vec<char>> = pairs.iter().flat_map(|(s, t)| [s.clone(), t.clone()]).collect();
    // Any word of a generating set that is actually used is a factor of some
    // target, so factors suffice for the exhaustive search.
    let mut factors: Vec<Vec<char>> = Vec::new();
    for t in &targets {
        for i in 0..t.len() {
            for j in i + 1..=t.len() {
                if !factors.contains(&t[i..j].to_vec()) {
                    factors.push(t[i..j].to_vec());
                }
            }
        }
    }
    let mut tried = 0;
    for i in 0..factors.len() {
        for j in i..factors.len() {
            tried += 1;
            let code = [factors[i].clone(), factors[j].clone()];
            if targets.iter().all(|t| generated(t, &code)) {
                return Err(format!("two words suffice: {:?}", code));
            }
        }
    }
    Ok(format!(
        "basis {{xy, zw, x}}; {tried} candidate sets of at most 2 words all fail"
    ))
}

fn basis_sweep() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb45e);
    let mut done = 0;
    let mut largest = 0;
    while done < 1000 {
        let k = rng.gen_range(1..=4u8);
        let h = rng.gen_range(1..=6);
        let u: Vec<char> = (0..h).map(|_| (b'a' + rng.gen_range(0..k)) as char).collect();
        let len = rng.gen_range(1..=20);
        let w: Vec<char> = (0..len).map(|i| u[i % h]).collect();
        let lo = rng.gen_range(0..len);
        let hi = rng.gen_range(lo..=len);
        let pad = |rng: &mut ChaCha8Rng, n: usize| -> Vec<char> {
            (0..n).map(|_| (b'a' + rng.gen_range(0..k)) as char).collect()
        };
        let front = rng.gen_range(0..=30 - hi.min(30));
        let mut s = pad(&mut rng, front);
        s.extend_from_slice(&w[..hi]);
        let mut t = w[lo..].to_vec();
        let extra = rng.gen_range(0..=30 - t.len().min(30));
        t.extend(pad(&mut rng, extra));
        if s.len() > 30 || t.len() > 30 {
            continue;
        }
        let mut cuts: Vec<usize> = (0..=len)
            .filter(|&c| s.ends_with(&w[..c]) && t.starts_with(&w[c..]))
            .collect();
        if cuts.is_empty() {
            continue;
        }
        while cuts.len() > 5 {
            cuts.remove(rng.gen_range(0..cuts.len()));
        }
        let pairs: Vec<(Vec<char>, Vec<char>)> = cuts.iter().map(|&c| (w[..c].to_vec(), w[c..].to_vec())).collect();
        let b = three_word_basis(&w, &pairs, &s, &t).map_err(|e| format!("instance {done}: {e}"))?;
        ensure(b.words.len() <= 3, || {
            format!("instance {done}: {} words", b.words.len())
        })?;
        for (si, ti) in &pairs {
            ensure(generated(si, &b.words) && generated(ti, &b.words), || {
                format!("instance {done}: {si:?}/{ti:?} not generated by {:?}", b.words)
            })?;
        }
        largest = largest.max(cuts.len());
        done += 1;
    }
    Ok(format!(
        "1000 instances, all bases of at most 3 words, up to {largest} cuts"
    ))
}

fn packing() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x9ac4);
    for i in 0..200 {
        let periodic = rng.gen_bool(0.5);
        let d = common::random_diagram(&mut rng, 3, periodic);
        let k = rng.gen_range(1..=d.depth());
        let images = d.morphism(k).unwrap().images().to_vec();
        // Chop every image at random points; the pieces generate all images.
        let mut pieces: Vec<Word> = Vec::new();
        for img in &images {
            let mut start = 0;
            while start < img.len() {
                let end = rng.gen_range(start + 1..=img.len());
                if !pieces.contains(&img[start..end].to_vec()) {
                    pieces.push(img[start..end].to_vec());
                }
                start = end;
            }
        }
        let keep = minimal_generating_subset(&pieces, &images).map_err(|e| format!("instance {i}: {e}"))?;
        let code: Vec<Word> = keep.iter().map(|&j| pieces[j].clone()).collect();
        let p = pack(&d, k, &code).map_err(|e| format!("instance {i}: {e}"))?;
        let lower = p.morphism(k).unwrap();
        let upper = p.morphism(k + 1).unwrap();
        for v in 0..images.len() {
            let expanded: Word = upper.image(v).iter().flat_map(|&c| lower.image(c).to_vec()).collect();
            ensure(expanded == images[v], || format!("instance {i}: letter {v} differs"))?;
        }
    }
    Ok("200 instances, composite equals the original morphism letterwise".into())
}

fn sturmian() -> Outcome {
    let pf = load_opm("sturmian.opm");
    let f = &pf.premorphism;
    let report = f.validate();
    ensure(report.is_valid(), || format!("violations: {:?}", report.violations))?;
    ensure(report.checked >= 3, || {
        format!("only {} levels checked", report.checked)
    })?;
    let b2 = f.b2().alphabet(2).unwrap();
    let y = b2.letter("y").ok_or("no y")?;
    let v1 = f.b1().alphabet(1).unwrap();
    // Both sides by hand: τ_1 applied letterwise to σ^{B2}_2(y), and
    // σ^{B1}_2 applied letterwise to τ_2(y).
    let tau1 = f.tau(1).unwrap();
    let lhs: Word = f
        .b2()
        .morphism(2)
        .unwrap()
        .image(y)
        .iter()
        .flat_map(|&x| tau1.image(x).to_vec())
        .collect();
    let sigma2 = f.b1().morphism(2).unwrap();
    let rhs: Word = f
        .tau(2)
        .unwrap()
        .image(y)
        .iter()
        .flat_map(|&u| sigma2.image(u).to_vec())
        .collect();
    let want = "u u u u v u";
    ensure(v1.render(&lhs) == want && v1.render(&rhs) == want, || {
        format!("y at n = 1: {} vs {}", v1.render(&lhs), v1.render(&rhs))
    })?;
    let dir = scratch();
    let (code, out) = cli(dir.path(), &["premorphism-check", "sturmian.opm", "--level", "1"]);
    let line = format!("n=1 letter=y tau_side={want} sigma_side={want} equal=true");
    ensure(code == 0 && out.lines().any(|l| l.ends_with(&line)), || {
        format!("premorphism-check exit {code}")
    })?;
    Ok(format!("valid on {} levels; y: {want} on both sides", report.checked))
}

fn chacon_conjugacy() -> Outcome {
    let pf = load_opm("chacon.opm");
    let f = &pf.premorphism;
    let r = criterion_check(f, 3).map_err(|e| e.to_string())?;
    for c in &r.levels {
        let n = c.n;
        ensure(c.independence.is_independent(), || format!("D_{n} dependent"))?;
        ensure(c.duplicate.is_none(), || format!("duplicate image at {n}"))?;
        let first = c.attempts.first().ok_or("no attempts")?;
        ensure(
            first.0 == n + 1 && matches!(first.1, Generation::Ungenerated { .. }),
            || format!("level {n}: first attempt {first:?}"),
        )?;
        ensure(c.ell() == Some(n + 2), || format!("level {n}: ell {:?}", c.ell()))?;
    }
    let ConjugacyOutcome::Certified(c) = check_conjugacy(f, 3).map_err(|e| e.to_string())? else {
        return Err("not certified".into());
    };
    let g = &c.bridges[0];
    let w1 = c.telescoped.b2().alphabet(1).unwrap();
    let v2 = c.telescoped.b1().alphabet(2).unwrap();
    let bridge: Vec<String> = (0..g.morphism.domain_len())
        .map(|a| format!("{}->{}", v2.name(a), w1.render_compact(g.morphism.image(a))))
        .collect();
    ensure(bridge == ["x->uv", "y->w"], || format!("bridge {bridge:?}"))?;
    let dir = scratch();
    let (code, _) = cli(
        dir.path(),
        &["conjugacy", "chacon.opm", "--max-depth", "3", "--out", "out.cert"],
    );
    ensure(code == 0, || format!("conjugacy exit {code}"))?;
    let (code, _) = cli(dir.path(), &["verify-cert", "out.cert"]);
    ensure(code == 0, || format!("verify-cert exit {code}"))?;
    Ok("ell = n+2 with n+1 failing on y; D_n independent; bridge x->uv, y->w; certificate verifies, exit 0".into())
}

fn rank_bound() -> Outcome {
    let pf = load_opm("chacon.opm");
    let f = &pf.premorphism;
    let r = reduce_rank(f, 8).map_err(|e| e.to_string())?;
    let rank = diagram_rank(&r.reduced);
    ensure(rank <= 9, || format!("rank {rank}"))?;
    let v =
        verify_equivalence_certificate(&r.certificate("b1", "out"), f.b1(), &r.reduced).map_err(|e| e.to_string())?;
    ensure(v.is_verified(), || format!("{v:?}"))?;
    let dir = scratch();
    let (code, _) = cli(dir.path(), &["rank-reduce", "chacon.opm", "--out", "red.cert"]);
    ensure(code == 0, || format!("rank-reduce exit {code}"))?;
    let (code, _) = cli(dir.path(), &["verify-cert", "red.cert"]);
    ensure(code == 0, || format!("verify-cert exit {code}"))?;
    let (_, out) = cli(dir.path(), &["rank", "red.obd"]);
    ensure(out.lines().next() == Some(&format!("rank: {rank}")[..]), || out.clone())?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x7a4c);
    let mut worst = 0.0f64;
    for i in 0..100 {
        let g = common::stationary_premorphism(&mut rng, 3, 3);
        let r = reduce_rank(&g, 8).map_err(|e| format!("instance {i}: {e}"))?;
        let (got, bound) = (diagram_rank(&r.reduced), 3 * diagram_rank(g.b2()));
        ensure(got <= bound, || format!("instance {i}: rank {got} > {bound}"))?;
        let v = verify_equivalence_certificate(&r.certificate("b1", "out"), g.b1(), &r.reduced)
            .map_err(|e| format!("instance {i}: {e}"))?;
        ensure(v.is_verified(), || format!("instance {i}: {v:?}"))?;
        worst = worst.max(got as f64 / bound as f64);
    }
    Ok(format!(
        "chacon reduced to rank {rank} <= 9, certificate verifies; 100 stationary instances within 3 rank(B2) (max ratio {worst:.2})"
    ))
}

/// Paths into `v` at level `n` in ordinal order, deepest edge dominant.
fn oracle_paths(d: &OrderedBratteliDiagram, n: usize, v: Letter) -> Vec<Vec<(Letter, usize)>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (o, &a) in d.morphism(n).unwrap().image(v).iter().enumerate() {
        for mut p in oracle_paths(d, n - 1, a) {
            p.push((v, o));
            out.push(p);
        }
    }
    out
}

fn records(p: &PathPrefix) -> Vec<(Letter, usize)> {
    p.records().collect()
}

fn vershik_coherence() -> Outcome {
    let pf = load_opm("chacon.opm");
    let f = &pf.premorphism;
    let b1 = f.b1();
    let mut visited = 0;
    for k in 1..=4 {
        for v in 0..b1.level_size(k).unwrap() {
            let want = oracle_paths(b1, k, v);
            let mut p = extreme_path(b1, k, Extreme::Min, Some(v)).unwrap();
            for (j, q) in want.iter().enumerate() {
                ensure(&records(&p) == q, || format!("depth {k}: step {j} differs"))?;
                let ord: u64 = path_ordinal(b1, &p).unwrap();
                ensure(ord == j as u64, || format!("depth {k}: ordinal {ord} at step {j}"))?;
                visited += 1;
                if j + 1 < want.len() {
                    p = vershik_successor(b1, &p).unwrap();
                }
            }
            ensure(matches!(vershik_successor(b1, &p), Err(PathError::AllMax(_))), || {
                format!("depth {k}: successor past the maximal path")
            })?;
        }
    }
    let mut mapped = 0;
    for n in 1..=4 {
        let b2 = f.b2();
        let depth = f.f(n).unwrap();
        let tau = f.tau(n).unwrap();
        for w in 0..b2.level_size(depth).unwrap() {
            let expected: Vec<Vec<(Letter, usize)>> =
                tau.image(w).iter().flat_map(|&v| oracle_paths(b1, n, v)).collect();
            let sources = oracle_paths(b2, depth, w);
            ensure(sources.len() == expected.len(), || {
                format!("level {n}: path counts differ")
            })?;
            for (j, src) in sources.iter().enumerate() {
                let p = PathPrefix::new(b2, src).unwrap();
                let img = factor_image::<u64>(f, &p, n).map_err(|e| e.to_string())?;
                ensure(records(&img) == expected[j], || format!("level {n}: image {j} differs"))?;
                mapped += 1;
            }
        }
    }
    Ok(format!(
        "{visited} successor steps and {mapped} factor images match enumeration"
    ))
}

fn round_trip() -> Outcome {
    let mut checked = Vec::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(data()).unwrap().map(|e| e.unwrap().path()).collect();
    entries.sort();
    for path in entries {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(&path).unwrap();
        let emitted = match path.extension().and_then(|e| e.to_str()) {
            Some("obd") => {
                let d = format::parse_obd(&text).map_err(|e| format!("{name}: {e}"))?;
                let again = emit_obd(&d);
                ensure(format::parse_obd(&again).unwrap() == d, || {
                    format!("{name}: value changed")
                })?;
                again
            }
            Some("opm") => {
                let pf = load_opm(&name);
                let again = emit_opm(&pf);
                let src = format::parse_opm_source(&again).unwrap();
                let back = src
                    .resolve(pf.premorphism.b1().clone(), pf.premorphism.b2().clone())
                    .unwrap();
                ensure(back == pf, || format!("{name}: value changed"))?;
                again
            }
            Some("cert") => {
                let c = format::parse_cert(&text).map_err(|e| format!("{name}: {e}"))?;
                let again = emit_cert(&c);
                ensure(format::parse_cert(&again).unwrap() == c, || {
                    format!("{name}: value changed")
                })?;
                again
            }
            _ => continue,
        };
        ensure(emitted == text, || format!("{name}: emitted bytes differ"))?;
        checked.push(name);
    }
    ensure(checked.iter().any(|n| n.ends_with(".cert")), || {
        "no certificate shipped".into()
    })?;
    Ok(format!("{} files byte-exact: {}", checked.len(), checked.join(" ")))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("fine-wilf oracle equivalence", fine_wilf, 60),
        ("three-word basis sharpness", basis_sharpness, 5),
        ("three-word basis sweep", basis_sweep, 60),
        ("packing identity", packing, 30),
        ("sturmian premorphism", sturmian, 1),
        ("chacon conjugacy", chacon_conjugacy, 5),
        ("rank bound", rank_bound, 300),
        ("vershik and ordinal coherence", vershik_coherence, 30),
        ("round trip of shipped files", round_trip, 5),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*limit) => {
                Err(format!("{msg}; took {elapsed:.2?}, limit {limit}s"))
            }
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {} PASS {name}: {msg} ({elapsed:.2?})", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {msg} ({elapsed:.2?})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
