//! Line-oriented text formats: `.obd` diagrams, `.opm` premorphisms and
//! `.cert` equivalence certificates.
//!
//! Every format has a canonical emission; parsing canonical text and
//! emitting again reproduces it byte for byte. `#` starts a comment and
//! blank lines are ignored.

use std::collections::BTreeMap;

use crate::alphabet::{Alphabet, Word};
use crate::diagram::{DiagramError, OrderedBratteliDiagram, Tail};
use crate::morphism::Morphism;
use crate::periodic::IndexSeq;
use crate::premorphism::{Premorphism, PremorphismError};
use crate::transforms::EquivalenceCertificate;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `{0}` header")]
    Header(&'static str),
    #[error("missing `{0}`")]
    Missing(String),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Premorphism(#[from] PremorphismError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn number(line: usize, tok: &str) -> Result<usize, FormatError> {
    tok.trim()
        .parse()
        .map_err(|_| syntax(line, format!("expected a number, found {tok:?}")))
}

fn check_header<'a>(it: &mut impl Iterator<Item = (usize, &'a str)>, name: &'static str) -> Result<(), FormatError> {
    match it.next() {
        Some((_, l)) if l.split_whitespace().eq([name, "1"]) => Ok(()),
        Some((line, l)) if l.split_whitespace().next() == Some(name) => {
            Err(syntax(line, format!("unsupported version in {l:?}")))
        }
        _ => Err(FormatError::Header(name)),
    }
}

/// `key = value` with the key compared after whitespace normalisation.
fn key_value(l: &str) -> Option<(String, &str)> {
    let (k, v) = l.split_once('=')?;
    Some((k.split_whitespace().collect::<Vec<_>>().join(" "), v.trim()))
}

/// Clauses of `<n>: <letter> = <letters…> ; …`, still unresolved.
type RawMap = (usize, Vec<(String, Vec<String>)>);

fn parse_map(line: usize, rest: &str) -> Result<RawMap, FormatError> {
    let (n, body) = rest.split_once(':').ok_or_else(|| syntax(line, "expected `<n>:`"))?;
    let n = number(line, n)?;
    let mut clauses = Vec::new();
    for clause in body.split(';') {
        if clause.trim().is_empty() {
            continue;
        }
        let (name, image) = clause
            .split_once('=')
            .ok_or_else(|| syntax(line, format!("expected `<letter> = <letters>` in {:?}", clause.trim())))?;
        let name = name.trim();
        if name.split_whitespace().count() != 1 {
            return Err(syntax(line, format!("bad letter {name:?}")));
        }
        clauses.push((name.to_string(), image.split_whitespace().map(str::to_string).collect()));
    }
    Ok((n, clauses))
}

/// Resolves clauses into one image per letter of `domain`, in order.
fn resolve_map(
    line: usize,
    what: &str,
    clauses: &[(String, Vec<String>)],
    domain: &Alphabet,
    codomain: &Alphabet,
) -> Result<Morphism, FormatError> {
    let mut images: Vec<Option<Word>> = vec![None; domain.len()];
    for (name, image) in clauses {
        let a = domain
            .letter(name)
            .ok_or_else(|| syntax(line, format!("{what}: unknown letter {name:?}")))?;
        if images[a].is_some() {
            return Err(syntax(line, format!("{what}: letter {name:?} defined twice")));
        }
        let word = codomain
            .parse_word(&image.join(" "))
            .map_err(|tok| syntax(line, format!("{what}: unknown image letter {tok:?}")))?;
        images[a] = Some(word);
    }
    let images = images
        .into_iter()
        .enumerate()
        .map(|(a, img)| img.ok_or_else(|| syntax(line, format!("{what}: no image for {:?}", domain.name(a)))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Morphism::new(images))
}

fn parse_tail(line: usize, rest: &str) -> Result<Tail, FormatError> {
    let toks: Vec<&str> = rest.split_whitespace().collect();
    match toks.as_slice() {
        ["from", s, "period", p] => Ok(Tail {
            start: number(line, s)?,
            period: number(line, p)?,
        }),
        _ => Err(syntax(line, "expected `tail from <s> period <p>`")),
    }
}

fn emit_tail(out: &mut String, t: Option<Tail>) {
    if let Some(t) = t {
        out.push_str(&format!("tail from {} period {}\n", t.start, t.period));
    }
}

fn emit_map(out: &mut String, keyword: &str, n: usize, m: &Morphism, domain: &Alphabet, codomain: &Alphabet) {
    let clauses: Vec<String> = (0..m.domain_len())
        .map(|a| {
            let img = codomain.render(m.image(a));
            if img.is_empty() {
                format!("{} =", domain.name(a))
            } else {
                format!("{} = {img}", domain.name(a))
            }
        })
        .collect();
    out.push_str(&format!("{keyword} {n}: {}\n", clauses.join(" ; ")));
}

/// Collects `level`, `morphism` and `tail` lines of a diagram body.
#[derive(Default)]
struct DiagramBody {
    levels: BTreeMap<usize, (usize, Alphabet)>,
    morphisms: BTreeMap<usize, (usize, Vec<(String, Vec<String>)>)>,
    tail: Option<Tail>,
}

impl DiagramBody {
    /// Returns false when the line is not a diagram line.
    fn accept(&mut self, line: usize, l: &str) -> Result<bool, FormatError> {
        let (word, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match word {
            "level" => {
                let (n, names) = rest
                    .split_once('=')
                    .ok_or_else(|| syntax(line, "expected `level <n> = <letters>`"))?;
                let n = number(line, n)?;
                if n == 0 {
                    return Err(syntax(line, "level 0 is implicit"));
                }
                let alphabet = Alphabet::new(names.split_whitespace()).map_err(|e| syntax(line, e.to_string()))?;
                if self.levels.insert(n, (line, alphabet)).is_some() {
                    return Err(syntax(line, format!("level {n} declared twice")));
                }
            }
            "morphism" => {
                let (n, clauses) = parse_map(line, rest)?;
                if self.morphisms.insert(n, (line, clauses)).is_some() {
                    return Err(syntax(line, format!("morphism {n} declared twice")));
                }
            }
            "tail" => {
                if self.tail.is_some() {
                    return Err(syntax(line, "tail declared twice"));
                }
                self.tail = Some(parse_tail(line, rest)?);
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn finish(self) -> Result<OrderedBratteliDiagram, FormatError> {
        let mut levels = vec![Alphabet::root()];
        for (i, (&n, (line, a))) in self.levels.iter().enumerate() {
            if n != i + 1 {
                return Err(syntax(*line, format!("level {} is missing", i + 1)));
            }
            levels.push(a.clone());
        }
        let mut morphisms = Vec::new();
        for (i, (&n, (line, clauses))) in self.morphisms.iter().enumerate() {
            if n != i + 1 {
                return Err(syntax(*line, format!("morphism {} is missing", i + 1)));
            }
            if n >= levels.len() {
                return Err(syntax(*line, format!("morphism {n} has no level {n}")));
            }
            let what = format!("morphism {n}");
            morphisms.push(resolve_map(*line, &what, clauses, &levels[n], &levels[n - 1])?);
        }
        if morphisms.len() + 1 < levels.len() {
            return Err(FormatError::Missing(format!("morphism {}", morphisms.len() + 1)));
        }
        Ok(OrderedBratteliDiagram::new(levels, morphisms, self.tail)?)
    }
}

fn emit_body(out: &mut String, d: &OrderedBratteliDiagram) {
    let levels = d.represented_levels();
    for (i, m) in d.represented_morphisms().iter().enumerate() {
        let n = i + 1;
        out.push_str(&format!("level {n} = {}\n", levels[n].names().join(" ")));
        emit_map(out, "morphism", n, m, &levels[n], &levels[n - 1]);
    }
    emit_tail(out, d.tail());
}

pub fn parse_obd(text: &str) -> Result<OrderedBratteliDiagram, FormatError> {
    let mut it = lines(text);
    check_header(&mut it, "obd")?;
    let mut body = DiagramBody::default();
    for (line, l) in it {
        if !body.accept(line, l)? {
            return Err(syntax(line, format!("unexpected {l:?}")));
        }
    }
    body.finish()
}

pub fn emit_obd(d: &OrderedBratteliDiagram) -> String {
    let mut out = String::from("obd 1\n");
    emit_body(&mut out, d);
    out
}

/// Unresolved `.opm` contents: the two diagram paths are known before the
/// diagrams are loaded.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OpmSource {
    pub b1: String,
    pub b2: String,
    scale: IndexSeq,
    taus: Vec<(usize, RawMap)>,
    tail: Option<Tail>,
}

/// A premorphism together with the paths it was read from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PremorphismFile {
    pub b1: String,
    pub b2: String,
    pub premorphism: Premorphism,
}

fn parse_scale(line: usize, v: &str) -> Result<IndexSeq, FormatError> {
    if v == "identity" {
        return Ok(IndexSeq::identity());
    }
    IndexSeq::parse(&format!("0 {v}")).map_err(|e| syntax(line, format!("scale: {e}")))
}

fn emit_scale(s: &IndexSeq) -> String {
    if s.is_identity() {
        return "identity".into();
    }
    let full = s.to_string();
    full.strip_prefix("0 ").unwrap_or(&full).to_string()
}

pub fn parse_opm_source(text: &str) -> Result<OpmSource, FormatError> {
    let mut it = lines(text);
    check_header(&mut it, "opm")?;
    let (mut b1, mut b2, mut scale, mut tail) = (None, None, None, None);
    let mut taus: BTreeMap<usize, (usize, RawMap)> = BTreeMap::new();
    for (line, l) in it {
        let (word, rest) = l.split_once(char::is_whitespace).unwrap_or((l, ""));
        match word {
            "tau" => {
                let map = parse_map(line, rest)?;
                if taus.insert(map.0, (line, map)).is_some() {
                    return Err(syntax(line, "tau declared twice"));
                }
                continue;
            }
            "tail" => {
                if tail.replace(parse_tail(line, rest)?).is_some() {
                    return Err(syntax(line, "tail declared twice"));
                }
                continue;
            }
            _ => {}
        }
        let (key, value) = key_value(l).ok_or_else(|| syntax(line, format!("unexpected {l:?}")))?;
        let slot = match key.as_str() {
            "B1" => &mut b1,
            "B2" => &mut b2,
            "scale" => {
                if scale.replace(parse_scale(line, value)?).is_some() {
                    return Err(syntax(line, "scale declared twice"));
                }
                continue;
            }
            _ => return Err(syntax(line, format!("unknown key {key:?}"))),
        };
        if value.is_empty() {
            return Err(syntax(line, format!("{key} needs a path")));
        }
        if slot.replace(value.to_string()).is_some() {
            return Err(syntax(line, format!("{key} declared twice")));
        }
    }
    for (i, (&n, (line, _))) in taus.iter().enumerate() {
        if n != i + 1 {
            return Err(syntax(*line, format!("tau {} is missing", i + 1)));
        }
    }
    Ok(OpmSource {
        b1: b1.ok_or_else(|| FormatError::Missing("B1".into()))?,
        b2: b2.ok_or_else(|| FormatError::Missing("B2".into()))?,
        scale: scale.ok_or_else(|| FormatError::Missing("scale".into()))?,
        taus: taus.into_values().collect(),
        tail,
    })
}

impl OpmSource {
    /// Resolves the τ letters against the loaded diagrams.
    pub fn resolve(
        self,
        b1: OrderedBratteliDiagram,
        b2: OrderedBratteliDiagram,
    ) -> Result<PremorphismFile, FormatError> {
        let mut taus = Vec::new();
        for (line, (n, clauses)) in &self.taus {
            let f = self
                .scale
                .get(*n)
                .ok_or_else(|| syntax(*line, format!("scale is not defined at {n}")))?;
            let domain = b2.alphabet(f).map_err(|e| syntax(*line, e.to_string()))?;
            let codomain = b1.alphabet(*n).map_err(|e| syntax(*line, e.to_string()))?;
            taus.push(resolve_map(*line, &format!("tau {n}"), clauses, domain, codomain)?);
        }
        let premorphism = Premorphism::new(b1, b2, self.scale, taus, self.tail)?;
        Ok(PremorphismFile {
            b1: self.b1,
            b2: self.b2,
            premorphism,
        })
    }
}

pub fn emit_opm(file: &PremorphismFile) -> String {
    let f = &file.premorphism;
    let mut out = format!(
        "opm 1\nB1 = {}\nB2 = {}\nscale = {}\n",
        file.b1,
        file.b2,
        emit_scale(f.scale())
    );
    for (i, tau) in f.represented_taus().iter().enumerate() {
        let n = i + 1;
        let fnn = f.scale().get(n).expect("scale covers the represented taus");
        let domain = f.b2().alphabet(fnn).expect("tau domain level exists");
        let codomain = f.b1().alphabet(n).expect("tau codomain level exists");
        emit_map(&mut out, "tau", n, tau, domain, codomain);
    }
    emit_tail(&mut out, f.tau_tail());
    out
}

pub fn parse_cert(text: &str) -> Result<EquivalenceCertificate, FormatError> {
    let mut it = lines(text);
    check_header(&mut it, "cert")?;
    let mut body = DiagramBody::default();
    let mut fields: BTreeMap<String, String> = BTreeMap::new();
    for (line, l) in it {
        if body.accept(line, l)? {
            continue;
        }
        let (key, value) = key_value(l).ok_or_else(|| syntax(line, format!("unexpected {l:?}")))?;
        if !matches!(key.as_str(), "odd" | "even" | "telescope odd" | "telescope even") {
            return Err(syntax(line, format!("unknown key {key:?}")));
        }
        if value.is_empty() {
            return Err(syntax(line, format!("{key} needs a value")));
        }
        let value = if key.starts_with("telescope") {
            IndexSeq::parse(value)
                .map_err(|e| syntax(line, format!("{key}: {e}")))?
                .to_string()
        } else {
            value.to_string()
        };
        if fields.insert(key.clone(), value).is_some() {
            return Err(syntax(line, format!("{key} declared twice")));
        }
    }
    let mut take = |k: &str| fields.remove(k).ok_or_else(|| FormatError::Missing(k.into()));
    let odd_ref = take("odd")?;
    let even_ref = take("even")?;
    let odd_spec = IndexSeq::parse(&take("telescope odd")?).expect("checked above");
    let even_spec = IndexSeq::parse(&take("telescope even")?).expect("checked above");
    Ok(EquivalenceCertificate {
        interleaved: body.finish()?,
        odd_ref,
        even_ref,
        odd_spec,
        even_spec,
    })
}

pub fn emit_cert(cert: &EquivalenceCertificate) -> String {
    let mut out = format!("cert 1\nodd = {}\neven = {}\n", cert.odd_ref, cert.even_ref);
    emit_body(&mut out, &cert.interleaved);
    out.push_str(&format!(
        "telescope odd = {}\ntelescope even = {}\n",
        cert.odd_spec, cert.even_spec
    ));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::tests::chacon;
    use crate::premorphism::tests::{bprime, chacon_premorphism};

    const CHACON: &str = "obd 1
level 1 = x y
morphism 1: x = @ @ @ ; y = @ @ @
level 2 = x y
morphism 2: x = x x y ; y = x y y
tail from 2 period 1
";

    #[test]
    fn obd_round_trip() {
        let d = parse_obd(CHACON).unwrap();
        assert_eq!(emit_obd(&d), CHACON);
        for d in [chacon(), bprime()] {
            let text = emit_obd(&d);
            assert_eq!(parse_obd(&text).unwrap(), d);
            assert_eq!(emit_obd(&parse_obd(&text).unwrap()), text);
        }
    }

    #[test]
    fn obd_accepts_comments_and_any_order() {
        let text = "# chacon\nobd 1\n\nmorphism 2: y = x y y ; x = x x y\nlevel 2 = x y # same\n\
                    level 1 = x y\nmorphism 1: y = @ @ @;x = @ @ @\ntail from 2 period 1\n";
        assert_eq!(parse_obd(text).unwrap(), parse_obd(CHACON).unwrap());
    }

    #[test]
    fn empty_images_parse() {
        let text = "obd 1\nlevel 1 = a b\nmorphism 1: a = @ ; b =\n";
        let d = parse_obd(text).unwrap();
        assert!(!d.is_valid());
        assert_eq!(emit_obd(&d), text);
    }

    #[test]
    fn obd_errors() {
        for bad in [
            "level 1 = a\nmorphism 1: a = @\n",
            "obd 2\n",
            "obd 1\nlevel 1 = a\nmorphism 1: a = @ ; a = @\n",
            "obd 1\nlevel 1 = a b\nmorphism 1: a = @\n",
            "obd 1\nlevel 1 = a\nmorphism 1: a = z\n",
            "obd 1\nlevel 2 = a\nmorphism 2: a = @\n",
            "obd 1\nlevel 1 = a\n",
            "obd 1\nlevel 1 = a\nmorphism 1: a = @\ntail from 0 period 1\n",
            "obd 1\nbogus\n",
        ] {
            assert!(parse_obd(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn opm_round_trip() {
        let f = chacon_premorphism();
        let file = PremorphismFile {
            b1: "chacon.obd".into(),
            b2: "bprime.obd".into(),
            premorphism: f.clone(),
        };
        let text = emit_opm(&file);
        assert!(text.contains("scale = identity\n"));
        let src = parse_opm_source(&text).unwrap();
        assert_eq!((src.b1.as_str(), src.b2.as_str()), ("chacon.obd", "bprime.obd"));
        let back = src.resolve(f.b1().clone(), f.b2().clone()).unwrap();
        assert_eq!(back, file);
        assert_eq!(emit_opm(&back), text);
    }

    #[test]
    fn scale_text() {
        for s in ["2 4 tail +2", "1 3 tail 2 +5", "tail +3", "1 1 2"] {
            assert_eq!(emit_scale(&parse_scale(1, s).unwrap()), s);
        }
    }

    #[test]
    fn cert_round_trip() {
        let d = chacon();
        let cert = EquivalenceCertificate::identity(&d, "chacon.obd").unwrap();
        let text = emit_cert(&cert);
        let back = parse_cert(&text).unwrap();
        assert_eq!(back, cert);
        assert_eq!(emit_cert(&back), text);
        assert!(parse_cert(&text.replace("telescope even", "telescope other")).is_err());
    }
}
