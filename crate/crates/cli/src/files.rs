//! Reading and writing the text formats. Paths inside `.opm` and `.cert`
//! files are relative to the file that mentions them.

use std::fs;
use std::path::{Path, PathBuf};

use bratteli::format::{self, PremorphismFile};
use bratteli::transforms::EquivalenceCertificate;
use bratteli::OrderedBratteliDiagram;

/// Input problem; always exit code 3.
#[derive(Debug)]
pub struct InputError(pub String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

pub type Input<T> = Result<T, InputError>;

pub enum Kind {
    Diagram,
    Premorphism,
    Certificate,
}

pub fn read(path: &Path) -> Input<String> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// Format named by the header line.
pub fn sniff(text: &str) -> Option<Kind> {
    let first = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())?;
    match first.split_whitespace().next()? {
        "obd" => Some(Kind::Diagram),
        "opm" => Some(Kind::Premorphism),
        "cert" => Some(Kind::Certificate),
        _ => None,
    }
}

fn context<T, E: std::fmt::Display>(path: &Path, r: Result<T, E>) -> Input<T> {
    r.map_err(|e| InputError(format!("{}: {e}", path.display())))
}

pub fn relative_to(file: &Path, reference: &str) -> PathBuf {
    let r = Path::new(reference);
    if r.is_absolute() {
        return r.to_path_buf();
    }
    file.parent().unwrap_or(Path::new("")).join(r)
}

pub fn load_diagram(path: &Path) -> Input<OrderedBratteliDiagram> {
    context(path, format::parse_obd(&read(path)?))
}

pub fn load_premorphism(path: &Path) -> Input<PremorphismFile> {
    let src = context(path, format::parse_opm_source(&read(path)?))?;
    let b1 = load_diagram(&relative_to(path, &src.b1))?;
    let b2 = load_diagram(&relative_to(path, &src.b2))?;
    context(path, src.resolve(b1, b2))
}

pub fn load_certificate(path: &Path) -> Input<EquivalenceCertificate> {
    context(path, format::parse_cert(&read(path)?))
}

pub fn write(path: &Path, text: &str) -> Input<()> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// How a file written next to `from` should refer to `target`: the bare
/// file name when both share a directory, an absolute path otherwise.
pub fn reference(from: &Path, target: &Path) -> Input<String> {
    let dir = |p: &Path| -> Input<PathBuf> {
        let parent = p
            .parent()
            .filter(|d| !d.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        fs::canonicalize(parent).map_err(|e| InputError(format!("{}: {e}", parent.display())))
    };
    let name = target
        .file_name()
        .ok_or_else(|| InputError(format!("{} has no file name", target.display())))?;
    let target_dir = dir(target)?;
    if dir(from)? == target_dir {
        Ok(name.to_string_lossy().into_owned())
    } else {
        Ok(target_dir.join(name).to_string_lossy().into_owned())
    }
}

/// `dir/stem.suffix` next to `input`.
pub fn sibling(input: &Path, suffix: &str) -> PathBuf {
    let stem = input.file_stem().unwrap_or_default().to_string_lossy();
    input.with_file_name(format!("{stem}.{suffix}"))
}
