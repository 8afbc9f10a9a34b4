//! The valency lexicon: verb frames with core-argument slots, light-verb
//! construction (LVC) entries with normalization metadata, and the
//! abstract-concept and pronoun inventories.
//!
//! Lexica are data, not code. A small builtin set covers every verb used by
//! the bundled fixtures; larger lexica load from line-oriented UTF-8 files:
//!
//! ```text
//! FRAME<TAB>lemma<TAB>ARGn=gloss[<TAB>ARGm=gloss...]
//! LVC<TAB>canonical<TAB>nv<TAB>lv<TAB>variants=a,b<TAB>formal=c<TAB>simple=d<TAB>predicative=0|1<TAB>separable=0|1
//! VARIANT<TAB>lemma<TAB>canonical
//! ABSTRACT<TAB>label
//! PRONOUN<TAB>label
//! ```
//!
//! `#` starts a comment line; blank lines and record order are irrelevant;
//! the optional `key=` fields of `LVC` may be empty or omitted. A file entry
//! with the same primary key as a builtin one replaces it; duplicates within
//! one file are rejected.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use crate::nfc;

/// A predicate with numbered core-argument slots (`ARG0`..`ARG5`) and glosses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbFrame {
    pub lemma: String,
    pub args: BTreeMap<u8, String>,
    pub source: FrameSource,
}

impl VerbFrame {
    pub fn defines(&self, index: u8) -> bool {
        self.args.contains_key(&index)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameSource {
    Builtin,
    File,
}

/// A light-verb construction: a nonverbal element fused with a light verb
/// into one event concept, plus the lemmas that normalize to it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LvcEntry {
    /// Fused lemma, always `nv` + `_` + `lv`.
    pub canonical: String,
    pub nv: String,
    pub lv: String,
    /// Lemmas with a different light verb that normalize here (e.g. a
    /// marked-LV or causative-LV alternant).
    pub variant_lvs: Vec<String>,
    /// Formal/polite lemmas that normalize here and add `:polite +`.
    pub formal_variants: Vec<String>,
    /// Simple verbs replaced by this LVC.
    pub simple_equivalents: Vec<String>,
    /// The nonverbal element carries argument structure of its own.
    pub nv_predicative: bool,
    /// The NV and LV may be separated in surface syntax.
    pub separable: bool,
}

/// Whether a concept label is a lexical lemma or one of the abstract,
/// inventory-defined concepts. Assigned by lexicon lookup, never by the parser.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConceptKind {
    Lexical,
    Abstract,
}

/// Result of [`Lexicon::normalize_verb`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalization {
    pub canonical: String,
    /// The input was a formal variant; the node should carry `:polite +`.
    pub polite: bool,
    pub changed: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("lexicon line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("lexicon line {line}: duplicate definition of lemma `{lemma}`")]
    DuplicateLemma { line: usize, lemma: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NormKind {
    Variant,
    Formal,
    Simple,
}

/// Immutable after load; shared read-only across threads.
#[derive(Debug, Clone)]
pub struct Lexicon {
    frames: BTreeMap<String, VerbFrame>,
    lvcs: BTreeMap<String, LvcEntry>,
    /// lemma -> (canonical, kind) for every normalization list member.
    norm: HashMap<String, (String, NormKind)>,
    /// (nv, lv) -> canonical, for split-LVC detection. Includes pairs derived
    /// from multiword variant and formal lemmas split at their last underscore.
    pairs: HashMap<(String, String), String>,
    light_verbs: BTreeSet<String>,
    abstracts: BTreeSet<String>,
    pronouns: BTreeSet<String>,
}

const BUILTIN: &str = include_str!("builtin_lexicon.tsv");

impl Lexicon {
    /// The builtin lexicon alone.
    pub fn builtin() -> Lexicon {
        let records = RawRecords::parse(BUILTIN, FrameSource::Builtin)
            .expect("builtin lexicon data is valid");
        Lexicon::merge(&records).expect("builtin lexicon data is consistent")
    }

    /// Builtins merged with the file at `path`.
    pub fn load(path: impl AsRef<Path>) -> Result<Lexicon, LexiconError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Lexicon::from_text(&text)
    }

    /// Builtins merged with records parsed from `text`.
    pub fn from_text(text: &str) -> Result<Lexicon, LexiconError> {
        let mut records = RawRecords::parse(BUILTIN, FrameSource::Builtin)
            .expect("builtin lexicon data is valid");
        let file = RawRecords::parse(text, FrameSource::File)?;
        records.shadow_and_extend(file);
        Lexicon::merge(&records)
    }

    pub fn lookup_frame(&self, lemma: &str) -> Option<&VerbFrame> {
        self.frames.get(&nfc(lemma))
    }

    pub fn frames(&self) -> impl Iterator<Item = &VerbFrame> {
        self.frames.values()
    }

    pub fn lvc(&self, canonical: &str) -> Option<&LvcEntry> {
        self.lvcs.get(&nfc(canonical))
    }

    pub fn lvc_entries(&self) -> impl Iterator<Item = &LvcEntry> {
        self.lvcs.values()
    }

    /// Canonicalizes a verb lemma per the normalization lists. Identity for
    /// lemmas outside every list; idempotent.
    pub fn normalize_verb(&self, lemma: &str) -> Normalization {
        let lemma = nfc(lemma);
        match self.norm.get(&lemma) {
            Some((canonical, kind)) => Normalization {
                canonical: canonical.clone(),
                polite: *kind == NormKind::Formal,
                changed: true,
            },
            None => Normalization {
                canonical: lemma,
                polite: false,
                changed: false,
            },
        }
    }

    pub fn concept_kind(&self, label: &str) -> ConceptKind {
        if self.abstracts.contains(&nfc(label)) {
            ConceptKind::Abstract
        } else {
            ConceptKind::Lexical
        }
    }

    pub fn is_pronoun(&self, label: &str) -> bool {
        self.pronouns.contains(&nfc(label))
    }

    /// Labels that function as bare light verbs somewhere in the lexicon:
    /// the `lv` of each entry plus the final segment of every variant and
    /// formal lemma.
    pub fn is_light_verb(&self, label: &str) -> bool {
        self.light_verbs.contains(&nfc(label))
    }

    /// The canonical LVC for a (nonverbal element, light verb) pair, if the
    /// pair is registered, directly or through a variant lemma.
    pub fn lvc_for_pair(&self, nv: &str, lv: &str) -> Option<&str> {
        self.pairs.get(&(nfc(nv), nfc(lv))).map(String::as_str)
    }

    pub fn abstract_concepts(&self) -> impl Iterator<Item = &str> {
        self.abstracts.iter().map(String::as_str)
    }

    pub fn pronouns(&self) -> impl Iterator<Item = &str> {
        self.pronouns.iter().map(String::as_str)
    }

    fn merge(records: &RawRecords) -> Result<Lexicon, LexiconError> {
        let mut lex = Lexicon {
            frames: BTreeMap::new(),
            lvcs: BTreeMap::new(),
            norm: HashMap::new(),
            pairs: HashMap::new(),
            light_verbs: BTreeSet::new(),
            abstracts: records.abstracts.clone(),
            pronouns: records.pronouns.clone(),
        };
        for (_, frame) in &records.frames {
            lex.frames.insert(frame.lemma.clone(), frame.clone());
        }
        for (_, entry) in &records.lvcs {
            lex.lvcs.insert(entry.canonical.clone(), entry.clone());
        }

        // Normalization lists must be disjoint across the whole lexicon.
        let mut norm: HashMap<String, (String, NormKind)> = HashMap::new();
        let mut add_norm = |lemma: &str, canonical: &str, kind: NormKind, line: usize| {
            if norm
                .insert(lemma.to_string(), (canonical.to_string(), kind))
                .is_some()
            {
                return Err(LexiconError::Format {
                    line,
                    message: format!(
                        "lemma `{lemma}` appears in more than one normalization list"
                    ),
                });
            }
            Ok(())
        };
        for (line, entry) in &records.lvcs {
            for v in &entry.variant_lvs {
                add_norm(v, &entry.canonical, NormKind::Variant, *line)?;
            }
            for v in &entry.formal_variants {
                add_norm(v, &entry.canonical, NormKind::Formal, *line)?;
            }
            for v in &entry.simple_equivalents {
                add_norm(v, &entry.canonical, NormKind::Simple, *line)?;
            }
        }
        for (line, lemma, canonical) in &records.variants {
            add_norm(lemma, canonical, NormKind::Variant, *line)?;
        }
        lex.norm = norm;

        // Every normalization target must itself carry a frame.
        for (lemma, (canonical, _)) in &lex.norm {
            if !lex.frames.contains_key(canonical) {
                return Err(LexiconError::Format {
                    line: 0,
                    message: format!(
                        "`{lemma}` normalizes to `{canonical}`, which has no frame"
                    ),
                });
            }
        }

        for entry in lex.lvcs.values() {
            lex.light_verbs.insert(entry.lv.clone());
        }
        let mut pairs: HashMap<(String, String), String> = HashMap::new();
        // Pairs from multiword variant lemmas first, so direct entries win on
        // the rare collision.
        for entry in lex.lvcs.values() {
            for lemma in entry.variant_lvs.iter().chain(&entry.formal_variants) {
                if let Some((nv, lv)) = lemma.rsplit_once('_') {
                    lex.light_verbs.insert(lv.to_string());
                    pairs.insert(
                        (nv.to_string(), lv.to_string()),
                        entry.canonical.clone(),
                    );
                }
            }
        }
        for entry in lex.lvcs.values() {
            pairs.insert(
                (entry.nv.clone(), entry.lv.clone()),
                entry.canonical.clone(),
            );
        }
        lex.pairs = pairs;

        if lex.abstracts.is_empty() || lex.pronouns.is_empty() {
            return Err(LexiconError::Format {
                line: 0,
                message: "abstract-concept and pronoun inventories must be nonempty".into(),
            });
        }
        Ok(lex)
    }
}

/// Parsed records with their line numbers, before cross-record validation.
struct RawRecords {
    frames: Vec<(usize, VerbFrame)>,
    lvcs: Vec<(usize, LvcEntry)>,
    variants: Vec<(usize, String, String)>,
    abstracts: BTreeSet<String>,
    pronouns: BTreeSet<String>,
}

impl RawRecords {
    fn parse(text: &str, source: FrameSource) -> Result<RawRecords, LexiconError> {
        let mut records = RawRecords {
            frames: Vec::new(),
            lvcs: Vec::new(),
            variants: Vec::new(),
            abstracts: BTreeSet::new(),
            pronouns: BTreeSet::new(),
        };
        for (i, raw_line) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw_line.trim_end_matches('\r');
            if trimmed.trim().is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split('\t').collect();
            let fail = |message: String| LexiconError::Format { line, message };
            match fields[0] {
                "FRAME" => records
                    .frames
                    .push((line, parse_frame(&fields, line, source)?)),
                "LVC" => records.lvcs.push((line, parse_lvc(&fields, line)?)),
                "VARIANT" => {
                    let [_, lemma, canonical] = fields.as_slice() else {
                        return Err(fail("VARIANT takes exactly two fields".into()));
                    };
                    records
                        .variants
                        .push((line, require(lemma, line)?, require(canonical, line)?));
                }
                "ABSTRACT" => {
                    let [_, label] = fields.as_slice() else {
                        return Err(fail("ABSTRACT takes exactly one field".into()));
                    };
                    records.abstracts.insert(require(label, line)?);
                }
                "PRONOUN" => {
                    let [_, label] = fields.as_slice() else {
                        return Err(fail("PRONOUN takes exactly one field".into()));
                    };
                    records.pronouns.insert(require(label, line)?);
                }
                other => {
                    return Err(fail(format!("unknown record type `{other}`")));
                }
            }
        }

        // Duplicates within one source are definition errors.
        let mut seen_frames = BTreeSet::new();
        for (line, frame) in &records.frames {
            if !seen_frames.insert(frame.lemma.clone()) {
                return Err(LexiconError::DuplicateLemma {
                    line: *line,
                    lemma: frame.lemma.clone(),
                });
            }
        }
        let mut seen_lvcs = BTreeSet::new();
        for (line, entry) in &records.lvcs {
            if !seen_lvcs.insert(entry.canonical.clone()) {
                return Err(LexiconError::DuplicateLemma {
                    line: *line,
                    lemma: entry.canonical.clone(),
                });
            }
        }
        let mut seen_variants = BTreeSet::new();
        for (line, lemma, _) in &records.variants {
            if !seen_variants.insert(lemma.clone()) {
                return Err(LexiconError::DuplicateLemma {
                    line: *line,
                    lemma: lemma.clone(),
                });
            }
        }
        Ok(records)
    }

    /// Replaces builtin records whose primary key reappears in `file`, then
    /// appends the file records and inventory labels.
    fn shadow_and_extend(&mut self, file: RawRecords) {
        let file_frames: BTreeSet<String> =
            file.frames.iter().map(|(_, f)| f.lemma.clone()).collect();
        self.frames.retain(|(_, f)| !file_frames.contains(&f.lemma));
        let file_lvcs: BTreeSet<String> =
            file.lvcs.iter().map(|(_, e)| e.canonical.clone()).collect();
        self.lvcs.retain(|(_, e)| !file_lvcs.contains(&e.canonical));
        let file_variants: BTreeSet<String> =
            file.variants.iter().map(|(_, l, _)| l.clone()).collect();
        self.variants.retain(|(_, l, _)| !file_variants.contains(l));

        // Normalization lists naming the same lemma are shadowed too, so an
        // override cannot collide with the builtin list it replaces.
        let mut file_norm_lemmas: BTreeSet<String> = BTreeSet::new();
        for (_, entry) in &file.lvcs {
            file_norm_lemmas.extend(entry.variant_lvs.iter().cloned());
            file_norm_lemmas.extend(entry.formal_variants.iter().cloned());
            file_norm_lemmas.extend(entry.simple_equivalents.iter().cloned());
        }
        for (_, lemma, _) in &file.variants {
            file_norm_lemmas.insert(lemma.clone());
        }
        for (_, entry) in &mut self.lvcs {
            entry.variant_lvs.retain(|l| !file_norm_lemmas.contains(l));
            entry
                .formal_variants
                .retain(|l| !file_norm_lemmas.contains(l));
            entry
                .simple_equivalents
                .retain(|l| !file_norm_lemmas.contains(l));
        }
        self.variants.retain(|(_, l, _)| !file_norm_lemmas.contains(l));

        self.frames.extend(file.frames);
        self.lvcs.extend(file.lvcs);
        self.variants.extend(file.variants);
        self.abstracts.extend(file.abstracts);
        self.pronouns.extend(file.pronouns);
    }
}

fn require(field: &str, line: usize) -> Result<String, LexiconError> {
    if field.is_empty() {
        return Err(LexiconError::Format {
            line,
            message: "field must be nonempty".into(),
        });
    }
    Ok(nfc(field))
}

fn parse_frame(
    fields: &[&str],
    line: usize,
    source: FrameSource,
) -> Result<VerbFrame, LexiconError> {
    let fail = |message: String| LexiconError::Format { line, message };
    if fields.len() < 3 {
        return Err(fail(
            "FRAME needs a lemma and at least one ARGn=gloss".into(),
        ));
    }
    let lemma = require(fields[1], line)?;
    let mut args = BTreeMap::new();
    for field in &fields[2..] {
        let Some((arg, gloss)) = field.split_once('=') else {
            return Err(fail(format!("expected ARGn=gloss, got `{field}`")));
        };
        let Some(digits) = arg.strip_prefix("ARG") else {
            return Err(fail(format!("expected ARGn=gloss, got `{field}`")));
        };
        let index: u8 = digits
            .parse()
            .map_err(|_| fail(format!("bad argument index in `{field}`")))?;
        if index > 5 {
            return Err(fail(format!("argument index out of range in `{field}`")));
        }
        if args.insert(index, nfc(gloss)).is_some() {
            return Err(fail(format!("duplicate argument index ARG{index}")));
        }
    }
    Ok(VerbFrame {
        lemma,
        args,
        source,
    })
}

fn parse_lvc(fields: &[&str], line: usize) -> Result<LvcEntry, LexiconError> {
    let fail = |message: String| LexiconError::Format { line, message };
    if fields.len() < 4 {
        return Err(fail("LVC needs canonical, nv, and lv fields".into()));
    }
    let mut entry = LvcEntry {
        canonical: require(fields[1], line)?,
        nv: require(fields[2], line)?,
        lv: require(fields[3], line)?,
        ..LvcEntry::default()
    };
    if entry.canonical != format!("{}_{}", entry.nv, entry.lv) {
        return Err(fail(format!(
            "canonical `{}` must equal nv + `_` + lv",
            entry.canonical
        )));
    }
    let mut seen = BTreeSet::new();
    for field in &fields[4..] {
        if field.is_empty() {
            continue;
        }
        let Some((key, value)) = field.split_once('=') else {
            return Err(fail(format!("expected key=value, got `{field}`")));
        };
        if !seen.insert(key.to_string()) {
            return Err(fail(format!("duplicate LVC field `{key}`")));
        }
        let list = |v: &str| -> Vec<String> {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(nfc)
                .collect()
        };
        match key {
            "variants" => entry.variant_lvs = list(value),
            "formal" => entry.formal_variants = list(value),
            "simple" => entry.simple_equivalents = list(value),
            "predicative" => entry.nv_predicative = parse_flag(value, line)?,
            "separable" => entry.separable = parse_flag(value, line)?,
            other => return Err(fail(format!("unknown LVC field `{other}`"))),
        }
    }
    Ok(entry)
}

fn parse_flag(value: &str, line: usize) -> Result<bool, LexiconError> {
    match value {
        "0" => Ok(false),
        "1" => Ok(true),
        other => Err(LexiconError::Format {
            line,
            message: format!("flag must be 0 or 1, got `{other}`"),
        }),
    }
}
