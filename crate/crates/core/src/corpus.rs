//! Gold-tagged documents and plain lemma streams.
//!
//! The gold format is a simplified SemCor rendering:
//!
//! ```text
//! <s>
//! <wd>jury</wd><sn>[noun.group.0]</sn><tag>NN</tag>
//! <wd>prison_farms</wd><mwd>prison_farm</mwd><msn>[noun.artifact.0]</msn><tag>NN</tag>
//! </s>
//! ```
//!
//! A token runs from `<wd>` to `</tag>`. `<mwd>`/`<msn>` replace the lemma
//! and gold key of multiword entries. Whitespace between elements is
//! ignored; any other text outside an element is an error.

use std::fmt::{self, Write as _};
use std::io::Read;
use std::str::FromStr;

use thiserror::Error;

use crate::taxonomy::Taxonomy;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("bad sense key `{0}`: expected <lexfile>.<number>")]
    BadKey(String),
}

/// `lexfile.number`, e.g. `noun.group.0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SenseKey {
    pub lexfile: String,
    pub number: u32,
}

impl FromStr for SenseKey {
    type Err = CorpusError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CorpusError::BadKey(s.to_string());
        let (lexfile, number) = s.rsplit_once('.').ok_or_else(bad)?;
        if lexfile.is_empty() || number.is_empty() || !number.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        Ok(SenseKey {
            lexfile: lexfile.to_string(),
            number: number.parse().map_err(|_| bad())?,
        })
    }
}

impl fmt::Display for SenseKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.lexfile, self.number)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldToken {
    pub lemma: String,
    pub pos_tag: String,
    pub gold_key: Option<SenseKey>,
    /// Original `<wd>` text when a multiword lemma replaced it.
    pub multiword_surface: Option<String>,
    pub sentence_index: usize,
}

impl GoldToken {
    pub fn is_noun(&self) -> bool {
        self.pos_tag.starts_with("NN")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Document {
    pub source: String,
    pub tokens: Vec<GoldToken>,
}

impl Document {
    /// Serialise back to the gold grammar. Empty sentences are written out
    /// so that sentence indices survive a re-parse.
    pub fn to_semcor(&self) -> String {
        let mut out = String::new();
        let sentences = self.tokens.last().map_or(0, |t| t.sentence_index + 1);
        let mut tokens = self.tokens.iter().peekable();
        for s in 0..sentences {
            out.push_str("<s>\n");
            while let Some(tok) = tokens.next_if(|t| t.sentence_index == s) {
                let key = |k: &Option<SenseKey>| k.as_ref().map(|k| format!("[{k}]"));
                match &tok.multiword_surface {
                    Some(surface) => {
                        let _ = write!(out, "<wd>{surface}</wd><mwd>{}</mwd>", tok.lemma);
                        if let Some(k) = key(&tok.gold_key) {
                            let _ = write!(out, "<msn>{k}</msn>");
                        }
                    }
                    None => {
                        let _ = write!(out, "<wd>{}</wd>", tok.lemma);
                        if let Some(k) = key(&tok.gold_key) {
                            let _ = write!(out, "<sn>{k}</sn>");
                        }
                    }
                }
                let _ = writeln!(out, "<tag>{}</tag>", tok.pos_tag);
            }
            out.push_str("</s>\n");
        }
        out
    }
}

/// Parse a gold document in strict mode.
pub fn parse_semcor<R: Read>(source: R) -> Result<Document, CorpusError> {
    SemcorParser::default().parse(source)
}

/// Whitespace-separated lemmas.
pub fn parse_plain<R: Read>(mut source: R) -> Result<Vec<String>, CorpusError> {
    let mut text = String::new();
    source.read_to_string(&mut text).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => CorpusError::Encoding,
        _ => CorpusError::Io(e),
    })?;
    Ok(text.split_whitespace().map(str::to_string).collect())
}

#[derive(Debug, Clone, Default)]
pub struct SemcorParser {
    permissive: bool,
    source_id: String,
}

#[derive(Debug, PartialEq)]
enum Event<'a> {
    Open(&'a str),
    Close(&'a str),
    Text(&'a str),
}

const KNOWN_TAGS: [&str; 6] = ["s", "wd", "sn", "tag", "mwd", "msn"];

impl SemcorParser {
    pub fn new() -> Self {
        Self::default()
    }

    /// Skip elements outside the known tag inventory instead of failing.
    pub fn permissive(mut self, yes: bool) -> Self {
        self.permissive = yes;
        self
    }

    pub fn source_id(mut self, id: impl Into<String>) -> Self {
        self.source_id = id.into();
        self
    }

    pub fn parse<R: Read>(&self, mut source: R) -> Result<Document, CorpusError> {
        let mut bytes = Vec::new();
        source.read_to_end(&mut bytes)?;
        let text = String::from_utf8(bytes).map_err(|_| CorpusError::Encoding)?;
        self.parse_str(&text)
    }

    pub fn parse_str(&self, text: &str) -> Result<Document, CorpusError> {
        let events = lex(text)?;
        let events = if self.permissive {
            strip_unknown(events)?
        } else {
            if let Some((line, Event::Open(name) | Event::Close(name))) = events
                .iter()
                .find(|(_, e)| matches!(e, Event::Open(n) | Event::Close(n) if !KNOWN_TAGS.contains(n)))
            {
                return Err(CorpusError::Parse {
                    line: *line,
                    message: format!("unknown tag <{name}>"),
                });
            }
            events
        };
        let mut p = TokenStream {
            events,
            at: 0,
            last_line: 1,
        };
        let mut doc = Document {
            source: self.source_id.clone(),
            tokens: Vec::new(),
        };
        let mut sentence = 0;
        while let Some(line) = p.peek_line() {
            match p.next_structural()? {
                None => break,
                Some(Event::Open("s")) => {}
                Some(other) => return Err(p.unexpected(line, &other, "<s>")),
            }
            loop {
                let line = p.peek_line().unwrap_or(p.last_line);
                match p.next_structural()? {
                    Some(Event::Close("s")) => break,
                    Some(Event::Open("wd")) => doc.tokens.push(p.token(sentence)?),
                    Some(other) => return Err(p.unexpected(line, &other, "<wd> or </s>")),
                    None => {
                        return Err(CorpusError::Parse {
                            line,
                            message: "unterminated <s>".into(),
                        })
                    }
                }
            }
            sentence += 1;
        }
        Ok(doc)
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Event<'_>)>, CorpusError> {
    let mut events = Vec::new();
    let mut line = 1;
    let mut rest = text;
    while !rest.is_empty() {
        if let Some(after) = rest.strip_prefix('<') {
            let end = after.find('>').ok_or(CorpusError::Parse {
                line,
                message: "unterminated tag".into(),
            })?;
            let inner = &after[..end];
            let (close, name) = match inner.strip_prefix('/') {
                Some(n) => (true, n),
                None => (false, inner),
            };
            if name.is_empty() || !name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_') {
                return Err(CorpusError::Parse {
                    line,
                    message: format!("malformed tag <{inner}>"),
                });
            }
            events.push((line, if close { Event::Close(name) } else { Event::Open(name) }));
            rest = &after[end + 1..];
        } else {
            let end = rest.find('<').unwrap_or(rest.len());
            let chunk = &rest[..end];
            if chunk.contains('>') {
                return Err(CorpusError::Parse {
                    line,
                    message: "stray `>`".into(),
                });
            }
            events.push((line, Event::Text(chunk)));
            line += chunk.matches('\n').count();
            rest = &rest[end..];
        }
    }
    Ok(events)
}

fn strip_unknown(events: Vec<(usize, Event<'_>)>) -> Result<Vec<(usize, Event<'_>)>, CorpusError> {
    let mut out = Vec::with_capacity(events.len());
    let mut skipping: Vec<&str> = Vec::new();
    for (line, e) in events {
        match e {
            Event::Open(n) if !KNOWN_TAGS.contains(&n) => skipping.push(n),
            Event::Close(n) if !KNOWN_TAGS.contains(&n) => {
                if skipping.last() == Some(&n) {
                    skipping.pop();
                }
            }
            _ if !skipping.is_empty() => {}
            e => out.push((line, e)),
        }
    }
    Ok(out)
}

struct TokenStream<'a> {
    events: Vec<(usize, Event<'a>)>,
    at: usize,
    last_line: usize,
}

impl<'a> TokenStream<'a> {
    fn peek_line(&self) -> Option<usize> {
        self.events.get(self.at).map(|(l, _)| *l)
    }

    fn next_raw(&mut self) -> Option<Event<'a>> {
        let (line, e) = self.events.get(self.at)?;
        self.last_line = *line;
        self.at += 1;
        Some(match e {
            Event::Open(n) => Event::Open(n),
            Event::Close(n) => Event::Close(n),
            Event::Text(t) => Event::Text(t),
        })
    }

    /// Next tag, skipping whitespace; non-blank text is an error.
    fn next_structural(&mut self) -> Result<Option<Event<'a>>, CorpusError> {
        loop {
            match self.next_raw() {
                Some(Event::Text(t)) if t.trim().is_empty() => continue,
                Some(Event::Text(t)) => {
                    return Err(CorpusError::Parse {
                        line: self.last_line,
                        message: format!("stray text `{}` outside an element", t.trim()),
                    })
                }
                other => return Ok(other),
            }
        }
    }

    fn unexpected(&self, line: usize, got: &Event<'_>, wanted: &str) -> CorpusError {
        let got = match got {
            Event::Open(n) => format!("<{n}>"),
            Event::Close(n) => format!("</{n}>"),
            Event::Text(t) => format!("text `{t}`"),
        };
        CorpusError::Parse {
            line,
            message: format!("expected {wanted}, found {got}"),
        }
    }

    /// Text content of an element whose opening tag was just consumed.
    fn content(&mut self, name: &str) -> Result<String, CorpusError> {
        match self.next_raw() {
            Some(Event::Text(t)) => {
                if let Some(Event::Close(n)) = self.next_raw() {
                    if n == name {
                        return Ok(t.trim().to_string());
                    }
                }
            }
            Some(Event::Close(n)) if n == name => return Ok(String::new()),
            _ => {}
        }
        Err(CorpusError::Parse {
            line: self.last_line,
            message: format!("<{name}> must contain only text and be closed by </{name}>"),
        })
    }

    fn key(&mut self, name: &str) -> Result<SenseKey, CorpusError> {
        let raw = self.content(name)?;
        let line = self.last_line;
        let inner = raw
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| CorpusError::Parse {
                line,
                message: format!("<{name}> payload `{raw}` is not bracketed"),
            })?;
        inner.trim().parse().map_err(|e: CorpusError| CorpusError::Parse {
            line,
            message: e.to_string(),
        })
    }

    fn token(&mut self, sentence_index: usize) -> Result<GoldToken, CorpusError> {
        let surface = self.content("wd")?;
        if surface.is_empty() {
            return Err(CorpusError::Parse {
                line: self.last_line,
                message: "empty <wd>".into(),
            });
        }
        let mut sn = None;
        let mut mwd = None;
        let mut msn = None;
        loop {
            let line = self.peek_line().unwrap_or(self.last_line);
            let dup = |name: &str| CorpusError::Parse {
                line,
                message: format!("repeated <{name}> in one token"),
            };
            match self.next_structural()? {
                Some(Event::Open("sn")) if sn.is_none() => sn = Some(self.key("sn")?),
                Some(Event::Open("msn")) if msn.is_none() => msn = Some(self.key("msn")?),
                Some(Event::Open("mwd")) if mwd.is_none() => mwd = Some(self.content("mwd")?),
                Some(Event::Open(n @ ("sn" | "msn" | "mwd"))) => return Err(dup(n)),
                Some(Event::Open("tag")) => {
                    let pos_tag = self.content("tag")?;
                    let multiword = mwd.is_some();
                    return Ok(GoldToken {
                        lemma: mwd.unwrap_or_else(|| surface.clone()),
                        pos_tag,
                        gold_key: msn.or(sn),
                        multiword_surface: multiword.then_some(surface),
                        sentence_index,
                    });
                }
                Some(other) => return Err(self.unexpected(line, &other, "<sn>, <mwd>, <msn> or <tag>")),
                None => {
                    return Err(CorpusError::Parse {
                        line,
                        message: "token not closed by <tag>".into(),
                    })
                }
            }
        }
    }
}

/// A noun kept for disambiguation: its token index and lemma.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NounToken {
    pub position: usize,
    pub lemma: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FilterReport {
    pub tokens: usize,
    pub nouns: usize,
    pub not_in_taxonomy: usize,
    pub monosemous: usize,
    pub kept: usize,
}

/// Keep `NN*`-tagged tokens whose lemma the taxonomy knows.
pub fn extract_nouns(doc: &Document, t: &Taxonomy) -> (Vec<NounToken>, FilterReport) {
    let mut report = FilterReport {
        tokens: doc.tokens.len(),
        ..FilterReport::default()
    };
    let mut kept = Vec::new();
    for (position, tok) in doc.tokens.iter().enumerate() {
        if !tok.is_noun() {
            continue;
        }
        report.nouns += 1;
        match t.sense_count(&tok.lemma) {
            0 => report.not_in_taxonomy += 1,
            n => {
                if n == 1 {
                    report.monosemous += 1;
                }
                kept.push(NounToken {
                    position,
                    lemma: tok.lemma.clone(),
                });
            }
        }
    }
    report.kept = kept.len();
    (kept, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE_GOLD: &str = include_str!("../tests/data/sample_gold.sem");

    #[test]
    fn sample_gold_fragment() {
        let doc = parse_semcor(SAMPLE_GOLD.as_bytes()).unwrap();
        let got: Vec<(String, String)> = doc
            .tokens
            .iter()
            .map(|t| (t.lemma.clone(), t.gold_key.as_ref().unwrap().to_string()))
            .collect();
        let want = [
            ("jury", "noun.group.0"),
            ("administration", "noun.act.0"),
            ("operation", "noun.state.0"),
            ("Police_Department", "noun.group.0"),
            ("prison_farm", "noun.artifact.0"),
        ];
        assert_eq!(got.len(), 5);
        for ((l, k), (wl, wk)) in got.iter().zip(want) {
            assert_eq!((l.as_str(), k.as_str()), (wl, wk));
        }
        let farm = &doc.tokens[4];
        assert_eq!(farm.multiword_surface.as_deref(), Some("prison_farms"));
        assert!(doc.tokens.iter().all(|t| t.pos_tag == "NN" && t.sentence_index == 0));
    }

    #[test]
    fn empty_sentence() {
        let doc = parse_semcor("<s></s>".as_bytes()).unwrap();
        assert!(doc.tokens.is_empty());
        assert!(parse_semcor("".as_bytes()).unwrap().tokens.is_empty());
    }

    #[test]
    fn unbracketed_key_reports_line() {
        let src =
            "<s>\n<wd>jury</wd><sn>[noun.group.0]</sn><tag>NN</tag>\n<wd>x</wd><sn>noun.act.0</sn><tag>NN</tag>\n</s>";
        match parse_semcor(src.as_bytes()).unwrap_err() {
            CorpusError::Parse { line, message } => {
                assert_eq!(line, 3);
                assert!(message.contains("not bracketed"));
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn structural_errors() {
        let bad = [
            "stray <s></s>",
            "<s><wd>a</wd><tag>NN</tag>",
            "<s><wd>a</wd></s>",
            "<s><wd>a<sn>[x.1]</sn></wd><tag>NN</tag></s>",
            "<s><wd>a</wd><sn>[x.1]</sn><sn>[x.2]</sn><tag>NN</tag></s>",
            "<s><tag>NN</tag></s>",
            "<s><wd>a</wd><punc>,</punc><tag>NN</tag></s>",
            "<s><wd>a</wd><sn>[x.y]</sn><tag>NN</tag></s>",
            "<s><wd>a</wd><tag>NN</tag></s",
            "<s><s></s></s>",
        ];
        for src in bad {
            assert!(parse_semcor(src.as_bytes()).is_err(), "accepted {src:?}");
        }
    }

    #[test]
    fn permissive_mode_skips_unknown_elements() {
        let src = "<s><wd>a</wd><punc>,</punc><tag>NN</tag><note>hi <b>there</b></note></s>\n<p>skipped <s></s></p>";
        let doc = SemcorParser::new().permissive(true).parse_str(src).unwrap();
        assert_eq!(doc.tokens.len(), 1);
        assert_eq!(doc.tokens[0].lemma, "a");
        assert!(doc.tokens[0].gold_key.is_none());
    }

    #[test]
    fn sentence_indices_increase() {
        let src = "<s><wd>a</wd><tag>NN</tag></s><s></s><s><wd>b</wd><tag>VB</tag></s>";
        let doc = parse_semcor(src.as_bytes()).unwrap();
        assert_eq!(doc.tokens[0].sentence_index, 0);
        assert_eq!(doc.tokens[1].sentence_index, 2);
        assert!(!doc.tokens[1].is_noun());
        assert_eq!(parse_semcor(doc.to_semcor().as_bytes()).unwrap(), doc);
    }

    #[test]
    fn sense_keys() {
        let k: SenseKey = "noun.group.0".parse().unwrap();
        assert_eq!(k.lexfile, "noun.group");
        assert_eq!(k.number, 0);
        assert_eq!(k.to_string(), "noun.group.0");
        for bad in ["", "noun", "noun.", ".3", "noun.group.-1", "noun.group.x"] {
            assert!(bad.parse::<SenseKey>().is_err(), "{bad}");
        }
    }

    #[test]
    fn plain_streams() {
        let lemmas = parse_plain("jury administration operation Police_Department prison_farm".as_bytes()).unwrap();
        assert_eq!(lemmas.len(), 5);
        assert_eq!(lemmas[3], "Police_Department");
        assert!(parse_plain("".as_bytes()).unwrap().is_empty());
        assert_eq!(parse_plain("  a\n b ".as_bytes()).unwrap(), ["a", "b"]);
    }

    #[test]
    fn noun_filter() {
        let t: Taxonomy = include_str!("../tests/data/sample.tax").parse().unwrap();
        let doc = parse_semcor(SAMPLE_GOLD.as_bytes()).unwrap();
        let (nouns, report) = extract_nouns(&doc, &t);
        let lemmas: Vec<&str> = nouns.iter().map(|n| n.lemma.as_str()).collect();
        let plain = parse_plain(include_str!("../tests/data/sample_lemmas.txt").as_bytes()).unwrap();
        assert_eq!(lemmas, plain);
        assert_eq!(report.kept, 5);
        assert_eq!(report.monosemous, 2);

        let mut extra = doc.clone();
        extra.tokens.push(GoldToken {
            lemma: "frobnicator".into(),
            pos_tag: "NN".into(),
            gold_key: None,
            multiword_surface: None,
            sentence_index: 0,
        });
        extra.tokens.push(GoldToken {
            lemma: "praise".into(),
            pos_tag: "VBD".into(),
            gold_key: None,
            multiword_surface: None,
            sentence_index: 0,
        });
        let (nouns, report) = extract_nouns(&extra, &t);
        assert_eq!(nouns.len(), 5);
        assert_eq!(report.tokens, 7);
        assert_eq!(report.nouns, 6);
        assert_eq!(report.not_in_taxonomy, 1);

        let verbs = parse_semcor("<s><wd>praise</wd><tag>VBD</tag></s>".as_bytes()).unwrap();
        let (nouns, report) = extract_nouns(&verbs, &t);
        assert!(nouns.is_empty());
        assert_eq!(report.nouns, 0);
    }
}
