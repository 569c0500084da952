//! Line-oriented N-Quads reader with error recovery.
//!
//! Web-extracted corpora contain a fair amount of broken lines, so the
//! default policy counts and skips malformed statements. Every quad must
//! carry a graph label, which is interpreted as the source page URL.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use serde::{Deserialize, Serialize};

use super::quad::{Quad, Term};
use crate::error::{Error, Result};

/// What to do with a malformed line.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorPolicy {
    #[default]
    SkipAndCount,
    Abort,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedLine {
    pub line: u64,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseReport {
    /// Physical lines read, including blank and comment lines.
    pub lines: u64,
    pub quads: u64,
    pub skipped: u64,
    /// The first [`ParseReport::MAX_RECORDED`] skipped lines.
    pub errors: Vec<SkippedLine>,
}

impl ParseReport {
    pub const MAX_RECORDED: usize = 100;
}

/// Open a corpus file, transparently decompressing gzip (detected by magic
/// bytes, not by extension).
pub fn open_corpus(path: &Path) -> Result<Box<dyn BufRead + Send>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::with_capacity(1 << 16, file);
    let head = reader.fill_buf().map_err(|e| Error::io(path, e))?;
    if head.len() >= 2 && head[0] == 0x1f && head[1] == 0x8b {
        Ok(Box::new(BufReader::with_capacity(
            1 << 16,
            MultiGzDecoder::new(reader),
        )))
    } else {
        Ok(Box::new(reader))
    }
}

/// Streaming iterator over the quads of an N-Quads source.
///
/// Under [`ErrorPolicy::Abort`] the first malformed line yields an
/// [`Error::Parse`] and ends the stream. I/O failures always yield an error.
pub struct QuadReader<R> {
    reader: R,
    policy: ErrorPolicy,
    report: ParseReport,
    buf: Vec<u8>,
    done: bool,
}

impl<R: BufRead> QuadReader<R> {
    pub fn new(reader: R, policy: ErrorPolicy) -> Self {
        QuadReader {
            reader,
            policy,
            report: ParseReport::default(),
            buf: Vec::with_capacity(512),
            done: false,
        }
    }

    pub fn report(&self) -> &ParseReport {
        &self.report
    }

    pub fn into_report(self) -> ParseReport {
        self.report
    }
}

impl<R: BufRead> Iterator for QuadReader<R> {
    type Item = Result<Quad>;

    fn next(&mut self) -> Option<Self::Item> {
        while !self.done {
            self.buf.clear();
            match self.reader.read_until(b'\n', &mut self.buf) {
                Ok(0) => {
                    self.done = true;
                    return None;
                }
                Ok(_) => {}
                Err(e) => {
                    self.done = true;
                    return Some(Err(Error::Stream(e)));
                }
            }
            self.report.lines += 1;
            let line_no = self.report.lines;
            let parsed = match std::str::from_utf8(&self.buf) {
                Ok(text) => parse_line(text),
                Err(_) => Err("invalid UTF-8".to_string()),
            };
            match parsed {
                Ok(Some(quad)) => {
                    self.report.quads += 1;
                    return Some(Ok(quad));
                }
                Ok(None) => continue,
                Err(message) => match self.policy {
                    ErrorPolicy::SkipAndCount => {
                        self.report.skipped += 1;
                        if self.report.errors.len() < ParseReport::MAX_RECORDED {
                            self.report.errors.push(SkippedLine {
                                line: line_no,
                                message,
                            });
                        }
                    }
                    ErrorPolicy::Abort => {
                        self.done = true;
                        return Some(Err(Error::Parse {
                            line: line_no,
                            message,
                        }));
                    }
                },
            }
        }
        None
    }
}

/// Parse a whole source into memory.
pub fn parse_nquads<R: Read>(input: R, policy: ErrorPolicy) -> Result<(Vec<Quad>, ParseReport)> {
    let mut reader = QuadReader::new(BufReader::new(input), policy);
    let mut quads = Vec::new();
    for q in reader.by_ref() {
        quads.push(q?);
    }
    Ok((quads, reader.into_report()))
}

/// Parse one line. `Ok(None)` for blank and comment lines.
pub(crate) fn parse_line(line: &str) -> std::result::Result<Option<Quad>, String> {
    let mut cur = Cursor::new(line);
    cur.skip_ws();
    if cur.at_end() || cur.peek() == Some('#') {
        return Ok(None);
    }
    let subject = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        _ => return Err(format!("unexpected subject at column {}", cur.pos + 1)),
    };
    cur.require_ws()?;
    if cur.peek() != Some('<') {
        return Err(format!("predicate must be an IRI (column {})", cur.pos + 1));
    }
    let predicate = cur.iri()?;
    cur.require_ws()?;
    let object = match cur.peek() {
        Some('<') => Term::Iri(cur.iri()?),
        Some('_') => Term::Blank(cur.blank()?),
        Some('"') => cur.literal()?,
        _ => return Err(format!("unexpected object at column {}", cur.pos + 1)),
    };
    cur.skip_ws();
    let source_url = match cur.peek() {
        Some('<') => cur.iri()?,
        Some('.') => return Err("missing graph label (source URL)".into()),
        Some('_') => return Err("graph label must be a page URL, not a blank node".into()),
        _ => return Err(format!("unexpected graph label at column {}", cur.pos + 1)),
    };
    cur.skip_ws();
    if cur.peek() != Some('.') {
        return Err("missing terminating '.'".into());
    }
    cur.bump();
    cur.skip_ws();
    if !(cur.at_end() || cur.peek() == Some('#')) {
        return Err(format!("trailing content at column {}", cur.pos + 1));
    }
    if predicate.is_empty() {
        return Err("empty predicate".into());
    }
    validate_source_url(&source_url)?;
    Ok(Some(Quad {
        subject,
        predicate,
        object,
        source_url,
    }))
}

fn validate_source_url(url: &str) -> std::result::Result<(), String> {
    match url::Url::parse(url) {
        Ok(u) if u.host().is_some() => Ok(()),
        Ok(_) => Err(format!("source URL <{url}> has no host")),
        Err(e) => Err(format!("source URL <{url}>: {e}")),
    }
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r' | '\n')) {
            self.pos += 1;
        }
    }

    fn require_ws(&mut self) -> std::result::Result<(), String> {
        let before = self.pos;
        self.skip_ws();
        if self.pos == before {
            Err(format!("expected whitespace at column {}", self.pos + 1))
        } else {
            Ok(())
        }
    }

    fn iri(&mut self) -> std::result::Result<String, String> {
        let start = self.pos;
        self.bump(); // '<'
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(format!("unterminated IRI starting at column {}", start + 1)),
                Some('>') => return Ok(out),
                Some('\\') => out.push(self.unicode_escape()?),
                Some(c) if c <= ' ' || "<\"{}|^`".contains(c) => {
                    return Err(format!("invalid character {c:?} in IRI"))
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn blank(&mut self) -> std::result::Result<String, String> {
        if !self.rest().starts_with("_:") {
            return Err(format!("malformed blank node at column {}", self.pos + 1));
        }
        self.pos += 2;
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c.is_alphanumeric() || matches!(c, '_' | '-' | '.' | ':') {
                self.bump();
            } else {
                break;
            }
        }
        // a label never ends with '.'
        while self.pos > start && self.src.as_bytes()[self.pos - 1] == b'.' {
            self.pos -= 1;
        }
        if self.pos == start {
            return Err("empty blank node label".into());
        }
        Ok(self.src[start..self.pos].to_string())
    }

    fn literal(&mut self) -> std::result::Result<Term, String> {
        self.bump(); // '"'
        let mut value = String::new();
        loop {
            match self.bump() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => match self.peek() {
                    Some('u' | 'U') => value.push(self.unicode_escape()?),
                    Some(c) => {
                        self.bump();
                        value.push(match c {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            other => return Err(format!("invalid escape \\{other}")),
                        });
                    }
                    None => return Err("unterminated literal".into()),
                },
                Some('\n' | '\r') => return Err("raw line break in literal".into()),
                Some(c) => value.push(c),
            }
        }
        match self.peek() {
            Some('@') => {
                self.bump();
                let start = self.pos;
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '-') {
                    self.bump();
                }
                let tag = &self.src[start..self.pos];
                let valid = !tag.is_empty()
                    && tag.split('-').all(|part| !part.is_empty())
                    && tag.split('-').next().unwrap().chars().all(|c| c.is_ascii_alphabetic());
                if !valid {
                    return Err(format!("invalid language tag {tag:?}"));
                }
                Ok(Term::Literal {
                    value,
                    lang: Some(tag.to_string()),
                    datatype: None,
                })
            }
            Some('^') => {
                if !self.rest().starts_with("^^<") {
                    return Err("malformed datatype".into());
                }
                self.pos += 2;
                let dt = self.iri()?;
                Ok(Term::Literal {
                    value,
                    lang: None,
                    datatype: Some(dt),
                })
            }
            _ => Ok(Term::Literal {
                value,
                lang: None,
                datatype: None,
            }),
        }
    }

    /// After a consumed backslash: `uXXXX` or `UXXXXXXXX`.
    fn unicode_escape(&mut self) -> std::result::Result<char, String> {
        let width = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            other => return Err(format!("invalid escape {other:?}")),
        };
        let rest = self.rest();
        if rest.len() < width || !rest.is_char_boundary(width) {
            return Err("truncated unicode escape".into());
        }
        let hex = &rest[..width];
        let code = u32::from_str_radix(hex, 16).map_err(|_| format!("invalid hex {hex:?}"))?;
        self.pos += width;
        char::from_u32(code).ok_or_else(|| format!("invalid code point {code:#x}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"_:b0 <http://schema.org/name> "NG Healthcare Summit US"@en <https://gdssummits.com/nghealthcare/us/> ."#;

    #[test]
    fn parses_example_statement() {
        let q = parse_line(EXAMPLE).unwrap().unwrap();
        assert_eq!(q.subject, Term::Blank("b0".into()));
        assert_eq!(q.predicate, "http://schema.org/name");
        assert_eq!(q.object, Term::lang_literal("NG Healthcare Summit US", "en"));
        assert_eq!(q.source_url, "https://gdssummits.com/nghealthcare/us/");
    }

    #[test]
    fn empty_input() {
        let (quads, report) = parse_nquads(&b""[..], ErrorPolicy::SkipAndCount).unwrap();
        assert!(quads.is_empty());
        assert_eq!(report.lines, 0);
        assert_eq!(report.skipped, 0);
    }

    #[test]
    fn skip_and_abort_policies() {
        let input = "\
_:a <http://schema.org/name> \"x\" <http://a.com/> .
_:a <http://schema.org/url> <http://a.com/x> <http://a.com/> .
_:a <http://schema.org/name> \"y\" <http://a.com/>
_:b <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <http://schema.org/Event> <http://b.org/p> .
_:b <http://schema.org/startDate> \"2016-01-01\"^^<http://www.w3.org/2001/XMLSchema#date> <http://b.org/p> .
";
        let (quads, report) = parse_nquads(input.as_bytes(), ErrorPolicy::SkipAndCount).unwrap();
        assert_eq!(quads.len(), 4);
        assert_eq!(report.skipped, 1);
        assert_eq!(report.errors[0].line, 3);

        let err = parse_nquads(input.as_bytes(), ErrorPolicy::Abort).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn literals_keep_tags_and_escapes() {
        let q = parse_line(
            r#"<http://x.org/s> <http://schema.org/description> "a \"q\"\né" <http://x.org/> ."#,
        )
        .unwrap()
        .unwrap();
        assert_eq!(q.object.literal_value(), Some("a \"q\"\né"));
        let again = parse_line(&q.to_nquads()).unwrap().unwrap();
        assert_eq!(again, q);
    }

    #[test]
    fn rejects_malformed_lines() {
        for bad in [
            "_:a <http://schema.org/name> \"x\" .",
            "_:a \"p\" \"x\" <http://a.com/> .",
            "_:a <http://schema.org/name> \"x <http://a.com/> .",
            "_:a <http://schema.org/name> \"x\" <not a url> .",
            "_:a <http://schema.org/name> \"x\" <urn:isbn:1> .",
            "_:a <http://schema.org/name> \"x\"@ <http://a.com/> .",
            "_:a <http://schema.org/name> \"x\" <http://a.com/> . junk",
        ] {
            assert!(parse_line(bad).is_err(), "{bad}");
        }
        assert_eq!(parse_line("  # comment").unwrap(), None);
        assert_eq!(parse_line("   ").unwrap(), None);
    }

    #[test]
    fn gzip_is_detected_by_magic() {
        use flate2::write::GzEncoder;
        use std::io::Write;
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus.data");
        let mut enc = GzEncoder::new(File::create(&path).unwrap(), flate2::Compression::default());
        writeln!(enc, "{EXAMPLE}").unwrap();
        enc.finish().unwrap();
        let reader = open_corpus(&path).unwrap();
        let quads: Vec<_> = QuadReader::new(reader, ErrorPolicy::Abort)
            .collect::<Result<_>>()
            .unwrap();
        assert_eq!(quads.len(), 1);
    }
}
