//! Wordlist configuration format.
//!
//! ```text
//! # comment
//! [group:female]
//! she
//! woman
//! [targets:jobs]
//! nurse
//! [pairs:gender]
//! he
//! she
//! ```
//!
//! One token per line; `#` starts a comment anywhere on a line; blank lines
//! are ignored. A `pairs` section pairs consecutive lines.

use std::fmt;
use std::path::Path;

use crate::error::{CliError, CliResult};

/// The shipped gender wordlist: 25 counterpart-aligned female/male pairs
/// plus an illustrative occupation target set. It is a reconstruction, not
/// a published list.
pub const DEFAULT_WORDLIST: &str = include_str!("../data/gender_reconstruction.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum SectionKind {
    Group,
    Targets,
    Pairs,
}

impl SectionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Group => "group",
            Self::Targets => "targets",
            Self::Pairs => "pairs",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "group" => Some(Self::Group),
            "targets" => Some(Self::Targets),
            "pairs" => Some(Self::Pairs),
            _ => None,
        }
    }
}

impl fmt::Display for SectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section {
    pub kind: SectionKind,
    pub name: String,
    pub tokens: Vec<String>,
}

/// Sections in file order; `(kind, name)` is unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordlistConfig {
    sections: Vec<Section>,
}

impl WordlistConfig {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a section, rejecting empty sections, duplicate names and odd
    /// pair counts.
    pub fn push(
        &mut self,
        kind: SectionKind,
        name: &str,
        tokens: Vec<String>,
    ) -> Result<(), String> {
        if self.get(kind, name).is_some() {
            return Err(format!("duplicate section [{kind}:{name}]"));
        }
        if tokens.is_empty() {
            return Err(format!("section [{kind}:{name}] is empty"));
        }
        if kind == SectionKind::Pairs && !tokens.len().is_multiple_of(2) {
            return Err(format!(
                "section [{kind}:{name}] has an odd pair count ({} tokens)",
                tokens.len()
            ));
        }
        self.sections.push(Section {
            kind,
            name: name.to_string(),
            tokens,
        });
        Ok(())
    }

    pub fn sections(&self) -> &[Section] {
        &self.sections
    }

    pub fn get(&self, kind: SectionKind, name: &str) -> Option<&Section> {
        self.sections
            .iter()
            .find(|s| s.kind == kind && s.name == name)
    }

    /// Tokens of a section, or a data error naming the missing section.
    pub fn tokens(&self, kind: SectionKind, name: &str) -> CliResult<&[String]> {
        self.get(kind, name)
            .map(|s| s.tokens.as_slice())
            .ok_or_else(|| CliError::Data(format!("wordlists have no [{kind}:{name}] section")))
    }

    /// Consecutive token pairs of a `pairs` section.
    pub fn pairs(&self, name: &str) -> CliResult<Vec<(&str, &str)>> {
        let tokens = self.tokens(SectionKind::Pairs, name)?;
        Ok(tokens
            .chunks_exact(2)
            .map(|p| (p[0].as_str(), p[1].as_str()))
            .collect())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, s) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            out.push_str(&format!("[{}:{}]\n", s.kind, s.name));
            for t in &s.tokens {
                out.push_str(t);
                out.push('\n');
            }
        }
        out
    }
}

pub fn load_wordlists(path: &Path) -> CliResult<WordlistConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_wordlists(&text).map_err(|(line, message)| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message,
    })
}

/// Parses the format from memory. Errors carry a 1-based line number.
pub fn parse_wordlists(text: &str) -> Result<WordlistConfig, (usize, String)> {
    let mut config = WordlistConfig::new();
    // (kind, name, tokens, header line)
    let mut open: Option<(SectionKind, String, Vec<String>, usize)> = None;
    let close = |config: &mut WordlistConfig,
                 open: Option<(SectionKind, String, Vec<String>, usize)>| {
        match open {
            Some((kind, name, tokens, line)) => {
                config.push(kind, &name, tokens).map_err(|m| (line, m))
            }
            None => Ok(()),
        }
    };
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or_default().trim();
        if line.is_empty() {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let inner = header
                .strip_suffix(']')
                .ok_or((lineno, format!("unterminated section header {line:?}")))?;
            let (kind, name) = inner.split_once(':').ok_or((
                lineno,
                format!("section header {line:?} must be [kind:NAME]"),
            ))?;
            let kind = SectionKind::parse(kind.trim()).ok_or((
                lineno,
                format!(
                    "unknown section kind {:?}; expected group, targets or pairs",
                    kind.trim()
                ),
            ))?;
            let name = name.trim();
            if name.is_empty() {
                return Err((lineno, "section name is empty".into()));
            }
            close(&mut config, open.take())?;
            open = Some((kind, name.to_string(), Vec::new(), lineno));
        } else {
            match open.as_mut() {
                Some((_, _, tokens, _)) => tokens.push(line.to_string()),
                None => return Err((lineno, format!("token {line:?} outside any section"))),
            }
        }
    }
    close(&mut config, open)?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_groups() {
        let c = parse_wordlists("[group:female]\nshe\nwoman\n[group:male]\nhe\nman").unwrap();
        assert_eq!(c.sections().len(), 2);
        assert_eq!(
            c.tokens(SectionKind::Group, "male").unwrap(),
            &["he", "man"]
        );
    }

    #[test]
    fn pairs_section() {
        let c = parse_wordlists("[pairs:gender]\nhe\nshe\nman\nwoman").unwrap();
        assert_eq!(
            c.pairs("gender").unwrap(),
            vec![("he", "she"), ("man", "woman")]
        );
    }

    #[test]
    fn odd_pairs_rejected() {
        let e = parse_wordlists("[pairs:gender]\nhe\nshe\nman").unwrap_err();
        assert_eq!(e.0, 1);
        assert!(e.1.contains("odd pair count"));
    }

    #[test]
    fn comments_blank_lines_and_errors() {
        let c =
            parse_wordlists("# header\n\n[targets:t]  # jobs\nnurse # care\n\n  doctor\n").unwrap();
        assert_eq!(
            c.tokens(SectionKind::Targets, "t").unwrap(),
            &["nurse", "doctor"]
        );
        assert_eq!(parse_wordlists("[colour:x]\na").unwrap_err().0, 1);
        assert!(parse_wordlists("[group:x]\n[group:y]\na")
            .unwrap_err()
            .1
            .contains("empty"));
        assert!(parse_wordlists("a\n[group:x]\nb").is_err());
        assert!(parse_wordlists("[group:x]\na\n[group:x]\nb").is_err());
        assert!(parse_wordlists("[group:x\na").is_err());
    }

    #[test]
    fn default_wordlist_is_aligned() {
        let c = parse_wordlists(DEFAULT_WORDLIST).unwrap();
        let f = c.tokens(SectionKind::Group, "female").unwrap();
        let m = c.tokens(SectionKind::Group, "male").unwrap();
        assert_eq!(f.len(), 25);
        assert_eq!(m.len(), 25);
        let pairs = c.pairs("gender").unwrap();
        for ((male, female), (f, m)) in pairs.iter().zip(f.iter().zip(m)) {
            assert_eq!((*male, *female), (m.as_str(), f.as_str()));
        }
    }

    #[test]
    fn text_round_trip() {
        let c = parse_wordlists("[group:a]\nx\n[pairs:p]\nu\nv\n").unwrap();
        assert_eq!(parse_wordlists(&c.to_text()).unwrap(), c);
    }
}
