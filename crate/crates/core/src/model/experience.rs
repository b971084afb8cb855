use super::{ModelError, ScaledScore};
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// The remembered (or produced) answer attached to an element.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Payload {
    /// A plain numeric value.
    Numeric(f64),
    /// One symbol out of a finite, ordered alphabet. `ordinal` indexes into
    /// the alphabet and stays authoritative if the payload is later shifted;
    /// `label` describes the symbol as it was stored.
    Symbolic {
        label: String,
        ordinal: u32,
        alphabet: u32,
    },
}

/// One remembered problem/solution pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperienceElement {
    pub id: u64,
    /// Grouping tag used when matching problems to experiences.
    pub domain: String,
    pub payload: Payload,
    /// Urgency of the element; selection picks the highest.
    pub priority: ScaledScore,
    /// How reliably the intuitive process solves this kind of problem.
    pub importance_ip: ScaledScore,
    /// How reliably a deliberate, step-by-step process would solve it.
    pub importance_np: ScaledScore,
    /// Self-assessed confidence in the stored payload.
    pub confidence: ScaledScore,
    /// Logical timestamp of the first time this element was stored.
    pub first_seen: u64,
    /// How many times the element has been revised since `first_seen`.
    pub revision_count: u32,
}

/// A problem posed to the model: an identifier, the domain it belongs to,
/// and whatever values have been observed about it so far.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemElement {
    pub id: String,
    pub domain: String,
    pub observed: Vec<Payload>,
    /// Logical time of the query.
    pub time: u64,
}

/// An ordered collection of experience elements with stable iteration order
/// (insertion order) and upsert-by-id semantics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperienceSet {
    elements: Vec<ExperienceElement>,
}

impl ExperienceSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `element`, or revises the element that already has its id.
    ///
    /// A revision keeps the original `first_seen` and increments
    /// `revision_count`; everything else is replaced. The counters on the
    /// passed-in element are ignored in that case, so callers cannot
    /// accidentally reset an element's history.
    pub fn record(&mut self, element: ExperienceElement) {
        match self.elements.iter_mut().find(|e| e.id == element.id) {
            Some(existing) => {
                let first_seen = existing.first_seen;
                let revisions = existing.revision_count + 1;
                *existing = element;
                existing.first_seen = first_seen;
                existing.revision_count = revisions;
            }
            None => self.elements.push(element),
        }
    }

    pub fn get(&self, id: u64) -> Option<&ExperienceElement> {
        self.elements.iter().find(|e| e.id == id)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ExperienceElement> {
        self.elements.iter()
    }

    pub fn elements(&self) -> &[ExperienceElement] {
        &self.elements
    }

    /// Serializes the set to its line format: one element per line, nine
    /// `|`-separated fields. Lines starting with `#` and blank lines are
    /// ignored when reading back.
    ///
    /// ```text
    /// id|domain|payload|priority|imp_ip|imp_np|confidence|first_seen|revisions
    /// ```
    ///
    /// The payload field is `num:<value>` or `sym:<label>:<ordinal>:<alphabet>`.
    /// `%`, `|`, `:`, and line breaks inside labels and domains are
    /// percent-escaped.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str("# experience set: one element per line\n");
        out.push_str("# id|domain|payload|priority|imp_ip|imp_np|confidence|first_seen|revisions\n");
        for e in &self.elements {
            let payload = match &e.payload {
                Payload::Numeric(v) => format!("num:{v:?}"),
                Payload::Symbolic {
                    label,
                    ordinal,
                    alphabet,
                } => format!("sym:{}:{ordinal}:{alphabet}", escape(label)),
            };
            let _ = writeln!(
                out,
                "{}|{}|{}|{}|{}|{}|{}|{}|{}",
                e.id,
                escape(&e.domain),
                payload,
                e.priority.get(),
                e.importance_ip.get(),
                e.importance_np.get(),
                e.confidence.get(),
                e.first_seen,
                e.revision_count,
            );
        }
        out
    }

    /// Parses the line format produced by [`ExperienceSet::to_text`].
    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let mut set = ExperienceSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('|').collect();
            if fields.len() != 9 {
                return Err(malformed(line_no, format!("expected 9 fields, got {}", fields.len())));
            }
            let id = parse_num::<u64>(line_no, fields[0], "id")?;
            let domain = unescape(fields[1]).map_err(|r| malformed(line_no, r))?;
            let payload = parse_payload(line_no, fields[2])?;
            let score = |field: &str, name: &str| -> Result<ScaledScore, ModelError> {
                let v = parse_num::<u8>(line_no, field, name)?;
                ScaledScore::new(v)
                    .map_err(|_| malformed(line_no, format!("{name} {v} outside 1..=10")))
            };
            set.elements.push(ExperienceElement {
                id,
                domain,
                payload,
                priority: score(fields[3], "priority")?,
                importance_ip: score(fields[4], "imp_ip")?,
                importance_np: score(fields[5], "imp_np")?,
                confidence: score(fields[6], "confidence")?,
                first_seen: parse_num::<u64>(line_no, fields[7], "first_seen")?,
                revision_count: parse_num::<u32>(line_no, fields[8], "revisions")?,
            });
        }
        Ok(set)
    }
}

fn malformed(line: usize, reason: String) -> ModelError {
    ModelError::MalformedExperience { line, reason }
}

fn parse_num<T: std::str::FromStr>(line: usize, s: &str, name: &str) -> Result<T, ModelError> {
    s.parse()
        .map_err(|_| malformed(line, format!("bad {name}: {s:?}")))
}

fn parse_payload(line: usize, field: &str) -> Result<Payload, ModelError> {
    if let Some(value) = field.strip_prefix("num:") {
        let v: f64 = value
            .parse()
            .map_err(|_| malformed(line, format!("bad numeric payload: {value:?}")))?;
        return Ok(Payload::Numeric(v));
    }
    if let Some(rest) = field.strip_prefix("sym:") {
        // label may contain escaped colons; the last two fields are numeric.
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(malformed(line, format!("bad symbolic payload: {rest:?}")));
        }
        let label = unescape(parts[0]).map_err(|r| malformed(line, r))?;
        let ordinal = parse_num::<u32>(line, parts[1], "ordinal")?;
        let alphabet = parse_num::<u32>(line, parts[2], "alphabet")?;
        if ordinal >= alphabet {
            return Err(malformed(
                line,
                format!("ordinal {ordinal} outside alphabet of size {alphabet}"),
            ));
        }
        return Ok(Payload::Symbolic {
            label,
            ordinal,
            alphabet,
        });
    }
    Err(malformed(line, format!("unknown payload tag in {field:?}")))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            '|' => out.push_str("%7C"),
            ':' => out.push_str("%3A"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            _ => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '%' {
            out.push(c);
            continue;
        }
        let hex: String = chars.by_ref().take(2).collect();
        match hex.as_str() {
            "25" => out.push('%'),
            "7C" => out.push('|'),
            "3A" => out.push(':'),
            "0A" => out.push('\n'),
            "0D" => out.push('\r'),
            other => return Err(format!("bad escape %{other}")),
        }
    }
    Ok(out)
}
