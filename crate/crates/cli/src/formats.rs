//! File formats: trace logs (JSONL or CSV), model documents (JSON),
//! constraint documents (JSON), and DOT rendering.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use tpo_core::constraints::{Bound, DifferenceConstraintSystem, Relation, TimePoint};
use tpo_core::tpo::{Guard, GuardConjunct, Tpo};
use tpo_core::{Alphabet, ClockId, EventId, PartialOrder, TimedTrace};

use crate::error::CliError;

/// One event record of a line-delimited JSON trace log. The CSV adapter
/// uses the same three columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogRecord {
    pub trace_id: TraceKey,
    pub event: String,
    pub timestamp: f64,
}

/// Trace identifiers may be written as strings or numbers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TraceKey {
    Number(u64),
    Text(String),
}

impl std::fmt::Display for TraceKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TraceKey::Number(n) => write!(f, "{n}"),
            TraceKey::Text(s) => write!(f, "{s}"),
        }
    }
}

/// An event log: an alphabet plus one entry list per trace. Entries may
/// repeat events (pipeline logs do); conversion to [`TimedTrace`] enforces
/// uniqueness where the pipeline needs it.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceLogDocument {
    pub alphabet: Alphabet,
    pub trace_ids: Vec<TraceKey>,
    pub traces: Vec<Vec<(EventId, f64)>>,
}

impl TraceLogDocument {
    pub fn from_traces(alphabet: Alphabet, traces: Vec<Vec<(EventId, f64)>>) -> Self {
        let trace_ids = (0..traces.len() as u64).map(TraceKey::Number).collect();
        TraceLogDocument {
            alphabet,
            trace_ids,
            traces,
        }
    }

    /// Reads a log; `.csv` selects the CSV adapter, anything else is
    /// treated as line-delimited JSON. Labels are interned in sorted order
    /// so event ids do not depend on record order.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
        if path.extension().is_some_and(|x| x == "csv") {
            Self::parse_csv(&text)
        } else {
            Self::parse_jsonl(&text)
        }
    }

    pub fn parse_jsonl(text: &str) -> Result<Self, CliError> {
        let mut records = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let record: LogRecord = serde_json::from_str(line)
                .map_err(|e| CliError::Parse(format!("line {}: {e}", lineno + 1)))?;
            records.push(record);
        }
        Self::from_records(records)
    }

    pub fn parse_csv(text: &str) -> Result<Self, CliError> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let mut records = Vec::new();
        for (k, row) in reader.deserialize::<CsvRecord>().enumerate() {
            let row = row.map_err(|e| CliError::Parse(format!("csv row {}: {e}", k + 2)))?;
            records.push(LogRecord {
                trace_id: TraceKey::Text(row.trace_id),
                event: row.event,
                timestamp: row.timestamp,
            });
        }
        Self::from_records(records)
    }

    fn from_records(records: Vec<LogRecord>) -> Result<Self, CliError> {
        let mut labels: Vec<&str> = records.iter().map(|r| r.event.as_str()).collect();
        labels.sort_unstable();
        labels.dedup();
        let alphabet = Alphabet::from_labels(labels).expect("deduplicated labels are unique");

        let mut trace_ids: Vec<TraceKey> = Vec::new();
        let mut traces: Vec<Vec<(EventId, f64)>> = Vec::new();
        let mut index: std::collections::HashMap<TraceKey, usize> =
            std::collections::HashMap::new();
        for record in &records {
            if !record.timestamp.is_finite() || record.timestamp < 0.0 {
                return Err(CliError::Validation(format!(
                    "trace {}: bad timestamp {} for event {:?}",
                    record.trace_id, record.timestamp, record.event
                )));
            }
            let event = alphabet.id(&record.event).expect("interned above");
            let slot = *index.entry(record.trace_id.clone()).or_insert_with(|| {
                trace_ids.push(record.trace_id.clone());
                traces.push(Vec::new());
                traces.len() - 1
            });
            if let Some(&(_, last)) = traces[slot].last() {
                if record.timestamp < last {
                    return Err(CliError::Validation(format!(
                        "trace {}: timestamp {} after {} is decreasing",
                        record.trace_id, record.timestamp, last
                    )));
                }
            }
            traces[slot].push((event, record.timestamp));
        }
        Ok(TraceLogDocument {
            alphabet,
            trace_ids,
            traces,
        })
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = if path.extension().is_some_and(|x| x == "csv") {
            self.to_csv()?
        } else {
            self.to_jsonl()
        };
        std::fs::write(path, text)
            .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for (id, trace) in self.trace_ids.iter().zip(&self.traces) {
            for &(event, timestamp) in trace {
                let record = LogRecord {
                    trace_id: id.clone(),
                    event: self.alphabet.label(event).to_owned(),
                    timestamp,
                };
                out.push_str(&serde_json::to_string(&record).expect("records serialize"));
                out.push('\n');
            }
        }
        out
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        for (id, trace) in self.trace_ids.iter().zip(&self.traces) {
            for &(event, timestamp) in trace {
                writer
                    .serialize(CsvRecord {
                        trace_id: id.to_string(),
                        event: self.alphabet.label(event).to_owned(),
                        timestamp,
                    })
                    .map_err(|e| CliError::Parse(e.to_string()))?;
            }
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| CliError::Parse(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    /// Converts every trace, enforcing per-trace event uniqueness.
    pub fn to_timed_traces(&self) -> Result<Vec<TimedTrace>, CliError> {
        self.trace_ids
            .iter()
            .zip(&self.traces)
            .map(|(id, entries)| {
                TimedTrace::new(entries.clone())
                    .map_err(|e| CliError::Validation(format!("trace {id}: {e}")))
            })
            .collect()
    }

    /// All entries of all traces as one sequence, in document order.
    pub fn flattened(&self) -> Vec<(EventId, f64)> {
        self.traces.iter().flatten().copied().collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRecord {
    trace_id: String,
    event: String,
    timestamp: f64,
}

/// JSON form of a model: events by id, reduced edges, clock count, and
/// per-event guard and reset tables keyed by label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpoDocument {
    pub events: Vec<String>,
    pub edges: Vec<(String, String)>,
    pub clocks: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub guards: BTreeMap<String, Vec<GuardEntry>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub resets: BTreeMap<String, Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardEntry {
    pub clock: usize,
    pub relation: String,
    pub bound: f64,
}

impl TpoDocument {
    pub fn from_model(alphabet: &Alphabet, tpo: &Tpo) -> Self {
        assert_eq!(alphabet.len(), tpo.events());
        let events: Vec<String> = alphabet.labels().to_vec();
        let edges = tpo
            .order()
            .covering_edges()
            .map(|(a, b)| (events[a.0].clone(), events[b.0].clone()))
            .collect();
        let mut guards = BTreeMap::new();
        let mut resets = BTreeMap::new();
        for e in alphabet.events() {
            let gs = tpo.guard(e);
            if !gs.is_trivial() {
                guards.insert(
                    events[e.0].clone(),
                    gs.conjuncts()
                        .iter()
                        .map(|c| GuardEntry {
                            clock: c.clock.0,
                            relation: c.relation.as_str().to_owned(),
                            bound: c.constant,
                        })
                        .collect(),
                );
            }
            let rs = tpo.resets(e);
            if !rs.is_empty() {
                resets.insert(events[e.0].clone(), rs.iter().map(|c| c.0).collect());
            }
        }
        TpoDocument {
            events,
            edges,
            clocks: tpo.clocks(),
            guards,
            resets,
        }
    }

    pub fn to_model(&self) -> Result<(Alphabet, Tpo), CliError> {
        let alphabet = Alphabet::from_labels(self.events.iter().cloned())
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let resolve = |label: &str| {
            alphabet
                .id(label)
                .ok_or_else(|| CliError::Validation(format!("unknown event {label:?}")))
        };
        let mut edges = Vec::new();
        for (a, b) in &self.edges {
            edges.push((resolve(a)?, resolve(b)?));
        }
        let order = PartialOrder::from_edges(alphabet.len(), edges)
            .map_err(|e| CliError::Validation(e.to_string()))?;

        let mut guards = vec![Guard::always(); alphabet.len()];
        for (label, entries) in &self.guards {
            let event = resolve(label)?;
            let conjuncts = entries
                .iter()
                .map(|g| {
                    let relation = match g.relation.as_str() {
                        "<=" => Relation::Le,
                        ">=" => Relation::Ge,
                        other => {
                            return Err(CliError::Validation(format!(
                                "bad relation {other:?} at {label:?}"
                            )))
                        }
                    };
                    Ok(GuardConjunct {
                        clock: ClockId(g.clock),
                        relation,
                        constant: g.bound,
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            guards[event.0] = Guard::new(conjuncts);
        }
        let mut resets = vec![Vec::new(); alphabet.len()];
        for (label, clocks) in &self.resets {
            let event = resolve(label)?;
            resets[event.0] = clocks.iter().map(|&c| ClockId(c)).collect();
        }
        let tpo = Tpo::new(order, self.clocks, guards, resets)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok((alphabet, tpo))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("document serializes");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
    }
}

/// Upper bounds serialize as a number or the string `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound(pub f64);

impl Serialize for UpperBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for UpperBound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Number(v) => Ok(UpperBound(v)),
            Raw::Text(s) if s == "inf" => Ok(UpperBound(f64::INFINITY)),
            Raw::Text(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"inf\", got {s:?}"
            ))),
        }
    }
}

fn default_lower() -> f64 {
    0.0
}

fn default_upper() -> UpperBound {
    UpperBound(f64::INFINITY)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbsoluteEntry {
    pub event: String,
    #[serde(default = "default_lower")]
    pub lower: f64,
    #[serde(default = "default_upper")]
    pub upper: UpperBound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DifferenceEntry {
    pub from: String,
    pub to: String,
    #[serde(default = "default_lower")]
    pub lower: f64,
    #[serde(default = "default_upper")]
    pub upper: UpperBound,
}

/// Interval-form constraint file: absolute windows per event and
/// difference windows per ordered pair, plus (optionally) explicit order
/// edges beyond those implied by the difference pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConstraintDocument {
    pub events: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub order: Vec<(String, String)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub absolute: Vec<AbsoluteEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub difference: Vec<DifferenceEntry>,
}

impl ConstraintDocument {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).expect("document serializes");
        std::fs::write(path, text + "\n")
            .map_err(|e| CliError::Io(path.display().to_string(), e.to_string()))
    }

    pub fn to_system(&self) -> Result<(Alphabet, DifferenceConstraintSystem), CliError> {
        let alphabet = Alphabet::from_labels(self.events.iter().cloned())
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let resolve = |label: &str| {
            alphabet
                .id(label)
                .ok_or_else(|| CliError::Validation(format!("unknown event {label:?}")))
        };
        let mut edges = Vec::new();
        for (a, b) in &self.order {
            edges.push((resolve(a)?, resolve(b)?));
        }
        for d in &self.difference {
            edges.push((resolve(&d.from)?, resolve(&d.to)?));
        }
        let order = PartialOrder::from_edges(alphabet.len(), edges)
            .map_err(|e| CliError::Validation(e.to_string()))?;

        let mut bounds = Vec::new();
        for a in &self.absolute {
            let event = resolve(&a.event)?;
            bounds.push(Bound::lower(TimePoint::Origin, event, a.lower));
            bounds.push(Bound::upper(TimePoint::Origin, event, a.upper.0));
        }
        for d in &self.difference {
            let from = resolve(&d.from)?;
            let to = resolve(&d.to)?;
            bounds.push(Bound::lower(TimePoint::Event(from), to, d.lower));
            bounds.push(Bound::upper(TimePoint::Event(from), to, d.upper.0));
        }
        let sys = DifferenceConstraintSystem::new(order, bounds)
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok((alphabet, sys))
    }

    /// Interval view of a system: one entry per (source, target) pair,
    /// intersecting duplicate bounds.
    pub fn from_system(alphabet: &Alphabet, sys: &DifferenceConstraintSystem) -> Self {
        let mut absolute: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
        let mut difference: BTreeMap<(usize, usize), (f64, f64)> = BTreeMap::new();
        for b in sys.bounds() {
            let slot = match b.source {
                TimePoint::Origin => absolute.entry(b.target.0).or_insert((0.0, f64::INFINITY)),
                TimePoint::Event(s) => difference
                    .entry((s.0, b.target.0))
                    .or_insert((0.0, f64::INFINITY)),
            };
            match b.relation {
                Relation::Ge => slot.0 = slot.0.max(b.constant),
                Relation::Le => slot.1 = slot.1.min(b.constant),
            }
        }
        ConstraintDocument {
            events: alphabet.labels().to_vec(),
            order: sys
                .order()
                .covering_edges()
                .map(|(a, b)| (alphabet.label(a).to_owned(), alphabet.label(b).to_owned()))
                .collect(),
            absolute: absolute
                .into_iter()
                .map(|(e, (lo, hi))| AbsoluteEntry {
                    event: alphabet.label(EventId(e)).to_owned(),
                    lower: lo,
                    upper: UpperBound(hi),
                })
                .collect(),
            difference: difference
                .into_iter()
                .map(|((a, b), (lo, hi))| DifferenceEntry {
                    from: alphabet.label(EventId(a)).to_owned(),
                    to: alphabet.label(EventId(b)).to_owned(),
                    lower: lo,
                    upper: UpperBound(hi),
                })
                .collect(),
        }
    }
}

/// Human-readable rendering of one bound, with event labels.
pub fn format_bound(alphabet: &Alphabet, b: &Bound) -> String {
    let target = alphabet.label(b.target);
    match b.source {
        TimePoint::Origin => format!("t({}) {} {}", target, b.relation, b.constant),
        TimePoint::Event(s) => format!(
            "t({}) - t({}) {} {}",
            target,
            alphabet.label(s),
            b.relation,
            b.constant
        ),
    }
}

/// Graphviz rendering: one node per event annotated with its guards and
/// resets, one arrow per covering edge.
pub fn tpo_to_dot(alphabet: &Alphabet, tpo: &Tpo) -> String {
    let mut out =
        String::from("digraph tpo {\n  rankdir=LR;\n  node [shape=box, style=rounded];\n");
    for e in alphabet.events() {
        let mut label = alphabet.label(e).to_owned();
        for c in tpo.guard(e).conjuncts() {
            let _ = write!(label, "\\nc{} {} {}", c.clock.0, c.relation, c.constant);
        }
        for r in tpo.resets(e) {
            let _ = write!(label, "\\nc{} := 0", r.0);
        }
        let _ = writeln!(out, "  \"{}\" [label=\"{}\"];", alphabet.label(e), label);
    }
    for (a, b) in tpo.order().covering_edges() {
        let _ = writeln!(
            out,
            "  \"{}\" -> \"{}\";",
            alphabet.label(a),
            alphabet.label(b)
        );
    }
    out.push_str("}\n");
    out
}
