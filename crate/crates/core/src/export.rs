//! Trace and report files.
//!
//! A trace directory holds `meta.json` and either `trace.csv` plus
//! `events.csv`, or `trace.jsonl` plus `events.jsonl`. Trace columns are
//! `tick, time_s, vehicle_id, road, x_m, y_m, theta_rad, v_cmd, omega_cmd,
//! v_applied, route_s_m, zone`; event columns are `tick, type, vehicle_id,
//! payload`, where `payload` is a JSON object holding `time_s` and the
//! event-specific fields. Reals are written with 12 significant digits.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::coordination::Zone;
use crate::error::{Result, SimError};
use crate::metrics::{Comparison, MetricsReport};
use crate::trace::{Event, EventKind, Trace, TraceMeta, TraceRecord};

pub const TRACE_COLUMNS: [&str; 12] = [
    "tick",
    "time_s",
    "vehicle_id",
    "road",
    "x_m",
    "y_m",
    "theta_rad",
    "v_cmd",
    "omega_cmd",
    "v_applied",
    "route_s_m",
    "zone",
];

pub const EVENT_COLUMNS: [&str; 4] = ["tick", "type", "vehicle_id", "payload"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

impl FromStr for Format {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            other => Err(SimError::InvalidArgument(format!("unknown format `{other}` (expected csv or jsonl)"))),
        }
    }
}

/// `x` rounded to 12 significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Shortest text that reads back as `round_sig(x)`.
pub fn format_real(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn record_row(r: &TraceRecord) -> [String; 12] {
    [
        r.tick.to_string(),
        format_real(r.time),
        r.vehicle.to_string(),
        r.road.to_string(),
        format_real(r.x),
        format_real(r.y),
        format_real(r.theta),
        format_real(r.v_cmd),
        format_real(r.omega_cmd),
        format_real(r.v_applied),
        format_real(r.route_s),
        r.zone.as_str().to_string(),
    ]
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Event-specific fields plus `time_s`, without the type tag.
fn event_payload(e: &Event) -> Result<Map<String, Value>> {
    let Value::Object(mut fields) = round_value(serde_json::to_value(e.kind)?) else {
        unreachable!("event kinds serialize to objects");
    };
    fields.remove("type");
    fields.insert("time_s".into(), round_value(Value::from(e.time)));
    Ok(fields)
}

fn event_from_parts(tick: u64, kind: &str, vehicle: Option<usize>, mut payload: Map<String, Value>) -> Result<Event> {
    let time = payload
        .remove("time_s")
        .and_then(|v| v.as_f64())
        .ok_or_else(|| SimError::Parse(format!("event at tick {tick} has no time_s")))?;
    payload.insert("type".into(), Value::from(kind));
    Ok(Event {
        tick,
        time,
        vehicle,
        kind: serde_json::from_value::<EventKind>(Value::Object(payload))?,
    })
}

fn record_object(r: &TraceRecord) -> Map<String, Value> {
    let row = record_row(r);
    TRACE_COLUMNS
        .iter()
        .zip(row)
        .map(|(&k, text)| {
            let v = match k {
                "zone" => Value::from(text),
                "tick" | "vehicle_id" | "road" => Value::from(text.parse::<u64>().expect("integer column")),
                _ => serde_json::Number::from_f64(text.parse().expect("real column")).map_or(Value::Null, Value::Number),
            };
            (k.to_string(), v)
        })
        .collect()
}

fn parse_record(get: impl Fn(&str) -> Option<String>) -> Result<TraceRecord> {
    let field = |k: &str| get(k).ok_or_else(|| SimError::Parse(format!("trace row is missing `{k}`")));
    let real = |k: &str| -> Result<f64> {
        field(k)?
            .parse()
            .map_err(|_| SimError::Parse(format!("`{k}` is not a number")))
    };
    let int = |k: &str| -> Result<u64> {
        field(k)?
            .parse()
            .map_err(|_| SimError::Parse(format!("`{k}` is not an integer")))
    };
    let zone = field("zone")?;
    Ok(TraceRecord {
        tick: int("tick")?,
        time: real("time_s")?,
        vehicle: int("vehicle_id")? as usize,
        road: u8::try_from(int("road")?).map_err(|_| SimError::Parse("`road` out of range".into()))?,
        x: real("x_m")?,
        y: real("y_m")?,
        theta: real("theta_rad")?,
        v_cmd: real("v_cmd")?,
        omega_cmd: real("omega_cmd")?,
        v_applied: real("v_applied")?,
        route_s: real("route_s_m")?,
        zone: Zone::parse(&zone).ok_or_else(|| SimError::Parse(format!("unknown zone `{zone}`")))?,
    })
}

/// Writes `trace` into `dir` and returns the paths written.
pub fn export_trace(trace: &Trace, format: Format, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let ext = format.extension();
    let trace_path = dir.join(format!("trace.{ext}"));
    let events_path = dir.join(format!("events.{ext}"));
    let meta_path = dir.join("meta.json");
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_path(&trace_path)?;
            w.write_record(TRACE_COLUMNS)?;
            for r in &trace.records {
                w.write_record(record_row(r))?;
            }
            w.flush()?;
            let mut w = csv::Writer::from_path(&events_path)?;
            w.write_record(EVENT_COLUMNS)?;
            for e in &trace.events {
                w.write_record([
                    e.tick.to_string(),
                    e.kind.name().to_string(),
                    e.vehicle.map_or(String::new(), |v| v.to_string()),
                    Value::Object(event_payload(e)?).to_string(),
                ])?;
            }
            w.flush()?;
        }
        Format::Jsonl => {
            let mut out = String::new();
            for r in &trace.records {
                out.push_str(&Value::Object(record_object(r)).to_string());
                out.push('\n');
            }
            fs::write(&trace_path, out)?;
            let mut out = String::new();
            for e in &trace.events {
                let mut obj = Map::new();
                obj.insert("tick".into(), Value::from(e.tick));
                obj.insert("type".into(), Value::from(e.kind.name()));
                obj.insert("vehicle_id".into(), e.vehicle.map_or(Value::Null, Value::from));
                obj.insert("payload".into(), Value::Object(event_payload(e)?));
                out.push_str(&Value::Object(obj).to_string());
                out.push('\n');
            }
            fs::write(&events_path, out)?;
        }
    }
    fs::write(&meta_path, serde_json::to_string_pretty(&trace.meta)?)?;
    Ok(vec![trace_path, events_path, meta_path])
}

/// Reads a trace directory written by [`export_trace`].
pub fn import_trace(dir: impl AsRef<Path>) -> Result<Trace> {
    let dir = dir.as_ref();
    let meta: TraceMeta = serde_json::from_str(&fs::read_to_string(dir.join("meta.json"))?)?;
    let mut trace = Trace::new(meta);
    if dir.join("trace.csv").exists() {
        let mut r = csv::Reader::from_path(dir.join("trace.csv"))?;
        let headers = r.headers()?.clone();
        if headers.iter().ne(TRACE_COLUMNS) {
            return Err(SimError::Parse(format!("unexpected trace columns {headers:?}")));
        }
        for row in r.records() {
            let row = row?;
            trace.records.push(parse_record(|k| {
                headers.iter().position(|h| h == k).and_then(|i| row.get(i)).map(str::to_string)
            })?);
        }
        let mut r = csv::Reader::from_path(dir.join("events.csv"))?;
        for row in r.records() {
            let row = row?;
            let tick = row[0].parse().map_err(|_| SimError::Parse("event tick".into()))?;
            let vehicle = if row[2].is_empty() {
                None
            } else {
                Some(row[2].parse().map_err(|_| SimError::Parse("event vehicle_id".into()))?)
            };
            let payload: Map<String, Value> = serde_json::from_str(&row[3])?;
            trace.events.push(event_from_parts(tick, &row[1], vehicle, payload)?);
        }
    } else {
        for line in fs::read_to_string(dir.join("trace.jsonl"))?.lines() {
            let obj: Map<String, Value> = serde_json::from_str(line)?;
            trace.records.push(parse_record(|k| {
                obj.get(k).map(|v| match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
            })?);
        }
        for line in fs::read_to_string(dir.join("events.jsonl"))?.lines() {
            let mut obj: Map<String, Value> = serde_json::from_str(line)?;
            let tick = obj.get("tick").and_then(Value::as_u64).ok_or_else(|| SimError::Parse("event tick".into()))?;
            let kind = obj
                .get("type")
                .and_then(Value::as_str)
                .ok_or_else(|| SimError::Parse("event type".into()))?
                .to_string();
            let vehicle = obj.get("vehicle_id").and_then(Value::as_u64).map(|v| v as usize);
            let Some(Value::Object(payload)) = obj.remove("payload") else {
                return Err(SimError::Parse("event payload".into()));
            };
            trace.events.push(event_from_parts(tick, &kind, vehicle, payload)?);
        }
    }
    Ok(trace)
}

/// Metrics report as TOML key/value text.
pub fn write_report(report: &MetricsReport, path: impl AsRef<Path>) -> Result<()> {
    let text = toml::to_string(report).map_err(|e| SimError::Parse(e.to_string()))?;
    fs::write(path, text)?;
    Ok(())
}

pub fn read_report(path: impl AsRef<Path>) -> Result<MetricsReport> {
    toml::from_str(&fs::read_to_string(path)?).map_err(|e| SimError::Parse(e.to_string()))
}

pub fn comparison_to_toml(c: &Comparison) -> Result<String> {
    toml::to_string(c).map_err(|e| SimError::Parse(e.to_string()))
}
