//! Event detection and propagation delays.
//!
//! An event is a person entering a room. For each event we measure how long
//! it takes until some robot observes the person there (detection) and
//! until 25 %, 50 % and 75 % of the swarm simultaneously believe the person
//! is in that room (propagation). All delays are measured from the moment
//! of entry. Events that never reach a milestone are censored: they stay in
//! the denominator of the distribution but contribute no step.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{BeliefRow, RunLog};
use crate::environment::LocationKind;
use crate::ids::{LocationId, PersonId};
use crate::SCHEMA_VERSION;

/// Events this close to the end of a run are ignored: there is not enough
/// time left to observe their propagation.
pub const TAIL_EXCLUSION: f64 = 180.0;

const TIME_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("propagation fraction must be 0.25, 0.5 or 0.75, got {0}")]
    Fraction(f64),
    #[error("no events to build a distribution from")]
    NoEvents,
    #[error("no run logs given")]
    NoLogs,
    #[error("logs mix swarm sizes {0} and {1}")]
    MixedSwarmSizes(usize, usize),
}

/// A person entering a room.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub person_id: PersonId,
    pub room: LocationId,
    pub t_enter: f64,
}

/// Share of the swarm that must be aware of an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Fraction {
    Quarter,
    Half,
    ThreeQuarters,
}

impl Fraction {
    pub const ALL: [Fraction; 3] = [Fraction::Quarter, Fraction::Half, Fraction::ThreeQuarters];

    pub fn value(self) -> f64 {
        match self {
            Fraction::Quarter => 0.25,
            Fraction::Half => 0.5,
            Fraction::ThreeQuarters => 0.75,
        }
    }

    /// Robots needed: `ceil(fraction × n_robots)`.
    pub fn threshold(self, n_robots: usize) -> usize {
        (self.value() * n_robots as f64).ceil() as usize
    }
}

impl TryFrom<f64> for Fraction {
    type Error = MetricsError;

    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Fraction::ALL
            .into_iter()
            .find(|f| f.value() == v)
            .ok_or(MetricsError::Fraction(v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventOutcome {
    pub event: Event,
    pub detect_delay: Option<f64>,
    /// Indexed like [`Fraction::ALL`].
    pub prop_delay: [Option<f64>; 3],
}

/// Room entries up to `duration - TAIL_EXCLUSION`, in time order.
pub fn extract_events(log: &RunLog) -> Vec<Event> {
    let cutoff = log.config.duration - TAIL_EXCLUSION + TIME_EPS;
    let mut events: Vec<Event> = log
        .transitions
        .iter()
        .filter(|t| t.to_kind == LocationKind::Room && t.time <= cutoff)
        .map(|t| Event { person_id: t.person_id, room: t.to, t_enter: t.time })
        .collect();
    events.sort_by(|a, b| a.t_enter.total_cmp(&b.t_enter).then(a.person_id.cmp(&b.person_id)));
    events
}

/// Time of the person's first move strictly after `t`.
fn next_move(log: &RunLog, person: PersonId, t: f64) -> f64 {
    log.transitions
        .iter()
        .filter(|tr| tr.person_id == person && tr.time > t)
        .map(|tr| tr.time)
        .fold(f64::INFINITY, f64::min)
}

/// Delay until the first observation of the person in the entered room
/// during that same stay.
pub fn detection_delay(e: &Event, log: &RunLog) -> Option<f64> {
    let leave = next_move(log, e.person_id, e.t_enter);
    log.observations
        .iter()
        .map(|o| &o.record)
        .filter(|r| r.person_id == e.person_id && r.location == e.room)
        .filter(|r| r.timestamp >= e.t_enter && r.timestamp < leave)
        .map(|r| r.timestamp - e.t_enter)
        .reduce(f64::min)
}

fn is_aware(row: &BeliefRow, e: &Event) -> bool {
    row.record.person_id == e.person_id && row.record.location == e.room && row.record.timestamp >= e.t_enter
}

/// Belief snapshots of a log, grouped by tick.
struct Snapshots<'a> {
    groups: Vec<(f64, &'a [BeliefRow])>,
}

impl<'a> Snapshots<'a> {
    fn new(beliefs: &'a [BeliefRow]) -> Self {
        let groups = beliefs
            .chunk_by(|a, b| a.tick == b.tick)
            .map(|rows| (rows[0].time, rows))
            .collect();
        Self { groups }
    }

    /// Delay until each threshold in `thresholds` is first met.
    fn crossings<const N: usize>(&self, e: &Event, thresholds: [usize; N]) -> [Option<f64>; N] {
        let mut out = [None; N];
        let start = self.groups.partition_point(|(t, _)| *t < e.t_enter);
        for (time, rows) in &self.groups[start..] {
            let aware = rows.iter().filter(|r| is_aware(r, e)).count();
            for (slot, &needed) in out.iter_mut().zip(&thresholds) {
                if slot.is_none() && aware >= needed {
                    *slot = Some(time - e.t_enter);
                }
            }
            if out.iter().all(Option::is_some) {
                break;
            }
        }
        out
    }
}

/// Delay until `fraction` of the `n_robots` robots simultaneously hold a
/// belief placing the person in the entered room, no older than the entry.
/// `None` if the event was never detected or the threshold was never met.
pub fn propagation_delay(e: &Event, log: &RunLog, fraction: f64, n_robots: usize) -> Result<Option<f64>, MetricsError> {
    let fraction = Fraction::try_from(fraction)?;
    if detection_delay(e, log).is_none() {
        return Ok(None);
    }
    let [d] = Snapshots::new(&log.beliefs).crossings(e, [fraction.threshold(n_robots)]);
    Ok(d)
}

/// Detection and propagation outcomes of every event in a log.
pub fn event_outcomes(log: &RunLog) -> Vec<EventOutcome> {
    let n = log.config.n_robots;
    let snapshots = Snapshots::new(&log.beliefs);
    let thresholds = Fraction::ALL.map(|f| f.threshold(n));
    extract_events(log)
        .into_iter()
        .map(|event| {
            let detect_delay = detection_delay(&event, log);
            let prop_delay = if detect_delay.is_some() {
                snapshots.crossings(&event, thresholds)
            } else {
                [None; 3]
            };
            EventOutcome { event, detect_delay, prop_delay }
        })
        .collect()
}

/// Empirical CDF over all events, censored ones included in the denominator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ecdf {
    pub total: usize,
    /// `(delay_s, cumulative_fraction)` at each distinct observed delay.
    pub points: Vec<(f64, f64)>,
}

pub fn ecdf(delays: &[Option<f64>]) -> Result<Ecdf, MetricsError> {
    if delays.is_empty() {
        return Err(MetricsError::NoEvents);
    }
    let total = delays.len();
    let mut defined: Vec<f64> = delays.iter().flatten().copied().collect();
    defined.sort_by(f64::total_cmp);
    let mut points: Vec<(f64, f64)> = Vec::new();
    for (i, d) in defined.iter().enumerate() {
        let frac = (i + 1) as f64 / total as f64;
        match points.last_mut() {
            Some(last) if last.0 == *d => last.1 = frac,
            _ => points.push((*d, frac)),
        }
    }
    Ok(Ecdf { total, points })
}

impl Ecdf {
    pub fn value_at(&self, x: f64) -> f64 {
        self.points
            .iter()
            .take_while(|(d, _)| *d <= x)
            .last()
            .map_or(0.0, |p| p.1)
    }

    /// Final height: uncensored count over total.
    pub fn plateau(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.1)
    }

    /// Smallest delay at which the curve reaches `q`, if it ever does.
    pub fn quantile(&self, q: f64) -> Option<f64> {
        self.points.iter().find(|(_, f)| *f >= q).map(|p| p.0)
    }

    pub fn median(&self) -> Option<f64> {
        self.quantile(0.5)
    }
}

/// Pooled statistics of one delay metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub reached: usize,
    pub censored: usize,
    /// Fraction of events that reached the milestone.
    pub rate: f64,
    /// Median over all events, censored ones counted as infinite.
    pub median_s: Option<f64>,
    pub curve: Ecdf,
}

impl MetricSummary {
    /// With no events at all the rate is 0 and the curve empty.
    fn from_delays(delays: &[Option<f64>]) -> Self {
        let curve = ecdf(delays).unwrap_or(Ecdf { total: 0, points: Vec::new() });
        let reached = delays.iter().flatten().count();
        Self {
            reached,
            censored: delays.len() - reached,
            rate: if delays.is_empty() { 0.0 } else { reached as f64 / delays.len() as f64 },
            median_s: curve.median(),
            curve,
        }
    }
}

/// The four delay metrics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Detect,
    Prop25,
    Prop50,
    Prop75,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Detect, Metric::Prop25, Metric::Prop50, Metric::Prop75];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Detect => "detect",
            Metric::Prop25 => "prop25",
            Metric::Prop50 => "prop50",
            Metric::Prop75 => "prop75",
        }
    }
}

/// Results of all runs with one swarm size, events pooled across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeReport {
    pub n_robots: usize,
    pub n_runs: usize,
    pub n_events: usize,
    pub detect: MetricSummary,
    pub prop25: MetricSummary,
    pub prop50: MetricSummary,
    pub prop75: MetricSummary,
}

impl SizeReport {
    pub fn metric(&self, m: Metric) -> &MetricSummary {
        match m {
            Metric::Detect => &self.detect,
            Metric::Prop25 => &self.prop25,
            Metric::Prop50 => &self.prop50,
            Metric::Prop75 => &self.prop75,
        }
    }

    pub fn detection_rate(&self) -> f64 {
        self.detect.rate
    }
}

/// Pools the events of logs that share a swarm size.
pub fn aggregate(logs: &[RunLog]) -> Result<SizeReport, MetricsError> {
    let n_robots = logs.first().ok_or(MetricsError::NoLogs)?.config.n_robots;
    if let Some(other) = logs.iter().find(|l| l.config.n_robots != n_robots) {
        return Err(MetricsError::MixedSwarmSizes(n_robots, other.config.n_robots));
    }
    let outcomes: Vec<EventOutcome> = logs.iter().flat_map(event_outcomes).collect();
    let detect: Vec<Option<f64>> = outcomes.iter().map(|o| o.detect_delay).collect();
    let prop = |i: usize| -> Vec<Option<f64>> { outcomes.iter().map(|o| o.prop_delay[i]).collect() };
    Ok(SizeReport {
        n_robots,
        n_runs: logs.len(),
        n_events: outcomes.len(),
        detect: MetricSummary::from_delays(&detect),
        prop25: MetricSummary::from_delays(&prop(0)),
        prop50: MetricSummary::from_delays(&prop(1)),
        prop75: MetricSummary::from_delays(&prop(2)),
    })
}

/// Per-swarm-size reports, ascending by size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub sizes: Vec<SizeReport>,
}

impl MetricsReport {
    pub fn new(mut sizes: Vec<SizeReport>) -> Self {
        sizes.sort_by_key(|s| s.n_robots);
        Self { schema_version: SCHEMA_VERSION, sizes }
    }

    /// Groups logs by swarm size and aggregates each group.
    pub fn from_logs(logs: &[RunLog]) -> Result<Self, MetricsError> {
        if logs.is_empty() {
            return Err(MetricsError::NoLogs);
        }
        let mut groups: BTreeMap<usize, Vec<RunLog>> = BTreeMap::new();
        for log in logs {
            groups.entry(log.config.n_robots).or_default().push(log.clone());
        }
        let sizes = groups
            .values()
            .map(|g| aggregate(g))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(sizes))
    }

    pub fn size(&self, n_robots: usize) -> Option<&SizeReport> {
        self.sizes.iter().find(|s| s.n_robots == n_robots)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
