//! Track-record gossip.
//!
//! Each robot keeps, per person, the most recent sighting it knows of.
//! Robots within communication range send each other their whole store and
//! keep the greater record per person under [`record_order`]. The merge is a
//! last-writer-wins map join, so it is commutative, associative and
//! idempotent, and repeated exchanges during one encounter are harmless.

use std::cmp::Ordering;
use std::collections::btree_map::{self, BTreeMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{LocationId, PersonId, RobotId};
use crate::mobility::RobotPose;

pub const DEFAULT_COMM_RADIUS: f64 = 2.5;

/// One sighting of a person.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackRecord {
    pub person_id: PersonId,
    pub location: LocationId,
    /// Simulation time of the observation, seconds.
    pub timestamp: f64,
    pub observer: RobotId,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GossipError {
    #[error("cannot order records of different persons ({0} vs {1})")]
    PersonMismatch(PersonId, PersonId),
}

/// Total order on records of the same person: timestamp, then observer, then
/// location. The greater record wins a merge.
pub fn record_order(a: &TrackRecord, b: &TrackRecord) -> Result<Ordering, GossipError> {
    if a.person_id != b.person_id {
        return Err(GossipError::PersonMismatch(a.person_id, b.person_id));
    }
    Ok(a
        .timestamp
        .total_cmp(&b.timestamp)
        .then(a.observer.cmp(&b.observer))
        .then(a.location.cmp(&b.location)))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BeliefStore {
    records: BTreeMap<PersonId, TrackRecord>,
}

impl BeliefStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, person: PersonId) -> Option<&TrackRecord> {
        self.records.get(&person)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in ascending person order.
    pub fn records(&self) -> impl Iterator<Item = &TrackRecord> {
        self.records.values()
    }

    /// Inserts `incoming` if the person is unknown, otherwise keeps the
    /// greater of the two records. Returns whether the store changed.
    pub fn merge_record(&mut self, incoming: TrackRecord) -> bool {
        match self.records.entry(incoming.person_id) {
            btree_map::Entry::Vacant(slot) => {
                slot.insert(incoming);
                true
            }
            btree_map::Entry::Occupied(mut slot) => {
                let keep_incoming = record_order(&incoming, slot.get())
                    .expect("entry key equals the record's person")
                    == Ordering::Greater;
                if keep_incoming {
                    slot.insert(incoming);
                }
                keep_incoming
            }
        }
    }

    /// Merges every record of `other` into `self`.
    pub fn merge(&mut self, other: &BeliefStore) -> bool {
        other
            .records
            .values()
            .fold(false, |changed, r| self.merge_record(*r) | changed)
    }
}

impl FromIterator<TrackRecord> for BeliefStore {
    fn from_iter<I: IntoIterator<Item = TrackRecord>>(iter: I) -> Self {
        let mut store = BeliefStore::new();
        for r in iter {
            store.merge_record(r);
        }
        store
    }
}

pub fn merge_stores(mine: &BeliefStore, theirs: &BeliefStore) -> BeliefStore {
    let mut out = mine.clone();
    out.merge(theirs);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CommParams {
    /// Meters; walls do not block communication.
    pub comm_radius: f64,
}

impl Default for CommParams {
    fn default() -> Self {
        Self { comm_radius: DEFAULT_COMM_RADIUS }
    }
}

/// One communication round. Every pair within `comm_radius` merges the
/// other's start-of-round store, so information travels one hop per round.
pub fn exchange(poses: &[RobotPose], stores: &[BeliefStore], params: &CommParams) -> Vec<BeliefStore> {
    assert_eq!(poses.len(), stores.len(), "poses and stores must be index-aligned");
    let mut out = stores.to_vec();
    for i in 0..poses.len() {
        for j in i + 1..poses.len() {
            if poses[i].position.distance(poses[j].position) <= params.comm_radius {
                out[i].merge(&stores[j]);
                out[j].merge(&stores[i]);
            }
        }
    }
    out
}
