//! Normalized match input: metadata, timeline events and one-minute frames.
//!
//! A match document is a JSON object with three top-level keys:
//!
//! ```json
//! {
//!   "meta":   { "match_id": "...", "duration_ms": 1800000, "winner": "blue",
//!               "players": [ { "participant_id": 1, "team": "blue",
//!                              "champion": "Annie", "lane": "Mid" }, ... ] },
//!   "events": [ { "timestamp_ms": 61000, "kind": "CHAMPION_KILL", "actor": 3,
//!                 "assisting": [4], "victim": 7, "position": [7400, 7100],
//!                 "payload": { "damage": [ { "participant": 3, "amount": 900 } ] } } ],
//!   "frames": [ { "timestamp_ms": 0, "players": [ { "participant_id": 1,
//!                 "position": [500, 500], "total_gold": 500, "minions_killed": 0,
//!                 "jungle_minions_killed": 0, "level": 1 }, ... ] } ]
//! }
//! ```
//!
//! Coordinates are raw map units in `[0, 15000]`, timestamps are milliseconds.

mod events;
mod geometry;
mod roles;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use events::{derive_events, DerivedEvent};
pub use geometry::{compute_distance, impute_position, interpolate_player, NormPoint};
pub use roles::{ChampionRoleTable, Role, RoleVector};

/// Side length of the map in raw coordinate units.
pub const MAP_SIZE: f64 = 15_000.0;
/// Spacing between consecutive frames.
pub const FRAME_INTERVAL_MS: u64 = 60_000;
pub const PLAYERS_PER_MATCH: usize = 10;
pub const PLAYERS_PER_TEAM: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParticipantId(pub u8);

impl ParticipantId {
    pub fn new(id: u8) -> Option<Self> {
        (1..=PLAYERS_PER_MATCH as u8).contains(&id).then_some(Self(id))
    }

    /// Zero-based slot, `0..10`.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn from_index(index: usize) -> Self {
        debug_assert!(index < PLAYERS_PER_MATCH);
        Self(index as u8 + 1)
    }

    pub fn team(self) -> Team {
        if self.0 <= PLAYERS_PER_TEAM as u8 {
            Team::Blue
        } else {
            Team::Red
        }
    }

    /// Position within the team, `0..5`.
    pub fn team_slot(self) -> usize {
        self.index() % PLAYERS_PER_TEAM
    }

    pub fn all() -> impl Iterator<Item = ParticipantId> {
        (1..=PLAYERS_PER_MATCH as u8).map(ParticipantId)
    }

    fn is_valid(self) -> bool {
        (1..=PLAYERS_PER_MATCH as u8).contains(&self.0)
    }
}

impl fmt::Display for ParticipantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Team {
    Blue,
    Red,
}

impl Team {
    pub fn opponent(self) -> Team {
        match self {
            Team::Blue => Team::Red,
            Team::Red => Team::Blue,
        }
    }

    pub fn members(self) -> impl Iterator<Item = ParticipantId> {
        let first = match self {
            Team::Blue => 1u8,
            Team::Red => 6,
        };
        (first..first + PLAYERS_PER_TEAM as u8).map(ParticipantId)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Team::Blue => "blue",
            Team::Red => "red",
        }
    }
}

impl fmt::Display for Team {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Team {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "blue" => Ok(Team::Blue),
            "red" => Ok(Team::Red),
            other => Err(Error::validation(
                "team",
                format!("expected blue or red, got {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Lane {
    Top,
    Mid,
    Bottom,
    Utility,
    Jungle,
}

impl Lane {
    /// Feature-vector order.
    pub const ALL: [Lane; 5] = [Lane::Top, Lane::Mid, Lane::Bottom, Lane::Utility, Lane::Jungle];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Lane::Top => "Top",
            Lane::Mid => "Mid",
            Lane::Bottom => "Bottom",
            Lane::Utility => "Utility",
            Lane::Jungle => "Jungle",
        }
    }
}

impl fmt::Display for Lane {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The ten event kinds present in raw timelines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum RawEventKind {
    ItemPurchased,
    ItemSold,
    ItemDestroyed,
    SkillLevelUp,
    LevelUp,
    WardPlaced,
    WardKill,
    ChampionKill,
    BuildingKill,
    EliteMonsterKill,
}

/// All fourteen kinds after assist/victim expansion, in feature-vector order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    ItemPurchased,
    ItemSold,
    ItemDestroyed,
    SkillLevelUp,
    LevelUp,
    WardPlaced,
    WardKill,
    ChampionKill,
    ChampionKillAssist,
    ChampionKillVictim,
    BuildingKill,
    BuildingKillAssist,
    EliteMonsterKill,
    EliteMonsterKillAssist,
}

impl EventKind {
    pub const COUNT: usize = 14;

    pub const ALL: [EventKind; Self::COUNT] = [
        EventKind::ItemPurchased,
        EventKind::ItemSold,
        EventKind::ItemDestroyed,
        EventKind::SkillLevelUp,
        EventKind::LevelUp,
        EventKind::WardPlaced,
        EventKind::WardKill,
        EventKind::ChampionKill,
        EventKind::ChampionKillAssist,
        EventKind::ChampionKillVictim,
        EventKind::BuildingKill,
        EventKind::BuildingKillAssist,
        EventKind::EliteMonsterKill,
        EventKind::EliteMonsterKillAssist,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ItemPurchased => "ITEM_PURCHASED",
            EventKind::ItemSold => "ITEM_SOLD",
            EventKind::ItemDestroyed => "ITEM_DESTROYED",
            EventKind::SkillLevelUp => "SKILL_LEVEL_UP",
            EventKind::LevelUp => "LEVEL_UP",
            EventKind::WardPlaced => "WARD_PLACED",
            EventKind::WardKill => "WARD_KILL",
            EventKind::ChampionKill => "CHAMPION_KILL",
            EventKind::ChampionKillAssist => "CHAMPION_KILL_ASSIST",
            EventKind::ChampionKillVictim => "CHAMPION_KILL_VICTIM",
            EventKind::BuildingKill => "BUILDING_KILL",
            EventKind::BuildingKillAssist => "BUILDING_KILL_ASSIST",
            EventKind::EliteMonsterKill => "ELITE_MONSTER_KILL",
            EventKind::EliteMonsterKillAssist => "ELITE_MONSTER_KILL_ASSIST",
        }
    }
}

impl From<RawEventKind> for EventKind {
    fn from(kind: RawEventKind) -> Self {
        match kind {
            RawEventKind::ItemPurchased => EventKind::ItemPurchased,
            RawEventKind::ItemSold => EventKind::ItemSold,
            RawEventKind::ItemDestroyed => EventKind::ItemDestroyed,
            RawEventKind::SkillLevelUp => EventKind::SkillLevelUp,
            RawEventKind::LevelUp => EventKind::LevelUp,
            RawEventKind::WardPlaced => EventKind::WardPlaced,
            RawEventKind::WardKill => EventKind::WardKill,
            RawEventKind::ChampionKill => EventKind::ChampionKill,
            RawEventKind::BuildingKill => EventKind::BuildingKill,
            RawEventKind::EliteMonsterKill => EventKind::EliteMonsterKill,
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Raw map coordinate pair, serialized as `[x, y]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapPoint(pub u32, pub u32);

impl MapPoint {
    pub fn normalized(self) -> NormPoint {
        NormPoint {
            x: self.0 as f64 / MAP_SIZE,
            y: self.1 as f64 / MAP_SIZE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DamageShare {
    pub participant: ParticipantId,
    pub amount: f64,
}

/// Kind-specific numbers. Which fields are required depends on the event kind;
/// missing ones surface when the event weight is computed.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Payload {
    /// Gold cost of a purchased or destroyed item.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub item_cost: Option<f64>,
    /// Gold received for a sold item.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sell_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub skill_level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_skill_level: Option<u32>,
    /// Player level reached by a LEVEL_UP.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ward_bounty: Option<f64>,
    /// Damage each attacker dealt to the victim of a champion kill.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub damage: Vec<DamageShare>,
    /// Damage the victim dealt to its attackers before dying.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim_damage_dealt: Option<f64>,
    /// Total damage received by the victim; defaults to the sum of `damage`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub total_damage_received: Option<f64>,
    /// Players involved in a building or elite-monster kill; defaults to actor + assisters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involved: Option<u32>,
}

impl Payload {
    pub fn damage_by(&self, participant: ParticipantId) -> f64 {
        self.damage
            .iter()
            .filter(|d| d.participant == participant)
            .map(|d| d.amount)
            .sum()
    }

    pub fn total_damage(&self) -> f64 {
        self.total_damage_received
            .unwrap_or_else(|| self.damage.iter().map(|d| d.amount).sum())
    }

    fn check_non_negative(&self, field_prefix: &str) -> Result<()> {
        let numbers = [
            ("item_cost", self.item_cost),
            ("sell_value", self.sell_value),
            ("ward_bounty", self.ward_bounty),
            ("victim_damage_dealt", self.victim_damage_dealt),
            ("total_damage_received", self.total_damage_received),
        ];
        for (name, value) in numbers {
            if let Some(v) = value {
                if !(v.is_finite() && v >= 0.0) {
                    return Err(Error::validation(
                        format!("{field_prefix}.{name}"),
                        format!("must be a finite number >= 0, got {v}"),
                    ));
                }
            }
        }
        for (i, share) in self.damage.iter().enumerate() {
            if !(share.amount.is_finite() && share.amount >= 0.0) {
                return Err(Error::validation(
                    format!("{field_prefix}.damage[{i}].amount"),
                    format!("must be a finite number >= 0, got {}", share.amount),
                ));
            }
            if !share.participant.is_valid() {
                return Err(Error::validation(
                    format!("{field_prefix}.damage[{i}].participant"),
                    format!("participant {} outside 1..10", share.participant),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimelineEvent {
    pub timestamp_ms: u64,
    pub kind: RawEventKind,
    pub actor: ParticipantId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assisting: Vec<ParticipantId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub victim: Option<ParticipantId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub position: Option<MapPoint>,
    #[serde(default)]
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerInfo {
    pub participant_id: ParticipantId,
    pub team: Team,
    pub champion: String,
    pub lane: Lane,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchRecord {
    pub match_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_version: Option<String>,
    pub duration_ms: u64,
    pub winner: Team,
    pub players: Vec<PlayerInfo>,
}

impl MatchRecord {
    /// Player metadata indexed by slot; only valid after [`parse_match`] validation.
    pub fn player(&self, id: ParticipantId) -> &PlayerInfo {
        self.players
            .iter()
            .find(|p| p.participant_id == id)
            .expect("validated record holds every participant")
    }

    pub fn lanes(&self) -> [Lane; PLAYERS_PER_MATCH] {
        std::array::from_fn(|i| self.player(ParticipantId::from_index(i)).lane)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlayerFrame {
    pub participant_id: ParticipantId,
    pub position: MapPoint,
    pub total_gold: u32,
    pub minions_killed: u32,
    pub jungle_minions_killed: u32,
    pub level: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameSnapshot {
    pub timestamp_ms: u64,
    pub players: Vec<PlayerFrame>,
}

impl FrameSnapshot {
    pub fn player(&self, id: ParticipantId) -> &PlayerFrame {
        self.players
            .iter()
            .find(|p| p.participant_id == id)
            .expect("validated frame holds every participant")
    }
}

/// A parsed and validated match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatchDocument {
    pub meta: MatchRecord,
    pub events: Vec<TimelineEvent>,
    pub frames: Vec<FrameSnapshot>,
}

impl MatchDocument {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("match document serializes")
    }
}

/// Parses and validates one match document. Events are stably sorted by timestamp.
pub fn parse_match(bytes: &[u8]) -> Result<MatchDocument> {
    let mut doc: MatchDocument = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        offset: byte_offset(bytes, e.line(), e.column()),
        message: e.to_string(),
    })?;
    doc.events.sort_by_key(|e| e.timestamp_ms);
    validate(&doc)?;
    Ok(doc)
}

fn byte_offset(bytes: &[u8], line: usize, column: usize) -> usize {
    let mut start = 0;
    for _ in 1..line {
        match bytes[start..].iter().position(|&b| b == b'\n') {
            Some(p) => start += p + 1,
            None => return bytes.len(),
        }
    }
    (start + column.saturating_sub(1)).min(bytes.len())
}

/// Checks every structural invariant of a match document.
pub fn validate(doc: &MatchDocument) -> Result<()> {
    validate_meta(&doc.meta)?;
    for (i, event) in doc.events.iter().enumerate() {
        validate_event(event, i, doc.meta.duration_ms)?;
    }
    validate_frames(&doc.frames)
}

fn validate_meta(meta: &MatchRecord) -> Result<()> {
    if meta.players.len() != PLAYERS_PER_MATCH {
        return Err(Error::validation(
            "meta.players",
            format!("expected exactly 10 players, got {}", meta.players.len()),
        ));
    }
    let mut seen = [false; PLAYERS_PER_MATCH];
    for (i, player) in meta.players.iter().enumerate() {
        let pid = player.participant_id;
        let field = format!("meta.players[{i}].participant_id");
        if !pid.is_valid() {
            return Err(Error::validation(field, format!("participant {pid} outside 1..10")));
        }
        if std::mem::replace(&mut seen[pid.index()], true) {
            return Err(Error::validation(field, format!("duplicate participant {pid}")));
        }
        if player.team != pid.team() {
            return Err(Error::validation(
                format!("meta.players[{i}].team"),
                format!("participant {pid} belongs to team {}", pid.team()),
            ));
        }
        if player.champion.trim().is_empty() {
            return Err(Error::validation(
                format!("meta.players[{i}].champion"),
                "empty champion name",
            ));
        }
    }
    Ok(())
}

fn validate_event(event: &TimelineEvent, i: usize, duration_ms: u64) -> Result<()> {
    let field = |name: &str| format!("events[{i}].{name}");
    if event.timestamp_ms > duration_ms {
        return Err(Error::validation(
            field("timestamp_ms"),
            format!("{} exceeds match duration {duration_ms}", event.timestamp_ms),
        ));
    }
    if !event.actor.is_valid() {
        return Err(Error::validation(
            field("actor"),
            format!("participant {} outside 1..10", event.actor),
        ));
    }
    let mut assists = [false; PLAYERS_PER_MATCH];
    for &a in &event.assisting {
        if !a.is_valid() {
            return Err(Error::validation(
                field("assisting"),
                format!("participant {a} outside 1..10"),
            ));
        }
        if a == event.actor {
            return Err(Error::validation(
                field("assisting"),
                "actor listed as its own assister",
            ));
        }
        if std::mem::replace(&mut assists[a.index()], true) {
            return Err(Error::validation(field("assisting"), format!("duplicate assister {a}")));
        }
    }
    if let Some(victim) = event.victim {
        if !victim.is_valid() {
            return Err(Error::validation(
                field("victim"),
                format!("participant {victim} outside 1..10"),
            ));
        }
        if victim == event.actor {
            return Err(Error::validation(field("victim"), "victim equals actor"));
        }
    }
    if let Some(p) = event.position {
        check_coordinate(p, &field("position"))?;
    }
    event.payload.check_non_negative(&field("payload"))
}

fn check_coordinate(p: MapPoint, field: &str) -> Result<()> {
    let limit = MAP_SIZE as u32;
    if p.0 > limit || p.1 > limit {
        return Err(Error::validation(
            field,
            format!("coordinates ({}, {}) outside [0, 15000]", p.0, p.1),
        ));
    }
    Ok(())
}

fn validate_frames(frames: &[FrameSnapshot]) -> Result<()> {
    if frames.is_empty() {
        return Err(Error::validation("frames", "at least the frame at t=0 is required"));
    }
    for (i, frame) in frames.iter().enumerate() {
        let expected = i as u64 * FRAME_INTERVAL_MS;
        if frame.timestamp_ms != expected {
            return Err(Error::validation(
                format!("frames[{i}].timestamp_ms"),
                format!("expected {expected}, got {}", frame.timestamp_ms),
            ));
        }
        if frame.players.len() != PLAYERS_PER_MATCH {
            return Err(Error::validation(
                format!("frames[{i}].players"),
                format!("expected 10 player records, got {}", frame.players.len()),
            ));
        }
        let mut seen = [false; PLAYERS_PER_MATCH];
        for (j, p) in frame.players.iter().enumerate() {
            let field = format!("frames[{i}].players[{j}].participant_id");
            if !p.participant_id.is_valid() {
                return Err(Error::validation(
                    field,
                    format!("participant {} outside 1..10", p.participant_id),
                ));
            }
            if std::mem::replace(&mut seen[p.participant_id.index()], true) {
                return Err(Error::validation(
                    field,
                    format!("duplicate participant {}", p.participant_id),
                ));
            }
            check_coordinate(p.position, &format!("frames[{i}].players[{j}].position"))?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn minimal_json(ids: [u8; 10]) -> String {
        let lanes = ["Top", "Mid", "Bottom", "Utility", "Jungle"];
        let players: Vec<String> = ids
            .iter()
            .enumerate()
            .map(|(i, id)| {
                let team = if *id <= 5 { "blue" } else { "red" };
                format!(
                    r#"{{"participant_id": {id}, "team": "{team}", "champion": "Annie", "lane": "{}"}}"#,
                    lanes[i % 5]
                )
            })
            .collect();
        let frame_players: Vec<String> = (1..=10)
            .map(|id| {
                format!(
                    r#"{{"participant_id": {id}, "position": [0, 0], "total_gold": 500, "minions_killed": 0, "jungle_minions_killed": 0, "level": 1}}"#
                )
            })
            .collect();
        format!(
            r#"{{"meta": {{"match_id": "m1", "duration_ms": 1000, "winner": "blue", "players": [{}]}},
                "events": [],
                "frames": [{{"timestamp_ms": 0, "players": [{}]}}]}}"#,
            players.join(","),
            frame_players.join(",")
        )
    }

    #[test]
    fn minimal_document_parses() {
        let doc = parse_match(minimal_json([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).as_bytes()).unwrap();
        assert_eq!(doc.meta.players.len(), 10);
        assert!(doc.events.is_empty());
        assert_eq!(doc.frames.len(), 1);
    }

    #[test]
    fn duplicate_participant_rejected() {
        let err = parse_match(minimal_json([1, 2, 3, 4, 5, 6, 7, 8, 9, 9]).as_bytes()).unwrap_err();
        match err {
            Error::Validation { field, message } => {
                assert!(field.contains("participant_id"), "{field}");
                assert!(message.contains("duplicate participant"), "{message}");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_json_reports_offset() {
        let text = "{\n  \"meta\": [1, 2,\n}";
        match parse_match(text.as_bytes()).unwrap_err() {
            Error::Parse { offset, .. } => assert!(offset > 0 && offset <= text.len()),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn actor_in_assists_rejected() {
        let mut doc = parse_match(minimal_json([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).as_bytes()).unwrap();
        doc.events.push(TimelineEvent {
            timestamp_ms: 10,
            kind: RawEventKind::BuildingKill,
            actor: ParticipantId(2),
            assisting: vec![ParticipantId(2)],
            victim: None,
            position: None,
            payload: Payload::default(),
        });
        let err = parse_match(doc.to_json().as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "events[0].assisting"));
    }

    #[test]
    fn event_after_duration_rejected() {
        let mut doc = parse_match(minimal_json([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).as_bytes()).unwrap();
        doc.events.push(TimelineEvent {
            timestamp_ms: 5000,
            kind: RawEventKind::LevelUp,
            actor: ParticipantId(2),
            assisting: vec![],
            victim: None,
            position: None,
            payload: Payload {
                level: Some(2),
                ..Payload::default()
            },
        });
        assert!(matches!(
            parse_match(doc.to_json().as_bytes()),
            Err(Error::Validation { ref field, .. }) if field == "events[0].timestamp_ms"
        ));
    }

    #[test]
    fn negative_payload_rejected() {
        let mut doc = parse_match(minimal_json([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).as_bytes()).unwrap();
        doc.events.push(TimelineEvent {
            timestamp_ms: 0,
            kind: RawEventKind::ItemPurchased,
            actor: ParticipantId(1),
            assisting: vec![],
            victim: None,
            position: None,
            payload: Payload {
                item_cost: Some(-3.0),
                ..Payload::default()
            },
        });
        assert!(matches!(
            parse_match(doc.to_json().as_bytes()),
            Err(Error::Validation { ref field, .. }) if field == "events[0].payload.item_cost"
        ));
    }

    #[test]
    fn frames_must_be_minute_spaced() {
        let mut doc = parse_match(minimal_json([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).as_bytes()).unwrap();
        let mut second = doc.frames[0].clone();
        second.timestamp_ms = 30_000;
        doc.frames.push(second);
        assert!(
            matches!(validate(&doc), Err(Error::Validation { ref field, .. }) if field == "frames[1].timestamp_ms")
        );
    }

    #[test]
    fn wrong_team_rejected() {
        let text = minimal_json([1, 2, 3, 4, 5, 6, 7, 8, 9, 10]).replacen("\"team\": \"blue\"", "\"team\": \"red\"", 1);
        assert!(matches!(parse_match(text.as_bytes()), Err(Error::Validation { .. })));
    }
}
