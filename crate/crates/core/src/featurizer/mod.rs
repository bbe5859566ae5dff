//! Per-event weights, the 30-slot action vector, and per-match training samples.

mod record;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::match_data::{
    compute_distance, derive_events, impute_position, interpolate_player, ChampionRoleTable, DerivedEvent, EventKind,
    FrameSnapshot, Lane, MatchDocument, NormPoint, ParticipantId, Role, RoleVector, Team, PLAYERS_PER_MATCH,
    PLAYERS_PER_TEAM,
};

pub use record::{format_sig9, read_dataset, write_dataset};

pub const FEATURE_DIM: usize = 30;

/// Slot layout of [`ActionVector`].
pub mod slot {
    pub const TIMESTAMP: usize = 0;
    /// mage, fighter, support, tank, assassin, marksman
    pub const ROLES: usize = 1;
    /// top, mid, bottom, utility, jungle
    pub const LANES: usize = 7;
    pub const X: usize = 12;
    pub const Y: usize = 13;
    pub const DISTANCE: usize = 14;
    /// the fourteen event kinds in `EventKind::ALL` order
    pub const KINDS: usize = 15;
    pub const WEIGHT: usize = 29;
}

/// Role order inside the action vector (differs from the lookup table's column order).
const VECTOR_ROLE_ORDER: [Role; 6] = [
    Role::Mage,
    Role::Fighter,
    Role::Support,
    Role::Tank,
    Role::Assassin,
    Role::Marksman,
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionVector(pub [f64; FEATURE_DIM]);

impl AsRef<[f64]> for ActionVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl ActionVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn kind(&self) -> Option<EventKind> {
        EventKind::ALL
            .iter()
            .copied()
            .find(|k| self.0[slot::KINDS + k.index()] == 1.0)
    }

    pub fn weight(&self) -> f64 {
        self.0[slot::WEIGHT]
    }

    /// Checks ranges and one-hot groups; returns a description of the first violation.
    pub fn check(&self) -> std::result::Result<(), String> {
        if let Some(i) = self.0.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(format!("slot {i} = {} outside [0, 1]", self.0[i]));
        }
        let binary = |range: std::ops::Range<usize>| -> std::result::Result<usize, String> {
            let mut ones = 0;
            for i in range {
                match self.0[i] {
                    1.0 => ones += 1,
                    0.0 => {}
                    v => return Err(format!("indicator slot {i} = {v}")),
                }
            }
            Ok(ones)
        };
        let roles = binary(slot::ROLES..slot::LANES)?;
        if roles == 0 {
            return Err("no role indicator set".into());
        }
        let lanes = binary(slot::LANES..slot::X)?;
        if lanes != 1 {
            return Err(format!("{lanes} lane indicators set"));
        }
        let kinds = binary(slot::KINDS..slot::WEIGHT)?;
        if kinds != 1 {
            return Err(format!("{kinds} event-kind indicators set"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerSequence {
    pub participant: ParticipantId,
    /// Chronological.
    pub actions: Vec<ActionVector>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BaselineStats {
    pub kills: u32,
    pub deaths: u32,
    pub assists: u32,
    pub gold: f64,
    pub creep: f64,
}

impl BaselineStats {
    /// (K + A) / max(D, 1)
    pub fn kda(&self) -> f64 {
        (self.kills + self.assists) as f64 / self.deaths.max(1) as f64
    }
}

/// One featurized match: ten chronological sequences plus end-of-match aggregates.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSample {
    pub match_id: String,
    pub winner: Team,
    pub lanes: [Lane; PLAYERS_PER_MATCH],
    /// Indexed by participant slot (`ParticipantId::index`).
    pub sequences: Vec<PlayerSequence>,
    pub baselines: [BaselineStats; PLAYERS_PER_MATCH],
}

impl MatchSample {
    pub fn sequence(&self, id: ParticipantId) -> &PlayerSequence {
        &self.sequences[id.index()]
    }

    pub fn action_count(&self) -> usize {
        self.sequences.iter().map(|s| s.actions.len()).sum()
    }
}

/// Gold denominators of the weight formulas for one game version.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchConstants {
    pub highest_item_purchase_cost: f64,
    pub highest_item_sell_cost: f64,
    pub highest_ward_bounty: f64,
}

impl MatchConstants {
    pub const NUMBER_OF_PLAYERS: usize = PLAYERS_PER_MATCH;

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("highest_item_purchase_cost", self.highest_item_purchase_cost),
            ("highest_item_sell_cost", self.highest_item_sell_cost),
            ("highest_ward_bounty", self.highest_ward_bounty),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::validation(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

impl Default for MatchConstants {
    fn default() -> Self {
        Self {
            highest_item_purchase_cost: 3600.0,
            highest_item_sell_cost: 2520.0,
            highest_ward_bounty: 30.0,
        }
    }
}

/// Current player levels, used to rank LEVEL_UP events.
#[derive(Debug, Clone)]
pub struct LevelBoard {
    levels: [u32; PLAYERS_PER_MATCH],
}

impl Default for LevelBoard {
    fn default() -> Self {
        Self {
            levels: [1; PLAYERS_PER_MATCH],
        }
    }
}

impl LevelBoard {
    pub fn set(&mut self, player: ParticipantId, level: u32) {
        self.levels[player.index()] = level;
    }

    /// 1 = highest level; ties go to the lower participant id.
    pub fn rank(&self, player: ParticipantId) -> usize {
        let own = self.levels[player.index()];
        1 + self
            .levels
            .iter()
            .enumerate()
            .filter(|&(i, &lvl)| lvl > own || (lvl == own && i < player.index()))
            .count()
    }
}

fn ratio(numerator: f64, denominator: f64) -> f64 {
    if denominator > 0.0 {
        (numerator / denominator).clamp(0.0, 1.0)
    } else {
        0.0
    }
}

/// Magnitude of one event in `[0, 1]`.
///
/// `board` must already reflect the event when it is a LEVEL_UP.
pub fn event_weight(ev: &DerivedEvent, consts: &MatchConstants, board: &LevelBoard) -> Result<f64> {
    let p = &ev.payload;
    let missing = |field| Error::MissingPayload { kind: ev.kind, field };
    let weight = match ev.kind {
        EventKind::ItemPurchased | EventKind::ItemDestroyed => ratio(
            p.item_cost.ok_or_else(|| missing("item_cost"))?,
            consts.highest_item_purchase_cost,
        ),
        EventKind::ItemSold => ratio(
            p.sell_value.ok_or_else(|| missing("sell_value"))?,
            consts.highest_item_sell_cost,
        ),
        EventKind::SkillLevelUp => ratio(
            p.skill_level.ok_or_else(|| missing("skill_level"))? as f64,
            p.max_skill_level.ok_or_else(|| missing("max_skill_level"))? as f64,
        ),
        EventKind::LevelUp => board.rank(ev.actor) as f64 / MatchConstants::NUMBER_OF_PLAYERS as f64,
        EventKind::WardPlaced | EventKind::WardKill => ratio(
            p.ward_bounty.ok_or_else(|| missing("ward_bounty"))?,
            consts.highest_ward_bounty,
        ),
        EventKind::ChampionKill | EventKind::ChampionKillAssist => {
            if p.damage.is_empty() && p.total_damage_received.is_none() {
                return Err(missing("damage"));
            }
            ratio(p.damage_by(ev.actor), p.total_damage())
        }
        EventKind::ChampionKillVictim => {
            let dealt = p.victim_damage_dealt.ok_or_else(|| missing("victim_damage_dealt"))?;
            ratio(dealt, p.total_damage())
        }
        EventKind::BuildingKill
        | EventKind::BuildingKillAssist
        | EventKind::EliteMonsterKill
        | EventKind::EliteMonsterKillAssist => 1.0 / p.involved.unwrap_or(ev.involved).max(1) as f64,
    };
    Ok(weight)
}

/// Assembles the 30-slot vector.
pub fn vectorize(
    ev: &DerivedEvent,
    roles: RoleVector,
    lane: Lane,
    position: NormPoint,
    distance: f64,
    weight: f64,
    duration_ms: u64,
) -> ActionVector {
    let mut v = [0.0; FEATURE_DIM];
    v[slot::TIMESTAMP] = if duration_ms > 0 {
        (ev.timestamp_ms as f64 / duration_ms as f64).min(1.0)
    } else {
        0.0
    };
    for (k, role) in VECTOR_ROLE_ORDER.iter().enumerate() {
        if roles.has(*role) {
            v[slot::ROLES + k] = 1.0;
        }
    }
    v[slot::LANES + lane.index()] = 1.0;
    v[slot::X] = position.x;
    v[slot::Y] = position.y;
    v[slot::DISTANCE] = distance;
    v[slot::KINDS + ev.kind.index()] = 1.0;
    v[slot::WEIGHT] = weight;
    ActionVector(v)
}

/// A derived event together with its feature vector.
#[derive(Debug, Clone)]
pub struct FeaturizedAction {
    pub event: DerivedEvent,
    pub vector: ActionVector,
}

/// Runs derive, position, distance, weight and vectorize over every event of a match.
pub fn featurize_actions(
    doc: &MatchDocument,
    table: &ChampionRoleTable,
    consts: &MatchConstants,
) -> Result<Vec<FeaturizedAction>> {
    consts.validate()?;
    let meta = &doc.meta;
    let roles: Vec<RoleVector> = ParticipantId::all()
        .map(|pid| table.lookup_roles(&meta.player(pid).champion))
        .collect::<Result<_>>()?;
    let lanes = meta.lanes();
    let derived = derive_events(&doc.events)?;
    let mut board = LevelBoard::default();
    let mut out = Vec::with_capacity(derived.len());
    for ev in derived {
        if ev.kind == EventKind::LevelUp {
            let level = ev.payload.level.ok_or(Error::MissingPayload {
                kind: ev.kind,
                field: "level",
            })?;
            board.set(ev.actor, level);
        }
        let position = impute_position(&ev, &doc.frames);
        let team_positions: [NormPoint; PLAYERS_PER_TEAM] = {
            let mut members = ev.actor.team().members();
            std::array::from_fn(|_| {
                let pid = members.next().expect("five members");
                if pid == ev.actor {
                    position
                } else {
                    interpolate_player(&doc.frames, pid, ev.timestamp_ms)
                }
            })
        };
        let distance = compute_distance(ev.actor.team_slot(), &team_positions);
        let weight = event_weight(&ev, consts, &board)?;
        let vector = vectorize(
            &ev,
            roles[ev.actor.index()],
            lanes[ev.actor.index()],
            position,
            distance,
            weight,
            meta.duration_ms,
        );
        out.push(FeaturizedAction { event: ev, vector });
    }
    Ok(out)
}

/// Full pipeline for one parsed match.
pub fn build_match_sample(
    doc: &MatchDocument,
    table: &ChampionRoleTable,
    consts: &MatchConstants,
) -> Result<MatchSample> {
    let actions = featurize_actions(doc, table, consts)?;
    let derived: Vec<DerivedEvent> = actions.iter().map(|a| a.event.clone()).collect();
    let baselines = baseline_metrics(&derived, &doc.frames);
    let mut sequences: Vec<PlayerSequence> = ParticipantId::all()
        .map(|participant| PlayerSequence {
            participant,
            actions: Vec::new(),
        })
        .collect();
    for action in actions {
        sequences[action.event.actor.index()].actions.push(action.vector);
    }
    Ok(MatchSample {
        match_id: doc.meta.match_id.clone(),
        winner: doc.meta.winner,
        lanes: doc.meta.lanes(),
        sequences,
        baselines,
    })
}

/// Kills, deaths and assists from derived events; gold and creep from the last frame.
pub fn baseline_metrics(events: &[DerivedEvent], snapshots: &[FrameSnapshot]) -> [BaselineStats; PLAYERS_PER_MATCH] {
    let mut stats = [BaselineStats::default(); PLAYERS_PER_MATCH];
    for ev in events {
        let s = &mut stats[ev.actor.index()];
        match ev.kind {
            EventKind::ChampionKill => s.kills += 1,
            EventKind::ChampionKillAssist => s.assists += 1,
            EventKind::ChampionKillVictim => s.deaths += 1,
            _ => {}
        }
    }
    if let Some(last) = snapshots.last() {
        for frame in &last.players {
            let s = &mut stats[frame.participant_id.index()];
            s.gold = frame.total_gold as f64;
            s.creep = (frame.minions_killed + frame.jungle_minions_killed) as f64;
        }
    }
    stats
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::match_data::{DamageShare, MapPoint, Payload};

    fn ev(kind: EventKind, actor: u8) -> DerivedEvent {
        DerivedEvent {
            timestamp_ms: 0,
            kind,
            actor: ParticipantId(actor),
            position: None,
            payload: Payload::default(),
            involved: 1,
        }
    }

    #[test]
    fn sole_damage_dealer_kill_weighs_one() {
        let mut e = ev(EventKind::ChampionKill, 3);
        e.payload.damage = vec![DamageShare {
            participant: ParticipantId(3),
            amount: 1234.0,
        }];
        let w = event_weight(&e, &MatchConstants::default(), &LevelBoard::default()).unwrap();
        assert_eq!(w, 1.0);
    }

    #[test]
    fn top_ranked_level_up_weighs_a_tenth() {
        let mut board = LevelBoard::default();
        board.set(ParticipantId(4), 3);
        let w = event_weight(&ev(EventKind::LevelUp, 4), &MatchConstants::default(), &board).unwrap();
        assert_eq!(w, 0.1);
        // tied players: lower id ranks first
        let board = LevelBoard::default();
        assert_eq!(board.rank(ParticipantId(1)), 1);
        assert_eq!(board.rank(ParticipantId(10)), 10);
    }

    #[test]
    fn building_kill_shares_equally() {
        let mut e = ev(EventKind::BuildingKillAssist, 2);
        e.involved = 4;
        let w = event_weight(&e, &MatchConstants::default(), &LevelBoard::default()).unwrap();
        assert_eq!(w, 0.25);
    }

    #[test]
    fn victim_weight_is_clamped() {
        let mut e = ev(EventKind::ChampionKillVictim, 7);
        e.payload.damage = vec![DamageShare {
            participant: ParticipantId(3),
            amount: 100.0,
        }];
        e.payload.victim_damage_dealt = Some(500.0);
        let w = event_weight(&e, &MatchConstants::default(), &LevelBoard::default()).unwrap();
        assert_eq!(w, 1.0);
    }

    #[test]
    fn missing_payload_names_kind_and_field() {
        let err = event_weight(
            &ev(EventKind::WardPlaced, 1),
            &MatchConstants::default(),
            &LevelBoard::default(),
        )
        .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("WARD_PLACED") && msg.contains("ward_bounty"), "{msg}");
    }

    #[test]
    fn kda_zero_deaths() {
        let s = BaselineStats {
            kills: 5,
            assists: 7,
            deaths: 2,
            ..Default::default()
        };
        assert_eq!(s.kda(), 6.0);
        let s = BaselineStats {
            kills: 3,
            ..Default::default()
        };
        assert_eq!(s.kda(), 3.0);
    }

    #[test]
    fn vector_layout_for_annie_purchase() {
        let table = ChampionRoleTable::builtin();
        let mut e = ev(EventKind::ItemPurchased, 2);
        e.payload.item_cost = Some(900.0);
        let consts = MatchConstants::default();
        let w = event_weight(&e, &consts, &LevelBoard::default()).unwrap();
        let v = vectorize(
            &e,
            table.lookup_roles("Annie").unwrap(),
            Lane::Mid,
            NormPoint::new(0.0, 0.0),
            0.3,
            w,
            1_800_000,
        );
        let ones: Vec<usize> = (0..FEATURE_DIM).filter(|&i| v.0[i] == 1.0).collect();
        assert_eq!(ones, vec![1, 8, 15]);
        assert_eq!(v.0[slot::WEIGHT], 900.0 / 3600.0);
        assert_eq!(v.0[slot::X], 0.0);
        assert_eq!(v.0[slot::DISTANCE], 0.3);
        assert_eq!(v.kind(), Some(EventKind::ItemPurchased));
        v.check().unwrap();
    }

    #[test]
    fn kayle_sets_two_roles_and_end_timestamp_is_one() {
        let table = ChampionRoleTable::builtin();
        let mut e = ev(EventKind::WardKill, 1);
        e.timestamp_ms = 1000;
        e.position = Some(MapPoint(1, 1));
        let v = vectorize(
            &e,
            table.lookup_roles("Kayle").unwrap(),
            Lane::Top,
            NormPoint::default(),
            0.4,
            0.5,
            1000,
        );
        assert_eq!(v.0[slot::TIMESTAMP], 1.0);
        assert_eq!(v.0[slot::ROLES + 1], 1.0); // fighter
        assert_eq!(v.0[slot::ROLES + 2], 1.0); // support
        assert_eq!(v.0[slot::ROLES..slot::LANES].iter().sum::<f64>(), 2.0);
    }

    #[test]
    fn check_rejects_two_kinds() {
        let mut v = ActionVector([0.0; FEATURE_DIM]);
        v.0[slot::ROLES] = 1.0;
        v.0[slot::LANES] = 1.0;
        v.0[slot::KINDS] = 1.0;
        v.check().unwrap();
        v.0[slot::KINDS + 3] = 1.0;
        assert!(v.check().is_err());
    }
}
