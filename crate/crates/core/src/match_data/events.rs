use serde::{Deserialize, Serialize};

use super::{EventKind, MapPoint, ParticipantId, Payload, RawEventKind, TimelineEvent};
use crate::error::{Error, Result};

/// A timeline event credited to exactly one player.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedEvent {
    pub timestamp_ms: u64,
    pub kind: EventKind,
    pub actor: ParticipantId,
    pub position: Option<MapPoint>,
    /// Payload of the source event; shared by every event expanded from it.
    pub payload: Payload,
    /// Players involved in the source event (actor plus assisters).
    pub involved: u32,
}

/// Expands kills into per-player kill, assist and victim events.
///
/// A champion kill with `k` assisters yields `k + 2` events, building and
/// elite-monster kills yield `k + 1`; everything else passes through. At equal
/// timestamps the order is kill, assists by ascending participant, victim.
pub fn derive_events(events: &[TimelineEvent]) -> Result<Vec<DerivedEvent>> {
    let mut out = Vec::with_capacity(events.len() * 2);
    for (i, event) in events.iter().enumerate() {
        let involved = 1 + event.assisting.len() as u32;
        let make = |kind: EventKind, actor: ParticipantId| DerivedEvent {
            timestamp_ms: event.timestamp_ms,
            kind,
            actor,
            position: event.position,
            payload: event.payload.clone(),
            involved,
        };
        let assist_kind = match event.kind {
            RawEventKind::ChampionKill => Some(EventKind::ChampionKillAssist),
            RawEventKind::BuildingKill => Some(EventKind::BuildingKillAssist),
            RawEventKind::EliteMonsterKill => Some(EventKind::EliteMonsterKillAssist),
            _ => None,
        };
        let victim =
            match event.kind {
                RawEventKind::ChampionKill => Some(event.victim.ok_or_else(|| {
                    Error::validation(format!("events[{i}].victim"), "CHAMPION_KILL without a victim")
                })?),
                _ => None,
            };

        out.push(make(event.kind.into(), event.actor));
        if let Some(assist_kind) = assist_kind {
            let mut assisters = event.assisting.clone();
            assisters.sort_unstable();
            out.extend(assisters.into_iter().map(|a| make(assist_kind, a)));
        }
        if let Some(victim) = victim {
            out.push(make(EventKind::ChampionKillVictim, victim));
        }
    }
    // stable: expansion order survives among equal timestamps
    out.sort_by_key(|e| e.timestamp_ms);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn event(kind: RawEventKind, actor: u8, assisting: &[u8], victim: Option<u8>) -> TimelineEvent {
        TimelineEvent {
            timestamp_ms: 1_000,
            kind,
            actor: ParticipantId(actor),
            assisting: assisting.iter().map(|&a| ParticipantId(a)).collect(),
            victim: victim.map(ParticipantId),
            position: None,
            payload: Payload::default(),
        }
    }

    #[test]
    fn champion_kill_expands_to_kill_assists_victim() {
        let derived = derive_events(&[event(RawEventKind::ChampionKill, 3, &[5, 4], Some(7))]).unwrap();
        let got: Vec<(EventKind, u8)> = derived.iter().map(|e| (e.kind, e.actor.0)).collect();
        assert_eq!(
            got,
            vec![
                (EventKind::ChampionKill, 3),
                (EventKind::ChampionKillAssist, 4),
                (EventKind::ChampionKillAssist, 5),
                (EventKind::ChampionKillVictim, 7),
            ]
        );
        assert!(derived.iter().all(|e| e.timestamp_ms == 1_000 && e.involved == 3));
    }

    #[test]
    fn purchase_passes_through() {
        let derived = derive_events(&[event(RawEventKind::ItemPurchased, 1, &[], None)]).unwrap();
        assert_eq!(derived.len(), 1);
        assert_eq!(derived[0].kind, EventKind::ItemPurchased);
        assert_eq!(derived[0].actor, ParticipantId(1));
    }

    #[test]
    fn building_kill_has_no_victim_event() {
        let derived = derive_events(&[event(RawEventKind::BuildingKill, 8, &[6, 9, 10], None)]).unwrap();
        assert_eq!(derived.len(), 4);
        assert_eq!(derived[0].kind, EventKind::BuildingKill);
        assert!(derived[1..].iter().all(|e| e.kind == EventKind::BuildingKillAssist));
    }

    #[test]
    fn kill_without_victim_is_an_error() {
        let err = derive_events(&[event(RawEventKind::ChampionKill, 3, &[], None)]).unwrap_err();
        assert!(matches!(err, Error::Validation { ref field, .. } if field == "events[0].victim"));
    }

    #[test]
    fn equal_timestamps_keep_expansion_order() {
        let mut a = event(RawEventKind::WardPlaced, 2, &[], None);
        a.timestamp_ms = 5;
        let mut b = event(RawEventKind::ChampionKill, 9, &[6], Some(1));
        b.timestamp_ms = 5;
        let c = event(RawEventKind::LevelUp, 4, &[], None);
        let derived = derive_events(&[a, b, c]).unwrap();
        let kinds: Vec<EventKind> = derived.iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![
                EventKind::WardPlaced,
                EventKind::ChampionKill,
                EventKind::ChampionKillAssist,
                EventKind::ChampionKillVictim,
                EventKind::LevelUp,
            ]
        );
    }
}
