use super::{DerivedEvent, EventKind, FrameSnapshot, ParticipantId, Team, FRAME_INTERVAL_MS, PLAYERS_PER_TEAM};

/// A map position scaled into `[0, 1]^2`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NormPoint {
    pub x: f64,
    pub y: f64,
}

impl NormPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: NormPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn clamped(self) -> Self {
        Self {
            x: self.x.clamp(0.0, 1.0),
            y: self.y.clamp(0.0, 1.0),
        }
    }

    fn lerp(self, other: NormPoint, t: f64) -> Self {
        Self {
            x: self.x + (other.x - self.x) * t,
            y: self.y + (other.y - self.y) * t,
        }
    }
}

/// Team base corner.
fn base(team: Team) -> NormPoint {
    match team {
        Team::Blue => NormPoint::new(0.0, 0.0),
        Team::Red => NormPoint::new(1.0, 1.0),
    }
}

/// Linearly interpolated position of `player` at `timestamp_ms`.
///
/// Holds the last known position after the final frame. `snapshots` must be the
/// validated, minute-spaced frame list starting at 0.
pub fn interpolate_player(snapshots: &[FrameSnapshot], player: ParticipantId, timestamp_ms: u64) -> NormPoint {
    let Some(last) = snapshots.last() else {
        return base(player.team());
    };
    let slot = (timestamp_ms / FRAME_INTERVAL_MS) as usize;
    if slot + 1 >= snapshots.len() {
        return last.player(player).position.normalized();
    }
    let before = &snapshots[slot];
    let after = &snapshots[slot + 1];
    let frac = (timestamp_ms - before.timestamp_ms) as f64 / (after.timestamp_ms - before.timestamp_ms) as f64;
    before
        .player(player)
        .position
        .normalized()
        .lerp(after.player(player).position.normalized(), frac)
        .clamped()
}

/// Normalized position of the actor when `event` happened.
///
/// Explicit coordinates win; purchases and sales happen at the team's base
/// corner; anything else is interpolated from the surrounding frames.
pub fn impute_position(event: &DerivedEvent, snapshots: &[FrameSnapshot]) -> NormPoint {
    if let Some(p) = event.position {
        return p.normalized().clamped();
    }
    match event.kind {
        EventKind::ItemPurchased | EventKind::ItemSold => base(event.actor.team()),
        _ => interpolate_player(snapshots, event.actor, event.timestamp_ms),
    }
}

/// Isolation of one player from the rest of the team.
///
/// `positions` holds the five team members in slot order and `actor` indexes
/// into it. Returns the actor's share of all pairwise distances; summed over
/// the team the shares total 2. A fully co-located team returns 0.4.
pub fn compute_distance(actor: usize, positions: &[NormPoint; PLAYERS_PER_TEAM]) -> f64 {
    let mut numerator = 0.0;
    let mut denominator = 0.0;
    for i in 0..PLAYERS_PER_TEAM {
        for j in i + 1..PLAYERS_PER_TEAM {
            let d = positions[i].distance(positions[j]);
            denominator += d;
            if i == actor || j == actor {
                numerator += d;
            }
        }
    }
    if denominator < 1e-12 {
        return 2.0 / PLAYERS_PER_TEAM as f64;
    }
    (numerator / denominator).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::match_data::{MapPoint, Payload, PlayerFrame};

    fn frames(actor: ParticipantId, points: &[(u32, u32)]) -> Vec<FrameSnapshot> {
        points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| FrameSnapshot {
                timestamp_ms: i as u64 * FRAME_INTERVAL_MS,
                players: ParticipantId::all()
                    .map(|pid| PlayerFrame {
                        participant_id: pid,
                        position: if pid == actor { MapPoint(x, y) } else { MapPoint(0, 0) },
                        total_gold: 0,
                        minions_killed: 0,
                        jungle_minions_killed: 0,
                        level: 1,
                    })
                    .collect(),
            })
            .collect()
    }

    fn derived(kind: EventKind, actor: u8, t: u64, position: Option<MapPoint>) -> DerivedEvent {
        DerivedEvent {
            timestamp_ms: t,
            kind,
            actor: ParticipantId(actor),
            position,
            payload: Payload::default(),
            involved: 1,
        }
    }

    #[test]
    fn purchase_is_at_base() {
        let snaps = frames(ParticipantId(2), &[(9000, 9000)]);
        let blue = impute_position(&derived(EventKind::ItemPurchased, 2, 0, None), &snaps);
        assert_eq!(blue, NormPoint::new(0.0, 0.0));
        let red = impute_position(&derived(EventKind::ItemSold, 7, 0, None), &snaps);
        assert_eq!(red, NormPoint::new(1.0, 1.0));
    }

    #[test]
    fn explicit_position_is_scaled() {
        let snaps = frames(ParticipantId(1), &[(0, 0)]);
        let p = impute_position(&derived(EventKind::WardKill, 1, 0, Some(MapPoint(7500, 7500))), &snaps);
        assert_eq!(p, NormPoint::new(0.5, 0.5));
    }

    #[test]
    fn interpolates_between_frames() {
        let snaps = frames(ParticipantId(4), &[(0, 0), (0, 0), (3000, 3000)]);
        let p = impute_position(&derived(EventKind::WardPlaced, 4, 90_000, None), &snaps);
        assert!((p.x - 0.1).abs() < 1e-15 && (p.y - 0.1).abs() < 1e-15, "{p:?}");
    }

    #[test]
    fn holds_last_position_after_final_frame() {
        let snaps = frames(ParticipantId(9), &[(0, 0), (15000, 3000)]);
        let p = interpolate_player(&snaps, ParticipantId(9), 500_000);
        assert_eq!(p, NormPoint::new(1.0, 0.2));
    }

    #[test]
    fn symmetric_team_shares_equally() {
        // regular pentagon
        let positions: [NormPoint; 5] = std::array::from_fn(|k| {
            let a = 2.0 * std::f64::consts::PI * k as f64 / 5.0;
            NormPoint::new(0.5 + 0.3 * a.cos(), 0.5 + 0.3 * a.sin())
        });
        for i in 0..5 {
            assert!((compute_distance(i, &positions) - 0.4).abs() < 1e-12);
        }
    }

    #[test]
    fn lone_actor_takes_everything() {
        let mut positions = [NormPoint::default(); 5];
        positions[2] = NormPoint::new(1.0, 0.0);
        assert_eq!(compute_distance(2, &positions), 1.0);
        assert_eq!(compute_distance(0, &positions), 0.25);
    }

    #[test]
    fn co_located_team_is_degenerate() {
        let positions = [NormPoint::new(0.3, 0.3); 5];
        for i in 0..5 {
            assert_eq!(compute_distance(i, &positions), 0.4);
        }
    }
}
