use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use super::{latent_value, match_seed, GenConfig, LabeledMatch};
use crate::error::Result;
use crate::featurizer::{build_match_sample, MatchConstants};
use crate::match_data::{
    ChampionRoleTable, DamageShare, FrameSnapshot, Lane, MapPoint, MatchDocument, MatchRecord, ParticipantId, Payload,
    PlayerFrame, PlayerInfo, RawEventKind, Role, Team, TimelineEvent, FRAME_INTERVAL_MS, MAP_SIZE, PLAYERS_PER_MATCH,
};

const MAX_LEVEL: u32 = 18;

const KINDS: [RawEventKind; 10] = [
    RawEventKind::ItemPurchased,
    RawEventKind::ItemSold,
    RawEventKind::ItemDestroyed,
    RawEventKind::SkillLevelUp,
    RawEventKind::LevelUp,
    RawEventKind::WardPlaced,
    RawEventKind::WardKill,
    RawEventKind::ChampionKill,
    RawEventKind::BuildingKill,
    RawEventKind::EliteMonsterKill,
];

/// Base kind frequencies, in `KINDS` order.
const BASE_RATES: [f64; 10] = [0.22, 0.04, 0.06, 0.16, 0.16, 0.10, 0.04, 0.12, 0.05, 0.03];

/// Per-lane multipliers on `BASE_RATES`.
fn lane_tilt(lane: Lane) -> [f64; 10] {
    let mut t = [1.0; 10];
    match lane {
        Lane::Utility => {
            t[5] = 3.0;
            t[6] = 2.0;
            t[7] = 0.5;
        }
        Lane::Jungle => {
            t[9] = 4.0;
            t[7] = 1.2;
        }
        Lane::Bottom | Lane::Mid => t[7] = 1.3,
        Lane::Top => t[8] = 1.5,
    }
    t
}

fn preferred_roles(lane: Lane) -> &'static [Role] {
    match lane {
        Lane::Top => &[Role::Fighter, Role::Tank],
        Lane::Jungle => &[Role::Fighter, Role::Assassin, Role::Tank],
        Lane::Mid => &[Role::Mage, Role::Assassin],
        Lane::Bottom => &[Role::Marksman],
        Lane::Utility => &[Role::Support],
    }
}

/// Normalized map position a player of this lane gravitates to.
fn lane_anchor(lane: Lane, rng: &mut ChaCha8Rng) -> (f64, f64) {
    match lane {
        Lane::Top => (0.15, 0.85),
        Lane::Mid => (0.5, 0.5),
        Lane::Bottom => (0.85, 0.15),
        Lane::Utility => (0.8, 0.2),
        Lane::Jungle => (rng.random_range(0.25..0.75), rng.random_range(0.25..0.75)),
    }
}

fn to_map(x: f64, y: f64) -> MapPoint {
    let c = |v: f64| (v.clamp(0.0, 1.0) * MAP_SIZE).round() as u32;
    MapPoint(c(x), c(y))
}

struct Player {
    pid: ParticipantId,
    lane: Lane,
    skill: f64,
    anchor: (f64, f64),
}

/// Picks one synthetic champion per player, preferring roles that suit the lane.
fn pick_champions(table: &ChampionRoleTable, players: &[Player], rng: &mut ChaCha8Rng) -> Vec<String> {
    let pool: Vec<(&str, _)> = table
        .champions()
        .filter(|(name, _)| name.starts_with("Synth"))
        .collect();
    let mut taken: Vec<&str> = Vec::new();
    players
        .iter()
        .map(|p| {
            let fits: Vec<&str> = pool
                .iter()
                .filter(|(n, r)| !taken.contains(n) && preferred_roles(p.lane).iter().any(|role| r.has(*role)))
                .map(|(n, _)| *n)
                .collect();
            let name = match fits.as_slice() {
                [] => {
                    let free: Vec<&str> = pool.iter().map(|(n, _)| *n).filter(|n| !taken.contains(n)).collect();
                    free[rng.random_range(0..free.len())]
                }
                f => f[rng.random_range(0..f.len())],
            };
            taken.push(name);
            name.to_string()
        })
        .collect()
}

/// Picks an opponent, weaker players being more likely victims.
fn pick_victim(players: &[Player], team: Team, rng: &mut ChaCha8Rng) -> ParticipantId {
    let opp: Vec<&Player> = players.iter().filter(|p| p.pid.team() != team).collect();
    let w: Vec<f64> = opp.iter().map(|p| (-0.7 * p.skill).exp()).collect();
    let idx = WeightedIndex::new(&w).expect("positive weights").sample(rng);
    opp[idx].pid
}

fn pick_assisters(players: &[Player], actor: ParticipantId, prob: f64, rng: &mut ChaCha8Rng) -> Vec<ParticipantId> {
    players
        .iter()
        .filter(|p| p.pid.team() == actor.team() && p.pid != actor)
        .filter(|p| {
            let boost = if p.lane == Lane::Utility { 2.0 } else { 1.0 };
            rng.random_bool((prob * boost).min(0.95))
        })
        .map(|p| p.pid)
        .collect()
}

fn near(anchor: (f64, f64), spread: f64, rng: &mut ChaCha8Rng) -> MapPoint {
    let n = Normal::new(0.0, spread).expect("finite spread");
    to_map(anchor.0 + n.sample(rng), anchor.1 + n.sample(rng))
}

/// Builds match `index` of the run: raw document, featurized sample, latent values.
pub fn generate_match(config: &GenConfig, index: usize, table: &ChampionRoleTable) -> Result<LabeledMatch> {
    let mut rng = ChaCha8Rng::seed_from_u64(match_seed(config.seed, index));
    let duration_ms: u64 = rng.random_range(20 * 60_000..45 * 60_000);
    let skill = Normal::new(0.0, config.skill_spread).expect("validated spread");

    let mut lanes = [Lane::Top; PLAYERS_PER_MATCH];
    for team in [Team::Blue, Team::Red] {
        let mut order = Lane::ALL;
        order.shuffle(&mut rng);
        for (pid, lane) in team.members().zip(order) {
            lanes[pid.index()] = lane;
        }
    }
    let players: Vec<Player> = ParticipantId::all()
        .map(|pid| {
            let lane = lanes[pid.index()];
            Player {
                pid,
                lane,
                skill: skill.sample(&mut rng),
                anchor: lane_anchor(lane, &mut rng),
            }
        })
        .collect();
    let champions = pick_champions(table, &players, &mut rng);

    // raw timeline; payloads of level events are filled once the order is known
    let mut events = Vec::new();
    for p in &players {
        let n = rng.random_range(config.events_per_player.0..=config.events_per_player.1);
        let tilt = lane_tilt(p.lane);
        let rates: Vec<f64> = (0..KINDS.len())
            .map(|k| {
                let skilled = matches!(k, 6..=9);
                BASE_RATES[k] * tilt[k] * if skilled { (0.5 * p.skill).exp() } else { 1.0 }
            })
            .collect();
        let kinds = WeightedIndex::new(&rates).expect("positive rates");
        for _ in 0..n {
            let kind = KINDS[kinds.sample(&mut rng)];
            let timestamp_ms = rng.random_range(0..=duration_ms);
            let mut ev = TimelineEvent {
                timestamp_ms,
                kind,
                actor: p.pid,
                assisting: Vec::new(),
                victim: None,
                position: None,
                payload: Payload::default(),
            };
            match kind {
                RawEventKind::ItemPurchased | RawEventKind::ItemDestroyed => {
                    ev.payload.item_cost = Some(rng.random_range(300..=3600) as f64);
                }
                RawEventKind::ItemSold => ev.payload.sell_value = Some(rng.random_range(100..=2520) as f64),
                RawEventKind::SkillLevelUp | RawEventKind::LevelUp => {}
                RawEventKind::WardPlaced | RawEventKind::WardKill => {
                    ev.payload.ward_bounty = Some(rng.random_range(0..=30) as f64);
                    ev.position = Some(near(p.anchor, 0.12, &mut rng));
                }
                RawEventKind::ChampionKill => {
                    ev.victim = Some(pick_victim(&players, p.pid.team(), &mut rng));
                    ev.assisting = pick_assisters(&players, p.pid, 0.3, &mut rng);
                    let mut damage = vec![DamageShare {
                        participant: p.pid,
                        amount: rng.random_range(200..=2000) as f64,
                    }];
                    for &a in &ev.assisting {
                        damage.push(DamageShare {
                            participant: a,
                            amount: rng.random_range(50..=1500) as f64,
                        });
                    }
                    let total: f64 = damage.iter().map(|d| d.amount).sum();
                    ev.payload.damage = damage;
                    ev.payload.victim_damage_dealt = Some((rng.random::<f64>() * total).round());
                    ev.position = Some(near(p.anchor, 0.1, &mut rng));
                }
                RawEventKind::BuildingKill => {
                    ev.assisting = pick_assisters(&players, p.pid, 0.25, &mut rng);
                    ev.position = Some(near(p.anchor, 0.1, &mut rng));
                }
                RawEventKind::EliteMonsterKill => {
                    ev.assisting = pick_assisters(&players, p.pid, 0.3, &mut rng);
                    ev.position = Some(near((0.5, 0.5), 0.15, &mut rng));
                }
            }
            events.push(ev);
        }
    }
    events.sort_by_key(|e| e.timestamp_ms);

    let mut level = [1u32; PLAYERS_PER_MATCH];
    // (timestamp, new level) per player, for the frames
    let mut level_times: Vec<Vec<(u64, u32)>> = vec![Vec::new(); PLAYERS_PER_MATCH];
    for ev in &mut events {
        let i = ev.actor.index();
        if ev.kind == RawEventKind::LevelUp && level[i] >= MAX_LEVEL {
            ev.kind = RawEventKind::SkillLevelUp;
        }
        match ev.kind {
            RawEventKind::LevelUp => {
                level[i] += 1;
                ev.payload.level = Some(level[i]);
                level_times[i].push((ev.timestamp_ms, level[i]));
            }
            RawEventKind::SkillLevelUp => {
                let max = if rng.random_bool(0.25) { 3 } else { 5 };
                ev.payload.max_skill_level = Some(max);
                ev.payload.skill_level = Some(rng.random_range(1..=max));
            }
            _ => {}
        }
    }

    // end-of-match gold and creep: gold follows kills and objectives, creep barely follows skill
    let mut kills = [0u32; PLAYERS_PER_MATCH];
    let mut assists = [0u32; PLAYERS_PER_MATCH];
    let mut objectives = [0u32; PLAYERS_PER_MATCH];
    for ev in &events {
        match ev.kind {
            RawEventKind::ChampionKill => kills[ev.actor.index()] += 1,
            RawEventKind::BuildingKill | RawEventKind::EliteMonsterKill => objectives[ev.actor.index()] += 1,
            _ => {}
        }
        if ev.kind == RawEventKind::ChampionKill {
            for a in &ev.assisting {
                assists[a.index()] += 1;
            }
        }
    }
    let minutes = duration_ms as f64 / 60_000.0;
    let gold_noise = Normal::new(0.0, 2500.0).expect("finite");
    let creep_noise = Normal::new(0.0, 40.0).expect("finite");
    let finals: Vec<(f64, u32, u32)> = players
        .iter()
        .map(|p| {
            let i = p.pid.index();
            let gold = 500.0
                + 300.0 * minutes
                + 300.0 * kills[i] as f64
                + 150.0 * assists[i] as f64
                + 200.0 * objectives[i] as f64
                + gold_noise.sample(&mut rng);
            let rate = match p.lane {
                Lane::Utility => 1.0,
                Lane::Jungle => 4.5,
                _ => 6.5,
            };
            let creep = (rate * minutes + 5.0 * p.skill + creep_noise.sample(&mut rng)).max(0.0);
            let (minions, jungle) = if p.lane == Lane::Jungle {
                ((creep * 0.15) as u32, (creep * 0.85) as u32)
            } else {
                ((creep * 0.95) as u32, (creep * 0.05) as u32)
            };
            (gold.max(500.0), minions, jungle)
        })
        .collect();

    let n_frames = (duration_ms / FRAME_INTERVAL_MS) as usize + 1;
    let frames: Vec<FrameSnapshot> = (0..n_frames)
        .map(|f| {
            let t = f as u64 * FRAME_INTERVAL_MS;
            let frac = t as f64 / duration_ms as f64;
            let players = players
                .iter()
                .map(|p| {
                    let i = p.pid.index();
                    let position = if f == 0 {
                        match p.pid.team() {
                            Team::Blue => MapPoint(500, 500),
                            Team::Red => MapPoint(14_500, 14_500),
                        }
                    } else {
                        near(p.anchor, 0.08, &mut rng)
                    };
                    let (gold, minions, jungle) = finals[i];
                    // the last frame holds the final totals
                    let frac = if f + 1 == n_frames { 1.0 } else { frac };
                    PlayerFrame {
                        participant_id: p.pid,
                        position,
                        total_gold: (500.0 + (gold - 500.0) * frac).round() as u32,
                        minions_killed: (minions as f64 * frac).round() as u32,
                        jungle_minions_killed: (jungle as f64 * frac).round() as u32,
                        level: level_times[i]
                            .iter()
                            .take_while(|(ts, _)| *ts <= t)
                            .last()
                            .map_or(1, |x| x.1),
                    }
                })
                .collect();
            FrameSnapshot {
                timestamp_ms: t,
                players,
            }
        })
        .collect();

    let mut document = MatchDocument {
        meta: MatchRecord {
            match_id: format!("synth-{}-{index:05}", config.seed),
            game_version: Some("synthetic".into()),
            duration_ms,
            winner: Team::Blue,
            players: players
                .iter()
                .zip(champions)
                .map(|(p, champion)| PlayerInfo {
                    participant_id: p.pid,
                    team: p.pid.team(),
                    champion,
                    lane: p.lane,
                })
                .collect(),
        },
        events,
        frames,
    };
    crate::match_data::validate(&document)?;

    let mut sample = build_match_sample(&document, table, &MatchConstants::default())?;
    let latent: Vec<Vec<f64>> = sample
        .sequences
        .iter()
        .map(|s| {
            s.actions
                .iter()
                .map(|a| latent_value(&config.latent_weights, a.as_slice()))
                .collect()
        })
        .collect();
    let team_sum = |t: Team| -> f64 { t.members().map(|p| latent[p.index()].iter().sum::<f64>()).sum() };
    let noise = Normal::new(0.0, config.quality_noise).expect("validated noise");
    let blue = team_sum(Team::Blue) + noise.sample(&mut rng);
    let red = team_sum(Team::Red) + noise.sample(&mut rng);
    let mut winner = if blue > red { Team::Blue } else { Team::Red };
    if rng.random_bool(config.label_flip_probability) {
        winner = winner.opponent();
    }
    document.meta.winner = winner;
    sample.winner = winner;
    Ok(LabeledMatch {
        document,
        sample,
        latent,
    })
}
