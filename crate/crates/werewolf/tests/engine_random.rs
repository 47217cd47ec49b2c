//! Randomized legal-play driver: arbitrary legal divinations, ballots,
//! and attacks must keep the state sound and reach a winner quickly.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::seq::IteratorRandom;
use rand::SeedableRng;

use werewolf::game::{AgentId, GameState, Phase, Role, Side};
use werewolf::protocol::TalkEntry;

fn random_other(rng: &mut StdRng, state: &GameState, me: AgentId) -> AgentId {
    state
        .alive()
        .iter()
        .copied()
        .filter(|&id| id != me)
        .choose(rng)
        .expect("someone else is alive")
}

fn drive(seed: u64) -> (GameState, u32) {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut state = GameState::new(seed, None).unwrap();
    let mut steps = 0u32;
    loop {
        steps += 1;
        assert!(steps < 100, "game refused to end");
        assert!(state.partition_ok());
        match state.phase() {
            Phase::NightZero => {
                let seer = state.seer();
                let target = random_other(&mut rng, &state, seer);
                state.divine(seer, target).unwrap();
                state.end_night_zero().unwrap();
            }
            Phase::DayTalk(day) => {
                // A couple of throwaway lines keep the history realistic.
                let speaker = random_other(&mut rng, &state, state.werewolf());
                state
                    .push_talk(TalkEntry::new(day, 1, speaker, "Hmm.", None))
                    .unwrap();
                state.end_talk().unwrap();
            }
            Phase::DayVote(_) => {
                let ballots: BTreeMap<AgentId, AgentId> = state
                    .alive()
                    .iter()
                    .map(|&voter| (voter, random_other(&mut rng, &state, voter)))
                    .collect();
                let dead_before = state.dead().len();
                state.resolve_vote(&ballots).unwrap();
                assert!(state.dead().len() > dead_before, "exile must kill");
            }
            Phase::Night(_) => {
                let seer = state.seer();
                if state.is_alive(seer) {
                    let target = random_other(&mut rng, &state, seer);
                    state.divine(seer, target).unwrap();
                }
                let wolf = state.werewolf();
                let target = random_other(&mut rng, &state, wolf);
                state.resolve_attack(target).unwrap();
            }
            Phase::Finished(winner) => {
                let last_day = winner_check(&state, winner);
                return (state, last_day);
            }
        }
    }
}

fn winner_check(state: &GameState, winner: Side) -> u32 {
    let wolves = state
        .alive()
        .iter()
        .filter(|id| state.role_of(**id) == Role::Werewolf)
        .count();
    let humans = state.alive().len() - wolves;
    let expected = if wolves == 0 {
        Side::VillageSide
    } else {
        assert!(wolves >= humans, "finished while undecided");
        Side::WolfSide
    };
    assert_eq!(winner, expected);
    state.votes().keys().copied().max().unwrap_or(1)
}

proptest! {
    #[test]
    fn random_legal_play_stays_sound(seed in 0u64..500) {
        let (state, last_day) = drive(seed);
        prop_assert!(last_day <= 3, "took {last_day} days");
        prop_assert!(state.partition_ok());
        // Every stored divination matches the species table.
        for divination in state.divinations() {
            prop_assert_eq!(divination.species, state.role_of(divination.target).species());
        }
    }
}
