//! Human-versus-engine games with a hidden mine.
//!
//! A session is fully determined by its tree spec, engine strategy, seat
//! order, seed and the human's guesses; the event log records exactly those,
//! so replaying it reproduces the session.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex, RwLock};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exploit::exploit_values;
use crate::optimal::{optimal_moves, SolveError};
use crate::rational::Prob;
use crate::simulate::StrategySpec;
use crate::tree::{parse_tree, Tree};

/// Largest tree a session accepts.
pub const SESSION_CAP: usize = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("engine cannot play this tree: {0}")]
    TooLarge(String),
    #[error("it is not the human's turn")]
    NotYourTurn,
    #[error("vertex {0} is not live")]
    VertexDead(usize),
    #[error("the session is finished")]
    SessionFinished,
    #[error("no session with id `{0}`")]
    UnknownSession(String),
    #[error("bad event log: {0}")]
    BadLog(String),
}

impl SessionError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::InvalidTree(_) => "invalid_tree",
            SessionError::TooLarge(_) => "too_large",
            SessionError::NotYourTurn => "not_your_turn",
            SessionError::VertexDead(_) => "vertex_dead",
            SessionError::SessionFinished => "session_finished",
            SessionError::UnknownSession(_) => "unknown_session",
            SessionError::BadLog(_) => "bad_log",
        }
    }
}

impl From<SolveError> for SessionError {
    fn from(e: SolveError) -> Self {
        SessionError::TooLarge(e.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Actor {
    Human,
    Engine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Active,
    HumanLost,
    HumanWon,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub actor: Actor,
    pub vertex: usize,
    pub hit_mine: bool,
    /// Live component after the move; empty once the mine is hit.
    pub surviving_component: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hints {
    /// `optimal` against the optimal engine, `exploit` against the others.
    pub basis: String,
    /// Win probability for the human moving on each live vertex.
    pub values: BTreeMap<usize, Prob>,
    pub best: BTreeSet<usize>,
}

/// Client view of a session; the mine appears only after the game ends.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub tree: String,
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub live: Vec<usize>,
    pub engine: StrategySpec,
    pub human_first: bool,
    pub turn: Actor,
    pub status: Status,
    pub history: Vec<MoveRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mine: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hints: Option<Hints>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GuessOutcome {
    pub hit_mine: bool,
    pub surviving_component: Vec<usize>,
    pub engine_reply: Option<MoveRecord>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mine: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hints: Option<Hints>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewSession {
    pub tree: String,
    pub engine: StrategySpec,
    pub human_first: bool,
    pub seed: Option<u64>,
}

/// One line of the append-only log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum SessionEvent {
    Created {
        tree: String,
        engine: StrategySpec,
        human_first: bool,
        seed: u64,
    },
    Guess {
        vertex: usize,
    },
}

pub struct GameSession {
    id: String,
    spec: String,
    tree: Tree,
    live: BTreeSet<usize>,
    mine: usize,
    turn: Actor,
    engine: StrategySpec,
    human_first: bool,
    history: Vec<MoveRecord>,
    seed: u64,
    status: Status,
    rng: ChaCha8Rng,
    events: Vec<SessionEvent>,
}

impl GameSession {
    /// Draws the mine, then plays the engine's opening move if it moves first.
    pub fn new(id: String, req: &NewSession) -> Result<GameSession, SessionError> {
        let tree = parse_tree(&req.tree).map_err(|e| SessionError::InvalidTree(e.to_string()))?;
        if tree.n() > SESSION_CAP {
            return Err(SessionError::TooLarge(format!(
                "{} vertices exceeds the {SESSION_CAP}-vertex session cap",
                tree.n()
            )));
        }
        match req.engine {
            StrategySpec::FixedSecondVertex if !tree.is_path() => {
                return Err(SessionError::InvalidTree(
                    "fixed_second_vertex needs a path".into(),
                ))
            }
            StrategySpec::Optimal | StrategySpec::ExploitDp => {
                // fails fast when no solver covers the shape
                optimal_moves(&tree)?;
            }
            _ => {}
        }
        let seed = req.seed.unwrap_or_else(rand::random);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mine = rng.random_range(1..=tree.n());
        let live = tree.vertices().collect();
        let mut session = GameSession {
            id,
            spec: req.tree.clone(),
            tree,
            live,
            mine,
            turn: if req.human_first { Actor::Human } else { Actor::Engine },
            engine: req.engine,
            human_first: req.human_first,
            history: Vec::new(),
            seed,
            status: Status::Active,
            rng,
            events: vec![SessionEvent::Created {
                tree: req.tree.clone(),
                engine: req.engine,
                human_first: req.human_first,
                seed,
            }],
        };
        if !req.human_first {
            session.engine_move()?;
        }
        Ok(session)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn history(&self) -> &[MoveRecord] {
        &self.history
    }

    pub fn live(&self) -> Vec<usize> {
        self.live.iter().copied().collect()
    }

    pub fn events(&self) -> &[SessionEvent] {
        &self.events
    }

    /// JSON-lines rendering of the events so far.
    pub fn event_log(&self) -> String {
        self.events
            .iter()
            .map(|e| serde_json::to_string(e).expect("events serialize") + "\n")
            .collect()
    }

    /// Rebuilds a session from its event log.
    pub fn replay(id: String, log: &str) -> Result<GameSession, SessionError> {
        let mut lines = log.lines().filter(|l| !l.trim().is_empty());
        let first = lines
            .next()
            .ok_or_else(|| SessionError::BadLog("empty log".into()))?;
        let parse = |l: &str| {
            serde_json::from_str::<SessionEvent>(l).map_err(|e| SessionError::BadLog(e.to_string()))
        };
        let SessionEvent::Created {
            tree,
            engine,
            human_first,
            seed,
        } = parse(first)?
        else {
            return Err(SessionError::BadLog("log must start with a created event".into()));
        };
        let mut session = GameSession::new(
            id,
            &NewSession {
                tree,
                engine,
                human_first,
                seed: Some(seed),
            },
        )?;
        for line in lines {
            match parse(line)? {
                SessionEvent::Guess { vertex } => {
                    session.guess(vertex, false)?;
                }
                SessionEvent::Created { .. } => {
                    return Err(SessionError::BadLog("duplicate created event".into()))
                }
            }
        }
        Ok(session)
    }

    pub fn view(&self, with_hints: bool) -> Result<SessionView, SessionError> {
        let finished = self.status != Status::Active;
        Ok(SessionView {
            id: self.id.clone(),
            tree: self.spec.clone(),
            n: self.tree.n(),
            edges: self.tree.edges().to_vec(),
            live: self.live(),
            engine: self.engine,
            human_first: self.human_first,
            turn: self.turn,
            status: self.status,
            history: self.history.clone(),
            mine: finished.then_some(self.mine),
            hints: if with_hints { self.hints()? } else { None },
        })
    }

    /// Applies the human's guess and, if play continues, the engine reply.
    pub fn guess(&mut self, vertex: usize, with_hints: bool) -> Result<GuessOutcome, SessionError> {
        if self.status != Status::Active {
            return Err(SessionError::SessionFinished);
        }
        if self.turn != Actor::Human {
            return Err(SessionError::NotYourTurn);
        }
        if !self.live.contains(&vertex) {
            return Err(SessionError::VertexDead(vertex));
        }
        self.events.push(SessionEvent::Guess { vertex });
        let human = self.apply(Actor::Human, vertex);
        let engine_reply = if self.status == Status::Active {
            Some(self.engine_move()?)
        } else {
            None
        };
        let finished = self.status != Status::Active;
        Ok(GuessOutcome {
            hit_mine: human.hit_mine,
            surviving_component: human.surviving_component,
            engine_reply,
            status: self.status,
            mine: finished.then_some(self.mine),
            hints: if with_hints { self.hints()? } else { None },
        })
    }

    fn apply(&mut self, actor: Actor, vertex: usize) -> MoveRecord {
        let hit_mine = vertex == self.mine;
        if hit_mine {
            self.live.clear();
            self.status = match actor {
                Actor::Human => Status::HumanLost,
                Actor::Engine => Status::HumanWon,
            };
        } else {
            self.live.remove(&vertex);
            self.live = self.component_of(self.mine);
        }
        self.turn = match actor {
            Actor::Human => Actor::Engine,
            Actor::Engine => Actor::Human,
        };
        let record = MoveRecord {
            actor,
            vertex,
            hit_mine,
            surviving_component: self.live(),
        };
        self.history.push(record.clone());
        record
    }

    fn component_of(&self, start: usize) -> BTreeSet<usize> {
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in self.tree.neighbors(v) {
                if self.live.contains(&w) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen
    }

    /// Live component as a tree plus local-to-original labels.
    fn local(&self) -> (Tree, Vec<usize>) {
        self.tree
            .induced(&self.live())
            .expect("the live set is a connected subtree")
    }

    fn engine_move(&mut self) -> Result<MoveRecord, SessionError> {
        let (local, map) = self.local();
        let pick = |set: BTreeSet<usize>| map[set.into_iter().next().expect("nonempty") - 1];
        let vertex = match self.engine {
            StrategySpec::Random => {
                let live = self.live();
                live[self.rng.random_range(0..live.len())]
            }
            StrategySpec::FixedSecondVertex => {
                let order = local.path_order().expect("components of a path are paths");
                map[order[1.min(order.len() - 1)] - 1]
            }
            StrategySpec::Optimal => pick(optimal_moves(&local)?.best_moves),
            StrategySpec::ExploitDp => pick(exploit_values(&local)?.best_first_moves),
        };
        Ok(self.apply(Actor::Engine, vertex))
    }

    fn hints(&self) -> Result<Option<Hints>, SessionError> {
        if self.status != Status::Active {
            return Ok(None);
        }
        let (local, map) = self.local();
        let (basis, per_move) = match self.engine {
            StrategySpec::Optimal => ("optimal", optimal_moves(&local)?.per_move_values),
            _ => ("exploit", exploit_values(&local)?.per_move),
        };
        let best_value = per_move.values().max().cloned();
        Ok(Some(Hints {
            basis: basis.to_string(),
            best: per_move
                .iter()
                .filter(|(_, v)| Some(*v) == best_value.as_ref())
                .map(|(k, _)| map[k - 1])
                .collect(),
            values: per_move
                .iter()
                .map(|(k, v)| (map[k - 1], Prob::from(v)))
                .collect(),
        }))
    }
}

/// Concurrent session registry; each session has its own lock.
#[derive(Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<GameSession>>>>,
    counter: AtomicU64,
    log_dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends every event to `<dir>/<id>.jsonl`.
    pub fn with_log_dir(dir: PathBuf) -> Self {
        SessionStore {
            log_dir: Some(dir),
            ..Self::default()
        }
    }

    fn persist(&self, session: &GameSession, from: usize) {
        let Some(dir) = &self.log_dir else { return };
        let path = dir.join(format!("{}.jsonl", session.id()));
        let lines: String = session.events()[from..]
            .iter()
            .map(|e| serde_json::to_string(e).expect("events serialize") + "\n")
            .collect();
        // the log is a recovery aid; a failed write must not break play
        if let Ok(mut f) = OpenOptions::new().create(true).append(true).open(path) {
            let _ = f.write_all(lines.as_bytes());
        }
    }

    pub fn create(&self, req: &NewSession, with_hints: bool) -> Result<SessionView, SessionError> {
        let count = self.counter.fetch_add(1, Ordering::Relaxed);
        let id = format!("{count:x}-{:08x}", rand::random::<u32>());
        let session = GameSession::new(id.clone(), req)?;
        self.persist(&session, 0);
        let view = session.view(with_hints)?;
        self.sessions
            .write()
            .expect("store lock")
            .insert(id, Arc::new(Mutex::new(session)));
        Ok(view)
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<GameSession>>, SessionError> {
        self.sessions
            .read()
            .expect("store lock")
            .get(id)
            .cloned()
            .ok_or_else(|| SessionError::UnknownSession(id.to_string()))
    }

    pub fn guess(&self, id: &str, vertex: usize, with_hints: bool) -> Result<GuessOutcome, SessionError> {
        let handle = self.get(id)?;
        let mut session = handle.lock().expect("session lock");
        let before = session.events().len();
        let outcome = session.guess(vertex, with_hints)?;
        self.persist(&session, before);
        Ok(outcome)
    }

    pub fn view(&self, id: &str, with_hints: bool) -> Result<SessionView, SessionError> {
        self.get(id)?.lock().expect("session lock").view(with_hints)
    }

    pub fn event_log(&self, id: &str) -> Result<String, SessionError> {
        Ok(self.get(id)?.lock().expect("session lock").event_log())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optimal::path_value_closed;
    use crate::rational;

    fn req(tree: &str, engine: StrategySpec, human_first: bool, seed: u64) -> NewSession {
        NewSession {
            tree: tree.into(),
            engine,
            human_first,
            seed: Some(seed),
        }
    }

    #[test]
    fn creation() {
        let s = GameSession::new("a".into(), &req("path:7", StrategySpec::Optimal, true, 1)).unwrap();
        assert_eq!(s.live().len(), 7);
        let s = GameSession::new("b".into(), &req("star:5", StrategySpec::Random, false, 1)).unwrap();
        assert_eq!(s.history().len(), 1);
        assert_eq!(s.history()[0].actor, Actor::Engine);
        let a = GameSession::new("c".into(), &req("path:9", StrategySpec::Random, true, 99)).unwrap();
        let b = GameSession::new("d".into(), &req("path:9", StrategySpec::Random, true, 99)).unwrap();
        assert_eq!(a.mine, b.mine);
        let err = GameSession::new("e".into(), &req("path:x", StrategySpec::Random, true, 1));
        assert_eq!(err.err().map(|e| e.code()), Some("invalid_tree"));
        let err = GameSession::new("f".into(), &req("edges:1-2,2-3,3-4,4-5,5-6,6-7,7-8,8-9,9-10,10-11,11-12,3-13,9-14", StrategySpec::Optimal, true, 1));
        assert_eq!(err.err().map(|e| e.code()), Some("too_large"));
    }

    #[test]
    fn guessing_rules() {
        let mut s = GameSession::new("a".into(), &req("path:5", StrategySpec::Random, true, 5)).unwrap();
        let mine = s.mine;
        let out = s.guess(mine, false).unwrap();
        assert!(out.hit_mine);
        assert_eq!(out.status, Status::HumanLost);
        assert_eq!(out.mine, Some(mine));
        assert_eq!(s.guess(mine, false).unwrap_err().code(), "session_finished");

        let mut s = GameSession::new("b".into(), &req("path:2", StrategySpec::Optimal, true, 5)).unwrap();
        let other = 3 - s.mine;
        let out = s.guess(other, false).unwrap();
        assert!(!out.hit_mine);
        assert_eq!(out.status, Status::HumanWon);
        assert!(out.engine_reply.unwrap().hit_mine);

        let mut s = GameSession::new("c".into(), &req("path:9", StrategySpec::Random, true, 8)).unwrap();
        let safe = (1..=9).find(|&v| v != s.mine).unwrap();
        s.guess(safe, false).unwrap();
        assert_eq!(s.guess(safe, false).unwrap_err().code(), "vertex_dead");
    }

    #[test]
    fn star_root_leaves_singleton() {
        for seed in 0..20 {
            let mut s = GameSession::new("s".into(), &req("star:6", StrategySpec::Random, true, seed)).unwrap();
            if s.mine == 1 {
                continue;
            }
            let mine = s.mine;
            let out = s.guess(1, false).unwrap();
            assert_eq!(out.surviving_component, vec![mine]);
            // the engine is left with the mine alone and must guess it
            assert_eq!(out.status, Status::HumanWon);
        }
    }

    #[test]
    fn mine_hidden_while_active() {
        let store = SessionStore::new();
        let view = store.create(&req("path:7", StrategySpec::Optimal, true, 3), true).unwrap();
        let text = serde_json::to_string(&view).unwrap();
        assert!(!text.contains("mine"));
        assert_eq!(view.hints.unwrap().best, BTreeSet::from([2, 6]));
    }

    #[test]
    fn replay_matches() {
        let mut s = GameSession::new("r".into(), &req("spider:3,2,2", StrategySpec::Random, false, 77)).unwrap();
        while s.status() == Status::Active {
            let v = s.live()[0];
            s.guess(v, false).unwrap();
        }
        let again = GameSession::replay("r".into(), &s.event_log()).unwrap();
        assert_eq!(
            serde_json::to_string(&again.view(false).unwrap()).unwrap(),
            serde_json::to_string(&s.view(false).unwrap()).unwrap()
        );
        assert!(GameSession::replay("x".into(), "").is_err());
        assert!(GameSession::replay("x".into(), "{\"event\":\"guess\",\"vertex\":1}").is_err());
    }

    #[test]
    fn log_files_replay() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::with_log_dir(dir.path().to_path_buf());
        let view = store.create(&req("path:6", StrategySpec::ExploitDp, true, 12), false).unwrap();
        let mut live = view.live.clone();
        loop {
            let out = store.guess(&view.id, live[0], false).unwrap();
            if out.status != Status::Active {
                break;
            }
            live = store.view(&view.id, false).unwrap().live;
        }
        let log = std::fs::read_to_string(dir.path().join(format!("{}.jsonl", view.id))).unwrap();
        assert_eq!(log, store.event_log(&view.id).unwrap());
        let replayed = GameSession::replay(view.id.clone(), &log).unwrap();
        assert_eq!(replayed.view(false).unwrap(), store.view(&view.id, false).unwrap());
    }

    #[test]
    fn optimal_human_wins_at_closed_form_rate() {
        let n = 7;
        let trials = 3000;
        let mut wins = 0u32;
        for seed in 0..trials {
            let mut s = GameSession::new("h".into(), &req("path:7", StrategySpec::Optimal, true, seed)).unwrap();
            while s.status() == Status::Active {
                let (local, map) = s.local();
                let best = optimal_moves(&local).unwrap().best_moves;
                let v = map[*best.iter().next_back().unwrap() - 1];
                s.guess(v, false).unwrap();
            }
            wins += u32::from(s.status() == Status::HumanWon);
        }
        let exact = rational::to_f64(&path_value_closed(n));
        let mean = f64::from(wins) / trials as f64;
        let stderr = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!((mean - exact).abs() < 4.0 * stderr, "mean {mean} vs {exact}");
    }
}
