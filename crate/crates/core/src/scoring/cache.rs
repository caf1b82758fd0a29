use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex, OnceLock};

use crate::data::Dataset;

use super::{FamilyKey, FamilyScore, ScoreError, Scorer, ScorerId};

type Slot = Arc<OnceLock<Result<FamilyScore, ScoreError>>>;

/// Memoized family scores for one dataset. Each `(scorer, family)` is
/// computed at most once, also under concurrent access; failures are
/// cached like successes.
#[derive(Debug, Default)]
pub struct ScoreCache {
    slots: Mutex<HashMap<(ScorerId, FamilyKey), Slot>>,
    computed: AtomicUsize,
}

impl ScoreCache {
    pub fn new() -> Self {
        ScoreCache::default()
    }

    pub fn get_or_compute(&self, key: &FamilyKey, data: &Dataset, scorer: &dyn Scorer) -> Result<FamilyScore, ScoreError> {
        let slot = {
            let mut slots = self.slots.lock().unwrap_or_else(|e| e.into_inner());
            Arc::clone(slots.entry((scorer.id(), key.clone())).or_default())
        };
        slot.get_or_init(|| {
            self.computed.fetch_add(1, Ordering::Relaxed);
            scorer.score_family(key, data)
        })
        .clone()
    }

    /// Number of distinct entries.
    pub fn len(&self) -> usize {
        self.slots.lock().unwrap_or_else(|e| e.into_inner()).len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of times a scorer was actually invoked.
    pub fn computations(&self) -> usize {
        self.computed.load(Ordering::Relaxed)
    }

    pub fn keys(&self) -> Vec<(ScorerId, FamilyKey)> {
        let mut keys: Vec<_> = self.slots.lock().unwrap_or_else(|e| e.into_inner()).keys().cloned().collect();
        keys.sort();
        keys
    }
}

/// `cache.get_or_compute` as a free function.
pub fn cache_get_or_compute(
    cache: &ScoreCache,
    key: &FamilyKey,
    data: &Dataset,
    scorer: &dyn Scorer,
) -> Result<FamilyScore, ScoreError> {
    cache.get_or_compute(key, data, scorer)
}
