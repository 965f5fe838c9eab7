use std::collections::{BTreeMap, BTreeSet};

use super::EdgeId;

/// Map from the edge ids of a source graph to those of a target graph.
/// Several sources may share one target; edges with no image are listed
/// as dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EdgeMap {
    pairs: BTreeMap<EdgeId, EdgeId>,
    dropped: BTreeSet<EdgeId>,
}

impl EdgeMap {
    pub fn identity(ids: impl IntoIterator<Item = EdgeId>) -> Self {
        EdgeMap {
            pairs: ids.into_iter().map(|e| (e, e)).collect(),
            dropped: BTreeSet::new(),
        }
    }

    pub fn insert(&mut self, from: EdgeId, to: EdgeId) {
        self.dropped.remove(&from);
        self.pairs.insert(from, to);
    }

    pub fn drop(&mut self, from: EdgeId) {
        self.pairs.remove(&from);
        self.dropped.insert(from);
    }

    pub fn get(&self, e: EdgeId) -> Option<EdgeId> {
        self.pairs.get(&e).copied()
    }

    pub fn is_dropped(&self, e: EdgeId) -> bool {
        self.dropped.contains(&e)
    }

    pub fn dropped(&self) -> &BTreeSet<EdgeId> {
        &self.dropped
    }

    pub fn pairs(&self) -> impl Iterator<Item = (EdgeId, EdgeId)> + '_ {
        self.pairs.iter().map(|(&a, &b)| (a, b))
    }

    pub fn domain(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.pairs.keys().copied().chain(self.dropped.iter().copied())
    }

    /// All sources mapped onto `target`.
    pub fn preimage(&self, target: EdgeId) -> Vec<EdgeId> {
        self.pairs
            .iter()
            .filter(|(_, &t)| t == target)
            .map(|(&s, _)| s)
            .collect()
    }

    /// `then ∘ self`: first this map, then `then`. Edges dropped by either
    /// map are dropped in the composite; edges unknown to `then` pass
    /// through unchanged.
    pub fn then(&self, then: &EdgeMap) -> EdgeMap {
        let mut out = EdgeMap {
            pairs: BTreeMap::new(),
            dropped: self.dropped.clone(),
        };
        for (&s, &mid) in &self.pairs {
            if then.is_dropped(mid) {
                out.dropped.insert(s);
            } else {
                out.pairs.insert(s, then.get(mid).unwrap_or(mid));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn composition_follows_both_maps() {
        let mut f = EdgeMap::identity([EdgeId(0), EdgeId(1), EdgeId(2), EdgeId(3)]);
        f.insert(EdgeId(0), EdgeId(5));
        f.insert(EdgeId(1), EdgeId(5));
        f.drop(EdgeId(3));
        let mut g = EdgeMap::identity([EdgeId(5), EdgeId(2)]);
        g.insert(EdgeId(5), EdgeId(7));
        g.insert(EdgeId(2), EdgeId(7));
        let h = f.then(&g);
        assert_eq!(h.get(EdgeId(0)), Some(EdgeId(7)));
        assert_eq!(h.get(EdgeId(2)), Some(EdgeId(7)));
        assert!(h.is_dropped(EdgeId(3)));
        assert_eq!(h.preimage(EdgeId(7)), vec![EdgeId(0), EdgeId(1), EdgeId(2)]);
    }
}
