use std::collections::BTreeMap;
use std::fmt;

use crate::structure::Point;

/// An injective point map, with a flag recording whether the image is
/// self-sufficient in the target.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EmbeddingMap {
    pub pairs: BTreeMap<Point, Point>,
    pub strong: bool,
}

impl EmbeddingMap {
    pub fn new(pairs: impl IntoIterator<Item = (Point, Point)>, strong: bool) -> Self {
        EmbeddingMap { pairs: pairs.into_iter().collect(), strong }
    }

    pub fn identity<'a>(points: impl IntoIterator<Item = &'a Point>, strong: bool) -> Self {
        Self::new(points.into_iter().map(|p| (p.clone(), p.clone())), strong)
    }

    pub fn get(&self, p: &Point) -> Option<&Point> {
        self.pairs.get(p)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.pairs.iter().all(|(a, b)| a == b)
    }

    pub fn inverse(&self) -> Self {
        Self::new(self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())), self.strong)
    }

    /// `other ∘ self`; points whose image `other` does not map are dropped.
    pub fn then(&self, other: &EmbeddingMap) -> Self {
        Self::new(
            self.pairs.iter().filter_map(|(a, b)| other.get(b).map(|c| (a.clone(), c.clone()))),
            self.strong && other.strong,
        )
    }
}

impl fmt::Display for EmbeddingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.pairs.iter().map(|(a, b)| format!("{a}->{b}")).collect();
        write!(f, "{{{}}}", body.join(", "))
    }
}
