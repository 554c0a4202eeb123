use alloc::vec::Vec;
use super::index::KeyIndex;
use super::{growth_rate, GroupElement, GroupModel, GrowthRate, Key};
use crate::error::{Error, Result};

const ROOT: u32 = u32::MAX;

/// The word ball `W_n` with its sphere decomposition.
///
/// Elements are stored sphere by sphere; inside a sphere they are sorted by
/// key, so indices are reproducible. Each element remembers the neighbour it
/// was first discovered from, which gives a geodesic word.
#[derive(Clone)]
pub struct WordBall {
    model: u64,
    radius: usize,
    keys: KeyIndex,
    offsets: Vec<usize>,
    parent: Vec<(u32, u16)>,
}

impl WordBall {
    /// Enumerates `W_n` by breadth-first search over the generators in
    /// declared order. Fails once more than `budget` elements are needed.
    pub fn enumerate(model: &GroupModel, n: usize, budget: usize) -> Result<Self> {
        let ball = Self::enumerate_within(model, n, budget);
        if ball.radius < n {
            return Err(Error::Budget {
                what: "element",
                limit: budget,
                achieved: ball.radius,
            });
        }
        Ok(ball)
    }

    /// Largest ball of radius at most `max_radius` whose size fits `budget`.
    pub fn enumerate_within(model: &GroupModel, max_radius: usize, budget: usize) -> Self {
        let mut ball = WordBall {
            model: model.id(),
            radius: 0,
            keys: KeyIndex::default(),
            offsets: alloc::vec![0],
            parent: Vec::new(),
        };
        ball.push(model.identity().into_key(), (ROOT, 0));
        ball.offsets.push(1);
        let gens: Vec<Key> = (0..model.num_generators())
            .map(|i| model.generator(i).into_key())
            .collect();
        while ball.radius < max_radius {
            let (lo, hi) = (ball.offsets[ball.radius], ball.offsets[ball.radius + 1]);
            let mut fresh = KeyIndex::default();
            let mut parents = Vec::new();
            for u in lo..hi {
                for (gi, g) in gens.iter().enumerate() {
                    let v = model.mul_keys(ball.keys.key(u), g).expect("ball element product");
                    if ball.keys.find(&v).is_some() {
                        continue;
                    }
                    if fresh.insert(v).1 {
                        parents.push((u as u32, gi as u16));
                    }
                }
            }
            if ball.keys.len() + fresh.len() > budget {
                break;
            }
            let mut order: Vec<usize> = (0..fresh.len()).collect();
            order.sort_unstable_by(|&a, &b| fresh.key(a).cmp(fresh.key(b)));
            for i in order {
                ball.push(fresh.key(i).clone(), parents[i]);
            }
            ball.radius += 1;
            ball.offsets.push(ball.keys.len());
        }
        ball
    }

    fn push(&mut self, key: Key, parent: (u32, u16)) {
        self.keys.insert(key);
        self.parent.push(parent);
    }

    fn find(&self, key: &[u8]) -> Option<usize> {
        self.keys.find(key)
    }

    pub fn model_id(&self) -> u64 {
        self.model
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// `|W_n|`.
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.len() == 0
    }

    /// `|∂W_i|` for `i = 0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `|W_i|` for `i = 0..=radius`.
    pub fn sizes(&self) -> Vec<usize> {
        self.offsets[1..].to_vec()
    }

    /// True when some sphere is empty, i.e. the ball is the whole group.
    pub fn is_closed(&self) -> bool {
        self.sphere_sizes().contains(&0)
    }

    /// Index range of the sphere `∂W_i`.
    pub fn sphere_range(&self, i: usize) -> core::ops::Range<usize> {
        self.offsets[i]..self.offsets[i + 1]
    }

    pub fn sphere(&self, i: usize) -> impl Iterator<Item = GroupElement> + '_ {
        self.sphere_range(i).map(move |j| self.element(j))
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.len()).map(move |j| self.element(j))
    }

    pub fn element(&self, i: usize) -> GroupElement {
        GroupElement::from_key(self.model, self.keys.key(i).clone())
    }

    pub(crate) fn key(&self, i: usize) -> &[u8] {
        self.keys.key(i)
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        if g.model_id() != self.model {
            return None;
        }
        self.find(g.key())
    }

    pub(crate) fn index_of_key(&self, key: &[u8]) -> Option<usize> {
        self.find(key)
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.index_of(g).is_some()
    }

    /// Word length of the element stored at index `i`.
    pub fn length_at(&self, i: usize) -> usize {
        self.offsets.partition_point(|&o| o <= i) - 1
    }

    /// Word length of `g`, if it lies in the ball.
    pub fn length_of(&self, g: &GroupElement) -> Option<usize> {
        self.index_of(g).map(|i| self.length_at(i))
    }

    /// A geodesic word (generator indices) for the element at index `i`.
    pub fn geodesic_word(&self, mut i: usize) -> Vec<usize> {
        let mut word = Vec::new();
        while self.parent[i].0 != ROOT {
            let (p, g) = self.parent[i];
            word.push(g as usize);
            i = p as usize;
        }
        word.reverse();
        word
    }

    pub fn growth_rate(&self) -> Result<GrowthRate> {
        growth_rate(&self.sizes())
    }
}

/// `word_ball(model, n)` with the default element budget.
pub fn word_ball(model: &GroupModel, n: usize) -> Result<WordBall> {
    WordBall::enumerate(model, n, super::ELEMENT_BUDGET)
}
