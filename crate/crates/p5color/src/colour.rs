//! Colours and colour sets over a universe `{1..k}`.

use std::fmt;

/// A colour index. Colours are 1-based throughout: the universe for a
/// k-colouring problem is `{1, 2, .., k}`.
pub type Colour = u32;

/// Largest supported colour universe.
pub const MAX_COLOURS: u32 = 32;

/// A subset of the colour universe `{1..k}`, stored as a bitmask
/// (bit `c-1` set ⟺ colour `c` present).
///
/// This is the type of every vertex list `l(v)` and of every colour
/// union `col(S)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ColourSet(u32);

impl ColourSet {
    pub const EMPTY: ColourSet = ColourSet(0);

    /// The full universe `{1..k}`.
    pub fn full(k: u32) -> Self {
        assert!(k <= MAX_COLOURS, "colour universe capped at {MAX_COLOURS}");
        if k == 0 {
            ColourSet(0)
        } else {
            ColourSet(u32::MAX >> (32 - k))
        }
    }

    pub fn singleton(c: Colour) -> Self {
        Self::EMPTY.with(c)
    }

    pub fn contains(self, c: Colour) -> bool {
        debug_assert!((1..=MAX_COLOURS).contains(&c));
        self.0 & (1 << (c - 1)) != 0
    }

    #[must_use]
    pub fn with(self, c: Colour) -> Self {
        assert!((1..=MAX_COLOURS).contains(&c), "colour {c} out of range");
        ColourSet(self.0 | (1 << (c - 1)))
    }

    #[must_use]
    pub fn without(self, c: Colour) -> Self {
        debug_assert!((1..=MAX_COLOURS).contains(&c));
        ColourSet(self.0 & !(1 << (c - 1)))
    }

    #[must_use]
    pub fn union(self, other: Self) -> Self {
        ColourSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersect(self, other: Self) -> Self {
        ColourSet(self.0 & other.0)
    }

    /// Set difference `self − other`.
    #[must_use]
    pub fn minus(self, other: Self) -> Self {
        ColourSet(self.0 & !other.0)
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_subset_of(self, other: Self) -> bool {
        self.0 & !other.0 == 0
    }

    /// The single member of a singleton set.
    pub fn solo(self) -> Option<Colour> {
        if self.len() == 1 {
            Some(self.0.trailing_zeros() + 1)
        } else {
            None
        }
    }

    /// Colours in ascending order.
    pub fn iter(self) -> impl Iterator<Item = Colour> {
        (1..=MAX_COLOURS).filter(move |&c| self.contains(c))
    }

    /// Compare as sorted element sequences ({1,2} < {1,3} < {2,3}, and
    /// {1,4} < {2,3}). Used wherever a documented tie-break needs an
    /// order on colour sets.
    pub fn lex_cmp(self, other: Self) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl FromIterator<Colour> for ColourSet {
    fn from_iter<I: IntoIterator<Item = Colour>>(iter: I) -> Self {
        iter.into_iter().fold(Self::EMPTY, ColourSet::with)
    }
}

impl fmt::Debug for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, c) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "}}")
    }
}
