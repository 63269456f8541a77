use std::fmt;

use serde::{Deserialize, Serialize};

use crate::Year;

/// Inclusive range of calendar years.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: Year,
    pub end: Year,
}

impl Span {
    pub fn new(start: Year, end: Year) -> Self {
        debug_assert!(start <= end, "empty span [{start}, {end}]");
        Span { start, end }
    }

    pub fn single(year: Year) -> Self {
        Span { start: year, end: year }
    }

    /// Number of calendar years covered.
    pub fn years(&self) -> u32 {
        (self.end - self.start + 1) as u32
    }

    pub fn contains(&self, year: Year) -> bool {
        self.start <= year && year <= self.end
    }

    /// `true` when `other` lies entirely inside `self`.
    pub fn covers(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    pub fn overlaps(&self, other: &Span) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    /// Overlapping or adjacent (`end + 1 == start`).
    pub fn touches(&self, other: &Span) -> bool {
        self.start <= other.end + 1 && other.start <= self.end + 1
    }

    /// Parses `start-end` (a single year is accepted as a one-year span).
    pub fn parse(s: &str) -> Option<Span> {
        let s = s.trim();
        // Years may be negative in principle; split on the separator that
        // follows the first character.
        let split = s.char_indices().skip(1).find(|&(_, c)| c == '-').map(|(i, _)| i);
        match split {
            Some(i) => {
                let start = s[..i].parse().ok()?;
                let end = s[i + 1..].parse().ok()?;
                (start <= end).then_some(Span { start, end })
            }
            None => s.parse().ok().map(Span::single),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

/// Sorts spans and merges those that overlap or are adjacent.
pub fn merge_spans(mut spans: Vec<Span>) -> Vec<Span> {
    spans.sort_unstable();
    let mut out: Vec<Span> = Vec::with_capacity(spans.len());
    for s in spans {
        match out.last_mut() {
            Some(last) if s.start <= last.end + 1 => last.end = last.end.max(s.end),
            _ => out.push(s),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_overlapping_and_adjacent() {
        let merged = merge_spans(vec![
            Span::new(7, 9),
            Span::new(2, 6),
            Span::new(11, 12),
            Span::new(3, 4),
        ]);
        assert_eq!(merged, vec![Span::new(2, 9), Span::new(11, 12)]);
    }

    #[test]
    fn parse_round_trip() {
        let s = Span::new(2008, 2012);
        assert_eq!(Span::parse(&s.to_string()), Some(s));
        assert_eq!(Span::parse("5"), Some(Span::single(5)));
        assert_eq!(Span::parse("9-3"), None);
        assert_eq!(Span::parse("-3--1"), Some(Span::new(-3, -1)));
    }

    #[test]
    fn containment() {
        let outer = Span::new(1, 7);
        assert!(outer.covers(&Span::new(3, 6)));
        assert!(!Span::new(3, 6).covers(&outer));
        assert!(Span::new(1, 3).touches(&Span::new(4, 5)));
        assert!(!Span::new(1, 3).overlaps(&Span::new(4, 5)));
        assert_eq!(outer.years(), 7);
    }
}
