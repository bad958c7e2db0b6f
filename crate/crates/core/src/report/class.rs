use std::fmt;

use serde::{Deserialize, Serialize};

use crate::falsehood::FalsehoodLabel;
use crate::ingest::Category;

/// Group category crossed with the cascade's falsehood label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CascadeClass {
    pub category: Category,
    pub falsehood: FalsehoodLabel,
}

impl CascadeClass {
    pub const ALL: [CascadeClass; 4] = [
        CascadeClass::new(Category::Political, FalsehoodLabel::Falsehood),
        CascadeClass::new(Category::Political, FalsehoodLabel::Unclassified),
        CascadeClass::new(Category::NonPolitical, FalsehoodLabel::Falsehood),
        CascadeClass::new(Category::NonPolitical, FalsehoodLabel::Unclassified),
    ];

    pub const fn new(category: Category, falsehood: FalsehoodLabel) -> Self {
        Self {
            category,
            falsehood,
        }
    }

    pub fn name(self) -> String {
        format!("{}_{}", self.category.as_str(), self.falsehood.as_str())
    }
}

/// A named subset of cascades that gets its own series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Segment {
    All,
    Category(Category),
    Class(CascadeClass),
}

impl Segment {
    /// Every segment, in output order: all, the two categories, the four classes.
    pub fn all() -> Vec<Segment> {
        let mut out = vec![
            Segment::All,
            Segment::Category(Category::Political),
            Segment::Category(Category::NonPolitical),
        ];
        out.extend(CascadeClass::ALL.map(Segment::Class));
        out
    }

    pub fn name(self) -> String {
        match self {
            Segment::All => "all".to_string(),
            Segment::Category(c) => c.as_str().to_string(),
            Segment::Class(c) => c.name(),
        }
    }

    pub fn contains(self, class: CascadeClass) -> bool {
        match self {
            Segment::All => true,
            Segment::Category(c) => class.category == c,
            Segment::Class(c) => class == c,
        }
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}
