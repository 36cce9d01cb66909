use core::fmt;

/// Limits for every bounded quantifier in the crate.
///
/// Universal properties quantify over all paths of proarrows; a finite search
/// can only certify them up to a bound. Every certificate carries the bounds it
/// was obtained under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchBounds {
    /// Longest domain path quantified over (cartesian checks, law checks, and the
    /// total length of flanked domains in composite and unit checks).
    pub max_path: usize,
    /// Number of flanking proarrows allowed on each side of a composite or unit.
    pub max_flank: usize,
    /// Nesting depth of substitution exercised by the law checks.
    pub max_depth: usize,
    /// Work budget: frames or arrangements a single check may examine before it
    /// gives up and reports truncation.
    pub max_work: u64,
}

impl SearchBounds {
    /// Defaults for the substitution-law checks.
    pub const fn laws() -> Self {
        SearchBounds {
            max_path: 4,
            max_flank: 1,
            max_depth: 2,
            max_work: 50_000_000,
        }
    }

    /// Defaults for universal-property searches.
    pub const fn universal() -> Self {
        SearchBounds {
            max_path: 3,
            max_flank: 1,
            max_depth: 2,
            max_work: 50_000_000,
        }
    }

    pub const fn with_path(mut self, max_path: usize) -> Self {
        self.max_path = max_path;
        self
    }

    pub const fn with_flank(mut self, max_flank: usize) -> Self {
        self.max_flank = max_flank;
        self
    }

    pub const fn with_depth(mut self, max_depth: usize) -> Self {
        self.max_depth = max_depth;
        self
    }

    pub const fn with_work(mut self, max_work: u64) -> Self {
        self.max_work = max_work;
        self
    }
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds::universal()
    }
}

impl fmt::Display for SearchBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "path<={} flank<={} depth<={} work<={}",
            self.max_path, self.max_flank, self.max_depth, self.max_work
        )
    }
}

#[cfg(test)]
mod tests {
    use alloc::string::ToString;

    use super::*;

    #[test]
    fn builders_change_one_field() {
        let b = SearchBounds::universal().with_path(5).with_flank(2).with_depth(3).with_work(7);
        assert_eq!((b.max_path, b.max_flank, b.max_depth, b.max_work), (5, 2, 3, 7));
        assert_eq!(b.to_string(), "path<=5 flank<=2 depth<=3 work<=7");
        assert_eq!(SearchBounds::default(), SearchBounds::universal());
    }
}
