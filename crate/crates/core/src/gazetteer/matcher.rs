use super::{EntityDatabase, EntityMention};

impl EntityDatabase {
    /// Recognize all entity mentions in a raw (unnormalized) headline.
    ///
    /// Matching is ASCII case-insensitive and must align to word boundaries
    /// on both sides: a boundary exists at a transition between alphanumeric
    /// and non-alphanumeric characters and at the string edges, so a phrase
    /// never matches inside a larger alphanumeric token.
    ///
    /// Overlap resolution is greedy: among all boundary-aligned candidates,
    /// the longer match wins and equal lengths break toward the earlier start
    /// offset. The returned mentions are pairwise disjoint and sorted by
    /// start offset. The result is independent of database record order.
    pub fn recognize(&self, headline: &str) -> Vec<EntityMention> {
        let Some(automaton) = &self.automaton else {
            return Vec::new();
        };

        // byte offset -> char offset for every char boundary
        let mut char_of_byte = vec![usize::MAX; headline.len() + 1];
        for (chars, (bytes, _)) in headline.char_indices().enumerate() {
            char_of_byte[bytes] = chars;
        }
        char_of_byte[headline.len()] = headline.chars().count();

        // all boundary-aligned candidates, overlapping included
        let mut candidates: Vec<(usize, usize, usize)> = Vec::new();
        for m in automaton.find_overlapping_iter(headline) {
            if !is_boundary_before(headline, m.start()) || !is_boundary_after(headline, m.end()) {
                continue;
            }
            candidates.push((char_of_byte[m.start()], char_of_byte[m.end()], m.pattern().as_usize()));
        }

        // longest first, then leftmost
        candidates.sort_by(|a, b| {
            let len_a = a.1 - a.0;
            let len_b = b.1 - b.0;
            len_b.cmp(&len_a).then(a.0.cmp(&b.0))
        });

        let mut taken: Vec<(usize, usize, usize)> = Vec::new();
        for cand in candidates {
            if taken.iter().all(|t| cand.1 <= t.0 || cand.0 >= t.1) {
                taken.push(cand);
            }
        }
        taken.sort_by_key(|t| t.0);

        let chars: Vec<char> = headline.chars().collect();
        taken
            .into_iter()
            .map(|(start, end, pattern)| EntityMention {
                symbol: self.pattern_symbol(pattern).to_string(),
                span_start: start,
                span_end: end,
                matched_phrase: chars[start..end].iter().collect(),
            })
            .collect()
    }
}

fn is_boundary_before(text: &str, byte: usize) -> bool {
    byte == 0
        || text[..byte]
            .chars()
            .next_back()
            .map_or(true, |c| !c.is_alphanumeric())
}

fn is_boundary_after(text: &str, byte: usize) -> bool {
    byte == text.len()
        || text[byte..]
            .chars()
            .next()
            .map_or(true, |c| !c.is_alphanumeric())
}
