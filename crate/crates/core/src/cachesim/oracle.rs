use super::trace::AccessEvent;

/// Misses of a single fully-associative LRU cache of `capacity_lines` lines,
/// by direct stack-distance computation: an access misses iff its line was
/// never seen, or at least `capacity_lines` distinct other lines were touched
/// since its previous use. Quadratic in the worst case; meant for verification
/// at test scale.
pub fn stack_distance_oracle(trace: &[AccessEvent], capacity_lines: usize, line_size: u32) -> u64 {
    let line_size = line_size as u64;
    let lines: Vec<u64> = trace
        .iter()
        .flat_map(|e| {
            let start = e.address / line_size;
            let end = (e.address + e.size as u64 - 1) / line_size;
            start..=end
        })
        .collect();

    let mut misses = 0;
    // Never holds more than `capacity_lines` entries, kept sorted.
    let mut seen: Vec<u64> = Vec::with_capacity(capacity_lines);
    for (i, line) in lines.iter().enumerate() {
        // Walk back towards the previous use of `line`; the access misses
        // once `capacity_lines` distinct other lines lie in between.
        seen.clear();
        let mut hit = false;
        for other in lines[..i].iter().rev() {
            if other == line {
                hit = true;
                break;
            }
            if let Err(pos) = seen.binary_search(other) {
                seen.insert(pos, *other);
            }
            if seen.len() >= capacity_lines {
                break;
            }
        }
        if !hit {
            misses += 1;
        }
    }
    misses
}
