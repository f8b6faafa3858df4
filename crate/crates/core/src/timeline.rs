//! ASCII occupancy grid of one link: rows are modes, columns are slots.

use crate::error::{Error, Result};
use crate::model::{mode_label, Instance};
use crate::solve::{LinkRef, Schedule};

/// `A`..`Z` by request position in the instance, `#` beyond.
pub fn request_letter(index: usize) -> char {
    if index < 26 {
        (b'A' + index as u8) as char
    } else {
        '#'
    }
}

/// Link carrying the most (mode, slot) cells, first in link order on ties.
pub fn busiest_link(instance: &Instance, schedule: &Schedule) -> Option<LinkRef> {
    let topo = &instance.topology;
    let mut best: Option<(usize, LinkRef)> = None;
    for link in topo.links() {
        let r = LinkRef::new(topo.node_id(link.from), topo.node_id(link.to));
        let used: usize = schedule
            .accepted
            .iter()
            .filter(|a| a.path.contains(&r))
            .map(|a| a.modes.len() * a.slots.len())
            .sum();
        if best.as_ref().is_none_or(|(b, _)| used > *b) {
            best = Some((used, r));
        }
    }
    best.map(|(_, r)| r)
}

/// Renders the grid for `link`, or for the busiest link when `None`.
/// Cells are separated by `|` when the frame has a guard interval.
pub fn render_timeline(instance: &Instance, schedule: &Schedule, link: Option<&LinkRef>) -> Result<String> {
    let topo = &instance.topology;
    let link = match link {
        Some(l) => l.clone(),
        None => busiest_link(instance, schedule)
            .ok_or_else(|| Error::InvalidTopology("the topology has no links".into()))?,
    };
    let index = topo
        .node_index(&link.from)
        .zip(topo.node_index(&link.to))
        .and_then(|(f, t)| topo.link_between(f, t))
        .ok_or_else(|| Error::Structural(vec![format!("link {link} does not exist")]))?;

    let slots = instance.slot_count();
    let mut grid = vec![vec!['.'; slots]; instance.modes];
    let mut shown = Vec::new();
    for a in schedule.accepted.iter().filter(|a| a.path.contains(&link)) {
        let Some(r) = instance.request_index(&a.request_id) else {
            return Err(Error::Structural(vec![format!("unknown request '{}'", a.request_id)]));
        };
        let letter = request_letter(r);
        for &m in a.modes.iter().filter(|&&m| m < instance.modes) {
            let end = a.slots.end.min(slots);
            grid[m][a.slots.start.min(end)..end].fill(letter);
        }
        shown.push((r, letter));
    }
    shown.sort();

    let separator = if instance.frame.guard_us.is_some() { "|" } else { "" };
    let width = mode_label(instance.modes.saturating_sub(1)).len();
    let mut out = format!(
        "link {link} ({} m), {slots} slots of {} ms\n",
        topo.links()[index].length_m,
        crate::decimal::to_f64(instance.frame.slice_ms)
    );
    for (m, row) in grid.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(char::to_string).collect();
        out.push_str(&format!("{:<width$}  {}\n", mode_label(m), cells.join(separator)));
    }
    if !shown.is_empty() {
        out.push('\n');
        for (r, letter) in shown {
            out.push_str(&format!(
                "{letter} = {} ({} Gb/s)\n",
                instance.requests[r].id,
                crate::decimal::to_f64(instance.requests[r].bandwidth_gbps)
            ));
        }
    }
    Ok(out)
}
