use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::subdivision::VertexId;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EventKind {
    VertexReached(VertexId),
    /// Index into the engine's pending critical entries.
    CriticalEntry(usize),
    /// Index into the engine's beams; the beam's sibling rays are about to
    /// leave their current face.
    RayStrike(usize),
}

impl EventKind {
    fn class(self) -> u8 {
        match self {
            EventKind::VertexReached(_) => 0,
            EventKind::CriticalEntry(_) => 1,
            EventKind::RayStrike(_) => 2,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Event {
    pub key: f64,
    pub kind: EventKind,
    pub seq: u64,
}

impl PartialEq for Event {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Event {}
impl PartialOrd for Event {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Event {
    /// Reversed so that `BinaryHeap` pops the smallest key; ties go to
    /// vertex events, then critical entries, then strikes, then FIFO.
    fn cmp(&self, o: &Self) -> Ordering {
        o.key
            .total_cmp(&self.key)
            .then_with(|| o.kind.class().cmp(&self.kind.class()))
            .then_with(|| o.seq.cmp(&self.seq))
    }
}

/// Min-queue of events with deterministic tie-breaking.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    next_seq: u64,
}

impl EventQueue {
    pub fn push(&mut self, key: f64, kind: EventKind) {
        debug_assert!(key.is_finite() && key >= 0.0, "event key {key}");
        self.heap.push(Event {
            key,
            kind,
            seq: self.next_seq,
        });
        self.next_seq += 1;
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_ties() {
        let mut q = EventQueue::default();
        q.push(2.0, EventKind::RayStrike(0));
        q.push(1.0, EventKind::RayStrike(1));
        q.push(1.0, EventKind::CriticalEntry(0));
        q.push(1.0, EventKind::VertexReached(3));
        q.push(1.0, EventKind::RayStrike(2));
        let order: Vec<EventKind> = std::iter::from_fn(|| q.pop()).map(|e| e.kind).collect();
        assert_eq!(
            order,
            vec![
                EventKind::VertexReached(3),
                EventKind::CriticalEntry(0),
                EventKind::RayStrike(1),
                EventKind::RayStrike(2),
                EventKind::RayStrike(0),
            ]
        );
    }
}
