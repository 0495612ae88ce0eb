//! Constant-time evaluation of CROSS moves against a cached giant tour.
//!
//! A move on positions `[i1, i1+l1)` and `[i2, i2+l2)` rewrites the tour as
//! `A S2 B S1 C`. Every piece is summarised so that feasibility and the new
//! list of path prizes can be derived without re-propagating the tour. Path
//! prizes are produced as a short list of tokens, each either a single new
//! value or a range of unchanged paths of the current tour.

use std::cmp::Ordering;

use arrayvec::ArrayVec;

use crate::model::{ExpandedGraph, TIME_EPS};

const PRIZE_TOL: f64 = 1e-9;

/// Prize comparison that treats rounding noise as equality.
pub(crate) fn cmp_prize(a: f64, b: f64) -> Ordering {
    if (a - b).abs() <= PRIZE_TOL * a.abs().max(b.abs()).max(1.0) {
        Ordering::Equal
    } else if a < b {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

/// Per-position data of the current tour.
pub(crate) struct TourCache<'g> {
    graph: &'g ExpandedGraph,
    order: Vec<usize>,
    /// Time service ends at each position; zero at depot copies.
    depart: Vec<f64>,
    /// Latest service start keeping the rest of the path feasible.
    latest: Vec<f64>,
    /// Path of each position, with a virtual entry `paths` at index `len`.
    path_of: Vec<usize>,
    /// Prize collected on the path up to and including each position.
    cum: Vec<f64>,
    prizes: Vec<f64>,
    prefix: Vec<f64>,
    zero_from: usize,
    /// First position of the trailing run of depot copies.
    trailing: usize,
    feasible: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Token {
    Value(f64),
    Range(usize, usize),
}

pub(crate) type Tokens = ArrayVec<Token, 10>;

#[derive(Debug, Clone, Copy)]
struct Chain {
    first: usize,
    last: usize,
    earliest: f64,
    duration: f64,
    limit: f64,
    ok: bool,
    prize: f64,
}

impl Chain {
    fn single(g: &ExpandedGraph, v: usize) -> Chain {
        Chain {
            first: v,
            last: v,
            earliest: g.open(v),
            duration: g.service(v),
            limit: g.close(v),
            ok: true,
            prize: g.prize(v),
        }
    }

    fn push(&mut self, g: &ExpandedGraph, v: usize) {
        let tau = g.travel(self.last, v);
        let lim = g.close(v) - self.duration - tau;
        self.ok &= self.earliest <= lim + TIME_EPS;
        self.limit = self.limit.min(lim);
        self.earliest = self.earliest.max(g.open(v) - self.duration - tau);
        self.duration += tau + g.service(v);
        self.prize += g.prize(v);
        self.last = v;
    }

    /// Departure from the last node when the first is reached at `t`.
    #[inline]
    fn enter(&self, t: f64) -> Option<f64> {
        (self.ok && t <= self.limit + TIME_EPS).then(|| t.max(self.earliest) + self.duration)
    }
}

#[derive(Debug, Clone, Copy)]
enum Piece {
    Empty,
    Chain(Chain),
    /// Contains at least one depot copy: an optional customer head ending
    /// at `first_depot`, complete paths `inner`, and a tail path ending at
    /// position `tail`.
    Split {
        head: usize,
        first_depot: usize,
        inner: (usize, usize),
        tail: usize,
    },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct PieceBuilder {
    start: usize,
    end: usize,
    piece: Piece,
    all_depot: bool,
}

impl PieceBuilder {
    fn new(start: usize) -> Self {
        PieceBuilder {
            start,
            end: start,
            piece: Piece::Empty,
            all_depot: true,
        }
    }

    fn is_empty(&self) -> bool {
        self.end == self.start
    }

    fn has_depot(&self) -> bool {
        matches!(self.piece, Piece::Split { .. })
    }

    fn push(&mut self, c: &TourCache<'_>) {
        let pos = self.end;
        let v = c.order[pos];
        let depot = c.graph.is_depot(v);
        self.all_depot &= depot;
        self.piece = match self.piece {
            Piece::Empty | Piece::Chain(_) if depot => Piece::Split {
                head: self.start,
                first_depot: pos,
                inner: (c.path_of[pos], c.path_of[pos]),
                tail: pos,
            },
            Piece::Empty => Piece::Chain(Chain::single(c.graph, v)),
            Piece::Chain(mut ch) => {
                ch.push(c.graph, v);
                Piece::Chain(ch)
            }
            Piece::Split {
                head,
                first_depot,
                inner,
                ..
            } => Piece::Split {
                head,
                first_depot,
                inner: if depot {
                    (inner.0, c.path_of[pos])
                } else {
                    inner
                },
                tail: pos,
            },
        };
        self.end += 1;
    }
}

/// The path being extended while a candidate tour is assembled.
#[derive(Debug, Clone, Copy, Default)]
struct Open {
    last: usize,
    time: f64,
    prize: f64,
}

#[derive(Debug, Clone, Default)]
struct Entered {
    open: Open,
    toks: ArrayVec<Token, 2>,
}

/// First difference between a candidate's score sequence and the current
/// one. Index 0 is the main prize, index `1 + j` the `j`-th tail path.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Diff {
    pub ord: Ordering,
    pub at: usize,
    /// The candidate's value at `at`.
    pub value: f64,
}

impl Diff {
    /// Orders candidate `self` against candidate `other` when both were
    /// measured against the same tour. `None` means the first differences
    /// coincide and a full comparison is needed.
    pub fn versus(&self, other: &Diff) -> Option<Ordering> {
        match (self.ord, other.ord) {
            (Ordering::Equal, o) => Some(o.reverse()),
            (o, Ordering::Equal) => Some(o),
            _ if self.at < other.at => Some(self.ord),
            _ if self.at > other.at => Some(other.ord.reverse()),
            _ => match cmp_prize(self.value, other.value) {
                Ordering::Equal => None,
                o => Some(o),
            },
        }
    }
}

/// A move in position form: segments `[i1, i1+l1)` and `[i2, i2+l2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Move {
    pub i1: usize,
    pub l1: usize,
    pub i2: usize,
    pub l2: usize,
}

impl Move {
    pub fn apply(&self, order: &[usize]) -> Vec<usize> {
        let Move { i1, l1, i2, l2 } = *self;
        let mut out = Vec::with_capacity(order.len());
        out.extend_from_slice(&order[..i1]);
        out.extend_from_slice(&order[i2..i2 + l2]);
        out.extend_from_slice(&order[i1 + l1..i2]);
        out.extend_from_slice(&order[i1..i1 + l1]);
        out.extend_from_slice(&order[i2 + l2..]);
        out
    }
}

impl<'g> TourCache<'g> {
    pub fn new(order: &[usize], graph: &'g ExpandedGraph) -> Self {
        let n = order.len();
        let mut depart = vec![0.0; n];
        let mut latest = vec![graph.horizon(); n];
        let mut path_of = vec![0; n + 1];
        let mut cum = vec![0.0; n];
        let mut prizes = Vec::new();
        let mut feasible = true;
        for (pos, &v) in order.iter().enumerate() {
            if graph.is_depot(v) {
                prizes.push(0.0);
            } else {
                let p = order[pos - 1];
                let arrival = (depart[pos - 1] + graph.travel(p, v)).max(graph.open(v));
                if arrival > graph.close(v) + TIME_EPS {
                    feasible = false;
                }
                depart[pos] = arrival + graph.service(v);
                cum[pos] = cum[pos - 1] + graph.prize(v);
                *prizes.last_mut().expect("leading depot") = cum[pos];
            }
            path_of[pos] = prizes.len() - 1;
        }
        path_of[n] = prizes.len();
        for pos in (0..n).rev() {
            let v = order[pos];
            if graph.is_depot(v) {
                continue;
            }
            latest[pos] = match order.get(pos + 1) {
                Some(&w) if !graph.is_depot(w) => graph
                    .close(v)
                    .min(latest[pos + 1] - graph.service(v) - graph.travel(v, w)),
                _ => graph.close(v),
            };
        }
        let mut prefix = Vec::with_capacity(prizes.len() + 1);
        prefix.push(0.0);
        for &p in &prizes {
            prefix.push(prefix.last().unwrap() + p);
        }
        let zero_from = prizes.iter().rposition(|&p| p != 0.0).map_or(0, |k| k + 1);
        let trailing = order
            .iter()
            .rposition(|&v| !graph.is_depot(v))
            .map_or(1, |k| k + 1);
        TourCache {
            graph,
            order: order.to_vec(),
            depart,
            latest,
            path_of,
            cum,
            prizes,
            prefix,
            zero_from,
            trailing,
            feasible,
        }
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn is_feasible(&self) -> bool {
        self.feasible
    }

    pub fn prizes(&self) -> &[f64] {
        &self.prizes
    }

    pub fn main_prize(&self, m: usize) -> f64 {
        self.prefix[m.min(self.prizes.len())]
    }

    fn open_after(&self, pos: usize) -> Open {
        Open {
            last: self.order[pos],
            time: self.depart[pos],
            prize: self.cum[pos],
        }
    }

    #[inline]
    fn feed(&self, open: &mut Open, piece: &Piece, toks: &mut Tokens) -> bool {
        match *piece {
            Piece::Empty => true,
            Piece::Chain(ref ch) => {
                let t = open.time + self.graph.travel(open.last, ch.first);
                match ch.enter(t) {
                    Some(out) => {
                        open.time = out;
                        open.last = ch.last;
                        open.prize += ch.prize;
                        true
                    }
                    None => false,
                }
            }
            Piece::Split {
                head,
                first_depot,
                inner,
                tail,
            } => {
                if head < first_depot {
                    let t = open.time + self.graph.travel(open.last, self.order[head]);
                    if t > self.latest[head] + TIME_EPS {
                        return false;
                    }
                    open.prize += self.cum[first_depot - 1] - self.cum[head - 1];
                }
                toks.push(Token::Value(open.prize));
                if inner.0 < inner.1 {
                    toks.push(Token::Range(inner.0, inner.1));
                }
                *open = self.open_after(tail);
                true
            }
        }
    }

    /// Head-only feasibility of `piece` entered from `open`.
    fn enters(&self, open: &Open, piece: &Piece) -> bool {
        match *piece {
            Piece::Empty => true,
            Piece::Chain(ref ch) => ch
                .enter(open.time + self.graph.travel(open.last, ch.first))
                .is_some(),
            Piece::Split {
                head, first_depot, ..
            } => {
                head == first_depot
                    || open.time + self.graph.travel(open.last, self.order[head])
                        <= self.latest[head] + TIME_EPS
            }
        }
    }

    fn close(&self, open: Open, c: usize, toks: &mut Tokens) -> bool {
        let n = self.order.len();
        let paths = self.prizes.len();
        if c == n {
            toks.push(Token::Value(open.prize));
            return true;
        }
        let v = self.order[c];
        let k = self.path_of[c];
        if self.graph.is_depot(v) {
            toks.push(Token::Value(open.prize));
            toks.push(Token::Range(k, paths));
            return true;
        }
        let t = open.time + self.graph.travel(open.last, v);
        if t > self.latest[c] + TIME_EPS {
            return false;
        }
        toks.push(Token::Value(open.prize + self.prizes[k] - self.cum[c - 1]));
        if k + 1 < paths {
            toks.push(Token::Range(k + 1, paths));
        }
        true
    }

    /// First-`m` prize of a candidate.
    pub fn main_sum(&self, toks: &Tokens, m: usize) -> f64 {
        let mut k = 0;
        let mut sum = 0.0;
        for tok in toks {
            if k >= m {
                break;
            }
            match *tok {
                Token::Value(x) => {
                    sum += x;
                    k += 1;
                }
                Token::Range(a, b) => {
                    let take = (b - a).min(m - k);
                    sum += self.prefix[a + take] - self.prefix[a];
                    k += b - a;
                }
            }
        }
        sum
    }

    /// Compares the tail (paths `m..`) of a candidate with `reference`.
    /// `aligned` marks the reference as this tour's own path prizes.
    pub fn cmp_tail(
        &self,
        toks: &Tokens,
        m: usize,
        reference: &[f64],
        ref_zero_from: usize,
        aligned: bool,
    ) -> Ordering {
        let mut k = 0;
        for tok in toks {
            match *tok {
                Token::Value(x) => {
                    if k >= m {
                        let o = cmp_prize(x, reference[k]);
                        if o.is_ne() {
                            return o;
                        }
                    }
                    k += 1;
                }
                Token::Range(a, b) => {
                    let len = b - a;
                    let s = k.max(m);
                    if s < k + len && !(aligned && a == k) {
                        let off = s - k;
                        for j in 0..len - off {
                            let (x, r) = (a + off + j, s + j);
                            if x >= self.zero_from && r >= ref_zero_from {
                                break;
                            }
                            let o = cmp_prize(self.prizes[x], reference[r]);
                            if o.is_ne() {
                                return o;
                            }
                        }
                    }
                    k += len;
                }
            }
        }
        Ordering::Equal
    }

    /// Compares a candidate with the current tour, reporting where the
    /// score sequences `(main, tail...)` first differ.
    pub fn diff_current(&self, toks: &Tokens, main: f64, m: usize) -> Diff {
        let o = cmp_prize(main, self.main_prize(m));
        if o.is_ne() {
            return Diff {
                ord: o,
                at: 0,
                value: main,
            };
        }
        let mut k = 0;
        for tok in toks {
            match *tok {
                Token::Value(x) => {
                    if k >= m {
                        let o = cmp_prize(x, self.prizes[k]);
                        if o.is_ne() {
                            return Diff {
                                ord: o,
                                at: k - m + 1,
                                value: x,
                            };
                        }
                    }
                    k += 1;
                }
                Token::Range(a, b) => {
                    let len = b - a;
                    let s = k.max(m);
                    if s < k + len && a != k {
                        let off = s - k;
                        for j in 0..len - off {
                            let (x, r) = (a + off + j, s + j);
                            if x >= self.zero_from && r >= self.zero_from {
                                break;
                            }
                            let o = cmp_prize(self.prizes[x], self.prizes[r]);
                            if o.is_ne() {
                                return Diff {
                                    ord: o,
                                    at: r - m + 1,
                                    value: self.prizes[x],
                                };
                            }
                        }
                    }
                    k += len;
                }
            }
        }
        Diff {
            ord: Ordering::Equal,
            at: 0,
            value: main,
        }
    }

    /// Path prizes of a candidate as a full vector.
    pub fn materialize(&self, toks: &Tokens) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.prizes.len());
        for tok in toks {
            match *tok {
                Token::Value(x) => out.push(x),
                Token::Range(a, b) => out.extend_from_slice(&self.prizes[a..b]),
            }
        }
        debug_assert_eq!(out.len(), self.prizes.len());
        out
    }

    /// Enumerates the non-null moves with segments of at most `max_len`
    /// positions, first anchors taken from `anchors`. The visitor receives
    /// each feasible candidate and returns `true` to stop the scan.
    ///
    /// Unless `complete` is set, second anchors stop one position into the
    /// trailing run of empty paths: a move anchored deeper only adds empty
    /// paths in front of the moved segment, which never scores higher than
    /// the same move anchored there, and comes later in scan order.
    pub fn scan(
        &self,
        anchors: &[usize],
        max_len: usize,
        complete: bool,
        mut visit: impl FnMut(Move, &Tokens) -> bool,
    ) -> bool {
        let n = self.order.len();
        let mut toks = Tokens::new();
        let last_i2 = if complete {
            n
        } else {
            n.min(self.trailing + 1)
        };
        let width = max_len.min(n) + 1;
        // segs[i * width + l] covers positions i..i + l
        let mut segs = Vec::with_capacity((n + 1) * width);
        for i in 0..=n {
            let mut b = PieceBuilder::new(i);
            for l in 0..width {
                if l > 0 && b.end < n {
                    b.push(self);
                }
                segs.push(b);
            }
        }
        // state after the prefix and the second segment, per (i2, l2)
        let mut entered = vec![Entered::default(); (n + 1) * width];
        let mut reach = vec![0usize; n + 1];
        for &i1 in anchors {
            if i1 == 0 || i1 >= self.trailing {
                continue;
            }
            let open_a = self.open_after(i1 - 1);
            let prefix_paths = self.path_of[i1 - 1];
            for i2 in i1..=last_i2 {
                reach[i2] = 0;
                for l2 in 0..width {
                    if i2 + l2 > n {
                        break;
                    }
                    let mut open = open_a;
                    toks.clear();
                    if !self.feed(&mut open, &segs[i2 * width + l2].piece, &mut toks) {
                        break;
                    }
                    let e = &mut entered[i2 * width + l2];
                    e.open = open;
                    e.toks.clear();
                    e.toks.extend(toks.iter().copied());
                    reach[i2] = l2 + 1;
                }
            }
            let mut s1 = PieceBuilder::new(i1);
            for l1 in 0..=max_len {
                if l1 > 0 {
                    if s1.end >= n {
                        break;
                    }
                    s1.push(self);
                }
                let mut b = PieceBuilder::new(i1 + l1);
                for i2 in i1 + l1..=last_i2.max(i1 + l1) {
                    if i2 > b.end {
                        b.push(self);
                    }
                    if l1 == 0 && b.is_empty() {
                        continue;
                    }
                    if l1 > 0 && b.has_depot() {
                        if let Piece::Split { tail, .. } = b.piece {
                            if !self.enters(&self.open_after(tail), &s1.piece) {
                                continue;
                            }
                        }
                    }
                    for l2 in 0..reach[i2] {
                        if (l1 == 0 && l2 == 0) || (l2 == 0 && b.is_empty()) {
                            continue;
                        }
                        let s2 = &segs[i2 * width + l2];
                        if s1.all_depot && s2.all_depot && (l1 == l2 || b.all_depot) {
                            continue;
                        }
                        let e = &entered[i2 * width + l2];
                        toks.clear();
                        if prefix_paths > 0 {
                            toks.push(Token::Range(0, prefix_paths));
                        }
                        toks.extend(e.toks.iter().copied());
                        let mut open = e.open;
                        if !self.feed(&mut open, &b.piece, &mut toks)
                            || !self.feed(&mut open, &s1.piece, &mut toks)
                            || !self.close(open, i2 + l2, &mut toks)
                        {
                            continue;
                        }
                        if visit(Move { i1, l1, i2, l2 }, &toks) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }
}
