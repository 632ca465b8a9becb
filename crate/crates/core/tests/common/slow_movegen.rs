//! A deliberately simple 0x88 mailbox move generator used as an independent
//! oracle for perft and legality. It shares no code with the crate: its own
//! FEN reader, its own attack detection, copy-make only.

#![allow(dead_code)]

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    P,
    N,
    B,
    R,
    Q,
    K,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Pc {
    pub white: bool,
    pub kind: Kind,
}

#[derive(Clone)]
pub struct Board {
    pub sq: [Option<Pc>; 128],
    pub white_to_move: bool,
    /// K, Q, k, q
    pub castle: [bool; 4],
    pub ep: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Mv {
    pub from: usize,
    pub to: usize,
    pub promo: Option<Kind>,
}

impl Mv {
    /// UCI text, for comparing against the crate's moves.
    pub fn uci(&self) -> String {
        let name = |s: usize| format!("{}{}", (b'a' + (s & 7) as u8) as char, (s >> 4) + 1);
        let mut out = format!("{}{}", name(self.from), name(self.to));
        if let Some(k) = self.promo {
            out.push(match k {
                Kind::N => 'n',
                Kind::B => 'b',
                Kind::R => 'r',
                _ => 'q',
            });
        }
        out
    }
}

const KNIGHT: [i32; 8] = [33, 31, 18, 14, -33, -31, -18, -14];
const KING: [i32; 8] = [1, -1, 16, -16, 15, 17, -15, -17];
const DIAG: [i32; 4] = [15, 17, -15, -17];
const ORTHO: [i32; 4] = [1, -1, 16, -16];

fn on_board(s: i32) -> bool {
    (0..128).contains(&s) && (s & 0x88) == 0
}

impl Board {
    pub fn from_fen(fen: &str) -> Board {
        let parts: Vec<&str> = fen.split_whitespace().collect();
        let mut b = Board { sq: [None; 128], white_to_move: parts[1] == "w", castle: [false; 4], ep: None };
        let mut rank = 7i32;
        let mut file = 0i32;
        for c in parts[0].chars() {
            match c {
                '/' => {
                    rank -= 1;
                    file = 0;
                }
                '1'..='8' => file += c.to_digit(10).unwrap() as i32,
                _ => {
                    let kind = match c.to_ascii_lowercase() {
                        'p' => Kind::P,
                        'n' => Kind::N,
                        'b' => Kind::B,
                        'r' => Kind::R,
                        'q' => Kind::Q,
                        _ => Kind::K,
                    };
                    b.sq[(rank * 16 + file) as usize] = Some(Pc { white: c.is_ascii_uppercase(), kind });
                    file += 1;
                }
            }
        }
        for c in parts[2].chars() {
            match c {
                'K' => b.castle[0] = true,
                'Q' => b.castle[1] = true,
                'k' => b.castle[2] = true,
                'q' => b.castle[3] = true,
                _ => {}
            }
        }
        if parts[3] != "-" {
            let f = parts[3].as_bytes()[0] - b'a';
            let r = parts[3].as_bytes()[1] - b'1';
            b.ep = Some((r as usize) * 16 + f as usize);
        }
        b
    }

    fn king(&self, white: bool) -> usize {
        (0..128)
            .find(|&s| self.sq[s] == Some(Pc { white, kind: Kind::K }))
            .expect("king present")
    }

    /// Is square `s` attacked by side `by_white`? Scans outward from `s`.
    pub fn attacked(&self, s: usize, by_white: bool) -> bool {
        let s = s as i32;
        let is = |t: i32, kinds: &[Kind]| -> bool {
            on_board(t)
                && matches!(self.sq[t as usize], Some(p) if p.white == by_white && kinds.contains(&p.kind))
        };
        // pawns attack diagonally forward, so look diagonally backward
        let pawn_dirs = if by_white { [-15, -17] } else { [15, 17] };
        if pawn_dirs.iter().any(|d| is(s + d, &[Kind::P])) {
            return true;
        }
        if KNIGHT.iter().any(|d| is(s + d, &[Kind::N])) {
            return true;
        }
        if KING.iter().any(|d| is(s + d, &[Kind::K])) {
            return true;
        }
        for (dirs, kinds) in [(&DIAG, [Kind::B, Kind::Q]), (&ORTHO, [Kind::R, Kind::Q])] {
            for d in dirs.iter() {
                let mut t = s + d;
                while on_board(t) {
                    if let Some(p) = self.sq[t as usize] {
                        if p.white == by_white && kinds.contains(&p.kind) {
                            return true;
                        }
                        break;
                    }
                    t += d;
                }
            }
        }
        false
    }

    pub fn in_check(&self) -> bool {
        self.attacked(self.king(self.white_to_move), !self.white_to_move)
    }

    fn pseudo(&self) -> Vec<Mv> {
        let mut out = Vec::new();
        let us = self.white_to_move;
        for from in 0..128usize {
            let Some(p) = self.sq[from] else { continue };
            if p.white != us {
                continue;
            }
            let f = from as i32;
            match p.kind {
                Kind::P => {
                    let dir = if us { 16 } else { -16 };
                    let last_rank = if us { 7 } else { 0 };
                    let start_rank = if us { 1 } else { 6 };
                    let add = |to: i32, out: &mut Vec<Mv>| {
                        if to >> 4 == last_rank {
                            for k in [Kind::N, Kind::B, Kind::R, Kind::Q] {
                                out.push(Mv { from, to: to as usize, promo: Some(k) });
                            }
                        } else {
                            out.push(Mv { from, to: to as usize, promo: None });
                        }
                    };
                    let one = f + dir;
                    if on_board(one) && self.sq[one as usize].is_none() {
                        add(one, &mut out);
                        let two = one + dir;
                        if f >> 4 == start_rank && self.sq[two as usize].is_none() {
                            out.push(Mv { from, to: two as usize, promo: None });
                        }
                    }
                    for side in [-1, 1] {
                        let t = f + dir + side;
                        if !on_board(t) {
                            continue;
                        }
                        let enemy = matches!(self.sq[t as usize], Some(q) if q.white != us);
                        if enemy || self.ep == Some(t as usize) {
                            add(t, &mut out);
                        }
                    }
                }
                Kind::N | Kind::K => {
                    let dirs = if p.kind == Kind::N { &KNIGHT } else { &KING };
                    for d in dirs.iter() {
                        let t = f + d;
                        if on_board(t) && !matches!(self.sq[t as usize], Some(q) if q.white == us) {
                            out.push(Mv { from, to: t as usize, promo: None });
                        }
                    }
                }
                _ => {
                    let dirs: Vec<i32> = match p.kind {
                        Kind::B => DIAG.to_vec(),
                        Kind::R => ORTHO.to_vec(),
                        _ => DIAG.iter().chain(ORTHO.iter()).copied().collect(),
                    };
                    for d in dirs {
                        let mut t = f + d;
                        while on_board(t) {
                            match self.sq[t as usize] {
                                None => out.push(Mv { from, to: t as usize, promo: None }),
                                Some(q) => {
                                    if q.white != us {
                                        out.push(Mv { from, to: t as usize, promo: None });
                                    }
                                    break;
                                }
                            }
                            t += d;
                        }
                    }
                }
            }
        }
        // castling
        let (rank, ki, qi) = if us { (0usize, 0, 1) } else { (0x70usize, 2, 3) };
        let e = rank + 4;
        let own_rook = |s: usize| self.sq[s] == Some(Pc { white: us, kind: Kind::R });
        if self.sq[e] == Some(Pc { white: us, kind: Kind::K }) && !self.attacked(e, !us) {
            if self.castle[ki]
                && own_rook(rank + 7)
                && self.sq[rank + 5].is_none()
                && self.sq[rank + 6].is_none()
                && !self.attacked(rank + 5, !us)
                && !self.attacked(rank + 6, !us)
            {
                out.push(Mv { from: e, to: rank + 6, promo: None });
            }
            if self.castle[qi]
                && own_rook(rank)
                && self.sq[rank + 1].is_none()
                && self.sq[rank + 2].is_none()
                && self.sq[rank + 3].is_none()
                && !self.attacked(rank + 3, !us)
                && !self.attacked(rank + 2, !us)
            {
                out.push(Mv { from: e, to: rank + 2, promo: None });
            }
        }
        out
    }

    pub fn make(&self, m: Mv) -> Board {
        let mut b = self.clone();
        let p = b.sq[m.from].take().unwrap();
        if p.kind == Kind::P && Some(m.to) == self.ep {
            let victim = if p.white { m.to - 16 } else { m.to + 16 };
            b.sq[victim] = None;
        }
        b.ep = None;
        if p.kind == Kind::P && (m.to as i32 - m.from as i32).abs() == 32 {
            b.ep = Some((m.from + m.to) / 2);
        }
        if p.kind == Kind::K && (m.to as i32 - m.from as i32).abs() == 2 {
            let (rf, rt) = if m.to > m.from { (m.from + 3, m.from + 1) } else { (m.from - 4, m.from - 1) };
            b.sq[rt] = b.sq[rf].take();
        }
        b.sq[m.to] = Some(match m.promo {
            Some(k) => Pc { white: p.white, kind: k },
            None => p,
        });
        for (i, s) in [(0usize, 7usize), (1, 0), (2, 0x77), (3, 0x70)] {
            if m.from == s || m.to == s {
                b.castle[i] = false;
            }
        }
        if m.from == 4 {
            b.castle[0] = false;
            b.castle[1] = false;
        }
        if m.from == 0x74 {
            b.castle[2] = false;
            b.castle[3] = false;
        }
        b.white_to_move = !self.white_to_move;
        b
    }

    pub fn legal(&self) -> Vec<Mv> {
        self.pseudo()
            .into_iter()
            .filter(|&m| {
                let n = self.make(m);
                !n.attacked(n.king(self.white_to_move), n.white_to_move)
            })
            .collect()
    }

    pub fn perft(&self, depth: u32) -> u64 {
        if depth == 0 {
            return 1;
        }
        self.legal().into_iter().map(|m| self.make(m).perft(depth - 1)).sum()
    }
}
