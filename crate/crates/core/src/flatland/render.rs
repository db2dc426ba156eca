// SPDX-License-Identifier: Apache-2.0

//! Rasterization onto a 128x128 binary canvas.
//!
//! The turtle starts at (64, 64) heading east with the pen down. Image
//! coordinates grow rightwards and downwards, so a counterclockwise turn from
//! east points up (towards smaller `y`). Each move draws an inclusive
//! Bresenham segment between the rounded start and end positions; pixels off
//! the canvas are dropped.

use serde::Serialize;
use sha2::{Digest, Sha256};

use super::program::{Command, FlatlandProgram};

pub const CANVAS_SIZE: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Canvas {
    bits: Vec<bool>,
}

impl Default for Canvas {
    fn default() -> Self {
        Canvas {
            bits: vec![false; CANVAS_SIZE * CANVAS_SIZE],
        }
    }
}

impl Canvas {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * CANVAS_SIZE + x]
    }

    /// Sets a pixel; coordinates off the canvas are ignored.
    pub fn plot(&mut self, x: i64, y: i64) {
        if (0..CANVAS_SIZE as i64).contains(&x) && (0..CANVAS_SIZE as i64).contains(&y) {
            self.bits[y as usize * CANVAS_SIZE + x as usize] = true;
        }
    }

    pub fn count_set(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn set_pixels(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| (i % CANVAS_SIZE, i / CANVAS_SIZE))
    }

    /// Binary PBM (P4), set pixels black.
    pub fn to_pbm(&self) -> Vec<u8> {
        let mut out = format!("P4\n{CANVAS_SIZE} {CANVAS_SIZE}\n").into_bytes();
        for row in self.bits.chunks(CANVAS_SIZE) {
            for byte in row.chunks(8) {
                out.push(byte.iter().fold(0u8, |acc, &b| (acc << 1) | u8::from(b)));
            }
        }
        out
    }

    /// Run-length text: a `width height` line, then per row the lengths of
    /// alternating clear and set runs, starting with a (possibly empty) clear
    /// run.
    pub fn to_rle(&self) -> String {
        let mut out = format!("{CANVAS_SIZE} {CANVAS_SIZE}\n");
        for row in self.bits.chunks(CANVAS_SIZE) {
            let mut runs = Vec::new();
            let mut current = false;
            let mut length = 0;
            for &b in row {
                if b == current {
                    length += 1;
                } else {
                    runs.push(length.to_string());
                    current = b;
                    length = 1;
                }
            }
            runs.push(length.to_string());
            out.push_str(&runs.join(" "));
            out.push('\n');
        }
        out
    }

    /// Hex SHA-256 of the PBM encoding.
    pub fn fingerprint(&self) -> String {
        Sha256::digest(self.to_pbm())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurtleState {
    pub x: f64,
    pub y: f64,
    /// Degrees counterclockwise from east, in `[0, 360)`.
    pub heading: f64,
}

impl TurtleState {
    pub const START: TurtleState = TurtleState {
        x: 64.0,
        y: 64.0,
        heading: 0.0,
    };

    fn direction(&self) -> (f64, f64) {
        match self.heading {
            0.0 => (1.0, 0.0),
            90.0 => (0.0, -1.0),
            180.0 => (-1.0, 0.0),
            270.0 => (0.0, 1.0),
            h => {
                let r = h.to_radians();
                (r.cos(), -r.sin())
            }
        }
    }
}

fn line(canvas: &mut Canvas, (x0, y0): (i64, i64), (x1, y1): (i64, i64)) {
    let dx = (x1 - x0).abs();
    let dy = -(y1 - y0).abs();
    let sx = if x0 < x1 { 1 } else { -1 };
    let sy = if y0 < y1 { 1 } else { -1 };
    let (mut x, mut y, mut err) = (x0, y0, dx + dy);
    loop {
        canvas.plot(x, y);
        if x == x1 && y == y1 {
            break;
        }
        let e2 = 2 * err;
        if e2 >= dy {
            err += dy;
            x += sx;
        }
        if e2 <= dx {
            err += dx;
            y += sy;
        }
    }
}

/// Renders and also returns the final turtle state.
pub fn render_with_state(program: &FlatlandProgram) -> (Canvas, TurtleState) {
    let mut canvas = Canvas::new();
    let mut turtle = TurtleState::START;
    for command in program.flatten() {
        match command {
            Command::Move(length) => {
                let (dx, dy) = turtle.direction();
                let next = (turtle.x + length * dx, turtle.y + length * dy);
                line(
                    &mut canvas,
                    (turtle.x.round() as i64, turtle.y.round() as i64),
                    (next.0.round() as i64, next.1.round() as i64),
                );
                turtle.x = next.0;
                turtle.y = next.1;
            }
            Command::Turn(angle) => turtle.heading = (turtle.heading + angle).rem_euclid(360.0),
        }
    }
    (canvas, turtle)
}

pub fn render(program: &FlatlandProgram) -> Canvas {
    render_with_state(program).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatland::program::Primitive;

    fn program(items: Vec<Primitive>) -> FlatlandProgram {
        FlatlandProgram::new(items).unwrap()
    }

    #[test]
    fn empty_canvas() {
        assert_eq!(render(&FlatlandProgram::empty()).count_set(), 0);
    }

    #[test]
    fn single_move() {
        let c = render(&program(vec![Primitive::Move { length: 10.0 }]));
        let pixels: Vec<_> = c.set_pixels().collect();
        assert_eq!(pixels, (64..=74).map(|x| (x, 64)).collect::<Vec<_>>());
    }

    #[test]
    fn square_outline_closes() {
        let (c, end) = render_with_state(&program(vec![Primitive::Loop {
            count: 4,
            body: vec![Primitive::Move { length: 20.0 }, Primitive::Turn { angle: 90.0 }],
        }]));
        assert_eq!(end, TurtleState::START);
        assert_eq!(c.count_set(), 80);
        for (x, y) in c.set_pixels() {
            assert!((64..=84).contains(&x) && (44..=64).contains(&y));
            assert!(x == 64 || x == 84 || y == 44 || y == 64);
        }
    }

    #[test]
    fn clipping() {
        let c = render(&program(vec![Primitive::Move { length: 500.0 }]));
        assert_eq!(c.count_set(), 64);
    }

    #[test]
    fn bresenham_against_naive_oracle() {
        // For slopes with |dy| <= |dx| the classic line has exactly one pixel
        // per column, at the rounded ideal y (ties excepted).
        let c = render(&program(vec![Primitive::Turn { angle: 26.0 }, Primitive::Move { length: 30.0 }]));
        let (x1, y1) = (64.0 + 30.0 * 26f64.to_radians().cos(), 64.0 - 30.0 * 26f64.to_radians().sin());
        let (x1, y1) = (x1.round(), y1.round());
        let columns: Vec<usize> = c.set_pixels().map(|p| p.0).collect();
        assert_eq!(c.count_set(), (x1 - 64.0) as usize + 1);
        for x in 64..=(x1 as usize) {
            assert_eq!(columns.iter().filter(|&&cx| cx == x).count(), 1);
            let ideal = 64.0 + (y1 - 64.0) * (x as f64 - 64.0) / (x1 - 64.0);
            let y = c.set_pixels().find(|p| p.0 == x).unwrap().1 as f64;
            assert!((y - ideal).abs() <= 0.5 + 1e-9);
        }
    }

    #[test]
    fn pbm_and_rle_encoding() {
        let c = render(&program(vec![Primitive::Move { length: 10.0 }]));
        let pbm = c.to_pbm();
        assert!(pbm.starts_with(b"P4\n128 128\n"));
        assert_eq!(pbm.len(), 11 + 128 * 16);
        let row = &pbm[11 + 64 * 16..11 + 65 * 16];
        assert_eq!(row[8], 0xff);
        assert_eq!(row[9], 0b1110_0000);
        let rle = c.to_rle();
        assert_eq!(rle.lines().nth(65), Some("64 11 53"));
        assert_eq!(rle.lines().nth(1), Some("128"));
        assert_eq!(c.fingerprint().len(), 64);
    }
}
