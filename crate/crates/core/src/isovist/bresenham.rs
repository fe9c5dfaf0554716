//! Canonical 3D Bresenham line traversal.
//!
//! Sight tests always walk the line from the lexicographically smaller
//! endpoint (by (x, y, z)) to the larger one, so visibility between two
//! blocks is symmetric by construction; raw Bresenham is direction
//! dependent.

use crate::world::Coord;

/// Orders a pair of endpoints into the canonical traversal direction.
pub fn canonical(a: Coord, b: Coord) -> (Coord, Coord) {
    if (a.x, a.y, a.z) <= (b.x, b.y, b.z) {
        (a, b)
    } else {
        (b, a)
    }
}

/// Iterator over every lattice point of the Bresenham line from `from` to
/// `to`, both endpoints included. Dominant-axis form with doubled error
/// terms; ties between axes resolve in x, y, z order.
pub struct LineIter {
    cur: Coord,
    end: Coord,
    step: (i32, i32, i32),
    double_delta: (i64, i64, i64),
    axis: u8,
    err_a: i64,
    err_b: i64,
    done: bool,
}

impl LineIter {
    pub fn new(from: Coord, to: Coord) -> Self {
        let dx = (to.x as i64 - from.x as i64).abs();
        let dy = (to.y as i64 - from.y as i64).abs();
        let dz = (to.z as i64 - from.z as i64).abs();
        let step = (
            if from.x < to.x { 1 } else { -1 },
            if from.y < to.y { 1 } else { -1 },
            if from.z < to.z { 1 } else { -1 },
        );
        let (axis, err_a, err_b) = if dx >= dy && dx >= dz {
            (0, 2 * dy - dx, 2 * dz - dx)
        } else if dy >= dx && dy >= dz {
            (1, 2 * dx - dy, 2 * dz - dy)
        } else {
            (2, 2 * dy - dz, 2 * dx - dz)
        };
        LineIter {
            cur: from,
            end: to,
            step,
            double_delta: (2 * dx, 2 * dy, 2 * dz),
            axis,
            err_a,
            err_b,
            done: false,
        }
    }

    fn advance(&mut self) {
        let (ddx, ddy, ddz) = self.double_delta;
        match self.axis {
            0 => {
                if self.err_a >= 0 {
                    self.cur.y += self.step.1;
                    self.err_a -= ddx;
                }
                if self.err_b >= 0 {
                    self.cur.z += self.step.2;
                    self.err_b -= ddx;
                }
                self.err_a += ddy;
                self.err_b += ddz;
                self.cur.x += self.step.0;
            }
            1 => {
                if self.err_a >= 0 {
                    self.cur.x += self.step.0;
                    self.err_a -= ddy;
                }
                if self.err_b >= 0 {
                    self.cur.z += self.step.2;
                    self.err_b -= ddy;
                }
                self.err_a += ddx;
                self.err_b += ddz;
                self.cur.y += self.step.1;
            }
            _ => {
                if self.err_a >= 0 {
                    self.cur.y += self.step.1;
                    self.err_a -= ddz;
                }
                if self.err_b >= 0 {
                    self.cur.x += self.step.0;
                    self.err_b -= ddz;
                }
                self.err_a += ddy;
                self.err_b += ddx;
                self.cur.z += self.step.2;
            }
        }
    }
}

impl Iterator for LineIter {
    type Item = Coord;

    fn next(&mut self) -> Option<Coord> {
        if self.done {
            return None;
        }
        let out = self.cur;
        if self.cur == self.end {
            self.done = true;
        } else {
            self.advance();
        }
        Some(out)
    }
}
