//! SVG 1.1 rendering of planar scenes: a body's copies and a target, or a whole game
//! (I-moves as nested outlines, II-moves dashed and hatched, survivors as dots).

use crate::bodies::{BodyKind, ConvexBody, Homothet};
use crate::derivative::TargetSet;
use crate::error::{Error, Result};
use crate::game::Player;
use crate::{GameState, Vector};
use std::fmt::Write;

/// Canvas width in pixels; the height follows the aspect ratio.
const WIDTH: f64 = 640.0;

struct Frame {
    min: [f64; 2],
    max: [f64; 2],
}

impl Frame {
    fn new() -> Self {
        Frame {
            min: [f64::INFINITY; 2],
            max: [f64::NEG_INFINITY; 2],
        }
    }

    fn add(&mut self, p: &Vector) {
        for k in 0..2 {
            self.min[k] = self.min[k].min(p[k]);
            self.max[k] = self.max[k].max(p[k]);
        }
    }

    fn add_copy(&mut self, body: &ConvexBody, q: &Homothet) {
        let (lo, hi) = body.bounding_box(q);
        self.add(&lo);
        self.add(&hi);
    }

    /// Padded extent; a unit box when nothing was added.
    fn settle(&self) -> ([f64; 2], [f64; 2]) {
        if !self.min[0].is_finite() {
            return ([-1.0, -1.0], [1.0, 1.0]);
        }
        let span = (self.max[0] - self.min[0]).max(self.max[1] - self.min[1]).max(1e-9);
        let pad = 0.05 * span;
        (
            [self.min[0] - pad, self.min[1] - pad],
            [self.max[0] + pad, self.max[1] + pad],
        )
    }
}

/// Boundary of the body in counter-clockwise order.
fn outline(body: &ConvexBody) -> Vec<Vector> {
    let mut vs = body.vertices().to_vec();
    vs.sort_by(|a, b| a[1].atan2(a[0]).total_cmp(&b[1].atan2(b[0])));
    vs
}

fn copy_element(body: &ConvexBody, q: &Homothet, style: &str) -> String {
    match body.kind() {
        BodyKind::Ball => format!(
            "<circle cx=\"{:.9}\" cy=\"{:.9}\" r=\"{:.9}\" {style}/>",
            q.center[0], q.center[1], q.scale
        ),
        _ => {
            let pts: Vec<String> = outline(body)
                .iter()
                .map(|v| {
                    let p = q.apply(v);
                    format!("{:.9},{:.9}", p[0], p[1])
                })
                .collect();
            format!("<polygon points=\"{}\" {style}/>", pts.join(" "))
        }
    }
}

struct Canvas {
    lo: [f64; 2],
    hi: [f64; 2],
    body: String,
}

impl Canvas {
    fn new(frame: &Frame) -> Self {
        let (lo, hi) = frame.settle();
        Canvas {
            lo,
            hi,
            body: String::new(),
        }
    }

    fn unit(&self) -> f64 {
        (self.hi[0] - self.lo[0]).max(self.hi[1] - self.lo[1]) / WIDTH
    }

    fn finish(self) -> String {
        let (w, h) = (self.hi[0] - self.lo[0], self.hi[1] - self.lo[1]);
        let height = (WIDTH * h / w).round();
        let u = self.unit();
        let mut s = String::new();
        let _ = writeln!(s, "<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
        let _ = writeln!(
            s,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{WIDTH}\" height=\"{height}\" viewBox=\"{:.9} {:.9} {:.9} {:.9}\">",
            self.lo[0], -self.hi[1], w, h
        );
        let _ = writeln!(
            s,
            "<defs><pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"{0:.9}\" height=\"{0:.9}\" patternTransform=\"rotate(45)\"><line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"{0:.9}\" stroke=\"#c0392b\" stroke-width=\"{1:.9}\"/></pattern></defs>",
            8.0 * u,
            1.5 * u
        );
        // Mathematical orientation: y up.
        let _ = writeln!(s, "<g transform=\"scale(1,-1)\">");
        s.push_str(&self.body);
        s.push_str("</g>\n</svg>\n");
        s
    }
}

fn check_planar(body: &ConvexBody) -> Result<()> {
    if body.dim() != 2 {
        return Err(Error::invalid(format!(
            "SVG output needs a planar body, got dimension {}",
            body.dim()
        )));
    }
    Ok(())
}

fn dots(c: &mut Canvas, target: &TargetSet, alive: impl Fn(usize) -> bool) {
    let r = 2.5 * c.unit();
    for (i, p) in target.points.iter().enumerate() {
        let style = if alive(i) {
            "fill=\"#1f4e9c\""
        } else {
            "fill=\"none\" stroke=\"#999\""
        };
        let _ = writeln!(
            c.body,
            "<circle cx=\"{:.9}\" cy=\"{:.9}\" r=\"{r:.9}\" stroke-width=\"{:.9}\" {style}/>",
            p[0],
            p[1],
            0.6 * c.unit()
        );
    }
}

/// A body's copies over a target. The first copy is drawn heavier.
pub fn render_scene(body: &ConvexBody, target: Option<&TargetSet>, copies: &[Homothet]) -> Result<String> {
    check_planar(body)?;
    let mut f = Frame::new();
    for q in copies {
        f.add_copy(body, q);
    }
    if let Some(t) = target {
        t.points.iter().for_each(|p| f.add(p));
    }
    let mut c = Canvas::new(&f);
    let u = c.unit();
    for (k, q) in copies.iter().enumerate() {
        let w = if k == 0 { 2.0 } else { 1.0 } * u;
        let el = copy_element(
            body,
            q,
            &format!("fill=\"none\" stroke=\"#222\" stroke-width=\"{w:.9}\""),
        );
        let _ = writeln!(c.body, "{el}");
    }
    if let Some(t) = target {
        dots(&mut c, t, |_| true);
    }
    Ok(c.finish())
}

/// The board of a game: every move, with survivors filled and removed points hollow.
pub fn render_game(state: &GameState) -> Result<String> {
    let body = state.body();
    check_planar(body)?;
    let mut f = Frame::new();
    match state.moves().first() {
        Some(m) => f.add_copy(body, &m.homothet()),
        None => f.add_copy(body, &Homothet::identity(2)),
    }
    state.target().points.iter().for_each(|p| f.add(p));
    let mut c = Canvas::new(&f);
    let u = c.unit();
    for (i, m) in state.moves().iter().enumerate() {
        let style = match Player::of_move(i) {
            Player::I => format!("fill=\"none\" stroke=\"#222\" stroke-width=\"{:.9}\"", 1.2 * u),
            Player::II => format!(
                "fill=\"url(#hatch)\" fill-opacity=\"0.5\" stroke=\"#c0392b\" stroke-dasharray=\"{:.9},{:.9}\" stroke-width=\"{:.9}\"",
                4.0 * u,
                3.0 * u,
                u
            ),
        };
        let _ = writeln!(c.body, "{}", copy_element(body, &m.homothet(), &style));
    }
    let surv = state.survivors();
    dots(&mut c, state.target(), |i| surv.binary_search(&i).is_ok());
    Ok(c.finish())
}
