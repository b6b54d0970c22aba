//! Minimal SVG 1.1 writer. World coordinates are mapped to pixels with the
//! y axis pointing up; every coordinate is written with 6 decimals.

use std::fmt::Write;

pub const MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    x0: f64,
    y1: f64,
    sx: f64,
    sy: f64,
    off_x: f64,
    off_y: f64,
    pub width: f64,
    pub height: f64,
}

impl Frame {
    /// Equal scales on both axes, fitted to the points with a 5% margin.
    pub fn equal(points: &[(f64, f64)], width: f64) -> Frame {
        let (x0, x1, y0, y1) = bounds(points);
        let span = (x1 - x0).max(y1 - y0).max(1e-300);
        let (dx, dy) = ((x1 - x0).max(1e-3 * span), (y1 - y0).max(1e-3 * span));
        let (mx, my) = (MARGIN * dx, MARGIN * dy);
        let s = width / (dx + 2.0 * mx);
        Frame {
            x0: x0 - mx,
            y1: y1 + my,
            sx: s,
            sy: s,
            off_x: 0.0,
            off_y: 0.0,
            width,
            height: (dy + 2.0 * my) * s,
        }
    }

    /// Independent axis scales over the given ranges, inside a pixel padding
    /// for axis labels.
    pub fn chart(x: (f64, f64), y: (f64, f64), width: f64, height: f64, pad: f64) -> Frame {
        let (mx, my) = (MARGIN * (x.1 - x.0), MARGIN * (y.1 - y.0));
        let (x0, x1, y0, y1) = (x.0 - mx, x.1 + mx, y.0 - my, y.1 + my);
        Frame {
            x0,
            y1,
            sx: (width - 2.0 * pad) / (x1 - x0),
            sy: (height - 2.0 * pad) / (y1 - y0),
            off_x: pad,
            off_y: pad,
            width,
            height,
        }
    }

    pub fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.off_x + (x - self.x0) * self.sx,
            self.off_y + (self.y1 - y) * self.sy,
        )
    }

    /// World length of the frame diagonal.
    pub fn diagonal(&self) -> f64 {
        ((self.width - 2.0 * self.off_x) / self.sx).hypot((self.height - 2.0 * self.off_y) / self.sy)
    }

    pub fn center(&self) -> (f64, f64) {
        (
            self.x0 + 0.5 * (self.width - 2.0 * self.off_x) / self.sx,
            self.y1 - 0.5 * (self.height - 2.0 * self.off_y) / self.sy,
        )
    }
}

fn bounds(points: &[(f64, f64)]) -> (f64, f64, f64, f64) {
    let mut b = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in points.iter().filter(|p| p.0.is_finite() && p.1.is_finite()) {
        b = (b.0.min(x), b.1.max(x), b.2.min(y), b.3.max(y));
    }
    if !b.0.is_finite() {
        return (-1.0, 1.0, -1.0, 1.0);
    }
    b
}

pub struct Svg {
    pub frame: Frame,
    body: String,
}

impl Svg {
    pub fn new(frame: Frame) -> Svg {
        let mut body = String::new();
        writeln!(
            body,
            r#"<rect x="0" y="0" width="{:.6}" height="{:.6}" fill="white"/>"#,
            frame.width, frame.height
        )
        .unwrap();
        Svg { frame, body }
    }

    fn points(&self, pts: &[(f64, f64)]) -> String {
        let mut s = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let (u, v) = self.frame.px(x, y);
            if i > 0 {
                s.push(' ');
            }
            write!(s, "{u:.6},{v:.6}").unwrap();
        }
        s
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], style: &str) {
        let p = self.points(pts);
        writeln!(self.body, r#"<polyline points="{p}" {style}/>"#).unwrap();
    }

    pub fn polygon(&mut self, pts: &[(f64, f64)], style: &str) {
        let p = self.points(pts);
        writeln!(self.body, r#"<polygon points="{p}" {style}/>"#).unwrap();
    }

    /// Circle of world radius `r`; only meaningful for an equal-scale frame.
    pub fn circle(&mut self, c: (f64, f64), r: f64, style: &str) {
        let (u, v) = self.frame.px(c.0, c.1);
        writeln!(
            self.body,
            r#"<circle cx="{u:.6}" cy="{v:.6}" r="{:.6}" {style}/>"#,
            r * self.frame.sx
        )
        .unwrap();
    }

    /// Segment in pixel units between two world points.
    pub fn segment(&mut self, a: (f64, f64), b: (f64, f64), style: &str) {
        let (u0, v0) = self.frame.px(a.0, a.1);
        let (u1, v1) = self.frame.px(b.0, b.1);
        writeln!(
            self.body,
            r#"<line x1="{u0:.6}" y1="{v0:.6}" x2="{u1:.6}" y2="{v1:.6}" {style}/>"#
        )
        .unwrap();
    }

    /// Line through `p` with direction `d`, long enough to cross the frame.
    pub fn full_line(&mut self, p: (f64, f64), d: (f64, f64), style: &str) {
        let c = self.frame.center();
        let len = self.frame.diagonal() + (p.0 - c.0).hypot(p.1 - c.1);
        let n = d.0.hypot(d.1).max(1e-300);
        let (ux, uy) = (d.0 / n * len, d.1 / n * len);
        self.segment((p.0 - ux, p.1 - uy), (p.0 + ux, p.1 + uy), style);
    }

    /// Dot of pixel radius `r`.
    pub fn dot(&mut self, c: (f64, f64), r: f64, style: &str) {
        let (u, v) = self.frame.px(c.0, c.1);
        writeln!(self.body, r#"<circle cx="{u:.6}" cy="{v:.6}" r="{r:.6}" {style}/>"#).unwrap();
    }

    /// Diagonal cross of pixel half-size `r`.
    pub fn cross(&mut self, c: (f64, f64), r: f64, style: &str) {
        let (u, v) = self.frame.px(c.0, c.1);
        writeln!(
            self.body,
            r#"<path d="M {:.6} {:.6} L {:.6} {:.6} M {:.6} {:.6} L {:.6} {:.6}" {style}/>"#,
            u - r,
            v - r,
            u + r,
            v + r,
            u - r,
            v + r,
            u + r,
            v - r
        )
        .unwrap();
    }

    /// Text anchored at a world point, offset in pixels.
    pub fn text(&mut self, at: (f64, f64), offset: (f64, f64), anchor: &str, s: &str) {
        let (u, v) = self.frame.px(at.0, at.1);
        writeln!(
            self.body,
            r#"<text x="{:.6}" y="{:.6}" text-anchor="{anchor}" font-family="sans-serif" font-size="12">{}</text>"#,
            u + offset.0,
            v + offset.1,
            escape(s)
        )
        .unwrap();
    }

    pub fn raw(&mut self, s: &str) {
        self.body.push_str(s);
        self.body.push('\n');
    }

    pub fn finish(self) -> String {
        format!(
            concat!(
                r#"<?xml version="1.0" encoding="UTF-8"?>"#,
                "\n",
                r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w:.6}" height="{h:.6}" viewBox="0 0 {w:.6} {h:.6}">"#,
                "\n{body}</svg>\n"
            ),
            w = self.frame.width,
            h = self.frame.height,
            body = self.body
        )
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
