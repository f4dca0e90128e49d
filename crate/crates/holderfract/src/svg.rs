//! Minimal SVG emission: a 1024 px viewBox fitted to a bounding box with a
//! 5% margin, y axis pointing up.

use std::fmt::Write as _;

const SIZE: f64 = 1024.0;

struct Frame {
    lo: [f64; 2],
    scale: f64,
    pad: [f64; 2],
}

impl Frame {
    fn new(lo: &[f64], hi: &[f64]) -> Self {
        let w = (hi[0] - lo[0]).max(1e-12);
        let h = (hi[1] - lo[1]).max(1e-12);
        let inner = SIZE * 0.9;
        let scale = inner / w.max(h);
        let pad = [(SIZE - w * scale) / 2.0, (SIZE - h * scale) / 2.0];
        Frame { lo: [lo[0], lo[1]], scale, pad }
    }

    fn map(&self, p: &[f64]) -> (f64, f64) {
        let x = self.pad[0] + (p[0] - self.lo[0]) * self.scale;
        let y = SIZE - (self.pad[1] + (p[1] - self.lo[1]) * self.scale);
        (x, y)
    }
}

fn header(out: &mut String) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SIZE} {SIZE}" width="{SIZE}" height="{SIZE}">"#
    );
}

/// One `<polyline>` through `points` (first two coordinates).
pub fn polyline(points: &[Vec<f64>], lo: &[f64], hi: &[f64], stroke_width: f64) -> String {
    let frame = Frame::new(lo, hi);
    let mut out = String::new();
    header(&mut out);
    out.push_str(r#"<polyline fill="none" stroke="black" stroke-linejoin="round" stroke-width=""#);
    let _ = write!(out, "{stroke_width}\" points=\"");
    for (i, p) in points.iter().enumerate() {
        let (x, y) = frame.map(p);
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.3},{y:.3}");
    }
    out.push_str("\"/>\n</svg>\n");
    out
}

/// One small square per point.
pub fn dots(points: &[Vec<f64>], lo: &[f64], hi: &[f64], size: f64) -> String {
    let frame = Frame::new(lo, hi);
    let mut out = String::new();
    header(&mut out);
    out.push_str("<g fill=\"black\">\n");
    for p in points {
        let (x, y) = frame.map(p);
        let _ = writeln!(out, r#"<rect x="{:.3}" y="{:.3}" width="{size}" height="{size}"/>"#, x - size / 2.0, y - size / 2.0);
    }
    out.push_str("</g>\n</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_fits_with_margin() {
        let svg = polyline(&[vec![0.0, 0.0], vec![1.0, 1.0]], &[0.0, 0.0], &[1.0, 1.0], 1.0);
        assert!(svg.contains(r#"viewBox="0 0 1024 1024""#));
        assert!(svg.contains("51.200,972.800 972.800,51.200"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
