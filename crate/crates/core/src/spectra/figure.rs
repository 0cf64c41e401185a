//! SVG scatter of spectral values in the `q`-plane.

use std::fmt::Write;

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureOptions {
    /// Pixel size of the square image.
    pub size: f64,
    /// Half-width of the plotted square `[-extent, extent]²`.
    pub extent: f64,
    /// Radius of the reference circle drawn besides the unit circle.
    pub reference_radius: f64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self {
            size: 600.0,
            extent: 1.3,
            reference_radius: 0.309,
        }
    }
}

/// Unit circle, the reference circle, an origin marker and one dot per
/// point. Numbers are printed with fixed precision, so equal input gives
/// byte-identical output.
pub fn render_svg(points: &[Complex64], opts: &FigureOptions) -> String {
    let s = opts.size;
    let scale = s / (2.0 * opts.extent);
    let px = |z: Complex64| ((z.re + opts.extent) * scale, (opts.extent - z.im) * scale);
    let (cx, cy) = px(Complex64::new(0.0, 0.0));
    let mut out = String::new();
    let w = &mut out;
    // Writing into a String cannot fail.
    let _ = writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{s:.0}" height="{s:.0}" viewBox="0 0 {s:.0} {s:.0}">"#
    );
    let _ = writeln!(w, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        w,
        r##"<circle id="unit-circle" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#000" stroke-width="1"/>"##,
        scale
    );
    let _ = writeln!(
        w,
        r##"<circle id="reference-circle" data-radius="{}" cx="{cx:.3}" cy="{cy:.3}" r="{:.3}" fill="none" stroke="#666" stroke-dasharray="4 3"/>"##,
        opts.reference_radius,
        opts.reference_radius * scale
    );
    let _ = writeln!(
        w,
        r##"<g id="origin" stroke="#000"><line x1="{:.3}" y1="{cy:.3}" x2="{:.3}" y2="{cy:.3}"/><line x1="{cx:.3}" y1="{:.3}" x2="{cx:.3}" y2="{:.3}"/></g>"##,
        cx - 5.0,
        cx + 5.0,
        cy - 5.0,
        cy + 5.0
    );
    let _ = writeln!(w, r##"<g id="spectral-points" fill="#c00">"##);
    for z in points {
        let (x, y) = px(*z);
        let _ = writeln!(w, r#"<circle class="spectral-point" cx="{x:.3}" cy="{y:.3}" r="2"/>"#);
    }
    let _ = writeln!(w, "</g>\n</svg>");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_the_fixed_elements() {
        let svg = render_svg(&[Complex64::new(0.5, 0.5), Complex64::new(0.5, -0.5)], &FigureOptions::default());
        for id in ["unit-circle", "reference-circle", "data-radius=\"0.309\"", "origin"] {
            assert!(svg.contains(id), "{id}");
        }
        assert_eq!(svg.matches("class=\"spectral-point\"").count(), 2);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    }
}
