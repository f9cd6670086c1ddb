//! CIELAB (D65) to sRGB conversion for the isoluminant palette.

const WHITE: [f64; 3] = [0.950_47, 1.0, 1.088_83];
const DELTA: f64 = 6.0 / 29.0;

fn lab_f_inv(t: f64) -> f64 {
    if t > DELTA {
        t * t * t
    } else {
        3.0 * DELTA * DELTA * (t - 4.0 / 29.0)
    }
}

fn lab_f(t: f64) -> f64 {
    if t > DELTA.powi(3) {
        t.cbrt()
    } else {
        t / (3.0 * DELTA * DELTA) + 4.0 / 29.0
    }
}

fn gamma_encode(c: f64) -> f64 {
    if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

fn gamma_decode(c: f64) -> f64 {
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// Linear sRGB channels, possibly outside `[0, 1]`.
pub fn lab_to_linear_rgb(l: f64, a: f64, b: f64) -> [f64; 3] {
    let fy = (l + 16.0) / 116.0;
    let fx = fy + a / 500.0;
    let fz = fy - b / 200.0;
    let x = WHITE[0] * lab_f_inv(fx);
    let y = WHITE[1] * lab_f_inv(fy);
    let z = WHITE[2] * lab_f_inv(fz);
    [
        3.240_454_2 * x - 1.537_138_5 * y - 0.498_531_4 * z,
        -0.969_266_0 * x + 1.876_010_8 * y + 0.041_556_0 * z,
        0.055_643_4 * x - 0.204_025_9 * y + 1.057_225_2 * z,
    ]
}

pub fn lch_to_lab(l: f64, c: f64, hue_deg: f64) -> [f64; 3] {
    let h = hue_deg.to_radians();
    [l, c * h.cos(), c * h.sin()]
}

fn in_gamut(rgb: &[f64; 3]) -> bool {
    rgb.iter().all(|&c| (-1e-9..=1.0 + 1e-9).contains(&c))
}

/// sRGB hex for an LCh color. Out-of-gamut colors keep their lightness and
/// hue and have chroma reduced until they fit.
pub fn lch_to_hex(l: f64, c: f64, hue_deg: f64) -> String {
    let rgb_for = |chroma: f64| {
        let [l, a, b] = lch_to_lab(l, chroma, hue_deg);
        lab_to_linear_rgb(l, a, b)
    };
    let mut rgb = rgb_for(c);
    if !in_gamut(&rgb) {
        let (mut lo, mut hi) = (0.0, c);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if in_gamut(&rgb_for(mid)) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        rgb = rgb_for(lo);
    }
    let byte = |v: f64| (gamma_encode(v.clamp(0.0, 1.0)) * 255.0).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        byte(rgb[0]),
        byte(rgb[1]),
        byte(rgb[2])
    )
}

/// CIELAB of an `#rrggbb` color.
pub fn hex_to_lab(hex: &str) -> Option<[f64; 3]> {
    let h = hex.strip_prefix('#')?;
    if h.len() != 6 {
        return None;
    }
    let ch = |i: usize| {
        u8::from_str_radix(&h[i..i + 2], 16)
            .ok()
            .map(|v| gamma_decode(f64::from(v) / 255.0))
    };
    let (r, g, b) = (ch(0)?, ch(2)?, ch(4)?);
    let x = 0.412_456_4 * r + 0.357_576_1 * g + 0.180_437_5 * b;
    let y = 0.212_672_9 * r + 0.715_152_2 * g + 0.072_175_0 * b;
    let z = 0.019_333_9 * r + 0.119_192_0 * g + 0.950_304_1 * b;
    let (fx, fy, fz) = (
        lab_f(x / WHITE[0]),
        lab_f(y / WHITE[1]),
        lab_f(z / WHITE[2]),
    );
    Some([116.0 * fy - 16.0, 500.0 * (fx - fy), 200.0 * (fy - fz)])
}

/// Gray with the given CIELAB lightness.
pub fn gray_hex(lightness: f64) -> String {
    lch_to_hex(lightness, 0.0, 0.0)
}
