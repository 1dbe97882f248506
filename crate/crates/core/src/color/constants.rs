//! Colorimetric constants.

/// Linear ProPhoto (ROMM) RGB to CIE XYZ, D50-native, 2° observer.
/// Rows are X, Y, Z.
pub const PROPHOTO_TO_XYZ: [[f64; 3]; 3] = [
    [0.797_674_9, 0.135_191_7, 0.031_353_4],
    [0.288_040_2, 0.711_874_1, 0.000_085_7],
    [0.000_000_0, 0.000_000_0, 0.825_210_0],
];

/// Inverse of [`PROPHOTO_TO_XYZ`], evaluated at compile time.
pub const XYZ_TO_PROPHOTO: [[f64; 3]; 3] = invert3(PROPHOTO_TO_XYZ);

/// CIE XYZ (D50) to linear sRGB, Bradford-adapted from D65.
pub const XYZ_D50_TO_SRGB: [[f64; 3]; 3] = [
    [3.133_856_1, -1.616_866_7, -0.490_614_6],
    [-0.978_768_4, 1.916_141_5, 0.033_454_0],
    [0.071_945_3, -0.228_991_4, 1.405_242_7],
];

/// D50 reference white, equal to the row sums of [`PROPHOTO_TO_XYZ`] so that
/// RGB (1, 1, 1) maps onto it exactly.
pub const D50_WHITE: [f64; 3] = [
    PROPHOTO_TO_XYZ[0][0] + PROPHOTO_TO_XYZ[0][1] + PROPHOTO_TO_XYZ[0][2],
    PROPHOTO_TO_XYZ[1][0] + PROPHOTO_TO_XYZ[1][1] + PROPHOTO_TO_XYZ[1][2],
    PROPHOTO_TO_XYZ[2][0] + PROPHOTO_TO_XYZ[2][1] + PROPHOTO_TO_XYZ[2][2],
];

/// CIELAB linear-segment threshold, 216/24389.
pub const LAB_EPSILON: f64 = 216.0 / 24389.0;
/// CIELAB linear-segment slope, 24389/27.
pub const LAB_KAPPA: f64 = 24389.0 / 27.0;

pub(crate) const fn mul3(m: &[[f64; 3]; 3], v: [f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

const fn invert3(m: [[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let [[a, b, c], [d, e, f], [g, h, i]] = m;
    let co_a = e * i - f * h;
    let co_b = -(d * i - f * g);
    let co_c = d * h - e * g;
    let det = a * co_a + b * co_b + c * co_c;
    [
        [co_a / det, -(b * i - c * h) / det, (b * f - c * e) / det],
        [co_b / det, (a * i - c * g) / det, -(a * f - c * d) / det],
        [co_c / det, -(a * h - b * g) / det, (a * e - b * d) / det],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_is_inverse() {
        for (r, row) in PROPHOTO_TO_XYZ.iter().enumerate() {
            for c in 0..3 {
                let v: f64 = (0..3).map(|k| row[k] * XYZ_TO_PROPHOTO[k][c]).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12, "({r},{c}) = {v}");
            }
        }
    }

    #[test]
    fn white_is_published_d50() {
        assert!((D50_WHITE[0] - 0.96422).abs() < 1e-12);
        assert!((D50_WHITE[1] - 1.0).abs() < 1e-12);
        assert!((D50_WHITE[2] - 0.82521).abs() < 1e-12);
    }
}
