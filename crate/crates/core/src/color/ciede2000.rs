use std::f64::consts::PI;

use super::Lab;

const POW25_7: f64 = 6_103_515_625.0; // 25^7

fn hue_deg(b: f64, a_prime: f64) -> f64 {
    if b == 0.0 && a_prime == 0.0 {
        return 0.0;
    }
    let h = b.atan2(a_prime).to_degrees();
    if h < 0.0 {
        h + 360.0
    } else {
        h
    }
}

/// CIEDE2000 color difference with unit parametric factors (kL = kC = kH = 1).
///
/// Follows the Sharma/Wu/Dalal implementation notes, including the hue-mean
/// and hue-difference conventions for achromatic inputs, so it matches their
/// published test pairs.
pub fn ciede2000(c1: Lab, c2: Lab) -> f64 {
    let (l1, a1, b1) = (c1.l_star, c1.a_star, c1.b_star);
    let (l2, a2, b2) = (c2.l_star, c2.a_star, c2.b_star);

    let c_ab1 = a1.hypot(b1);
    let c_ab2 = a2.hypot(b2);
    let c_bar7 = ((c_ab1 + c_ab2) / 2.0).powi(7);
    let g = 0.5 * (1.0 - (c_bar7 / (c_bar7 + POW25_7)).sqrt());

    let a1p = (1.0 + g) * a1;
    let a2p = (1.0 + g) * a2;
    let c1p = a1p.hypot(b1);
    let c2p = a2p.hypot(b2);
    let h1p = hue_deg(b1, a1p);
    let h2p = hue_deg(b2, a2p);

    let dl = l2 - l1;
    let dc = c2p - c1p;
    let chroma_product = c1p * c2p;
    let dh_deg = if chroma_product == 0.0 {
        0.0
    } else {
        let d = h2p - h1p;
        if d > 180.0 {
            d - 360.0
        } else if d < -180.0 {
            d + 360.0
        } else {
            d
        }
    };
    let dh = 2.0 * chroma_product.sqrt() * (dh_deg.to_radians() / 2.0).sin();

    let l_bar = (l1 + l2) / 2.0;
    let c_bar_p = (c1p + c2p) / 2.0;
    let h_bar = if chroma_product == 0.0 {
        h1p + h2p
    } else if (h1p - h2p).abs() <= 180.0 {
        (h1p + h2p) / 2.0
    } else if h1p + h2p < 360.0 {
        (h1p + h2p + 360.0) / 2.0
    } else {
        (h1p + h2p - 360.0) / 2.0
    };

    let rad = |deg: f64| deg * PI / 180.0;
    let t = 1.0 - 0.17 * rad(h_bar - 30.0).cos()
        + 0.24 * rad(2.0 * h_bar).cos()
        + 0.32 * rad(3.0 * h_bar + 6.0).cos()
        - 0.20 * rad(4.0 * h_bar - 63.0).cos();
    let d_theta = 30.0 * (-((h_bar - 275.0) / 25.0).powi(2)).exp();
    let c_bar_p7 = c_bar_p.powi(7);
    let r_c = 2.0 * (c_bar_p7 / (c_bar_p7 + POW25_7)).sqrt();
    let l50 = (l_bar - 50.0).powi(2);
    let s_l = 1.0 + 0.015 * l50 / (20.0 + l50).sqrt();
    let s_c = 1.0 + 0.045 * c_bar_p;
    let s_h = 1.0 + 0.015 * c_bar_p * t;
    let r_t = -(rad(2.0 * d_theta)).sin() * r_c;

    let tl = dl / s_l;
    let tc = dc / s_c;
    let th = dh / s_h;
    (tl * tl + tc * tc + th * th + r_t * tc * th).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs() -> Vec<(Lab, Lab, f64)> {
        include_str!("../../tests/data/ciede2000_pairs.csv")
            .lines()
            .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
            .map(|l| {
                let v: Vec<f64> = l.split(',').skip(1).map(|s| s.parse().unwrap()).collect();
                (Lab::new(v[0], v[1], v[2]), Lab::new(v[3], v[4], v[5]), v[6])
            })
            .collect()
    }

    #[test]
    fn published_pairs() {
        let pairs = pairs();
        assert_eq!(pairs.len(), 34);
        for (i, (a, b, want)) in pairs.into_iter().enumerate() {
            let got = ciede2000(a, b);
            assert!((got - want).abs() <= 1e-4, "pair {}: {got} vs {want}", i + 1);
            let rev = ciede2000(b, a);
            assert!((got - rev).abs() <= 1e-12, "pair {} asymmetric", i + 1);
        }
    }

    #[test]
    fn identity_is_zero() {
        for c in [
            Lab::new(0.0, 0.0, 0.0),
            Lab::new(50.0, -20.0, 80.0),
            Lab::new(99.5, 0.005, -0.010),
        ] {
            assert_eq!(ciede2000(c, c), 0.0);
        }
    }

    #[test]
    fn full_lightness_span() {
        let d = ciede2000(Lab::new(100.0, 0.005, -0.010), Lab::new(0.0, 0.0, 0.0));
        assert!((d - 100.0).abs() < 1e-4, "{d}");
    }
}
