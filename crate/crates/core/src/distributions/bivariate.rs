//! Standard bivariate normal distribution function.
//!
//! Port of Genz's BVND (Drezner–Wesolowsky with double precision
//! refinements and a separate expansion for |r| close to one).

#![allow(clippy::excessive_precision)]

use super::normal::big_phi;
use std::f64::consts::PI;

// (weight, abscissa) pairs; the rule is symmetric so only one half is stored.
const GL6: [(f64, f64); 3] = [
    (0.1713244923791705e+00, -0.9324695142031522e+00),
    (0.3607615730481384e+00, -0.6612093864662647e+00),
    (0.4679139345726904e+00, -0.2386191860831970e+00),
];

const GL12: [(f64, f64); 6] = [
    (0.4717533638651177e-01, -0.9815606342467191e+00),
    (0.1069393259953183e+00, -0.9041172563704750e+00),
    (0.1600783285433464e+00, -0.7699026741943050e+00),
    (0.2031674267230659e+00, -0.5873179542866171e+00),
    (0.2334925365383547e+00, -0.3678314989981802e+00),
    (0.2491470458134029e+00, -0.1252334085114692e+00),
];

const GL20: [(f64, f64); 10] = [
    (0.1761400713915212e-01, -0.9931285991850949e+00),
    (0.4060142980038694e-01, -0.9639719272779138e+00),
    (0.6267204833410906e-01, -0.9122344282513259e+00),
    (0.8327674157670475e-01, -0.8391169718222188e+00),
    (0.1019301198172404e+00, -0.7463319064601508e+00),
    (0.1181945319615184e+00, -0.6360536807265150e+00),
    (0.1316886384491766e+00, -0.5108670019508271e+00),
    (0.1420961093183821e+00, -0.3737060887154196e+00),
    (0.1491729864726037e+00, -0.2277858511416451e+00),
    (0.1527533871307259e+00, -0.7652652113349733e-01),
];

/// P(X > dh, Y > dk) for standard normals with correlation `r`.
pub fn bvnd(dh: f64, dk: f64, r: f64) -> f64 {
    let rule: &[(f64, f64)] = if r.abs() < 0.3 {
        &GL6
    } else if r.abs() < 0.75 {
        &GL12
    } else {
        &GL20
    };
    let h = dh;
    let mut k = dk;
    let mut hk = h * k;
    let mut bvn = 0.0;
    if r.abs() < 0.925 {
        let hs = 0.5 * (h * h + k * k);
        let asr = r.asin();
        for &(w, x) in rule {
            for sign in [-1.0, 1.0] {
                let sn = (0.5 * asr * (sign * x + 1.0)).sin();
                bvn += w * ((sn * hk - hs) / (1.0 - sn * sn)).exp();
            }
        }
        return bvn * asr / (4.0 * PI) + big_phi(-h) * big_phi(-k);
    }
    if r < 0.0 {
        k = -k;
        hk = -hk;
    }
    if r.abs() < 1.0 {
        let as_ = (1.0 - r) * (1.0 + r);
        let mut a = as_.sqrt();
        let bs = (h - k) * (h - k);
        let c = (4.0 - hk) / 8.0;
        let d = (12.0 - hk) / 16.0;
        bvn = a
            * (-(bs / as_ + hk) / 2.0).exp()
            * (1.0 - c * (bs - as_) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as_ * as_ / 5.0);
        if hk > -160.0 {
            let b = bs.sqrt();
            bvn -= (-hk / 2.0).exp()
                * (2.0 * PI).sqrt()
                * big_phi(-b / a)
                * b
                * (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
        }
        a /= 2.0;
        for &(w, x) in rule {
            for sign in [-1.0, 1.0] {
                let xs = (a * (sign * x + 1.0)).powi(2);
                let rs = (1.0 - xs).sqrt();
                let e = -(bs / xs + hk) / 2.0;
                if e > -100.0 {
                    bvn += a
                        * w
                        * e.exp()
                        * ((-hk * (1.0 - rs) / (2.0 * (1.0 + rs))).exp() / rs
                            - (1.0 + c * xs * (1.0 + d * xs)));
                }
            }
        }
        bvn = -bvn / (2.0 * PI);
    }
    if r > 0.0 {
        bvn += big_phi(-h.max(k));
    } else {
        bvn = -bvn;
        if k > h {
            if h < 0.0 {
                bvn += big_phi(k) - big_phi(h);
            } else {
                bvn += big_phi(-h) - big_phi(-k);
            }
        }
    }
    bvn
}

/// P(X ≤ h, Y ≤ k) for standard normals with correlation `r`; accepts ±∞.
pub fn std_bvn_cdf(h: f64, k: f64, r: f64) -> f64 {
    if h == f64::NEG_INFINITY || k == f64::NEG_INFINITY {
        return 0.0;
    }
    if h == f64::INFINITY {
        return big_phi(k);
    }
    if k == f64::INFINITY {
        return big_phi(h);
    }
    if r >= 1.0 {
        return big_phi(h.min(k));
    }
    if r <= -1.0 {
        return (big_phi(h) - big_phi(-k)).max(0.0);
    }
    bvnd(-h, -k, r).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::normal::phi;
    use crate::quadrature::integrate;

    // P(X ≤ h, Y ≤ k) = ∫_{−∞}^{h} φ(x) Φ((k − r x)/√(1−r²)) dx
    fn by_quadrature(h: f64, k: f64, r: f64) -> f64 {
        let s = (1.0 - r * r).sqrt();
        integrate(|x| phi(x) * big_phi((k - r * x) / s), -40.0, h, 1e-15, 1e-13)
    }

    #[test]
    fn matches_conditioning_quadrature() {
        let pts = [-3.1, -1.7, -0.4, 0.0, 0.35, 1.2, 2.6];
        let rhos = [-0.999, -0.95, -0.93, -0.8, -0.5, -0.1, 0.0, 0.2, 0.5, 0.74, 0.76, 0.92, 0.93, 0.97, 0.995];
        let mut worst: f64 = 0.0;
        for &h in &pts {
            for &k in &pts {
                for &r in &rhos {
                    let got = std_bvn_cdf(h, k, r);
                    let want = by_quadrature(h, k, r);
                    worst = worst.max((got - want).abs());
                    assert!((got - want).abs() < 1e-8, "h={h} k={k} r={r}: {got} vs {want}");
                }
            }
        }
        assert!(worst < 1e-8);
    }

    #[test]
    fn independence_and_limits() {
        for &(h, k) in &[(0.3, -1.2), (-2.0, 0.5), (1.0, 1.0)] {
            assert!((std_bvn_cdf(h, k, 0.0) - big_phi(h) * big_phi(k)).abs() < 1e-15);
        }
        assert_eq!(std_bvn_cdf(f64::NEG_INFINITY, 0.3, 0.5), 0.0);
        assert_eq!(std_bvn_cdf(f64::INFINITY, 0.3, 0.5), big_phi(0.3));
        assert!((std_bvn_cdf(0.0, 0.0, 0.5) - (0.25 + (0.5f64).asin() / (2.0 * PI))).abs() < 1e-15);
    }
}
