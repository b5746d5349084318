//! Extended-precision Si/Ci oracle shared by the integration tests:
//! Maclaurin series summed with 320-bit floats.
#![allow(dead_code)]

use std::f64::consts::PI;

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const P: usize = 320;
pub const RM: RoundingMode = RoundingMode::ToEven;
pub const EULER_GAMMA_DIGITS: &str =
    "0.57721566490153286060651209008240243104215933593992359880576723488486772677766467";

#[derive(Clone)]
pub struct Big {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Big {
    pub fn from_c(z: Complex64) -> Self {
        Big {
            re: BigFloat::from_f64(z.re, P),
            im: BigFloat::from_f64(z.im, P),
        }
    }
    pub fn add(&self, o: &Big) -> Big {
        Big {
            re: self.re.add(&o.re, P, RM),
            im: self.im.add(&o.im, P, RM),
        }
    }
    pub fn mul(&self, o: &Big) -> Big {
        Big {
            re: self
                .re
                .mul(&o.re, P, RM)
                .sub(&self.im.mul(&o.im, P, RM), P, RM),
            im: self
                .re
                .mul(&o.im, P, RM)
                .add(&self.im.mul(&o.re, P, RM), P, RM),
        }
    }
    pub fn scale(&self, d: f64) -> Big {
        let d = BigFloat::from_f64(d, P);
        Big {
            re: self.re.div(&d, P, RM),
            im: self.im.div(&d, P, RM),
        }
    }
    pub fn to_c(&self, cc: &mut Consts) -> Complex64 {
        Complex64::new(to_f64(&self.re, cc), to_f64(&self.im, cc))
    }
}

pub fn to_f64(x: &BigFloat, cc: &mut Consts) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.format(Radix::Dec, RM, cc).unwrap().parse().unwrap()
}

/// Number of series terms so that |z|^{2k}/(2k)! < 1e-60.
pub fn terms_for(z: Complex64) -> usize {
    let r = z.norm();
    let mut k = 1usize;
    let mut logt = 0.0f64;
    loop {
        logt += (r / k as f64).ln();
        if k as f64 > r && logt < -140.0 {
            return k / 2 + 2;
        }
        k += 1;
    }
}

pub fn oracle_si(z: Complex64, cc: &mut Consts) -> Complex64 {
    let zb = Big::from_c(z);
    let w2 = zb.mul(&zb);
    let w2 = Big {
        re: w2.re.neg(),
        im: w2.im.neg(),
    };
    let mut t = zb.clone();
    let mut sum = zb.clone();
    for k in 1..terms_for(z) {
        let kf = k as f64;
        t = t.mul(&w2).scale((2.0 * kf) * (2.0 * kf + 1.0));
        sum = sum.add(&t.scale(2.0 * kf + 1.0));
    }
    sum.to_c(cc)
}

pub fn oracle_ci(z: Complex64, cc: &mut Consts) -> Complex64 {
    let zb = Big::from_c(z);
    let w2 = zb.mul(&zb);
    let w2 = Big {
        re: w2.re.neg(),
        im: w2.im.neg(),
    };
    let mut u = Big {
        re: BigFloat::from_f64(1.0, P),
        im: BigFloat::from_f64(0.0, P),
    };
    let gamma = BigFloat::parse(EULER_GAMMA_DIGITS, Radix::Dec, P, RM, cc);
    let modsq = zb
        .re
        .mul(&zb.re, P, RM)
        .add(&zb.im.mul(&zb.im, P, RM), P, RM);
    let ln_mod = modsq.ln(P, RM, cc).div(&BigFloat::from_f64(2.0, P), P, RM);
    let arg = big_atan2(&zb.im, &zb.re, cc);
    let mut sum = Big {
        re: gamma.add(&ln_mod, P, RM),
        im: arg,
    };
    for k in 1..terms_for(z) {
        let kf = k as f64;
        u = u.mul(&w2).scale((2.0 * kf - 1.0) * (2.0 * kf));
        sum = sum.add(&u.scale(2.0 * kf));
    }
    sum.to_c(cc)
}

pub fn big_atan2(y: &BigFloat, x: &BigFloat, cc: &mut Consts) -> BigFloat {
    let pi = cc.pi(P, RM);
    let half_pi = pi.div(&BigFloat::from_f64(2.0, P), P, RM);
    if x.is_zero() {
        return if y.is_negative() {
            half_pi.neg()
        } else {
            half_pi
        };
    }
    let a = y.div(x, P, RM).atan(P, RM, cc);
    if x.is_positive() {
        a
    } else if y.is_negative() {
        a.sub(&pi, P, RM)
    } else {
        a.add(&pi, P, RM)
    }
}

/// Fixed 200-point grid with |z| ≤ 20, covering all four quadrants.
pub fn grid() -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5151_c1c1);
    (0..200)
        .map(|_| {
            let r: f64 = rng.gen_range(0.05..20.0);
            let th: f64 = rng.gen_range(-PI * 0.999..PI * 0.999);
            Complex64::from_polar(r, th)
        })
        .collect()
}

pub fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}
