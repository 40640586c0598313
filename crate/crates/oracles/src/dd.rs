//! Double-double arithmetic (about 106 bits of significand).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl From<f64> for Dd {
    fn from(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };
    pub const TWO_PI: Dd = Dd {
        hi: 6.283185307179586,
        lo: 2.4492935982947064e-16,
    };
    pub const HALF_PI: Dd = Dd {
        hi: 1.5707963267948966,
        lo: 6.123233995736766e-17,
    };

    fn norm(hi: f64, lo: f64) -> Dd {
        let (hi, lo) = quick_two_sum(hi, lo);
        Dd { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        Dd::norm(s1, s2 + t2)
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    pub fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        Dd::norm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    pub fn mul_f64(self, b: f64) -> Dd {
        self.mul(Dd::from(b))
    }

    pub fn div_f64(self, b: f64) -> Dd {
        let q1 = self.hi / b;
        let (p, e) = two_prod(q1, b);
        let (s, t) = two_sum(self.hi, -p);
        let q2 = (s + (t - e + self.lo)) / b;
        Dd::norm(q1, q2)
    }

    /// Taylor series; only used for |r| <= pi/4.
    fn sin_cos_reduced(r: Dd) -> (Dd, Dd) {
        let r2 = r.mul(r);
        let mut sin = r;
        let mut cos = Dd::ONE;
        let mut st = r;
        let mut ct = Dd::ONE;
        for n in 1..30 {
            let k = (2 * n) as f64;
            st = st.mul(r2).neg().div_f64(k * (k + 1.0));
            ct = ct.mul(r2).neg().div_f64((k - 1.0) * k);
            sin = sin.add(st);
            cos = cos.add(ct);
        }
        (sin, cos)
    }

    pub fn sin(self) -> Dd {
        let k = (self.hi / Dd::HALF_PI.hi).round();
        let r = self.sub(Dd::HALF_PI.mul_f64(k));
        let (s, c) = Dd::sin_cos_reduced(r);
        match (k as i64).rem_euclid(4) {
            0 => s,
            1 => c,
            2 => s.neg(),
            _ => c.neg(),
        }
    }
}
