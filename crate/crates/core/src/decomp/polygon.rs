//! Exact integrals of affine functions over convex polygons.

/// `c + bx * x + by * y`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Affine {
    pub c: f64,
    pub bx: f64,
    pub by: f64,
}

impl Affine {
    pub fn eval(&self, p: (f64, f64)) -> f64 {
        self.c + self.bx * p.0 + self.by * p.1
    }

    pub fn sub(self, o: Affine) -> Affine {
        Affine {
            c: self.c - o.c,
            bx: self.bx - o.bx,
            by: self.by - o.by,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c == 0.0 && self.bx == 0.0 && self.by == 0.0
    }

    pub fn neg(self) -> Affine {
        Affine {
            c: -self.c,
            bx: -self.bx,
            by: -self.by,
        }
    }
}

pub(crate) fn rect(w: f64, h: f64) -> Vec<(f64, f64)> {
    vec![(0.0, 0.0), (w, 0.0), (w, h), (0.0, h)]
}

/// Part of a convex polygon where `h >= 0`.
pub(crate) fn clip(poly: &[(f64, f64)], h: &Affine) -> Vec<(f64, f64)> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let (ha, hb) = (h.eval(a), h.eval(b));
        if ha >= 0.0 {
            out.push(a);
        }
        if (ha >= 0.0) != (hb >= 0.0) {
            let t = ha / (ha - hb);
            out.push((a.0 + t * (b.0 - a.0), a.1 + t * (b.1 - a.1)));
        }
    }
    out
}

/// `int_poly f`, the area times `f` at the centroid.
pub(crate) fn integrate(poly: &[(f64, f64)], f: &Affine) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
    let o = poly[0];
    for w in poly[1..].windows(2) {
        let (p, q) = ((w[0].0 - o.0, w[0].1 - o.1), (w[1].0 - o.0, w[1].1 - o.1));
        let cross = p.0 * q.1 - q.0 * p.1;
        a2 += cross;
        cx += cross * (p.0 + q.0);
        cy += cross * (p.1 + q.1);
    }
    if a2 == 0.0 {
        return 0.0;
    }
    let centroid = (o.0 + cx / (3.0 * a2), o.1 + cy / (3.0 * a2));
    0.5 * a2.abs() * f.eval(centroid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_integrals() {
        let sq = rect(1.0, 1.0);
        // y >= x on the unit square
        let tri = clip(
            &sq,
            &Affine {
                c: 0.0,
                bx: -1.0,
                by: 1.0,
            },
        );
        let one = Affine {
            c: 1.0,
            bx: 0.0,
            by: 0.0,
        };
        assert!((integrate(&tri, &one) - 0.5).abs() < 1e-15);
        // int over the triangle of x = 1/6
        let x = Affine {
            c: 0.0,
            bx: 1.0,
            by: 0.0,
        };
        assert!((integrate(&tri, &x) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn clipping_everything_leaves_nothing() {
        let sq = rect(2.0, 1.0);
        let none = clip(
            &sq,
            &Affine {
                c: -5.0,
                bx: 1.0,
                by: 1.0,
            },
        );
        assert!(
            integrate(
                &none,
                &Affine {
                    c: 1.0,
                    bx: 0.0,
                    by: 0.0
                }
            )
            .abs()
                < 1e-15
        );
    }
}
