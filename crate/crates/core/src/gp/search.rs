//! Bounded derivative-free maximization of a scalar function.

/// Local maximizer in the trust-region style: probe `x ± ρ`, move and
/// expand while that improves, otherwise try the vertex of the interpolating
/// parabola and shrink `ρ` by ten down to `rho_end`. Ties never move, so the
/// search prefers the point it already holds.
pub(crate) fn maximize_scalar<F>(
    mut f: F,
    start: f64,
    lower: f64,
    upper: f64,
    rho_beg: f64,
    rho_end: f64,
) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let clamp = |v: f64| v.clamp(lower, upper);
    let mut x = clamp(start);
    let mut fx = f(x);
    let mut rho = rho_beg.max(rho_end);

    loop {
        let xp = clamp(x + rho);
        let xm = clamp(x - rho);
        let fp = if xp > x { f(xp) } else { f64::NEG_INFINITY };
        let fm = if xm < x { f(xm) } else { f64::NEG_INFINITY };

        if fp > fx || fm > fx {
            // prefer the smaller scale on an exact tie
            let dir = if fm >= fp { -1.0 } else { 1.0 };
            if dir < 0.0 {
                x = xm;
                fx = fm;
            } else {
                x = xp;
                fx = fp;
            }
            let mut step = 2.0 * rho;
            loop {
                let xn = clamp(x + dir * step);
                if xn == x {
                    break;
                }
                let fnew = f(xn);
                if fnew > fx {
                    x = xn;
                    fx = fnew;
                    step *= 2.0;
                } else {
                    break;
                }
            }
            continue;
        }

        if fp.is_finite() && fm.is_finite() {
            if let Some(v) = parabola_vertex((xm, fm), (x, fx), (xp, fp)) {
                if v > xm && v < xp && (v - x).abs() >= 0.5 * rho_end {
                    let fv = f(v);
                    if fv > fx {
                        x = v;
                        fx = fv;
                    }
                }
            }
        }
        if rho <= rho_end {
            break;
        }
        rho = (rho * 0.1).max(rho_end);
    }
    (x, fx)
}

fn parabola_vertex(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> Option<f64> {
    let (x1, y1) = a;
    let (x2, y2) = b;
    let (x3, y3) = c;
    let num = (x2 - x1).powi(2) * (y2 - y3) - (x2 - x3).powi(2) * (y2 - y1);
    let den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1);
    if den == 0.0 || !den.is_finite() || !num.is_finite() {
        return None;
    }
    let v = x2 - 0.5 * num / den;
    v.is_finite().then_some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_interior_maximum() {
        let (x, fx) = maximize_scalar(|x| -(x - 3.3).powi(2), 0.1, 0.0, 100.0, 0.2, 1e-4);
        assert!((x - 3.3).abs() < 1e-4, "{x}");
        assert!(fx > -1e-8);
    }

    #[test]
    fn respects_lower_bound() {
        let (x, _) = maximize_scalar(|x| -(x + 1.0).powi(2), 2.0, 0.0, 10.0, 0.5, 1e-4);
        assert_eq!(x, 0.0);
    }

    #[test]
    fn respects_upper_bound() {
        let (x, _) = maximize_scalar(|x| x, 1.0, 0.0, 10.0, 0.5, 1e-4);
        assert_eq!(x, 10.0);
    }

    #[test]
    fn skewed_peak() {
        let f = |x: f64| x.ln() - x / 7.0;
        let (x, _) = maximize_scalar(|x| if x > 0.0 { f(x) } else { f64::NEG_INFINITY },
            0.5, 0.0, 1e3, 0.3, 1e-4);
        assert!((x - 7.0).abs() < 1e-3, "{x}");
    }
}
