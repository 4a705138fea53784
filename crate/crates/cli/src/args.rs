use num_complex::Complex64;
use qftorus::{IrrationalSlope, Lamination, Slope};

pub fn slope(s: &str) -> Result<Slope, String> {
    s.parse().map_err(|e: qftorus::Error| e.to_string())
}

pub fn irrational(s: &str) -> Result<IrrationalSlope, String> {
    s.parse().map_err(|e: qftorus::Error| e.to_string())
}

/// `p/q`, `[a0;a1,...]xN`, optionally prefixed by a weight as in `0.5*1/2`.
pub fn lamination(s: &str) -> Result<Lamination, String> {
    let s = s.trim();
    let (weight, body) = match s.split_once('*') {
        Some((w, body)) => (w.trim().parse::<f64>().map_err(|_| format!("bad weight in `{s}`"))?, body.trim()),
        None => (1.0, s),
    };
    let out = if body.starts_with('[') {
        Lamination::irrational(irrational(body)?, weight)
    } else {
        Lamination::rational(slope(body)?, weight)
    };
    out.map_err(|e| e.to_string())
}

pub fn complex(s: &str) -> Result<Complex64, String> {
    s.trim().parse().map_err(|_| format!("cannot parse complex number `{s}`"))
}

/// Comma-separated list of reals.
pub fn reals(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("cannot parse number `{t}`")))
        .collect()
}

pub fn pair(s: &str) -> Result<(f64, f64), String> {
    match reals(s)?[..] {
        [a, b] => Ok((a, b)),
        _ => Err(format!("expected two numbers, got `{s}`")),
    }
}

pub fn triple(s: &str) -> Result<[Complex64; 3], String> {
    let parts: Vec<Complex64> = s.split(',').map(complex).collect::<Result<_, _>>()?;
    parts.try_into().map_err(|_| format!("expected three traces, got `{s}`"))
}

/// Shortest decimal that reads back to `v`; complex values print as
/// `[re, im]`.
pub fn format_trace(v: Complex64) -> String {
    if v.im == 0.0 || v.im.abs() <= 1e-12 * v.re.abs().max(1.0) {
        format!("{}", v.re)
    } else {
        format!("[{}, {}]", v.re, v.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laminations() {
        let m = lamination("0.5*1/2").unwrap();
        assert_eq!(m.weight(), 0.5);
        assert!(lamination("[1;1]x30").is_ok());
        assert!(lamination("2*[0;2]x10").is_ok());
        assert!(lamination("1/0").is_ok());
        assert!(lamination("0/0").is_err());
        assert!(lamination("-1*1/2").is_err());
        assert!(lamination("half").is_err());
    }

    #[test]
    fn numbers() {
        assert_eq!(pair("0.5, 0.7").unwrap(), (0.5, 0.7));
        assert!(pair("1,2,3").is_err());
        let t = triple("3,3,2+1i").unwrap();
        assert_eq!(t[2], Complex64::new(2.0, 1.0));
        assert!(triple("3,3").is_err());
        assert!(slope("3/x").is_err());
    }

    #[test]
    fn trace_formatting() {
        assert_eq!(format_trace(Complex64::new(15.0, 0.0)), "15");
        assert_eq!(format_trace(Complex64::new(2.5, -1.0)), "[2.5, -1]");
    }
}
