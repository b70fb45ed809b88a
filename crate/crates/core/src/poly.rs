//! Complex polynomials as coefficient lists, low degree first.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

pub fn trim(p: &[C64]) -> Vec<C64> {
    let mut v = p.to_vec();
    while v.last().is_some_and(|c| c.norm() == 0.0) {
        v.pop();
    }
    v
}

/// Degree of the trimmed polynomial; None for the zero polynomial.
pub fn degree(p: &[C64]) -> Option<usize> {
    let t = trim(p);
    if t.is_empty() {
        None
    } else {
        Some(t.len() - 1)
    }
}

pub fn eval(p: &[C64], t: C64) -> C64 {
    p.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * t + c)
}

pub fn derivative(p: &[C64]) -> Vec<C64> {
    p.iter().enumerate().skip(1).map(|(k, c)| c * k as f64).collect()
}

pub fn mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![C64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

pub fn scale(a: &[C64], k: C64) -> Vec<C64> {
    a.iter().map(|x| x * k).collect()
}

/// Resultant via the Sylvester determinant, divided by
/// |p|^deg q |q|^deg p (coefficient 2-norms). Returns None when either
/// polynomial is zero.
pub fn relative_resultant(p: &[C64], q: &[C64]) -> Option<f64> {
    let (p, q) = (trim(p), trim(q));
    if p.is_empty() || q.is_empty() {
        return None;
    }
    let (m, n) = (p.len() - 1, q.len() - 1);
    if m == 0 || n == 0 {
        return Some(1.0);
    }
    let size = m + n;
    let mut s = DMatrix::<C64>::zeros(size, size);
    // rows hold shifted coefficient vectors, highest degree first
    for r in 0..n {
        for (k, c) in p.iter().rev().enumerate() {
            s[(r, r + k)] = *c;
        }
    }
    for r in 0..m {
        for (k, c) in q.iter().rev().enumerate() {
            s[(n + r, r + k)] = *c;
        }
    }
    let np = p.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let nq = q.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    Some(s.determinant().norm() / (np.powi(n as i32) * nq.powi(m as i32)))
}

/// Roots as eigenvalues of the companion matrix.
pub fn roots(p: &[C64]) -> Vec<C64> {
    let p = trim(p);
    if p.len() <= 1 {
        return vec![];
    }
    let d = p.len() - 1;
    let lead = p[d];
    let mut comp = DMatrix::<C64>::zeros(d, d);
    for i in 1..d {
        comp[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..d {
        comp[(i, d - 1)] = -p[i] / lead;
    }
    comp.schur().eigenvalues().map(|v| v.iter().copied().collect()).unwrap_or_default()
}

/// Parses "1+2i" style scalars and the shorthand "t" -> [0, 1]. Lists are
/// comma separated, lowest degree first.
pub fn parse(spec: &str) -> Result<Vec<C64>, String> {
    let s = spec.trim();
    if s == "t" {
        return Ok(vec![C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    }
    s.split(',').map(|tok| parse_scalar(tok.trim())).collect()
}

pub fn parse_scalar(tok: &str) -> Result<C64, String> {
    let t = tok.replace(' ', "");
    if t.is_empty() {
        return Err("empty coefficient".into());
    }
    if let Ok(x) = t.parse::<f64>() {
        return Ok(C64::new(x, 0.0));
    }
    if let Some(body) = t.strip_suffix('i') {
        // split at the last sign that is not an exponent sign
        let bytes = body.as_bytes();
        let mut cut = None;
        for k in (1..bytes.len()).rev() {
            if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                cut = Some(k);
                break;
            }
        }
        let (re, im) = match cut {
            Some(k) => (&body[..k], &body[k..]),
            None => ("0", body),
        };
        let im = match im {
            "" | "+" => "1",
            "-" => "-1",
            x => x,
        };
        let re: f64 = re.parse().map_err(|_| format!("bad coefficient {tok:?}"))?;
        let im: f64 = im.parse().map_err(|_| format!("bad coefficient {tok:?}"))?;
        return Ok(C64::new(re, im));
    }
    Err(format!("bad coefficient {tok:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn resultant_detects_common_roots() {
        // (t-1)(t+2) and (t-1)
        assert!(relative_resultant(&r(&[-2.0, 1.0, 1.0]), &r(&[-1.0, 1.0])).unwrap() < 1e-14);
        assert!(relative_resultant(&r(&[1.0, 0.0, 1.0]), &r(&[0.0, 1.0])).unwrap() > 0.1);
        assert_eq!(relative_resultant(&r(&[1.0]), &r(&[0.0, 0.0])), None);
    }

    #[test]
    fn companion_roots() {
        // (t-1)(t-2)(t+3) = t^3 - 7t + 6
        let mut z = roots(&r(&[6.0, -7.0, 0.0, 1.0]));
        z.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        for (a, b) in z.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - C64::new(b, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn parsing() {
        assert_eq!(parse("t").unwrap(), r(&[0.0, 1.0]));
        assert_eq!(parse("1, 0, 1").unwrap(), r(&[1.0, 0.0, 1.0]));
        assert_eq!(parse_scalar("2-3i").unwrap(), C64::new(2.0, -3.0));
        assert_eq!(parse_scalar("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_scalar("1e-3+2e+1i").unwrap(), C64::new(1e-3, 20.0));
        assert!(parse("x").is_err());
    }
}
