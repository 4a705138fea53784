use num_complex::Complex64;

/// Row-major real 2×2 matrix.
pub type Mat2 = [[f64; 2]; 2];

/// Solves `m · x = rhs` by Cramer's rule; `None` when singular.
pub fn solve2_complex(m: [[Complex64; 2]; 2], rhs: [Complex64; 2]) -> Option<[Complex64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|v| v.norm()).fold(0.0, f64::max);
    if det.norm() <= 1e-300 || det.norm() <= 1e-15 * scale * scale {
        return None;
    }
    Some([
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det,
    ])
}

pub fn solve2_real(m: Mat2, rhs: [f64; 2]) -> Option<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m.iter().flatten().map(|v| v.abs()).fold(0.0, f64::max);
    if det.abs() <= 1e-300 || det.abs() <= 1e-15 * scale * scale {
        return None;
    }
    Some([
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det,
    ])
}

/// Eigenvalues of the symmetric part of `m`, ascending.
pub fn sym_eigenvalues2(m: Mat2) -> [f64; 2] {
    let a = m[0][0];
    let d = m[1][1];
    let b = 0.5 * (m[0][1] + m[1][0]);
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b * b).sqrt();
    [mean - radius, mean + radius]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigenvalues_of_diagonal_and_rotated() {
        assert_eq!(sym_eigenvalues2([[2.0, 0.0], [0.0, -1.0]]), [-1.0, 2.0]);
        let e = sym_eigenvalues2([[2.0, 1.0], [1.0, 2.0]]);
        assert!((e[0] - 1.0).abs() < 1e-15 && (e[1] - 3.0).abs() < 1e-15);
    }

    #[test]
    fn singular_systems_are_rejected() {
        assert!(solve2_real([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0]).is_none());
        let x = solve2_real([[2.0, 1.0], [1.0, 3.0]], [3.0, 5.0]).unwrap();
        assert!((x[0] - 0.8).abs() < 1e-15 && (x[1] - 1.4).abs() < 1e-15);
    }
}
