//! Gauss-Legendre rules integrate polynomials of degree 2N−1 exactly.

use ctoa::quadrature::{gauss_legendre, gauss_legendre_on};

fn main() -> ctoa::Result<()> {
    for n in [2, 8, 32] {
        let rule = gauss_legendre(n)?;
        let degree = 2 * n - 1;
        // ∫_{-1}^{1} x^d dx vanishes for odd d, so test x^{d-1} as well
        for d in [degree - 1, degree] {
            let exact = if d % 2 == 0 { 2.0 / (d as f64 + 1.0) } else { 0.0 };
            let approx: f64 = rule
                .nodes()
                .iter()
                .zip(rule.weights())
                .map(|(&x, &w)| w * x.powi(d as i32))
                .sum();
            println!("N = {n:2}  degree {d:2}: error {:.2e}", (approx - exact).abs());
        }
    }
    let rule = gauss_legendre_on(2000, 3.0)?;
    let length: f64 = rule.weights().iter().sum();
    println!("N = 2000 on [-3, 3]: sum of weights = {length:.15}");
    Ok(())
}
