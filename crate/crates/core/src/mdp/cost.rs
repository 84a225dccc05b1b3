use crate::error::{domain, Result};
use crate::fusion::DelayMoments;

fn check_nonneg(gamma: f64, y: f64, z: f64) -> Result<()> {
    if !(gamma >= 0.0 && y >= 0.0 && z >= 0.0) {
        return Err(domain!("cost arguments (Γ={gamma}, Y={y}, Z={z}) must be non-negative"));
    }
    Ok(())
}

#[inline]
fn cost_with_gap_term(gap_term: f64, y: f64, z: f64, lambda: f64, moments: DelayMoments) -> f64 {
    let DelayMoments { mu_y, sigma_y } = moments;
    sigma_y + mu_y * z - lambda * mu_y - lambda * z + (z + mu_y) * (2.0 * y + z + gap_term)
}

/// One-step cost `ψ_λ(Γ, Y, Z)` of the reduced `(Γ, Y)` problem.
pub fn cost_mdp3(gamma: f64, y: f64, z: f64, lambda: f64, moments: DelayMoments) -> Result<f64> {
    check_nonneg(gamma, y, z)?;
    Ok(cost_with_gap_term(gamma, y, z, lambda, moments))
}

/// One-step cost `c_λ^ρ(Γ, M, Y, Z)`: as [`cost_mdp3`] with `Γ` replaced by
/// `h_ρ(Γ, M)`.
pub fn cost_mdp2(gamma: f64, m: f64, y: f64, z: f64, lambda: f64, rho: f64, moments: DelayMoments) -> Result<f64> {
    check_nonneg(gamma, y, z)?;
    let h = h_rho(gamma, m, rho)?;
    Ok(cost_with_gap_term(h, y, z, lambda, moments))
}

/// `h_ρ(Γ, M) = q_ρ(M, M − Γ) = Γ (1−ρ²) M / ((1−ρ²) M + ρ² Γ)`, zero at `Γ = 0`.
pub fn h_rho(gamma: f64, m: f64, rho: f64) -> Result<f64> {
    if !(gamma >= 0.0) || !(m >= gamma) {
        return Err(domain!("h_rho needs 0 <= Γ <= M, got Γ={gamma}, M={m}"));
    }
    if gamma == 0.0 || rho == 0.0 {
        return Ok(gamma);
    }
    let rho2 = rho * rho;
    let a = (1.0 - rho2) * m;
    Ok(gamma * a / (a + rho2 * gamma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fusion::{interval_cost, q_rho};

    fn m() -> DelayMoments {
        DelayMoments::new(1.0, 20.0).unwrap()
    }

    #[test]
    fn mdp3_examples() {
        assert_eq!(cost_mdp3(2.0, 0.0, 1.0, 0.0, m()).unwrap(), 27.0);
        assert_eq!(cost_mdp3(0.0, 0.0, 0.0, 3.0, m()).unwrap(), 20.0 - 3.0);
        assert!(cost_mdp3(-1.0, 0.0, 0.0, 0.0, m()).is_err());
    }

    #[test]
    fn mdp3_is_interval_cost_with_gamma() {
        // q_ρ with ρ = 0 is the plain gap.
        for &(s1, s2, y, z) in &[(10.0_f64, 8.0_f64, 0.0, 1.0), (3.0, 7.5, 2.0, 0.25), (4.0, 4.0, 1.0, 0.0)] {
            let g: f64 = (s1 - s2).abs();
            let a = cost_mdp3(g, y, z, 0.0, m()).unwrap();
            let b = interval_cost(s1, s2, y, z, m(), 0.0).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn mdp2_examples() {
        for &(g, mm, y, z, l) in &[(4.0, 10.0, 0.0, 1.0, 0.0), (0.5, 0.5, 3.0, 2.0, 7.0)] {
            assert_eq!(cost_mdp2(g, mm, y, z, l, 0.0, m()).unwrap(), cost_mdp3(g, y, z, l, m()).unwrap());
        }
        let a = cost_mdp2(0.0, 3.0, 1.0, 2.0, 1.0, 0.9, m()).unwrap();
        let b = cost_mdp2(0.0, 300.0, 1.0, 2.0, 1.0, 0.9, m()).unwrap();
        assert_eq!(a, b);
        assert!(cost_mdp2(5.0, 3.0, 0.0, 0.0, 0.0, 0.5, m()).is_err());
    }

    #[test]
    fn h_rho_examples() {
        assert_eq!(h_rho(4.0, 10.0, 0.0).unwrap(), 4.0);
        assert_eq!(h_rho(0.0, 10.0, 0.9).unwrap(), 0.0);
        assert_eq!(h_rho(0.0, 0.0, 1.0).unwrap(), 0.0);
        let h = h_rho(4.0, 10.0, 0.9).unwrap();
        assert!((h - 7.6 / 5.14).abs() < 1e-14);
        assert!((h - q_rho(10.0, 6.0, 0.9).unwrap()).abs() < 1e-14);
        assert!(h_rho(4.0, 3.0, 0.9).is_err());
    }

    #[test]
    fn h_rho_substitution_identity() {
        for i in 0..30 {
            for j in 0..=i {
                for &r in &[0.0, 0.3, 0.9, 0.99, 1.0] {
                    let (mm, g) = (i as f64 * 0.75, j as f64 * 0.75);
                    let h = h_rho(g, mm, r).unwrap();
                    let q = q_rho(mm, mm - g, r).unwrap();
                    assert!((h - q).abs() <= 1e-12 * g.max(1.0), "{g} {mm} {r}");
                }
            }
        }
    }
}
