use super::ThermalGaussianState;

/// `ν_k = m_k + 1/2` with `m_k` the eigenvalues of `M`, ascending.
pub fn symplectic_eigenvalues(state: &ThermalGaussianState) -> Vec<f64> {
    state.mode_occupations().into_iter().map(|m| m + 0.5).collect()
}

/// `tr ρ² = Π_k 1/(2 m_k + 1)`.
pub fn purity(state: &ThermalGaussianState) -> f64 {
    state.mode_occupations().iter().map(|m| 1.0 / (2.0 * m + 1.0)).product()
}

/// Von Neumann entropy `Σ_k (m_k + 1) ln(m_k + 1) − m_k ln m_k`.
pub fn entropy(state: &ThermalGaussianState) -> f64 {
    state
        .mode_occupations()
        .iter()
        .map(|&m| if m == 0.0 { 0.0 } else { (m + 1.0) * m.ln_1p() - m * m.ln() })
        .sum()
}
