use super::PostprocessError;

/// Binary Shannon entropy `h(q) = −q log₂ q − (1−q) log₂(1−q)`, with `h(0) = h(1) = 0`.
pub fn binary_entropy(q: f64) -> Result<f64, PostprocessError> {
    if !(0.0..=1.0).contains(&q) {
        return Err(PostprocessError::Domain(format!("binary entropy of {q}")));
    }
    let term = |p: f64| if p == 0.0 { 0.0 } else { -p * p.log2() };
    Ok(term(q) + term(1.0 - q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        // direct evaluation: 0.11·log₂(1/0.11) + 0.89·log₂(1/0.89)
        assert!((binary_entropy(0.11).unwrap() - 0.499_915_958_164_528).abs() < 1e-12);
    }

    #[test]
    fn symmetric() {
        for i in 1..50 {
            let q = i as f64 / 100.0;
            assert!((binary_entropy(q).unwrap() - binary_entropy(1.0 - q).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }
}
