use num_traits::Float;

/// `-f log2 f - (1-f) log2 (1-f)`, with `0 log2 0 = 0`.
pub fn binary_entropy<F: Float>(f: F) -> F {
    let term = |p: F| if p <= F::zero() { F::zero() } else { -p * p.log2() };
    term(f) + term(F::one() - f)
}

/// Mean per-project binary entropy of funding frequencies; 0 for no projects.
pub fn entropy<F: Float>(frequencies: &[F]) -> F {
    if frequencies.is_empty() {
        return F::zero();
    }
    let total = frequencies.iter().fold(F::zero(), |acc, &f| acc + binary_entropy(f));
    total / F::from(frequencies.len()).expect("project count fits the float type")
}
