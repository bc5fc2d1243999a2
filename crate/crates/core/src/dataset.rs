/// Breakdown times in minutes of an insulating fluid held at 34 kV
/// (Nelson, *Applied Life Data Analysis*), in published order.
pub const INSULATING_FLUID: [f64; 19] = [
    0.19, 0.78, 0.96, 1.31, 2.78, 3.16, 4.15, 4.67, 4.85, 6.50, 7.35, 8.01, 8.27, 12.06, 31.75, 32.52, 33.91, 36.71,
    72.89,
];

pub fn insulating_fluid() -> crate::Sample {
    crate::Sample::new(INSULATING_FLUID.to_vec()).expect("fixture values are positive")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixture_checksum() {
        assert_eq!(INSULATING_FLUID.len(), 19);
        let sum: f64 = INSULATING_FLUID.iter().sum();
        assert!((sum - 272.82).abs() < 1e-9, "{sum}");
        assert!(INSULATING_FLUID.windows(2).all(|w| w[0] < w[1]));
    }
}
