/// Shipped scenarios by name.
pub const PRESETS: [(&str, &str); 6] = [
    ("lens_equal_tensions", include_str!("../../scenarios/lens_equal_tensions.toml")),
    ("lens_unequal_tensions", include_str!("../../scenarios/lens_unequal_tensions.toml")),
    ("young_flat", include_str!("../../scenarios/young_flat.toml")),
    ("bubble", include_str!("../../scenarios/bubble.toml")),
    ("bubble_axisymmetric", include_str!("../../scenarios/bubble_axisymmetric.toml")),
    ("lens_axisymmetric", include_str!("../../scenarios/lens_axisymmetric.toml")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|p| p.0 == name).map(|p| p.1)
}
