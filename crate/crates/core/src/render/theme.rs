use serde::Serialize;

use crate::model::Theme;

/// Default categorical colours, shared by both themes.
pub const CATEGORICAL: [&str; 10] = [
    "#5b8ff9", "#5ad8a6", "#5d7092", "#f6bd16", "#e8684a", "#6dc8ec", "#9270ca", "#ff9d4d", "#269a99",
    "#ff99c3",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThemePalette {
    pub background: &'static str,
    pub surface: &'static str,
    pub text: &'static str,
    pub axis: &'static str,
    pub categorical: [&'static str; 10],
}

pub const LIGHT: ThemePalette = ThemePalette {
    background: "#ffffff",
    surface: "#f5f5f5",
    text: "#1f1f1f",
    axis: "#8c8c8c",
    categorical: CATEGORICAL,
};

pub const DARK: ThemePalette = ThemePalette {
    background: "#141414",
    surface: "#1f1f1f",
    text: "#e8e8e8",
    axis: "#595959",
    categorical: CATEGORICAL,
};

impl ThemePalette {
    pub fn for_theme(theme: Theme) -> &'static ThemePalette {
        match theme {
            Theme::Light => &LIGHT,
            Theme::Dark => &DARK,
        }
    }

    /// Every colour role, in a fixed order.
    pub fn roles(&self) -> impl Iterator<Item = &'static str> + '_ {
        [self.background, self.surface, self.text, self.axis]
            .into_iter()
            .chain(self.categorical)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::is_hex_colour;

    #[test]
    fn palettes_are_total() {
        for theme in Theme::ALL {
            let p = ThemePalette::for_theme(theme);
            assert_eq!(p.roles().count(), 14);
            assert!(p.roles().all(is_hex_colour));
        }
        assert_ne!(LIGHT.background, DARK.background);
        assert_eq!(DARK.background, "#141414");
    }
}
