//! Canned sweeps for each figure, shipped as config files.

use crate::error::{Error, Result};
use crate::sweep::config::SweepFile;

pub const FIGURE_TAGS: [&str; 6] = ["fig2", "fig3", "fig4", "fig5", "fig6", "fig8"];

pub fn figure_config_text(tag: &str) -> Result<&'static str> {
    Ok(match tag {
        "fig2" => include_str!("../../configs/fig2.toml"),
        "fig3" => include_str!("../../configs/fig3.toml"),
        "fig4" => include_str!("../../configs/fig4.toml"),
        "fig5" => include_str!("../../configs/fig5.toml"),
        "fig6" => include_str!("../../configs/fig6.toml"),
        "fig8" => include_str!("../../configs/fig8.toml"),
        other => {
            return Err(Error::Config(format!(
                "unknown figure tag '{other}' (expected one of {})",
                FIGURE_TAGS.join(", ")
            )))
        }
    })
}

pub fn figure_config(tag: &str) -> Result<SweepFile> {
    SweepFile::parse(figure_config_text(tag)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_figure_config_validates() {
        for tag in FIGURE_TAGS {
            let f = figure_config(tag).unwrap();
            for s in &f.sweep {
                assert!(s.grid().is_ok(), "{tag} {}", s.output);
                assert!(s
                    .grid()
                    .unwrap()
                    .iter()
                    .all(|p| p.phi == -std::f64::consts::FRAC_PI_2));
            }
        }
        assert!(figure_config("fig7").is_err());
    }

    #[test]
    fn figure_bundle_sizes() {
        assert_eq!(figure_config("fig2").unwrap().sweep.len(), 3);
        assert_eq!(figure_config("fig3").unwrap().sweep.len(), 4);
        assert_eq!(figure_config("fig5").unwrap().sweep.len(), 4);
        assert_eq!(figure_config("fig6").unwrap().sweep.len(), 16);
    }
}
