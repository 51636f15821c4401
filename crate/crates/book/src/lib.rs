//! Compiles every chapter of the guide in `book/src` as rustdoc, so
//! `cargo test` runs its code blocks. One module per chapter keeps failures
//! traceable to a file.

#[doc = include_str!("../../../README.md")]
pub mod readme {}
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/padic.md")]
pub mod padic {}
#[doc = include_str!("../../../book/src/series.md")]
pub mod series {}
#[doc = include_str!("../../../book/src/orbits.md")]
pub mod orbits {}
#[doc = include_str!("../../../book/src/interpolation.md")]
pub mod interpolation {}
#[doc = include_str!("../../../book/src/dml.md")]
pub mod dml {}
#[doc = include_str!("../../../book/src/return_sets.md")]
pub mod return_sets {}
#[doc = include_str!("../../../book/src/heights.md")]
pub mod heights {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[cfg(test)]
mod tests {
    #[test]
    fn every_chapter_is_compiled() {
        let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../book/src");
        let lib = include_str!("lib.rs");
        let summary = std::fs::read_to_string(format!("{dir}/SUMMARY.md")).unwrap();
        for entry in std::fs::read_dir(dir).unwrap() {
            let name = entry.unwrap().file_name().into_string().unwrap();
            if name.ends_with(".md") && name != "SUMMARY.md" {
                assert!(lib.contains(&format!("book/src/{name}\"")), "{name} is not compiled");
                assert!(summary.contains(&format!("({name})")), "{name} is not in SUMMARY.md");
            }
        }
    }
}
