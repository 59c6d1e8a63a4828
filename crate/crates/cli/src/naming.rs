//! Output file names of the form `<lang>.<variant>.<stage>.<ext>`.
//!
//! Variant strings are perturbation specs, whose `:` separators become `+`
//! in file names.

use std::path::Path;

pub const ATTESTED: &str = "attested";

pub fn encode_variant(variant: &str) -> String {
    variant.replace(':', "+")
}

pub fn decode_variant(encoded: &str) -> String {
    encoded.replace('+', ":")
}

pub fn file_name(lang: &str, variant: &str, stage: &str, ext: &str) -> String {
    format!("{lang}.{}.{stage}.{ext}", encode_variant(variant))
}

/// `(lang, variant)` from a name produced by [`file_name`] with the given
/// `.<stage>.<ext>` suffix.
pub fn parse_file_name(path: &Path, suffix: &str) -> Option<(String, String)> {
    let name = path.file_name()?.to_str()?;
    let stem = name.strip_suffix(suffix)?;
    let (lang, variant) = stem.split_once('.')?;
    Some((lang.to_string(), decode_variant(variant)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        let n = file_name("en", "shuffle_local:w=3", "corpus", "tsv");
        assert_eq!(n, "en.shuffle_local+w=3.corpus.tsv");
        assert_eq!(
            parse_file_name(Path::new(&n), ".corpus.tsv"),
            Some(("en".into(), "shuffle_local:w=3".into()))
        );
        assert_eq!(parse_file_name(Path::new("x.tsv"), ".corpus.tsv"), None);
    }
}
