//! Training manifest: the configuration, a checksum of the corpus file and
//! table sizes, written next to the model.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use robolex::phrase_table::TableStats;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;

pub const MANIFEST_FILE: &str = "manifest.txt";

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        write!(s, "{b:02x}").expect("writing to a String");
        s
    })
}

pub fn file_checksum(path: &Path) -> io::Result<String> {
    Ok(sha256_hex(&fs::read(path)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub config: RunConfig,
    pub corpus_sha256: String,
    pub train_pairs: usize,
    pub stats: TableStats,
}

impl Manifest {
    pub fn render(&self) -> String {
        let mut out = String::from("[config]\n");
        out.push_str(&self.config.render());
        writeln!(
            out,
            "\n[corpus]\nsha256 = {}\ntrain_pairs = {}\n\n[table]\nentries = {}\nsources = {}",
            self.corpus_sha256, self.train_pairs, self.stats.entries, self.stats.sources
        )
        .expect("writing to a String");
        out
    }

    pub fn write(&self, dir: &Path) -> io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(MANIFEST_FILE), self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_digest() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn render_is_stable() {
        let m = Manifest {
            config: RunConfig::default(),
            corpus_sha256: sha256_hex(b""),
            train_pairs: 3,
            stats: TableStats { entries: 5, sources: 2 },
        };
        let text = m.render();
        assert_eq!(text, m.clone().render());
        assert!(text.contains("train_pairs = 3\n"));
        assert!(text.contains("sha256 = e3b0c442"));
        assert!(text.ends_with("sources = 2\n"));
    }
}
