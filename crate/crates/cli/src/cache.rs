//! Content-addressed cache of intermediate results under `<out>/.cache`.

use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use textmine::distance::{DistanceMatrix, Measure};
use textmine::dtm::{DocTermMatrix, MatrixFiles};
use textmine::io::{fmt_f64, write_atomic};

use crate::error::CliResult;

pub fn hash_parts(parts: &[&[u8]]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(&h.finalize()[..16])
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(out: &Path) -> Self {
        Cache {
            dir: out.join(".cache"),
        }
    }

    fn dtm_files(&self, key: &str) -> MatrixFiles {
        MatrixFiles::new(&self.dir.join(format!("dtm-{key}")), "counts")
    }

    pub fn load_dtm(&self, key: &str) -> Option<DocTermMatrix> {
        let files = self.dtm_files(key);
        if !files.matrix.is_file() {
            return None;
        }
        match DocTermMatrix::import(&files) {
            Ok(d) => Some(d),
            Err(e) => {
                log::warn!(
                    "ignoring unreadable cached matrix {}: {e}",
                    files.matrix.display()
                );
                None
            }
        }
    }

    pub fn store_dtm(&self, key: &str, dtm: &DocTermMatrix) -> CliResult<()> {
        dtm.export(&self.dtm_files(key))?;
        Ok(())
    }

    fn dist_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("dist-{key}.txt"))
    }

    /// A cached distance matrix, relabeled with `template`'s rows.
    pub fn load_distances(&self, key: &str, template: &DistanceMatrix) -> Option<DistanceMatrix> {
        let text = std::fs::read_to_string(self.dist_path(key)).ok()?;
        let values: Vec<f64> = text.lines().map(|l| l.parse().ok()).collect::<Option<_>>()?;
        DistanceMatrix::from_values(
            values,
            template.rows.clone(),
            template.books.clone(),
            template.measure,
        )
        .ok()
    }

    pub fn store_distances(&self, key: &str, d: &DistanceMatrix) -> CliResult<()> {
        let mut s = String::with_capacity(d.values().len() * 24);
        for v in d.values() {
            s.push_str(&fmt_f64(*v));
            s.push('\n');
        }
        write_atomic(&self.dist_path(key), s.as_bytes())?;
        Ok(())
    }
}

pub fn dist_key(matrix_key: &str, features: &str, measure: Measure) -> String {
    hash_parts(&[
        b"dist v1",
        matrix_key.as_bytes(),
        features.as_bytes(),
        measure.name().as_bytes(),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_separates_parts() {
        assert_ne!(hash_parts(&[b"ab", b"c"]), hash_parts(&[b"a", b"bc"]));
        assert_eq!(hash_parts(&[b"x"]).len(), 32);
    }
}
