//! On-disk dataset layout: incidence, segments, and ground truth.
//!
//! A dataset directory holds three files:
//!
//! * `incidence.mtx` — the vertex-by-edge 0/1 incidence in Matrix Market
//!   coordinate form;
//! * `segments.tsv` — the vertex-type spans;
//! * `truth.tsv` — held-out tags, one `image<TAB>tag` pair per line.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::hypergraph::{HypergraphModel, VertexSegments, VertexType};
use crate::linalg::{read_matrix_market, write_matrix_market};
use crate::{Error, Result};

pub const INCIDENCE_FILE: &str = "incidence.mtx";
pub const SEGMENTS_FILE: &str = "segments.tsv";
pub const TRUTH_FILE: &str = "truth.tsv";

/// Held-out tags per image — what the ranking is asked to recover.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroundTruth {
    by_image: BTreeMap<usize, Vec<usize>>,
}

impl GroundTruth {
    /// Build from `(image, tags)` pairs; tags are sorted and deduplicated,
    /// empty tag lists are rejected.
    pub fn new(entries: impl IntoIterator<Item = (usize, Vec<usize>)>) -> Result<Self> {
        let mut by_image = BTreeMap::new();
        for (image, mut tags) in entries {
            if tags.is_empty() {
                return Err(Error::InvalidArgument(format!(
                    "ground truth for image {image} is empty"
                )));
            }
            tags.sort_unstable();
            tags.dedup();
            if by_image.insert(image, tags).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "duplicate ground truth entry for image {image}"
                )));
            }
        }
        Ok(GroundTruth { by_image })
    }

    pub fn is_empty(&self) -> bool {
        self.by_image.is_empty()
    }

    pub fn n_images(&self) -> usize {
        self.by_image.len()
    }

    /// Images with held-out tags, ascending.
    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_image.keys().copied()
    }

    /// Held-out tags of one image (sorted), if present.
    pub fn tags_for(&self, image: usize) -> Option<&[usize]> {
        self.by_image.get(&image).map(|v| v.as_slice())
    }

    /// Check every image and tag index against the segment spans.
    pub fn validate(&self, segments: &VertexSegments) -> Result<()> {
        for (&image, tags) in &self.by_image {
            if segments.type_of(image) != Some(VertexType::Image) {
                return Err(Error::InvalidArgument(format!(
                    "ground truth references vertex {image}, which is not an image"
                )));
            }
            for &t in tags {
                if segments.type_of(t) != Some(VertexType::Tag) {
                    return Err(Error::InvalidArgument(format!(
                        "ground truth for image {image} references vertex {t}, \
                         which is not a tag"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Write one `image<TAB>tag` pair per line.
    pub fn save<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut out = String::from("# ground truth: image\ttag\n");
        for (image, tags) in &self.by_image {
            for t in tags {
                out.push_str(&format!("{image}\t{t}\n"));
            }
        }
        fs::write(path, out)?;
        Ok(())
    }

    /// Read the format written by [`save`](Self::save).
    pub fn load<P: AsRef<Path>>(path: P) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)?;
        let mut by_image: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.display().to_string(),
                line: lineno + 1,
                message,
            };
            let mut fields = line.split('\t');
            let image: usize = fields
                .next()
                .ok_or_else(|| parse_err("missing image".into()))?
                .parse()
                .map_err(|e| parse_err(format!("bad image: {e}")))?;
            let tag: usize = fields
                .next()
                .ok_or_else(|| parse_err("missing tag".into()))?
                .parse()
                .map_err(|e| parse_err(format!("bad tag: {e}")))?;
            if fields.next().is_some() {
                return Err(parse_err("too many fields".into()));
            }
            by_image.entry(image).or_default().push(tag);
        }
        Self::new(by_image)
    }
}

/// A complete evaluation corpus: structure, layout, and held-out answers.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub segments: VertexSegments,
    pub hypergraph: HypergraphModel,
    pub truth: GroundTruth,
}

impl Dataset {
    /// Validate the parts against each other.
    pub fn new(
        segments: VertexSegments,
        hypergraph: HypergraphModel,
        truth: GroundTruth,
    ) -> Result<Self> {
        if hypergraph.n_vertices() != segments.dim() {
            return Err(Error::DimensionMismatch {
                context: "dataset incidence vs segments",
                expected: segments.dim(),
                got: hypergraph.n_vertices(),
            });
        }
        truth.validate(&segments)?;
        Ok(Dataset {
            segments,
            hypergraph,
            truth,
        })
    }

    /// Write the three dataset files into a directory (created if absent).
    pub fn save<P: AsRef<Path>>(&self, dir: P) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        write_matrix_market(self.hypergraph.incidence(), dir.join(INCIDENCE_FILE))?;
        self.segments.save(dir.join(SEGMENTS_FILE))?;
        self.truth.save(dir.join(TRUTH_FILE))?;
        Ok(())
    }

    /// Read a directory written by [`save`](Self::save).
    pub fn load<P: AsRef<Path>>(dir: P) -> Result<Self> {
        let dir = dir.as_ref();
        let incidence = read_matrix_market(dir.join(INCIDENCE_FILE))?;
        let segments = VertexSegments::load(dir.join(SEGMENTS_FILE))?;
        let truth = GroundTruth::load(dir.join(TRUTH_FILE))?;
        Self::new(segments, HypergraphModel::new(incidence)?, truth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_dataset() -> Dataset {
        let segments = VertexSegments::from_lens(&[
            (VertexType::Image, 2),
            (VertexType::User, 1),
            (VertexType::Tag, 3),
        ])
        .unwrap();
        let hg = HypergraphModel::from_edges(
            6,
            &[vec![0, 2, 3], vec![1, 2, 4, 5], vec![0, 1, 5]],
        )
        .unwrap();
        let truth = GroundTruth::new(vec![(0, vec![3]), (1, vec![5, 4])]).unwrap();
        Dataset::new(segments, hg, truth).unwrap()
    }

    #[test]
    fn truth_sorts_and_deduplicates() {
        let t = GroundTruth::new(vec![(3, vec![9, 7, 9])]).unwrap();
        assert_eq!(t.tags_for(3), Some(&[7, 9][..]));
        assert_eq!(t.tags_for(4), None);
        assert_eq!(t.n_images(), 1);
    }

    #[test]
    fn truth_rejects_empty_and_duplicate_entries() {
        assert!(GroundTruth::new(vec![(0, vec![])]).is_err());
        assert!(GroundTruth::new(vec![(0, vec![1]), (0, vec![2])]).is_err());
    }

    #[test]
    fn truth_round_trips_through_tsv() {
        let t = GroundTruth::new(vec![(0, vec![4, 3]), (17, vec![5])]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("truth.tsv");
        t.save(&path).unwrap();
        assert_eq!(GroundTruth::load(&path).unwrap(), t);
    }

    #[test]
    fn truth_validation_checks_vertex_types() {
        let segments = VertexSegments::from_lens(&[
            (VertexType::Image, 2),
            (VertexType::Tag, 2),
        ])
        .unwrap();
        // Tag position used as an image.
        let bad = GroundTruth::new(vec![(2, vec![3])]).unwrap();
        assert!(bad.validate(&segments).is_err());
        // Image position used as a tag.
        let bad = GroundTruth::new(vec![(0, vec![1])]).unwrap();
        assert!(bad.validate(&segments).is_err());
        let good = GroundTruth::new(vec![(0, vec![2, 3])]).unwrap();
        assert!(good.validate(&segments).is_ok());
    }

    #[test]
    fn dataset_round_trips_through_a_directory() {
        let ds = toy_dataset();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("corpus");
        ds.save(&path).unwrap();
        let back = Dataset::load(&path).unwrap();
        assert_eq!(back.segments, ds.segments);
        assert_eq!(back.truth, ds.truth);
        assert_eq!(
            back.hypergraph.incidence().triplets(),
            ds.hypergraph.incidence().triplets()
        );
    }

    #[test]
    fn dataset_rejects_mismatched_segments() {
        let segments = VertexSegments::from_lens(&[
            (VertexType::Image, 1),
            (VertexType::Tag, 1),
        ])
        .unwrap();
        let hg = HypergraphModel::from_edges(3, &[vec![0, 1, 2]]).unwrap();
        assert!(Dataset::new(segments, hg, GroundTruth::default()).is_err());
    }
}
