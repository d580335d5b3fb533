//! Query vector construction for tag ranking.
//!
//! A query about an image seeds the diffusion with:
//!
//! * the image itself and its owner, both at 1;
//! * the image's tag affinities — its adjacency row restricted to the tag
//!   span — except the held-out truth tags, which are zeroed so the
//!   ranking cannot read off the answer;
//! * the owner's group and geo affinities from the owner's adjacency row.
//!
//! The owner is the user sharing the most hyperedges with the image, ties
//! resolved toward the lowest index.

use crate::hypergraph::{HypergraphModel, SystemMatrix, VertexSegments, VertexType};
use crate::{Error, Result};

/// The user sharing the most hyperedges with `image` (lowest index wins
/// ties). Errors if no user co-occurs with the image at all.
pub fn resolve_owner(
    hg: &HypergraphModel,
    segments: &VertexSegments,
    image: usize,
) -> Result<usize> {
    let (img_start, img_end) = segments
        .range(VertexType::Image)
        .ok_or_else(|| Error::InvalidArgument("segments carry no image span".into()))?;
    if image < img_start || image >= img_end {
        return Err(Error::InvalidArgument(format!(
            "vertex {image} is not an image (image span is [{img_start}, {img_end}))"
        )));
    }
    let (user_start, user_end) = segments
        .range(VertexType::User)
        .ok_or_else(|| Error::InvalidArgument("segments carry no user span".into()))?;

    let mut counts: Vec<usize> = vec![0; user_end - user_start];
    for &e in hg.vertex_edges(image) {
        for &v in hg.edge_members(e) {
            if v >= user_start && v < user_end {
                counts[v - user_start] += 1;
            }
        }
    }
    let mut best: Option<(usize, usize)> = None; // (count, user)
    for (offset, &count) in counts.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let user = user_start + offset;
        // Strict comparison keeps the earliest maximum.
        if best.map(|(c, _)| count > c).unwrap_or(true) {
            best = Some((count, user));
        }
    }
    best.map(|(_, user)| user)
        .ok_or(Error::NoOwner { image })
}

/// Build the query vector for one image, hiding its held-out tags.
pub fn build_query(
    hg: &HypergraphModel,
    sys: &SystemMatrix,
    segments: &VertexSegments,
    image: usize,
    truth_tags: &[usize],
) -> Result<Vec<f64>> {
    let n = segments.dim();
    if sys.dim() != n {
        return Err(Error::DimensionMismatch {
            context: "query segments vs system",
            expected: sys.dim(),
            got: n,
        });
    }
    let owner = resolve_owner(hg, segments, image)?;
    let a = sys.adjacency();

    let mut y = vec![0.0; n];
    y[image] = 1.0;
    y[owner] = 1.0;

    if let Some((tag_start, tag_end)) = segments.range(VertexType::Tag) {
        let (cols, values) = a.row_entries(image);
        for (&col, &val) in cols.iter().zip(values.iter()) {
            if col >= tag_start && col < tag_end {
                y[col] = val;
            }
        }
    }
    let group_span = segments.range(VertexType::Group);
    let geo_span = segments.range(VertexType::Geo);
    if group_span.is_some() || geo_span.is_some() {
        let (cols, values) = a.row_entries(owner);
        for (&col, &val) in cols.iter().zip(values.iter()) {
            let in_group = group_span.map(|(s, e)| col >= s && col < e).unwrap_or(false);
            let in_geo = geo_span.map(|(s, e)| col >= s && col < e).unwrap_or(false);
            if in_group || in_geo {
                y[col] = val;
            }
        }
    }

    for &t in truth_tags {
        if t >= n {
            return Err(Error::IndexOutOfRange {
                context: "truth tag",
                index: t,
                limit: n,
            });
        }
        y[t] = 0.0;
    }
    Ok(y)
}
