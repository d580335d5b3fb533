//! Synthetic corpus generation with planted tag clusters.
//!
//! Vertices of every type are dealt round-robin into clusters, and every
//! hyperedge groups one entity with everything attached to it:
//!
//! * one ownership edge per user, `{user} ∪ {images the user owns}`,
//!   each image drawing its owner from its own subtopic with
//!   probability `p_in`;
//! * one tagging edge per tag, `{tag} ∪ {images observing the tag}` —
//!   each cluster's tags split into `subtopics` topic groups, every
//!   image picks one topic and samples candidates from it (capped) kept
//!   with probability `p_in`, plus out-of-cluster candidates (capped)
//!   kept with probability `p_out`;
//! * one edge per group and per geographic context listing its member
//!   users, membership sampled the same way.
//!
//! Grouping by entity rather than by pair means a stray out-of-cluster
//! co-occurrence is one member among many in a large edge instead of a
//! dedicated edge of its own, so edge-weight learning sees cluster
//! structure, not individual accidents.
//!
//! Subtopics give the corpus co-occurrence structure below the cluster
//! level: tags observed together on one image recur together on its
//! topic-mates, and photographers stick to a topic, so ownership and
//! tagging edges resolve topics while groups and geography remain
//! cluster-wide and topic-blind. Reweighting edges is therefore the
//! only way a ranker can resolve topics inside a cluster.
//!
//! Two realistic nuisances complete the corpus. A long tail of *stray
//! relations* (`stray_factor` per real edge): small edges over uniformly
//! random vertices, like the one-off co-occurrences crawled corpora are
//! full of. And a short head of *hub tags* (`n_hub_tags`): tags so
//! popular that images from every cluster observe them, whose fat edges
//! spread mass thinly. Under uniform edge weights both leak ranking
//! mass across clusters and crowd the top ranks with globally popular
//! tags; they are exactly the structure weight learning can starve.
//!
//! A fraction of the images (`test_fraction`) is designated as test
//! images. For each of those, `holdout_fraction` of its kept in-cluster
//! tags is recorded as ground truth and the image is *left out of those
//! tags' edges*; the rest of its kept tags stay as observed context.
//! Recovering the truth therefore means following the planted cluster
//! structure — through co-owned images, shared users, groups, and
//! sibling tags — rather than reading a direct incidence back. Tags
//! nobody observes are anchored to a training image from their cluster,
//! and a final pass links any remaining uncovered vertex to a
//! cluster-mate, keeping every degree positive.
//!
//! Everything is driven by one seed through forked streams, so a spec
//! generates the same corpus bit for bit every time.

use crate::hypergraph::{HypergraphModel, VertexSegments, VertexType};
use crate::linalg::RngStream;
use crate::{Error, Result};

use super::dataset::{Dataset, GroundTruth};

/// Probability of keeping an in-cluster candidate.
pub const DEFAULT_P_IN: f64 = 0.8;
/// Probability of keeping an out-of-cluster candidate.
pub const DEFAULT_P_OUT: f64 = 0.05;
/// In-cluster candidates considered per vertex.
pub const DEFAULT_IN_CANDIDATE_CAP: usize = 25;
/// Out-of-cluster candidates considered per vertex.
pub const DEFAULT_OUT_CANDIDATE_CAP: usize = 40;
/// Share of images designated as test images.
pub const DEFAULT_TEST_FRACTION: f64 = 0.25;
/// Share of a test image's kept in-cluster tags held out as ground truth.
pub const DEFAULT_HOLDOUT_FRACTION: f64 = 0.5;
/// Probability that a group/geo membership lands on a random cluster.
pub const DEFAULT_CONTEXT_NOISE: f64 = 0.6;
/// Stray relations added per real hyperedge.
pub const DEFAULT_STRAY_FACTOR: f64 = 1.0;
/// Probability that any given image observes a given hub tag.
pub const DEFAULT_HUB_OBSERVE: f64 = 0.5;
/// Tag subtopics planted inside each cluster.
pub const DEFAULT_SUBTOPICS: usize = 3;

/// Shape and randomness of a synthetic corpus.
#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub n_images: usize,
    pub n_users: usize,
    pub n_groups: usize,
    pub n_geo: usize,
    pub n_tags: usize,
    pub n_clusters: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub in_candidate_cap: usize,
    pub out_candidate_cap: usize,
    /// Share of images whose tags are partially held out for evaluation.
    pub test_fraction: f64,
    /// Share of a test image's kept in-cluster tags that becomes truth.
    pub holdout_fraction: f64,
    /// How often a group/geo membership ignores the cluster layout.
    /// Tagging stays clean while social context is this much noisier, so
    /// uniform edge weights over-trust groups and geo contexts.
    pub context_noise: f64,
    /// Stray relations per real hyperedge: small edges over uniformly
    /// random context-layer vertices (users, groups, geo contexts), the
    /// long tail of one-off social co-occurrences real corpora carry.
    /// They blur the social background under uniform weights and carry
    /// no mass concentration for weight learning to reward. Images and
    /// tags never join them: image incidence is a curated record, noisy
    /// tag evidence is `p_out`'s business, and a stray touching either
    /// would hand rank mass between queries and answers through an
    /// accidental wire.
    pub stray_factor: f64,
    /// Tags at the head of the popularity curve: the last `n_hub_tags`
    /// of the tag span belong to no cluster and are observed by images
    /// everywhere. Their fat edges concentrate mass poorly, and under
    /// uniform weights their tags crowd every ranking.
    pub n_hub_tags: usize,
    /// Probability that an image observes each hub tag.
    pub hub_observe: f64,
    /// Tag subtopics per cluster. Each cluster's tags and users are
    /// dealt into this many topics; every image draws its owner and its
    /// tags from a single topic, so tags that appear together on one
    /// image keep appearing together on its topic-mates and on its
    /// owner's other images. Groups and geo contexts stay cluster-wide
    /// and cannot see topics, which is precisely the resolution
    /// edge-weight learning adds over uniform weights.
    pub subtopics: usize,
    pub seed: u64,
}

impl SynthSpec {
    /// Proportional layout summing to roughly `total` vertices: 40%
    /// images, 15% users, 8% groups, 7% geo, 30% tags, one cluster per
    /// ~100 vertices (at least 2).
    pub fn scaled(total: usize, seed: u64) -> Self {
        let part = |share: f64| ((total as f64 * share).round() as usize).max(1);
        let n_tags = part(0.30);
        let n_clusters = (total / 100).clamp(2, n_tags);
        SynthSpec {
            n_images: part(0.40),
            n_users: part(0.15),
            n_groups: part(0.08),
            n_geo: part(0.07),
            n_tags,
            n_clusters,
            n_hub_tags: (n_tags / 20).max(2),
            hub_observe: DEFAULT_HUB_OBSERVE,
            subtopics: DEFAULT_SUBTOPICS,
            p_in: DEFAULT_P_IN,
            p_out: DEFAULT_P_OUT,
            test_fraction: DEFAULT_TEST_FRACTION,
            holdout_fraction: DEFAULT_HOLDOUT_FRACTION,
            context_noise: DEFAULT_CONTEXT_NOISE,
            stray_factor: DEFAULT_STRAY_FACTOR,
            in_candidate_cap: DEFAULT_IN_CANDIDATE_CAP,
            out_candidate_cap: DEFAULT_OUT_CANDIDATE_CAP,
            seed,
        }
    }

    pub fn total_vertices(&self) -> usize {
        self.n_images + self.n_users + self.n_groups + self.n_geo + self.n_tags
    }

    fn validate(&self) -> Result<()> {
        for (name, count) in [
            ("images", self.n_images),
            ("users", self.n_users),
            ("groups", self.n_groups),
            ("geo contexts", self.n_geo),
            ("tags", self.n_tags),
            ("clusters", self.n_clusters),
        ] {
            if count == 0 {
                return Err(Error::InvalidArgument(format!(
                    "synthetic spec needs at least one of each vertex kind, got 0 {name}"
                )));
            }
        }
        if self.subtopics == 0 {
            return Err(Error::InvalidArgument(
                "every cluster needs at least one tag subtopic".into(),
            ));
        }
        if self.n_hub_tags >= self.n_tags
            || self.n_tags - self.n_hub_tags < self.n_clusters * self.subtopics
        {
            return Err(Error::InvalidArgument(format!(
                "synthetic spec has {} tags for {} clusters of {} subtopics \
                 after reserving {} hub tags; every subtopic needs at least \
                 one tag to plant",
                self.n_tags.saturating_sub(self.n_hub_tags),
                self.n_clusters,
                self.subtopics,
                self.n_hub_tags
            )));
        }
        if !(self.hub_observe.is_finite() && (0.0..=1.0).contains(&self.hub_observe)) {
            return Err(Error::InvalidArgument(format!(
                "hub_observe must lie in [0, 1], got {}",
                self.hub_observe
            )));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        for (name, p) in [
            ("test_fraction", self.test_fraction),
            ("holdout_fraction", self.holdout_fraction),
        ] {
            if !(p.is_finite() && p > 0.0 && p <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in (0, 1], got {p}"
                )));
            }
        }
        if !(self.context_noise.is_finite() && (0.0..=1.0).contains(&self.context_noise)) {
            return Err(Error::InvalidArgument(format!(
                "context_noise must lie in [0, 1], got {}",
                self.context_noise
            )));
        }
        if !(self.stray_factor.is_finite() && self.stray_factor >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "stray_factor must be a finite non-negative number, got {}",
                self.stray_factor
            )));
        }
        if self.stray_factor > 0.0 && self.n_users + self.n_groups + self.n_geo < 7 {
            return Err(Error::InvalidArgument(format!(
                "stray relations draw up to 7 distinct context vertices but the \
                 spec only has {} (users + groups + geo contexts)",
                self.n_users + self.n_groups + self.n_geo
            )));
        }
        if self.in_candidate_cap == 0 || self.out_candidate_cap == 0 {
            return Err(Error::InvalidArgument(
                "candidate caps must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Vertices of one type split round-robin into clusters.
struct ClusteredSpan {
    start: usize,
    members: Vec<Vec<usize>>, // cluster -> ascending vertex indices
}

impl ClusteredSpan {
    fn new(start: usize, len: usize, n_clusters: usize) -> Self {
        let mut members = vec![Vec::new(); n_clusters];
        for offset in 0..len {
            members[offset % n_clusters].push(start + offset);
        }
        ClusteredSpan { start, members }
    }

    fn cluster_of(&self, vertex: usize, n_clusters: usize) -> usize {
        (vertex - self.start) % n_clusters
    }

    fn in_cluster(&self, c: usize) -> &[usize] {
        &self.members[c]
    }
}

/// Sample `cap`-limited candidates from `pool`, keeping each with
/// probability `p`.
fn sample_members(pool: &[usize], cap: usize, p: f64, rng: &mut RngStream) -> Vec<usize> {
    if pool.is_empty() || p == 0.0 {
        return Vec::new();
    }
    let count = cap.min(pool.len());
    let picks = rng.distinct_indices(count, pool.len());
    let mut kept: Vec<usize> = picks
        .into_iter()
        .filter(|_| rng.uniform() < p)
        .map(|i| pool[i])
        .collect();
    kept.sort_unstable();
    kept
}

/// Generate a planted-cluster corpus.
pub fn generate(spec: &SynthSpec) -> Result<Dataset> {
    spec.validate()?;
    let k = spec.n_clusters;
    let segments = VertexSegments::from_lens(&[
        (VertexType::Image, spec.n_images),
        (VertexType::User, spec.n_users),
        (VertexType::Group, spec.n_groups),
        (VertexType::Geo, spec.n_geo),
        (VertexType::Tag, spec.n_tags),
    ])?;
    let images = ClusteredSpan::new(segments.range(VertexType::Image).unwrap().0, spec.n_images, k);
    // Users follow the *topic* layout: a photographer sticks to one
    // theme, so ownership carries topic information just like tagging.
    let n_topics = k * spec.subtopics;
    let users =
        ClusteredSpan::new(segments.range(VertexType::User).unwrap().0, spec.n_users, n_topics);
    let cluster_of_user = |u: usize| users.cluster_of(u, n_topics) / spec.subtopics;
    let groups = ClusteredSpan::new(segments.range(VertexType::Group).unwrap().0, spec.n_groups, k);
    let geo = ClusteredSpan::new(segments.range(VertexType::Geo).unwrap().0, spec.n_geo, k);
    // The last `n_hub_tags` tags sit outside the cluster layout; only
    // the regular prefix is dealt out, one topic group per
    // (cluster, subtopic) pair. Topic `c * subtopics + s` is subtopic
    // `s` of cluster `c`.
    let tag_start = segments.range(VertexType::Tag).unwrap().0;
    let n_regular = spec.n_tags - spec.n_hub_tags;
    let tags = ClusteredSpan::new(tag_start, n_regular, n_topics);
    let cluster_of_tag = |t: usize| tags.cluster_of(t, n_topics) / spec.subtopics;

    // Out-of-cluster tag pools, one per cluster, ascending.
    let mut tags_outside: Vec<Vec<usize>> = vec![Vec::new(); k];
    for t in tag_start..tag_start + n_regular {
        let c = cluster_of_tag(t);
        for (other, pool) in tags_outside.iter_mut().enumerate() {
            if other != c {
                pool.push(t);
            }
        }
    }

    let root = RngStream::new(spec.seed);
    let mut owner_rng = root.clone().fork(1);
    let mut tag_rng = root.clone().fork(2);
    let mut group_rng = root.clone().fork(3);
    let mut geo_rng = root.clone().fork(4);
    let mut fixup_rng = root.clone().fork(5);
    let mut split_rng = root.clone().fork(6);
    let mut hub_rng = root.clone().fork(8);
    let mut topic_rng = root.clone().fork(9);

    // Each image settles on one subtopic of its cluster up front; its
    // owner and its tags both follow that topic.
    let image_topic: Vec<usize> = (0..spec.n_images)
        .map(|offset| {
            let c = images.cluster_of(images.start + offset, k);
            c * spec.subtopics + topic_rng.index(spec.subtopics)
        })
        .collect();

    // Pick the test images whose held-out tags become ground truth.
    let n_test = ((spec.n_images as f64 * spec.test_fraction).round() as usize)
        .clamp(1, spec.n_images);
    let mut is_test = vec![false; spec.n_images];
    for offset in split_rng.distinct_indices(n_test, spec.n_images) {
        is_test[offset] = true;
    }

    let mut edges: Vec<Vec<usize>> = Vec::new();
    let mut truth_entries: Vec<(usize, Vec<usize>)> = Vec::with_capacity(n_test);

    // Ownership: each image picks a topic-biased owner; the edge for a
    // user collects the user with everything they own.
    let mut owned: Vec<Vec<usize>> = vec![Vec::new(); spec.n_users];
    for img_offset in 0..spec.n_images {
        let img = images.start + img_offset;
        let pool = users.in_cluster(image_topic[img_offset]);
        let owner = if !pool.is_empty() && owner_rng.uniform() < spec.p_in {
            pool[owner_rng.index(pool.len())]
        } else {
            users.start + owner_rng.index(spec.n_users)
        };
        owned[owner - users.start].push(img);
    }

    // Tagging: every image settles on one subtopic of its cluster and
    // samples the tags it observes from that topic span. Test images
    // record part of their topic picks as truth, and those picks simply
    // never reach the observer lists; everything else (their remaining
    // context tags, all tags of training images, and noise picks
    // everywhere) does. Because truth and kept context come from the
    // same topic, the kept tags point straight at where the truth
    // lives.
    let mut observers: Vec<Vec<usize>> = vec![Vec::new(); spec.n_tags];
    for img_offset in 0..spec.n_images {
        let img = images.start + img_offset;
        let c = images.cluster_of(img, k);
        let in_pool = tags.in_cluster(image_topic[img_offset]);
        let mut kept_in = sample_members(in_pool, spec.in_candidate_cap, spec.p_in, &mut tag_rng);
        if kept_in.is_empty() {
            // Every image must have something to recover or to train on.
            kept_in.push(in_pool[tag_rng.index(in_pool.len())]);
        }
        let kept_out = sample_members(
            &tags_outside[c],
            spec.out_candidate_cap,
            spec.p_out,
            &mut tag_rng,
        );
        let observed = if is_test[img_offset] {
            let n_hold = ((kept_in.len() as f64 * spec.holdout_fraction).round() as usize)
                .clamp(1, kept_in.len());
            let truth = kept_in.split_off(kept_in.len() - n_hold);
            truth_entries.push((img, truth));
            kept_in // the context tags that stay observable
        } else {
            kept_in
        };
        for &t in observed.iter().chain(kept_out.iter()) {
            observers[t - tag_start].push(img);
        }
    }

    // Hub tags: popular with images from every cluster, never ground
    // truth. Their edges grow fat, so they spread mass thinly.
    for hub_offset in n_regular..spec.n_tags {
        for img_offset in 0..spec.n_images {
            if hub_rng.uniform() < spec.hub_observe {
                observers[hub_offset].push(images.start + img_offset);
            }
        }
    }

    // Emit ownership edges for owning users, then one edge per tag. A
    // tag nobody observes is anchored to a training image from its own
    // cluster, so every planted tag stays reachable without handing a
    // test image back a direct incidence on a held-out tag.
    for (offset, imgs) in owned.iter().enumerate() {
        if !imgs.is_empty() {
            let mut edge = imgs.clone();
            edge.push(users.start + offset);
            edges.push(edge);
        }
    }
    for (offset, imgs) in observers.iter_mut().enumerate() {
        let t = tag_start + offset;
        if imgs.is_empty() {
            let c = if offset < n_regular { cluster_of_tag(t) } else { fixup_rng.index(k) };
            imgs.push(train_image_anchor(c, &images, &is_test, spec, &users, &mut fixup_rng));
        }
        let mut edge = imgs.clone();
        edge.push(t);
        edges.push(edge);
    }

    // Group membership: users pick groups, each group becomes one edge.
    // A kept membership defects to a uniformly random group with
    // probability `context_noise` — social context mixes clusters far
    // more than tagging does.
    let mut group_members: Vec<Vec<usize>> = vec![Vec::new(); spec.n_groups];
    let mut geo_members: Vec<Vec<usize>> = vec![Vec::new(); spec.n_geo];
    for user_offset in 0..spec.n_users {
        let u = users.start + user_offset;
        let c = cluster_of_user(u);
        for &g in sample_members(groups.in_cluster(c), spec.in_candidate_cap, spec.p_in, &mut group_rng)
            .iter()
        {
            let target = if group_rng.uniform() < spec.context_noise {
                groups.start + group_rng.index(spec.n_groups)
            } else {
                g
            };
            group_members[target - groups.start].push(u);
        }
        let outside: Vec<usize> = (groups.start..groups.start + spec.n_groups)
            .filter(|&g| groups.cluster_of(g, k) != c)
            .collect();
        for &g in sample_members(&outside, spec.out_candidate_cap, spec.p_out, &mut group_rng).iter()
        {
            group_members[g - groups.start].push(u);
        }
        for &loc in sample_members(geo.in_cluster(c), spec.in_candidate_cap, spec.p_in, &mut geo_rng)
            .iter()
        {
            let target = if geo_rng.uniform() < spec.context_noise {
                geo.start + geo_rng.index(spec.n_geo)
            } else {
                loc
            };
            geo_members[target - geo.start].push(u);
        }
        let outside: Vec<usize> = (geo.start..geo.start + spec.n_geo)
            .filter(|&loc| geo.cluster_of(loc, k) != c)
            .collect();
        for &loc in sample_members(&outside, spec.out_candidate_cap, spec.p_out, &mut geo_rng).iter()
        {
            geo_members[loc - geo.start].push(u);
        }
    }
    // Defections can land a user in the same edge twice; member lists
    // grow in ascending user order, so adjacent dedup restores 0/1
    // incidence.
    for (offset, members) in group_members.iter_mut().enumerate() {
        members.dedup();
        if !members.is_empty() {
            let mut edge = vec![groups.start + offset];
            edge.extend_from_slice(members);
            edges.push(edge);
        }
    }
    for (offset, members) in geo_members.iter_mut().enumerate() {
        members.dedup();
        if !members.is_empty() {
            let mut edge = vec![geo.start + offset];
            edge.extend_from_slice(members);
            edges.push(edge);
        }
    }

    // Stray relations: small edges over uniformly random context-layer
    // vertices (users, groups, geo contexts), the spurious social
    // co-occurrences real corpora carry — one-off contacts, drive-by
    // group joins, mislabeled venues. Images and tags are excluded: an
    // image's incidences are its curated records (ownership, tagging)
    // and tag incidence is labeling evidence with its own noise knob in
    // `p_out`. A stray touching either side would act as a random wire
    // handing rank mass between a query image and arbitrary tags,
    // drowning the planted structure in artifacts no per-edge weighting
    // could undo; confined to the context layer, strays blur the social
    // background without ever wiring queries to answers.
    // Arity stays at four or more: a two-member random edge would act
    // as a dedicated wire between two vertices, which is exactly the
    // accidental-pair geometry entity-grouped edges exist to avoid.
    let total = segments.dim();
    let (ctx_lo, _) = segments.range(VertexType::User).expect("user span exists");
    let (tag_lo, _) = segments.range(VertexType::Tag).expect("tag span exists");
    let n_context = tag_lo - ctx_lo;
    let mut stray_rng = root.clone().fork(7);
    let n_stray = (spec.stray_factor * edges.len() as f64).round() as usize;
    for _ in 0..n_stray {
        let arity = 4 + stray_rng.index(4);
        let mut members: Vec<usize> = stray_rng
            .distinct_indices(arity, n_context)
            .into_iter()
            .map(|v| v + ctx_lo)
            .collect();
        members.sort_unstable();
        edges.push(members);
    }

    // Coverage fixups: tie any untouched vertex to a cluster-mate so no
    // degree is zero.
    let mut covered = vec![false; total];
    for edge in &edges {
        for &v in edge {
            covered[v] = true;
        }
    }
    for v in 0..total {
        if covered[v] {
            continue;
        }
        let partner = match segments.type_of(v).expect("segments tile the space") {
            // Images and tags anchor to each other; users, groups, and
            // geo contexts anchor to users/groups.
            VertexType::Image => {
                let topic = image_topic[v - images.start];
                pick_anchor(users.in_cluster(topic), users.start, spec.n_users, &mut fixup_rng)
            }
            VertexType::User => {
                let c = cluster_of_user(v);
                pick_anchor(groups.in_cluster(c), groups.start, spec.n_groups, &mut fixup_rng)
            }
            VertexType::Group => {
                // Any user from the group's cluster; user pools are
                // topic-grained, so draw the subtopic first.
                let c = groups.cluster_of(v, k);
                let topic = c * spec.subtopics + fixup_rng.index(spec.subtopics);
                pick_anchor(users.in_cluster(topic), users.start, spec.n_users, &mut fixup_rng)
            }
            VertexType::Geo => {
                let c = geo.cluster_of(v, k);
                let topic = c * spec.subtopics + fixup_rng.index(spec.subtopics);
                pick_anchor(users.in_cluster(topic), users.start, spec.n_users, &mut fixup_rng)
            }
            VertexType::Tag => {
                // Anchor to a *training* image so a tag held out by every
                // test image that kept it never gains a direct edge back.
                let c = if v - tag_start < n_regular {
                    cluster_of_tag(v)
                } else {
                    fixup_rng.index(k)
                };
                train_image_anchor(c, &images, &is_test, spec, &users, &mut fixup_rng)
            }
        };
        edges.push(vec![v.min(partner), v.max(partner)]);
        covered[v] = true;
    }

    let hypergraph = HypergraphModel::from_edges(total, &edges)?;
    let truth = GroundTruth::new(truth_entries)?;
    Dataset::new(segments, hypergraph, truth)
}

fn pick_anchor(
    cluster_pool: &[usize],
    span_start: usize,
    span_len: usize,
    rng: &mut RngStream,
) -> usize {
    if !cluster_pool.is_empty() {
        cluster_pool[rng.index(cluster_pool.len())]
    } else {
        span_start + rng.index(span_len)
    }
}

/// A training image from `cluster`, falling back to any training image
/// and finally to a random user if the whole corpus is test images.
fn train_image_anchor(
    cluster: usize,
    images: &ClusteredSpan,
    is_test: &[bool],
    spec: &SynthSpec,
    users: &ClusteredSpan,
    rng: &mut RngStream,
) -> usize {
    let train_pool: Vec<usize> = images
        .in_cluster(cluster)
        .iter()
        .copied()
        .filter(|&img| !is_test[img - images.start])
        .collect();
    if !train_pool.is_empty() {
        return train_pool[rng.index(train_pool.len())];
    }
    let all_train: Vec<usize> = (0..is_test.len())
        .filter(|&o| !is_test[o])
        .map(|o| images.start + o)
        .collect();
    pick_anchor(&all_train, users.start, spec.n_users, rng)
}
