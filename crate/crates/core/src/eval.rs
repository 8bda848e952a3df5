//! Segment-based evaluation for sound event detection.
//!
//! Timelines are cut into fixed-length segments; a class is active in a
//! segment when any of its events overlaps it by a strictly positive
//! amount. Reference and estimated activity grids are then compared
//! per (class, segment) cell, which makes every metric independent of exact
//! event boundaries beyond the segment grid. Alongside precision/recall/F1
//! the module computes the substitution/deletion/insertion error rate and a
//! seeded bootstrap over clips for uncertainty estimates.

use std::collections::BTreeMap;
use std::ops::Range;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::pcen::MultiRateStack;

/// Default evaluation segment length, seconds.
pub const DEFAULT_SEGMENT_LENGTH: f64 = 1.0;

// ===== events =====

/// One labeled sound event on a clip's timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    onset: f64,
    offset: f64,
    label: String,
}

impl Event {
    /// Requires `0 <= onset < offset` and finite times.
    pub fn new(onset: f64, offset: f64, label: impl Into<String>) -> Result<Self> {
        if !onset.is_finite() || !offset.is_finite() || !(0.0 <= onset && onset < offset) {
            return Err(CoreError::InvalidParam(format!(
                "event times must satisfy 0 <= onset < offset, got {onset}..{offset}"
            )));
        }
        Ok(Self {
            onset,
            offset,
            label: label.into(),
        })
    }

    pub fn onset(&self) -> f64 {
        self.onset
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// The set of legal class names, held in sorted order so class indices are
/// canonical regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    labels: Vec<String>,
}

impl Vocabulary {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        labels.sort();
        labels.dedup();
        if labels.is_empty() {
            return Err(CoreError::EmptyInput("vocabulary has no classes".into()));
        }
        Ok(Self { labels })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }
}

/// All events of one clip, with the clip duration and the class vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct EventList {
    events: Vec<Event>,
    duration: f64,
    vocabulary: Vocabulary,
}

impl EventList {
    /// Requires a positive finite duration, every offset within it, and
    /// every label in the vocabulary.
    pub fn new(events: Vec<Event>, duration: f64, vocabulary: Vocabulary) -> Result<Self> {
        if !(duration > 0.0) || !duration.is_finite() {
            return Err(CoreError::InvalidParam(format!(
                "duration must be finite and > 0, got {duration}"
            )));
        }
        for e in &events {
            if e.offset > duration {
                return Err(CoreError::InvalidParam(format!(
                    "event {}..{} extends past clip duration {duration}",
                    e.onset, e.offset
                )));
            }
            if vocabulary.index_of(&e.label).is_none() {
                return Err(CoreError::InvalidParam(format!(
                    "label {:?} is not in the vocabulary",
                    e.label
                )));
            }
        }
        Ok(Self {
            events,
            duration,
            vocabulary,
        })
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }
}

// ===== segmentization =====

/// Binary class-by-segment activity grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentActivity {
    active: Array2<bool>,
    vocabulary: Vocabulary,
    segment_length: f64,
}

impl SegmentActivity {
    /// `[n_classes, n_segments]` grid.
    pub fn grid(&self) -> &Array2<bool> {
        &self.active
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn segment_length(&self) -> f64 {
        self.segment_length
    }

    pub fn n_segments(&self) -> usize {
        self.active.ncols()
    }
}

/// Cuts a clip's timeline into `ceil(duration / segment_length)` segments
/// and marks cell `(c, k)` when any event of class `c` overlaps segment
/// `[k L, (k+1) L)` by a strictly positive amount. Touching a boundary with
/// zero overlap does not activate a segment.
pub fn segmentize(events: &EventList, segment_length: f64) -> Result<SegmentActivity> {
    if !(segment_length > 0.0) || !segment_length.is_finite() {
        return Err(CoreError::InvalidParam(format!(
            "segment_length must be finite and > 0, got {segment_length}"
        )));
    }
    let n_segments = (events.duration / segment_length).ceil().max(1.0) as usize;
    let vocabulary = events.vocabulary.clone();
    let mut active = Array2::from_elem((vocabulary.len(), n_segments), false);
    for e in &events.events {
        let class = vocabulary
            .index_of(&e.label)
            .expect("validated at construction");
        // Only segments the event can overlap.
        let first = (e.onset / segment_length).floor().max(0.0) as usize;
        let last = ((e.offset / segment_length).ceil() as usize).min(n_segments);
        for k in first..last {
            let seg_start = k as f64 * segment_length;
            let seg_end = seg_start + segment_length;
            if e.offset.min(seg_end) - e.onset.max(seg_start) > 0.0 {
                active[(class, k)] = true;
            }
        }
    }
    Ok(SegmentActivity {
        active,
        vocabulary,
        segment_length,
    })
}

// ===== counting =====

/// Per-class true/false positives and false negatives over segments.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClassCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl ClassCounts {
    /// Reference-active segment count for this class.
    pub fn support(&self) -> usize {
        self.true_positives + self.false_negatives
    }
}

/// Segment-comparison tallies for one clip (or a pool of clips): per-class
/// counts plus the per-segment substitution/deletion/insertion sums that
/// feed the error rate.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentCounts {
    vocabulary: Vocabulary,
    segment_length: f64,
    per_class: Vec<ClassCounts>,
    substitutions: usize,
    deletions: usize,
    insertions: usize,
    /// Total reference-active (class, segment) cells.
    n_ref_active: usize,
}

impl SegmentCounts {
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn segment_length(&self) -> f64 {
        self.segment_length
    }

    pub fn class(&self, label: &str) -> Option<&ClassCounts> {
        self.vocabulary.index_of(label).map(|i| &self.per_class[i])
    }

    pub fn per_class(&self) -> &[ClassCounts] {
        &self.per_class
    }

    pub fn n_ref_active(&self) -> usize {
        self.n_ref_active
    }

    /// Accumulates another clip's tallies into this one. Vocabularies and
    /// segment lengths must match.
    pub fn merge(&mut self, other: &SegmentCounts) -> Result<()> {
        if self.vocabulary != other.vocabulary {
            return Err(CoreError::EvalMismatch(
                "cannot merge counts over different vocabularies".into(),
            ));
        }
        if self.segment_length != other.segment_length {
            return Err(CoreError::EvalMismatch(format!(
                "cannot merge counts with segment lengths {} and {}",
                self.segment_length, other.segment_length
            )));
        }
        for (a, b) in self.per_class.iter_mut().zip(&other.per_class) {
            a.true_positives += b.true_positives;
            a.false_positives += b.false_positives;
            a.false_negatives += b.false_negatives;
        }
        self.substitutions += other.substitutions;
        self.deletions += other.deletions;
        self.insertions += other.insertions;
        self.n_ref_active += other.n_ref_active;
        Ok(())
    }
}

/// Compares reference and estimated event lists on a shared segment grid.
/// The lists must agree on vocabulary and duration.
pub fn segment_counts(
    reference: &EventList,
    estimate: &EventList,
    segment_length: f64,
) -> Result<SegmentCounts> {
    if reference.vocabulary != estimate.vocabulary {
        return Err(CoreError::EvalMismatch(
            "reference and estimate vocabularies differ".into(),
        ));
    }
    if (reference.duration - estimate.duration).abs() > 1e-9 {
        return Err(CoreError::EvalMismatch(format!(
            "reference duration {} != estimate duration {}",
            reference.duration, estimate.duration
        )));
    }
    let ref_act = segmentize(reference, segment_length)?;
    let est_act = segmentize(estimate, segment_length)?;
    counts_from_grids(&ref_act, &est_act)
}

/// Tallies counts from two aligned activity grids.
pub fn counts_from_grids(
    reference: &SegmentActivity,
    estimate: &SegmentActivity,
) -> Result<SegmentCounts> {
    if reference.vocabulary != estimate.vocabulary {
        return Err(CoreError::EvalMismatch(
            "activity grids have different vocabularies".into(),
        ));
    }
    if reference.active.dim() != estimate.active.dim() {
        return Err(CoreError::EvalMismatch(format!(
            "activity grids have shapes {:?} and {:?}",
            reference.active.dim(),
            estimate.active.dim()
        )));
    }
    let (n_classes, n_segments) = reference.active.dim();
    let mut per_class = vec![ClassCounts::default(); n_classes];
    let (mut subs, mut dels, mut ins, mut n_ref) = (0, 0, 0, 0);

    for k in 0..n_segments {
        let (mut seg_fn, mut seg_fp, mut seg_ref) = (0usize, 0usize, 0usize);
        for c in 0..n_classes {
            let r = reference.active[(c, k)];
            let e = estimate.active[(c, k)];
            if r {
                seg_ref += 1;
            }
            match (r, e) {
                (true, true) => per_class[c].true_positives += 1,
                (true, false) => {
                    per_class[c].false_negatives += 1;
                    seg_fn += 1;
                }
                (false, true) => {
                    per_class[c].false_positives += 1;
                    seg_fp += 1;
                }
                (false, false) => {}
            }
        }
        subs += seg_fn.min(seg_fp);
        dels += seg_fn.saturating_sub(seg_fp);
        ins += seg_fp.saturating_sub(seg_fn);
        n_ref += seg_ref;
    }

    Ok(SegmentCounts {
        vocabulary: reference.vocabulary.clone(),
        segment_length: reference.segment_length,
        per_class,
        substitutions: subs,
        deletions: dels,
        insertions: ins,
        n_ref_active: n_ref,
    })
}

// ===== metrics =====

/// Precision/recall/F1 for one class, with its reference support.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub label: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Reference-active segments for this class.
    pub support: usize,
}

/// Micro-averaged rates over counts pooled across all classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MicroMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Full metric bundle for one counts table.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    pub per_class: Vec<ClassMetrics>,
    pub micro: MicroMetrics,
    /// `(S + D + I) / N`; `None` when the reference has no active segments,
    /// which leaves the rate undefined.
    pub error_rate: Option<f64>,
    pub segment_length: f64,
}

fn rate(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    }
}

/// Turns tallies into per-class and micro-averaged precision/recall/F1 and
/// the substitution/deletion/insertion error rate. Zero denominators yield
/// zero rates rather than errors.
pub fn compute_metrics(counts: &SegmentCounts) -> MetricsReport {
    let per_class: Vec<ClassMetrics> = counts
        .vocabulary
        .labels()
        .iter()
        .zip(&counts.per_class)
        .map(|(label, c)| {
            let precision = rate(c.true_positives, c.true_positives + c.false_positives);
            let recall = rate(c.true_positives, c.true_positives + c.false_negatives);
            ClassMetrics {
                label: label.clone(),
                precision,
                recall,
                f1: f1_score(precision, recall),
                support: c.support(),
            }
        })
        .collect();

    let (mut tp, mut fp, mut fun) = (0usize, 0usize, 0usize);
    for c in &counts.per_class {
        tp += c.true_positives;
        fp += c.false_positives;
        fun += c.false_negatives;
    }
    let precision = rate(tp, tp + fp);
    let recall = rate(tp, tp + fun);
    let micro = MicroMetrics {
        precision,
        recall,
        f1: f1_score(precision, recall),
    };

    let error_rate = if counts.n_ref_active == 0 {
        None
    } else {
        Some(
            (counts.substitutions + counts.deletions + counts.insertions) as f64
                / counts.n_ref_active as f64,
        )
    };

    MetricsReport {
        per_class,
        micro,
        error_rate,
        segment_length: counts.segment_length,
    }
}

// ===== bootstrap =====

/// Resamples clips with replacement `n_reps` times, `n_samples` clips per
/// replicate, pooling counts within each replicate. Fully deterministic per
/// seed; each replicate draws from its own derived generator, so replicates
/// could be computed in any order or in parallel.
pub fn bootstrap_evaluate(
    per_clip: &[SegmentCounts],
    n_samples: usize,
    n_reps: usize,
    seed: u64,
) -> Result<Vec<MetricsReport>> {
    if per_clip.is_empty() {
        return Err(CoreError::EmptyInput("bootstrap needs at least one clip".into()));
    }
    if n_samples == 0 || n_reps == 0 {
        return Err(CoreError::InvalidParam(
            "n_samples and n_reps must be >= 1".into(),
        ));
    }

    let mut master = ChaCha8Rng::seed_from_u64(seed);
    let rep_seeds: Vec<u64> = (0..n_reps).map(|_| master.gen()).collect();

    rep_seeds
        .into_iter()
        .map(|rep_seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(rep_seed);
            let mut pooled: Option<SegmentCounts> = None;
            for _ in 0..n_samples {
                let pick = &per_clip[rng.gen_range(0..per_clip.len())];
                match pooled.as_mut() {
                    None => pooled = Some(pick.clone()),
                    Some(p) => p.merge(pick)?,
                }
            }
            Ok(compute_metrics(&pooled.expect("n_samples >= 1")))
        })
        .collect()
}

// ===== threshold detector =====

/// Feature input for the detector: either a multi-rate stack or a bare
/// band-by-frame matrix with its frame rate.
pub enum FeatureView<'a> {
    Stack(&'a MultiRateStack),
    Matrix {
        values: &'a Array2<f64>,
        frame_rate: f64,
    },
}

/// A fixed-threshold detector: class `c` is active in frame `t` when the
/// mean feature value over its band range (and over all rate layers, for a
/// stack) exceeds `threshold`. Contiguous active frames become one event
/// with onset/offset on frame boundaries.
///
/// This is deliberately simple: it exists so the featurize -> evaluate path
/// can run end to end without a trained model.
pub fn threshold_detector(
    features: FeatureView<'_>,
    vocabulary: &Vocabulary,
    band_ranges: &BTreeMap<String, Range<usize>>,
    threshold: f64,
) -> Result<EventList> {
    if !threshold.is_finite() {
        return Err(CoreError::InvalidParam("threshold must be finite".into()));
    }
    let (n_mels, n_frames, frame_rate) = match &features {
        FeatureView::Stack(stack) => (stack.n_mels(), stack.n_frames(), stack.frame_rate()),
        FeatureView::Matrix { values, frame_rate } => {
            if !(frame_rate > &0.0) {
                return Err(CoreError::InvalidParam("frame_rate must be > 0".into()));
            }
            (values.nrows(), values.ncols(), *frame_rate)
        }
    };
    if n_frames == 0 {
        return Err(CoreError::EmptyInput("feature matrix has no frames".into()));
    }
    for label in vocabulary.labels() {
        let range = band_ranges.get(label).ok_or_else(|| {
            CoreError::InvalidParam(format!("no band range for class {label:?}"))
        })?;
        if range.start >= range.end || range.end > n_mels {
            return Err(CoreError::InvalidParam(format!(
                "band range {}..{} for class {label:?} is invalid for {n_mels} bands",
                range.start, range.end
            )));
        }
    }
    for label in band_ranges.keys() {
        if vocabulary.index_of(label).is_none() {
            return Err(CoreError::InvalidParam(format!(
                "band range given for unknown class {label:?}"
            )));
        }
    }

    let mean_score = |range: &Range<usize>, t: usize| -> f64 {
        match &features {
            FeatureView::Stack(stack) => {
                let values = stack.values();
                let n_rates = stack.n_rates();
                let mut acc = 0.0;
                for m in range.clone() {
                    for r in 0..n_rates {
                        acc += values[(m, t, r)];
                    }
                }
                acc / (range.len() * n_rates) as f64
            }
            FeatureView::Matrix { values, .. } => {
                let mut acc = 0.0;
                for m in range.clone() {
                    acc += values[(m, t)];
                }
                acc / range.len() as f64
            }
        }
    };

    let mut events = Vec::new();
    for label in vocabulary.labels() {
        let range = &band_ranges[label];
        let mut run_start: Option<usize> = None;
        for t in 0..=n_frames {
            let active = t < n_frames && mean_score(range, t) > threshold;
            match (active, run_start) {
                (true, None) => run_start = Some(t),
                (false, Some(start)) => {
                    events.push(Event::new(
                        start as f64 / frame_rate,
                        t as f64 / frame_rate,
                        label.clone(),
                    )?);
                    run_start = None;
                }
                _ => {}
            }
        }
    }
    events.sort_by(|a, b| {
        a.onset
            .total_cmp(&b.onset)
            .then_with(|| a.label.cmp(&b.label))
    });

    let duration = n_frames as f64 / frame_rate;
    EventList::new(events, duration, vocabulary.clone())
}
