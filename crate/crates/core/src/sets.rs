//! Bit-vector subsets of `{0..n}` and the sum/difference kernels built on them.
//!
//! An [`IntSet`] stores one bit per element of its universe. Sumsets are
//! computed by shift-accumulate: every element of the smaller operand ORs a
//! shifted copy of the larger one into the result, which costs
//! `O(|smaller| * n / 64)` word operations.
//!
//! Signed differences use the identity `a - b + n = a + (n - b)`: the offset
//! image of `A - B` is the sumset of `A` with the reflection of `B`, and
//! `B - A` is its mirror image.

use std::fmt;

use crate::error::{Error, Result};

/// Largest universe size accepted from user input (`n <= 2^20`).
pub const MAX_UNIVERSE: usize = (1 << 20) + 1;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A subset of `{0, .., universe_size - 1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntSet {
    universe: usize,
    words: Vec<u64>,
}

impl IntSet {
    /// The empty set over `{0..universe_size-1}`.
    pub fn new(universe_size: usize) -> Self {
        IntSet {
            universe: universe_size,
            words: vec![0; words_for(universe_size)],
        }
    }

    /// The full interval `{0..universe_size-1}`.
    pub fn full(universe_size: usize) -> Self {
        let mut s = IntSet::new(universe_size);
        s.words.iter_mut().for_each(|w| *w = !0);
        s.trim();
        s
    }

    pub fn from_elements<I>(universe_size: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut s = IntSet::new(universe_size);
        for e in elements {
            if e >= universe_size {
                return Err(Error::usage(format!(
                    "element {e} outside universe [0, {}]",
                    universe_size as i64 - 1
                )));
            }
            s.insert(e);
        }
        Ok(s)
    }

    /// Builds a set from raw words; bits past the universe are cleared.
    pub fn from_words(universe_size: usize, mut words: Vec<u64>) -> Self {
        words.resize(words_for(universe_size), 0);
        let mut s = IntSet {
            universe: universe_size,
            words,
        };
        s.trim();
        s
    }

    /// Parses the comma-separated literal format, e.g. `"0,2,3,4,7"`.
    ///
    /// With `universe_size = None` the universe is `{0..max}`. Duplicates,
    /// negative numbers and stray whitespace inside a number are rejected.
    pub fn parse_literal(text: &str, universe_size: Option<usize>) -> Result<Self> {
        let elems = parse_elements(text)?;
        let max = elems.iter().copied().max();
        let universe = match (universe_size, max) {
            (Some(u), _) => u,
            (None, Some(m)) => m + 1,
            (None, None) => 1,
        };
        if universe > MAX_UNIVERSE {
            return Err(Error::usage(format!(
                "universe of {universe} elements exceeds the limit of {MAX_UNIVERSE}"
            )));
        }
        IntSet::from_elements(universe, elems)
    }

    /// Number of slots, i.e. `n + 1` for a subset of `{0..n}`.
    pub fn universe_size(&self) -> usize {
        self.universe
    }

    /// The largest admissible element `n`, or `None` for an empty universe.
    pub fn max_index(&self) -> Option<usize> {
        self.universe.checked_sub(1)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn insert(&mut self, e: usize) {
        assert!(e < self.universe, "element {e} outside universe");
        self.words[e / WORD] |= 1 << (e % WORD);
    }

    pub fn remove(&mut self, e: usize) {
        if e < self.universe {
            self.words[e / WORD] &= !(1 << (e % WORD));
        }
    }

    pub fn contains(&self, e: usize) -> bool {
        e < self.universe && self.words[e / WORD] >> (e % WORD) & 1 == 1
    }

    /// Cardinality (population count).
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn min_element(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn max_element(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    /// Elements in increasing order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// True iff every integer in `lo..=hi` is a member. Empty ranges are contained.
    pub fn contains_range(&self, lo: usize, hi: usize) -> bool {
        if lo > hi {
            return true;
        }
        if hi >= self.universe {
            return false;
        }
        let (lw, hw) = (lo / WORD, hi / WORD);
        for w in lw..=hw {
            let mut mask = !0u64;
            if w == lw {
                mask &= !0u64 << (lo % WORD);
            }
            if w == hw {
                mask &= !0u64 >> (WORD - 1 - hi % WORD);
            }
            if self.words[w] & mask != mask {
                return false;
            }
        }
        true
    }

    /// Number of members in `lo..=hi`.
    pub fn count_range(&self, lo: usize, hi: usize) -> usize {
        if lo > hi || lo >= self.universe {
            return 0;
        }
        let hi = hi.min(self.universe - 1);
        let (lw, hw) = (lo / WORD, hi / WORD);
        let mut total = 0;
        for w in lw..=hw {
            let mut mask = !0u64;
            if w == lw {
                mask &= !0u64 << (lo % WORD);
            }
            if w == hw {
                mask &= !0u64 >> (WORD - 1 - hi % WORD);
            }
            total += (self.words[w] & mask).count_ones() as usize;
        }
        total
    }

    /// `self ∩ [0, k]` as a set over `{0..k}`.
    pub fn clip(&self, k: usize) -> IntSet {
        let universe = k + 1;
        let mut words: Vec<u64> = self.words.iter().take(words_for(universe)).copied().collect();
        words.resize(words_for(universe), 0);
        IntSet::from_words(universe, words)
    }

    /// The same members viewed in a different universe. Fails if a member
    /// would fall outside it.
    pub fn rebase(&self, universe_size: usize) -> Result<IntSet> {
        if let Some(m) = self.max_element() {
            if m >= universe_size {
                return Err(Error::usage(format!(
                    "element {m} does not fit a universe of {universe_size}"
                )));
            }
        }
        let mut words = self.words.clone();
        words.resize(words_for(universe_size), 0);
        Ok(IntSet::from_words(universe_size, words))
    }

    pub fn union(&self, other: &IntSet) -> Result<IntSet> {
        self.zip_words(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &IntSet) -> Result<IntSet> {
        self.zip_words(other, |a, b| a & b)
    }

    /// `self ∖ other`.
    pub fn difference(&self, other: &IntSet) -> Result<IntSet> {
        self.zip_words(other, |a, b| a & !b)
    }

    /// Complement within the universe.
    pub fn complement(&self) -> IntSet {
        let mut s = IntSet {
            universe: self.universe,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    /// `n - A` within the set's own universe `{0..n}` (bit reversal).
    pub fn reflect(&self) -> IntSet {
        if self.universe == 0 {
            return self.clone();
        }
        let nw = self.words.len();
        let mut rev: Vec<u64> = self.words.iter().rev().map(|w| w.reverse_bits()).collect();
        // the reversed words are aligned to nw*64 bits; drop the padding
        let pad = nw * WORD - self.universe;
        if pad > 0 {
            shift_down(&mut rev, pad);
        }
        IntSet::from_words(self.universe, rev)
    }

    /// `n - A` for an explicit `n >= max(A)`; the result lives in `{0..n}`.
    pub fn reflect_in(&self, n: usize) -> Result<IntSet> {
        self.rebase(n + 1).map(|s| s.reflect())
    }

    fn zip_words(&self, other: &IntSet, f: impl Fn(u64, u64) -> u64) -> Result<IntSet> {
        check_universe(self, other)?;
        Ok(IntSet {
            universe: self.universe,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    fn trim(&mut self) {
        let rem = self.universe % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntSet[{}]{{{}}}", self.universe, self)
    }
}

/// The literal format: `0,2,3`; the empty set renders as an empty string.
impl fmt::Display for IntSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.iter() {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

fn parse_elements(text: &str) -> Result<Vec<usize>> {
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "{}" {
        return Ok(Vec::new());
    }
    let body = trimmed
        .strip_prefix('{')
        .and_then(|t| t.strip_suffix('}'))
        .unwrap_or(trimmed);
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for tok in body.split(',') {
        let tok = tok.trim();
        let v: usize = tok
            .parse()
            .map_err(|_| Error::usage(format!("bad set element {tok:?} in {text:?}")))?;
        if !seen.insert(v) {
            return Err(Error::usage(format!("duplicate element {v} in {text:?}")));
        }
        out.push(v);
    }
    Ok(out)
}

fn check_universe(a: &IntSet, b: &IntSet) -> Result<()> {
    if a.universe != b.universe {
        return Err(Error::UniverseMismatch {
            left: a.universe,
            right: b.universe,
        });
    }
    Ok(())
}

/// Shifts a little-endian bit vector towards bit 0 by `shift` bits.
fn shift_down(words: &mut [u64], shift: usize) {
    let (ws, bs) = (shift / WORD, shift % WORD);
    let len = words.len();
    for i in 0..len {
        let src = i + ws;
        let lo = if src < len { words[src] } else { 0 };
        let hi = if src + 1 < len { words[src + 1] } else { 0 };
        words[i] = if bs == 0 { lo } else { (lo >> bs) | (hi << (WORD - bs)) };
    }
}

/// `dst |= src << shift`, dropping bits past the end of `dst`.
#[inline]
fn or_shifted(dst: &mut [u64], src: &[u64], shift: usize) {
    let (ws, bs) = (shift / WORD, shift % WORD);
    if bs == 0 {
        for (d, &s) in dst[ws..].iter_mut().zip(src) {
            *d |= s;
        }
        return;
    }
    let dl = dst.len();
    for (i, &s) in src.iter().enumerate() {
        if s == 0 {
            continue;
        }
        let j = i + ws;
        if j < dl {
            dst[j] |= s << bs;
        }
        if j + 1 < dl {
            dst[j + 1] |= s >> (WORD - bs);
        }
    }
}

/// Shift-accumulate sumset of two sets over the same universe `{0..n}`;
/// the result lives in `{0..2n}`.
fn sumset_unchecked(a: &IntSet, b: &IntSet) -> IntSet {
    let out_universe = (2 * a.universe).saturating_sub(1);
    let mut out = vec![0u64; words_for(out_universe)];
    let (small, large) = if a.count() <= b.count() { (a, b) } else { (b, a) };
    if !large.is_empty() {
        for e in small.iter() {
            or_shifted(&mut out, &large.words, e);
        }
    }
    IntSet::from_words(out_universe, out)
}

/// `A + B = {a + b}` over `{0..2n}`.
pub fn sumset(a: &IntSet, b: &IntSet) -> Result<IntSet> {
    check_universe(a, b)?;
    Ok(sumset_unchecked(a, b))
}

/// A subset of `[-n, n]` stored at offset `d + n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SignedIntSet {
    n: usize,
    bits: IntSet,
}

impl SignedIntSet {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn contains(&self, d: i64) -> bool {
        let idx = d + self.n as i64;
        idx >= 0 && self.bits.contains(idx as usize)
    }

    pub fn count(&self) -> usize {
        self.bits.count()
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        let n = self.n as i64;
        self.bits.iter().map(move |i| i as i64 - n)
    }

    pub fn offset_bits(&self) -> &IntSet {
        &self.bits
    }

    /// Element-wise negation.
    pub fn negate(&self) -> SignedIntSet {
        SignedIntSet {
            n: self.n,
            bits: self.bits.reflect(),
        }
    }

    /// Members with absolute value in `lo..=hi` (both signs).
    pub fn count_abs_range(&self, lo: usize, hi: usize) -> usize {
        let n = self.n;
        if lo > hi || lo > n {
            return 0;
        }
        let hi = hi.min(n);
        let pos = self.bits.count_range(n + lo, n + hi);
        let neg = self.bits.count_range(n - hi, n - lo);
        if lo == 0 {
            pos + neg - usize::from(self.contains(0))
        } else {
            pos + neg
        }
    }
}

/// The offset image of `A - B` (index `a - b + n`) over `{0..2n}`.
fn one_sided_difference(a: &IntSet, b: &IntSet) -> IntSet {
    sumset_unchecked(a, &b.reflect())
}

/// `A - B = {a - b}` (not symmetrized).
pub fn difference_set(a: &IntSet, b: &IntSet) -> Result<SignedIntSet> {
    check_universe(a, b)?;
    Ok(SignedIntSet {
        n: a.universe.saturating_sub(1),
        bits: one_sided_difference(a, b),
    })
}

/// `±(A - B) = (A - B) ∪ (B - A)`.
pub fn signed_difference_set(a: &IntSet, b: &IntSet) -> Result<SignedIntSet> {
    check_universe(a, b)?;
    let one = one_sided_difference(a, b);
    let sym = one.union(&one.reflect()).expect("same universe");
    Ok(SignedIntSet {
        n: a.universe.saturating_sub(1),
        bits: sym,
    })
}

/// `𝒮 = |A+B|`, `𝒟 = |±(A−B)|` and their complements in the `2n+1` slots.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SumDiffStats {
    pub sum_size: usize,
    pub diff_size: usize,
    pub sum_complement: usize,
    pub diff_complement: usize,
}

impl SumDiffStats {
    pub fn of(a: &IntSet, b: &IntSet) -> Result<Self> {
        check_universe(a, b)?;
        Ok(Self::of_unchecked(a, b))
    }

    pub(crate) fn of_unchecked(a: &IntSet, b: &IntSet) -> Self {
        let slots = (2 * a.universe).saturating_sub(1);
        let sum_size = sumset_unchecked(a, b).count();
        let one = one_sided_difference(a, b);
        let rev = one.reflect();
        let diff_size = one
            .words
            .iter()
            .zip(&rev.words)
            .map(|(x, y)| (x | y).count_ones() as usize)
            .sum();
        SumDiffStats {
            sum_size,
            diff_size,
            sum_complement: slots - sum_size,
            diff_complement: slots - diff_size,
        }
    }

    pub fn is_mstd(&self) -> bool {
        self.sum_size > self.diff_size
    }
}

/// `|A + B| > |±(A − B)|`.
pub fn is_mstd_pair(a: &IntSet, b: &IntSet) -> Result<bool> {
    SumDiffStats::of(a, b).map(|s| s.is_mstd())
}

/// Representation counts `|X_s|` and `|Y_d|` over ordered pairs in `A × B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multiplicities {
    n: usize,
    sums: Vec<u64>,
    diffs: Vec<u64>,
}

impl Multiplicities {
    /// `|X_s| = #{(a, b) ∈ A×B : a + b = s}`.
    pub fn sum(&self, s: usize) -> u64 {
        self.sums.get(s).copied().unwrap_or(0)
    }

    /// `|Y_d| = #{(a, b) ∈ A×B : a − b = d}`.
    pub fn diff(&self, d: i64) -> u64 {
        let idx = d + self.n as i64;
        if idx < 0 {
            return 0;
        }
        self.diffs.get(idx as usize).copied().unwrap_or(0)
    }

    /// `(s, |X_s|)` for every `s` with a representation.
    pub fn sum_entries(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.sums.iter().enumerate().filter(|(_, &c)| c > 0).map(|(s, &c)| (s, c))
    }

    /// `(d, |Y_d|)` for every `d` with a representation.
    pub fn diff_entries(&self) -> impl Iterator<Item = (i64, u64)> + '_ {
        let n = self.n as i64;
        self.diffs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(move |(i, &c)| (i as i64 - n, c))
    }

    pub fn max_sum_multiplicity(&self) -> u64 {
        self.sums.iter().copied().max().unwrap_or(0)
    }
}

pub fn representation_multiplicities(a: &IntSet, b: &IntSet) -> Result<Multiplicities> {
    check_universe(a, b)?;
    let n = a.universe.saturating_sub(1);
    let slots = (2 * a.universe).saturating_sub(1);
    let mut sums = vec![0u64; slots];
    let mut diffs = vec![0u64; slots];
    let bs: Vec<usize> = b.iter().collect();
    for x in a.iter() {
        for &y in &bs {
            sums[x + y] += 1;
            diffs[x + n - y] += 1;
        }
    }
    Ok(Multiplicities { n, sums, diffs })
}

/// `{αa + β : a ∈ A}` translated so its minimum is 0.
///
/// The universe of the result is `{0..max-min}`; it must stay within
/// [`MAX_UNIVERSE`].
pub fn affine_image(a: &IntSet, alpha: i64, beta: i64) -> Result<IntSet> {
    let (img, _) = affine_images(&[a], alpha, beta)?;
    Ok(img.into_iter().next().expect("one input"))
}

/// Applies one affine map to both sets and re-bases them jointly, so the
/// relative position of `A` and `B` is preserved.
pub fn affine_image_pair(a: &IntSet, b: &IntSet, alpha: i64, beta: i64) -> Result<(IntSet, IntSet)> {
    let (mut imgs, _) = affine_images(&[a, b], alpha, beta)?;
    let b_img = imgs.pop().expect("two inputs");
    let a_img = imgs.pop().expect("two inputs");
    Ok((a_img, b_img))
}

/// Shared implementation; also returns the subtracted minimum.
fn affine_images(sets: &[&IntSet], alpha: i64, beta: i64) -> Result<(Vec<IntSet>, i128)> {
    if alpha == 0 {
        return Err(Error::usage("affine map needs a nonzero multiplier"));
    }
    let mapped: Vec<Vec<i128>> = sets
        .iter()
        .map(|s| s.iter().map(|x| alpha as i128 * x as i128 + beta as i128).collect())
        .collect();
    let all = mapped.iter().flatten();
    let (lo, hi) = match (all.clone().min(), all.max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Ok((sets.iter().map(|_| IntSet::new(1)).collect(), 0)),
    };
    let span = hi - lo;
    if span + 1 > MAX_UNIVERSE as i128 {
        return Err(Error::usage(format!(
            "affine image spans {} slots, above the limit of {MAX_UNIVERSE}",
            span + 1
        )));
    }
    let universe = span as usize + 1;
    let out = mapped
        .into_iter()
        .map(|m| IntSet::from_elements(universe, m.into_iter().map(|v| (v - lo) as usize)))
        .collect::<Result<Vec<_>>>()?;
    Ok((out, lo))
}

/// Reusable buffers for computing [`SumDiffStats`] on raw words without
/// allocating per call. Used by the Monte-Carlo loops.
#[derive(Default)]
pub struct SumDiffKernel {
    sums: Vec<u64>,
    refl: Vec<u64>,
    diff: Vec<u64>,
    mirror: Vec<u64>,
}

impl SumDiffKernel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Statistics for two word vectors over a universe of `universe` slots.
    /// Bits past the universe must be clear.
    pub fn stats(&mut self, a: &[u64], b: &[u64], universe: usize) -> SumDiffStats {
        let slots = (2 * universe).saturating_sub(1);
        let sum_size = self.sum_into_buffer(a, b, universe);

        reverse_words(b, universe, &mut self.refl);
        sum_words(a, &self.refl, slots, &mut self.diff);
        reverse_words(&self.diff, slots, &mut self.mirror);
        let diff_size = self
            .diff
            .iter()
            .zip(&self.mirror)
            .map(|(x, y)| (x | y).count_ones() as usize)
            .sum();
        SumDiffStats {
            sum_size,
            diff_size,
            sum_complement: slots - sum_size,
            diff_complement: slots - diff_size,
        }
    }

    /// Computes `A + B` into the internal buffer and returns its size.
    pub fn sum_into_buffer(&mut self, a: &[u64], b: &[u64], universe: usize) -> usize {
        let slots = (2 * universe).saturating_sub(1);
        sum_words(a, b, slots, &mut self.sums);
        self.sums.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// The sumset from the last [`Self::sum_into_buffer`] or [`Self::stats`] call.
    pub fn last_sums(&self, universe: usize) -> IntSet {
        IntSet::from_words((2 * universe).saturating_sub(1), self.sums.clone())
    }

    /// Whether `lo..=hi` lies in the last computed sumset.
    pub fn last_sums_cover(&self, lo: usize, hi: usize) -> bool {
        words_cover(&self.sums, lo, hi)
    }
}

fn words_cover(words: &[u64], lo: usize, hi: usize) -> bool {
    if lo > hi {
        return true;
    }
    if hi / WORD >= words.len() {
        return false;
    }
    let (lw, hw) = (lo / WORD, hi / WORD);
    (lw..=hw).all(|w| {
        let mut mask = !0u64;
        if w == lw {
            mask &= !0u64 << (lo % WORD);
        }
        if w == hw {
            mask &= !0u64 >> (WORD - 1 - hi % WORD);
        }
        words[w] & mask == mask
    })
}

fn sum_words(a: &[u64], b: &[u64], out_bits: usize, out: &mut Vec<u64>) {
    out.clear();
    out.resize(words_for(out_bits), 0);
    let ca: u32 = a.iter().map(|w| w.count_ones()).sum();
    let cb: u32 = b.iter().map(|w| w.count_ones()).sum();
    let (small, large) = if ca <= cb { (a, b) } else { (b, a) };
    if ca == 0 || cb == 0 {
        return;
    }
    for (i, &w) in small.iter().enumerate() {
        let mut w = w;
        while w != 0 {
            let e = i * WORD + w.trailing_zeros() as usize;
            or_shifted(out, large, e);
            w &= w - 1;
        }
    }
    let rem = out_bits % WORD;
    if rem != 0 {
        if let Some(last) = out.last_mut() {
            *last &= (1u64 << rem) - 1;
        }
    }
}

fn reverse_words(src: &[u64], bits: usize, out: &mut Vec<u64>) {
    out.clear();
    out.extend(src.iter().rev().map(|w| w.reverse_bits()));
    let pad = src.len() * WORD - bits;
    if pad > 0 {
        shift_down(out, pad);
    }
}

/// Fixed-width kernels for universes of at most 32 elements, where a set,
/// its sumset and its offset difference set each fit in one `u64`.
pub mod small {
    /// Largest `n` (universe `{0..n}`) the single-word kernels support.
    pub const MAX_N: usize = 31;

    #[inline]
    pub fn sumset(a: u64, b: u64) -> u64 {
        let (mut small, large) = if a.count_ones() <= b.count_ones() { (a, b) } else { (b, a) };
        let mut acc = 0u64;
        while small != 0 {
            let i = small.trailing_zeros();
            acc |= large << i;
            small &= small - 1;
        }
        acc
    }

    /// Reverses the low `bits` bits of `x`.
    #[inline]
    pub fn reverse(x: u64, bits: u32) -> u64 {
        if bits == 0 {
            0
        } else {
            x.reverse_bits() >> (64 - bits)
        }
    }

    /// `(|A+B|, |±(A−B)|)` for masks over `{0..n}`.
    #[inline]
    pub fn sum_diff_sizes(a: u64, b: u64, n: usize) -> (u32, u32) {
        debug_assert!(n <= MAX_N);
        let sums = sumset(a, b);
        let width = (2 * n + 1) as u32;
        let one = sumset(a, reverse(b, n as u32 + 1));
        let diffs = one | reverse(one, width);
        (sums.count_ones(), diffs.count_ones())
    }

    #[inline]
    pub fn is_mstd(a: u64, b: u64, n: usize) -> bool {
        let (s, d) = sum_diff_sizes(a, b, n);
        s > d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn set(n: usize, xs: &[usize]) -> IntSet {
        IntSet::from_elements(n + 1, xs.iter().copied()).unwrap()
    }

    const CONWAY: [usize; 8] = [0, 2, 3, 4, 7, 11, 12, 14];

    fn naive_sums(a: &[usize], b: &[usize]) -> BTreeSet<usize> {
        a.iter().flat_map(|x| b.iter().map(move |y| x + y)).collect()
    }

    fn naive_signed_diffs(a: &[usize], b: &[usize]) -> BTreeSet<i64> {
        let mut out = BTreeSet::new();
        for &x in a {
            for &y in b {
                out.insert(x as i64 - y as i64);
                out.insert(y as i64 - x as i64);
            }
        }
        out
    }

    #[test]
    fn sumset_small_examples() {
        let a = set(3, &[0, 1]);
        let b = set(3, &[0, 2]);
        assert_eq!(sumset(&a, &b).unwrap().to_vec(), vec![0, 1, 2, 3]);
        let e = IntSet::new(4);
        assert!(sumset(&e, &b).unwrap().is_empty());
        assert!(sumset(&b, &e).unwrap().is_empty());
    }

    #[test]
    fn conway_set_sizes() {
        let c = set(14, &CONWAY);
        assert_eq!(naive_sums(&CONWAY, &CONWAY).len(), 26);
        assert_eq!(naive_signed_diffs(&CONWAY, &CONWAY).len(), 25);
        assert_eq!(sumset(&c, &c).unwrap().count(), 26);
        assert_eq!(signed_difference_set(&c, &c).unwrap().count(), 25);
        assert!(is_mstd_pair(&c, &c).unwrap());
    }

    #[test]
    fn signed_difference_examples() {
        let s = set(5, &[3]);
        assert_eq!(signed_difference_set(&s, &s).unwrap().iter().collect::<Vec<_>>(), vec![0]);
        let a = set(3, &[0, 1]);
        let b = set(3, &[0, 2]);
        let d = signed_difference_set(&a, &b).unwrap();
        assert_eq!(d.iter().collect::<Vec<_>>(), vec![-2, -1, 0, 1, 2]);
        assert_eq!(d.count(), 5);
    }

    #[test]
    fn minimal_pairs_are_mstd() {
        let a = set(7, &[0, 1, 4, 6, 7]);
        let b = set(7, &[2, 3, 5]);
        let st = SumDiffStats::of(&a, &b).unwrap();
        assert_eq!((st.sum_size, st.diff_size), (11, 10));
        assert!(!signed_difference_set(&a, &b).unwrap().contains(0));

        let a = set(6, &[0, 1, 4, 6]);
        let b = set(6, &[0, 2, 5, 6]);
        let st = SumDiffStats::of(&a, &b).unwrap();
        assert_eq!((st.sum_size, st.diff_size), (13, 11));
        let d = signed_difference_set(&a, &b).unwrap();
        assert!(!d.contains(3) && !d.contains(-3));
    }

    #[test]
    fn universe_mismatch_is_an_error() {
        let a = set(3, &[0]);
        let b = set(4, &[0]);
        assert!(matches!(sumset(&a, &b), Err(Error::UniverseMismatch { .. })));
        assert!(signed_difference_set(&a, &b).is_err());
        assert!(is_mstd_pair(&a, &b).is_err());
    }

    #[test]
    fn multiplicity_examples() {
        let a = set(1, &[0, 1]);
        let m = representation_multiplicities(&a, &a).unwrap();
        assert_eq!(m.sum(1), 2);
        assert_eq!(m.diff(0), 2);

        let a = set(7, &[0, 1, 4, 6, 7]);
        let b = set(7, &[2, 3, 5]);
        let m = representation_multiplicities(&a, &b).unwrap();
        let total_x: u64 = m.sum_entries().map(|(_, c)| c).sum();
        let total_y: u64 = m.diff_entries().map(|(_, c)| c).sum();
        assert_eq!(total_x, 15);
        assert_eq!(total_y, 15);
        let pairs_i: u64 = m.sum_entries().map(|(_, c)| c * (c - 1) / 2).sum();
        let pairs_j: u64 = m.diff_entries().map(|(_, c)| c * (c - 1) / 2).sum();
        // brute force over unordered pairs of ordered pairs
        let prod: Vec<(i64, i64)> = a
            .iter()
            .flat_map(|x| b.iter().map(move |y| (x as i64, y as i64)))
            .collect();
        let (mut bi, mut bj) = (0u64, 0u64);
        for i in 0..prod.len() {
            for j in i + 1..prod.len() {
                let (p, q) = (prod[i], prod[j]);
                bi += u64::from(p.0 + p.1 == q.0 + q.1);
                bj += u64::from(p.0 - p.1 == q.0 - q.1);
            }
        }
        assert_eq!((pairs_i, pairs_j), (bi, bj));
        assert_eq!(pairs_i, pairs_j);
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(set(10, &[0]).reflect().to_vec(), vec![10]);
        let a = set(11, &[1, 2, 3, 6, 8, 9, 10, 11]);
        assert_eq!(a.reflect().to_vec(), vec![0, 1, 2, 3, 5, 8, 9, 10]);
        assert_eq!(set(3, &[1]).reflect_in(10).unwrap().to_vec(), vec![9]);
        assert!(set(10, &[9]).reflect_in(5).is_err());
    }

    #[test]
    fn affine_examples() {
        let a = set(4, &[0, 2, 4]);
        assert_eq!(affine_image(&a, 1, 0).unwrap(), a);
        assert_eq!(affine_image(&a, 2, 1).unwrap().to_vec(), vec![0, 4, 8]);
        let b = set(9, &[1, 3, 4]);
        assert_eq!(affine_image(&b, -1, 4).unwrap().to_vec(), vec![0, 1, 3]);
        let c = set(4, &[0, 1, 4]);
        assert_eq!(affine_image(&c, -1, 4).unwrap(), c.reflect());
        assert!(affine_image(&a, 0, 3).is_err());
        assert!(affine_image(&a, 1 << 30, 0).is_err());
    }

    #[test]
    fn literal_parsing() {
        let s = IntSet::parse_literal("0,2,3,4,7,11,12,14", None).unwrap();
        assert_eq!(s.universe_size(), 15);
        assert_eq!(s.to_string(), "0,2,3,4,7,11,12,14");
        assert!(IntSet::parse_literal("1,2,2", None).is_err());
        assert!(IntSet::parse_literal("1,-2", None).is_err());
        assert!(IntSet::parse_literal("1,x", None).is_err());
        assert!(IntSet::parse_literal("", Some(4)).unwrap().is_empty());
        assert!(IntSet::parse_literal("5", Some(4)).is_err());
        assert_eq!(IntSet::parse_literal("{1, 3}", None).unwrap().to_vec(), vec![1, 3]);
    }

    #[test]
    fn range_queries() {
        let s = set(200, &(60..=130).collect::<Vec<_>>());
        assert!(s.contains_range(60, 130));
        assert!(s.contains_range(64, 127));
        assert!(!s.contains_range(59, 130));
        assert!(!s.contains_range(60, 131));
        assert!(s.contains_range(5, 4));
        assert_eq!(s.count_range(0, 200), 71);
        assert_eq!(s.count_range(100, 1000), 31);
        assert_eq!(s.clip(99).count(), 40);
        assert_eq!(s.min_element(), Some(60));
        assert_eq!(s.max_element(), Some(130));
    }

    #[test]
    fn small_kernel_matches_generic() {
        let a = set(14, &CONWAY);
        let mask: u64 = CONWAY.iter().map(|&x| 1u64 << x).sum();
        assert_eq!(small::sum_diff_sizes(mask, mask, 14), (26, 25));
        let st = SumDiffStats::of(&a, &a).unwrap();
        assert_eq!((st.sum_size as u32, st.diff_size as u32), (26, 25));
    }

    fn arb_pair(max_n: usize) -> impl Strategy<Value = (usize, Vec<bool>, Vec<bool>)> {
        (0..=max_n).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(any::<bool>(), n + 1),
                proptest::collection::vec(any::<bool>(), n + 1),
            )
        })
    }

    fn from_bools(bits: &[bool]) -> IntSet {
        IntSet::from_elements(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
            .unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn kernels_match_naive((_n, xa, xb) in arb_pair(150)) {
            let (a, b) = (from_bools(&xa), from_bools(&xb));
            let (va, vb) = (a.to_vec(), b.to_vec());
            let s: BTreeSet<usize> = sumset(&a, &b).unwrap().iter().collect();
            prop_assert_eq!(s, naive_sums(&va, &vb));
            let d: BTreeSet<i64> = signed_difference_set(&a, &b).unwrap().iter().collect();
            prop_assert_eq!(d, naive_signed_diffs(&va, &vb));
        }

        #[test]
        fn size_bounds_and_symmetry((n, xa, xb) in arb_pair(90)) {
            let (a, b) = (from_bools(&xa), from_bools(&xb));
            let st = SumDiffStats::of(&a, &b).unwrap();
            prop_assert!(st.sum_size <= (2 * n + 1).min(a.count() * b.count()));
            prop_assert!(st.diff_size <= 2 * n + 1);
            let d = signed_difference_set(&a, &b).unwrap();
            prop_assert_eq!(d.negate(), d.clone());
            let meets = !a.intersection(&b).unwrap().is_empty();
            prop_assert_eq!(d.contains(0), meets);
        }

        #[test]
        fn collapsed_difference_identity((_n, xa, xb) in arb_pair(60)) {
            let (a, b) = (from_bools(&xa), from_bools(&xb));
            let m = representation_multiplicities(&a, &b).unwrap();
            let collapsed: u64 = m.diff_entries().map(|(_, c)| c - 1).sum();
            let one_sided = difference_set(&a, &b).unwrap().count() as u64;
            prop_assert_eq!(one_sided, (a.count() * b.count()) as u64 - collapsed);
            let sx: u64 = m.sum_entries().map(|(_, c)| c).sum();
            prop_assert_eq!(sx, (a.count() * b.count()) as u64);
        }

        #[test]
        fn reflect_is_an_involution((_n, xa, _xb) in arb_pair(200)) {
            let a = from_bools(&xa);
            prop_assert_eq!(a.reflect().reflect(), a.clone());
            prop_assert_eq!(a.reflect().count(), a.count());
        }

        #[test]
        fn scratch_kernel_agrees((_n, xa, xb) in arb_pair(200)) {
            let (a, b) = (from_bools(&xa), from_bools(&xb));
            let mut k = SumDiffKernel::new();
            let st = k.stats(a.words(), b.words(), a.universe_size());
            prop_assert_eq!(st, SumDiffStats::of(&a, &b).unwrap());
            prop_assert_eq!(k.last_sums(a.universe_size()), sumset(&a, &b).unwrap());
        }

        #[test]
        fn small_kernel_agrees((n, xa, xb) in arb_pair(small::MAX_N)) {
            let (a, b) = (from_bools(&xa), from_bools(&xb));
            let st = SumDiffStats::of(&a, &b).unwrap();
            let (s, d) = small::sum_diff_sizes(a.words()[0], b.words()[0], n);
            prop_assert_eq!((s as usize, d as usize), (st.sum_size, st.diff_size));
        }
    }
}
