#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "hulm/types.hpp"

namespace hulm {

/// Per-series fold assignment produced by kfold.
struct FoldPlan {
    std::vector<int> fold;  // one entry per series, values in [0, num_folds)
    int num_folds = 0;
    bool grouped = false;
};

/// Reads the line-delimited dataset format: an optional leading
///   #meta {"K": int, "D": int, "labels": [...]}
/// line followed by one JSON record per line,
///   {"label": int, "group": str, "frames": [[...D reals...], ...T rows]}
/// with label and group optional. Errors name the offending line. When no
/// meta line declares K, it is inferred as max label + 1.
Dataset load_dataset(const std::string& path);
void save_dataset(const Dataset& data, const std::string& path);

/// Concatenates non-overlapping runs of w frames into single wide frames:
/// T' = ceil(T/w), D' = w*D. A short final window repeats the last frame.
TimeSeries window_stack(const TimeSeries& x, int w);

/// Centered sliding window, length preserved: frame t becomes the
/// concatenation of frames t-(w-1)/2 .. t+(w-1)/2 with replicate-edge
/// padding. w must be odd.
TimeSeries window_slide(const TimeSeries& x, int w);

enum class WindowMode { none, stack, slide };

/// Applies the chosen windowing to every series.
Dataset window_dataset(const Dataset& data, WindowMode mode, int w);

/// Per-dimension statistics pooled over every frame of the fitted data.
/// Dimensions with (numerically) zero variance are left untouched: their
/// recorded mean is 0 and stddev is 1, so apply() is the identity there.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;

    static Standardizer fit(const Dataset& train);
    Dataset apply(const Dataset& data) const;
    TimeSeries apply(const TimeSeries& x) const;
};

struct StandardizeResult {
    Dataset data;
    Standardizer stats;
};

/// Fits statistics on train, returns apply_to transformed by them.
StandardizeResult standardize(const Dataset& train, const Dataset& apply_to);

/// Seeded balanced fold assignment. Grouped mode keeps every series of a
/// group in one fold, assigning groups largest-first to the currently
/// smallest fold; it requires at least num_folds distinct groups and a group
/// id on every series.
FoldPlan kfold(const Dataset& data, int num_folds, bool grouped, std::uint64_t seed);

/// Two-class task whose discriminative signal is purely temporal. Class 0
/// emits (1,0)+noise for the first half of the series and (0,1)+noise for
/// the second; class 1 is the reverse. Both classes therefore share the
/// distribution of the frame sum, so frame-sum models sit at chance.
/// seq_len must be even and >= 4.
Dataset synth_order_task(int n_per_class, int seq_len, double noise_sigma, std::uint64_t seed);

/// Two-class task from two fixed 2-state Gaussian-emission Markov chains
/// over a single feature. The classes share emissions (state 0 -> N(-1, .36),
/// state 1 -> N(+1, .36)) and the uniform initial state; they differ only in
/// stickiness: class 0 keeps its state with probability 0.85, class 1 with
/// probability 0.3.
Dataset synth_hmm_task(int n_per_class, int seq_len, std::uint64_t seed);

}  // namespace hulm
