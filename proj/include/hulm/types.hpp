#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hulm {

/// Dataset files or model files that cannot be read or parsed.
class DataError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Overflow of a potential or message out of double range.
class NumericError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite objective.
class DivergedError : public NumericError {
    using NumericError::NumericError;
};

/// Brute-force enumeration request above the configured state cap.
class BudgetError : public std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// One observed sequence: a T x D matrix of frames, one row per time step.
struct TimeSeries {
    Eigen::MatrixXd frames;
    std::optional<int> label;
    std::optional<std::string> group;

    Eigen::Index length() const { return frames.rows(); }
    Eigen::Index dim() const { return frames.cols(); }
};

/// A class label in one-hot form: index() is the single hot position among
/// num_classes() entries. Validity is enforced at construction.
class LabelVector {
public:
    LabelVector(int index, int num_classes) : index_(index), num_classes_(num_classes) {
        if (num_classes < 1 || index < 0 || index >= num_classes) {
            throw std::invalid_argument("label index " + std::to_string(index) +
                                        " out of range for " + std::to_string(num_classes) +
                                        " classes");
        }
    }

    int index() const { return index_; }
    int num_classes() const { return num_classes_; }

    Eigen::VectorXd one_hot() const {
        Eigen::VectorXd v = Eigen::VectorXd::Zero(num_classes_);
        v(index_) = 1.0;
        return v;
    }

private:
    int index_;
    int num_classes_;
};

/// An ordered collection of series sharing a feature dimensionality and a
/// label alphabet of size num_classes.
struct Dataset {
    std::vector<TimeSeries> series;
    int num_classes = 0;
    int dim = 0;
    std::vector<std::string> label_names;  // empty or exactly num_classes entries

    std::size_t size() const { return series.size(); }
};

/// Training knobs shared by the hidden-unit and naive models.
///
/// The schedule defaults are deliberately hot: the boundary biases start at
/// zero, and escaping that symmetric saddle on order-sensitive tasks needs a
/// large cumulative step budget (see README). epochs and learning_rate
/// accept 0 so that "train nothing" and "hold the initialization" are
/// expressible; everything else must be strictly valid.
struct Hyperparams {
    int hidden_units = 100;
    double l2_lambda = 0.0;
    double learning_rate = 0.2;
    double lr_decay = 0.997;    // multiplicative per-epoch factor
    int epochs = 300;
    int batch_size = 1;
    std::uint64_t seed = 42;

    void validate() const {
        if (hidden_units < 1) throw std::invalid_argument("hidden_units must be >= 1");
        if (l2_lambda < 0.0) throw std::invalid_argument("l2_lambda must be >= 0");
        if (learning_rate < 0.0) throw std::invalid_argument("learning_rate must be >= 0");
        if (!(lr_decay > 0.0 && lr_decay <= 1.0))
            throw std::invalid_argument("lr_decay must be in (0, 1]");
        if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
        if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    }
};

}  // namespace hulm
