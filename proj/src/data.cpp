#include "hulm/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "hulm/rng.hpp"

namespace hulm {

using nlohmann::json;

namespace {

[[noreturn]] void line_error(std::size_t line_no, const std::string& what) {
    throw DataError("line " + std::to_string(line_no) + ": " + what);
}

TimeSeries parse_record(const json& record, std::size_t line_no, int& dim) {
    if (!record.is_object()) line_error(line_no, "record is not an object");
    if (!record.contains("frames")) line_error(line_no, "record has no \"frames\"");
    const json& frames = record["frames"];
    if (!frames.is_array() || frames.empty()) {
        line_error(line_no, "\"frames\" must be a nonempty array of rows");
    }

    const std::size_t len = frames.size();
    if (!frames[0].is_array() || frames[0].empty()) {
        line_error(line_no, "frame row is not a nonempty array");
    }
    if (dim < 0) dim = static_cast<int>(frames[0].size());

    TimeSeries series;
    series.frames.resize(static_cast<Eigen::Index>(len), dim);
    for (std::size_t t = 0; t < len; ++t) {
        const json& row = frames[t];
        if (!row.is_array()) line_error(line_no, "frame row is not an array");
        if (static_cast<int>(row.size()) != dim) {
            line_error(line_no, "frame width " + std::to_string(row.size()) +
                                    " differs from dataset dimension " + std::to_string(dim));
        }
        for (int d = 0; d < dim; ++d) {
            if (!row[d].is_number()) line_error(line_no, "frame value is not a number");
            const double value = row[d].get<double>();
            if (!std::isfinite(value)) line_error(line_no, "frame value is not finite");
            series.frames(static_cast<Eigen::Index>(t), d) = value;
        }
    }

    if (record.contains("label") && !record["label"].is_null()) {
        if (!record["label"].is_number_integer()) line_error(line_no, "\"label\" must be an integer");
        const int label = record["label"].get<int>();
        if (label < 0) line_error(line_no, "\"label\" must be >= 0");
        series.label = label;
    }
    if (record.contains("group") && !record["group"].is_null()) {
        if (!record["group"].is_string()) line_error(line_no, "\"group\" must be a string");
        series.group = record["group"].get<std::string>();
    }
    return series;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);

    Dataset data;
    int declared_classes = -1;
    int dim = -1;
    std::string line;
    std::size_t line_no = 0;
    int max_label = -1;

    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1 && line.rfind("#meta ", 0) == 0) {
            json meta;
            try {
                meta = json::parse(line.substr(6));
            } catch (const json::exception& err) {
                line_error(line_no, std::string("bad meta line: ") + err.what());
            }
            if (meta.contains("K")) declared_classes = meta["K"].get<int>();
            if (meta.contains("D")) dim = meta["D"].get<int>();
            if (meta.contains("labels")) {
                data.label_names = meta["labels"].get<std::vector<std::string>>();
            }
            continue;
        }
        json record;
        try {
            record = json::parse(line);
        } catch (const json::exception& err) {
            line_error(line_no, std::string("parse error: ") + err.what());
        }
        TimeSeries series = parse_record(record, line_no, dim);
        if (series.label) {
            if (declared_classes >= 0 && *series.label >= declared_classes) {
                line_error(line_no, "label " + std::to_string(*series.label) +
                                        " out of range for K=" + std::to_string(declared_classes));
            }
            max_label = std::max(max_label, *series.label);
        }
        data.series.push_back(std::move(series));
    }

    data.dim = std::max(dim, 0);
    data.num_classes = declared_classes >= 0 ? declared_classes : max_label + 1;
    if (!data.label_names.empty() &&
        static_cast<int>(data.label_names.size()) != data.num_classes) {
        throw DataError("meta declares " + std::to_string(data.label_names.size()) +
                        " label names for " + std::to_string(data.num_classes) + " classes");
    }
    return data;
}

void save_dataset(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file: " + path);

    json meta;
    meta["K"] = data.num_classes;
    meta["D"] = data.dim;
    if (!data.label_names.empty()) meta["labels"] = data.label_names;
    out << "#meta " << meta.dump() << "\n";

    for (const TimeSeries& series : data.series) {
        json record;
        json frames = json::array();
        for (Eigen::Index t = 0; t < series.length(); ++t) {
            json row = json::array();
            for (Eigen::Index d = 0; d < series.dim(); ++d) row.push_back(series.frames(t, d));
            frames.push_back(std::move(row));
        }
        record["frames"] = std::move(frames);
        if (series.label) record["label"] = *series.label;
        if (series.group) record["group"] = *series.group;
        out << record.dump() << "\n";
    }
    if (!out) throw DataError("failed writing dataset file: " + path);
}

TimeSeries window_stack(const TimeSeries& x, int w) {
    if (w < 1) throw std::invalid_argument("window width must be >= 1");
    const Eigen::Index len = x.length();
    const Eigen::Index dim = x.dim();
    const Eigen::Index out_len = (len + w - 1) / w;

    TimeSeries out;
    out.label = x.label;
    out.group = x.group;
    out.frames.resize(out_len, static_cast<Eigen::Index>(w) * dim);
    for (Eigen::Index i = 0; i < out_len; ++i) {
        for (int j = 0; j < w; ++j) {
            // a short final window repeats the last frame
            const Eigen::Index t = std::min(i * w + j, len - 1);
            out.frames.block(i, static_cast<Eigen::Index>(j) * dim, 1, dim) = x.frames.row(t);
        }
    }
    return out;
}

TimeSeries window_slide(const TimeSeries& x, int w) {
    if (w < 1) throw std::invalid_argument("window width must be >= 1");
    if (w % 2 == 0) throw std::invalid_argument("sliding window width must be odd");
    const Eigen::Index len = x.length();
    const Eigen::Index dim = x.dim();
    const int reach = (w - 1) / 2;

    TimeSeries out;
    out.label = x.label;
    out.group = x.group;
    out.frames.resize(len, static_cast<Eigen::Index>(w) * dim);
    for (Eigen::Index t = 0; t < len; ++t) {
        for (int j = -reach; j <= reach; ++j) {
            const Eigen::Index src = std::clamp<Eigen::Index>(t + j, 0, len - 1);
            out.frames.block(t, static_cast<Eigen::Index>(j + reach) * dim, 1, dim) =
                x.frames.row(src);
        }
    }
    return out;
}

Dataset window_dataset(const Dataset& data, WindowMode mode, int w) {
    if (mode == WindowMode::none) return data;
    Dataset out;
    out.num_classes = data.num_classes;
    out.label_names = data.label_names;
    out.dim = data.dim * w;
    out.series.reserve(data.size());
    for (const TimeSeries& x : data.series) {
        out.series.push_back(mode == WindowMode::stack ? window_stack(x, w)
                                                       : window_slide(x, w));
    }
    return out;
}

Standardizer Standardizer::fit(const Dataset& train) {
    if (train.series.empty()) throw std::invalid_argument("cannot standardize an empty dataset");
    const Eigen::Index dim = train.series.front().dim();

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd sum_sq = Eigen::VectorXd::Zero(dim);
    double count = 0.0;
    for (const TimeSeries& x : train.series) {
        sum += x.frames.colwise().sum().transpose();
        sum_sq += x.frames.array().square().colwise().sum().matrix().transpose();
        count += static_cast<double>(x.length());
    }

    Standardizer stats;
    stats.mean = sum / count;
    stats.stddev = ((sum_sq / count).array() - stats.mean.array().square())
                       .max(0.0)
                       .sqrt()
                       .matrix();
    for (Eigen::Index d = 0; d < dim; ++d) {
        if (stats.stddev(d) < 1e-12) {  // numerically constant: leave untouched
            stats.mean(d) = 0.0;
            stats.stddev(d) = 1.0;
        }
    }
    return stats;
}

TimeSeries Standardizer::apply(const TimeSeries& x) const {
    TimeSeries out = x;
    out.frames.rowwise() -= mean.transpose();
    out.frames.array().rowwise() /= stddev.transpose().array();
    return out;
}

Dataset Standardizer::apply(const Dataset& data) const {
    Dataset out = data;
    for (TimeSeries& x : out.series) x = apply(x);
    return out;
}

StandardizeResult standardize(const Dataset& train, const Dataset& apply_to) {
    StandardizeResult result;
    result.stats = Standardizer::fit(train);
    result.data = result.stats.apply(apply_to);
    return result;
}

FoldPlan kfold(const Dataset& data, int num_folds, bool grouped, std::uint64_t seed) {
    if (num_folds < 2) throw std::invalid_argument("need at least 2 folds");
    if (data.series.empty()) throw std::invalid_argument("cannot fold an empty dataset");

    FoldPlan plan;
    plan.num_folds = num_folds;
    plan.grouped = grouped;
    plan.fold.assign(data.size(), -1);
    Rng rng(seed);

    if (!grouped) {
        std::vector<std::size_t> order(data.size());
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (std::size_t i = 0; i < order.size(); ++i) {
            plan.fold[order[i]] = static_cast<int>(i % num_folds);
        }
        return plan;
    }

    // Whole groups per fold, balancing series counts: largest group first
    // onto the currently smallest fold.
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (!data.series[i].group) {
            throw std::invalid_argument("grouped folds require a group id on every series");
        }
        groups[*data.series[i].group].push_back(i);
    }
    if (groups.size() < static_cast<std::size_t>(num_folds)) {
        throw std::invalid_argument("grouped folds need at least " + std::to_string(num_folds) +
                                    " distinct groups, got " + std::to_string(groups.size()));
    }

    std::vector<const std::vector<std::size_t>*> group_list;
    group_list.reserve(groups.size());
    for (const auto& [name, members] : groups) group_list.push_back(&members);
    rng.shuffle(group_list);  // seeded tie order among equal-sized groups
    std::stable_sort(group_list.begin(), group_list.end(),
                     [](const auto* a, const auto* b) { return a->size() > b->size(); });

    std::vector<std::size_t> load(num_folds, 0);
    for (const auto* members : group_list) {
        const int target = static_cast<int>(
            std::min_element(load.begin(), load.end()) - load.begin());
        for (std::size_t i : *members) plan.fold[i] = target;
        load[target] += members->size();
    }
    return plan;
}

Dataset synth_order_task(int n_per_class, int seq_len, double noise_sigma, std::uint64_t seed) {
    if (n_per_class < 1) throw std::invalid_argument("n_per_class must be >= 1");
    if (seq_len < 4 || seq_len % 2 != 0) {
        throw std::invalid_argument("seq_len must be even and >= 4");
    }
    if (noise_sigma < 0.0) throw std::invalid_argument("noise_sigma must be >= 0");

    Dataset data;
    data.num_classes = 2;
    data.dim = 2;
    Rng rng(seed);
    for (int label = 0; label < 2; ++label) {
        for (int n = 0; n < n_per_class; ++n) {
            TimeSeries series;
            series.label = label;
            series.frames.resize(seq_len, 2);
            for (int t = 0; t < seq_len; ++t) {
                const bool first_half = t < seq_len / 2;
                const int hot = (first_half == (label == 0)) ? 0 : 1;
                series.frames(t, 0) = (hot == 0 ? 1.0 : 0.0) + rng.gaussian(0.0, noise_sigma);
                series.frames(t, 1) = (hot == 1 ? 1.0 : 0.0) + rng.gaussian(0.0, noise_sigma);
            }
            data.series.push_back(std::move(series));
        }
    }
    return data;
}

Dataset synth_hmm_task(int n_per_class, int seq_len, std::uint64_t seed) {
    if (n_per_class < 1) throw std::invalid_argument("n_per_class must be >= 1");
    if (seq_len < 2) throw std::invalid_argument("seq_len must be >= 2");

    constexpr double kStay[2] = {0.85, 0.3};  // self-transition probability per class
    constexpr double kEmitMean[2] = {-1.0, 1.0};
    constexpr double kEmitSigma = 0.6;

    Dataset data;
    data.num_classes = 2;
    data.dim = 1;
    Rng rng(seed);
    for (int label = 0; label < 2; ++label) {
        for (int n = 0; n < n_per_class; ++n) {
            TimeSeries series;
            series.label = label;
            series.frames.resize(seq_len, 1);
            int state = rng.uniform() < 0.5 ? 0 : 1;
            for (int t = 0; t < seq_len; ++t) {
                series.frames(t, 0) = rng.gaussian(kEmitMean[state], kEmitSigma);
                if (rng.uniform() >= kStay[label]) state = 1 - state;
            }
            data.series.push_back(std::move(series));
        }
    }
    return data;
}

}  // namespace hulm
