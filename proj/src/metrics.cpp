#include "hulm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hulm/detail/parallel.hpp"
#include "hulm/inference.hpp"
#include "hulm/learning.hpp"
#include "hulm/naive.hpp"

namespace hulm {

using nlohmann::json;

double error_rate(const std::vector<int>& preds, const std::vector<int>& truth) {
    if (preds.empty()) throw std::invalid_argument("error_rate over empty input");
    if (preds.size() != truth.size()) {
        throw std::invalid_argument("prediction/truth length mismatch");
    }
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] != truth[i]) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

double roc_auc(const std::vector<double>& scores, const std::vector<int>& truth) {
    if (scores.size() != truth.size()) {
        throw std::invalid_argument("score/truth length mismatch");
    }
    std::size_t positives = 0;
    for (int t : truth) positives += (t != 0);
    const std::size_t negatives = truth.size() - positives;
    if (positives == 0 || negatives == 0) {
        throw std::invalid_argument("roc_auc requires both classes present");
    }

    // Midrank formulation: ties get the average rank, worth 1/2 per tied pair.
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&scores](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    double positive_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);  // ranks are 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (truth[order[k]] != 0) positive_rank_sum += midrank;
        }
        i = j;
    }
    const double p = static_cast<double>(positives);
    const double n = static_cast<double>(negatives);
    return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

double f1_score(const std::vector<int>& preds, const std::vector<int>& truth) {
    if (preds.size() != truth.size()) {
        throw std::invalid_argument("prediction/truth length mismatch");
    }
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const bool pred = preds[i] != 0;
        const bool real = truth[i] != 0;
        tp += (pred && real);
        fp += (pred && !real);
        fn += (!pred && real);
    }
    const double precision = (tp + fp) ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = (tp + fn) ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

namespace {

void check_plan(const Dataset& data, const FoldPlan& plan) {
    if (plan.fold.size() != data.size()) {
        throw std::invalid_argument("fold plan does not cover the dataset");
    }
    if (plan.num_folds < 2) throw std::invalid_argument("fold plan needs at least 2 folds");
    for (const TimeSeries& x : data.series) {
        if (!x.label) throw std::invalid_argument("cross-validation requires labeled data");
    }
}

Dataset subset(const Dataset& data, const FoldPlan& plan, int fold, bool complement) {
    Dataset out;
    out.num_classes = data.num_classes;
    out.dim = data.dim;
    out.label_names = data.label_names;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if ((plan.fold[i] != fold) == complement) out.series.push_back(data.series[i]);
    }
    return out;
}

struct FoldOutcome {
    std::vector<int> preds;
    std::vector<int> truth;
    std::vector<double> scores;  // detection only: posterior of the target
    bool skipped = false;
    std::string warning;
};

template <typename RunFold>
std::vector<FoldOutcome> run_folds(int num_folds, int threads, RunFold&& run_fold) {
    std::vector<FoldOutcome> outcomes(num_folds);
    detail::parallel_for(static_cast<std::size_t>(num_folds), threads, [&](std::size_t f) {
        try {
            outcomes[f] = run_fold(static_cast<int>(f));
        } catch (const DivergedError& err) {
            throw DivergedError("fold " + std::to_string(f) + ": " + err.what());
        } catch (const NumericError& err) {
            throw NumericError("fold " + std::to_string(f) + ": " + err.what());
        } catch (const std::invalid_argument& err) {
            throw std::invalid_argument("fold " + std::to_string(f) + ": " + err.what());
        }
    });
    return outcomes;
}

EvalReport assemble(const std::vector<FoldOutcome>& outcomes, int num_classes, bool with_auc) {
    EvalReport report;
    report.confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
    report.per_fold_errors.emplace();

    std::vector<int> all_preds, all_truth;
    std::vector<double> all_scores;
    for (const FoldOutcome& fold : outcomes) {
        if (fold.skipped) {
            report.warnings.push_back(fold.warning);
            continue;
        }
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < fold.preds.size(); ++i) {
            report.confusion(fold.truth[i], fold.preds[i]) += 1;
            wrong += (fold.preds[i] != fold.truth[i]);
        }
        report.per_fold_errors->push_back(static_cast<double>(wrong) /
                                          static_cast<double>(fold.preds.size()));
        all_preds.insert(all_preds.end(), fold.preds.begin(), fold.preds.end());
        all_truth.insert(all_truth.end(), fold.truth.begin(), fold.truth.end());
        all_scores.insert(all_scores.end(), fold.scores.begin(), fold.scores.end());
    }
    if (all_preds.empty()) throw std::invalid_argument("every fold was skipped");

    report.error_rate = error_rate(all_preds, all_truth);
    if (with_auc) {
        report.auc = roc_auc(all_scores, all_truth);
        report.f1 = f1_score(all_preds, all_truth);
    }
    return report;
}

}  // namespace

EvalReport cross_validate(const Dataset& data, const FoldPlan& plan, const Hyperparams& hyper,
                          ModelKind kind, int threads) {
    check_plan(data, plan);
    // Folds are independent; parallelism goes across folds, so each fold
    // trains single-threaded either way and results stay reproducible.
    const auto outcomes = run_folds(plan.num_folds, threads, [&](int fold) {
        const Dataset train = subset(data, plan, fold, true);
        const Dataset test = subset(data, plan, fold, false);
        FoldOutcome outcome;
        if (train.series.empty() || test.series.empty()) {
            throw std::invalid_argument("empty training or test side");
        }
        if (kind == ModelKind::hulm) {
            const TrainReport trained = train_sgd(train, hyper);
            for (const TimeSeries& x : test.series) {
                outcome.preds.push_back(predict_label(x, trained.final_params));
                outcome.truth.push_back(*x.label);
            }
        } else {
            const NaiveParams trained = naive_train(train, hyper);
            for (const TimeSeries& x : test.series) {
                outcome.preds.push_back(naive_predict_label(x, trained));
                outcome.truth.push_back(*x.label);
            }
        }
        return outcome;
    });
    return assemble(outcomes, data.num_classes, false);
}

EvalReport one_vs_rest_detect(const Dataset& data, int target_class, const FoldPlan& plan,
                              const Hyperparams& hyper, int threads) {
    check_plan(data, plan);
    if (target_class < 0 || target_class >= data.num_classes) {
        throw std::invalid_argument("target class out of range");
    }

    // Binary relabeling: target -> 1, everything else -> 0.
    Dataset binary;
    binary.num_classes = 2;
    binary.dim = data.dim;
    binary.series = data.series;
    for (TimeSeries& x : binary.series) {
        if (!x.label) throw std::invalid_argument("detection requires labeled data");
        x.label = (*x.label == target_class) ? 1 : 0;
    }

    const auto outcomes = run_folds(plan.num_folds, threads, [&](int fold) {
        const Dataset train = subset(binary, plan, fold, true);
        const Dataset test = subset(binary, plan, fold, false);
        FoldOutcome outcome;

        const auto single_class = [](const Dataset& side) {
            bool saw[2] = {false, false};
            for (const TimeSeries& x : side.series) saw[*x.label] = true;
            return !(saw[0] && saw[1]);
        };
        if (train.series.empty() || test.series.empty() || single_class(train) ||
            single_class(test)) {
            outcome.skipped = true;
            outcome.warning = "fold " + std::to_string(fold) +
                              " skipped: a single class on one side";
            return outcome;
        }

        const TrainReport trained = train_sgd(train, hyper);
        for (const TimeSeries& x : test.series) {
            const double score = predict_distribution(x, trained.final_params)(1);
            outcome.scores.push_back(score);
            outcome.preds.push_back(score > 0.5 ? 1 : 0);
            outcome.truth.push_back(*x.label);
        }
        return outcome;
    });
    return assemble(outcomes, 2, true);
}

std::string EvalReport::to_json() const {
    json doc;
    doc["error_rate"] = error_rate;
    json confusion_rows = json::array();
    for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < confusion.cols(); ++j) row.push_back(confusion(i, j));
        confusion_rows.push_back(std::move(row));
    }
    doc["confusion"] = std::move(confusion_rows);
    if (per_fold_errors) doc["per_fold_errors"] = *per_fold_errors;
    if (auc) doc["auc"] = *auc;
    if (f1) doc["f1"] = *f1;
    if (!warnings.empty()) doc["warnings"] = warnings;
    return doc.dump(2);
}

std::string EvalReport::render_table() const {
    std::ostringstream out;
    out.setf(std::ios::fixed);
    out.precision(4);
    out << "error rate : " << error_rate << "\n";
    if (auc) out << "auc        : " << *auc << "\n";
    if (f1) out << "f1         : " << *f1 << "\n";
    if (per_fold_errors && !per_fold_errors->empty()) {
        out << "fold errors:";
        for (double e : *per_fold_errors) out << " " << e;
        out << "\n";
    }
    out << "confusion (rows = truth):\n";
    for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
        for (Eigen::Index j = 0; j < confusion.cols(); ++j) {
            out.width(7);
            out << confusion(i, j);
        }
        out << "\n";
    }
    for (const std::string& w : warnings) out << "warning: " << w << "\n";
    return out.str();
}

}  // namespace hulm
