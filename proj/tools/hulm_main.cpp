// Command-line front end: train, predict, eval, cv, verify, synth,
// export-weights. Exit codes: 0 success, 1 usage error, 2 data error,
// 3 numeric/divergence error, 4 verification failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hulm/data.hpp"
#include "hulm/inference.hpp"
#include "hulm/learning.hpp"
#include "hulm/metrics.hpp"
#include "hulm/model_io.hpp"
#include "hulm/naive.hpp"
#include "hulm/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitVerification = 4;

struct WindowSpec {
    hulm::WindowMode mode = hulm::WindowMode::none;
    int width = 1;
};

WindowSpec parse_window(const std::string& text) {
    if (text == "none" || text.empty()) return {};
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("--window expects none, stack:w or slide:w");
    }
    const std::string mode = text.substr(0, colon);
    WindowSpec spec;
    try {
        spec.width = std::stoi(text.substr(colon + 1));
    } catch (const std::exception&) {
        throw std::invalid_argument("bad window width in \"" + text + "\"");
    }
    if (mode == "stack") {
        spec.mode = hulm::WindowMode::stack;
    } else if (mode == "slide") {
        spec.mode = hulm::WindowMode::slide;
    } else {
        throw std::invalid_argument("unknown window mode \"" + mode + "\"");
    }
    if (spec.width < 1) throw std::invalid_argument("window width must be >= 1");
    return spec;
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw hulm::DataError("cannot write output file: " + path);
    out << text;
    if (!out) throw hulm::DataError("failed writing output file: " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"hidden-unit logistic model for time-series classification"};
    app.require_subcommand(1);

    // shared option state
    std::string input_path, output_path, model_path, val_path, report_path;
    std::string model_kind = "hulm", window_text = "none", task = "order";
    hulm::Hyperparams hyper;
    bool standardize_flag = false, grouped = false;
    int folds = 10, threads = 1, label = 0;
    std::vector<int> detect_targets;
    std::vector<double> lambda_grid;
    int n_per_class = 100, seq_len = 20;
    double noise_sigma = 0.3;
    hulm::VerifyOptions verify_options;

    const auto add_hyper = [&](CLI::App* cmd) {
        cmd->add_option("--hidden", hyper.hidden_units, "hidden units H");
        cmd->add_option("--lambda", hyper.l2_lambda, "L2 strength on A, W, V");
        cmd->add_option("--lr", hyper.learning_rate, "initial learning rate");
        cmd->add_option("--lr-decay", hyper.lr_decay, "per-epoch decay factor");
        cmd->add_option("--epochs", hyper.epochs, "training epochs");
        cmd->add_option("--batch", hyper.batch_size, "mini-batch size");
        cmd->add_option("--seed", hyper.seed, "seed for all randomness");
        cmd->add_option("--threads", threads, "worker threads (1 = deterministic)");
    };

    CLI::App* train = app.add_subcommand("train", "train a model and write it to disk");
    train->add_option("-i,--input", input_path, "training dataset")->required();
    train->add_option("-o,--output", model_path, "model file to write")->required();
    train->add_option("--model", model_kind, "hulm or naive")
        ->check(CLI::IsMember({"hulm", "naive"}));
    add_hyper(train);
    train->add_option("--window", window_text, "none, stack:w or slide:w");
    train->add_flag("--standardize", standardize_flag, "z-score features on training stats");
    train->add_option("--grid", lambda_grid, "lambda grid for validation tuning")
        ->delimiter(',');
    train->add_option("--val", val_path, "validation dataset for --grid");
    train->add_option("--report", report_path, "write the per-epoch training report here");

    CLI::App* predict = app.add_subcommand("predict", "write per-series posteriors");
    predict->add_option("-i,--input", input_path, "dataset to score")->required();
    predict->add_option("-m,--model", model_path, "trained model")->required();
    predict->add_option("-o,--output", output_path, "output path (default stdout)");

    CLI::App* eval = app.add_subcommand("eval", "evaluate a model on labeled data");
    eval->add_option("-i,--input", input_path, "labeled dataset")->required();
    eval->add_option("-m,--model", model_path, "trained model")->required();
    eval->add_option("-o,--output", output_path, "report path (default stdout)");

    CLI::App* cv = app.add_subcommand("cv", "k-fold cross-validation");
    cv->add_option("-i,--input", input_path, "labeled dataset")->required();
    cv->add_option("--model", model_kind, "hulm or naive")
        ->check(CLI::IsMember({"hulm", "naive"}));
    add_hyper(cv);
    cv->add_option("--folds", folds, "number of folds");
    cv->add_flag("--grouped", grouped, "keep each group id in a single fold");
    cv->add_option("--detect", detect_targets, "one-vs-rest target classes")->delimiter(',');
    cv->add_option("--window", window_text, "none, stack:w or slide:w");
    cv->add_flag("--standardize", standardize_flag,
                 "z-score features (statistics from the full dataset)");
    cv->add_option("-o,--output", output_path, "report path (default stdout)");

    CLI::App* verify = app.add_subcommand("verify", "run oracle and gradient checks");
    verify->add_option("--trials", verify_options.oracle_trials, "oracle-equivalence trials");
    verify->add_option("--grad-trials", verify_options.gradient_trials, "gradient trials");
    verify->add_option("--norm-trials", verify_options.normalization_trials,
                       "normalization trials");
    verify->add_option("--seed", verify_options.seed, "seed");
    verify->add_option("--max-hidden", verify_options.max_hidden, "largest H drawn");
    verify->add_option("--max-len", verify_options.max_len, "largest T drawn");
    verify->add_option("--max-dim", verify_options.max_dim, "largest D drawn");
    verify->add_option("--max-classes", verify_options.max_classes, "largest K drawn");
    verify->add_option("--max-states", verify_options.budget.max_states,
                       "enumeration budget for the oracle");

    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    synth->add_option("--task", task, "order or hmm")->check(CLI::IsMember({"order", "hmm"}));
    synth->add_option("-o,--output", output_path, "dataset path to write")->required();
    synth->add_option("--n-per-class", n_per_class, "series per class");
    synth->add_option("--length", seq_len, "frames per series");
    synth->add_option("--noise", noise_sigma, "noise sigma (order task)");
    synth->add_option("--seed", hyper.seed, "seed");

    CLI::App* export_w = app.add_subcommand(
        "export-weights", "dump |W| of the most label-aligned hidden unit");
    export_w->add_option("-m,--model", model_path, "trained hidden-unit model")->required();
    export_w->add_option("--label", label, "class whose strongest unit to export")->required();
    export_w->add_option("-o,--output", output_path, "output path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (train->parsed()) {
            hyper.validate();
            const WindowSpec window = parse_window(window_text);
            hulm::Dataset data = hulm::load_dataset(input_path);
            data = hulm::window_dataset(data, window.mode, window.width);

            hulm::ModelFile model;
            model.preprocess.window = window.mode;
            model.preprocess.window_size = window.width;
            if (standardize_flag) {
                hulm::StandardizeResult result = hulm::standardize(data, data);
                data = std::move(result.data);
                model.preprocess.standardized = true;
                model.preprocess.stats = std::move(result.stats);
            }

            if (!lambda_grid.empty()) {
                if (val_path.empty()) {
                    throw std::invalid_argument("--grid requires --val");
                }
                hulm::Dataset val = hulm::load_dataset(val_path);
                val = hulm::window_dataset(val, window.mode, window.width);
                if (model.preprocess.standardized) val = model.preprocess.stats.apply(val);
                if (model_kind != "hulm") {
                    throw std::invalid_argument("--grid tuning is for the hulm model");
                }
                hyper.l2_lambda = hulm::tune_lambda(data, val, hyper, lambda_grid, threads);
                std::cout << "tuned lambda: " << hyper.l2_lambda << "\n";
            }

            if (model_kind == "hulm") {
                const hulm::TrainReport report = hulm::train_sgd(data, hyper, {}, threads);
                model.params = report.final_params;
                hulm::save_model(model, model_path);
                if (!report.objective.empty()) {
                    std::cout << "final loss: " << report.objective.back()
                              << "  final training error: " << report.train_error.back()
                              << "\n";
                } else {
                    std::cout << "no training epochs; wrote the initialization\n";
                }
                if (!report_path.empty()) {
                    nlohmann::json doc;
                    doc["lambda"] = hyper.l2_lambda;
                    doc["objective"] = report.objective;
                    doc["train_error"] = report.train_error;
                    write_text(doc.dump(2) + "\n", report_path);
                }
            } else {
                const hulm::NaiveParams params = hulm::naive_train(data, hyper);
                model.params = params;
                hulm::save_model(model, model_path);
                std::size_t wrong = 0;
                for (const hulm::TimeSeries& x : data.series) {
                    wrong += hulm::naive_predict_label(x, params) != *x.label;
                }
                std::cout << "final training error: "
                          << static_cast<double>(wrong) / data.size() << "\n";
            }
            return kExitOk;
        }

        if (predict->parsed() || eval->parsed()) {
            const hulm::ModelFile model = hulm::load_model(model_path);
            hulm::Dataset data = hulm::load_dataset(input_path);
            data = model.preprocess.apply(data);
            if (data.dim != model.dim()) {
                throw hulm::DataError("dataset dimension " + std::to_string(data.dim) +
                                      " does not match model dimension " +
                                      std::to_string(model.dim()) +
                                      " after preprocessing");
            }

            if (predict->parsed()) {
                std::ostringstream out;
                out.precision(17);
                for (const hulm::TimeSeries& x : data.series) {
                    const Eigen::VectorXd p =
                        model.is_hulm()
                            ? hulm::predict_distribution(x, std::get<hulm::HulmParams>(model.params))
                            : hulm::naive_predict(x, std::get<hulm::NaiveParams>(model.params));
                    int best = 0;
                    for (int k = 1; k < p.size(); ++k) {
                        if (p(k) > p(best)) best = k;
                    }
                    out << best;
                    for (int k = 0; k < p.size(); ++k) out << " " << p(k);
                    out << "\n";
                }
                write_text(out.str(), output_path);
                return kExitOk;
            }

            // eval
            std::vector<int> preds, truth;
            std::vector<double> scores;
            for (const hulm::TimeSeries& x : data.series) {
                if (!x.label) throw hulm::DataError("eval requires labeled data");
                if (*x.label >= model.classes()) {
                    throw hulm::DataError("label " + std::to_string(*x.label) +
                                          " out of range for a " +
                                          std::to_string(model.classes()) + "-class model");
                }
                const Eigen::VectorXd p =
                    model.is_hulm()
                        ? hulm::predict_distribution(x, std::get<hulm::HulmParams>(model.params))
                        : hulm::naive_predict(x, std::get<hulm::NaiveParams>(model.params));
                int best = 0;
                for (int k = 1; k < p.size(); ++k) {
                    if (p(k) > p(best)) best = k;
                }
                preds.push_back(best);
                truth.push_back(*x.label);
                if (model.classes() == 2) scores.push_back(p(1));
            }
            hulm::EvalReport report;
            report.error_rate = hulm::error_rate(preds, truth);
            report.confusion = Eigen::MatrixXi::Zero(model.classes(), model.classes());
            for (std::size_t i = 0; i < preds.size(); ++i) {
                report.confusion(truth[i], preds[i]) += 1;
            }
            if (model.classes() == 2) {
                bool both = false;
                for (std::size_t i = 1; i < truth.size(); ++i) both |= truth[i] != truth[0];
                if (both) {
                    report.auc = hulm::roc_auc(scores, truth);
                    report.f1 = hulm::f1_score(preds, truth);
                }
            }
            write_text(report.to_json() + "\n", output_path);
            if (!output_path.empty()) std::cout << report.render_table();
            return kExitOk;
        }

        if (cv->parsed()) {
            hyper.validate();
            const WindowSpec window = parse_window(window_text);
            hulm::Dataset data = hulm::load_dataset(input_path);
            data = hulm::window_dataset(data, window.mode, window.width);
            if (standardize_flag) data = hulm::standardize(data, data).data;

            const hulm::FoldPlan plan = hulm::kfold(data, folds, grouped, hyper.seed);
            if (detect_targets.empty()) {
                const hulm::ModelKind kind = model_kind == "hulm" ? hulm::ModelKind::hulm
                                                                  : hulm::ModelKind::naive;
                const hulm::EvalReport report =
                    hulm::cross_validate(data, plan, hyper, kind, threads);
                write_text(report.to_json() + "\n", output_path);
                if (!output_path.empty()) std::cout << report.render_table();
                return kExitOk;
            }

            nlohmann::json all = nlohmann::json::array();
            for (int target : detect_targets) {
                const hulm::EvalReport report =
                    hulm::one_vs_rest_detect(data, target, plan, hyper, threads);
                nlohmann::json entry;
                entry["target"] = target;
                entry["report"] = nlohmann::json::parse(report.to_json());
                all.push_back(std::move(entry));
                if (!output_path.empty()) {
                    std::cout << "target " << target << ":\n" << report.render_table();
                }
            }
            write_text(all.dump(2) + "\n", output_path);
            return kExitOk;
        }

        if (verify->parsed()) {
            const auto results = hulm::run_verification(verify_options);
            bool all_passed = true;
            for (const hulm::CheckResult& check : results) {
                std::cout << (check.passed ? "[PASS] " : "[FAIL] ") << check.name << "  ("
                          << check.detail << ")\n";
                all_passed &= check.passed;
            }
            return all_passed ? kExitOk : kExitVerification;
        }

        if (synth->parsed()) {
            const hulm::Dataset data =
                task == "order"
                    ? hulm::synth_order_task(n_per_class, seq_len, noise_sigma, hyper.seed)
                    : hulm::synth_hmm_task(n_per_class, seq_len, hyper.seed);
            hulm::save_dataset(data, output_path);
            std::cout << "wrote " << data.size() << " series to " << output_path << "\n";
            return kExitOk;
        }

        if (export_w->parsed()) {
            const hulm::ModelFile model = hulm::load_model(model_path);
            if (!model.is_hulm()) {
                throw std::invalid_argument("export-weights requires a hidden-unit model");
            }
            const hulm::HulmParams& theta = std::get<hulm::HulmParams>(model.params);
            if (label < 0 || label >= theta.classes()) {
                throw std::invalid_argument("label out of range for this model");
            }
            Eigen::Index best = 0;
            for (Eigen::Index h = 1; h < theta.hidden(); ++h) {
                if (theta.V(h, label) > theta.V(best, label)) best = h;  // ties keep lowest h
            }
            std::ostringstream out;
            out.precision(17);
            for (Eigen::Index d = 0; d < theta.dim(); ++d) {
                out << std::abs(theta.W(best, d)) << "\n";
            }
            write_text(out.str(), output_path);
            return kExitOk;
        }
    } catch (const hulm::DivergedError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNumeric;
    } catch (const hulm::NumericError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitNumeric;
    } catch (const hulm::DataError& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitData;
    } catch (const std::invalid_argument& err) {
        std::cerr << "error: " << err.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
