#include "hulm/model_io.hpp"

#include <fstream>

#include <json.hpp>

namespace hulm {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Eigen::VectorXd vector_from_json(const json& arr, Eigen::Index expected, const char* name) {
    if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != expected) {
        throw DataError(std::string("model field \"") + name + "\" has the wrong length");
    }
    Eigen::VectorXd v(expected);
    for (Eigen::Index i = 0; i < expected; ++i) v(i) = arr[i].get<double>();
    return v;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index r, Eigen::Index c,
                                 const char* name) {
    if (!rows.is_array() || static_cast<Eigen::Index>(rows.size()) != r) {
        throw DataError(std::string("model field \"") + name + "\" has the wrong row count");
    }
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        const json& row = rows[i];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
            throw DataError(std::string("model field \"") + name + "\" has a ragged row");
        }
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[j].get<double>();
    }
    return m;
}

json hulm_to_json(const HulmParams& theta) {
    json doc;
    doc["format_version"] = 1;
    doc["kind"] = "hulm";
    doc["H"] = theta.hidden();
    doc["D"] = theta.dim();
    doc["K"] = theta.classes();
    doc["pi"] = vector_to_json(theta.pi);
    doc["tau"] = vector_to_json(theta.tau);
    doc["A"] = vector_to_json(theta.A);
    doc["b"] = vector_to_json(theta.b);
    doc["c"] = vector_to_json(theta.c);
    doc["W"] = matrix_to_json(theta.W);
    doc["V"] = matrix_to_json(theta.V);
    return doc;
}

HulmParams hulm_from_json(const json& doc) {
    const auto hidden = doc.at("H").get<Eigen::Index>();
    const auto dim = doc.at("D").get<Eigen::Index>();
    const auto classes = doc.at("K").get<Eigen::Index>();
    if (hidden < 1 || dim < 1 || classes < 1) throw DataError("model dimensions must be >= 1");
    HulmParams theta;
    theta.pi = vector_from_json(doc.at("pi"), hidden, "pi");
    theta.tau = vector_from_json(doc.at("tau"), hidden, "tau");
    theta.A = vector_from_json(doc.at("A"), hidden, "A");
    theta.b = vector_from_json(doc.at("b"), hidden, "b");
    theta.c = vector_from_json(doc.at("c"), classes, "c");
    theta.W = matrix_from_json(doc.at("W"), hidden, dim, "W");
    theta.V = matrix_from_json(doc.at("V"), hidden, classes, "V");
    return theta;
}

json naive_to_json(const NaiveParams& params) {
    json doc;
    doc["format_version"] = 1;
    doc["kind"] = "naive";
    doc["D"] = params.dim();
    doc["K"] = params.classes();
    doc["W"] = matrix_to_json(params.W);
    doc["c"] = vector_to_json(params.c);
    return doc;
}

NaiveParams naive_from_json(const json& doc) {
    const auto dim = doc.at("D").get<Eigen::Index>();
    const auto classes = doc.at("K").get<Eigen::Index>();
    if (dim < 1 || classes < 1) throw DataError("model dimensions must be >= 1");
    NaiveParams params;
    params.W = matrix_from_json(doc.at("W"), classes, dim, "W");
    params.c = vector_from_json(doc.at("c"), classes, "c");
    return params;
}

json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file: " + path);
    try {
        json doc = json::parse(in);
        if (doc.at("format_version").get<int>() != 1) {
            throw DataError("unsupported model format_version in " + path);
        }
        return doc;
    } catch (const json::exception& err) {
        throw DataError("cannot parse model file " + path + ": " + err.what());
    }
}

void write_document(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file: " + path);
    out << doc.dump(2) << "\n";
    if (!out) throw DataError("failed writing model file: " + path);
}

}  // namespace

void save_hulm(const HulmParams& theta, const std::string& path) {
    check_params_consistent(theta);
    write_document(hulm_to_json(theta), path);
}

HulmParams load_hulm(const std::string& path) {
    const json doc = load_document(path);
    if (doc.value("kind", "hulm") != "hulm") {
        throw DataError(path + " is not a hidden-unit model file");
    }
    return hulm_from_json(doc);
}

void save_naive(const NaiveParams& params, const std::string& path) {
    write_document(naive_to_json(params), path);
}

NaiveParams load_naive(const std::string& path) {
    const json doc = load_document(path);
    if (doc.value("kind", "") != "naive") {
        throw DataError(path + " is not a naive model file");
    }
    return naive_from_json(doc);
}

Dataset Preprocess::apply(const Dataset& data) const {
    Dataset out = window_dataset(data, window, window_size);
    if (standardized) out = stats.apply(out);
    return out;
}

int ModelFile::dim() const {
    return is_hulm() ? static_cast<int>(std::get<HulmParams>(params).dim())
                     : static_cast<int>(std::get<NaiveParams>(params).dim());
}

int ModelFile::classes() const {
    return is_hulm() ? static_cast<int>(std::get<HulmParams>(params).classes())
                     : static_cast<int>(std::get<NaiveParams>(params).classes());
}

void save_model(const ModelFile& model, const std::string& path) {
    json doc = model.is_hulm() ? hulm_to_json(std::get<HulmParams>(model.params))
                               : naive_to_json(std::get<NaiveParams>(model.params));
    const Preprocess& pre = model.preprocess;
    if (pre.window != WindowMode::none || pre.standardized) {
        json p;
        if (pre.window != WindowMode::none) {
            p["window"] = {{"mode", pre.window == WindowMode::stack ? "stack" : "slide"},
                           {"w", pre.window_size}};
        }
        if (pre.standardized) {
            p["standardize"] = {{"mean", vector_to_json(pre.stats.mean)},
                                {"std", vector_to_json(pre.stats.stddev)}};
        }
        doc["preprocess"] = std::move(p);
    }
    write_document(doc, path);
}

ModelFile load_model(const std::string& path) {
    const json doc = load_document(path);
    ModelFile model;
    const std::string kind = doc.value("kind", "hulm");
    if (kind == "hulm") {
        model.params = hulm_from_json(doc);
    } else if (kind == "naive") {
        model.params = naive_from_json(doc);
    } else {
        throw DataError("unknown model kind \"" + kind + "\" in " + path);
    }
    if (doc.contains("preprocess")) {
        const json& p = doc["preprocess"];
        if (p.contains("window")) {
            const std::string mode = p["window"].at("mode").get<std::string>();
            if (mode == "stack") {
                model.preprocess.window = WindowMode::stack;
            } else if (mode == "slide") {
                model.preprocess.window = WindowMode::slide;
            } else {
                throw DataError("unknown window mode \"" + mode + "\" in " + path);
            }
            model.preprocess.window_size = p["window"].at("w").get<int>();
        }
        if (p.contains("standardize")) {
            const json& s = p["standardize"];
            const auto n = static_cast<Eigen::Index>(s.at("mean").size());
            model.preprocess.standardized = true;
            model.preprocess.stats.mean = vector_from_json(s.at("mean"), n, "mean");
            model.preprocess.stats.stddev = vector_from_json(s.at("std"), n, "std");
        }
    }
    return model;
}

}  // namespace hulm
