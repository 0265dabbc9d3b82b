#pragma once

#include <string>
#include <variant>

#include "hulm/data.hpp"
#include "hulm/model.hpp"
#include "hulm/naive.hpp"

namespace hulm {

/// Preprocessing baked into a trained model so that prediction replays the
/// exact training-time transform.
struct Preprocess {
    WindowMode window = WindowMode::none;
    int window_size = 1;
    bool standardized = false;
    Standardizer stats;  // meaningful only when standardized

    Dataset apply(const Dataset& data) const;
};

/// A trained model of either kind plus its preprocessing recipe.
struct ModelFile {
    std::variant<HulmParams, NaiveParams> params;
    Preprocess preprocess;

    bool is_hulm() const { return std::holds_alternative<HulmParams>(params); }
    int dim() const;
    int classes() const;
};

void save_model(const ModelFile& model, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace hulm
