#include "otd/model.hpp"

#include <algorithm>
#include <fstream>

#include <json.hpp>

namespace otd {

using nlohmann::json;

namespace {

constexpr int kModelFormatVersion = 1;

json vec_to_json(const std::vector<double>& v) { return json(v); }

std::vector<double> vec_from_json(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

std::string to_string(ClassifierKind kind) {
  switch (kind) {
    case ClassifierKind::Ann: return "ann";
    case ClassifierKind::RandomForest: return "rf";
    case ClassifierKind::SvmLinear: return "svm_linear";
    case ClassifierKind::SvmRbf: return "svm_rbf";
  }
  return "unknown";
}

ClassifierKind classifier_kind_from_string(const std::string& name) {
  if (name == "ann") return ClassifierKind::Ann;
  if (name == "rf") return ClassifierKind::RandomForest;
  if (name == "svm_linear") return ClassifierKind::SvmLinear;
  if (name == "svm_rbf") return ClassifierKind::SvmRbf;
  throw LearnerError("unknown classifier kind '" + name +
                     "' (expected ann, rf, svm_linear or svm_rbf)");
}

TrainConfig TrainConfig::defaults(ClassifierKind kind, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.kind = kind;
  cfg.seed = seed;
  if (kind == ClassifierKind::SvmRbf) {
    cfg.svm.kernel = svm::Kernel::Rbf;
    cfg.svm.max_iterations = 100'000'000;
  } else if (kind == ClassifierKind::SvmLinear) {
    cfg.svm.kernel = svm::Kernel::Linear;
    cfg.svm.max_iterations = 1'000'000;
  }
  return cfg;
}

double TrainedModel::score_row(std::span<const double> row) const {
  if (row.size() != feature_dim_)
    throw LearnerError("feature dimension mismatch: model expects " +
                       std::to_string(feature_dim_) + ", got " +
                       std::to_string(row.size()));
  std::vector<double> standardized;
  if (standardizer_) {
    standardized = standardizer_->apply_row(row);
    row = standardized;
  }
  double s = 0.0;
  switch (kind_) {
    case ClassifierKind::Ann:
      s = std::get<ann::Network>(impl_).score(row);
      break;
    case ClassifierKind::RandomForest:
      s = std::get<forest::Forest>(impl_).predict(row);
      break;
    case ClassifierKind::SvmLinear:
    case ClassifierKind::SvmRbf:
      s = std::get<svm::Model>(impl_).posterior(row);
      break;
  }
  return std::clamp(s, 0.0, 1.0);
}

std::vector<double> TrainedModel::predict_posterior(const FeatureMatrix& X) const {
  std::vector<double> scores;
  scores.reserve(X.rows);
  for (std::size_t r = 0; r < X.rows; ++r) scores.push_back(score_row(X.row(r)));
  return scores;
}

TrainedModel train(const FeatureMatrix& X, const std::vector<int>& y,
                   const TrainConfig& cfg) {
  if (X.rows == 0) throw LearnerError("empty training set");
  if (y.size() != X.rows)
    throw LearnerError("label count " + std::to_string(y.size()) +
                       " does not match row count " + std::to_string(X.rows));
  const bool has0 = std::find(y.begin(), y.end(), 0) != y.end();
  const bool has1 = std::find(y.begin(), y.end(), 1) != y.end();
  if (!has0 || !has1)
    throw LearnerError("training set must contain both classes");

  TrainedModel model;
  model.kind_ = cfg.kind;
  model.feature_dim_ = X.cols;
  model.seed_ = cfg.seed;

  const FeatureMatrix* data = &X;
  FeatureMatrix standardized;
  if (cfg.standardize()) {
    model.standardizer_ = Standardizer::fit(X);
    standardized = X;
    model.standardizer_->apply(standardized);
    data = &standardized;
  }

  switch (cfg.kind) {
    case ClassifierKind::Ann: {
      std::vector<double> yd(y.begin(), y.end());
      auto result = ann::train(data->data, data->rows, data->cols, yd, cfg.ann, cfg.seed);
      model.converged_ = result.converged;
      model.impl_ = std::move(result.net);
      break;
    }
    case ClassifierKind::RandomForest: {
      model.impl_ = forest::train(data->data, data->rows, data->cols, y, cfg.rf, cfg.seed);
      model.converged_ = true;
      break;
    }
    case ClassifierKind::SvmLinear:
    case ClassifierKind::SvmRbf: {
      auto settings = cfg.svm;
      settings.kernel =
          cfg.kind == ClassifierKind::SvmRbf ? svm::Kernel::Rbf : svm::Kernel::Linear;
      auto m = svm::train(data->data, data->rows, data->cols, y, settings, cfg.seed);
      model.converged_ = m.converged;
      model.impl_ = std::move(m);
      break;
    }
  }
  return model;
}

std::string TrainedModel::to_json_string() const {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["kind"] = to_string(kind_);
  j["feature_dim"] = feature_dim_;
  j["seed"] = seed_;
  j["converged"] = converged_;

  if (standardizer_) {
    json s;
    s["mean"] = vec_to_json(standardizer_->means());
    s["std"] = vec_to_json(standardizer_->stddevs());
    std::vector<int> active;
    for (bool a : standardizer_->active()) active.push_back(a ? 1 : 0);
    s["active"] = active;
    j["standardizer"] = std::move(s);
  }

  switch (kind_) {
    case ClassifierKind::Ann: {
      const auto& net = std::get<ann::Network>(impl_);
      j["ann"] = {{"input_dim", net.input_dim},
                  {"hidden", net.hidden},
                  {"params", vec_to_json(net.params)}};
      break;
    }
    case ClassifierKind::RandomForest: {
      const auto& f = std::get<forest::Forest>(impl_);
      json trees = json::array();
      for (const auto& tree : f.trees) {
        json nodes = json::array();
        for (const auto& n : tree.nodes)
          nodes.push_back({n.feature, n.threshold, n.left, n.right, n.p1});
        trees.push_back(std::move(nodes));
      }
      j["forest"] = {{"trees", std::move(trees)}};
      break;
    }
    case ClassifierKind::SvmLinear:
    case ClassifierKind::SvmRbf: {
      const auto& m = std::get<svm::Model>(impl_);
      json s;
      s["kernel"] = m.kernel == svm::Kernel::Rbf ? "rbf" : "linear";
      s["gamma"] = m.gamma;
      s["bias"] = m.bias;
      s["weights"] = vec_to_json(m.weights);
      s["dim"] = m.dim;
      s["sv_data"] = vec_to_json(m.sv_data);
      s["sv_coef"] = vec_to_json(m.sv_coef);
      s["sigmoid_a"] = m.calibrator.a;
      s["sigmoid_b"] = m.calibrator.b;
      j["svm"] = std::move(s);
      break;
    }
  }
  return j.dump();
}

TrainedModel TrainedModel::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw LearnerError(std::string("invalid model JSON: ") + e.what());
  }
  if (j.value("format_version", -1) != kModelFormatVersion)
    throw LearnerError("unsupported model format version");

  TrainedModel model;
  model.kind_ = classifier_kind_from_string(j.at("kind").get<std::string>());
  model.feature_dim_ = j.at("feature_dim").get<std::size_t>();
  model.seed_ = j.at("seed").get<std::uint64_t>();
  model.converged_ = j.at("converged").get<bool>();

  if (j.contains("standardizer")) {
    const auto& s = j["standardizer"];
    std::vector<bool> active;
    for (int a : s.at("active").get<std::vector<int>>()) active.push_back(a != 0);
    model.standardizer_ = Standardizer::from_state(
        vec_from_json(s.at("mean")), vec_from_json(s.at("std")), std::move(active));
  }

  switch (model.kind_) {
    case ClassifierKind::Ann: {
      ann::Network net;
      net.input_dim = j.at("ann").at("input_dim").get<int>();
      net.hidden = j.at("ann").at("hidden").get<int>();
      net.params = vec_from_json(j.at("ann").at("params"));
      model.impl_ = std::move(net);
      break;
    }
    case ClassifierKind::RandomForest: {
      forest::Forest f;
      for (const auto& jt : j.at("forest").at("trees")) {
        forest::Tree tree;
        for (const auto& jn : jt) {
          forest::Node n;
          n.feature = jn.at(0).get<int>();
          n.threshold = jn.at(1).get<double>();
          n.left = jn.at(2).get<int>();
          n.right = jn.at(3).get<int>();
          n.p1 = jn.at(4).get<double>();
          tree.nodes.push_back(n);
        }
        f.trees.push_back(std::move(tree));
      }
      model.impl_ = std::move(f);
      break;
    }
    case ClassifierKind::SvmLinear:
    case ClassifierKind::SvmRbf: {
      const auto& s = j.at("svm");
      svm::Model m;
      m.kernel = s.at("kernel").get<std::string>() == "rbf" ? svm::Kernel::Rbf
                                                            : svm::Kernel::Linear;
      m.gamma = s.at("gamma").get<double>();
      m.bias = s.at("bias").get<double>();
      m.weights = vec_from_json(s.at("weights"));
      m.dim = s.at("dim").get<std::size_t>();
      m.sv_data = vec_from_json(s.at("sv_data"));
      m.sv_coef = vec_from_json(s.at("sv_coef"));
      m.calibrator.a = s.at("sigmoid_a").get<double>();
      m.calibrator.b = s.at("sigmoid_b").get<double>();
      model.impl_ = std::move(m);
      break;
    }
  }
  return model;
}

void TrainedModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw LearnerError("cannot write model file: " + path.string());
  out << to_json_string() << '\n';
}

TrainedModel TrainedModel::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LearnerError("cannot open model file: " + path.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return from_json_string(text);
}

}  // namespace otd
