#include "storecast/model_io.hpp"

#include <string>

#include "storecast/errors.hpp"

namespace storecast {

namespace {

std::string schema_tag(const char* kind) {
  return std::string("storecast/") + kind + "/v1";
}

void check_schema(const Json& doc, const char* kind) {
  const std::string want = schema_tag(kind);
  if (!doc.is_object() || doc.value("schema", std::string()) != want) {
    raise(Errc::KindMismatch, "expected a " + want + " document");
  }
}

template <typename T>
T get(const Json& doc, const char* key) {
  if (!doc.contains(key)) raise(Errc::MalformedRow, std::string("missing field ") + key);
  try {
    return doc.at(key).get<T>();
  } catch (const Json::exception& e) {
    raise(Errc::MalformedRow, std::string("bad field ") + key + ": " + e.what());
  }
}

}  // namespace

Json to_json(const ArimaModel& model) {
  return Json{{"schema", schema_tag("arima")},
              {"p", model.order.p},
              {"d", model.order.d},
              {"q", model.order.q},
              {"phi", model.phi},
              {"theta", model.theta},
              {"intercept", model.intercept},
              {"sigma2", model.sigma2},
              {"aic", model.aic},
              {"conditioning", model.conditioning},
              {"last_values", model.last_values},
              {"last_residuals", model.last_residuals},
              {"level_tails", model.level_tails}};
}

ArimaModel arima_from_json(const Json& doc) {
  check_schema(doc, "arima");
  ArimaModel model;
  model.order = {get<int>(doc, "p"), get<int>(doc, "d"), get<int>(doc, "q")};
  model.phi = get<std::vector<double>>(doc, "phi");
  model.theta = get<std::vector<double>>(doc, "theta");
  model.intercept = get<double>(doc, "intercept");
  model.sigma2 = get<double>(doc, "sigma2");
  model.aic = get<double>(doc, "aic");
  model.conditioning = get<int>(doc, "conditioning");
  model.last_values = get<std::vector<double>>(doc, "last_values");
  model.last_residuals = get<std::vector<double>>(doc, "last_residuals");
  model.level_tails = get<std::vector<double>>(doc, "level_tails");
  return model;
}

Json to_json(const LassoModel& model) {
  return Json{{"schema", schema_tag("lasso")},     {"column_names", model.column_names},
              {"beta", model.beta},                {"intercept", model.intercept},
              {"lambda", model.lambda},            {"means", model.means},
              {"sds", model.sds}};
}

LassoModel lasso_from_json(const Json& doc) {
  check_schema(doc, "lasso");
  LassoModel model;
  model.column_names = get<std::vector<std::string>>(doc, "column_names");
  model.beta = get<std::vector<double>>(doc, "beta");
  model.intercept = get<double>(doc, "intercept");
  model.lambda = get<double>(doc, "lambda");
  model.means = get<std::vector<double>>(doc, "means");
  model.sds = get<std::vector<double>>(doc, "sds");
  return model;
}

Json to_json(const GbtModel& model) {
  // nodes pack as [feature, threshold, value, left, right]
  Json trees = Json::array();
  for (const auto& tree : model.trees) {
    Json nodes = Json::array();
    for (const auto& n : tree.nodes) {
      nodes.push_back(Json::array({n.feature, n.threshold, n.value, n.left, n.right}));
    }
    trees.push_back(std::move(nodes));
  }
  return Json{{"schema", schema_tag("gbt")},
              {"n_trees", model.params.n_trees},
              {"max_depth", model.params.max_depth},
              {"learning_rate", model.params.learning_rate},
              {"subsample", model.params.subsample},
              {"min_leaf", model.params.min_leaf},
              {"seed", model.params.seed},
              {"column_names", model.column_names},
              {"base_score", model.base_score},
              {"trees", std::move(trees)}};
}

GbtModel gbt_from_json(const Json& doc) {
  check_schema(doc, "gbt");
  GbtModel model;
  model.params.n_trees = get<int>(doc, "n_trees");
  model.params.max_depth = get<int>(doc, "max_depth");
  model.params.learning_rate = get<double>(doc, "learning_rate");
  model.params.subsample = get<double>(doc, "subsample");
  model.params.min_leaf = get<int>(doc, "min_leaf");
  model.params.seed = get<std::uint64_t>(doc, "seed");
  model.column_names = get<std::vector<std::string>>(doc, "column_names");
  model.base_score = get<double>(doc, "base_score");
  for (const auto& nodes : get<Json>(doc, "trees")) {
    RegressionTree tree;
    for (const auto& packed : nodes) {
      if (!packed.is_array() || packed.size() != 5) {
        raise(Errc::MalformedRow, "tree nodes must pack five fields");
      }
      RegressionTree::Node n;
      n.feature = packed[0].get<int>();
      n.threshold = packed[1].get<double>();
      n.value = packed[2].get<double>();
      n.left = packed[3].get<int>();
      n.right = packed[4].get<int>();
      tree.nodes.push_back(n);
    }
    model.trees.push_back(std::move(tree));
  }
  return model;
}

Json to_json(const JointModel& model) {
  Json marginals = Json::array();
  for (const auto& m : model.marginals) {
    marginals.push_back(Json{{"shape", m.shape}, {"scale", m.scale}});
  }
  return Json{{"schema", schema_tag("copula")},
              {"family", copula_family_name(model.family)},
              {"rho", model.rho},
              {"nu", model.nu},
              {"loglik", model.loglik},
              {"marginals", std::move(marginals)}};
}

JointModel joint_model_from_json(const Json& doc) {
  check_schema(doc, "copula");
  JointModel model;
  model.family = copula_family_from_name(get<std::string>(doc, "family"));
  model.rho = get<double>(doc, "rho");
  model.nu = get<double>(doc, "nu");
  model.loglik = get<double>(doc, "loglik");
  for (const auto& m : get<Json>(doc, "marginals")) {
    model.marginals.push_back({get<double>(m, "shape"), get<double>(m, "scale")});
  }
  return model;
}

namespace {

Json pair_copula_to_json(const PairCopula& pc) {
  return Json{{"family", copula_family_name(pc.family)},
              {"rho", pc.rho},
              {"nu", pc.nu},
              {"tau", pc.tau},
              {"loglik", pc.loglik},
              {"var_a", pc.var_a},
              {"var_b", pc.var_b},
              {"conditioned_on", pc.conditioned_on}};
}

PairCopula pair_copula_from_json(const Json& doc) {
  PairCopula pc;
  pc.family = copula_family_from_name(get<std::string>(doc, "family"));
  pc.rho = get<double>(doc, "rho");
  pc.nu = get<double>(doc, "nu");
  pc.tau = get<double>(doc, "tau");
  pc.loglik = get<double>(doc, "loglik");
  pc.var_a = get<std::size_t>(doc, "var_a");
  pc.var_b = get<std::size_t>(doc, "var_b");
  pc.conditioned_on = get<std::vector<std::size_t>>(doc, "conditioned_on");
  return pc;
}

}  // namespace

Json to_json(const CVineSpec& spec) {
  Json trees = Json::array();
  for (const auto& level : spec.trees) {
    Json edges = Json::array();
    for (const auto& pc : level) edges.push_back(pair_copula_to_json(pc));
    trees.push_back(std::move(edges));
  }
  return Json{{"schema", schema_tag("cvine")},
              {"order", spec.order},
              {"trees", std::move(trees)},
              {"tree1_taus", spec.tree1_taus}};
}

CVineSpec cvine_spec_from_json(const Json& doc) {
  check_schema(doc, "cvine");
  CVineSpec spec;
  spec.order = get<std::vector<std::size_t>>(doc, "order");
  for (const auto& level : get<Json>(doc, "trees")) {
    std::vector<PairCopula> edges;
    for (const auto& edge : level) edges.push_back(pair_copula_from_json(edge));
    spec.trees.push_back(std::move(edges));
  }
  spec.tree1_taus = get<std::vector<double>>(doc, "tree1_taus");
  return spec;
}

Json to_json(const McmcChain& chain) {
  return Json{{"schema", schema_tag("chain")},
              {"param_names", chain.param_names},
              {"draws", chain.draws},
              {"burn_in", chain.burn_in},
              {"seed", chain.seed},
              {"acceptance_rates", chain.acceptance_rates},
              {"warnings", chain.warnings}};
}

McmcChain chain_from_json(const Json& doc) {
  check_schema(doc, "chain");
  McmcChain chain;
  chain.param_names = get<std::vector<std::string>>(doc, "param_names");
  chain.draws = get<std::vector<std::vector<double>>>(doc, "draws");
  chain.burn_in = get<std::size_t>(doc, "burn_in");
  chain.seed = get<std::uint64_t>(doc, "seed");
  chain.acceptance_rates = get<std::map<std::string, double>>(doc, "acceptance_rates");
  chain.warnings = get<std::vector<std::string>>(doc, "warnings");
  return chain;
}

CopulaFamily copula_family_from_name(const std::string& name) {
  if (name == copula_family_name(CopulaFamily::Independence)) {
    return CopulaFamily::Independence;
  }
  if (name == copula_family_name(CopulaFamily::Gaussian)) return CopulaFamily::Gaussian;
  if (name == copula_family_name(CopulaFamily::Student)) return CopulaFamily::Student;
  raise(Errc::MalformedRow, "unknown copula family \"" + name + "\"");
}

}  // namespace storecast
