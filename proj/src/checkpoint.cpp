#include "latentpriv/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "latentpriv/errors.hpp"

namespace latentpriv {

namespace {

using nlohmann::json;

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Matrix matrix_from_json(const json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  m.data = j.at("data").get<std::vector<double>>();
  if (m.data.size() != static_cast<std::size_t>(m.rows) * m.cols)
    throw std::invalid_argument("checkpoint: matrix shape/data mismatch");
  return m;
}

json mlp_to_json(const MlpClassifier& c) {
  return json{{"w1", matrix_to_json(c.w1)},
              {"b1", c.b1},
              {"w2", matrix_to_json(c.w2)},
              {"b2", c.b2}};
}

MlpClassifier mlp_from_json(const json& j) {
  MlpClassifier c;
  c.w1 = matrix_from_json(j.at("w1"));
  c.b1 = j.at("b1").get<Vec>();
  c.w2 = matrix_from_json(j.at("w2"));
  c.b2 = j.at("b2").get<Vec>();
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  json j;
  j["format_version"] = 1;
  j["seed"] = ckpt.config.seed;
  j["config"] = json{{"beta", ckpt.config.beta},
                     {"budget_b", ckpt.config.budget_b},
                     {"penalty_kappa", ckpt.config.penalty_kappa},
                     {"lr_filter", ckpt.config.lr_filter},
                     {"lr_adv", ckpt.config.lr_adv},
                     {"lr_util", ckpt.config.lr_util},
                     {"steps_adv", ckpt.config.steps_adv},
                     {"steps_util", ckpt.config.steps_util},
                     {"steps_filter", ckpt.config.steps_filter},
                     {"rounds", ckpt.config.rounds},
                     {"batch_size", ckpt.config.batch_size},
                     {"hidden", ckpt.config.hidden}};
  j["filter"] = json{{"d", ckpt.filter.d},
                     {"k_y", ckpt.filter.k_y},
                     {"a", matrix_to_json(ckpt.filter.a)}};
  j["adversary"] = mlp_to_json(ckpt.adversary);
  j["utility"] = mlp_to_json(ckpt.utility);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw NumericalError("save_checkpoint: cannot open " + path);
  out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load_checkpoint: cannot open " + path);
  json j;
  in >> j;
  if (j.at("format_version").get<int>() != 1)
    throw std::invalid_argument("load_checkpoint: unsupported format version");

  Checkpoint ckpt;
  const json& c = j.at("config");
  ckpt.config.seed = j.at("seed").get<std::uint64_t>();
  ckpt.config.beta = c.at("beta").get<double>();
  ckpt.config.budget_b = c.at("budget_b").get<double>();
  ckpt.config.penalty_kappa = c.at("penalty_kappa").get<double>();
  ckpt.config.lr_filter = c.at("lr_filter").get<double>();
  ckpt.config.lr_adv = c.at("lr_adv").get<double>();
  ckpt.config.lr_util = c.at("lr_util").get<double>();
  ckpt.config.steps_adv = c.at("steps_adv").get<int>();
  ckpt.config.steps_util = c.at("steps_util").get<int>();
  ckpt.config.steps_filter = c.at("steps_filter").get<int>();
  ckpt.config.rounds = c.at("rounds").get<int>();
  ckpt.config.batch_size = c.at("batch_size").get<int>();
  ckpt.config.hidden = c.at("hidden").get<int>();

  const json& f = j.at("filter");
  ckpt.filter = FilterParameters(f.at("d").get<int>(), f.at("k_y").get<int>());
  ckpt.filter.a = matrix_from_json(f.at("a"));
  ckpt.adversary = mlp_from_json(j.at("adversary"));
  ckpt.utility = mlp_from_json(j.at("utility"));
  return ckpt;
}

}  // namespace latentpriv
