#include "fwgames/game_io.hpp"

#include <fstream>
#include <string>

#include "fwgames/error.hpp"

namespace fwg {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::ConfigError, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) config_error(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <typename T>
T get_as(const json& j, const char* what) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    config_error(std::string("bad value for ") + what + ": " + e.what());
  }
}

// Accepts either a flat array or an arbitrarily nested one; nesting is
// flattened row-major.
void flatten_into(const json& j, std::vector<double>& out, const char* what) {
  if (j.is_array()) {
    for (const auto& x : j) flatten_into(x, out, what);
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    config_error(std::string("non-numeric entry in ") + what);
  }
}

std::vector<double> flat_array(const json& j, const char* what) {
  if (!j.is_array()) config_error(std::string(what) + " must be an array");
  std::vector<double> out;
  flatten_into(j, out, what);
  return out;
}

std::vector<std::size_t> counts_of(const json& j) {
  return get_as<std::vector<std::size_t>>(field(j, "action_counts"), "action_counts");
}

Game normal_form_from_json(const json& j) {
  auto counts = counts_of(j);
  const auto& costs_j = field(j, "costs");
  if (!costs_j.is_array()) config_error("costs must be an array");
  std::vector<std::vector<double>> costs;
  for (const auto& c : costs_j) costs.push_back(flat_array(c, "costs"));
  std::optional<std::vector<double>> potential;
  if (j.contains("potential")) potential = flat_array(j.at("potential"), "potential");
  const NoiseModel noise = j.contains("noise") ? noise_from_json(j.at("noise")) : NoiseModel{};
  return NormalFormPotentialGame(std::move(counts), std::move(costs), std::move(potential), noise);
}

Game congestion_from_json(const json& j) {
  const auto n = get_as<std::size_t>(field(j, "num_players"), "num_players");
  const auto d = get_as<std::size_t>(field(j, "num_resources"), "num_resources");
  auto sets = get_as<std::vector<std::vector<ResourceSet>>>(field(j, "action_sets"), "action_sets");
  auto fc = get_as<std::vector<std::vector<double>>>(field(j, "facility_costs"), "facility_costs");
  const NoiseModel noise = j.contains("noise") ? noise_from_json(j.at("noise")) : NoiseModel{};
  return CongestionGame(n, d, std::move(sets), std::move(fc), noise);
}

Game markov_from_json(const json& j) {
  const auto S = get_as<std::size_t>(field(j, "num_states"), "num_states");
  auto counts = counts_of(j);
  const JointActionIndexer idx(counts);
  const std::size_t J = idx.total();

  std::vector<std::vector<std::vector<double>>> costs;
  for (const auto& per_player : field(j, "costs")) {
    const auto flat = flat_array(per_player, "costs");
    if (flat.size() != S * J) config_error("markov costs must have S x joint entries per player");
    auto& table = costs.emplace_back(S);
    for (std::size_t s = 0; s < S; ++s) table[s].assign(flat.begin() + s * J, flat.begin() + (s + 1) * J);
  }

  const auto tflat = flat_array(field(j, "transitions"), "transitions");
  if (tflat.size() != S * J * S) config_error("transitions must have S x joint x S entries");
  std::vector<std::vector<std::vector<double>>> trans(S, std::vector<std::vector<double>>(J));
  for (std::size_t s = 0; s < S; ++s)
    for (std::size_t a = 0; a < J; ++a) {
      const auto it = tflat.begin() + (s * J + a) * S;
      trans[s][a].assign(it, it + S);
    }

  std::vector<std::vector<double>> stop(S, std::vector<double>(J));
  const auto& sj = field(j, "stop_prob");
  if (sj.is_number()) {
    for (auto& row : stop) std::fill(row.begin(), row.end(), sj.get<double>());
  } else {
    const auto sflat = flat_array(sj, "stop_prob");
    if (sflat.size() != S * J) config_error("stop_prob must be a number or have S x joint entries");
    for (std::size_t s = 0; s < S; ++s) stop[s].assign(sflat.begin() + s * J, sflat.begin() + (s + 1) * J);
  }

  auto init = get_as<std::vector<double>>(field(j, "init_dist"), "init_dist");
  std::optional<std::size_t> cap;
  if (j.contains("horizon_cap") && !j.at("horizon_cap").is_null())
    cap = get_as<std::size_t>(j.at("horizon_cap"), "horizon_cap");
  const NoiseModel noise = j.contains("noise") ? noise_from_json(j.at("noise")) : NoiseModel{};
  const double scale = j.value("cost_scale", 1.0);
  return MarkovGame(S, std::move(counts), std::move(costs), std::move(trans), std::move(stop),
                    std::move(init), cap, noise, scale);
}

}  // namespace

NoiseModel noise_from_json(const json& j) {
  NoiseModel m;
  const std::string kind = j.is_string() ? j.get<std::string>()
                                         : get_as<std::string>(field(j, "kind"), "noise kind");
  if (kind == "deterministic") {
    m.kind = NoiseModel::Kind::deterministic;
  } else if (kind == "bernoulli") {
    m.kind = NoiseModel::Kind::bernoulli;
  } else if (kind == "truncated_gaussian") {
    m.kind = NoiseModel::Kind::truncated_gaussian;
    m.sigma = get_as<double>(field(j, "sigma"), "sigma");
    if (!(m.sigma >= 0.0)) config_error("sigma must be nonnegative");
  } else {
    config_error("unknown noise kind \"" + kind + "\"");
  }
  return m;
}

json noise_to_json(const NoiseModel& noise) {
  switch (noise.kind) {
    case NoiseModel::Kind::deterministic: return {{"kind", "deterministic"}};
    case NoiseModel::Kind::bernoulli: return {{"kind", "bernoulli"}};
    case NoiseModel::Kind::truncated_gaussian:
      return {{"kind", "truncated_gaussian"}, {"sigma", noise.sigma}};
  }
  return nullptr;
}

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.is_null()) return c;
  if (!j.is_object()) config_error("experiment overrides must be an object");
  if (j.contains("num_players")) c.num_players = get_as<std::size_t>(j.at("num_players"), "num_players");
  if (j.contains("weights")) c.weights = get_as<std::vector<double>>(j.at("weights"), "weights");
  if (j.contains("penalty")) c.penalty = get_as<double>(j.at("penalty"), "penalty");
  if (j.contains("penalty_mode")) {
    const auto mode = get_as<std::string>(j.at("penalty_mode"), "penalty_mode");
    if (mode == "additive")
      c.penalty_mode = ExperimentConfig::Penalty::additive;
    else if (mode == "multiplicative")
      c.penalty_mode = ExperimentConfig::Penalty::multiplicative;
    else
      config_error("unknown penalty_mode \"" + mode + "\"");
  }
  if (j.contains("crowd_threshold"))
    c.crowd_threshold = get_as<std::size_t>(j.at("crowd_threshold"), "crowd_threshold");
  if (j.contains("spread_threshold"))
    c.spread_threshold = get_as<std::size_t>(j.at("spread_threshold"), "spread_threshold");
  if (j.contains("continuation")) c.continuation = get_as<double>(j.at("continuation"), "continuation");
  if (j.contains("literal_stopping"))
    c.literal_stopping = get_as<bool>(j.at("literal_stopping"), "literal_stopping");
  if (j.contains("horizon_cap")) {
    if (j.at("horizon_cap").is_null())
      c.horizon_cap.reset();
    else
      c.horizon_cap = get_as<std::size_t>(j.at("horizon_cap"), "horizon_cap");
  }
  if (j.contains("noise")) c.noise = noise_from_json(j.at("noise"));
  return c;
}

json experiment_config_to_json(const ExperimentConfig& c) {
  json j = {{"num_players", c.num_players},   {"weights", c.weights},
            {"penalty", c.penalty},           {"continuation", c.continuation},
            {"penalty_mode", c.penalty_mode == ExperimentConfig::Penalty::additive ? "additive"
                                                                                  : "multiplicative"},
            {"literal_stopping", c.literal_stopping}, {"noise", noise_to_json(c.noise)}};
  j["horizon_cap"] = c.horizon_cap ? json(*c.horizon_cap) : json(nullptr);
  if (c.crowd_threshold) j["crowd_threshold"] = *c.crowd_threshold;
  if (c.spread_threshold) j["spread_threshold"] = *c.spread_threshold;
  return j;
}

Game game_from_json(const json& j) {
  if (!j.is_object()) config_error("game definition must be a JSON object");
  try {
    if (j.contains("builtin")) {
      const auto name = get_as<std::string>(j.at("builtin"), "builtin");
      if (name != "experiment") config_error("unknown builtin game \"" + name + "\"");
      json overrides = j;
      overrides.erase("builtin");
      return build_experiment_game(experiment_config_from_json(overrides));
    }
    const auto kind = get_as<std::string>(field(j, "kind"), "kind");
    if (kind == "normal_form") return normal_form_from_json(j);
    if (kind == "congestion") return congestion_from_json(j);
    if (kind == "markov") return markov_from_json(j);
    config_error("unknown game kind \"" + kind + "\"");
  } catch (const Error& e) {
    // Constructor validation failures are configuration errors at this boundary.
    if (e.code() == Errc::ConfigError) throw;
    config_error(e.what());
  } catch (const json::exception& e) {
    config_error(e.what());
  }
}

json game_to_json(const Game& game) {
  return std::visit(
      [](const auto& g) -> json {
        using G = std::decay_t<decltype(g)>;
        json j;
        if constexpr (std::is_same_v<G, NormalFormPotentialGame>) {
          j["kind"] = "normal_form";
          j["action_counts"] = g.indexer().counts();
          json costs = json::array();
          for (std::size_t i = 0; i < g.num_players(); ++i) costs.push_back(g.cost_table(i));
          j["costs"] = costs;
          if (g.has_explicit_potential()) j["potential"] = g.potential_table();
        } else if constexpr (std::is_same_v<G, CongestionGame>) {
          j["kind"] = "congestion";
          j["num_players"] = g.num_players();
          j["num_resources"] = g.num_resources();
          json sets = json::array();
          for (std::size_t i = 0; i < g.num_players(); ++i) sets.push_back(g.action_set(i));
          j["action_sets"] = sets;
          j["facility_costs"] = g.facility_costs();
        } else {
          const std::size_t S = g.num_states();
          const std::size_t J = g.indexer().total();
          j["kind"] = "markov";
          j["num_states"] = S;
          j["action_counts"] = g.indexer().counts();
          json costs = json::array(), trans = json::array(), stop = json::array();
          for (std::size_t i = 0; i < g.num_players(); ++i) {
            json per_state = json::array();
            for (std::size_t s = 0; s < S; ++s) {
              std::vector<double> row(J);
              for (std::size_t a = 0; a < J; ++a) row[a] = g.cost(i, s, a);
              per_state.push_back(row);
            }
            costs.push_back(per_state);
          }
          for (std::size_t s = 0; s < S; ++s) {
            json rows = json::array();
            std::vector<double> st(J);
            for (std::size_t a = 0; a < J; ++a) {
              const auto p = g.transition(s, a);
              rows.push_back(std::vector<double>(p.begin(), p.end()));
              st[a] = g.stop_prob(s, a);
            }
            trans.push_back(rows);
            stop.push_back(st);
          }
          j["costs"] = costs;
          j["transitions"] = trans;
          j["stop_prob"] = stop;
          j["init_dist"] = g.init_dist();
          j["horizon_cap"] = g.horizon_cap() ? json(*g.horizon_cap()) : json(nullptr);
          j["cost_scale"] = g.cost_scale();
        }
        j["noise"] = noise_to_json(g.noise());
        return j;
      },
      game);
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    config_error("cannot parse " + path.string() + ": " + e.what());
  }
}

Game load_game(const std::filesystem::path& path) { return game_from_json(read_json_file(path)); }

void save_game(const Game& game, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) config_error("cannot write " + path.string());
  out << game_to_json(game).dump(1) << '\n';
}

}  // namespace fwg
