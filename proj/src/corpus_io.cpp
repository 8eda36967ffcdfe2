#include "metaseg/corpus_io.hpp"

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace metaseg {

using nlohmann::json;

SchemaError::SchemaError(std::string field, std::optional<std::size_t> episode,
                         const std::string& message)
    : Error((episode ? "episode " + std::to_string(*episode) + ": " : std::string()) + field +
            ": " + message),
      field_(std::move(field)),
      episode_(episode) {}

InvariantViolation::InvariantViolation(std::size_t episode, std::string reason)
    : Error("episode " + std::to_string(episode) + ": " + reason),
      episode_(episode),
      reason_(std::move(reason)) {}

namespace {

class EpisodeReader {
 public:
  EpisodeReader(const json& obj, std::size_t index) : obj_(obj), index_(index) {}

  [[noreturn]] void fail(const std::string& field, const std::string& msg) const {
    throw SchemaError(field, index_, msg);
  }

  const json* get(const char* key, bool required) const {
    auto it = obj_.find(key);
    if (it == obj_.end()) {
      if (required) fail(key, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::string string_field(const char* key) const {
    const json* v = get(key, true);
    if (!v->is_string()) fail(key, "expected a string");
    return v->get<std::string>();
  }

  std::vector<std::string> string_list(const char* key) const {
    const json* v = get(key, true);
    if (!v->is_array()) fail(key, "expected an array");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& item = (*v)[i];
      if (!item.is_string()) fail(indexed(key, i), "expected a string");
      out.push_back(item.get<std::string>());
    }
    return out;
  }

  std::vector<int> int_list(const char* key) const {
    const json* v = get(key, true);
    if (!v->is_array()) fail(key, "expected an array");
    std::vector<int> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& item = (*v)[i];
      if (!item.is_number_integer()) fail(indexed(key, i), "expected an integer");
      const auto value = item.get<long long>();
      if (value < INT32_MIN || value > INT32_MAX) fail(indexed(key, i), "integer out of range");
      out.push_back(static_cast<int>(value));
    }
    return out;
  }

  std::optional<std::vector<bool>> bool_list(const char* key) const {
    const json* v = get(key, false);
    if (!v) return std::nullopt;
    if (!v->is_array()) fail(key, "expected an array");
    std::vector<bool> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& item = (*v)[i];
      if (!item.is_boolean()) fail(indexed(key, i), "expected a boolean");
      out.push_back(item.get<bool>());
    }
    return out;
  }

  std::optional<Path> path(const char* key) const {
    const json* v = get(key, false);
    if (!v) return std::nullopt;
    if (!v->is_array()) fail(key, "expected an array of [x, y] points");
    Path out;
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& p = (*v)[i];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
        fail(indexed(key, i), "expected [x, y]");
      }
      out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    return out;
  }

  std::optional<double> number(const char* key) const {
    const json* v = get(key, false);
    if (!v) return std::nullopt;
    if (!v->is_number()) fail(key, "expected a number");
    const double d = v->get<double>();
    if (!(d >= 0.0)) fail(key, "expected a non-negative number");
    return d;
  }

  std::vector<LowLevelAction> actions() const {
    const auto names = string_list("actions");
    std::vector<LowLevelAction> out;
    out.reserve(names.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto a = parse_action_name(names[i]);
      if (!a) fail(indexed("actions", i), "unknown action name '" + names[i] + "'");
      out.push_back(*a);
    }
    return out;
  }

 private:
  static std::string indexed(const char* key, std::size_t i) {
    return std::string(key) + "[" + std::to_string(i) + "]";
  }

  const json& obj_;
  std::size_t index_;
};

Episode read_episode(const json& obj, std::size_t index) {
  if (!obj.is_object()) throw SchemaError("episodes[" + std::to_string(index) + "]", index, "expected an object");
  EpisodeReader r(obj, index);
  Episode e;
  e.id = r.string_field("id");
  auto& t = e.trajectory;
  t.goal_text = r.string_field("goal");
  t.sub_goals = r.string_list("sub_goals");
  t.actions = r.actions();
  t.subgoal_index = r.int_list("subgoal_index");
  t.poses = r.path("poses");
  t.goal_conditions = r.bool_list("goal_conditions");
  e.pred_path = r.path("pred_path");
  e.ref_path = r.path("ref_path");
  e.pred_len = r.number("pred_len");
  e.ref_len = r.number("ref_len");
  return e;
}

json path_json(const Path& p) {
  json arr = json::array();
  for (const auto& pt : p) arr.push_back(json::array({pt.x, pt.y}));
  return arr;
}

json episode_json(const Episode& e) {
  const auto& t = e.trajectory;
  json obj;
  obj["id"] = e.id;
  obj["goal"] = t.goal_text;
  obj["sub_goals"] = t.sub_goals;
  json names = json::array();
  for (auto a : t.actions) names.push_back(std::string(action_name(a)));
  obj["actions"] = std::move(names);
  obj["subgoal_index"] = t.subgoal_index;
  if (t.poses) obj["poses"] = path_json(*t.poses);
  if (t.goal_conditions) obj["goal_conditions"] = *t.goal_conditions;
  if (e.pred_path) obj["pred_path"] = path_json(*e.pred_path);
  if (e.ref_path) obj["ref_path"] = path_json(*e.ref_path);
  if (e.pred_len) obj["pred_len"] = *e.pred_len;
  if (e.ref_len) obj["ref_len"] = *e.ref_len;
  return obj;
}

}  // namespace

CorpusFile parse_corpus(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("<document>", std::nullopt, e.what());
  }
  if (!doc.is_object()) throw SchemaError("<document>", std::nullopt, "expected a JSON object");

  CorpusFile corpus;
  auto version = doc.find("version");
  if (version == doc.end() || !version->is_string()) {
    throw SchemaError("version", std::nullopt, "missing or not a string");
  }
  corpus.version = version->get<std::string>();
  if (corpus.version != kCorpusVersion) {
    throw SchemaError("version", std::nullopt, "unsupported version '" + corpus.version + "'");
  }
  auto episodes = doc.find("episodes");
  if (episodes == doc.end() || !episodes->is_array()) {
    throw SchemaError("episodes", std::nullopt, "missing or not an array");
  }
  corpus.episodes.reserve(episodes->size());
  for (std::size_t i = 0; i < episodes->size(); ++i) {
    corpus.episodes.push_back(read_episode((*episodes)[i], i));
    if (auto why = check_invariants(corpus.episodes.back().trajectory)) {
      throw InvariantViolation(i, *why);
    }
  }
  return corpus;
}

CorpusFile load_corpus(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open corpus file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("error reading corpus file '" + path + "'");
  return parse_corpus(buf.str());
}

std::string dump_corpus(const CorpusFile& corpus) {
  json doc;
  doc["version"] = corpus.version;
  json eps = json::array();
  for (const auto& e : corpus.episodes) eps.push_back(episode_json(e));
  doc["episodes"] = std::move(eps);
  return doc.dump(2) + "\n";
}

void save_corpus(const CorpusFile& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write corpus file '" + path + "'");
  out << dump_corpus(corpus);
  if (!out) throw IoError("error writing corpus file '" + path + "'");
}

EpisodeResult to_episode_result(const Episode& e, std::size_t index) {
  if (!e.trajectory.goal_conditions) {
    throw SchemaError("goal_conditions", index, "required for metrics");
  }
  EpisodeResult r;
  r.goal_conditions = *e.trajectory.goal_conditions;
  if (e.pred_path) r.pred_path = *e.pred_path;
  if (e.ref_path) r.ref_path = *e.ref_path;
  r.pred_length = e.pred_len.value_or(path_length(r.pred_path));
  r.ref_length = e.ref_len.value_or(path_length(r.ref_path));
  return r;
}

Path replay_poses(const std::vector<LowLevelAction>& actions) {
  static constexpr int kDx[4] = {0, 1, 0, -1};
  static constexpr int kDy[4] = {1, 0, -1, 0};
  Path out;
  out.reserve(actions.size() + 1);
  int x = 0;
  int y = 0;
  int heading = 0;
  out.push_back({0.0, 0.0});
  for (auto a : actions) {
    switch (a) {
      case LowLevelAction::MoveAhead:
        x += kDx[heading];
        y += kDy[heading];
        break;
      case LowLevelAction::RotateRight: heading = (heading + 1) % 4; break;
      case LowLevelAction::RotateLeft: heading = (heading + 3) % 4; break;
      default: break;
    }
    out.push_back({static_cast<double>(x), static_cast<double>(y)});
  }
  return out;
}

namespace {

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

LowLevelAction random_interaction(Rng& rng) {
  return kAllLowLevelActions[uniform(rng, 5, kNumLowLevelActions - 1)];
}

// Appends one behavioural chunk: a move run, a turn, a side step, and so on.
void append_chunk(Rng& rng, std::vector<LowLevelAction>& out) {
  using A = LowLevelAction;
  static const std::discrete_distribution<int> kind({35, 15, 8, 6, 3, 8, 25});
  const A left = A::RotateLeft;
  const A right = A::RotateRight;
  switch (std::discrete_distribution<int>(kind)(rng)) {
    case 0:  // walk
      out.insert(out.end(), uniform(rng, 1, 6), A::MoveAhead);
      break;
    case 1:  // single turn
      out.push_back(coin(rng, 0.5) ? left : right);
      break;
    case 2: {  // side step
      const bool to_left = coin(rng, 0.5);
      out.push_back(to_left ? left : right);
      out.insert(out.end(), uniform(rng, 0, 3), A::MoveAhead);
      out.push_back(to_left ? right : left);
      break;
    }
    case 3: {  // turn around
      const A dir = coin(rng, 0.5) ? left : right;
      out.push_back(dir);
      if (coin(rng, 0.3)) out.push_back(A::MoveAhead);
      out.push_back(dir);
      break;
    }
    case 4: {  // back up
      const A first = coin(rng, 0.5) ? left : right;
      const A second = coin(rng, 0.5) ? left : right;
      out.insert(out.end(), 2, first);
      out.insert(out.end(), uniform(rng, 1, 3), A::MoveAhead);
      out.insert(out.end(), 2, second);
      break;
    }
    case 5:  // look
      out.insert(out.end(), uniform(rng, 1, 2), coin(rng, 0.5) ? A::LookUp : A::LookDown);
      break;
    default: {  // interact
      const auto n = uniform(rng, 1, 3);
      for (std::size_t i = 0; i < n; ++i) out.push_back(random_interaction(rng));
      break;
    }
  }
}

// Replays `actions` with occasional extra moves and turns, as a stand-in for
// an imperfect agent.
Path noisy_replay(Rng& rng, const std::vector<LowLevelAction>& actions) {
  std::vector<LowLevelAction> agent;
  agent.reserve(actions.size() + actions.size() / 4);
  for (auto a : actions) {
    if (coin(rng, 0.1)) {
      agent.push_back(coin(rng, 0.5) ? LowLevelAction::MoveAhead
                                     : (coin(rng, 0.5) ? LowLevelAction::RotateLeft
                                                       : LowLevelAction::RotateRight));
    }
    agent.push_back(a);
  }
  return replay_poses(agent);
}

}  // namespace

CorpusFile generate_synthetic(std::uint64_t seed, std::size_t n, std::size_t mean_len) {
  Rng rng(seed);
  CorpusFile corpus;
  corpus.episodes.reserve(n);
  const std::size_t lo = std::max<std::size_t>(1, (mean_len + 1) / 2);
  const std::size_t hi = std::max(lo, mean_len + mean_len / 2);
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t target = uniform(rng, lo, hi);
    std::vector<LowLevelAction> actions;
    while (actions.size() < target) append_chunk(rng, actions);
    actions.resize(target);

    Episode ep;
    char id[32];
    std::snprintf(id, sizeof id, "syn-%05zu", e);
    ep.id = id;
    auto& t = ep.trajectory;
    t.goal_text = "synthetic task " + std::to_string(e);
    t.actions = std::move(actions);

    int sub = 0;
    for (std::size_t i = 0; i < t.actions.size(); ++i) {
      t.subgoal_index.push_back(sub);
      const bool ends_cluster = is_interaction(t.actions[i]) && i + 1 < t.actions.size() &&
                                !is_interaction(t.actions[i + 1]);
      if (ends_cluster) ++sub;
    }
    const int n_sub = t.actions.empty() ? 0 : sub + 1;
    for (int s = 0; s < n_sub; ++s) t.sub_goals.push_back("sub-goal " + std::to_string(s));

    t.poses = replay_poses(t.actions);
    std::vector<bool> conditions(uniform(rng, 1, 4));
    for (std::size_t c = 0; c < conditions.size(); ++c) conditions[c] = coin(rng, 0.8);
    t.goal_conditions = std::move(conditions);

    ep.ref_path = t.poses;
    ep.pred_path = noisy_replay(rng, t.actions);
    corpus.episodes.push_back(std::move(ep));
  }
  return corpus;
}

}  // namespace metaseg
