#include "metaseg/cli.hpp"

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "metaseg/corpus_io.hpp"
#include "metaseg/gradcheck.hpp"
#include "metaseg/grammar.hpp"
#include "metaseg/gumbel.hpp"
#include "metaseg/interval_table.hpp"
#include "metaseg/metrics.hpp"
#include "metaseg/oracle_check.hpp"
#include "metaseg/segmenter.hpp"

namespace metaseg {

namespace {

using nlohmann::json;

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "n/a";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

struct GlobalOptions {
  std::string grammar_path;
  std::uint64_t seed = 0;
  std::string format = "tsv";

  bool json() const { return format == "json"; }
};

class Runner {
 public:
  Runner(const GlobalOptions& opts, std::ostream& out) : opts_(opts), out_(out) {}

  const MetaActionGrammar& grammar() {
    if (!grammar_) {
      grammar_ = opts_.grammar_path.empty() ? default_grammar()
                                            : load_grammar_file(opts_.grammar_path);
    }
    return *grammar_;
  }

  int segment(const std::string& corpus_path, bool with_stats) {
    const auto corpus = load_corpus(corpus_path);
    const auto& g = grammar();
    std::vector<Segmentation> segs;
    for (std::size_t i = 0; i < corpus.episodes.size(); ++i) {
      try {
        segs.push_back(metaseg::segment(g, encode_actions(corpus.episodes[i].trajectory)));
      } catch (const SegmentationIncomplete& e) {
        throw SegmentationIncomplete(e.prefix_length(), i);
      }
    }
    if (opts_.json()) {
      json doc;
      json list = json::array();
      for (std::size_t i = 0; i < segs.size(); ++i) {
        json segments = json::array();
        for (const auto& s : segs[i].segments) {
          segments.push_back({{"meta", g[static_cast<std::size_t>(s.meta_id)].name},
                              {"start", s.start},
                              {"end", s.end}});
        }
        list.push_back({{"id", corpus.episodes[i].id}, {"segments", std::move(segments)}});
      }
      doc["segmentations"] = std::move(list);
      if (with_stats) doc["stats"] = stats_json(g, summarize(g, segs));
      out_ << doc.dump(2) << '\n';
      return kExitOk;
    }
    for (std::size_t i = 0; i < segs.size(); ++i) {
      out_ << corpus.episodes[i].id << '\t' << format_segmentation(g, segs[i]) << '\n';
    }
    if (with_stats) print_stats(g, summarize(g, segs));
    return kExitOk;
  }

  int stats(const std::string& corpus_path) {
    const auto corpus = load_corpus(corpus_path);
    std::vector<ActionTrajectory> trajs;
    for (const auto& e : corpus.episodes) trajs.push_back(e.trajectory);
    const auto st = corpus_stats(grammar(), trajs);
    if (opts_.json()) {
      out_ << stats_json(grammar(), st).dump(2) << '\n';
    } else {
      print_stats(grammar(), st);
    }
    return kExitOk;
  }

  int table(const std::optional<std::string>& letters, const std::optional<std::string>& corpus_path) {
    const auto& g = grammar();
    std::vector<std::pair<std::string, ActionString>> inputs;
    if (letters) {
      inputs.emplace_back("", ActionString(*letters));
    } else {
      for (const auto& e : load_corpus(*corpus_path).episodes) {
        inputs.emplace_back(e.id, encode_actions(e.trajectory));
      }
    }
    json doc = json::array();
    for (const auto& [id, a] : inputs) {
      const auto t = build_table(g, a);
      if (opts_.json()) {
        json entries = json::array();
        for (const auto& iv : t.entries()) {
          entries.push_back({{"meta", g[static_cast<std::size_t>(iv.meta_id)].name},
                             {"start", iv.start},
                             {"end", iv.end}});
        }
        doc.push_back({{"id", id}, {"letters", a.str()}, {"entries", std::move(entries)}});
        continue;
      }
      if (!letters) out_ << "# " << id << '\n';
      for (const auto& iv : t.entries()) {
        out_ << g[static_cast<std::size_t>(iv.meta_id)].name << '\t' << iv.start << '\t' << iv.end
             << '\n';
      }
    }
    if (opts_.json()) out_ << (letters ? doc[0] : doc).dump(2) << '\n';
    return kExitOk;
  }

  int metrics(const std::string& corpus_path, double d_th) {
    const auto corpus = load_corpus(corpus_path);
    std::vector<EpisodeResult> results;
    for (std::size_t i = 0; i < corpus.episodes.size(); ++i) {
      results.push_back(to_episode_result(corpus.episodes[i], i));
    }
    double pc = 0.0, ls = 0.0, cls = 0.0;
    std::size_t with_paths = 0;
    for (const auto& r : results) {
      if (r.pred_path.empty() || r.ref_path.empty()) continue;
      const auto f = fidelity(r.pred_path, r.ref_path, d_th);
      pc += f.pc;
      ls += f.ls;
      cls += f.cls;
      ++with_paths;
    }
    const double nan = std::nan("");
    const double denom = static_cast<double>(with_paths);
    const std::vector<std::pair<std::string, double>> rows = {
        {"SR", success_rate(results)},
        {"GC", goal_condition_rate(results)},
        {"PLW-SR", plw_success_rate(results)},
        {"PLW-GC", plw_goal_condition_rate(results)},
        {"PC", with_paths ? pc / denom : nan},
        {"LS", with_paths ? ls / denom : nan},
        {"CLS", with_paths ? cls / denom : nan},
    };
    if (opts_.json()) {
      json doc;
      for (const auto& [k, v] : rows) doc[k] = std::isnan(v) ? json(nullptr) : json(v);
      out_ << doc.dump(2) << '\n';
    } else {
      for (const auto& [k, v] : rows) out_ << k << '\t' << fixed(v, 4) << '\n';
    }
    return kExitOk;
  }

  int gradcheck(std::size_t batches) {
    const auto cl = gradcheck_contrastive(batches, opts_.seed);
    const auto ce = gradcheck_cross_entropy(batches, opts_.seed + 1);
    const bool ok = cl.passed() && ce.passed();
    if (opts_.json()) {
      json doc = {{"contrastive_loss", {{"cases", cl.cases}, {"max_rel_error", cl.max_rel_error}}},
                  {"sequence_cross_entropy",
                   {{"cases", ce.cases}, {"max_rel_error", ce.max_rel_error}}},
                  {"tolerance", kGradCheckTolerance},
                  {"passed", ok}};
      out_ << doc.dump(2) << '\n';
    } else {
      out_ << "contrastive_loss\t" << sci(cl.max_rel_error) << '\n';
      out_ << "sequence_cross_entropy\t" << sci(ce.max_rel_error) << '\n';
    }
    return ok ? kExitOk : kExitValidation;
  }

  int gumbel(const std::vector<double>& logits, double tau, std::size_t draws) {
    const auto f = sample_frequencies(logits, tau, draws, opts_.seed);
    if (opts_.json()) {
      json doc = {{"frequencies", f.frequencies}, {"max_sum_error", f.max_sum_error},
                  {"draws", draws}, {"tau", tau}};
      out_ << doc.dump(2) << '\n';
      return kExitOk;
    }
    for (std::size_t k = 0; k < f.frequencies.size(); ++k) {
      out_ << "freq[" << k << "]\t" << fixed(f.frequencies[k], 6) << '\n';
    }
    out_ << "max_sum_error\t" << sci(f.max_sum_error) << '\n';
    return kExitOk;
  }

  int oracle_check(const OracleCheckOptions& o) {
    const auto rep = run_oracle_check(grammar(), o);
    if (opts_.json()) {
      json doc = {{"exhaustive_strings", rep.exhaustive_strings},
                  {"random_strings", rep.random_strings},
                  {"table_mismatches", rep.table_mismatches},
                  {"count_mismatches", rep.count_mismatches},
                  {"segmentation_mismatches", rep.segmentation_mismatches},
                  {"expand_failures", rep.expand_failures},
                  {"ok", rep.ok()}};
      out_ << doc.dump(2) << '\n';
    } else {
      out_ << "exhaustive_strings: " << rep.exhaustive_strings << '\n'
           << "random_strings: " << rep.random_strings << '\n'
           << "table_mismatches: " << rep.table_mismatches << '\n'
           << "count_mismatches: " << rep.count_mismatches << '\n'
           << "segmentation_mismatches: " << rep.segmentation_mismatches << '\n'
           << "expand_failures: " << rep.expand_failures << '\n';
      if (rep.first_failure) out_ << "first_failure: " << *rep.first_failure << '\n';
    }
    return rep.ok() ? kExitOk : kExitValidation;
  }

  int gen(std::size_t n, std::size_t mean_len, const std::string& output) {
    const auto corpus = generate_synthetic(opts_.seed, n, mean_len);
    if (output.empty() || output == "-") {
      out_ << dump_corpus(corpus);
    } else {
      save_corpus(corpus, output);
    }
    return kExitOk;
  }

 private:
  static json stats_json(const MetaActionGrammar& g, const SegmentationStats& st) {
    json hist = json::object();
    for (const auto& [id, count] : st.meta_histogram) hist[g[static_cast<std::size_t>(id)].name] = count;
    return {{"n_trajectories", st.n_trajectories},
            {"mean_la_length", st.mean_la_length},
            {"mean_ma_length", st.mean_ma_length},
            {"compression_ratio", st.compression_ratio},
            {"la_log10_branching", st.la_log10_branching},
            {"ma_log10_branching", st.ma_log10_branching},
            {"meta_histogram", std::move(hist)}};
  }

  void print_stats(const MetaActionGrammar& g, const SegmentationStats& st) {
    out_ << "n_trajectories: " << st.n_trajectories << '\n'
         << "mean_la_length: " << fixed(st.mean_la_length, 4) << '\n'
         << "mean_ma_length: " << fixed(st.mean_ma_length, 4) << '\n'
         << "compression_ratio: " << fixed(st.compression_ratio, 4) << '\n'
         << "la_log10_branching: " << fixed(st.la_log10_branching, 4) << '\n'
         << "ma_log10_branching: " << fixed(st.ma_log10_branching, 4) << '\n';
    for (const auto& m : g.metas()) {
      auto it = st.meta_histogram.find(m.id);
      out_ << "histogram[" << m.name << "]: " << (it == st.meta_histogram.end() ? 0 : it->second)
           << '\n';
    }
  }

  const GlobalOptions& opts_;
  std::ostream& out_;
  std::optional<MetaActionGrammar> grammar_;
};

std::vector<double> parse_logits(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw CLI::ValidationError("--logits", "not a number: '" + item + "'");
    }
    if (used != item.size()) throw CLI::ValidationError("--logits", "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--logits", "needs at least one value");
  return out;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Meta-action segmentation, alignment losses and evaluation metrics", "metaseg"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--grammar", g.grammar_path, "Grammar file (NAME<TAB>PATTERN per line)");
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"tsv", "json"}));

  std::string corpus_path;
  bool with_stats = false;
  auto* seg = app.add_subcommand("segment", "Segment every episode of a corpus");
  seg->add_option("corpus", corpus_path, "Corpus JSON file")->required();
  seg->add_flag("--stats", with_stats, "Append segmentation statistics");

  auto* stats = app.add_subcommand("stats", "Segmentation statistics for a corpus");
  stats->add_option("corpus", corpus_path, "Corpus JSON file")->required();

  std::string table_letters;
  std::string table_corpus;
  auto* table = app.add_subcommand("table", "Dump the match-interval table");
  auto* letters_opt = table->add_option("--letters", table_letters, "Letter string over mrludi");
  auto* table_corpus_opt = table->add_option("corpus", table_corpus, "Corpus JSON file");
  letters_opt->excludes(table_corpus_opt);
  table->require_option(1);

  double d_th = kDefaultDistanceThreshold;
  auto* metrics = app.add_subcommand("metrics", "SR, GC, PLW and path fidelity of a results file");
  metrics->add_option("corpus", corpus_path, "Results JSON file")->required();
  metrics->add_option("--dth", d_th, "Fidelity distance threshold")->check(CLI::PositiveNumber);

  std::size_t batches = 100;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  gradcheck->add_option("--batches", batches, "Random batches per loss");

  std::string logits_text;
  double tau = 1.0;
  std::size_t draws = 100000;
  auto* gumbel = app.add_subcommand("gumbel", "Empirical Gumbel-softmax frequencies");
  gumbel->add_option("--logits", logits_text, "Comma-separated logits")->required();
  gumbel->add_option("--tau", tau, "Temperature")->check(CLI::PositiveNumber);
  gumbel->add_option("--draws", draws, "Number of draws");

  OracleCheckOptions oracle;
  auto* oc = app.add_subcommand("oracle-check", "Compare DP and table builder with brute force");
  oc->add_option("--max-len", oracle.max_exhaustive_len, "Exhaustive length bound")
      ->check(CLI::Range(0, 9));
  oc->add_option("--random", oracle.random_cases, "Random strings to check");
  oc->add_option("--min-random-len", oracle.random_min_len, "Shortest random string");
  oc->add_option("--max-random-len", oracle.random_max_len, "Longest random string")
      ->check(CLI::Range(1, 24));

  std::size_t gen_n = 10;
  std::size_t gen_mean = 50;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic corpus");
  gen->add_option("--n", gen_n, "Number of episodes")->check(CLI::PositiveNumber);
  gen->add_option("--mean-len", gen_mean, "Mean episode length")->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", gen_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
    if (oracle.random_min_len > oracle.random_max_len || oracle.random_min_len == 0) {
      throw CLI::ValidationError("--min-random-len", "must be in [1, --max-random-len]");
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    Runner run(g, out);
    if (*seg) return run.segment(corpus_path, with_stats);
    if (*stats) return run.stats(corpus_path);
    if (*table) {
      return run.table(*letters_opt ? std::optional(table_letters) : std::nullopt,
                       *table_corpus_opt ? std::optional(table_corpus) : std::nullopt);
    }
    if (*metrics) return run.metrics(corpus_path, d_th);
    if (*gradcheck) return run.gradcheck(batches);
    if (*gumbel) {
      std::vector<double> logits;
      try {
        logits = parse_logits(logits_text);
      } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kExitUsage;
      }
      return run.gumbel(logits, tau, draws);
    }
    if (*oc) {
      oracle.seed = g.seed;
      return run.oracle_check(oracle);
    }
    if (*gen) return run.gen(gen_n, gen_mean, gen_out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace metaseg
