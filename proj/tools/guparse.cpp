#include <CLI11.hpp>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <sstream>

#include "gu/parser.hpp"
#include "gu/reader.hpp"
#include "gu/writer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Options {
  std::string grammar;
  std::string lexicon;
  std::string tagprobs;
  std::string input;
  double uthresh = 0.7;
  double athresh = 0.6;
  std::string weights = "0.5,0.3,0.2";
  int n_best = 5;
  bool trace = false;
  std::string format = "text";
  int max_steps = 100000;
};

gu::ParserConfig make_config(const Options& o) {
  gu::ParserConfig cfg;
  cfg.unification_threshold = o.uthresh;
  cfg.activation_threshold = o.athresh;
  cfg.max_agenda_steps = o.max_steps;
  std::istringstream ss(o.weights);
  std::string part;
  std::vector<double> w;
  while (std::getline(ss, part, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(part, &used));
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw std::runtime_error(fmt::format("--weights: '{}' is not a number", part));
    }
  }
  if (w.size() != 3) throw std::runtime_error("--weights expects three values: w1,w2,w3");
  cfg.w_strength = w[0];
  cfg.w_active = w[1];
  cfg.w_inactive = w[2];
  cfg.validate();
  return cfg;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> toks;
  std::string t;
  while (ss >> t) toks.push_back(t);
  return toks;
}

// --input names either a file of sentences (one per line) or a literal
// sentence.
std::vector<std::vector<std::string>> read_sentences(const std::string& input) {
  std::vector<std::vector<std::string>> out;
  std::error_code ec;
  if (fs::is_regular_file(input, ec)) {
    std::ifstream in(input);
    if (!in) throw std::runtime_error(fmt::format("cannot read file '{}'", input));
    std::string line;
    while (std::getline(in, line)) {
      auto toks = tokenize(line);
      if (!toks.empty()) out.push_back(std::move(toks));
    }
  } else {
    auto toks = tokenize(input);
    if (!toks.empty()) out.push_back(std::move(toks));
  }
  return out;
}

struct SentenceResult {
  std::vector<std::string> tokens;
  std::optional<gu::ParseReport> report;
  std::string error;
};

std::vector<SentenceResult> parse_batch(const gu::ChartParser& parser,
                                        const std::vector<std::vector<std::string>>& sentences,
                                        const gu::LexActivations& acts) {
  std::vector<std::future<SentenceResult>> futures;
  futures.reserve(sentences.size());
  for (const auto& toks : sentences) {
    futures.push_back(std::async(std::launch::async, [&parser, &acts, toks]() {
      SentenceResult r;
      r.tokens = toks;
      try {
        r.report = parser.parse(toks, acts);
      } catch (const std::exception& e) {
        r.error = e.what();
      }
      return r;
    }));
  }
  std::vector<SentenceResult> out;
  out.reserve(futures.size());
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

std::string join(const std::vector<std::string>& toks) {
  std::string s;
  for (const auto& t : toks) {
    if (!s.empty()) s += " ";
    s += t;
  }
  return s;
}

int emit_results(const std::vector<SentenceResult>& results, const Options& o) {
  bool all_parsed = !results.empty();
  for (const auto& r : results)
    if (!r.report || r.report->parses.empty()) all_parsed = false;
  if (results.empty()) all_parsed = true;  // nothing asked, nothing failed

  if (o.format == "json") {
    json out;
    out["sentences"] = json::array();
    for (const auto& r : results) {
      json j;
      if (r.report) {
        j = gu::report_json(*r.report, o.n_best, o.trace);
      } else {
        j["error"] = r.error;
        j["parses"] = json::array();
        j["tokens"] = r.tokens;
      }
      j["sentence"] = join(r.tokens);
      out["sentences"].push_back(std::move(j));
    }
    fmt::print("{}\n", out.dump(2));
  } else {
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& r = results[i];
      if (results.size() > 1) fmt::print("== sentence {} ==\n", i + 1);
      if (!r.report) {
        fmt::print("tokens: {}\nerror: {}\n", join(r.tokens), r.error);
        continue;
      }
      fmt::print("{}", gu::report_text(*r.report, o.n_best, o.trace));
    }
  }
  return all_parsed ? 0 : 2;
}

int run_parse_cmd(const Options& o) {
  gu::Grammar grammar = gu::load_grammar(o.grammar);
  gu::Lexicon lexicon = gu::load_lexicon(o.lexicon);
  gu::LexActivations acts;
  if (!o.tagprobs.empty())
    acts = gu::bind_tag_probs(gu::load_tag_probs(o.tagprobs), lexicon);
  gu::ChartParser parser(std::move(grammar), std::move(lexicon), make_config(o));
  auto sentences = read_sentences(o.input);
  return emit_results(parse_batch(parser, sentences, acts), o);
}

// ---------------------------------------------------------------------------
// demo: the bundled reduced-relative / main-clause competition

std::string demo_assets_dir(const std::string& flag) {
  std::vector<fs::path> candidates;
  if (!flag.empty()) {
    candidates.push_back(flag);
  } else {
    candidates.push_back("data");
    std::error_code ec;
    fs::path exe = fs::read_symlink("/proc/self/exe", ec);
    if (!ec) {
      candidates.push_back(exe.parent_path() / ".." / "data");
      candidates.push_back(exe.parent_path() / "data");
    }
  }
  for (const auto& c : candidates) {
    std::error_code ec;
    if (fs::is_regular_file(c / "demo.gu", ec)) return c.string();
  }
  throw std::runtime_error(
      "cannot locate the demo assets (demo.gu etc.); pass --assets DIR");
}

// The entry a ranked parse chose for a given token, e.g. "recognized/vbn".
std::string entry_for_token(const gu::ParseTree& t, int token) {
  if (t.children.empty() && t.start == token && !t.token.empty()) return t.label;
  for (const auto& c : t.children) {
    if (c.start <= token && token < c.end) {
      auto r = entry_for_token(c, token);
      if (!r.empty()) return r;
    }
  }
  return "";
}

struct Analysis {
  bool found = false;
  double activation = 0.0;
  int edge = -1;
};

int run_demo_cmd(const Options& o, const std::string& assets_flag) {
  std::string dir = demo_assets_dir(assets_flag);
  gu::Grammar grammar = gu::load_grammar(dir + "/demo.gu");
  gu::Lexicon lexicon = gu::load_lexicon(dir + "/demo.gul");
  auto probs = gu::load_tag_probs(dir + "/demo.gup");
  gu::LexActivations acts = gu::bind_tag_probs(probs, lexicon);
  gu::ChartParser parser(std::move(grammar), std::move(lexicon), make_config(o));

  fmt::print("demo: reduced-relative vs. main-clause competition\n");
  fmt::print("assets: {}\n", dir);
  fmt::print("config: uthresh {}  athresh {}  weights {}\n", o.uthresh, o.athresh,
             o.weights);
  fmt::print("tag-prob activations for 'recognized': past-tense {}  participle {}\n\n",
             acts.get(2, "recognized/vbd"), acts.get(2, "recognized/vbn"));

  const std::vector<std::string> subjects = {"van", "man"};
  bool all_parsed = true;
  for (const auto& subj : subjects) {
    std::vector<std::string> tokens = {"the", subj,  "recognized", "by",
                                       "the", "spy", "took",       "off"};
    gu::ParseReport report = parser.parse(tokens, acts);
    fmt::print("sentence: {}\n", join(tokens));
    if (report.parses.empty()) {
      fmt::print("  no spanning parse\n\n");
      all_parsed = false;
      continue;
    }

    // Classify every spanning parse by the lexical entry it chose for
    // "recognized" (token 2).
    Analysis reduced, main_clause;
    for (const auto& rp : gu::extract_parses(report, 0)) {
      std::string entry = entry_for_token(rp.tree, 2);
      Analysis* a = nullptr;
      if (entry == "recognized/vbn") a = &reduced;
      if (entry == "recognized/vbd") a = &main_clause;
      if (a && (!a->found || rp.activation > a->activation))
        *a = Analysis{true, rp.activation, rp.edge};
    }
    const char* winner = reduced.activation >= main_clause.activation
                             ? "reduced-relative"
                             : "main-clause";
    fmt::print("  winner: {}\n", winner);
    if (reduced.found)
      fmt::print("    reduced-relative  activation {}\n", reduced.activation);
    if (main_clause.found)
      fmt::print("    main-clause       activation {}\n", main_clause.activation);
    if (reduced.found && main_clause.found)
      fmt::print("    margin {}\n", std::abs(reduced.activation - main_clause.activation));

    // Which readings of the verb region survived to the end of the
    // by-phrase? Look for incorporated inactive edges spanning tokens 2..6.
    bool part_alive = false, past_alive = false;
    for (int id : report.chart.chart_edges()) {
      const gu::Edge& e = report.chart.edge(id);
      if (!e.inactive() || e.start != 2 || e.end != 6) continue;
      std::string entry = entry_for_token(gu::build_tree(report, id), 2);
      if (entry == "recognized/vbn") part_alive = true;
      if (entry == "recognized/vbd") past_alive = true;
    }
    fmt::print("  alive across the by-phrase (span 2..6): participle {}  past-tense {}\n",
               part_alive ? "yes" : "no", past_alive ? "yes" : "no");
    fmt::print("  best tree: {}\n\n",
               gu::render_tree(gu::extract_parses(report, 1).front().tree));
  }
  return all_parsed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graded-unification chart parser"};
  app.require_subcommand(1);

  Options po;
  CLI::App* parse = app.add_subcommand("parse", "parse sentences against a grammar");
  parse->add_option("--grammar", po.grammar, "grammar file (.gu)")->required();
  parse->add_option("--lexicon", po.lexicon, "lexicon file (.gul)")->required();
  parse->add_option("--tag-probs", po.tagprobs, "tag likelihood file (.gup)");
  parse->add_option("--input", po.input, "a sentence, or a file with one sentence per line")
      ->required();
  parse->add_option("--uthresh", po.uthresh, "unification threshold");
  parse->add_option("--athresh", po.athresh, "activation threshold");
  parse->add_option("--weights", po.weights, "activation weights w1,w2,w3");
  parse->add_option("--n-best", po.n_best, "parses to print per sentence");
  parse->add_flag("--trace", po.trace, "include the event trace");
  parse->add_option("--format", po.format, "output format")
      ->check(CLI::IsMember({"text", "json"}));
  parse->add_option("--max-steps", po.max_steps, "agenda step limit");

  Options dopt;
  dopt.uthresh = 0.65;  // demo operating point
  std::string assets;
  CLI::App* demo = app.add_subcommand("demo", "run the bundled competition example");
  demo->add_option("--assets", assets, "directory holding demo.gu/.gul/.gup");
  demo->add_option("--uthresh", dopt.uthresh, "unification threshold");
  demo->add_option("--athresh", dopt.athresh, "activation threshold");
  demo->add_option("--weights", dopt.weights, "activation weights w1,w2,w3");
  demo->add_option("--max-steps", dopt.max_steps, "agenda step limit");

  try {
    app.parse(argc, argv);
    if (parse->parsed()) return run_parse_cmd(po);
    return run_demo_cmd(dopt, assets);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // --help exits 0; anything else is a usage error
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
