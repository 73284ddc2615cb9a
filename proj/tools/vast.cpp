// vast: command-line frontend for contextualized-embedding valence evaluation.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vast/vast.hpp"

namespace fs = std::filesystem;
using namespace vast;

namespace {

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "'");
  return in;
}

char delimiter_char(const std::string& d) {
  if (d == "tab" || d == "\\t") return '\t';
  if (d.size() != 1) throw Error(Errc::InvalidArgument, "delimiter must be one character or 'tab'");
  return d[0];
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

void emit(const std::string& out, const std::string& text) {
  if (out.empty() || out == "-") {
    std::cout << text;
    return;
  }
  const auto parent = fs::path(out).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  write_file(out, text);
}

struct LexiconFlags {
  std::string path;
  std::string word_column = "word";
  std::string rating_column = "rating";
  std::string delimiter = ",";
  double scale_min = 1.0;
  double scale_max = 9.0;
  std::string dimension = "valence";

  void add(CLI::App* app, bool required) {
    auto* o = app->add_option("--lexicon", path, "Rated word list (delimited, with header)");
    if (required) o->required();
    app->add_option("--word-column", word_column, "Lexicon word column")->capture_default_str();
    app->add_option("--rating-column", rating_column, "Lexicon rating column")->capture_default_str();
    app->add_option("--delimiter", delimiter, "Lexicon field delimiter (one character or 'tab')")->capture_default_str();
    app->add_option("--scale-min", scale_min, "Lower end of the rating scale")->capture_default_str();
    app->add_option("--scale-max", scale_max, "Upper end of the rating scale")->capture_default_str();
    app->add_option("--dimension", dimension, "valence | dominance | arousal")->capture_default_str();
  }

  std::optional<ValenceLexicon> load() const {
    if (path.empty()) return std::nullopt;
    auto in = open_input(path);
    LexiconSchema schema{word_column, rating_column, delimiter_char(delimiter)};
    return parse_lexicon(in, schema, {scale_min, scale_max}, parse_dimension(dimension), stem_of(path));
  }
};

struct PolarFlags {
  std::string path = "builtin";

  void add(CLI::App* app) {
    app->add_option("--polar", path, "Polar word file, or 'builtin' for the pleasant/unpleasant lists")
        ->capture_default_str();
  }

  PolarSet load() const {
    if (path == "builtin") return weat_valence_polar();
    auto in = open_input(path);
    return parse_polar_set(in, stem_of(path));
  }
};

std::vector<std::string> read_word_list(const std::string& path) {
  auto in = open_input(path);
  std::vector<std::string> out;
  for (const auto& line : read_lines(in)) {
    const auto w = trim(line);
    if (!w.empty() && w.front() != '#') out.push_back(nfc(w));
  }
  return out;
}

void print_seed(std::uint64_t seed) { std::cout << "seed: " << seed << "\n"; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Valence-based evaluation of contextualized word embeddings"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  std::uint64_t seed = 0;
  std::string out;
  std::string dump_dir;
  std::string polar_dump_dir;
  int layer = 0;
  std::string repr_name = "last";
  LexiconFlags lexf;
  PolarFlags polarf;

  auto add_seed = [&](CLI::App* c) { c->add_option("--seed", seed, "Random seed")->capture_default_str(); };
  auto add_out = [&](CLI::App* c, const std::string& what) {
    c->add_option("--out", out, what + " ('-' for standard output)")->required();
  };
  auto add_dump = [&](CLI::App* c) {
    c->add_option("--dump", dump_dir, "Dump directory")->required()->check(CLI::ExistingDirectory);
  };
  auto add_layer = [&](CLI::App* c) { c->add_option("--layer", layer, "Layer index")->capture_default_str(); };
  auto add_repr = [&](CLI::App* c) {
    c->add_option("--repr", repr_name, "Subword representation: first | last | mean | max")->capture_default_str();
  };

  // gen-job
  auto* gen = app.add_subcommand("gen-job", "Write the extraction job for one contextual setting");
  std::string setting_name = "bleached";
  std::string corpus_path;
  std::string templates_path;
  std::string extra_path;
  std::size_t max_tokens = 64;
  lexf.add(gen, false);
  polarf.add(gen);
  gen->add_option("--setting", setting_name, "random | bleached | aligned | misaligned")->capture_default_str();
  gen->add_option("--corpus", corpus_path, "One sentence per line; required for the random setting");
  gen->add_option("--templates", templates_path, "Template bank file");
  gen->add_option("--extra-words", extra_path, "Unrated words to embed as well, one per line");
  gen->add_option("--max-tokens", max_tokens, "Corpus contexts are truncated to this many tokens")->capture_default_str();
  add_seed(gen);
  add_out(gen, "Job file");

  // validate-dump
  auto* vd = app.add_subcommand("validate-dump", "Check a dump and print its summary");
  add_dump(vd);

  // score
  auto* score = app.add_subcommand("score", "VAST score of one layer");
  std::size_t k = 0;
  add_dump(score);
  score->add_option("--polar-dump", polar_dump_dir, "Dump holding the polar words (aligned, for misaligned dumps)");
  lexf.add(score, true);
  polarf.add(score);
  add_layer(score);
  add_repr(score);
  score->add_option("--k", k, "Principal components to nullify; 0 scores raw vectors")->capture_default_str();
  add_seed(score);
  add_out(score, "Report CSV");

  // settings
  auto* settings = app.add_subcommand("settings", "VAST scores for every layer across contextual settings");
  std::vector<std::string> setting_dumps;
  std::vector<std::size_t> ks = {0};
  settings->add_option("--dump", setting_dumps, "setting=directory, repeatable")->required();
  lexf.add(settings, true);
  polarf.add(settings);
  add_repr(settings);
  settings->add_option("--k", ks, "Comma-separated component counts")->delimiter(',')->capture_default_str();
  add_seed(settings);
  add_out(settings, "Report CSV");

  // tokenization
  auto* tok = app.add_subcommand("tokenization", "Singly vs. multiply tokenized words, every layer");
  add_dump(tok);
  lexf.add(tok, true);
  polarf.add(tok);
  tok->add_option("--k", k, "Principal components to nullify")->capture_default_str();
  add_seed(tok);
  add_out(tok, "Report CSV");

  // isolate
  auto* iso = app.add_subcommand("isolate", "VAST score of one layer as top components are nullified");
  std::size_t k_max = 12;
  std::string basis_dir;
  add_dump(iso);
  iso->add_option("--polar-dump", polar_dump_dir, "Dump holding the polar words");
  lexf.add(iso, true);
  polarf.add(iso);
  add_layer(iso);
  add_repr(iso);
  iso->add_option("--k-max", k_max, "Largest component count")->capture_default_str();
  iso->add_option("--export-basis", basis_dir, "Write the fitted basis to this directory");
  add_seed(iso);
  add_out(iso, "Report CSV");

  // bias
  auto* bias = app.add_subcommand("bias", "WEAT bias tests with permutation p-values");
  std::string tests_path = "builtin";
  std::size_t mc_samples = 10'000;
  std::vector<std::size_t> bias_ks = {0};
  add_dump(bias);
  bias->add_option("--tests", tests_path, "'builtin' or a JSON test file")->capture_default_str();
  lexf.add(bias, false);
  add_layer(bias);
  add_repr(bias);
  bias->add_option("--k", bias_ks, "Comma-separated component counts")->delimiter(',')->capture_default_str();
  bias->add_option("--mc-samples", mc_samples, "Monte Carlo permutations when exact enumeration is too large")
      ->capture_default_str();
  add_seed(bias);
  add_out(bias, "Report CSV");

  // wordsim
  auto* ws = app.add_subcommand("wordsim", "Spearman correlation with human similarity judgments");
  std::string pairs_path;
  PairSchema pair_schema;
  std::string pair_delim = ",";
  double pair_min = 0.0;
  double pair_max = 10.0;
  std::vector<std::size_t> ws_ks = {0};
  add_dump(ws);
  ws->add_option("--pairs", pairs_path, "Word-pair dataset")->required();
  ws->add_option("--word1-column", pair_schema.first_column)->capture_default_str();
  ws->add_option("--word2-column", pair_schema.second_column)->capture_default_str();
  ws->add_option("--score-column", pair_schema.score_column)->capture_default_str();
  ws->add_option("--delimiter", pair_delim)->capture_default_str();
  ws->add_option("--scale-min", pair_min)->capture_default_str();
  ws->add_option("--scale-max", pair_max)->capture_default_str();
  add_layer(ws);
  add_repr(ws);
  ws->add_option("--k", ws_ks, "Comma-separated component counts")->delimiter(',')->capture_default_str();
  add_seed(ws);
  add_out(ws, "Report CSV");

  // probe
  auto* probe = app.add_subcommand("probe", "Logistic-regression probes on raw, top-component and nullified features");
  std::string labels_path;
  std::string labels_delim = ",";
  std::vector<std::string> variant_names = {"raw", "top_pcs", "nullified"};
  ProbeConfig pcfg;
  add_dump(probe);
  probe->add_option("--labels", labels_path, "Label sidecar with row_index,label[,split]")->required();
  probe->add_option("--delimiter", labels_delim)->capture_default_str();
  add_layer(probe);
  add_repr(probe);
  probe->add_option("--k", pcfg.k, "Components for the top_pcs and nullified variants")->capture_default_str();
  probe->add_option("--variants", variant_names)->delimiter(',')->capture_default_str();
  probe->add_option("--l2", pcfg.params.l2)->capture_default_str();
  probe->add_option("--lr", pcfg.params.lr)->capture_default_str();
  probe->add_option("--iters", pcfg.params.iters)->capture_default_str();
  probe->add_option("--basis", basis_dir, "Use an exported basis instead of fitting one");
  add_seed(probe);
  add_out(probe, "Report CSV");

  // make-fixture
  auto* fix = app.add_subcommand("make-fixture", "Write a synthetic dump with known structure plus matching inputs");
  FixtureSpec fs_spec;
  std::string fix_setting = "bleached";
  fix->add_option("--dims", fs_spec.dims)->capture_default_str();
  fix->add_option("--layers", fs_spec.layers)->capture_default_str();
  fix->add_option("--words", fs_spec.words)->capture_default_str();
  fix->add_option("--polar-per-group", fs_spec.polar_per_group)->capture_default_str();
  fix->add_option("--signal", fs_spec.signal, "Extent of the rating signal")->capture_default_str();
  fix->add_option("--common", fs_spec.common)->capture_default_str();
  fix->add_option("--noise", fs_spec.noise)->capture_default_str();
  fix->add_option("--distractor", fs_spec.distractor, "Dominant direction magnitude, 0 to disable")
      ->capture_default_str();
  fix->add_option("--distractor-layer", fs_spec.distractor_layer, "-1 for every layer")->capture_default_str();
  fix->add_option("--multi-fraction", fs_spec.multi_fraction, "Fraction of multi-token words")->capture_default_str();
  fix->add_option("--multi-signal-layer", fs_spec.multi_signal_layer)->capture_default_str();
  fix->add_option("--setting", fix_setting)->capture_default_str();
  fix->add_option("--context-layer", fs_spec.context_layer, "-1: contexts never override the rating")
      ->capture_default_str();
  fix->add_option("--model-id", fs_spec.model_id)->capture_default_str();
  add_seed(fix);
  fix->add_option("--out", out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::usage;
  }

  try {
    const auto repr = parse_repr(repr_name);

    if (*gen) {
      const auto lex = lexf.load();
      const auto setting = parse_setting(setting_name);
      if (setting == Setting::Random && corpus_path.empty()) {
        std::cerr << "gen-job: --corpus is required for the random setting\n";
        return exit_code::usage;
      }
      const bool use_polar = polarf.path != "none";
      const PolarSet polar = use_polar ? polarf.load() : PolarSet{};
      JobInputs in;
      in.lexicon = lex ? &*lex : nullptr;
      in.polar = use_polar ? &polar : nullptr;
      in.setting = setting;
      in.seed = seed;
      in.max_tokens = max_tokens;
      if (!templates_path.empty()) {
        auto t = open_input(templates_path);
        in.bank = parse_template_bank(t);
      }
      if (!extra_path.empty()) in.extra_words = read_word_list(extra_path);
      std::ifstream corpus;
      if (!corpus_path.empty()) {
        corpus = open_input(corpus_path);
        in.corpus = &corpus;
      }
      const auto job = build_extraction_job(in);
      emit(out, format_job(job));
      std::cout << "setting: " << to_string(job.setting) << "\n";
      print_seed(seed);
      std::cout << "assignments: " << job.assignments.size() << " (" << unique_word_count(job.assignments)
                << " distinct words)\n";
      if (job.aligned_polar_job) {
        std::cout << "aligned polar assignments: " << job.aligned_polar_job->assignments.size() << "\n";
      }
      return exit_code::ok;
    }

    if (*vd) {
      const auto d = read_dump(dump_dir);
      std::size_t multi = 0;
      for (const auto& w : d.manifest().words) multi += w.subtoken_count > 1;
      std::cout << "model: " << d.manifest().model_id << "\n"
                << "setting: " << to_string(d.setting()) << "\n"
                << "layers: " << d.num_layers() << "\n"
                << "hidden_dim: " << d.hidden_dim() << "\n"
                << "words: " << d.size() << " (" << multi << " multiply tokenized)\n"
                << "hash: " << hex64(d.content_hash()) << "\n";
      return exit_code::ok;
    }

    if (*score || *iso) {
      const auto d = read_dump(dump_dir);
      std::optional<EmbeddingDump> pd;
      if (!polar_dump_dir.empty()) pd = read_dump(polar_dump_dir);
      const auto lex = *lexf.load();
      const auto polar = polarf.load();
      const EmbeddingDump* pdp = pd ? &*pd : nullptr;
      std::vector<VastRow> rows;
      if (*score) {
        rows.push_back(make_row(d, polar_source(d, pdp), layer, repr, k,
                                vast_score(d, pdp, lex, polar, layer, repr, k)));
      } else {
        rows = isolation_sweep(d, pdp, lex, polar, layer, repr, k_max);
        if (!basis_dir.empty()) {
          write_basis(basis_dir, fit_population(gather_population(d, pdp, lex, polar, layer, repr)));
        }
      }
      emit(out, format_vast_rows(rows, lex.name(), polar.label, seed));
      print_seed(seed);
      for (const auto& r : rows) {
        std::cout << "layer " << r.layer << " k " << r.k << ": rho " << format_double(r.score.rho) << " ("
                  << r.score.n_words << " words, " << r.score.n_dropped << " dropped)\n";
      }
      return exit_code::ok;
    }

    if (*settings) {
      std::map<Setting, EmbeddingDump> loaded;
      for (const auto& spec : setting_dumps) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
          std::cerr << "settings: --dump expects setting=directory, got '" << spec << "'\n";
          return exit_code::usage;
        }
        const auto s = parse_setting(spec.substr(0, eq));
        if (loaded.count(s)) throw Error(Errc::InvalidArgument, "setting given twice: " + spec.substr(0, eq));
        loaded.emplace(s, read_dump(spec.substr(eq + 1)));
      }
      std::map<Setting, const EmbeddingDump*> dumps;
      for (const auto& [s, d] : loaded) dumps.emplace(s, &d);
      const auto lex = *lexf.load();
      const auto polar = polarf.load();
      const auto rows = setting_comparison(dumps, lex, polar, repr, ks);
      emit(out, format_vast_rows(rows, lex.name(), polar.label, seed));
      print_seed(seed);
      std::cout << rows.size() << " rows\n";
      return exit_code::ok;
    }

    if (*tok) {
      const auto d = read_dump(dump_dir);
      const auto lex = *lexf.load();
      const auto polar = polarf.load();
      const auto rep = tokenization_experiment(d, lex, polar, seed, k);
      emit(out, format_tokenization_report(rep, k, seed));
      print_seed(seed);
      std::cout << "singly tokenized: " << rep.singly_tokenized << "\n"
                << "multiply tokenized: " << rep.multiply_tokenized << "\n"
                << "cohort size: " << rep.cohort_size << "\n";
      for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
      return exit_code::ok;
    }

    if (*bias) {
      const auto d = read_dump(dump_dir);
      const auto tests = tests_path == "builtin" ? builtin_bias_tests() : parse_bias_tests(read_file(tests_path));
      const auto lex = lexf.load();
      BiasOptions opt;
      opt.repr = repr;
      opt.mc_samples = mc_samples;
      opt.lexicon = lex ? &*lex : nullptr;
      const auto rows = bias_battery(d, tests, layer, bias_ks, seed, opt);
      emit(out, format_bias_rows(rows, repr, seed));
      print_seed(seed);
      for (const auto& r : rows) {
        std::cout << r.test << " k " << r.k << ": d " << format_double(r.result.effect_size) << ", p "
                  << (r.result.p_value ? format_double(*r.result.p_value) : "n/a") << " ("
                  << method_label(r.result) << ")\n";
      }
      return exit_code::ok;
    }

    if (*ws) {
      const auto d = read_dump(dump_dir);
      auto in = open_input(pairs_path);
      pair_schema.delimiter = delimiter_char(pair_delim);
      const auto ds = parse_pair_dataset(in, pair_schema, {pair_min, pair_max}, stem_of(pairs_path));
      std::vector<WordSimRow> rows;
      for (auto kk : ws_ks) rows.push_back(wordsim_eval(d, ds, layer, repr, kk));
      emit(out, format_wordsim_rows(rows));
      print_seed(seed);
      for (const auto& r : rows) {
        std::cout << "k " << r.k << ": spearman " << format_double(r.spearman) << " (" << r.pairs_used << " pairs, "
                  << r.pairs_skipped << " skipped)\n";
      }
      return exit_code::ok;
    }

    if (*probe) {
      const auto d = read_dump(dump_dir);
      auto in = open_input(labels_path);
      const auto labels = parse_probe_labels(in, d.size(), delimiter_char(labels_delim));
      pcfg.layer = layer;
      pcfg.repr = repr;
      pcfg.seed = seed;
      pcfg.variants.clear();
      for (const auto& v : variant_names) pcfg.variants.push_back(parse_variant(v));
      std::optional<PcBasis> basis;
      if (!basis_dir.empty()) basis = read_basis(basis_dir);
      const auto rows = probe_report(d, labels, pcfg, basis ? &*basis : nullptr);
      emit(out, format_probe_rows(rows, pcfg, d.content_hash()));
      print_seed(seed);
      for (const auto& r : rows) {
        std::cout << to_string(r.variant) << " k " << r.k << ": weighted F1 " << format_double(r.weighted_f1) << "\n";
      }
      return exit_code::ok;
    }

    if (*fix) {
      fs_spec.seed = seed;
      fs_spec.setting = parse_setting(fix_setting);
      const auto fx = make_fixture(fs_spec);
      write_fixture_bundle(out, fx);
      print_seed(seed);
      std::cout << "wrote " << fx.dump.size() << " words x " << fx.dump.num_layers() << " layers x "
                << fx.dump.hidden_dim() << " dims to " << out << "\n"
                << "hash: " << hex64(fx.dump.content_hash()) << "\n";
      return exit_code::ok;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code::validation;
  }
  return exit_code::usage;
}
