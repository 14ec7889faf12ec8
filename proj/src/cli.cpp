#include "ecalign/cli.hpp"

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "ecalign/eval.hpp"
#include "ecalign/synth.hpp"
#include "json.hpp"

namespace ecalign {

namespace {

using nlohmann::json;

std::string_view to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "tsv"; }

OutputFormat parse_output_format(std::string_view name) {
  if (name == "json") return OutputFormat::json;
  if (name == "tsv") return OutputFormat::tsv;
  throw std::invalid_argument("unknown format '" + std::string(name) + "'");
}

// Flags shared by the commands that run the pipeline. Unset flags fall back to
// the config file, then to the library defaults.
struct FlagValues {
  std::string config_path;
  std::optional<double> gamma, epsilon, damping, min_confidence;
  std::optional<std::size_t> max_iters;
  std::optional<std::string> method, norm, mode, label_norm, format, damping_mode;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON file with default settings")->check(CLI::ExistingFile);
    app->add_option("--gamma", gamma, "edge confidence threshold in [0,1]");
    app->add_option("--epsilon", epsilon, "iterative convergence tolerance (max-norm)");
    app->add_option("--max-iters", max_iters, "iteration cap for the iterative solver");
    app->add_option("--damping", damping, "damping factor a, in (0,1]");
    app->add_option("--damping-mode", damping_mode,
                    "restart: P' = aP + (1-a) 1 pi0 | lazy: P' = aP + (1-a)I");
    app->add_option("--method", method, "iterative | steady-state");
    app->add_option("--norm", norm, "row normalization: formula | complement");
    app->add_option("--mode", mode, "edge-confidence | baseline-sf");
    app->add_option("--min-confidence", min_confidence, "drop correspondences below this score");
    app->add_option("--label-norm", label_norm, "label normalization: none | fold");
    app->add_option("--seed", seed, "random seed");
    app->add_option("--format", format, "alignment output: json | tsv");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    if (!config_path.empty()) cfg = apply_config_json(read_file(config_path), cfg);
    auto& sim = cfg.align.similarity;
    auto& solver = cfg.align.solver;
    if (gamma) sim.gamma = *gamma;
    if (label_norm) sim.label_norm = parse_label_norm(*label_norm);
    if (epsilon) solver.epsilon = *epsilon;
    if (max_iters) solver.max_iters = *max_iters;
    if (damping) solver.damping = *damping;
    if (damping_mode) solver.damping_mode = parse_damping_mode(*damping_mode);
    if (method) solver.method = parse_solve_method(*method);
    if (norm) solver.norm = parse_norm_mode(*norm);
    if (mode) solver.chain_mode = parse_chain_mode(*mode);
    if (min_confidence) cfg.align.min_confidence = *min_confidence;
    if (seed) cfg.seed = *seed;
    if (format) cfg.format = parse_output_format(*format);
    cfg.align.validate();
    return cfg;
  }
};

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw DataError("cannot write '" + path + "'");
  file << text;
}

}  // namespace

RunConfig apply_config_json(std::string_view text, RunConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("invalid config JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("config must be a JSON object");
  auto& sim = base.align.similarity;
  auto& solver = base.align.solver;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "gamma") {
        sim.gamma = value.get<double>();
      } else if (key == "label_norm") {
        sim.label_norm = parse_label_norm(value.get<std::string>());
      } else if (key == "epsilon") {
        solver.epsilon = value.get<double>();
      } else if (key == "max_iters") {
        solver.max_iters = value.get<std::size_t>();
      } else if (key == "damping") {
        solver.damping = value.get<double>();
      } else if (key == "damping_mode") {
        solver.damping_mode = parse_damping_mode(value.get<std::string>());
      } else if (key == "method") {
        solver.method = parse_solve_method(value.get<std::string>());
      } else if (key == "norm") {
        solver.norm = parse_norm_mode(value.get<std::string>());
      } else if (key == "mode") {
        solver.chain_mode = parse_chain_mode(value.get<std::string>());
      } else if (key == "min_confidence") {
        base.align.min_confidence = value.get<double>();
      } else if (key == "seed") {
        base.seed = value.get<std::uint64_t>();
      } else if (key == "format") {
        base.format = parse_output_format(value.get<std::string>());
      } else {
        throw DataError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("bad config value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("bad config value: ") + e.what());
  }
  return base;
}

std::string to_json(const RunConfig& cfg) {
  nlohmann::ordered_json doc;
  doc["gamma"] = cfg.align.similarity.gamma;
  doc["label_norm"] = to_string(cfg.align.similarity.label_norm);
  doc["epsilon"] = cfg.align.solver.epsilon;
  doc["max_iters"] = cfg.align.solver.max_iters;
  doc["damping"] = cfg.align.solver.damping;
  doc["damping_mode"] = to_string(cfg.align.solver.damping_mode);
  doc["method"] = to_string(cfg.align.solver.method);
  doc["norm"] = to_string(cfg.align.solver.norm);
  doc["mode"] = to_string(cfg.align.solver.chain_mode);
  doc["min_confidence"] = cfg.align.min_confidence;
  doc["seed"] = cfg.seed;
  doc["format"] = to_string(cfg.format);
  return doc.dump(2) + "\n";
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ontology alignment over pairwise Markov chains with edge confidence", "ecalign"};
  app.require_subcommand(1);

  FlagValues flags;
  std::string output;

  auto* align_cmd = app.add_subcommand("align", "align two ontologies");
  std::string ont1, ont2, dump_chain_path;
  align_cmd->add_option("ontology1", ont1, "left ontology (.json or triples)")->required();
  align_cmd->add_option("ontology2", ont2, "right ontology (.json or triples)")->required();
  align_cmd->add_option("-o,--output", output, "output file (default: standard output)");
  align_cmd->add_option("--dump-chain", dump_chain_path, "also write the normalized chain as row,col,weight CSV");
  flags.attach(align_cmd);

  auto* eval_cmd = app.add_subcommand("eval", "score an alignment against a reference");
  std::string alignment_path, reference_path;
  eval_cmd->add_option("alignment", alignment_path, "alignment (JSON or TSV)")->required();
  eval_cmd->add_option("reference", reference_path, "reference alignment (TSV or JSON)")->required();
  eval_cmd->add_option("-o,--output", output, "output file (default: standard output)");

  auto* compare_cmd = app.add_subcommand("compare", "compare baseline-sf with edge-confidence");
  std::string case_name = "case";
  compare_cmd->add_option("ontology1", ont1, "left ontology")->required();
  compare_cmd->add_option("ontology2", ont2, "right ontology")->required();
  compare_cmd->add_option("reference", reference_path, "reference alignment")->required();
  compare_cmd->add_option("--case", case_name, "case name in the CSV");
  compare_cmd->add_option("-o,--output", output, "output file (default: standard output)");
  flags.attach(compare_cmd);

  auto* suite_cmd = app.add_subcommand("bench-suite", "compare both modes on the synthetic label-perturbation suite");
  std::size_t case_count = 30;
  suite_cmd->add_option("--cases", case_count, "number of generated cases");
  suite_cmd->add_option("-o,--output", output, "output file (default: standard output)");
  flags.attach(suite_cmd);

  auto* gen_cmd = app.add_subcommand("bench-gen", "write a mutated copy of an ontology plus its reference");
  std::vector<std::string> mutations;
  std::string reference_output;
  bool shuffle = false;
  std::uint64_t gen_seed = 0;
  gen_cmd->add_option("ontology", ont1, "ontology to mutate")->required();
  gen_cmd->add_option("--mutation", mutations,
                      "label-edit | label-scramble | label-case | edge-drop(RATE); repeatable")
      ->required();
  gen_cmd->add_option("--seed", gen_seed, "random seed");
  gen_cmd->add_flag("--shuffle", shuffle, "also shuffle term order");
  gen_cmd->add_option("-o,--output", output, "mutated ontology (JSON)")->required();
  gen_cmd->add_option("--reference-output", reference_output, "reference TSV (default: <output>.ref.tsv)");

  auto* dump_cmd = app.add_subcommand("dump-chain", "write the transition matrix as row,col,weight CSV");
  bool damped = false;
  dump_cmd->add_option("ontology1", ont1, "left ontology")->required();
  dump_cmd->add_option("ontology2", ont2, "right ontology")->required();
  dump_cmd->add_flag("--damped", damped, "apply the damping transform first");
  dump_cmd->add_option("-o,--output", output, "output file (default: standard output)");
  flags.attach(dump_cmd);

  auto* config_cmd = app.add_subcommand("show-config", "print the effective configuration");
  flags.attach(config_cmd);

  std::vector<std::string> argv_storage{"ecalign"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  RunConfig cfg;
  try {
    cfg = flags.resolve();
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (align_cmd->parsed()) {
      const auto g1 = load_ontology(ont1);
      const auto g2 = load_ontology(ont2);
      if (!dump_chain_path.empty()) {
        write_output(dump_chain_path, to_triplet_csv(transition_chain(g1, g2, cfg.align)), out);
      }
      const auto result = align(g1, g2, cfg.align);
      if (!result.converged) {
        err << "warning: iterative solver stopped after " << result.iterations
            << " iterations without reaching epsilon\n";
      }
      write_output(output,
                   cfg.format == OutputFormat::json ? to_json(result.alignment) : to_tsv(result.alignment),
                   out);
    } else if (eval_cmd->parsed()) {
      const auto returned = pairs_of(parse_alignment(read_file(alignment_path)));
      const auto valid = parse_reference(read_file(reference_path));
      write_output(output, format_report(evaluate(returned, valid)) + "\n", out);
    } else if (compare_cmd->parsed()) {
      const auto g1 = load_ontology(ont1);
      const auto g2 = load_ontology(ont2);
      const auto reference = parse_reference(read_file(reference_path));
      check_reference(reference, g1, g2);
      write_output(output, comparison_csv(compare(case_name, g1, g2, reference, cfg.align)), out);
    } else if (suite_cmd->parsed()) {
      std::vector<ComparisonRow> rows;
      for (const auto& c : label_perturbation_suite(cfg.seed, case_count)) {
        auto case_rows = compare(c.name, c.source, c.target, c.reference, cfg.align);
        rows.insert(rows.end(), case_rows.begin(), case_rows.end());
      }
      write_output(output, comparison_csv(rows), out);
    } else if (gen_cmd->parsed()) {
      std::vector<Mutation> parsed;
      for (const auto& m : mutations) parsed.push_back(parse_mutation(m));
      auto graph = load_ontology(ont1);
      const auto original = graph;
      for (std::size_t k = 0; k < parsed.size(); ++k) {
        graph = synth_mutate(graph, gen_seed + k, parsed[k]).graph;
      }
      if (shuffle) graph = shuffle_terms(graph, gen_seed + parsed.size());
      Alignment reference;
      for (const auto& t : original.terms()) reference.correspondences.push_back({t.id, t.id, 1.0});
      write_output(output, to_json(graph), out);
      write_output(reference_output.empty() ? output + ".ref.tsv" : reference_output,
                   to_tsv(reference), out);
    } else if (dump_cmd->parsed()) {
      const auto g1 = load_ontology(ont1);
      const auto g2 = load_ontology(ont2);
      auto chain = transition_chain(g1, g2, cfg.align);
      if (damped) chain = damp(chain, initial_distribution(chain, g1, g2, cfg.align.similarity), cfg.align.solver);
      write_output(output, to_triplet_csv(chain), out);
    } else if (config_cmd->parsed()) {
      out << to_json(cfg);
    }
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << "\n";
    return kExitSolver;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitOk;
}

}  // namespace ecalign
