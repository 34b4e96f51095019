// Command-line front end for the vh2kg pipeline.
//
// Exit codes: 0 success, 1 domain error, 2 usage error.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "vh2kg/vh2kg.hpp"

namespace {

using namespace vh2kg;

void emit(const std::string& outPath, const std::string& content) {
  if (outPath.empty() || outPath == "-") {
    std::cout << content;
  } else {
    write_file(outPath, content);
    spdlog::info("wrote {}", outPath);
  }
}

rdf::KgDocument read_kg(const std::string& path) { return rdf::parse_ntriples(read_file(path)); }

std::string serialize(const rdf::KgDocument& kg, const std::string& format) {
  return format == "ttl" ? rdf::serialize_turtle(kg) : rdf::serialize_ntriples(kg);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("vh2kg");
  logger->set_pattern("[%H:%M:%S.%e] [%l] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::info);
  if (const char* env = std::getenv("VH2KG_LOG")) spdlog::set_level(spdlog::level::from_str(env));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Household activity scripts to event-centric knowledge graphs"};
  app.require_subcommand(1);

  // parse
  std::string scriptPath;
  bool strictParse = false;
  auto* parse = app.add_subcommand("parse", "Parse a script and print it as JSON");
  parse->add_option("script", scriptPath, "Script file")->required()->check(CLI::ExistingFile);
  parse->add_flag("--strict", strictParse, "Reject verbs outside the vocabulary");

  // simulate
  std::string envPath, outPath, affPath, categoryName = "Other";
  bool strict = false, repair = false;
  double threshold = 1.5;
  double affThreshold = kDefaultAffordanceThreshold;
  auto* simulate = app.add_subcommand("simulate", "Run a script against an environment and write the trace");
  simulate->add_option("--env", envPath, "Environment JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--script", scriptPath, "Script file")->required()->check(CLI::ExistingFile);
  simulate->add_option("--category", categoryName, "Activity category");
  simulate->add_option("--affordances", affPath, "Scored affordance CSV")->check(CLI::ExistingFile);
  simulate->add_option("--affordance-threshold", affThreshold, "Minimum mean score");
  simulate->add_option("--threshold", threshold, "Closeness threshold in meters");
  auto* strictFlag = simulate->add_flag("--strict", strict, "Fail at the first unexecutable step (default)");
  simulate->add_flag("--repair", repair, "Insert walks before steps that fail for distance")->excludes(strictFlag);
  simulate->add_option("-o,--out", outPath, "Output file (default stdout)");

  // build-kg
  std::string tracePath, format = "ttl";
  std::size_t activityIndex = 0;
  auto* buildKg = app.add_subcommand("build-kg", "Synthesize the KG of one trace");
  buildKg->add_option("--trace", tracePath, "Trace JSON")->required()->check(CLI::ExistingFile);
  buildKg->add_option("--index", activityIndex, "Activity index used in IRIs");
  buildKg->add_option("--format", format, "nt or ttl")->check(CLI::IsMember({"nt", "ttl"}));
  buildKg->add_option("-o,--out", outPath, "Output file (default stdout)");
  bool schemaOnly = false;
  buildKg->add_flag("--schema", schemaOnly, "Print the ontology instead");

  // stats
  std::string kgPath;
  auto* stats = app.add_subcommand("stats", "Count entities, properties and triples");
  stats->add_option("--kg", kgPath, "N-Triples file")->required()->check(CLI::ExistingFile);

  // detect-risk
  std::string augmentedPath, queriesDir;
  auto* detect = app.add_subcommand("detect-risk", "Evaluate the fall-risk rules");
  detect->add_option("--kg", kgPath, "N-Triples file")->required()->check(CLI::ExistingFile);
  detect->add_option("-o,--out", outPath, "Findings JSON (default stdout)");
  detect->add_option("--augmented", augmentedPath, "Write the KG with riskFactor triples");
  detect->add_option("--queries", queriesDir, "Write the rule queries (.rq) into this directory");

  // explain
  std::string findingsPath, dotPath;
  std::size_t findingIndex = 0;
  auto* explainCmd = app.add_subcommand("explain", "Explain one finding as DOT and text");
  explainCmd->add_option("--kg", kgPath, "N-Triples file")->required()->check(CLI::ExistingFile);
  explainCmd->add_option("--findings", findingsPath, "Findings JSON")->required()->check(CLI::ExistingFile);
  explainCmd->add_option("--index", findingIndex, "Finding position");
  explainCmd->add_option("--dot", dotPath, "DOT output file (default stdout)");

  // walks
  WalkConfig walkCfg;
  bool useWl = false;
  std::uint64_t seed = 42;
  auto* walksCmd = app.add_subcommand("walks", "Extract graph walks");
  walksCmd->add_option("--kg", kgPath, "N-Triples file")->required()->check(CLI::ExistingFile);
  walksCmd->add_option("--depth", walkCfg.depth, "Hops per walk");
  walksCmd->add_option("--walks", walkCfg.walksPerEntity, "Walks per root");
  walksCmd->add_option("--wl", walkCfg.wlIterations, "WL iterations (with --use-wl)");
  walksCmd->add_flag("--use-wl", useWl, "Union of WL-relabeled corpora");
  walksCmd->add_flag("--exhaustive", walkCfg.exhaustive, "Enumerate all walks (depth <= 3)");
  walksCmd->add_flag("--canonicalize", walkCfg.canonicalize, "Strip instance suffixes");
  walksCmd->add_option("--seed", seed, "Random seed");
  walksCmd->add_option("--jobs", walkCfg.jobs, "Worker threads");
  walksCmd->add_option("-o,--out", outPath, "Walks file (default stdout)");

  // embed
  std::string walksPath;
  SkipGramConfig sgCfg;
  std::string neighborsOf;
  auto* embed = app.add_subcommand("embed", "Train skip-gram vectors on a walks file");
  embed->add_option("--walks", walksPath, "Walks file")->required()->check(CLI::ExistingFile);
  embed->add_option("--dim", sgCfg.vectorSize, "Vector size");
  embed->add_option("--window", sgCfg.window, "Context window");
  embed->add_option("--epochs", sgCfg.epochs, "Epochs");
  embed->add_option("--lr", sgCfg.learningRate, "Initial learning rate");
  embed->add_option("--negative", sgCfg.negativeSamples, "Negative samples (0 = full softmax)");
  embed->add_option("--seed", seed, "Random seed");
  embed->add_option("--neighbors", neighborsOf, "Print the 10 nearest tokens to this one");
  embed->add_option("-o,--out", outPath, "Vector TSV (default stdout)");

  // cluster
  std::string vectorsPath;
  KMeansConfig kmCfg;
  auto* cluster = app.add_subcommand("cluster", "k-means over vectors");
  cluster->add_option("--vectors", vectorsPath, "Vector TSV")->required()->check(CLI::ExistingFile);
  cluster->add_option("--kg", kgPath, "Restrict to activity instances of this KG")->check(CLI::ExistingFile);
  cluster->add_option("--k", kmCfg.k, "Clusters");
  cluster->add_option("--seed", seed, "Random seed");
  cluster->add_option("-o,--out", outPath, "Assignments CSV (default stdout)");

  // analyze
  bool includeCoords = false, asJson = false;
  std::string durationCategory;
  auto* analyze = app.add_subcommand("analyze", "Grab, state-change and duration rankings");
  analyze->add_option("--kg", kgPath, "N-Triples file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--category", durationCategory, "Restrict the duration ranking to one category");
  analyze->add_flag("--include-coordinates", includeCoords, "Count position-only state changes");
  analyze->add_flag("--json", asJson, "Print JSON instead of tables");

  // evaluate
  std::string gtPath;
  auto* evaluate = app.add_subcommand("evaluate", "Precision, recall and F1 of findings against ground truth");
  evaluate->add_option("--findings", findingsPath, "Findings JSON")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--gt", gtPath, "Ground truth CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--kg", kgPath, "Corpus KG, for the full event set")->check(CLI::ExistingFile);

  // pipeline
  std::string configPath;
  std::optional<std::uint64_t> seedOverride;
  std::optional<unsigned> jobsOverride;
  std::optional<double> thresholdOverride;
  std::optional<std::string> formatOverride;
  bool pStrict = false, pRepair = false;
  auto* pipeline = app.add_subcommand("pipeline", "Run every stage from a config file");
  pipeline->add_option("--config", configPath, "Pipeline JSON")->required()->check(CLI::ExistingFile);
  pipeline->add_option("--seed", seedOverride, "Override the config seed");
  pipeline->add_option("--jobs", jobsOverride, "Worker threads");
  pipeline->add_option("--threshold", thresholdOverride, "Closeness threshold in meters");
  pipeline->add_option("--format", formatOverride, "nt or ttl")->check(CLI::IsMember({"nt", "ttl"}));
  auto* pStrictFlag = pipeline->add_flag("--strict", pStrict, "Strict simulation");
  pipeline->add_flag("--repair", pRepair, "Repair simulation")->excludes(pStrictFlag);
  pipeline->add_option("-o,--out", outPath, "Override the output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    std::cerr << app.help();
    return 2;
  }

  try {
    if (*parse) {
      ParseOptions opts;
      opts.strict = strictParse;
      const auto script = parse_script(read_file(scriptPath), opts);
      for (const auto& [i, tok] : validate_vocabulary(script, opts.vocabulary))
        spdlog::warn("step {} uses unknown verb '{}'", i, tok);
      std::cout << script_to_json(script).dump(2) << "\n";
    } else if (*simulate) {
      auto env = load_environment(read_file(envPath));
      if (!affPath.empty()) {
        std::vector<std::string> warnings;
        auto scored = filter_affordances(parse_affordance_csv(read_file(affPath), &warnings), affThreshold);
        for (const auto& w : warnings) spdlog::warn("{}", w);
        apply_affordances(env, default_property_table(), scored);
      }
      auto script = parse_script(read_file(scriptPath), {.strict = true});
      auto cat = parse_category(categoryName);
      if (!cat) throw Error(ErrorCode::MalformedDocument, "unknown category " + categoryName);
      script.category = *cat;
      SimConfig sim;
      sim.closeThreshold = threshold;
      try {
        const auto trace = run_script(script, env, sim, repair ? RunMode::Repair : RunMode::Strict);
        spdlog::info("{} events, {:.3f} s", trace.transitions.size(), trace.total_seconds());
        emit(outPath, trace_to_json(trace).dump(1) + "\n");
      } catch (const UnexecutableError& e) {
        const auto& r = e.report();
        const auto idx = r.failingStepIndex.value_or(0);
        spdlog::error("step {} \"{}\" is not executable: {} ({})", idx,
                      idx < script.steps.size() ? serialize_step(script.steps[idx]) : std::string("?"),
                      to_string(r.reason.value_or(FailureReason::NotClose)), r.detail);
        return 1;
      }
    } else if (*buildKg) {
      if (schemaOnly) {
        emit(outPath, std::string(kSchemaTurtle));
        return 0;
      }
      const auto trace = trace_from_json(nlohmann::json::parse(read_file(tracePath)));
      ActivityMeta meta;
      meta.activityIndex = activityIndex;
      const auto kg = build_activity_kg(trace, meta);
      spdlog::info("{} triples", kg.size());
      emit(outPath, serialize(kg, format));
    } else if (*stats) {
      const auto s = rdf::graph_stats(read_kg(kgPath));
      std::cout << "entities " << s.entities << "\nproperties " << s.properties << "\ntriples " << s.triples << "\n";
    } else if (*detect) {
      const auto res = detect_risks(read_kg(kgPath));
      spdlog::info("{} findings", res.findings.size());
      emit(outPath, findings_to_json(res.findings).dump(2) + "\n");
      if (!augmentedPath.empty()) write_file(augmentedPath, rdf::serialize_ntriples(res.augmented));
      if (!queriesDir.empty()) {
        write_file(fs::path(queriesDir) / "R1.rq", rule_query(RuleId::R1));
        write_file(fs::path(queriesDir) / "R2.rq", rule_query(RuleId::R2));
      }
    } else if (*explainCmd) {
      const auto kg = read_kg(kgPath);
      const auto findings = findings_from_json(nlohmann::json::parse(read_file(findingsPath)));
      if (findingIndex >= findings.size())
        throw Error(ErrorCode::IndexOutOfRange, "finding " + std::to_string(findingIndex) + " of " +
                                                    std::to_string(findings.size()));
      const auto ex = explain(findings[findingIndex], kg);
      std::cerr << ex.text << "\n";
      emit(dotPath, ex.dot);
    } else if (*walksCmd) {
      walkCfg.seed = seed;
      const auto kg = read_kg(kgPath);
      const auto corpus = useWl ? wl_relabel(kg, walkCfg) : extract_walks(kg, walkCfg);
      spdlog::info("{} walks", corpus.sequences.size());
      emit(outPath, serialize_walks(corpus));
    } else if (*embed) {
      sgCfg.seed = seed;
      const auto model = train_skipgram(parse_walks(read_file(walksPath)), sgCfg);
      for (std::size_t e = 0; e < model.epochLosses.size(); ++e) spdlog::info("epoch {} loss {:.6f}", e, model.epochLosses[e]);
      if (!neighborsOf.empty()) {
        for (const auto& [tok, sim] : cosine_neighbors(model, neighborsOf, 10)) std::cerr << sim << "\t" << tok << "\n";
      }
      emit(outPath, export_vectors(model));
    } else if (*cluster) {
      kmCfg.seed = seed;
      auto table = parse_vectors(read_file(vectorsPath));
      if (!kgPath.empty()) {
        std::set<std::string> wanted;
        for (const auto& r : activity_roots(read_kg(kgPath))) wanted.insert(walk_token(r));
        VectorTable kept;
        for (std::size_t i = 0; i < table.tokens.size(); ++i) {
          if (wanted.contains(table.tokens[i])) {
            kept.tokens.push_back(table.tokens[i]);
            kept.vectors.push_back(table.vectors[i]);
          }
        }
        table = std::move(kept);
      }
      const auto km = kmeans(table.vectors, kmCfg);
      spdlog::info("inertia {:.6f} after {} iterations", km.inertia, km.iterations);
      emit(outPath, clusters_csv(table.tokens, km.assignments));
    } else if (*analyze) {
      const auto kg = read_kg(kgPath);
      std::optional<Category> cat;
      if (!durationCategory.empty()) {
        cat = parse_category(durationCategory);
        if (!cat) throw Error(ErrorCode::MalformedDocument, "unknown category " + durationCategory);
      }
      const auto grabs = grab_frequency(kg);
      const auto changes = state_change_frequency(kg, includeCoords);
      const auto durations = duration_by_activity(kg, cat);
      if (asJson) {
        nlohmann::json j;
        j["grab_frequency"] = ranking_json(grabs);
        j["state_change_frequency"] = ranking_json(changes);
        j["durations"] = nlohmann::json::array();
        for (const auto& d : durations) j["durations"].push_back({{"activity", d.activityIri}, {"label", d.label}, {"seconds", d.seconds}});
        std::cout << j.dump(2) << "\n";
      } else {
        std::cout << "Grabbed objects\n" << ranking_table("object", grabs) << "\nState changes\n"
                  << ranking_table("object", changes) << "\nDurations\n" << duration_table(durations);
      }
    } else if (*evaluate) {
      const auto findings = findings_from_json(nlohmann::json::parse(read_file(findingsPath)));
      const auto gt = parse_ground_truth(read_file(gtPath));
      std::set<std::string> events;
      if (!kgPath.empty()) {
        events = all_events(read_kg(kgPath));
      } else {
        spdlog::warn("no --kg given; true negatives are not counted");
        for (const auto& f : findings) events.insert(f.eventIri);
        for (const auto& [e, r] : gt) events.insert(e);
      }
      const auto cm = confusion(findings, gt, events);
      const auto m = prf1(cm);
      std::printf("tp %zu fp %zu fn %zu tn %zu\nprecision %.4g recall %.4g f1 %.4g\n", cm.tp, cm.fp, cm.fn, cm.tn,
                  m.precision, m.recall, m.f1);
    } else if (*pipeline) {
      auto cfg = load_pipeline_config(configPath);
      if (seedOverride) cfg.seed = *seedOverride;
      if (jobsOverride) cfg.jobs = *jobsOverride;
      if (thresholdOverride) cfg.sim.closeThreshold = *thresholdOverride;
      if (formatOverride) cfg.format = *formatOverride;
      if (pStrict) cfg.mode = RunMode::Strict;
      if (pRepair) cfg.mode = RunMode::Repair;
      if (!outPath.empty()) cfg.outputDir = outPath;
      cfg.propagate();
      const auto res = run_pipeline(cfg, [](const std::string& m) { spdlog::info("{}", m); });
      if (res.confusion) {
        const auto m = prf1(*res.confusion);
        spdlog::info("precision {:.4g} recall {:.4g} f1 {:.4g}", m.precision, m.recall, m.f1);
      }
      spdlog::info("artifacts in {}", cfg.outputDir.string());
    }
  } catch (const UnexecutableError& e) {
    spdlog::error("{}", e.what());
    return 1;
  } catch (const Error& e) {
    spdlog::error("{}: {}", to_string(e.code()), e.what());
    return 1;
  } catch (const nlohmann::json::exception& e) {
    spdlog::error("MalformedDocument: {}", e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    spdlog::error("Io: {}", e.what());
    return 1;
  }
  return 0;
}
