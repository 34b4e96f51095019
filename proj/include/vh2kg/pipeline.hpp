#pragma once

// End-to-end corpus processing: scripts -> traces -> KGs -> risks -> embeddings.

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "vh2kg/analytics.hpp"
#include "vh2kg/home.hpp"
#include "vh2kg/kg.hpp"
#include "vh2kg/kmeans.hpp"
#include "vh2kg/risk.hpp"
#include "vh2kg/script.hpp"
#include "vh2kg/simulator.hpp"
#include "vh2kg/skipgram.hpp"
#include "vh2kg/walks.hpp"

namespace vh2kg {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& p, std::string_view content) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + p.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

struct PipelineConfig {
  fs::path scriptsDir;
  fs::path manifest;  // CSV `file,category`; defaults to scriptsDir/manifest.csv
  fs::path environment;
  std::optional<fs::path> affordances;
  std::optional<fs::path> properties;
  std::optional<fs::path> groundTruth;
  fs::path outputDir = "out";

  RunMode mode = RunMode::Strict;
  SimConfig sim;
  double affordanceThreshold = kDefaultAffordanceThreshold;
  bool useWl = true;
  bool includeCoordinateChanges = false;
  std::string format = "ttl";
  WalkConfig walks;
  SkipGramConfig skipgram;
  KMeansConfig kmeans;
  std::uint64_t seed = 42;
  unsigned jobs = 1;

  /// Pushes the master seed and job count into every stage.
  void propagate() {
    walks.seed = seed;
    skipgram.seed = seed;
    kmeans.seed = seed;
    walks.jobs = jobs;
  }
};

namespace detail {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

inline RunMode parse_mode(const std::string& s) {
  if (s == "strict") return RunMode::Strict;
  if (s == "repair") return RunMode::Repair;
  throw Error(ErrorCode::MalformedDocument, "mode must be strict or repair, got " + s);
}

}  // namespace detail

/// Reads a JSON config. Relative paths resolve against the config's directory.
inline PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const fs::path& baseDir) {
  PipelineConfig c;
  auto path = [&](const std::string& s) { return fs::path(s).is_absolute() ? fs::path(s) : (baseDir / s).lexically_normal(); };
  try {
    const auto& paths = j.at("paths");
    c.scriptsDir = path(paths.at("scripts").get<std::string>());
    c.manifest = paths.contains("manifest") ? path(paths["manifest"].get<std::string>()) : c.scriptsDir / "manifest.csv";
    c.environment = path(paths.at("environment").get<std::string>());
    if (paths.contains("affordances")) c.affordances = path(paths["affordances"].get<std::string>());
    if (paths.contains("properties")) c.properties = path(paths["properties"].get<std::string>());
    if (paths.contains("ground_truth")) c.groundTruth = path(paths["ground_truth"].get<std::string>());
    if (paths.contains("output")) c.outputDir = path(paths["output"].get<std::string>());

    detail::read_opt(j, "seed", c.seed);
    detail::read_opt(j, "jobs", c.jobs);
    detail::read_opt(j, "format", c.format);

    if (j.contains("simulator")) {
      const auto& s = j["simulator"];
      if (s.contains("mode")) c.mode = detail::parse_mode(s["mode"].get<std::string>());
      detail::read_opt(s, "close_threshold", c.sim.closeThreshold);
      detail::read_opt(s, "interaction_offset", c.sim.interactionOffset);
      detail::read_opt(s, "affordance_threshold", c.affordanceThreshold);
      if (s.contains("durations")) {
        const auto& d = s["durations"];
        detail::read_opt(d, "walk_speed", c.sim.durations.walkSpeed);
        detail::read_opt(d, "default_seconds", c.sim.durations.defaultSeconds);
        detail::read_opt(d, "min_walk_seconds", c.sim.durations.minWalkSeconds);
        if (d.contains("per_verb")) {
          for (const auto& [verb, v] : d["per_verb"].items()) c.sim.durations.perVerbSeconds[verb] = v.get<double>();
        }
      }
    }
    if (j.contains("walks")) {
      const auto& w = j["walks"];
      detail::read_opt(w, "depth", c.walks.depth);
      detail::read_opt(w, "walks_per_entity", c.walks.walksPerEntity);
      detail::read_opt(w, "wl_iterations", c.walks.wlIterations);
      detail::read_opt(w, "use_wl", c.useWl);
      detail::read_opt(w, "canonicalize", c.walks.canonicalize);
      if (w.contains("skip_predicates")) {
        c.walks.skipPredicates.clear();
        for (const auto& p : w["skip_predicates"]) {
          auto s = p.get<std::string>();
          if (s.starts_with(":")) s = std::string(rdf::ns::kVh) + s.substr(1);
          c.walks.skipPredicates.insert(s);
        }
      }
    }
    if (j.contains("skipgram")) {
      const auto& s = j["skipgram"];
      detail::read_opt(s, "vector_size", c.skipgram.vectorSize);
      detail::read_opt(s, "window", c.skipgram.window);
      detail::read_opt(s, "epochs", c.skipgram.epochs);
      detail::read_opt(s, "learning_rate", c.skipgram.learningRate);
      detail::read_opt(s, "negative_samples", c.skipgram.negativeSamples);
    }
    if (j.contains("kmeans")) {
      const auto& k = j["kmeans"];
      detail::read_opt(k, "k", c.kmeans.k);
      detail::read_opt(k, "max_iters", c.kmeans.maxIters);
      if (k.contains("init")) c.kmeans.init = k["init"].get<std::string>() == "random" ? KMeansInit::Random : KMeansInit::PlusPlus;
    }
    if (j.contains("analytics")) detail::read_opt(j["analytics"], "include_coordinate_changes", c.includeCoordinateChanges);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("config: ") + e.what());
  }
  if (c.format != "ttl" && c.format != "nt") throw Error(ErrorCode::MalformedDocument, "format must be ttl or nt");
  c.sim.durations.validate();
  c.propagate();
  return c;
}

inline PipelineConfig load_pipeline_config(const fs::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("config: ") + e.what());
  }
  return pipeline_config_from_json(j, file.parent_path());
}

/// Every referenced input must exist before a run starts.
inline void check_inputs(const PipelineConfig& c) {
  std::vector<fs::path> required = {c.scriptsDir, c.manifest, c.environment};
  for (const auto* opt : {&c.affordances, &c.properties, &c.groundTruth}) {
    if (*opt) required.push_back(**opt);
  }
  for (const auto& p : required) {
    if (!fs::exists(p)) throw Error(ErrorCode::Io, "missing input " + p.string());
  }
}

struct ManifestEntry {
  std::string file;
  Category category = Category::Other;
};

inline std::vector<ManifestEntry> parse_manifest(std::string_view csv) {
  std::vector<ManifestEntry> out;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.starts_with("file,")) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::MalformedDocument, "manifest line " + std::to_string(lineNo));
    auto cat = parse_category(line.substr(comma + 1));
    if (!cat) throw Error(ErrorCode::MalformedDocument, "unknown category on manifest line " + std::to_string(lineNo));
    out.push_back({line.substr(0, comma), *cat});
  }
  return out;
}

inline std::vector<ActivityScript> load_scripts(const fs::path& scriptsDir, const fs::path& manifest) {
  std::vector<ActivityScript> scripts;
  for (const auto& e : parse_manifest(read_file(manifest))) {
    auto s = parse_script(read_file(scriptsDir / e.file), {.strict = true});
    s.category = e.category;
    scripts.push_back(std::move(s));
  }
  return scripts;
}

inline PropertyTable load_properties(const PipelineConfig& c) {
  return c.properties ? parse_property_table(read_file(*c.properties)) : default_property_table();
}

inline EnvironmentGraph load_pipeline_environment(const PipelineConfig& c, std::vector<std::string>* warnings = nullptr) {
  const auto props = load_properties(c);
  auto env = load_environment(read_file(c.environment), props);
  if (c.affordances) {
    auto scored = filter_affordances(parse_affordance_csv(read_file(*c.affordances), warnings), c.affordanceThreshold);
    apply_affordances(env, props, scored);
  }
  return env;
}

struct ActivityRun {
  ActivityMeta meta;
  Trace trace;
  rdf::KgDocument kg;
  std::vector<RiskFinding> findings;  // from the KG
};

struct CorpusRun {
  std::vector<ActivityRun> activities;
  rdf::KgDocument merged;  // all activity KGs plus riskFactor triples
  std::vector<RiskFinding> findings;
};

/// Simulates, builds and checks every script. Activity k gets index k.
/// Work is split over `jobs` threads; results keep script order.
inline CorpusRun run_corpus(const std::vector<ActivityScript>& scripts, const EnvironmentGraph& env,
                            const SimConfig& sim, RunMode mode, const PropertyTable& props, unsigned jobs = 1) {
  CorpusRun run;
  run.activities.resize(scripts.size());
  std::vector<std::exception_ptr> errors(scripts.size());
  auto work = [&](std::size_t i) {
    try {
      auto& a = run.activities[i];
      a.meta.activityIndex = i;
      a.meta.properties = props;
      a.trace = run_script(scripts[i], env, sim, mode);
      a.kg = build_activity_kg(a.trace, a.meta);
      a.findings = detect_risks(a.kg).findings;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(scripts.size(), 1))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < scripts.size(); ++i) work(i);
  } else {
    std::vector<std::thread> workers;
    for (unsigned j = 0; j < jobs; ++j) {
      workers.emplace_back([&, j] {
        for (std::size_t i = j; i < scripts.size(); i += jobs) work(i);
      });
    }
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& a : run.activities) {
    run.merged.merge(a.kg);
    run.findings.insert(run.findings.end(), a.findings.begin(), a.findings.end());
  }
  detail::sort_findings(run.findings);
  for (const auto& f : run.findings) {
    run.merged.add(rdf::iri(f.activityIri), rdf::iri(vocab::kRiskFactor), rdf::iri(f.eventIri));
    run.merged.add(rdf::iri(f.eventIri), rdf::iri(vocab::kType), rdf::iri(rule(f.rule).riskClass));
  }
  return run;
}

inline WalkCorpus corpus_walks(const rdf::KgDocument& kg, const WalkConfig& cfg, bool useWl) {
  return useWl ? wl_relabel(kg, cfg) : extract_walks(kg, cfg);
}

struct ActivityEmbedding {
  std::vector<std::string> tokens;  // activity root tokens
  std::vector<std::vector<double>> vectors;
};

inline ActivityEmbedding activity_vectors(const rdf::KgDocument& kg, const EmbeddingModel& model) {
  ActivityEmbedding out;
  for (const auto& root : activity_roots(kg)) {
    const auto token = walk_token(root);
    if (!model.vocab.find(token)) continue;
    out.tokens.push_back(token);
    out.vectors.push_back(model.vector(token));
  }
  return out;
}

inline std::string clusters_csv(const std::vector<std::string>& tokens, const std::vector<std::size_t>& assignments) {
  std::string out = "token,cluster\n";
  for (std::size_t i = 0; i < tokens.size(); ++i) out += tokens[i] + "," + std::to_string(assignments[i]) + "\n";
  return out;
}

struct PipelineResult {
  CorpusRun corpus;
  std::optional<ConfusionMatrix> confusion;
  std::size_t walkCount = 0;
  std::size_t vocabSize = 0;
};

using LogFn = std::function<void(const std::string&)>;

/// Runs every stage and writes artifacts under cfg.outputDir:
///   kg/<activity>.{ttl,nt}, corpus.nt, findings.json, explanations/*.dot|.txt,
///   rules/R1.rq, rules/R2.rq, schema.ttl, walks.txt, vectors.tsv,
///   clusters.csv, report.json, report.txt
inline PipelineResult run_pipeline(const PipelineConfig& cfg, const LogFn& log = {}) {
  auto info = [&](const std::string& m) {
    if (log) log(m);
  };
  check_inputs(cfg);
  std::vector<std::string> warnings;
  const auto env = load_pipeline_environment(cfg, &warnings);
  for (const auto& w : warnings) info("warning: " + w);
  const auto scripts = load_scripts(cfg.scriptsDir, cfg.manifest);
  info("loaded " + std::to_string(scripts.size()) + " scripts");

  PipelineResult res;
  res.corpus = run_corpus(scripts, env, cfg.sim, cfg.mode, load_properties(cfg), cfg.jobs);
  const auto& out = cfg.outputDir;
  fs::create_directories(out);

  for (const auto& a : res.corpus.activities) {
    const auto name = IriFactory(snake_case(a.trace.script.name), a.meta.activityIndex, env.sceneId).activity_local();
    if (cfg.format == "ttl")
      write_file(out / "kg" / (name + ".ttl"), rdf::serialize_turtle(a.kg));
    else
      write_file(out / "kg" / (name + ".nt"), rdf::serialize_ntriples(a.kg));
  }
  write_file(out / "corpus.nt", rdf::serialize_ntriples(res.corpus.merged));
  write_file(out / "schema.ttl", kSchemaTurtle);
  write_file(out / "rules" / "R1.rq", rule_query(RuleId::R1));
  write_file(out / "rules" / "R2.rq", rule_query(RuleId::R2));
  info("built " + std::to_string(res.corpus.merged.size()) + " triples");

  write_file(out / "findings.json", findings_to_json(res.corpus.findings).dump(2) + "\n");
  for (const auto& a : res.corpus.activities) {
    for (const auto& f : a.findings) {
      const auto ex = explain(f, a.kg);
      const auto stem = f.eventIri.substr(rdf::ns::kEx.size()) + "_" + std::string(to_string(f.rule));
      write_file(out / "explanations" / (stem + ".dot"), ex.dot);
      write_file(out / "explanations" / (stem + ".txt"), ex.text + "\n");
    }
  }
  info(std::to_string(res.corpus.findings.size()) + " risk findings");

  const auto walks = corpus_walks(res.corpus.merged, cfg.walks, cfg.useWl);
  res.walkCount = walks.sequences.size();
  write_file(out / "walks.txt", serialize_walks(walks));
  const auto model = train_skipgram(walks, cfg.skipgram);
  res.vocabSize = model.vocab.size();
  write_file(out / "vectors.tsv", export_vectors(model));
  info(std::to_string(res.walkCount) + " walks, vocabulary " + std::to_string(res.vocabSize));

  const auto acts = activity_vectors(res.corpus.merged, model);
  if (acts.vectors.size() >= cfg.kmeans.k) {
    const auto km = kmeans(acts.vectors, cfg.kmeans);
    write_file(out / "clusters.csv", clusters_csv(acts.tokens, km.assignments));
  } else {
    info("skipping clustering: fewer activities than k");
  }

  if (cfg.groundTruth) {
    const auto gt = parse_ground_truth(read_file(*cfg.groundTruth));
    res.confusion = confusion(res.corpus.findings, gt, all_events(res.corpus.merged));
  }
  const auto report = analytics_report(res.corpus.merged, res.confusion, cfg.includeCoordinateChanges);
  write_file(out / "report.json", report.dump(2) + "\n");
  std::string text = "Grabbed objects\n" + ranking_table("object", grab_frequency(res.corpus.merged)) +
                     "\nState changes\n" +
                     ranking_table("object", state_change_frequency(res.corpus.merged, cfg.includeCoordinateChanges)) +
                     "\nLeisure durations\n" + duration_table(duration_by_activity(res.corpus.merged, Category::Leisure));
  if (res.confusion) {
    const auto m = prf1(*res.confusion);
    char buf[128];
    std::snprintf(buf, sizeof buf, "\nprecision %.4g recall %.4g f1 %.4g\n", m.precision, m.recall, m.f1);
    text += buf;
  }
  write_file(out / "report.txt", text);
  return res;
}

}  // namespace vh2kg
