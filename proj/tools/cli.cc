// Copyright 2026 The ERACL Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "eracl/checkpoint.h"
#include "eracl/corpus.h"
#include "eracl/error.h"
#include "eracl/metrics.h"
#include "eracl/pipeline.h"
#include "json.hpp"

namespace eracl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kRuntime, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kRuntime, "cannot write " + path.string());
  out << text;
}

std::string Hex64(uint64_t v) {
  std::ostringstream ss;
  ss << std::hex << std::setw(16) << std::setfill('0') << v;
  return ss.str();
}

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string Dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

struct LoadedCorpus {
  std::string path;
  Corpus corpus;
  std::string hash;
};

LoadedCorpus Load(const std::string& path) {
  const std::string text = ReadFile(path);
  return {path, ParseDocRed(text), Hex64(Fnv1a64(text))};
}

Corpus Union(const std::vector<const Corpus*>& parts) {
  Corpus out;
  for (const Corpus* c : parts) {
    out.documents.insert(out.documents.end(), c->documents.begin(),
                         c->documents.end());
  }
  return out;
}

// Options shared by the training commands.
struct ConfigFlags {
  std::string profile;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool no_era = false;
  bool no_cl = false;
  CLI::Option* no_era_opt = nullptr;
  CLI::Option* no_cl_opt = nullptr;

  void Attach(CLI::App* app) {
    app->add_option("--profile", profile, "Base profile (desk, paper-defaults)");
    app->add_option("--config", config_path, "Flat key = value config file");
    for (const std::string& key : TrainConfig::Keys()) {
      options[key] = app->add_option(Dashed(key), values[key],
                                     "Overrides config key " + key);
    }
    no_era_opt = app->add_flag("--no-era", no_era, "Disable ERA");
    no_cl_opt = app->add_flag("--no-cl", no_cl, "Disable contrastive pretraining");
    options["era_threshold"]->excludes(options["era_relations"]);
    for (const char* k : {"use_era", "era_p", "era_alpha", "era_threshold",
                          "era_relations"}) {
      no_era_opt->excludes(options[k]);
    }
    for (const char* k : {"use_cl", "cl_tau", "cl_queue_size", "cl_momentum",
                          "cl_proj_dim", "cl_lr", "pretrain_epochs"}) {
      no_cl_opt->excludes(options[k]);
    }
  }

  bool AnyGiven() const {
    if (!profile.empty() || !config_path.empty() || no_era || no_cl) return true;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) return true;
    }
    return false;
  }

  TrainConfig Resolve() const {
    std::map<std::string, std::string> overrides;
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) overrides[key] = values.at(key);
    }
    if (no_era) overrides["use_era"] = "false";
    if (no_cl) overrides["use_cl"] = "false";
    const std::string text = config_path.empty() ? "" : ReadFile(config_path);
    return ResolveConfig(profile, text, overrides);
  }
};

struct RunPaths {
  std::string run_dir;
  fs::path dir;

  void Resolve(const std::string& command, uint64_t seed) {
    if (!run_dir.empty()) {
      dir = run_dir;
    } else {
      const char* env = std::getenv(kRunDirEnv);
      const fs::path base = env && *env ? fs::path(env) : fs::path("runs");
      dir = base / (command + "-seed" + std::to_string(seed));
    }
    fs::create_directories(dir);
  }
};

class MetricsLog {
 public:
  MetricsLog(const fs::path& path, bool append)
      : out_(path, append ? std::ios::app : std::ios::trunc) {
    if (!out_) throw Error(ErrorKind::kRuntime, "cannot write " + path.string());
  }
  void operator()(const MetricsRecord& r) {
    out_ << MetricsJsonLine(r) << '\n';
    out_.flush();
  }

 private:
  std::ofstream out_;
};

json CorpusJson(const LoadedCorpus& c) {
  return {{"path", c.path},
          {"fnv1a64", c.hash},
          {"documents", c.corpus.documents.size()}};
}

void WriteManifest(const fs::path& dir, const std::string& command,
                   const std::vector<std::string>& args,
                   const TrainConfig& config, const json& corpora,
                   const json& artifacts) {
  json m;
  m["command"] = command;
  json argv = json::array({"eracl"});
  for (const auto& a : args) argv.push_back(a);
  m["command_line"] = std::move(argv);
  json kv = json::object();
  for (const auto& [k, v] : config.ToKeyValues()) kv[k] = v;
  m["config"] = std::move(kv);
  m["seed"] = config.seed;
  m["corpora"] = corpora;
  m["artifacts"] = artifacts;
  m["timestamp"] = UtcTimestamp();
  m["checkpoint_version"] = kCheckpointVersion;
  WriteFile(dir / "manifest.json", m.dump(2) + "\n");
}

std::string HistogramCsv(const Corpus& corpus) {
  const FrequencyMap freqs = RelationFrequencies(corpus);
  std::vector<std::pair<std::string, int64_t>> rows(freqs.begin(), freqs.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  int64_t total = 0;
  for (const auto& [id, n] : rows) total += n;
  std::ostringstream ss;
  ss.precision(6);
  ss << std::fixed;
  ss << "rank,relation,count,fraction,cumulative_fraction\n";
  int64_t running = 0;
  for (size_t i = 0; i < rows.size(); ++i) {
    running += rows[i].second;
    const double frac = total ? static_cast<double>(rows[i].second) / total : 0.0;
    const double cum = total ? static_cast<double>(running) / total : 0.0;
    ss << i + 1 << ',' << rows[i].first << ',' << rows[i].second << ','
       << frac << ',' << cum << '\n';
  }
  return ss.str();
}

double TopCoverage(const Corpus& corpus, size_t k) {
  const FrequencyMap freqs = RelationFrequencies(corpus);
  std::vector<int64_t> counts;
  int64_t total = 0;
  for (const auto& [id, n] : freqs) {
    counts.push_back(n);
    total += n;
  }
  std::sort(counts.rbegin(), counts.rend());
  int64_t top = 0;
  for (size_t i = 0; i < std::min(k, counts.size()); ++i) top += counts[i];
  return total ? static_cast<double>(top) / total : 0.0;
}

int MapError(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kUsage:
      return kExitUsage;
    case ErrorKind::kParse:
    case ErrorKind::kValidation:
      return kExitValidation;
    case ErrorKind::kRuntime:
      return kExitRuntime;
  }
  return kExitRuntime;
}

// Re-parses records one at a time so every failing document is reported.
void ListRecordErrors(const std::string& text, std::ostream& err) {
  const json all = json::parse(text, nullptr, false);
  if (!all.is_array()) return;
  for (size_t i = 0; i < all.size(); ++i) {
    try {
      ParseDocRed("[" + all[i].dump() + "]");
    } catch (const Error& e) {
      err << "record " << i << ": " << e.what() << '\n';
    }
  }
}

RelationScheme ResolveScheme(const std::string& scheme_path,
                             const std::vector<const Corpus*>& corpora) {
  if (!scheme_path.empty()) return RelationScheme::Load(scheme_path);
  return RelationScheme::FromCorpus(Union(corpora));
}

}  // namespace

TrainConfig ResolveConfig(const std::string& profile,
                          const std::string& config_text,
                          const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> file = ParseKeyValues(config_text);
  std::string base = profile;
  if (auto it = file.find("profile"); it != file.end()) {
    if (base.empty()) base = it->second;
    file.erase(it);
  }
  TrainConfig config = base.empty() ? TrainConfig{} : Profile(base);
  for (const auto& [k, v] : file) config.Set(k, v);
  for (const auto& [k, v] : overrides) config.Set(k, v);
  config.Validate();
  return config;
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Document-level relation extraction with ERA and ERACL"};
  app.require_subcommand(1);
  std::function<int()> action;

  // ingest
  std::string ingest_path, ingest_histogram;
  CLI::App* ingest = app.add_subcommand("ingest", "Validate a DocRED-format corpus");
  ingest->add_option("path", ingest_path, "Corpus JSON")->required();
  ingest->add_option("--histogram", ingest_histogram,
                     "Write the relation histogram CSV here instead of stdout");
  ingest->callback([&] {
    action = [&]() -> int {
      const std::string text = ReadFile(ingest_path);
      Corpus corpus;
      try {
        corpus = ParseDocRed(text);
      } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (e.kind() == ErrorKind::kValidation) ListRecordErrors(text, err);
        return MapError(e);
      }
      size_t entities = 0, mentions = 0;
      for (const auto& d : corpus.documents) {
        entities += d.entities.size();
        for (const auto& e : d.entities) mentions += e.mentions.size();
      }
      const FrequencyMap freqs = RelationFrequencies(corpus);
      out << corpus.documents.size() << " documents, " << freqs.size()
          << " relations\n";
      out << "entities: " << entities << "\nmentions: " << mentions
          << "\ntriples: " << corpus.NumTriples() << '\n';
      out << "top7_coverage: " << std::fixed << std::setprecision(4)
          << TopCoverage(corpus, 7) << '\n';
      out.unsetf(std::ios::fixed);
      const std::string csv = HistogramCsv(corpus);
      if (ingest_histogram.empty()) {
        out << '\n' << csv;
      } else {
        WriteFile(ingest_histogram, csv);
      }
      return kExitOk;
    };
  });

  // synth
  SynthSpec spec;
  uint64_t synth_seed = 1;
  std::string synth_out, synth_scheme_out;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic long-tailed corpus");
  synth->add_option("--out", synth_out, "Output corpus JSON")->required();
  synth->add_option("--scheme-out", synth_scheme_out, "Output relation scheme JSON");
  synth->add_option("--seed", synth_seed);
  synth->add_option("--docs", spec.num_documents);
  synth->add_option("--relations", spec.num_relations);
  synth->add_option("--zipf", spec.zipf_exponent);
  synth->add_option("--entities", spec.entities_per_document);
  synth->add_option("--labels", spec.labels_per_document);
  synth->add_option("--vocab", spec.vocab_size);
  synth->add_option("--entity-names", spec.entity_names);
  synth->add_option("--filler-min", spec.filler_min);
  synth->add_option("--filler-max", spec.filler_max);
  synth->add_option("--distractor-rate", spec.distractor_rate);
  synth->add_option("--multi-label-rate", spec.multi_label_rate);
  synth->add_option("--label-noise", spec.label_noise);
  synth->callback([&] {
    action = [&]() -> int {
      Corpus corpus;
      try {
        corpus = GenerateSynthetic(spec, synth_seed);
      } catch (const Error& e) {
        err << "error: invalid synthetic spec: " << e.what() << '\n';
        return kExitUsage;
      }
      SaveDocRed(corpus, synth_out);
      if (!synth_scheme_out.empty()) {
        WriteFile(synth_scheme_out, SyntheticScheme(spec.num_relations).ToJson());
      }
      out << corpus.documents.size() << " documents, " << corpus.NumTriples()
          << " triples written to " << synth_out << '\n';
      for (const auto& [id, n] : RelationFrequencies(corpus)) {
        out << id << ',' << n << '\n';
      }
      return kExitOk;
    };
  });

  // pretrain
  ConfigFlags pre_flags;
  RunPaths pre_paths;
  std::string pre_distant, pre_scheme, pre_resume;
  std::vector<std::string> pre_vocab_from;
  int64_t pre_max_steps = -1;
  CLI::App* pretrain = app.add_subcommand("pretrain", "Contrastive pretraining");
  pretrain->add_option("--distant", pre_distant, "Distant corpus JSON")->required();
  pretrain->add_option("--vocab-from", pre_vocab_from,
                       "Extra corpora contributing to the vocabulary");
  pretrain->add_option("--scheme", pre_scheme, "Relation scheme JSON");
  pretrain->add_option("--run-dir", pre_paths.run_dir, "Output directory");
  pretrain->add_option("--max-steps", pre_max_steps,
                       "Stop after this many optimizer steps");
  pretrain->add_option("--resume", pre_resume, "Resume from a checkpoint");
  pre_flags.Attach(pretrain);
  pretrain->callback([&] {
    action = [&]() -> int {
      if (!pre_resume.empty() && pre_flags.AnyGiven()) {
        throw Error(ErrorKind::kUsage,
                    "config flags cannot be combined with --resume");
      }
      const LoadedCorpus distant = Load(pre_distant);
      std::unique_ptr<Trainer> trainer;
      if (!pre_resume.empty()) {
        trainer = std::make_unique<Trainer>(Trainer::Restore(ReadArchive(pre_resume)));
      } else {
        const TrainConfig config = pre_flags.Resolve();
        if (!config.use_cl) {
          throw Error(ErrorKind::kUsage, "pretrain requires use_cl (drop --no-cl)");
        }
        std::vector<LoadedCorpus> extra;
        std::vector<const Corpus*> parts{&distant.corpus};
        for (const auto& p : pre_vocab_from) extra.push_back(Load(p));
        for (const auto& e : extra) parts.push_back(&e.corpus);
        trainer = std::make_unique<Trainer>(config, Vocabulary::Build(Union(parts)),
                                            ResolveScheme(pre_scheme, {&distant.corpus}));
      }
      const TrainConfig& config = trainer->config();
      pre_paths.Resolve("pretrain", config.seed);
      const fs::path ckpt = pre_paths.dir / "pretrain.ckpt";
      WriteManifest(pre_paths.dir, "pretrain", args, config,
                    {{"distant", CorpusJson(distant)}},
                    {{"checkpoint", ckpt.string()},
                     {"metrics", (pre_paths.dir / "metrics.jsonl").string()}});
      MetricsLog log(pre_paths.dir / "metrics.jsonl", !pre_resume.empty());
      trainer->set_metrics_sink([&](const MetricsRecord& r) { log(r); });
      const bool done = trainer->Pretrain(distant.corpus, pre_max_steps);
      WriteArchive(trainer->Snapshot(), ckpt.string());
      const auto& losses = trainer->pretrain_history().epoch_losses;
      for (size_t e = 0; e < losses.size(); ++e) {
        out << "pretrain epoch " << e << " loss " << losses[e] << '\n';
      }
      out << (done ? "pretraining complete: " : "pretraining paused: ")
          << ckpt.string() << '\n';
      return kExitOk;
    };
  });

  // train
  ConfigFlags train_flags;
  RunPaths train_paths;
  std::string train_path, dev_path, train_scheme, init_from, train_resume;
  std::vector<std::string> train_vocab_from;
  int64_t train_max_steps = -1;
  CLI::App* train = app.add_subcommand("train", "Fine-tune the relation classifier");
  train->add_option("--train", train_path, "Training corpus JSON")->required();
  train->add_option("--dev", dev_path, "Development corpus JSON");
  train->add_option("--vocab-from", train_vocab_from,
                    "Extra corpora contributing to the vocabulary");
  train->add_option("--scheme", train_scheme, "Relation scheme JSON");
  train->add_option("--run-dir", train_paths.run_dir, "Output directory");
  train->add_option("--max-steps", train_max_steps,
                    "Stop after this many optimizer steps");
  auto* init_opt = train->add_option("--init-from", init_from,
                                     "Start from a pretraining checkpoint");
  auto* resume_opt =
      train->add_option("--resume", train_resume, "Resume from a checkpoint");
  init_opt->excludes(resume_opt);
  train_flags.Attach(train);
  train->callback([&] {
    action = [&]() -> int {
      if (!train_resume.empty() && train_flags.AnyGiven()) {
        throw Error(ErrorKind::kUsage,
                    "config flags cannot be combined with --resume");
      }
      std::unique_ptr<Trainer> trainer;
      if (!train_resume.empty()) {
        trainer =
            std::make_unique<Trainer>(Trainer::Restore(ReadArchive(train_resume)));
      } else {
        const TrainConfig config = train_flags.Resolve();
        if (config.use_cl && init_from.empty()) {
          throw Error(ErrorKind::kUsage,
                      "use_cl needs --init-from a pretraining checkpoint "
                      "(or pass --no-cl)");
        }
        if (!config.use_cl && !init_from.empty()) {
          throw Error(ErrorKind::kUsage, "--init-from conflicts with --no-cl");
        }
        if (!init_from.empty()) {
          trainer = std::make_unique<Trainer>(
              Trainer::FromPretrained(ReadArchive(init_from), config));
        }
      }
      const LoadedCorpus train_corpus = Load(train_path);
      std::optional<LoadedCorpus> dev;
      if (!dev_path.empty()) dev = Load(dev_path);
      if (!trainer) {
        std::vector<LoadedCorpus> extra;
        std::vector<const Corpus*> parts{&train_corpus.corpus};
        for (const auto& p : train_vocab_from) extra.push_back(Load(p));
        for (const auto& e : extra) parts.push_back(&e.corpus);
        trainer = std::make_unique<Trainer>(
            train_flags.Resolve(), Vocabulary::Build(Union(parts)),
            ResolveScheme(train_scheme, {&train_corpus.corpus}));
      }
      const TrainConfig& config = trainer->config();
      train_paths.Resolve("train", config.seed);
      const fs::path ckpt = train_paths.dir / "model.ckpt";
      json corpora = {{"train", CorpusJson(train_corpus)}};
      if (dev) corpora["dev"] = CorpusJson(*dev);
      json artifacts = {{"checkpoint", ckpt.string()},
                        {"metrics", (train_paths.dir / "metrics.jsonl").string()}};
      if (!init_from.empty()) artifacts["init_from"] = init_from;
      if (dev) artifacts["dev_report"] = (train_paths.dir / "dev_report.json").string();
      WriteManifest(train_paths.dir, "train", args, config, corpora, artifacts);
      MetricsLog log(train_paths.dir / "metrics.jsonl", !train_resume.empty());
      trainer->set_metrics_sink([&](const MetricsRecord& r) { log(r); });
      const bool done = trainer->Finetune(train_corpus.corpus,
                                          dev ? &dev->corpus : nullptr,
                                          train_max_steps);
      WriteArchive(trainer->Snapshot(), ckpt.string());
      const auto& hist = trainer->finetune_history();
      for (size_t e = 0; e < hist.epoch_losses.size(); ++e) {
        out << "epoch " << e << " loss " << hist.epoch_losses[e];
        if (e < hist.dev_f1.size()) out << " dev_f1 " << hist.dev_f1[e];
        out << '\n';
      }
      if (done && dev) {
        const MetricReport report =
            Evaluate(trainer->model(), dev->corpus, train_corpus.corpus,
                     trainer->vocab(), trainer->scheme(), config.max_length,
                     UndefinedF1Policy::kExclude, config.workers);
        WriteFile(train_paths.dir / "dev_report.json",
                  report.ToJson(trainer->scheme()));
        out << "dev micro_f1 " << report.micro.f1 << '\n';
      }
      out << (done ? "training complete: " : "training paused: ") << ckpt.string()
          << '\n';
      return kExitOk;
    };
  });

  // eval
  RunPaths eval_paths;
  std::string eval_ckpt, eval_data, eval_train, eval_policy = "exclude";
  bool eval_csv = false;
  CLI::App* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", eval_ckpt, "Model checkpoint")->required();
  eval->add_option("--data", eval_data, "Evaluation corpus JSON")->required();
  eval->add_option("--train", eval_train,
                   "Training corpus for Ign F1 and frequency buckets");
  eval->add_option("--run-dir", eval_paths.run_dir, "Output directory");
  eval->add_option("--undefined-f1", eval_policy,
                   "Relations with no gold and no predictions: exclude or zero")
      ->check(CLI::IsMember({"exclude", "zero"}));
  eval->add_flag("--csv", eval_csv, "Also write per-relation and cluster CSVs");
  eval->callback([&] {
    action = [&]() -> int {
      const Trainer trainer = Trainer::Restore(ReadArchive(eval_ckpt));
      const LoadedCorpus data = Load(eval_data);
      std::optional<LoadedCorpus> train_corpus;
      if (!eval_train.empty()) train_corpus = Load(eval_train);
      const Corpus empty;
      const TrainConfig& config = trainer.config();
      const MetricReport report = Evaluate(
          trainer.model(), data.corpus, train_corpus ? train_corpus->corpus : empty,
          trainer.vocab(), trainer.scheme(), config.max_length,
          eval_policy == "zero" ? UndefinedF1Policy::kAsZero
                                : UndefinedF1Policy::kExclude,
          config.workers);
      eval_paths.Resolve("eval", config.seed);
      json corpora = {{"data", CorpusJson(data)}};
      if (train_corpus) corpora["train"] = CorpusJson(*train_corpus);
      json artifacts = {{"report", (eval_paths.dir / "report.json").string()},
                        {"checkpoint", eval_ckpt}};
      WriteManifest(eval_paths.dir, "eval", args, config, corpora, artifacts);
      const std::string text = report.ToJson(trainer.scheme());
      WriteFile(eval_paths.dir / "report.json", text);
      if (eval_csv) {
        WriteFile(eval_paths.dir / "per_relation.csv",
                  report.PerRelationCsv(trainer.scheme()));
        WriteFile(eval_paths.dir / "cluster_f1.csv", report.ClusterCsv());
      }
      out << text;
      return kExitOk;
    };
  });

  // stats
  std::string stats_data, stats_scheme;
  int64_t stats_threshold = 200;
  CLI::App* stats = app.add_subcommand("stats", "Relation frequencies and augment set");
  stats->add_option("--data", stats_data, "Corpus JSON")->required();
  stats->add_option("--scheme", stats_scheme, "Relation scheme JSON");
  stats->add_option("--threshold", stats_threshold,
                    "Augment relations with fewer training triples")
      ->check(CLI::NonNegativeNumber);
  stats->callback([&] {
    action = [&]() -> int {
      const LoadedCorpus data = Load(stats_data);
      const RelationScheme scheme = ResolveScheme(stats_scheme, {&data.corpus});
      const std::vector<int64_t> freqs = SchemeFrequencies(data.corpus, scheme);
      FrequencyMap fm;
      for (int r = 0; r < scheme.size(); ++r) fm[scheme.id(r)] = freqs[r];
      const std::set<std::string> aug = SelectAugmentSet(fm, stats_threshold);
      int max_tokens = 0;
      int64_t total_tokens = 0, pairs = 0;
      for (const auto& d : data.corpus.documents) {
        int mentions = 0;
        for (const auto& e : d.entities) mentions += static_cast<int>(e.mentions.size());
        max_tokens = std::max(max_tokens, d.NumTokens() + 2 * mentions);
        total_tokens += d.NumTokens();
        const auto n = static_cast<int64_t>(d.entities.size());
        pairs += n * (n - 1);
      }
      out << "documents: " << data.corpus.documents.size()
          << "\ntriples: " << data.corpus.NumTriples()
          << "\nentity_pairs: " << pairs << "\nmean_tokens: "
          << (data.corpus.documents.empty()
                  ? 0.0
                  : static_cast<double>(total_tokens) /
                        static_cast<double>(data.corpus.documents.size()))
          << "\nmax_marked_length: " << max_tokens
          << "\naugment_set_size: " << aug.size() << "\n\n";
      out << "relation,count,augment\n";
      for (int r = 0; r < scheme.size(); ++r) {
        out << scheme.id(r) << ',' << freqs[r] << ','
            << (aug.count(scheme.id(r)) ? 1 : 0) << '\n';
      }
      return kExitOk;
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action ? action() : kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return MapError(e);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}

}  // namespace eracl::cli
