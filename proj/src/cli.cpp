#include "solvency/cli.hpp"

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "solvency/balance.hpp"
#include "solvency/config.hpp"
#include "solvency/datagen.hpp"
#include "solvency/dataset.hpp"
#include "solvency/errors.hpp"
#include "solvency/eval.hpp"
#include "solvency/feature_select.hpp"
#include "solvency/tree.hpp"
#include "text.hpp"

namespace solvency::cli {

namespace {

constexpr const char* kSeedEnv = "SOLVENCY_SEED";

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raw flag values; only applied over the config when the flag was given.
struct Flags {
  std::string config;
  std::uint64_t seed = 0;
  std::string input, output, model, report, summary;
  bool allow_duplicates = false;
  // generate
  std::string counts = "44,13,16,543";
  double separation = 6.0;
  std::size_t attributes = kNumAttributes;
  // feature selection
  std::size_t bins = 10;
  // balance
  std::string mode;
  double bias = 1.0;
  double percent = 100.0;
  std::string targets;
  std::size_t k = 5;
  // learner / cv
  double cf = 0.25;
  std::size_t min_leaf = 2;
  std::size_t max_depth = 0;
  std::size_t folds = 10;
};

ClassCounts parse_counts(const std::string& text, const char* flag) {
  const auto parts = text::split(text, ',');
  if (parts.size() != kNumClasses) {
    throw UsageError(std::string(flag) + " needs 4 comma-separated counts (I,W,M,S)");
  }
  ClassCounts out{};
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    auto value = text::parse_int<std::size_t>(parts[c]);
    if (!value) throw UsageError(std::string(flag) + ": '" + std::string(parts[c]) + "' is not a count");
    out[c] = *value;
  }
  return out;
}

class Command {
 public:
  Command(CLI::App* app, Flags& flags, std::ostream& out) : app_(app), flags_(flags), out_(out) {}

  bool given(const std::string& name) const {
    const auto* opt = app_->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
  }

  PipelineConfig config() const {
    PipelineConfig cfg;
    if (const char* env = std::getenv(kSeedEnv)) {
      auto seed = text::parse_int<std::uint64_t>(env);
      if (!seed) throw UsageError(std::string(kSeedEnv) + " must be an unsigned integer");
      cfg.seed = *seed;
    }
    if (given("--config")) {
      if (!std::filesystem::exists(flags_.config)) throw UsageError("config file not found: " + flags_.config);
      cfg = load_config(flags_.config);
    }
    if (given("--seed")) cfg.seed = flags_.seed;
    if (given("--input")) cfg.paths.input = flags_.input;
    if (given("--output")) cfg.paths.output = flags_.output;
    if (given("--model")) cfg.paths.model = flags_.model;
    if (given("--report")) cfg.paths.report = flags_.report;
    if (given("--summary")) cfg.paths.summary = flags_.summary;
    if (given("--cf")) cfg.learner.confidence_factor = flags_.cf;
    if (given("--min-leaf")) cfg.learner.min_leaf = flags_.min_leaf;
    if (given("--max-depth")) cfg.learner.max_depth = flags_.max_depth;
    if (given("--folds")) cfg.folds = flags_.folds;
    if (given("--bins")) cfg.feature_bins = flags_.bins;
    if (given("--mode")) {
      if (flags_.mode == "none") {
        cfg.balance.reset();
      } else {
        BalanceTargets targets = cfg.balance.value_or(BalanceTargets{});
        targets.mode = flags_.mode == "smote" ? BalanceMode::Smote : BalanceMode::Resample;
        cfg.balance = targets;
      }
    }
    if (cfg.balance) {
      auto& b = *cfg.balance;
      if (given("--bias")) b.bias_to_uniform = flags_.bias;
      if (given("--percent")) b.sample_size_percent = flags_.percent;
      if (given("--targets")) b.target_counts = parse_counts(flags_.targets, "--targets");
      if (given("--k")) b.k_neighbors = flags_.k;
      if (given("--seed") || !given("--config")) b.seed = cfg.seed;
      if (b.mode == BalanceMode::Smote && !given("--targets") && b.target_counts == ClassCounts{}) {
        throw UsageError("smote balancing needs --targets");
      }
    }
    validate(cfg.learner);
    return cfg;
  }

  LoadOptions load_options(bool expect_labels = true) const { return {expect_labels, flags_.allow_duplicates}; }

  Dataset read_dataset(const PipelineConfig& cfg, bool expect_labels = true) const {
    return load_csv_file(require_file(cfg.paths.input, "--input"), load_options(expect_labels));
  }

  TreeModel read_model(const PipelineConfig& cfg) const {
    std::ifstream in(require_file(cfg.paths.model, "--model"));
    return parse_model(in);
  }

  static std::string require_file(const std::string& path, const char* flag) {
    if (path.empty()) throw UsageError(std::string(flag) + " is required");
    if (!std::filesystem::is_regular_file(path)) throw UsageError("input file not found: " + path);
    return path;
  }

  // Writes to `path`, or to the output stream when empty.
  void emit(const std::string& path, const std::string& content) const {
    if (path.empty()) {
      out_ << content;
      return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);
    file << content;
    if (!file) throw std::runtime_error("write failed for " + path);
  }

  void emit_dataset(const std::string& path, const Dataset& ds) const {
    std::ostringstream buf;
    write_csv(buf, ds);
    emit(path, buf.str());
  }

  void emit_report(const PipelineConfig& cfg, const EvalReport& report, const std::string& title) const {
    emit(cfg.paths.report, render_report(report, title));
    if (!cfg.paths.summary.empty()) emit(cfg.paths.summary, render_summary(report));
  }

  const Flags& flags() const { return flags_; }

 private:
  CLI::App* app_;
  Flags& flags_;
  std::ostream& out_;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON pipeline config; flags override it");
  sub->add_option("--seed", f.seed, "Random seed (default from config or $SOLVENCY_SEED)");
}

void add_input(CLI::App* sub, Flags& f, bool allow_duplicates = true) {
  sub->add_option("-i,--input", f.input, "Input dataset CSV");
  if (allow_duplicates) {
    sub->add_flag("--allow-duplicates", f.allow_duplicates, "Accept repeated (company_id, year) keys");
  }
}

void add_learner(CLI::App* sub, Flags& f) {
  sub->add_option("--cf", f.cf, "Pruning confidence factor (0, 0.5]");
  sub->add_option("--min-leaf", f.min_leaf, "Minimum records on each side of a split")->check(CLI::PositiveNumber);
  sub->add_option("--max-depth", f.max_depth, "Maximum tree depth");
}

void add_balance(CLI::App* sub, Flags& f, bool allow_none) {
  auto* mode = sub->add_option("--mode", f.mode, "Balancing: resample | smote" + std::string(allow_none ? " | none" : ""));
  if (allow_none) mode->check(CLI::IsMember({"resample", "smote", "none"}));
  else mode->check(CLI::IsMember({"resample", "smote"}))->required();
  sub->add_option("--bias", f.bias, "Resample bias towards a uniform class distribution [0, 1]");
  sub->add_option("--percent", f.percent, "Resample output size as a percentage of the input");
  sub->add_option("--targets", f.targets, "SMOTE per-class target counts I,W,M,S");
  sub->add_option("--k", f.k, "SMOTE nearest neighbours")->check(CLI::PositiveNumber);
}

int run_generate(const Command& cmd) {
  const auto cfg = cmd.config();
  GeneratorSpec spec;
  spec.class_counts = parse_counts(cmd.flags().counts, "--counts");
  spec.separation = cmd.flags().separation;
  spec.n_attributes = cmd.flags().attributes;
  spec.seed = cfg.seed;
  cmd.emit_dataset(cfg.paths.output, generate(spec));
  return kExitOk;
}

int run_label(const Command& cmd) {
  const auto cfg = cmd.config();
  cmd.emit_dataset(cfg.paths.output, cmd.read_dataset(cfg, true));
  return kExitOk;
}

int run_select(const Command& cmd) {
  const auto cfg = cmd.config();
  const auto ds = cmd.read_dataset(cfg);
  const auto subset = greedy_stepwise(ds, cfg.feature_bins);
  std::string list;
  for (const auto& name : subset.selected) list += (list.empty() ? "" : ",") + name;
  std::ostringstream summary;
  summary << "selected=" << list << "\nmerit=" << text::fixed(subset.merit, 6) << '\n';
  if (cfg.paths.output.empty()) {
    cmd.emit({}, summary.str());
  } else {
    cmd.emit_dataset(cfg.paths.output, ds.project(subset.attributes));
    cmd.emit(cfg.paths.summary, summary.str());
  }
  return kExitOk;
}

int run_balance(const Command& cmd) {
  const auto cfg = cmd.config();
  if (!cfg.balance) throw UsageError("--mode is required");
  const auto ds = cmd.read_dataset(cfg);
  cmd.emit_dataset(cfg.paths.output, apply_balance(ds, *cfg.balance));
  return kExitOk;
}

int run_train(const Command& cmd) {
  const auto cfg = cmd.config();
  const auto model = grow(cmd.read_dataset(cfg), cfg.learner);
  cmd.emit(cfg.paths.model, serialize(model));
  return kExitOk;
}

int run_cross_validate(const Command& cmd) {
  const auto cfg = cmd.config();
  const auto ds = cmd.read_dataset(cfg);
  const auto report = cross_validate(ds, cfg.folds, cfg.learner, cfg.balance, cfg.seed);
  std::string title = std::to_string(cfg.folds) + "-fold stratified cross-validation (" + std::to_string(ds.size()) +
                      " instances)";
  if (cfg.balance) title += cfg.balance->mode == BalanceMode::Smote ? " - SMOTE model" : " - resample model";
  cmd.emit_report(cfg, report, title);
  return kExitOk;
}

int run_evaluate(const Command& cmd) {
  const auto cfg = cmd.config();
  const auto model = cmd.read_model(cfg);
  const auto test = cmd.read_dataset(cfg);
  const auto report = evaluate_on(model, test);
  cmd.emit_report(cfg, report, "Supplied test set (" + std::to_string(test.size()) + " instances)");
  return kExitOk;
}

int run_predict(const Command& cmd) {
  const auto cfg = cmd.config();
  const auto model = cmd.read_model(cfg);
  const auto ds = cmd.read_dataset(cfg, false);
  std::ostringstream out;
  for (const auto& rec : ds.records()) {
    const auto p = predict(model, rec);
    out << rec.company_id << ',' << (rec.year ? std::to_string(*rec.year) : "") << ',' << to_string(p.label);
    for (double prob : p.probabilities) out << ',' << text::shortest(prob);
    out << '\n';
  }
  cmd.emit(cfg.paths.output, out.str());
  return kExitOk;
}

int run_render(const Command& cmd) {
  const auto cfg = cmd.config();
  cmd.emit(cfg.paths.output, render(cmd.read_model(cfg)));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Solvency classification pipeline: label, balance, train and evaluate C4.5 trees", "solvency-cli"};
  app.require_subcommand(1);
  Flags f;

  auto* gen = app.add_subcommand("generate", "Write a synthetic labeled dataset");
  add_common(gen, f);
  gen->add_option("--counts", f.counts, "Per-class record counts I,W,M,S");
  gen->add_option("--separation", f.separation, "Class mean spacing in standard deviations");
  gen->add_option("--attributes", f.attributes, "Number of attributes (1-11)")->check(CLI::Range(1, 11));
  gen->add_option("-o,--output", f.output, "Output CSV (default: stdout)");

  auto* label = app.add_subcommand("label", "Derive solvency classes from CAR");
  add_common(label, f);
  add_input(label, f);
  label->add_option("-o,--output", f.output, "Output CSV (default: stdout)");

  auto* select = app.add_subcommand("select-features", "CFS merit with greedy forward selection");
  add_common(select, f);
  add_input(select, f);
  select->add_option("--bins", f.bins, "Equal-frequency bins per attribute")->check(CLI::Range(2, 1000));
  select->add_option("-o,--output", f.output, "Write the projected dataset here");
  select->add_option("--summary", f.summary, "Selection summary file (with --output)");

  auto* bal = app.add_subcommand("balance", "Resample or SMOTE a training set");
  add_common(bal, f);
  add_input(bal, f);
  add_balance(bal, f, false);
  bal->add_option("-o,--output", f.output, "Output CSV (default: stdout)");

  auto* train = app.add_subcommand("train", "Grow and prune a C4.5 tree");
  add_common(train, f);
  add_input(train, f);
  add_learner(train, f);
  train->add_option("-m,--model", f.model, "Model file to write (default: stdout)");

  auto* cv = app.add_subcommand("cross-validate", "Stratified k-fold cross-validation");
  add_common(cv, f);
  add_input(cv, f);
  add_learner(cv, f);
  add_balance(cv, f, true);
  cv->add_option("--folds", f.folds, "Number of folds")->check(CLI::Range(2, 1000000));
  cv->add_option("--report", f.report, "Report file (default: stdout)");
  cv->add_option("--summary", f.summary, "key=value summary file");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a model on a supplied test set");
  add_common(evaluate, f);
  add_input(evaluate, f);
  evaluate->add_option("-m,--model", f.model, "Model file");
  evaluate->add_option("--report", f.report, "Report file (default: stdout)");
  evaluate->add_option("--summary", f.summary, "key=value summary file");

  auto* pred = app.add_subcommand("predict", "Classify records with a model");
  add_common(pred, f);
  add_input(pred, f);
  pred->add_option("-m,--model", f.model, "Model file");
  pred->add_option("-o,--output", f.output, "Output file (default: stdout)");

  auto* rend = app.add_subcommand("render-tree", "Print a model as an indented tree");
  add_common(rend, f);
  rend->add_option("-m,--model", f.model, "Model file");
  rend->add_option("-o,--output", f.output, "Output file (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kExitUsage;
  }

  const std::vector<std::pair<CLI::App*, int (*)(const Command&)>> handlers = {
      {gen, run_generate},     {label, run_label},   {select, run_select},   {bal, run_balance},
      {train, run_train},      {cv, run_cross_validate}, {evaluate, run_evaluate}, {pred, run_predict},
      {rend, run_render}};
  for (const auto& [sub, handler] : handlers) {
    if (!sub->parsed()) continue;
    try {
      return handler(Command(sub, f, out));
    } catch (const UsageError& e) {
      err << "error: " << e.what() << "\n\n" << sub->help();
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitDataError;
    }
  }
  return kExitUsage;
}

}  // namespace solvency::cli
