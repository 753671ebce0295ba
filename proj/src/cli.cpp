#include "skconf/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "skconf/classify.hpp"
#include "skconf/conformance.hpp"
#include "skconf/core.hpp"
#include "skconf/error.hpp"
#include "skconf/ingest.hpp"
#include "skconf/kernels.hpp"
#include "skconf/synth.hpp"

namespace skconf::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

enum class Format { Table, Json };

struct Options {
  Format format = Format::Table;
  std::string kernels = "auto";

  std::string trace;
  std::string observed;
  std::vector<std::string> models;
  std::string log;
  std::string method;
  std::string sync_cost = "one-minus-p";
  double log_move_cost = 1.0;
  double model_move_cost = 1.0;
  double min_prob = 0.0;
  std::uint64_t max_realizations = 10'000'000;
  double alpha = 0.5;
  bool decode = false;
  bool collapse = false;
  int precision = 6;
  std::string out;
  std::size_t count = 1;
  double epsilon = 0.0;
  std::string smear = "uniform";
  std::uint64_t seed = 0;
  std::vector<std::string> observations;
  std::vector<std::string> truths;
  double grid_step = 0.1;
};

std::string fmt(double value, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, value);
  return buf;
}

json header(const std::string& command) {
  return json{{"schema_version", kSchemaVersion}, {"command", command}};
}

json matrix_json(const StochasticTrace& sk) {
  json rows = json::array();
  for (std::size_t i = 0; i < sk.activities(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < sk.events(); ++j) row.push_back(sk.at(static_cast<ActivityIndex>(i), j));
    rows.push_back(std::move(row));
  }
  return json{{"activities", sk.alphabet()->labels()}, {"events", sk.events()}, {"rows", rows}};
}

std::string move_kind(MoveKind kind) {
  switch (kind) {
    case MoveKind::Synchronous: return "sync";
    case MoveKind::Log: return "log";
    case MoveKind::Model: return "model";
  }
  return "?";
}

json alignment_json(const Alignment& alignment, const Alphabet& alphabet) {
  json moves = json::array();
  for (const auto& m : alignment.moves) {
    json move{{"kind", move_kind(m.kind)}, {"cost", m.cost}};
    move["event"] = m.log_position ? json(*m.log_position + 1) : json(nullptr);
    move["activity"] = m.model_activity ? json(alphabet.label(*m.model_activity)) : json(nullptr);
    moves.push_back(std::move(move));
  }
  return json{{"total_cost", alignment.total_cost}, {"moves", moves}};
}

void alignment_table(std::ostream& os, const Alignment& alignment, const Alphabet& alphabet) {
  os << "move   event  activity  cost\n";
  for (const auto& m : alignment.moves) {
    char line[128];
    std::snprintf(line, sizeof line, "%-6s %-6s %-9s %s\n", move_kind(m.kind).c_str(),
                  m.log_position ? std::to_string(*m.log_position + 1).c_str() : "-",
                  m.model_activity ? alphabet.label(*m.model_activity).c_str() : "-",
                  fmt(m.cost).c_str());
    os << line;
  }
}

// Re-expresses a log over another alphabet with the same label set.
EventLog rebase(const EventLog& log, const AlphabetPtr& alphabet, const std::string& path) {
  if (same_alphabet(log.alphabet(), alphabet)) return log;
  auto sorted = [](std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    return v;
  };
  if (sorted(log.alphabet()->labels()) != sorted(alphabet->labels())) {
    throw Error(ErrorKind::AlphabetMismatch, path + ": alphabet differs from the first model's");
  }
  EventLog out(alphabet);
  for (const auto& entry : log.entries()) {
    out.add(DeterministicTrace::from_labels(alphabet, entry.trace.labels()), entry.frequency);
  }
  return out;
}

void require(bool condition, const std::string& message) {
  if (!condition) throw Error(ErrorKind::InvalidArgument, message);
}

CostScheme cost_scheme(const Options& o) {
  CostScheme scheme;
  scheme.sync = o.sync_cost == "neg-log-p" ? SyncCost::NegLogP : SyncCost::OneMinusP;
  scheme.log_move_cost = o.log_move_cost;
  scheme.model_move_cost = o.model_move_cost;
  return scheme;
}

// ---------------------------------------------------------------------------
// Subcommands. Each renders into `os`, which is only forwarded on success.

void cmd_validate(const Options& o, std::ostream& os) {
  require(!o.trace.empty() || !o.log.empty(), "validate needs --trace and/or --log");
  json doc = header("validate");
  std::ostringstream table;
  if (!o.log.empty()) {
    const auto log = load_log(o.log);
    std::uint64_t total = 0;
    for (const auto& e : log.entries()) total += e.frequency;
    doc["log"] = json{{"path", o.log},
                      {"alphabet", log.alphabet()->labels()},
                      {"distinct_traces", log.size()},
                      {"total_frequency", total}};
    table << "log " << o.log << ": " << log.alphabet()->size() << " activities, " << log.size()
          << " distinct traces, total frequency " << total << '\n';
  }
  if (!o.trace.empty()) {
    const auto sk = load_matrix(o.trace);
    doc["trace"] = json{{"path", o.trace},
                        {"activities", sk.alphabet()->labels()},
                        {"events", sk.events()}};
    table << "trace " << o.trace << ": " << sk.activities() << " activities x " << sk.events()
          << " events, column-stochastic\n";
    if (!o.out.empty()) {
      std::ofstream file(o.out, std::ios::binary);
      if (!(file << write_matrix(sk, o.precision))) {
        throw Error(ErrorKind::IoError, "cannot write '" + o.out + "'");
      }
    }
  }
  doc["valid"] = true;
  if (o.format == Format::Json) os << doc.dump(2) << '\n';
  else os << table.str();
}

void cmd_decode(const Options& o, std::ostream& os) {
  require(!o.trace.empty(), "decode needs --trace");
  auto sk = load_matrix(o.trace);
  if (o.collapse) sk = collapse_frames(sk);
  const auto decoded = argmax_decode(sk);
  if (o.format == Format::Json) {
    json doc = header("decode");
    doc["trace"] = decoded.labels();
    doc["events"] = decoded.size();
    doc["collapsed"] = o.collapse;
    os << doc.dump(2) << '\n';
  } else {
    os << decoded.to_string() << '\n';
  }
}

void cmd_conform(const Options& o, std::ostream& os) {
  require(!o.models.empty(), "conform needs --model");
  require(o.trace.empty() != o.observed.empty(), "conform needs exactly one of --trace or --observed");
  const auto& model_path = o.models.front();
  const auto model = load_log(model_path);
  json doc = header("conform");
  doc["model"] = model_path;
  std::ostringstream table;

  if (!o.observed.empty()) {
    const auto trace = DeterministicTrace::parse(model.alphabet(), o.observed);
    const auto best = model_conformance_det(trace, model);
    const auto alignment = align(trace, best.best_trace);
    doc["method"] = "alignment";
    doc["observed"] = trace.labels();
    doc["best_trace"] = best.best_trace.labels();
    doc["score"] = best.cost;
    doc["alignment"] = alignment_json(alignment, *model.alphabet());
    table << "best trace: " << best.best_trace.to_string() << "\nscore: " << fmt(best.cost) << '\n';
    alignment_table(table, alignment, *model.alphabet());
  } else {
    const auto sk = load_matrix(o.trace, model.alphabet());
    const std::string method = o.method.empty() ? "alignment" : o.method;
    doc["method"] = method;
    doc["trace"] = o.trace;
    if (method == "alignment") {
      const auto scheme = cost_scheme(o);
      const auto best = model_conformance_stochastic(sk, model, scheme);
      doc["sync_cost"] = o.sync_cost;
      doc["best_trace"] = best.best_trace.labels();
      doc["score"] = best.alignment.total_cost;
      doc["alignment"] = alignment_json(best.alignment, *model.alphabet());
      table << "best trace: " << best.best_trace.to_string()
            << "\nscore: " << fmt(best.alignment.total_cost) << '\n';
      alignment_table(table, best.alignment, *model.alphabet());
    } else if (method == "expected") {
      const auto result = expected_conformance(sk, model, o.min_prob, o.max_realizations);
      doc["score"] = result.expected_cost;
      doc["covered_mass"] = result.covered_mass;
      doc["realizations"] = result.realizations;
      doc["zero_coverage"] = result.zero_coverage;
      table << "expected cost: " << fmt(result.expected_cost) << "\ncovered mass: "
            << fmt(result.covered_mass) << "\nrealizations: " << result.realizations << '\n';
    } else {
      const auto measure = method == "frobenius" ? MatrixMeasure::Frobenius : MatrixMeasure::CrossEntropyOfDecode;
      const auto best = matrix_conformance(sk, model, measure);
      doc["best_trace"] = best.best_trace.labels();
      doc["score"] = best.cost;
      table << "best trace: " << best.best_trace.to_string() << "\nscore: " << fmt(best.cost) << '\n';
    }
  }
  if (o.format == Format::Json) os << doc.dump(2) << '\n';
  else os << table.str();
}

void cmd_classify(const Options& o, std::ostream& os) {
  require(!o.trace.empty(), "classify needs --trace");
  require(!o.models.empty(), "classify needs at least one --model");
  std::vector<NamedModel> models;
  AlphabetPtr alphabet;
  for (const auto& path : o.models) {
    auto log = load_log(path);
    if (!alphabet) alphabet = log.alphabet();
    models.push_back({fs::path(path).stem().string(), rebase(log, alphabet, path)});
  }
  const auto sk = load_matrix(o.trace, alphabet);

  ClassifyOptions options;
  const std::string method = o.method.empty() ? "frobenius" : o.method;
  options.method = method == "frobenius"   ? ClassifyMethod::MatrixFrobenius
                   : method == "alignment" ? ClassifyMethod::StochasticAlignment
                                           : ClassifyMethod::ExpectedCost;
  options.scheme = cost_scheme(o);
  options.max_realizations = o.max_realizations;
  const auto result = classify(sk, models, options);

  if (o.format == Format::Json) {
    json doc = header("classify");
    doc["method"] = method;
    doc["trace"] = o.trace;
    doc["winner"] = result.winner;
    json ranking = json::array();
    for (const auto& s : result.ranking) {
      ranking.push_back(json{{"model", s.id}, {"score", s.score}, {"fell_back", s.fell_back}});
    }
    doc["ranking"] = ranking;
    os << doc.dump(2) << '\n';
  } else {
    os << "winner: " << result.winner << '\n';
    std::size_t width = 5;
    for (const auto& s : result.ranking) width = std::max(width, s.id.size());
    os << "rank  " << std::left << std::setw(static_cast<int>(width)) << "model" << "  score\n";
    for (std::size_t r = 0; r < result.ranking.size(); ++r) {
      const auto& s = result.ranking[r];
      os << std::setw(4) << (r + 1) << "  " << std::setw(static_cast<int>(width)) << s.id << "  " << fmt(s.score)
         << (s.fell_back ? "  (alignment fallback)" : "") << '\n';
    }
    os << std::right;
  }
}

void cmd_posterior(const Options& o, std::ostream& os) {
  require(!o.trace.empty() && !o.log.empty(), "posterior needs --trace and --log");
  const auto log = load_log(o.log);
  const auto prior = load_matrix(o.trace, log.alphabet());
  const auto tl = likelihood_matrix(prior, log);
  const auto posterior = posterior_update(prior, tl, BlendWeights(o.alpha));
  const auto text = write_matrix(posterior, o.precision);
  if (!o.out.empty()) {
    std::ofstream file(o.out, std::ios::binary);
    if (!(file << text)) throw Error(ErrorKind::IoError, "cannot write '" + o.out + "'");
  }

  if (o.format == Format::Json) {
    json doc = header("posterior");
    doc["alpha"] = o.alpha;
    doc["beta"] = 1.0 - o.alpha;
    json weights = json::array();
    for (std::size_t k = 0; k < log.size(); ++k) {
      weights.push_back(json{{"trace", log.entries()[k].trace.labels()},
                             {"frequency", log.entries()[k].frequency},
                             {"proximity", tl.proximity()[k]}});
    }
    doc["proximity"] = weights;
    doc["likelihood"] = matrix_json(tl.matrix());
    doc["posterior"] = matrix_json(posterior);
    if (o.decode) {
      doc["prior_decode"] = argmax_decode(prior).labels();
      doc["posterior_decode"] = argmax_decode(posterior).labels();
    }
    os << doc.dump(2) << '\n';
  } else {
    for (std::size_t k = 0; k < log.size(); ++k) {
      os << "# proximity " << log.entries()[k].trace.to_string() << ": " << fmt(tl.proximity()[k]) << '\n';
    }
    if (o.decode) {
      os << "# prior decode: " << argmax_decode(prior).to_string() << '\n';
      os << "# posterior decode: " << argmax_decode(posterior).to_string() << '\n';
    }
    os << text;
  }
}

void cmd_expected(const Options& o, std::ostream& os) {
  require(!o.trace.empty() && !o.models.empty(), "expected needs --trace and --model");
  const auto model = load_log(o.models.front());
  const auto sk = load_matrix(o.trace, model.alphabet());
  const auto result = expected_conformance(sk, model, o.min_prob, o.max_realizations);
  if (o.format == Format::Json) {
    json doc = header("expected");
    doc["min_prob"] = o.min_prob;
    doc["expected_cost"] = result.expected_cost;
    doc["covered_mass"] = result.covered_mass;
    doc["realizations"] = result.realizations;
    doc["zero_coverage"] = result.zero_coverage;
    os << doc.dump(2) << '\n';
  } else {
    os << "expected cost: " << fmt(result.expected_cost) << "\ncovered mass: " << fmt(result.covered_mass)
       << "\nrealizations: " << result.realizations << '\n';
    if (result.zero_coverage) os << "warning: no realization above min_prob\n";
  }
}

void cmd_synth(const Options& o, std::ostream& os) {
  require(!o.models.empty(), "synth needs --model");
  const auto model = load_log(o.models.front());
  NoiseModel noise;
  noise.epsilon = o.epsilon;
  noise.seed = o.seed;
  if (o.smear == "adjacent") noise.confusion = adjacent_confusion(model.alphabet()->size());
  const auto samples = synthesize_log(model, o.count, noise);

  if (!o.out.empty()) {
    std::error_code ec;
    fs::create_directories(o.out, ec);
    if (ec) throw Error(ErrorKind::IoError, "cannot create '" + o.out + "': " + ec.message());
    for (std::size_t s = 0; s < samples.size(); ++s) {
      char name[32];
      std::snprintf(name, sizeof name, "sample_%04zu.csv", s + 1);
      const auto path = fs::path(o.out) / name;
      std::ofstream file(path, std::ios::binary);
      file << "# truth: " << samples[s].truth.to_string() << '\n'
           << write_matrix(samples[s].observation, o.precision);
      if (!file) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    }
  }

  if (o.format == Format::Json) {
    json doc = header("synth");
    doc["seed"] = o.seed;
    doc["epsilon"] = o.epsilon;
    doc["smear"] = o.smear;
    json items = json::array();
    for (const auto& s : samples) {
      items.push_back(json{{"truth", s.truth.labels()},
                           {"truth_index", s.truth_index},
                           {"matrix", matrix_json(s.observation)}});
    }
    doc["samples"] = items;
    os << doc.dump(2) << '\n';
  } else {
    os << "# seed: " << o.seed << "\n";
    for (std::size_t s = 0; s < samples.size(); ++s) {
      if (s != 0) os << '\n';
      os << "# sample " << (s + 1) << " truth: " << samples[s].truth.to_string() << '\n';
      os << write_matrix(samples[s].observation, o.precision);
    }
  }
}

void cmd_weights(const Options& o, std::ostream& os) {
  require(!o.log.empty(), "weights needs --log");
  require(o.observations.size() == o.truths.size(),
          "every --observation needs a matching --truth");
  const auto log = load_log(o.log);
  std::vector<LabelledObservation> pairs;
  for (std::size_t k = 0; k < o.observations.size(); ++k) {
    pairs.push_back({load_matrix(o.observations[k], log.alphabet()),
                     DeterministicTrace::parse(log.alphabet(), o.truths[k])});
  }
  const auto estimate = estimate_weights(pairs, log, o.grid_step);
  if (o.format == Format::Json) {
    json doc = header("weights");
    doc["alpha"] = estimate.weights.alpha();
    doc["beta"] = estimate.weights.beta();
    doc["correct"] = estimate.correct;
    doc["pairs"] = pairs.size();
    json grid = json::array();
    for (const auto& [alpha, correct] : estimate.grid) grid.push_back(json{{"alpha", alpha}, {"correct", correct}});
    doc["grid"] = grid;
    os << doc.dump(2) << '\n';
  } else {
    os << "alpha: " << fmt(estimate.weights.alpha(), 4) << "\nbeta: " << fmt(estimate.weights.beta(), 4)
       << "\ncorrect: " << estimate.correct << " / " << pairs.size() << '\n';
  }
}

}  // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Conformance checking and classification of stochastically known traces", "skconf"};
  app.require_subcommand(1);
  Options o;

  const std::map<std::string, Format> formats{{"table", Format::Table}, {"json", Format::Json}};
  const auto common = [&](CLI::App* sub) {
    sub->add_option("--format", o.format, "Output format")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    sub->add_option("--kernels", o.kernels, "Kernel backend")
        ->check(CLI::IsMember({"auto", "scalar", "avx2", "neon"}));
  };
  const auto scheme_flags = [&](CLI::App* sub) {
    sub->add_option("--sync-cost", o.sync_cost, "Synchronous move cost")
        ->check(CLI::IsMember({"one-minus-p", "neg-log-p"}));
    sub->add_option("--log-move-cost", o.log_move_cost, "Log move cost")->check(CLI::NonNegativeNumber);
    sub->add_option("--model-move-cost", o.model_move_cost, "Model move cost")->check(CLI::NonNegativeNumber);
  };

  auto* validate = app.add_subcommand("validate", "Check a matrix and/or log file");
  validate->add_option("--trace", o.trace, "Matrix file");
  validate->add_option("--log", o.log, "Log or model file");
  validate->add_option("--out", o.out, "Write the renormalized matrix here");
  validate->add_option("--precision", o.precision, "Decimal places for --out")->check(CLI::Range(1, 15));
  common(validate);

  auto* decode = app.add_subcommand("decode", "Most likely activity per event");
  decode->add_option("--trace", o.trace, "Matrix file")->required();
  decode->add_flag("--collapse", o.collapse, "Merge runs of events with the same argmax first");
  common(decode);

  auto* conform = app.add_subcommand("conform", "Conformance against one model");
  conform->add_option("--trace", o.trace, "Matrix file");
  conform->add_option("--observed", o.observed, "Deterministic trace, space separated");
  conform->add_option("--model", o.models, "Model file")->required()->expected(1);
  conform->add_option("--method", o.method, "Conformance method")
      ->check(CLI::IsMember({"alignment", "frobenius", "cross-entropy", "expected"}));
  conform->add_option("--min-prob", o.min_prob, "Realization pruning threshold (expected)")
      ->check(CLI::Range(0.0, 1.0));
  conform->add_option("--max-realizations", o.max_realizations, "Enumeration guard (expected)");
  scheme_flags(conform);
  common(conform);

  auto* classify_cmd = app.add_subcommand("classify", "Rank candidate models");
  classify_cmd->add_option("--trace", o.trace, "Matrix file")->required();
  classify_cmd->add_option("--model", o.models, "Model file (repeatable)")->required();
  classify_cmd->add_option("--method", o.method, "Scoring method")
      ->check(CLI::IsMember({"frobenius", "alignment", "expected"}));
  classify_cmd->add_option("--max-realizations", o.max_realizations, "Enumeration guard (expected)");
  scheme_flags(classify_cmd);
  common(classify_cmd);

  auto* posterior = app.add_subcommand("posterior", "Blend an observation with log knowledge");
  posterior->add_option("--trace", o.trace, "Matrix file")->required();
  posterior->add_option("--log", o.log, "Log file")->required();
  posterior->add_option("--alpha", o.alpha, "Observation weight")->check(CLI::Range(0.0, 1.0));
  posterior->add_flag("--decode", o.decode, "Also decode prior and posterior");
  posterior->add_option("--precision", o.precision, "Decimal places")->check(CLI::Range(1, 15));
  posterior->add_option("--out", o.out, "Write the posterior matrix here");
  common(posterior);

  auto* expected = app.add_subcommand("expected", "Expected alignment cost over realizations");
  expected->add_option("--trace", o.trace, "Matrix file")->required();
  expected->add_option("--model", o.models, "Model file")->required()->expected(1);
  expected->add_option("--min-prob", o.min_prob, "Realization pruning threshold")->check(CLI::Range(0.0, 1.0));
  expected->add_option("--max-realizations", o.max_realizations, "Enumeration guard");
  common(expected);

  auto* synth = app.add_subcommand("synth", "Synthesize noisy observations from a model");
  synth->add_option("--model", o.models, "Model file")->required()->expected(1);
  synth->add_option("--count", o.count, "Number of observations")->check(CLI::PositiveNumber);
  synth->add_option("--epsilon", o.epsilon, "Corruption mass")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--smear", o.smear, "Smear shape")->check(CLI::IsMember({"uniform", "adjacent"}));
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--precision", o.precision, "Decimal places")->check(CLI::Range(1, 15));
  synth->add_option("--out", o.out, "Directory for one matrix file per sample");
  common(synth);

  auto* weights = app.add_subcommand("weights", "Estimate the observation weight alpha");
  weights->add_option("--log", o.log, "Log file")->required();
  weights->add_option("--observation", o.observations, "Observation matrix (repeatable)")->required();
  weights->add_option("--truth", o.truths, "Ground-truth trace per observation (repeatable)")->required();
  weights->add_option("--grid-step", o.grid_step, "Alpha grid spacing")->check(CLI::Range(1e-6, 1.0));
  common(weights);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "skconf: " << e.what() << '\n';
    return kExitInputError;
  }

  std::ostringstream buffer;
  try {
    if (o.kernels != "auto") {
      kernels::select(o.kernels == "scalar" ? kernels::Backend::Scalar
                      : o.kernels == "avx2" ? kernels::Backend::Avx2
                                            : kernels::Backend::Neon);
    } else {
      kernels::reset_selection();
    }
    if (validate->parsed()) cmd_validate(o, buffer);
    else if (decode->parsed()) cmd_decode(o, buffer);
    else if (conform->parsed()) cmd_conform(o, buffer);
    else if (classify_cmd->parsed()) cmd_classify(o, buffer);
    else if (posterior->parsed()) cmd_posterior(o, buffer);
    else if (expected->parsed()) cmd_expected(o, buffer);
    else if (synth->parsed()) cmd_synth(o, buffer);
    else if (weights->parsed()) cmd_weights(o, buffer);
  } catch (const Error& e) {
    kernels::reset_selection();
    err << "skconf: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return is_input_error(e.kind()) ? kExitInputError : kExitDomainError;
  } catch (const std::exception& e) {
    kernels::reset_selection();
    err << "skconf: " << e.what() << '\n';
    return kExitDomainError;
  }
  kernels::reset_selection();
  out << buffer.str();
  return kExitOk;
}

}  // namespace skconf::cli
