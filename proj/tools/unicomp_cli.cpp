// unicomp command-line front end. Links only the C API.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "unicomp/unicomp.h"

namespace {

constexpr int kExitCompletable = 0;
constexpr int kExitNotCompletable = 1;
constexpr int kExitError = 2;

struct CliFailure {
  std::string message;
};

struct StringDeleter {
  void operator()(char* s) const { unicomp_string_free(s); }
};
using OwnedString = std::unique_ptr<char, StringDeleter>;

struct PatternDeleter {
  void operator()(unicomp_pattern* p) const { unicomp_pattern_free(p); }
};
using OwnedPattern = std::unique_ptr<unicomp_pattern, PatternDeleter>;

struct VerdictDeleter {
  void operator()(unicomp_verdict* v) const { unicomp_verdict_free(v); }
};
using OwnedVerdict = std::unique_ptr<unicomp_verdict, VerdictDeleter>;

void check_status(unicomp_status status) {
  if (status != UNICOMP_OK) throw CliFailure{unicomp_last_error()};
}

unicomp_kind parse_kind(const std::string& s) { return s == "gram" ? UNICOMP_KIND_GRAM : UNICOMP_KIND_RECT; }

unicomp_test parse_test(const std::string& s) { return s == "local" ? UNICOMP_TEST_LOCAL : UNICOMP_TEST_GLOBAL; }

std::string read_text(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  std::ifstream in(path);
  if (!in) throw CliFailure{"io: cannot open " + path};
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path);
  if (!out || !(out << text)) throw CliFailure{"io: cannot write " + path};
}

OwnedPattern load_pattern(const std::string& path) {
  unicomp_pattern* p = nullptr;
  check_status(unicomp_pattern_parse(read_text(path).c_str(), &p));
  return OwnedPattern(p);
}

struct TestOptions {
  double epsilon = 1e-4;
  double iter_factor = 10.0;
  std::size_t repeats = 1;
  std::uint64_t seed = 0;
};

struct HarnessOptions {
  std::string kind;
  std::string test = "local";
  std::size_t rank = 0;
  std::vector<std::size_t> sizes;
  std::size_t jobs = 1;
  double descent = 0.95;
  std::size_t failures = 20;
  std::size_t refine = 40;
  std::string out;
};

void add_test_options(CLI::App* cmd, TestOptions& t) {
  cmd->add_option("--epsilon", t.epsilon, "Probe tolerance scale; LSQR tol = epsilon / sqrt(#vertices)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--repeat,-k", t.repeats, "Independent probes per test")->capture_default_str()->check(CLI::Range(1, 1000000));
  cmd->add_option("--iter-factor", t.iter_factor, "LSQR iteration cap = factor * (rows + cols)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", t.seed, "Random seed")->capture_default_str();
}

void add_harness_options(CLI::App* cmd, HarnessOptions& h, TestOptions& t) {
  cmd->add_option("--kind", h.kind, "Pattern kind")->required()->check(CLI::IsMember({"gram", "rect"}));
  cmd->add_option("--rank,-d", h.rank, "Target rank d")->required()->check(CLI::PositiveNumber);
  cmd->add_option("--n", h.sizes, "Comma-separated sizes (n1 = n2 = n for rect)")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  cmd->add_option("--test", h.test, "Which test to run")->capture_default_str()->check(CLI::IsMember({"local", "global"}));
  cmd->add_option("--jobs,-j", h.jobs, "Concurrent trials during bracket refinement")
      ->capture_default_str()
      ->check(CLI::Range(1, 1024));
  cmd->add_option("--descent", h.descent, "Multiplicative descent factor")->capture_default_str()->check(CLI::Range(0.01, 0.999));
  cmd->add_option("--failures", h.failures, "Consecutive failures that end the descent")->capture_default_str()->check(CLI::Range(1, 100000));
  cmd->add_option("--refine", h.refine, "Uniform samples inside the bracket")->capture_default_str();
  cmd->add_option("--out,-o", h.out, "Output CSV path (default stdout)");
  add_test_options(cmd, t);
}

unicomp_test_config make_test_config(const TestOptions& t) {
  unicomp_test_config cfg;
  unicomp_test_config_init(&cfg);
  cfg.epsilon = t.epsilon;
  cfg.lsqr_iter_factor = t.iter_factor;
  cfg.repeats = t.repeats;
  cfg.seed = t.seed;
  return cfg;
}

unicomp_harness_config make_harness_config(const HarnessOptions& h, const TestOptions& t) {
  unicomp_harness_config cfg;
  unicomp_harness_config_init(&cfg);
  cfg.test = make_test_config(t);
  cfg.descent_factor = h.descent;
  cfg.consecutive_failures = h.failures;
  cfg.refine_samples = h.refine;
  cfg.jobs = h.jobs;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  unicomp_test_config defaults;
  unicomp_test_config_init(&defaults);

  CLI::App app{"Uniqueness tests for low-rank matrix completion", "unicomp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", unicomp_version());

  // sample
  std::string sample_kind;
  std::optional<std::size_t> sample_n, sample_n1, sample_n2;
  double sample_beta = 0.0;
  std::uint64_t sample_seed = defaults.seed;
  std::string sample_out;
  auto* sample = app.add_subcommand("sample", "Draw a random observation pattern");
  sample->add_option("--kind", sample_kind, "Pattern kind")->required()->check(CLI::IsMember({"gram", "rect"}));
  sample->add_option("--n", sample_n, "Size n (Gram) or n1 = n2 = n (rect)")->check(CLI::PositiveNumber);
  sample->add_option("--n1", sample_n1, "Rows (rect)")->check(CLI::PositiveNumber);
  sample->add_option("--n2", sample_n2, "Columns (rect)")->check(CLI::PositiveNumber);
  sample->add_option("--beta", sample_beta, "Observation probability")->required()->check(CLI::Range(0.0, 1.0));
  sample->add_option("--seed", sample_seed, "Random seed")->capture_default_str();
  sample->add_option("--out,-o", sample_out, "Output path (default stdout)");

  // check
  std::string check_test, check_path;
  std::size_t check_rank = 0;
  TestOptions check_opts;
  check_opts.seed = defaults.seed;
  auto* check = app.add_subcommand("check", "Randomized local or global completability test");
  check->add_option("test", check_test, "local or global")->required()->check(CLI::IsMember({"local", "global"}));
  check->add_option("pattern", check_path, "Pattern file ('-' for stdin)")->required();
  check->add_option("--rank,-d", check_rank, "Target rank d")->required()->check(CLI::PositiveNumber);
  add_test_options(check, check_opts);

  // rank1
  auto* rank1 = app.add_subcommand("rank1", "Exact rank-1 combinatorics");
  rank1->require_subcommand(1);
  std::string r1_pattern, r1_values;
  auto* r1_check = rank1->add_subcommand("check", "Combinatorial rank-1 completability");
  r1_check->add_option("pattern", r1_pattern, "Pattern file")->required();
  auto* r1_complete = rank1->add_subcommand("complete", "Reconstruct p from rank-1 Gram entries");
  r1_complete->add_option("pattern", r1_pattern, "Pattern file")->required();
  r1_complete->add_option("values", r1_values, "Values file: lines 'i j value'")->required();

  // threshold
  HarnessOptions th_opts;
  TestOptions th_test;
  th_test.seed = defaults.seed;
  auto* threshold = app.add_subcommand("threshold", "Estimate completability thresholds over sizes");
  add_harness_options(threshold, th_opts, th_test);

  // fit
  std::string fit_path;
  bool fit_fix_a2 = false;
  auto* fit = app.add_subcommand("fit", "Fit log beta* = a1 log n + a2 log log n + a3 to a sweep CSV");
  fit->add_option("csv", fit_path, "Sweep CSV ('-' for stdin)")->required();
  fit->add_flag("--fix-a2", fit_fix_a2, "Hold a2 = 1");

  // bench
  HarnessOptions bench_opts;
  TestOptions bench_test;
  bench_test.seed = defaults.seed;
  std::optional<double> bench_beta_star;
  std::vector<double> bench_multipliers;
  auto* bench = app.add_subcommand("bench", "Time the verdict at multiples of beta*");
  add_harness_options(bench, bench_opts, bench_test);
  bench->add_option("--beta-star", bench_beta_star, "Threshold to scale (estimated per size when absent)")
      ->check(CLI::Range(0.0, 1.0));
  bench->add_option("--multipliers", bench_multipliers, "Comma-separated multiples of beta*")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*sample) {
      const unicomp_kind kind = parse_kind(sample_kind);
      std::size_t n1 = 0, n2 = 0;
      if (kind == UNICOMP_KIND_GRAM) {
        if (!sample_n || sample_n1 || sample_n2) throw CliFailure{"invalid-argument: gram patterns take --n"};
        n1 = *sample_n;
      } else if (sample_n && !sample_n1 && !sample_n2) {
        n1 = n2 = *sample_n;
      } else if (!sample_n && sample_n1 && sample_n2) {
        n1 = *sample_n1;
        n2 = *sample_n2;
      } else {
        throw CliFailure{"invalid-argument: rect patterns take --n1 and --n2 (or --n)"};
      }
      unicomp_pattern* raw = nullptr;
      check_status(unicomp_pattern_sample(kind, n1, n2, sample_beta, sample_seed, &raw));
      const OwnedPattern p(raw);
      char* text = nullptr;
      check_status(unicomp_pattern_format(p.get(), &text));
      const OwnedString owned(text);
      write_text(sample_out, text);
      return 0;
    }

    if (*check) {
      const OwnedPattern p = load_pattern(check_path);
      const unicomp_test_config cfg = make_test_config(check_opts);
      unicomp_verdict* raw = nullptr;
      check_status(unicomp_check(p.get(), parse_test(check_test), check_rank, &cfg, &raw));
      const OwnedVerdict v(raw);
      char* json = nullptr;
      check_status(unicomp_verdict_json(v.get(), &json));
      const OwnedString owned(json);
      std::cout << json << '\n';
      return unicomp_verdict_completable(v.get()) ? kExitCompletable : kExitNotCompletable;
    }

    if (*r1_check) {
      const OwnedPattern p = load_pattern(r1_pattern);
      int locally = 0;
      char* json = nullptr;
      check_status(unicomp_rank1_check(p.get(), &locally, nullptr, &json));
      const OwnedString owned(json);
      std::cout << json << '\n';
      return locally ? kExitCompletable : kExitNotCompletable;
    }

    if (*r1_complete) {
      const OwnedPattern p = load_pattern(r1_pattern);
      const std::string values = read_text(r1_values);
      char* json = nullptr;
      check_status(unicomp_rank1_complete(p.get(), values.c_str(), &json));
      const OwnedString owned(json);
      std::cout << json << '\n';
      std::cerr << "note: each connected component is determined up to a global sign\n";
      return 0;
    }

    if (*threshold) {
      const unicomp_harness_config cfg = make_harness_config(th_opts, th_test);
      char* csv = nullptr;
      check_status(unicomp_threshold_sweep(parse_kind(th_opts.kind), parse_test(th_opts.test), th_opts.rank,
                                           th_opts.sizes.data(), th_opts.sizes.size(), &cfg, &csv));
      const OwnedString owned(csv);
      write_text(th_opts.out, csv);
      return 0;
    }

    if (*fit) {
      const std::string csv = read_text(fit_path);
      char* json = nullptr;
      check_status(unicomp_fit_scaling(csv.c_str(), fit_fix_a2 ? 1 : 0, &json));
      const OwnedString owned(json);
      std::cout << json << '\n';
      return 0;
    }

    if (*bench) {
      const unicomp_harness_config cfg = make_harness_config(bench_opts, bench_test);
      char* csv = nullptr;
      check_status(unicomp_bench(parse_kind(bench_opts.kind), parse_test(bench_opts.test), bench_opts.rank,
                                 bench_opts.sizes.data(), bench_opts.sizes.size(), bench_beta_star.value_or(0.0),
                                 bench_multipliers.empty() ? nullptr : bench_multipliers.data(),
                                 bench_multipliers.size(), &cfg, &csv));
      const OwnedString owned(csv);
      write_text(bench_opts.out, csv);
      return 0;
    }
  } catch (const CliFailure& e) {
    std::cerr << "unicomp: " << e.message << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "unicomp: internal: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
