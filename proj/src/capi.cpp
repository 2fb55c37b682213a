#include "unicomp/unicomp.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "unicomp/error.hpp"
#include "unicomp/harness.hpp"
#include "unicomp/rank1.hpp"
#include "unicomp/verdict.hpp"

struct unicomp_pattern {
  unicomp::Pattern value;
};

struct unicomp_verdict {
  unicomp::Verdict value;
};

namespace {

thread_local std::string g_last_error;

unicomp_status status_of(unicomp::ErrorCode code) { return static_cast<unicomp_status>(code); }

template <class F>
unicomp_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return UNICOMP_OK;
  } catch (const unicomp::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return UNICOMP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal: ") + e.what();
    return UNICOMP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal: unknown exception";
    return UNICOMP_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) unicomp::raise(unicomp::ErrorCode::InvalidArgument, std::string(name) + " is null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

unicomp::PatternKind to_kind(unicomp_kind kind) {
  if (kind == UNICOMP_KIND_GRAM) return unicomp::PatternKind::Gram;
  if (kind == UNICOMP_KIND_RECT) return unicomp::PatternKind::Rect;
  unicomp::raise(unicomp::ErrorCode::InvalidArgument, "unknown pattern kind");
}

unicomp::TestKind to_test(unicomp_test test) {
  if (test == UNICOMP_TEST_LOCAL) return unicomp::TestKind::Local;
  if (test == UNICOMP_TEST_GLOBAL) return unicomp::TestKind::Global;
  unicomp::raise(unicomp::ErrorCode::InvalidArgument, "unknown test kind");
}

unicomp::TestConfig to_test_config(const unicomp_test_config* cfg) {
  unicomp::TestConfig out;
  if (cfg != nullptr) {
    out.epsilon = cfg->epsilon;
    out.lsqr_iter_factor = cfg->lsqr_iter_factor;
    out.repeats = cfg->repeats;
    out.seed = cfg->seed;
  }
  out.validate();
  return out;
}

unicomp::HarnessConfig to_harness_config(const unicomp_harness_config* cfg) {
  unicomp::HarnessConfig out;
  if (cfg != nullptr) {
    out.test = to_test_config(&cfg->test);
    out.descent_factor = cfg->descent_factor;
    out.consecutive_failures = cfg->consecutive_failures;
    out.refine_samples = cfg->refine_samples;
    out.alpha_cap = cfg->alpha_cap;
    out.jobs = cfg->jobs;
  }
  return out;
}

}  // namespace

extern "C" {

const char* unicomp_version(void) { return "1.0.0"; }

const char* unicomp_status_name(unicomp_status status) {
  if (status == UNICOMP_OK) return "ok";
  if (status == UNICOMP_ERR_INTERNAL) return "internal";
  if (status >= UNICOMP_ERR_INVALID_ARGUMENT && status <= UNICOMP_ERR_COLLINEAR_DESIGN) {
    return unicomp::to_string(static_cast<unicomp::ErrorCode>(status));
  }
  return "unknown";
}

const char* unicomp_last_error(void) { return g_last_error.c_str(); }

void unicomp_string_free(char* s) { std::free(s); }

void unicomp_test_config_init(unicomp_test_config* cfg) {
  if (cfg == nullptr) return;
  const unicomp::TestConfig d;
  cfg->epsilon = d.epsilon;
  cfg->lsqr_iter_factor = d.lsqr_iter_factor;
  cfg->repeats = d.repeats;
  cfg->seed = d.seed;
}

void unicomp_harness_config_init(unicomp_harness_config* cfg) {
  if (cfg == nullptr) return;
  const unicomp::HarnessConfig d;
  unicomp_test_config_init(&cfg->test);
  cfg->descent_factor = d.descent_factor;
  cfg->consecutive_failures = d.consecutive_failures;
  cfg->refine_samples = d.refine_samples;
  cfg->alpha_cap = d.alpha_cap;
  cfg->jobs = d.jobs;
}

unicomp_status unicomp_pattern_sample(unicomp_kind kind, size_t n1, size_t n2, double beta, uint64_t seed,
                                      unicomp_pattern** out) {
  return guarded([&] {
    require(out, "out");
    *out = nullptr;
    unicomp::Pattern p = to_kind(kind) == unicomp::PatternKind::Gram
                             ? unicomp::Pattern(unicomp::sample_gram(n1, beta, seed))
                             : unicomp::Pattern(unicomp::sample_rect(n1, n2, beta, seed));
    *out = new unicomp_pattern{std::move(p)};
  });
}

unicomp_status unicomp_pattern_parse(const char* text, unicomp_pattern** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    *out = new unicomp_pattern{unicomp::parse_pattern(std::string_view(text))};
  });
}

unicomp_status unicomp_pattern_read(const char* path, unicomp_pattern** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = nullptr;
    *out = new unicomp_pattern{unicomp::read_pattern_file(path)};
  });
}

unicomp_status unicomp_pattern_format(const unicomp_pattern* p, char** out_text) {
  return guarded([&] {
    require(p, "pattern");
    require(out_text, "out_text");
    *out_text = dup_string(unicomp::format_pattern(p->value));
  });
}

unicomp_status unicomp_pattern_info(const unicomp_pattern* p, unicomp_kind* kind, size_t* n1, size_t* n2,
                                    size_t* m) {
  return guarded([&] {
    require(p, "pattern");
    const bool gram = unicomp::kind_of(p->value) == unicomp::PatternKind::Gram;
    if (kind) *kind = gram ? UNICOMP_KIND_GRAM : UNICOMP_KIND_RECT;
    if (gram) {
      const auto& g = std::get<unicomp::GramPattern>(p->value);
      if (n1) *n1 = g.n();
      if (n2) *n2 = 0;
    } else {
      const auto& r = std::get<unicomp::RectPattern>(p->value);
      if (n1) *n1 = r.n1();
      if (n2) *n2 = r.n2();
    }
    if (m) *m = unicomp::edge_count(p->value);
  });
}

void unicomp_pattern_free(unicomp_pattern* p) { delete p; }

unicomp_status unicomp_check(const unicomp_pattern* p, unicomp_test test, size_t d,
                             const unicomp_test_config* cfg, unicomp_verdict** out) {
  return guarded([&] {
    require(p, "pattern");
    require(out, "out");
    *out = nullptr;
    const unicomp::TestConfig tc = to_test_config(cfg);
    *out = new unicomp_verdict{unicomp::run_test(p->value, to_test(test), d, tc)};
  });
}

int unicomp_verdict_completable(const unicomp_verdict* v) { return v != nullptr && v->value.completable ? 1 : 0; }

unsigned unicomp_verdict_flags(const unicomp_verdict* v) { return v != nullptr ? v->value.flags : 0u; }

double unicomp_verdict_residual(const unicomp_verdict* v) { return v != nullptr ? v->value.residual() : 0.0; }

unicomp_status unicomp_verdict_json(const unicomp_verdict* v, char** out_json) {
  return guarded([&] {
    require(v, "verdict");
    require(out_json, "out_json");
    *out_json = dup_string(unicomp::verdict_json(v->value));
  });
}

void unicomp_verdict_free(unicomp_verdict* v) { delete v; }

unicomp_status unicomp_rank1_check(const unicomp_pattern* p, int* locally, int* globally, char** out_json) {
  return guarded([&] {
    require(p, "pattern");
    const auto kind = unicomp::kind_of(p->value);
    const unicomp::Rank1Verdict v = kind == unicomp::PatternKind::Gram
                                        ? unicomp::check_gram_rank1(std::get<unicomp::GramPattern>(p->value))
                                        : unicomp::check_rect_rank1(std::get<unicomp::RectPattern>(p->value));
    if (locally) *locally = v.locally ? 1 : 0;
    if (globally) *globally = v.globally ? 1 : 0;
    if (out_json) *out_json = dup_string(unicomp::rank1_verdict_json(v, kind));
  });
}

unicomp_status unicomp_rank1_complete(const unicomp_pattern* p, const char* values_text, char** out_json) {
  return guarded([&] {
    require(p, "pattern");
    require(values_text, "values_text");
    require(out_json, "out_json");
    const auto* g = std::get_if<unicomp::GramPattern>(&p->value);
    if (g == nullptr) {
      unicomp::raise(unicomp::ErrorCode::InvalidArgument, "rank-1 completion supports Gram patterns only");
    }
    const unicomp::Rank1Values values = unicomp::parse_values(std::string_view(values_text));
    *out_json = dup_string(unicomp::rank1_completion_json(unicomp::complete_gram_rank1(*g, values)));
  });
}

unicomp_status unicomp_threshold_sweep(unicomp_kind kind, unicomp_test test, size_t d, const size_t* n_list,
                                       size_t count, const unicomp_harness_config* cfg, char** out_csv) {
  return guarded([&] {
    require(out_csv, "out_csv");
    if (count > 0) require(n_list, "n_list");
    const unicomp::HarnessConfig hc = to_harness_config(cfg);
    const auto rows = unicomp::sweep(std::span<const size_t>(n_list, count), d, to_kind(kind), to_test(test),
                                     hc, hc.test.seed);
    std::ostringstream out;
    unicomp::write_sweep_csv(out, rows);
    *out_csv = dup_string(out.str());
  });
}

unicomp_status unicomp_fit_scaling(const char* sweep_csv, int fix_a2, char** out_json) {
  return guarded([&] {
    require(sweep_csv, "sweep_csv");
    require(out_json, "out_json");
    std::istringstream in{std::string(sweep_csv)};
    const auto rows = unicomp::read_sweep_csv(in);
    std::vector<std::pair<double, double>> points;
    points.reserve(rows.size());
    for (const auto& r : rows) points.emplace_back(static_cast<double>(r.n), r.beta_star);
    const auto fit = unicomp::fit_scaling(points, fix_a2 ? std::optional<double>(1.0) : std::nullopt);
    *out_json = dup_string(unicomp::scaling_fit_json(fit));
  });
}

unicomp_status unicomp_bench(unicomp_kind kind, unicomp_test test, size_t d, const size_t* sizes, size_t count,
                             double beta_star, const double* multipliers, size_t multiplier_count,
                             const unicomp_harness_config* cfg, char** out_csv) {
  return guarded([&] {
    require(out_csv, "out_csv");
    if (count > 0) require(sizes, "sizes");
    if (multiplier_count > 0) require(multipliers, "multipliers");
    const unicomp::HarnessConfig hc = to_harness_config(cfg);
    const auto rows = unicomp::bench(std::span<const size_t>(sizes, count), d, to_kind(kind), to_test(test), hc,
                                     hc.test.seed, beta_star > 0.0 ? std::optional<double>(beta_star) : std::nullopt,
                                     std::span<const double>(multipliers, multiplier_count));
    std::ostringstream out;
    unicomp::write_bench_csv(out, rows);
    *out_csv = dup_string(out.str());
  });
}

}  // extern "C"
