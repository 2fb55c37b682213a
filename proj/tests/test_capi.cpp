#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <json.hpp>

#include "unicomp/unicomp.h"

namespace {

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  unicomp_string_free(s);
  return out;
}

unicomp_pattern* parse(const char* text) {
  unicomp_pattern* p = nullptr;
  EXPECT_EQ(unicomp_pattern_parse(text, &p), UNICOMP_OK) << unicomp_last_error();
  return p;
}

const char* kLeft = "kind gram\nsize 3\nedges 5\n1 1\n1 2\n1 3\n2 2\n2 3\n";
const char* kRight = "kind gram\nsize 3\nedges 4\n1 1\n1 2\n1 3\n2 3\n";

TEST(CApi, VersionAndStatusNames) {
  EXPECT_STREQ(unicomp_version(), "1.0.0");
  EXPECT_STREQ(unicomp_status_name(UNICOMP_OK), "ok");
  EXPECT_STREQ(unicomp_status_name(UNICOMP_ERR_INTERNAL), "internal");
  EXPECT_STREQ(unicomp_status_name(static_cast<unicomp_status>(42)), "unknown");
  EXPECT_GT(std::strlen(unicomp_status_name(UNICOMP_ERR_PARSE)), 0u);
}

TEST(CApi, ConfigDefaults) {
  unicomp_test_config t;
  unicomp_test_config_init(&t);
  EXPECT_EQ(t.epsilon, 1e-4);
  EXPECT_EQ(t.lsqr_iter_factor, 10.0);
  EXPECT_EQ(t.repeats, 1u);
  unicomp_harness_config h;
  unicomp_harness_config_init(&h);
  EXPECT_EQ(h.descent_factor, 0.95);
  EXPECT_EQ(h.consecutive_failures, 20u);
  EXPECT_EQ(h.refine_samples, 40u);
  EXPECT_EQ(h.jobs, 1u);
  unicomp_test_config_init(nullptr);
}

TEST(CApi, PatternLifecycle) {
  unicomp_pattern* p = parse(kLeft);
  unicomp_kind kind;
  size_t n1 = 0, n2 = 7, m = 0;
  ASSERT_EQ(unicomp_pattern_info(p, &kind, &n1, &n2, &m), UNICOMP_OK);
  EXPECT_EQ(kind, UNICOMP_KIND_GRAM);
  EXPECT_EQ(n1, 3u);
  EXPECT_EQ(n2, 0u);
  EXPECT_EQ(m, 5u);
  char* text = nullptr;
  ASSERT_EQ(unicomp_pattern_format(p, &text), UNICOMP_OK);
  EXPECT_EQ(take(text), std::string(kLeft));
  unicomp_pattern_free(p);
  unicomp_pattern_free(nullptr);

  unicomp_pattern* s = nullptr;
  ASSERT_EQ(unicomp_pattern_sample(UNICOMP_KIND_RECT, 4, 6, 1.0, 3, &s), UNICOMP_OK);
  ASSERT_EQ(unicomp_pattern_info(s, nullptr, &n1, &n2, &m), UNICOMP_OK);
  EXPECT_EQ(n1, 4u);
  EXPECT_EQ(n2, 6u);
  EXPECT_EQ(m, 24u);
  unicomp_pattern_free(s);
}

TEST(CApi, ErrorsCarryCodesAndMessages) {
  unicomp_pattern* p = reinterpret_cast<unicomp_pattern*>(0x1);
  EXPECT_EQ(unicomp_pattern_parse("kind gram\nsize 3\nedges 1\n9 9\n", &p), UNICOMP_ERR_PARSE);
  EXPECT_EQ(p, nullptr);
  EXPECT_GT(std::strlen(unicomp_last_error()), 0u);
  EXPECT_EQ(unicomp_pattern_read("/nonexistent/file", &p), UNICOMP_ERR_IO);
  EXPECT_EQ(unicomp_pattern_parse(nullptr, &p), UNICOMP_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(unicomp_pattern_sample(static_cast<unicomp_kind>(7), 3, 3, 0.5, 1, &p),
            UNICOMP_ERR_INVALID_ARGUMENT);
  EXPECT_EQ(unicomp_pattern_format(nullptr, nullptr), UNICOMP_ERR_INVALID_ARGUMENT);

  unicomp_pattern* ok = parse(kLeft);
  EXPECT_STREQ(unicomp_last_error(), "");
  unicomp_verdict* v = nullptr;
  EXPECT_EQ(unicomp_check(ok, UNICOMP_TEST_LOCAL, 4, nullptr, &v), UNICOMP_ERR_INVALID_ARGUMENT);
  unicomp_test_config bad;
  unicomp_test_config_init(&bad);
  bad.epsilon = -1.0;
  EXPECT_EQ(unicomp_check(ok, UNICOMP_TEST_LOCAL, 2, &bad, &v), UNICOMP_ERR_INVALID_ARGUMENT);
  unicomp_pattern_free(ok);
}

TEST(CApi, CheckExamples) {
  unicomp_pattern* left = parse(kLeft);
  unicomp_pattern* right = parse(kRight);
  unicomp_verdict* v = nullptr;
  ASSERT_EQ(unicomp_check(left, UNICOMP_TEST_LOCAL, 2, nullptr, &v), UNICOMP_OK);
  EXPECT_EQ(unicomp_verdict_completable(v), 1);
  EXPECT_EQ(unicomp_verdict_flags(v), 0u);
  EXPECT_LT(unicomp_verdict_residual(v), 1e-4);
  char* json = nullptr;
  ASSERT_EQ(unicomp_verdict_json(v, &json), UNICOMP_OK);
  const auto j = nlohmann::json::parse(take(json));
  EXPECT_EQ(j["completable"], true);
  EXPECT_EQ(j["trivial_dim"], 1);
  unicomp_verdict_free(v);

  ASSERT_EQ(unicomp_check(right, UNICOMP_TEST_LOCAL, 2, nullptr, &v), UNICOMP_OK);
  EXPECT_EQ(unicomp_verdict_completable(v), 0);
  EXPECT_EQ(unicomp_verdict_flags(v), UNICOMP_FLAG_COUNT_SHORTFALL);
  unicomp_verdict_free(v);
  unicomp_verdict_free(nullptr);
  EXPECT_EQ(unicomp_verdict_completable(nullptr), 0);

  unicomp_pattern_free(left);
  unicomp_pattern_free(right);
}

TEST(CApi, RankOne) {
  unicomp_pattern* tri = parse("kind gram\nsize 3\nedges 3\n1 2\n2 3\n1 3\n");
  int locally = -1, globally = -1;
  char* json = nullptr;
  ASSERT_EQ(unicomp_rank1_check(tri, &locally, &globally, &json), UNICOMP_OK);
  EXPECT_EQ(locally, 1);
  EXPECT_EQ(globally, 1);
  EXPECT_EQ(nlohmann::json::parse(take(json))["minimally_locally"], true);

  ASSERT_EQ(unicomp_rank1_complete(tri, "1 2 -2\n2 3 -6\n1 3 3\n", &json), UNICOMP_OK);
  const auto c = nlohmann::json::parse(take(json));
  EXPECT_NEAR(std::abs(c["points"][0].get<double>()), 1.0, 1e-12);
  EXPECT_NEAR(c["points"][1].get<double>() / c["points"][0].get<double>(), -2.0, 1e-12);

  EXPECT_EQ(unicomp_rank1_complete(tri, "1 2 -1\n2 3 1\n1 3 1\n", &json), UNICOMP_ERR_SIGN_INCONSISTENT);
  EXPECT_EQ(unicomp_rank1_complete(tri, "1 2 0\n2 3 1\n1 3 1\n", &json), UNICOMP_ERR_ZERO_ENTRY);
  unicomp_pattern_free(tri);

  unicomp_pattern* r = parse("kind rect\nsize 2 2\nedges 1\n1 1\n");
  EXPECT_EQ(unicomp_rank1_check(r, &locally, nullptr, nullptr), UNICOMP_OK);
  EXPECT_EQ(locally, 0);
  EXPECT_EQ(unicomp_rank1_complete(r, "1 1 1\n", &json), UNICOMP_ERR_INVALID_ARGUMENT);
  unicomp_pattern_free(r);
}

TEST(CApi, FitAndHarness) {
  std::string csv = "# schema=1\nn,d,kind,test,beta_star,alpha_star,beta_star_n_over_dlogn,samples,status,wall_secs\n";
  for (int n : {100, 200, 400, 800, 1600}) {
    char line[256];
    std::snprintf(line, sizeof line, "%d,2,gram,local,%.17g,100,1,60,converged,0.1\n", n, std::log(n) / n);
    csv += line;
  }
  char* json = nullptr;
  ASSERT_EQ(unicomp_fit_scaling(csv.c_str(), 1, &json), UNICOMP_OK) << unicomp_last_error();
  const auto j = nlohmann::json::parse(take(json));
  EXPECT_NEAR(j["a1_plus_2"].get<double>(), 1.0, 1e-10);
  EXPECT_EQ(unicomp_fit_scaling("garbage\n", 0, &json), UNICOMP_ERR_PARSE);

  unicomp_harness_config h;
  unicomp_harness_config_init(&h);
  const size_t ns[] = {30};
  char* out = nullptr;
  ASSERT_EQ(unicomp_threshold_sweep(UNICOMP_KIND_GRAM, UNICOMP_TEST_LOCAL, 1, ns, 1, &h, &out), UNICOMP_OK);
  const std::string sweep = take(out);
  EXPECT_EQ(sweep.rfind("# schema=1\n", 0), 0u);
  EXPECT_NE(sweep.find("\n30,1,gram,local,"), std::string::npos);

  const double mults[] = {1.0, 2.0};
  ASSERT_EQ(unicomp_bench(UNICOMP_KIND_RECT, UNICOMP_TEST_LOCAL, 2, ns, 1, 0.3, mults, 2, &h, &out), UNICOMP_OK);
  const std::string bench = take(out);
  EXPECT_NE(bench.find("\n30,2,rect,local,2,"), std::string::npos);
  EXPECT_EQ(unicomp_bench(UNICOMP_KIND_RECT, UNICOMP_TEST_LOCAL, 2, ns, 1, 1.5, nullptr, 0, &h, &out),
            UNICOMP_ERR_INVALID_ARGUMENT);
}

}  // namespace
