#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "jump/config.hpp"

using namespace jump;

TEST_CASE("dump/apply round-trip reproduces every field") {
  Config a;
  std::string err;
  // Values that need full %.17g precision to survive a text round-trip.
  REQUIRE(a.apply_line("sim.dt_s = 0.00033333333333333332", 1, err));
  REQUIRE(a.apply_line("reward.alpha_motion = 4.3299999999999902", 2, err));
  REQUIRE(a.apply_line("episode.lpf_beta = 0.1234567890123456789", 3, err));
  REQUIRE(a.apply_line("ppo.iters_s1 = 12345", 4, err));
  REQUIRE(a.apply_line("ppo.paper_scale = true", 5, err));
  REQUIRE(a.apply_line("episode.elevation_blend = false", 6, err));

  std::ostringstream dump_a;
  a.dump(dump_a);

  Config b;
  std::istringstream in(dump_a.str());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    INFO("line ", lineno, ": ", line);
    CHECK(b.apply_line(line, lineno, err));
  }

  std::ostringstream dump_b;
  b.dump(dump_b);
  CHECK(dump_a.str() == dump_b.str());
  CHECK(b.sim_dt_s == a.sim_dt_s);
  CHECK(b.alpha_motion == a.alpha_motion);
  CHECK(b.ep_lpf_beta == a.ep_lpf_beta);
  CHECK(b.ppo_iters_s1 == 12345);
  CHECK(b.ppo_paper_scale == true);
  CHECK(b.ep_elevation_blend == false);
}

TEST_CASE("registry covers every key exactly once and dump emits all of them") {
  Config c;
  std::vector<std::string> keys = c.keys();
  std::set<std::string> uniq(keys.begin(), keys.end());
  CHECK(uniq.size() == keys.size());

  std::ostringstream os;
  c.dump(os);
  std::istringstream in(os.str());
  std::string line;
  size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    size_t eq = line.find(" = ");
    REQUIRE(eq != std::string::npos);
    CHECK(uniq.count(line.substr(0, eq)) == 1);
  }
  CHECK(lines == keys.size());

  // Spot-check that each section made it into the registry.
  for (const char* k : {"sim.dt_s", "ref.tj_s", "reward.alpha_motion",
                        "episode.lpf_beta", "rand.mass_ratio_lo", "nn.short_history",
                        "ppo.gamma", "rma.iters", "arma.iters", "harness.trials"}) {
    INFO("key ", k);
    CHECK(uniq.count(k) == 1);
  }
}

TEST_CASE("unknown keys and malformed values produce named diagnostics") {
  Config c;
  std::string err;

  CHECK_FALSE(c.apply_line("sim.not_a_key = 1.0", 7, err));
  CHECK(err.find("sim.not_a_key") != std::string::npos);
  CHECK(err.find("7") != std::string::npos);

  err.clear();
  CHECK_FALSE(c.apply_line("sim.dt_s = banana", 1, err));
  CHECK(err.find("sim.dt_s") != std::string::npos);
  CHECK(err.find("banana") != std::string::npos);

  err.clear();
  CHECK_FALSE(c.apply_line("ppo.iters_s1 = 1.5", 1, err));
  CHECK(err.find("ppo.iters_s1") != std::string::npos);

  err.clear();
  CHECK_FALSE(c.apply_line("ppo.paper_scale = maybe", 1, err));
  CHECK(err.find("ppo.paper_scale") != std::string::npos);

  err.clear();
  CHECK_FALSE(c.apply_line("just some words", 3, err));
  CHECK(err.find("3") != std::string::npos);
}

TEST_CASE("comments, blanks, and whitespace are tolerated") {
  Config c;
  const Config defaults;
  std::string err;
  CHECK(c.apply_line("", 1, err));
  CHECK(c.apply_line("   ", 2, err));
  CHECK(c.apply_line("# a comment line", 3, err));
  CHECK(c.sim_dt_s == defaults.sim_dt_s);
  CHECK(c.apply_line("  sim.dt_s =  0.001   # trailing note", 4, err));
  CHECK(c.sim_dt_s == 0.001);
}

TEST_CASE("bool fields accept 1/0 and true/false") {
  Config c;
  std::string err;
  CHECK(c.apply_line("ppo.paper_scale = 1", 1, err));
  CHECK(c.ppo_paper_scale);
  CHECK(c.apply_line("ppo.paper_scale = false", 2, err));
  CHECK_FALSE(c.ppo_paper_scale);
  CHECK(c.apply_line("ppo.paper_scale = true", 3, err));
  CHECK(c.ppo_paper_scale);
  CHECK(c.apply_line("ppo.paper_scale = 0", 4, err));
  CHECK_FALSE(c.ppo_paper_scale);
}

TEST_CASE("load_file reports unopenable paths and bad lines with numbers") {
  Config c;
  std::string err;
  CHECK_FALSE(c.load_file("/nonexistent/nowhere.cfg", err));
  CHECK(err.find("/nonexistent/nowhere.cfg") != std::string::npos);

  const char* path = "test_config_tmp.cfg";
  {
    std::ofstream out(path);
    out << "sim.dt_s = 0.001\n";
    out << "sim.gravity_mps2 = oops\n";
  }
  err.clear();
  CHECK_FALSE(c.load_file(path, err));
  CHECK(err.find("sim.gravity_mps2") != std::string::npos);
  CHECK(c.sim_dt_s == 0.001);  // lines before the bad one were applied
  std::remove(path);
}

TEST_CASE("paper-scale switch selects the effective rollout shape") {
  Config c;
  CHECK(c.effective_n_envs() == c.ppo_n_envs);
  CHECK(c.effective_steps_per_env() == c.ppo_steps_per_env);
  CHECK(c.effective_iters(1) == c.ppo_iters_s1);
  CHECK(c.effective_iters(2) == c.ppo_iters_s2);
  CHECK(c.effective_iters(3) == c.ppo_iters_s3);
  c.ppo_paper_scale = true;
  CHECK(c.effective_n_envs() == c.ppo_paper_n_envs);
  CHECK(c.effective_steps_per_env() == c.ppo_paper_steps_per_env);
  CHECK(c.effective_iters(1) == c.ppo_paper_iters_s1);
  CHECK(c.effective_iters(3) == c.ppo_paper_iters_s3);
}
