#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "jump/trace.hpp"

namespace jump {

namespace {

constexpr int kTraceCols = 1 + 9 + 9 + 4 + 2 + 1 + R_COUNT + 4 + 1 + 4 + 4;

void append_g(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}

}  // namespace

Observation setup_env(JumpEnv& env, const TraceSetup& ts) {
  if (ts.single_jump) env.set_single_jump(true);
  if (ts.fall_only) env.set_fall_only_termination(true);
  if (ts.has_forced_goal) env.set_forced_goal(ts.forced_goal);
  env.set_constant_wrench(ts.const_wrench);
  env.set_com_shift(ts.com_dx, ts.com_dz);
  env.set_perturbation_enabled(ts.perturb);
  if (ts.has_pulse) env.set_forced_pulse(ts.pulse_start_s, ts.pulse_dur_s, ts.pulse);
  return env.reset(ts.master_seed, ts.worker, ts.episode);
}

TraceWriter::TraceWriter(const std::string& path, const Config& cfg, const TraceSetup& ts)
    : os_(path) {
  if (!os_) throw std::runtime_error("trace: cannot write '" + path + "'");
  os_ << "# jump-trace v1\n";
  {
    std::ostringstream dump;
    cfg.dump(dump);
    std::istringstream lines(dump.str());
    std::string line;
    while (std::getline(lines, line))
      if (!line.empty()) os_ << "# cfg " << line << "\n";
  }
  os_ << "# env stage " << ts.stage << " mode " << mode_name(ts.mode) << " seed "
      << ts.master_seed << " worker " << ts.worker << " episode " << ts.episode << "\n";
  std::string h;
  if (ts.single_jump) os_ << "# hook single_jump 1\n";
  if (ts.fall_only) os_ << "# hook fall_only 1\n";
  if (ts.has_forced_goal) {
    h = "# hook forced_goal ";
    append_g(h, ts.forced_goal.cx);
    h += ' ';
    append_g(h, ts.forced_goal.cy);
    h += ' ';
    append_g(h, ts.forced_goal.cz);
    h += ' ';
    append_g(h, ts.forced_goal.cphi);
    os_ << h << "\n";
  }
  if (ts.const_wrench.fx != 0.0 || ts.const_wrench.fz != 0.0 || ts.const_wrench.my != 0.0) {
    h = "# hook const_wrench ";
    append_g(h, ts.const_wrench.fx);
    h += ' ';
    append_g(h, ts.const_wrench.fz);
    h += ' ';
    append_g(h, ts.const_wrench.my);
    os_ << h << "\n";
  }
  if (ts.com_dx != 0.0 || ts.com_dz != 0.0) {
    h = "# hook com_shift ";
    append_g(h, ts.com_dx);
    h += ' ';
    append_g(h, ts.com_dz);
    os_ << h << "\n";
  }
  if (ts.perturb) os_ << "# hook perturb 1\n";
  if (ts.has_pulse) {
    h = "# hook forced_pulse ";
    append_g(h, ts.pulse_start_s);
    h += ' ';
    append_g(h, ts.pulse_dur_s);
    h += ' ';
    append_g(h, ts.pulse.fx);
    h += ' ';
    append_g(h, ts.pulse.fz);
    h += ' ';
    append_g(h, ts.pulse.my);
    os_ << h << "\n";
  }

  os_ << "t";
  for (int i = 0; i < 9; ++i) os_ << ",q" << i;
  for (int i = 0; i < 9; ++i) os_ << ",qd" << i;
  for (int i = 0; i < 4; ++i) os_ << ",tau" << i;
  os_ << ",fz_left,fz_right,reward";
  for (int i = 0; i < R_COUNT; ++i) os_ << "," << kRewardRowNames[i];
  os_ << ",c_x,c_y,c_z,c_phi,term";
  for (int i = 0; i < 4; ++i) os_ << ",a" << i;
  for (int i = 0; i < 4; ++i) os_ << ",target" << i;
  os_ << "\n";
}

void TraceWriter::row(const JumpEnv& env, const Vec4& action, const Vec4& target,
                      const StepResult& r) {
  const SimState& s = env.state();
  std::string line;
  line.reserve(kTraceCols * 26);
  append_g(line, s.time);
  for (int i = 0; i < 9; ++i) {
    line += ',';
    append_g(line, s.q[i]);
  }
  for (int i = 0; i < 9; ++i) {
    line += ',';
    append_g(line, s.qd[i]);
  }
  for (int i = 0; i < 4; ++i) {
    line += ',';
    append_g(line, s.tau_applied[i]);
  }
  line += ',';
  append_g(line, s.foot_fn(0));
  line += ',';
  append_g(line, s.foot_fn(1));
  line += ',';
  append_g(line, r.reward);
  for (int i = 0; i < R_COUNT; ++i) {
    line += ',';
    append_g(line, r.breakdown.comp[i]);
  }
  const Goal& g = env.goal();
  line += ',';
  append_g(line, g.cx);
  line += ',';
  append_g(line, g.cy);
  line += ',';
  append_g(line, g.cz);
  line += ',';
  append_g(line, g.cphi);
  line += ',';
  line += std::to_string(int(r.term));
  for (int i = 0; i < 4; ++i) {
    line += ',';
    append_g(line, action[i]);
  }
  for (int i = 0; i < 4; ++i) {
    line += ',';
    append_g(line, target[i]);
  }
  os_ << line << "\n";
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  const char* p = line.c_str();
  char* end = nullptr;
  while (true) {
    const double v = std::strtod(p, &end);
    if (end == p) return false;
    out.push_back(v);
    p = end;
    if (*p == ',') {
      ++p;
    } else {
      break;
    }
  }
  return *p == '\0' || *p == '\r';
}

}  // namespace

ReplayReport replay_trace(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("replay: cannot open '" + path + "'");

  Config cfg;
  TraceSetup ts;
  bool saw_env = false;
  std::vector<std::vector<double>> rows;
  std::string line;

  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("# cfg ", 0) == 0) {
      std::string err;
      if (!cfg.apply_line(line.substr(6), 0, err))
        throw std::runtime_error("replay: bad config line in trace: " + err);
      continue;
    }
    if (line.rfind("# env ", 0) == 0) {
      std::istringstream ss(line.substr(6));
      std::string kw, mode;
      unsigned long long seed = 0, episode = 0;
      ss >> kw >> ts.stage >> kw >> mode >> kw >> seed >> kw >> ts.worker >> kw >> episode;
      ts.mode = parse_mode(mode);
      ts.master_seed = seed;
      ts.episode = episode;
      saw_env = true;
      continue;
    }
    if (line.rfind("# hook ", 0) == 0) {
      std::istringstream ss(line.substr(7));
      std::string name;
      ss >> name;
      if (name == "single_jump") {
        ts.single_jump = true;
      } else if (name == "fall_only") {
        ts.fall_only = true;
      } else if (name == "forced_goal") {
        ss >> ts.forced_goal.cx >> ts.forced_goal.cy >> ts.forced_goal.cz >>
            ts.forced_goal.cphi;
        ts.has_forced_goal = true;
      } else if (name == "const_wrench") {
        ss >> ts.const_wrench.fx >> ts.const_wrench.fz >> ts.const_wrench.my;
      } else if (name == "com_shift") {
        ss >> ts.com_dx >> ts.com_dz;
      } else if (name == "perturb") {
        ts.perturb = true;
      } else if (name == "forced_pulse") {
        ss >> ts.pulse_start_s >> ts.pulse_dur_s >> ts.pulse.fx >> ts.pulse.fz >>
            ts.pulse.my;
        ts.has_pulse = true;
      } else {
        throw std::runtime_error("replay: unknown hook '" + name + "' in trace");
      }
      continue;
    }
    if (line.empty() || line[0] == '#' || line.rfind("t,", 0) == 0) continue;
    std::vector<double> vals;
    if (!parse_row(line, vals) || int(vals.size()) != kTraceCols)
      throw std::runtime_error("replay: malformed data row in trace");
    rows.push_back(std::move(vals));
  }
  if (!saw_env) throw std::runtime_error("replay: trace lacks an environment header");

  JumpEnv env(cfg, ts.stage, ts.mode);
  setup_env(env, ts);

  ReplayReport rep;
  rep.steps = int(rows.size());

  const auto fail = [&](int row, const char* what, double got, double want) {
    rep.first_mismatch = row;
    char buf[160];
    std::snprintf(buf, sizeof buf, "row %d %s: resimulated %.17g recorded %.17g", row,
                  what, got, want);
    rep.detail = buf;
  };

  for (int i = 0; i < int(rows.size()); ++i) {
    const std::vector<double>& v = rows[i];
    Vec4 action, target;
    const int abase = kTraceCols - 8;
    for (int j = 0; j < 4; ++j) action[j] = v[abase + j];
    for (int j = 0; j < 4; ++j) target[j] = v[abase + 4 + j];

    const StepResult r = env.step(action, target);
    const SimState& s = env.state();

    if (s.time != v[0]) {
      fail(i, "t", s.time, v[0]);
      return rep;
    }
    for (int j = 0; j < 9; ++j)
      if (s.q[j] != v[1 + j]) {
        fail(i, "q", s.q[j], v[1 + j]);
        return rep;
      }
    for (int j = 0; j < 9; ++j)
      if (s.qd[j] != v[10 + j]) {
        fail(i, "qd", s.qd[j], v[10 + j]);
        return rep;
      }
    for (int j = 0; j < 4; ++j)
      if (s.tau_applied[j] != v[19 + j]) {
        fail(i, "tau", s.tau_applied[j], v[19 + j]);
        return rep;
      }
    if (s.foot_fn(0) != v[23]) {
      fail(i, "fz_left", s.foot_fn(0), v[23]);
      return rep;
    }
    if (s.foot_fn(1) != v[24]) {
      fail(i, "fz_right", s.foot_fn(1), v[24]);
      return rep;
    }
    if (r.reward != v[25]) {
      fail(i, "reward", r.reward, v[25]);
      return rep;
    }
    const int term_col = 25 + 1 + R_COUNT + 4;
    if (double(int(r.term)) != v[term_col]) {
      fail(i, "term", double(int(r.term)), v[term_col]);
      return rep;
    }
  }
  rep.ok = true;
  return rep;
}

}  // namespace jump
