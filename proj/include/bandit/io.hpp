#pragma once

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bandit/batchdp.hpp"
#include "bandit/errors.hpp"
#include "bandit/grid.hpp"
#include "bandit/losses.hpp"
#include "bandit/mcsim.hpp"
#include "bandit/model.hpp"
#include "bandit/pde.hpp"
#include "bandit/version.hpp"

namespace bandit {

// Shortest decimal that round-trips a double on every platform we target.
inline std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Problem configuration (JSON)

struct ProblemConfig {
  PriorSpec prior;
  ModelParams params;
  bool has_grid = false;
  GridSpec grid;
};

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw config_error(path + ": invalid JSON: " + e.what());
  }
  return j;
}

inline ProblemConfig parse_problem_config(const nlohmann::json& j,
                                          const std::string& origin) {
  ProblemConfig cfg;
  try {
    if (j.contains("atoms")) {
      for (const auto& a : j.at("atoms"))
        cfg.prior.atoms.push_back(
            {a.at("w").get<double>(), a.at("p").get<double>()});
    }
    if (j.contains("D")) cfg.params.D = j.at("D").get<double>();
    if (j.contains("c")) cfg.params.c = j.at("c").get<double>();
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      cfg.has_grid = true;
      if (g.contains("x_min")) cfg.grid.x_min = g.at("x_min").get<double>();
      if (g.contains("x_max")) cfg.grid.x_max = g.at("x_max").get<double>();
      if (g.contains("dx")) cfg.grid.dx = g.at("dx").get<double>();
      if (g.contains("dt")) cfg.grid.dt = g.at("dt").get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw config_error(origin + ": bad config shape: " + e.what());
  }
  return cfg;
}

inline ProblemConfig read_problem_config(const std::string& path) {
  return parse_problem_config(read_json_file(path), path);
}

inline nlohmann::json prior_to_json(const PriorSpec& prior) {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& a : prior.atoms) atoms.push_back({{"w", a.w}, {"p", a.p}});
  return atoms;
}

inline nlohmann::json grid_to_json(const GridSpec& g) {
  return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"dx", g.dx}, {"dt", g.dt}};
}

// ---------------------------------------------------------------------------
// Schedules

namespace detail {

inline double parse_fraction_token(const std::string& tok) {
  const auto slash = tok.find('/');
  try {
    if (slash != std::string::npos) {
      const double num = std::stod(tok.substr(0, slash));
      const double den = std::stod(tok.substr(slash + 1));
      if (den == 0.0) throw config_error("schedule: division by zero in " + tok);
      return num / den;
    }
    return std::stod(tok);
  } catch (const std::invalid_argument&) {
    throw config_error("schedule: cannot parse value '" + tok + "'");
  } catch (const std::out_of_range&) {
    throw config_error("schedule: value out of range '" + tok + "'");
  }
}

inline long long parse_count_token(const std::string& tok, const char* what) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw config_error(std::string("schedule: bad ") + what + " '" + tok + "'");
  }
}

inline std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(s);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  return out;
}

}  // namespace detail

// "50" -> 50 uniform batches; "2x1/400,48x1/48.98" style lists give counted
// groups of explicit fractions (rational or decimal). Fractions must sum to 1.
inline BatchSchedule parse_schedule_fractions(const std::string& text) {
  if (text.empty()) throw config_error("schedule: empty");
  if (text.find(',') == std::string::npos &&
      text.find('x') == std::string::npos) {
    const long long K = detail::parse_count_token(text, "batch count");
    if (K < 1) throw config_error("schedule: need at least one batch");
    return BatchSchedule::uniform(static_cast<int>(K));
  }
  BatchSchedule sched;
  for (const auto& tok : detail::split_csv(text)) {
    const auto x = tok.find('x');
    long long count = 1;
    std::string value = tok;
    if (x != std::string::npos) {
      count = detail::parse_count_token(tok.substr(0, x), "group count");
      value = tok.substr(x + 1);
    }
    if (count < 1) throw config_error("schedule: group count must be >= 1");
    const double f = detail::parse_fraction_token(value);
    for (long long i = 0; i < count; ++i) sched.fractions.push_back(f);
  }
  sched.validate();
  return sched;
}

// "50x100" -> 50 batches of 100 items; bare numbers are single batches. The
// counts must sum to the simulation horizon.
inline std::vector<int> parse_schedule_items(const std::string& text, int T) {
  if (text.empty()) throw config_error("schedule: empty");
  std::vector<int> items;
  long long total = 0;
  for (const auto& tok : detail::split_csv(text)) {
    const auto x = tok.find('x');
    long long count = 1, size = 0;
    if (x != std::string::npos) {
      count = detail::parse_count_token(tok.substr(0, x), "group count");
      size = detail::parse_count_token(tok.substr(x + 1), "batch size");
    } else {
      size = detail::parse_count_token(tok, "batch size");
    }
    if (count < 1 || size < 1)
      throw config_error("schedule: counts and sizes must be >= 1");
    for (long long i = 0; i < count; ++i) items.push_back(static_cast<int>(size));
    total += count * size;
  }
  if (total != T)
    throw config_error("schedule: items sum to " + std::to_string(total) +
                       ", expected T = " + std::to_string(T));
  return items;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_threshold_csv(const std::string& path,
                                const ThresholdStrategy& s) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "t,T\n";
  for (std::size_t i = 0; i < s.t.size(); ++i)
    out << format_g17(s.t[i]) << ',' << format_g17(s.T[i]) << '\n';
}

inline ThresholdStrategy read_threshold_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open " + path);
  ThresholdStrategy s;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("t,", 0) == 0) continue;  // header
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw config_error(path + ": expected two comma-separated columns");
    try {
      s.t.push_back(std::stod(line.substr(0, comma)));
      s.T.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw config_error(path + ": cannot parse row '" + line + "'");
    }
  }
  s.validate();
  return s;
}

// Full field dump is quadratic in the grid; row_stride subsamples time rows
// (terminal row always included).
inline void write_risk_csv(const std::string& path, const RiskField& f,
                           int row_stride = 1) {
  if (row_stride < 1) throw config_error("risk csv: stride must be >= 1");
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "t,x,r,action\n";
  const int S = f.grid.steps();
  const int nx = f.grid.nx();
  int j = 0;
  while (true) {
    for (int i = 0; i < nx; ++i)
      out << format_g17(f.grid.t(j)) << ',' << format_g17(f.grid.x(i)) << ','
          << format_g17(f.at(j, i)) << ',' << int(f.action_at(j, i)) << '\n';
    if (j == S) break;
    j = std::min(j + row_stride, S);
  }
}

inline void write_batch_risk_csv(const std::string& path,
                                 const StepRiskField& f) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "stage,t,x,r,action\n";
  const int nx = f.xgrid.nx();
  for (std::size_t k = 0; k < f.r.size(); ++k)
    for (int i = 0; i < nx; ++i)
      out << k << ',' << format_g17(f.t[k]) << ',' << format_g17(f.xgrid.x(i))
          << ',' << format_g17(f.r[k][i]) << ',' << int(f.action[k][i]) << '\n';
}

inline void write_losses_csv(const std::string& path, const LossCurve& curve) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "d,loss\n";
  for (const auto& pt : curve.points)
    out << format_g17(pt.d) << ',' << format_g17(pt.loss) << '\n';
}

inline void write_sim_csv(const std::string& path, const SimResult& res) {
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << "d,mean,se,reps\n";
  for (const auto& st : res.stats)
    out << format_g17(st.d) << ',' << format_g17(st.mean) << ','
        << format_g17(st.se) << ',' << st.reps << '\n';
}

// ---------------------------------------------------------------------------
// Digests and run manifest

inline std::string sha256_hex_of_stream(std::istream& in, const std::string& what) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("EVP_DigestInit_ex failed");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(got)) != 1) {
      EVP_MD_CTX_free(ctx);
      throw std::runtime_error("EVP_DigestUpdate failed");
    }
  }
  if (in.bad()) {
    EVP_MD_CTX_free(ctx);
    throw config_error("error reading " + what);
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, md, &len) != 1) {
    EVP_MD_CTX_free(ctx);
    throw std::runtime_error("EVP_DigestFinal_ex failed");
  }
  EVP_MD_CTX_free(ctx);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

inline std::string sha256_hex(const std::string& data) {
  std::istringstream in(data);
  return sha256_hex_of_stream(in, "<memory>");
}

inline std::string sha256_file_hex(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw config_error("cannot open " + path);
  return sha256_hex_of_stream(in, path);
}

inline void write_manifest(const std::string& path, const std::string& subcommand,
                           const nlohmann::json& resolved_config,
                           double wall_seconds,
                           const std::vector<std::string>& outputs) {
  nlohmann::json j;
  j["subcommand"] = subcommand;
  j["tool_version"] = kToolVersion;
  j["config"] = resolved_config;
  j["wall_time_seconds"] = wall_seconds;
  j["outputs"] = nlohmann::json::array();
  for (const auto& p : outputs)
    j["outputs"].push_back({{"path", p}, {"sha256", sha256_file_hex(p)}});
  std::ofstream out(path);
  if (!out) throw config_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace bandit
