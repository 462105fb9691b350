#include "stepbench/problems.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>

#include "stepbench/errors.hpp"
#include "stepbench/integrator.hpp"

namespace stepbench {

namespace {

constexpr double kReferenceTau = 1e-13;

using ExactFn = std::function<void(double, std::span<double>)>;

OdeProblem make_problem(std::string id, int dim, Rhs rhs, Vec y0,
                        ExactFn exact = nullptr) {
  OdeProblem p;
  p.id = std::move(id);
  p.dim = dim;
  p.rhs = std::move(rhs);
  p.y0 = std::move(y0);
  p.t0 = 0.0;
  p.t_end = 20.0;
  p.exact = std::move(exact);
  return p;
}

// ---- class A: single equations ------------------------------------------

OdeProblem make_a1() {
  return make_problem(
      "A1", 1,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = -y[0];
      },
      {1.0},
      [](double t, std::span<double> y) { y[0] = std::exp(-t); });
}

OdeProblem make_a2() {
  return make_problem(
      "A2", 1,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = -0.5 * y[0] * y[0] * y[0];
      },
      {1.0},
      [](double t, std::span<double> y) { y[0] = 1.0 / std::sqrt(1.0 + t); });
}

OdeProblem make_a3() {
  return make_problem(
      "A3", 1,
      [](double t, std::span<const double> y, std::span<double> d) {
        d[0] = y[0] * std::cos(t);
      },
      {1.0},
      [](double t, std::span<double> y) { y[0] = std::exp(std::sin(t)); });
}

OdeProblem make_a4() {
  return make_problem(
      "A4", 1,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = 0.25 * y[0] * (1.0 - 0.05 * y[0]);
      },
      {1.0},
      [](double t, std::span<double> y) {
        y[0] = 20.0 / (1.0 + 19.0 * std::exp(-0.25 * t));
      });
}

OdeProblem make_a5() {
  return make_problem(
      "A5", 1,
      [](double t, std::span<const double> y, std::span<double> d) {
        d[0] = (y[0] - t) / (y[0] + t);
      },
      {4.0});
}

// ---- class B: small systems ----------------------------------------------

OdeProblem make_b1() {
  return make_problem(
      "B1", 2,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = 2.0 * (y[0] - y[0] * y[1]);
        d[1] = -(y[1] - y[0] * y[1]);
      },
      {1.0, 3.0});
}

OdeProblem make_b2() {
  return make_problem(
      "B2", 3,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = -y[0] + y[1];
        d[1] = y[0] - 2.0 * y[1] + y[2];
        d[2] = y[1] - y[2];
      },
      {2.0, 0.0, 1.0});
}

OdeProblem make_b3() {
  return make_problem(
      "B3", 3,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = -y[0];
        d[1] = y[0] - y[1] * y[1];
        d[2] = y[1] * y[1];
      },
      {1.0, 0.0, 0.0});
}

OdeProblem make_b4() {
  return make_problem(
      "B4", 3,
      [](double, std::span<const double> y, std::span<double> d) {
        const double r = std::sqrt(y[0] * y[0] + y[1] * y[1]);
        d[0] = -y[1] - y[0] * y[2] / r;
        d[1] = y[0] - y[1] * y[2] / r;
        d[2] = y[0] / r;
      },
      {3.0, 0.0, 0.0});
}

OdeProblem make_b5() {
  return make_problem(
      "B5", 3,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = y[1] * y[2];
        d[1] = -y[0] * y[2];
        d[2] = -0.51 * y[0] * y[1];
      },
      {0.0, 1.0, 1.0});
}

// ---- class C: moderate systems -------------------------------------------

OdeProblem make_c1() {
  return make_problem(
      "C1", 10,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = -y[0];
        for (int i = 1; i < 9; ++i) d[i] = y[i - 1] - y[i];
        d[9] = y[8];
      },
      [] {
        Vec y0(10, 0.0);
        y0[0] = 1.0;
        return y0;
      }());
}

OdeProblem make_c2() {
  return make_problem(
      "C2", 10,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = -y[0];
        for (int i = 1; i < 9; ++i) {
          d[i] = static_cast<double>(i) * y[i - 1] -
                 static_cast<double>(i + 1) * y[i];
        }
        d[9] = 9.0 * y[8];
      },
      [] {
        Vec y0(10, 0.0);
        y0[0] = 1.0;
        return y0;
      }());
}

Rhs tridiagonal_rhs(int n) {
  return [n](double, std::span<const double> y, std::span<double> d) {
    d[0] = -2.0 * y[0] + y[1];
    for (int i = 1; i < n - 1; ++i) d[i] = y[i - 1] - 2.0 * y[i] + y[i + 1];
    d[n - 1] = y[n - 2] - 2.0 * y[n - 1];
  };
}

OdeProblem make_c3() {
  Vec y0(10, 0.0);
  y0[0] = 1.0;
  return make_problem("C3", 10, tridiagonal_rhs(10), std::move(y0));
}

OdeProblem make_c4() {
  Vec y0(51, 0.0);
  y0[0] = 1.0;
  return make_problem("C4", 51, tridiagonal_rhs(51), std::move(y0));
}

// ---- C5: five outer planets ----------------------------------------------

struct C5Data {
  double k2 = 0.0;
  std::array<double, 6> m{};   // m0 = sun + inner planets, m1..m5 planets
  std::array<double, 15> pos{};
  std::array<double, 15> vel{};
};

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, bytes.data(), bytes.size());
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);
  static const char* hexd = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hexd[digest[i] >> 4]);
    out.push_back(hexd[digest[i] & 0xf]);
  }
  return out;
}

C5Data load_c5_data(const std::string& dir) {
  const auto fail = [](const std::string& why) -> C5Data {
    raise(ErrorKind::UnsupportedProblem, why);
  };
  const std::string path = dir + "/c5_outer_planets.dat";
  std::ifstream in(path, std::ios::binary);
  if (!in) return fail("C5 data file not found: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string bytes = buf.str();

  std::ifstream sumin(path + ".sha256");
  std::string recorded;
  if (!(sumin >> recorded)) {
    return fail("C5 checksum file not readable: " + path + ".sha256");
  }
  const std::string actual = sha256_hex(bytes);
  if (actual != recorded) {
    return fail("C5 data file failed its checksum (" + actual +
                " != " + recorded + ")");
  }

  std::map<std::string, double> kv;
  std::istringstream lines(bytes);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    double value;
    if (!(ls >> key >> value)) {
      return fail("C5 data file has a malformed line: " + line);
    }
    kv[key] = value;
  }

  C5Data d;
  const auto fetch = [&](const std::string& key, double& dst) {
    auto it = kv.find(key);
    if (it == kv.end()) fail("C5 data file is missing key '" + key + "'");
    dst = it->second;
  };

  fetch("k2", d.k2);
  for (int i = 0; i < 6; ++i) fetch("m" + std::to_string(i), d.m[i]);
  static const char* axes = "xyz";
  for (int p = 0; p < 5; ++p) {
    for (int a = 0; a < 3; ++a) {
      const std::string suffix = std::string(1, axes[a]) + std::to_string(p + 1);
      fetch(suffix, d.pos[3 * p + a]);
      fetch("v" + suffix, d.vel[3 * p + a]);
    }
  }
  return d;
}

OdeProblem make_c5(const C5Data& d) {
  const double k2 = d.k2;
  const std::array<double, 6> m = d.m;
  Vec y0(30);
  for (int i = 0; i < 15; ++i) {
    y0[i] = d.pos[i];
    y0[15 + i] = d.vel[i];
  }
  // Heliocentric N-body: for planet i
  //   r_i'' = k2 * ( -(m0 + m_i) r_i / |r_i|^3
  //                  + sum_{j != i} m_j ((r_j - r_i)/|r_j - r_i|^3
  //                                      - r_j/|r_j|^3) )
  Rhs rhs = [k2, m](double, std::span<const double> y, std::span<double> dy) {
    for (int i = 0; i < 15; ++i) dy[i] = y[15 + i];
    std::array<double, 5> r3;
    for (int i = 0; i < 5; ++i) {
      const double* p = &y[3 * i];
      const double r = std::sqrt(p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
      r3[i] = r * r * r;
    }
    for (int i = 0; i < 5; ++i) {
      const double* pi = &y[3 * i];
      double ax = -(m[0] + m[i + 1]) * pi[0] / r3[i];
      double ay = -(m[0] + m[i + 1]) * pi[1] / r3[i];
      double az = -(m[0] + m[i + 1]) * pi[2] / r3[i];
      for (int j = 0; j < 5; ++j) {
        if (j == i) continue;
        const double* pj = &y[3 * j];
        const double dx = pj[0] - pi[0];
        const double dyy = pj[1] - pi[1];
        const double dz = pj[2] - pi[2];
        const double dist = std::sqrt(dx * dx + dyy * dyy + dz * dz);
        const double d3 = dist * dist * dist;
        ax += m[j + 1] * (dx / d3 - pj[0] / r3[j]);
        ay += m[j + 1] * (dyy / d3 - pj[1] / r3[j]);
        az += m[j + 1] * (dz / d3 - pj[2] / r3[j]);
      }
      dy[15 + 3 * i] = k2 * ax;
      dy[15 + 3 * i + 1] = k2 * ay;
      dy[15 + 3 * i + 2] = k2 * az;
    }
  };
  return make_problem("C5", 30, std::move(rhs), std::move(y0));
}

// ---- class E: second-order equations in first-order form ------------------

OdeProblem make_e1() {
  // y1(t) = sqrt(2/(pi (t+1))) sin(t+1) and its derivative; y0 from t = 0.
  ExactFn exact = [](double t, std::span<double> y) {
    const double x = t + 1.0;
    const double c = std::sqrt(2.0 / std::numbers::pi);
    y[0] = c * std::sin(x) / std::sqrt(x);
    y[1] = c * (-0.5 * std::sin(x) / (x * std::sqrt(x)) +
                std::cos(x) / std::sqrt(x));
  };
  Vec y0(2);
  exact(0.0, y0);
  return make_problem(
      "E1", 2,
      [](double t, std::span<const double> y, std::span<double> d) {
        const double x = t + 1.0;
        d[0] = y[1];
        d[1] = -(y[1] / x + (1.0 - 0.25 / (x * x)) * y[0]);
      },
      std::move(y0), std::move(exact));
}

OdeProblem make_e2() {
  return make_problem(
      "E2", 2,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = (1.0 - y[0] * y[0]) * y[1] - y[0];
      },
      {2.0, 0.0});
}

OdeProblem make_e3() {
  return make_problem(
      "E3", 2,
      [](double t, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = y[0] * y[0] * y[0] / 6.0 - y[0] + 2.0 * std::sin(2.78535 * t);
      },
      {0.0, 0.0});
}

OdeProblem make_e4() {
  return make_problem(
      "E4", 2,
      [](double, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = 0.032 - 0.4 * y[1] * y[1];
      },
      {30.0, 0.0});
}

OdeProblem make_e5() {
  return make_problem(
      "E5", 2,
      [](double t, std::span<const double> y, std::span<double> d) {
        d[0] = y[1];
        d[1] = std::sqrt(1.0 + y[1] * y[1]) / (25.0 - t);
      },
      {0.0, 0.0});
}

// ---- registry --------------------------------------------------------------

std::string& data_dir_storage() {
  static std::string dir = STEPBENCH_DATA_DIR;
  return dir;
}

struct Registry {
  std::map<std::string, OdeProblem> problems;
  std::string c5_error;  // empty when C5 loaded
  std::vector<std::string> ids;
};

Registry build_registry() {
  Registry r;
  for (OdeProblem p : {make_a1(), make_a2(), make_a3(), make_a4(), make_a5(),
                       make_b1(), make_b2(), make_b3(), make_b4(), make_b5(),
                       make_c1(), make_c2(), make_c3(), make_c4(),
                       make_e1(), make_e2(), make_e3(), make_e4(), make_e5()}) {
    r.problems.emplace(p.id, std::move(p));
  }
  try {
    r.problems.emplace("C5", load_c5_problem(data_dir_storage()));
  } catch (const Error& e) {
    r.c5_error = e.what();
  }
  r.ids = {"A1", "A2", "A3", "A4", "A5", "B1", "B2", "B3", "B4", "B5",
           "C1", "C2", "C3", "C4", "C5", "E1", "E2", "E3", "E4", "E5"};
  return r;
}

const Registry& registry() {
  static const Registry r = build_registry();
  return r;
}

}  // namespace

Vec OdeProblem::exact_at(double t) const {
  Vec y(static_cast<std::size_t>(dim));
  exact(t, y);
  return y;
}

OdeProblem load_c5_problem(const std::string& dir) {
  return make_c5(load_c5_data(dir));
}

void set_data_dir(const std::string& dir) { data_dir_storage() = dir; }

const std::string& data_dir() { return data_dir_storage(); }

const OdeProblem& get_problem(const std::string& id) {
  const Registry& r = registry();
  auto it = r.problems.find(id);
  if (it != r.problems.end()) return it->second;
  if (id == "C5") raise(ErrorKind::UnsupportedProblem, r.c5_error);
  std::string msg = "unknown problem '" + id + "' (valid:";
  for (const auto& pid : r.ids) msg += " " + pid;
  msg += ")";
  raise(ErrorKind::UnknownId, msg);
}

const std::vector<std::string>& all_problem_ids() { return registry().ids; }

const ProblemGroups& groups() {
  static const ProblemGroups g = {
      {"A1", "A3", "A5", "B2", "B4", "C1", "C3", "C5", "E2", "E4"},
      {"A2", "A4", "B1", "B3", "B5", "C2", "C4", "E1", "E3", "E5"}};
  return g;
}

bool c5_available() { return registry().c5_error.empty(); }

// The constants in data/c5_outer_planets.dat have not been checked against
// the original suite's listing, so C5 stays out of default suites.
bool c5_verified() { return false; }

std::vector<std::string> resolve_suite(const std::string& alias,
                                       std::string* footnote) {
  const auto drop_c5 = [&](std::vector<std::string> ids) {
    if (c5_available() && c5_verified()) return ids;
    auto it = std::find(ids.begin(), ids.end(), "C5");
    if (it != ids.end()) {
      ids.erase(it);
      if (footnote) {
        *footnote =
            "note: C5 excluded (data file unverified); suite reduced to " +
            std::to_string(ids.size()) + " problems";
      }
    }
    return ids;
  };
  if (alias == "group1") return drop_c5(groups().group1);
  if (alias == "group2") return drop_c5(groups().group2);
  if (alias == "all") return drop_c5(all_problem_ids());
  // a single problem id; validates (and permits an explicit C5 request)
  return {get_problem(alias).id};
}

Vec reference_endpoint(const std::string& id) {
  static std::map<std::string, Vec> cache;
  static std::mutex mutex;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(id);
    if (it != cache.end()) return it->second;
  }

  const OdeProblem& p = get_problem(id);
  Vec ref;
  if (p.has_exact()) {
    ref = p.exact_at(p.t_end);
  } else {
    ControllerParams params = make_config(ControllerKind::Standard,
                                          named_param_set("std-rec"))
                                  .with_tau(kReferenceTau);
    IntegrationStats stats;
    try {
      stats = integrate(p, params);
    } catch (const Error& e) {
      raise(e.kind(), id + ": reference integration failed: " + e.what());
    }
    ref = std::move(stats.y_final);
  }

  std::lock_guard<std::mutex> lock(mutex);
  auto [it, inserted] = cache.emplace(id, std::move(ref));
  return it->second;  // first writer wins
}

}  // namespace stepbench
