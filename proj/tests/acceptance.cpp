// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "myula/cli.hpp"
#include "myula/data_io.hpp"
#include "myula/errors.hpp"
#include "myula/estimators.hpp"
#include "myula/samplers.hpp"
#include "myula/theory.hpp"
#include "oracles.hpp"

using namespace myula;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(std::ostringstream& os, const std::string& s) {
  if (os.tellp() > 0) os << "; ";
  os << s;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("myula_acceptance_" + name);
  fs::remove_all(dir);
  return dir;
}

int run_cli(const std::string& cmd, const fs::path& out, std::vector<std::string> overrides, std::uint64_t seed,
            unsigned threads, std::size_t reps, std::string* err_text = nullptr) {
  cli::RunOptions o;
  o.out = out;
  o.seed = seed;
  o.threads = threads;
  o.reps = reps;
  o.overrides = std::move(overrides);
  std::ostringstream log, err;
  const int code = cli::run(cmd, o, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(p));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

template <class F>
double gk(F&& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-11);
}

// ---------------------------------------------------------------------------

Outcome cube_tv_exactness() {
  Outcome o;
  std::ostringstream os;
  double worst = 0.0;
  for (const std::size_t d : {1u, 2u, 5u, 10u}) {
    for (const double lambda : {1e-4, 1e-2, 1.0 / (2.0 * M_PI)}) {
      BoundInputs in;
      in.dim = d;
      in.inner_radius = 0.5;
      in.outer_radius = 0.5 * std::sqrt(static_cast<double>(d));
      in.constants = InnerBodyConstants(1.0, 0.0);
      in.volumes = intrinsic_volumes_cube(d, 1.0);
      const double got = tv_bound(BoundCase::A, in, lambda).raw;
      const double want = 2.0 * (1.0 - std::pow(1.0 + std::sqrt(2.0 * M_PI * lambda), -static_cast<double>(d)));
      worst = std::max(worst, std::abs(got - want) / want);
    }
  }
  note(os, "max rel err " + num(worst));
  if (!(worst <= 1e-12)) o.pass = false;

  // ∫|π - π^λ| over [-3, 3]² for the unit-side square, cells split at the faces.
  const double cuts[] = {-3.0, -0.5, 0.5, 3.0};
  double worst_quad = 0.0;
  for (const double lambda : {1e-4, 1e-2, 1.0 / (2.0 * M_PI)}) {
    auto dist1 = [](double t) { return std::max(0.0, std::abs(t) - 0.5); };
    double z1 = 0.0;
    for (int i = 0; i < 3; ++i)
      z1 += gk([&](double t) { return std::exp(-dist1(t) * dist1(t) / (2.0 * lambda)); }, cuts[i], cuts[i + 1]);
    const double z = z1 * z1;
    double total = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        total += gk(
            [&](double x) {
              return gk(
                  [&](double y) {
                    const double dx = dist1(x), dy = dist1(y);
                    const double smooth = std::exp(-(dx * dx + dy * dy) / (2.0 * lambda)) / z;
                    const double hard = (dx == 0.0 && dy == 0.0) ? 1.0 : 0.0;
                    return std::abs(hard - smooth);
                  },
                  cuts[j], cuts[j + 1]);
            },
            cuts[i], cuts[i + 1]);
      }
    }
    BoundInputs in;
    in.dim = 2;
    in.inner_radius = 0.5;
    in.outer_radius = std::sqrt(0.5);
    in.volumes = intrinsic_volumes_cube(2, 1.0);
    worst_quad = std::max(worst_quad, std::abs(total - tv_bound(BoundCase::A, in, lambda).raw));
  }
  note(os, "2-D quadrature max abs err " + num(worst_quad));
  if (!(worst_quad <= 1e-3)) o.pass = false;
  o.detail = os.str();
  return o;
}

Outcome truncated_gaussian_table() {
  Outcome o;
  std::ostringstream os;
  // Independent truth: N(0, Σ), Σ = [[1, ½], [½, 1]], restricted to [0,5]×[0,1].
  const double p11 = 4.0 / 3.0, p12 = -2.0 / 3.0, p22 = 4.0 / 3.0;
  auto moment = [&](int a, int b) {
    return gk(
        [&](double x) {
          return gk(
              [&](double y) {
                return std::pow(x, a) * std::pow(y, b) * std::exp(-0.5 * (p11 * x * x + 2 * p12 * x * y + p22 * y * y));
              },
              0.0, 1.0);
        },
        0.0, 5.0);
  };
  const double z = moment(0, 0);
  const double m1 = moment(1, 0) / z, m2 = moment(0, 1) / z;
  const double c11 = moment(2, 0) / z - m1 * m1;
  const double c12 = moment(1, 1) / z - m1 * m2;
  const double c22 = moment(0, 2) / z - m2 * m2;
  // Published truth row, three decimals.
  const double truth[] = {0.790, 0.488, 0.326, 0.017, 0.080};
  const double quad[] = {m1, m2, c11, c12, c22};
  double truth_gap = 0.0;
  for (int k = 0; k < 5; ++k) truth_gap = std::max(truth_gap, std::abs(truth[k] - quad[k]));
  note(os, "quadrature vs published truth " + num(truth_gap));
  if (!(truth_gap <= 1e-3)) o.pass = false;

  const auto dir = scratch("tmg");
  if (run_cli("tmg", dir, {"tmg.dim=2", "tmg.gamma=1e-3", "tmg.lambda=2e-3", "tmg.n_samples=1000000",
                           "tmg.burn_in=0.1", "tmg.rwm_n_samples=20000"},
              42, 1, 1) != 0) {
    o.pass = false;
    o.detail = "tmg run failed";
    return o;
  }
  double mean[2] = {0, 0}, cov[3] = {0, 0, 0};
  for (const auto& r : read_rows(dir / "means.csv"))
    if (r[0] == "myula") mean[std::stoi(r[2]) - 1] = parse_real(r[3]);
  for (const auto& r : read_rows(dir / "covariance.csv"))
    if (r[0] == "myula") cov[std::stoi(r[2]) + std::stoi(r[3]) - 2] = parse_real(r[4]);
  const double tol[] = {0.06, 0.06, 0.04, 0.01, 0.01};
  const double got[] = {mean[0], mean[1], cov[0], cov[1], cov[2]};
  for (int k = 0; k < 5; ++k)
    if (!(std::abs(got[k] - truth[k]) <= tol[k])) o.pass = false;
  note(os, "MYULA mean (" + num(got[0]) + ", " + num(got[1]) + ") cov (" + num(got[2]) + ", " + num(got[3]) + ", " +
               num(got[4]) + ")");
  fs::remove_all(dir);
  o.detail = os.str();
  return o;
}

Outcome hypercube_volume() {
  Outcome o;
  std::ostringstream os;
  // Per-phase budgets: d = 2 at 1e5, d = 10 at 2e6.
  const std::pair<std::size_t, std::uint64_t> cases[] = {{2, 100000}, {10, 2000000}};
  for (const auto& [d, budget] : cases) {
    const auto body = ConvexBody::cube(d, 1.0);
    const auto schedule = default_schedule(body, {0.003, budget, 0.1});
    int inside = 0;
    std::string values;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
      double normalized = 0.0;
      try {
        normalized = estimate_volume(schedule, 42, rep).estimate / std::pow(2.0, static_cast<double>(d));
      } catch (const std::exception&) {
        normalized = 0.0;
      }
      if (normalized >= 0.85 && normalized <= 1.15) ++inside;
      values += (rep ? " " : "") + num(normalized);
    }
    note(os, "d=" + std::to_string(d) + ": " + std::to_string(inside) + "/10 in band [" + values + "]");
    if (inside < 8) o.pass = false;
  }
  o.detail = os.str();
  return o;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

Outcome theorem1_scaling() {
  Outcome o;
  std::ostringstream os;
  for (const BoundCase c : {BoundCase::B, BoundCase::C}) {
    auto sweep = [&](const std::vector<double>& xs, const std::function<void(PlanRequest&, double)>& set,
                     const std::function<double(double)>& axis) {
      std::vector<double> ax, n;
      for (const double v : xs) {
        PlanRequest req;
        req.assumption = c;
        req.dim = 5;
        set(req, v);
        ax.push_back(axis(v));
        n.push_back(plan_theorem1(req).n_real);
      }
      return loglog_slope(ax, n);
    };
    auto id = [](double v) { return v; };
    auto inv = [](double v) { return 1.0 / v; };
    const double sd = sweep({5, 10, 20, 40}, [](PlanRequest& r, double v) { r.dim = static_cast<std::size_t>(v); }, id);
    const double se = sweep({0.1, 0.05, 0.02, 0.01, 0.005}, [](PlanRequest& r, double v) { r.epsilon = v; }, inv);
    const double sR = sweep({2, 4, 8, 16}, [](PlanRequest& r, double v) { r.outer_radius = v; }, id);
    const double sr = sweep({0.125, 0.25, 0.5, 1.0}, [](PlanRequest& r, double v) { r.inner_radius = v; }, inv);
    note(os, "case " + std::string(to_string(c)) + ": d " + num(sd) + ", 1/eps " + num(se) + ", R " + num(sR) +
                 ", 1/r " + num(sr));
    if (!(sd >= 4.5 && sd <= 5.5 && se >= 5.5 && se <= 6.5 && sR >= 3.5 && sR <= 4.5 && sr >= 3.5 && sr <= 4.5))
      o.pass = false;
  }
  o.detail = os.str();
  return o;
}

Outcome envelope_gradients() {
  Outcome o;
  std::mt19937_64 gen(2024);
  double worst_fd = 0.0, worst_forms = 0.0;
  for (const Eigen::Index d : {1, 5, 20}) {
    const auto du = static_cast<std::size_t>(d);
    const Vector lo = -oracle::random_vector(gen, d, 1.0).cwiseAbs() - Vector::Constant(d, 0.2);
    const Vector hi = oracle::random_vector(gen, d, 1.0).cwiseAbs() + Vector::Constant(d, 0.2);
    const ConvexBody bodies[] = {ConvexBody::cube(du, 1.0), ConvexBody::box(lo, hi),
                                 ConvexBody::ball(0.1 * oracle::random_vector(gen, d, 1.0), 1.2),
                                 ConvexBody::l1_ball(du, 1.5)};
    Matrix design(30, d);
    for (Eigen::Index i = 0; i < 30; ++i) design.row(i) = oracle::random_vector(gen, d, 1.0).transpose();
    const Potential potentials[] = {Potential::zero(du), Potential::isotropic(du, 2.0), tmg_precision(du),
                                    Potential::least_squares(design, oracle::random_vector(gen, 30, 1.0))};
    for (const auto& body : bodies) {
      for (const auto& f : potentials) {
        const RegularizedPotential rp(f, body, 0.1);
        for (int k = 0; k < 100; ++k) {
          const Vector x = oracle::random_vector(gen, d, 1.5);
          const Vector g = rp.gradient(x);
          const Vector fd = oracle::fd_gradient([&](const Vector& y) { return rp.value(y); }, x, 1e-6);
          // Relative to the gradient scale, with unit floor where the gradient vanishes.
          worst_fd = std::max(worst_fd, (fd - g).norm() / std::max(1.0, g.norm()));

          const Vector z = oracle::random_vector(gen, d, 1.0);
          const double gamma = 0.02;
          const Vector direct = x - gamma * g + std::sqrt(2.0 * gamma) * z;
          worst_forms = std::max(worst_forms, (myula_step(rp, gamma, x, z) - direct).norm() / std::max(1.0, x.norm()));
        }
      }
    }
  }
  o.pass = worst_fd < 1e-5 && worst_forms <= 1e-12;
  o.detail = "max FD rel err " + num(worst_fd) + "; max step-form gap " + num(worst_forms);
  return o;
}

Outcome projection_oracles() {
  Outcome o;
  std::mt19937_64 gen(77);
  double worst = 0.0, worst_idem = 0.0, worst_expand = 0.0;
  for (Eigen::Index d = 1; d <= 5; ++d) {
    const Vector lo = -oracle::random_vector(gen, d, 1.0).cwiseAbs() - Vector::Constant(d, 0.1);
    const Vector hi = oracle::random_vector(gen, d, 1.0).cwiseAbs() + Vector::Constant(d, 0.1);
    const Vector c = 0.2 * oracle::random_vector(gen, d, 1.0);
    const ConvexBody box = ConvexBody::box(lo, hi);
    const ConvexBody l1 = ConvexBody::l1_ball(static_cast<std::size_t>(d), 1.3);
    const ConvexBody ball = ConvexBody::ball(c, 0.9);
    const std::pair<const ConvexBody*, std::function<Vector(const Vector&)>> cases[] = {
        {&box, [&](const Vector& x) { return oracle::box_projection(x, lo, hi); }},
        {&l1, [&](const Vector& x) { return oracle::l1_projection(x, 1.3); }},
        {&ball, [&](const Vector& x) { return oracle::ball_projection(x, c, 0.9); }}};
    for (const auto& [body, brute] : cases) {
      for (int k = 0; k < 1000; ++k) {
        const Vector x = oracle::random_vector(gen, d, 2.0);
        const Vector y = oracle::random_vector(gen, d, 2.0);
        const Vector px = body->project(x);
        worst = std::max(worst, (px - brute(x)).norm());
        worst_idem = std::max(worst_idem, (body->project(px) - px).norm() / std::max(1.0, px.norm()));
        worst_expand = std::max(worst_expand, (px - body->project(y)).norm() / (x - y).norm() - 1.0);
      }
    }
  }
  o.pass = worst <= 1e-8 && worst_idem <= 1e-12 && worst_expand <= 1e-12;
  o.detail = "max oracle gap " + num(worst) + "; idempotence " + num(worst_idem) + "; expansion " + num(worst_expand);
  return o;
}

Outcome ball_stationarity() {
  Outcome o;
  std::ostringstream os;
  const auto body = ConvexBody::centered_ball(5, 1.0);
  const auto f = Potential::zero(5);
  // 10⁵ retained draws, every 20th iterate after 10% burn-in.
  ChainConfig c;
  c.sampler = SamplerKind::Myula;
  c.gamma = 5e-4;
  c.lambda = 1e-3;
  c.n_samples = 2222223;
  c.thinning = 20;
  c.seed = 42;
  const auto out = run_chain(c, f, body);
  const double mean_norm = out.samples.colwise().mean().norm();
  const double bound = 3.0 * std::sqrt(*c.lambda);
  note(os, "MYULA kept " + std::to_string(out.samples.rows()) + ", |mean| " + num(mean_norm) + ", outside " +
               num(out.fraction_outside) + ", mean_dist " + num(out.mean_dist_to_body) + " (<= " + num(bound) + ")");
  if (!(out.samples.rows() == 100000 && mean_norm <= 0.05 && out.fraction_outside <= 0.2 &&
        out.mean_dist_to_body <= bound))
    o.pass = false;

  ChainConfig p = c;
  p.sampler = SamplerKind::Plmc;
  p.gamma = 1e-3;
  p.lambda.reset();
  p.n_samples = 111112;
  p.thinning = 1;
  const auto plmc = run_chain(p, f, body);
  note(os, "PLMC outside " + num(plmc.fraction_outside));
  if (plmc.fraction_outside != 0.0) o.pass = false;
  o.detail = os.str();
  return o;
}

std::vector<fs::path> files_under(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(fs::relative(e.path(), dir));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism() {
  Outcome o;
  std::ostringstream os;
  const std::string diabetes = std::string(MYULA_DATA_DIR) + "/diabetes.csv";
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {"sample", {"body.kind=l1ball", "body.dim=3", "body.radius=1", "chain.n_samples=4000"}},
      {"tmg", {"tmg.dim=2", "tmg.n_samples=5000", "tmg.rwm_n_samples=5000"}},
      {"volume", {"volume.dim=3", "volume.budget=3000"}},
      {"lasso-path", {"lasso.data=" + diabetes, "lasso.t_points=3", "lasso.n_samples=3000"}},
      {"bounds", {"bounds.case=c", "bounds.dim=3", "bounds.r=1", "bounds.R=2", "bounds.lambda_min=1e-6",
                  "bounds.lambda_max=1e-3", "bounds.lambda_points=4"}},
      {"plan", {"plan.sweep=epsilon", "plan.values=0.1,0.05"}}};
  for (const auto& [cmd, overrides] : runs) {
    const auto a = scratch(cmd + "_a");
    const auto b = scratch(cmd + "_b");
    const int ca = run_cli(cmd, a, overrides, 7, 1, 2);
    const int cb = run_cli(cmd, b, overrides, 7, 4, 2);
    bool same = ca == 0 && cb == 0;
    std::size_t count = 0;
    if (same) {
      const auto fa = files_under(a);
      same = fa == files_under(b);
      for (const auto& rel : fa) {
        same = same && read_file(a / rel) == read_file(b / rel);
        ++count;
      }
    }
    note(os, cmd + (same ? " identical (" + std::to_string(count) + " files)" : " differs"));
    if (!same) o.pass = false;
    fs::remove_all(a);
    fs::remove_all(b);
  }
  o.detail = os.str();
  return o;
}

Outcome bound_domains() {
  Outcome o;
  std::ostringstream os;
  BoundInputs in;
  in.dim = 4;
  in.inner_radius = 1.0;
  in.outer_radius = 2.0;
  in.constants = InnerBodyConstants(1.0, 1.0);
  const double upper_b = (1.0 / (2.0 * M_PI)) / 16.0;
  const double upper_c = (1.0 / 16.0) / 16.0;
  auto rejects = [&](BoundCase c, double lambda) {
    bool tv = false, w1 = false;
    try {
      tv_bound(c, in, lambda);
    } catch (const DomainError&) {
      tv = true;
    }
    try {
      w1_bound(c, in, lambda);
    } catch (const DomainError&) {
      w1 = true;
    }
    return tv && w1;
  };
  auto accepts = [&](BoundCase c, double lambda) {
    try {
      tv_bound(c, in, lambda);
      w1_bound(c, in, lambda);
      return true;
    } catch (const DomainError&) {
      return false;
    }
  };
  const bool domains = rejects(BoundCase::B, 0.0) && rejects(BoundCase::B, -1e-3) &&
                       rejects(BoundCase::B, upper_b) && accepts(BoundCase::B, std::nextafter(upper_b, 0.0)) &&
                       rejects(BoundCase::C, 0.0) && accepts(BoundCase::C, upper_c) &&
                       rejects(BoundCase::C, std::nextafter(upper_c, 1.0));
  note(os, domains ? "domains enforced" : "domain check failed");
  if (!domains) o.pass = false;

  double worst = 0.0;
  for (const BoundCase c : {BoundCase::B, BoundCase::C}) {
    const double tv = tv_bound(c, in, 1e-12).value;
    const double w1 = w1_bound(c, in, 1e-12);
    note(os, "case " + std::string(to_string(c)) + " at 1e-12: tv " + num(tv) + ", w1 " + num(w1));
    worst = std::max({worst, tv, w1});
  }
  if (!(worst <= 1e-6)) o.pass = false;
  o.detail = os.str();
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"cube TV exactness", cube_tv_exactness},
      {"truncated Gaussian d=2 moments", truncated_gaussian_table},
      {"hypercube volume d=2,10", hypercube_volume},
      {"n scaling in d, 1/eps, R, 1/r", theorem1_scaling},
      {"envelope gradient and step forms", envelope_gradients},
      {"projection oracle equivalence", projection_oracles},
      {"uniform-ball stationarity", ball_stationarity},
      {"thread-independent outputs", determinism},
      {"bound domains and small-lambda limit", bound_domains},
  };
  int failures = 0;
  int index = 1;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", index++, name, r.detail.c_str(), secs);
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
