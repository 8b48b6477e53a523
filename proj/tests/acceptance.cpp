// One pass/fail line per acceptance criterion; exit status 1 if any fails.

#include "lgkit/algebroid.hpp"
#include "lgkit/builtins.hpp"
#include "lgkit/foliation.hpp"
#include "lgkit/linearize.hpp"
#include "lgkit/metric.hpp"
#include "lgkit/nerve.hpp"
#include "lgkit/nmetric.hpp"
#include "lgkit/scenario.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

using namespace lgkit;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void criterion(int id, const char* title, const std::function<std::string(bool&)>& body) {
  bool pass = false;
  std::string info;
  try {
    info = body(pass);
  } catch (const std::exception& e) {
    pass = false;
    info = std::string("threw: ") + e.what();
  }
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, title, info.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<LieGroupoid> all_groupoids() {
  return {builtins::unit_line(),        builtins::pair_line(),  builtins::pair_circle(),
          builtins::plane_projection(), builtins::cylinder_projection(), builtins::z2_line(),
          builtins::trivial_line(),     builtins::so2_plane(),  builtins::so3_space()};
}

Metric eta0_of(const LieGroupoid& g, const NMetric& two) {
  return induce_lower_metric(g, induce_lower_metric(g, two, 0), 0).metric;
}

struct ExplicitLevels {
  double invariance = 0, faces = 0, agreement = 0, normal = 0;
  bool pass = true;
};

ExplicitLevels verify_levels(const LieGroupoid& g, const std::vector<const NMetric*>& ms,
                             double tol) {
  ExplicitLevels out;
  for (const NMetric* m : ms) {
    const Report r = verify_n_metric(g, *m, 50, tol, 1);
    out.pass = out.pass && r.pass;
    if (m->level == 0) {
      out.normal = std::max(out.normal, r.max_defect);
    } else {
      out.invariance = std::max(out.invariance, r.details["invariance"].get<double>());
      for (const auto& face : r.details["faces"]) out.faces = std::max(out.faces, face.get<double>());
      out.agreement = std::max(out.agreement, r.details["agreement"].get<double>());
    }
  }
  return out;
}

}  // namespace

int main() {
  criterion(1, "groupoid axioms", [](bool& pass) {
    pass = true;
    double worst = 0.0, slowest = 0.0;
    for (const auto& g : all_groupoids()) {
      const auto t0 = Clock::now();
      const Report r = check_axioms(g, 200, 1e-10, 1);
      const double dt = seconds_since(t0);
      pass = pass && r.pass && r.samples >= 200 && dt < 5.0;
      worst = std::max(worst, r.max_defect);
      slowest = std::max(slowest, dt);
    }
    return fmt("9 groupoids, 200 triples, max residual %.2e (tol 1e-10), slowest %.2f s (limit 5 s)",
               worst, slowest);
  });

  criterion(2, "simplicial identities", [](bool& pass) {
    pass = true;
    double worst = 0.0;
    for (const auto& g : all_groupoids()) {
      const Report r = check_simplicial(g, 2, 200, 1e-10, 1);
      pass = pass && r.pass;
      worst = std::max(worst, r.max_defect);
    }
    return fmt("9 groupoids, n <= 2, 200 samples, max residual %.2e (tol 1e-10)", worst);
  });

  criterion(3, "explicit submersion 2-metric", [](bool& pass) {
    auto r1 = std::make_shared<EuclideanSpace>(1);
    const auto plane = builtins::plane_projection();
    const auto cyl = builtins::cylinder_projection();
    const auto mp = submersion_groupoid_metrics(plane, Metric::euclidean(plane.objects),
                                                Metric::euclidean(r1), SmoothMap::block(2, 0, 1));
    const auto mc = submersion_groupoid_metrics(cyl, Metric::euclidean(cyl.objects),
                                                Metric::euclidean(r1), SmoothMap::block(3, 2, 1));
    const auto a = verify_levels(plane, {&mp.eta2, &mp.eta1, &mp.eta0}, 1e-8);
    const auto b = verify_levels(cyl, {&mc.eta2, &mc.eta1, &mc.eta0}, 1e-8);
    pass = a.pass && b.pass;
    return fmt("R^2->R inv/face/agree %.1e/%.1e/%.1e, S^1xR->R %.1e/%.1e/%.1e (tol 1e-8)",
               a.invariance, a.faces, a.agreement, b.invariance, b.faces, b.agreement);
  });

  criterion(4, "gauge-trick 2-metric", [](bool& pass) {
    const auto t0 = Clock::now();
    const auto z2 = builtins::z2_line();
    const NMetric mz = build_proper_action_2metric(z2);
    const Report rz = verify_n_metric(z2, mz, 50, 1e-12, 1);
    const auto so2 = builtins::so2_plane(64);
    const NMetric ms = build_proper_action_2metric(so2);
    const Report rs = verify_n_metric(so2, ms, 50, 1e-6, 1);
    const double dt = seconds_since(t0);
    pass = rz.pass && rs.pass && dt < 60.0;
    return fmt("Z/2 %.2e (tol 1e-12), SO(2) 64 nodes %.2e (tol 1e-6), %.1f s (limit 60 s)",
               rz.max_defect, rs.max_defect, dt);
  });

  criterion(5, "normal representation", [](bool& pass) {
    const auto g = builtins::so2_plane(64);
    const Metric eta0 = eta0_of(g, build_proper_action_2metric(g));
    const LinearModel m = linear_model(g, builtins::unit_circle(), eta0);
    const Report r = normal_rep_check(g, m.restricted, m.normal, 100, 1e-6, 1);
    const double unit = r.details["unit"].get<double>();
    pass = r.pass && r.samples == 100 && unit < 1e-10;
    return fmt("unit %.2e (tol 1e-10), functoriality %.2e over 100 pairs (tol 1e-6)", unit,
               r.max_defect);
  });

  criterion(6, "Ehresmann recovery", [](bool& pass) {
    const auto g = builtins::cylinder_projection();
    const auto m = submersion_groupoid_metrics(g, Metric::euclidean(g.objects),
                                               Metric::euclidean(std::make_shared<EuclideanSpace>(1)),
                                               SmoothMap::block(3, 2, 1));
    const auto res = linearize_exp(g, m.eta2, builtins::cylinder_fiber(0.0), 0.1);
    const Report r = verify_linearization(res, 20, 1e-6, 1);
    const double diagram = r.details["diagram"].get<double>();
    const double morphism = r.details["morphism"].get<double>();
    const bool saturated = res.saturated && res.saturated->certificate.pass;
    pass = r.pass && diagram < 1e-6 && morphism < 1e-6 && saturated;
    return fmt("radius 0.1: diagram %.2e, morphism %.2e (tol 1e-6), saturated %s", diagram,
               morphism, saturated ? "yes" : "no");
  });

  criterion(7, "slice recovery", [](bool& pass) {
    const auto g = builtins::so2_plane(64);
    const NMetric two = build_proper_action_2metric(g);
    double d[2];
    bool ok = true;
    for (int k = 0; k < 2; ++k) {
      const double radius = k == 0 ? 0.1 : 0.05;
      const auto res = linearize_exp(g, two, builtins::unit_circle(), radius);
      const Report r = verify_linearization(res, 8, 1e-4, 1);
      d[k] = r.details["morphism"].get<double>();
      ok = ok && r.pass;
    }
    const double ratio = d[0] / d[1];
    pass = ok && d[0] < 1e-4 && ratio >= 2.0;
    return fmt("morphism %.2e at r=0.1 (tol 1e-4), %.2e at r=0.05, ratio %.2f (need >= 2)", d[0],
               d[1], ratio);
  });

  criterion(8, "fixed-point linearization", [](bool& pass) {
    const auto g = builtins::z2_line();
    const auto res = linearize_exp(g, build_proper_action_2metric(g), builtins::origin(1), 0.5);
    const Report r = verify_linearization(res, 50, 1e-10, 1);
    pass = r.pass;
    return fmt("Z/2 on R around 0, radius 0.5: max defect %.2e (tol 1e-10)", r.max_defect);
  });

  criterion(9, "geodesic integrator", [](bool& pass) {
    auto s2 = std::make_shared<Sphere>(3);
    const Metric g = Metric::euclidean(s2);
    Vec x(3), v(3);
    x << 0, 0, 1;
    v << 0.9, 0.6, 0;
    const double len = v.norm();
    const Vec exact = std::cos(len) * x + std::sin(len) * v / len;
    const double e1 = (geodesic_exp(g, x, v, 32) - exact).norm();
    const double e2 = (geodesic_exp(g, x, v, 64) - exact).norm();
    const double closed = (geodesic_exp(g, x, v) - exact).norm();
    const double ratio = e1 / e2;
    pass = ratio >= 12.0 && ratio <= 20.0 && closed < 1e-8;
    return fmt("round S^2: halving ratio %.2f (need [12, 20]), closed-form error %.2e (tol 1e-8)",
               ratio, closed);
  });

  criterion(10, "Bott holonomy", [](bool& pass) {
    const auto f = foliations::mobius_cover();
    const Mat h1 = linear_holonomy(f, foliations::mobius_loop(0.0, 0.0, 1), foliations::mobius_deck(1));
    const Mat h2 = linear_holonomy(f, foliations::mobius_loop(0.0, 0.0, 2), foliations::mobius_deck(2));
    const double d1 = std::abs(h1(0, 0) + 1.0);
    const double d2 = std::abs(h2(0, 0) - 1.0);
    pass = d1 < 1e-6 && d2 < 1e-6;
    return fmt("one circuit %.9f, two circuits %.9f (tol 1e-6)", h1(0, 0), h2(0, 0));
  });

  criterion(11, "Leibniz identity", [](bool& pass) {
    const auto g = builtins::so2_plane(64);
    const auto xi = ActionAlgebroidSection::constant(Vec::Ones(1), "xi");
    const Report r = leibniz_check(g, xi, xi, [](const Vec& x) { return x(0); }, 200, 1e-4, 1);
    pass = r.pass && r.samples == 200;
    return fmt("SO(2) on R^2, 200 samples in the unit disk: residual %.2e (tol 1e-4)", r.max_defect);
  });

  criterion(12, "determinism", [](bool& pass) {
    pass = true;
    std::string out;
    for (const char* name : {"ehresmann", "mobius-holonomy", "z2-line"}) {
      const auto a = run_scenario(std::string(name));
      const auto b = run_scenario(std::string(name));
      pass = pass && a.hash() == b.hash();
      out += fmt("%s %016llx%s ", name, static_cast<unsigned long long>(a.hash()),
                 a.hash() == b.hash() ? "" : "!=");
    }
    return out + "(repeated runs, same seed)";
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
