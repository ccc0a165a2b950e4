#include "hqt/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace hqt::analytics {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct FormulaInputs {
  double x2;      // x^2 = exp(-2 alpha^2)
  double d2;      // |delta|^2 = pi^2 / (16 alpha^2)
  double re_ab;   // Re(a* b)
  double apb2;    // |a+b|^2
  double amb2;    // |a-b|^2
};

FormulaInputs derive(cplx a, cplx b, double alpha2) {
  if (!(alpha2 > 0.0)) throw std::invalid_argument("eval_formula: alpha2 must be positive");
  if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-9)
    throw std::invalid_argument("eval_formula: qubit amplitudes must satisfy |a|^2+|b|^2 = 1");
  FormulaInputs in;
  in.x2 = std::exp(-2.0 * alpha2);
  in.d2 = kPi * kPi / (16.0 * alpha2);
  in.re_ab = (std::conj(a) * b).real();
  in.apb2 = std::norm(a + b);
  in.amb2 = std::norm(a - b);
  return in;
}

}  // namespace

std::string to_string(FormulaId id) {
  switch (id) {
    case FormulaId::P0: return "p0";
    case FormulaId::Eq14_F: return "eq14_f";
    case FormulaId::Eq16_Pi: return "eq16_p_i";
    case FormulaId::Eq17_Pii: return "eq17_p_ii";
    case FormulaId::Eq18_Pv_printed: return "eq18_p_v_printed";
    case FormulaId::Eq18_Pvi_printed: return "eq18_p_vi_printed";
    case FormulaId::Eq18_Pv_consistent: return "eq18_p_v_consistent";
    case FormulaId::Eq18_Pvi_consistent: return "eq18_p_vi_consistent";
    case FormulaId::F0: return "f0";
    case FormulaId::Eq19_Favg: return "eq19_f_avg";
    case FormulaId::Eq20_Favg: return "eq20_f_avg";
    case FormulaId::Eq21_Fbar: return "eq21_fbar";
  }
  throw std::invalid_argument("to_string: unknown formula id");
}

double eval_formula(FormulaId id, cplx a, cplx b, double alpha2) {
  const FormulaInputs in = derive(a, b, alpha2);
  const double x2 = in.x2, d2 = in.d2;
  switch (id) {
    case FormulaId::P0: return x2 * in.apb2 / (1.0 + x2);
    case FormulaId::Eq14_F: return std::exp(-d2) * (1.0 + 2.0 * x2 * in.re_ab);
    case FormulaId::Eq16_Pi: return (1.0 - 2.0 * x2 * in.re_ab) / (4.0 * (1.0 + x2));
    case FormulaId::Eq17_Pii: return (1.0 + 2.0 * x2 * in.re_ab) / (4.0 * (1.0 + x2));
    case FormulaId::Eq18_Pv_printed: return x2 * in.apb2 / (4.0 * (1.0 + x2));
    case FormulaId::Eq18_Pvi_printed: return x2 * in.amb2 / (4.0 * (1.0 + x2));
    case FormulaId::Eq18_Pv_consistent: return x2 * in.apb2 / (2.0 * (1.0 + x2));
    case FormulaId::Eq18_Pvi_consistent: return x2 * in.amb2 / (2.0 * (1.0 + x2));
    case FormulaId::F0: return (1.0 - x2) * in.amb2 / 2.0;
    case FormulaId::Eq19_Favg: {
      const double p_ii = eval_formula(FormulaId::Eq17_Pii, a, b, alpha2);
      const double p_i = eval_formula(FormulaId::Eq16_Pi, a, b, alpha2);
      const double f = eval_formula(FormulaId::Eq14_F, a, b, alpha2);
      const double p_v = eval_formula(FormulaId::Eq18_Pv_consistent, a, b, alpha2);
      const double p_vi = eval_formula(FormulaId::Eq18_Pvi_consistent, a, b, alpha2);
      const double f0 = eval_formula(FormulaId::F0, a, b, alpha2);
      return 2.0 * p_ii + 2.0 * p_i * f + (p_v + p_vi) * f0;
    }
    case FormulaId::Eq20_Favg: {
      const double t = 2.0 * x2 * in.re_ab;
      return (1.0 + std::exp(-d2) * (1.0 - t * t) + t + x2 * (1.0 - x2) * in.amb2) /
             (2.0 * (1.0 + x2));
    }
    case FormulaId::Eq21_Fbar: {
      const double x4 = x2 * x2;
      return (1.0 + std::exp(-d2) * (1.0 - x4 / 3.0) + x2 * (1.0 - x2)) / (2.0 * (1.0 + x2));
    }
  }
  throw std::invalid_argument("eval_formula: unknown formula id");
}

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: need at least one node");
  std::vector<std::pair<double, double>> nodes(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double deriv = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      deriv = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / deriv;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * deriv * deriv);
    nodes[i] = {-x, w};
    nodes[n - 1 - i] = {x, w};
  }
  return nodes;
}

double bloch_average(const std::function<double(const QubitParams&)>& f,
                     int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 2)
    throw std::invalid_argument("bloch_average: need at least 2 nodes per axis");
  const auto nodes = gauss_legendre(n_theta);
  double acc = 0.0;
  for (const auto& [t, w] : nodes) {
    const double theta = std::acos(t);
    double phi_acc = 0.0;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2.0 * kPi * (j + 0.5) / n_phi;
      phi_acc += f(QubitParams{theta, phi});
    }
    acc += 0.5 * w * phi_acc / n_phi;
  }
  return acc;
}

SweepTable sweep(const SweepSpec& spec, SweepEngine engine) {
  if (spec.alpha2_grid.empty()) throw std::invalid_argument("sweep: empty grid");
  for (std::size_t i = 0; i < spec.alpha2_grid.size(); ++i) {
    if (!(spec.alpha2_grid[i] > 0.0)) throw std::invalid_argument("sweep: grid must be positive");
    if (i > 0 && spec.alpha2_grid[i] <= spec.alpha2_grid[i - 1])
      throw std::invalid_argument("sweep: grid must be strictly increasing");
  }
  SweepTable table;
  table.engine = engine;
  for (const double alpha2 : spec.alpha2_grid) {
    SweepRow row;
    row.alpha2 = alpha2;
    row.x2 = std::exp(-2.0 * alpha2);
    row.delta_abs2 = kPi * kPi / (16.0 * alpha2);
    if (engine != SweepEngine::Oracle) {
      row.fbar_formula =
          spec.bloch_averaged
              ? eval_formula(FormulaId::Eq21_Fbar, cplx(1.0), cplx(0.0), alpha2)
              : eval_formula(FormulaId::Eq20_Favg, spec.qubit.a(), spec.qubit.b(), alpha2);
    }
    if (engine != SweepEngine::Formula) {
      ProtocolConfig cfg = ProtocolConfig::dv2cv(alpha2);
      cfg.with_fock_crosscheck = false;
      const auto f_avg = [&cfg](const QubitParams& q) { return run_dv2cv(q, cfg).f_avg; };
      row.fbar_oracle = spec.bloch_averaged
                            ? bloch_average(f_avg, spec.n_theta, spec.n_phi)
                            : f_avg(spec.qubit);
    }
    if (engine == SweepEngine::Both) row.abs_dev = std::abs(row.fbar_formula - row.fbar_oracle);
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace hqt::analytics
