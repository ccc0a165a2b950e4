#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hqt/protocols.hpp"

namespace hqt::analytics {

// Closed-form expressions, implemented as printed; the sum-consistent
// failure-probability variant (denominator 2(1+x^2) instead of 4(1+x^2))
// lives under its own ids so both can be reconciled against full-state runs.
enum class FormulaId {
  P0,                   // x^2 |a+b|^2 / (1+x^2), CV->DV all-vacuum branch
  Eq14_F,               // e^{-|d|^2} [1 + 2 x^2 Re(a* b)]
  Eq16_Pi,              // (1 - 2 x^2 Re(a* b)) / (4(1+x^2)), cases i and iii
  Eq17_Pii,             // (1 + 2 x^2 Re(a* b)) / (4(1+x^2)), cases ii and iv
  Eq18_Pv_printed,      // x^2 |a+b|^2 / (4(1+x^2))
  Eq18_Pvi_printed,     // x^2 |a-b|^2 / (4(1+x^2))
  Eq18_Pv_consistent,   // x^2 |a+b|^2 / (2(1+x^2))
  Eq18_Pvi_consistent,  // x^2 |a-b|^2 / (2(1+x^2))
  F0,                   // (1-x^2) |a-b|^2 / 2, failure branches
  Eq19_Favg,            // weighted sum assembled from the consistent set
  Eq20_Favg,            // closed form of the above
  Eq21_Fbar,            // Bloch average of the closed form
};

std::string to_string(FormulaId id);

// Evaluates a formula at the given qubit amplitudes and alpha^2, with
// x = exp(-alpha^2) and |delta|^2 = pi^2 / (16 alpha^2) derived internally.
double eval_formula(FormulaId id, cplx a, cplx b, double alpha2);

// (1/4pi) Int f(theta, phi) sin(theta) dtheta dphi by Gauss-Legendre nodes in
// cos(theta) times a uniform periodic rule in phi.
double bloch_average(const std::function<double(const QubitParams&)>& f,
                     int n_theta = 64, int n_phi = 64);

// Nodes and weights on [-1, 1].
std::vector<std::pair<double, double>> gauss_legendre(int n);

enum class SweepEngine { Formula, Oracle, Both };

struct SweepSpec {
  std::vector<double> alpha2_grid;  // strictly increasing, > 0
  bool bloch_averaged = true;       // otherwise evaluate at `qubit`
  QubitParams qubit;
  int n_theta = 64;
  int n_phi = 64;
};

struct SweepRow {
  double alpha2 = 0.0;
  double x2 = 0.0;
  double delta_abs2 = 0.0;
  double fbar_formula = 0.0;  // Eq21 closed form (or Eq20 at a fixed qubit)
  double fbar_oracle = 0.0;   // full-state DV->CV run, Bloch-averaged
  double abs_dev = 0.0;
};

struct SweepTable {
  SweepEngine engine = SweepEngine::Both;
  std::vector<SweepRow> rows;
};

/// One row per grid point; the oracle column Bloch-averages the exact-engine
/// probability-weighted fidelity of run_dv2cv.
SweepTable sweep(const SweepSpec& spec, SweepEngine engine);

}  // namespace hqt::analytics
